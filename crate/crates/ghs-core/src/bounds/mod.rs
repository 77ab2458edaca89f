//! The stabilization lower bound, the counter-example families and the
//! bounded search.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;
use core::fmt;

use crate::ghs::{ghs_genus, Ghs, GhsError};
use crate::manifold::{DecompositionGraph, EdgeId, ManifoldError, PieceId};

pub mod family;
pub mod search;

pub use family::{
    closed_family, flip_family, orientation_parity, torus_boundary_family, ParityReport,
};
pub use search::{min_common_stabilization_search, SearchOptions, SearchOutcome};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundConfig {
    pub graph: DecompositionGraph,
    /// Barrier surfaces; the first is the distinguished `F_1`.
    pub barrier_edges: Vec<EdgeId>,
    /// Declared minimal splitting genus of each piece.
    pub piece_genera: BTreeMap<PieceId, u32>,
    pub n: usize,
    pub m: usize,
    /// Common barrier grade.
    pub cap: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Family {
    Flip,
    TorusBoundary,
    Closed,
    Custom,
}

impl Family {
    pub fn tag(self) -> &'static str {
        match self {
            Family::Flip => "flip",
            Family::TorusBoundary => "torus-boundary",
            Family::Closed => "closed",
            Family::Custom => "custom",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Family> {
        match tag {
            "flip" => Some(Family::Flip),
            "torus-boundary" | "torus" => Some(Family::TorusBoundary),
            "closed" => Some(Family::Closed),
            "custom" => Some(Family::Custom),
            _ => None,
        }
    }

    pub fn build(self, g: u32) -> Result<Scenario, BoundsError> {
        match self {
            Family::Flip => flip_family(g),
            Family::TorusBoundary => torus_boundary_family(g),
            Family::Closed => closed_family(g),
            Family::Custom => Err(BoundsError::BadParameter(
                "custom scenarios are read from files",
            )),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scenario {
    pub config: BoundConfig,
    pub start: Ghs,
    pub end: Ghs,
    pub family: Family,
    pub g: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BoundsError {
    BadParameter(&'static str),
    InvalidConfig(&'static str),
    CapExceedsGrades { cap: u32, grade: u32 },
    CapBelowEndpoints { cap: u32, endpoint: u32 },
    StateSpaceBudgetExceeded { explored: usize },
    Ghs(GhsError),
    Manifold(ManifoldError),
}

impl From<GhsError> for BoundsError {
    fn from(e: GhsError) -> Self {
        BoundsError::Ghs(e)
    }
}

impl From<ManifoldError> for BoundsError {
    fn from(e: ManifoldError) -> Self {
        BoundsError::Manifold(e)
    }
}

impl fmt::Display for BoundsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::BadParameter(s) => write!(f, "bad parameter: {}", s),
            Self::InvalidConfig(s) => write!(f, "invalid bound configuration: {}", s),
            Self::CapExceedsGrades { cap, grade } => {
                write!(f, "cap {} exceeds barrier grade {}", cap, grade)
            }
            Self::CapBelowEndpoints { cap, endpoint } => {
                write!(f, "cap {} is below endpoint genus {}", cap, endpoint)
            }
            Self::StateSpaceBudgetExceeded { explored } => {
                write!(f, "state budget exceeded after {} states", explored)
            }
            Self::Ghs(e) => write!(f, "{}", e),
            Self::Manifold(e) => write!(f, "{}", e),
        }
    }
}

fn checked_parts(c: &BoundConfig) -> Result<(i64, i64, i64, i64), BoundsError> {
    let Some(first) = c.barrier_edges.first() else {
        return Err(BoundsError::InvalidConfig("no barrier edges"));
    };
    let set: BTreeSet<EdgeId> = c.barrier_edges.iter().copied().collect();
    if set.len() != c.barrier_edges.len() {
        return Err(BoundsError::InvalidConfig("repeated barrier edge"));
    }
    let cut = c.graph.cut_along(&set)?;
    if cut.n != c.n || cut.m != c.m {
        return Err(BoundsError::InvalidConfig("n, m disagree with the cut"));
    }
    let mut pieces = 0i64;
    for p in &c.graph.pieces {
        let g = c
            .piece_genera
            .get(&p.id)
            .ok_or(BoundsError::InvalidConfig("missing piece genus"))?;
        pieces += i64::from(*g);
    }
    let mut others = 0i64;
    for e in &c.barrier_edges {
        if e != first {
            others += i64::from(c.graph.try_edge(*e)?.genus);
        }
    }
    let f1 = i64::from(c.graph.try_edge(*first)?.genus);
    Ok((pieces, others, f1, c.n as i64 - c.m as i64))
}

/// `min{cap, sum genus(M_k) - sum_{i != 1} genus(F_i) + n - m + 1}`.
pub fn lower_bound(c: &BoundConfig) -> Result<i64, BoundsError> {
    let (pieces, others, _, n_minus_m) = checked_parts(c)?;
    Ok(i64::from(c.cap).min(pieces - others + n_minus_m + 1))
}

/// The same bound computed through the product region around `F_1`: cut
/// along two copies of `F_1`, add the product piece (genus
/// `product_region_genus(genus(F_1))`) and subtract both copies. Not capped.
pub fn lower_bound_via_product(c: &BoundConfig) -> Result<i64, BoundsError> {
    let (pieces, others, f1, n_minus_m) = checked_parts(c)?;
    let product = i64::from(product_region_genus(f1 as u32)?);
    let (n, m) = (c.n as i64, c.m as i64);
    debug_assert_eq!(n - m, n_minus_m);
    Ok(pieces + product - others - 2 * f1 + (n + 1) - (m + 1) + 1)
}

/// Minimal genus of a splitting of `F x I` that does not separate its two
/// boundary components.
pub fn product_region_genus(f_genus: u32) -> Result<u32, BoundsError> {
    if f_genus == 0 {
        return Err(BoundsError::BadParameter(
            "surface genus must be at least 1",
        ));
    }
    Ok(2 * f_genus)
}

impl Scenario {
    pub fn start_genus(&self) -> Result<u32, BoundsError> {
        Ok(ghs_genus(&self.config.graph, &self.start)?)
    }

    pub fn end_genus(&self) -> Result<u32, BoundsError> {
        Ok(ghs_genus(&self.config.graph, &self.end)?)
    }

    /// Genus of the larger endpoint splitting, the `n` of the family
    /// statements.
    pub fn splitting_genus(&self) -> Result<u32, BoundsError> {
        Ok(self.start_genus()?.max(self.end_genus()?))
    }

    /// Stabilizations the larger endpoint needs before the two can meet.
    pub fn stabilization_count(&self) -> Result<i64, BoundsError> {
        Ok(lower_bound(&self.config)? - i64::from(self.splitting_genus()?))
    }

    /// The count as stated per family in terms of `n`.
    pub fn claimed_stabilization_count(&self) -> Result<i64, BoundsError> {
        let n = i64::from(self.splitting_genus()?);
        Ok(match self.family {
            Family::Flip => n - 2,
            Family::TorusBoundary => n - 4,
            Family::Closed => n / 2 - 3,
            Family::Custom => self.stabilization_count()?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_arithmetic() {
        for g in 2..=10u32 {
            let gi = i64::from(g);
            let f = flip_family(g).unwrap();
            assert_eq!(f.splitting_genus(), Ok(g + 2));
            assert_eq!(lower_bound(&f.config), Ok(2 * gi + 2));
            assert_eq!(f.stabilization_count(), Ok(gi));
            assert_eq!(f.claimed_stabilization_count(), f.stabilization_count());

            let t = torus_boundary_family(g).unwrap();
            assert_eq!((t.start_genus(), t.end_genus()), (Ok(g + 2), Ok(g + 3)));
            assert_eq!(lower_bound(&t.config), Ok(2 * gi + 2));
            assert_eq!(t.stabilization_count(), Ok(gi - 1));
            assert_eq!(t.claimed_stabilization_count(), t.stabilization_count());

            let c = closed_family(g).unwrap();
            assert_eq!(c.splitting_genus(), Ok(2 * g + 4));
            assert_eq!(lower_bound(&c.config), Ok(3 * gi + 3));
            assert_eq!(c.stabilization_count(), Ok(gi - 1));
            assert_eq!(c.claimed_stabilization_count(), c.stabilization_count());
        }
    }

    #[test]
    fn documented_values() {
        let f = flip_family(3).unwrap();
        assert_eq!(
            (f.splitting_genus(), lower_bound(&f.config)),
            (Ok(5), Ok(8))
        );
        let t = torus_boundary_family(4).unwrap();
        assert_eq!((t.end_genus(), lower_bound(&t.config)), (Ok(7), Ok(10)));
        let c = closed_family(5).unwrap();
        assert_eq!(
            (c.splitting_genus(), lower_bound(&c.config)),
            (Ok(14), Ok(18))
        );
        assert_eq!(c.stabilization_count(), Ok(4));
    }

    #[test]
    fn cap_wins_when_smaller() {
        let mut f = flip_family(2).unwrap();
        f.config.cap = 5;
        assert_eq!(lower_bound(&f.config), Ok(5));
    }

    #[test]
    fn nonseparating_barrier_gives_sum_plus_one() {
        // one piece whose two slots are glued to each other
        use crate::manifold::{End, Endpoint, GluingEdge, Piece, Slot, SlotId};
        let graph = DecompositionGraph {
            pieces: alloc::vec![Piece {
                id: PieceId(1),
                slots: alloc::vec![
                    Slot {
                        id: SlotId(0),
                        genus: 2
                    },
                    Slot {
                        id: SlotId(1),
                        genus: 2
                    }
                ],
                splittings: Vec::new(),
                closed: false,
            }],
            edges: alloc::vec![GluingEdge {
                id: EdgeId(0),
                a: (PieceId(1), SlotId(0)),
                b: Endpoint::Slot(PieceId(1), SlotId(1)),
                genus: 2,
                grade: Some(100),
                reference: End::A,
            }],
            assumptions: Vec::new(),
        };
        let c = BoundConfig {
            graph,
            barrier_edges: alloc::vec![EdgeId(0)],
            piece_genera: [(PieceId(1), 7)].into_iter().collect(),
            n: 1,
            m: 1,
            cap: 100,
        };
        assert_eq!(lower_bound(&c), Ok(8));
        let mut bad = c.clone();
        bad.m = 2;
        assert!(matches!(
            lower_bound(&bad),
            Err(BoundsError::InvalidConfig(_))
        ));
    }

    #[test]
    fn product_chain_agrees() {
        assert_eq!(product_region_genus(2), Ok(4));
        assert_eq!(product_region_genus(1), Ok(2));
        assert!(product_region_genus(0).is_err());
        assert_eq!(
            lower_bound_via_product(&flip_family(2).unwrap().config),
            Ok(6)
        );
        for g in 2..=10 {
            for s in [flip_family(g), torus_boundary_family(g), closed_family(g)] {
                let s = s.unwrap();
                let capped = lower_bound_via_product(&s.config)
                    .unwrap()
                    .min(i64::from(s.config.cap));
                assert_eq!(Ok(capped), lower_bound(&s.config));
            }
        }
    }
}
