//! Sequences of GHSs joined by weak reductions.

use alloc::vec::Vec;
use core::fmt;

use crate::ghs::{
    canonical_key, ghs_genus, is_critical, is_strongly_irreducible_or_critical, thin_orientation,
    Ghs, GhsError, ThinId, ThinOrientation,
};
use crate::manifold::{DecompositionGraph, EdgeId};
use crate::rewrite::{apply_weak_reduction, WeakReductionMove};

/// How two neighbouring entries are related.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Link {
    /// `entries[i + 1]` is obtained from `entries[i]`.
    Down(WeakReductionMove),
    /// `entries[i]` is obtained from `entries[i + 1]`.
    Up(WeakReductionMove),
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Sog {
    pub entries: Vec<Ghs>,
    pub links: Vec<Link>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SogError {
    Empty,
    LinkCount,
    BrokenLink(usize),
    InvalidEntry(usize, GhsError),
    NoFlip,
    BarrierLost { index: usize },
}

impl fmt::Display for SogError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Empty => f.write_str("sequence has no entries"),
            Self::LinkCount => f.write_str("need exactly one link between neighbouring entries"),
            Self::BrokenLink(i) => write!(f, "link {} does not replay", i),
            Self::InvalidEntry(i, e) => write!(f, "entry {}: {}", i, e),
            Self::NoFlip => f.write_str("endpoints do not have opposite orientations"),
            Self::BarrierLost { index } => {
                write!(f, "entry {} carries no copy of the barrier", index)
            }
        }
    }
}

/// Replay every link and compare with the recorded entries up to
/// canonical form.
pub fn validate_sog(m: &DecompositionGraph, s: &Sog) -> Result<(), Vec<SogError>> {
    if s.entries.is_empty() {
        return Err(alloc::vec![SogError::Empty]);
    }
    if s.links.len() + 1 != s.entries.len() {
        return Err(alloc::vec![SogError::LinkCount]);
    }
    let mut errors = Vec::new();
    for (i, link) in s.links.iter().enumerate() {
        let (from, to, mv) = match link {
            Link::Down(mv) => (&s.entries[i], &s.entries[i + 1], mv),
            Link::Up(mv) => (&s.entries[i + 1], &s.entries[i], mv),
        };
        let ok = apply_weak_reduction(m, from, mv)
            .ok()
            .and_then(|r| canonical_key(m, &r).ok())
            .is_some_and(|k| canonical_key(m, to).ok() == Some(k));
        if !ok {
            errors.push(SogError::BrokenLink(i));
        }
    }
    if errors.is_empty() {
        Ok(())
    } else {
        Err(errors)
    }
}

/// Entries both of whose neighbours are reductions of them.
pub fn maximal_indices(s: &Sog) -> Vec<usize> {
    (1..s.entries.len().saturating_sub(1))
        .filter(|&k| matches!(s.links[k - 1], Link::Up(_)) && matches!(s.links[k], Link::Down(_)))
        .collect()
}

/// Largest entry genus.
pub fn sog_genus(m: &DecompositionGraph, s: &Sog) -> Result<u32, SogError> {
    let mut best = None;
    for (i, h) in s.entries.iter().enumerate() {
        let g = ghs_genus(m, h).map_err(|e| SogError::InvalidEntry(i, e))?;
        best = best.max(Some(g));
    }
    best.ok_or(SogError::Empty)
}

/// Barrier edges whose grade reaches `cap` but which carry no thin level.
/// Only strongly irreducible or critical GHSs of genus at most `cap` are
/// constrained; anything else passes.
pub fn barrier_thin_check(m: &DecompositionGraph, h: &Ghs, cap: u32) -> Result<(), Vec<EdgeId>> {
    if !is_strongly_irreducible_or_critical(h) {
        return Ok(());
    }
    match ghs_genus(m, h) {
        Ok(g) if g <= cap => {}
        _ => return Ok(()),
    }
    let missing: Vec<EdgeId> = m
        .edges
        .iter()
        .filter(|e| e.is_interior() && e.grade.is_some_and(|k| k >= cap))
        .filter(|e| !h.thin.iter().any(|t| t.edge == e.id))
        .map(|e| e.id)
        .collect();
    if missing.is_empty() {
        Ok(())
    } else {
        Err(missing)
    }
}

/// First entry holding two neighbouring copies of the barrier with opposite
/// orientations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FlipWitness {
    pub index: usize,
    pub levels: (ThinId, ThinId),
}

pub fn orientation_flip_witness(
    m: &DecompositionGraph,
    s: &Sog,
    edge: EdgeId,
) -> Result<FlipWitness, SogError> {
    let (Some(first), Some(last)) = (s.entries.first(), s.entries.last()) else {
        return Err(SogError::Empty);
    };
    let at = |h: &Ghs| thin_orientation(m, h, edge).map_err(|e| SogError::InvalidEntry(0, e));
    match (at(first)?, at(last)?) {
        (ThinOrientation::Oriented(a), ThinOrientation::Oriented(b)) if a != b => {}
        _ => return Err(SogError::NoFlip),
    }
    for (index, h) in s.entries.iter().enumerate() {
        match at(h)? {
            ThinOrientation::Absent => return Err(SogError::BarrierLost { index }),
            ThinOrientation::Ambiguous => {
                let mut copies: Vec<_> = h.thin.iter().filter(|t| t.edge == edge).collect();
                copies.sort_by_key(|t| t.copy);
                let pair = copies
                    .windows(2)
                    .find(|w| w[0].orientation != w[1].orientation)
                    .expect("ambiguous edge has a sign change");
                return Ok(FlipWitness {
                    index,
                    levels: (pair[0].id, pair[1].id),
                });
            }
            ThinOrientation::Oriented(_) => {}
        }
    }
    Err(SogError::NoFlip)
}

/// The two consequences of SOG reduction the lower bound relies on,
/// checked on a claimed (input, output) pair. Irreducibility of the output
/// is an assumption recorded alongside, never checked.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SogReductionContract {
    pub input: Sog,
    pub output: Sog,
    pub barrier_edges: Vec<EdgeId>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ContractViolation {
    GenusIncreased { input: u32, output: u32 },
    MaximalNotCritical(usize),
    EndpointOrientationChanged { edge: EdgeId },
    Sog(SogError),
}

impl fmt::Display for ContractViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::GenusIncreased { input, output } => {
                write!(f, "genus went up from {} to {}", input, output)
            }
            Self::MaximalNotCritical(i) => write!(f, "maximal entry {} is not critical", i),
            Self::EndpointOrientationChanged { edge } => {
                write!(f, "endpoint orientation changed at edge {}", edge)
            }
            Self::Sog(e) => write!(f, "{}", e),
        }
    }
}

impl SogReductionContract {
    pub fn check(&self, m: &DecompositionGraph) -> Result<(), Vec<ContractViolation>> {
        let mut out = Vec::new();
        match (sog_genus(m, &self.input), sog_genus(m, &self.output)) {
            (Ok(a), Ok(b)) if b > a => out.push(ContractViolation::GenusIncreased {
                input: a,
                output: b,
            }),
            (Err(e), _) | (_, Err(e)) => out.push(ContractViolation::Sog(e)),
            _ => {}
        }
        for k in maximal_indices(&self.output) {
            if !is_critical(&self.output.entries[k]) {
                out.push(ContractViolation::MaximalNotCritical(k));
            }
        }
        let ends = |s: &Sog| (s.entries.first().cloned(), s.entries.last().cloned());
        let (ia, ib) = ends(&self.input);
        let (oa, ob) = ends(&self.output);
        for e in &self.barrier_edges {
            for (x, y) in [(&ia, &oa), (&ib, &ob)] {
                let sx = x.as_ref().map(|h| thin_orientation(m, h, *e));
                let sy = y.as_ref().map(|h| thin_orientation(m, h, *e));
                if sx != sy {
                    out.push(ContractViolation::EndpointOrientationChanged { edge: *e });
                }
            }
        }
        if out.is_empty() {
            Ok(())
        } else {
            Err(out)
        }
    }
}

/// Test fixtures shared with the bounds module.
pub mod skeleton {
    use alloc::vec;

    use super::{Link, Sog};
    use crate::bounds::Scenario;
    use crate::ghs::{Fragment, Ghs, ThickFlags, ThickId, ThickLevel};
    use crate::manifold::{EdgeId, End, PieceId};
    use crate::rewrite::WeakReductionMove;
    use crate::surface::{CompressionSpec, Location, Sign, SurfaceComponent, SymbolicSurface};

    /// A single thick level of genus `genus` filling a flip-family
    /// manifold.
    pub fn amalgamated(genus: u32) -> Ghs {
        Ghs {
            thick: vec![ThickLevel {
                id: ThickId(0),
                genus,
                anchor: Fragment::Piece(PieceId(1)),
                orientation: Sign::Plus,
                flags: ThickFlags::default(),
            }],
            ..Default::default()
        }
    }

    fn ns() -> CompressionSpec {
        CompressionSpec::non_separating(0)
    }

    /// Reduce an amalgamated level of genus `g + 2` to the flip-family
    /// endpoint with barrier sign `sign`.
    pub fn split_along_barrier(g: u32, sign: Sign) -> WeakReductionMove {
        let f = SurfaceComponent::new(
            g,
            sign,
            Location::EdgeCopy {
                edge: EdgeId(0),
                near: End::A,
            },
        );
        WeakReductionMove::simple(ThickId(0), ns(), ns(), SymbolicSurface::new(vec![f]))
    }

    /// Destabilize an amalgamated level once.
    pub fn destabilize(genus: u32) -> WeakReductionMove {
        WeakReductionMove::simple(
            ThickId(0),
            ns(),
            ns(),
            SymbolicSurface::new(vec![
                SurfaceComponent::interior(0),
                SurfaceComponent::interior(genus - 1),
            ]),
        )
    }

    /// `H^1 <- K(n) <- ... <- K(top) -> ... -> K(n) -> H^*` over a flip
    /// scenario, with `n = g + 2`.
    pub fn flip_skeleton(s: &Scenario, top: u32) -> Sog {
        let n = s.g + 2;
        let mut entries = vec![s.start.clone()];
        let mut links = vec![Link::Up(split_along_barrier(s.g, Sign::Plus))];
        for k in n..top {
            entries.push(amalgamated(k));
            links.push(Link::Up(destabilize(k + 1)));
        }
        entries.push(amalgamated(top));
        for k in (n..top).rev() {
            links.push(Link::Down(destabilize(k + 1)));
            entries.push(amalgamated(k));
        }
        links.push(Link::Down(split_along_barrier(s.g, Sign::Minus)));
        entries.push(s.end.clone());
        Sog { entries, links }
    }
}
