//! Generalized Heegaard splittings over a decomposition graph.
//!
//! Thin levels are parallel copies of gluing surfaces, ordered along their
//! edge from end `A` to end `B` by their `copy` position. The complement of
//! the thin levels is described by [`Fragment`]s: whole pieces, and the
//! product gaps between consecutive copies on one edge. Regions, the sides
//! of each thin level and the above/below relation are derived from this
//! data on demand (see [`Layout`]); nothing about them is stored twice.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::manifold::{
    DecompositionGraph, DisjointSets, EdgeId, End, Endpoint, ManifoldError, PieceId, Side, SlotId,
    Splitting,
};
use crate::surface::{Sign, SymbolicSurface};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ThickId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ThinId(pub u32);

impl fmt::Display for ThickId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for ThinId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A piece of the complement of the thin levels before regions are merged.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Fragment {
    Piece(PieceId),
    /// The product region on `edge` between the copy at position `after`
    /// and the next copy towards end `B`.
    Gap {
        edge: EdgeId,
        after: u32,
    },
}

impl fmt::Display for Fragment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Fragment::Piece(p) => write!(f, "piece:{}", p),
            Fragment::Gap { edge, after } => write!(f, "gap:{}:{}", edge, after),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ThickFlags {
    pub strongly_irreducible: bool,
    pub critical: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ThickLevel {
    pub id: ThickId,
    pub genus: u32,
    /// Any fragment of the region the level lives in.
    pub anchor: Fragment,
    /// Orientation relative to the declared pattern of the piece's
    /// splittings; only meaningful in single-piece regions.
    pub orientation: Sign,
    pub flags: ThickFlags,
}

impl ThickLevel {
    pub fn surface(&self) -> SymbolicSurface {
        SymbolicSurface::connected(self.genus)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ThinLevel {
    pub id: ThinId,
    pub genus: u32,
    pub edge: EdgeId,
    /// Position along the edge, increasing from end `A` to end `B`.
    pub copy: u32,
    /// `Plus` when the edge's reference side is above this level.
    pub orientation: Sign,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Ghs {
    pub thick: Vec<ThickLevel>,
    pub thin: Vec<ThinLevel>,
    /// Declared `(upper, lower)` pairs, merged with the derived order.
    pub above: Vec<(ThinId, ThinId)>,
    /// Thin levels bounding the submanifold this GHS splits, for
    /// restrictions `H(N)`. Empty for a GHS of the whole manifold.
    pub frontier: BTreeSet<ThinId>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GhsError {
    RegionWithoutThick { region: Fragment },
    RegionWithTwoThicks { region: Fragment },
    OrientationIncoherent { thick: ThickId },
    OrderCycle,
    GenusTooSmall { thick: ThickId },
    UnknownEdge { thin: ThinId },
    ThinGenusMismatch { thin: ThinId },
    DuplicateCopy { edge: EdgeId },
    BadAnchor { thick: ThickId },
    DuplicateId,
    ConflictingFlags { thick: ThickId },
    UnknownThin { thin: ThinId },
    BadFrontier { thin: ThinId },
    InvalidGhs(Vec<GhsError>),
    BadRegionBoundary,
    NotAnAmalgamatedSplitting,
    ZeroStabilization,
    UnknownEdgeId(EdgeId),
    Manifold(ManifoldError),
}

impl From<ManifoldError> for GhsError {
    fn from(e: ManifoldError) -> Self {
        GhsError::Manifold(e)
    }
}

impl fmt::Display for GhsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::RegionWithoutThick { region } => {
                write!(f, "region at {} has no thick level", region)
            }
            Self::RegionWithTwoThicks { region } => {
                write!(f, "region at {} has more than one thick level", region)
            }
            Self::OrientationIncoherent { thick } => {
                write!(
                    f,
                    "thick level {} disagrees with the thin level orientations",
                    thick
                )
            }
            Self::OrderCycle => f.write_str("thin levels are not partially ordered"),
            Self::GenusTooSmall { thick } => {
                write!(f, "thick level {} is too small to split its region", thick)
            }
            Self::UnknownEdge { thin } => write!(f, "thin level {} lies on an unknown edge", thin),
            Self::ThinGenusMismatch { thin } => {
                write!(f, "thin level {} does not match its edge genus", thin)
            }
            Self::DuplicateCopy { edge } => {
                write!(f, "two thin levels share a position on edge {}", edge)
            }
            Self::BadAnchor { thick } => write!(f, "thick level {} is anchored nowhere", thick),
            Self::DuplicateId => f.write_str("duplicate level id"),
            Self::ConflictingFlags { thick } => {
                write!(
                    f,
                    "thick level {} is flagged both strongly irreducible and critical",
                    thick
                )
            }
            Self::UnknownThin { thin } => write!(f, "unknown thin level {}", thin),
            Self::BadFrontier { thin } => {
                write!(f, "frontier level {} does not bound the domain", thin)
            }
            Self::InvalidGhs(errs) => {
                f.write_str("invalid GHS:")?;
                for e in errs {
                    write!(f, " {};", e)?;
                }
                Ok(())
            }
            Self::BadRegionBoundary => f.write_str("region is not bounded by thin levels"),
            Self::NotAnAmalgamatedSplitting => {
                f.write_str("stabilization needs a single thick level and no interior thin levels")
            }
            Self::ZeroStabilization => f.write_str("stabilization count must be positive"),
            Self::UnknownEdgeId(e) => write!(f, "unknown edge {}", e),
            Self::Manifold(e) => write!(f, "{}", e),
        }
    }
}

/// One side of a thin level as seen from a region.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Adjacency {
    pub thin: usize,
    /// Side of the region's thick level the thin level lies on.
    pub side: Side,
}

/// Derived region structure of a GHS over a decomposition graph.
#[derive(Clone, Debug)]
pub(crate) struct Layout {
    /// Thin level indices per edge, ordered from `A` to `B`.
    pub per_edge: BTreeMap<EdgeId, Vec<usize>>,
    pub fragments: Vec<Fragment>,
    pub region_of: BTreeMap<Fragment, usize>,
    /// Fragments of each region, sorted; the first is the canonical anchor.
    pub regions: Vec<Vec<Fragment>>,
    /// Fragment on the `A` side and (if any) the `B` side of each thin level.
    pub sides: Vec<(Fragment, Option<Fragment>)>,
    /// Whether each thin level lies in the interior of the manifold.
    pub interior: Vec<bool>,
    /// Region of each thick level.
    pub thick_region: Vec<Option<usize>>,
}

fn above_end(edge_reference: End, orientation: Sign) -> End {
    if orientation.is_plus() {
        edge_reference
    } else {
        edge_reference.other()
    }
}

impl Layout {
    pub(crate) fn new(m: &DecompositionGraph, h: &Ghs) -> Result<Layout, Vec<GhsError>> {
        let mut errors = Vec::new();

        let thick_ids: BTreeSet<ThickId> = h.thick.iter().map(|t| t.id).collect();
        let thin_ids: BTreeSet<ThinId> = h.thin.iter().map(|t| t.id).collect();
        if thick_ids.len() != h.thick.len() || thin_ids.len() != h.thin.len() {
            errors.push(GhsError::DuplicateId);
        }

        let mut per_edge: BTreeMap<EdgeId, Vec<usize>> = BTreeMap::new();
        for (i, t) in h.thin.iter().enumerate() {
            match m.edge(t.edge) {
                None => errors.push(GhsError::UnknownEdge { thin: t.id }),
                Some(e) => {
                    if e.genus != t.genus {
                        errors.push(GhsError::ThinGenusMismatch { thin: t.id });
                    }
                    per_edge.entry(t.edge).or_default().push(i);
                }
            }
        }
        for (edge, list) in per_edge.iter_mut() {
            list.sort_by_key(|&i| h.thin[i].copy);
            if list
                .windows(2)
                .any(|w| h.thin[w[0]].copy == h.thin[w[1]].copy)
            {
                errors.push(GhsError::DuplicateCopy { edge: *edge });
            }
        }
        if !errors.is_empty() {
            return Err(errors);
        }

        let mut fragments: Vec<Fragment> = m.pieces.iter().map(|p| Fragment::Piece(p.id)).collect();
        let mut sides = vec![(Fragment::Piece(PieceId(0)), None); h.thin.len()];
        let mut interior = vec![true; h.thin.len()];
        for (edge_id, list) in &per_edge {
            let edge = m.edge(*edge_id).expect("checked above");
            let k = list.len();
            for (ord, &i) in list.iter().enumerate() {
                let a_side = if ord == 0 {
                    Fragment::Piece(edge.a.0)
                } else {
                    Fragment::Gap {
                        edge: *edge_id,
                        after: h.thin[list[ord - 1]].copy,
                    }
                };
                let b_side = if ord + 1 < k {
                    let g = Fragment::Gap {
                        edge: *edge_id,
                        after: h.thin[i].copy,
                    };
                    fragments.push(g);
                    Some(g)
                } else {
                    match edge.b {
                        Endpoint::Slot(p, _) => Some(Fragment::Piece(p)),
                        Endpoint::Boundary => None,
                    }
                };
                if b_side.is_none() {
                    interior[i] = false;
                }
                sides[i] = (a_side, b_side);
            }
        }
        for t in &h.frontier {
            match h.thin.iter().position(|x| x.id == *t) {
                Some(i) => interior[i] = false,
                None => errors.push(GhsError::UnknownThin { thin: *t }),
            }
        }

        let index: BTreeMap<Fragment, usize> =
            fragments.iter().enumerate().map(|(i, f)| (*f, i)).collect();
        let mut sets = DisjointSets::new(fragments.len());
        for e in &m.edges {
            if per_edge.get(&e.id).is_none_or(|l| l.is_empty()) {
                if let Endpoint::Slot(pb, _) = e.b {
                    if let (Some(&i), Some(&j)) = (
                        index.get(&Fragment::Piece(e.a.0)),
                        index.get(&Fragment::Piece(pb)),
                    ) {
                        sets.union(i, j);
                    }
                }
            }
        }
        let mut grouped: BTreeMap<usize, Vec<Fragment>> = BTreeMap::new();
        for (i, f) in fragments.iter().enumerate() {
            grouped.entry(sets.find(i)).or_default().push(*f);
        }
        let mut regions: Vec<Vec<Fragment>> = grouped.into_values().collect();
        for r in regions.iter_mut() {
            r.sort();
        }
        regions.sort();
        let mut region_of = BTreeMap::new();
        for (ri, r) in regions.iter().enumerate() {
            for f in r {
                region_of.insert(*f, ri);
            }
        }

        let mut thick_region = Vec::with_capacity(h.thick.len());
        for t in &h.thick {
            let r = region_of.get(&t.anchor).copied();
            if r.is_none() {
                errors.push(GhsError::BadAnchor { thick: t.id });
            }
            if t.flags.strongly_irreducible && t.flags.critical {
                errors.push(GhsError::ConflictingFlags { thick: t.id });
            }
            thick_region.push(r);
        }

        if !errors.is_empty() {
            return Err(errors);
        }
        Ok(Layout {
            per_edge,
            fragments,
            region_of,
            regions,
            sides,
            interior,
            thick_region,
        })
    }

    pub(crate) fn thicks_in(&self, region: usize) -> Vec<usize> {
        self.thick_region
            .iter()
            .enumerate()
            .filter(|(_, r)| **r == Some(region))
            .map(|(i, _)| i)
            .collect()
    }

    /// The end of thin level `i` whose side is above it.
    pub(crate) fn above_end(&self, m: &DecompositionGraph, h: &Ghs, i: usize) -> End {
        let t = &h.thin[i];
        let reference = m.edge(t.edge).map_or(End::A, |e| e.reference);
        above_end(reference, t.orientation)
    }

    /// Thin levels bounding `region`, with the side of the region's thick
    /// level they lie on. A level with the region on both sides shows up
    /// twice.
    pub(crate) fn adjacent(
        &self,
        m: &DecompositionGraph,
        h: &Ghs,
        region: usize,
    ) -> Vec<Adjacency> {
        let mut out = Vec::new();
        for (i, (a, b)) in self.sides.iter().enumerate() {
            let up = self.above_end(m, h, i);
            if self.region_of.get(a) == Some(&region) {
                // region on the A side; the thin level is below the region's
                // thick level exactly when the region is above the thin level
                let region_above = up == End::A;
                out.push(Adjacency {
                    thin: i,
                    side: if region_above {
                        Side::Below
                    } else {
                        Side::Above
                    },
                });
            }
            if let Some(b) = b {
                if self.region_of.get(b) == Some(&region) {
                    let region_above = up == End::B;
                    out.push(Adjacency {
                        thin: i,
                        side: if region_above {
                            Side::Below
                        } else {
                            Side::Above
                        },
                    });
                }
            }
        }
        out
    }

    /// Side each slot of a single-piece region lies on, when a thin level
    /// pins it down.
    fn slot_sides(
        &self,
        m: &DecompositionGraph,
        h: &Ghs,
        piece: PieceId,
        region: usize,
    ) -> BTreeMap<SlotId, Side> {
        let mut out = BTreeMap::new();
        let Some(p) = m.piece(piece) else {
            return out;
        };
        for slot in &p.slots {
            let Some((edge, end)) = m.edge_at(piece, slot.id) else {
                continue;
            };
            let Some(list) = self.per_edge.get(&edge.id).filter(|l| !l.is_empty()) else {
                continue;
            };
            let i = if end == End::A {
                list[0]
            } else {
                list[list.len() - 1]
            };
            let region_above = self.above_end(m, h, i) == end;
            debug_assert_eq!(
                self.region_of.get(&Fragment::Piece(piece)).copied(),
                Some(region)
            );
            out.insert(
                slot.id,
                if region_above {
                    Side::Below
                } else {
                    Side::Above
                },
            );
        }
        out
    }

    /// Smallest genus a thick level with the given orientation can have in
    /// `region`.
    pub(crate) fn required_genus(
        &self,
        m: &DecompositionGraph,
        h: &Ghs,
        region: usize,
        orientation: Sign,
    ) -> u32 {
        let adj = self.adjacent(m, h, region);
        let sum = |side: Side| -> u32 {
            adj.iter()
                .filter(|a| a.side == side)
                .map(|a| h.thin[a.thin].genus)
                .sum()
        };
        let compression_bound = sum(Side::Above).max(sum(Side::Below));

        let frags = &self.regions[region];
        if let [Fragment::Piece(pid)] = frags.as_slice() {
            if let Some(piece) = m.piece(*pid) {
                if !piece.splittings.is_empty() {
                    let sides = self.slot_sides(m, h, *pid, region);
                    let best = piece
                        .splittings
                        .iter()
                        .map(|s| splitting_cost(piece, s, &sides, orientation))
                        .min()
                        .unwrap_or(0);
                    return compression_bound.max(best);
                }
            }
        }
        compression_bound
    }

    /// Orientation needing the smaller genus, `fallback` on ties.
    pub(crate) fn best_orientation(
        &self,
        m: &DecompositionGraph,
        h: &Ghs,
        region: usize,
        fallback: Sign,
    ) -> Sign {
        let own = self.required_genus(m, h, region, fallback);
        let other = self.required_genus(m, h, region, -fallback);
        if other < own {
            -fallback
        } else {
            fallback
        }
    }

    pub(crate) fn canonical_anchor(&self, region: usize) -> Fragment {
        self.regions[region][0]
    }
}

/// Genus of `s` after boundary-stabilizing along every slot whose side
/// disagrees with `sides`.
fn splitting_cost(
    piece: &crate::manifold::Piece,
    s: &Splitting,
    sides: &BTreeMap<SlotId, Side>,
    orientation: Sign,
) -> u32 {
    let mut genus = s.genus;
    for (slot, side) in sides {
        let declared = s.pattern.get(slot).copied().unwrap_or(Side::Below);
        let oriented = if orientation.is_plus() {
            declared
        } else {
            declared.flip()
        };
        if oriented != *side {
            genus += piece.slot(*slot).map_or(0, |x| x.genus);
        }
    }
    genus
}

/// Give every thick level the orientation needing the smaller genus,
/// keeping its current one on ties.
pub fn derive_thick_orientations(m: &DecompositionGraph, h: &Ghs) -> Result<Ghs, GhsError> {
    let layout = Layout::new(m, h).map_err(GhsError::InvalidGhs)?;
    let mut out = h.clone();
    for (i, t) in out.thick.iter_mut().enumerate() {
        if let Some(r) = layout.thick_region[i] {
            t.orientation = layout.best_orientation(m, h, r, t.orientation);
        }
    }
    Ok(out)
}

/// Put one thick level in every region of the complement of `thin`, each
/// of the smallest genus its region allows plus `extra[r % extra.len()]`.
/// Orientations are the cheaper ones.
pub fn complete_with_thick_levels(
    m: &DecompositionGraph,
    thin: Vec<ThinLevel>,
    extra: &[u32],
) -> Result<Ghs, GhsError> {
    let bare = Ghs {
        thin,
        ..Ghs::default()
    };
    let layout = Layout::new(m, &bare).map_err(GhsError::InvalidGhs)?;
    let thick = (0..layout.regions.len())
        .map(|r| {
            let plus = layout.required_genus(m, &bare, r, Sign::Plus);
            let minus = layout.required_genus(m, &bare, r, Sign::Minus);
            let add = if extra.is_empty() {
                0
            } else {
                extra[r % extra.len()]
            };
            ThickLevel {
                id: ThickId(r as u32),
                genus: plus.min(minus) + add,
                anchor: layout.regions[r][0],
                orientation: Sign::from_bool(plus <= minus),
                flags: ThickFlags::default(),
            }
        })
        .collect();
    Ok(Ghs { thick, ..bare })
}

/// Check the three GHS conditions plus the level invariants.
pub fn validate_ghs(m: &DecompositionGraph, h: &Ghs) -> Result<(), Vec<GhsError>> {
    let layout = Layout::new(m, h)?;
    let mut errors = Vec::new();

    for (p, q) in &h.above {
        for id in [p, q] {
            if !h.thin.iter().any(|t| t.id == *id) {
                errors.push(GhsError::UnknownThin { thin: *id });
            }
        }
    }

    for (ri, _) in layout.regions.iter().enumerate() {
        let thicks = layout.thicks_in(ri);
        let anchor = layout.canonical_anchor(ri);
        match thicks.len() {
            0 => {
                let adj = layout.adjacent(m, h, ri);
                let outside = !h.frontier.is_empty()
                    && adj.iter().all(|a| h.frontier.contains(&h.thin[a.thin].id));
                if !outside {
                    errors.push(GhsError::RegionWithoutThick { region: anchor });
                }
            }
            1 => {
                let t = &h.thick[thicks[0]];
                let own = layout.required_genus(m, h, ri, t.orientation);
                if t.genus < own {
                    let other = layout.required_genus(m, h, ri, -t.orientation);
                    errors.push(if t.genus >= other {
                        GhsError::OrientationIncoherent { thick: t.id }
                    } else {
                        GhsError::GenusTooSmall { thick: t.id }
                    });
                }
            }
            _ => errors.push(GhsError::RegionWithTwoThicks { region: anchor }),
        }
    }

    for t in &h.frontier {
        let Some(i) = h.thin.iter().position(|x| x.id == *t) else {
            continue;
        };
        let (a, b) = layout.sides[i];
        let touches = [Some(a), b].into_iter().flatten().any(|f| {
            layout
                .region_of
                .get(&f)
                .is_some_and(|r| !layout.thicks_in(*r).is_empty())
        });
        if !touches {
            errors.push(GhsError::BadFrontier { thin: *t });
        }
    }

    if has_order_cycle(m, h, &layout) {
        errors.push(GhsError::OrderCycle);
    }

    if errors.is_empty() {
        Ok(())
    } else {
        Err(errors)
    }
}

/// Derived "above" pairs `(upper, lower)` as thin level indices: in each
/// region, levels above the thick level are above those below it.
pub(crate) fn derived_order(
    m: &DecompositionGraph,
    h: &Ghs,
    layout: &Layout,
) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for ri in 0..layout.regions.len() {
        if layout.thicks_in(ri).is_empty() {
            continue;
        }
        let adj = layout.adjacent(m, h, ri);
        for up in adj.iter().filter(|a| a.side == Side::Above) {
            for down in adj.iter().filter(|a| a.side == Side::Below) {
                out.push((up.thin, down.thin));
            }
        }
    }
    out
}

fn has_order_cycle(m: &DecompositionGraph, h: &Ghs, layout: &Layout) -> bool {
    let n = h.thin.len();
    let mut succ: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for (u, d) in derived_order(m, h, layout) {
        succ[u].insert(d);
    }
    let pos: BTreeMap<ThinId, usize> = h.thin.iter().enumerate().map(|(i, t)| (t.id, i)).collect();
    for (p, q) in &h.above {
        if let (Some(&u), Some(&d)) = (pos.get(p), pos.get(q)) {
            succ[u].insert(d);
        }
    }
    // Kahn's algorithm; a self-loop is a cycle too
    let mut indeg = vec![0usize; n];
    for s in &succ {
        for &d in s {
            indeg[d] += 1;
        }
    }
    let mut stack: Vec<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
    let mut seen = 0;
    while let Some(u) = stack.pop() {
        seen += 1;
        for &d in &succ[u] {
            indeg[d] -= 1;
            if indeg[d] == 0 {
                stack.push(d);
            }
        }
    }
    seen != n
}

/// The genus formula evaluated without validation. Interior thin levels are
/// those off the ambient boundary and off the frontier.
pub fn genus_formula(m: &DecompositionGraph, h: &Ghs) -> i64 {
    let interior = interior_flags(m, h);
    let thick: i64 = h.thick.iter().map(|t| i64::from(t.genus)).sum();
    let mut thin = 0i64;
    let mut count = 0i64;
    for (t, int) in h.thin.iter().zip(interior) {
        if int {
            thin += i64::from(t.genus);
            count += 1;
        }
    }
    thick - thin + count - h.thick.len() as i64 + 1
}

fn interior_flags(m: &DecompositionGraph, h: &Ghs) -> Vec<bool> {
    h.thin
        .iter()
        .map(|t| {
            if h.frontier.contains(&t.id) {
                return false;
            }
            match m.edge(t.edge) {
                Some(e) if !e.is_interior() => {
                    // the last copy on a boundary edge is the boundary itself
                    h.thin.iter().any(|o| o.edge == t.edge && o.copy > t.copy)
                }
                _ => true,
            }
        })
        .collect()
}

/// Genus of the amalgamation.
pub fn ghs_genus(m: &DecompositionGraph, h: &Ghs) -> Result<u32, GhsError> {
    validate_ghs(m, h).map_err(GhsError::InvalidGhs)?;
    let g = genus_formula(m, h);
    u32::try_from(g).map_err(|_| GhsError::InvalidGhs(vec![GhsError::OrderCycle]))
}

/// The GHS `H(N)` of the component `N` of the complement of `cut` that
/// contains `anchor`. Levels of `cut` on the boundary of `N` become
/// frontier levels.
pub fn restrict(
    m: &DecompositionGraph,
    h: &Ghs,
    cut: &BTreeSet<ThinId>,
    anchor: Fragment,
) -> Result<Ghs, GhsError> {
    let layout = Layout::new(m, h).map_err(GhsError::InvalidGhs)?;
    if cut.iter().any(|id| !h.thin.iter().any(|t| t.id == *id)) {
        return Err(GhsError::BadRegionBoundary);
    }
    let index: BTreeMap<Fragment, usize> = layout
        .fragments
        .iter()
        .enumerate()
        .map(|(i, f)| (*f, i))
        .collect();
    let Some(&start) = index.get(&anchor) else {
        return Err(GhsError::BadRegionBoundary);
    };
    let mut sets = DisjointSets::new(layout.fragments.len());
    for e in &m.edges {
        if layout.per_edge.get(&e.id).is_none_or(|l| l.is_empty()) {
            if let Endpoint::Slot(pb, _) = e.b {
                sets.union(index[&Fragment::Piece(e.a.0)], index[&Fragment::Piece(pb)]);
            }
        }
    }
    for (i, t) in h.thin.iter().enumerate() {
        if cut.contains(&t.id) || h.frontier.contains(&t.id) {
            continue;
        }
        if let (a, Some(b)) = layout.sides[i] {
            sets.union(index[&a], index[&b]);
        }
    }
    let root = sets.find(start);
    let mut inside = |f: &Fragment| sets.find(index[f]) == root;

    let thick: Vec<ThickLevel> = h
        .thick
        .iter()
        .filter(|t| inside(&t.anchor))
        .copied()
        .collect();
    let mut thin = Vec::new();
    let mut frontier = BTreeSet::new();
    for (i, t) in h.thin.iter().enumerate() {
        let (a, b) = layout.sides[i];
        let touches = inside(&a) || b.as_ref().is_some_and(&mut inside);
        if !touches {
            continue;
        }
        if cut.contains(&t.id) || h.frontier.contains(&t.id) {
            frontier.insert(t.id);
        }
        thin.push(*t);
    }
    let kept: BTreeSet<ThinId> = thin.iter().map(|t| t.id).collect();
    let above = h
        .above
        .iter()
        .filter(|(p, q)| kept.contains(p) && kept.contains(q))
        .copied()
        .collect();
    Ok(Ghs {
        thick,
        thin,
        above,
        frontier,
    })
}

/// Both sides of the genus sum over a set of interior thin levels.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GenusSum {
    pub lhs: i64,
    pub rhs: i64,
    pub regions: usize,
    pub equal: bool,
}

/// Cut along `cut`, restrict to every resulting region and compare
/// `genus(H)` with `sum genus(H(M_i)) - genus(F) + |F| - n + 1`.
pub fn genus_sum_check(
    m: &DecompositionGraph,
    h: &Ghs,
    cut: &BTreeSet<ThinId>,
) -> Result<GenusSum, GhsError> {
    validate_ghs(m, h).map_err(GhsError::InvalidGhs)?;
    let interior = interior_flags(m, h);
    for id in cut {
        match h.thin.iter().position(|t| t.id == *id) {
            Some(i) if interior[i] => {}
            _ => return Err(GhsError::BadRegionBoundary),
        }
    }
    let layout = Layout::new(m, h).map_err(GhsError::InvalidGhs)?;
    let lhs = genus_formula(m, h);

    // one restriction per component; components are found by restricting
    // from each thick anchor and deduplicating on the thick set
    let mut seen: BTreeSet<Vec<ThickId>> = BTreeSet::new();
    let mut sum = 0i64;
    for t in &h.thick {
        let sub = restrict(m, h, cut, t.anchor)?;
        let mut ids: Vec<ThickId> = sub.thick.iter().map(|x| x.id).collect();
        ids.sort();
        if seen.insert(ids) {
            sum += genus_formula(m, &sub);
        }
    }
    // regions with no thick level cannot occur in a valid GHS of M
    debug_assert!(layout
        .regions
        .iter()
        .enumerate()
        .all(|(ri, _)| !layout.thicks_in(ri).is_empty() || !h.frontier.is_empty()));
    let n = seen.len() as i64;
    let cut_genus: i64 = h
        .thin
        .iter()
        .filter(|t| cut.contains(&t.id))
        .map(|t| i64::from(t.genus))
        .sum();
    let rhs = sum - cut_genus + cut.len() as i64 - n + 1;
    Ok(GenusSum {
        lhs,
        rhs,
        regions: seen.len(),
        equal: lhs == rhs,
    })
}

/// Negate every orientation and reverse the declared order.
pub fn reverse_orientation(h: &Ghs) -> Ghs {
    let mut out = h.clone();
    for t in out.thick.iter_mut() {
        t.orientation = -t.orientation;
    }
    for t in out.thin.iter_mut() {
        t.orientation = -t.orientation;
    }
    for pair in out.above.iter_mut() {
        *pair = (pair.1, pair.0);
    }
    out
}

/// Stabilize a GHS with a single thick level `k` times.
pub fn stabilize(m: &DecompositionGraph, h: &Ghs, k: u32) -> Result<Ghs, GhsError> {
    if k == 0 {
        return Err(GhsError::ZeroStabilization);
    }
    let interior = interior_flags(m, h);
    if h.thick.len() != 1 || interior.iter().any(|&i| i) {
        return Err(GhsError::NotAnAmalgamatedSplitting);
    }
    let mut out = h.clone();
    out.thick[0].genus += k;
    out.thick[0].flags = ThickFlags::default();
    Ok(out)
}

/// Boundary-stabilize a declared splitting of a piece along one of its
/// slots.
pub fn boundary_stabilize(
    m: &DecompositionGraph,
    piece: PieceId,
    splitting: &str,
    slot: SlotId,
    new_name: &str,
) -> Result<Splitting, GhsError> {
    let p = m.piece(piece).ok_or(ManifoldError::UnknownPiece(piece))?;
    Ok(p.boundary_stabilize(splitting, slot, new_name)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ThinOrientation {
    Oriented(Sign),
    Absent,
    Ambiguous,
}

/// Orientation of the thin level carried by an edge, relative to the edge's
/// reference side.
pub fn thin_orientation(
    m: &DecompositionGraph,
    h: &Ghs,
    edge: EdgeId,
) -> Result<ThinOrientation, GhsError> {
    m.edge(edge).ok_or(GhsError::UnknownEdgeId(edge))?;
    let signs: BTreeSet<Sign> = h
        .thin
        .iter()
        .filter(|t| t.edge == edge)
        .map(|t| t.orientation)
        .collect();
    Ok(match signs.len() {
        0 => ThinOrientation::Absent,
        1 => ThinOrientation::Oriented(*signs.iter().next().unwrap()),
        _ => ThinOrientation::Ambiguous,
    })
}

/// Identity of a GHS up to level ids and thick orientations: the sign
/// sequence on every edge and the sorted (region, genus) list.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalKey {
    pub edges: Vec<(EdgeId, Vec<Sign>)>,
    pub regions: Vec<(Fragment, u32)>,
    pub frontier: Vec<(EdgeId, u32)>,
}

/// Renumber copies to `0..k` on every edge, move anchors to the canonical
/// fragment of their region, renumber ids in order and drop declared order
/// pairs that the derived order already implies.
pub fn canonicalize(m: &DecompositionGraph, h: &Ghs) -> Result<Ghs, GhsError> {
    let layout = Layout::new(m, h).map_err(GhsError::InvalidGhs)?;
    let mut out = h.clone();
    let mut renumber: BTreeMap<(EdgeId, u32), u32> = BTreeMap::new();
    for (edge, list) in &layout.per_edge {
        for (ord, &i) in list.iter().enumerate() {
            renumber.insert((*edge, h.thin[i].copy), ord as u32);
            out.thin[i].copy = ord as u32;
        }
    }
    for (i, t) in out.thick.iter_mut().enumerate() {
        let region = layout.thick_region[i].expect("layout checked anchors");
        t.anchor = match layout.canonical_anchor(region) {
            Fragment::Gap { edge, after } => Fragment::Gap {
                edge,
                after: renumber[&(edge, after)],
            },
            f => f,
        };
    }
    // stable ids: thin levels by (edge, copy), thick levels by anchor
    let mut thin_order: Vec<usize> = (0..out.thin.len()).collect();
    thin_order.sort_by_key(|&i| (out.thin[i].edge, out.thin[i].copy));
    let thin_map: BTreeMap<ThinId, ThinId> = thin_order
        .iter()
        .enumerate()
        .map(|(new, &i)| (out.thin[i].id, ThinId(new as u32)))
        .collect();
    let mut thin: Vec<ThinLevel> = thin_order.iter().map(|&i| out.thin[i]).collect();
    for t in thin.iter_mut() {
        t.id = thin_map[&t.id];
    }
    let mut thick = out.thick.clone();
    thick.sort_by_key(|t| (t.anchor, t.genus));
    for (i, t) in thick.iter_mut().enumerate() {
        t.id = ThickId(i as u32);
    }
    let mut above: Vec<(ThinId, ThinId)> = out
        .above
        .iter()
        .filter_map(|(p, q)| Some((*thin_map.get(p)?, *thin_map.get(q)?)))
        .collect();
    above.sort();
    above.dedup();
    let frontier = out
        .frontier
        .iter()
        .filter_map(|t| thin_map.get(t).copied())
        .collect();
    Ok(Ghs {
        thick,
        thin,
        above,
        frontier,
    })
}

pub fn canonical_key(m: &DecompositionGraph, h: &Ghs) -> Result<CanonicalKey, GhsError> {
    let c = canonicalize(m, h)?;
    let mut edges: BTreeMap<EdgeId, Vec<Sign>> = BTreeMap::new();
    for t in &c.thin {
        edges.entry(t.edge).or_default().push(t.orientation);
    }
    let mut regions: Vec<(Fragment, u32)> = c.thick.iter().map(|t| (t.anchor, t.genus)).collect();
    regions.sort();
    let mut frontier: Vec<(EdgeId, u32)> = c
        .thin
        .iter()
        .filter(|t| c.frontier.contains(&t.id))
        .map(|t| (t.edge, t.copy))
        .collect();
    frontier.sort();
    Ok(CanonicalKey {
        edges: edges.into_iter().collect(),
        regions,
        frontier,
    })
}

/// Thin levels sitting on interior positions (off the boundary and the
/// frontier).
pub fn interior_thin_ids(m: &DecompositionGraph, h: &Ghs) -> Vec<ThinId> {
    h.thin
        .iter()
        .zip(interior_flags(m, h))
        .filter(|(_, i)| *i)
        .map(|(t, _)| t.id)
        .collect()
}

/// Strongly irreducible: every thick level flagged so. Critical: all but
/// exactly one flagged strongly irreducible, that one flagged critical.
pub fn is_strongly_irreducible_or_critical(h: &Ghs) -> bool {
    if h.thick.is_empty() {
        return false;
    }
    let si = h
        .thick
        .iter()
        .filter(|t| t.flags.strongly_irreducible)
        .count();
    let crit = h.thick.iter().filter(|t| t.flags.critical).count();
    si == h.thick.len() || (crit == 1 && si + 1 == h.thick.len())
}

pub fn is_critical(h: &Ghs) -> bool {
    let si = h
        .thick
        .iter()
        .filter(|t| t.flags.strongly_irreducible)
        .count();
    let crit = h.thick.iter().filter(|t| t.flags.critical).count();
    crit == 1 && si + 1 == h.thick.len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::family::{closed_family, flip_family, torus_boundary_family};

    fn ids(xs: &[u32]) -> BTreeSet<ThinId> {
        xs.iter().map(|&x| ThinId(x)).collect()
    }

    #[test]
    fn flip_start_is_valid_and_has_genus_g_plus_2() {
        for g in 2..6 {
            let s = flip_family(g).unwrap();
            let m = &s.config.graph;
            assert_eq!(validate_ghs(m, &s.start), Ok(()));
            assert_eq!(validate_ghs(m, &s.end), Ok(()));
            assert_eq!(ghs_genus(m, &s.start), Ok(g + 2));
        }
    }

    #[test]
    fn two_thicks_in_one_region_rejected() {
        let s = flip_family(2).unwrap();
        let mut h = s.start.clone();
        h.thick[1].anchor = h.thick[0].anchor;
        let errs = validate_ghs(&s.config.graph, &h).unwrap_err();
        assert!(errs
            .iter()
            .any(|e| matches!(e, GhsError::RegionWithTwoThicks { .. })));
        assert!(errs
            .iter()
            .any(|e| matches!(e, GhsError::RegionWithoutThick { .. })));
    }

    #[test]
    fn cyclic_declared_order_rejected() {
        let s = flip_family(2).unwrap();
        let m = &s.config.graph;
        let mut h = s.start.clone();
        // three same-sign copies of F with stabilized products between them
        let f = h.thin[0];
        h.thin = (0..3)
            .map(|c| ThinLevel {
                id: ThinId(c),
                copy: c,
                ..f
            })
            .collect();
        for c in 0..2 {
            h.thick.push(ThickLevel {
                id: ThickId(10 + c),
                genus: 3,
                anchor: Fragment::Gap {
                    edge: f.edge,
                    after: c,
                },
                orientation: Sign::Plus,
                flags: ThickFlags::default(),
            });
        }
        assert_eq!(validate_ghs(m, &h), Ok(()));
        h.above = vec![
            (ThinId(0), ThinId(1)),
            (ThinId(1), ThinId(2)),
            (ThinId(2), ThinId(0)),
        ];
        assert_eq!(validate_ghs(m, &h), Err(vec![GhsError::OrderCycle]));
    }

    #[test]
    fn flipping_one_thin_level_is_incoherent() {
        let s = flip_family(2).unwrap();
        let mut h = s.start.clone();
        h.thin[0].orientation = -h.thin[0].orientation;
        let errs = validate_ghs(&s.config.graph, &h).unwrap_err();
        assert_eq!(errs.len(), 2);
        assert!(errs
            .iter()
            .all(|e| matches!(e, GhsError::OrientationIncoherent { .. })));
    }

    #[test]
    fn genus_examples() {
        let closed = closed_family(2).unwrap();
        assert_eq!(ghs_genus(&closed.config.graph, &closed.start), Ok(8));
        assert_eq!(ghs_genus(&closed.config.graph, &closed.end), Ok(8));
        let torus = torus_boundary_family(2).unwrap();
        assert_eq!(ghs_genus(&torus.config.graph, &torus.start), Ok(4));
        assert_eq!(ghs_genus(&torus.config.graph, &torus.end), Ok(5));

        // single thick level, no interior thin levels: genus of that level
        let flip = flip_family(2).unwrap();
        let m = &flip.config.graph;
        let single = Ghs {
            thick: vec![ThickLevel {
                id: ThickId(0),
                genus: 3,
                anchor: Fragment::Piece(PieceId(1)),
                orientation: Sign::Plus,
                flags: ThickFlags::default(),
            }],
            ..Default::default()
        };
        assert_eq!(ghs_genus(m, &single), Ok(3));
    }

    #[test]
    fn restrict_examples() {
        let flip = flip_family(2).unwrap();
        let m = &flip.config.graph;
        let f = flip.start.thin[0].id;
        let r = restrict(m, &flip.start, &ids(&[f.0]), Fragment::Piece(PieceId(1))).unwrap();
        assert_eq!(r.thick.len(), 1);
        assert_eq!(r.thick[0].genus, 3);
        assert!(interior_thin_ids(m, &r).is_empty());
        assert_eq!(validate_ghs(m, &r), Ok(()));

        let whole = restrict(
            m,
            &flip.start,
            &BTreeSet::new(),
            Fragment::Piece(PieceId(2)),
        )
        .unwrap();
        assert_eq!(whole, flip.start);

        // closed family: M_3 carries H_3 alone, genus g + 1 = 3
        let closed = closed_family(2).unwrap();
        let cm = &closed.config.graph;
        let all: BTreeSet<ThinId> = closed.start.thin.iter().map(|t| t.id).collect();
        let m3 = restrict(cm, &closed.start, &all, Fragment::Piece(PieceId(3))).unwrap();
        assert_eq!(m3.thick.len(), 1);
        assert_eq!(ghs_genus(cm, &m3), Ok(3));

        assert_eq!(
            restrict(m, &flip.start, &ids(&[77]), Fragment::Piece(PieceId(1))),
            Err(GhsError::BadRegionBoundary)
        );
    }

    #[test]
    fn genus_sum_examples() {
        let flip = flip_family(2).unwrap();
        let m = &flip.config.graph;
        let f = flip.start.thin[0].id;
        let s = genus_sum_check(m, &flip.start, &ids(&[f.0])).unwrap();
        assert_eq!((s.lhs, s.rhs, s.regions), (4, 4, 2));
        let e = genus_sum_check(m, &flip.start, &BTreeSet::new()).unwrap();
        assert!(e.equal && e.regions == 1);

        // closed family: (3+3+3+4) - (1+1+2+2) + 4 - 4 + 1 = 8, computed by
        // hand from the level genera
        let closed = closed_family(2).unwrap();
        let all: BTreeSet<ThinId> = closed.start.thin.iter().map(|t| t.id).collect();
        let c = genus_sum_check(&closed.config.graph, &closed.start, &all).unwrap();
        assert_eq!((c.lhs, c.rhs, c.regions), (8, 8, 4));
    }

    #[test]
    fn reverse_orientation_is_an_involution() {
        let closed = closed_family(2).unwrap();
        let m = &closed.config.graph;
        let r = reverse_orientation(&closed.start);
        assert_eq!(reverse_orientation(&r), closed.start);
        assert_eq!(validate_ghs(m, &r), Ok(()));
        assert_eq!(ghs_genus(m, &r), Ok(8));

        let flip = flip_family(2).unwrap();
        let e = flip.config.barrier_edges[0];
        assert_eq!(
            thin_orientation(&flip.config.graph, &flip.start, e),
            Ok(ThinOrientation::Oriented(Sign::Plus))
        );
        assert_eq!(
            thin_orientation(&flip.config.graph, &reverse_orientation(&flip.start), e),
            Ok(ThinOrientation::Oriented(Sign::Minus))
        );
    }

    #[test]
    fn thin_orientation_ambiguous_and_absent() {
        let flip = flip_family(2).unwrap();
        let m = &flip.config.graph;
        let e = flip.config.barrier_edges[0];
        let mut h = flip.start.clone();
        let f = h.thin[0];
        h.thin.push(ThinLevel {
            id: ThinId(9),
            copy: f.copy + 1,
            orientation: -f.orientation,
            ..f
        });
        assert_eq!(thin_orientation(m, &h, e), Ok(ThinOrientation::Ambiguous));
        h.thin.clear();
        assert_eq!(thin_orientation(m, &h, e), Ok(ThinOrientation::Absent));
        assert_eq!(
            thin_orientation(m, &h, EdgeId(42)),
            Err(GhsError::UnknownEdgeId(EdgeId(42)))
        );
    }

    #[test]
    fn stabilize_examples() {
        let flip = flip_family(2).unwrap();
        let m = &flip.config.graph;
        let single = Ghs {
            thick: vec![ThickLevel {
                id: ThickId(0),
                genus: 4,
                anchor: Fragment::Piece(PieceId(1)),
                orientation: Sign::Plus,
                flags: ThickFlags::default(),
            }],
            ..Default::default()
        };
        let s = stabilize(m, &single, 2).unwrap();
        assert_eq!(ghs_genus(m, &s), Ok(6));
        assert_eq!(stabilize(m, &single, 0), Err(GhsError::ZeroStabilization));
        assert_eq!(
            stabilize(m, &flip.start, 1),
            Err(GhsError::NotAnAmalgamatedSplitting)
        );
        assert_eq!(
            stabilize(m, &stabilize(m, &single, 1).unwrap(), 2).unwrap(),
            stabilize(m, &single, 3).unwrap()
        );
    }

    #[test]
    fn boundary_stabilize_examples() {
        let torus = torus_boundary_family(2).unwrap();
        let m = &torus.config.graph;
        let t = m.pieces[0].slots.iter().find(|s| s.genus == 1).unwrap().id;
        let g1 = boundary_stabilize(m, PieceId(1), "H1", t, "G").unwrap();
        assert_eq!(g1.genus, 4);
        assert_eq!(g1.boundary_stabilized_along, vec![t]);

        let f = m.pieces[0].slots.iter().find(|s| s.genus == 2).unwrap().id;
        assert_eq!(
            boundary_stabilize(m, PieceId(1), "H1", f, "G")
                .unwrap()
                .genus,
            5
        );
        assert!(matches!(
            boundary_stabilize(m, PieceId(1), "H1", SlotId(99), "G"),
            Err(GhsError::Manifold(ManifoldError::UnknownSlot(..)))
        ));
    }

    #[test]
    fn canonical_key_ignores_ids_and_copy_offsets() {
        let flip = flip_family(2).unwrap();
        let m = &flip.config.graph;
        let mut h = flip.start.clone();
        h.thin[0].copy = 7;
        h.thin[0].id = ThinId(40);
        h.thick.reverse();
        assert_eq!(canonical_key(m, &h), canonical_key(m, &flip.start));
        assert_ne!(
            canonical_key(m, &reverse_orientation(&h)),
            canonical_key(m, &flip.start)
        );
    }
}
