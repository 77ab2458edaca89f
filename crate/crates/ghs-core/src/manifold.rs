//! Decomposition graphs: pieces glued along surfaces, with declared barrier
//! grades on the gluing edges.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PieceId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SlotId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId(pub u32);

macro_rules! display_id {
    ($($t:ty),*) => {$(
        impl fmt::Display for $t {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}", self.0)
            }
        }
    )*};
}
display_id!(PieceId, SlotId, EdgeId);

/// Which side of a surface something lies on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    Above,
    Below,
}

impl Side {
    pub fn flip(self) -> Side {
        match self {
            Side::Above => Side::Below,
            Side::Below => Side::Above,
        }
    }
}

/// The two ends of a gluing edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum End {
    A,
    B,
}

impl End {
    pub fn other(self) -> End {
        match self {
            End::A => End::B,
            End::B => End::A,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Slot {
    pub id: SlotId,
    pub genus: u32,
}

/// A Heegaard splitting of a piece granted by the scenario.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Splitting {
    pub name: String,
    pub genus: u32,
    /// Side of the splitting surface each boundary slot lies on.
    pub pattern: BTreeMap<SlotId, Side>,
    pub strongly_irreducible: bool,
    /// Slots this splitting was boundary-stabilized along, in order.
    pub boundary_stabilized_along: Vec<SlotId>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Piece {
    pub id: PieceId,
    pub slots: Vec<Slot>,
    pub splittings: Vec<Splitting>,
    pub closed: bool,
}

impl Piece {
    pub fn slot(&self, id: SlotId) -> Option<&Slot> {
        self.slots.iter().find(|s| s.id == id)
    }

    pub fn splitting(&self, name: &str) -> Option<&Splitting> {
        self.splittings.iter().find(|s| s.name == name)
    }

    /// Smallest declared splitting genus, the `genus(M_k)` of the bound.
    pub fn min_splitting_genus(&self) -> Option<u32> {
        self.splittings.iter().map(|s| s.genus).min()
    }

    /// Tube a copy of the boundary slot onto a declared splitting. The slot
    /// changes sides and the genus goes up by the slot genus.
    pub fn boundary_stabilize(
        &self,
        splitting: &str,
        slot: SlotId,
        new_name: &str,
    ) -> Result<Splitting, ManifoldError> {
        let base = self
            .splitting(splitting)
            .ok_or(ManifoldError::UnknownSplitting(self.id))?;
        let s = self
            .slot(slot)
            .ok_or(ManifoldError::UnknownSlot(self.id, slot))?;
        let mut out = base.clone();
        out.name = String::from(new_name);
        out.genus += s.genus;
        let side = out.pattern.get(&slot).copied().unwrap_or(Side::Below);
        out.pattern.insert(slot, side.flip());
        out.strongly_irreducible = false;
        out.boundary_stabilized_along.push(slot);
        Ok(out)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Endpoint {
    Slot(PieceId, SlotId),
    /// The surface is a component of the ambient boundary.
    Boundary,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GluingEdge {
    pub id: EdgeId,
    pub a: (PieceId, SlotId),
    pub b: Endpoint,
    pub genus: u32,
    /// Declared barrier grade: the gluing is assumed complicated enough
    /// that the surface is a `grade`-barrier.
    pub grade: Option<u32>,
    /// The side a `+` thin level on this edge has above it.
    pub reference: End,
}

impl GluingEdge {
    pub fn is_interior(&self) -> bool {
        matches!(self.b, Endpoint::Slot(..))
    }

    pub fn end(&self, end: End) -> Option<(PieceId, SlotId)> {
        match end {
            End::A => Some(self.a),
            End::B => match self.b {
                Endpoint::Slot(p, s) => Some((p, s)),
                Endpoint::Boundary => None,
            },
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct DecompositionGraph {
    pub pieces: Vec<Piece>,
    pub edges: Vec<GluingEdge>,
    /// Hypotheses the scenario asserts but the engine does not check.
    pub assumptions: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DecompositionError {
    GenusMismatch { edge: EdgeId },
    SlotReuse { piece: PieceId, slot: SlotId },
    Disconnected,
    UnknownSlot { edge: EdgeId },
    DuplicateId,
    SplittingTooSmall { piece: PieceId, splitting: String },
    PatternIncomplete { piece: PieceId, splitting: String },
    ClosedPieceWithSlots { piece: PieceId },
}

impl fmt::Display for DecompositionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::GenusMismatch { edge } => write!(f, "edge {}: slot genera differ", edge),
            Self::SlotReuse { piece, slot } => {
                write!(
                    f,
                    "slot {} of piece {} is used by more than one edge",
                    slot, piece
                )
            }
            Self::Disconnected => f.write_str("decomposition graph is disconnected"),
            Self::UnknownSlot { edge } => write!(f, "edge {} refers to an unknown slot", edge),
            Self::DuplicateId => f.write_str("duplicate piece, slot or edge id"),
            Self::SplittingTooSmall { piece, splitting } => {
                write!(
                    f,
                    "splitting {} of piece {} cannot bound its slots",
                    splitting, piece
                )
            }
            Self::PatternIncomplete { piece, splitting } => {
                write!(
                    f,
                    "splitting {} of piece {} does not place every slot",
                    splitting, piece
                )
            }
            Self::ClosedPieceWithSlots { piece } => {
                write!(f, "piece {} is marked closed but has boundary slots", piece)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ManifoldError {
    UnknownEdge(EdgeId),
    UnknownPiece(PieceId),
    UnknownSlot(PieceId, SlotId),
    UnknownSplitting(PieceId),
}

impl fmt::Display for ManifoldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::UnknownEdge(e) => write!(f, "unknown edge {}", e),
            Self::UnknownPiece(p) => write!(f, "unknown piece {}", p),
            Self::UnknownSlot(p, s) => write!(f, "piece {} has no slot {}", p, s),
            Self::UnknownSplitting(p) => write!(f, "piece {} has no such splitting", p),
        }
    }
}

/// Connected regions left after cutting along a set of edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cut {
    pub regions: Vec<BTreeSet<PieceId>>,
    /// Number of cut surfaces.
    pub n: usize,
    /// Number of regions.
    pub m: usize,
}

/// Minimal disjoint-set forest over dense indices.
#[derive(Clone, Debug)]
pub(crate) struct DisjointSets {
    parent: Vec<usize>,
}

impl DisjointSets {
    pub(crate) fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

impl DecompositionGraph {
    pub fn piece(&self, id: PieceId) -> Option<&Piece> {
        self.pieces.iter().find(|p| p.id == id)
    }

    pub fn edge(&self, id: EdgeId) -> Option<&GluingEdge> {
        self.edges.iter().find(|e| e.id == id)
    }

    pub fn try_edge(&self, id: EdgeId) -> Result<&GluingEdge, ManifoldError> {
        self.edge(id).ok_or(ManifoldError::UnknownEdge(id))
    }

    fn piece_index(&self, id: PieceId) -> Option<usize> {
        self.pieces.iter().position(|p| p.id == id)
    }

    /// The edge attached to a slot, with the end it attaches at.
    pub fn edge_at(&self, piece: PieceId, slot: SlotId) -> Option<(&GluingEdge, End)> {
        self.edges.iter().find_map(|e| {
            if e.a == (piece, slot) {
                Some((e, End::A))
            } else if e.b == Endpoint::Slot(piece, slot) {
                Some((e, End::B))
            } else {
                None
            }
        })
    }

    pub fn barrier_grade(&self, edge: EdgeId) -> Result<Option<u32>, ManifoldError> {
        Ok(self.try_edge(edge)?.grade)
    }

    /// Check every structural invariant, collecting all violations.
    pub fn validate(&self) -> Result<(), Vec<DecompositionError>> {
        let mut errors = Vec::new();

        let piece_ids: BTreeSet<PieceId> = self.pieces.iter().map(|p| p.id).collect();
        let edge_ids: BTreeSet<EdgeId> = self.edges.iter().map(|e| e.id).collect();
        let mut dup = piece_ids.len() != self.pieces.len() || edge_ids.len() != self.edges.len();
        for p in &self.pieces {
            let slots: BTreeSet<SlotId> = p.slots.iter().map(|s| s.id).collect();
            dup |= slots.len() != p.slots.len();
            if p.closed && !p.slots.is_empty() {
                errors.push(DecompositionError::ClosedPieceWithSlots { piece: p.id });
            }
            for s in &p.splittings {
                if s.pattern.len() != p.slots.len()
                    || p.slots.iter().any(|slot| !s.pattern.contains_key(&slot.id))
                {
                    errors.push(DecompositionError::PatternIncomplete {
                        piece: p.id,
                        splitting: s.name.clone(),
                    });
                    continue;
                }
                let side_sum = |side: Side| -> u32 {
                    p.slots
                        .iter()
                        .filter(|slot| s.pattern.get(&slot.id) == Some(&side))
                        .map(|slot| slot.genus)
                        .sum()
                };
                if s.genus < side_sum(Side::Above) || s.genus < side_sum(Side::Below) {
                    errors.push(DecompositionError::SplittingTooSmall {
                        piece: p.id,
                        splitting: s.name.clone(),
                    });
                }
            }
        }
        if dup {
            errors.push(DecompositionError::DuplicateId);
        }

        let mut used: BTreeSet<(PieceId, SlotId)> = BTreeSet::new();
        for e in &self.edges {
            let mut ends = alloc::vec![e.a];
            if let Endpoint::Slot(p, s) = e.b {
                ends.push((p, s));
            }
            let mut ok = true;
            for &(p, s) in &ends {
                match self.piece(p).and_then(|piece| piece.slot(s)) {
                    None => ok = false,
                    Some(slot) => {
                        if slot.genus != e.genus {
                            errors.push(DecompositionError::GenusMismatch { edge: e.id });
                        }
                    }
                }
                if !used.insert((p, s)) {
                    errors.push(DecompositionError::SlotReuse { piece: p, slot: s });
                }
            }
            if !ok {
                errors.push(DecompositionError::UnknownSlot { edge: e.id });
            }
        }
        errors.dedup();

        if !self.pieces.is_empty() {
            let mut sets = DisjointSets::new(self.pieces.len());
            for e in &self.edges {
                if let (Some(i), Endpoint::Slot(pb, _)) = (self.piece_index(e.a.0), e.b) {
                    if let Some(j) = self.piece_index(pb) {
                        sets.union(i, j);
                    }
                }
            }
            let root = sets.find(0);
            if (0..self.pieces.len()).any(|i| sets.find(i) != root) {
                errors.push(DecompositionError::Disconnected);
            }
        }

        if errors.is_empty() {
            Ok(())
        } else {
            Err(errors)
        }
    }

    /// Cut along a set of edges and report the connected regions.
    pub fn cut_along(&self, cut: &BTreeSet<EdgeId>) -> Result<Cut, ManifoldError> {
        for e in cut {
            self.try_edge(*e)?;
        }
        let mut sets = DisjointSets::new(self.pieces.len());
        for e in &self.edges {
            if cut.contains(&e.id) {
                continue;
            }
            if let (Some(i), Endpoint::Slot(pb, _)) = (self.piece_index(e.a.0), e.b) {
                if let Some(j) = self.piece_index(pb) {
                    sets.union(i, j);
                }
            }
        }
        let mut by_root: BTreeMap<usize, BTreeSet<PieceId>> = BTreeMap::new();
        for (i, p) in self.pieces.iter().enumerate() {
            by_root.entry(sets.find(i)).or_default().insert(p.id);
        }
        let regions: Vec<BTreeSet<PieceId>> = by_root.into_values().collect();
        Ok(Cut {
            n: cut.len(),
            m: regions.len(),
            regions,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    fn piece(id: u32, slots: &[(u32, u32)]) -> Piece {
        Piece {
            id: PieceId(id),
            slots: slots
                .iter()
                .map(|&(s, g)| Slot {
                    id: SlotId(s),
                    genus: g,
                })
                .collect(),
            splittings: vec![],
            closed: slots.is_empty(),
        }
    }

    fn glue(id: u32, a: (u32, u32), b: (u32, u32), genus: u32) -> GluingEdge {
        GluingEdge {
            id: EdgeId(id),
            a: (PieceId(a.0), SlotId(a.1)),
            b: Endpoint::Slot(PieceId(b.0), SlotId(b.1)),
            genus,
            grade: None,
            reference: End::A,
        }
    }

    fn two_pieces(g: u32) -> DecompositionGraph {
        let mut e = glue(0, (1, 0), (2, 0), g);
        e.grade = Some(2 * g + 2);
        DecompositionGraph {
            pieces: vec![piece(1, &[(0, g)]), piece(2, &[(0, g)])],
            edges: vec![e],
            assumptions: vec![],
        }
    }

    #[test]
    fn validate_examples() {
        assert_eq!(two_pieces(2).validate(), Ok(()));

        let bad = DecompositionGraph {
            pieces: vec![piece(1, &[(0, 2)]), piece(2, &[(0, 3)])],
            edges: vec![glue(0, (1, 0), (2, 0), 2)],
            assumptions: vec![],
        };
        assert_eq!(
            bad.validate(),
            Err(vec![DecompositionError::GenusMismatch { edge: EdgeId(0) }])
        );

        let single = DecompositionGraph {
            pieces: vec![piece(1, &[])],
            ..Default::default()
        };
        assert_eq!(single.validate(), Ok(()));
    }

    #[test]
    fn validate_collects_every_violation() {
        let g = DecompositionGraph {
            pieces: vec![
                piece(1, &[(0, 2), (1, 2)]),
                piece(2, &[(0, 2)]),
                piece(3, &[(0, 1)]),
            ],
            edges: vec![glue(0, (1, 0), (2, 0), 2), glue(1, (1, 0), (2, 0), 2)],
            assumptions: vec![],
        };
        let errs = g.validate().unwrap_err();
        assert!(errs.contains(&DecompositionError::SlotReuse {
            piece: PieceId(1),
            slot: SlotId(0)
        }));
        assert!(errs.contains(&DecompositionError::Disconnected));
    }

    #[test]
    fn splitting_must_bound_its_slots() {
        let mut g = two_pieces(2);
        g.pieces[0].splittings.push(Splitting {
            name: "H".to_string(),
            genus: 1,
            pattern: [(SlotId(0), Side::Below)].into_iter().collect(),
            strongly_irreducible: true,
            boundary_stabilized_along: vec![],
        });
        g.pieces[1].splittings.push(Splitting {
            name: "K".to_string(),
            genus: 3,
            pattern: BTreeMap::new(),
            strongly_irreducible: true,
            boundary_stabilized_along: vec![],
        });
        let errs = g.validate().unwrap_err();
        assert_eq!(errs.len(), 2);
        assert!(matches!(
            errs[0],
            DecompositionError::SplittingTooSmall { .. }
        ));
        assert!(matches!(
            errs[1],
            DecompositionError::PatternIncomplete { .. }
        ));
    }

    #[test]
    fn cut_along_examples() {
        let g = two_pieces(2);
        let none = g.cut_along(&BTreeSet::new()).unwrap();
        assert_eq!((none.n, none.m), (0, 1));
        let one = g.cut_along(&[EdgeId(0)].into_iter().collect()).unwrap();
        assert_eq!((one.n, one.m), (1, 2));
        assert_eq!(
            g.cut_along(&[EdgeId(9)].into_iter().collect()),
            Err(ManifoldError::UnknownEdge(EdgeId(9)))
        );
    }

    #[test]
    fn cut_along_cycle_counts_nonseparating_edges() {
        // triangle of pieces: any single edge is non-separating
        let g = DecompositionGraph {
            pieces: vec![
                piece(1, &[(0, 1), (1, 1)]),
                piece(2, &[(0, 1), (1, 1)]),
                piece(3, &[(0, 1), (1, 1)]),
            ],
            edges: vec![
                glue(0, (1, 0), (2, 0), 1),
                glue(1, (2, 1), (3, 0), 1),
                glue(2, (3, 1), (1, 1), 1),
            ],
            assumptions: vec![],
        };
        for subset in 0u32..8 {
            let cut: BTreeSet<EdgeId> = (0..3)
                .filter(|i| subset & (1 << i) != 0)
                .map(EdgeId)
                .collect();
            let c = g.cut_along(&cut).unwrap();
            assert!(c.m <= c.n + 1);
            let expected_m = if cut.len() <= 1 { 1 } else { cut.len() };
            assert_eq!(c.m, expected_m);
        }
    }

    #[test]
    fn barrier_grade_lookup() {
        let g = two_pieces(2);
        assert_eq!(g.barrier_grade(EdgeId(0)), Ok(Some(6)));
        let mut h = g.clone();
        h.edges[0].grade = None;
        assert_eq!(h.barrier_grade(EdgeId(0)), Ok(None));
        assert_eq!(
            g.barrier_grade(EdgeId(4)),
            Err(ManifoldError::UnknownEdge(EdgeId(4)))
        );
    }
}
