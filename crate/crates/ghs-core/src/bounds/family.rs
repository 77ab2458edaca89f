//! Constructors for the three counter-example families.
//!
//! Every edge takes its first piece as end `A` and as reference side.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::{BoundConfig, BoundsError, Family, Scenario};
use crate::ghs::{
    derive_thick_orientations, Fragment, Ghs, ThickFlags, ThickId, ThickLevel, ThinId, ThinLevel,
};
use crate::manifold::{
    DecompositionGraph, EdgeId, End, Endpoint, GluingEdge, Piece, PieceId, Side, Slot, SlotId,
    Splitting,
};
use crate::surface::Sign;

fn splitting(name: &str, genus: u32, pattern: &[(u32, Side)], si: bool) -> Splitting {
    Splitting {
        name: String::from(name),
        genus,
        pattern: pattern.iter().map(|&(s, side)| (SlotId(s), side)).collect(),
        strongly_irreducible: si,
        boundary_stabilized_along: Vec::new(),
    }
}

fn piece(id: u32, slots: &[(u32, u32)], splittings: Vec<Splitting>) -> Piece {
    Piece {
        id: PieceId(id),
        slots: slots
            .iter()
            .map(|&(s, genus)| Slot {
                id: SlotId(s),
                genus,
            })
            .collect(),
        splittings,
        closed: false,
    }
}

fn edge(
    id: u32,
    a: (u32, u32),
    b: Option<(u32, u32)>,
    genus: u32,
    grade: Option<u32>,
) -> GluingEdge {
    GluingEdge {
        id: EdgeId(id),
        a: (PieceId(a.0), SlotId(a.1)),
        b: match b {
            Some((p, s)) => Endpoint::Slot(PieceId(p), SlotId(s)),
            None => Endpoint::Boundary,
        },
        genus,
        grade,
        reference: End::A,
    }
}

fn thick(id: u32, genus: u32, piece: u32, si: bool) -> ThickLevel {
    ThickLevel {
        id: ThickId(id),
        genus,
        anchor: Fragment::Piece(PieceId(piece)),
        orientation: Sign::Plus,
        flags: ThickFlags {
            strongly_irreducible: si,
            critical: false,
        },
    }
}

fn thin(id: u32, genus: u32, edge: u32, orientation: Sign) -> ThinLevel {
    ThinLevel {
        id: ThinId(id),
        genus,
        edge: EdgeId(edge),
        copy: 0,
        orientation,
    }
}

/// Build a GHS from thick levels and thin signs, one thin level per edge,
/// deriving the thick orientations from the thin levels.
fn assemble(
    m: &DecompositionGraph,
    thicks: Vec<ThickLevel>,
    thin_signs: &[(u32, Sign)],
) -> Result<Ghs, BoundsError> {
    let thin = thin_signs
        .iter()
        .map(|&(e, s)| {
            let genus = m.edge(EdgeId(e)).map_or(0, |x| x.genus);
            thin(e, genus, e, s)
        })
        .collect();
    let h = Ghs {
        thick: thicks,
        thin,
        above: Vec::new(),
        frontier: BTreeSet::new(),
    };
    Ok(derive_thick_orientations(m, &h)?)
}

fn config(
    graph: DecompositionGraph,
    barrier_edges: Vec<EdgeId>,
    cap: u32,
) -> Result<BoundConfig, BoundsError> {
    let piece_genera: BTreeMap<PieceId, u32> = graph
        .pieces
        .iter()
        .map(|p| (p.id, p.min_splitting_genus().unwrap_or(0)))
        .collect();
    let cut = graph.cut_along(&barrier_edges.iter().copied().collect())?;
    Ok(BoundConfig {
        graph,
        barrier_edges,
        piece_genera,
        n: cut.n,
        m: cut.m,
        cap,
    })
}

fn check_g(g: u32) -> Result<(), BoundsError> {
    if g < 2 {
        Err(BoundsError::BadParameter("g must be at least 2"))
    } else {
        Ok(())
    }
}

/// Two pieces glued along one surface `F` of genus `g`, each with a
/// splitting of genus `g + 1` that has `F` below it. The end GHS is the
/// start with every orientation reversed.
pub fn flip_family(g: u32) -> Result<Scenario, BoundsError> {
    check_g(g)?;
    let graph = DecompositionGraph {
        pieces: vec![
            piece(
                1,
                &[(0, g)],
                vec![splitting("H1", g + 1, &[(0, Side::Below)], true)],
            ),
            piece(
                2,
                &[(0, g)],
                vec![splitting("H2", g + 1, &[(0, Side::Below)], true)],
            ),
        ],
        edges: vec![edge(0, (1, 0), Some((2, 0)), g, Some(2 * g + 2))],
        assumptions: vec![
            String::from("F is incompressible and a (2g+2)-barrier"),
            String::from("H1 and H2 are strongly irreducible"),
        ],
    };
    let start = assemble(
        &graph,
        vec![thick(0, g + 1, 1, true), thick(1, g + 1, 2, true)],
        &[(0, Sign::Plus)],
    )?;
    let end = crate::ghs::reverse_orientation(&start);
    Ok(Scenario {
        config: config(graph, vec![EdgeId(0)], 2 * g + 2)?,
        start,
        end,
        family: Family::Flip,
        g,
    })
}

/// `M_1` has an interior slot `F` of genus `g` and a torus boundary slot
/// `T`; `M_2` caps off `F`. The end GHS uses the splitting of `M_1`
/// boundary-stabilized along `T`, oriented to agree with the start on `T`
/// and therefore to disagree on `F`.
pub fn torus_boundary_family(g: u32) -> Result<Scenario, BoundsError> {
    check_g(g)?;
    let h1 = splitting("H1", g + 1, &[(0, Side::Below), (1, Side::Above)], true);
    let mut m1 = piece(1, &[(0, g), (1, 1)], vec![h1]);
    let g1 = m1.boundary_stabilize("H1", SlotId(1), "G1")?;
    m1.splittings.push(g1);
    let graph = DecompositionGraph {
        pieces: vec![
            m1,
            piece(
                2,
                &[(0, g)],
                vec![splitting("H2", g + 1, &[(0, Side::Below)], true)],
            ),
        ],
        edges: vec![
            edge(0, (1, 0), Some((2, 0)), g, Some(2 * g + 2)),
            edge(1, (1, 1), None, 1, None),
        ],
        assumptions: vec![
            String::from("F is incompressible and a (2g+2)-barrier"),
            String::from("the torus boundary T is incompressible"),
            String::from("no I-bundle pieces"),
        ],
    };
    let start = assemble(
        &graph,
        vec![thick(0, g + 1, 1, true), thick(1, g + 1, 2, true)],
        &[(0, Sign::Plus), (1, Sign::Minus)],
    )?;
    let end = assemble(
        &graph,
        vec![thick(0, g + 2, 1, false), thick(1, g + 1, 2, true)],
        &[(0, Sign::Minus), (1, Sign::Minus)],
    )?;
    Ok(Scenario {
        config: config(graph, vec![EdgeId(0)], 2 * g + 2)?,
        start,
        end,
        family: Family::TorusBoundary,
        g,
    })
}

/// Four pieces: `F_1` (genus `g`) joins `M_1` and `M_2`, tori `T_1`, `T_2`
/// join `M_1`, `M_2` to `M_3`, and `F_2` (genus `g`) joins `M_3` to `M_4`.
/// The start uses `G_1` (boundary-stabilized along `T_1`), the end uses
/// `G_2` (along `T_2`).
pub fn closed_family(g: u32) -> Result<Scenario, BoundsError> {
    check_g(g)?;
    let grade = Some(3 * g + 3);
    let mut m1 = piece(
        1,
        &[(0, g), (1, 1)],
        vec![splitting(
            "H1",
            g + 1,
            &[(0, Side::Below), (1, Side::Above)],
            true,
        )],
    );
    let g1 = m1.boundary_stabilize("H1", SlotId(1), "G1")?;
    m1.splittings.push(g1);
    let mut m2 = piece(
        2,
        &[(0, g), (1, 1)],
        vec![splitting(
            "H2",
            g + 1,
            &[(0, Side::Below), (1, Side::Above)],
            true,
        )],
    );
    let g2 = m2.boundary_stabilize("H2", SlotId(1), "G2")?;
    m2.splittings.push(g2);
    let m3 = piece(
        3,
        &[(0, 1), (1, 1), (2, g)],
        vec![splitting(
            "H3",
            g + 1,
            &[(0, Side::Above), (1, Side::Above), (2, Side::Below)],
            true,
        )],
    );
    let m4 = piece(
        4,
        &[(0, g)],
        vec![splitting("H4", g + 1, &[(0, Side::Below)], true)],
    );
    let graph = DecompositionGraph {
        pieces: vec![m1, m2, m3, m4],
        edges: vec![
            edge(0, (1, 0), Some((2, 0)), g, grade),
            edge(1, (1, 1), Some((3, 0)), 1, grade),
            edge(2, (2, 1), Some((3, 1)), 1, grade),
            edge(3, (3, 2), Some((4, 0)), g, grade),
        ],
        assumptions: vec![
            String::from("F1, T1, T2, F2 are incompressible (3g+3)-barriers"),
            String::from("H1..H4 are strongly irreducible"),
        ],
    };
    let plus = Sign::Plus;
    let minus = Sign::Minus;
    let start = assemble(
        &graph,
        vec![
            thick(0, g + 2, 1, false),
            thick(1, g + 1, 2, true),
            thick(2, g + 1, 3, true),
            thick(3, g + 1, 4, true),
        ],
        &[(0, plus), (1, plus), (2, plus), (3, plus)],
    )?;
    let end = assemble(
        &graph,
        vec![
            thick(0, g + 1, 1, true),
            thick(1, g + 2, 2, false),
            thick(2, g + 1, 3, true),
            thick(3, g + 1, 4, true),
        ],
        &[(0, plus), (1, minus), (2, minus), (3, minus)],
    )?;
    Ok(Scenario {
        config: config(
            graph,
            vec![EdgeId(0), EdgeId(1), EdgeId(2), EdgeId(3)],
            3 * g + 3,
        )?,
        start,
        end,
        family: Family::Closed,
        g,
    })
}

/// Result of enumerating every coherent orientation of the two closed-family
/// endpoints.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ParityReport {
    pub start_orientations: usize,
    pub end_orientations: usize,
    /// Pairs (start, end) agreeing on both `F_1` and `F_2`.
    pub agreeing_pairs: usize,
}

fn coherent_orientations(m: &DecompositionGraph, h: &Ghs) -> Vec<Ghs> {
    let n_thick = h.thick.len();
    let total = n_thick + h.thin.len();
    let mut out = Vec::new();
    for bits in 0u32..(1 << total) {
        let mut c = h.clone();
        for (i, t) in c.thick.iter_mut().enumerate() {
            t.orientation = Sign::from_bool(bits & (1 << i) == 0);
        }
        for (i, t) in c.thin.iter_mut().enumerate() {
            t.orientation = Sign::from_bool(bits & (1 << (n_thick + i)) == 0);
        }
        if crate::ghs::validate_ghs(m, &c).is_ok() {
            out.push(c);
        }
    }
    out
}

/// Enumerate all orientation assignments of the closed-family endpoints and
/// count the coherent pairs that agree on both `F_1` and `F_2`.
pub fn orientation_parity(s: &Scenario) -> ParityReport {
    let m = &s.config.graph;
    let first = s.config.barrier_edges.first().copied();
    let last = s.config.barrier_edges.last().copied();
    let starts = coherent_orientations(m, &s.start);
    let ends = coherent_orientations(m, &s.end);
    let sign_at = |h: &Ghs, e: Option<EdgeId>| {
        h.thin
            .iter()
            .find(|t| Some(t.edge) == e)
            .map(|t| t.orientation)
    };
    let mut agreeing = 0;
    for a in &starts {
        for b in &ends {
            if sign_at(a, first) == sign_at(b, first) && sign_at(a, last) == sign_at(b, last) {
                agreeing += 1;
            }
        }
    }
    ParityReport {
        start_orientations: starts.len(),
        end_orientations: ends.len(),
        agreeing_pairs: agreeing,
    }
}
