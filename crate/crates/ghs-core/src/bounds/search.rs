//! Exhaustive search over symbolic GHS states of bounded genus.
//!
//! States are the valid, cleaned-up GHSs of genus at most the cap whose thin
//! levels are copies of gluing surfaces and which keep at least one copy of
//! every barrier surface. Two states are joined when a weak reduction of one
//! gives the other. The search decides whether the two endpoints lie in the
//! same component.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::vec;
use alloc::vec::Vec;

use super::{BoundsError, Scenario};
use crate::ghs::{
    canonical_key, ghs_genus, validate_ghs, CanonicalKey, Fragment, Ghs, Layout, ThickFlags,
    ThickId, ThickLevel, ThinId, ThinLevel,
};
use crate::manifold::{DecompositionGraph, EdgeId};
use crate::rewrite::{
    applicable_cleanups, apply_weak_reduction_traced, enumerate_weak_reductions_with, ApplyOptions,
    EnumerateOptions, WeakReductionMove,
};
use crate::sog::{Link, Sog};
use crate::surface::Sign;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchOptions {
    pub cap: u32,
    /// Largest number of states before giving up.
    pub budget: usize,
    /// Largest disk set per side in generated moves.
    pub max_disks: usize,
}

impl SearchOptions {
    pub fn new(cap: u32) -> Self {
        Self {
            cap,
            budget: 10_000_000,
            max_disks: 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchOutcome {
    /// No sequence of states of genus at most `bound - 1` joins the
    /// endpoints.
    UnreachableBelow {
        bound: u32,
        states: usize,
        links: usize,
    },
    Path {
        sog: Sog,
        genus: u32,
        states: usize,
    },
}

impl SearchOutcome {
    pub fn states(&self) -> usize {
        match self {
            SearchOutcome::UnreachableBelow { states, .. } | SearchOutcome::Path { states, .. } => {
                *states
            }
        }
    }
}

/// Decide whether the scenario endpoints are joined through states of genus
/// at most `opts.cap`.
pub fn min_common_stabilization_search(
    s: &Scenario,
    opts: SearchOptions,
) -> Result<SearchOutcome, BoundsError> {
    let m = &s.config.graph;
    let cap = opts.cap;
    for e in &s.config.barrier_edges {
        if let Some(grade) = m.try_edge(*e)?.grade {
            if cap > grade {
                return Err(BoundsError::CapExceedsGrades { cap, grade });
            }
        }
    }
    for h in [&s.start, &s.end] {
        let g = ghs_genus(m, h)?;
        if g > cap {
            return Err(BoundsError::CapBelowEndpoints { cap, endpoint: g });
        }
    }

    let barrier: BTreeSet<EdgeId> = s.config.barrier_edges.iter().copied().collect();
    let mut space = StateSpace::default();
    space.insert(m, s.start.clone(), opts.budget)?;
    space.insert(m, s.end.clone(), opts.budget)?;
    for h in enumerate_states(m, &barrier, cap, opts.budget)? {
        space.insert(m, h, opts.budget)?;
    }

    let start = space.index[&canonical_key(m, &s.start)?];
    let end = space.index[&canonical_key(m, &s.end)?];
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); space.states.len()];
    let mut moves: Vec<(usize, WeakReductionMove)> = Vec::new();
    let enum_opts = EnumerateOptions {
        max_disks: opts.max_disks,
        certify: false,
    };
    let apply_opts = ApplyOptions {
        trusted_input: true,
        ..ApplyOptions::default()
    };
    for i in 0..space.states.len() {
        let h = space.states[i].clone();
        for t in &h.thick {
            let Ok(list) = enumerate_weak_reductions_with(m, &h, t.id, enum_opts) else {
                continue;
            };
            for mv in list {
                let Ok(out) = apply_weak_reduction_traced(m, &h, &mv, apply_opts) else {
                    continue;
                };
                let Ok(key) = canonical_key(m, &out.ghs) else {
                    continue;
                };
                if let Some(&j) = space.index.get(&key) {
                    if j != i {
                        let id = moves.len();
                        moves.push((i, mv));
                        adj[i].push((j, id));
                        adj[j].push((i, id));
                    }
                }
            }
        }
    }

    // breadth-first from the start; parents give the shortest sequence
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; space.states.len()];
    let mut seen = vec![false; space.states.len()];
    let mut queue = VecDeque::new();
    seen[start] = true;
    queue.push_back(start);
    while let Some(u) = queue.pop_front() {
        for &(v, id) in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                parent[v] = Some((u, id));
                queue.push_back(v);
            }
        }
    }
    if !seen[end] {
        return Ok(SearchOutcome::UnreachableBelow {
            bound: cap + 1,
            states: space.states.len(),
            links: moves.len(),
        });
    }

    let mut chain = vec![end];
    let mut link_ids = Vec::new();
    let mut cur = end;
    while let Some((p, id)) = parent[cur] {
        chain.push(p);
        link_ids.push(id);
        cur = p;
    }
    chain.reverse();
    link_ids.reverse();
    let mut sog = Sog::default();
    for (k, &i) in chain.iter().enumerate() {
        sog.entries.push(space.states[i].clone());
        if k + 1 < chain.len() {
            let (from, mv) = &moves[link_ids[k]];
            sog.links.push(if *from == i {
                Link::Down(mv.clone())
            } else {
                Link::Up(mv.clone())
            });
        }
    }
    let genus = sog
        .entries
        .iter()
        .map(|h| ghs_genus(m, h))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .max()
        .unwrap_or(0);
    Ok(SearchOutcome::Path {
        sog,
        genus,
        states: space.states.len(),
    })
}

#[derive(Default)]
struct StateSpace {
    states: Vec<Ghs>,
    index: BTreeMap<CanonicalKey, usize>,
}

impl StateSpace {
    fn insert(&mut self, m: &DecompositionGraph, h: Ghs, budget: usize) -> Result<(), BoundsError> {
        let key = canonical_key(m, &h)?;
        if self.index.contains_key(&key) {
            return Ok(());
        }
        if self.states.len() >= budget {
            return Err(BoundsError::StateSpaceBudgetExceeded {
                explored: self.states.len(),
            });
        }
        self.index.insert(key, self.states.len());
        self.states.push(h);
        Ok(())
    }
}

/// Genus cost of the gaps in a sign sequence: a gap between equal signs
/// needs a thick level one above the surface genus to avoid being a product,
/// a gap between opposite signs needs twice the surface genus.
fn gap_cost(genus: u32, signs: &[Sign]) -> u32 {
    signs
        .windows(2)
        .map(|w| if w[0] == w[1] { 1 } else { genus })
        .sum()
}

fn sign_sequences(genus: u32, min_len: usize, budget: u32) -> Vec<Vec<Sign>> {
    let mut out = Vec::new();
    let mut stack: Vec<Vec<Sign>> = vec![Vec::new()];
    while let Some(seq) = stack.pop() {
        if gap_cost(genus, &seq) > budget {
            continue;
        }
        if seq.len() >= min_len {
            out.push(seq.clone());
        }
        if seq.len() as u32 <= budget + 1 {
            for s in [Sign::Plus, Sign::Minus] {
                let mut next = seq.clone();
                next.push(s);
                stack.push(next);
            }
        }
    }
    out.sort();
    out
}

/// All valid clean states of genus at most `cap` keeping a copy of every
/// barrier edge and of every boundary edge.
pub fn enumerate_states(
    m: &DecompositionGraph,
    barrier: &BTreeSet<EdgeId>,
    cap: u32,
    budget: usize,
) -> Result<Vec<Ghs>, BoundsError> {
    let per_edge: Vec<(EdgeId, Vec<Vec<Sign>>)> = m
        .edges
        .iter()
        .map(|e| {
            let min_len = usize::from(barrier.contains(&e.id) || !e.is_interior());
            (e.id, sign_sequences(e.genus, min_len, cap))
        })
        .collect();

    let mut out = Vec::new();
    let mut choice = vec![0usize; per_edge.len()];
    loop {
        let thin = thin_levels(m, &per_edge, &choice);
        let total_cost: u32 = per_edge
            .iter()
            .zip(&choice)
            .map(|((e, seqs), &c)| gap_cost(m.edge(*e).map_or(0, |x| x.genus), &seqs[c]))
            .sum();
        if total_cost <= cap {
            fill_regions(m, thin, cap, budget, &mut out)?;
        }
        // odometer over the per-edge choices
        let mut k = 0;
        loop {
            if k == choice.len() {
                return Ok(out);
            }
            choice[k] += 1;
            if choice[k] < per_edge[k].1.len() {
                break;
            }
            choice[k] = 0;
            k += 1;
        }
    }
}

fn thin_levels(
    m: &DecompositionGraph,
    per_edge: &[(EdgeId, Vec<Vec<Sign>>)],
    choice: &[usize],
) -> Vec<ThinLevel> {
    let mut thin = Vec::new();
    for ((edge, seqs), &c) in per_edge.iter().zip(choice) {
        let genus = m.edge(*edge).map_or(0, |e| e.genus);
        for (copy, &orientation) in seqs[c].iter().enumerate() {
            thin.push(ThinLevel {
                id: ThinId(thin.len() as u32),
                genus,
                edge: *edge,
                copy: copy as u32,
                orientation,
            });
        }
    }
    thin
}

/// Put one thick level in every region in every way that keeps the genus at
/// most `cap`.
fn fill_regions(
    m: &DecompositionGraph,
    thin: Vec<ThinLevel>,
    cap: u32,
    budget: usize,
    out: &mut Vec<Ghs>,
) -> Result<(), BoundsError> {
    let bare = Ghs {
        thin,
        ..Ghs::default()
    };
    let Ok(layout) = Layout::new(m, &bare) else {
        return Ok(());
    };
    let regions = layout.regions.len();
    let mut minimum = Vec::with_capacity(regions);
    for r in 0..regions {
        let plus = layout.required_genus(m, &bare, r, Sign::Plus);
        let minus = layout.required_genus(m, &bare, r, Sign::Minus);
        let mut req = plus.min(minus);
        if let [Fragment::Gap { edge, .. }] = layout.regions[r].as_slice() {
            // a gap of exactly the surface genus is a product and gets cleaned
            let g = m.edge(*edge).map_or(0, |e| e.genus);
            if req <= g {
                req = g + 1;
            }
        }
        minimum.push(req);
    }
    let interior: Vec<&ThinLevel> = bare
        .thin
        .iter()
        .zip(&layout.interior)
        .filter(|(_, i)| **i)
        .map(|(t, _)| t)
        .collect();
    let base = i64::from(minimum.iter().sum::<u32>())
        - interior.iter().map(|t| i64::from(t.genus)).sum::<i64>()
        + interior.len() as i64
        - regions as i64
        + 1;
    let Ok(extra) = u32::try_from(i64::from(cap) - base) else {
        return Ok(());
    };

    let mut genera = minimum.clone();
    distribute(&mut genera, &minimum, 0, extra, &mut |genera| {
        let thick = genera
            .iter()
            .enumerate()
            .map(|(r, &genus)| ThickLevel {
                id: ThickId(r as u32),
                genus,
                anchor: layout.regions[r][0],
                orientation: Sign::Plus,
                flags: ThickFlags::default(),
            })
            .collect();
        let candidate = Ghs {
            thick,
            ..bare.clone()
        };
        let Ok(h) = crate::ghs::derive_thick_orientations(m, &candidate) else {
            return Ok(());
        };
        if validate_ghs(m, &h).is_err() || !applicable_cleanups(m, &h).is_ok_and(|c| c.is_empty()) {
            return Ok(());
        }
        if out.len() >= budget {
            return Err(BoundsError::StateSpaceBudgetExceeded {
                explored: out.len(),
            });
        }
        out.push(h);
        Ok(())
    })
}

fn distribute(
    genera: &mut Vec<u32>,
    minimum: &[u32],
    at: usize,
    left: u32,
    visit: &mut dyn FnMut(&[u32]) -> Result<(), BoundsError>,
) -> Result<(), BoundsError> {
    if at == genera.len() {
        return visit(genera);
    }
    for add in 0..=left {
        genera[at] = minimum[at] + add;
        distribute(genera, minimum, at + 1, left - add, visit)?;
    }
    genera[at] = minimum[at];
    Ok(())
}
