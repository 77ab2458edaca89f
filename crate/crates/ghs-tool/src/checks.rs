//! Randomized property checks shared by `verify --samples` and the tests.

use std::collections::BTreeSet;

use ghs_core::ghs::{genus_sum_check, ghs_genus, interior_thin_ids, Ghs, ThinId};
use ghs_core::manifold::DecompositionGraph;
use ghs_core::rewrite::{apply_weak_reduction, cleanup_all_orders, is_destabilization};
use ghs_core::{SymbolicSurface, WeakReductionMove};

use crate::sample::Sampler;

/// Compare `ghs_genus` with the genus sum over every subset of interior
/// thin levels. Returns the number of cuts checked, or `None` when there
/// are more than `max_thin` interior thin levels.
pub fn genus_sum_all_cuts(
    m: &DecompositionGraph,
    h: &Ghs,
    max_thin: usize,
) -> Result<Option<usize>, String> {
    let ids = interior_thin_ids(m, h);
    if ids.len() > max_thin {
        return Ok(None);
    }
    let genus = ghs_genus(m, h).map_err(|e| e.to_string())?;
    for mask in 0u32..(1 << ids.len()) {
        let cut: BTreeSet<ThinId> = ids
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, t)| *t)
            .collect();
        let r = genus_sum_check(m, h, &cut).map_err(|e| e.to_string())?;
        if r.rhs != i64::from(genus) || !r.equal {
            return Err(format!("genus {} but cut {:?} gives {:?}", genus, cut, r));
        }
    }
    Ok(Some(1 << ids.len()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LawOutcome {
    /// The move did not apply; only the Euler bookkeeping was checked.
    Rejected,
    Preserved,
    Decreased,
}

/// Euler bookkeeping for a move on a thick level of genus `g`: each
/// compression raises the Euler characteristic by two, so
/// `chi(G/D) = chi(G) + 2|D|`, `chi(G/E) = chi(G) + 2|E|` and
/// `chi(G/DE) = chi(G) + 2(|D| + |E|)`.
pub fn euler_bookkeeping(genus: u32, mv: &WeakReductionMove) -> Result<(), String> {
    let chi = SymbolicSurface::connected(genus).euler_characteristic();
    let mut below = SymbolicSurface::connected(genus);
    for d in &mv.disk_below {
        below = below.compress(d).map_err(|e| e.to_string())?;
    }
    let mut above = SymbolicSurface::connected(genus);
    for d in &mv.disk_above {
        above = above.compress(d).map_err(|e| e.to_string())?;
    }
    let nd = 2 * mv.disk_below.len() as i64;
    let ne = 2 * mv.disk_above.len() as i64;
    let joint = mv.joint_outcome.euler_characteristic();
    if below.euler_characteristic() != chi + nd
        || above.euler_characteristic() != chi + ne
        || joint != chi + nd + ne
    {
        return Err(format!("Euler bookkeeping fails for `{}`", mv));
    }
    Ok(())
}

/// Apply `mv` and check the genus law.
pub fn genus_law(
    m: &DecompositionGraph,
    h: &Ghs,
    mv: &WeakReductionMove,
) -> Result<LawOutcome, String> {
    let t = h
        .thick
        .iter()
        .find(|t| t.id == mv.thick)
        .ok_or_else(|| format!("no thick level {}", mv.thick))?;
    euler_bookkeeping(t.genus, mv)?;
    let before = ghs_genus(m, h).map_err(|e| e.to_string())?;
    let Ok(out) = apply_weak_reduction(m, h, mv) else {
        return Ok(LawOutcome::Rejected);
    };
    let after = ghs_genus(m, &out).map_err(|e| e.to_string())?;
    match (is_destabilization(mv), after.cmp(&before)) {
        (false, std::cmp::Ordering::Equal) => Ok(LawOutcome::Preserved),
        (true, std::cmp::Ordering::Less) => Ok(LawOutcome::Decreased),
        _ => Err(format!("`{}` takes genus {} to {}", mv, before, after)),
    }
}

/// Cleanup reaches one canonical result in every order.
pub fn cleanup_confluent(m: &DecompositionGraph, h: &Ghs) -> Result<(), String> {
    let keys = cleanup_all_orders(m, h).map_err(|e| e.to_string())?;
    if keys.len() == 1 {
        Ok(())
    } else {
        Err(format!("{} distinct cleanup results", keys.len()))
    }
}

/// Totals of a sampled property run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SampleSummary {
    pub ghs: usize,
    pub cuts: usize,
    pub preserved: usize,
    pub decreased: usize,
    pub rejected: usize,
}

/// Draw `samples` valid GHSs, check the genus sum and cleanup confluence on
/// each and the genus law on up to `moves_per` of its moves.
pub fn run_samples(seed: u64, samples: usize, moves_per: usize) -> Result<SampleSummary, String> {
    let mut sampler = Sampler::new(seed);
    let mut sum = SampleSummary::default();
    while sum.ghs < samples {
        let s = sampler.scenario(3);
        let Some(h) = sampler.ghs(&s, 2, 20) else {
            continue;
        };
        let m = &s.config.graph;
        sum.ghs += 1;
        sum.cuts += genus_sum_all_cuts(m, &h, 5)?.unwrap_or(0);
        cleanup_confluent(m, &h)?;
        for mv in sampler.moves(&s, &h, 1).into_iter().take(moves_per) {
            match genus_law(m, &h, &mv)? {
                LawOutcome::Rejected => sum.rejected += 1,
                LawOutcome::Preserved => sum.preserved += 1,
                LawOutcome::Decreased => sum.decreased += 1,
            }
        }
    }
    Ok(sum)
}
