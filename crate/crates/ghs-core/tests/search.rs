use std::collections::BTreeSet;

use ghs_core::bounds::search::enumerate_states;
use ghs_core::bounds::{
    flip_family, lower_bound, min_common_stabilization_search, torus_boundary_family, Scenario,
    SearchOptions, SearchOutcome,
};
use ghs_core::ghs::{ghs_genus, thin_orientation, ThinOrientation};
use ghs_core::rewrite::{apply_weak_reduction, enumerate_weak_reductions};
use ghs_core::sog::{orientation_flip_witness, sog_genus, validate_sog};

fn certify(s: &Scenario) {
    let lb = lower_bound(&s.config).unwrap() as u32;
    let out = min_common_stabilization_search(s, SearchOptions::new(lb - 1)).unwrap();
    assert!(matches!(out, SearchOutcome::UnreachableBelow { bound, .. } if bound == lb));
}

fn reach_at_bound(s: &Scenario) {
    let m = &s.config.graph;
    let lb = lower_bound(&s.config).unwrap() as u32;
    match min_common_stabilization_search(s, SearchOptions::new(lb)).unwrap() {
        SearchOutcome::Path { sog, genus, .. } => {
            assert_eq!(genus, lb);
            assert_eq!(validate_sog(m, &sog), Ok(()));
            assert_eq!(sog_genus(m, &sog), Ok(lb));
            let w = orientation_flip_witness(m, &sog, s.config.barrier_edges[0]).unwrap();
            assert!(ghs_genus(m, &sog.entries[w.index]).unwrap() >= lb);
        }
        other => panic!("expected a path, got {:?}", other),
    }
}

#[test]
fn flip_needs_the_bound_and_reaches_it() {
    let s = flip_family(2).unwrap();
    certify(&s);
    reach_at_bound(&s);
}

#[test]
fn torus_needs_the_bound_and_reaches_it() {
    let s = torus_boundary_family(2).unwrap();
    certify(&s);
    reach_at_bound(&s);
}

#[test]
fn flip_g3_needs_the_bound() {
    certify(&flip_family(3).unwrap());
}

/// No single move between states below the bound changes the sign carried
/// by the barrier.
#[test]
fn no_single_move_flips_the_barrier() {
    for s in [flip_family(2).unwrap(), torus_boundary_family(2).unwrap()] {
        let m = &s.config.graph;
        let f = s.config.barrier_edges[0];
        let barrier: BTreeSet<_> = s.config.barrier_edges.iter().copied().collect();
        let states = enumerate_states(m, &barrier, 5, 1_000_000).unwrap();
        assert!(!states.is_empty());
        for h in &states {
            let before = thin_orientation(m, h, f).unwrap();
            for t in &h.thick {
                for mv in enumerate_weak_reductions(m, h, t.id).unwrap() {
                    if let Ok(out) = apply_weak_reduction(m, h, &mv) {
                        let after = thin_orientation(m, &out, f).unwrap();
                        if let (ThinOrientation::Oriented(a), ThinOrientation::Oriented(b)) =
                            (before, after)
                        {
                            assert_eq!(a, b);
                        }
                    }
                }
            }
        }
    }
}
