//! Seeded generators of random GHSs over the family decompositions.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ghs_core::bounds::{Family, Scenario};
use ghs_core::ghs::{complete_with_thick_levels, validate_ghs, Ghs, ThinId, ThinLevel};
use ghs_core::rewrite::{enumerate_weak_reductions_with, EnumerateOptions, WeakReductionMove};
use ghs_core::Sign;

pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// A family member with `g` in `2..=max_g`.
    pub fn scenario(&mut self, max_g: u32) -> Scenario {
        let family = *[Family::Flip, Family::TorusBoundary, Family::Closed]
            .choose(&mut self.rng)
            .expect("non-empty");
        let g = self.rng.gen_range(2..=max_g.max(2));
        family.build(g).expect("family parameters are in range")
    }

    /// Random thin levels (up to `max_copies` per edge, at least one on
    /// boundary edges) completed with thick levels of random extra genus.
    /// `None` when the draw is not a valid GHS.
    pub fn try_ghs(&mut self, s: &Scenario, max_copies: usize) -> Option<Ghs> {
        let m = &s.config.graph;
        let mut thin = Vec::new();
        for e in &m.edges {
            let lo = usize::from(!e.is_interior());
            let copies = self.rng.gen_range(lo..=max_copies.max(lo));
            for copy in 0..copies {
                thin.push(ThinLevel {
                    id: ThinId(thin.len() as u32),
                    genus: e.genus,
                    edge: e.id,
                    copy: copy as u32,
                    orientation: Sign::from_bool(self.rng.gen()),
                });
            }
        }
        let extra: Vec<u32> = (0..self.rng.gen_range(1..4))
            .map(|_| self.rng.gen_range(0..3))
            .collect();
        let h = complete_with_thick_levels(m, thin, &extra).ok()?;
        validate_ghs(m, &h).ok().map(|_| h)
    }

    /// Draw until a valid GHS comes up, at most `tries` times.
    pub fn ghs(&mut self, s: &Scenario, max_copies: usize, tries: usize) -> Option<Ghs> {
        (0..tries).find_map(|_| self.try_ghs(s, max_copies))
    }

    /// Every enumerated weak reduction of every thick level, shuffled.
    pub fn moves(&mut self, s: &Scenario, h: &Ghs, max_disks: usize) -> Vec<WeakReductionMove> {
        let opts = EnumerateOptions {
            max_disks,
            certify: false,
        };
        let mut out: Vec<WeakReductionMove> = h
            .thick
            .iter()
            .filter_map(|t| enumerate_weak_reductions_with(&s.config.graph, h, t.id, opts).ok())
            .flatten()
            .collect();
        out.shuffle(&mut self.rng);
        out
    }
}
