//! Seeded trial functions for the verifiers and the duality oracle.
//!
//! Every trial is drawn from its own ChaCha stream keyed by `(seed, index)`,
//! so results do not depend on the order or thread in which trials run.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::funcspace::{Domain, Grid, PiecewiseFn};
use crate::rearrangement::DecreasingFn;

/// The generator for trial `i` under `seed`.
pub fn trial_rng(seed: u64, i: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i);
    rng
}

fn log_uniform<R: Rng>(rng: &mut R, a: f64, b: f64) -> f64 {
    (a.ln() + rng.random::<f64>() * (b / a).ln()).exp()
}

/// A random nonincreasing step function with 1 to 8 steps.
///
/// Step ends are log-uniform in the domain and levels are sorted
/// `uniform^e` draws with a random exponent `e ∈ [1, 4]`.
pub fn random_decreasing<R: Rng>(rng: &mut R, domain: &Domain) -> Result<DecreasingFn> {
    let k = rng.random_range(1..=8usize);
    let mut ends: Vec<f64> = (0..k).map(|_| log_uniform(rng, domain.t_min, domain.t_max)).collect();
    ends.sort_by(|a, b| a.total_cmp(b));
    ends.dedup();
    let e = rng.random_range(1.0..4.0);
    let mut levels: Vec<f64> = (0..ends.len()).map(|_| rng.random::<f64>().powf(e).max(1e-6)).collect();
    levels.sort_by(|a, b| b.total_cmp(a));
    DecreasingFn::steps(&ends, levels)
}

/// A random nonnegative step function with compact support and `n` cells.
///
/// About a third of the values are drawn from a small set so that ties and
/// zero cells occur.
pub fn random_piecewise<R: Rng>(rng: &mut R, n: usize) -> Result<PiecewiseFn> {
    let mut pts = vec![0.0];
    let mut t = 0.0;
    for _ in 0..n {
        t += log_uniform(rng, 1e-3, 10.0);
        pts.push(t);
    }
    let values = (0..n)
        .map(|_| {
            if rng.random_bool(1.0 / 3.0) {
                rng.random_range(0..4u32) as f64 * 0.5
            } else {
                rng.random::<f64>() * 10.0
            }
        })
        .collect();
    PiecewiseFn::compact(Grid::from_breakpoints(pts)?, values)
}

/// `χ_(0, a]` for `a` running over every `stride`-th grid point.
pub fn indicator_sweep(domain: &Domain, stride: usize) -> Vec<(f64, DecreasingFn)> {
    domain
        .points()
        .iter()
        .step_by(stride.max(1))
        .map(|&a| (a, DecreasingFn::indicator(a, 1.0).expect("positive support")))
        .collect()
}

/// Half random step functions, half indicators sweeping the grid.
#[derive(Clone, Debug)]
pub struct MixedSampler {
    pub seed: u64,
    pub domain: Domain,
}

impl MixedSampler {
    pub fn new(seed: u64, domain: Domain) -> Self {
        MixedSampler { seed, domain }
    }

    /// Trial `i` with a label naming it.
    pub fn trial(&self, i: usize) -> Result<(String, DecreasingFn)> {
        if i % 2 == 1 {
            let pts = self.domain.points();
            let a = pts[(i / 2) * 7 % pts.len()];
            return Ok((format!("indicator a={a:e}"), DecreasingFn::indicator(a, 1.0)?));
        }
        let mut rng = trial_rng(self.seed, i as u64);
        Ok((format!("random #{i}"), random_decreasing(&mut rng, &self.domain)?))
    }
}
