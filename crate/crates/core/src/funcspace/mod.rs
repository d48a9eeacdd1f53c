//! Grids, piecewise-constant functions, weights and quadrature.

pub mod grid;
pub mod piecewise;
pub mod quad;
pub mod special;
pub mod weight;

pub use grid::{Domain, Grid};
pub use piecewise::{LeftExtension, PiecewiseFn, RightExtension};
pub use quad::{Integral, Quad};
pub use weight::{Weight, WeightKind};

use crate::error::{Error, Result};

/// `sup_{t ∈ (a, b)} f(t) v(t)` using the exact supremum of `v` on each cell.
pub fn ess_sup_weighted(f: &PiecewiseFn, v: &Weight, a: f64, b: f64) -> Result<f64> {
    if a > b {
        return Err(Error::InvertedInterval { a, b });
    }
    let g = f.grid();
    let mut m: f64 = 0.0;
    let mut visit = |val: f64, lo: f64, hi: f64| {
        let (l, h) = (lo.max(a), hi.min(b));
        if val > 0.0 && h > l {
            m = m.max(val * v.sup_on(l, h));
        }
    };
    visit(f.left_value(), 0.0, g.first());
    for k in 0..g.n_cells() {
        let (lo, hi) = g.cell_bounds(k);
        visit(f.values()[k], lo, hi);
    }
    visit(f.right().value(), g.last(), f64::INFINITY);
    Ok(m)
}
