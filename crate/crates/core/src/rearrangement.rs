//! Distribution functions, decreasing rearrangements and maximal functions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::funcspace::piecewise::cell_mass;
use crate::funcspace::{Grid, LeftExtension, PiecewiseFn, RightExtension, Weight};

/// A nonincreasing [`PiecewiseFn`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PiecewiseFn", into = "PiecewiseFn")]
pub struct DecreasingFn(PiecewiseFn);

impl TryFrom<PiecewiseFn> for DecreasingFn {
    type Error = Error;

    fn try_from(f: PiecewiseFn) -> Result<Self> {
        DecreasingFn::new(f)
    }
}

impl From<DecreasingFn> for PiecewiseFn {
    fn from(f: DecreasingFn) -> Self {
        f.0
    }
}

impl DecreasingFn {
    pub fn new(f: PiecewiseFn) -> Result<Self> {
        if !f.is_nonincreasing() {
            return Err(Error::InvalidFunction("function is not nonincreasing".into()));
        }
        Ok(DecreasingFn(f))
    }

    /// `c · χ_(0, a]`.
    pub fn indicator(a: f64, c: f64) -> Result<Self> {
        DecreasingFn::new(PiecewiseFn::indicator(0.0, a, c)?)
    }

    /// Nonincreasing steps `values` on `(0, b_1], (b_1, b_2], …`.
    pub fn steps(ends: &[f64], values: Vec<f64>) -> Result<Self> {
        let mut pts = Vec::with_capacity(ends.len() + 1);
        pts.push(0.0);
        pts.extend_from_slice(ends);
        DecreasingFn::new(PiecewiseFn::compact(Grid::from_breakpoints(pts)?, values)?)
    }

    pub fn zero() -> Self {
        DecreasingFn(PiecewiseFn::compact(Grid::from_breakpoints(vec![0.0, 1.0]).unwrap(), vec![0.0]).unwrap())
    }

    pub fn as_fn(&self) -> &PiecewiseFn {
        &self.0
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.0.eval(t)
    }

    /// `f*(0+)`.
    pub fn sup(&self) -> f64 {
        self.0.left_value().max(self.0.values()[0])
    }

    /// `∫_0^t f*`.
    pub fn primitive(&self, t: f64) -> f64 {
        self.0.primitive(t)
    }

    /// `f**(t) = (1/t) ∫_0^t f*`.
    pub fn maximal(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return self.sup();
        }
        if t.is_infinite() {
            return self.0.right().value();
        }
        self.primitive(t) / t
    }

    /// `f_u**(t) = (1/U(t)) ∫_0^t f* u`.
    pub fn weighted_maximal(&self, u: &Weight, t: f64) -> Result<f64> {
        WeightedPrimitive::new(self, u)?.maximal(t)
    }

    pub fn is_zero(&self) -> bool {
        self.sup() == 0.0 && self.0.right().value() == 0.0
    }

    pub fn scale(&self, lambda: f64) -> Result<Self> {
        Ok(DecreasingFn(self.0.scale(lambda)?))
    }

    /// Support length `μ{f* > 0}`.
    pub fn support(&self) -> f64 {
        distribution(&self.0, 0.0)
    }
}

/// `t ↦ ∫_0^t f* u` with exact per-cell products, precomputed on the cells of `f*`.
#[derive(Clone, Debug)]
pub struct WeightedPrimitive<'a> {
    f: &'a DecreasingFn,
    u: &'a Weight,
    prefix: Vec<f64>,
}

impl<'a> WeightedPrimitive<'a> {
    pub fn new(f: &'a DecreasingFn, u: &'a Weight) -> Result<Self> {
        let g = f.0.grid();
        let head = match f.0.left() {
            LeftExtension::Constant if g.first() > 0.0 => cell_mass(f.0.values()[0], u.integral(0.0, g.first())?),
            _ => 0.0,
        };
        let mut prefix = Vec::with_capacity(g.n_cells() + 1);
        prefix.push(head);
        let mut acc = head;
        for (k, v) in f.0.values().iter().enumerate() {
            let (lo, hi) = g.cell_bounds(k);
            if *v > 0.0 {
                acc += cell_mass(*v, u.integral(lo, hi)?);
            }
            prefix.push(acc);
        }
        Ok(WeightedPrimitive { f, u, prefix })
    }

    /// `∫_0^t f* u`.
    pub fn at(&self, t: f64) -> Result<f64> {
        let g = self.f.0.grid();
        if t <= g.first() {
            return Ok(cell_mass(self.f.0.left_value(), self.u.integral(0.0, t.max(0.0))?));
        }
        let n = self.prefix.len();
        if t > g.last() {
            let c = self.f.0.right().value();
            let tail = if c > 0.0 {
                cell_mass(c, self.u.integral(g.last(), t)?)
            } else {
                0.0
            };
            return Ok(self.prefix[n - 1] + tail);
        }
        let k = g.cell_of(t).expect("t inside grid");
        let v = self.f.0.values()[k];
        let part = if v > 0.0 {
            cell_mass(v, self.u.integral(g.points()[k], t)?)
        } else {
            0.0
        };
        Ok(self.prefix[k] + part)
    }

    /// `f_u**(t)`.
    pub fn maximal(&self, t: f64) -> Result<f64> {
        let big_u = self.u.cumulative(t)?;
        if !(big_u > 0.0) {
            return Err(Error::DegenerateU(t));
        }
        Ok(self.at(t)? / big_u)
    }
}

/// `μ_f(α) = |{t : f(t) > α}|`.
pub fn distribution(f: &PiecewiseFn, alpha: f64) -> f64 {
    if f.right().value() > alpha {
        return f64::INFINITY;
    }
    let g = f.grid();
    if f.is_nonincreasing() && (g.first() == 0.0 || f.left() == LeftExtension::Constant) {
        // level sets are initial segments
        let k = f.values().partition_point(|v| *v > alpha);
        if k == 0 {
            return 0.0;
        }
        return g.points()[k];
    }
    let mut lens = Vec::new();
    if f.left() == LeftExtension::Constant && f.values()[0] > alpha {
        lens.push(g.first());
    }
    for (k, v) in f.values().iter().enumerate() {
        if *v > alpha {
            let (lo, hi) = g.cell_bounds(k);
            lens.push(hi - lo);
        }
    }
    fsum(&lens)
}

/// Decreasing rearrangement `f*`.
///
/// A function that is already nonincreasing is returned unchanged, which also
/// covers a nonzero constant right extension.
pub fn decreasing_rearrangement(f: &PiecewiseFn) -> Result<DecreasingFn> {
    if f.is_nonincreasing() {
        return Ok(DecreasingFn(f.clone()));
    }
    if f.right().value() > 0.0 {
        return Err(Error::NonRearrangeable);
    }
    let g = f.grid();
    let mut pieces: Vec<(f64, f64)> = Vec::with_capacity(g.n_cells() + 1);
    if f.left() == LeftExtension::Constant && g.first() > 0.0 {
        pieces.push((f.values()[0], g.first()));
    }
    for (k, v) in f.values().iter().enumerate() {
        let (lo, hi) = g.cell_bounds(k);
        pieces.push((*v, hi - lo));
    }
    pieces.retain(|(v, _)| *v > 0.0);
    if pieces.is_empty() {
        return Ok(DecreasingFn::zero());
    }
    // stable: ties keep cell order
    pieces.sort_by(|a, b| b.0.total_cmp(&a.0));

    let mut acc = Accumulator::default();
    let mut pts = vec![0.0];
    let mut vals: Vec<f64> = Vec::new();
    for (v, len) in pieces {
        acc.add(len);
        let end = acc.total();
        let last = pts[pts.len() - 1];
        match vals.last() {
            Some(prev) if *prev == v => {
                let n = pts.len();
                pts[n - 1] = end;
            }
            _ if end > last => {
                pts.push(end);
                vals.push(v);
            }
            _ => {}
        }
    }
    let f = PiecewiseFn::new(
        Grid::from_breakpoints(pts)?,
        vals,
        LeftExtension::Constant,
        RightExtension::Zero,
    )?;
    Ok(DecreasingFn(f))
}

/// Weak-type quasinorm `sup_α α μ_f(α)^{1/p}`.
pub fn weak_norm(f: &PiecewiseFn, p: f64) -> Result<f64> {
    if !(p > 0.0) {
        return Err(Error::InvalidParameter(format!("p must be positive, got {p}")));
    }
    let fs = decreasing_rearrangement(f)?;
    let h = fs.as_fn();
    if h.right().value() > 0.0 {
        return Ok(f64::INFINITY);
    }
    let g = h.grid();
    let mut best: f64 = 0.0;
    for (k, v) in h.values().iter().enumerate() {
        if *v > 0.0 {
            best = best.max(v * g.points()[k + 1].powf(1.0 / p));
        }
    }
    Ok(best)
}

/// Exact running sum (Shewchuk partials) with a correctly rounded total.
#[derive(Clone, Debug, Default)]
pub(crate) struct Accumulator {
    partials: Vec<f64>,
}

impl Accumulator {
    pub(crate) fn add(&mut self, mut x: f64) {
        let mut i = 0;
        for j in 0..self.partials.len() {
            let mut y = self.partials[j];
            if x.abs() < y.abs() {
                std::mem::swap(&mut x, &mut y);
            }
            let hi = x + y;
            let lo = y - (hi - x);
            if lo != 0.0 {
                self.partials[i] = lo;
                i += 1;
            }
            x = hi;
        }
        self.partials.truncate(i);
        self.partials.push(x);
    }

    pub(crate) fn total(&self) -> f64 {
        let p = &self.partials;
        let mut n = p.len();
        if n == 0 {
            return 0.0;
        }
        n -= 1;
        let mut hi = p[n];
        let mut lo = 0.0;
        while n > 0 {
            let x = hi;
            n -= 1;
            let y = p[n];
            hi = x + y;
            let yr = hi - x;
            lo = y - yr;
            if lo != 0.0 {
                break;
            }
        }
        // round half-way cases correctly
        if n > 0 && ((lo < 0.0 && p[n - 1] < 0.0) || (lo > 0.0 && p[n - 1] > 0.0)) {
            let y = lo * 2.0;
            let x = hi + y;
            if y == x - hi {
                hi = x;
            }
        }
        hi
    }
}

pub(crate) fn fsum(xs: &[f64]) -> f64 {
    let mut a = Accumulator::default();
    for x in xs {
        a.add(*x);
    }
    a.total()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(values: Vec<f64>) -> PiecewiseFn {
        PiecewiseFn::unit_cells(values).unwrap()
    }

    #[test]
    fn distribution_examples() {
        let chi = PiecewiseFn::indicator(0.0, 2.0, 1.0).unwrap();
        assert_eq!(distribution(&chi, 0.5), 2.0);
        assert_eq!(distribution(&chi, 1.0), 0.0);
        assert_eq!(distribution(&unit(vec![3.0, 1.0, 2.0]), 1.5), 2.0);
    }

    #[test]
    fn rearrangement_examples() {
        let fs = decreasing_rearrangement(&unit(vec![3.0, 1.0, 2.0])).unwrap();
        assert_eq!(fs.as_fn().values(), &[3.0, 2.0, 1.0]);
        assert_eq!(fs.as_fn().breakpoints(), &[0.0, 1.0, 2.0, 3.0]);
        let d = unit(vec![3.0, 2.0, 2.0]);
        assert_eq!(decreasing_rearrangement(&d).unwrap().as_fn(), &d);
    }

    #[test]
    fn non_rearrangeable() {
        let f = PiecewiseFn::new(
            Grid::from_breakpoints(vec![0.0, 1.0, 2.0]).unwrap(),
            vec![1.0, 2.0],
            LeftExtension::Zero,
            RightExtension::Constant(1.0),
        )
        .unwrap();
        assert_eq!(decreasing_rearrangement(&f), Err(Error::NonRearrangeable));
        let g = PiecewiseFn::new(
            Grid::from_breakpoints(vec![0.0, 1.0]).unwrap(),
            vec![2.0],
            LeftExtension::Zero,
            RightExtension::Constant(1.0),
        )
        .unwrap();
        assert_eq!(decreasing_rearrangement(&g).unwrap().as_fn(), &g);
    }

    #[test]
    fn maximal_examples() {
        let chi = DecreasingFn::indicator(2.0, 1.0).unwrap();
        for &t in &[0.5, 2.0, 4.0, 100.0] {
            assert_eq!(chi.maximal(t), 1f64.min(2.0 / t));
        }
        let fs = decreasing_rearrangement(&unit(vec![3.0, 1.0, 2.0])).unwrap();
        assert_eq!(fs.maximal(3.0), 2.0);
        let c = DecreasingFn::new(
            PiecewiseFn::new(
                Grid::from_breakpoints(vec![0.0, 1.0]).unwrap(),
                vec![2.5],
                LeftExtension::Constant,
                RightExtension::Constant(2.5),
            )
            .unwrap(),
        )
        .unwrap();
        assert_eq!(c.maximal(0.3), 2.5);
        assert_eq!(c.maximal(30.0), 2.5);
    }

    #[test]
    fn weighted_maximal_examples() {
        let fs = decreasing_rearrangement(&unit(vec![3.0, 1.0, 2.0])).unwrap();
        let u = Weight::unit();
        for &t in &[0.25, 1.0, 1.7, 3.0, 9.0] {
            assert_eq!(fs.weighted_maximal(&u, t).unwrap(), fs.maximal(t));
        }
        let chi = DecreasingFn::indicator(1.0, 1.0).unwrap();
        assert_eq!(chi.weighted_maximal(&Weight::power(1.0), 2.0).unwrap(), 0.25);
        let one = DecreasingFn::indicator(1e6, 1.0).unwrap();
        let r = one.weighted_maximal(&Weight::power(-0.5), 3.0).unwrap();
        assert!((r - 1.0).abs() < 1e-15);
    }

    #[test]
    fn weak_norm_matches_lorentz_infinity() {
        // L_{1,∞} of the values [3,2,1] on unit cells: max(3·1, 2·2, 1·3)
        assert_eq!(weak_norm(&unit(vec![1.0, 3.0, 2.0]), 1.0).unwrap(), 4.0);
    }

    #[test]
    fn fsum_is_exact() {
        assert_eq!(fsum(&[1e100, 1.0, -1e100]), 1.0);
        assert_eq!(fsum(&[0.1; 10]), 1.0);
        let a = [1e-16, 1.0, 1e-16];
        let b = [1.0, 1e-16, 1e-16];
        assert_eq!(fsum(&a), fsum(&b));
    }
}
