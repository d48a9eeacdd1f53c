use serde::{Deserialize, Serialize};

use super::grid::Grid;
use crate::error::{Error, Result};

/// Rule on `(0, t_0]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LeftExtension {
    /// Equal to the first cell value.
    Constant,
    Zero,
}

/// Rule on `(t_N, ∞)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RightExtension {
    Zero,
    Constant(#[serde(with = "crate::extreal")] f64),
}

impl RightExtension {
    pub fn value(&self) -> f64 {
        match self {
            RightExtension::Zero => 0.0,
            RightExtension::Constant(c) => *c,
        }
    }
}

/// Nonnegative piecewise-constant function on a [`Grid`].
///
/// `values[k]` is the constant on `(t_k, t_{k+1}]`. The prefix integrals
/// `∫_0^{t_k} f` are computed once at construction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PiecewiseRepr", into = "PiecewiseRepr")]
pub struct PiecewiseFn {
    grid: Grid,
    values: Vec<f64>,
    left: LeftExtension,
    right: RightExtension,
    prefix: Vec<f64>,
}

#[derive(Clone, Serialize, Deserialize)]
struct PiecewiseRepr {
    grid: Grid,
    #[serde(with = "crate::extreal::vec")]
    values: Vec<f64>,
    #[serde(default = "default_left")]
    left: LeftExtension,
    #[serde(default = "default_right")]
    right: RightExtension,
}

fn default_left() -> LeftExtension {
    LeftExtension::Zero
}

fn default_right() -> RightExtension {
    RightExtension::Zero
}

impl TryFrom<PiecewiseRepr> for PiecewiseFn {
    type Error = Error;

    fn try_from(r: PiecewiseRepr) -> Result<Self> {
        PiecewiseFn::new(r.grid, r.values, r.left, r.right)
    }
}

impl From<PiecewiseFn> for PiecewiseRepr {
    fn from(f: PiecewiseFn) -> Self {
        PiecewiseRepr {
            grid: f.grid,
            values: f.values,
            left: f.left,
            right: f.right,
        }
    }
}

impl PiecewiseFn {
    pub fn new(grid: Grid, values: Vec<f64>, left: LeftExtension, right: RightExtension) -> Result<Self> {
        if values.len() != grid.n_cells() {
            return Err(Error::InvalidFunction(format!(
                "{} values for {} cells",
                values.len(),
                grid.n_cells()
            )));
        }
        if values.iter().any(|v| v.is_nan() || *v < 0.0) {
            return Err(Error::InvalidFunction("values must be nonnegative".into()));
        }
        let rv = right.value();
        if rv.is_nan() || rv < 0.0 {
            return Err(Error::InvalidFunction("right extension must be nonnegative".into()));
        }
        let mut prefix = Vec::with_capacity(values.len() + 1);
        let head = match left {
            LeftExtension::Constant => cell_mass(values[0], grid.first()),
            LeftExtension::Zero => 0.0,
        };
        prefix.push(head);
        let mut acc = head;
        for (k, v) in values.iter().enumerate() {
            let (a, b) = grid.cell_bounds(k);
            acc += cell_mass(*v, b - a);
            prefix.push(acc);
        }
        Ok(PiecewiseFn {
            grid,
            values,
            left,
            right,
            prefix,
        })
    }

    /// Zero extensions on both sides.
    pub fn compact(grid: Grid, values: Vec<f64>) -> Result<Self> {
        PiecewiseFn::new(grid, values, LeftExtension::Zero, RightExtension::Zero)
    }

    /// `c · χ_(a, b]`.
    pub fn indicator(a: f64, b: f64, c: f64) -> Result<Self> {
        if !(a >= 0.0 && b > a) {
            return Err(Error::InvalidFunction(format!("bad indicator support ({a}, {b}]")));
        }
        PiecewiseFn::compact(Grid::from_breakpoints(vec![a, b])?, vec![c])
    }

    /// Unit-length cells `(0,1], (1,2], …` carrying `values`.
    pub fn unit_cells(values: Vec<f64>) -> Result<Self> {
        let n = values.len();
        PiecewiseFn::compact(Grid::uniform(0.0, n as f64, n)?, values)
    }

    /// Samples `g` at the geometric midpoint of each cell (the arithmetic
    /// midpoint for a cell starting at zero).
    pub fn sample<G: Fn(f64) -> f64>(grid: Grid, g: G, left: LeftExtension, right: RightExtension) -> Result<Self> {
        let values = (0..grid.n_cells())
            .map(|k| {
                let (a, b) = grid.cell_bounds(k);
                let mid = if a > 0.0 { (a * b).sqrt() } else { 0.5 * b };
                g(mid)
            })
            .collect();
        PiecewiseFn::new(grid, values, left, right)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn left(&self) -> LeftExtension {
        self.left
    }

    pub fn right(&self) -> RightExtension {
        self.right
    }

    pub fn left_value(&self) -> f64 {
        match self.left {
            LeftExtension::Constant => self.values[0],
            LeftExtension::Zero => 0.0,
        }
    }

    /// Value at `t` with right-closed cells.
    pub fn eval(&self, t: f64) -> f64 {
        if t <= self.grid.first() {
            if t <= 0.0 {
                return self.left_value();
            }
            return self.left_value();
        }
        match self.grid.cell_of(t) {
            Some(k) => self.values[k],
            None => self.right.value(),
        }
    }

    /// Right limit `f(t+)`.
    pub fn eval_right(&self, t: f64) -> f64 {
        if t < self.grid.first() {
            return self.left_value();
        }
        if t >= self.grid.last() {
            return self.right.value();
        }
        let idx = self.grid.points().partition_point(|&p| p <= t);
        self.values[idx - 1]
    }

    /// `∫_0^t f`.
    pub fn primitive(&self, t: f64) -> f64 {
        let t0 = self.grid.first();
        if t <= t0 {
            return cell_mass(self.left_value(), t.max(0.0));
        }
        let tn = self.grid.last();
        if t > tn {
            return self.prefix[self.prefix.len() - 1] + cell_mass(self.right.value(), t - tn);
        }
        let k = self.grid.cell_of(t).expect("t inside grid");
        self.prefix[k] + cell_mass(self.values[k], t - self.grid.points()[k])
    }

    /// `∫_a^b f`, exact for the piecewise-constant representation.
    ///
    /// `b` may be `+∞`; a positive constant right extension then yields `+∞`.
    pub fn integrate(&self, a: f64, b: f64) -> Result<f64> {
        if a > b {
            return Err(Error::InvertedInterval { a, b });
        }
        let a = a.max(0.0);
        if a == b {
            return Ok(0.0);
        }
        let pts = self.grid.points();
        let mut acc = 0.0;
        // left region
        let t0 = pts[0];
        if a < t0 {
            acc += cell_mass(self.left_value(), b.min(t0) - a);
        }
        let start = pts.partition_point(|&p| p <= a).saturating_sub(1);
        for k in start..self.values.len() {
            let (lo, hi) = self.grid.cell_bounds(k);
            if lo >= b {
                break;
            }
            let l = lo.max(a);
            let h = hi.min(b);
            if h > l {
                acc += cell_mass(self.values[k], h - l);
            }
        }
        let tn = self.grid.last();
        if b > tn {
            let l = a.max(tn);
            let c = self.right.value();
            if b.is_infinite() {
                if c > 0.0 {
                    return Ok(f64::INFINITY);
                }
            } else {
                acc += cell_mass(c, b - l);
            }
        }
        Ok(acc)
    }

    /// Pointwise map of the values; extension rules are kept.
    pub fn map_values<F: Fn(f64) -> f64>(&self, g: F) -> Result<Self> {
        let values = self.values.iter().map(|v| g(*v)).collect();
        let right = match self.right {
            RightExtension::Zero => RightExtension::Zero,
            RightExtension::Constant(c) => RightExtension::Constant(g(c)),
        };
        PiecewiseFn::new(self.grid.clone(), values, self.left, right)
    }

    pub fn powf(&self, p: f64) -> Result<Self> {
        self.map_values(|v| if v == 0.0 { 0.0 } else { v.powf(p) })
    }

    pub fn scale(&self, lambda: f64) -> Result<Self> {
        self.map_values(|v| lambda * v)
    }

    /// `‖f‖_{p,(0,r)}`; `p = ∞` gives the essential supremum on `(0, r]`.
    pub fn p_norm(&self, p: f64, r: f64) -> Result<f64> {
        if !(p > 0.0) {
            return Err(Error::InvalidParameter(format!("p must be positive, got {p}")));
        }
        if !(r > 0.0) {
            return Err(Error::InvalidParameter(format!("r must be positive, got {r}")));
        }
        if p.is_infinite() {
            return Ok(self.sup_on(0.0, r));
        }
        let s = self.powf(p)?.integrate(0.0, r)?;
        Ok(s.powf(1.0 / p))
    }

    /// Supremum of the values over cells meeting `(a, b]`, extensions included.
    pub fn sup_on(&self, a: f64, b: f64) -> f64 {
        let pts = self.grid.points();
        let mut m: f64 = 0.0;
        if a < pts[0] {
            m = m.max(self.left_value());
        }
        for k in 0..self.values.len() {
            let (lo, hi) = self.grid.cell_bounds(k);
            if hi > a && lo < b {
                m = m.max(self.values[k]);
            }
        }
        if b > self.grid.last() {
            m = m.max(self.right.value());
        }
        m
    }

    pub fn is_nonincreasing(&self) -> bool {
        let head_ok = match self.left {
            LeftExtension::Constant => true,
            LeftExtension::Zero => self.grid.first() == 0.0 || self.values.iter().all(|v| *v == 0.0),
        };
        head_ok
            && self.values.windows(2).all(|w| w[0] >= w[1])
            && self.right.value() <= self.values[self.values.len() - 1]
    }

    /// Breakpoints, including the extension boundaries.
    pub fn breakpoints(&self) -> &[f64] {
        self.grid.points()
    }
}

/// `v · len` with `0 · ∞ = 0` and `∞ · 0 = 0`.
#[inline]
pub(crate) fn cell_mass(v: f64, len: f64) -> f64 {
    if v == 0.0 || len == 0.0 {
        0.0
    } else {
        v * len
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrate_examples() {
        let one = PiecewiseFn::compact(Grid::from_breakpoints(vec![0.0, 2.0]).unwrap(), vec![1.0]).unwrap();
        assert_eq!(one.integrate(0.0, 2.0).unwrap(), 2.0);
        let chi = PiecewiseFn::indicator(0.0, 1.0, 1.0).unwrap();
        assert_eq!(chi.integrate(0.0, 3.0).unwrap(), 1.0);
        assert_eq!(chi.integrate(0.0, f64::INFINITY).unwrap(), 1.0);
        assert!(matches!(chi.integrate(2.0, 1.0), Err(Error::InvertedInterval { .. })));
    }

    #[test]
    fn sampled_sqrt_matches_antiderivative() {
        let g = Grid::geometric(1e-2, 1e2, 64).unwrap();
        let f = PiecewiseFn::sample(g, f64::sqrt, LeftExtension::Zero, RightExtension::Zero).unwrap();
        let got = f.integrate(0.01, 100.0).unwrap();
        let exact = (2.0 / 3.0) * (100f64.powf(1.5) - 0.01f64.powf(1.5));
        assert!(((got - exact) / exact).abs() <= 2e-2, "{got} vs {exact}");
    }

    #[test]
    fn p_norm_examples() {
        let chi = PiecewiseFn::indicator(0.0, 1.0, 1.0).unwrap();
        assert_eq!(chi.p_norm(2.0, f64::INFINITY).unwrap(), 1.0);
        let f = PiecewiseFn::unit_cells(vec![3.0, 1.0, 2.0]).unwrap();
        assert_eq!(f.p_norm(f64::INFINITY, 3.0).unwrap(), 3.0);
        let g = PiecewiseFn::unit_cells(vec![2.0, 1.0]).unwrap();
        assert_eq!(g.p_norm(1.0, 2.0).unwrap(), 3.0);
    }

    #[test]
    fn constant_tail_diverges() {
        let f = PiecewiseFn::new(
            Grid::from_breakpoints(vec![0.0, 1.0]).unwrap(),
            vec![1.0],
            LeftExtension::Zero,
            RightExtension::Constant(1.0),
        )
        .unwrap();
        assert_eq!(f.integrate(0.0, f64::INFINITY).unwrap(), f64::INFINITY);
        assert_eq!(f.integrate(0.0, 3.0).unwrap(), 3.0);
    }

    #[test]
    fn left_extension_rules() {
        let g = Grid::from_breakpoints(vec![1.0, 2.0]).unwrap();
        let c = PiecewiseFn::new(g.clone(), vec![2.0], LeftExtension::Constant, RightExtension::Zero).unwrap();
        let z = PiecewiseFn::compact(g, vec![2.0]).unwrap();
        assert_eq!(c.integrate(0.0, 2.0).unwrap(), 4.0);
        assert_eq!(z.integrate(0.0, 2.0).unwrap(), 2.0);
        assert_eq!(c.primitive(0.5), 1.0);
        assert_eq!(z.primitive(0.5), 0.0);
    }

    #[test]
    fn eval_conventions() {
        let f = PiecewiseFn::unit_cells(vec![3.0, 1.0, 2.0]).unwrap();
        assert_eq!(f.eval(1.0), 3.0);
        assert_eq!(f.eval_right(1.0), 1.0);
        assert_eq!(f.eval(3.5), 0.0);
    }

    #[test]
    fn rejects_negative_values() {
        assert!(PiecewiseFn::unit_cells(vec![1.0, -1.0]).is_err());
    }
}
