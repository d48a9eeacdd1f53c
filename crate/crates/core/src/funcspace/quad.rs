//! Composite Gauss–Legendre quadrature on a logarithmic knot set.
//!
//! Knots are the working-domain grid merged with every breakpoint of the
//! integrand's ingredients, so the integrand is smooth on each cell. Outside
//! `[t_min, t_max]` the knot set continues for eight decades at four cells per
//! decade, and the remainder beyond that is closed with a power-law fit.

use super::grid::{merge_points, Domain};

/// 8-point Gauss–Legendre nodes and weights on `[-1, 1]`.
#[allow(clippy::excessive_precision)]
pub(crate) const GL8: [(f64, f64); 8] = [
    (-0.960_289_856_497_536_3, 0.101_228_536_290_376_26),
    (-0.796_666_477_413_626_7, 0.222_381_034_453_374_47),
    (-0.525_532_409_916_329_0, 0.313_706_645_877_887_3),
    (-0.183_434_642_495_649_8, 0.362_683_783_378_362_0),
    (0.183_434_642_495_649_8, 0.362_683_783_378_362_0),
    (0.525_532_409_916_329_0, 0.313_706_645_877_887_3),
    (0.796_666_477_413_626_7, 0.222_381_034_453_374_47),
    (0.960_289_856_497_536_3, 0.101_228_536_290_376_26),
];

const EXT_DECADES: i32 = 8;
const EXT_PER_DECADE: i32 = 4;
const MAX_INNER_RATIO_LOG10: f64 = 1.0 / 16.0;
/// Log-slope above which a function is treated as unbounded past the last sample.
const GROWTH_SLOPE: f64 = 1e-6;

/// A quadrature value split into the part from inside `[t_min, t_max]` and the rest.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub outside: f64,
}

impl Integral {
    pub const ZERO: Integral = Integral {
        value: 0.0,
        outside: 0.0,
    };

    /// More than 1% of the value comes from beyond the working domain.
    pub fn tail_sensitive(&self) -> bool {
        if self.value == 0.0 {
            return false;
        }
        self.outside.is_infinite() || self.outside > 0.01 * self.value
    }

    fn add(&mut self, v: f64, outside: bool) {
        self.value += v;
        if outside {
            self.outside += v;
        }
    }
}

#[derive(Clone, Debug)]
pub struct Quad {
    t_min: f64,
    t_max: f64,
    knots: Vec<f64>,
    nodes: Vec<[(f64, f64); 8]>,
}

impl Quad {
    /// Knots from `domain` plus the given breakpoint sets.
    pub fn new(domain: &Domain, extra: &[&[f64]]) -> Quad {
        let (t_min, t_max) = (domain.t_min, domain.t_max);
        let lo = t_min * 10f64.powi(-EXT_DECADES);
        let hi = t_max * 10f64.powi(EXT_DECADES);
        let n_ext = (EXT_DECADES * EXT_PER_DECADE) as usize;
        let step = 1.0 / EXT_PER_DECADE as f64;
        let left: Vec<f64> = (1..=n_ext).map(|k| t_min * 10f64.powf(-(k as f64) * step)).collect();
        let right: Vec<f64> = (1..=n_ext).map(|k| t_max * 10f64.powf(k as f64 * step)).collect();
        let mut pts = merge_points(domain.points(), &[&left, &right]);
        for e in extra {
            pts.extend(e.iter().copied().filter(|t| *t > lo && *t < hi));
        }
        pts.sort_by(|a, b| a.total_cmp(b));
        pts.dedup();

        // split coarse inner cells
        let mut knots = Vec::with_capacity(pts.len());
        for w in pts.windows(2) {
            knots.push(w[0]);
            if w[0] >= t_min && w[1] <= t_max {
                let r = (w[1] / w[0]).log10();
                let m = (r / MAX_INNER_RATIO_LOG10).ceil() as usize;
                for j in 1..m {
                    knots.push(w[0] * 10f64.powf(r * j as f64 / m as f64));
                }
            }
        }
        knots.push(pts[pts.len() - 1]);

        let nodes = knots.windows(2).map(|w| cell_nodes(w[0], w[1])).collect();
        Quad {
            t_min,
            t_max,
            knots,
            nodes,
        }
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    /// Knots inside `[t_min, t_max]`.
    pub fn inner_knots(&self) -> &[f64] {
        let a = self.knots.partition_point(|&t| t < self.t_min);
        let b = self.knots.partition_point(|&t| t <= self.t_max);
        &self.knots[a..b]
    }

    pub fn t_min(&self) -> f64 {
        self.t_min
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    fn is_outside(&self, lo: f64, hi: f64) -> bool {
        hi <= self.t_min || lo >= self.t_max
    }

    fn cell_value<G: Fn(f64) -> f64>(&self, g: &G, k: usize) -> f64 {
        self.nodes[k].iter().map(|(t, w)| w * g(*t)).sum()
    }

    /// `∫_a^b g` for `0 ≤ a ≤ b ≤ ∞`.
    pub fn integrate<G: Fn(f64) -> f64>(&self, g: G, a: f64, b: f64) -> Integral {
        debug_assert!(a <= b);
        let mut out = Integral::ZERO;
        if a >= b {
            return out;
        }
        let first = self.knots[0];
        let last = self.knots[self.knots.len() - 1];
        if a < first {
            if a == 0.0 {
                out.add(left_remainder(&g, first, self.knots[1]), true);
            } else {
                out.add(log_segment(&g, a, first.min(b)), true);
            }
        }
        for k in 0..self.nodes.len() {
            let (lo, hi) = (self.knots[k], self.knots[k + 1]);
            if hi <= a {
                continue;
            }
            if lo >= b {
                break;
            }
            let v = if lo >= a && hi <= b {
                self.cell_value(&g, k)
            } else {
                log_segment(&g, lo.max(a), hi.min(b))
            };
            out.add(v, self.is_outside(lo, hi));
        }
        if b > last {
            if b.is_infinite() {
                let n = self.knots.len();
                out.add(right_remainder(&g, self.knots[n - 2], last), true);
            } else {
                out.add(log_segment(&g, a.max(last), b), true);
            }
        }
        out
    }

    /// Prepares `t ↦ ∫_t^∞ g` for many `t`.
    pub fn tail<G: Fn(f64) -> f64>(&self, g: G) -> TailIntegrator<'_, G> {
        let n = self.nodes.len();
        let cells: Vec<f64> = (0..n).map(|k| self.cell_value(&g, k)).collect();
        let rem = right_remainder(&g, self.knots[n - 1], self.knots[n]);
        let mut suffix = vec![Integral::ZERO; n + 1];
        suffix[n] = Integral {
            value: rem,
            outside: rem,
        };
        for k in (0..n).rev() {
            let mut s = suffix[k + 1];
            s.add(cells[k], self.is_outside(self.knots[k], self.knots[k + 1]));
            suffix[k] = s;
        }
        TailIntegrator { quad: self, g, suffix }
    }

    /// `sup_{s > a} g(s)` over the knots, with `+∞` when `g` keeps growing at either end.
    pub fn sup_beyond<G: Fn(f64) -> f64>(&self, g: G, a: f64) -> f64 {
        let start = self.knots.partition_point(|&t| t <= a);
        let ks = &self.knots[start..];
        if ks.is_empty() {
            return g(a);
        }
        let vals: Vec<f64> = ks.iter().map(|t| g(*t)).collect();
        let m = vals.iter().copied().fold(0.0, f64::max);
        let n = vals.len();
        if n >= 2 && growing(vals[n - 2], vals[n - 1], ks[n - 2], ks[n - 1]) {
            return f64::INFINITY;
        }
        if start == 0 && n >= 2 && growing(vals[1], vals[0], ks[1], ks[0]) {
            return f64::INFINITY;
        }
        m
    }
}

/// True when `|ln(y1/y0) / ln(x1/x0)|` exceeds the growth threshold and `y1 > y0`.
pub(crate) fn growing(y0: f64, y1: f64, x0: f64, x1: f64) -> bool {
    if y1.is_infinite() {
        return true;
    }
    if !(y1 > y0) || y0 <= 0.0 {
        return false;
    }
    (y1 / y0).ln() / (x1 / x0).ln().abs() > GROWTH_SLOPE
}

pub struct TailIntegrator<'q, G> {
    quad: &'q Quad,
    g: G,
    suffix: Vec<Integral>,
}

impl<G: Fn(f64) -> f64> TailIntegrator<'_, G> {
    /// `∫_t^∞ g`.
    pub fn from(&self, t: f64) -> Integral {
        let q = self.quad;
        let knots = &q.knots;
        let n = knots.len();
        if t >= knots[n - 1] {
            let v = right_remainder(&self.g, t * 10f64.powf(-0.25), t);
            return Integral { value: v, outside: v };
        }
        if t < knots[0] {
            let mut s = self.suffix[0];
            s.add(log_segment(&self.g, t.max(f64::MIN_POSITIVE), knots[0]), true);
            return s;
        }
        // first knot strictly above t
        let k = knots.partition_point(|&x| x <= t);
        let mut s = self.suffix[k];
        if t < knots[k] {
            s.add(log_segment(&self.g, t, knots[k]), q.is_outside(knots[k - 1], knots[k]));
        }
        s
    }
}

fn cell_nodes(lo: f64, hi: f64) -> [(f64, f64); 8] {
    let (la, lb) = (lo.ln(), hi.ln());
    let h = lb - la;
    let mid = la + 0.5 * h;
    let mut out = [(0.0, 0.0); 8];
    for (i, (x, w)) in GL8.iter().enumerate() {
        let t = (mid + 0.5 * h * x).exp();
        out[i] = (t, 0.5 * h * w * t);
    }
    out
}

/// `∫_a^∞ g` for `a > 0`: twelve decades of log-variable Gauss–Legendre,
/// then a power-law closure.
pub(crate) fn integrate_to_infinity<G: Fn(f64) -> f64>(g: &G, a: f64) -> f64 {
    let b = a * 1e12;
    let body = log_segment(g, a, b);
    if body.is_infinite() {
        return body;
    }
    body + right_remainder(g, b * 10f64.powf(-0.25), b)
}

/// One Gauss–Legendre pass in `ln t`, split so each piece spans at most a quarter decade.
fn log_segment<G: Fn(f64) -> f64>(g: &G, a: f64, b: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    super::weight::log_gauss(g, a, b, 0.25 * std::f64::consts::LN_10)
}

/// `∫_0^{x0} g` for `g ≈ C t^γ`, with `γ` fitted from `x0 < x1`.
fn left_remainder<G: Fn(f64) -> f64>(g: &G, x0: f64, x1: f64) -> f64 {
    let (y0, y1) = (g(x0), g(x1));
    if y0 == 0.0 {
        return 0.0;
    }
    if !y0.is_finite() || y1 <= 0.0 {
        return f64::INFINITY;
    }
    let gamma = (y1 / y0).ln() / (x1 / x0).ln();
    if gamma > -1.0 {
        y0 * x0 / (gamma + 1.0)
    } else {
        f64::INFINITY
    }
}

/// `∫_{x1}^∞ g` for `g ≈ C t^γ`, with `γ` fitted from `x0 < x1`.
fn right_remainder<G: Fn(f64) -> f64>(g: &G, x0: f64, x1: f64) -> f64 {
    let (y0, y1) = (g(x0), g(x1));
    if y1 == 0.0 {
        return 0.0;
    }
    if !y1.is_finite() || y0 <= 0.0 {
        return f64::INFINITY;
    }
    let gamma = (y1 / y0).ln() / (x1 / x0).ln();
    if gamma < -1.0 {
        y1 * x1 / -(gamma + 1.0)
    } else {
        f64::INFINITY
    }
}
