use serde::{Deserialize, Serialize};

use super::piecewise::{cell_mass, PiecewiseFn, RightExtension};
use super::special::upper_gamma;
use crate::error::{Error, Result};

/// A weight `w ≥ 0` on `(0, ∞)`.
///
/// Symbolic kinds carry closed-form integrals. `scale` multiplies the whole
/// weight and is omitted from JSON when it equals one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Weight {
    #[serde(default = "one", skip_serializing_if = "is_one")]
    pub scale: f64,
    #[serde(flatten)]
    pub kind: WeightKind,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum WeightKind {
    /// `t^α`
    Power {
        alpha: f64,
    },
    /// `t^α (1 + ln⁺(1/t))^β`
    PowerLog {
        alpha: f64,
        beta: f64,
    },
    Tabulated(PiecewiseFn),
}

fn one() -> f64 {
    1.0
}

fn is_one(x: &f64) -> bool {
    *x == 1.0
}

/// `∫_a^b s^α ds`, `b` possibly infinite.
pub fn power_integral(alpha: f64, a: f64, b: f64) -> Result<f64> {
    if a > b {
        return Err(Error::InvertedInterval { a, b });
    }
    if a == b {
        return Ok(0.0);
    }
    if alpha == 0.0 {
        return Ok(b - a);
    }
    if a == 0.0 && alpha <= -1.0 {
        return Err(Error::NonIntegrableNearZero(format!("t^{alpha}")));
    }
    let c = alpha + 1.0;
    if b.is_infinite() {
        if c >= 0.0 {
            return Ok(f64::INFINITY);
        }
        return Ok(a.powf(c) / -c);
    }
    if a == 0.0 {
        return Ok(b.powf(c) / c);
    }
    if c == 0.0 {
        return Ok((b / a).ln());
    }
    Ok(a.powf(c) * (c * (b / a).ln()).exp_m1() / c)
}

/// Composite 8-point Gauss–Legendre in `ln t` for a smooth integrand on `[a, b]`, `a > 0`.
pub(crate) fn log_gauss<F: Fn(f64) -> f64>(g: F, a: f64, b: f64, max_width: f64) -> f64 {
    let (la, lb) = (a.ln(), b.ln());
    let n = ((lb - la) / max_width).ceil().max(1.0) as usize;
    let h = (lb - la) / n as f64;
    let mut acc = 0.0;
    for i in 0..n {
        let lo = la + i as f64 * h;
        let mid = lo + 0.5 * h;
        for (x, w) in super::quad::GL8 {
            let u = mid + 0.5 * h * x;
            let t = u.exp();
            acc += 0.5 * h * w * g(t) * t;
        }
    }
    acc
}

impl Weight {
    pub fn power(alpha: f64) -> Self {
        Weight {
            scale: 1.0,
            kind: WeightKind::Power { alpha },
        }
    }

    pub fn power_log(alpha: f64, beta: f64) -> Self {
        Weight {
            scale: 1.0,
            kind: WeightKind::PowerLog { alpha, beta },
        }
    }

    pub fn tabulated(f: PiecewiseFn) -> Self {
        Weight {
            scale: 1.0,
            kind: WeightKind::Tabulated(f),
        }
    }

    /// `w ≡ 1`.
    pub fn unit() -> Self {
        Weight::power(0.0)
    }

    pub fn scaled(mut self, lambda: f64) -> Self {
        self.scale *= lambda;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.scale >= 0.0 && self.scale.is_finite()) {
            return Err(Error::InvalidParameter(format!("bad weight scale {}", self.scale)));
        }
        match &self.kind {
            WeightKind::Power { alpha } if !alpha.is_finite() => {
                Err(Error::InvalidParameter("alpha must be finite".into()))
            }
            WeightKind::PowerLog { alpha, beta } if !(alpha.is_finite() && beta.is_finite()) => {
                Err(Error::InvalidParameter("alpha and beta must be finite".into()))
            }
            _ => Ok(()),
        }
    }

    fn base(&self, t: f64) -> f64 {
        match &self.kind {
            WeightKind::Power { alpha } => {
                if t == 0.0 || t.is_infinite() {
                    return if t == 0.0 {
                        self.base_at_zero()
                    } else {
                        self.base_at_infinity()
                    };
                }
                t.powf(*alpha)
            }
            WeightKind::PowerLog { alpha, beta } => {
                if t == 0.0 || t.is_infinite() {
                    return if t == 0.0 {
                        self.base_at_zero()
                    } else {
                        self.base_at_infinity()
                    };
                }
                if t >= 1.0 {
                    t.powf(*alpha)
                } else {
                    t.powf(*alpha) * (1.0 - t.ln()).powf(*beta)
                }
            }
            WeightKind::Tabulated(f) => f.eval(t),
        }
    }

    fn base_at_zero(&self) -> f64 {
        match &self.kind {
            WeightKind::Power { alpha } => power_limit(*alpha, 0.0),
            WeightKind::PowerLog { alpha, beta } => {
                if *alpha != 0.0 {
                    power_limit(*alpha, 0.0)
                } else {
                    power_limit(-*beta, 0.0)
                }
            }
            WeightKind::Tabulated(f) => f.left_value(),
        }
    }

    fn base_at_infinity(&self) -> f64 {
        match &self.kind {
            WeightKind::Power { alpha } | WeightKind::PowerLog { alpha, .. } => power_limit(*alpha, f64::INFINITY),
            WeightKind::Tabulated(f) => f.right().value(),
        }
    }

    /// `w(t)`; for tabulated weights the value on the cell `(t_k, t_{k+1}]` containing `t`.
    pub fn eval(&self, t: f64) -> f64 {
        scaled(self.scale, self.base(t))
    }

    /// Right limit `w(t+)`.
    pub fn eval_right(&self, t: f64) -> f64 {
        match &self.kind {
            WeightKind::Tabulated(f) => scaled(self.scale, f.eval_right(t)),
            _ => self.eval(t),
        }
    }

    pub fn limit_at_zero(&self) -> f64 {
        scaled(self.scale, self.base_at_zero())
    }

    pub fn limit_at_infinity(&self) -> f64 {
        scaled(self.scale, self.base_at_infinity())
    }

    /// Points where `w` may fail to be smooth.
    pub fn breakpoints(&self) -> Vec<f64> {
        match &self.kind {
            WeightKind::Power { .. } => Vec::new(),
            WeightKind::PowerLog { .. } => vec![1.0],
            WeightKind::Tabulated(f) => f.breakpoints().to_vec(),
        }
    }

    pub fn is_integrable_at_zero(&self) -> bool {
        match &self.kind {
            WeightKind::Power { alpha } => *alpha > -1.0,
            WeightKind::PowerLog { alpha, beta } => *alpha > -1.0 || (*alpha == -1.0 && *beta < -1.0),
            WeightKind::Tabulated(_) => true,
        }
    }

    /// `W(t) = ∫_0^t w`.
    pub fn cumulative(&self, t: f64) -> Result<f64> {
        self.integral(0.0, t)
    }

    /// `∫_a^b w` with `0 ≤ a ≤ b ≤ ∞`.
    pub fn integral(&self, a: f64, b: f64) -> Result<f64> {
        self.integral_with_power(0.0, a, b)
    }

    /// `∫_a^b s^γ w(s) ds`.
    pub fn integral_with_power(&self, gamma: f64, a: f64, b: f64) -> Result<f64> {
        if a > b || a.is_nan() || b.is_nan() {
            return Err(Error::InvertedInterval { a, b });
        }
        let a = a.max(0.0);
        if a == b {
            return Ok(0.0);
        }
        let raw = match &self.kind {
            WeightKind::Power { alpha } => power_integral(alpha + gamma, a, b)?,
            WeightKind::PowerLog { alpha, beta } => powerlog_integral(alpha + gamma, *beta, a, b)?,
            WeightKind::Tabulated(f) => tabulated_moment(f, gamma, a, b)?,
        };
        Ok(scaled(self.scale, raw))
    }

    /// `w^p` as a weight of the same kind.
    pub fn powf(&self, p: f64) -> Result<Weight> {
        let kind = match &self.kind {
            WeightKind::Power { alpha } => WeightKind::Power { alpha: alpha * p },
            WeightKind::PowerLog { alpha, beta } => WeightKind::PowerLog {
                alpha: alpha * p,
                beta: beta * p,
            },
            WeightKind::Tabulated(f) => WeightKind::Tabulated(f.powf(p)?),
        };
        Ok(Weight {
            scale: if self.scale == 1.0 { 1.0 } else { self.scale.powf(p) },
            kind,
        })
    }

    /// Supremum of `w` on `(a, b)`, `b` possibly infinite.
    pub fn sup_on(&self, a: f64, b: f64) -> f64 {
        let raw = match &self.kind {
            WeightKind::Power { alpha } => {
                let (x, y) = (power_limit_at(*alpha, a), power_limit_at(*alpha, b));
                x.max(y)
            }
            WeightKind::PowerLog { alpha, beta } => {
                let mut cands = vec![a, b];
                if a < 1.0 && b > 1.0 {
                    cands.push(1.0);
                }
                if *alpha != 0.0 && beta / alpha >= 1.0 {
                    let tc = (1.0 - beta / alpha).exp();
                    if tc > a && tc < b {
                        cands.push(tc);
                    }
                }
                cands.into_iter().map(|t| self.base(t)).fold(0.0, f64::max)
            }
            WeightKind::Tabulated(f) => f.sup_on(a, b),
        };
        scaled(self.scale, raw)
    }

    /// Tabulated weights expose the underlying function.
    pub fn as_tabulated(&self) -> Option<&PiecewiseFn> {
        match &self.kind {
            WeightKind::Tabulated(f) => Some(f),
            _ => None,
        }
    }

    pub fn is_symbolic(&self) -> bool {
        !matches!(self.kind, WeightKind::Tabulated(_))
    }
}

fn scaled(scale: f64, v: f64) -> f64 {
    if scale == 1.0 {
        v
    } else {
        cell_mass(scale, v)
    }
}

/// `lim t^α` as `t → at` (`at ∈ {0, ∞}`) or the value at a finite point.
fn power_limit(alpha: f64, at: f64) -> f64 {
    if alpha == 0.0 {
        1.0
    } else if (at == 0.0) == (alpha > 0.0) {
        0.0
    } else {
        f64::INFINITY
    }
}

fn power_limit_at(alpha: f64, t: f64) -> f64 {
    if t == 0.0 || t.is_infinite() {
        power_limit(alpha, t)
    } else {
        t.powf(alpha)
    }
}

/// `∫_0^t s^α (1 + ln(1/s))^β ds` for `0 < t ≤ 1` when integrable at zero.
fn powerlog_primitive(alpha: f64, beta: f64, t: f64) -> f64 {
    let x = 1.0 - t.ln();
    let c = alpha + 1.0;
    if c == 0.0 {
        return x.powf(beta + 1.0) / -(beta + 1.0);
    }
    // substitute x = 1 + ln(1/s)
    let log_pref = c + (-beta - 1.0) * c.ln();
    log_pref.exp() * upper_gamma(beta + 1.0, c * x)
}

fn powerlog_integral(alpha: f64, beta: f64, a: f64, b: f64) -> Result<f64> {
    let integrable = alpha > -1.0 || (alpha == -1.0 && beta < -1.0);
    let mut acc = 0.0;
    if a < 1.0 {
        let hi = b.min(1.0);
        let g = |s: f64| s.powf(alpha) * (1.0 - s.ln()).powf(beta);
        if a == 0.0 {
            if !integrable {
                return Err(Error::NonIntegrableNearZero(format!("t^{alpha} (1 + ln(1/t))^{beta}")));
            }
            acc += powerlog_primitive(alpha, beta, hi);
        } else if integrable {
            let fa = powerlog_primitive(alpha, beta, a);
            let fb = powerlog_primitive(alpha, beta, hi);
            acc += if fa <= 0.5 * fb {
                fb - fa
            } else {
                log_gauss(g, a, hi, 0.25)
            };
        } else if alpha == -1.0 {
            let (xa, xb) = (1.0 - a.ln(), 1.0 - hi.ln());
            acc += if beta == -1.0 {
                (xa / xb).ln()
            } else {
                (xa.powf(beta + 1.0) - xb.powf(beta + 1.0)) / (beta + 1.0)
            };
        } else {
            acc += log_gauss(g, a, hi, 0.25);
        }
    }
    if b > 1.0 {
        acc += power_integral(alpha, a.max(1.0), b)?;
    }
    Ok(acc)
}

/// `∫_a^b s^γ f(s) ds` for piecewise-constant `f`, exact per cell.
fn tabulated_moment(f: &PiecewiseFn, gamma: f64, a: f64, b: f64) -> Result<f64> {
    if gamma == 0.0 {
        return f.integrate(a, b);
    }
    let g = f.grid();
    let pts = g.points();
    let mut acc = 0.0;
    let t0 = pts[0];
    if a < t0 && f.left_value() > 0.0 {
        acc += f.left_value() * power_integral(gamma, a, b.min(t0))?;
    }
    for k in 0..g.n_cells() {
        let (lo, hi) = g.cell_bounds(k);
        let l = lo.max(a);
        let h = hi.min(b);
        if h > l && f.values()[k] > 0.0 {
            acc += cell_mass(f.values()[k], power_integral(gamma, l, h)?);
        }
    }
    let tn = g.last();
    if b > tn {
        if let RightExtension::Constant(c) = f.right() {
            if c > 0.0 {
                acc += c * power_integral(gamma, a.max(tn), b)?;
            }
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcspace::grid::Grid;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn cumulative_examples() {
        assert_eq!(Weight::power(0.0).cumulative(5.0).unwrap(), 5.0);
        assert_eq!(Weight::power(1.0).cumulative(2.0).unwrap(), 2.0);
        assert!(matches!(
            Weight::power(-1.0).cumulative(1.0),
            Err(Error::NonIntegrableNearZero(_))
        ));
        let w = Weight::power(-0.5);
        assert!(rel(w.cumulative(4.0).unwrap(), 4.0) < 1e-15);
    }

    #[test]
    fn power_integral_tails() {
        assert_eq!(power_integral(-2.0, 1.0, f64::INFINITY).unwrap(), 1.0);
        assert_eq!(power_integral(-1.0, 1.0, f64::INFINITY).unwrap(), f64::INFINITY);
        assert!(rel(power_integral(-1.0, 1.0, 10.0).unwrap(), 10f64.ln()) < 1e-15);
    }

    #[test]
    fn powerlog_cumulative_matches_quadrature() {
        for &(alpha, beta) in &[(0.0, 1.0), (0.5, -2.0), (-0.5, 0.5), (2.0, 3.0)] {
            let w = Weight::power_log(alpha, beta);
            for &t in &[1e-3, 0.3, 1.0, 7.0] {
                let got = w.cumulative(t).unwrap();
                let g = |s: f64| w.eval(s);
                // substitute s = e^u and integrate far enough into the left tail
                let lo = 1e-40_f64;
                let mut want = log_gauss(g, lo, t.min(1.0), 0.05);
                if t > 1.0 {
                    want += log_gauss(g, 1.0, t, 0.05);
                }
                assert!(
                    rel(got, want) < 1e-9,
                    "alpha={alpha} beta={beta} t={t}: {got} vs {want}"
                );
            }
        }
    }

    #[test]
    fn powerlog_critical_exponent() {
        // ∫_0^t ds / (s (1+ln(1/s))^2) = 1 / (1 + ln(1/t))
        let w = Weight::power_log(-1.0, -2.0);
        for &t in &[1e-3, 0.5, 1.0] {
            assert!(rel(w.cumulative(t).unwrap(), 1.0 / (1.0 - t.ln())) < 1e-14);
        }
        assert!(rel(w.cumulative(3.0).unwrap(), 1.0 + 3f64.ln()) < 1e-14);
    }

    #[test]
    fn powerlog_nonintegrable_pieces() {
        let w = Weight::power_log(-1.0, -1.0);
        assert!(w.cumulative(1.0).is_err());
        // ∫_a^1 ds / (s (1+ln(1/s))) = ln(1 + ln(1/a))
        let a: f64 = 1e-3;
        assert!(rel(w.integral(a, 1.0).unwrap(), (1.0 - a.ln()).ln()) < 1e-14);
        let w = Weight::power_log(-2.0, 1.0);
        let want = log_gauss(|s| w.eval(s), 0.01, 1.0, 0.01);
        assert!(rel(w.integral(0.01, 1.0).unwrap(), want) < 1e-12);
    }

    #[test]
    fn tabulated_moment_is_exact() {
        let f = PiecewiseFn::unit_cells(vec![2.0, 1.0]).unwrap();
        let w = Weight::tabulated(f);
        // ∫_0^1 2 s ds + ∫_1^2 s ds = 1 + 1.5
        assert!(rel(w.integral_with_power(1.0, 0.0, 2.0).unwrap(), 2.5) < 1e-15);
        assert_eq!(w.cumulative(2.0).unwrap(), 3.0);
    }

    #[test]
    fn sup_on_examples() {
        assert_eq!(Weight::power(1.0).sup_on(0.0, 1.0), 1.0);
        assert_eq!(Weight::power(-0.5).sup_on(0.0, 1.0), f64::INFINITY);
        assert_eq!(Weight::power(0.5).sup_on(1.0, f64::INFINITY), f64::INFINITY);
        // t (1 + ln(1/t))^2 has an interior maximum at t = e^{-1}
        let w = Weight::power_log(1.0, 2.0);
        let s = w.sup_on(0.0, 1.0);
        assert!(rel(s, (-1f64).exp() * 4.0) < 1e-14);
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let ws = vec![
            Weight::power(0.1 + 0.2),
            Weight::power_log(-0.75, 1.0 / 3.0),
            Weight::power(2.0).scaled(16.0),
            Weight::tabulated(PiecewiseFn::compact(Grid::geometric(0.5, 2.0, 3).unwrap(), vec![0.3, 0.7]).unwrap()),
        ];
        for w in ws {
            let s = serde_json::to_string(&w).unwrap();
            let back: Weight = serde_json::from_str(&s).unwrap();
            assert_eq!(w, back, "{s}");
        }
        let w: Weight = serde_json::from_str(r#"{"kind":"power","alpha":-0.25}"#).unwrap();
        assert_eq!(w, Weight::power(-0.25));
        let s = serde_json::to_string(&Weight::power_log(1.0, 2.0)).unwrap();
        assert_eq!(s, r#"{"kind":"powerlog","alpha":1.0,"beta":2.0}"#);
    }
}
