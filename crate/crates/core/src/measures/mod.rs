//! Discrete measures on `[0, ∞)`, their fundamental functions with respect
//! to an admissible `σ`, and the inverse problem of fitting a representation
//! measure to a target function.

mod nnls;

pub use nnls::nnls;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::funcspace::quad::integrate_to_infinity;
use crate::funcspace::weight::power_integral;
use crate::funcspace::Domain;
use crate::report::{ConditionReport, ConditionTag, EquivReport};
use crate::weights::quasiconcave_check;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub t: f64,
    pub m: f64,
}

/// Density `coef · s^alpha` on `(t_last, ∞)`, where `t_last` is the last atom.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerTail {
    pub alpha: f64,
    pub coef: f64,
}

/// A finite list of atoms with an optional power-law tail.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MeasureRepr", into = "MeasureRepr")]
pub struct DiscreteMeasure {
    atoms: Vec<Atom>,
    tail: Option<PowerTail>,
}

#[derive(Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MeasureRepr {
    atoms: Vec<Atom>,
    #[serde(default)]
    tail: Option<PowerTail>,
}

impl TryFrom<MeasureRepr> for DiscreteMeasure {
    type Error = Error;

    fn try_from(r: MeasureRepr) -> Result<Self> {
        DiscreteMeasure::new(r.atoms, r.tail)
    }
}

impl From<DiscreteMeasure> for MeasureRepr {
    fn from(m: DiscreteMeasure) -> Self {
        MeasureRepr {
            atoms: m.atoms,
            tail: m.tail,
        }
    }
}

impl DiscreteMeasure {
    pub fn new(atoms: Vec<Atom>, tail: Option<PowerTail>) -> Result<Self> {
        for a in &atoms {
            if !(a.t >= 0.0 && a.t.is_finite()) {
                return Err(Error::InvalidMeasure(format!("bad atom location {}", a.t)));
            }
            if !(a.m > 0.0 && a.m.is_finite()) {
                return Err(Error::InvalidMeasure(format!("bad atom mass {} at {}", a.m, a.t)));
            }
        }
        if atoms.windows(2).any(|w| w[0].t >= w[1].t) {
            return Err(Error::InvalidMeasure("atom locations must increase".into()));
        }
        if let Some(tl) = tail {
            let start = atoms.last().map_or(0.0, |a| a.t);
            if !(start > 0.0) {
                return Err(Error::InvalidMeasure("a tail needs a last atom at t > 0".into()));
            }
            if !(tl.alpha.is_finite() && tl.coef > 0.0 && tl.coef.is_finite()) {
                return Err(Error::InvalidMeasure("bad tail parameters".into()));
            }
        }
        Ok(DiscreteMeasure { atoms, tail })
    }

    pub fn empty() -> Self {
        DiscreteMeasure {
            atoms: Vec::new(),
            tail: None,
        }
    }

    /// `m · δ_t`.
    pub fn delta(t: f64, m: f64) -> Result<Self> {
        DiscreteMeasure::new(vec![Atom { t, m }], None)
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn tail(&self) -> Option<PowerTail> {
        self.tail
    }

    fn tail_start(&self) -> f64 {
        self.atoms.last().map_or(0.0, |a| a.t)
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty() && self.tail.is_none()
    }

    pub fn scale(&self, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidParameter(format!("scale {lambda} must be positive")));
        }
        let atoms = self
            .atoms
            .iter()
            .map(|a| Atom {
                t: a.t,
                m: a.m * lambda,
            })
            .collect();
        let tail = self.tail.map(|t| PowerTail {
            alpha: t.alpha,
            coef: t.coef * lambda,
        });
        DiscreteMeasure::new(atoms, tail)
    }

    /// `ν([a, b])`, `b` possibly infinite.
    pub fn mass_on(&self, a: f64, b: f64) -> f64 {
        let atoms: f64 = self.atoms.iter().filter(|x| x.t >= a && x.t <= b).map(|x| x.m).sum();
        let tail = match self.tail {
            Some(tl) => {
                let lo = a.max(self.tail_start());
                if lo < b {
                    tl.coef * power_integral(tl.alpha, lo, b).unwrap_or(f64::INFINITY)
                } else {
                    0.0
                }
            }
            None => 0.0,
        };
        atoms + tail
    }

    /// `∫ g dν`, the tail part by quadrature.
    pub fn integrate<G: Fn(f64) -> f64>(&self, g: G) -> f64 {
        let atoms: f64 = self.atoms.iter().map(|a| a.m * g(a.t)).sum();
        atoms + self.tail_integral(&g, self.tail_start())
    }

    /// `∫_{(max(a, tail start), ∞)} g dν_tail`.
    fn tail_integral<G: Fn(f64) -> f64>(&self, g: &G, a: f64) -> f64 {
        match self.tail {
            Some(tl) => {
                let lo = a.max(self.tail_start());
                tl.coef * integrate_to_infinity(&|s: f64| s.powf(tl.alpha) * g(s), lo)
            }
            None => 0.0,
        }
    }
}

/// `σ(s)` with the convention `σ(0) = 0`.
fn sig_at<S: Fn(f64) -> f64>(sigma: &S, s: f64) -> f64 {
    if s == 0.0 {
        0.0
    } else {
        sigma(s)
    }
}

fn sigma_checked<S: Fn(f64) -> f64>(sigma: &S, t: f64) -> Result<f64> {
    let st = sigma(t);
    if !(st > 0.0) {
        return Err(Error::DegenerateSigma(t));
    }
    Ok(st)
}

/// `h(t) = σ(t) ∫ dν(s)/(σ(s)+σ(t))`.
///
/// Each term is written as `m/(1 + σ(s)/σ(t))`, so an origin atom contributes
/// exactly its mass.
pub fn fundamental_function<S: Fn(f64) -> f64>(nu: &DiscreteMeasure, sigma: &S, t: f64) -> Result<f64> {
    let st = sigma_checked(sigma, t)?;
    Ok(nu.integrate(|s| 1.0 / (1.0 + sig_at(sigma, s) / st)))
}

/// The two equivalent forms of `h`:
/// A: `ν([0,t]) + σ(t) ∫_{(t,∞)} dν/σ`;
/// B: `∫_0^t ∫_{[s,∞)} dν(y)/σ(y) dσ(s) = ∫ min(1, σ(t)/σ(y)) dν(y)` over `y > 0`.
///
/// Form B is the Stieltjes integral in closed form; an atom at the origin
/// contributes nothing to it.
pub fn fundamental_equiv_forms<S: Fn(f64) -> f64>(nu: &DiscreteMeasure, sigma: &S, t: f64) -> Result<(f64, f64)> {
    let st = sigma_checked(sigma, t)?;
    let mut left = 0.0;
    let mut right = 0.0;
    let mut b = 0.0;
    for a in nu.atoms() {
        if a.t <= t {
            left += a.m;
        } else {
            right += a.m / sigma(a.t);
        }
        if a.t > 0.0 {
            b += a.m * (st / sigma(a.t)).min(1.0);
        }
    }
    if let Some(tl) = nu.tail() {
        let start = nu.tail_start();
        if t > start {
            left += tl.coef * power_integral(tl.alpha, start, t)?;
        }
        right += nu.tail_integral(&|s| 1.0 / sigma(s), t);
        b += nu.tail_integral(&|s| (st / sigma(s)).min(1.0), 0.0);
    }
    let a = if right == 0.0 { left } else { left + st * right };
    Ok((a, b))
}

/// Non-degeneracy of `ν` with respect to `σ`, judged by truncation proxies.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NondegeneracyReport {
    pub report: ConditionReport,
    /// `∫ dν/(σ(s)+σ(1)) < ∞`
    pub finite: bool,
    /// `∫_{[0,1]} dν/σ`
    #[serde(with = "crate::extreal")]
    pub near_zero: f64,
    /// `ν([1, t_max])`, or `+∞` if the tail has infinite mass
    #[serde(with = "crate::extreal")]
    pub far: f64,
    /// the two divergence requirements were tested on a truncated domain
    pub truncated: bool,
}

pub fn nondegeneracy_check<S: Fn(f64) -> f64>(
    nu: &DiscreteMeasure,
    sigma: &S,
    domain: &Domain,
) -> Result<NondegeneracyReport> {
    let s1 = sigma_checked(sigma, 1.0)?;
    let first = nu.integrate(|s| 1.0 / (sig_at(sigma, s) + s1));
    let near_zero: f64 = nu
        .atoms()
        .iter()
        .filter(|a| a.t <= 1.0)
        .map(|a| a.m / sig_at(sigma, a.t))
        .sum::<f64>()
        + match nu.tail() {
            Some(_) if nu.tail_start() < 1.0 => nu.tail_integral(&|s| if s <= 1.0 { 1.0 / sigma(s) } else { 0.0 }, 0.0),
            _ => 0.0,
        };
    let tail_infinite = nu.tail().is_some_and(|tl| tl.alpha >= -1.0);
    let far = if tail_infinite {
        f64::INFINITY
    } else {
        nu.mass_on(1.0, domain.t_max)
    };
    let need = 1.0 / domain.eps_admissible;
    let mut witness = Vec::new();
    if !(near_zero > need) {
        witness.push(domain.t_min);
    }
    if !(far > need) {
        witness.push(domain.t_max);
    }
    let finite = first.is_finite();
    Ok(NondegeneracyReport {
        report: ConditionReport {
            condition: ConditionTag::NonDegenerate,
            holds: finite && witness.is_empty(),
            best_constant: near_zero.min(far),
            witness_t: witness,
            boundary_attained: false,
        },
        finite,
        near_zero,
        far,
        truncated: !tail_infinite,
    })
}

/// Settings of the representation-measure fitter.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FitConfig {
    /// collocation points per decade of the support grid
    pub per_decade: u32,
    /// decades dropped at each end of the support grid
    pub trim_decades: f64,
    /// bound on the sup of `|ln(h_ν/h)|` over the collocation points
    pub bound: f64,
    /// Lawson reweighting passes after the first least-squares fit
    pub irls_iterations: usize,
    /// masses below this fraction of the total are dropped
    pub prune: f64,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig {
            per_decade: 4,
            trim_decades: 0.5,
            bound: 1.1f64.ln(),
            irls_iterations: 20,
            prune: 1e-12,
        }
    }
}

/// A fitted representation measure with its achieved accuracy.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fit {
    pub measure: DiscreteMeasure,
    /// `sup_j |ln(h_ν(t_j)/h(t_j))|` over the collocation points
    pub achieved: f64,
    pub report: EquivReport,
}

fn collocation(support: &Domain, cfg: &FitConfig) -> Vec<f64> {
    let lo = support.t_min.log10() + cfg.trim_decades;
    let hi = support.t_max.log10() - cfg.trim_decades;
    let n = ((hi - lo) * cfg.per_decade as f64).round().max(1.0) as usize;
    (0..=n)
        .map(|k| 10f64.powf(lo + (hi - lo) * k as f64 / n as f64))
        .collect()
}

fn max_log_ratio(a: &DMatrix<f64>, x: &DVector<f64>) -> (f64, DVector<f64>) {
    let y = a * x;
    let m = y
        .iter()
        .map(|v| v.ln().abs())
        .fold(0.0, |m: f64, v| if v.is_nan() { f64::INFINITY } else { m.max(v) });
    (m, y)
}

/// Fits `ν ≥ 0` on the support grid (plus an optional origin atom) so that
/// its fundamental function matches `h` in the sup-log sense.
///
/// Columns are the relative responses `σ(t_j)/(σ(s_i)+σ(t_j)) / h(t_j)`,
/// normalized to unit length so that the active set picks the best-aligned
/// atoms first. A plain NNLS fit is followed by Lawson reweighting toward
/// the minimax solution; the best iterate wins.
pub fn fit_representation_measure<H, S>(
    h: H,
    sigma: S,
    support: &Domain,
    include_origin: bool,
    cfg: &FitConfig,
) -> Result<Fit>
where
    H: Fn(f64) -> f64,
    S: Fn(f64) -> f64,
{
    let qc = quasiconcave_check(&h, &sigma, support);
    if !qc.report.holds {
        return Err(Error::NotQuasiconcave { c1: qc.c1, c2: qc.c2 });
    }
    let cols: Vec<f64> = if include_origin {
        std::iter::once(0.0).chain(support.points().iter().copied()).collect()
    } else {
        support.points().to_vec()
    };
    let ts = collocation(support, cfg);
    let mut a = DMatrix::<f64>::zeros(ts.len(), cols.len());
    for (j, &t) in ts.iter().enumerate() {
        let st = sigma_checked(&sigma, t)?;
        let ht = h(t);
        if !(ht > 0.0 && ht.is_finite()) {
            return Err(Error::InvalidParameter(format!("target h({t}) = {ht}")));
        }
        for (i, &s) in cols.iter().enumerate() {
            a[(j, i)] = 1.0 / (1.0 + sig_at(&sigma, s) / st) / ht;
        }
    }
    let norms: Vec<f64> = a.column_iter().map(|c| c.norm()).collect();
    let mut an = a.clone();
    for (i, mut c) in an.column_iter_mut().enumerate() {
        c /= norms[i];
    }
    let ones = DVector::from_element(ts.len(), 1.0);

    let mut y = nnls(&an, &ones);
    let (mut best_err, _) = max_log_ratio(&an, &y);
    let mut best = y.clone();
    let mut wts = DVector::from_element(ts.len(), 1.0 / ts.len() as f64);
    for _ in 0..cfg.irls_iterations {
        if best_err < 1e-12 {
            break;
        }
        let (_, fit) = max_log_ratio(&an, &y);
        for j in 0..ts.len() {
            wts[j] *= (fit[j] - 1.0).abs().max(1e-300);
        }
        let total = wts.sum();
        wts /= total;
        let sw = wts.map(f64::sqrt);
        let aw = DMatrix::from_fn(ts.len(), cols.len(), |j, i| an[(j, i)] * sw[j]);
        y = nnls(&aw, &sw);
        let (err, _) = max_log_ratio(&an, &y);
        if err < best_err {
            best_err = err;
            best = y.clone();
        }
    }

    let masses: Vec<f64> = best.iter().zip(&norms).map(|(v, n)| v / n).collect();
    let total: f64 = masses.iter().sum();
    let atoms: Vec<Atom> = cols
        .iter()
        .zip(&masses)
        .filter(|(_, m)| **m > cfg.prune * total)
        .map(|(&t, &m)| Atom { t, m })
        .collect();
    let measure = DiscreteMeasure::new(atoms, None)?;

    let mut pairs = Vec::with_capacity(ts.len());
    let mut achieved: f64 = 0.0;
    for &t in &ts {
        let hn = fundamental_function(&measure, &sigma, t)?;
        let ht = h(t);
        let r = (hn / ht).ln().abs();
        achieved = achieved.max(if r.is_nan() { f64::INFINITY } else { r });
        pairs.push((hn, ht, format!("t={t:e}")));
    }
    let report = EquivReport::from_pairs(pairs);
    if !(achieved <= cfg.bound) {
        return Err(Error::FitFailed {
            achieved,
            bound: cfg.bound,
        });
    }
    Ok(Fit {
        measure,
        achieved,
        report,
    })
}
