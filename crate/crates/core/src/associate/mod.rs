//! Associate (Köthe dual) norms of classical and generalized Lorentz spaces,
//! a brute-force duality oracle and embedding criteria.

mod norms;

pub use norms::{lpq_star_norm, norm, norm_decreasing, NormSpec};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::funcspace::quad::growing;
use crate::funcspace::PiecewiseFn;
use crate::funcspace::{Domain, Quad, Weight};
use crate::hardy::Flagged;
use crate::measures::{fit_representation_measure, nondegeneracy_check, DiscreteMeasure, FitConfig};
use crate::rearrangement::{decreasing_rearrangement, DecreasingFn};
use crate::report::{EquivReport, BOUNDARY_EXCESS};
use crate::sampling::{random_decreasing, trial_rng, MixedSampler};
use crate::weights::WeightProfile;

/// Denominator of the inner ratio in the `1 < p < ∞` branch.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Denominator {
    /// `Ψ_p^p(s)`, which reproduces `L_p' ` for `ψ ≡ 1`
    #[default]
    PsiPowP,
    /// `Ψ_p(s)` as printed in the theorem statement
    Psi,
}

/// The functional `∫ S_F(t) dν(t)` for a primitive `F`, where `S_F` is
/// `sup_{s>t} F(s)/Ψ_p(s)` (`p ≤ 1`) or `(∫_t^∞ (F/D)^{p'} ψ^p)^{1/p'}` (`p > 1`).
fn nu_functional<F>(
    profile: &WeightProfile,
    nu: &DiscreteMeasure,
    big_f: F,
    f_breaks: &[f64],
    domain: &Domain,
    denom: Denominator,
) -> Result<Flagged>
where
    F: Fn(f64) -> f64,
{
    let p = profile.p();
    let quad = Quad::new(domain, &[&profile.psi().breakpoints(), f_breaks]);
    let ks = quad.knots();
    let n = ks.len();
    let big_psi = |s: f64| profile.big_psi(s).unwrap_or(f64::NAN);
    let mut boundary = nu.tail().is_some();

    if p <= 1.0 {
        let ratio = |s: f64| {
            let x = big_f(s);
            if x == 0.0 {
                0.0
            } else {
                x / big_psi(s)
            }
        };
        let vals: Vec<f64> = ks.iter().map(|&s| ratio(s)).collect();
        let mut suffix = vec![0.0_f64; n + 1];
        if growing(vals[n - 2], vals[n - 1], ks[n - 2], ks[n - 1]) {
            suffix[n] = f64::INFINITY;
        }
        for k in (0..n).rev() {
            suffix[k] = suffix[k + 1].max(vals[k]);
        }
        let head = if growing(vals[1], vals[0], ks[1], ks[0]) {
            f64::INFINITY
        } else {
            suffix[0]
        };
        let inside = ks
            .iter()
            .zip(&vals)
            .filter(|(t, _)| **t >= domain.t_min && **t <= domain.t_max)
            .map(|(_, v)| *v)
            .fold(0.0, f64::max);
        if head.is_infinite() || suffix[n].is_infinite() || suffix[0] > BOUNDARY_EXCESS * inside {
            boundary = true;
        }
        let s_of = |t: f64| {
            if t <= ks[0] {
                return head;
            }
            let k = ks.partition_point(|&x| x <= t);
            suffix[k].max(ratio(t))
        };
        let v = nu.integrate(s_of);
        return Ok(Flagged { value: v, boundary });
    }

    let pp = p / (p - 1.0);
    let psi_p = profile.psi_pow();
    let g = |s: f64| {
        let x = big_f(s);
        if x == 0.0 {
            return 0.0;
        }
        let d = match denom {
            Denominator::PsiPowP => profile.big_psi_pow(s).unwrap_or(f64::NAN),
            Denominator::Psi => big_psi(s),
        };
        (x / d).powf(pp) * psi_p.eval(s)
    };
    let tail = quad.tail(&g);
    let mut sensitive = false;
    let inner = |t: f64| {
        let i = if t == 0.0 {
            quad.integrate(g, 0.0, f64::INFINITY)
        } else {
            tail.from(t)
        };
        (i.value.powf(1.0 / pp), i.tail_sensitive())
    };
    let mut total = 0.0;
    for a in nu.atoms() {
        let (v, s) = inner(a.t);
        sensitive |= s;
        total += a.m * v;
    }
    if nu.tail().is_some() {
        let all = nu.integrate(|t| inner(t).0);
        total = all;
    }
    Ok(Flagged {
        value: total,
        boundary: boundary || sensitive,
    })
}

/// Associate norm of a classical Lorentz space `Λ_{p,ψ}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassicalAssociate {
    #[serde(with = "crate::extreal")]
    pub value: f64,
    pub flags: Vec<String>,
}

/// `sup_t t f**(t)/Ψ_p(t)` for `p ≤ 1`, else `(∫ (t f**/Ψ_p^p)^{p'} ψ^p)^{1/p'}`.
///
/// The outer `1/p'` power makes the second branch homogeneous of degree one.
pub fn assoc_classical(p: f64, psi: &Weight, f: &PiecewiseFn, domain: &Domain) -> Result<ClassicalAssociate> {
    let profile = WeightProfile::new(psi.clone(), p)?;
    let fs = decreasing_rearrangement(f)?;
    let r = nu_functional(
        &profile,
        &DiscreteMeasure::delta(0.0, 1.0)?,
        |t| fs.primitive(t),
        fs.as_fn().breakpoints(),
        domain,
        Denominator::PsiPowP,
    )?;
    let mut flags = Vec::new();
    if p > 1.0 {
        flags.push("outer_exponent_1/p'".to_string());
    }
    if r.boundary && r.value.is_infinite() {
        flags.push("boundary".to_string());
    }
    Ok(ClassicalAssociate { value: r.value, flags })
}

/// Associate norm of `GΛ_{p,ψ;φ}` with the fitted measure it used.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AssociateResult {
    #[serde(with = "crate::extreal")]
    pub value: f64,
    pub nu_used: DiscreteMeasure,
    pub fit_report: EquivReport,
    pub boundary_flags: Vec<String>,
}

/// `GΛ_{p,ψ;φ}` with its representation measure fitted once.
#[derive(Clone, Debug)]
pub struct GeneralizedAssociate {
    profile: WeightProfile,
    nu: DiscreteMeasure,
    fit_report: EquivReport,
    domain: Domain,
    denom: Denominator,
    flags: Vec<String>,
}

/// `φ` nonincreasing and `φ(r) r^{1/p}` nondecreasing on the grid.
pub fn check_hypotheses(p: f64, phi: &Weight, domain: &Domain) -> Result<()> {
    let pts = domain.points();
    for w in pts.windows(2) {
        let (a, b) = (phi.eval(w[0]), phi.eval(w[1]));
        if b > a * (1.0 + 1e-12) {
            return Err(Error::HypothesisViolated(format!(
                "φ increases on ({:e}, {:e}]",
                w[0], w[1]
            )));
        }
        if b * w[1].powf(1.0 / p) < a * w[0].powf(1.0 / p) * (1.0 - 1e-12) {
            return Err(Error::HypothesisViolated(format!(
                "φ(r) r^(1/p) decreases on ({:e}, {:e}]",
                w[0], w[1]
            )));
        }
    }
    Ok(())
}

impl GeneralizedAssociate {
    pub fn new(p: f64, psi: &Weight, phi: &Weight, domain: &Domain, cfg: &FitConfig) -> Result<Self> {
        Self::with_denominator(p, psi, phi, domain, cfg, Denominator::default())
    }

    pub fn with_denominator(
        p: f64,
        psi: &Weight,
        phi: &Weight,
        domain: &Domain,
        cfg: &FitConfig,
        denom: Denominator,
    ) -> Result<Self> {
        phi.validate()?;
        let profile = WeightProfile::new(psi.clone(), p)?;
        check_hypotheses(p, phi, domain)?;
        let theta = |t: f64| profile.big_psi(t).unwrap_or(f64::NAN);
        let fit = fit_representation_measure(|t| 1.0 / phi.eval(t), theta, domain, true, cfg)?;
        let mut flags = Vec::new();
        if denom == Denominator::Psi && p > 1.0 {
            flags.push("denominator_psi".to_string());
        }
        let nd = nondegeneracy_check(&fit.measure, &theta, domain)?;
        if !nd.report.holds {
            flags.push("nondegeneracy_proxy_failed".to_string());
        }
        Ok(GeneralizedAssociate {
            profile,
            nu: fit.measure,
            fit_report: fit.report,
            domain: domain.clone(),
            denom,
            flags,
        })
    }

    pub fn nu(&self) -> &DiscreteMeasure {
        &self.nu
    }

    /// The associate functional applied to a primitive `F` with breakpoints `breaks`.
    pub fn eval_primitive<F: Fn(f64) -> f64>(&self, big_f: F, breaks: &[f64]) -> Result<Flagged> {
        nu_functional(&self.profile, &self.nu, big_f, breaks, &self.domain, self.denom)
    }

    pub fn eval_decreasing(&self, fs: &DecreasingFn) -> Result<Flagged> {
        self.eval_primitive(|t| fs.primitive(t), fs.as_fn().breakpoints())
    }

    pub fn eval(&self, f: &PiecewiseFn) -> Result<AssociateResult> {
        let r = self.eval_decreasing(&decreasing_rearrangement(f)?)?;
        let mut boundary_flags = self.flags.clone();
        if r.boundary {
            boundary_flags.push("boundary".to_string());
        }
        Ok(AssociateResult {
            value: r.value,
            nu_used: self.nu.clone(),
            fit_report: self.fit_report.clone(),
            boundary_flags,
        })
    }
}

/// Closed-form associate norm of `GΛ_{p,ψ;φ}` evaluated at `f`.
pub fn assoc_generalized(
    p: f64,
    psi: &Weight,
    phi: &Weight,
    f: &PiecewiseFn,
    domain: &Domain,
    cfg: &FitConfig,
) -> Result<AssociateResult> {
    GeneralizedAssociate::new(p, psi, phi, domain, cfg)?.eval(f)
}

/// `∫_0^∞ f* g*` for two nonincreasing step functions.
pub fn pairing(f: &DecreasingFn, g: &DecreasingFn) -> f64 {
    let (a, b) = (norms::pieces(f), norms::pieces(g));
    let (mut i, mut j) = (0, 0);
    let mut acc = 0.0;
    while i < a.len() && j < b.len() {
        let lo = a[i].0.max(b[j].0);
        let hi = a[i].1.min(b[j].1);
        if hi > lo {
            acc += a[i].2 * b[j].2 * (hi - lo);
        }
        if a[i].1 <= b[j].1 {
            i += 1;
        } else {
            j += 1;
        }
    }
    acc
}

/// Budget of the duality oracle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OracleConfig {
    pub seed: u64,
    /// random decreasing candidates
    pub n_trials: usize,
    /// maximum coordinate passes of the local search
    pub local_search_steps: usize,
    /// take every `indicator_stride`-th grid point as an indicator support
    pub indicator_stride: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            seed: 0,
            n_trials: 32,
            local_search_steps: 200,
            indicator_stride: 4,
        }
    }
}

/// Best quotient found by the oracle and the candidate that attained it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub value: f64,
    pub witness: String,
}

const LOCAL_STEP: f64 = 1.1;

fn quotient(spec: &NormSpec, fs: &DecreasingFn, g: &DecreasingFn) -> Result<f64> {
    let n = norm_decreasing(spec, g)?;
    if n == 0.0 || n.is_infinite() {
        return Ok(f64::NAN);
    }
    Ok(pairing(fs, g) / n)
}

/// Coordinate search on the cell values of `g`, keeping them nonincreasing.
fn local_search(spec: &NormSpec, fs: &DecreasingFn, ends: &[f64], start: Vec<f64>, passes: usize) -> Result<f64> {
    let mut v = start;
    let q = |v: &[f64]| -> Result<f64> { quotient(spec, fs, &DecreasingFn::steps(ends, v.to_vec())?) };
    let mut best = q(&v)?;
    if best.is_nan() {
        return Ok(f64::NAN);
    }
    for _ in 0..passes {
        let mut improved = false;
        for k in 0..v.len() {
            for up in [true, false] {
                let mut w = v.clone();
                if up {
                    w[k] *= LOCAL_STEP;
                    let c = w[k];
                    for x in &mut w[..k] {
                        *x = x.max(c);
                    }
                } else {
                    w[k] /= LOCAL_STEP;
                    let c = w[k];
                    for x in &mut w[k + 1..] {
                        *x = x.min(c);
                    }
                }
                let cand = q(&w)?;
                if cand > best * (1.0 + 1e-14) {
                    best = cand;
                    v = w;
                    improved = true;
                }
            }
        }
        if !improved {
            break;
        }
    }
    Ok(best)
}

/// Lower bound on the associate norm of `spec` at `f` by maximizing
/// `∫ f* g* / ‖g‖` over indicators, `f*` itself and random step functions,
/// then locally improving the best candidate.
pub fn duality_oracle(spec: &NormSpec, f: &PiecewiseFn, domain: &Domain, cfg: &OracleConfig) -> Result<OracleResult> {
    spec.validate()?;
    let fs = decreasing_rearrangement(f)?;
    if fs.is_zero() {
        return Ok(OracleResult {
            value: 0.0,
            witness: "zero pairing".into(),
        });
    }
    let mut cands: Vec<(String, DecreasingFn)> = Vec::new();
    for &a in domain.points().iter().step_by(cfg.indicator_stride.max(1)) {
        cands.push((format!("indicator a={a:e}"), DecreasingFn::indicator(a, 1.0)?));
    }
    for &a in norms::pieces(&fs).iter().map(|p| &p.1).filter(|b| b.is_finite()) {
        cands.push((format!("indicator a={a:e}"), DecreasingFn::indicator(a, 1.0)?));
    }
    cands.push(("self".into(), fs.clone()));
    for i in 0..cfg.n_trials {
        let mut rng = trial_rng(cfg.seed, i as u64);
        cands.push((format!("random #{i}"), random_decreasing(&mut rng, domain)?));
    }
    let scores: Vec<Result<f64>> = cands.par_iter().map(|(_, g)| quotient(spec, &fs, g)).collect();
    let mut best = (f64::NAN, 0usize);
    for (k, s) in scores.into_iter().enumerate() {
        let s = s?;
        if !s.is_nan() && (best.0.is_nan() || s > best.0) {
            best = (s, k);
        }
    }
    if best.0.is_nan() {
        return Err(Error::DegenerateInput(
            "every candidate has zero or infinite norm".into(),
        ));
    }

    // refine the winner onto the joint breakpoints and search locally
    let g = &cands[best.1].1;
    let mut ends: Vec<f64> = norms::pieces(g)
        .iter()
        .chain(norms::pieces(&fs).iter())
        .map(|p| p.1)
        .filter(|b| b.is_finite() && *b <= norms::pieces(g).last().map_or(0.0, |p| p.1))
        .collect();
    ends.sort_by(|a, b| a.total_cmp(b));
    ends.dedup();
    let start: Vec<f64> = ends.iter().map(|&e| g.eval(e)).collect();
    let searched = if ends.is_empty() || start.iter().any(|v| *v <= 0.0) {
        f64::NAN
    } else {
        local_search(spec, &fs, &ends, start, cfg.local_search_steps)?
    };
    if searched > best.0 {
        return Ok(OracleResult {
            value: searched,
            witness: format!("{} + local search", cands[best.1].0),
        });
    }
    Ok(OracleResult {
        value: best.0,
        witness: cands[best.1].0.clone(),
    })
}

/// Outcome of the embedding criterion `GΛ_{p,ψ;φ} ↪ Λ_{q,w}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingCriterion {
    #[serde(with = "crate::extreal")]
    pub value: f64,
    pub holds: bool,
    pub nu_used: DiscreteMeasure,
    pub fit_report: EquivReport,
    pub boundary: bool,
}

/// Reduces to `GΛ_{p/q,ψ^q;φ^q} ↪ Λ_{1,w^q}` (valid because `(f*)^q` is
/// nonincreasing) and applies the associate functional to `∫_0^t w^q`.
pub fn embedding_criterion(
    p: f64,
    q: f64,
    psi: &Weight,
    phi: &Weight,
    w: &Weight,
    domain: &Domain,
    cfg: &FitConfig,
) -> Result<EmbeddingCriterion> {
    if !(q > 0.0 && q.is_finite()) {
        return Err(Error::InvalidParameter(format!("q = {q} must lie in (0, ∞)")));
    }
    let wq = w.powf(q)?;
    if !wq.is_integrable_at_zero() {
        return Err(Error::NonIntegrableNearZero(format!("w^q with q = {q}")));
    }
    let ga = GeneralizedAssociate::new(p / q, &psi.powf(q)?, &phi.powf(q)?, domain, cfg)?;
    let r = ga.eval_primitive(|t| wq.cumulative(t).unwrap_or(f64::NAN), &wq.breakpoints())?;
    Ok(EmbeddingCriterion {
        value: r.value,
        holds: r.value.is_finite() && !r.boundary,
        nu_used: ga.nu.clone(),
        fit_report: ga.fit_report.clone(),
        boundary: r.boundary,
    })
}

/// Empirical norm ratios `‖f‖_{Λ_{q,w}} / ‖f‖_{GΛ_{p,ψ;φ}}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingCheck {
    /// ratios over the sampled corpus; `upper` is the sup ratio
    pub equiv: EquivReport,
    /// `(a, ratio)` along `χ_(0,a]`
    pub sweep: Vec<(f64, f64)>,
    /// largest over smallest ratio along the sweep
    pub sweep_growth: f64,
}

pub fn empirical_embedding_check(
    p: f64,
    q: f64,
    psi: &Weight,
    phi: &Weight,
    w: &Weight,
    sampler: &MixedSampler,
    n_trials: usize,
) -> Result<EmbeddingCheck> {
    let source = NormSpec::GenClassicalLorentz {
        p,
        psi: psi.clone(),
        phi: phi.clone(),
    };
    let target = NormSpec::ClassicalLorentz { p: q, psi: w.clone() };
    let rows: Vec<Result<(f64, f64, String)>> = (0..n_trials)
        .into_par_iter()
        .map(|i| {
            let (label, f) = sampler.trial(i)?;
            Ok((norm_decreasing(&target, &f)?, norm_decreasing(&source, &f)?, label))
        })
        .collect();
    let rows: Vec<(f64, f64, String)> = rows.into_iter().collect::<Result<_>>()?;
    if !rows.iter().any(|r| r.1 > 0.0) {
        return Err(Error::DegenerateInput(
            "every sampled function has zero source norm".into(),
        ));
    }
    let equiv = EquivReport::from_pairs(rows);
    let mut sweep = Vec::new();
    for &a in sampler.domain.points().iter().step_by(8) {
        let f = DecreasingFn::indicator(a, 1.0)?;
        let (t, s) = (norm_decreasing(&target, &f)?, norm_decreasing(&source, &f)?);
        if s > 0.0 {
            sweep.push((a, t / s));
        }
    }
    let hi = sweep.iter().map(|x| x.1).fold(0.0, f64::max);
    let lo = sweep.iter().map(|x| x.1).fold(f64::INFINITY, f64::min);
    Ok(EmbeddingCheck {
        equiv,
        sweep,
        sweep_growth: hi / lo,
    })
}
