//! Weight functionals: `Ψ_p`, the supremal function `σ`, and grid checks of
//! admissibility, quasiconcavity, `Δ₂`, `B_p` and `B_1`.
//!
//! Conditions of the form "for some C" are reported as the best constant
//! over the grid, never as a bare boolean. On a truncated domain every such
//! sup is finite, so a failing condition shows up as a sup attained at the
//! edge of the grid.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::funcspace::quad::growing;
use crate::funcspace::{Domain, Quad, Weight};
use crate::report::{ConditionReport, ConditionTag, BOUNDARY_EXCESS};

/// Slack for endpoint proxies so that exact boundary values like `√(10⁻⁴) = 10⁻²` pass.
const PROXY_SLACK: f64 = 1e-9;

/// `ψ` together with `p`, giving `Ψ_p(t) = ‖ψ‖_{p,(0,t)}`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightProfile {
    psi: Weight,
    p: f64,
    psi_pow: Weight,
}

impl WeightProfile {
    pub fn new(psi: Weight, p: f64) -> Result<Self> {
        if !(p > 0.0 && p.is_finite()) {
            return Err(Error::InvalidParameter(format!("p = {p} must lie in (0, ∞)")));
        }
        psi.validate()?;
        let psi_pow = psi.powf(p)?;
        if !psi_pow.is_integrable_at_zero() {
            return Err(Error::NonIntegrableNearZero(format!("ψ^{p} for ψ = {:?}", psi.kind)));
        }
        Ok(WeightProfile { psi, p, psi_pow })
    }

    pub fn psi(&self) -> &Weight {
        &self.psi
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// `ψ^p` as a weight.
    pub fn psi_pow(&self) -> &Weight {
        &self.psi_pow
    }

    /// `Ψ_p(t)^p = ∫_0^t ψ^p`.
    pub fn big_psi_pow(&self, t: f64) -> Result<f64> {
        self.psi_pow().cumulative(t)
    }

    /// `Ψ_p(t)`.
    pub fn big_psi(&self, t: f64) -> Result<f64> {
        Ok(self.big_psi_pow(t)?.powf(1.0 / self.p))
    }
}

/// Samples of `u`, `v` at every quadrature knot: `U(x_i)` and `V_i = max(v(x_i), v(x_i+))`.
#[derive(Clone, Debug)]
struct Samples {
    u: Weight,
    v: Weight,
    knots: Vec<f64>,
    big_u: Vec<f64>,
    big_v: Vec<f64>,
    /// `v` unbounded near zero
    left_unbounded: bool,
    /// `v/U` growing at the far end
    right_unbounded: bool,
}

impl Samples {
    fn new(u: &Weight, v: &Weight, domain: &Domain) -> Result<Self> {
        u.validate()?;
        v.validate()?;
        let quad = Quad::new(domain, &[&u.breakpoints(), &v.breakpoints()]);
        let knots = quad.knots().to_vec();
        let mut big_u = Vec::with_capacity(knots.len());
        for &t in &knots {
            let x = u.cumulative(t)?;
            if !(x > 0.0) {
                return Err(Error::DegenerateU(t));
            }
            big_u.push(x);
        }
        let big_v: Vec<f64> = knots.iter().map(|&t| vmax(v, t)).collect();
        let left_unbounded = growing(big_v[1], big_v[0], knots[1], knots[0]);
        let n = knots.len();
        let right_unbounded = growing(
            big_v[n - 2] / big_u[n - 2],
            big_v[n - 1] / big_u[n - 1],
            knots[n - 2],
            knots[n - 1],
        );
        Ok(Samples {
            u: u.clone(),
            v: v.clone(),
            knots,
            big_u,
            big_v,
            left_unbounded,
            right_unbounded,
        })
    }

    fn u_at(&self, t: f64) -> Result<f64> {
        let x = self.u.cumulative(t)?;
        if !(x > 0.0) {
            return Err(Error::DegenerateU(t));
        }
        Ok(x)
    }

    /// Index of `t` in the knots, or the index of the last knot below `t` as `Err`.
    fn locate(&self, t: f64) -> std::result::Result<usize, Option<usize>> {
        let k = self.knots.partition_point(|&x| x < t);
        if k < self.knots.len() && self.knots[k] == t {
            Ok(k)
        } else if k == 0 {
            Err(None)
        } else {
            Err(Some(k - 1))
        }
    }
}

fn vmax(v: &Weight, t: f64) -> f64 {
    v.eval(t).max(v.eval_right(t))
}

/// `σ(t) = sup_{s<t} U(s) sup_{τ>s} v(τ)/U(τ)` sampled on the quadrature knots.
///
/// The inner sup is a suffix max of `V_i/U_i`, the outer a prefix max of
/// `U_j · inner_j`. Because each sample uses both one-sided values of `v`,
/// the discrete `σ` is exact at the knots for tabulated `v` and for monotone
/// `v/U`. It is nondecreasing and `σ/U` is nonincreasing by construction.
#[derive(Clone, Debug)]
pub struct Sigma {
    s: Samples,
    inner: Vec<f64>,
    values: Vec<f64>,
}

pub fn sigma(u: &Weight, v: &Weight, domain: &Domain) -> Result<Sigma> {
    let s = Samples::new(u, v, domain)?;
    let n = s.knots.len();
    let ratio = |i: usize| s.big_v[i] / s.big_u[i];
    let mut inner = vec![0.0; n];
    let mut acc: f64 = if s.right_unbounded { f64::INFINITY } else { 0.0 };
    for i in (0..n).rev() {
        acc = acc.max(ratio(i));
        inner[i] = acc;
    }
    let mut values = vec![0.0; n];
    let mut m: f64 = if s.left_unbounded { f64::INFINITY } else { 0.0 };
    for j in 0..n {
        m = m.max(s.big_u[j] * inner[j]);
        values[j] = m;
    }
    Ok(Sigma { s, inner, values })
}

impl Sigma {
    pub fn knots(&self) -> &[f64] {
        &self.s.knots
    }

    /// `σ` at the knots.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `U` at the knots.
    pub fn big_u(&self) -> &[f64] {
        &self.s.big_u
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(Error::InvalidParameter(format!("σ evaluated at t = {t}")));
        }
        let k = match self.s.locate(t) {
            Ok(k) => return Ok(self.values[k]),
            Err(k) => k,
        };
        let ut = self.s.u_at(t)?;
        let vt = vmax(&self.s.v, t);
        let next = k.map_or(0, |k| k + 1);
        let tail = self.inner.get(next).copied().unwrap_or(0.0);
        let below = k.map_or(if self.s.left_unbounded { f64::INFINITY } else { 0.0 }, |k| {
            self.values[k]
        });
        Ok(below.max(vt).max(ut * tail))
    }

    /// `σ` at the given points.
    pub fn eval_many(&self, ts: &[f64]) -> Result<Vec<f64>> {
        ts.iter().map(|&t| self.eval(t)).collect()
    }
}

/// `sup_{s>0} v(s) U(t)/(U(s)+U(t))`, the two-sided equivalent of `σ`.
#[derive(Clone, Debug)]
pub struct SigmaEquivalent {
    s: Samples,
}

pub fn sigma_equivalent(u: &Weight, v: &Weight, domain: &Domain) -> Result<SigmaEquivalent> {
    Ok(SigmaEquivalent {
        s: Samples::new(u, v, domain)?,
    })
}

impl SigmaEquivalent {
    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(Error::InvalidParameter(format!("σ evaluated at t = {t}")));
        }
        if self.s.left_unbounded || self.s.right_unbounded {
            return Ok(f64::INFINITY);
        }
        let ut = self.s.u_at(t)?;
        let g = |i: usize| self.s.big_v[i] * ut / (self.s.big_u[i] + ut);
        let mut m = (0..self.s.knots.len()).map(g).fold(0.0, f64::max);
        if self.s.locate(t).is_err() {
            m = m.max(vmax(&self.s.v, t) * 0.5);
        }
        Ok(m)
    }
}

/// Proxy for `θ(0) = 0`, `θ(∞) = ∞` and strict increase on the grid.
///
/// `best_constant` is the worse of `θ(t_min)` and `1/θ(t_max)`; both must be
/// at most `ε_admissible`. Witnesses are the points where a check fails.
pub fn admissible_check(theta: impl Fn(f64) -> f64, domain: &Domain) -> ConditionReport {
    let pts = domain.points();
    let vals: Vec<f64> = pts.iter().map(|&t| theta(t)).collect();
    let eps = domain.eps_admissible * (1.0 + PROXY_SLACK);
    let mut witness = Vec::new();
    for (k, w) in vals.windows(2).enumerate() {
        if !(w[1] > w[0]) {
            witness.push(pts[k + 1]);
        }
    }
    let lo = vals[0];
    let hi = 1.0 / vals[vals.len() - 1];
    if !(lo <= eps) {
        witness.push(pts[0]);
    }
    if !(hi <= eps) {
        witness.push(pts[pts.len() - 1]);
    }
    let best = if lo.is_nan() || hi.is_nan() {
        f64::INFINITY
    } else {
        lo.max(hi)
    };
    ConditionReport {
        condition: ConditionTag::Admissible,
        holds: witness.is_empty(),
        best_constant: best,
        witness_t: witness,
        boundary_attained: false,
    }
}

/// Quasiconcavity constants of `h` with respect to `θ`, plus the four
/// non-degeneracy endpoint proxies.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuasiconcaveReport {
    pub report: ConditionReport,
    /// smallest `c₁` with `h(s) ≤ c₁ h(t)` for grid `s ≤ t`
    #[serde(with = "crate::extreal")]
    pub c1: f64,
    /// smallest `c₂` with `h(t)/θ(t) ≤ c₂ h(s)/θ(s)` for grid `s ≤ t`
    #[serde(with = "crate::extreal")]
    pub c2: f64,
    pub nondegenerate: ConditionReport,
}

/// Prefix-extremum scan: for each `t`, `max_{s ≤ t} r(s)/r(t)` (`up = false`)
/// or `max_{s ≤ t} r(t)/r(s)` (`up = true`). Returns `(full, interior, witness)`.
fn pair_scan(pts: &[f64], r: &[f64], up: bool, interior: impl Fn(f64) -> bool) -> (f64, f64, [f64; 2]) {
    let mut best = (0.0_f64, [pts[0], pts[0]]);
    let mut inner = 0.0_f64;
    // running extremum over all s and over interior s
    let mut ext: Option<(f64, f64)> = None;
    let mut ext_in: Option<f64> = None;
    for (k, &t) in pts.iter().enumerate() {
        let x = r[k];
        let better = |cur: f64| if up { x < cur } else { x > cur };
        match ext {
            Some((cur, _)) if !better(cur) => {}
            _ => ext = Some((x, t)),
        }
        if interior(t) {
            match ext_in {
                Some(cur) if !better(cur) => {}
                _ => ext_in = Some(x),
            }
        }
        let ratio = |e: f64| {
            let q = if up { x / e } else { e / x };
            if q.is_nan() {
                if x == e {
                    1.0
                } else {
                    f64::INFINITY
                }
            } else {
                q
            }
        };
        let (e, s) = ext.expect("set above");
        let q = ratio(e);
        if q > best.0 {
            best = (q, [s, t]);
        }
        if interior(t) {
            inner = inner.max(ratio(ext_in.expect("set above")));
        }
    }
    (best.0, inner, best.1)
}

pub fn quasiconcave_check(h: impl Fn(f64) -> f64, theta: impl Fn(f64) -> f64, domain: &Domain) -> QuasiconcaveReport {
    let pts = domain.points();
    let hv: Vec<f64> = pts.iter().map(|&t| h(t)).collect();
    let th: Vec<f64> = pts.iter().map(|&t| theta(t)).collect();
    let ratio: Vec<f64> = hv.iter().zip(&th).map(|(a, b)| a / b).collect();
    let interior = |t: f64| domain.is_interior(t);
    let (c1, c1_in, w1) = pair_scan(pts, &hv, false, interior);
    let (c2, c2_in, w2) = pair_scan(pts, &ratio, true, interior);
    let best = c1.max(c2);
    let boundary = best > BOUNDARY_EXCESS * c1_in.max(c2_in);
    let report = ConditionReport {
        condition: ConditionTag::Quasiconcave,
        holds: best.is_finite() && !boundary,
        best_constant: best,
        witness_t: if c1 >= c2 { w1.to_vec() } else { w2.to_vec() },
        boundary_attained: boundary,
    };

    let n = pts.len() - 1;
    let proxies = [
        (pts[0], hv[0]),
        (pts[n], 1.0 / hv[n]),
        (pts[n], ratio[n]),
        (pts[0], th[0] / hv[0]),
    ];
    let eps = domain.eps_admissible * (1.0 + PROXY_SLACK);
    let mut worst = 0.0_f64;
    let mut witness = Vec::new();
    for (t, x) in proxies {
        let x = if x.is_nan() { f64::INFINITY } else { x };
        worst = worst.max(x);
        if !(x <= eps) && !witness.contains(&t) {
            witness.push(t);
        }
    }
    let nondegenerate = ConditionReport {
        condition: ConditionTag::NonDegenerate,
        holds: witness.is_empty(),
        best_constant: worst,
        witness_t: witness,
        boundary_attained: false,
    };
    QuasiconcaveReport {
        report,
        c1,
        c2,
        nondegenerate,
    }
}

fn delta2_on(w: &Weight, domain: &Domain) -> Result<ConditionReport> {
    let mut samples = Vec::new();
    for &t in domain.points().iter().filter(|&&t| t <= domain.t_max / 2.0) {
        let (a, b) = (w.cumulative(t)?, w.cumulative(2.0 * t)?);
        samples.push((t, b / a));
    }
    Ok(ConditionReport::from_samples(ConditionTag::Delta2, samples, |t| {
        domain.is_interior(t)
    }))
}

/// `sup_t W(2t)/W(t)` over grid `t ≤ t_max/2`.
///
/// Holding additionally requires the sup to be stable under one grid refinement.
pub fn delta2_check(w: &Weight, domain: &Domain) -> Result<ConditionReport> {
    w.validate()?;
    if !w.is_integrable_at_zero() {
        return Err(Error::NonIntegrableNearZero(format!("{:?}", w.kind)));
    }
    let mut rep = delta2_on(w, domain)?;
    if rep.holds {
        let fine = delta2_on(w, &domain.refined())?;
        if fine.best_constant > BOUNDARY_EXCESS * rep.best_constant {
            rep.holds = false;
        }
    }
    Ok(rep)
}

/// `Δ₂` of `ψ^p`, sufficient for the generalized classical Lorentz functional to be a quasinorm.
pub fn quasinorm_sufficient_check(psi: &Weight, p: f64, domain: &Domain) -> Result<ConditionReport> {
    let prof = WeightProfile::new(psi.clone(), p)?;
    let mut rep = delta2_check(prof.psi_pow(), domain)?;
    rep.condition = ConditionTag::QuasinormSufficient;
    Ok(rep)
}

/// `sup_t t^p ∫_t^∞ x^{−p} ψ^p(x) dx / ∫_0^t ψ^p` for `p > 1`.
///
/// The tail past `t_max` is integrated exactly: in closed form for symbolic
/// `ψ`, and through the declared right extension for tabulated `ψ`.
pub fn bp_check(psi: &Weight, p: f64, domain: &Domain) -> Result<ConditionReport> {
    if !(p > 1.0) {
        return Err(Error::InvalidParameter(format!("B_p needs p > 1, got {p}")));
    }
    let prof = WeightProfile::new(psi.clone(), p)?;
    let w = prof.psi_pow();
    let mut samples = Vec::new();
    for &t in domain.points() {
        let tail = w.integral_with_power(-p, t, f64::INFINITY)?;
        let head = prof.big_psi_pow(t)?;
        samples.push((t, t.powf(p) * tail / head));
    }
    Ok(ConditionReport::from_samples(ConditionTag::Bp, samples, |t| {
        domain.is_interior(t)
    }))
}

/// `sup_{s ≤ t} [Ψ₁(t)/t]·[s/Ψ₁(s)]` over grid pairs.
pub fn b1_check(psi: &Weight, domain: &Domain) -> Result<ConditionReport> {
    let prof = WeightProfile::new(psi.clone(), 1.0)?;
    let pts = domain.points();
    let mut avg = Vec::with_capacity(pts.len());
    for &t in pts {
        avg.push(prof.big_psi_pow(t)? / t);
    }
    let (best, inner, w) = pair_scan(pts, &avg, true, |t| domain.is_interior(t));
    let boundary = best > BOUNDARY_EXCESS * inner;
    Ok(ConditionReport {
        condition: ConditionTag::B1,
        holds: best.is_finite() && !boundary,
        best_constant: best,
        witness_t: w.to_vec(),
        boundary_attained: boundary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcspace::{LeftExtension, PiecewiseFn, RightExtension};

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn sigma_of_unit_weights_is_one() {
        let d = Domain::default();
        let s = sigma(&Weight::unit(), &Weight::unit(), &d).unwrap();
        for &t in d.points() {
            assert!(rel(s.eval(t).unwrap(), 1.0) < 1e-15);
        }
    }

    #[test]
    fn sigma_of_linear_v_is_t() {
        let d = Domain::default();
        let s = sigma(&Weight::unit(), &Weight::power(1.0), &d).unwrap();
        for &t in d.points() {
            assert!(rel(s.eval(t).unwrap(), t) < 1e-14, "t = {t}");
        }
        assert!(rel(s.eval(3.3).unwrap(), 3.3) < 1e-14);
    }

    #[test]
    fn sigma_of_unit_interval_indicator_is_one() {
        // v/U = 1/τ on (0,1] and 0 after, so U(s) sup_{τ>s} v/U = 1 for every s < 1
        let d = Domain::default();
        let v = Weight::tabulated(PiecewiseFn::indicator(0.0, 1.0, 1.0).unwrap());
        let s = sigma(&Weight::unit(), &v, &d).unwrap();
        for &t in &[1e-4, 0.3, 1.0, 2.0, 1e4] {
            assert_eq!(s.eval(t).unwrap(), 1.0);
        }
        // brute-force double loop on a coarse grid
        let g: Vec<f64> = (0..400).map(|k| 10f64.powf(-3.0 + k as f64 * 0.015)).collect();
        for &t in &[0.01, 0.5, 3.0] {
            let mut m: f64 = 0.0;
            for &s in g.iter().filter(|&&s| s < t) {
                let inner = g.iter().filter(|&&x| x > s).map(|&x| v.eval(x) / x).fold(0.0, f64::max);
                m = m.max(s * inner);
            }
            assert!(rel(m, 1.0) < 0.04, "t = {t}: {m}");
        }
    }

    #[test]
    fn sigma_monotonicity_is_exact() {
        let d = Domain::default();
        for (u, v) in [
            (Weight::unit(), Weight::power(0.5)),
            (Weight::power(1.0), Weight::power_log(0.3, 1.5)),
            (Weight::power(-0.5), Weight::power(0.2)),
        ] {
            let s = sigma(&u, &v, &d).unwrap();
            let (x, uu) = (s.values(), s.big_u());
            for k in 1..x.len() {
                assert!(x[k] >= x[k - 1]);
                assert!(x[k] / uu[k] <= x[k - 1] / uu[k - 1] * (1.0 + 4.0 * f64::EPSILON));
            }
        }
    }

    #[test]
    fn sigma_equivalent_examples() {
        let d = Domain::default();
        let e = sigma_equivalent(&Weight::unit(), &Weight::unit(), &d).unwrap();
        assert!(rel(e.eval(1.0).unwrap(), 1.0) < 1e-10);
        let e = sigma_equivalent(&Weight::unit(), &Weight::power(1.0), &d).unwrap();
        assert!(rel(e.eval(1.0).unwrap(), 1.0) < 1e-10);
        let zero = Weight::unit().scaled(0.0);
        let e = sigma_equivalent(&Weight::unit(), &zero, &d).unwrap();
        assert_eq!(e.eval(2.0).unwrap(), 0.0);
    }

    #[test]
    fn sigma_over_equivalent_in_one_two() {
        let d = Domain::default();
        let v = Weight::tabulated(PiecewiseFn::indicator(0.0, 1.0, 1.0).unwrap());
        for (u, v) in [
            (Weight::unit(), v),
            (Weight::power(0.5), Weight::power(0.3)),
            (Weight::power(-0.5), Weight::power(0.4)),
            (Weight::power(1.0), Weight::power_log(1.0, -1.0)),
        ] {
            let s = sigma(&u, &v, &d).unwrap();
            let e = sigma_equivalent(&u, &v, &d).unwrap();
            for &t in d.points() {
                let r = s.eval(t).unwrap() / e.eval(t).unwrap();
                assert!((1.0 - 1e-12..=2.0 + 1e-12).contains(&r), "t = {t}: {r}");
            }
        }
    }

    #[test]
    fn unbounded_v_gives_infinite_sigma() {
        let d = Domain::default();
        let s = sigma(&Weight::unit(), &Weight::power(-0.5), &d).unwrap();
        assert!(s.eval(1.0).unwrap().is_infinite());
        let s = sigma(&Weight::unit(), &Weight::power(2.0), &d).unwrap();
        assert!(s.eval(1.0).unwrap().is_infinite());
        assert!(sigma_equivalent(&Weight::unit(), &Weight::power(2.0), &d)
            .unwrap()
            .eval(1.0)
            .unwrap()
            .is_infinite());
    }

    #[test]
    fn saturating_equivalent_stays_finite() {
        // v/U = 1/2, so the sup is approached only as s → ∞
        let d = Domain::default();
        let (u, v) = (Weight::power(-0.5), Weight::power(0.5));
        let s = sigma(&u, &v, &d).unwrap();
        let e = sigma_equivalent(&u, &v, &d).unwrap();
        for t in [1e-4, 1.0, 1e4] {
            let r = s.eval(t).unwrap() / e.eval(t).unwrap();
            assert!((1.0..=2.0).contains(&r), "t = {t}: {r}");
        }
    }

    #[test]
    fn admissible_examples() {
        let d = Domain::default();
        assert!(admissible_check(|t| t, &d).holds);
        assert!(!admissible_check(|_| 1.0, &d).holds);
        assert!(admissible_check(|t: f64| t.sqrt(), &d).holds);
        assert!(!admissible_check(|t: f64| t.powf(0.4), &d).holds);
    }

    #[test]
    fn quasiconcave_examples() {
        let d = Domain::default();
        let r = quasiconcave_check(|t: f64| t.sqrt(), |t| t, &d);
        assert!(r.report.holds && r.nondegenerate.holds);
        assert_eq!((r.c1, r.c2), (1.0, 1.0));

        let r = quasiconcave_check(|t| t, |t| t, &d);
        assert!(r.report.holds);
        assert_eq!((r.c1, r.c2), (1.0, 1.0));
        assert!(!r.nondegenerate.holds);

        let h = PiecewiseFn::sample(
            d.grid().clone(),
            |t: f64| t.sqrt() * (2.0 + t.ln().sin()),
            LeftExtension::Constant,
            RightExtension::Zero,
        )
        .unwrap();
        let r = quasiconcave_check(|t| h.eval(t), |t| t, &d);
        assert!(r.report.holds);
        assert!(r.c1 <= 3.0 && r.c2 <= 3.0, "{} {}", r.c1, r.c2);
        assert!(r.c1 > 1.0 && r.c2 > 1.0);
    }

    #[test]
    fn delta2_examples() {
        let d = Domain::default();
        let r = delta2_check(&Weight::unit(), &d).unwrap();
        assert!(r.holds);
        assert!(rel(r.best_constant, 2.0) < 1e-14);
        for a in [-0.5, 0.0, 1.5] {
            let r = delta2_check(&Weight::power(a), &d).unwrap();
            assert!(r.holds);
            assert!(rel(r.best_constant, 2f64.powf(a + 1.0)) < 1e-12);
        }
        let d = Domain::new(1e-2, 1e2, 32).unwrap();
        let e = PiecewiseFn::sample(
            Grid::geometric(1e-2, 1e2, 32).unwrap(),
            |t: f64| t.exp(),
            LeftExtension::Constant,
            RightExtension::Zero,
        )
        .unwrap();
        let r = delta2_check(&Weight::tabulated(e), &d).unwrap();
        assert!(r.boundary_attained && !r.holds);
        assert!(r.best_constant > 1e15);
        assert!(delta2_check(&Weight::power(-1.0), &d).is_err());
    }

    use crate::funcspace::Grid;

    #[test]
    fn bp_examples() {
        let d = Domain::default();
        // ψ = t^{-1/4}, p = 2: (αp+1)/(p-1-αp) = 1/3
        let r = bp_check(&Weight::power(-0.25), 2.0, &d).unwrap();
        assert!(r.holds);
        assert!(rel(r.best_constant, 1.0 / 3.0) < 1e-12);
        let r = bp_check(&Weight::unit(), 2.0, &d).unwrap();
        assert!(r.holds && rel(r.best_constant, 1.0) < 1e-12);
        let r = bp_check(&Weight::power(1.0), 2.0, &d).unwrap();
        assert!(!r.holds && r.best_constant.is_infinite());
        // ψ^p not integrable at zero
        assert!(matches!(
            bp_check(&Weight::power(-0.75), 2.0, &d),
            Err(Error::NonIntegrableNearZero(_))
        ));
    }

    #[test]
    fn bp_sweep_matches_criterion() {
        let d = Domain::default();
        for p in [1.5, 2.0, 3.0] {
            for k in -8..=8 {
                let a = k as f64 * 0.15;
                match bp_check(&Weight::power(a), p, &d) {
                    Err(_) => assert!(a * p <= -1.0),
                    Ok(r) => {
                        assert!(a * p > -1.0);
                        assert_eq!(r.holds, a * p < p - 1.0, "α = {a}, p = {p}");
                    }
                }
            }
        }
    }

    #[test]
    fn b1_examples() {
        let d = Domain::default();
        let r = b1_check(&Weight::unit(), &d).unwrap();
        assert!(r.holds && r.best_constant == 1.0);
        let r = b1_check(&Weight::power(-0.5), &d).unwrap();
        assert!(r.holds && r.best_constant == 1.0);
        let r = b1_check(&Weight::power(1.0), &d).unwrap();
        assert!(!r.holds && r.boundary_attained);
        assert!(rel(r.best_constant, 1e8) < 1e-9);
    }

    #[test]
    fn quasinorm_examples() {
        let d = Domain::default();
        let r = quasinorm_sufficient_check(&Weight::unit(), 1.0, &d).unwrap();
        assert_eq!(r.condition, ConditionTag::QuasinormSufficient);
        assert!(r.holds && rel(r.best_constant, 2.0) < 1e-14);
        let r = quasinorm_sufficient_check(&Weight::power(1.0), 2.0, &d).unwrap();
        assert!(r.holds && rel(r.best_constant, 8.0) < 1e-12);
    }

    #[test]
    fn profile_consistency() {
        let prof = WeightProfile::new(Weight::power(0.5), 3.0).unwrap();
        for t in [0.01, 1.0, 50.0] {
            let a = prof.big_psi(t).unwrap().powf(3.0);
            assert!(rel(a, prof.big_psi_pow(t).unwrap()) < 1e-13);
        }
    }
}
