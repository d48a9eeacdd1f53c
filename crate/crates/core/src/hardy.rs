//! Reverse Hardy inequalities
//! `(∫ f*^q w)^{1/q} ≤ C ess sup f_u**(t) v(t)` on nonincreasing `f*`.
//!
//! The optimal `C` is compared against the constant `A(1)` (for `q ≥ 1`) or
//! `A(2)` (for `q < 1`), built from a representation measure `ν` of
//! `U^q/σ^q` with respect to `U^q`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::funcspace::quad::growing;
use crate::funcspace::{Domain, Quad, Weight};
use crate::measures::{fit_representation_measure, nondegeneracy_check, DiscreteMeasure, Fit, FitConfig};
use crate::rearrangement::{DecreasingFn, WeightedPrimitive};
use crate::report::EquivReport;
use crate::sampling::MixedSampler;
use crate::weights::{sigma, WeightProfile};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HardyProblem {
    pub q: f64,
    pub u: Weight,
    pub v: Weight,
    pub w: Weight,
    pub nu: DiscreteMeasure,
    #[serde(default)]
    pub domain: Domain,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    /// `1 ≤ q < ∞`, constant `A(1)`
    A1,
    /// `0 < q < 1`, constant `A(2)`
    A2,
}

/// A number together with a flag saying it depended on the truncation boundary.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Flagged {
    #[serde(with = "crate::extreal")]
    pub value: f64,
    pub boundary: bool,
}

/// `W(t)` for a weight already known to be integrable at zero.
fn cum(w: &Weight, t: f64) -> f64 {
    w.cumulative(t).unwrap_or(f64::NAN)
}

fn vmax(v: &Weight, t: f64) -> f64 {
    v.eval(t).max(v.eval_right(t))
}

/// `(∫_t^∞ (W/U)^{q/(1−q)} w)` at each `t`, with tail flags.
fn zeta_tails(q: f64, u: &Weight, w: &Weight, domain: &Domain, ts: &[f64]) -> Vec<Flagged> {
    let quad = Quad::new(domain, &[&u.breakpoints(), &w.breakpoints()]);
    let e = q / (1.0 - q);
    let g = |s: f64| {
        let ws = w.eval(s);
        if ws == 0.0 {
            return 0.0;
        }
        (cum(w, s) / cum(u, s)).powf(e) * ws
    };
    let tail = quad.tail(g);
    ts.iter()
        .map(|&t| {
            let i = tail.from(t);
            Flagged {
                value: i.value,
                boundary: i.tail_sensitive(),
            }
        })
        .collect()
}

/// `ζ(t) = W(t) + U(t)^q (∫_t^∞ (W/U)^{q/(1−q)} w)^{1−q}` for `0 < q < 1`.
pub fn zeta_values(q: f64, u: &Weight, w: &Weight, domain: &Domain, ts: &[f64]) -> Result<Vec<Flagged>> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::BranchMismatch(format!("ζ needs 0 < q < 1, got q = {q}")));
    }
    let tails = zeta_tails(q, u, w, domain, ts);
    let mut out = Vec::with_capacity(ts.len());
    for (&t, tl) in ts.iter().zip(tails) {
        let (wt, ut) = (w.cumulative(t)?, u.cumulative(t)?);
        if !(ut > 0.0) {
            return Err(Error::DegenerateU(t));
        }
        let second = if tl.value == 0.0 {
            0.0
        } else {
            ut.powf(q) * tl.value.powf(1.0 - q)
        };
        out.push(Flagged {
            value: wt + second,
            boundary: tl.boundary,
        });
    }
    Ok(out)
}

/// Both sides of the reverse Hardy inequality for one `f*`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sides {
    #[serde(with = "crate::extreal")]
    pub lhs: f64,
    #[serde(with = "crate::extreal")]
    pub rhs: f64,
    /// the sup on the right was attained at the first or last knot
    pub rhs_boundary: bool,
}

impl HardyProblem {
    pub fn new(q: f64, u: Weight, v: Weight, w: Weight, nu: DiscreteMeasure, domain: Domain) -> Result<Self> {
        let p = HardyProblem { q, u, v, w, nu, domain };
        p.validate()?;
        Ok(p)
    }

    /// Builds the problem with `ν` fitted to `U^q/σ^q` with respect to `U^q`.
    pub fn fitted(q: f64, u: Weight, v: Weight, w: Weight, domain: Domain, cfg: &FitConfig) -> Result<(Self, Fit)> {
        let probe = HardyProblem {
            q,
            u: u.clone(),
            v: v.clone(),
            w: w.clone(),
            nu: DiscreteMeasure::empty(),
            domain: domain.clone(),
        };
        probe.validate()?;
        let sig = sigma(&u, &v, &domain)?;
        let uq = |t: f64| cum(&u, t).powf(q);
        let h = |t: f64| uq(t) / sig.eval(t).unwrap_or(f64::NAN).powf(q);
        let fit = fit_representation_measure(h, uq, &domain, true, cfg)?;
        let p = HardyProblem {
            nu: fit.measure.clone(),
            ..probe
        };
        Ok((p, fit))
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.q > 0.0 && self.q.is_finite()) {
            return Err(Error::InvalidParameter(format!("q = {} must lie in (0, ∞)", self.q)));
        }
        for (name, w) in [("u", &self.u), ("v", &self.v), ("w", &self.w)] {
            w.validate()?;
            if name != "v" && !w.is_integrable_at_zero() {
                return Err(Error::NonIntegrableNearZero(format!("{name} = {:?}", w.kind)));
            }
        }
        Ok(())
    }

    pub fn branch(&self) -> Branch {
        if self.q >= 1.0 {
            Branch::A1
        } else {
            Branch::A2
        }
    }

    /// Same problem with `w` replaced by `λ w`.
    pub fn scale_w(&self, lambda: f64) -> Self {
        HardyProblem {
            w: self.w.clone().scaled(lambda),
            ..self.clone()
        }
    }

    /// Same problem with `ν` replaced by `λ ν`.
    pub fn scale_nu(&self, lambda: f64) -> Result<Self> {
        Ok(HardyProblem {
            nu: self.nu.scale(lambda)?,
            ..self.clone()
        })
    }

    /// `(∫ f*^q w)^{1/q}` and `sup_t f_u**(t) v(t)`.
    pub fn lhs_rhs(&self, f: &DecreasingFn) -> Result<Sides> {
        let q = self.q;
        let g = f.as_fn();
        let grid = g.grid();
        let mut acc = 0.0;
        let mut piece = |val: f64, a: f64, b: f64| -> Result<()> {
            if val > 0.0 && b > a {
                acc += val.powf(q) * self.w.integral(a, b)?;
            }
            Ok(())
        };
        piece(g.left_value(), 0.0, grid.first())?;
        for k in 0..grid.n_cells() {
            let (a, b) = grid.cell_bounds(k);
            piece(g.values()[k], a, b)?;
        }
        piece(g.right().value(), grid.last(), f64::INFINITY)?;
        let lhs = acc.powf(1.0 / q);

        let wp = WeightedPrimitive::new(f, &self.u)?;
        let quad = Quad::new(
            &self.domain,
            &[&self.u.breakpoints(), &self.v.breakpoints(), g.breakpoints()],
        );
        let ks = quad.knots();
        let mut vals = Vec::with_capacity(ks.len());
        for &t in ks {
            vals.push(wp.maximal(t)? * vmax(&self.v, t));
        }
        let n = vals.len();
        let (mut rhs, mut arg) = (0.0_f64, 0usize);
        for (k, &x) in vals.iter().enumerate() {
            if x > rhs {
                rhs = x;
                arg = k;
            }
        }
        if growing(vals[n - 2], vals[n - 1], ks[n - 2], ks[n - 1]) || growing(vals[1], vals[0], ks[1], ks[0]) {
            rhs = f64::INFINITY;
        }
        Ok(Sides {
            lhs,
            rhs,
            rhs_boundary: rhs > 0.0 && (arg == 0 || arg == n - 1 || rhs.is_infinite()),
        })
    }

    /// `A(1) = (∫ sup_{s>t} W(s)/U(s)^q dν(t))^{1/q}`.
    pub fn a1(&self) -> Result<Flagged> {
        if self.branch() != Branch::A1 {
            return Err(Error::BranchMismatch(format!("A(1) needs q ≥ 1, got q = {}", self.q)));
        }
        let quad = Quad::new(&self.domain, &[&self.u.breakpoints(), &self.w.breakpoints()]);
        let ks = quad.knots();
        let ratio = |s: f64| cum(&self.w, s) / cum(&self.u, s).powf(self.q);
        let vals: Vec<f64> = ks.iter().map(|&s| ratio(s)).collect();
        let n = ks.len();
        let mut suffix = vec![0.0_f64; n + 1];
        if growing(vals[n - 2], vals[n - 1], ks[n - 2], ks[n - 1]) {
            suffix[n] = f64::INFINITY;
        }
        for k in (0..n).rev() {
            suffix[k] = suffix[k + 1].max(vals[k]);
        }
        let mut boundary = false;
        let sup_beyond = |t: f64| -> f64 {
            let k = ks.partition_point(|&x| x <= t);
            if t == 0.0 {
                return suffix[0];
            }
            suffix[k].max(ratio(t))
        };
        for a in self.nu.atoms() {
            if a.t == 0.0 || a.t >= ks[n - 1] {
                boundary = true;
            }
        }
        let total = self.nu.integrate(sup_beyond);
        if total.is_infinite() {
            boundary = true;
        }
        Ok(Flagged {
            value: total.powf(1.0 / self.q),
            boundary,
        })
    }

    /// `ζ` at the given points.
    pub fn zeta(&self, ts: &[f64]) -> Result<Vec<Flagged>> {
        zeta_values(self.q, &self.u, &self.w, &self.domain, ts)
    }

    /// `A(2) = (∫ ζ(t)/U(t)^q dν(t))^{1/q}`. An atom at the origin is
    /// evaluated at `t_min` and flagged.
    pub fn a2(&self) -> Result<Flagged> {
        if self.branch() != Branch::A2 {
            return Err(Error::BranchMismatch(format!(
                "A(2) needs 0 < q < 1, got q = {}",
                self.q
            )));
        }
        let mut boundary = false;
        let mut total = 0.0;
        let atoms = self.nu.atoms();
        let ts: Vec<f64> = atoms
            .iter()
            .map(|a| if a.t == 0.0 { self.domain.t_min } else { a.t })
            .collect();
        let zs = self.zeta(&ts)?;
        for ((a, &t), z) in atoms.iter().zip(&ts).zip(&zs) {
            if a.t == 0.0 || z.boundary {
                boundary = true;
            }
            total += a.m * z.value / self.u.cumulative(t)?.powf(self.q);
        }
        if self.nu.tail().is_some() {
            let tail_only = DiscreteMeasure::new(vec![*atoms.last().expect("tail has a last atom")], self.nu.tail())?;
            let last = atoms[atoms.len() - 1];
            let with_tail = tail_only.integrate(|t| {
                let z = self.zeta(&[t]).map(|v| v[0].value).unwrap_or(f64::NAN);
                z / cum(&self.u, t).powf(self.q)
            });
            let z_last = zs[zs.len() - 1].value / self.u.cumulative(last.t)?.powf(self.q);
            total += with_tail - last.m * z_last;
            boundary = true;
        }
        Ok(Flagged {
            value: total.powf(1.0 / self.q),
            boundary,
        })
    }

    /// `A(1)` or `A(2)` by branch.
    pub fn constant(&self) -> Result<Flagged> {
        match self.branch() {
            Branch::A1 => self.a1(),
            Branch::A2 => self.a2(),
        }
    }
}

/// Empirical optimal constant against `A(1)`/`A(2)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HardyReport {
    pub branch: Branch,
    #[serde(with = "crate::extreal")]
    pub constant: f64,
    /// `max LHS/RHS` over the trials
    #[serde(with = "crate::extreal")]
    pub c_emp: f64,
    /// `c_emp / constant`
    #[serde(with = "crate::extreal")]
    pub ratio: f64,
    /// per-trial `(LHS/RHS) / constant`; `upper` equals `ratio`
    pub equiv: EquivReport,
    /// non-degeneracy proxies of `ν` with respect to `U^q`
    pub nondegenerate: bool,
}

/// Runs `n_trials` trial functions and compares the largest `LHS/RHS` with the constant.
pub fn verify_reverse_hardy(problem: &HardyProblem, sampler: &MixedSampler, n_trials: usize) -> Result<HardyReport> {
    problem.validate()?;
    let a = problem.constant()?;
    let trials: Vec<Result<(String, Sides)>> = (0..n_trials)
        .into_par_iter()
        .map(|i| {
            let (label, f) = sampler.trial(i)?;
            Ok((label, problem.lhs_rhs(&f)?))
        })
        .collect();
    let mut pairs = Vec::with_capacity(n_trials);
    let mut any_rhs = false;
    let mut rhs_boundary = false;
    for t in trials {
        let (label, s) = t?;
        if s.lhs == 0.0 && s.rhs == 0.0 {
            continue;
        }
        any_rhs |= s.rhs > 0.0;
        rhs_boundary |= s.rhs_boundary;
        pairs.push((s.lhs / s.rhs, a.value, label));
    }
    if !any_rhs {
        return Err(Error::DegenerateProblem);
    }
    let c_emp = pairs.iter().map(|p| p.0).fold(0.0, f64::max);
    let mut equiv = EquivReport::from_pairs(pairs);
    if a.boundary {
        equiv.flag("constant_boundary");
    }
    if rhs_boundary {
        equiv.flag("rhs_boundary");
    }
    let uq = |t: f64| cum(&problem.u, t).powf(problem.q);
    let nondeg = nondegeneracy_check(&problem.nu, &uq, &problem.domain)?;
    if !nondeg.report.holds {
        equiv.flag("nondegeneracy_proxy_failed");
    }
    Ok(HardyReport {
        branch: problem.branch(),
        constant: a.value,
        c_emp,
        ratio: c_emp / a.value,
        equiv,
        nondegenerate: nondeg.report.holds,
    })
}

/// The specialization `w = f*`, `U = Ψ_p^p`, `q = 1/p` for `1 < p < ∞`,
/// where `W(t) = t f**(t)`.
#[derive(Clone, Debug)]
pub struct Specialization {
    f: DecreasingFn,
    profile: WeightProfile,
    domain: Domain,
    quad: Quad,
}

/// The two sides of the integration-by-parts identity at one `t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IbpSides {
    /// `I₁ = ∫_t^∞ (s f**/Ψ_p^p)^{1/(p−1)} f*`
    pub i1: f64,
    /// `I₂ = ∫_t^∞ (s f**/Ψ_p^p)^{p'} ψ^p`
    pub i2: f64,
    /// `(t f**(t))^{p'} Ψ_p^p(t)^{−1/(p−1)}`
    pub boundary: f64,
}

impl IbpSides {
    /// `(p' I₁, −boundary + I₂/(p−1))`; equal for every `t`.
    pub fn balanced(&self, p: f64) -> (f64, f64) {
        let pp = p / (p - 1.0);
        (pp * self.i1, -self.boundary + self.i2 / (p - 1.0))
    }
}

impl Specialization {
    pub fn new(f: DecreasingFn, psi: Weight, p: f64, domain: Domain) -> Result<Self> {
        if !(p > 1.0 && p.is_finite()) {
            return Err(Error::BranchMismatch(format!("ζ₁ needs 1 < p < ∞, got p = {p}")));
        }
        let profile = WeightProfile::new(psi, p)?;
        let quad = Quad::new(&domain, &[&profile.psi().breakpoints(), f.as_fn().breakpoints()]);
        Ok(Specialization {
            f,
            profile,
            domain,
            quad,
        })
    }

    fn p(&self) -> f64 {
        self.profile.p()
    }

    fn ratio(&self, s: f64) -> f64 {
        self.f.primitive(s) / self.profile.big_psi_pow(s).unwrap_or(f64::NAN)
    }

    /// `ζ` of the specialized reverse Hardy problem.
    pub fn zeta(&self, ts: &[f64]) -> Result<Vec<Flagged>> {
        let w = Weight::tabulated(self.f.as_fn().clone());
        zeta_values(1.0 / self.p(), self.profile.psi_pow(), &w, &self.domain, ts)
    }

    /// `ζ₁(t) = Ψ_p(t) (∫_t^∞ (s f**/Ψ_p^p)^{p'} ψ^p)^{1/p'}`.
    pub fn zeta1(&self, ts: &[f64]) -> Result<Vec<Flagged>> {
        let pp = self.p() / (self.p() - 1.0);
        let psi_p = self.profile.psi_pow();
        let tail = self.quad.tail(|s| {
            let x = self.ratio(s);
            if x == 0.0 {
                0.0
            } else {
                x.powf(pp) * psi_p.eval(s)
            }
        });
        ts.iter()
            .map(|&t| {
                let i = tail.from(t);
                Ok(Flagged {
                    value: self.profile.big_psi(t)? * i.value.powf(1.0 / pp),
                    boundary: i.tail_sensitive(),
                })
            })
            .collect()
    }

    /// `t f**(t) (p−1)^{1/p'}`, a pointwise lower bound for `ζ₁`.
    pub fn zeta1_lower_bound(&self, t: f64) -> f64 {
        let pp = self.p() / (self.p() - 1.0);
        self.f.primitive(t) * (self.p() - 1.0).powf(1.0 / pp)
    }

    /// Ingredients of the integration-by-parts identity, each computed separately.
    pub fn ibp(&self, t: f64) -> Result<IbpSides> {
        let p = self.p();
        let pp = p / (p - 1.0);
        let psi_p = self.profile.psi_pow();
        let i1 = self
            .quad
            .tail(|s| {
                let fs = self.f.eval(s);
                if fs == 0.0 {
                    0.0
                } else {
                    self.ratio(s).powf(1.0 / (p - 1.0)) * fs
                }
            })
            .from(t)
            .value;
        let i2 = self
            .quad
            .tail(|s| {
                let x = self.ratio(s);
                if x == 0.0 {
                    0.0
                } else {
                    x.powf(pp) * psi_p.eval(s)
                }
            })
            .from(t)
            .value;
        let boundary = self.f.primitive(t).powf(pp) * self.profile.big_psi_pow(t)?.powf(-1.0 / (p - 1.0));
        Ok(IbpSides { i1, i2, boundary })
    }
}
