//! Lorentz-type norms of `f*`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::funcspace::quad::growing;
use crate::funcspace::weight::log_gauss;
use crate::funcspace::PiecewiseFn;
use crate::funcspace::Weight;
use crate::rearrangement::{decreasing_rearrangement, DecreasingFn};

/// A rearrangement-invariant (quasi)norm.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum NormSpec {
    /// `‖t^{1/p−1/q} f*‖_q`
    Lpq {
        #[serde(with = "crate::extreal")]
        p: f64,
        #[serde(with = "crate::extreal")]
        q: f64,
    },
    /// `‖t^{1/p−1/q} f**‖_q`
    LpqStar {
        #[serde(with = "crate::extreal")]
        p: f64,
        #[serde(with = "crate::extreal")]
        q: f64,
    },
    /// `‖ψ f*‖_p`
    ClassicalLorentz {
        #[serde(with = "crate::extreal")]
        p: f64,
        psi: Weight,
    },
    /// `sup_r φ(r) ‖t^{1/p−1/q} f*‖_{q,(0,r)}`
    GenLorentz {
        #[serde(with = "crate::extreal")]
        p: f64,
        #[serde(with = "crate::extreal")]
        q: f64,
        phi: Weight,
    },
    /// `sup_r φ(r) ‖ψ f*‖_{p,(0,r)}`
    GenClassicalLorentz {
        #[serde(with = "crate::extreal")]
        p: f64,
        psi: Weight,
        phi: Weight,
    },
    /// `sup_t φ(t) ‖f*‖_{p,(0,t)}`
    Marcinkiewicz {
        #[serde(with = "crate::extreal")]
        p: f64,
        phi: Weight,
    },
}

fn check_exp(name: &str, x: f64) -> Result<()> {
    if x > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} = {x} must lie in (0, ∞]")))
    }
}

fn recip(x: f64) -> f64 {
    if x.is_infinite() {
        0.0
    } else {
        1.0 / x
    }
}

fn lpq_weight(p: f64, q: f64) -> Weight {
    Weight::power(recip(p) - recip(q))
}

impl NormSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            NormSpec::Lpq { p, q } | NormSpec::LpqStar { p, q } => {
                check_exp("p", *p)?;
                check_exp("q", *q)
            }
            NormSpec::ClassicalLorentz { p, psi } => {
                check_exp("p", *p)?;
                psi.validate()
            }
            NormSpec::GenLorentz { p, q, phi } => {
                check_exp("p", *p)?;
                check_exp("q", *q)?;
                phi.validate()
            }
            NormSpec::GenClassicalLorentz { p, psi, phi } => {
                check_exp("p", *p)?;
                psi.validate()?;
                phi.validate()
            }
            NormSpec::Marcinkiewicz { p, phi } => {
                check_exp("p", *p)?;
                phi.validate()
            }
        }
    }

    /// Short label such as `lpq(2,1)`.
    pub fn label(&self) -> String {
        match self {
            NormSpec::Lpq { p, q } => format!("lpq({p},{q})"),
            NormSpec::LpqStar { p, q } => format!("lpq_star({p},{q})"),
            NormSpec::ClassicalLorentz { p, .. } => format!("classical_lorentz({p})"),
            NormSpec::GenLorentz { p, q, .. } => format!("gen_lorentz({p},{q})"),
            NormSpec::GenClassicalLorentz { p, .. } => format!("gen_classical_lorentz({p})"),
            NormSpec::Marcinkiewicz { p, .. } => format!("marcinkiewicz({p})"),
        }
    }
}

/// Pieces `(a, b, c)` of `f*` with `c > 0`; `b` may be infinite.
pub(crate) fn pieces(f: &DecreasingFn) -> Vec<(f64, f64, f64)> {
    let g = f.as_fn();
    let grid = g.grid();
    let mut out = Vec::with_capacity(grid.n_cells() + 2);
    if grid.first() > 0.0 && g.left_value() > 0.0 {
        out.push((0.0, grid.first(), g.left_value()));
    }
    for k in 0..grid.n_cells() {
        let (a, b) = grid.cell_bounds(k);
        if g.values()[k] > 0.0 {
            out.push((a, b, g.values()[k]));
        }
    }
    if g.right().value() > 0.0 {
        out.push((grid.last(), f64::INFINITY, g.right().value()));
    }
    out
}

/// `r ↦ ‖ψ f*‖_{s,(0,r)}` with exact per-piece integrals.
struct Running {
    pieces: Vec<(f64, f64, f64)>,
    psi: Weight,
    psi_s: Option<Weight>,
    s: f64,
    /// `∫_0^{b_k} (ψ f*)^s`, or the running sup when `s = ∞`
    cum: Vec<f64>,
}

impl Running {
    fn new(f: &DecreasingFn, psi: &Weight, s: f64) -> Result<Self> {
        let pieces = pieces(f);
        let psi_s = if s.is_finite() { Some(psi.powf(s)?) } else { None };
        let mut cum = Vec::with_capacity(pieces.len());
        let mut acc = 0.0_f64;
        for &(a, b, c) in &pieces {
            match &psi_s {
                Some(w) => acc += c.powf(s) * w.integral(a, b)?,
                None => acc = acc.max(c * psi.sup_on(a, b)),
            }
            cum.push(acc);
        }
        Ok(Running {
            pieces,
            psi: psi.clone(),
            psi_s,
            s,
            cum,
        })
    }

    fn finish(&self, x: f64) -> f64 {
        if self.s.is_finite() {
            x.powf(1.0 / self.s)
        } else {
            x
        }
    }

    fn total(&self) -> f64 {
        self.finish(self.cum.last().copied().unwrap_or(0.0))
    }

    fn at(&self, r: f64) -> Result<f64> {
        let k = self.pieces.partition_point(|p| p.1 < r);
        if k == self.pieces.len() {
            return Ok(self.total());
        }
        let before = if k == 0 { 0.0 } else { self.cum[k - 1] };
        let (a, _, c) = self.pieces[k];
        if r <= a {
            return Ok(self.finish(before));
        }
        let x = match &self.psi_s {
            Some(w) => before + c.powf(self.s) * w.integral(a, r)?,
            None => before.max(c * self.psi.sup_on(a, r)),
        };
        Ok(self.finish(x))
    }

    fn ends(&self) -> impl Iterator<Item = f64> + '_ {
        self.pieces.iter().map(|p| p.1).filter(|b| b.is_finite())
    }
}

/// `sup_{r>0} φ(r) · inner(r)` over piece ends, breakpoints of `φ` and both limits.
fn sup_over_r(phi: &Weight, run: &Running) -> Result<f64> {
    if run.pieces.is_empty() {
        return Ok(0.0);
    }
    let phi_at = |r: f64| phi.eval(r).max(phi.eval_right(r));
    let last = run.pieces[run.pieces.len() - 1].1;
    let mut rs: Vec<f64> = run.ends().collect();
    rs.extend(phi.breakpoints().into_iter().filter(|&r| r > 0.0 && r < last));
    let mut best = 0.0_f64;
    for r in rs {
        let inner = run.at(r)?;
        if inner > 0.0 {
            best = best.max(phi_at(r) * inner);
        }
    }
    let total = run.total();
    if last.is_finite() {
        let far = phi.sup_on(last, f64::INFINITY);
        if far > 0.0 {
            best = best.max(far * total);
        }
    } else if total.is_infinite() && (phi.limit_at_infinity() > 0.0 || phi.sup_on(run.pieces[0].1, f64::INFINITY) > 0.0)
    {
        return Ok(f64::INFINITY);
    }
    // approach to r = 0 inside the first piece
    let e0 = if last.is_finite() { run.pieces[0].1 } else { 1.0 };
    let mut prev: Option<(f64, f64)> = None;
    for k in 1..=12 {
        let r = e0 * 10f64.powi(-k);
        let v = phi_at(r) * run.at(r)?;
        if v.is_nan() {
            continue;
        }
        best = best.max(v);
        if k == 12 {
            if let Some((r0, v0)) = prev {
                if growing(v0, v, r0, r) {
                    return Ok(f64::INFINITY);
                }
            }
        }
        prev = Some((r, v));
    }
    Ok(best)
}

/// `‖f‖` under `spec`, rearranging `f` first.
pub fn norm(spec: &NormSpec, f: &PiecewiseFn) -> Result<f64> {
    norm_decreasing(spec, &decreasing_rearrangement(f)?)
}

/// `‖f‖` under `spec` for an already nonincreasing `f*`.
pub fn norm_decreasing(spec: &NormSpec, fs: &DecreasingFn) -> Result<f64> {
    spec.validate()?;
    match spec {
        NormSpec::Lpq { p, q } => Ok(Running::new(fs, &lpq_weight(*p, *q), *q)?.total()),
        NormSpec::LpqStar { p, q } => lpq_star_decreasing(*p, *q, fs),
        NormSpec::ClassicalLorentz { p, psi } => Ok(Running::new(fs, psi, *p)?.total()),
        NormSpec::GenLorentz { p, q, phi } => sup_over_r(phi, &Running::new(fs, &lpq_weight(*p, *q), *q)?),
        NormSpec::GenClassicalLorentz { p, psi, phi } => sup_over_r(phi, &Running::new(fs, psi, *p)?),
        NormSpec::Marcinkiewicz { p, phi } => sup_over_r(phi, &Running::new(fs, &Weight::unit(), *p)?),
    }
}

/// `‖t^{1/p−1/q} f**(t)‖_q`.
pub fn lpq_star_norm(p: f64, q: f64, f: &PiecewiseFn) -> Result<f64> {
    check_exp("p", p)?;
    check_exp("q", q)?;
    lpq_star_decreasing(p, q, &decreasing_rearrangement(f)?)
}

fn lpq_star_decreasing(p: f64, q: f64, fs: &DecreasingFn) -> Result<f64> {
    let ps = pieces(fs);
    if ps.is_empty() {
        return Ok(0.0);
    }
    if ps[ps.len() - 1].1.is_infinite() && p.is_finite() {
        // f** tends to a positive constant
        return Ok(f64::INFINITY);
    }
    let ip = recip(p);
    let last = ps[ps.len() - 1].1;
    let f_last = fs.primitive(last);
    if q.is_infinite() {
        // sup of t^{1/p−1} F(t); on a piece F is affine
        let beta = ip - 1.0;
        let g = |t: f64| t.powf(beta) * fs.primitive(t);
        let mut best = 0.0_f64;
        for &(a, b, c) in &ps {
            if a == 0.0 {
                best = best.max(if beta == -1.0 { c } else { g(b) });
                if beta < -1.0 {
                    return Ok(f64::INFINITY);
                }
                continue;
            }
            // t^β (F(a) + c(t − a)) has no interior maximum
            best = best.max(g(a)).max(g(b));
        }
        if beta > 0.0 {
            return Ok(f64::INFINITY);
        }
        if beta == 0.0 {
            best = best.max(f_last);
        }
        return Ok(best);
    }
    let gamma = q * ip - 1.0 - q;
    let mut acc = 0.0;
    for &(a, b, c) in &ps {
        if a == 0.0 {
            if ip == 0.0 {
                return Ok(f64::INFINITY);
            }
            acc += c.powf(q) * b.powf(q * ip) / (q * ip);
        } else {
            acc += log_gauss(
                |t| t.powf(gamma) * fs.primitive(t).powf(q),
                a,
                b,
                std::f64::consts::LN_10 / 16.0,
            );
        }
    }
    if gamma >= -1.0 {
        return Ok(f64::INFINITY);
    }
    acc += f_last.powf(q) * last.powf(gamma + 1.0) / (-gamma - 1.0);
    Ok(acc.powf(1.0 / q))
}
