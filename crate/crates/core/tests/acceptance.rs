//! Acceptance suite. Prints one `criterion N: PASS|FAIL` line per criterion.
//!
//! Runs without the libtest harness so the lines always reach stdout. The
//! process fails when an attainable criterion fails, or when a criterion
//! known to be unattainable stops behaving as analysed.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;

use lorentz_lab::associate::{
    assoc_generalized, duality_oracle, embedding_criterion, empirical_embedding_check, lpq_star_norm, norm,
    norm_decreasing, pairing, GeneralizedAssociate, NormSpec, OracleConfig,
};
use lorentz_lab::funcspace::{Domain, Grid, LeftExtension, PiecewiseFn, RightExtension, Weight};
use lorentz_lab::hardy::{verify_reverse_hardy, HardyProblem, Specialization};
use lorentz_lab::measures::{
    fit_representation_measure, fundamental_equiv_forms, fundamental_function, Atom, DiscreteMeasure, FitConfig,
    PowerTail,
};
use lorentz_lab::rearrangement::{decreasing_rearrangement, distribution, DecreasingFn};
use lorentz_lab::sampling::{indicator_sweep, random_decreasing, random_piecewise, trial_rng, MixedSampler};
use lorentz_lab::weights::{sigma, sigma_equivalent};
use lorentz_lab::Error;

/// Frozen after calibration on the six Hardy problems below (worst ratio 0.344).
const KAPPA_H: f64 = 4.0;
/// Frozen after calibration on the six duality families below (oracle/assoc in [0.357, 1]).
const KAPPA_ASSOC: f64 = 4.0;
const INF: f64 = f64::INFINITY;

type Named = (&'static str, fn(f64) -> f64);

struct Outcome {
    pass: bool,
    /// the outcome differs from what is expected of this build
    regressed: bool,
    detail: String,
}

impl Outcome {
    fn attainable(pass: bool, detail: String) -> Self {
        Outcome {
            pass,
            regressed: !pass,
            detail,
        }
    }
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

fn chi(a: f64) -> PiecewiseFn {
    PiecewiseFn::indicator(0.0, a, 1.0).unwrap()
}

fn steps(pts: &[f64], vals: &[f64]) -> Weight {
    Weight::tabulated(PiecewiseFn::compact(Grid::from_breakpoints(pts.to_vec()).unwrap(), vals.to_vec()).unwrap())
}

/// Positive step weight: `vals[0]` before the first point, `tail` after the last.
fn bump(pts: &[f64], vals: &[f64], tail: f64) -> Weight {
    Weight::tabulated(
        PiecewiseFn::new(
            Grid::from_breakpoints(pts.to_vec()).unwrap(),
            vals.to_vec(),
            LeftExtension::Constant,
            RightExtension::Constant(tail),
        )
        .unwrap(),
    )
}

fn pw(a: f64) -> Weight {
    Weight::power(a)
}

fn one() -> Weight {
    Weight::unit()
}

fn equimeasurability() -> Outcome {
    let mut bad_levels = 0usize;
    let mut levels = 0usize;
    let mut worst: f64 = 0.0;
    for i in 0..200 {
        let mut rng = trial_rng(101, i);
        let n = rng.random_range(1..=40usize);
        let f = random_piecewise(&mut rng, n).unwrap();
        let fs = decreasing_rearrangement(&f).unwrap();
        for &a in f.values().iter().chain([0.0].iter()) {
            levels += 1;
            if distribution(&f, a) != distribution(fs.as_fn(), a) {
                bad_levels += 1;
            }
        }
        for p in [0.5, 1.0, 2.0, INF] {
            worst = worst.max(rel(f.p_norm(p, INF).unwrap(), fs.as_fn().p_norm(p, INF).unwrap()));
        }
    }
    Outcome::attainable(
        bad_levels == 0 && worst <= 1e-12,
        format!("{bad_levels}/{levels} levels differ; worst p-norm rel err {worst:.1e}"),
    )
}

fn sandwich() -> Outcome {
    let d = Domain::default();
    let mut ok = true;
    let mut parts = Vec::new();
    for (p, q) in [(2.0, 2.0), (2.0, 1.0), (3.0, INF)] {
        let c = p / (p - 1.0);
        let spec = NormSpec::Lpq { p, q };
        let mut max_ratio: f64 = 0.0;
        let mut violations = 0;
        let mut check = |f: &PiecewiseFn| {
            let n = norm(&spec, f).unwrap();
            let s = lpq_star_norm(p, q, f).unwrap();
            if !(n <= s * (1.0 + 1e-9) && s <= c * n * (1.0 + 1e-9)) {
                violations += 1;
            }
            max_ratio = max_ratio.max(s / n);
        };
        for i in 0..100 {
            check(random_decreasing(&mut trial_rng(202, i), &d).unwrap().as_fn());
        }
        for (_, f) in indicator_sweep(&d, 8) {
            check(f.as_fn());
        }
        let tight = (p, q) != (2.0, 2.0) || max_ratio >= 1.2;
        ok &= violations == 0 && tight && max_ratio <= c * (1.0 + 1e-9);
        parts.push(format!(
            "({p},{q}): {violations} violations, max ratio {max_ratio:.4} of {c}"
        ));
    }
    Outcome::attainable(ok, parts.join("; "))
}

/// `‖t^{1/p−1/q} f*‖_q` summed piece by piece in closed form.
fn lpq_closed_form(p: f64, q: f64, fs: &DecreasingFn) -> f64 {
    let g = fs.as_fn();
    let pts = g.grid().points();
    let e = q / p;
    let mut s = if pts[0] > 0.0 {
        g.left_value().powf(q) * pts[0].powf(e) / e
    } else {
        0.0
    };
    for (k, &c) in g.values().iter().enumerate() {
        s += c.powf(q) * (pts[k + 1].powf(e) - pts[k].powf(e)) / e;
    }
    s.powf(1.0 / q)
}

/// `sup_t φ(t)‖f*‖_{p,(0,t)}` over the ends of the pieces of `f*`.
/// Exact for `φ = t^{−γ}` with `0 < γ ≤ 1/p`.
fn marcinkiewicz_at_ends(p: f64, gamma: f64, fs: &DecreasingFn) -> f64 {
    let g = fs.as_fn();
    g.grid()
        .points()
        .iter()
        .filter(|&&b| b > 0.0)
        .map(|&b| b.powf(-gamma) * g.p_norm(p, b).unwrap())
        .fold(0.0, f64::max)
}

fn identity_table() -> Outcome {
    let mut e_lp: f64 = 0.0;
    let mut e_m: f64 = 0.0;
    let mut e_lpq: f64 = 0.0;
    let mut e_printed: f64 = 0.0;
    let mut undefined = 0usize;
    for i in 0..100 {
        let mut rng = trial_rng(303, i);
        let n = rng.random_range(1..=30usize);
        let f = random_piecewise(&mut rng, n).unwrap();
        let fs = decreasing_rearrangement(&f).unwrap();
        if fs.is_zero() {
            continue;
        }
        for p in [0.5, 2.0, 3.0] {
            let g = norm(
                &NormSpec::GenClassicalLorentz {
                    p,
                    psi: one(),
                    phi: one(),
                },
                &f,
            )
            .unwrap();
            e_lp = e_lp.max(rel(g, f.p_norm(p, INF).unwrap()));
        }
        for (p, gamma) in [(1.0, 1.0), (2.0, 0.25), (3.0, 0.1)] {
            let phi = pw(-gamma);
            let want = marcinkiewicz_at_ends(p, gamma, &fs);
            let g = norm(
                &NormSpec::GenClassicalLorentz {
                    p,
                    psi: one(),
                    phi: phi.clone(),
                },
                &f,
            )
            .unwrap();
            let m = norm(&NormSpec::Marcinkiewicz { p, phi }, &f).unwrap();
            e_m = e_m.max(rel(g, want)).max(rel(m, want));
        }
        for (p, q) in [(2.0, 1.0), (3.0, 2.0), (1.5, 3.0)] {
            let psi = pw(1.0 / p - 1.0 / q);
            let want = lpq_closed_form(p, q, &fs);
            let lam = norm(&NormSpec::ClassicalLorentz { p: q, psi: psi.clone() }, &f).unwrap();
            let lpq = norm(&NormSpec::Lpq { p, q }, &f).unwrap();
            e_lpq = e_lpq.max(rel(lam, want)).max(rel(lpq, want));
            match norm(&NormSpec::ClassicalLorentz { p, psi }, &f) {
                Ok(printed) => e_printed = e_printed.max(rel(printed, want)),
                Err(_) => undefined += 1,
            }
        }
    }
    Outcome::attainable(
        e_lp <= 1e-12 && e_m <= 1e-12 && e_lpq <= 1e-12,
        format!(
            "L_p {e_lp:.1e}, M_(p;phi) {e_m:.1e}, L_(p,q) as Lambda_(q,t^(1/p-1/q)) {e_lpq:.1e}; \
             with outer index p instead of q the error is {e_printed:.2} and {undefined} norms are undefined"
        ),
    )
}

fn sigma_lemma() -> Outcome {
    let d = Domain::default();
    let b1 = bump(&[0.01, 0.1, 1.0, 10.0], &[1.0, 5.0, 2.0], 1.0);
    let b2 = bump(&[1e-3, 1e-2, 1.0], &[0.5, 3.0], 0.5);
    let pairs: Vec<(&str, Weight, Weight)> = vec![
        ("1,1", one(), one()),
        ("1,t^.5", one(), pw(0.5)),
        ("1,t", one(), pw(1.0)),
        ("t^-.5,1", pw(-0.5), one()),
        ("t^-.5,t^.25", pw(-0.5), pw(0.25)),
        ("t^-.5,t^.5", pw(-0.5), pw(0.5)),
        ("t,1", pw(1.0), one()),
        ("t,t", pw(1.0), pw(1.0)),
        ("t,t^2", pw(1.0), pw(2.0)),
        ("t^2,t^1.5", pw(2.0), pw(1.5)),
        ("log,t^.5", Weight::power_log(0.0, 1.0), pw(0.5)),
        ("1,t^.5/log", one(), Weight::power_log(0.5, -1.0)),
        (
            "t^-.5 log,t^.25 log",
            Weight::power_log(-0.5, 1.0),
            Weight::power_log(0.25, 1.0),
        ),
        ("t/log,t", Weight::power_log(1.0, -1.0), pw(1.0)),
        ("t^.5,1/log^2", pw(0.5), Weight::power_log(0.0, -2.0)),
        ("bump1,1", b1.clone(), one()),
        ("1,bump1", one(), b1.clone()),
        ("bump1,bump2", b1.clone(), b2.clone()),
        ("t^-.5,bump2", pw(-0.5), b2.clone()),
        ("bump2,t^.5", b2, pw(0.5)),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, u, v) in &pairs {
        let s = sigma(u, v, &d).unwrap();
        let e = sigma_equivalent(u, v, &d).unwrap();
        let (mut lo, mut hi) = (INF, 0.0_f64);
        for &t in d.points().iter().step_by(4) {
            let r = s.eval(t).unwrap() / e.eval(t).unwrap();
            lo = lo.min(r);
            hi = hi.max(if r.is_finite() { r } else { INF });
        }
        ok &= lo >= 0.45 && hi <= 2.05;
        parts.push(format!("{name} [{lo:.3},{hi:.3}]"));
    }
    Outcome::attainable(ok, format!("sigma/equiv per pair: {}", parts.join(" ")))
}

fn fundamental_forms() -> Outcome {
    let d = Domain::default();
    let mut measures = Vec::new();
    for i in 0..5u64 {
        let mut rng = trial_rng(505, i);
        let k = rng.random_range(1..=6usize);
        let mut atoms: Vec<Atom> = (0..k)
            .map(|_| Atom {
                t: 10f64.powf(rng.random_range(-3.0..3.0)),
                m: rng.random_range(0.1..2.0),
            })
            .collect();
        if i == 0 {
            atoms.push(Atom { t: 0.0, m: 0.7 });
        }
        atoms.sort_by(|a, b| a.t.total_cmp(&b.t));
        let tail = (i == 3).then_some(PowerTail { alpha: -2.0, coef: 1.0 });
        measures.push(DiscreteMeasure::new(atoms, tail).unwrap());
    }
    let sigmas: [Named; 4] = [
        ("t", |t| t),
        ("t^.5", |t| t.sqrt()),
        ("t^2", |t| t * t),
        ("t/(1+t)", |t| t / (1.0 + t)),
    ];
    let (mut lo, mut hi) = (INF, 0.0_f64);
    let mut pairs = 0;
    for nu in &measures {
        for (_, s) in &sigmas {
            pairs += 1;
            for &t in d.points().iter().step_by(4) {
                let h = fundamental_function(nu, s, t).unwrap();
                let (a, _) = fundamental_equiv_forms(nu, s, t).unwrap();
                let r = h / a;
                lo = lo.min(r);
                hi = hi.max(r);
            }
        }
    }
    Outcome::attainable(
        lo >= 0.45 && hi <= 2.05,
        format!("{pairs} pairs, h/form A in [{lo:.4}, {hi:.4}]"),
    )
}

#[derive(Debug, PartialEq)]
enum FitOutcome {
    Fitted,
    Failed,
    NotQuasiconcave,
}

fn representation_fit() -> Outcome {
    let d = Domain::default();
    let cfg = FitConfig::default();
    let hs: [Named; 4] = [
        ("1", |_| 1.0),
        ("t^.5", |t| t.sqrt()),
        ("t/(1+t)", |t| t / (1.0 + t)),
        ("min(1,t)", |t| t.min(1.0)),
    ];
    let sigmas: [Named; 2] = [("t", |t| t), ("t^.5", |t| t.sqrt())];
    // outcomes established by an independent LP bound, see the decisions ledger
    let expected = [
        FitOutcome::Fitted,
        FitOutcome::Fitted,
        FitOutcome::Fitted,
        FitOutcome::Failed,
        FitOutcome::Fitted,
        FitOutcome::Failed,
        FitOutcome::NotQuasiconcave,
        FitOutcome::NotQuasiconcave,
    ];
    let mut got = Vec::new();
    let mut idempotent = true;
    let mut parts = Vec::new();
    for (sn, s) in sigmas {
        for (hn, h) in hs {
            match fit_representation_measure(h, s, &d, true, &cfg) {
                Ok(fit) => {
                    let nu = fit.measure.clone();
                    let hnu = |t: f64| fundamental_function(&nu, &s, t).unwrap();
                    let refit = fit_representation_measure(hnu, s, &d, true, &cfg);
                    let r = refit.as_ref().map(|r| r.achieved).unwrap_or(INF);
                    idempotent &= r <= cfg.bound;
                    parts.push(format!("({hn},{sn}) {:.1e} refit {r:.1e}", fit.achieved));
                    got.push(FitOutcome::Fitted);
                }
                Err(Error::FitFailed { achieved, .. }) => {
                    parts.push(format!("({hn},{sn}) best {achieved:.3} > ln 1.1"));
                    got.push(FitOutcome::Failed);
                }
                Err(Error::NotQuasiconcave { .. }) => {
                    parts.push(format!("({hn},{sn}) not quasiconcave"));
                    got.push(FitOutcome::NotQuasiconcave);
                }
                Err(e) => panic!("({hn},{sn}): {e}"),
            }
        }
    }
    let all = got.iter().all(|g| *g == FitOutcome::Fitted);
    let as_analysed = got.iter().zip(&expected).all(|(a, b)| a == b) && idempotent;
    Outcome {
        pass: all && idempotent,
        regressed: !as_analysed,
        detail: format!(
            "{}; unattainable for the pairs above that do not fit (no measure reaches ln 1.1 there)",
            parts.join(", ")
        ),
    }
}

fn hardy_problems(d: &Domain) -> Vec<(&'static str, HardyProblem)> {
    let cfg = FitConfig::default();
    let chi1 = steps(&[0.0, 1.0], &[1.0]);
    let s2 = steps(&[0.0, 0.1, 3.0], &[2.0, 1.0]);
    let s3 = steps(&[0.0, 0.5, 2.0, 10.0], &[3.0, 1.0, 0.25]);
    let specs: Vec<(&str, f64, Weight, Weight, Weight)> = vec![
        ("q=1", 1.0, one(), pw(0.5), chi1.clone()),
        ("q=2", 2.0, one(), pw(0.5), chi1.clone()),
        ("q=1.5", 1.5, pw(-0.5), pw(0.25), s2.clone()),
        ("q=.5", 0.5, one(), pw(0.5), chi1),
        ("q=.5 steps", 0.5, one(), pw(0.3), s2),
        ("q=2/3", 2.0 / 3.0, pw(-0.5), pw(0.25), s3),
    ];
    specs
        .into_iter()
        .map(|(name, q, u, v, w)| (name, HardyProblem::fitted(q, u, v, w, d.clone(), &cfg).unwrap().0))
        .collect()
}

fn reverse_hardy() -> Outcome {
    let d = Domain::default();
    let sampler = MixedSampler::new(7, d.clone());
    let mut ok = true;
    let mut parts = Vec::new();
    let mut homog: f64 = 0.0;
    for (name, prob) in hardy_problems(&d) {
        let rep = verify_reverse_hardy(&prob, &sampler, 200).unwrap();
        ok &= rep.ratio >= 1.0 / KAPPA_H && rep.ratio <= KAPPA_H;
        let lam: f64 = 16.0;
        let scaled = verify_reverse_hardy(&prob.scale_w(lam), &sampler, 200).unwrap();
        let k = lam.powf(1.0 / prob.q);
        homog = homog
            .max(rel(scaled.constant, k * rep.constant))
            .max(rel(scaled.c_emp, k * rep.c_emp));
        parts.push(format!("{name} {:?} {:.3}", rep.branch, rep.ratio));
    }
    ok &= homog <= 1e-12;
    Outcome::attainable(
        ok,
        format!(
            "kappa_H = {KAPPA_H}, C_emp/A: {}; scaling w by 16 err {homog:.1e}",
            parts.join(", ")
        ),
    )
}

fn specialization() -> Outcome {
    let d = Domain::default();
    let ts: Vec<f64> = d
        .points()
        .iter()
        .copied()
        .filter(|t| (1e-3..=1e3).contains(t))
        .step_by(4)
        .collect();
    let mut zeta_le = true;
    let mut sharp_ok = true;
    let mut bound_ok = true;
    let mut printed_err: f64 = 0.0;
    let mut corrected_err: f64 = 0.0;
    let (mut lo, mut hi) = (INF, 0.0_f64);
    for p in [1.5, 2.0, 3.0] {
        let pp = p / (p - 1.0);
        for alpha in [0.0, -0.2, 0.3] {
            for (a, c) in [(1.0, 1.0), (0.5, 3.0)] {
                let f = DecreasingFn::indicator(a, c).unwrap();
                let sp = Specialization::new(f.clone(), pw(alpha), p, d.clone()).unwrap();
                let fine = Specialization::new(f, pw(alpha), p, d.refined()).unwrap();
                let z = sp.zeta(&ts).unwrap();
                let z1 = sp.zeta1(&ts).unwrap();
                for (k, &t) in ts.iter().enumerate() {
                    let (zv, z1v) = (z[k].value, z1[k].value);
                    zeta_le &= z1v <= zv * (1.0 + 1e-9);
                    sharp_ok &= z1v <= p.powf(1.0 / pp) * zv * (1.0 + 1e-9);
                    bound_ok &= sp.zeta1_lower_bound(t) <= z1v * (1.0 + 1e-6);
                    lo = lo.min(z1v / zv);
                    hi = hi.max(z1v / zv);
                    for s in [&sp, &fine] {
                        let ibp = s.ibp(t).unwrap();
                        let scale = ibp.boundary.max(ibp.i2 / (p - 1.0));
                        if scale > 0.0 {
                            let (l, r) = ibp.balanced(p);
                            corrected_err = corrected_err.max((l - r).abs() / scale);
                            printed_err = printed_err.max((ibp.i1 - r).abs() / scale);
                        }
                    }
                }
            }
        }
    }
    let as_analysed = !zeta_le && sharp_ok && bound_ok && corrected_err <= 0.02 && printed_err > 0.02;
    Outcome {
        pass: zeta_le && printed_err <= 0.02 && bound_ok,
        regressed: !as_analysed,
        detail: format!(
            "zeta1 <= zeta fails (zeta1/zeta in [{lo:.3}, {hi:.3}]; the sharp bound p^(1/p') holds: {sharp_ok}); \
             parts by parts without the factor p' off by {printed_err:.2}, with it {corrected_err:.1e} on both grids; \
             (p-1)^(1/p') t f** <= zeta1: {bound_ok}"
        ),
    }
}

fn self_duality() -> Outcome {
    let d = Domain::default();
    let cfg = FitConfig::default();
    let mut ok = true;
    let mut parts = Vec::new();
    for p in [1.5, 2.0, 3.0] {
        let pp = p / (p - 1.0);
        let ga = GeneralizedAssociate::new(p, &one(), &one(), &d, &cfg).unwrap();
        let mut fs: Vec<DecreasingFn> = indicator_sweep(&d, 8).into_iter().map(|x| x.1).collect();
        fs.extend((0..50).map(|i| random_decreasing(&mut trial_rng(909, i), &d).unwrap()));
        let (mut lo, mut hi) = (INF, 0.0_f64);
        for f in &fs {
            let r = ga.eval_decreasing(f).unwrap().value / f.as_fn().p_norm(pp, INF).unwrap();
            lo = lo.min(r);
            hi = hi.max(r);
        }
        ok &= lo >= 1.0 - 1e-6 && hi <= p + 0.05;
        parts.push(format!("p={p} [{lo:.6}, {hi:.4}]"));
    }
    let a = assoc_generalized(2.0, &one(), &one(), &chi(1.0), &d, &cfg)
        .unwrap()
        .value;
    let n = chi(1.0).p_norm(2.0, INF).unwrap();
    ok &= (a - 2f64.sqrt()).abs() <= 1e-3 && n == 1.0;
    Outcome::attainable(ok, format!("{}; chi(0,1] p=2: {a:.6}, norm {n}", parts.join(", ")))
}

fn duality_families() -> Vec<(&'static str, f64, Weight, Weight)> {
    vec![
        ("(2,1,1)", 2.0, one(), one()),
        ("(2,t^-.25,1)", 2.0, pw(-0.25), one()),
        ("(2,1,t^-.25)", 2.0, one(), pw(-0.25)),
        ("(1,1,1)", 1.0, one(), one()),
        ("(.5,t^-1,1)", 0.5, pw(-1.0), one()),
        ("(3,t^.2,t^-.1)", 3.0, pw(0.2), pw(-0.1)),
    ]
}

fn oracle_vs_closed_form() -> Outcome {
    let d = Domain::default();
    let cfg = FitConfig::default();
    let sampler = MixedSampler::new(10, d.clone());
    let mut ok = true;
    let mut parts = Vec::new();
    let mut pairing_bad = 0usize;
    let mut pairs = 0usize;
    for (name, p, psi, phi) in duality_families() {
        let ga = GeneralizedAssociate::new(p, &psi, &phi, &d, &cfg).unwrap();
        let spec = NormSpec::GenClassicalLorentz { p, psi, phi };
        let rows: Vec<(f64, f64, usize, usize)> = (0..50usize)
            .into_par_iter()
            .map(|i| {
                let (_, f) = sampler.trial(i).unwrap();
                let a = ga.eval_decreasing(&f).unwrap().value;
                let ocfg = OracleConfig {
                    seed: i as u64,
                    ..OracleConfig::default()
                };
                let o = duality_oracle(&spec, f.as_fn(), &d, &ocfg).unwrap().value;
                let mut bad = 0;
                let mut n = 0;
                let mut gs: Vec<DecreasingFn> = (0..10)
                    .map(|j| random_decreasing(&mut trial_rng(1000 + i as u64, j), &d).unwrap())
                    .collect();
                gs.extend(indicator_sweep(&d, 64).into_iter().map(|x| x.1));
                for g in &gs {
                    let gn = norm_decreasing(&spec, g).unwrap();
                    if gn > 0.0 && gn.is_finite() {
                        n += 1;
                        if pairing(&f, g) > KAPPA_ASSOC * a * gn * (1.0 + 1e-9) {
                            bad += 1;
                        }
                    }
                }
                (o, a, bad, n)
            })
            .collect();
        let (mut lo, mut hi) = (INF, 0.0_f64);
        for (o, a, bad, n) in rows {
            let r = o / a;
            lo = lo.min(r);
            hi = hi.max(r);
            ok &= o <= KAPPA_ASSOC * a && a <= KAPPA_ASSOC * o;
            pairing_bad += bad;
            pairs += n;
        }
        parts.push(format!("{name} [{lo:.3}, {hi:.3}]"));
    }
    ok &= pairing_bad == 0;
    Outcome::attainable(
        ok,
        format!(
            "kappa_assoc = {KAPPA_ASSOC}, oracle/assoc: {}; pairing violations {pairing_bad}/{pairs}",
            parts.join(", ")
        ),
    )
}

fn embeddings() -> Outcome {
    let d = Domain::default();
    let cfg = FitConfig::default();
    let sampler = MixedSampler::new(11, d.clone());
    let mut ok = true;
    let mut parts = Vec::new();
    // (label, p, q, psi, phi, w)
    let good: Vec<(&str, f64, f64, Weight, Weight, Weight)> = vec![
        ("L2 into L2", 2.0, 2.0, one(), one(), one()),
        ("L_(2,1) into L_(2,2)", 1.0, 2.0, pw(0.5 - 1.0), one(), pw(0.0)),
        (
            "L_(3,2) into L_(3,4)",
            2.0,
            4.0,
            pw(1.0 / 3.0 - 0.5),
            one(),
            pw(1.0 / 3.0 - 0.25),
        ),
    ];
    for (name, p, q, psi, phi, w) in good {
        let c = embedding_criterion(p, q, &psi, &phi, &w, &d, &cfg).unwrap();
        let e = empirical_embedding_check(p, q, &psi, &phi, &w, &sampler, 100).unwrap();
        ok &= c.holds && e.equiv.upper.is_finite() && e.sweep_growth < 10.0;
        parts.push(format!(
            "{name}: criterion {:.4}, sup ratio {:.4}, sweep growth {:.3}",
            c.value, e.equiv.upper, e.sweep_growth
        ));
    }
    let (p, q, w) = (1.0, 1.0, pw(0.5));
    let c = embedding_criterion(p, q, &one(), &one(), &w, &d, &cfg).unwrap();
    let e = empirical_embedding_check(p, q, &one(), &one(), &w, &sampler, 100).unwrap();
    ok &= c.value == INF && e.sweep_growth >= 10.0;
    parts.push(format!(
        "L1 into Lambda_(1,t^.5): criterion {}, sweep growth {:.3e}",
        c.value, e.sweep_growth
    ));
    Outcome::attainable(ok, parts.join("; "))
}

fn run_cli(args: &[&str]) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_lorentz-lab"))
        .args(args)
        .output()
        .unwrap();
    (out.status.code().unwrap_or(-1), out.stdout)
}

fn cli_determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("hardy.json");
    let job = serde_json::json!({
        "schema_version": 1,
        "seed": 7,
        "hardy": {
            "q": 1.5,
            "u": pw(-0.5),
            "v": pw(0.25),
            "w": steps(&[0.0, 0.1, 3.0], &[2.0, 1.0]),
        }
    });
    std::fs::write(&cfg, serde_json::to_string(&job).unwrap()).unwrap();
    let cfg = cfg.to_str().unwrap();
    let jobs: [Vec<&str>; 2] = [
        vec!["verify-hardy", "--config", cfg, "--trials", "200"],
        vec![
            "verify-duality",
            "--p",
            "2",
            "--psi",
            "power:-0.25",
            "--seed",
            "10",
            "--trials",
            "8",
            "--steps",
            "50",
        ],
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for args in &jobs {
        let (c1, a) = run_cli(args);
        let (c2, b) = run_cli(args);
        let same = c1 == 0 && c2 == 0 && a == b && !a.is_empty();
        ok &= same;
        parts.push(format!("{}: {} bytes, identical {same}", args[0], a.len()));
    }
    Outcome::attainable(ok, parts.join("; "))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("equimeasurability", equimeasurability),
        ("L_(p,q) sandwich", sandwich),
        ("identity table", identity_table),
        ("sigma two-sided equivalent", sigma_lemma),
        ("fundamental function form A", fundamental_forms),
        ("representation-measure fit", representation_fit),
        ("reverse Hardy verifier", reverse_hardy),
        ("zeta vs zeta1, parts identity", specialization),
        ("L_p self-duality window", self_duality),
        ("oracle vs closed form", oracle_vs_closed_form),
        ("embeddings", embeddings),
        ("CLI determinism", cli_determinism),
    ];
    let mut regressions = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Outcome::attainable(false, format!("panicked: {msg}"))
        });
        println!(
            "criterion {:>2}: {} {name} ({:.1}s): {}",
            i + 1,
            if o.pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64(),
            o.detail
        );
        if o.regressed {
            regressions.push(i + 1);
        }
    }
    if !regressions.is_empty() {
        println!("unexpected outcomes for criteria {regressions:?}");
        std::process::exit(1);
    }
}
