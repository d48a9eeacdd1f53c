//! Command-line literals for weights, functions and norm specs.

use std::path::Path;

use crate::associate::NormSpec;
use crate::funcspace::{Domain, LeftExtension, PiecewiseFn, RightExtension, Weight};

fn number(s: &str) -> Result<f64, String> {
    match s.trim() {
        "inf" | "+inf" => Ok(f64::INFINITY),
        t => t.parse::<f64>().map_err(|_| format!("not a number: {t:?}")),
    }
}

fn numbers(s: &str, n: usize, what: &str) -> Result<Vec<f64>, String> {
    let v: Vec<f64> = s.split(',').map(number).collect::<Result<_, _>>()?;
    if v.len() != n {
        return Err(format!("{what} expects {n} comma-separated numbers, got {s:?}"));
    }
    Ok(v)
}

fn split(lit: &str) -> Result<(&str, &str), String> {
    lit.split_once(':')
        .ok_or_else(|| format!("literal {lit:?} must look like kind:args"))
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
}

/// `power:α`, `powerlog:α,β`, `indicator:a,b` or `steps:file.json`.
pub fn weight(lit: &str) -> Result<Weight, String> {
    let (kind, args) = split(lit)?;
    let w = match kind {
        "power" => Weight::power(numbers(args, 1, "power")?[0]),
        "powerlog" => {
            let v = numbers(args, 2, "powerlog")?;
            Weight::power_log(v[0], v[1])
        }
        "indicator" => {
            let v = numbers(args, 2, "indicator")?;
            Weight::tabulated(PiecewiseFn::indicator(v[0], v[1], 1.0).map_err(|e| e.to_string())?)
        }
        "steps" => Weight::tabulated(read_json(Path::new(args))?),
        other => return Err(format!("unknown weight kind {other:?}")),
    };
    w.validate().map_err(|e| e.to_string())?;
    Ok(w)
}

/// `indicator:a,b` is `χ_(a,b]`; `power:α` is `t^α` on the domain grid and
/// zero outside it; `steps:file.json` reads a step function.
pub fn function(lit: &str, domain: &Domain) -> Result<PiecewiseFn, String> {
    let (kind, args) = split(lit)?;
    match kind {
        "indicator" => {
            let v = numbers(args, 2, "indicator")?;
            PiecewiseFn::indicator(v[0], v[1], 1.0).map_err(|e| e.to_string())
        }
        "power" => {
            let a = numbers(args, 1, "power")?[0];
            PiecewiseFn::sample(
                domain.grid().clone(),
                |t| t.powf(a),
                LeftExtension::Zero,
                RightExtension::Zero,
            )
            .map_err(|e| e.to_string())
        }
        "steps" => read_json(Path::new(args)),
        other => Err(format!("unknown function kind {other:?}")),
    }
}

/// `lpq:p,q`, `lpq_star:p,q`, `classical:p`, `gen_lorentz:p,q`,
/// `gen_classical:p`, `marcinkiewicz:p` or `spec:file.json`.
/// The weights `ψ` and `φ` come from separate options.
pub fn spec(lit: &str, psi: &Weight, phi: &Weight) -> Result<NormSpec, String> {
    let (kind, args) = split(lit)?;
    let s = match kind {
        "lpq" => {
            let v = numbers(args, 2, "lpq")?;
            NormSpec::Lpq { p: v[0], q: v[1] }
        }
        "lpq_star" => {
            let v = numbers(args, 2, "lpq_star")?;
            NormSpec::LpqStar { p: v[0], q: v[1] }
        }
        "classical" => NormSpec::ClassicalLorentz {
            p: numbers(args, 1, "classical")?[0],
            psi: psi.clone(),
        },
        "gen_lorentz" => {
            let v = numbers(args, 2, "gen_lorentz")?;
            NormSpec::GenLorentz {
                p: v[0],
                q: v[1],
                phi: phi.clone(),
            }
        }
        "gen_classical" => NormSpec::GenClassicalLorentz {
            p: numbers(args, 1, "gen_classical")?[0],
            psi: psi.clone(),
            phi: phi.clone(),
        },
        "marcinkiewicz" => NormSpec::Marcinkiewicz {
            p: numbers(args, 1, "marcinkiewicz")?[0],
            phi: phi.clone(),
        },
        "spec" => read_json(Path::new(args))?,
        other => return Err(format!("unknown norm family {other:?}")),
    };
    s.validate().map_err(|e| e.to_string())?;
    Ok(s)
}
