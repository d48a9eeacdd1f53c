//! The `lorentz-lab` command line.
//!
//! Exit status is 0 on success, 1 when a computation fails and 2 when the
//! command line or the configuration file is invalid. Output is written only
//! after the computation has finished.

pub mod literal;
pub mod output;

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::associate::{
    assoc_classical, duality_oracle, embedding_criterion, empirical_embedding_check, norm, Denominator,
    GeneralizedAssociate, NormSpec, OracleConfig,
};
use crate::error::Error;
use crate::funcspace::{Domain, PiecewiseFn, Weight};
use crate::hardy::{verify_reverse_hardy, Branch, HardyProblem};
use crate::measures::{fit_representation_measure, DiscreteMeasure, FitConfig};
use crate::rearrangement::decreasing_rearrangement;
use crate::report::EquivReport;
use crate::sampling::{random_decreasing, trial_rng, MixedSampler};
use crate::weights::{admissible_check, b1_check, bp_check, delta2_check, quasinorm_sufficient_check};
pub use output::{Artifact, Format};

pub const SCHEMA_VERSION: u32 = 1;
pub const THREADS_ENV: &str = "LORENTZ_LAB_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "lorentz-lab",
    version,
    about = "Rearrangement-invariant norms, associate norms and reverse Hardy constants"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON job configuration (schema_version 1); flags override it
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// write the result here instead of stdout
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub t_min: Option<f64>,
    #[arg(long, global = true)]
    pub t_max: Option<f64>,
    #[arg(long, global = true)]
    pub per_decade: Option<u32>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum DenomArg {
    PsiPowP,
    Psi,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Condition {
    Delta2,
    Bp,
    B1,
    Quasinorm,
    Admissible,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decreasing rearrangement of a function
    Rearrange {
        #[arg(long)]
        f: String,
    },
    /// A norm of a function
    Norm {
        /// lpq:p,q | lpq_star:p,q | classical:p | gen_lorentz:p,q | gen_classical:p | marcinkiewicz:p | spec:file.json
        #[arg(long)]
        spec: String,
        #[arg(long)]
        f: String,
        #[arg(long, default_value = "power:0")]
        psi: String,
        #[arg(long, default_value = "power:0")]
        phi: String,
    },
    /// Associate norm of GΛ_{p,ψ;φ} (or of Λ_{p,ψ} with --classical)
    Assoc {
        #[arg(long)]
        p: f64,
        #[arg(long, default_value = "power:0")]
        psi: String,
        #[arg(long, default_value = "power:0")]
        phi: String,
        #[arg(long)]
        f: String,
        #[arg(long)]
        classical: bool,
        #[arg(long, value_enum, default_value = "psi-pow-p")]
        denominator: DenomArg,
    },
    /// A(1) or A(2) of the reverse Hardy problem in the configuration
    HardyConstants,
    /// Empirical optimal constant of the reverse Hardy problem in the configuration
    VerifyHardy {
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Representation measure of h with respect to θ
    FitMeasure {
        /// weight literal read as the function h
        #[arg(long)]
        h: String,
        #[arg(long)]
        theta: String,
        #[arg(long)]
        no_origin: bool,
    },
    /// Embedding GΛ_{p,ψ;φ} ↪ Λ_{q,w}: criterion and sampled norm ratios
    Embed {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        q: f64,
        #[arg(long, default_value = "power:0")]
        psi: String,
        #[arg(long, default_value = "power:0")]
        phi: String,
        #[arg(long)]
        w: String,
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Duality oracle against the closed-form associate norm
    VerifyDuality {
        #[arg(long)]
        p: f64,
        #[arg(long, default_value = "power:0")]
        psi: String,
        #[arg(long, default_value = "power:0")]
        phi: String,
        /// a single function; without it a seeded corpus is used
        #[arg(long)]
        f: Option<String>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        steps: Option<usize>,
    },
    /// A weight condition (Δ₂, B_p, B_1, quasinorm sufficiency, admissibility)
    CheckWeight {
        #[arg(long)]
        w: String,
        #[arg(long, value_enum)]
        condition: Condition,
        #[arg(long)]
        p: Option<f64>,
    },
}

/// File-based job settings. Unknown fields are rejected.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    pub schema_version: u32,
    #[serde(default)]
    pub domain: Option<Domain>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub format: Option<Format>,
    #[serde(default)]
    pub trials: Option<usize>,
    #[serde(default)]
    pub fit: Option<FitConfig>,
    #[serde(default)]
    pub oracle: Option<OracleConfig>,
    #[serde(default)]
    pub hardy: Option<HardyJob>,
}

/// A reverse Hardy problem; `nu` is fitted when absent.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HardyJob {
    pub q: f64,
    pub u: Weight,
    pub v: Weight,
    pub w: Weight,
    #[serde(default)]
    pub nu: Option<DiscreteMeasure>,
}

#[derive(Debug)]
pub enum Failure {
    Config(String),
    Compute(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Compute(e)
    }
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Config(_) => 2,
            Failure::Compute(_) => 1,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Config(m) => write!(f, "configuration error: {m}"),
            Failure::Compute(e) => write!(f, "error: {e}"),
        }
    }
}

fn cfg_err<T>(r: std::result::Result<T, String>) -> std::result::Result<T, Failure> {
    r.map_err(Failure::Config)
}

/// Settings after merging the configuration file with the flags.
struct Job {
    cfg: JobConfig,
    domain: Domain,
    seed: u64,
    format: Format,
}

impl Job {
    fn resolve(cli: &Cli) -> std::result::Result<Job, Failure> {
        let cfg: JobConfig = match &cli.config {
            Some(path) => cfg_err(literal::read_json(path))?,
            None => JobConfig {
                schema_version: SCHEMA_VERSION,
                ..Default::default()
            },
        };
        if cfg.schema_version != SCHEMA_VERSION {
            return Err(Failure::Config(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                cfg.schema_version
            )));
        }
        let base = cfg.domain.clone().unwrap_or_default();
        let domain = if cli.t_min.is_some() || cli.t_max.is_some() || cli.per_decade.is_some() {
            Domain::new(
                cli.t_min.unwrap_or(base.t_min),
                cli.t_max.unwrap_or(base.t_max),
                cli.per_decade.unwrap_or(base.points_per_decade),
            )
            .map_err(|e| Failure::Config(e.to_string()))?
            .with_eps(base.eps_admissible)
        } else {
            base
        };
        Ok(Job {
            seed: cli.seed.or(cfg.seed).unwrap_or(0),
            format: cli.format.or(cfg.format).unwrap_or_default(),
            domain,
            cfg,
        })
    }

    fn fit(&self) -> FitConfig {
        self.cfg.fit.clone().unwrap_or_default()
    }

    fn trials(&self, flag: Option<usize>, default: usize) -> usize {
        flag.or(self.cfg.trials).unwrap_or(default)
    }

    fn hardy(&self) -> std::result::Result<(HardyProblem, Option<f64>), Failure> {
        let h = self
            .cfg
            .hardy
            .clone()
            .ok_or_else(|| Failure::Config("the configuration needs a \"hardy\" section".into()))?;
        match h.nu {
            Some(nu) => Ok((HardyProblem::new(h.q, h.u, h.v, h.w, nu, self.domain.clone())?, None)),
            None => {
                let (p, fit) = HardyProblem::fitted(h.q, h.u, h.v, h.w, self.domain.clone(), &self.fit())?;
                Ok((p, Some(fit.achieved)))
            }
        }
    }
}

#[derive(Serialize)]
struct NormOut {
    spec: NormSpec,
    #[serde(with = "crate::extreal")]
    value: f64,
}

#[derive(Serialize)]
struct HardyConstantsOut {
    branch: Branch,
    #[serde(with = "crate::extreal")]
    constant: f64,
    boundary: bool,
    fit_achieved: Option<f64>,
    nu: DiscreteMeasure,
}

#[derive(Serialize)]
struct DualityOut {
    #[serde(with = "crate::extreal")]
    assoc: f64,
    oracle: f64,
    witness: String,
    #[serde(with = "crate::extreal")]
    ratio: f64,
    flags: Vec<String>,
}

#[derive(Serialize)]
struct DualityCorpusOut {
    /// oracle / closed form over the corpus
    equiv: EquivReport,
    flags: Vec<String>,
}

#[derive(Serialize)]
struct EmbedOut {
    criterion: crate::associate::EmbeddingCriterion,
    check: crate::associate::EmbeddingCheck,
}

fn gen_spec(p: f64, psi: &Weight, phi: &Weight) -> NormSpec {
    NormSpec::GenClassicalLorentz {
        p,
        psi: psi.clone(),
        phi: phi.clone(),
    }
}

/// Runs one sub-command and returns its artifact.
pub fn run(cli: &Cli) -> std::result::Result<(Artifact, Format), Failure> {
    let job = Job::resolve(cli)?;
    let d = &job.domain;
    let art = match &cli.command {
        Command::Rearrange { f } => {
            let f = cfg_err(literal::function(f, d))?;
            let fs = decreasing_rearrangement(&f)?;
            let g = fs.as_fn();
            let pts = g.grid().points();
            let series: Vec<(f64, f64)> = (0..g.grid().n_cells()).map(|k| (pts[k + 1], g.values()[k])).collect();
            Artifact::new("rearrange", &fs).with_series("f_star", series)
        }
        Command::Norm { spec, f, psi, phi } => {
            let (psi, phi) = (cfg_err(literal::weight(psi))?, cfg_err(literal::weight(phi))?);
            let spec = cfg_err(literal::spec(spec, &psi, &phi))?;
            let f = cfg_err(literal::function(f, d))?;
            let value = norm(&spec, &f)?;
            Artifact::new("norm", &NormOut { spec, value })
        }
        Command::Assoc {
            p,
            psi,
            phi,
            f,
            classical,
            denominator,
        } => {
            let (psi, phi) = (cfg_err(literal::weight(psi))?, cfg_err(literal::weight(phi))?);
            let f = cfg_err(literal::function(f, d))?;
            if *classical {
                Artifact::new("assoc", &assoc_classical(*p, &psi, &f, d)?)
            } else {
                let denom = match denominator {
                    DenomArg::PsiPowP => Denominator::PsiPowP,
                    DenomArg::Psi => Denominator::Psi,
                };
                let ga = GeneralizedAssociate::with_denominator(*p, &psi, &phi, d, &job.fit(), denom)?;
                Artifact::new("assoc", &ga.eval(&f)?)
            }
        }
        Command::HardyConstants => {
            let (pr, fit_achieved) = job.hardy()?;
            let c = pr.constant()?;
            let out = HardyConstantsOut {
                branch: pr.branch(),
                constant: c.value,
                boundary: c.boundary,
                fit_achieved,
                nu: pr.nu.clone(),
            };
            let mut art = Artifact::new("hardy-constants", &out);
            if pr.branch() == Branch::A2 {
                let ts = d.points();
                let z = pr.zeta(ts)?;
                art = art.with_series("zeta", ts.iter().zip(z).map(|(t, z)| (*t, z.value)));
            }
            art
        }
        Command::VerifyHardy { trials } => {
            let (pr, _) = job.hardy()?;
            let sampler = MixedSampler::new(job.seed, d.clone());
            let rep = verify_reverse_hardy(&pr, &sampler, job.trials(*trials, 200))?;
            Artifact::new("verify-hardy", &rep)
        }
        Command::FitMeasure { h, theta, no_origin } => {
            let (h, th) = (cfg_err(literal::weight(h))?, cfg_err(literal::weight(theta))?);
            let fit = fit_representation_measure(|t| h.eval(t), |t| th.eval(t), d, !no_origin, &job.fit())?;
            let atoms: Vec<(f64, f64)> = fit.measure.atoms().iter().map(|a| (a.t, a.m)).collect();
            Artifact::new("fit-measure", &fit).with_series("atoms", atoms)
        }
        Command::Embed {
            p,
            q,
            psi,
            phi,
            w,
            trials,
        } => {
            let (psi, phi, w) = (
                cfg_err(literal::weight(psi))?,
                cfg_err(literal::weight(phi))?,
                cfg_err(literal::weight(w))?,
            );
            let criterion = embedding_criterion(*p, *q, &psi, &phi, &w, d, &job.fit())?;
            let sampler = MixedSampler::new(job.seed, d.clone());
            let check = empirical_embedding_check(*p, *q, &psi, &phi, &w, &sampler, job.trials(*trials, 100))?;
            let sweep = check.sweep.clone();
            Artifact::new("embed", &EmbedOut { criterion, check }).with_series("ratio", sweep)
        }
        Command::VerifyDuality {
            p,
            psi,
            phi,
            f,
            trials,
            steps,
        } => {
            let (psi, phi) = (cfg_err(literal::weight(psi))?, cfg_err(literal::weight(phi))?);
            let ga = GeneralizedAssociate::new(*p, &psi, &phi, d, &job.fit())?;
            let spec = gen_spec(*p, &psi, &phi);
            let mut ocfg = job.cfg.oracle.clone().unwrap_or_default();
            ocfg.seed = job.seed;
            if let Some(s) = steps {
                ocfg.local_search_steps = *s;
            }
            match f {
                Some(lit) => {
                    let f = cfg_err(literal::function(lit, d))?;
                    let a = ga.eval(&f)?;
                    let o = duality_oracle(&spec, &f, d, &ocfg)?;
                    Artifact::new(
                        "verify-duality",
                        &DualityOut {
                            assoc: a.value,
                            oracle: o.value,
                            witness: o.witness,
                            ratio: o.value / a.value,
                            flags: a.boundary_flags,
                        },
                    )
                }
                None => {
                    let n = job.trials(*trials, 50);
                    let rows: Vec<std::result::Result<(f64, f64, String), Error>> = (0..n)
                        .into_par_iter()
                        .map(|i| {
                            let fs = random_decreasing(&mut trial_rng(job.seed, i as u64), d)?;
                            let a = ga.eval_decreasing(&fs)?.value;
                            let o = duality_oracle(
                                &spec,
                                fs.as_fn(),
                                d,
                                &OracleConfig {
                                    seed: job.seed.wrapping_add(i as u64),
                                    ..ocfg.clone()
                                },
                            )?;
                            Ok((o.value, a, format!("random #{i}")))
                        })
                        .collect();
                    let rows = rows.into_iter().collect::<std::result::Result<Vec<_>, _>>()?;
                    let flags = ga.eval(&PiecewiseFn::indicator(0.0, 1.0, 1.0)?)?.boundary_flags;
                    Artifact::new(
                        "verify-duality",
                        &DualityCorpusOut {
                            equiv: EquivReport::from_pairs(rows),
                            flags,
                        },
                    )
                }
            }
        }
        Command::CheckWeight { w, condition, p } => {
            let w = cfg_err(literal::weight(w))?;
            let need_p = || p.ok_or_else(|| Failure::Config("this condition needs --p".into()));
            let rep = match condition {
                Condition::Delta2 => delta2_check(&w, d)?,
                Condition::Bp => bp_check(&w, need_p()?, d)?,
                Condition::B1 => b1_check(&w, d)?,
                Condition::Quasinorm => quasinorm_sufficient_check(&w, need_p()?, d)?,
                Condition::Admissible => admissible_check(|t| w.eval(t), d),
            };
            Artifact::new("check-weight", &rep)
        }
    };
    Ok((art, job.format))
}

/// Parses the arguments, runs, writes the output and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    if let Ok(s) = std::env::var(THREADS_ENV) {
        match s.parse::<usize>() {
            Ok(n) if n > 0 => {
                // the global pool can only be set once per process
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => {
                eprintln!("configuration error: {THREADS_ENV} must be a positive integer, got {s:?}");
                return 2;
            }
        }
    }
    match run(&cli) {
        Ok((art, format)) => {
            let text = art.render(format);
            match &cli.out {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, text) {
                        eprintln!("error: {}: {e}", path.display());
                        return 1;
                    }
                }
                None => print!("{text}"),
            }
            0
        }
        Err(f) => {
            eprintln!("{f}");
            f.exit_code()
        }
    }
}
