//! Command-line entry point: JSON experiment configs in, report JSON + CSV
//! tables out.
//!
//! Exit codes: `0` when every verdict passes, `2` when any verdict fails,
//! `1` on errors (malformed config, I/O, invalid spec). Every output file
//! embeds the fully resolved configuration. `--seed` deterministically
//! replaces the config seed; `--workers` (or `KDVLAB_WORKERS`) sizes the
//! worker pool.

use crate::dynamics::{evolve, evolve_skdv, EvolutionConfig};
use crate::error::Error;
use crate::experiments::report::ExperimentReport;
use crate::experiments::{decay, growth, hyper, invariance, moments, tails, weak_convergence};
use crate::measures::{sample_batch, write_batch_jsonl, MeasureSpec};
use crate::norms::{spatial_norm, NormSpec, Trajectory};
use crate::Result;
use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Debug, Parser)]
#[command(
    name = "kdvlab",
    about = "Sampling, norms, truncated KdV/mKdV flows, and Monte Carlo verdicts for Gaussian and Gibbs-type measures on the circle"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// JSON config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Override every seed in the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker pool size (default: KDVLAB_WORKERS or all cores).
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Draw measure samples and write them as JSONL.
    Sample {
        #[command(flatten)]
        common: Common,
        /// Measure kind (white, mu_beta, mu_tilde_beta, rho_beta) when no
        /// config file is given.
        #[arg(long)]
        measure: Option<String>,
        /// Frequency cutoff N.
        #[arg(long)]
        modes: Option<usize>,
        /// Number of samples.
        #[arg(long)]
        count: Option<usize>,
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long)]
        p: Option<u32>,
        #[arg(long)]
        k: Option<f64>,
    },
    /// Deterministic truncated flow; trajectory JSONL plus observables CSV.
    Evolve {
        #[command(flatten)]
        common: Common,
    },
    /// Stochastic KdV path (additive space-time white noise).
    Skdv {
        #[command(flatten)]
        common: Common,
    },
    /// Norm survey over a sample batch; flat CSV.
    Norms {
        #[command(flatten)]
        common: Common,
    },
    /// White-noise invariance under the truncated flow.
    Invariance {
        #[command(flatten)]
        common: Common,
    },
    /// Weak convergence of the interpolated Gibbs measures.
    Converge {
        #[command(flatten)]
        common: Common,
    },
    /// Dyadic-block large-deviation tails against the Gamma oracle.
    Tails {
        #[command(flatten)]
        common: Common,
    },
    /// Max-to-sum decay ratios of Gaussian blocks.
    Decay {
        #[command(flatten)]
        common: Common,
    },
    /// Wick moment scalings under mu_beta.
    Moments {
        #[command(flatten)]
        common: Common,
    },
    /// Hypercontractive moment ratios of the quartic chaos.
    Hyper {
        #[command(flatten)]
        common: Common,
    },
    /// Sup-norm growth along the flow plus the Fernique tail sub-test.
    Growth {
        #[command(flatten)]
        common: Common,
    },
}

/// Config for `sample` when provided as a file.
#[derive(Debug, Serialize, Deserialize)]
pub struct SampleJob {
    pub measure: MeasureSpec,
    pub count: usize,
}

/// Config for `evolve`/`skdv`: draw the initial datum, run the flow, dump
/// the trajectory and streamed observables.
#[derive(Debug, Serialize, Deserialize)]
pub struct EvolveJob {
    pub initial: MeasureSpec,
    pub evolution: EvolutionConfig,
    #[serde(default = "default_observed")]
    pub observable_modes: Vec<usize>,
}

fn default_observed() -> Vec<usize> {
    vec![1, 2, 3]
}

/// Config for `norms`: a batch of samples and the norm list to tabulate.
#[derive(Debug, Serialize, Deserialize)]
pub struct NormsJob {
    pub measure: MeasureSpec,
    pub count: usize,
    pub norms: Vec<NormSpec>,
}

/// Entry point used by the thin binary; returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            // clap prints its own usage text for --help/--version with code 0
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(passed) => {
            if passed {
                0
            } else {
                2
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn init_workers(common: &Common) {
    let workers = common
        .workers
        .or_else(|| {
            std::env::var("KDVLAB_WORKERS")
                .ok()
                .and_then(|v| v.parse().ok())
        })
        .unwrap_or(0);
    if workers > 0 {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build_global();
    }
}

fn load_config<C: DeserializeOwned>(common: &Common) -> Result<C> {
    let path = common.config.as_ref().ok_or_else(|| {
        Error::InvalidSpec("missing --config PATH (this subcommand needs a JSON config)".into())
    })?;
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(Error::from)
}

fn run_experiment(
    common: &Common,
    report: Result<ExperimentReport>,
) -> Result<bool> {
    let report = report?;
    report.write(&common.out)?;
    print!("{}", report.summary());
    println!("report: {}", common.out.join("report.json").display());
    Ok(report.passed)
}

fn dispatch(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Sample {
            common,
            measure,
            modes,
            count,
            beta,
            p,
            k,
        } => {
            init_workers(&common);
            let job = if common.config.is_some() {
                let mut job: SampleJob = load_config(&common)?;
                if let Some(s) = common.seed {
                    job.measure.seed = s;
                }
                job
            } else {
                let kind = measure.ok_or_else(|| {
                    Error::InvalidSpec("sample needs --config or --measure".into())
                })?;
                let cutoff = modes.ok_or_else(|| Error::InvalidSpec("missing --modes".into()))?;
                let seed = common.seed.unwrap_or(0);
                let spec = match kind.as_str() {
                    "white" => MeasureSpec::white(cutoff, seed),
                    "mu_beta" => MeasureSpec::mu_beta(
                        beta.ok_or_else(|| Error::InvalidSpec("mu_beta needs --beta".into()))?,
                        cutoff,
                        seed,
                    ),
                    "mu_tilde_beta" => MeasureSpec::mu_tilde_beta(
                        beta.ok_or_else(|| {
                            Error::InvalidSpec("mu_tilde_beta needs --beta".into())
                        })?,
                        cutoff,
                        seed,
                    ),
                    "rho_beta" => MeasureSpec::rho_beta(
                        p.unwrap_or(4),
                        beta.ok_or_else(|| Error::InvalidSpec("rho_beta needs --beta".into()))?,
                        k.unwrap_or(10.0),
                        cutoff,
                        seed,
                    ),
                    other => {
                        return Err(Error::InvalidSpec(format!("unknown measure kind `{other}`")))
                    }
                };
                SampleJob {
                    measure: spec,
                    count: count.unwrap_or(1),
                }
            };
            job.measure.validate()?;
            let samples = sample_batch(&job.measure, job.count)?;
            std::fs::create_dir_all(&common.out)?;
            let path = common.out.join("samples.jsonl");
            let mut file = std::io::BufWriter::new(std::fs::File::create(&path)?);
            write_batch_jsonl(&mut file, &job.measure, &samples)?;
            println!("wrote {} samples to {}", samples.len(), path.display());
            Ok(true)
        }
        Command::Evolve { common } | Command::Skdv { common } => {
            init_workers(&common);
            let mut job: EvolveJob = load_config(&common)?;
            if let Some(s) = common.seed {
                job.initial.seed = s;
                job.evolution.seed = s;
            }
            let stochastic = matches!(job.evolution.equation, crate::dynamics::Equation::Skdv)
                || job.evolution.noise_amplitude > 0.0;
            let mut stream = crate::rng::stream(job.initial.seed);
            let u0 = crate::measures::sample(&job.initial, &mut stream)?.field;
            let traj = if stochastic {
                evolve_skdv(&u0, &job.evolution)?
            } else {
                evolve(&u0, &job.evolution)?
            };
            write_trajectory(&common.out, &job, &traj)?;
            Ok(true)
        }
        Command::Norms { common } => {
            init_workers(&common);
            let mut job: NormsJob = load_config(&common)?;
            if let Some(s) = common.seed {
                job.measure.seed = s;
            }
            for n in &job.norms {
                n.validate()?;
            }
            let samples = sample_batch(&job.measure, job.count)?;
            std::fs::create_dir_all(&common.out)?;
            let path = common.out.join("norms.csv");
            let mut w = csv::Writer::from_path(&path)?;
            w.write_record(["sample_id", "family", "s", "b", "p", "q", "value"])?;
            for (i, s) in samples.iter().enumerate() {
                for spec in &job.norms {
                    let v = spatial_norm(&s.field, spec)?;
                    w.write_record([
                        i.to_string(),
                        format!("{:?}", spec.family).to_lowercase(),
                        spec.s.to_string(),
                        spec.b.to_string(),
                        spec.p.to_string(),
                        spec.q.to_string(),
                        format!("{v:.17e}"),
                    ])?;
                }
            }
            w.flush()?;
            std::fs::write(
                common.out.join("norms_config.json"),
                serde_json::to_string_pretty(&job)?,
            )?;
            println!("wrote {}", path.display());
            Ok(true)
        }
        Command::Invariance { common } => {
            init_workers(&common);
            let mut cfg: invariance::InvarianceConfig = load_config(&common)?;
            if let Some(s) = common.seed {
                cfg.seed = s;
            }
            run_experiment(&common, invariance::run(&cfg))
        }
        Command::Converge { common } => {
            init_workers(&common);
            let mut cfg: weak_convergence::WeakConvergenceConfig = load_config(&common)?;
            if let Some(s) = common.seed {
                cfg.seed = s;
            }
            run_experiment(&common, weak_convergence::run(&cfg))
        }
        Command::Tails { common } => {
            init_workers(&common);
            let mut cfg: tails::TailConfig = load_config(&common)?;
            if let Some(s) = common.seed {
                cfg.seed = s;
            }
            run_experiment(&common, tails::run(&cfg))
        }
        Command::Decay { common } => {
            init_workers(&common);
            let mut cfg: decay::DecayConfig = load_config(&common)?;
            if let Some(s) = common.seed {
                cfg.seed = s;
            }
            run_experiment(&common, decay::run(&cfg))
        }
        Command::Moments { common } => {
            init_workers(&common);
            let mut cfg: moments::MomentConfig = load_config(&common)?;
            if let Some(s) = common.seed {
                cfg.seed = s;
            }
            run_experiment(&common, moments::run(&cfg))
        }
        Command::Hyper { common } => {
            init_workers(&common);
            let mut cfg: hyper::HyperConfig = load_config(&common)?;
            if let Some(s) = common.seed {
                cfg.seed = s;
            }
            run_experiment(&common, hyper::run(&cfg))
        }
        Command::Growth { common } => {
            init_workers(&common);
            let mut cfg: growth::GrowthConfig = load_config(&common)?;
            if let Some(s) = common.seed {
                cfg.seed = s;
            }
            run_experiment(&common, growth::run(&cfg))
        }
    }
}

/// Trajectory persistence: a JSON header line with the resolved job, then
/// one snapshot per line; observables stream to CSV alongside.
fn write_trajectory(dir: &Path, job: &EvolveJob, traj: &Trajectory) -> Result<()> {
    use std::io::Write;
    std::fs::create_dir_all(dir)?;
    let path = dir.join("trajectory.jsonl");
    let mut out = std::io::BufWriter::new(std::fs::File::create(&path)?);
    writeln!(out, "{}", serde_json::to_string(&serde_json::json!({ "config": job, "dt": traj.dt }))?)?;
    for f in &traj.fields {
        writeln!(out, "{}", serde_json::to_string(f)?)?;
    }
    let csv_path = dir.join("observables.csv");
    let mut w = csv::Writer::from_path(&csv_path)?;
    let mut header = vec!["t".to_string(), "l2_sq".to_string(), "hamiltonian".to_string()];
    for &m in &job.observable_modes {
        header.push(format!("abs_u{m}"));
    }
    w.write_record(&header)?;
    for (i, f) in traj.fields.iter().enumerate() {
        let t = i as f64 * traj.dt;
        let h = 0.5 * f.gradient_integral() - f.integral_power(3)? / 6.0;
        let mut row = vec![
            format!("{t:.12e}"),
            format!("{:.17e}", f.l2_sq()),
            format!("{h:.17e}"),
        ];
        for &m in &job.observable_modes {
            row.push(format!("{:.17e}", f.coeff(m as i64).norm()));
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    println!("wrote {} and {}", path.display(), csv_path.display());
    Ok(())
}
