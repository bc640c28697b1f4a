//! `pwdual`: batch experiments on sampling and interpolation for band-limited
//! functions.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use pwdual::duality::{self, DiscreteModel};
use pwdual::experiments::config::{
    ClaimConfig, DensitySweepConfig, DualityConfig, LambdaKind, PoissonConfig, StabilityConfig,
};
use pwdual::experiments::{fmt_float, run, Experiment, ExperimentConfig, Manifest};
use pwdual::exponential::{self, required_resolution};
use pwdual::{Spectrum, UdSet};

#[derive(Parser)]
#[command(name = "pwdual", version, about = "Sampling/interpolation duality experiments")]
struct Cli {
    /// Worker threads (default: available parallelism).
    #[arg(long, env = "PWDUAL_THREADS", global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Riesz, frame and Bessel estimates for αZ across α.
    Density(DensityArgs),
    /// Export a Gram matrix and its bound estimates.
    Gram(GramArgs),
    /// Discrete sampling/interpolation duality over Z_N.
    Duality {
        #[command(subcommand)]
        action: DualityAction,
    },
    /// Perturbation stability of the restriction operator.
    Stability {
        #[command(subcommand)]
        action: StabilityAction,
    },
    /// Lattice rounding and density complementarity pipeline.
    Claim(ClaimArgs),
    /// Alternating integer sums of a band-limited function.
    Poisson(PoissonArgs),
    /// Run an experiment from a JSON config file.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

#[derive(Args)]
struct Common {
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Output file stem.
    #[arg(long)]
    name: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct DensityArgs {
    /// Spectrum as `a:b,c:d`.
    #[arg(long, allow_hyphen_values = true)]
    spectrum: String,
    #[arg(long, value_delimiter = ',', required = true)]
    alphas: Vec<f64>,
    /// Half-width of the window `[−T, T]`.
    #[arg(long)]
    window: f64,
    #[arg(long)]
    resolution: Option<f64>,
    /// Skip the grid frame bounds.
    #[arg(long)]
    no_frame: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct GramArgs {
    #[arg(long, allow_hyphen_values = true)]
    spectrum: String,
    /// Explicit points, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, conflicts_with = "step")]
    points: Vec<f64>,
    /// Lattice step for `step·Z ∩ [−T, T]`.
    #[arg(long, requires = "window")]
    step: Option<f64>,
    #[arg(long)]
    window: Option<f64>,
    /// Also compute grid frame bounds at this resolution (0 = minimal).
    #[arg(long)]
    frame: Option<f64>,
    #[arg(long, default_value = ".")]
    out: PathBuf,
    #[arg(long, default_value = "gram")]
    name: String,
}

#[derive(Subcommand)]
enum DualityAction {
    /// Every (Λ, S) pair for N ≤ nmax.
    Scan {
        #[arg(long)]
        nmax: usize,
        #[command(flatten)]
        common: Common,
    },
    /// A single (N, Λ, S) instance.
    Check {
        #[arg(long)]
        n: usize,
        #[arg(long, value_delimiter = ',')]
        lambda: Vec<usize>,
        #[arg(long, value_delimiter = ',')]
        s: Vec<usize>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum LambdaKindArg {
    Integer,
}

#[derive(Subcommand)]
enum StabilityAction {
    Sweep {
        #[arg(long, value_enum, default_value = "integer")]
        lambda_kind: LambdaKindArg,
        /// Half-width of `Z ∩ [−T, T]`.
        #[arg(long, default_value_t = 40.0)]
        window: f64,
        #[arg(long, allow_hyphen_values = true)]
        spectrum: String,
        #[arg(long, value_delimiter = ',', required = true)]
        deltas: Vec<f64>,
        /// Number of seeds, starting at `--seed`.
        #[arg(long)]
        seeds: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        resolution: Option<f64>,
        /// CSV path; the JSON summary and manifest are written beside it.
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct ClaimArgs {
    #[arg(long)]
    period: f64,
    #[arg(long, value_delimiter = ',', required = true)]
    offsets: Vec<f64>,
    #[arg(long, allow_hyphen_values = true)]
    spectrum: String,
    #[arg(long)]
    delta: f64,
    /// Ambient interval `a:b` (default `0:2π/δ`).
    #[arg(long, allow_hyphen_values = true)]
    ambient: Option<String>,
    /// Seeded perturbation bound applied before rounding.
    #[arg(long)]
    perturb: Option<f64>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct PoissonArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    epsilons: Vec<f64>,
    #[arg(long, value_delimiter = ',', required = true)]
    truncations: Vec<u64>,
    #[command(flatten)]
    common: Common,
}

fn config(common: &Common, experiment: Experiment) -> ExperimentConfig {
    ExperimentConfig {
        name: common.name.clone(),
        seed: common.seed,
        experiment,
    }
}

fn report(manifest: &Manifest, dir: &Path) -> bool {
    for out in &manifest.outputs {
        println!("wrote {}", dir.join(&out.path).display());
    }
    for check in &manifest.checks {
        let mark = if check.passed { "PASS" } else { "FAIL" };
        if check.detail.is_empty() {
            println!("{mark} {}", check.name);
        } else {
            println!("{mark} {}: {}", check.name, check.detail);
        }
    }
    manifest.passed
}

fn execute(cfg: ExperimentConfig, dir: &Path) -> Result<bool> {
    let manifest = run(&cfg, dir).with_context(|| format!("running {} experiment", cfg.kind()))?;
    Ok(report(&manifest, dir))
}

fn parse_pair(s: &str) -> Result<[f64; 2]> {
    let (a, b) = s.split_once(':').context("expected `a:b`")?;
    Ok([a.trim().parse()?, b.trim().parse()?])
}

fn gram(args: GramArgs) -> Result<bool> {
    let spectrum: Spectrum = args.spectrum.parse()?;
    let points = match (args.step, args.window) {
        (Some(step), Some(t)) => UdSet::lattice_window(step, 0.0, -t, t)?.generators().to_vec(),
        _ if !args.points.is_empty() => args.points,
        _ => bail!("give either --points or --step with --window"),
    };
    let g = exponential::gram_matrix(&points, &spectrum)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["row", "col", "re", "im"])?;
    for j in 0..g.dim() {
        for k in 0..g.dim() {
            let z = g.entries[(j, k)];
            w.write_record([j.to_string(), k.to_string(), fmt_float(z.re), fmt_float(z.im)])?;
        }
    }
    let csv_bytes = w.into_inner()?;
    let riesz = exponential::riesz_bound_estimates(&points, &spectrum)?;
    let bessel = exponential::bessel_bound_estimate(&points, &spectrum)?;
    let frame = match args.frame {
        Some(m) => Some(exponential::frame_bounds_grid(
            &points,
            &spectrum,
            m.max(required_resolution(&points)),
        )?),
        None => None,
    };
    let summary = serde_json::json!({
        "spectrum": spectrum.to_string(),
        "points": points,
        "hermitian_defect": g.hermitian_defect(),
        "riesz": riesz,
        "bessel": bessel,
        "frame": frame,
    });
    let mut json_bytes = serde_json::to_vec_pretty(&summary)?;
    json_bytes.push(b'\n');
    fs::create_dir_all(&args.out)?;
    for (ext, bytes) in [("csv", &csv_bytes), ("json", &json_bytes)] {
        let path = args.out.join(format!("{}.{ext}", args.name));
        fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
        println!("wrote {}", path.display());
    }
    println!("riesz [{:e}, {:e}], bessel {:e}", riesz.lower, riesz.upper, bessel.upper);
    Ok(true)
}

fn duality_check(n: usize, lambda: Vec<usize>, s: Vec<usize>) -> Result<bool> {
    let model = DiscreteModel::new(n, lambda, s)?;
    let report = duality::discrete_duality_verify(&model)?;
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(report.consistent)
}

/// Runs one subcommand; `Ok(false)` when an in-run check fails.
fn dispatch(command: Command) -> Result<bool> {
    match command {
        Command::Density(a) => execute(
            config(
                &a.common,
                Experiment::DensitySweep(DensitySweepConfig {
                    spectrum: a.spectrum,
                    alphas: a.alphas,
                    window: a.window,
                    resolution: a.resolution,
                    frame: !a.no_frame,
                }),
            ),
            &a.common.out,
        ),
        Command::Gram(a) => gram(a),
        Command::Duality { action } => match action {
            DualityAction::Scan { nmax, common } => {
                execute(config(&common, Experiment::Duality(DualityConfig { n_max: nmax })), &common.out)
            }
            DualityAction::Check { n, lambda, s } => duality_check(n, lambda, s),
        },
        Command::Stability {
            action:
                StabilityAction::Sweep {
                    lambda_kind,
                    window,
                    spectrum,
                    deltas,
                    seeds,
                    seed,
                    resolution,
                    out,
                },
        } => {
            let stem = out
                .file_stem()
                .and_then(|s| s.to_str())
                .context("--out must name a file")?
                .to_string();
            if out.extension().is_some_and(|e| e != "csv") {
                bail!("--out must be a .csv path");
            }
            let dir = out.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
            let cfg = ExperimentConfig {
                name: Some(stem),
                seed,
                experiment: Experiment::Stability(StabilityConfig {
                    lambda_kind: match lambda_kind {
                        LambdaKindArg::Integer => LambdaKind::Integer,
                    },
                    window,
                    spectrum,
                    deltas,
                    seeds,
                    resolution,
                }),
            };
            execute(cfg, dir)
        }
        Command::Claim(a) => {
            let ambient = a.ambient.as_deref().map(parse_pair).transpose()?;
            execute(
                config(
                    &a.common,
                    Experiment::Claim(ClaimConfig {
                        set: UdSet::periodic(a.period, a.offsets)?,
                        spectrum: a.spectrum,
                        delta: a.delta,
                        ambient,
                        perturb: a.perturb,
                    }),
                ),
                &a.common.out,
            )
        }
        Command::Poisson(a) => execute(
            config(
                &a.common,
                Experiment::Poisson(PoissonConfig {
                    epsilons: a.epsilons,
                    truncations: a.truncations,
                }),
            ),
            &a.common.out,
        ),
        Command::Sweep { config, out } => {
            let text = fs::read_to_string(&config).with_context(|| format!("reading {}", config.display()))?;
            let cfg = ExperimentConfig::from_json(&text).with_context(|| format!("in {}", config.display()))?;
            execute(cfg, &out)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: configuring {n} worker threads: {e}");
            return ExitCode::from(2);
        }
    }
    match dispatch(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
