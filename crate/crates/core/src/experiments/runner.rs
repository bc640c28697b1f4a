//! Executes an [`ExperimentConfig`] and writes its outputs plus a manifest.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::claim::claim_pipeline;
use super::config::{parse_spectrum, Experiment, ExperimentConfig, LambdaKind};
use super::density::{density_sweep, riesz_lower_monotone, DENSITY_COLUMNS};
use super::disconnected::disconnected_spectrum_demo;
use super::poisson::poisson_sum_check;
use crate::duality;
use crate::error::Result;
use crate::sets::UdSet;
use crate::stability;

/// An in-run assertion; the run passes only if all of them do.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, passed: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.to_string(),
            passed,
            detail: detail.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutputFile {
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub package: String,
    pub version: String,
    pub config: ExperimentConfig,
    pub outputs: Vec<OutputFile>,
    pub checks: Vec<Check>,
    pub passed: bool,
}

/// Float formatting for CSV output: 17 significant digits.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_float).unwrap_or_default()
}

/// In-memory products of one run, named relative to the output directory.
#[derive(Default)]
struct Products {
    files: Vec<(String, Vec<u8>)>,
    checks: Vec<Check>,
}

impl Products {
    fn csv(&mut self, name: String, header: &[&str], rows: Vec<Vec<String>>) -> Result<()> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(header)?;
        for row in rows {
            w.write_record(&row)?;
        }
        let bytes = w.into_inner().map_err(|e| std::io::Error::other(e.to_string()))?;
        self.files.push((name, bytes));
        Ok(())
    }

    fn json<T: Serialize>(&mut self, name: String, value: &T) -> Result<()> {
        let mut bytes = serde_json::to_vec_pretty(value)?;
        bytes.push(b'\n');
        self.files.push((name, bytes));
        Ok(())
    }

    fn check(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check::new(name, passed, detail));
    }
}

fn execute(cfg: &ExperimentConfig) -> Result<Products> {
    let stem = cfg.stem();
    let mut out = Products::default();
    match &cfg.experiment {
        Experiment::DensitySweep(c) => {
            let rows = density_sweep(c)?;
            let ordered = rows.iter().all(|r| {
                0.0 <= r.riesz_lower
                    && r.riesz_lower <= r.riesz_upper
                    && r.frame_lower.zip(r.frame_upper).is_none_or(|(lo, hi)| 0.0 <= lo && lo <= hi)
            });
            out.check("bounds_ordered", ordered, "0 ≤ lower ≤ upper for every row");
            let exact = rows.iter().all(|r| r.upper_density == r.lower_density);
            out.check("lattice_densities_equal", exact, "D⁻ = D⁺ for every lattice");
            out.csv(
                format!("{stem}.csv"),
                &DENSITY_COLUMNS,
                rows.iter()
                    .map(|r| {
                        vec![
                            fmt_float(r.alpha),
                            fmt_float(r.upper_density),
                            fmt_float(r.lower_density),
                            fmt_float(r.riesz_lower),
                            fmt_opt(r.frame_lower),
                            fmt_float(r.bessel),
                        ]
                    })
                    .collect(),
            )?;
            out.json(
                format!("{stem}.json"),
                &serde_json::json!({ "rows": rows, "riesz_lower_monotone_in_alpha": riesz_lower_monotone(&rows) }),
            )?;
        }
        Experiment::Claim(c) => {
            let spectrum = parse_spectrum("spectrum", &c.spectrum)?;
            let report = claim_pipeline(
                &c.set,
                &spectrum,
                c.delta,
                c.ambient.map(|[a, b]| (a, b)),
                c.perturb.map(|p| (p, cfg.seed)),
            )?;
            out.check("rounding_within_half_delta", report.rounding_within_half_delta, "");
            out.check("density_preserved", report.density_preserved, "");
            out.check(
                "complementarity_exact",
                report.complementarity_exact && report.complementarity_mirror,
                format!("{} + {} = 1", report.sites_rounded, report.sites_complement),
            );
            out.json(format!("{stem}.json"), &report)?;
        }
        Experiment::Disconnected(c) => {
            let spectrum = parse_spectrum("spectrum", &c.spectrum)?;
            let report = disconnected_spectrum_demo(&spectrum, &c.set_a, &c.set_b, &c.windows)?;
            out.csv(
                format!("{stem}.csv"),
                &["window", "points_a", "points_b", "riesz_lower_a", "riesz_lower_b", "ratio"],
                report
                    .rows
                    .iter()
                    .map(|r| {
                        vec![
                            fmt_float(r.window),
                            r.points_a.to_string(),
                            r.points_b.to_string(),
                            fmt_float(r.riesz_lower_a),
                            fmt_float(r.riesz_lower_b),
                            fmt_float(r.ratio),
                        ]
                    })
                    .collect(),
            )?;
            out.json(format!("{stem}.json"), &report)?;
            let last = report.rows.last().map(|r| format!(", ratio {} at T = {}", fmt_float(r.ratio), r.window));
            out.check(
                "densities_equal",
                true,
                format!("D⁻ = D⁺ = {} for both sets{}", report.density, last.unwrap_or_default()),
            );
        }
        Experiment::Poisson(c) => {
            let mut reports = Vec::new();
            for &e in &c.epsilons {
                for &m in &c.truncations {
                    let r = poisson_sum_check(e, m)?;
                    out.check(
                        "partial_sum_within_tail_bound",
                        r.passes,
                        format!("ε={e} M={m}: |{:e}| ≤ {:e}", r.partial_sum, r.tail_bound),
                    );
                    reports.push(r);
                }
            }
            out.csv(
                format!("{stem}.csv"),
                &["epsilon", "truncation", "partial_sum", "tail_bound", "passes"],
                reports
                    .iter()
                    .map(|r| {
                        vec![
                            fmt_float(r.epsilon),
                            r.truncation.to_string(),
                            fmt_float(r.partial_sum),
                            fmt_float(r.tail_bound),
                            r.passes.to_string(),
                        ]
                    })
                    .collect(),
            )?;
        }
        Experiment::Stability(c) => {
            let spectrum = parse_spectrum("spectrum", &c.spectrum)?;
            let set = match c.lambda_kind {
                LambdaKind::Integer => UdSet::lattice_window(1.0, 0.0, -c.window, c.window)?,
            };
            let seeds: Vec<u64> = (0..c.seeds).map(|i| cfg.seed.wrapping_add(i)).collect();
            let table = stability::stability_margin_experiment(
                &set,
                &spectrum,
                &c.deltas,
                &seeds,
                c.resolution.unwrap_or(0.0),
            )?;
            let failing = table.rows.iter().filter(|r| !r.passes).count();
            out.check("norm_within_bound", failing == 0, format!("{failing} of {} rows exceed the bound", table.rows.len()));
            let a0 = table.baseline.lower;
            let safe: Vec<_> = table.rows.iter().filter(|r| r.delta <= table.delta_star / 2.0).collect();
            out.check(
                "margin_below_half_delta_star",
                safe.iter().all(|r| r.a_est > a0 / 4.0),
                format!("{} rows with δ ≤ δ*/2 = {:e}", safe.len(), table.delta_star / 2.0),
            );
            out.csv(
                format!("{stem}.csv"),
                &["delta", "seed", "measured_norm", "bound", "A_est"],
                table
                    .rows
                    .iter()
                    .map(|r| {
                        vec![
                            fmt_float(r.delta),
                            r.seed.to_string(),
                            fmt_float(r.measured_norm),
                            fmt_float(r.bound),
                            fmt_float(r.a_est),
                        ]
                    })
                    .collect(),
            )?;
            out.json(
                format!("{stem}.json"),
                &serde_json::json!({
                    "baseline": table.baseline,
                    "sigma": table.sigma,
                    "c1": table.c1,
                    "c2": table.c2,
                    "delta_star": table.delta_star,
                    "mean_a_est": table.mean_a_est(),
                }),
            )?;
        }
        Experiment::Duality(c) => {
            let stats = duality::duality_scan_statistics(c.n_max)?;
            out.check(
                "zero_duality_violations",
                stats.failures.is_empty(),
                format!("{} pairs, {} failures", stats.total_pairs, stats.failures.len()),
            );
            out.csv(
                format!("{stem}.csv"),
                &["n", "pairs", "sampling", "interpolation", "failures"],
                stats
                    .rows
                    .iter()
                    .map(|r| {
                        vec![
                            r.n.to_string(),
                            r.pairs.to_string(),
                            r.sampling.to_string(),
                            r.interpolation.to_string(),
                            r.failures.to_string(),
                        ]
                    })
                    .collect(),
            )?;
            out.json(format!("{stem}.json"), &stats)?;
        }
    }
    Ok(out)
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Validates `config`, runs it, and writes `<stem>.csv`/`<stem>.json` (as
/// applicable) and `<stem>.manifest.json` into `out_dir`.
pub fn run(config: &ExperimentConfig, out_dir: &Path) -> Result<Manifest> {
    config.validate()?;
    let products = execute(config)?;
    fs::create_dir_all(out_dir)?;
    let mut outputs = Vec::new();
    for (name, bytes) in &products.files {
        fs::write(out_dir.join(name), bytes)?;
        outputs.push(OutputFile {
            path: name.clone(),
            bytes: bytes.len() as u64,
            sha256: sha256_hex(bytes),
        });
    }
    let manifest = Manifest {
        package: env!("CARGO_PKG_NAME").to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: config.clone(),
        outputs,
        passed: products.checks.iter().all(|c| c.passed),
        checks: products.checks,
    };
    let mut bytes = serde_json::to_vec_pretty(&manifest)?;
    bytes.push(b'\n');
    fs::write(out_dir.join(format!("{}.manifest.json", config.stem())), bytes)?;
    Ok(manifest)
}
