//! Experiment configuration files.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sets::UdSet;
use crate::spectra::Spectrum;

/// A single experiment run: what to compute and the seed for any random
/// choices. Serialized as a flat JSON object tagged by `kind`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    /// Stem of the output files; defaults to the experiment kind.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default)]
    pub seed: u64,
    #[serde(flatten)]
    pub experiment: Experiment,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Experiment {
    DensitySweep(DensitySweepConfig),
    Claim(ClaimConfig),
    Disconnected(DisconnectedConfig),
    Poisson(PoissonConfig),
    Stability(StabilityConfig),
    Duality(DualityConfig),
}

/// `Λ = αZ ∩ [−T, T]` for each `α`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensitySweepConfig {
    /// Spectrum shorthand `a:b,c:d`.
    pub spectrum: String,
    pub alphas: Vec<f64>,
    /// Half-width `T` of the window.
    pub window: f64,
    /// Grid nodes per unit measure for frame estimates; defaults to the
    /// smallest admissible value.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolution: Option<f64>,
    /// Whether to compute grid frame bounds (the most expensive column).
    #[serde(default = "yes")]
    pub frame: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClaimConfig {
    /// Periodic point set.
    pub set: UdSet,
    pub spectrum: String,
    /// Lattice step.
    pub delta: f64,
    /// Ambient interval, default `[0, 2π/δ]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ambient: Option<[f64; 2]>,
    /// Optional seeded perturbation bound applied before rounding.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub perturb: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DisconnectedConfig {
    pub spectrum: String,
    pub set_a: UdSet,
    pub set_b: UdSet,
    /// Half-widths `T` of the windows.
    pub windows: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoissonConfig {
    pub epsilons: Vec<f64>,
    pub truncations: Vec<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LambdaKind {
    Integer,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityConfig {
    pub lambda_kind: LambdaKind,
    /// Half-width `T` of the window `Z ∩ [−T, T]`.
    pub window: f64,
    pub spectrum: String,
    pub deltas: Vec<f64>,
    /// Number of seeds; seed `i` is `config.seed + i`.
    pub seeds: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolution: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DualityConfig {
    pub n_max: usize,
}

fn yes() -> bool {
    true
}

pub(crate) fn parse_spectrum(field: &str, s: &str) -> Result<Spectrum> {
    s.parse::<Spectrum>().map_err(|e| Error::param(field, e.to_string()))
}

fn positive(field: &str, x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::param(field, format!("must be positive and finite, got {x}")))
    }
}

fn nonempty<T>(field: &str, v: &[T]) -> Result<()> {
    if v.is_empty() {
        Err(Error::param(field, "must not be empty"))
    } else {
        Ok(())
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn kind(&self) -> &'static str {
        match self.experiment {
            Experiment::DensitySweep(_) => "density_sweep",
            Experiment::Claim(_) => "claim",
            Experiment::Disconnected(_) => "disconnected",
            Experiment::Poisson(_) => "poisson",
            Experiment::Stability(_) => "stability",
            Experiment::Duality(_) => "duality",
        }
    }

    pub fn stem(&self) -> &str {
        self.name.as_deref().unwrap_or(self.kind())
    }

    /// Checks every parameter, naming the first offending field.
    pub fn validate(&self) -> Result<()> {
        if let Some(name) = &self.name {
            if name.is_empty() || name.contains(['/', '\\']) || name.starts_with('.') {
                return Err(Error::param("name", format!("`{name}` is not a plain file stem")));
            }
        }
        match &self.experiment {
            Experiment::DensitySweep(c) => {
                parse_spectrum("spectrum", &c.spectrum)?;
                nonempty("alphas", &c.alphas)?;
                for &a in &c.alphas {
                    positive("alphas", a)?;
                }
                positive("window", c.window)?;
                if let Some(r) = c.resolution {
                    positive("resolution", r)?;
                }
            }
            Experiment::Claim(c) => {
                parse_spectrum("spectrum", &c.spectrum)?;
                positive("delta", c.delta)?;
                if !c.set.is_periodic() {
                    return Err(Error::param("set", "must be periodic"));
                }
                if let Some([a, b]) = c.ambient {
                    if !(a.is_finite() && b.is_finite() && a < b) {
                        return Err(Error::param("ambient", format!("[{a}, {b}] is not an interval")));
                    }
                }
                if let Some(p) = c.perturb {
                    if !(p.is_finite() && p >= 0.0) {
                        return Err(Error::param("perturb", format!("must be nonnegative, got {p}")));
                    }
                }
            }
            Experiment::Disconnected(c) => {
                parse_spectrum("spectrum", &c.spectrum)?;
                nonempty("windows", &c.windows)?;
                for &t in &c.windows {
                    positive("windows", t)?;
                }
                for (field, set) in [("set_a", &c.set_a), ("set_b", &c.set_b)] {
                    if !set.is_periodic() {
                        return Err(Error::param(field, "must be periodic"));
                    }
                }
            }
            Experiment::Poisson(c) => {
                nonempty("epsilons", &c.epsilons)?;
                nonempty("truncations", &c.truncations)?;
                for &e in &c.epsilons {
                    super::poisson::check_epsilon(e)?;
                }
                for &m in &c.truncations {
                    super::poisson::check_truncation(m)?;
                }
            }
            Experiment::Stability(c) => {
                parse_spectrum("spectrum", &c.spectrum)?;
                positive("window", c.window)?;
                nonempty("deltas", &c.deltas)?;
                for &d in &c.deltas {
                    if !(d.is_finite() && (0.0..0.25).contains(&d)) {
                        return Err(Error::param("deltas", format!("{d} is outside [0, d/4) = [0, 0.25)")));
                    }
                }
                if c.seeds == 0 {
                    return Err(Error::param("seeds", "must be positive"));
                }
                if let Some(r) = c.resolution {
                    positive("resolution", r)?;
                }
            }
            Experiment::Duality(c) => {
                if c.n_max == 0 || c.n_max > crate::duality::SCAN_MAX_N {
                    return Err(Error::param(
                        "n_max",
                        format!("must be in 1..={}, got {}", crate::duality::SCAN_MAX_N, c.n_max),
                    ));
                }
            }
        }
        Ok(())
    }
}
