//! Riesz, frame and Bessel estimates for `Λ = αZ` across a range of `α`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{parse_spectrum, DensitySweepConfig};
use crate::error::Result;
use crate::exponential::{self, required_resolution};
use crate::sets::{self, UdSet};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityRow {
    pub alpha: f64,
    pub upper_density: f64,
    pub lower_density: f64,
    pub riesz_lower: f64,
    pub riesz_upper: f64,
    pub frame_lower: Option<f64>,
    pub frame_upper: Option<f64>,
    pub frame_edge_mass: Option<f64>,
    /// `λ_max` of the Gram matrix.
    pub bessel: f64,
    pub points: usize,
}

pub const DENSITY_COLUMNS: [&str; 6] = ["alpha", "upper_density", "lower_density", "riesz_lower", "frame_lower", "bessel"];

/// One row per `α`, in input order.
pub fn density_sweep(cfg: &DensitySweepConfig) -> Result<Vec<DensityRow>> {
    let spectrum = parse_spectrum("spectrum", &cfg.spectrum)?;
    cfg.alphas
        .par_iter()
        .map(|&alpha| {
            let lattice = UdSet::lattice(alpha)?;
            let window = UdSet::lattice_window(alpha, 0.0, -cfg.window, cfg.window)?;
            let points = window.generators();
            let riesz = exponential::riesz_bound_estimates(points, &spectrum)?;
            let frame = if cfg.frame {
                let m = cfg.resolution.unwrap_or(0.0).max(required_resolution(points));
                Some(exponential::frame_bounds_grid(points, &spectrum, m)?)
            } else {
                None
            };
            Ok(DensityRow {
                alpha,
                upper_density: sets::upper_density(&lattice, 1.0)?.value,
                lower_density: sets::lower_density(&lattice, 1.0)?.value,
                riesz_lower: riesz.lower,
                riesz_upper: riesz.upper,
                frame_lower: frame.as_ref().map(|f| f.lower),
                frame_upper: frame.as_ref().map(|f| f.upper),
                frame_edge_mass: frame.as_ref().and_then(|f| f.edge_mass),
                bessel: riesz.upper,
                points: points.len(),
            })
        })
        .collect()
}

/// Whether `riesz_lower` is non-decreasing along the sweep when rows are
/// ordered by `α`.
pub fn riesz_lower_monotone(rows: &[DensityRow]) -> bool {
    let mut sorted: Vec<&DensityRow> = rows.iter().collect();
    sorted.sort_by(|a, b| a.alpha.total_cmp(&b.alpha));
    sorted.windows(2).all(|w| w[1].riesz_lower >= w[0].riesz_lower)
}
