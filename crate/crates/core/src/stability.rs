//! Restriction operators `R: f ↦ f|_Λ` discretized on a quadrature grid, and
//! the perturbation estimate `‖R − R′‖ ≤ σ·δ·√(C₁ + C₂)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponential::{self, required_resolution, BoundsEstimate, LocalizedBasis, TestFunction};
use crate::linalg;
use crate::quadrature::{QuadratureGrid, QuadratureRule};
use crate::sets::{self, Perturbation, PerturbationRule, UdSet};
use crate::spectra::Spectrum;
use crate::{CMatrix, CVector};

/// Intermediate positions `λ + s·ε_λ` at which the Bessel constants of the
/// perturbation bound are estimated.
const PATH_STEPS: usize = 8;

/// `R[j, q] = √(w_q/2π)·e^{−iλ_j t_q}`, acting on grid coefficients
/// `x_q = √w_q·F(t_q)` so that `‖x‖ ≈ ‖f‖₂` and `(Rx)_j ≈ f(λ_j)`.
#[derive(Clone, Debug)]
pub struct RestrictionMatrix {
    points: Vec<f64>,
    grid: QuadratureGrid,
    matrix: CMatrix,
}

impl RestrictionMatrix {
    pub fn new(points: &[f64], spectrum: &Spectrum, resolution: f64, rule: QuadratureRule) -> Result<Self> {
        let required = required_resolution(points);
        if resolution < required {
            return Err(Error::GridTooCoarse {
                given: resolution,
                required,
            });
        }
        let grid = QuadratureGrid::new(spectrum, resolution, rule)?;
        Ok(RestrictionMatrix::on_grid(points, grid))
    }

    /// Rows for `points` on an existing grid (no resolution check).
    pub fn on_grid(points: &[f64], grid: QuadratureGrid) -> Self {
        let scale: Vec<f64> = grid.weights.iter().map(|w| (w / (2.0 * PI)).sqrt()).collect();
        let matrix = CMatrix::from_fn(points.len(), grid.len(), |j, q| {
            Complex64::from_polar(scale[q], -points[j] * grid.nodes[q])
        });
        RestrictionMatrix {
            points: points.to_vec(),
            grid,
            matrix,
        }
    }

    /// Same grid, new points.
    pub fn with_points(&self, points: &[f64]) -> Self {
        RestrictionMatrix::on_grid(points, self.grid.clone())
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn grid(&self) -> &QuadratureGrid {
        &self.grid
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// Grid coefficients `√w_q·F(t_q)` of a test function.
    pub fn coefficients(&self, f: &TestFunction) -> CVector {
        CVector::from_iterator(
            self.grid.len(),
            self.grid
                .nodes
                .iter()
                .zip(&self.grid.weights)
                .map(|(&t, &w)| f.spectral_value(t) * w.sqrt()),
        )
    }

    /// Discrete samples `(f(λ))_λ`.
    pub fn apply(&self, f: &TestFunction) -> CVector {
        &self.matrix * self.coefficients(f)
    }

    /// Singular values, descending.
    pub fn singular_values(&self) -> Result<Vec<f64>> {
        linalg::singular_values(&self.matrix)
    }

    pub fn norm(&self) -> Result<f64> {
        linalg::spectral_norm(&self.matrix)
    }
}

pub fn restriction_matrix(points: &[f64], spectrum: &Spectrum, resolution: f64) -> Result<RestrictionMatrix> {
    RestrictionMatrix::new(points, spectrum, resolution, QuadratureRule::Midpoint)
}

/// Outcome of one perturbation-norm comparison.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerturbationReport {
    pub delta: f64,
    pub sigma: f64,
    pub c1: f64,
    pub c2: f64,
    pub measured_norm: f64,
    pub bound: f64,
    pub passes: bool,
}

/// Relative allowance for quadrature error when comparing against the bound.
pub const BOUND_ALLOWANCE: f64 = 1e-6;

fn window_points(set: &UdSet) -> Result<&[f64]> {
    match set {
        UdSet::Window { points, .. } => Ok(points),
        UdSet::Periodic { .. } => Err(Error::InvalidSet("a window set is required".into())),
    }
}

/// Bessel estimates `(C₁, C₂)` for the even- and odd-indexed subsequences of
/// `λ + s·ε_λ`, maximized over `s ∈ [0, 1]` (sampled).
pub fn split_bessel_constants(points: &[f64], offsets: &[f64], spectrum: &Spectrum) -> Result<(f64, f64)> {
    let mut c = (0.0f64, 0.0f64);
    for step in 0..=PATH_STEPS {
        let s = step as f64 / PATH_STEPS as f64;
        let path: Vec<f64> = points.iter().zip(offsets).map(|(p, e)| p + s * e).collect();
        let even: Vec<f64> = path.iter().copied().step_by(2).collect();
        let odd: Vec<f64> = path.iter().copied().skip(1).step_by(2).collect();
        c.0 = c.0.max(exponential::bessel_bound_estimate(&even, spectrum)?.upper);
        c.1 = c.1.max(exponential::bessel_bound_estimate(&odd, spectrum)?.upper);
        if offsets.iter().all(|&e| e == 0.0) {
            break;
        }
    }
    Ok(c)
}

/// Compares `‖R′ − R‖` (largest singular value on the grid) with
/// `σ·δ·√(C₁ + C₂)`, where `σ = max|t|` over the spectrum.
pub fn perturbation_norm_check(
    set: &UdSet,
    pert: &Perturbation,
    spectrum: &Spectrum,
    resolution: f64,
) -> Result<PerturbationReport> {
    let base = RestrictionMatrix::new(window_points(set)?, spectrum, resolution, QuadratureRule::Midpoint)?;
    perturbation_norm_check_on(&base, set, pert, spectrum)
}

fn perturbation_norm_check_on(
    base: &RestrictionMatrix,
    set: &UdSet,
    pert: &Perturbation,
    spectrum: &Spectrum,
) -> Result<PerturbationReport> {
    let moved = sets::perturb(set, &PerturbationRule::Explicit(pert.clone()))?;
    let points = window_points(set)?;
    let perturbed = base.with_points(window_points(&moved)?);
    let measured_norm = linalg::spectral_norm(&(perturbed.matrix() - base.matrix()))?;
    let (c1, c2) = split_bessel_constants(points, &pert.offsets, spectrum)?;
    let sigma = spectrum.max_abs();
    let bound = sigma * pert.delta * (c1 + c2).sqrt();
    Ok(PerturbationReport {
        delta: pert.delta,
        sigma,
        c1,
        c2,
        measured_norm,
        bound,
        passes: measured_norm <= bound * (1.0 + BOUND_ALLOWANCE),
    })
}

/// One `(δ, seed)` cell of a stability sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityRow {
    pub delta: f64,
    pub seed: u64,
    pub measured_norm: f64,
    pub bound: f64,
    pub a_est: f64,
    pub passes: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityTable {
    /// Frame estimate of the unperturbed set.
    pub baseline: BoundsEstimate,
    pub sigma: f64,
    pub c1: f64,
    pub c2: f64,
    /// `(√A₀/2)/(σ·√(C₁+C₂))`.
    pub delta_star: f64,
    pub rows: Vec<StabilityRow>,
}

impl StabilityTable {
    /// Mean of `A_est` over seeds, per δ in input order.
    pub fn mean_a_est(&self) -> Vec<(f64, f64)> {
        let mut out: Vec<(f64, f64, usize)> = Vec::new();
        for row in &self.rows {
            match out.iter_mut().find(|(d, _, _)| *d == row.delta) {
                Some(e) => {
                    e.1 += row.a_est;
                    e.2 += 1;
                }
                None => out.push((row.delta, row.a_est, 1)),
            }
        }
        out.into_iter().map(|(d, s, n)| (d, s / n as f64)).collect()
    }

    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.passes)
    }
}

/// For each `δ` and seed: perturb by `δ·U[−1,1]`, measure
/// `‖R′ − R‖` against its bound, and estimate the frame lower bound of the
/// perturbed set on the window-localized subspace of the unperturbed one.
pub fn stability_margin_experiment(
    set: &UdSet,
    spectrum: &Spectrum,
    deltas: &[f64],
    seeds: &[u64],
    resolution: f64,
) -> Result<StabilityTable> {
    let points = window_points(set)?;
    let limit = sets::separation_constant(set)? / 4.0;
    if let Some(&d) = deltas.iter().find(|&&d| !(d >= 0.0 && d < limit)) {
        return Err(Error::PerturbationTooLarge { delta: d, limit });
    }
    // Grid resolves the largest perturbed point as well.
    let reach = points.iter().fold(0.0f64, |m, p| m.max(p.abs())) + deltas.iter().fold(0.0f64, |m, &d| m.max(d));
    let resolution = resolution.max(4.0 * reach / (2.0 * PI));
    let base = RestrictionMatrix::new(points, spectrum, resolution, QuadratureRule::Midpoint)?;
    let window = (points[0], points[points.len() - 1]);
    let basis = LocalizedBasis::new(base.grid(), spectrum, window)?;
    let baseline = exponential::frame_bounds_on(&base, &basis, window)?;
    let (c1, c2) = split_bessel_constants(points, &vec![0.0; points.len()], spectrum)?;
    let sigma = spectrum.max_abs();
    let delta_star = if sigma * (c1 + c2).sqrt() > 0.0 {
        baseline.lower.sqrt() / 2.0 / (sigma * (c1 + c2).sqrt())
    } else {
        f64::INFINITY
    };

    let cells: Vec<(f64, u64)> = deltas
        .iter()
        .flat_map(|&d| seeds.iter().map(move |&s| (d, s)))
        .collect();
    let rows = cells
        .par_iter()
        .map(|&(delta, seed)| {
            let pert = Perturbation::seeded_uniform(points.len(), delta, seed)?;
            let report = perturbation_norm_check_on(&base, set, &pert, spectrum)?;
            let moved: Vec<f64> = points.iter().zip(&pert.offsets).map(|(p, e)| p + e).collect();
            let est = exponential::frame_bounds_on(&base.with_points(&moved), &basis, window)?;
            Ok(StabilityRow {
                delta,
                seed,
                measured_norm: report.measured_norm,
                bound: report.bound,
                a_est: est.lower,
                passes: report.passes,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(StabilityTable {
        baseline,
        sigma,
        c1,
        c2,
        delta_star,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn integers(lo: i32, hi: i32) -> Vec<f64> {
        (lo..=hi).map(f64::from).collect()
    }

    #[test]
    fn shannon_restriction_singular_values() {
        let s = Spectrum::symmetric(PI).unwrap();
        let pts = integers(-20, 20);
        let r = restriction_matrix(&pts, &s, required_resolution(&pts)).unwrap();
        let sv = r.singular_values().unwrap();
        assert!(sv.iter().all(|v| (v - 1.0).abs() <= 5.0 / 20.0), "{sv:?}");
    }

    #[test]
    fn empty_restriction() {
        let s = Spectrum::symmetric(PI).unwrap();
        let r = restriction_matrix(&[], &s, 1.0).unwrap();
        assert_eq!(r.matrix().nrows(), 0);
        assert_eq!(r.norm().unwrap(), 0.0);
    }

    #[test]
    fn single_row_consistency() {
        let s = Spectrum::symmetric(PI).unwrap();
        let f = TestFunction::constant(&s, Complex64::new(0.7, -0.2)).unwrap();
        let r = restriction_matrix(&[0.0], &s, 8.0).unwrap();
        let closed = Complex64::new(0.7, -0.2) * (2.0 * PI) / (2.0 * PI).sqrt();
        assert!((r.apply(&f)[0] - closed).norm() < 1e-12);
        assert!((f.eval(0.0) - closed).norm() < 1e-12);
    }

    #[test]
    fn coarse_grid_is_rejected() {
        let s = Spectrum::symmetric(PI).unwrap();
        assert!(matches!(restriction_matrix(&integers(-20, 20), &s, 5.0), Err(Error::GridTooCoarse { .. })));
    }

    #[test]
    fn zero_perturbation() {
        let s = Spectrum::symmetric(PI / 2.0).unwrap();
        let set = UdSet::lattice_window(1.0, 0.0, -10.0, 10.0).unwrap();
        let rep = perturbation_norm_check(&set, &Perturbation::zero(21), &s, 8.0).unwrap();
        assert_eq!(rep.measured_norm, 0.0);
        assert_eq!(rep.bound, 0.0);
        assert!(rep.passes);
    }

    #[test]
    fn perturbation_precondition() {
        let s = Spectrum::symmetric(PI / 2.0).unwrap();
        let set = UdSet::lattice_window(1.0, 0.0, -10.0, 10.0).unwrap();
        let pert = Perturbation::new(0.3, vec![0.3; 21]).unwrap();
        assert!(matches!(
            perturbation_norm_check(&set, &pert, &s, 8.0),
            Err(Error::PerturbationTooLarge { .. })
        ));
    }
}
