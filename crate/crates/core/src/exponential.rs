//! Exponential systems `{e^{iλt} : λ ∈ Λ}` on `L²(S, dt/2π)`.
//!
//! The Gram matrix of a finite window of `Λ` gives Riesz-sequence and Bessel
//! estimates; the frame bound is estimated on a quadrature grid by compressing
//! the frame operator onto functions localized inside the window.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::quadrature::{QuadratureGrid, QuadratureRule};
use crate::spectra::Spectrum;
use crate::stability::RestrictionMatrix;
use crate::CMatrix;

/// Below this value of `|ω|·(b−a)` an interval's contribution is evaluated in
/// the midpoint/sinc form instead of the endpoint difference.
pub const SMALL_PHASE: f64 = 1e-2;

/// Fraction of the window length treated as the edge zone in frame estimates.
pub const EDGE_FRACTION: f64 = 0.1;

/// Eigenvalues within this (relative) distance of the smallest one are
/// treated as a single eigenspace for the edge diagnostic.
const CLUSTER_TOL: f64 = 1e-9;

/// `sin(x)/x` with the removable singularity filled in.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

fn interval_integral_difference(a: f64, b: f64, omega: f64) -> Complex64 {
    (Complex64::cis(omega * b) - Complex64::cis(omega * a)) / Complex64::new(0.0, omega)
}

fn interval_integral_midpoint(a: f64, b: f64, omega: f64) -> Complex64 {
    let half = 0.5 * (b - a);
    Complex64::cis(omega * 0.5 * (a + b)) * ((b - a) * sinc(omega * half))
}

/// `∫_S e^{iωt} dt` in closed form.
pub fn fourier_integral(spectrum: &Spectrum, omega: f64) -> Complex64 {
    spectrum
        .intervals()
        .iter()
        .map(|&(a, b)| {
            if (omega * (b - a)).abs() < SMALL_PHASE {
                interval_integral_midpoint(a, b, omega)
            } else {
                interval_integral_difference(a, b, omega)
            }
        })
        .sum()
}

fn check_distinct(points: &[f64]) -> Result<()> {
    if let Some(p) = points.iter().find(|p| !p.is_finite()) {
        return Err(Error::InvalidSet(format!("non-finite point {p}")));
    }
    let mut sorted = points.to_vec();
    sorted.sort_by(f64::total_cmp);
    match sorted.windows(2).find(|w| w[0] == w[1]) {
        Some(w) => Err(Error::DuplicatePoint(w[0])),
        None => Ok(()),
    }
}

/// Gram matrix `G[j,k] = (1/2π) ∫_S e^{i(λ_k − λ_j)t} dt`.
#[derive(Clone, Debug)]
pub struct GramMatrix {
    pub points: Vec<f64>,
    pub spectrum: Spectrum,
    pub entries: CMatrix,
}

/// Builds the Gram matrix from its upper triangle; the lower triangle is the
/// conjugate, so the result is exactly Hermitian.
pub fn gram_matrix(points: &[f64], spectrum: &Spectrum) -> Result<GramMatrix> {
    check_distinct(points)?;
    let n = points.len();
    let mut entries = CMatrix::zeros(n, n);
    let diag = Complex64::new(spectrum.measure() / (2.0 * PI), 0.0);
    for j in 0..n {
        entries[(j, j)] = diag;
        for k in j + 1..n {
            let g = fourier_integral(spectrum, points[k] - points[j]) / (2.0 * PI);
            entries[(j, k)] = g;
            entries[(k, j)] = g.conj();
        }
    }
    Ok(GramMatrix {
        points: points.to_vec(),
        spectrum: spectrum.clone(),
        entries,
    })
}

impl GramMatrix {
    pub fn dim(&self) -> usize {
        self.points.len()
    }

    /// Eigenvalues, ascending.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        linalg::hermitian_eigenvalues(&self.entries)
    }

    /// `max |G − G*|`.
    pub fn hermitian_defect(&self) -> f64 {
        let d = &self.entries - self.entries.adjoint();
        d.iter().fold(0.0, |m, z| m.max(z.norm()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundKind {
    Riesz,
    Frame,
    Bessel,
}

/// Grid metadata attached to frame estimates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridInfo {
    pub nodes_per_unit: f64,
    pub nodes: usize,
    /// Dimension of the window-localized subspace the frame operator is
    /// compressed to.
    pub basis: usize,
    pub rule: QuadratureRule,
}

/// Lower/upper bound estimate from a finite truncation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundsEstimate {
    pub lower: f64,
    pub upper: f64,
    pub kind: BoundKind,
    /// Hull of the truncated point set.
    pub window: Option<(f64, f64)>,
    pub points: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub grid: Option<GridInfo>,
    /// Mass of the minimizing eigenvector within the edge zone of the window.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub edge_mass: Option<f64>,
    /// Set when the minimizer concentrates at the window edges, i.e. the lower
    /// bound is dominated by truncation.
    #[serde(default)]
    pub boundary_caveat: bool,
}

impl BoundsEstimate {
    pub(crate) fn new(lower: f64, upper: f64, kind: BoundKind, points: &[f64]) -> Self {
        let upper = upper.max(0.0);
        BoundsEstimate {
            lower: lower.clamp(0.0, upper),
            upper,
            kind,
            window: hull(points),
            points: points.len(),
            grid: None,
            edge_mass: None,
            boundary_caveat: false,
        }
    }

    /// `lower > n·ε·upper` for an `n`-dimensional problem.
    pub fn lower_is_positive(&self, n: usize) -> bool {
        self.lower > n.max(1) as f64 * f64::EPSILON * self.upper
    }
}

fn hull(points: &[f64]) -> Option<(f64, f64)> {
    let lo = points.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = points.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (lo <= hi).then_some((lo, hi))
}

/// Extreme Gram eigenvalues: truncation estimates of the Riesz constants
/// `c²` (lower) and `C²` (upper).
pub fn riesz_bound_estimates(points: &[f64], spectrum: &Spectrum) -> Result<BoundsEstimate> {
    let eig = gram_matrix(points, spectrum)?.eigenvalues()?;
    Ok(match (eig.first(), eig.last()) {
        (Some(&lo), Some(&hi)) => BoundsEstimate::new(lo, hi, BoundKind::Riesz, points),
        _ => BoundsEstimate::new(0.0, 0.0, BoundKind::Riesz, points),
    })
}

/// `λ_max` of the Gram matrix: truncation estimate of the Bessel constant in
/// `Σ|f(λ)|² ≤ C‖f‖²`.
pub fn bessel_bound_estimate(points: &[f64], spectrum: &Spectrum) -> Result<BoundsEstimate> {
    let eig = gram_matrix(points, spectrum)?.eigenvalues()?;
    let upper = eig.last().copied().unwrap_or(0.0);
    Ok(BoundsEstimate::new(0.0, upper, BoundKind::Bessel, points))
}

/// Smallest grid resolution (nodes per unit measure) accepted for a window
/// whose largest point has magnitude `max_abs`.
pub fn required_resolution(points: &[f64]) -> f64 {
    let max_abs = points.iter().fold(0.0f64, |m, p| m.max(p.abs()));
    4.0 * max_abs / (2.0 * PI)
}

/// Orthonormal (in grid coordinates) exponentials `e^{2πikt/L}/√L` on each
/// interval of length `L`, keeping the `k` whose spatial centre `2πk/L`
/// lies in the window.
#[derive(Clone, Debug)]
pub struct LocalizedBasis {
    /// `nodes × basis` matrix with orthonormal columns.
    pub matrix: CMatrix,
    pub centers: Vec<f64>,
}

impl LocalizedBasis {
    pub fn new(grid: &QuadratureGrid, spectrum: &Spectrum, window: (f64, f64)) -> Result<Self> {
        let mut columns: Vec<(usize, i64, f64)> = Vec::new();
        for (piece, &(a, b)) in spectrum.intervals().iter().enumerate() {
            let len = b - a;
            let k0 = (window.0 * len / (2.0 * PI)).ceil() as i64;
            let k1 = (window.1 * len / (2.0 * PI)).floor() as i64;
            for k in k0..=k1 {
                columns.push((piece, k, 2.0 * PI * k as f64 / len));
            }
        }
        let mut raw = CMatrix::zeros(grid.len(), columns.len());
        for (c, &(piece, k, _)) in columns.iter().enumerate() {
            let (a, b) = spectrum.intervals()[piece];
            let len = b - a;
            for q in grid.pieces[piece].clone() {
                let phase = 2.0 * PI * k as f64 * (grid.nodes[q] - a) / len;
                raw[(q, c)] = Complex64::from_polar((grid.weights[q] / len).sqrt(), phase);
            }
        }
        let matrix = match grid.rule {
            QuadratureRule::Midpoint => raw,
            QuadratureRule::GaussLegendre { .. } if columns.is_empty() => raw,
            QuadratureRule::GaussLegendre { .. } => raw.qr().q(),
        };
        Ok(LocalizedBasis {
            matrix,
            centers: columns.into_iter().map(|c| c.2).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }
}

/// Frame bounds of the rows of `restriction` on the subspace spanned by
/// `basis`: extreme eigenvalues of `B* R* R B`, with edge diagnostics.
pub fn frame_bounds_on(restriction: &RestrictionMatrix, basis: &LocalizedBasis, window: (f64, f64)) -> Result<BoundsEstimate> {
    let points = restriction.points();
    let mut est = BoundsEstimate::new(0.0, 0.0, BoundKind::Frame, points);
    est.grid = Some(GridInfo {
        nodes_per_unit: restriction.grid().nodes_per_unit,
        nodes: restriction.grid().len(),
        basis: basis.len(),
        rule: restriction.grid().rule,
    });
    if basis.is_empty() || points.is_empty() {
        return Ok(est);
    }
    let rb = restriction.matrix() * &basis.matrix;
    let frame_op = rb.adjoint() * &rb;
    let frame_op = (&frame_op + frame_op.adjoint()) * Complex64::new(0.5, 0.0);
    let (values, vectors) = linalg::hermitian_eigen(&frame_op)?;
    let lower = values[0];
    let upper = *values.last().unwrap_or(&0.0);
    let edge = EDGE_FRACTION * (window.1 - window.0);
    let edge_rows: Vec<usize> = (0..basis.len())
        .filter(|&i| basis.centers[i] < window.0 + edge || basis.centers[i] > window.1 - edge)
        .collect();
    // Averaged over the (possibly degenerate) bottom eigenspace.
    let cluster = values.iter().take_while(|&&v| v - lower <= CLUSTER_TOL * upper.abs().max(1.0)).count();
    let edge_mass = (0..cluster)
        .map(|k| edge_rows.iter().map(|&i| vectors[(i, k)].norm_sqr()).sum::<f64>())
        .sum::<f64>()
        / cluster as f64;
    est.lower = lower.clamp(0.0, upper.max(0.0));
    est.upper = upper.max(0.0);
    est.edge_mass = Some(edge_mass);
    est.boundary_caveat = edge_mass > 0.5;
    Ok(est)
}

/// Frame-bound estimate on a midpoint grid with `resolution` nodes per unit
/// measure. The frame operator `Σ u_λ u_λ*` is compressed onto the exponentials
/// localized in the window of `points`; see [`LocalizedBasis`].
pub fn frame_bounds_grid(points: &[f64], spectrum: &Spectrum, resolution: f64) -> Result<BoundsEstimate> {
    frame_bounds_grid_with(points, spectrum, resolution, QuadratureRule::Midpoint)
}

pub fn frame_bounds_grid_with(
    points: &[f64],
    spectrum: &Spectrum,
    resolution: f64,
    rule: QuadratureRule,
) -> Result<BoundsEstimate> {
    check_distinct(points)?;
    let restriction = RestrictionMatrix::new(points, spectrum, resolution, rule)?;
    let Some(window) = hull(points) else {
        return frame_bounds_on(&restriction, &LocalizedBasis { matrix: CMatrix::zeros(0, 0), centers: vec![] }, (0.0, 0.0));
    };
    let basis = LocalizedBasis::new(restriction.grid(), spectrum, window)?;
    frame_bounds_on(&restriction, &basis, window)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
struct Knot {
    t: f64,
    value: Complex64,
}

/// Piecewise-linear spectrum-side function `F` on the intervals of `S`, with
/// `f(x) = (2π)^{-1/2} ∫_S F(t) e^{-ixt} dt` evaluated in closed form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestFunction {
    spectrum: Spectrum,
    knots: Vec<Vec<Knot>>,
}

impl TestFunction {
    /// `knots[i]` lists `(t, F(t))` on interval `i`, increasing in `t`, from
    /// its left endpoint to its right endpoint.
    pub fn new(spectrum: &Spectrum, knots: Vec<Vec<(f64, Complex64)>>) -> Result<Self> {
        if knots.len() != spectrum.intervals().len() {
            return Err(Error::InvalidTestFunction(format!(
                "expected knots for {} intervals, got {}",
                spectrum.intervals().len(),
                knots.len()
            )));
        }
        let mut out = Vec::with_capacity(knots.len());
        for (ks, &(a, b)) in knots.into_iter().zip(spectrum.intervals()) {
            let ok = ks.len() >= 2
                && ks.first().map(|k| k.0) == Some(a)
                && ks.last().map(|k| k.0) == Some(b)
                && ks.windows(2).all(|w| w[0].0 < w[1].0)
                && ks.iter().all(|k| k.1.re.is_finite() && k.1.im.is_finite());
            if !ok {
                return Err(Error::InvalidTestFunction(format!(
                    "knots must run strictly from {a} to {b}"
                )));
            }
            out.push(ks.into_iter().map(|(t, value)| Knot { t, value }).collect());
        }
        Ok(TestFunction {
            spectrum: spectrum.clone(),
            knots: out,
        })
    }

    /// Samples `F` at `pieces + 1` uniform knots on every interval.
    pub fn from_fn(spectrum: &Spectrum, pieces: usize, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        let pieces = pieces.max(1);
        let knots = spectrum
            .intervals()
            .iter()
            .map(|&(a, b)| {
                (0..=pieces)
                    .map(|j| {
                        let t = if j == pieces { b } else { a + (b - a) * j as f64 / pieces as f64 };
                        (t, f(t))
                    })
                    .collect()
            })
            .collect();
        TestFunction::new(spectrum, knots)
    }

    pub fn constant(spectrum: &Spectrum, value: Complex64) -> Result<Self> {
        TestFunction::from_fn(spectrum, 1, |_| value)
    }

    /// Random complex knot values (standard normal parts) on `pieces` uniform
    /// pieces per interval.
    pub fn random<R: Rng>(spectrum: &Spectrum, pieces: usize, rng: &mut R) -> Result<Self> {
        let values: Vec<Complex64> = (0..spectrum.intervals().len() * (pieces.max(1) + 1))
            .map(|_| {
                Complex64::new(
                    rng.sample(rand_distr::StandardNormal),
                    rng.sample(rand_distr::StandardNormal),
                )
            })
            .collect();
        let per = pieces.max(1) + 1;
        let knots = spectrum
            .intervals()
            .iter()
            .enumerate()
            .map(|(i, &(a, b))| {
                (0..per)
                    .map(|j| {
                        let t = if j + 1 == per { b } else { a + (b - a) * j as f64 / (per - 1) as f64 };
                        (t, values[i * per + j])
                    })
                    .collect()
            })
            .collect();
        TestFunction::new(spectrum, knots)
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    fn segments(&self) -> impl Iterator<Item = (&Knot, &Knot)> {
        self.knots.iter().flat_map(|ks| ks.windows(2).map(|w| (&w[0], &w[1])))
    }

    /// `F(t)`; zero off the spectrum.
    pub fn spectral_value(&self, t: f64) -> Complex64 {
        for ks in &self.knots {
            let (a, b) = (ks[0].t, ks[ks.len() - 1].t);
            if t < a || t > b {
                continue;
            }
            let j = ks.partition_point(|k| k.t <= t).clamp(1, ks.len() - 1);
            let (k0, k1) = (&ks[j - 1], &ks[j]);
            let s = (t - k0.t) / (k1.t - k0.t);
            return k0.value + (k1.value - k0.value) * s;
        }
        Complex64::new(0.0, 0.0)
    }

    /// `‖f‖₂² = ∫_S |F|² dt`, exact for the linear pieces.
    pub fn norm_squared(&self) -> f64 {
        self.segments()
            .map(|(k0, k1)| {
                let (u, v) = (k0.value, k1.value);
                (k1.t - k0.t) / 3.0 * (u.norm_sqr() + (u * v.conj()).re + v.norm_sqr())
            })
            .sum()
    }

    /// `f(x)` by exact integration of each linear piece against `e^{-ixt}`.
    pub fn eval(&self, x: f64) -> Complex64 {
        let total: Complex64 = self
            .segments()
            .map(|(k0, k1)| {
                let h = k1.t - k0.t;
                let z = Complex64::new(0.0, -x * h);
                let (p0, p1) = phi01(z);
                Complex64::cis(-x * k0.t) * h * (k0.value * p0 + (k1.value - k0.value) * p1)
            })
            .sum();
        total / (2.0 * PI).sqrt()
    }
}

/// `φ₀(z) = ∫₀¹ e^{zτ} dτ` and `φ₁(z) = ∫₀¹ τ e^{zτ} dτ`.
fn phi01(z: Complex64) -> (Complex64, Complex64) {
    if z.norm() < 0.5 {
        let mut p0 = Complex64::new(0.0, 0.0);
        let mut p1 = Complex64::new(0.0, 0.0);
        let mut term = Complex64::new(1.0, 0.0); // z^k / k!
        for k in 0..30 {
            p0 += term / (k as f64 + 1.0);
            p1 += term / (k as f64 + 2.0);
            term = term * z / (k as f64 + 1.0);
        }
        (p0, p1)
    } else {
        let ez = z.exp();
        ((ez - 1.0) / z, (ez * (z - 1.0) + 1.0) / (z * z))
    }
}

/// `min_F Σ_λ |f(λ)|² / ‖f‖²` over the probes: an upper bound on the frame
/// lower constant, useful to certify that a set is not sampling.
pub fn frame_lower_probe(points: &[f64], probes: &[TestFunction]) -> Result<f64> {
    if probes.is_empty() {
        return Err(Error::NoProbes);
    }
    probes.iter().try_fold(f64::INFINITY, |best, probe| {
        let norm = probe.norm_squared();
        if !(norm > 0.0) {
            return Err(Error::ZeroNormProbe);
        }
        let energy: f64 = points.iter().map(|&x| probe.eval(x).norm_sqr()).sum();
        Ok(best.min(energy / norm))
    })
}
