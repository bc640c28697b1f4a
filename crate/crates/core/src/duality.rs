//! Frame/Riesz duality for orthogonal decompositions of `C^N`, and its
//! sampling/interpolation form for character submatrices over `Z_N`.
//!
//! Indices are 0-based throughout.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::seq::index;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::exponential::{BoundKind, BoundsEstimate};
use crate::linalg;
use crate::{CMatrix, CVector};

/// Projector defect accepted as exact.
pub const PROJECTOR_EXACT_TOL: f64 = 1e-12;
/// Projector defect up to which eigenvalues are snapped to `{0, 1}`.
pub const PROJECTOR_SNAP_TOL: f64 = 1e-8;
/// Relative pivot tolerance of the elimination rank oracle.
pub const ORACLE_TOL: f64 = 1e-9;
/// Slack in the quantitative inequality `c² ≥ A/(1+A)`.
pub const QUANTITATIVE_SLACK: f64 = 1e-9;

/// Scale against which verdicts on projected basis vectors are taken: the
/// norm of a nonzero orthogonal projector.
const PROJECTOR_NORM: f64 = 1.0;

/// Multiple of `n·ε` below which a singular value counts as zero. Rounding in
/// float-built projectors leaves up to about `5·n·ε` on rank-deficient
/// families.
pub const VERDICT_SAFETY: f64 = 64.0;

/// `σ_k > VERDICT_SAFETY·n·ε·σ_max`.
pub fn numerically_positive(sigma_k: f64, sigma_max: f64, n: usize) -> bool {
    sigma_k > VERDICT_SAFETY * n.max(1) as f64 * f64::EPSILON * sigma_max
}

fn columns(vectors: &[CVector]) -> Result<CMatrix> {
    let n = vectors.first().ok_or(Error::EmptyFamily)?.len();
    if let Some(v) = vectors.iter().find(|v| v.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: v.len(),
        });
    }
    Ok(CMatrix::from_columns(vectors))
}

fn family_bounds(lower: f64, upper: f64, kind: BoundKind, count: usize) -> BoundsEstimate {
    BoundsEstimate {
        lower: lower.clamp(0.0, upper),
        upper,
        kind,
        window: None,
        points: count,
        grid: None,
        edge_mass: None,
        boundary_caveat: false,
    }
}

/// Extreme eigenvalues of the Gram matrix of `vectors`, computed as squared
/// extreme singular values of the column matrix.
pub fn riesz_bounds_vectors(vectors: &[CVector]) -> Result<BoundsEstimate> {
    let m = columns(vectors)?;
    let sv = linalg::singular_values(&m)?;
    let upper = sv.first().copied().unwrap_or(0.0);
    let lower = linalg::kth_singular_value(&sv, vectors.len());
    Ok(family_bounds(lower * lower, upper * upper, BoundKind::Riesz, vectors.len()))
}

/// Orthonormal basis of `range(P)` as columns (eigenvectors with eigenvalue
/// above one half).
fn range_basis(p: &CMatrix) -> Result<CMatrix> {
    let (values, vectors) = linalg::hermitian_eigen(&hermitian_part(p))?;
    let keep: Vec<usize> = (0..values.len()).filter(|&k| values[k] > 0.5).collect();
    Ok(CMatrix::from_fn(p.nrows(), keep.len(), |r, c| vectors[(r, keep[c])]))
}

fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Frame bounds of `{Pv}` in `range(P)`: extreme eigenvalues of
/// `Σ (Pv)(Pv)*` written in an orthonormal basis of the range.
pub fn frame_bounds_subspace(vectors: &[CVector], p: &CMatrix) -> Result<BoundsEstimate> {
    let q = range_basis(p)?;
    if q.ncols() == 0 {
        return Err(Error::TrivialSubspace);
    }
    if let Some(v) = vectors.iter().find(|v| v.len() != p.nrows()) {
        return Err(Error::DimensionMismatch {
            expected: p.nrows(),
            got: v.len(),
        });
    }
    if vectors.is_empty() {
        return Ok(family_bounds(0.0, 0.0, BoundKind::Frame, 0));
    }
    let coords = q.adjoint() * p * CMatrix::from_columns(vectors);
    let sv = linalg::singular_values(&coords)?;
    let upper = sv.first().copied().unwrap_or(0.0);
    let lower = linalg::kth_singular_value(&sv, q.ncols());
    Ok(family_bounds(lower * lower, upper * upper, BoundKind::Frame, vectors.len()))
}

/// An orthogonal projector `P` on `C^N` and a partition of the standard basis
/// into `V` and its complement `W`.
#[derive(Clone, Debug)]
pub struct OrthoDecomposition {
    projector: CMatrix,
    v: Vec<usize>,
    w: Vec<usize>,
    /// Whether the input was snapped to an exact projector.
    pub snapped: bool,
}

fn projector_defect(p: &CMatrix) -> Result<f64> {
    let idem = linalg::spectral_norm(&(p * p - p))?;
    let herm = linalg::spectral_norm(&(p - p.adjoint()))?;
    Ok(idem.max(herm))
}

impl OrthoDecomposition {
    pub fn new(projector: CMatrix, v: Vec<usize>) -> Result<Self> {
        let n = projector.nrows();
        if projector.ncols() != n {
            return Err(Error::InvalidProjector(format!(
                "projector must be square, got {}x{}",
                n,
                projector.ncols()
            )));
        }
        if projector.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::InvalidProjector("non-finite entry".into()));
        }
        let mut v = v;
        v.sort_unstable();
        if v.windows(2).any(|p| p[0] == p[1]) || v.last().is_some_and(|&i| i >= n) {
            return Err(Error::InvalidProjector(format!(
                "partition must list distinct indices below {n}"
            )));
        }
        let w = (0..n).filter(|i| v.binary_search(i).is_err()).collect();
        let defect = projector_defect(&projector)?;
        let (projector, snapped) = if defect <= PROJECTOR_EXACT_TOL {
            (projector, false)
        } else if defect <= PROJECTOR_SNAP_TOL {
            let (values, vectors) = linalg::hermitian_eigen(&hermitian_part(&projector))?;
            let mut snapped = CMatrix::zeros(n, n);
            for (k, &lam) in values.iter().enumerate() {
                if lam > 0.5 {
                    let col = vectors.column(k);
                    snapped += col * col.adjoint();
                }
            }
            (snapped, true)
        } else {
            return Err(Error::InvalidProjector(format!(
                "‖P²−P‖ or ‖P−P*‖ is {defect:.3e}, above {PROJECTOR_SNAP_TOL:.0e}"
            )));
        };
        Ok(OrthoDecomposition {
            projector,
            v,
            w,
            snapped,
        })
    }

    /// Coordinate projector onto the indices in `support`.
    pub fn coordinate(n: usize, support: &[usize], v: Vec<usize>) -> Result<Self> {
        let mut p = CMatrix::zeros(n, n);
        for &i in support {
            if i >= n {
                return Err(Error::InvalidProjector(format!("support index {i} out of range")));
            }
            p[(i, i)] = Complex64::new(1.0, 0.0);
        }
        OrthoDecomposition::new(p, v)
    }

    /// Projector onto the span of `rank` random complex Gaussian vectors,
    /// with `V` a uniformly random subset of size `v_len`.
    pub fn random<R: Rng>(n: usize, rank: usize, v_len: usize, rng: &mut R) -> Result<Self> {
        if rank > n || v_len > n {
            return Err(Error::param("rank", format!("rank {rank} and |V| {v_len} must not exceed {n}")));
        }
        let p = random_projector(n, rank, rng);
        let v = index::sample(rng, n, v_len).into_vec();
        OrthoDecomposition::new(p, v)
    }

    pub fn dim(&self) -> usize {
        self.projector.nrows()
    }

    pub fn projector(&self) -> &CMatrix {
        &self.projector
    }

    pub fn v(&self) -> &[usize] {
        &self.v
    }

    pub fn w(&self) -> &[usize] {
        &self.w
    }

    /// `(I − P, W)`.
    pub fn mirror(&self) -> OrthoDecomposition {
        let n = self.dim();
        OrthoDecomposition {
            projector: CMatrix::identity(n, n) - &self.projector,
            v: self.w.clone(),
            w: self.v.clone(),
            snapped: self.snapped,
        }
    }

    pub fn rank(&self) -> usize {
        self.projector.trace().re.round().max(0.0) as usize
    }

    /// JSON record of the instance, for failure reports.
    pub fn to_json(&self) -> serde_json::Value {
        let rows: Vec<Vec<[f64; 2]>> = (0..self.dim())
            .map(|r| (0..self.dim()).map(|c| [self.projector[(r, c)].re, self.projector[(r, c)].im]).collect())
            .collect();
        json!({ "n": self.dim(), "projector": rows, "v": self.v })
    }
}

/// `Q Q*` for `Q` the orthonormalized `n × rank` complex Gaussian matrix.
pub fn random_projector<R: Rng>(n: usize, rank: usize, rng: &mut R) -> CMatrix {
    if rank == 0 {
        return CMatrix::zeros(n, n);
    }
    let g = CMatrix::from_fn(n, rank, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let q = g.qr().q();
    &q * q.adjoint()
}

/// Verdicts for one decomposition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DualityReport {
    /// `{P e_i : i ∈ V}` is a frame for `range(P)`.
    pub frame_verdict: bool,
    /// `{(I−P) e_j : j ∈ W}` is a Riesz sequence in `ker(P)`.
    pub riesz_verdict: bool,
    /// Lower frame bound; `None` when `range(P) = 0`.
    pub a: Option<f64>,
    /// Lower Riesz bound; `None` when `W` is empty.
    pub c_squared: Option<f64>,
    pub quantitative_ok: bool,
    pub equivalent: bool,
    pub oracle_frame: bool,
    pub oracle_riesz: bool,
    pub oracle_agrees: bool,
}

impl DualityReport {
    pub fn ok(&self) -> bool {
        self.equivalent && self.oracle_agrees && self.quantitative_ok
    }
}

fn select_columns(m: &CMatrix, idx: &[usize]) -> CMatrix {
    CMatrix::from_fn(m.nrows(), idx.len(), |r, c| m[(r, idx[c])])
}

/// Frame verdict for `{P e_i}` and Riesz verdict for `{(I−P) e_j}`, their
/// lower bounds, and an elimination-rank cross-check. Does not fail on a
/// mismatch; see [`prop4_check`].
pub fn prop4_verify(decomp: &OrthoDecomposition) -> Result<DualityReport> {
    let n = decomp.dim();
    let p = decomp.projector();
    let q = CMatrix::identity(n, n) - p;
    let r = decomp.rank();

    let pv = select_columns(p, decomp.v());
    let (frame_verdict, a) = if r == 0 {
        (true, None)
    } else {
        let basis = range_basis(p)?;
        let sv = linalg::singular_values(&(basis.adjoint() * &pv))?;
        let smin = linalg::kth_singular_value(&sv, basis.ncols());
        (numerically_positive(smin, PROJECTOR_NORM, n), Some(smin * smin))
    };

    let qw = select_columns(&q, decomp.w());
    let (riesz_verdict, c_squared) = if decomp.w().is_empty() {
        (true, None)
    } else {
        let sv = linalg::singular_values(&qw)?;
        let smin = linalg::kth_singular_value(&sv, decomp.w().len());
        (numerically_positive(smin, PROJECTOR_NORM, n), Some(smin * smin))
    };

    let oracle_frame = linalg::elimination_rank_abs(&pv, ORACLE_TOL * PROJECTOR_NORM) == r;
    let oracle_riesz =
        decomp.w().is_empty() || linalg::elimination_rank_abs(&qw, ORACLE_TOL * PROJECTOR_NORM) == decomp.w().len();
    let quantitative_ok = match (frame_verdict, a, c_squared) {
        (true, Some(a), Some(c2)) => c2 >= a / (1.0 + a) - QUANTITATIVE_SLACK,
        _ => true,
    };
    Ok(DualityReport {
        frame_verdict,
        riesz_verdict,
        a,
        c_squared,
        quantitative_ok,
        equivalent: frame_verdict == riesz_verdict,
        oracle_frame,
        oracle_riesz,
        oracle_agrees: oracle_frame == frame_verdict && oracle_riesz == riesz_verdict,
    })
}

/// [`prop4_verify`], failing with the serialized instance on any mismatch.
pub fn prop4_check(decomp: &OrthoDecomposition) -> Result<DualityReport> {
    let report = prop4_verify(decomp)?;
    if !report.ok() {
        return Err(Error::DualityViolation(
            json!({ "instance": decomp.to_json(), "report": report }).to_string(),
        ));
    }
    Ok(report)
}

/// Sample positions `Λ` and frequencies `S` in `Z_N`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DiscreteModel {
    pub n: usize,
    pub lambda: Vec<usize>,
    pub s: Vec<usize>,
}

fn normalize_subset(n: usize, mut v: Vec<usize>, what: &str) -> Result<Vec<usize>> {
    v.sort_unstable();
    if let Some(&bad) = v.iter().find(|&&x| x >= n) {
        return Err(Error::InvalidModel(format!("{what} element {bad} is not below N = {n}")));
    }
    if let Some(p) = v.windows(2).find(|p| p[0] == p[1]) {
        return Err(Error::InvalidModel(format!("{what} element {} repeated", p[0])));
    }
    Ok(v)
}

fn complement(n: usize, v: &[usize]) -> Vec<usize> {
    (0..n).filter(|i| v.binary_search(i).is_err()).collect()
}

fn mask_to_subset(mask: u32, n: usize) -> Vec<usize> {
    (0..n).filter(|&i| mask >> i & 1 == 1).collect()
}

impl DiscreteModel {
    pub fn new(n: usize, lambda: Vec<usize>, s: Vec<usize>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidModel("N must be positive".into()));
        }
        Ok(DiscreteModel {
            n,
            lambda: normalize_subset(n, lambda, "Λ")?,
            s: normalize_subset(n, s, "S")?,
        })
    }

    /// `(Z_N∖Λ, Z_N∖S)`.
    pub fn complement(&self) -> DiscreteModel {
        DiscreteModel {
            n: self.n,
            lambda: complement(self.n, &self.lambda),
            s: complement(self.n, &self.s),
        }
    }

    /// `(Λ + a, S + b) mod N`.
    pub fn translate(&self, a: usize, b: usize) -> DiscreteModel {
        let shift = |v: &[usize], k: usize| {
            let mut out: Vec<usize> = v.iter().map(|x| (x + k) % self.n).collect();
            out.sort_unstable();
            out
        };
        DiscreteModel {
            n: self.n,
            lambda: shift(&self.lambda, a),
            s: shift(&self.s, b),
        }
    }

    /// `E[j,k] = exp(2πi·λ_j·s_k/N)/√N`.
    pub fn character_submatrix(&self) -> CMatrix {
        let n = self.n as f64;
        CMatrix::from_fn(self.lambda.len(), self.s.len(), |j, k| {
            let phase = 2.0 * PI * ((self.lambda[j] * self.s[k]) % self.n) as f64 / n;
            Complex64::from_polar(1.0 / n.sqrt(), phase)
        })
    }

    /// `P'[λ,μ] = (1/N) Σ_{s∈S} e^{2πi(λ−μ)s/N}`: the coordinate projector onto
    /// `S` written in the character basis.
    pub fn character_projector(&self) -> CMatrix {
        let n = self.n;
        CMatrix::from_fn(n, n, |l, m| {
            self.s
                .iter()
                .map(|&s| {
                    let k = ((l + n - m) * s) % n;
                    Complex64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64)
                })
                .sum::<Complex64>()
                / n as f64
        })
    }

    fn encode(&self) -> (usize, u32, u32) {
        let mask = |v: &[usize]| v.iter().fold(0u32, |m, &i| m | 1 << i);
        (self.n, mask(&self.lambda), mask(&self.s))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplingCheck {
    pub verdict: bool,
    pub sigma_min: f64,
    pub sigma_max: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InterpolationCheck {
    pub verdict: bool,
    pub sigma_min_row: f64,
    pub sigma_max: f64,
}

/// Restriction of `PW_S` to `Λ` is injective: the `|S|`-th singular value of
/// the character submatrix is numerically positive. `S = ∅` is vacuously
/// sampling.
pub fn discrete_sampling_check(m: &DiscreteModel) -> Result<SamplingCheck> {
    if m.s.is_empty() {
        return Ok(SamplingCheck {
            verdict: true,
            sigma_min: 0.0,
            sigma_max: 0.0,
        });
    }
    let sv = linalg::singular_values(&m.character_submatrix())?;
    let sigma_max = sv.first().copied().unwrap_or(0.0);
    let sigma_min = linalg::kth_singular_value(&sv, m.s.len());
    Ok(SamplingCheck {
        verdict: numerically_positive(sigma_min, sigma_max, m.n) && sigma_max > 0.0,
        sigma_min,
        sigma_max,
    })
}

/// Restriction of `PW_S` to `Λ` is onto: the character submatrix has full
/// row rank. `Λ = ∅` is vacuously interpolating.
pub fn discrete_interpolation_check(m: &DiscreteModel) -> Result<InterpolationCheck> {
    if m.lambda.is_empty() {
        return Ok(InterpolationCheck {
            verdict: true,
            sigma_min_row: 0.0,
            sigma_max: 0.0,
        });
    }
    let sv = linalg::singular_values(&m.character_submatrix())?;
    let sigma_max = sv.first().copied().unwrap_or(0.0);
    let sigma_min_row = linalg::kth_singular_value(&sv, m.lambda.len());
    Ok(InterpolationCheck {
        verdict: numerically_positive(sigma_min_row, sigma_max, m.n) && sigma_max > 0.0,
        sigma_min_row,
        sigma_max,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscreteDualityReport {
    pub model: DiscreteModel,
    pub sampling: SamplingCheck,
    /// Interpolation check for the complement pair.
    pub complement_interpolation: InterpolationCheck,
    /// Frame/Riesz verdicts for `P' = U* D_S U` with `V = Λ`.
    pub decomposition: DualityReport,
    pub consistent: bool,
}

/// Sampling for `(Λ, S)` against interpolation for `(Λᶜ, Sᶜ)`, both also
/// derived from the decomposition `(P', Λ)`.
pub fn discrete_duality_verify(m: &DiscreteModel) -> Result<DiscreteDualityReport> {
    let sampling = discrete_sampling_check(m)?;
    let complement_interpolation = discrete_interpolation_check(&m.complement())?;
    let decomp = OrthoDecomposition::new(m.character_projector(), m.lambda.clone())?;
    let decomposition = prop4_verify(&decomp)?;
    let consistent = sampling.verdict == complement_interpolation.verdict
        && decomposition.frame_verdict == sampling.verdict
        && decomposition.riesz_verdict == complement_interpolation.verdict
        && decomposition.ok();
    Ok(DiscreteDualityReport {
        model: m.clone(),
        sampling,
        complement_interpolation,
        decomposition,
        consistent,
    })
}

/// Largest modulus accepted by [`exhaustive_duality_scan`].
pub const SCAN_MAX_N: usize = 12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub n: usize,
    pub pairs: u64,
    pub sampling: u64,
    pub interpolation: u64,
    pub failures: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanStatistics {
    pub n_max: usize,
    pub rows: Vec<ScanRow>,
    pub total_pairs: u64,
    pub failures: Vec<DiscreteDualityReport>,
}

/// Runs [`discrete_duality_verify`] on every `(Λ, S)` pair for each
/// `1 ≤ N ≤ n_max`; errors with the sorted counterexamples if any fail.
pub fn exhaustive_duality_scan(n_max: usize) -> Result<ScanStatistics> {
    let stats = duality_scan_statistics(n_max)?;
    if !stats.failures.is_empty() {
        return Err(Error::DualityViolation(serde_json::to_string(&stats.failures)?));
    }
    Ok(stats)
}

/// As [`exhaustive_duality_scan`] but returns failures instead of erroring.
pub fn duality_scan_statistics(n_max: usize) -> Result<ScanStatistics> {
    if n_max > SCAN_MAX_N {
        return Err(Error::param("nmax", format!("must be at most {SCAN_MAX_N}, got {n_max}")));
    }
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for n in 1..=n_max {
        let subsets = 1u32 << n;
        let results = (0..subsets * subsets)
            .into_par_iter()
            .map(|code| {
                let m = DiscreteModel {
                    n,
                    lambda: mask_to_subset(code / subsets, n),
                    s: mask_to_subset(code % subsets, n),
                };
                discrete_duality_verify(&m)
            })
            .collect::<Result<Vec<_>>>()?;
        let mut row = ScanRow {
            n,
            pairs: results.len() as u64,
            sampling: 0,
            interpolation: 0,
            failures: 0,
        };
        for r in results {
            row.sampling += u64::from(r.sampling.verdict);
            row.interpolation += u64::from(r.complement_interpolation.verdict);
            if !r.consistent {
                row.failures += 1;
                failures.push(r);
            }
        }
        rows.push(row);
    }
    failures.sort_by_key(|r| r.model.encode());
    Ok(ScanStatistics {
        n_max,
        total_pairs: rows.iter().map(|r| r.pairs).sum(),
        rows,
        failures,
    })
}
