//! Uniformly discrete point sets on the real line.
//!
//! A [`UdSet`] is either an explicit finite list of points observed through a
//! window `[w0, w1]`, or a periodic set `{offset + k·p : k ∈ Z}`. Periodic sets
//! carry exact densities; window sets report finite-`l` estimates.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance for membership in `δZ`.
pub const LATTICE_TOL: f64 = 1e-12;

const WINDOW_EVENT_TOL: f64 = 1e-12;

/// A uniformly discrete point set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawUdSet", into = "RawUdSet")]
pub enum UdSet {
    /// Finite list of points inside an observation window.
    Window { points: Vec<f64>, window: (f64, f64) },
    /// `offsets + pZ`, offsets in `[0, p)`.
    Periodic { period: f64, offsets: Vec<f64> },
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum RawUdSet {
    Window {
        points: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        window: Option<[f64; 2]>,
    },
    Periodic { period: f64, offsets: Vec<f64> },
}

impl TryFrom<RawUdSet> for UdSet {
    type Error = Error;

    fn try_from(raw: RawUdSet) -> Result<Self> {
        match raw {
            RawUdSet::Window { points, window } => match window {
                Some([w0, w1]) => UdSet::window(points, (w0, w1)),
                None => UdSet::from_points(points),
            },
            RawUdSet::Periodic { period, offsets } => UdSet::periodic(period, offsets),
        }
    }
}

impl From<UdSet> for RawUdSet {
    fn from(set: UdSet) -> Self {
        match set {
            UdSet::Window { points, window } => RawUdSet::Window {
                points,
                window: Some([window.0, window.1]),
            },
            UdSet::Periodic { period, offsets } => RawUdSet::Periodic { period, offsets },
        }
    }
}

fn check_increasing(values: &[f64], what: &str) -> Result<()> {
    if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
        return Err(Error::InvalidSet(format!("non-finite {what} {bad}")));
    }
    if let Some(w) = values.windows(2).find(|w| w[1] <= w[0]) {
        return Err(Error::InvalidSet(format!(
            "{what} must be strictly increasing ({} then {})",
            w[0], w[1]
        )));
    }
    Ok(())
}

impl UdSet {
    /// Window set with an explicit observation window.
    pub fn window(points: Vec<f64>, window: (f64, f64)) -> Result<Self> {
        check_increasing(&points, "points")?;
        let (w0, w1) = window;
        if !(w0.is_finite() && w1.is_finite()) || w1 < w0 {
            return Err(Error::InvalidSet(format!("invalid window [{w0}, {w1}]")));
        }
        if let Some(p) = points.iter().find(|&&p| p < w0 || p > w1) {
            return Err(Error::InvalidSet(format!(
                "point {p} lies outside the window [{w0}, {w1}]"
            )));
        }
        Ok(UdSet::Window { points, window })
    }

    /// Window set whose window is the hull of the points. Points are sorted.
    pub fn from_points(mut points: Vec<f64>) -> Result<Self> {
        if points.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidSet("non-finite point".into()));
        }
        points.sort_by(f64::total_cmp);
        let window = match (points.first(), points.last()) {
            (Some(&a), Some(&b)) => (a, b),
            _ => (0.0, 0.0),
        };
        UdSet::window(points, window)
    }

    /// Periodic set `offsets + period·Z`.
    pub fn periodic(period: f64, offsets: Vec<f64>) -> Result<Self> {
        if !(period.is_finite() && period > 0.0) {
            return Err(Error::InvalidSet(format!("period must be positive, got {period}")));
        }
        check_increasing(&offsets, "offsets")?;
        if let Some(o) = offsets.iter().find(|&&o| !(0.0..period).contains(&o)) {
            return Err(Error::InvalidSet(format!(
                "offset {o} lies outside [0, {period})"
            )));
        }
        Ok(UdSet::Periodic { period, offsets })
    }

    /// Periodic set from arbitrary offsets, reduced modulo the period and sorted.
    pub fn periodic_reduced(period: f64, offsets: &[f64]) -> Result<Self> {
        if !(period.is_finite() && period > 0.0) {
            return Err(Error::InvalidSet(format!("period must be positive, got {period}")));
        }
        let mut reduced: Vec<f64> = offsets
            .iter()
            .map(|&o| {
                let r = o.rem_euclid(period);
                if r >= period {
                    0.0
                } else {
                    r
                }
            })
            .collect();
        reduced.sort_by(f64::total_cmp);
        UdSet::periodic(period, reduced)
    }

    /// The lattice `step·Z`.
    pub fn lattice(step: f64) -> Result<Self> {
        UdSet::periodic(step, vec![0.0])
    }

    /// `(offset + step·Z) ∩ [lo, hi]` as a window set over `[lo, hi]`.
    pub fn lattice_window(step: f64, offset: f64, lo: f64, hi: f64) -> Result<Self> {
        if !(step.is_finite() && step > 0.0) {
            return Err(Error::InvalidSet(format!("step must be positive, got {step}")));
        }
        let k0 = ((lo - offset) / step).ceil() as i64;
        let k1 = ((hi - offset) / step).floor() as i64;
        let points = (k0..=k1)
            .map(|k| offset + k as f64 * step)
            .filter(|&p| p >= lo && p <= hi)
            .collect();
        UdSet::window(points, (lo, hi))
    }

    pub fn is_periodic(&self) -> bool {
        matches!(self, UdSet::Periodic { .. })
    }

    pub fn is_empty(&self) -> bool {
        match self {
            UdSet::Window { points, .. } => points.is_empty(),
            UdSet::Periodic { offsets, .. } => offsets.is_empty(),
        }
    }

    /// Points for a window set, offsets for a periodic set.
    pub fn generators(&self) -> &[f64] {
        match self {
            UdSet::Window { points, .. } => points,
            UdSet::Periodic { offsets, .. } => offsets,
        }
    }

    /// All points of the set inside `[lo, hi]`, increasing.
    pub fn points_in(&self, lo: f64, hi: f64) -> Vec<f64> {
        match self {
            UdSet::Window { points, .. } => {
                points.iter().copied().filter(|&p| p >= lo && p <= hi).collect()
            }
            UdSet::Periodic { period, offsets } => {
                let mut out = Vec::new();
                if offsets.is_empty() || hi < lo {
                    return out;
                }
                let k0 = (lo / period).floor() as i64 - 1;
                let k1 = (hi / period).ceil() as i64 + 1;
                for k in k0..=k1 {
                    let base = k as f64 * period;
                    out.extend(
                        offsets
                            .iter()
                            .map(|o| base + o)
                            .filter(|&p| p >= lo && p <= hi),
                    );
                }
                out
            }
        }
    }

    /// Truncation to `[lo, hi]` as a window set.
    pub fn truncate(&self, lo: f64, hi: f64) -> Result<UdSet> {
        UdSet::window(self.points_in(lo, hi), (lo, hi))
    }
}

/// Uniform density estimate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityEstimate {
    /// Points per unit length.
    pub value: f64,
    /// Window length `l` used for the estimate; ignored when `exact`.
    pub window_length: f64,
    /// True for periodic sets, where the density is `#offsets / p`.
    pub exact: bool,
}

/// `d(Λ)`: infimum of distances between distinct points.
pub fn separation_constant(set: &UdSet) -> Result<f64> {
    match set {
        UdSet::Window { points, .. } => {
            if points.len() < 2 {
                return Err(Error::SeparationUndefined);
            }
            Ok(points
                .windows(2)
                .map(|w| w[1] - w[0])
                .fold(f64::INFINITY, f64::min))
        }
        UdSet::Periodic { period, offsets } => {
            let (first, last) = match (offsets.first(), offsets.last()) {
                (Some(&f), Some(&l)) => (f, l),
                _ => return Err(Error::SeparationUndefined),
            };
            let wrap = first + period - last;
            Ok(offsets
                .windows(2)
                .map(|w| w[1] - w[0])
                .fold(wrap, f64::min))
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Extremum {
    Min,
    Max,
}

fn check_length(l: f64) -> Result<()> {
    if !(l.is_finite() && l > 0.0) {
        return Err(Error::InvalidWindowLength(l));
    }
    Ok(())
}

/// Extremal count of points in half-open windows `[a, a+l)` contained in
/// `[w0, w1]`, scanning every position where the count can change.
///
/// Event positions closer than a relative `1e-12` are merged, so that points
/// exactly `l` apart in exact arithmetic are not split by rounding.
fn window_count_extremum(points: &[f64], window: (f64, f64), l: f64, which: Extremum) -> usize {
    let (w0, w1) = window;
    let hi = w1 - l;
    let tol = WINDOW_EVENT_TOL * w0.abs().max(w1.abs()).max(l).max(1.0);
    let below = |a: f64| points.partition_point(|&x| x < a);
    let count = |a: f64| below(a + l - tol) - below(a - tol);

    let mut events: Vec<f64> = vec![w0, hi];
    events.extend(points.iter().flat_map(|&p| [p, p - l]).filter(|&a| a >= w0 && a <= hi));
    events.sort_by(f64::total_cmp);
    let mut candidates: Vec<f64> = Vec::with_capacity(events.len());
    for a in events {
        if candidates.last().is_none_or(|&last| a - last > tol) {
            candidates.push(a);
        }
    }
    let mids: Vec<f64> = candidates.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    let counts = candidates.iter().chain(mids.iter()).map(|&a| count(a));
    match which {
        Extremum::Min => counts.min().unwrap_or(0),
        Extremum::Max => counts.max().unwrap_or(0),
    }
}

fn density(set: &UdSet, l: f64, which: Extremum) -> Result<DensityEstimate> {
    check_length(l)?;
    match set {
        UdSet::Periodic { period, offsets } => Ok(DensityEstimate {
            value: offsets.len() as f64 / period,
            window_length: l,
            exact: true,
        }),
        UdSet::Window { points, window } => {
            let available = window.1 - window.0;
            if l > available {
                return Err(Error::WindowTooLong {
                    requested: l,
                    available,
                });
            }
            let n = window_count_extremum(points, *window, l, which);
            Ok(DensityEstimate {
                value: n as f64 / l,
                window_length: l,
                exact: false,
            })
        }
    }
}

/// Lower uniform density `D⁻`: exact for periodic sets, otherwise the
/// infimum of `#(Λ ∩ [a, a+l)) / l` over windows inside the observation window.
pub fn lower_density(set: &UdSet, l: f64) -> Result<DensityEstimate> {
    density(set, l, Extremum::Min)
}

/// Upper uniform density `D⁺`, the supremum counterpart of [`lower_density`].
pub fn upper_density(set: &UdSet, l: f64) -> Result<DensityEstimate> {
    density(set, l, Extremum::Max)
}

/// Integer index `k` with `x ≈ k·δ`, or `None` when `x` is off the lattice.
pub fn lattice_index(x: f64, delta: f64) -> Option<i64> {
    let q = x / delta;
    let k = q.round();
    if (q - k).abs() <= LATTICE_TOL * q.abs().max(1.0) {
        Some(k as i64)
    } else {
        None
    }
}

/// A periodic subset of `δZ`: residues modulo `modulus` (period `modulus·δ`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeResidues {
    pub modulus: u64,
    pub residues: BTreeSet<u64>,
}

impl LatticeResidues {
    /// Density in units of lattice sites, `#residues / modulus`.
    pub fn site_density(&self) -> Ratio<i64> {
        Ratio::new(self.residues.len() as i64, self.modulus as i64)
    }
}

/// Expresses a periodic set contained in `δZ` through residues.
pub fn lattice_residues(set: &UdSet, delta: f64) -> Result<LatticeResidues> {
    let UdSet::Periodic { period, offsets } = set else {
        return Err(Error::InvalidSet("expected a periodic set".into()));
    };
    check_length(delta)?;
    let modulus = match lattice_index(*period, delta) {
        Some(m) if m > 0 => m as u64,
        _ => {
            return Err(Error::PeriodNotLatticeMultiple {
                period: *period,
                delta,
            })
        }
    };
    let mut residues = BTreeSet::new();
    for &o in offsets {
        let k = lattice_index(o, delta).ok_or(Error::NotOnLattice { point: o, delta })?;
        residues.insert(k.rem_euclid(modulus as i64) as u64);
    }
    Ok(LatticeResidues { modulus, residues })
}

/// `δZ ∖ Λ`: periodic complement over one period, or the complement within the
/// observation window for window sets.
pub fn complement_in_lattice(set: &UdSet, delta: f64) -> Result<UdSet> {
    check_length(delta)?;
    match set {
        UdSet::Periodic { period, .. } => {
            let r = lattice_residues(set, delta)?;
            let offsets = (0..r.modulus)
                .filter(|k| !r.residues.contains(k))
                .map(|k| k as f64 * delta)
                .collect();
            UdSet::periodic(*period, offsets)
        }
        UdSet::Window { points, window } => {
            let mut taken = BTreeSet::new();
            for &p in points {
                taken.insert(lattice_index(p, delta).ok_or(Error::NotOnLattice { point: p, delta })?);
            }
            let k0 = (window.0 / delta).ceil() as i64 - 1;
            let k1 = (window.1 / delta).floor() as i64 + 1;
            let out = (k0..=k1)
                .filter(|k| !taken.contains(k))
                .map(|k| k as f64 * delta)
                .filter(|&x| x >= window.0 && x <= window.1)
                .collect();
            UdSet::window(out, *window)
        }
    }
}

/// Result of checking `D⁻(Λ) + D⁺(δZ∖Λ) = 1/δ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplementarityReport {
    pub delta: f64,
    pub lower_density: f64,
    pub upper_density_complement: f64,
    pub sum: f64,
    pub inverse_delta: f64,
    /// `δ·D⁻(Λ)` as an exact fraction of lattice sites.
    pub lower_sites: Ratio<i64>,
    /// `δ·D⁺(δZ∖Λ)` as an exact fraction of lattice sites.
    pub upper_complement_sites: Ratio<i64>,
    /// Exact equality `lower_sites + upper_complement_sites = 1`.
    pub passes: bool,
}

/// Exact density complementarity for a periodic set inside `δZ`.
pub fn check_complementarity(set: &UdSet, delta: f64) -> Result<ComplementarityReport> {
    let complement = complement_in_lattice(set, delta)?;
    let own = lattice_residues(set, delta)?;
    let other = lattice_residues(&complement, delta)?;
    let lower_sites = own.site_density();
    let upper_complement_sites = other.site_density();
    let lower = lower_density(set, 1.0)?.value;
    let upper = upper_density(&complement, 1.0)?.value;
    Ok(ComplementarityReport {
        delta,
        lower_density: lower,
        upper_density_complement: upper,
        sum: lower + upper,
        inverse_delta: 1.0 / delta,
        lower_sites,
        upper_complement_sites,
        passes: lower_sites + upper_complement_sites == Ratio::from_integer(1),
    })
}

/// A δ-perturbation: one displacement per generator (window points or
/// periodic offsets), each bounded by `delta`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Perturbation {
    pub delta: f64,
    pub offsets: Vec<f64>,
}

impl Perturbation {
    pub fn new(delta: f64, offsets: Vec<f64>) -> Result<Self> {
        if !(delta.is_finite() && delta >= 0.0) {
            return Err(Error::InvalidPerturbation(format!("bound must be nonnegative, got {delta}")));
        }
        if let Some(e) = offsets.iter().find(|e| !(e.abs() <= delta)) {
            return Err(Error::InvalidPerturbation(format!(
                "displacement {e} exceeds the bound {delta}"
            )));
        }
        Ok(Perturbation { delta, offsets })
    }

    pub fn zero(len: usize) -> Self {
        Perturbation {
            delta: 0.0,
            offsets: vec![0.0; len],
        }
    }

    /// Displacements `f(λ)` for each generator of `set`.
    pub fn from_fn(set: &UdSet, delta: f64, f: impl Fn(f64) -> f64) -> Result<Self> {
        Perturbation::new(delta, set.generators().iter().map(|&x| f(x)).collect())
    }

    /// Uniform displacements in `[-δ, δ]`, drawn as `δ·u` with `u ~ U[-1, 1]`
    /// from a seeded stream, so the same seed scales linearly with `δ`.
    pub fn seeded_uniform(len: usize, delta: f64, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let offsets = (0..len)
            .map(|_| delta * rng.random_range(-1.0..=1.0))
            .collect();
        Perturbation::new(delta, offsets)
    }

    pub fn max_displacement(&self) -> f64 {
        self.offsets.iter().fold(0.0, |m, e| m.max(e.abs()))
    }
}

/// How to perturb a set.
#[derive(Clone, Debug, PartialEq)]
pub enum PerturbationRule {
    Explicit(Perturbation),
    SeededUniform { delta: f64, seed: u64 },
}

/// `{λ + ε_λ}` under the working-regime constraint `δ < d(Λ)/4`.
///
/// Periodic sets are perturbed periodically (one displacement per offset).
pub fn perturb(set: &UdSet, rule: &PerturbationRule) -> Result<UdSet> {
    let n = set.generators().len();
    let pert = match rule {
        PerturbationRule::Explicit(p) => p.clone(),
        PerturbationRule::SeededUniform { delta, seed } => Perturbation::seeded_uniform(n, *delta, *seed)?,
    };
    if pert.offsets.len() != n {
        return Err(Error::InvalidPerturbation(format!(
            "expected {n} displacements, got {}",
            pert.offsets.len()
        )));
    }
    if n >= 2 || set.is_periodic() && n >= 1 {
        let limit = separation_constant(set)? / 4.0;
        if pert.delta >= limit {
            return Err(Error::PerturbationTooLarge {
                delta: pert.delta,
                limit,
            });
        }
    }
    match set {
        UdSet::Window { points, window } => {
            let moved: Vec<f64> = points.iter().zip(&pert.offsets).map(|(p, e)| p + e).collect();
            let w = (
                window.0 - pert.delta,
                window.1 + pert.delta,
            );
            UdSet::window(moved, w)
        }
        UdSet::Periodic { period, offsets } => {
            let moved: Vec<f64> = offsets.iter().zip(&pert.offsets).map(|(p, e)| p + e).collect();
            UdSet::periodic_reduced(*period, &moved)
        }
    }
}

/// Nearest lattice index, exact halves rounding toward −∞.
fn round_half_down(x: f64, delta: f64) -> i64 {
    (x / delta - 0.5).ceil() as i64
}

/// Maps each point to the nearest multiple of `δ` (ties toward −∞).
///
/// Requires `δ ≤ d(Λ)/2`; periodic sets additionally need `p ∈ δZ`.
pub fn round_to_lattice(set: &UdSet, delta: f64) -> Result<UdSet> {
    check_length(delta)?;
    if let Ok(d) = separation_constant(set) {
        if delta > d / 2.0 {
            return Err(Error::LatticeTooCoarse {
                delta,
                limit: d / 2.0,
            });
        }
    }
    match set {
        UdSet::Window { points, window } => {
            let rounded: Vec<f64> = points
                .iter()
                .map(|&p| round_half_down(p, delta) as f64 * delta)
                .collect();
            if let Some(w) = rounded.windows(2).find(|w| w[1] <= w[0]) {
                return Err(Error::RoundingCollision(w[1]));
            }
            UdSet::window(rounded, (window.0 - delta / 2.0, window.1 + delta / 2.0))
        }
        UdSet::Periodic { period, offsets } => {
            let modulus = match lattice_index(*period, delta) {
                Some(m) if m > 0 => m,
                _ => {
                    return Err(Error::PeriodNotLatticeMultiple {
                        period: *period,
                        delta,
                    })
                }
            };
            let mut residues: Vec<i64> = offsets
                .iter()
                .map(|&o| round_half_down(o, delta).rem_euclid(modulus))
                .collect();
            residues.sort_unstable();
            if let Some(w) = residues.windows(2).find(|w| w[0] == w[1]) {
                return Err(Error::RoundingCollision(w[0] as f64 * delta));
            }
            UdSet::periodic(*period, residues.into_iter().map(|k| k as f64 * delta).collect())
        }
    }
}

/// Whether `candidate` is a `δ`-perturbation of `base` (matching points in
/// order; periodic sets are matched up to a cyclic relabelling).
pub fn is_delta_perturbation(candidate: &UdSet, base: &UdSet, delta: f64) -> bool {
    match (candidate, base) {
        (UdSet::Window { points: a, .. }, UdSet::Window { points: b, .. }) => {
            a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= delta)
        }
        (
            UdSet::Periodic { period: pa, offsets: a },
            UdSet::Periodic { period: pb, offsets: b },
        ) => {
            if (pa - pb).abs() > LATTICE_TOL * pa.abs().max(1.0) || a.len() != b.len() {
                return false;
            }
            let n = a.len();
            if n == 0 {
                return true;
            }
            // Distance on the circle of length p.
            let circ = |x: f64, y: f64| {
                let d = (x - y).rem_euclid(*pa);
                d.min(pa - d)
            };
            (0..n).any(|shift| (0..n).all(|i| circ(a[(i + shift) % n], b[i]) <= delta))
        }
        _ => false,
    }
}

/// Orders two sets for deterministic reporting.
pub fn compare_generators(a: &UdSet, b: &UdSet) -> Ordering {
    a.generators()
        .iter()
        .zip(b.generators())
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or_else(|| a.generators().len().cmp(&b.generators().len()))
}
