//! Two periodic sets with the same densities whose exponential systems on a
//! two-interval spectrum behave differently.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponential;
use crate::sets::{self, UdSet};
use crate::spectra::Spectrum;

const DENSITY_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DisconnectedRow {
    pub window: f64,
    pub points_a: usize,
    pub points_b: usize,
    pub riesz_lower_a: f64,
    pub riesz_lower_b: f64,
    /// Larger over smaller lower bound.
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DisconnectedReport {
    pub spectrum: Spectrum,
    pub set_a: UdSet,
    pub set_b: UdSet,
    pub density: f64,
    pub rows: Vec<DisconnectedRow>,
}

fn periodic_density(field: &str, set: &UdSet) -> Result<(usize, f64)> {
    match set {
        UdSet::Periodic { period, offsets } => Ok((offsets.len(), *period)),
        UdSet::Window { .. } => Err(Error::param(field, "must be periodic")),
    }
}

/// Checks `D±(Λ₁) = D±(Λ₂)` (periodic sets, counts per period compared by
/// cross-multiplication) and tabulates both Riesz lower bounds per window.
pub fn disconnected_spectrum_demo(
    spectrum: &Spectrum,
    set_a: &UdSet,
    set_b: &UdSet,
    windows: &[f64],
) -> Result<DisconnectedReport> {
    let (na, pa) = periodic_density("set_a", set_a)?;
    let (nb, pb) = periodic_density("set_b", set_b)?;
    let (lhs, rhs) = (na as f64 * pb, nb as f64 * pa);
    if (lhs - rhs).abs() > DENSITY_TOL * lhs.abs().max(rhs.abs()) {
        return Err(Error::param(
            "set_b",
            format!("density {nb}/{pb} differs from set_a density {na}/{pa}"),
        ));
    }
    let rows = windows
        .par_iter()
        .map(|&t| {
            let a = set_a.points_in(-t, t);
            let b = set_b.points_in(-t, t);
            let ra = exponential::riesz_bound_estimates(&a, spectrum)?.lower;
            let rb = exponential::riesz_bound_estimates(&b, spectrum)?.lower;
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            Ok(DisconnectedRow {
                window: t,
                points_a: a.len(),
                points_b: b.len(),
                riesz_lower_a: ra,
                riesz_lower_b: rb,
                ratio: if lo > 0.0 { hi / lo } else if hi > 0.0 { f64::INFINITY } else { 1.0 },
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DisconnectedReport {
        spectrum: spectrum.clone(),
        set_a: set_a.clone(),
        set_b: set_b.clone(),
        density: sets::upper_density(set_a, 1.0)?.value,
        rows,
    })
}

/// A periodic pattern scored by its Riesz lower bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessCandidate {
    pub set: UdSet,
    pub riesz_lower: f64,
}

/// Enumerates periodic sets with `count` offsets in `{0, step, 2·step, …}`
/// below `period`, always containing 0, and ranks them by the Riesz lower
/// bound on `[−window, window]` (best first, ties by offsets).
pub fn search_witness(
    spectrum: &Spectrum,
    period: f64,
    count: usize,
    step: f64,
    window: f64,
) -> Result<Vec<WitnessCandidate>> {
    if !(step > 0.0 && period > 0.0 && window > 0.0) || count == 0 {
        return Err(Error::param("search", "period, step, window and count must be positive"));
    }
    let sites = (period / step).round() as usize;
    let mut subsets: Vec<Vec<usize>> = Vec::new();
    let mut current = vec![0usize];
    fn extend(current: &mut Vec<usize>, next: usize, sites: usize, count: usize, out: &mut Vec<Vec<usize>>) {
        if current.len() == count {
            out.push(current.clone());
            return;
        }
        for k in next..sites {
            current.push(k);
            extend(current, k + 1, sites, count, out);
            current.pop();
        }
    }
    extend(&mut current, 1, sites, count, &mut subsets);
    let mut ranked = subsets
        .par_iter()
        .map(|idx| {
            let set = UdSet::periodic(period, idx.iter().map(|&k| k as f64 * step).collect())?;
            let points = set.points_in(-window, window);
            let riesz_lower = exponential::riesz_bound_estimates(&points, spectrum)?.lower;
            Ok(WitnessCandidate { set, riesz_lower })
        })
        .collect::<Result<Vec<_>>>()?;
    ranked.sort_by(|a, b| {
        b.riesz_lower
            .total_cmp(&a.riesz_lower)
            .then_with(|| sets::compare_generators(&a.set, &b.set))
    });
    Ok(ranked)
}
