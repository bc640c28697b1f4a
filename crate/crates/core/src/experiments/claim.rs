//! The density-complement pipeline: round `Λ` to `δZ`, pass to the lattice
//! complement `Γ = δZ∖Λ′` and the spectral complement `G = (0, 2π/δ)∖S`, and
//! track the densities and measures that relate the two sides.

use std::f64::consts::PI;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sets::{self, PerturbationRule, UdSet};
use crate::spectra::Spectrum;

/// Relative tolerance for the density/measure comparison.
const MEASURE_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClaimReport {
    pub delta: f64,
    pub ambient: (f64, f64),
    pub input: UdSet,
    /// Input after the optional seeded perturbation.
    pub perturbed: Option<UdSet>,
    /// `Λ′ ⊂ δZ`.
    pub rounded: UdSet,
    /// `Γ = δZ ∖ Λ′`.
    pub complement: UdSet,
    pub spectrum: Spectrum,
    /// `G = ambient ∖ S`.
    pub complement_spectrum: Spectrum,
    /// `D⁺` of the set that was rounded.
    pub upper_density: f64,
    pub upper_density_rounded: f64,
    pub lower_density_complement: f64,
    pub inverse_delta: f64,
    /// `δ·D⁺(Λ′)` and `δ·D⁻(Γ)` as exact fractions of lattice sites.
    pub sites_rounded: Ratio<i64>,
    pub sites_complement: Ratio<i64>,
    /// `mes(S)/2π`.
    pub measure_ratio: f64,
    /// `mes(G)/2π`.
    pub complement_measure_ratio: f64,
    pub rounding_within_half_delta: bool,
    pub density_preserved: bool,
    /// `D⁺(Λ′) + D⁻(Γ) = 1/δ` exactly.
    pub complementarity_exact: bool,
    /// `D⁻(Λ′) + D⁺(Γ) = 1/δ` exactly.
    pub complementarity_mirror: bool,
    /// `D⁺(Λ) ≤ mes(S)/2π`, equivalently `D⁻(Γ) ≥ mes(G)/2π`.
    pub density_below_measure: bool,
    /// `D⁺(Λ) = mes(S)/2π` within tolerance.
    pub boundary_case: bool,
    /// All identities the pipeline routes through hold.
    pub passes: bool,
}

pub fn claim_pipeline(
    set: &UdSet,
    spectrum: &Spectrum,
    delta: f64,
    ambient: Option<(f64, f64)>,
    perturbation: Option<(f64, u64)>,
) -> Result<ClaimReport> {
    if !set.is_periodic() {
        return Err(Error::InvalidSet("the pipeline needs a periodic set".into()));
    }
    let ambient = ambient.unwrap_or((0.0, 2.0 * PI / delta));
    let complement_spectrum = spectrum.complement_within(ambient.0, ambient.1)?;

    let perturbed = match perturbation {
        Some((bound, seed)) => Some(sets::perturb(set, &PerturbationRule::SeededUniform { delta: bound, seed })?),
        None => None,
    };
    let source = perturbed.as_ref().unwrap_or(set);
    // A set already inside δZ is its own rounding.
    let rounded = match sets::lattice_residues(source, delta) {
        Ok(_) => source.clone(),
        Err(_) => sets::round_to_lattice(source, delta)?,
    };
    let complement = sets::complement_in_lattice(&rounded, delta)?;

    let own = sets::lattice_residues(&rounded, delta)?;
    let other = sets::lattice_residues(&complement, delta)?;
    let sites_rounded = own.site_density();
    let sites_complement = other.site_density();
    let mirror = sets::check_complementarity(&rounded, delta)?;

    let upper_density = sets::upper_density(source, 1.0)?.value;
    let upper_density_rounded = sets::upper_density(&rounded, 1.0)?.value;
    let lower_density_complement = sets::lower_density(&complement, 1.0)?.value;
    let measure_ratio = spectrum.measure() / (2.0 * PI);
    let complement_measure_ratio = complement_spectrum.measure() / (2.0 * PI);

    let density_preserved = match (source, &rounded) {
        (UdSet::Periodic { period: p0, offsets: o0 }, UdSet::Periodic { period: p1, offsets: o1 }) => {
            p0 == p1 && o0.len() == o1.len()
        }
        _ => false,
    };
    let tol = MEASURE_TOL * measure_ratio.max(1.0 / delta);
    let rounding_within_half_delta = sets::is_delta_perturbation(&rounded, source, delta / 2.0 + tol);
    let complementarity_exact = sites_rounded + sites_complement == Ratio::from_integer(1);
    Ok(ClaimReport {
        delta,
        ambient,
        input: set.clone(),
        perturbed: perturbed.clone(),
        rounded,
        complement,
        spectrum: spectrum.clone(),
        complement_spectrum,
        upper_density,
        upper_density_rounded,
        lower_density_complement,
        inverse_delta: 1.0 / delta,
        sites_rounded,
        sites_complement,
        measure_ratio,
        complement_measure_ratio,
        rounding_within_half_delta,
        density_preserved,
        complementarity_exact,
        complementarity_mirror: mirror.passes,
        density_below_measure: upper_density <= measure_ratio + tol,
        boundary_case: (upper_density - measure_ratio).abs() <= tol,
        passes: rounding_within_half_delta && density_preserved && complementarity_exact && mirror.passes,
    })
}
