//! Spectra: finite unions of disjoint closed intervals.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite union of closed intervals `[aᵢ, bᵢ]` with `aᵢ < bᵢ < aᵢ₊₁`.
///
/// Overlapping or touching intervals are merged on construction.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpectrum", into = "RawSpectrum")]
pub struct Spectrum {
    intervals: Vec<(f64, f64)>,
}

#[derive(Serialize, Deserialize)]
struct RawSpectrum {
    intervals: Vec<[f64; 2]>,
}

impl TryFrom<RawSpectrum> for Spectrum {
    type Error = Error;

    fn try_from(raw: RawSpectrum) -> Result<Self> {
        Spectrum::new(raw.intervals.into_iter().map(|[a, b]| (a, b)).collect())
    }
}

impl From<Spectrum> for RawSpectrum {
    fn from(s: Spectrum) -> Self {
        RawSpectrum {
            intervals: s.intervals.into_iter().map(|(a, b)| [a, b]).collect(),
        }
    }
}

impl Spectrum {
    pub fn new(mut intervals: Vec<(f64, f64)>) -> Result<Self> {
        for &(a, b) in &intervals {
            if !(a.is_finite() && b.is_finite()) {
                return Err(Error::InvalidSpectrum(format!("non-finite interval [{a}, {b}]")));
            }
            if a >= b {
                return Err(Error::InvalidSpectrum(format!(
                    "degenerate or reversed interval [{a}, {b}]"
                )));
            }
        }
        intervals.sort_by(|x, y| x.0.total_cmp(&y.0));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(intervals.len());
        for (a, b) in intervals {
            match merged.last_mut() {
                Some(last) if a <= last.1 => last.1 = last.1.max(b),
                _ => merged.push((a, b)),
            }
        }
        Ok(Spectrum { intervals: merged })
    }

    pub fn empty() -> Self {
        Spectrum::default()
    }

    pub fn interval(a: f64, b: f64) -> Result<Self> {
        Spectrum::new(vec![(a, b)])
    }

    /// `[-σ, σ]`.
    pub fn symmetric(sigma: f64) -> Result<Self> {
        Spectrum::interval(-sigma, sigma)
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// Lebesgue measure.
    pub fn measure(&self) -> f64 {
        self.intervals.iter().map(|(a, b)| b - a).sum()
    }

    /// Largest `|t|` over the spectrum, i.e. the smallest `σ` with `S ⊆ [-σ, σ]`.
    pub fn max_abs(&self) -> f64 {
        self.intervals
            .iter()
            .fold(0.0, |m, (a, b)| m.max(a.abs()).max(b.abs()))
    }

    /// Convex hull `[min, max]`, if nonempty.
    pub fn hull(&self) -> Option<(f64, f64)> {
        Some((self.intervals.first()?.0, self.intervals.last()?.1))
    }

    pub fn contains(&self, t: f64) -> bool {
        self.intervals.iter().any(|&(a, b)| a <= t && t <= b)
    }

    pub fn translate(&self, shift: f64) -> Spectrum {
        Spectrum {
            intervals: self.intervals.iter().map(|(a, b)| (a + shift, b + shift)).collect(),
        }
    }

    /// `s·S` for `s > 0`.
    pub fn scale(&self, s: f64) -> Result<Spectrum> {
        if !(s.is_finite() && s > 0.0) {
            return Err(Error::InvalidSpectrum(format!("scale must be positive, got {s}")));
        }
        Ok(Spectrum {
            intervals: self.intervals.iter().map(|(a, b)| (a * s, b * s)).collect(),
        })
    }

    /// Closure of `[start, end] ∖ S`.
    pub fn complement_within(&self, start: f64, end: f64) -> Result<Spectrum> {
        if !(start.is_finite() && end.is_finite()) || end < start {
            return Err(Error::InvalidSpectrum(format!("invalid ambient [{start}, {end}]")));
        }
        let tol = 1e-12 * start.abs().max(end.abs()).max(1.0);
        if let Some((lo, hi)) = self.hull() {
            if lo < start - tol || hi > end + tol {
                return Err(Error::NotContained { start, end });
            }
        }
        let mut out = Vec::new();
        let mut cursor = start;
        for &(a, b) in &self.intervals {
            let a = a.max(start);
            if a - cursor > tol {
                out.push((cursor, a));
            }
            cursor = b.min(end);
        }
        if end - cursor > tol {
            out.push((cursor, end));
        }
        Ok(Spectrum { intervals: out })
    }
}

impl fmt::Display for Spectrum {
    /// CLI shorthand, `a:b,c:d`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.intervals.iter().map(|(a, b)| format!("{a}:{b}")).collect();
        f.write_str(&parts.join(","))
    }
}

impl FromStr for Spectrum {
    type Err = Error;

    /// Parses `a:b,c:d`; the empty string is the empty spectrum.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(Spectrum::empty());
        }
        let mut intervals = Vec::new();
        for part in s.split(',') {
            let (a, b) = part
                .split_once(':')
                .ok_or_else(|| Error::InvalidSpectrum(format!("expected `a:b`, got `{part}`")))?;
            let parse = |x: &str| {
                x.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::InvalidSpectrum(format!("bad endpoint `{x}`")))
            };
            intervals.push((parse(a)?, parse(b)?));
        }
        Spectrum::new(intervals)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn measure_examples() {
        assert_eq!(Spectrum::symmetric(PI).unwrap().measure(), 2.0 * PI);
        assert_eq!("0:1,2:3".parse::<Spectrum>().unwrap().measure(), 2.0);
        assert_eq!(Spectrum::empty().measure(), 0.0);
    }

    #[test]
    fn translate_examples() {
        let s = Spectrum::symmetric(1.5).unwrap();
        assert_eq!(s.translate(1.5), Spectrum::interval(0.0, 3.0).unwrap());
        assert_eq!(s.translate(0.0), s);
    }

    #[test]
    fn complement_examples() {
        let c = Spectrum::interval(0.0, PI).unwrap().complement_within(0.0, 2.0 * PI).unwrap();
        assert_eq!(c, Spectrum::interval(PI, 2.0 * PI).unwrap());
        let c = Spectrum::interval(0.0, 2.0 * PI).unwrap().complement_within(0.0, 2.0 * PI).unwrap();
        assert!(c.is_empty());
        let s: Spectrum = "0.5:1,2:2.5".parse().unwrap();
        let c = s.complement_within(0.0, 3.0).unwrap();
        assert_eq!(c, "0:0.5,1:2,2.5:3".parse().unwrap());
    }

    #[test]
    fn complement_requires_containment() {
        let s = Spectrum::interval(-1.0, 1.0).unwrap();
        assert!(matches!(s.complement_within(0.0, 2.0), Err(Error::NotContained { .. })));
    }

    #[test]
    fn touching_intervals_merge_and_degenerate_ones_are_rejected() {
        let s: Spectrum = "0:1,1:2,5:6,5.5:7".parse().unwrap();
        assert_eq!(s.intervals(), &[(0.0, 2.0), (5.0, 7.0)]);
        assert!("1:1".parse::<Spectrum>().is_err());
        assert!("2:1".parse::<Spectrum>().is_err());
        assert!("0-1".parse::<Spectrum>().is_err());
    }

    #[test]
    fn json_and_shorthand() {
        let s: Spectrum = serde_json::from_str(r#"{"intervals":[[2,3],[0,1]]}"#).unwrap();
        assert_eq!(s.to_string(), "0:1,2:3");
        assert_eq!(serde_json::to_string(&s).unwrap(), r#"{"intervals":[[0.0,1.0],[2.0,3.0]]}"#);
        assert_eq!("-1.25:1.25".parse::<Spectrum>().unwrap().measure(), 2.5);
    }

    fn arb_spectrum() -> impl Strategy<Value = Spectrum> {
        prop::collection::vec((-10.0f64..10.0, 0.01f64..3.0), 0..6).prop_map(|v| {
            Spectrum::new(v.into_iter().map(|(a, w)| (a, a + w)).collect()).unwrap()
        })
    }

    proptest! {
        #[test]
        fn normalization_is_idempotent(s in arb_spectrum()) {
            let again = Spectrum::new(s.intervals().to_vec()).unwrap();
            prop_assert_eq!(&again, &s);
            prop_assert!(s.intervals().windows(2).all(|w| w[0].1 < w[1].0));
        }

        #[test]
        fn translation_preserves_measure(s in arb_spectrum(), shift in -50.0f64..50.0) {
            prop_assert!((s.translate(shift).measure() - s.measure()).abs() < 1e-10);
        }

        #[test]
        fn complement_is_an_involution(s in arb_spectrum()) {
            let c = s.complement_within(-15.0, 15.0).unwrap();
            prop_assert!((c.measure() + s.measure() - 30.0).abs() < 1e-10);
            let back = c.complement_within(-15.0, 15.0).unwrap();
            prop_assert_eq!(back.intervals().len(), s.intervals().len());
            for (x, y) in back.intervals().iter().zip(s.intervals()) {
                prop_assert!((x.0 - y.0).abs() < 1e-12 && (x.1 - y.1).abs() < 1e-12);
            }
        }
    }
}
