//! Composite quadrature grids on a spectrum.

use std::f64::consts::PI;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectra::Spectrum;

/// Composite rule used on each interval of the spectrum.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuadratureRule {
    /// Uniform midpoint nodes; exact discrete orthogonality for exponentials
    /// whose frequencies differ by multiples of `2π/length`.
    #[default]
    Midpoint,
    /// Gauss–Legendre panels of the given order.
    GaussLegendre { order: usize },
}

/// Nodes and positive weights discretizing `L²(S)`.
#[derive(Clone, Debug)]
pub struct QuadratureGrid {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// Node index range belonging to each interval of the spectrum.
    pub pieces: Vec<Range<usize>>,
    pub nodes_per_unit: f64,
    pub rule: QuadratureRule,
}

impl QuadratureGrid {
    /// Grid with about `nodes_per_unit` nodes per unit of measure on every
    /// interval (at least one, rounded up to whole panels for Gauss rules).
    pub fn new(spectrum: &Spectrum, nodes_per_unit: f64, rule: QuadratureRule) -> Result<Self> {
        if !(nodes_per_unit.is_finite() && nodes_per_unit > 0.0) {
            return Err(Error::param("resolution", format!("must be positive, got {nodes_per_unit}")));
        }
        let gauss = match rule {
            QuadratureRule::GaussLegendre { order: 0 } => {
                return Err(Error::param("order", "Gauss–Legendre order must be positive"))
            }
            QuadratureRule::GaussLegendre { order } => Some(gauss_legendre(order)),
            QuadratureRule::Midpoint => None,
        };
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        let mut pieces = Vec::new();
        for &(a, b) in spectrum.intervals() {
            let start = nodes.len();
            let len = b - a;
            let wanted = (nodes_per_unit * len).ceil().max(1.0) as usize;
            match &gauss {
                None => {
                    let h = len / wanted as f64;
                    for j in 0..wanted {
                        nodes.push(a + (j as f64 + 0.5) * h);
                        weights.push(h);
                    }
                }
                Some((x, w)) => {
                    let panels = wanted.div_ceil(x.len());
                    let h = len / panels as f64;
                    for p in 0..panels {
                        let mid = a + (p as f64 + 0.5) * h;
                        for (xi, wi) in x.iter().zip(w) {
                            nodes.push(mid + 0.5 * h * xi);
                            weights.push(0.5 * h * wi);
                        }
                    }
                }
            }
            pieces.push(start..nodes.len());
        }
        Ok(QuadratureGrid {
            nodes,
            weights,
            pieces,
            nodes_per_unit,
            rule,
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]` by Newton iteration on the
/// three-term recurrence.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    let n = order;
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        dp = if d != 0.0 { d } else { dp };
        let weight = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = weight;
        w[n - 1 - i] = weight;
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}
