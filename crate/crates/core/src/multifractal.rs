//! Multifractal analysis of the walk-length ensemble: log-domain moments,
//! mass exponents tau(q), generalized dimensions D_q, the Legendre
//! singularity spectrum f(alpha), and the information entropy.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::walk::LengthSpectrum;

/// Finite-difference step used for the entropy derivative at q = 1.
const ENTROPY_DQ: f64 = 0.01;

/// Uniform grid of inverse-temperature values; 0 and 1 must be grid points
/// because tau(0) = 2 and tau(1) = 0 anchor the analysis.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct QGrid {
    pub q_min: f64,
    pub q_max: f64,
    pub dq: f64,
}

impl QGrid {
    pub fn new(q_min: f64, q_max: f64, dq: f64) -> Result<QGrid> {
        if !dq.is_finite() || dq <= 0.0 {
            return Err(Error::InvalidQGrid {
                reason: format!("dq = {dq} must be positive and finite"),
            });
        }
        if q_min >= q_max {
            return Err(Error::InvalidQGrid {
                reason: format!("q_min = {q_min} must be below q_max = {q_max}"),
            });
        }
        let grid = QGrid { q_min, q_max, dq };
        for anchor in [0.0, 1.0] {
            if !grid.contains(anchor) {
                return Err(Error::InvalidQGrid {
                    reason: format!(
                        "q = {anchor} is not a grid point of [{q_min}, {q_max}] step {dq}"
                    ),
                });
            }
        }
        Ok(grid)
    }

    /// Default analysis grid: [-10, 10] in steps of 0.01.
    pub fn default_grid() -> QGrid {
        QGrid::new(-10.0, 10.0, 0.01).expect("default grid is valid")
    }

    fn contains(&self, q: f64) -> bool {
        if q < self.q_min - 1e-9 || q > self.q_max + 1e-9 {
            return false;
        }
        let steps = (q - self.q_min) / self.dq;
        (steps - steps.round()).abs() * self.dq < 1e-9
    }

    /// Grid values in ascending order. Values within 1e-9 of an integer are
    /// snapped exactly, so the 0 and 1 anchors are hit without rounding.
    pub fn values(&self) -> Vec<f64> {
        let count = ((self.q_max - self.q_min) / self.dq).round() as usize;
        (0..=count)
            .map(|i| {
                let q = self.q_min + i as f64 * self.dq;
                let r = q.round();
                if (q - r).abs() < 1e-9 {
                    r
                } else {
                    q
                }
            })
            .collect()
    }
}

/// One row of the multifractal report.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct TauPoint {
    pub q: f64,
    pub tau: f64,
    pub alpha: f64,
    pub f: f64,
    pub d_q: f64,
}

/// The sampled multifractal curves over a q grid.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TauCurve {
    pub points: Vec<TauPoint>,
}

/// Log-domain moment of order q: ln m(q) = ln Z(q) - q ln Z(1).
pub fn moment(spectrum: &LengthSpectrum, q: f64) -> f64 {
    spectrum.log_partition(q) - q * spectrum.log_partition(1.0)
}

/// Mass exponent at finite generation count:
/// tau(q) = (2 / ln v(N)) * ln m(q), so tau(0) = 2 and tau(1) = 0 exactly.
pub fn tau(spectrum: &LengthSpectrum, q: f64) -> f64 {
    2.0 / (spectrum.count as f64).ln() * moment(spectrum, q)
}

/// Evaluate tau over the grid and derive alpha = -dtau/dq (central
/// differences, one-sided at the ends), f = q alpha + tau, and
/// D_q = tau/(1-q) with the removable singularity at q = 1 replaced by
/// its limit alpha(1).
pub fn spectrum_report(spectrum: &LengthSpectrum, grid: &QGrid) -> TauCurve {
    let qs = grid.values();
    let log_z1 = spectrum.log_partition(1.0);
    let norm = 2.0 / (spectrum.count as f64).ln();
    let taus: Vec<f64> = qs
        .iter()
        .map(|&q| norm * (spectrum.log_partition(q) - q * log_z1))
        .collect();

    let m = qs.len();
    let mut alphas = vec![0.0; m];
    for i in 0..m {
        let (dt, dq) = if i == 0 {
            (taus[1] - taus[0], qs[1] - qs[0])
        } else if i == m - 1 {
            (taus[m - 1] - taus[m - 2], qs[m - 1] - qs[m - 2])
        } else {
            (taus[i + 1] - taus[i - 1], qs[i + 1] - qs[i - 1])
        };
        alphas[i] = -dt / dq;
    }

    let alpha_at_one = qs
        .iter()
        .position(|&q| q == 1.0)
        .map(|i| alphas[i])
        .unwrap_or(f64::NAN);

    let points = (0..m)
        .map(|i| {
            let q = qs[i];
            let d_q = if (q - 1.0).abs() <= grid.dq / 2.0 {
                alpha_at_one
            } else {
                taus[i] / (1.0 - q)
            };
            TauPoint {
                q,
                tau: taus[i],
                alpha: alphas[i],
                f: q * alphas[i] + taus[i],
                d_q,
            }
        })
        .collect();
    TauCurve { points }
}

/// Information entropy S = alpha(1) = -dtau/dq at q = 1, by a central
/// difference with step 0.01; equals the f-curve value at its unit-slope
/// point by the Legendre construction.
pub fn information_entropy(spectrum: &LengthSpectrum) -> f64 {
    let h = ENTROPY_DQ;
    -(tau(spectrum, 1.0 + h) - tau(spectrum, 1.0 - h)) / (2.0 * h)
}

/// Finite-q proxies for the extreme Hoelder exponents: tau(q)/(1-q)
/// evaluated at the two grid ends (the q -> +inf end bounds alpha from
/// below, the q -> -inf end from above).
pub fn alpha_extremes(spectrum: &LengthSpectrum, grid: &QGrid) -> (f64, f64) {
    assert!(
        grid.q_min <= -10.0 + 1e-12 && grid.q_max >= 10.0 - 1e-12,
        "extreme-exponent estimates need a grid spanning at least [-10, 10]"
    );
    let alpha_min_est = tau(spectrum, grid.q_max) / (1.0 - grid.q_max);
    let alpha_max_est = tau(spectrum, grid.q_min) / (1.0 - grid.q_min);
    (alpha_min_est, alpha_max_est)
}
