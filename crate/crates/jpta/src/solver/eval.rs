//! Fast evaluation of the normalized per-subcarrier array response
//! `c_k = w_k^H p_k / M` over a decimated grid, plus the objectives and the
//! analytic gradient built on it.
//!
//! Per-point trigonometry is avoided by marching each delay element's phase
//! ramp across the grid with precomputed rotors, one per distinct frequency
//! gap. The grid has a few hundred points at most, so rotor drift stays far
//! below metric tolerances.

use num_complex::Complex64;
use std::f64::consts::TAU;

use super::{JptaArchitecture, Problem};

/// Scratch buffers reused across evaluations of one problem.
pub(crate) struct Workspace {
    /// `cis(φ_m)` per element.
    e: Vec<Complex64>,
    /// `cis(2π f_k τ_d)`, K rows by `n_delay` columns.
    d: Vec<Complex64>,
    /// Normalized response per grid point.
    pub c: Vec<Complex64>,
}

impl Workspace {
    pub fn new(problem: &Problem) -> Self {
        Self {
            e: vec![Complex64::default(); problem.n_elements()],
            d: vec![Complex64::default(); problem.points.len() * problem.n_delay],
            c: vec![Complex64::default(); problem.points.len()],
        }
    }
}

impl Problem {
    /// Fill `ws.c` with `c_k` for the given delays (seconds) and phases.
    pub(crate) fn compute_response(&self, taus: &[f64], phis: &[f64], ws: &mut Workspace) {
        let n_delay = self.n_delay;
        let k_total = self.points.len();
        for (em, &phi) in ws.e.iter_mut().zip(phis) {
            *em = Complex64::from_polar(1.0, phi);
        }
        let f0 = self.points[0].freq_hz;
        let mut rotors = vec![Complex64::default(); self.gaps_hz.len()];
        for (di, &tau) in taus.iter().enumerate() {
            for (ri, &g) in self.gaps_hz.iter().enumerate() {
                rotors[ri] = Complex64::from_polar(1.0, TAU * g * tau);
            }
            let mut cur = Complex64::from_polar(1.0, TAU * f0 * tau);
            for k in 0..k_total {
                ws.d[k * n_delay + di] = cur;
                if k + 1 < k_total {
                    cur *= rotors[self.gap_idx[k]];
                }
            }
        }
        let inv_m = 1.0 / self.n_elements() as f64;
        match self.architecture {
            JptaArchitecture::ThreeD => {
                for k in 0..k_total {
                    let wc = &self.wconj[self.points[k].subband];
                    let drow = &ws.d[k * n_delay..(k + 1) * n_delay];
                    let mut acc = Complex64::default();
                    for m in 0..self.n_elements() {
                        acc += wc[m] * ws.e[m] * drow[m];
                    }
                    ws.c[k] = acc * inv_m;
                }
            }
            JptaArchitecture::AzimuthOnly => {
                let n_cols = self.geometry.n_cols;
                for k in 0..k_total {
                    let wc = &self.wconj[self.points[k].subband];
                    let drow = &ws.d[k * n_delay..(k + 1) * n_delay];
                    let mut acc = Complex64::default();
                    for r in 0..self.geometry.n_rows {
                        for c in 0..n_cols {
                            let m = r * n_cols + c;
                            acc += wc[m] * ws.e[m] * drow[c];
                        }
                    }
                    ws.c[k] = acc * inv_m;
                }
            }
        }
    }

    /// Sum-of-logs gain objective `Σ_k ln(|c_k|² + ε)`, to be maximized.
    pub(crate) fn objective_log_gain(&self, ws: &Workspace, epsilon: f64) -> f64 {
        ws.c.iter().map(|c| (c.norm_sqr() + epsilon).ln()).sum()
    }

    /// Squared-error objective with the per-point common phase optimized out:
    /// `Σ_k min_α Σ_m |p_k[m] − e^{jα} w_k[m]|² = Σ_k 2M(1 − |c_k|)`.
    pub(crate) fn objective_lsq(&self, ws: &Workspace) -> f64 {
        let m = self.n_elements() as f64;
        ws.c.iter().map(|c| 2.0 * m * (1.0 - c.norm())).sum()
    }

    /// Value and gradient of the log-gain objective with respect to the
    /// delays (seconds) and phases (radians). `compute_response` must have
    /// been called for the same `(taus, phis)`.
    pub(crate) fn gradient_log_gain(
        &self,
        ws: &Workspace,
        epsilon: f64,
        grad_tau: &mut [f64],
        grad_phi: &mut [f64],
    ) -> f64 {
        let n_delay = self.n_delay;
        let m_total = self.n_elements();
        let two_over_m = 2.0 / m_total as f64;
        grad_tau.fill(0.0);
        grad_phi.fill(0.0);
        let mut value = 0.0;
        for (k, point) in self.points.iter().enumerate() {
            let c = ws.c[k];
            let g = c.norm_sqr();
            value += (g + epsilon).ln();
            let s = 1.0 / (g + epsilon);
            let cc = c.conj();
            let wc = &self.wconj[point.subband];
            let drow = &ws.d[k * n_delay..(k + 1) * n_delay];
            let f_term = TAU * point.freq_hz;
            for m in 0..m_total {
                let di = match self.architecture {
                    JptaArchitecture::ThreeD => m,
                    JptaArchitecture::AzimuthOnly => m % self.geometry.n_cols,
                };
                let r = wc[m] * ws.e[m] * drow[di];
                // d|c|²/dφ_m = −(2/M)·Im(conj(c)·w*_m·p_m)
                let q = -two_over_m * (cc * r).im;
                grad_phi[m] += s * q;
                grad_tau[di] += s * q * f_term;
            }
        }
        value
    }
}
