//! Delay/phase parameter solvers for frequency-selective subband beams.
//!
//! The hardware applies, per antenna element `m`, a delay `τ` (shared along a
//! column for the azimuth-only architecture) and a phase `φ_m`, so the
//! equivalent precoder entry at subcarrier frequency `f` is
//! `exp(j(2π f τ + φ_m))`. The solvers pick delays and phases so that across
//! each subband the precoder tracks the steering vector of that subband's
//! beam, up to an irrelevant per-subcarrier common phase.
//!
//! Three algorithms are provided: a closed-form least-squares line fit of
//! phase versus frequency ([`solve_ls`]), an alternating refinement that
//! re-fits against optimally rotated targets ([`solve_iterative`]), and
//! gradient ascent on the dB-averaged beam gain ([`solve_gd`]).
//!
//! ```
//! use jpta::array::{ArrayGeometry, BeamGrid};
//! use jpta::freq::{CarrierConfig, SubbandPlan};
//! use jpta::solver::{solve_ls, JptaArchitecture};
//!
//! let geom = ArrayGeometry::default();
//! let grid = BeamGrid::default();
//! let cfg = CarrierConfig::default();
//! let plan = SubbandPlan::equal_split(&cfg, &[17]).unwrap();
//! let sol = solve_ls(&plan, &grid, &geom, JptaArchitecture::ThreeD, &cfg).unwrap();
//! // A single-beam plan needs no frequency selectivity: all delays are zero.
//! assert!(sol.taus.iter().all(|&t| t.abs() < 1e-18));
//! ```

mod eval;
mod gd;
mod iterative;
mod ls;

pub(crate) use eval::Workspace;

/// Fresh evaluation scratch space for a problem (crate-internal).
pub(crate) fn eval_workspace(problem: &Problem) -> Workspace {
    Workspace::new(problem)
}

pub use gd::{solve_gd, solve_gd_from, GdObjective};
pub use iterative::solve_iterative;
pub use ls::solve_ls;

use num_complex::Complex64;
use std::f64::consts::TAU;

use crate::array::{steering_phase, steering_vector, ArrayGeometry, BeamGrid, Direction};
use crate::error::{JptaError, Result};
use crate::freq::{subcarrier_frequency, CarrierConfig, GridPoint, SubbandPlan};

/// Delay-element placement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum JptaArchitecture {
    /// One delay element per antenna element.
    ThreeD,
    /// One delay element per antenna column; elevation handled by phases.
    AzimuthOnly,
}

impl JptaArchitecture {
    pub fn n_delay_elements(&self, geometry: &ArrayGeometry) -> usize {
        match self {
            JptaArchitecture::ThreeD => geometry.n_elements(),
            JptaArchitecture::AzimuthOnly => geometry.n_cols,
        }
    }

    /// Delay element feeding antenna element `m` (row-major).
    pub fn delay_index(&self, geometry: &ArrayGeometry, m: usize) -> usize {
        match self {
            JptaArchitecture::ThreeD => m,
            JptaArchitecture::AzimuthOnly => m % geometry.n_cols,
        }
    }
}

/// Beam-design algorithm selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Ls,
    Iterative,
    Gd,
}

impl Algorithm {
    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Ls => "ls",
            Algorithm::Iterative => "iter",
            Algorithm::Gd => "gd",
        }
    }
}

impl std::str::FromStr for Algorithm {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "ls" => Ok(Algorithm::Ls),
            "iter" | "iterative" => Ok(Algorithm::Iterative),
            "gd" => Ok(Algorithm::Gd),
            other => Err(format!("unknown algorithm '{other}' (expected ls|iter|gd)")),
        }
    }
}

/// Iteration and line-search controls for the iterative and GD solvers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub max_iters_iterative: usize,
    pub max_iters_gd: usize,
    /// Initial gradient-ascent step in normalized coordinates.
    pub gd_step: f64,
    pub backtrack_factor: f64,
    /// Guard added to the normalized gain inside the log objective.
    pub epsilon_gain: f64,
    /// Stop when the objective improves by less than this.
    pub tol: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            max_iters_iterative: 50,
            max_iters_gd: 200,
            gd_step: 0.1,
            backtrack_factor: 0.5,
            epsilon_gain: 1e-9,
            tol: 1e-6,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        if self.max_iters_iterative == 0 || self.max_iters_gd == 0 {
            return Err(JptaError::InvalidArgument("iteration limits must be positive".into()));
        }
        if !(self.gd_step > 0.0) || !(self.epsilon_gain > 0.0) || !(self.tol > 0.0) {
            return Err(JptaError::InvalidArgument(
                "gd_step, epsilon_gain, and tol must be positive".into(),
            ));
        }
        if !(self.backtrack_factor > 0.0 && self.backtrack_factor < 1.0) {
            return Err(JptaError::InvalidArgument("backtrack_factor must lie in (0, 1)".into()));
        }
        Ok(())
    }
}

/// A solved JPTA configuration: delays per delay element, a phase per antenna
/// element, and the quantization depth applied to the phases, if any.
#[derive(Debug, Clone, PartialEq)]
pub struct DelayPhaseSolution {
    /// Seconds; length M for `ThreeD`, `n_cols` for `AzimuthOnly`. After
    /// normalization the minimum is zero.
    pub taus: Vec<f64>,
    /// Radians in `[0, 2π)`, length M.
    pub phis: Vec<f64>,
    pub architecture: JptaArchitecture,
    pub phase_bits: Option<u8>,
}

impl DelayPhaseSolution {
    /// Shift all delays so the smallest is exactly zero. Multiplies the
    /// precoder by a per-subcarrier global phase, which no gain metric sees.
    pub fn normalize_delays(&mut self) {
        let min = self.taus.iter().cloned().fold(f64::INFINITY, f64::min);
        if min.is_finite() && min != 0.0 {
            for t in &mut self.taus {
                *t -= min;
            }
        }
    }

    /// Delay spread max(τ) − min(τ) in nanoseconds.
    pub fn delay_spread_ns(&self) -> f64 {
        let max = self.taus.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = self.taus.iter().cloned().fold(f64::INFINITY, f64::min);
        (max - min) * 1e9
    }

    pub fn check_dimensions(&self, geometry: &ArrayGeometry) -> Result<()> {
        let want_tau = self.architecture.n_delay_elements(geometry);
        if self.taus.len() != want_tau {
            return Err(JptaError::DimensionMismatch(format!(
                "{} delays for an architecture needing {want_tau}",
                self.taus.len()
            )));
        }
        if self.phis.len() != geometry.n_elements() {
            return Err(JptaError::DimensionMismatch(format!(
                "{} phases for {} elements",
                self.phis.len(),
                geometry.n_elements()
            )));
        }
        Ok(())
    }
}

/// Reduce an angle to `[0, 2π)`.
pub fn wrap_phase(x: f64) -> f64 {
    let y = x.rem_euclid(TAU);
    if y >= TAU {
        0.0
    } else {
        y
    }
}

/// Desired frequency-domain weights at subcarrier `k`: the steering vector of
/// the beam assigned to `k`'s subband. Frequency-flat within each subband.
pub fn target_weights(
    plan: &SubbandPlan,
    grid: &BeamGrid,
    geometry: &ArrayGeometry,
    k: usize,
) -> Result<Vec<Complex64>> {
    let sb = plan.subband_of(k)?;
    let dir = grid.beam(plan.beam_ids[sb])?;
    Ok(steering_vector(geometry, dir))
}

/// Equivalent per-subcarrier precoder `exp(j(2π f τ(m) + φ_m))` at baseband
/// frequency `f_hz`.
pub fn equivalent_precoder(
    solution: &DelayPhaseSolution,
    geometry: &ArrayGeometry,
    f_hz: f64,
) -> Result<Vec<Complex64>> {
    solution.check_dimensions(geometry)?;
    let m_total = geometry.n_elements();
    let mut out = Vec::with_capacity(m_total);
    for m in 0..m_total {
        let tau = solution.taus[solution.architecture.delay_index(geometry, m)];
        out.push(Complex64::from_polar(1.0, TAU * f_hz * tau + solution.phis[m]));
    }
    Ok(out)
}

/// Snap every phase to the nearest multiple of `2π/2^bits`, ties toward the
/// smaller representative. Delays are untouched.
///
/// ```
/// use jpta::solver::{quantize_phases, DelayPhaseSolution, JptaArchitecture};
///
/// let sol = DelayPhaseSolution {
///     taus: vec![0.0; 4],
///     phis: vec![0.30, 1.00, 3.14, 6.20],
///     architecture: JptaArchitecture::ThreeD,
///     phase_bits: None,
/// };
/// let q = quantize_phases(&sol, 6).unwrap();
/// let step = std::f64::consts::TAU / 64.0;
/// assert!(q.phis.iter().all(|p| (p / step - (p / step).round()).abs() < 1e-9));
/// assert_eq!(q.phase_bits, Some(6));
/// ```
pub fn quantize_phases(solution: &DelayPhaseSolution, bits: u8) -> Result<DelayPhaseSolution> {
    if bits == 0 || bits > 16 {
        return Err(JptaError::InvalidArgument(format!(
            "phase quantizer depth {bits} outside 1..=16"
        )));
    }
    let levels = 1u32 << bits;
    let step = TAU / levels as f64;
    let phis = solution
        .phis
        .iter()
        .map(|&phi| {
            let q = wrap_phase(phi) / step;
            // Nearest level; exact half-steps round down.
            let k = (q - 0.5).ceil() as i64;
            let k = k.rem_euclid(levels as i64);
            k as f64 * step
        })
        .collect();
    Ok(DelayPhaseSolution {
        taus: solution.taus.clone(),
        phis,
        architecture: solution.architecture,
        phase_bits: Some(bits),
    })
}

/// Shared solver-side view of one design problem: the decimated frequency
/// grid, per-subband target phases, and the delay-element layout.
pub(crate) struct Problem {
    pub geometry: ArrayGeometry,
    pub architecture: JptaArchitecture,
    pub points: Vec<GridPoint>,
    pub n_delay: usize,
    /// conj(target weight) per subband and element.
    pub wconj: Vec<Vec<Complex64>>,
    /// Per-delay-element target phase per subband. For `ThreeD` this is the
    /// full steering phase of the element; for `AzimuthOnly` it is the
    /// azimuth factor of the column.
    pub delay_target_phase: Vec<Vec<f64>>,
    /// `AzimuthOnly` only: fixed per-row elevation steering phase.
    pub elev_phase: Vec<f64>,
    /// Distinct frequency gaps between consecutive design points, and the
    /// gap index per consecutive pair (drives the incremental rotors).
    pub gaps_hz: Vec<f64>,
    pub gap_idx: Vec<usize>,
}

impl Problem {
    pub fn build(
        plan: &SubbandPlan,
        grid: &BeamGrid,
        geometry: &ArrayGeometry,
        architecture: JptaArchitecture,
        config: &CarrierConfig,
        points: Vec<GridPoint>,
    ) -> Result<Self> {
        let dirs: Vec<Direction> = plan
            .beam_ids
            .iter()
            .map(|&b| grid.beam(b).copied())
            .collect::<Result<_>>()?;

        // Each subband must contribute at least two grid points.
        for sb in 0..plan.n_subbands() {
            if points.iter().filter(|p| p.subband == sb).count() < 2 {
                return Err(JptaError::DegenerateSubband(sb));
            }
        }

        let mut elev_phase = Vec::new();
        if architecture == JptaArchitecture::AzimuthOnly {
            let v0 = dirs[0].v();
            if dirs.iter().any(|d| (d.v() - v0).abs() > 1e-12) {
                return Err(JptaError::AzimuthOnlyElevationMismatch(
                    dirs.iter().map(|d| d.elevation_deg).collect(),
                ));
            }
            let pitch = geometry.spacing_wavelengths;
            elev_phase = (0..geometry.n_rows)
                .map(|r| -TAU * pitch * r as f64 * v0)
                .collect();
        }

        let wconj = dirs
            .iter()
            .map(|d| {
                steering_vector(geometry, d)
                    .into_iter()
                    .map(|z| z.conj())
                    .collect()
            })
            .collect();

        let n_delay = architecture.n_delay_elements(geometry);
        let pitch = geometry.spacing_wavelengths;
        let delay_target_phase = dirs
            .iter()
            .map(|d| match architecture {
                JptaArchitecture::ThreeD => (0..geometry.n_elements())
                    .map(|m| {
                        steering_phase(geometry, d, m / geometry.n_cols, m % geometry.n_cols)
                    })
                    .collect(),
                JptaArchitecture::AzimuthOnly => (0..geometry.n_cols)
                    .map(|c| -TAU * pitch * c as f64 * d.u())
                    .collect(),
            })
            .collect();

        let mut gaps_hz = Vec::new();
        let mut gap_idx = Vec::with_capacity(points.len().saturating_sub(1));
        for w in points.windows(2) {
            let gap = w[1].freq_hz - w[0].freq_hz;
            let idx = gaps_hz
                .iter()
                .position(|&g: &f64| (g - gap).abs() < 1e-6)
                .unwrap_or_else(|| {
                    gaps_hz.push(gap);
                    gaps_hz.len() - 1
                });
            gap_idx.push(idx);
        }

        // Consistency with the carrier grid.
        debug_assert!(points
            .iter()
            .all(|p| (subcarrier_frequency(config, p.sc).unwrap() - p.freq_hz).abs() < 1e-6));

        Ok(Self {
            geometry: *geometry,
            architecture,
            points,
            n_delay,
            wconj,
            delay_target_phase,
            elev_phase,
            gaps_hz,
            gap_idx,
        })
    }

    pub fn n_elements(&self) -> usize {
        self.geometry.n_elements()
    }

    /// Assemble a full solution from per-delay-element fits. For
    /// `AzimuthOnly`, per-element phases add the fixed elevation phase of the
    /// element's row to the fitted column phase.
    pub fn assemble(&self, taus: Vec<f64>, delay_phis: &[f64]) -> DelayPhaseSolution {
        let phis = match self.architecture {
            JptaArchitecture::ThreeD => delay_phis.iter().map(|&p| wrap_phase(p)).collect(),
            JptaArchitecture::AzimuthOnly => {
                let mut phis = Vec::with_capacity(self.n_elements());
                for r in 0..self.geometry.n_rows {
                    for c in 0..self.geometry.n_cols {
                        phis.push(wrap_phase(self.elev_phase[r] + delay_phis[c]));
                    }
                }
                phis
            }
        };
        let mut sol = DelayPhaseSolution {
            taus,
            phis,
            architecture: self.architecture,
            phase_bits: None,
        };
        sol.normalize_delays();
        sol
    }
}

/// Nearest-branch unwrap: shift each entry by a multiple of 2π so it lands
/// within π of its predecessor. Keeps fitted delays small, since beam gain
/// only depends on phases modulo 2π at each subcarrier.
pub(crate) fn unwrap_nearest(seq: &mut [f64]) {
    for i in 1..seq.len() {
        let d = seq[i] - seq[i - 1];
        seq[i] -= TAU * (d / TAU).round();
    }
}

/// Ordinary least-squares line fit `y ≈ slope·x + intercept`.
pub(crate) fn fit_line(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    debug_assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let xbar = xs.iter().sum::<f64>() / n;
    let ybar = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        let dx = x - xbar;
        sxx += dx * dx;
        sxy += dx * (y - ybar);
    }
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    (slope, ybar - slope * xbar)
}

/// Fit every delay element's phase-versus-frequency line against the target
/// phases, optionally rotated by a per-point common phase `alpha`.
pub(crate) fn fit_delay_lines(
    problem: &Problem,
    alpha: Option<&[f64]>,
) -> (Vec<f64>, Vec<f64>) {
    let xs: Vec<f64> = problem.points.iter().map(|p| p.freq_hz).collect();
    let mut taus = Vec::with_capacity(problem.n_delay);
    let mut phis = Vec::with_capacity(problem.n_delay);
    let mut seq = vec![0.0; problem.points.len()];
    for d in 0..problem.n_delay {
        for (i, p) in problem.points.iter().enumerate() {
            seq[i] = problem.delay_target_phase[p.subband][d]
                + alpha.map_or(0.0, |a| a[i]);
        }
        unwrap_nearest(&mut seq);
        let (slope, intercept) = fit_line(&xs, &seq);
        taus.push(slope / TAU);
        phis.push(intercept);
    }
    (taus, phis)
}

/// Dispatch on [`Algorithm`].
pub fn solve(
    algorithm: Algorithm,
    plan: &SubbandPlan,
    grid: &BeamGrid,
    geometry: &ArrayGeometry,
    architecture: JptaArchitecture,
    config: &CarrierConfig,
    options: &SolverOptions,
) -> Result<DelayPhaseSolution> {
    match algorithm {
        Algorithm::Ls => solve_ls(plan, grid, geometry, architecture, config),
        Algorithm::Iterative => {
            solve_iterative(plan, grid, geometry, architecture, config, options)
        }
        Algorithm::Gd => solve_gd(plan, grid, geometry, architecture, config, options),
    }
}
