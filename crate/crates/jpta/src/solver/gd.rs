//! Gradient ascent on the dB-averaged beam gain.
//!
//! The objective is `J(τ, φ) = Σ_k log(g_k + ε)` over the design grid, with
//! `g_k = |w_k^H p_k|² / M²` the normalized gain at design subcarrier `k`.
//! Maximizing the sum of logs targets the dB-average effective gain
//! directly. The gradient is analytic; the ascent uses backtracking line
//! search and only ever accepts improvements, so the returned objective is
//! at least the initialization's.
//!
//! Delays enter the search in normalized coordinates `t = 2π·f_ref·τ` with
//! `f_ref` the half-bandwidth, which puts delay and phase steps on the same
//! scale.

use crate::array::{ArrayGeometry, BeamGrid};
use crate::error::{JptaError, Result};
use crate::freq::{CarrierConfig, SubbandPlan};

use super::eval::Workspace;
use super::{ls, wrap_phase, DelayPhaseSolution, JptaArchitecture, Problem, SolverOptions};
use std::f64::consts::TAU;

pub fn solve_gd(
    plan: &SubbandPlan,
    grid: &BeamGrid,
    geometry: &ArrayGeometry,
    architecture: JptaArchitecture,
    config: &CarrierConfig,
    options: &SolverOptions,
) -> Result<DelayPhaseSolution> {
    options.validate()?;
    let objective = GdObjective::new(plan, grid, geometry, architecture, config, options.epsilon_gain)?;
    let init = ls::solve_on(&objective.problem);
    ascend(&objective, &init, options)
}

/// Gradient ascent from an explicit starting solution instead of the
/// least-squares fit. Used to seed a 3D solve from an azimuth-only solution
/// expanded to per-element delays.
pub fn solve_gd_from(
    plan: &SubbandPlan,
    grid: &BeamGrid,
    geometry: &ArrayGeometry,
    architecture: JptaArchitecture,
    config: &CarrierConfig,
    options: &SolverOptions,
    init: &DelayPhaseSolution,
) -> Result<DelayPhaseSolution> {
    options.validate()?;
    if init.architecture != architecture {
        return Err(JptaError::DimensionMismatch(
            "initial solution architecture does not match the solve".into(),
        ));
    }
    init.check_dimensions(geometry)?;
    let objective = GdObjective::new(plan, grid, geometry, architecture, config, options.epsilon_gain)?;
    ascend(&objective, init, options)
}

fn ascend(
    objective: &GdObjective,
    init: &DelayPhaseSolution,
    options: &SolverOptions,
) -> Result<DelayPhaseSolution> {
    let mut x = objective.pack(init);
    let mut grad = vec![0.0; x.len()];
    let mut value = objective.value_and_gradient(&x, &mut grad);
    if !value.is_finite() {
        return Err(JptaError::NumericFailure(format!(
            "objective is {value} at the initial point"
        )));
    }

    let mut trial = vec![0.0; x.len()];
    let mut step = options.gd_step;
    for _ in 0..options.max_iters_gd {
        let mut improved = false;
        let mut new_value = value;
        while step > 1e-14 {
            for ((t, &xi), &gi) in trial.iter_mut().zip(&x).zip(&grad) {
                *t = xi + step * gi;
            }
            let v = objective.value(&trial);
            if v.is_finite() && v > value {
                new_value = v;
                improved = true;
                break;
            }
            step *= options.backtrack_factor;
        }
        if !improved {
            break;
        }
        std::mem::swap(&mut x, &mut trial);
        let gain = new_value - value;
        value = objective.value_and_gradient(&x, &mut grad);
        if !value.is_finite() {
            return Err(JptaError::NumericFailure("objective became non-finite".into()));
        }
        // Let the step recover after backtracks, up to a fixed multiple of
        // the configured size.
        step = (step / options.backtrack_factor).min(8.0 * options.gd_step);
        if gain < options.tol {
            break;
        }
    }
    Ok(objective.unpack(&x))
}

/// The log-gain objective as a plain function of the packed variable vector
/// `[t_0 .. t_{D-1}, φ_0 .. φ_{M-1}]` in normalized coordinates. Public so
/// the analytic gradient can be checked against finite differences.
pub struct GdObjective {
    pub(crate) problem: Problem,
    epsilon: f64,
    f_ref: f64,
    ws: std::cell::RefCell<Workspace>,
}

impl GdObjective {
    pub fn new(
        plan: &SubbandPlan,
        grid: &BeamGrid,
        geometry: &ArrayGeometry,
        architecture: JptaArchitecture,
        config: &CarrierConfig,
        epsilon_gain: f64,
    ) -> Result<Self> {
        let points = plan.design_grid(config)?;
        let problem = Problem::build(plan, grid, geometry, architecture, config, points)?;
        let ws = std::cell::RefCell::new(Workspace::new(&problem));
        Ok(Self {
            problem,
            epsilon: epsilon_gain,
            f_ref: config.bandwidth_hz() / 2.0,
            ws,
        })
    }

    /// Number of packed variables: delay elements plus antenna elements.
    pub fn dim(&self) -> usize {
        self.problem.n_delay + self.problem.n_elements()
    }

    /// Pack a solution into normalized coordinates.
    pub fn pack(&self, solution: &DelayPhaseSolution) -> Vec<f64> {
        let mut x = Vec::with_capacity(self.dim());
        x.extend(solution.taus.iter().map(|&t| t * TAU * self.f_ref));
        x.extend_from_slice(&solution.phis);
        x
    }

    /// Unpack normalized coordinates into a delay-normalized solution.
    pub fn unpack(&self, x: &[f64]) -> DelayPhaseSolution {
        let n_delay = self.problem.n_delay;
        let mut sol = DelayPhaseSolution {
            taus: x[..n_delay].iter().map(|&t| t / (TAU * self.f_ref)).collect(),
            phis: x[n_delay..].iter().map(|&p| wrap_phase(p)).collect(),
            architecture: self.problem.architecture,
            phase_bits: None,
        };
        sol.normalize_delays();
        sol
    }

    fn split_taus(&self, x: &[f64]) -> Vec<f64> {
        x[..self.problem.n_delay]
            .iter()
            .map(|&t| t / (TAU * self.f_ref))
            .collect()
    }

    /// Objective value at packed coordinates `x`.
    pub fn value(&self, x: &[f64]) -> f64 {
        let taus = self.split_taus(x);
        let mut ws = self.ws.borrow_mut();
        self.problem
            .compute_response(&taus, &x[self.problem.n_delay..], &mut ws);
        self.problem.objective_log_gain(&ws, self.epsilon)
    }

    /// Objective value and gradient in packed coordinates.
    pub fn value_and_gradient(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        assert_eq!(grad.len(), self.dim());
        let n_delay = self.problem.n_delay;
        let taus = self.split_taus(x);
        let mut ws = self.ws.borrow_mut();
        self.problem.compute_response(&taus, &x[n_delay..], &mut ws);
        let (grad_tau, grad_phi) = grad.split_at_mut(n_delay);
        let value = self
            .problem
            .gradient_log_gain(&ws, self.epsilon, grad_tau, grad_phi);
        // Chain rule from seconds to normalized delay coordinates.
        for g in grad_tau.iter_mut() {
            *g /= TAU * self.f_ref;
        }
        value
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::solve_ls;

    #[test]
    fn single_beam_stays_at_zero_loss() {
        let geom = ArrayGeometry::new(4, 4, 0.5).unwrap();
        let grid = BeamGrid::default();
        let cfg = CarrierConfig::new(120e3, 128, 16, 8).unwrap();
        let plan = SubbandPlan::equal_split(&cfg, &[42]).unwrap();
        let opts = SolverOptions::default();
        let gd = solve_gd(&plan, &grid, &geom, JptaArchitecture::ThreeD, &cfg, &opts).unwrap();
        // The LS point is already a global optimum; GD must not leave it.
        assert!(gd.taus.iter().all(|&t| t.abs() < 1e-15));
        let obj = GdObjective::new(&plan, &grid, &geom, JptaArchitecture::ThreeD, &cfg, 1e-9)
            .unwrap();
        let j = obj.value(&obj.pack(&gd));
        // g_k = 1 at every point, so J = K·ln(1 + ε) ≈ 0.
        assert!(j > -1e-6, "J = {j}");
    }

    #[test]
    fn objective_never_below_ls_initialization() {
        let geom = ArrayGeometry::new(4, 4, 0.5).unwrap();
        let grid = BeamGrid::default();
        let cfg = CarrierConfig::new(120e3, 256, 16, 8).unwrap();
        let opts = SolverOptions::default();
        for (arch, beams) in [
            (JptaArchitecture::ThreeD, vec![5usize, 90]),
            (JptaArchitecture::AzimuthOnly, vec![20, 27, 33]),
        ] {
            let plan = SubbandPlan::equal_split(&cfg, &beams).unwrap();
            let obj = GdObjective::new(&plan, &grid, &geom, arch, &cfg, opts.epsilon_gain).unwrap();
            let ls = solve_ls(&plan, &grid, &geom, arch, &cfg).unwrap();
            let gd = solve_gd(&plan, &grid, &geom, arch, &cfg, &opts).unwrap();
            let j_ls = obj.value(&obj.pack(&ls));
            let j_gd = obj.value(&obj.pack(&gd));
            assert!(j_gd >= j_ls - 1e-12, "{j_gd} < {j_ls}");
        }
    }

    #[test]
    fn determinism_bitwise() {
        let geom = ArrayGeometry::new(4, 4, 0.5).unwrap();
        let grid = BeamGrid::default();
        let cfg = CarrierConfig::new(120e3, 256, 16, 8).unwrap();
        let opts = SolverOptions::default();
        let plan = SubbandPlan::equal_split(&cfg, &[5, 90]).unwrap();
        let a = solve_gd(&plan, &grid, &geom, JptaArchitecture::ThreeD, &cfg, &opts).unwrap();
        let b = solve_gd(&plan, &grid, &geom, JptaArchitecture::ThreeD, &cfg, &opts).unwrap();
        assert_eq!(a, b);
    }
}
