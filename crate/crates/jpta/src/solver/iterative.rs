//! Alternating refinement of the least-squares fit.
//!
//! Each pass recomputes, per design subcarrier, the common phase that best
//! aligns the current precoder with the target weights, then re-runs the
//! unwrap-and-fit machinery against the rotated targets. The tracked
//! objective is the squared weight error with the common phase optimized
//! out, and the best iterate seen is returned, so the result is never worse
//! than the least-squares initialization.

use crate::array::{ArrayGeometry, BeamGrid};
use crate::error::Result;
use crate::freq::{CarrierConfig, SubbandPlan};

use super::eval::Workspace;
use super::{fit_delay_lines, ls, DelayPhaseSolution, JptaArchitecture, Problem, SolverOptions};

pub fn solve_iterative(
    plan: &SubbandPlan,
    grid: &BeamGrid,
    geometry: &ArrayGeometry,
    architecture: JptaArchitecture,
    config: &CarrierConfig,
    options: &SolverOptions,
) -> Result<DelayPhaseSolution> {
    options.validate()?;
    let points = plan.design_grid(config)?;
    let problem = Problem::build(plan, grid, geometry, architecture, config, points)?;
    let mut ws = Workspace::new(&problem);

    let init = ls::solve_on(&problem);
    problem.compute_response(&init.taus, &init.phis, &mut ws);
    let mut best = init;
    let mut best_obj = problem.objective_lsq(&ws);
    let mut prev_obj = best_obj;

    let mut alpha = vec![0.0; problem.points.len()];
    for _ in 0..options.max_iters_iterative {
        for (a, c) in alpha.iter_mut().zip(&ws.c) {
            *a = c.arg();
        }
        let (taus, delay_phis) = fit_delay_lines(&problem, Some(&alpha));
        let candidate = problem.assemble(taus, &delay_phis);
        problem.compute_response(&candidate.taus, &candidate.phis, &mut ws);
        let obj = problem.objective_lsq(&ws);
        if obj < best_obj {
            best = candidate;
            best_obj = obj;
        }
        if (prev_obj - obj).abs() < options.tol {
            break;
        }
        prev_obj = obj;
    }
    Ok(best)
}
