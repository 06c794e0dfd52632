//! Closed-form least-squares solver.
//!
//! For each delay element the target phases across the design grid form a
//! piecewise-constant sequence (one level per subband). After a
//! nearest-branch unwrap at the subband boundaries, an ordinary
//! least-squares line of phase versus frequency gives the delay (slope/2π)
//! and phase shifter value (intercept). For the azimuth-only architecture
//! the per-row elevation phases are fixed first and the line fit runs on the
//! per-column azimuth factor.

use crate::array::{ArrayGeometry, BeamGrid};
use crate::error::Result;
use crate::freq::{CarrierConfig, SubbandPlan};

use super::{fit_delay_lines, DelayPhaseSolution, JptaArchitecture, Problem};

pub fn solve_ls(
    plan: &SubbandPlan,
    grid: &BeamGrid,
    geometry: &ArrayGeometry,
    architecture: JptaArchitecture,
    config: &CarrierConfig,
) -> Result<DelayPhaseSolution> {
    let points = plan.design_grid(config)?;
    let problem = Problem::build(plan, grid, geometry, architecture, config, points)?;
    Ok(solve_on(&problem))
}

pub(crate) fn solve_on(problem: &Problem) -> DelayPhaseSolution {
    let (taus, delay_phis) = fit_delay_lines(problem, None);
    problem.assemble(taus, &delay_phis)
}
