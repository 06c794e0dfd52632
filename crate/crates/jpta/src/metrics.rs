//! Beam-gain evaluation and Monte Carlo loss statistics.
//!
//! The per-subcarrier beam gain is `20·log10(|a^H p| / M)` against the
//! steering vector `a` of the subcarrier's assigned beam, so a perfectly
//! matched phased array scores 0 dB and everything else is a loss. A user's
//! effective loss is the arithmetic mean of its subband's per-subcarrier dB
//! losses.
//!
//! ```
//! use jpta::metrics::{monte_carlo_loss, MonteCarloConfig};
//! use jpta::solver::{Algorithm, JptaArchitecture};
//!
//! let cfg = MonteCarloConfig::new(JptaArchitecture::AzimuthOnly, 2, Algorithm::Ls, 4, 7);
//! let summary = monte_carlo_loss(&cfg).unwrap();
//! assert_eq!(summary.n_samples, 8); // one sample per subband per trial
//! assert!(summary.p90_db >= 0.0);
//! ```

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::array::{ArrayGeometry, BeamGrid, Direction};
use crate::error::{JptaError, Result};
use crate::freq::{CarrierConfig, GridPoint, SubbandPlan};
use crate::solver::{
    quantize_phases, solve, Algorithm, DelayPhaseSolution, JptaArchitecture, Problem,
    SolverOptions,
};

/// Per-eval-subcarrier beam gains in dB (all ≤ 0).
#[derive(Debug, Clone, PartialEq)]
pub struct GainProfile {
    pub points: Vec<GridPoint>,
    pub gains_db: Vec<f64>,
}

/// One user's effective loss and the delay spread of the producing solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossSample {
    pub effective_loss_db: f64,
    pub max_delay_ns: f64,
}

/// Population statistics over loss samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossSummary {
    pub mean_db: f64,
    pub p90_db: f64,
    pub max_delay_ns: f64,
    pub n_samples: usize,
}

/// Evaluate a solution's beam gains on the eval grid.
pub fn gain_profile(
    solution: &DelayPhaseSolution,
    plan: &SubbandPlan,
    grid: &BeamGrid,
    geometry: &ArrayGeometry,
    config: &CarrierConfig,
) -> Result<GainProfile> {
    solution.check_dimensions(geometry)?;
    let points = plan.eval_grid(config)?;
    let problem = Problem::build(plan, grid, geometry, solution.architecture, config, points)?;
    let mut ws = crate::solver::eval_workspace(&problem);
    problem.compute_response(&solution.taus, &solution.phis, &mut ws);
    let gains_db = ws
        .c
        .iter()
        .map(|c| (20.0 * c.norm().log10()).min(0.0))
        .collect();
    Ok(GainProfile { points: problem.points, gains_db })
}

/// Mean dB loss over one subband of a profile, tagged with the producing
/// solution's delay spread.
pub fn effective_loss(
    profile: &GainProfile,
    subband: usize,
    delay_spread_ns: f64,
) -> Result<LossSample> {
    let mut sum = 0.0;
    let mut n = 0usize;
    for (p, &g) in profile.points.iter().zip(&profile.gains_db) {
        if p.subband == subband {
            sum -= g;
            n += 1;
        }
    }
    if n == 0 {
        return Err(JptaError::InvalidArgument(format!(
            "subband {subband} has no eval-grid points"
        )));
    }
    Ok(LossSample {
        effective_loss_db: sum / n as f64,
        max_delay_ns: delay_spread_ns,
    })
}

/// Nearest-rank percentile of an ascending-sorted slice.
pub fn nearest_rank(sorted: &[f64], fraction: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    let n = sorted.len();
    let rank = (fraction * n as f64).ceil() as usize;
    sorted[rank.max(1).min(n) - 1]
}

/// Mean, nearest-rank 90th percentile, and max delay over a sample set.
pub fn summarize(samples: &[LossSample]) -> Result<LossSummary> {
    if samples.is_empty() {
        return Err(JptaError::InvalidArgument("no loss samples to summarize".into()));
    }
    let mut losses: Vec<f64> = samples.iter().map(|s| s.effective_loss_db).collect();
    losses.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mean = losses.iter().sum::<f64>() / losses.len() as f64;
    let max_delay = samples
        .iter()
        .map(|s| s.max_delay_ns)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(LossSummary {
        mean_db: mean,
        p90_db: nearest_rank(&losses, 0.9),
        max_delay_ns: max_delay,
        n_samples: samples.len(),
    })
}

/// Angular sampling of the user population.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AngleSampling {
    /// Uniform over the discrete beam-grid codebook (default).
    Grid,
    /// Uniform in angle over the grid's scan ranges.
    Continuous,
}

/// Configuration of one Monte Carlo cell.
#[derive(Debug, Clone)]
pub struct MonteCarloConfig {
    pub architecture: JptaArchitecture,
    pub n_beams: usize,
    pub algorithm: Algorithm,
    pub n_trials: usize,
    pub seed: u64,
    /// Phase-shifter depth applied after solving; `None` keeps phases
    /// continuous.
    pub phase_bits: Option<u8>,
    pub sampling: AngleSampling,
    pub geometry: ArrayGeometry,
    pub grid: BeamGrid,
    pub carrier: CarrierConfig,
    pub solver: SolverOptions,
}

impl MonteCarloConfig {
    /// Defaults: 24V16H array, 126-beam grid, 6-bit phases, grid sampling.
    pub fn new(
        architecture: JptaArchitecture,
        n_beams: usize,
        algorithm: Algorithm,
        n_trials: usize,
        seed: u64,
    ) -> Self {
        Self {
            architecture,
            n_beams,
            algorithm,
            n_trials,
            seed,
            phase_bits: Some(6),
            sampling: AngleSampling::Grid,
            geometry: ArrayGeometry::default(),
            grid: BeamGrid::default(),
            carrier: CarrierConfig::default(),
            solver: SolverOptions::default(),
        }
    }
}

/// Solve-and-evaluate over a population of uniformly drawn beam sets; one
/// loss sample per subband per trial. Deterministic per seed: each trial
/// draws from its own RNG substream, so results do not depend on how trials
/// are scheduled across workers.
pub fn monte_carlo_loss(config: &MonteCarloConfig) -> Result<LossSummary> {
    if config.n_trials == 0 {
        return Err(JptaError::InvalidArgument("need at least one trial".into()));
    }
    if config.n_beams == 0 || config.n_beams > crate::freq::MAX_SUBBANDS {
        return Err(JptaError::InvalidArgument(format!(
            "n_beams {} outside 1..={}",
            config.n_beams,
            crate::freq::MAX_SUBBANDS
        )));
    }
    if config.architecture == JptaArchitecture::AzimuthOnly
        && config.grid.n_az < config.n_beams
        && config.sampling == AngleSampling::Grid
    {
        return Err(JptaError::InvalidArgument(
            "azimuth-only sampling needs at least n_beams beams per elevation row".into(),
        ));
    }

    let per_trial: Vec<Result<Vec<LossSample>>> = (0..config.n_trials)
        .into_par_iter()
        .map(|trial| run_trial(config, trial as u64))
        .collect();
    let mut samples = Vec::with_capacity(config.n_trials * config.n_beams);
    for r in per_trial {
        samples.extend(r?);
    }
    summarize(&samples)
}

fn run_trial(config: &MonteCarloConfig, trial: u64) -> Result<Vec<LossSample>> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(trial.wrapping_add(1));

    let (grid, beam_ids) = match config.sampling {
        AngleSampling::Grid => {
            let ids = match config.architecture {
                JptaArchitecture::ThreeD => {
                    sample_distinct(&mut rng, config.grid.len(), config.n_beams)
                }
                JptaArchitecture::AzimuthOnly => {
                    let row = rng.gen_range(0..config.grid.n_el);
                    sample_distinct(&mut rng, config.grid.n_az, config.n_beams)
                        .into_iter()
                        .map(|c| row * config.grid.n_az + c)
                        .collect()
                }
            };
            (config.grid.clone(), ids)
        }
        AngleSampling::Continuous => {
            let (az_lo, az_hi) = config.grid.az_range_deg;
            let (el_lo, el_hi) = config.grid.el_range_deg;
            let common_el = rng.gen_range(el_lo..el_hi);
            let dirs: Vec<Direction> = (0..config.n_beams)
                .map(|_| {
                    let az = rng.gen_range(az_lo..az_hi);
                    let el = match config.architecture {
                        JptaArchitecture::AzimuthOnly => common_el,
                        JptaArchitecture::ThreeD => rng.gen_range(el_lo..el_hi),
                    };
                    Direction::new(az, el)
                })
                .collect::<Result<_>>()?;
            let ids = (0..dirs.len()).collect();
            (BeamGrid::from_directions(dirs)?, ids)
        }
    };

    let plan = SubbandPlan::equal_split(&config.carrier, &beam_ids)?;
    let mut solution = solve(
        config.algorithm,
        &plan,
        &grid,
        &config.geometry,
        config.architecture,
        &config.carrier,
        &config.solver,
    )?;
    if let Some(bits) = config.phase_bits {
        solution = quantize_phases(&solution, bits)?;
    }
    let profile = gain_profile(&solution, &plan, &grid, &config.geometry, &config.carrier)?;
    let spread = solution.delay_spread_ns();
    (0..plan.n_subbands())
        .map(|sb| effective_loss(&profile, sb, spread))
        .collect()
}

/// Draw `n` distinct indices from `0..len`, order-insensitive per trial but
/// fully determined by the RNG state.
fn sample_distinct<R: Rng>(rng: &mut R, len: usize, n: usize) -> Vec<usize> {
    let mut picked = Vec::with_capacity(n);
    while picked.len() < n {
        let candidate = rng.gen_range(0..len);
        if !picked.contains(&candidate) {
            picked.push(candidate);
        }
    }
    picked
}
