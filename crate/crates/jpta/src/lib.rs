//! Joint phase-time array (JPTA) beam design and evaluation.
//!
//! A JPTA RF frontend pairs every phase shifter with a tunable true-time
//! delay, so a single transceiver chain can point different OFDM subbands at
//! different directions within one symbol. This crate covers the full loop:
//!
//! - [`array`]: planar array geometry, steering vectors, and the uniform
//!   beam-grid codebook.
//! - [`freq`]: OFDM numerology and the partition of subcarriers into
//!   beam-assigned subbands.
//! - [`solver`]: least-squares, iterative, and gradient-descent solvers for
//!   the delay and phase parameters, plus phase quantization.
//! - [`metrics`]: beam-gain-loss profiles and Monte Carlo population
//!   statistics.
//! - [`sysim`]: a round-robin scheduling simulation comparing baseline,
//!   azimuth-only, and 3D JPTA cell throughput.
//!
//! ```
//! use jpta::array::{ArrayGeometry, BeamGrid};
//! use jpta::freq::{CarrierConfig, SubbandPlan};
//! use jpta::metrics::{effective_loss, gain_profile};
//! use jpta::solver::{solve_gd, JptaArchitecture, SolverOptions};
//!
//! // Split the band between two azimuth-adjacent beams and solve for the
//! // azimuth-only hardware (one delay element per antenna column).
//! let geometry = ArrayGeometry::default();           // 24V16H
//! let grid = BeamGrid::default();                    // 126 beams
//! let carrier = CarrierConfig::default();            // 120 kHz × 3168 SCs
//! let plan = SubbandPlan::equal_split(&carrier, &[40, 48]).unwrap();
//! let solution = solve_gd(
//!     &plan, &grid, &geometry, JptaArchitecture::AzimuthOnly,
//!     &carrier, &SolverOptions::default(),
//! ).unwrap();
//!
//! let profile = gain_profile(&solution, &plan, &grid, &geometry, &carrier).unwrap();
//! let loss = effective_loss(&profile, 0, solution.delay_spread_ns()).unwrap();
//! assert!(loss.effective_loss_db < 3.0);
//! assert!(solution.delay_spread_ns() < 10.0);
//! ```

pub mod array;
pub mod error;
pub mod freq;
pub mod metrics;
pub mod solver;
pub mod sysim;

pub use error::{JptaError, Result};
