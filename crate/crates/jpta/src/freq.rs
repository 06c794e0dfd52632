//! OFDM carrier numerology and the partition of subcarriers into
//! beam-assigned subbands.
//!
//! Frequencies are baseband: the occupied grid is centered on 0 Hz, so
//! `f_k = (k - (n_sc - 1)/2) · scs`. Any carrier offset common to all
//! subcarriers is absorbed by the phase shifters and would only shift every
//! per-antenna phase by a constant; keeping frequencies baseband keeps
//! solved delays in the nanosecond range.
//!
//! ```
//! use jpta::freq::{CarrierConfig, SubbandPlan};
//!
//! let cfg = CarrierConfig::default();
//! let plan = SubbandPlan::equal_split(&cfg, &[10, 100]).unwrap();
//! assert_eq!(plan.n_subbands(), 2);
//! assert_eq!(plan.range(0), 0..1584);
//! assert_eq!(plan.range(1), 1584..3168);
//! ```

use crate::error::{JptaError, Result};

/// At most this many subband beams per slot.
pub const MAX_SUBBANDS: usize = 4;

/// OFDM numerology plus the decimation strides used by solvers (design grid)
/// and metrics (eval grid).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CarrierConfig {
    pub scs_hz: f64,
    pub n_sc: usize,
    pub design_stride: usize,
    pub eval_stride: usize,
}

impl CarrierConfig {
    pub fn new(scs_hz: f64, n_sc: usize, design_stride: usize, eval_stride: usize) -> Result<Self> {
        if !(scs_hz > 0.0) {
            return Err(JptaError::InvalidArgument("subcarrier spacing must be positive".into()));
        }
        if n_sc == 0 || design_stride == 0 || eval_stride == 0 {
            return Err(JptaError::InvalidArgument(
                "subcarrier count and strides must be positive".into(),
            ));
        }
        Ok(Self { scs_hz, n_sc, design_stride, eval_stride })
    }

    /// Occupied bandwidth in Hz.
    pub fn bandwidth_hz(&self) -> f64 {
        self.n_sc as f64 * self.scs_hz
    }
}

impl Default for CarrierConfig {
    /// 120 kHz spacing, 3168 subcarriers (264 resource blocks, 380.16 MHz
    /// occupied within a 400 MHz channel).
    fn default() -> Self {
        Self { scs_hz: 120e3, n_sc: 3168, design_stride: 48, eval_stride: 12 }
    }
}

/// Baseband frequency of subcarrier `k`.
pub fn subcarrier_frequency(config: &CarrierConfig, k: usize) -> Result<f64> {
    if k >= config.n_sc {
        return Err(JptaError::SubcarrierOutOfRange { index: k, n_sc: config.n_sc });
    }
    Ok((k as f64 - (config.n_sc as f64 - 1.0) / 2.0) * config.scs_hz)
}

/// One decimated subcarrier: index, baseband frequency, owning subband.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub sc: usize,
    pub freq_hz: f64,
    pub subband: usize,
}

/// Contiguous partition of `[0, n_sc)` into at most [`MAX_SUBBANDS`] subbands,
/// each carrying one beam-grid index.
#[derive(Debug, Clone, PartialEq)]
pub struct SubbandPlan {
    /// `n_subbands + 1` boundaries, starting at 0 and ending at `n_sc`.
    boundaries: Vec<usize>,
    pub beam_ids: Vec<usize>,
}

impl SubbandPlan {
    /// Equal split of the band across the beams; remainder subcarriers go to
    /// the last subband.
    pub fn equal_split(config: &CarrierConfig, beam_ids: &[usize]) -> Result<Self> {
        let n = beam_ids.len();
        Self::validate_beam_count(n, config.n_sc)?;
        let base = config.n_sc / n;
        let mut splits = vec![base; n];
        splits[n - 1] += config.n_sc % n;
        Self::with_splits(config, beam_ids, &splits)
    }

    /// Explicit subband sizes; must sum to `n_sc`.
    pub fn with_splits(config: &CarrierConfig, beam_ids: &[usize], splits: &[usize]) -> Result<Self> {
        Self::validate_beam_count(beam_ids.len(), config.n_sc)?;
        if splits.len() != beam_ids.len() {
            return Err(JptaError::InvalidArgument(format!(
                "{} splits for {} beams",
                splits.len(),
                beam_ids.len()
            )));
        }
        if splits.iter().any(|&s| s == 0) {
            return Err(JptaError::InvalidArgument("every subband needs at least one subcarrier".into()));
        }
        let total: usize = splits.iter().sum();
        if total != config.n_sc {
            return Err(JptaError::InvalidArgument(format!(
                "splits sum to {total}, expected n_sc = {}",
                config.n_sc
            )));
        }
        let mut boundaries = Vec::with_capacity(splits.len() + 1);
        boundaries.push(0);
        let mut acc = 0;
        for &s in splits {
            acc += s;
            boundaries.push(acc);
        }
        Ok(Self { boundaries, beam_ids: beam_ids.to_vec() })
    }

    fn validate_beam_count(n: usize, n_sc: usize) -> Result<()> {
        if n == 0 {
            return Err(JptaError::InvalidArgument("beam list is empty".into()));
        }
        if n > MAX_SUBBANDS {
            return Err(JptaError::InvalidArgument(format!(
                "{n} beams exceeds the {MAX_SUBBANDS}-beam cap"
            )));
        }
        if n > n_sc {
            return Err(JptaError::InvalidArgument("more beams than subcarriers".into()));
        }
        Ok(())
    }

    pub fn n_subbands(&self) -> usize {
        self.beam_ids.len()
    }

    /// Half-open subcarrier range of subband `i`.
    pub fn range(&self, i: usize) -> std::ops::Range<usize> {
        self.boundaries[i]..self.boundaries[i + 1]
    }

    /// Subband owning subcarrier `k`.
    pub fn subband_of(&self, k: usize) -> Result<usize> {
        let n_sc = *self.boundaries.last().unwrap();
        if k >= n_sc {
            return Err(JptaError::SubcarrierOutOfRange { index: k, n_sc });
        }
        Ok(self.boundaries.partition_point(|&b| b <= k) - 1)
    }

    /// Decimated solver grid: every `design_stride`-th subcarrier of each
    /// subband, always including the subband's first and last subcarrier.
    pub fn design_grid(&self, config: &CarrierConfig) -> Result<Vec<GridPoint>> {
        self.decimated(config, config.design_stride)
    }

    /// Decimated metric grid, on `eval_stride`.
    pub fn eval_grid(&self, config: &CarrierConfig) -> Result<Vec<GridPoint>> {
        self.decimated(config, config.eval_stride)
    }

    fn decimated(&self, config: &CarrierConfig, stride: usize) -> Result<Vec<GridPoint>> {
        if *self.boundaries.last().unwrap() != config.n_sc {
            return Err(JptaError::DimensionMismatch(format!(
                "plan covers {} subcarriers, carrier has {}",
                self.boundaries.last().unwrap(),
                config.n_sc
            )));
        }
        let mut points = Vec::new();
        for (sb, _) in self.beam_ids.iter().enumerate() {
            let r = self.range(sb);
            let mut k = r.start;
            while k < r.end {
                points.push(GridPoint {
                    sc: k,
                    freq_hz: subcarrier_frequency(config, k)?,
                    subband: sb,
                });
                k += stride;
            }
            let last = r.end - 1;
            if points.last().map(|p| p.sc) != Some(last) {
                points.push(GridPoint {
                    sc: last,
                    freq_hz: subcarrier_frequency(config, last)?,
                    subband: sb,
                });
            }
        }
        Ok(points)
    }
}
