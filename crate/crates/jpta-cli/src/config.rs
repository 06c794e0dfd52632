//! Optional JSON run configuration. Every section and field is optional and
//! falls back to the library defaults; unknown keys are fatal so typos in
//! experiment definitions surface immediately.

use std::collections::BTreeMap;
use std::path::Path;

use jpta::array::{ArrayGeometry, BeamGrid};
use jpta::freq::CarrierConfig;
use jpta::solver::SolverOptions;
use jpta::sysim::{LossModel, SimConfig, SnrModel};
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfigFile {
    #[serde(default)]
    pub carrier: CarrierSection,
    #[serde(default)]
    pub array: ArraySection,
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub sim: SimSection,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CarrierSection {
    pub scs_hz: Option<f64>,
    pub n_sc: Option<usize>,
    pub design_stride: Option<usize>,
    pub eval_stride: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArraySection {
    pub n_rows: Option<usize>,
    pub n_cols: Option<usize>,
    pub spacing_wavelengths: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub n_az: Option<usize>,
    pub n_el: Option<usize>,
    pub az_span_deg: Option<(f64, f64)>,
    pub el_span_deg: Option<(f64, f64)>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    pub max_iters_iterative: Option<usize>,
    pub max_iters_gd: Option<usize>,
    pub gd_step: Option<f64>,
    pub backtrack_factor: Option<f64>,
    pub epsilon_gain: Option<f64>,
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimSection {
    pub beams_cap: Option<usize>,
    pub bandwidth_hz: Option<f64>,
    pub snr_fixed_db: Option<f64>,
    pub snr_uniform_db: Option<(f64, f64)>,
    /// dB loss keyed by beam count; shared by all modes of a comparison.
    pub loss_table_db: Option<BTreeMap<usize, f64>>,
}

impl RunConfigFile {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
    }

    pub fn carrier(&self) -> Result<CarrierConfig, CliError> {
        let d = CarrierConfig::default();
        CarrierConfig::new(
            self.carrier.scs_hz.unwrap_or(d.scs_hz),
            self.carrier.n_sc.unwrap_or(d.n_sc),
            self.carrier.design_stride.unwrap_or(d.design_stride),
            self.carrier.eval_stride.unwrap_or(d.eval_stride),
        )
        .map_err(CliError::from)
    }

    pub fn geometry(&self) -> Result<ArrayGeometry, CliError> {
        let d = ArrayGeometry::default();
        ArrayGeometry::new(
            self.array.n_rows.unwrap_or(d.n_rows),
            self.array.n_cols.unwrap_or(d.n_cols),
            self.array.spacing_wavelengths.unwrap_or(d.spacing_wavelengths),
        )
        .map_err(CliError::from)
    }

    pub fn grid(&self) -> Result<BeamGrid, CliError> {
        let d = BeamGrid::default();
        BeamGrid::build(
            self.grid.n_az.unwrap_or(d.n_az),
            self.grid.n_el.unwrap_or(d.n_el),
            self.grid.az_span_deg.unwrap_or(d.az_range_deg),
            self.grid.el_span_deg.unwrap_or(d.el_range_deg),
        )
        .map_err(CliError::from)
    }

    pub fn solver(&self) -> Result<SolverOptions, CliError> {
        let d = SolverOptions::default();
        let options = SolverOptions {
            max_iters_iterative: self.solver.max_iters_iterative.unwrap_or(d.max_iters_iterative),
            max_iters_gd: self.solver.max_iters_gd.unwrap_or(d.max_iters_gd),
            gd_step: self.solver.gd_step.unwrap_or(d.gd_step),
            backtrack_factor: self.solver.backtrack_factor.unwrap_or(d.backtrack_factor),
            epsilon_gain: self.solver.epsilon_gain.unwrap_or(d.epsilon_gain),
            tol: self.solver.tol.unwrap_or(d.tol),
        };
        options.validate()?;
        Ok(options)
    }

    /// Apply the sim section on top of an already-constructed config.
    pub fn apply_sim(&self, config: &mut SimConfig) -> Result<(), CliError> {
        if self.sim.snr_fixed_db.is_some() && self.sim.snr_uniform_db.is_some() {
            return Err(CliError::usage(
                "sim.snr_fixed_db and sim.snr_uniform_db are mutually exclusive".into(),
            ));
        }
        if let Some(cap) = self.sim.beams_cap {
            config.beams_cap = cap;
        }
        if let Some(bw) = self.sim.bandwidth_hz {
            config.bandwidth_hz = bw;
        }
        if let Some(db) = self.sim.snr_fixed_db {
            config.snr_model = SnrModel::FixedDb(db);
        }
        if let Some((lo, hi)) = self.sim.snr_uniform_db {
            config.snr_model = SnrModel::UniformDb { lo_db: lo, hi_db: hi };
        }
        if let Some(table) = &self.sim.loss_table_db {
            config.loss_model = LossModel::Table(table.clone());
        }
        config.carrier = self.carrier()?;
        config.geometry = self.geometry()?;
        config.grid = self.grid()?;
        config.solver = self.solver()?;
        config.validate()?;
        Ok(())
    }
}
