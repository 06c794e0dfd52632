//! Canonical file formats: the solution JSON, CSV numeric formatting, and
//! atomic output writes.

use std::fmt::Write as _;
use std::path::Path;

use jpta::solver::{Algorithm, DelayPhaseSolution, JptaArchitecture};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// On-disk form of a solved configuration. Delays are carried as fixed-point
/// decimal strings so the emitted bytes are independent of float formatting
/// quirks; loading and re-emitting a file reproduces it byte for byte.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolutionFile {
    pub architecture: String,
    pub taus_ns: Vec<String>,
    pub phis_rad: Vec<f64>,
    pub phase_bits: Option<u8>,
    pub objective: ObjectiveMeta,
}

/// What the solution was asked for and what it achieved.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectiveMeta {
    pub algorithm: String,
    pub beams: Vec<usize>,
    pub subband_widths: Vec<usize>,
    /// Mean effective loss over all subbands on the eval grid, dB.
    pub design_loss_db: f64,
}

impl SolutionFile {
    pub fn from_solution(
        solution: &DelayPhaseSolution,
        algorithm: Algorithm,
        beams: &[usize],
        subband_widths: &[usize],
        design_loss_db: f64,
    ) -> Self {
        Self {
            architecture: arch_name(solution.architecture).to_string(),
            taus_ns: solution.taus.iter().map(|&t| format!("{:.12}", t * 1e9)).collect(),
            phis_rad: solution.phis.clone(),
            phase_bits: solution.phase_bits,
            objective: ObjectiveMeta {
                algorithm: algorithm.name().to_string(),
                beams: beams.to_vec(),
                subband_widths: subband_widths.to_vec(),
                design_loss_db,
            },
        }
    }

    /// Canonical serialization: fixed key order, two-space indent, trailing
    /// newline.
    pub fn to_canonical_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("solution serialization");
        s.push('\n');
        s
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
    }
}

pub fn arch_name(a: JptaArchitecture) -> &'static str {
    match a {
        JptaArchitecture::ThreeD => "3d",
        JptaArchitecture::AzimuthOnly => "ao",
    }
}

pub fn parse_arch(s: &str) -> Result<JptaArchitecture, CliError> {
    match s {
        "ao" => Ok(JptaArchitecture::AzimuthOnly),
        "3d" => Ok(JptaArchitecture::ThreeD),
        other => Err(CliError::usage(format!(
            "unknown architecture '{other}' (expected ao|3d)"
        ))),
    }
}

/// Fixed six-significant-digit decimal formatting, locale-independent.
/// Values at or above 1e6 print with all integer digits and no fraction.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0.00000".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    let prec = (5 - exp).clamp(0, 12) as usize;
    format!("{x:.prec$}")
}

/// Append one CSV row of pre-rendered cells.
pub fn push_row(out: &mut String, cells: &[String]) {
    let _ = writeln!(out, "{}", cells.join(","));
}

/// Write a whole file through a temp file in the same directory, then rename
/// into place. A failed command never leaves a partial output behind.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let dir = dir.unwrap_or_else(|| Path::new("."));
    let io = |e: std::io::Error| CliError::usage(format!("cannot write {}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    use std::io::Write;
    tmp.write_all(contents.as_bytes()).map_err(io)?;
    tmp.persist(path)
        .map_err(|e| CliError::usage(format!("cannot write {}: {}", path.display(), e.error)))?;
    Ok(())
}
