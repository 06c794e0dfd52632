//! Uniform rectangular array geometry, steering vectors, and the beam-grid
//! codebook.
//!
//! Angles are measured from array broadside. A direction maps to the
//! directional cosines `u = sin(az)·cos(el)` (horizontal axis) and
//! `v = sin(el)` (vertical axis), which always satisfy `u² + v² ≤ 1`.
//!
//! ```
//! use jpta::array::{ArrayGeometry, Direction, steering_vector};
//!
//! let geom = ArrayGeometry::new(24, 16, 0.5).unwrap();
//! let broadside = Direction::new(0.0, 0.0).unwrap();
//! let a = steering_vector(&geom, &broadside);
//! assert_eq!(a.len(), 384);
//! // Broadside zeroes every phase: the steering vector is all ones.
//! assert!((a[383].re - 1.0).abs() < 1e-12);
//! ```

use num_complex::Complex64;
use std::f64::consts::TAU;

use crate::error::{JptaError, Result};

/// Planar array layout: `n_rows` vertical by `n_cols` horizontal elements at
/// a uniform pitch given in carrier wavelengths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrayGeometry {
    pub n_rows: usize,
    pub n_cols: usize,
    pub spacing_wavelengths: f64,
}

impl ArrayGeometry {
    pub fn new(n_rows: usize, n_cols: usize, spacing_wavelengths: f64) -> Result<Self> {
        if n_rows == 0 || n_cols == 0 {
            return Err(JptaError::InvalidArgument(
                "array must have at least one row and one column".into(),
            ));
        }
        if !(spacing_wavelengths > 0.0) {
            return Err(JptaError::InvalidArgument(
                "element pitch must be positive".into(),
            ));
        }
        Ok(Self { n_rows, n_cols, spacing_wavelengths })
    }

    /// Total element count M.
    pub fn n_elements(&self) -> usize {
        self.n_rows * self.n_cols
    }

    /// Row-major element index for element (row, col).
    pub fn element_index(&self, row: usize, col: usize) -> usize {
        row * self.n_cols + col
    }
}

impl Default for ArrayGeometry {
    /// The 24V16H base-station array.
    fn default() -> Self {
        Self { n_rows: 24, n_cols: 16, spacing_wavelengths: 0.5 }
    }
}

/// A beam direction relative to array broadside, in degrees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction {
    pub azimuth_deg: f64,
    pub elevation_deg: f64,
}

impl Direction {
    pub fn new(azimuth_deg: f64, elevation_deg: f64) -> Result<Self> {
        for (name, x) in [("azimuth", azimuth_deg), ("elevation", elevation_deg)] {
            if !x.is_finite() || x < -90.0 || x > 90.0 {
                return Err(JptaError::InvalidArgument(format!(
                    "{name} {x} deg outside [-90, 90]"
                )));
            }
        }
        Ok(Self { azimuth_deg, elevation_deg })
    }

    /// Horizontal directional cosine u = sin(az)·cos(el).
    pub fn u(&self) -> f64 {
        self.azimuth_deg.to_radians().sin() * self.elevation_deg.to_radians().cos()
    }

    /// Vertical directional cosine v = sin(el).
    pub fn v(&self) -> f64 {
        self.elevation_deg.to_radians().sin()
    }
}

/// Unit-modulus steering vector for a planar array, row-major over (row, col):
/// element (r, c) carries `exp(-j·2π·pitch·(r·v + c·u))`.
pub fn steering_vector(geometry: &ArrayGeometry, direction: &Direction) -> Vec<Complex64> {
    let u = direction.u();
    let v = direction.v();
    let d = geometry.spacing_wavelengths;
    let mut out = Vec::with_capacity(geometry.n_elements());
    for r in 0..geometry.n_rows {
        for c in 0..geometry.n_cols {
            let phase = -TAU * d * (r as f64 * v + c as f64 * u);
            out.push(Complex64::from_polar(1.0, phase));
        }
    }
    out
}

/// Per-element steering phase (the argument of [`steering_vector`]), unwrapped.
pub fn steering_phase(geometry: &ArrayGeometry, direction: &Direction, row: usize, col: usize) -> f64 {
    -TAU * geometry.spacing_wavelengths
        * (row as f64 * direction.v() + col as f64 * direction.u())
}

/// The codebook: a centered uniform angular grid of `n_az × n_el` beams.
///
/// Beam index `b` lives on elevation row `b / n_az` and azimuth column
/// `b % n_az`. Beams sit at bin centers, so no beam lies exactly on a range
/// endpoint.
///
/// ```
/// use jpta::array::BeamGrid;
///
/// let grid = BeamGrid::default();
/// assert_eq!(grid.len(), 126);
/// // Beams 40 and 48 share elevation row 2: valid for azimuth-only.
/// assert_eq!(grid.elevation_row(40), 2);
/// assert_eq!(grid.elevation_row(48), 2);
/// // Beam 100 is on row 5: mixing it with the above is 3D-only.
/// assert_eq!(grid.elevation_row(100), 5);
/// ```
#[derive(Debug, Clone, PartialEq)]
pub struct BeamGrid {
    beams: Vec<Direction>,
    pub n_az: usize,
    pub n_el: usize,
    pub az_range_deg: (f64, f64),
    pub el_range_deg: (f64, f64),
}

impl BeamGrid {
    pub fn build(
        n_az: usize,
        n_el: usize,
        az_range_deg: (f64, f64),
        el_range_deg: (f64, f64),
    ) -> Result<Self> {
        if n_az == 0 || n_el == 0 {
            return Err(JptaError::InvalidArgument("beam counts must be positive".into()));
        }
        for (name, (lo, hi)) in [("azimuth", az_range_deg), ("elevation", el_range_deg)] {
            if !(lo < hi) {
                return Err(JptaError::InvalidArgument(format!(
                    "{name} range [{lo}, {hi}] is degenerate or inverted"
                )));
            }
        }
        let az_centers = bin_centers(az_range_deg, n_az);
        let el_centers = bin_centers(el_range_deg, n_el);
        let mut beams = Vec::with_capacity(n_az * n_el);
        for &el in &el_centers {
            for &az in &az_centers {
                beams.push(Direction::new(az, el)?);
            }
        }
        Ok(Self { beams, n_az, n_el, az_range_deg, el_range_deg })
    }

    /// Grid of arbitrary directions laid out as a single elevation row.
    /// Used for continuous-angle sampling where no codebook applies.
    pub fn from_directions(beams: Vec<Direction>) -> Result<Self> {
        if beams.is_empty() {
            return Err(JptaError::InvalidArgument("direction list is empty".into()));
        }
        let n_az = beams.len();
        Ok(Self {
            beams,
            n_az,
            n_el: 1,
            az_range_deg: (-90.0, 90.0),
            el_range_deg: (-90.0, 90.0),
        })
    }

    pub fn len(&self) -> usize {
        self.beams.len()
    }

    pub fn is_empty(&self) -> bool {
        self.beams.is_empty()
    }

    pub fn beam(&self, id: usize) -> Result<&Direction> {
        self.beams.get(id).ok_or_else(|| {
            JptaError::InvalidArgument(format!("beam id {id} out of range ({} beams)", self.beams.len()))
        })
    }

    pub fn beams(&self) -> &[Direction] {
        &self.beams
    }

    /// Elevation row of a beam index.
    pub fn elevation_row(&self, id: usize) -> usize {
        id / self.n_az
    }

    /// Azimuth column of a beam index.
    pub fn azimuth_col(&self, id: usize) -> usize {
        id % self.n_az
    }
}

impl Default for BeamGrid {
    /// The 126-beam codebook: 120° horizontal and 25° vertical scan range.
    fn default() -> Self {
        Self::build(18, 7, (-60.0, 60.0), (-12.5, 12.5)).expect("default grid is valid")
    }
}

fn bin_centers((lo, hi): (f64, f64), n: usize) -> Vec<f64> {
    let width = (hi - lo) / n as f64;
    (0..n).map(|i| lo + (i as f64 + 0.5) * width).collect()
}
