//! Affine georeferencing between pixel and geographic coordinates.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Affine transform tying a raster grid to geographic (lon, lat) coordinates.
///
/// The mapping uses the pixel-center convention: integer `(row, col)` indices
/// address pixel centers, i.e. the continuous grid coordinates `(col + 0.5,
/// row + 0.5)` measured from the upper-left raster corner:
///
/// ```text
/// lon = origin_x + (col + 0.5) * pixel_width  + (row + 0.5) * row_rotation
/// lat = origin_y + (col + 0.5) * col_rotation + (row + 0.5) * pixel_height
/// ```
///
/// For north-up grids the rotation terms are 0 and `pixel_height` is
/// negative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeoTransform {
    /// Longitude of the upper-left raster corner, degrees.
    pub origin_x: f64,
    /// Latitude of the upper-left raster corner, degrees.
    pub origin_y: f64,
    /// Degrees of longitude per column step.
    pub pixel_width: f64,
    /// Degrees of latitude per row step (negative for north-up grids).
    pub pixel_height: f64,
    /// Degrees of longitude per row step.
    #[serde(default)]
    pub row_rotation: f64,
    /// Degrees of latitude per column step.
    #[serde(default)]
    pub col_rotation: f64,
}

impl GeoTransform {
    /// North-up transform without rotation.
    pub fn new(origin_x: f64, origin_y: f64, pixel_width: f64, pixel_height: f64) -> Self {
        Self {
            origin_x,
            origin_y,
            pixel_width,
            pixel_height,
            row_rotation: 0.0,
            col_rotation: 0.0,
        }
    }

    pub fn with_rotation(mut self, row_rotation: f64, col_rotation: f64) -> Self {
        self.row_rotation = row_rotation;
        self.col_rotation = col_rotation;
        self
    }

    /// Unit transform: one-degree pixels anchored at (0, 0), north-up.
    pub fn identity() -> Self {
        Self::new(0.0, 0.0, 1.0, -1.0)
    }

    /// Checks the structural invariants: finite coefficients and non-zero
    /// pixel sizes.
    pub fn validate(&self) -> Result<()> {
        let coeffs = self.coefficients();
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidTransform {
                message: "coefficients must be finite".into(),
            });
        }
        if self.pixel_width == 0.0 || self.pixel_height == 0.0 {
            return Err(Error::InvalidTransform {
                message: "pixel sizes must be non-zero".into(),
            });
        }
        Ok(())
    }

    /// Determinant of the 2x2 linear part.
    pub fn determinant(&self) -> f64 {
        self.pixel_width * self.pixel_height - self.row_rotation * self.col_rotation
    }

    /// Maps a (possibly fractional) pixel index to the geographic position of
    /// its center.
    pub fn pixel_to_geo(&self, row: f64, col: f64) -> (f64, f64) {
        let c = col + 0.5;
        let r = row + 0.5;
        let lon = self.origin_x + c * self.pixel_width + r * self.row_rotation;
        let lat = self.origin_y + c * self.col_rotation + r * self.pixel_height;
        (lon, lat)
    }

    /// Inverse of [`pixel_to_geo`](Self::pixel_to_geo): fractional `(row,
    /// col)` whose center falls on the given position. Integer results land
    /// exactly on pixel centers.
    pub fn geo_to_pixel(&self, lon: f64, lat: f64) -> Result<(f64, f64)> {
        let det = self.determinant();
        if det == 0.0 {
            return Err(Error::SingularTransform);
        }
        let dx = lon - self.origin_x;
        let dy = lat - self.origin_y;
        let c = (dx * self.pixel_height - dy * self.row_rotation) / det;
        let r = (dy * self.pixel_width - dx * self.col_rotation) / det;
        Ok((r - 0.5, c - 0.5))
    }

    /// Coefficients in the conventional order `[origin_x, pixel_width,
    /// row_rotation, origin_y, col_rotation, pixel_height]`; this is also the
    /// order used by the raster container format.
    pub fn coefficients(&self) -> [f64; 6] {
        [
            self.origin_x,
            self.pixel_width,
            self.row_rotation,
            self.origin_y,
            self.col_rotation,
            self.pixel_height,
        ]
    }

    pub fn from_coefficients(c: [f64; 6]) -> Self {
        Self {
            origin_x: c[0],
            pixel_width: c[1],
            row_rotation: c[2],
            origin_y: c[3],
            col_rotation: c[4],
            pixel_height: c[5],
        }
    }

    /// Bit-exact equality on all six coefficients (distinguishes -0.0 from
    /// 0.0, unlike `==`).
    pub fn bit_eq(&self, other: &Self) -> bool {
        self.coefficients()
            .iter()
            .zip(other.coefficients().iter())
            .all(|(a, b)| a.to_bits() == b.to_bits())
    }
}
