//! Footprint rasterization and per-asset summary statistics.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::footprint::AssetFootprint;
use crate::geo::GeoTransform;
use crate::kahan::KahanSum;
use crate::scene::{is_no_data, ScalarRaster};

/// One coverage flag per raster pixel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PixelMask {
    width: usize,
    height: usize,
    bits: Vec<bool>,
    covered_count: usize,
}

impl PixelMask {
    pub fn from_bits(width: usize, height: usize, bits: Vec<bool>) -> Result<Self> {
        let expected = width * height;
        if bits.len() != expected {
            return Err(Error::SampleCountMismatch {
                expected,
                actual: bits.len(),
            });
        }
        let covered_count = bits.iter().filter(|&&b| b).count();
        Ok(Self {
            width,
            height,
            bits,
            covered_count,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn is_set(&self, row: usize, col: usize) -> bool {
        self.bits[row * self.width + col]
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// Number of set flags; an empty mask (0) is representable, not an error.
    pub fn covered_count(&self) -> usize {
        self.covered_count
    }
}

/// Even-odd point-in-ring test with the boundary counted as inside.
///
/// The on-boundary test is exact arithmetic (zero cross product); points not
/// exactly on an edge fall through to the ray-crossing rule.
pub(crate) fn point_in_ring(ring: &[(f64, f64)], x: f64, y: f64) -> bool {
    let n = ring.len();
    for i in 0..n - 1 {
        let (ax, ay) = ring[i];
        let (bx, by) = ring[i + 1];
        let cross = (bx - ax) * (y - ay) - (by - ay) * (x - ax);
        if cross == 0.0
            && x >= ax.min(bx)
            && x <= ax.max(bx)
            && y >= ay.min(by)
            && y <= ay.max(by)
        {
            return true;
        }
    }
    let mut inside = false;
    for i in 0..n - 1 {
        let (ax, ay) = ring[i];
        let (bx, by) = ring[i + 1];
        if (ay > y) != (by > y) {
            let x_cross = ax + (y - ay) * (bx - ax) / (by - ay);
            if x < x_cross {
                inside = !inside;
            }
        }
    }
    inside
}

/// Marks every pixel whose center lies inside or on the footprint boundary.
///
/// Pixel centers follow the grid convention of [`GeoTransform`]; the even-odd
/// rule decides interiority and the boundary counts as inside, so thin assets
/// do not lose their only covered pixels.
pub fn rasterize_footprint(
    footprint: &AssetFootprint,
    gt: &GeoTransform,
    width: usize,
    height: usize,
) -> Result<PixelMask> {
    let mut bits = vec![false; width * height];
    if width == 0 || height == 0 {
        return PixelMask::from_bits(width, height, bits);
    }

    // Candidate pixel range from the footprint bounds, padded by one pixel to
    // absorb inverse-mapping roundoff; pixels outside cannot contain the
    // polygon.
    let (min_lon, min_lat, max_lon, max_lat) = footprint.bounding_box();
    let corners = [
        gt.geo_to_pixel(min_lon, min_lat)?,
        gt.geo_to_pixel(min_lon, max_lat)?,
        gt.geo_to_pixel(max_lon, min_lat)?,
        gt.geo_to_pixel(max_lon, max_lat)?,
    ];
    let mut r_min = f64::INFINITY;
    let mut r_max = f64::NEG_INFINITY;
    let mut c_min = f64::INFINITY;
    let mut c_max = f64::NEG_INFINITY;
    for (r, c) in corners {
        r_min = r_min.min(r);
        r_max = r_max.max(r);
        c_min = c_min.min(c);
        c_max = c_max.max(c);
    }
    let clamp = |v: f64, hi: usize| -> usize {
        if v < 0.0 {
            0
        } else if v > (hi - 1) as f64 {
            hi - 1
        } else {
            v as usize
        }
    };
    if r_max < -1.0 || c_max < -1.0 || r_min > height as f64 || c_min > width as f64 {
        return PixelMask::from_bits(width, height, bits);
    }
    let row_lo = clamp(r_min.floor() - 1.0, height);
    let row_hi = clamp(r_max.ceil() + 1.0, height);
    let col_lo = clamp(c_min.floor() - 1.0, width);
    let col_hi = clamp(c_max.ceil() + 1.0, width);

    let ring = footprint.ring();
    for row in row_lo..=row_hi {
        for col in col_lo..=col_hi {
            let (lon, lat) = gt.pixel_to_geo(row as f64, col as f64);
            if point_in_ring(ring, lon, lat) {
                bits[row * width + col] = true;
            }
        }
    }
    PixelMask::from_bits(width, height, bits)
}

/// Per-asset summary of a scalar raster under a footprint mask.
///
/// `std` is the population standard deviation of the masked valid pixels.
/// `two_sigma_adjusted` is the outlier-trimmed maximum: the largest masked
/// value within two standard deviations of the mean, so isolated spikes do
/// not dominate the summary. With `count == 0` every statistic is the
/// no-data sentinel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZonalStats {
    pub count: usize,
    #[serde(with = "nullable_f64")]
    pub min: f64,
    #[serde(with = "nullable_f64")]
    pub max: f64,
    #[serde(with = "nullable_f64")]
    pub mean: f64,
    #[serde(with = "nullable_f64")]
    pub std: f64,
    #[serde(with = "nullable_f64")]
    pub two_sigma_adjusted: f64,
}

impl ZonalStats {
    pub fn empty() -> Self {
        Self {
            count: 0,
            min: f64::NAN,
            max: f64::NAN,
            mean: f64::NAN,
            std: f64::NAN,
            two_sigma_adjusted: f64::NAN,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }
}

/// Summary statistics of the valid raster values under the mask.
pub fn asset_statistics(r: &ScalarRaster, mask: &PixelMask) -> Result<ZonalStats> {
    if r.width() != mask.width() || r.height() != mask.height() {
        return Err(Error::DimensionMismatch {
            context: "zonal statistics".to_string(),
            expected_width: r.width(),
            expected_height: r.height(),
            actual_width: mask.width(),
            actual_height: mask.height(),
        });
    }
    let masked = || {
        r.values()
            .iter()
            .zip(mask.bits().iter())
            .filter(|(v, &m)| m && !is_no_data(**v))
            .map(|(v, _)| *v)
    };

    let mut count = 0usize;
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    let mut sum = KahanSum::new();
    for v in masked() {
        count += 1;
        min = min.min(v);
        max = max.max(v);
        sum.add(v);
    }
    if count == 0 {
        return Ok(ZonalStats::empty());
    }
    // Clamping the mean into [min, max] removes last-ulp rounding drift so the
    // ordering invariant holds even for constant regions.
    let mean = (sum.value() / count as f64).clamp(min, max);
    let mut sq = KahanSum::new();
    for v in masked() {
        let d = v - mean;
        sq.add(d * d);
    }
    let std = (sq.value() / count as f64).max(0.0).sqrt();
    let lo = mean - 2.0 * std;
    let hi = mean + 2.0 * std;
    let mut trimmed = f64::NEG_INFINITY;
    for v in masked() {
        if v >= lo && v <= hi {
            trimmed = trimmed.max(v);
        }
    }
    // At least the values nearest the mean survive the trim, so `trimmed` is
    // always populated when count > 0.
    Ok(ZonalStats {
        count,
        min,
        max,
        mean,
        std,
        two_sigma_adjusted: trimmed,
    })
}

/// Serializes non-finite values (the no-data sentinel) as JSON null.
pub(crate) mod nullable_f64 {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(value: &f64, serializer: S) -> Result<S::Ok, S::Error> {
        if value.is_finite() {
            serializer.serialize_some(value)
        } else {
            serializer.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(deserializer)?.unwrap_or(f64::NAN))
    }
}
