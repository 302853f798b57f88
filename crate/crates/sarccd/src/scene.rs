//! Complex scenes, derived scalar rasters and co-registered scene stacks.

use chrono::NaiveDate;
use num_complex::Complex32;

use crate::error::{Error, Result};
use crate::geo::GeoTransform;

/// A co-registered single-look-complex style scene: one complex radar sample
/// per pixel, row-major, with georeferencing and an acquisition date.
///
/// Samples are stored as 32-bit float pairs; all derived statistics are
/// accumulated in 64-bit. Scenes are immutable after construction and safe to
/// share across threads.
#[derive(Debug, Clone)]
pub struct ComplexScene {
    width: usize,
    height: usize,
    samples: Vec<Complex32>,
    geotransform: GeoTransform,
    acquisition_date: NaiveDate,
}

impl ComplexScene {
    /// Builds a scene, checking that the sample buffer matches the grid, that
    /// every component is finite and that the geotransform is usable.
    pub fn new(
        width: usize,
        height: usize,
        samples: Vec<Complex32>,
        geotransform: GeoTransform,
        acquisition_date: NaiveDate,
    ) -> Result<Self> {
        let expected = width * height;
        if samples.len() != expected {
            return Err(Error::SampleCountMismatch {
                expected,
                actual: samples.len(),
            });
        }
        if let Some(index) = samples
            .iter()
            .position(|s| !s.re.is_finite() || !s.im.is_finite())
        {
            return Err(Error::NonFiniteSample { index });
        }
        // The container format carries the date as exactly 10 ISO bytes.
        if !(0..=9999).contains(&chrono::Datelike::year(&acquisition_date)) {
            return Err(Error::MalformedDate {
                text: acquisition_date.to_string(),
            });
        }
        geotransform.validate()?;
        Ok(Self {
            width,
            height,
            samples,
            geotransform,
            acquisition_date,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn samples(&self) -> &[Complex32] {
        &self.samples
    }

    pub fn sample(&self, row: usize, col: usize) -> Complex32 {
        self.samples[row * self.width + col]
    }

    pub fn geotransform(&self) -> &GeoTransform {
        &self.geotransform
    }

    pub fn acquisition_date(&self) -> NaiveDate {
        self.acquisition_date
    }

    /// Bit-exact equality on dimensions, samples, geotransform and date.
    pub fn bit_eq(&self, other: &Self) -> bool {
        self.width == other.width
            && self.height == other.height
            && self.acquisition_date == other.acquisition_date
            && self.geotransform.bit_eq(&other.geotransform)
            && self
                .samples
                .iter()
                .zip(other.samples.iter())
                .all(|(a, b)| a.re.to_bits() == b.re.to_bits() && a.im.to_bits() == b.im.to_bits())
    }
}

/// What a scalar raster holds; constrains the admissible value range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RasterKind {
    /// Interferometric coherence magnitude, valid values in [0, 1].
    Coherence,
    /// Coherence difference, valid values in [-1, 1].
    Ccd,
    /// Unconstrained scalar data.
    Other,
}

impl RasterKind {
    pub fn label(&self) -> &'static str {
        match self {
            RasterKind::Coherence => "coherence",
            RasterKind::Ccd => "ccd",
            RasterKind::Other => "other",
        }
    }

    fn range(&self) -> Option<(f64, f64)> {
        match self {
            RasterKind::Coherence => Some((0.0, 1.0)),
            RasterKind::Ccd => Some((-1.0, 1.0)),
            RasterKind::Other => None,
        }
    }
}

/// Is this value the no-data sentinel? No-data pixels are excluded from every
/// statistic downstream.
pub fn is_no_data(value: f64) -> bool {
    value.is_nan()
}

/// A real-valued raster with an explicit no-data sentinel (quiet NaN).
///
/// Values are 64-bit, row-major. Construction enforces the range invariant of
/// the declared [`RasterKind`] on every valid pixel; infinities are rejected
/// outright because they are neither valid data nor no-data.
#[derive(Debug, Clone)]
pub struct ScalarRaster {
    width: usize,
    height: usize,
    values: Vec<f64>,
    geotransform: GeoTransform,
    kind: RasterKind,
}

impl ScalarRaster {
    pub fn new(
        width: usize,
        height: usize,
        values: Vec<f64>,
        geotransform: GeoTransform,
        kind: RasterKind,
    ) -> Result<Self> {
        let expected = width * height;
        if values.len() != expected {
            return Err(Error::SampleCountMismatch {
                expected,
                actual: values.len(),
            });
        }
        geotransform.validate()?;
        let range = kind.range();
        for (index, &value) in values.iter().enumerate() {
            if is_no_data(value) {
                continue;
            }
            if value.is_infinite() {
                return Err(Error::ValueOutOfRange {
                    kind: kind.label().to_string(),
                    index,
                    value,
                    range: "finite values".to_string(),
                });
            }
            if let Some((lo, hi)) = range {
                if value < lo || value > hi {
                    return Err(Error::ValueOutOfRange {
                        kind: kind.label().to_string(),
                        index,
                        value,
                        range: format!("[{lo}, {hi}]"),
                    });
                }
            }
        }
        Ok(Self {
            width,
            height,
            values,
            geotransform,
            kind,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.width + col]
    }

    pub fn is_valid(&self, row: usize, col: usize) -> bool {
        !is_no_data(self.value(row, col))
    }

    /// Iterator over the valid (non-sentinel) values.
    pub fn valid_values(&self) -> impl Iterator<Item = f64> + '_ {
        self.values.iter().copied().filter(|v| !is_no_data(*v))
    }

    pub fn geotransform(&self) -> &GeoTransform {
        &self.geotransform
    }

    pub fn kind(&self) -> RasterKind {
        self.kind
    }

    /// Bit-exact equality, including NaN payload bits of no-data pixels.
    pub fn bit_eq(&self, other: &Self) -> bool {
        self.width == other.width
            && self.height == other.height
            && self.kind == other.kind
            && self.geotransform.bit_eq(&other.geotransform)
            && self
                .values
                .iter()
                .zip(other.values.iter())
                .all(|(a, b)| a.to_bits() == b.to_bits())
    }
}

/// Three co-registered scenes: two pre-event acquisitions and one post-event
/// acquisition, in strict date order.
#[derive(Debug, Clone)]
pub struct SceneStack {
    pub pre1: ComplexScene,
    pub pre2: ComplexScene,
    pub post: ComplexScene,
}

/// Validates and assembles a scene stack.
///
/// Checks run in a fixed order — dimensions, geotransform, dates — and the
/// error names the first offending scene.
pub fn validate_stack(
    pre1: ComplexScene,
    pre2: ComplexScene,
    post: ComplexScene,
) -> Result<SceneStack> {
    for (name, scene) in [("pre2", &pre2), ("post", &post)] {
        if scene.width() != pre1.width() || scene.height() != pre1.height() {
            return Err(Error::DimensionMismatch {
                context: format!("scene {name}"),
                expected_width: pre1.width(),
                expected_height: pre1.height(),
                actual_width: scene.width(),
                actual_height: scene.height(),
            });
        }
    }
    for (name, scene) in [("pre2", &pre2), ("post", &post)] {
        if !scene.geotransform().bit_eq(pre1.geotransform()) {
            return Err(Error::GeotransformMismatch {
                scene: name.to_string(),
            });
        }
    }
    if pre2.acquisition_date() <= pre1.acquisition_date() {
        return Err(Error::DateOrderViolation {
            scene: "pre2".to_string(),
            date: pre2.acquisition_date().to_string(),
            reference: pre1.acquisition_date().to_string(),
        });
    }
    if post.acquisition_date() <= pre2.acquisition_date() {
        return Err(Error::DateOrderViolation {
            scene: "post".to_string(),
            date: post.acquisition_date().to_string(),
            reference: pre2.acquisition_date().to_string(),
        });
    }
    Ok(SceneStack { pre1, pre2, post })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn date(s: &str) -> NaiveDate {
        NaiveDate::parse_from_str(s, "%Y-%m-%d").unwrap()
    }

    fn scene(width: usize, height: usize, date_str: &str) -> ComplexScene {
        let samples = vec![Complex32::new(1.0, 0.5); width * height];
        ComplexScene::new(
            width,
            height,
            samples,
            GeoTransform::identity(),
            date(date_str),
        )
        .unwrap()
    }

    #[test]
    fn stack_accepts_matching_scenes_in_date_order() {
        let stack = validate_stack(
            scene(64, 64, "2022-01-19"),
            scene(64, 64, "2022-02-12"),
            scene(64, 64, "2022-04-01"),
        )
        .unwrap();
        assert_eq!(stack.pre1.width(), 64);
    }

    #[test]
    fn stack_rejects_dimension_mismatch() {
        let err = validate_stack(
            scene(64, 64, "2022-01-19"),
            scene(64, 63, "2022-02-12"),
            scene(64, 64, "2022-04-01"),
        )
        .unwrap_err();
        match err {
            Error::DimensionMismatch { context, .. } => assert!(context.contains("pre2")),
            other => panic!("expected DimensionMismatch, got {other:?}"),
        }
    }

    #[test]
    fn stack_rejects_out_of_order_dates() {
        let err = validate_stack(
            scene(8, 8, "2022-01-19"),
            scene(8, 8, "2022-02-12"),
            scene(8, 8, "2022-02-01"),
        )
        .unwrap_err();
        match err {
            Error::DateOrderViolation { scene, .. } => assert_eq!(scene, "post"),
            other => panic!("expected DateOrderViolation, got {other:?}"),
        }
    }

    #[test]
    fn stack_rejects_geotransform_mismatch() {
        let mut shifted = scene(8, 8, "2022-02-12");
        shifted.geotransform.origin_x = 1.0;
        let err = validate_stack(scene(8, 8, "2022-01-19"), shifted, scene(8, 8, "2022-04-01"))
            .unwrap_err();
        assert!(matches!(err, Error::GeotransformMismatch { scene } if scene == "pre2"));
    }

    #[test]
    fn scene_rejects_dates_outside_the_container_range() {
        let samples = vec![Complex32::new(0.0, 0.0); 1];
        let far_future = NaiveDate::from_ymd_opt(10_000, 1, 1).unwrap();
        let err = ComplexScene::new(1, 1, samples, GeoTransform::identity(), far_future)
            .unwrap_err();
        assert!(matches!(err, Error::MalformedDate { .. }));
    }

    #[test]
    fn scene_rejects_non_finite_samples() {
        let mut samples = vec![Complex32::new(0.0, 0.0); 4];
        samples[2] = Complex32::new(f32::NAN, 0.0);
        let err = ComplexScene::new(2, 2, samples, GeoTransform::identity(), date("2022-01-01"))
            .unwrap_err();
        assert!(matches!(err, Error::NonFiniteSample { index: 2 }));
    }

    #[test]
    fn coherence_raster_rejects_out_of_range_values() {
        let err = ScalarRaster::new(
            2,
            1,
            vec![0.5, 1.2],
            GeoTransform::identity(),
            RasterKind::Coherence,
        )
        .unwrap_err();
        assert!(matches!(err, Error::ValueOutOfRange { index: 1, .. }));
    }

    #[test]
    fn no_data_is_allowed_anywhere() {
        let raster = ScalarRaster::new(
            2,
            1,
            vec![f64::NAN, 0.25],
            GeoTransform::identity(),
            RasterKind::Coherence,
        )
        .unwrap();
        assert!(!raster.is_valid(0, 0));
        assert!(raster.is_valid(0, 1));
        assert_eq!(raster.valid_values().count(), 1);
    }
}
