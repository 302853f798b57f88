//! Synthetic speckle pairs with a prescribed per-pixel coherence field.
//!
//! The generator draws fully developed speckle: independent circular complex
//! Gaussians with unit variance per pixel. For a prescribed coherence `g`,
//! the second scene is `g * v + sqrt(1 - g^2) * n` with `v` the first scene's
//! sample and `n` fresh noise, so the population correlation magnitude of the
//! pair equals `g` exactly. This makes the generator the statistical oracle
//! for the coherence estimator: the estimator must converge toward the
//! prescribed field.

use chrono::NaiveDate;
use num_complex::{Complex32, Complex64};

use crate::error::{Error, Result};
use crate::footprint::AssetFootprint;
use crate::geo::GeoTransform;
use crate::rng::draw_normal_pair;
use crate::scene::{validate_stack, ComplexScene, SceneStack};
use crate::zonal::rasterize_footprint;

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Ground-truth coherence per pixel, each value in [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct CoherenceField {
    width: usize,
    height: usize,
    gamma: Vec<f64>,
}

impl CoherenceField {
    pub fn new(width: usize, height: usize, gamma: Vec<f64>) -> Result<Self> {
        let expected = width * height;
        if gamma.len() != expected {
            return Err(Error::SampleCountMismatch {
                expected,
                actual: gamma.len(),
            });
        }
        if let Some(index) = gamma
            .iter()
            .position(|g| !g.is_finite() || *g < 0.0 || *g > 1.0)
        {
            return Err(Error::ValueOutOfRange {
                kind: "coherence field".to_string(),
                index,
                value: gamma[index],
                range: "[0, 1]".to_string(),
            });
        }
        Ok(Self {
            width,
            height,
            gamma,
        })
    }

    pub fn constant(width: usize, height: usize, gamma: f64) -> Result<Self> {
        Self::new(width, height, vec![gamma; width * height])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn gamma(&self) -> &[f64] {
        &self.gamma
    }

    /// Overwrites the field under the mask with a new coherence value.
    pub fn paint(&mut self, mask: &crate::zonal::PixelMask, gamma: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&gamma) {
            return Err(Error::ValueOutOfRange {
                kind: "coherence field".to_string(),
                index: 0,
                value: gamma,
                range: "[0, 1]".to_string(),
            });
        }
        if mask.width() != self.width || mask.height() != self.height {
            return Err(Error::DimensionMismatch {
                context: "coherence field paint".to_string(),
                expected_width: self.width,
                expected_height: self.height,
                actual_width: mask.width(),
                actual_height: mask.height(),
            });
        }
        for (value, &set) in self.gamma.iter_mut().zip(mask.bits()) {
            if set {
                *value = gamma;
            }
        }
        Ok(())
    }
}

/// One damage patch: a footprint whose post-event coherence drops to
/// `damaged_gamma`.
#[derive(Debug, Clone)]
pub struct DamagePatch {
    pub footprint: AssetFootprint,
    pub damaged_gamma: f64,
}

/// A synthetic damage scenario: uniform background coherence with decorrelated
/// patches, all derived deterministically from one seed.
#[derive(Debug, Clone)]
pub struct DamageScenario {
    pub background_gamma: f64,
    pub patches: Vec<DamagePatch>,
    pub seed: u64,
}

impl DamageScenario {
    /// Damage means decorrelation: every patch must drop strictly below the
    /// background coherence.
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.background_gamma) {
            return Err(Error::ScenarioInvariant {
                message: format!(
                    "background coherence {} outside [0, 1]",
                    self.background_gamma
                ),
            });
        }
        for patch in &self.patches {
            if !(0.0..=1.0).contains(&patch.damaged_gamma) {
                return Err(Error::ScenarioInvariant {
                    message: format!(
                        "patch {} coherence {} outside [0, 1]",
                        patch.footprint.asset_id(),
                        patch.damaged_gamma
                    ),
                });
            }
            if patch.damaged_gamma >= self.background_gamma {
                return Err(Error::ScenarioInvariant {
                    message: format!(
                        "patch {} coherence {} must be strictly below the background {}",
                        patch.footprint.asset_id(),
                        patch.damaged_gamma,
                        self.background_gamma
                    ),
                });
            }
        }
        Ok(())
    }
}

/// Draw pair indices for the three independent complex Gaussians per pixel:
/// the base scene sample, its paired scene's noise, and the follow-on
/// scene's noise.
const PAIR_BASE: u32 = 0;
const PAIR_NOISE: u32 = 1;
const PAIR_FOLLOW: u32 = 2;

#[inline]
fn circular_gaussian(seed: u64, pixel: u64, pair: u32) -> Complex64 {
    // Unit-variance circular complex Gaussian: each component N(0, 1/2).
    let (re, im) = draw_normal_pair(seed, pixel, pair);
    Complex64::new(re * FRAC_1_SQRT_2, im * FRAC_1_SQRT_2)
}

#[inline]
fn correlate(base: Complex64, noise: Complex64, gamma: f64) -> Complex64 {
    if gamma >= 1.0 {
        // Exact copy; the formula below would perturb the sign of zero.
        base
    } else {
        base * gamma + noise * (1.0 - gamma * gamma).sqrt()
    }
}

fn to_scene(
    samples: Vec<Complex64>,
    width: usize,
    height: usize,
    gt: &GeoTransform,
    date: NaiveDate,
) -> Result<ComplexScene> {
    let samples32 = samples
        .iter()
        .map(|s| Complex32::new(s.re as f32, s.im as f32))
        .collect();
    ComplexScene::new(width, height, samples32, *gt, date)
}

/// Generates a co-registered scene pair whose population coherence equals the
/// prescribed field, deterministically from the seed.
pub fn generate_pair(
    field: &CoherenceField,
    seed: u64,
    gt: &GeoTransform,
    date_a: NaiveDate,
    date_b: NaiveDate,
) -> Result<(ComplexScene, ComplexScene)> {
    let n = field.width() * field.height();
    let mut a = Vec::with_capacity(n);
    let mut b = Vec::with_capacity(n);
    for pixel in 0..n {
        let v = circular_gaussian(seed, pixel as u64, PAIR_BASE);
        let noise = circular_gaussian(seed, pixel as u64, PAIR_NOISE);
        a.push(v);
        b.push(correlate(v, noise, field.gamma()[pixel]));
    }
    Ok((
        to_scene(a, field.width(), field.height(), gt, date_a)?,
        to_scene(b, field.width(), field.height(), gt, date_b)?,
    ))
}

/// Generates a scene correlated with an existing one at the prescribed
/// per-pixel coherence, using the follow-on noise stream of the same seed.
pub fn correlated_scene(
    base: &ComplexScene,
    field: &CoherenceField,
    seed: u64,
    date: NaiveDate,
) -> Result<ComplexScene> {
    if base.width() != field.width() || base.height() != field.height() {
        return Err(Error::DimensionMismatch {
            context: "correlated scene generation".to_string(),
            expected_width: base.width(),
            expected_height: base.height(),
            actual_width: field.width(),
            actual_height: field.height(),
        });
    }
    let n = field.width() * field.height();
    let mut out = Vec::with_capacity(n);
    for pixel in 0..n {
        let v = base.samples()[pixel];
        let v64 = Complex64::new(v.re as f64, v.im as f64);
        let noise = circular_gaussian(seed, pixel as u64, PAIR_FOLLOW);
        out.push(correlate(v64, noise, field.gamma()[pixel]));
    }
    to_scene(out, field.width(), field.height(), gt_of(base), date)
}

fn gt_of(scene: &ComplexScene) -> &GeoTransform {
    scene.geotransform()
}

/// Builds a full synthetic stack for a damage scenario.
///
/// The two pre-event scenes share the background coherence everywhere; the
/// post-event scene decorrelates against the second pre-event scene inside
/// the damage patches and keeps the background coherence elsewhere.
pub fn build_stack(
    scenario: &DamageScenario,
    width: usize,
    height: usize,
    gt: &GeoTransform,
    dates: [NaiveDate; 3],
) -> Result<SceneStack> {
    scenario.validate()?;
    let background = CoherenceField::constant(width, height, scenario.background_gamma)?;
    let (pre1, pre2) = generate_pair(&background, scenario.seed, gt, dates[0], dates[1])?;

    let mut post_field = CoherenceField::constant(width, height, scenario.background_gamma)?;
    for patch in &scenario.patches {
        let mask = rasterize_footprint(&patch.footprint, gt, width, height)?;
        post_field.paint(&mask, patch.damaged_gamma)?;
    }
    let post = correlated_scene(&pre2, &post_field, scenario.seed, dates[2])?;
    validate_stack(pre1, pre2, post)
}
