//! End-to-end composition: stack in, assessments and decisions out.
//!
//! The staged command-line pipeline and this in-process path run the same
//! code on the same full-precision intermediates, so both produce identical
//! bytes.

use crate::classify::{assess_asset, AssetAssessment, GradingThresholds};
use crate::coherence::{ccd, estimate_coherence, multilook, EstimatorWindow};
use crate::error::Result;
use crate::footprint::AssetFootprint;
use crate::scene::{ScalarRaster, SceneStack};
use crate::triage::{triage, ConnectivityConfig, TriageDecision, TriagePolicy};
use crate::zonal::{asset_statistics, rasterize_footprint};

/// The pre/post coherence products and their difference, before any zonal
/// summarization.
#[derive(Debug, Clone)]
pub struct ChangeProducts {
    pub coherence_before: ScalarRaster,
    pub coherence_after: ScalarRaster,
    pub ccd: ScalarRaster,
}

/// Computes both coherence products and the change map from a stack.
///
/// Multilook factors other than (1, 1) are applied to the coherence products
/// before differencing; change statistics always summarize the per-pixel
/// difference map, never differences of summaries.
pub fn change_products(
    stack: &SceneStack,
    window: EstimatorWindow,
    multilook_factors: (usize, usize),
) -> Result<ChangeProducts> {
    let mut coherence_before = estimate_coherence(&stack.pre1, &stack.pre2, window)?;
    let mut coherence_after = estimate_coherence(&stack.pre2, &stack.post, window)?;
    if multilook_factors != (1, 1) {
        coherence_before = multilook(&coherence_before, multilook_factors.0, multilook_factors.1)?;
        coherence_after = multilook(&coherence_after, multilook_factors.0, multilook_factors.1)?;
    }
    let ccd_map = ccd(&coherence_before, &coherence_after)?;
    Ok(ChangeProducts {
        coherence_before,
        coherence_after,
        ccd: ccd_map,
    })
}

/// Summarizes precomputed change products per asset and grades each asset.
pub fn assess_products(
    products: &ChangeProducts,
    footprints: &[AssetFootprint],
    thresholds: &GradingThresholds,
) -> Result<Vec<AssetAssessment>> {
    let grid = products.coherence_before.geotransform();
    let width = products.coherence_before.width();
    let height = products.coherence_before.height();
    footprints
        .iter()
        .map(|footprint| {
            let mask = rasterize_footprint(footprint, grid, width, height)?;
            let coh_before = asset_statistics(&products.coherence_before, &mask)?;
            let coh_after = asset_statistics(&products.coherence_after, &mask)?;
            let ccd_stats = asset_statistics(&products.ccd, &mask)?;
            assess_asset(
                footprint.asset_id(),
                coh_before,
                coh_after,
                ccd_stats,
                thresholds,
            )
        })
        .collect()
}

/// Full asset-level assessment of a stack: coherence, change map, zonal
/// summaries and grades for every footprint.
pub fn assess_stack(
    stack: &SceneStack,
    footprints: &[AssetFootprint],
    window: EstimatorWindow,
    multilook_factors: (usize, usize),
    thresholds: &GradingThresholds,
) -> Result<Vec<AssetAssessment>> {
    let products = change_products(stack, window, multilook_factors)?;
    assess_products(&products, footprints, thresholds)
}

/// Triages every assessment against the policy and per-asset connectivity.
pub fn triage_all(
    assessments: &[AssetAssessment],
    policy: &TriagePolicy,
    connectivity: &ConnectivityConfig,
) -> Result<Vec<TriageDecision>> {
    assessments
        .iter()
        .map(|a| triage(a, policy, connectivity.for_asset(&a.asset_id)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::DlClass;
    use crate::geo::GeoTransform;
    use crate::synth::{build_stack, DamagePatch, DamageScenario};
    use chrono::NaiveDate;

    fn rect(id: &str, lon0: f64, lat0: f64, lon1: f64, lat1: f64) -> AssetFootprint {
        AssetFootprint::new(
            id,
            vec![(lon0, lat0), (lon1, lat0), (lon1, lat1), (lon0, lat1), (lon0, lat0)],
        )
        .unwrap()
    }

    #[test]
    fn damaged_asset_grades_higher_than_control() {
        let gt = GeoTransform::identity();
        let damaged = rect("A", 10.0, -10.0, 40.0, -40.0);
        let control = rect("B", 60.0, -60.0, 90.0, -90.0);
        let scenario = DamageScenario {
            background_gamma: 0.85,
            patches: vec![DamagePatch {
                footprint: rect("patch", 5.0, -5.0, 45.0, -45.0),
                damaged_gamma: 0.15,
            }],
            seed: 404,
        };
        let dates = [
            NaiveDate::from_ymd_opt(2024, 1, 1).unwrap(),
            NaiveDate::from_ymd_opt(2024, 1, 13).unwrap(),
            NaiveDate::from_ymd_opt(2024, 2, 6).unwrap(),
        ];
        let stack = build_stack(&scenario, 100, 100, &gt, dates).unwrap();
        let assessments = assess_stack(
            &stack,
            &[damaged, control],
            EstimatorWindow::default(),
            (1, 1),
            &GradingThresholds::default(),
        )
        .unwrap();
        assert_eq!(assessments.len(), 2);
        assert_eq!(assessments[0].dl, DlClass::High);
        assert_eq!(assessments[1].dl, DlClass::Low);
    }
}
