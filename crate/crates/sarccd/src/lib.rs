//! Damage assessment of infrastructure assets from co-registered complex SAR
//! scenes.
//!
//! The pipeline works on a stack of three scenes — two acquired before an
//! event and one after — and proceeds in five stages:
//!
//! 1. **Coherence** ([`coherence`]): windowed sample coherence of each scene
//!    pair, optionally multilooked.
//! 2. **Change detection** ([`coherence::ccd`]): the per-pixel difference of
//!    the pre-event and post-event coherence products.
//! 3. **Zonal statistics** ([`zonal`]): footprints rasterized to pixel masks
//!    and summarized (max and outlier-trimmed two-sigma maximum).
//! 4. **Grading** ([`classify`]): reliability (LKn) and damage level (DL)
//!    classes from configurable threshold bands.
//! 5. **Triage** ([`triage`]): an audited walk from the assessment to a
//!    restoration verdict.
//!
//! [`synth`] generates speckle pairs with a prescribed coherence field; it is
//! both a test oracle for the estimator and a scenario generator for
//! end-to-end runs. [`raster_io`] defines the bit-exact container format, and
//! [`report`] renders deterministic CSV/JSON documents.

pub mod classify;
pub mod coherence;
pub mod error;
pub mod footprint;
pub mod geo;
mod kahan;
pub mod pipeline;
pub mod raster_io;
pub mod report;
pub mod rng;
pub mod scene;
pub mod synth;
pub mod triage;
pub mod wkt;
pub mod zonal;

pub use classify::{
    assess_asset, classify_dl, classify_lkn, AssetAssessment, DlClass, GradingThresholds, LknClass,
};
pub use coherence::{ccd, estimate_coherence, multilook, EstimatorWindow};
pub use error::{Error, Result};
pub use footprint::{AssetFootprint, AssetMetadata};
pub use geo::GeoTransform;
pub use pipeline::{assess_products, assess_stack, change_products, triage_all, ChangeProducts};
pub use report::{emit_report, ReportFormat, ReportRow};
pub use scene::{is_no_data, validate_stack, ComplexScene, RasterKind, ScalarRaster, SceneStack};
pub use synth::{build_stack, generate_pair, CoherenceField, DamagePatch, DamageScenario};
pub use triage::{
    triage, ConnectivityConfig, ConnectivityInfo, RouteAssessment, TraceStep, TriageDecision,
    TriagePolicy, TriageState, TriageVerdict,
};
pub use wkt::{format_wkt_polygon, parse_footprint_file, parse_wkt_polygon};
pub use zonal::{asset_statistics, rasterize_footprint, PixelMask, ZonalStats};

// The guide chapters under book/src embed runnable snippets; including them
// here makes `cargo test --doc` compile and run every snippet, so the book
// cannot drift from the library.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/scene-model.md")]
    mod scene_model {}
    #[doc = include_str!("../../../book/src/coherence-and-ccd.md")]
    mod coherence_and_ccd {}
    #[doc = include_str!("../../../book/src/speckle-simulation.md")]
    mod speckle_simulation {}
    #[doc = include_str!("../../../book/src/footprints-and-zonal-statistics.md")]
    mod footprints_and_zonal_statistics {}
    #[doc = include_str!("../../../book/src/damage-grading.md")]
    mod damage_grading {}
    #[doc = include_str!("../../../book/src/triage.md")]
    mod triage_chapter {}
    #[doc = include_str!("../../../book/src/cli-pipeline.md")]
    mod cli_pipeline {}
}
