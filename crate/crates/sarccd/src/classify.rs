//! Grading of per-asset statistics into reliability (LKn) and damage-level
//! (DL) classes.
//!
//! Each grade combines two statistics — the zonal maximum and the
//! two-sigma-adjusted maximum — by grading each against its own band table
//! and keeping the weaker class. A single weak statistic therefore degrades
//! the grade; the combination is deliberately conservative.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::zonal::ZonalStats;

/// Level of knowledge: how reliable the asset's assessment is, graded from
/// pre-event coherence alone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LknClass {
    Low,
    Medium,
    High,
}

impl LknClass {
    pub const ALL: [LknClass; 3] = [LknClass::Low, LknClass::Medium, LknClass::High];
}

impl fmt::Display for LknClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LknClass::High => "LKn_H",
            LknClass::Medium => "LKn_M",
            LknClass::Low => "LKn_L",
        })
    }
}

/// Damage level graded from the coherence-difference statistics.
///
/// `NotAssigned` is reserved for assets whose change statistics are entirely
/// negative (newly stable ground); it is incomparable with the graded levels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DlClass {
    Low,
    Moderate,
    High,
    NotAssigned,
}

impl DlClass {
    pub const ALL: [DlClass; 4] = [
        DlClass::Low,
        DlClass::Moderate,
        DlClass::High,
        DlClass::NotAssigned,
    ];

    fn rank(&self) -> Option<u8> {
        match self {
            DlClass::Low => Some(0),
            DlClass::Moderate => Some(1),
            DlClass::High => Some(2),
            DlClass::NotAssigned => None,
        }
    }
}

impl PartialOrd for DlClass {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (DlClass::NotAssigned, DlClass::NotAssigned) => Some(Ordering::Equal),
            _ => Some(self.rank()?.cmp(&other.rank()?)),
        }
    }
}

impl fmt::Display for DlClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DlClass::High => "DL_H",
            DlClass::Moderate => "DL_M",
            DlClass::Low => "DL_L",
            DlClass::NotAssigned => "-",
        })
    }
}

/// `[lower, upper)` bands for one statistic of the LKn grade; the high band
/// is closed above so 1.0 grades High.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LknBands {
    pub high: [f64; 2],
    pub medium: [f64; 2],
    pub low: [f64; 2],
}

/// `[lower, upper)` bands for one statistic of the DL grade; the high band is
/// closed above so 1.0 grades High.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DlBands {
    pub high: [f64; 2],
    pub moderate: [f64; 2],
    pub low: [f64; 2],
}

/// Band tables for both statistics of the LKn grade.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LknThresholds {
    pub max: LknBands,
    pub two_sigma: LknBands,
}

/// Band tables for both statistics of the DL grade.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DlThresholds {
    pub max: DlBands,
    pub two_sigma: DlBands,
}

/// The complete grading configuration. [`GradingThresholds::default`] carries
/// the built-in calibration for bridge assets; any table can be overridden
/// from a TOML document without recompiling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GradingThresholds {
    pub lkn: LknThresholds,
    pub dl: DlThresholds,
}

impl Default for GradingThresholds {
    fn default() -> Self {
        Self {
            lkn: LknThresholds {
                max: LknBands {
                    high: [0.75, 1.0],
                    medium: [0.55, 0.75],
                    low: [0.0, 0.55],
                },
                two_sigma: LknBands {
                    high: [0.7, 1.0],
                    medium: [0.5, 0.7],
                    low: [0.0, 0.5],
                },
            },
            dl: DlThresholds {
                max: DlBands {
                    high: [0.5, 1.0],
                    moderate: [0.35, 0.5],
                    low: [0.0, 0.35],
                },
                two_sigma: DlBands {
                    high: [0.4, 1.0],
                    moderate: [0.3, 0.4],
                    low: [0.0, 0.3],
                },
            },
        }
    }
}

impl GradingThresholds {
    /// Parses and validates a TOML threshold document.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let parsed: GradingThresholds = toml::from_str(text).map_err(|e| Error::Config {
            message: format!("threshold document: {e}"),
        })?;
        parsed.validate()?;
        Ok(parsed)
    }

    /// Checks that each band table tiles [0, 1] without gaps or overlap.
    pub fn validate(&self) -> Result<()> {
        let check = |name: &str, low: [f64; 2], mid: [f64; 2], high: [f64; 2]| -> Result<()> {
            let ordered = low[0] == 0.0
                && low[0] < low[1]
                && low[1] == mid[0]
                && mid[0] < mid[1]
                && mid[1] == high[0]
                && high[0] < high[1]
                && high[1] == 1.0;
            if ordered {
                Ok(())
            } else {
                Err(Error::Config {
                    message: format!("threshold bands for {name} must tile [0, 1] contiguously"),
                })
            }
        };
        check("lkn.max", self.lkn.max.low, self.lkn.max.medium, self.lkn.max.high)?;
        check(
            "lkn.two_sigma",
            self.lkn.two_sigma.low,
            self.lkn.two_sigma.medium,
            self.lkn.two_sigma.high,
        )?;
        check("dl.max", self.dl.max.low, self.dl.max.moderate, self.dl.max.high)?;
        check(
            "dl.two_sigma",
            self.dl.two_sigma.low,
            self.dl.two_sigma.moderate,
            self.dl.two_sigma.high,
        )?;
        Ok(())
    }
}

fn grade_lkn_value(value: f64, bands: &LknBands) -> LknClass {
    if value >= bands.high[0] {
        LknClass::High
    } else if value >= bands.medium[0] {
        LknClass::Medium
    } else {
        LknClass::Low
    }
}

fn grade_dl_value(value: f64, bands: &DlBands) -> DlClass {
    if value >= bands.high[0] {
        DlClass::High
    } else if value >= bands.moderate[0] {
        DlClass::Moderate
    } else {
        DlClass::Low
    }
}

/// Grades assessment reliability from pre-event coherence statistics.
///
/// The maximum and the two-sigma-adjusted maximum are graded separately and
/// the weaker class wins. Band lower bounds are inclusive.
pub fn classify_lkn(coh_before: &ZonalStats, thresholds: &GradingThresholds) -> Result<LknClass> {
    if coh_before.is_empty() {
        return Err(Error::EmptyStats {
            what: "pre-event coherence statistics".to_string(),
        });
    }
    let by_max = grade_lkn_value(coh_before.max, &thresholds.lkn.max);
    let by_two_sigma = grade_lkn_value(coh_before.two_sigma_adjusted, &thresholds.lkn.two_sigma);
    Ok(by_max.min(by_two_sigma))
}

/// Grades the damage level from coherence-difference statistics.
///
/// A negative maximum means no decorrelation was observed anywhere on the
/// asset — the change statistics describe newly stable ground — so no damage
/// level is assigned. Otherwise both statistics are graded and the weaker
/// class wins, with a negative two-sigma-adjusted value grading Low.
pub fn classify_dl(ccd: &ZonalStats, thresholds: &GradingThresholds) -> Result<DlClass> {
    if ccd.is_empty() {
        return Err(Error::EmptyStats {
            what: "coherence-difference statistics".to_string(),
        });
    }
    if ccd.max < 0.0 {
        return Ok(DlClass::NotAssigned);
    }
    let by_max = grade_dl_value(ccd.max, &thresholds.dl.max);
    let by_two_sigma = if ccd.two_sigma_adjusted < 0.0 {
        DlClass::Low
    } else {
        grade_dl_value(ccd.two_sigma_adjusted, &thresholds.dl.two_sigma)
    };
    Ok(match by_max.partial_cmp(&by_two_sigma) {
        Some(Ordering::Greater) => by_two_sigma,
        _ => by_max,
    })
}

/// One assessed asset: the statistics that back the grades plus the grades
/// themselves. Regrading from the stored statistics is idempotent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssetAssessment {
    pub asset_id: String,
    pub coh_before: ZonalStats,
    pub coh_after: ZonalStats,
    pub ccd: ZonalStats,
    pub lkn: LknClass,
    pub dl: DlClass,
}

/// Assembles one assessment row from the three zonal summaries.
///
/// All three summaries must be non-empty; an empty one means the asset mask
/// covered no valid pixels and is reported as an error naming the asset.
pub fn assess_asset(
    asset_id: impl Into<String>,
    coh_before: ZonalStats,
    coh_after: ZonalStats,
    ccd: ZonalStats,
    thresholds: &GradingThresholds,
) -> Result<AssetAssessment> {
    let asset_id = asset_id.into();
    for (name, stats) in [
        ("pre-event coherence", &coh_before),
        ("post-event coherence", &coh_after),
        ("coherence difference", &ccd),
    ] {
        if stats.is_empty() {
            return Err(Error::EmptyStats {
                what: format!("{name} statistics for asset {asset_id}"),
            });
        }
    }
    let lkn = classify_lkn(&coh_before, thresholds)?;
    let dl = classify_dl(&ccd, thresholds)?;
    Ok(AssetAssessment {
        asset_id,
        coh_before,
        coh_after,
        ccd,
        lkn,
        dl,
    })
}
