//! Tiered triage of assessed assets toward a restoration recommendation.
//!
//! An explicit state machine walks each assessment through adequacy, access
//! and escalation reviews and records every branch it takes, so a decision
//! can be audited step by step. The walk is a pure function of its three
//! inputs and always ends in exactly one terminal verdict.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::classify::{AssetAssessment, DlClass, LknClass};
use crate::error::{Error, Result};

/// Triage policy knobs. The defaults are deliberately explicit in every
/// emitted trace so a report never depends on implied configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriagePolicy {
    /// Minimum reliability for the damage characterisation to count as
    /// adequate for restoration planning.
    pub min_lkn_for_adequacy: LknClass,
    /// Damage levels whose severity independently justifies component-level
    /// review; recorded in escalation traces.
    pub escalate_on_dl: Vec<DlClass>,
}

impl Default for TriagePolicy {
    fn default() -> Self {
        Self {
            min_lkn_for_adequacy: LknClass::Medium,
            escalate_on_dl: vec![DlClass::High, DlClass::Moderate],
        }
    }
}

impl TriagePolicy {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config {
            message: format!("policy document: {e}"),
        })
    }
}

/// Access-route assessment for one route toward the asset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RouteAssessment {
    pub route_id: String,
    pub dl: DlClass,
}

/// Whether the asset can be reached, and through which assessed routes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConnectivityInfo {
    pub asset_accessible: bool,
    #[serde(default)]
    pub route_assessments: Vec<RouteAssessment>,
}

impl Default for ConnectivityInfo {
    fn default() -> Self {
        Self {
            asset_accessible: true,
            route_assessments: Vec::new(),
        }
    }
}

/// Per-asset connectivity document: a default plus per-asset overrides.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ConnectivityConfig {
    #[serde(default)]
    pub default: ConnectivityInfo,
    #[serde(default)]
    pub assets: BTreeMap<String, ConnectivityInfo>,
}

impl ConnectivityConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config {
            message: format!("connectivity document: {e}"),
        })
    }

    pub fn for_asset(&self, asset_id: &str) -> &ConnectivityInfo {
        self.assets.get(asset_id).unwrap_or(&self.default)
    }
}

/// Terminal verdicts of the triage walk.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TriageVerdict {
    /// Characterisation is adequate and the asset is reachable: plan and
    /// execute restoration.
    ProceedToRestoration,
    /// Characterisation is adequate but the asset is unreachable: assess the
    /// access routes first.
    AssessConnectivityFirst,
    /// Characterisation is inadequate: escalate to component-level review
    /// with higher-resolution sources.
    EscalateToComponentLevel,
    /// No usable escalation inputs either: seek better data (testing,
    /// inspections).
    SeekBetterData,
}

impl fmt::Display for TriageVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TriageVerdict::ProceedToRestoration => "proceed_to_restoration",
            TriageVerdict::AssessConnectivityFirst => "assess_connectivity_first",
            TriageVerdict::EscalateToComponentLevel => "escalate_to_component_level",
            TriageVerdict::SeekBetterData => "seek_better_data",
        })
    }
}

/// Nodes of the triage walk, in visiting order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TriageState {
    ThreatIdentified,
    AdequacyReview,
    AccessReview,
    ConnectivityReview,
    EscalationReview,
}

/// One audited transition: the node, the input it considered, and the branch
/// it took.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    pub state: TriageState,
    pub input: String,
    pub transition: String,
}

/// The verdict for one asset plus the full transition trace that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriageDecision {
    pub asset_id: String,
    pub verdict: TriageVerdict,
    pub trace: Vec<TraceStep>,
}

impl TriageDecision {
    /// Structural audit of the trace: starts at threat identification, every
    /// step names a branch, and the walk ended in this verdict.
    pub fn validate_trace(&self) -> Result<()> {
        let ok = self
            .trace
            .first()
            .map(|s| s.state == TriageState::ThreatIdentified)
            .unwrap_or(false)
            && self.trace.iter().all(|s| !s.transition.is_empty());
        if ok {
            Ok(())
        } else {
            Err(Error::Config {
                message: format!("decision trace for {} is not well-formed", self.asset_id),
            })
        }
    }
}

/// Walks one assessment through the triage flow.
///
/// The walk is deterministic:
///
/// 1. adequacy: the assessment is adequate when its reliability reaches
///    `policy.min_lkn_for_adequacy`;
/// 2. adequate and accessible → [`TriageVerdict::ProceedToRestoration`];
/// 3. adequate but inaccessible → [`TriageVerdict::AssessConnectivityFirst`],
///    carrying the route assessments in the trace;
/// 4. inadequate → [`TriageVerdict::EscalateToComponentLevel`];
/// 5. inadequate with no usable escalation inputs (damage level not assigned
///    and reliability Low) → [`TriageVerdict::SeekBetterData`].
pub fn triage(
    assessment: &AssetAssessment,
    policy: &TriagePolicy,
    connectivity: &ConnectivityInfo,
) -> Result<TriageDecision> {
    if !connectivity.asset_accessible && connectivity.route_assessments.is_empty() {
        return Err(Error::InconsistentConnectivity {
            asset_id: assessment.asset_id.clone(),
        });
    }

    let mut trace = Vec::new();
    trace.push(TraceStep {
        state: TriageState::ThreatIdentified,
        input: format!(
            "asset {} assessed: {} {}",
            assessment.asset_id, assessment.lkn, assessment.dl
        ),
        transition: "asset-level characterisation available; review adequacy".to_string(),
    });

    let adequate = assessment.lkn >= policy.min_lkn_for_adequacy;
    trace.push(TraceStep {
        state: TriageState::AdequacyReview,
        input: format!(
            "{} against the policy minimum {}",
            assessment.lkn, policy.min_lkn_for_adequacy
        ),
        transition: if adequate {
            "characterisation adequate; review access".to_string()
        } else {
            "characterisation inadequate; review escalation inputs".to_string()
        },
    });

    let verdict = if adequate {
        trace.push(TraceStep {
            state: TriageState::AccessReview,
            input: if connectivity.asset_accessible {
                "asset accessible".to_string()
            } else {
                format!(
                    "asset inaccessible; {} assessed route(s)",
                    connectivity.route_assessments.len()
                )
            },
            transition: if connectivity.asset_accessible {
                "access available; proceed with decisions, design and restoration".to_string()
            } else {
                "access unavailable; connectivity must be assessed first".to_string()
            },
        });
        if connectivity.asset_accessible {
            TriageVerdict::ProceedToRestoration
        } else {
            let routes = connectivity
                .route_assessments
                .iter()
                .map(|r| format!("{}={}", r.route_id, r.dl))
                .collect::<Vec<_>>()
                .join(", ");
            trace.push(TraceStep {
                state: TriageState::ConnectivityReview,
                input: format!("routes: {routes}"),
                transition: "assess connectivity before restoration".to_string(),
            });
            TriageVerdict::AssessConnectivityFirst
        }
    } else {
        let no_escalation_inputs =
            assessment.dl == DlClass::NotAssigned && assessment.lkn == LknClass::Low;
        let severity_flagged = policy.escalate_on_dl.contains(&assessment.dl);
        trace.push(TraceStep {
            state: TriageState::EscalationReview,
            input: format!(
                "damage level {}; severity {}listed for component review",
                assessment.dl,
                if severity_flagged { "" } else { "not " }
            ),
            transition: if no_escalation_inputs {
                "no usable change evidence at low reliability; seek better data \
                 (testing, inspections)"
                    .to_string()
            } else {
                "characterise damage at component level from higher-resolution imagery"
                    .to_string()
            },
        });
        if no_escalation_inputs {
            TriageVerdict::SeekBetterData
        } else {
            TriageVerdict::EscalateToComponentLevel
        }
    };

    Ok(TriageDecision {
        asset_id: assessment.asset_id.clone(),
        verdict,
        trace,
    })
}
