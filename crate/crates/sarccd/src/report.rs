//! Report emission: assessment tables and triage decisions as CSV or JSON.
//!
//! Reports are fully deterministic: assets sort in natural id order (digit
//! runs compare numerically, so `B2` precedes `B10`), numbers round to three
//! decimals only here — intermediate documents always carry full precision —
//! and the decimal separator is always a point.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::Serialize;

use crate::classify::{AssetAssessment, DlClass, LknClass};
use crate::error::{Error, Result};
use crate::triage::TriageDecision;
use crate::zonal::ZonalStats;

/// Output document format.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

/// One assessment-table row with report rounding applied: the statistic
/// columns in table order, then the grades.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub asset_id: String,
    pub coh_before_two_sigma: f64,
    pub coh_after_two_sigma: f64,
    pub coh_before_max: f64,
    pub coh_after_max: f64,
    pub ccd_two_sigma: f64,
    pub ccd_max: f64,
    pub lkn: LknClass,
    pub dl: DlClass,
}

impl ReportRow {
    pub fn from_assessment(a: &AssetAssessment) -> Self {
        Self {
            asset_id: a.asset_id.clone(),
            coh_before_two_sigma: a.coh_before.two_sigma_adjusted,
            coh_after_two_sigma: a.coh_after.two_sigma_adjusted,
            coh_before_max: a.coh_before.max,
            coh_after_max: a.coh_after.max,
            ccd_two_sigma: a.ccd.two_sigma_adjusted,
            ccd_max: a.ccd.max,
            lkn: a.lkn,
            dl: a.dl,
        }
    }

    fn csv_fields(&self) -> Vec<String> {
        vec![
            self.asset_id.clone(),
            format!("{:.3}", self.coh_before_two_sigma),
            format!("{:.3}", self.coh_after_two_sigma),
            format!("{:.3}", self.coh_before_max),
            format!("{:.3}", self.coh_after_max),
            format!("{:.3}", self.ccd_two_sigma),
            format!("{:.3}", self.ccd_max),
            self.lkn.to_string(),
            self.dl.to_string(),
        ]
    }
}

const CSV_HEADER: &str = "asset_id,coherence_2sigma_before,coherence_2sigma_after,\
coherence_max_before,coherence_max_after,ccd_2sigma,ccd_max,lkn,dl";

/// Natural id ordering: digit runs compare as numbers, everything else as
/// bytes, so `B2 < B10 < B10a`.
pub fn natural_id_order(a: &str, b: &str) -> Ordering {
    let mut ai = a.chars().peekable();
    let mut bi = b.chars().peekable();
    loop {
        match (ai.peek().copied(), bi.peek().copied()) {
            (None, None) => return Ordering::Equal,
            (None, Some(_)) => return Ordering::Less,
            (Some(_), None) => return Ordering::Greater,
            (Some(ca), Some(cb)) => {
                if ca.is_ascii_digit() && cb.is_ascii_digit() {
                    let mut na = 0u128;
                    while let Some(c) = ai.peek().copied().filter(char::is_ascii_digit) {
                        na = na.saturating_mul(10).saturating_add(c as u128 - '0' as u128);
                        ai.next();
                    }
                    let mut nb = 0u128;
                    while let Some(c) = bi.peek().copied().filter(char::is_ascii_digit) {
                        nb = nb.saturating_mul(10).saturating_add(c as u128 - '0' as u128);
                        bi.next();
                    }
                    match na.cmp(&nb) {
                        Ordering::Equal => {}
                        unequal => return unequal,
                    }
                } else {
                    match ca.cmp(&cb) {
                        Ordering::Equal => {
                            ai.next();
                            bi.next();
                        }
                        unequal => return unequal,
                    }
                }
            }
        }
    }
}

#[derive(Serialize)]
struct JsonEntry<'a> {
    asset_id: &'a str,
    coherence_before: &'a ZonalStats,
    coherence_after: &'a ZonalStats,
    ccd: &'a ZonalStats,
    lkn: LknClass,
    dl: DlClass,
    #[serde(skip_serializing_if = "Option::is_none")]
    decision: Option<&'a TriageDecision>,
}

#[derive(Serialize)]
struct JsonDoc<'a> {
    assets: Vec<JsonEntry<'a>>,
}

/// Renders assessments (and, when present, their triage decisions) to one
/// deterministic document.
///
/// CSV holds the rounded statistic columns and grades; a `verdict` column is
/// appended only when decisions are supplied. JSON carries the
/// full-precision statistics and the complete triage trace per asset.
pub fn emit_report(
    assessments: &[AssetAssessment],
    decisions: &[TriageDecision],
    format: ReportFormat,
) -> Result<String> {
    let mut order: Vec<&AssetAssessment> = assessments.iter().collect();
    order.sort_by(|a, b| natural_id_order(&a.asset_id, &b.asset_id));
    let by_id: BTreeMap<&str, &TriageDecision> = decisions
        .iter()
        .map(|d| (d.asset_id.as_str(), d))
        .collect();

    match format {
        ReportFormat::Csv => {
            let with_verdict = !decisions.is_empty();
            let mut out = String::from(CSV_HEADER);
            if with_verdict {
                out.push_str(",verdict");
            }
            out.push('\n');
            for a in order {
                let mut fields = ReportRow::from_assessment(a).csv_fields();
                if with_verdict {
                    fields.push(
                        by_id
                            .get(a.asset_id.as_str())
                            .map(|d| d.verdict.to_string())
                            .unwrap_or_default(),
                    );
                }
                out.push_str(&fields.join(","));
                out.push('\n');
            }
            Ok(out)
        }
        ReportFormat::Json => {
            let doc = JsonDoc {
                assets: order
                    .iter()
                    .map(|a| JsonEntry {
                        asset_id: &a.asset_id,
                        coherence_before: &a.coh_before,
                        coherence_after: &a.coh_after,
                        ccd: &a.ccd,
                        lkn: a.lkn,
                        dl: a.dl,
                        decision: by_id.get(a.asset_id.as_str()).copied(),
                    })
                    .collect(),
            };
            let mut text = serde_json::to_string_pretty(&doc).map_err(|e| Error::Config {
                message: format!("report serialization: {e}"),
            })?;
            text.push('\n');
            Ok(text)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::triage::{triage, ConnectivityInfo, TriagePolicy};

    fn stats(max: f64, two_sigma: f64) -> ZonalStats {
        ZonalStats {
            count: 100,
            min: two_sigma.min(0.0),
            max,
            mean: (max + two_sigma) / 2.0,
            std: 0.05,
            two_sigma_adjusted: two_sigma,
        }
    }

    fn b1() -> AssetAssessment {
        AssetAssessment {
            asset_id: "B1".to_string(),
            coh_before: stats(0.829, 0.816),
            coh_after: stats(0.517, 0.501),
            ccd: stats(0.632, 0.523),
            lkn: LknClass::High,
            dl: DlClass::High,
        }
    }

    fn b10() -> AssetAssessment {
        AssetAssessment {
            asset_id: "B10".to_string(),
            coh_before: stats(0.469, 0.469),
            coh_after: stats(0.506, 0.506),
            ccd: stats(-0.145, -0.145),
            lkn: LknClass::Low,
            dl: DlClass::NotAssigned,
        }
    }

    #[test]
    fn csv_matches_the_published_row_layout() {
        let report = emit_report(&[b1()], &[], ReportFormat::Csv).unwrap();
        let mut lines = report.lines();
        assert_eq!(lines.next().unwrap(), CSV_HEADER);
        assert_eq!(
            lines.next().unwrap(),
            "B1,0.816,0.501,0.829,0.517,0.523,0.632,LKn_H,DL_H"
        );
    }

    #[test]
    fn unassigned_damage_renders_as_dash() {
        let report = emit_report(&[b10()], &[], ReportFormat::Csv).unwrap();
        assert!(report.lines().nth(1).unwrap().ends_with(",LKn_L,-"));
    }

    #[test]
    fn assets_sort_in_natural_order() {
        let report = emit_report(&[b10(), b1()], &[], ReportFormat::Csv).unwrap();
        let ids: Vec<&str> = report
            .lines()
            .skip(1)
            .map(|l| l.split(',').next().unwrap())
            .collect();
        assert_eq!(ids, ["B1", "B10"]);
    }

    #[test]
    fn natural_order_handles_digit_runs() {
        assert_eq!(natural_id_order("B2", "B10"), Ordering::Less);
        assert_eq!(natural_id_order("B10", "B10"), Ordering::Equal);
        assert_eq!(natural_id_order("A9", "B1"), Ordering::Less);
        assert_eq!(natural_id_order("B10a", "B10"), Ordering::Greater);
    }

    #[test]
    fn json_carries_decision_traces() {
        let assessment = b1();
        let decision = triage(
            &assessment,
            &TriagePolicy::default(),
            &ConnectivityInfo::default(),
        )
        .unwrap();
        let report = emit_report(&[assessment], &[decision], ReportFormat::Json).unwrap();
        let doc: serde_json::Value = serde_json::from_str(&report).unwrap();
        let asset = &doc["assets"][0];
        assert_eq!(asset["asset_id"], "B1");
        assert_eq!(asset["decision"]["verdict"], "proceed_to_restoration");
        assert!(asset["decision"]["trace"].as_array().unwrap().len() >= 3);
    }

    #[test]
    fn identical_inputs_emit_identical_bytes() {
        let inputs = [b1(), b10()];
        let a = emit_report(&inputs, &[], ReportFormat::Json).unwrap();
        let b = emit_report(&inputs, &[], ReportFormat::Json).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn verdict_column_appears_only_with_decisions() {
        let assessment = b1();
        let decision = triage(
            &assessment,
            &TriagePolicy::default(),
            &ConnectivityInfo::default(),
        )
        .unwrap();
        let plain = emit_report(std::slice::from_ref(&assessment), &[], ReportFormat::Csv).unwrap();
        assert!(!plain.lines().next().unwrap().contains("verdict"));
        let with = emit_report(&[assessment], &[decision], ReportFormat::Csv).unwrap();
        assert!(with.lines().next().unwrap().ends_with(",verdict"));
        assert!(with
            .lines()
            .nth(1)
            .unwrap()
            .ends_with(",proceed_to_restoration"));
    }
}
