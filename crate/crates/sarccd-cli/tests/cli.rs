//! Behavioral tests of the command-line surface: subcommand plumbing, file
//! formats and the exit-code contract (0 ok, 2 bad input, 3 violated
//! contract, 4 I/O failure).

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use chrono::NaiveDate;
use sarccd::raster_io::{read_scalar, write_scalar, write_scene};
use sarccd::{CoherenceField, GeoTransform, RasterKind, ScalarRaster};

fn sarccd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sarccd"))
        .args(args)
        .output()
        .expect("failed to launch binary")
}

fn exit_code(output: &Output) -> i32 {
    output.status.code().expect("no exit code")
}

fn date(s: &str) -> NaiveDate {
    NaiveDate::parse_from_str(s, "%Y-%m-%d").unwrap()
}

fn write_pair(dir: &Path, gamma: f64, seed: u64) -> (PathBuf, PathBuf) {
    let field = CoherenceField::constant(24, 24, gamma).unwrap();
    let (a, b) = sarccd::generate_pair(
        &field,
        seed,
        &GeoTransform::identity(),
        date("2024-01-01"),
        date("2024-01-13"),
    )
    .unwrap();
    let pa = dir.join(format!("a{seed}.ccdr"));
    let pb = dir.join(format!("b{seed}.ccdr"));
    write_scene(&a, &pa).unwrap();
    write_scene(&b, &pb).unwrap();
    (pa, pb)
}

#[test]
fn coherence_command_writes_a_coherence_raster() {
    let dir = tempfile::tempdir().unwrap();
    let (pa, pb) = write_pair(dir.path(), 0.7, 1);
    let out = dir.path().join("coh.ccdr");
    let result = sarccd(&[
        "coherence",
        pa.to_str().unwrap(),
        pb.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--window",
        "3x3",
    ]);
    assert_eq!(exit_code(&result), 0);
    let raster = read_scalar(&out).unwrap();
    assert_eq!(raster.kind(), RasterKind::Coherence);
    assert_eq!(raster.width(), 24);
}

#[test]
fn coherence_multilook_flag_shrinks_the_grid() {
    let dir = tempfile::tempdir().unwrap();
    let (pa, pb) = write_pair(dir.path(), 0.7, 2);
    let out = dir.path().join("coh.ccdr");
    let result = sarccd(&[
        "coherence",
        pa.to_str().unwrap(),
        pb.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--multilook",
        "2x3",
    ]);
    assert_eq!(exit_code(&result), 0);
    let raster = read_scalar(&out).unwrap();
    assert_eq!(raster.height(), 12);
    assert_eq!(raster.width(), 8);
}

#[test]
fn even_window_is_a_contract_violation() {
    let dir = tempfile::tempdir().unwrap();
    let (pa, pb) = write_pair(dir.path(), 0.7, 3);
    let result = sarccd(&[
        "coherence",
        pa.to_str().unwrap(),
        pb.to_str().unwrap(),
        "--out",
        dir.path().join("x.ccdr").to_str().unwrap(),
        "--window",
        "4x4",
    ]);
    assert_eq!(exit_code(&result), 3);
}

#[test]
fn malformed_window_syntax_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let (pa, pb) = write_pair(dir.path(), 0.7, 4);
    let result = sarccd(&[
        "coherence",
        pa.to_str().unwrap(),
        pb.to_str().unwrap(),
        "--out",
        dir.path().join("x.ccdr").to_str().unwrap(),
        "--window",
        "5by5",
    ]);
    assert_eq!(exit_code(&result), 2);
}

#[test]
fn missing_input_file_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let result = sarccd(&[
        "ccd",
        dir.path().join("absent1.ccdr").to_str().unwrap(),
        dir.path().join("absent2.ccdr").to_str().unwrap(),
        "--out",
        dir.path().join("x.ccdr").to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&result), 4);
}

#[test]
fn corrupt_container_magic_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.ccdr");
    let mut junk = b"XXXX not a raster at all".to_vec();
    junk.resize(100, 0);
    std::fs::write(&bad, junk).unwrap();
    let result = sarccd(&[
        "ccd",
        bad.to_str().unwrap(),
        bad.to_str().unwrap(),
        "--out",
        dir.path().join("x.ccdr").to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&result), 2);
    assert!(String::from_utf8_lossy(&result.stderr).contains("magic"));
}

#[test]
fn ccd_rejects_non_coherence_inputs_as_contract_violation() {
    let dir = tempfile::tempdir().unwrap();
    let raster = ScalarRaster::new(
        4,
        4,
        vec![0.5; 16],
        GeoTransform::identity(),
        RasterKind::Other,
    )
    .unwrap();
    let path = dir.path().join("other.ccdr");
    write_scalar(&raster, &path).unwrap();
    let result = sarccd(&[
        "ccd",
        path.to_str().unwrap(),
        path.to_str().unwrap(),
        "--out",
        dir.path().join("x.ccdr").to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&result), 3);
}

#[test]
fn stats_command_reports_zonal_statistics_per_asset() {
    let dir = tempfile::tempdir().unwrap();
    let raster = ScalarRaster::new(
        8,
        8,
        (0..64).map(|i| i as f64 / 100.0).collect(),
        GeoTransform::identity(),
        RasterKind::Other,
    )
    .unwrap();
    let raster_path = dir.path().join("r.ccdr");
    write_scalar(&raster, &raster_path).unwrap();
    let footprints = dir.path().join("fp.tsv");
    std::fs::write(
        &footprints,
        "Z1\tPOLYGON((0 0, 3 0, 3 -3, 0 -3, 0 0))\nZ2\tPOLYGON((90 0, 93 0, 93 -3, 90 -3, 90 0))\n",
    )
    .unwrap();
    let result = sarccd(&[
        "stats",
        "--raster",
        raster_path.to_str().unwrap(),
        "--footprints",
        footprints.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&result), 0);
    let doc: serde_json::Value = serde_json::from_slice(&result.stdout).unwrap();
    let assets = doc["assets"].as_array().unwrap();
    assert_eq!(assets.len(), 2);
    assert_eq!(assets[0]["asset_id"], "Z1");
    assert_eq!(assets[0]["stats"]["count"], 9);
    // Z2 lies outside the raster: empty statistics serialize as nulls.
    assert_eq!(assets[1]["stats"]["count"], 0);
    assert!(assets[1]["stats"]["max"].is_null());
}

#[test]
fn synth_rejects_a_non_decorrelating_patch_as_contract_violation() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = dir.path().join("scenario.toml");
    std::fs::write(
        &scenario,
        r#"
width = 16
height = 16
background_gamma = 0.5
seed = 9

[[patches]]
gamma = 0.5
wkt = "POLYGON((2 -2, 8 -2, 8 -8, 2 -8, 2 -2))"
"#,
    )
    .unwrap();
    let result = sarccd(&[
        "synth",
        "--scenario",
        scenario.to_str().unwrap(),
        "--out-dir",
        dir.path().join("out").to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&result), 3);
}

#[test]
fn broken_scenario_toml_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = dir.path().join("scenario.toml");
    std::fs::write(&scenario, "width = \"wide\"").unwrap();
    let result = sarccd(&[
        "synth",
        "--scenario",
        scenario.to_str().unwrap(),
        "--out-dir",
        dir.path().join("out").to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&result), 2);
}

#[test]
fn assess_requires_scenes_or_precomputed_rasters() {
    let dir = tempfile::tempdir().unwrap();
    let footprints = dir.path().join("fp.tsv");
    std::fs::write(&footprints, "A\tPOLYGON((0 0, 1 0, 1 -1, 0 -1, 0 0))\n").unwrap();
    let result = sarccd(&["assess", "--footprints", footprints.to_str().unwrap()]);
    assert_eq!(exit_code(&result), 2);
    assert!(String::from_utf8_lossy(&result.stderr).contains("assess needs"));
}

#[test]
fn triage_policy_file_changes_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    // A medium-reliability assessment document.
    let assessments = dir.path().join("assessments.json");
    std::fs::write(
        &assessments,
        r#"{"assets":[{"asset_id":"M1",
            "coh_before":{"count":9,"min":0.6,"max":0.66,"mean":0.63,"std":0.01,"two_sigma_adjusted":0.65},
            "coh_after":{"count":9,"min":0.3,"max":0.4,"mean":0.35,"std":0.01,"two_sigma_adjusted":0.39},
            "ccd":{"count":9,"min":0.2,"max":0.39,"mean":0.3,"std":0.02,"two_sigma_adjusted":0.33},
            "lkn":"medium","dl":"moderate"}]}"#,
    )
    .unwrap();
    let strict_policy = dir.path().join("policy.toml");
    std::fs::write(
        &strict_policy,
        "min_lkn_for_adequacy = \"high\"\nescalate_on_dl = [\"high\", \"moderate\"]\n",
    )
    .unwrap();

    let default_run = sarccd(&["triage", "--assessments", assessments.to_str().unwrap()]);
    assert_eq!(exit_code(&default_run), 0);
    let doc: serde_json::Value = serde_json::from_slice(&default_run.stdout).unwrap();
    assert_eq!(
        doc["decisions"][0]["verdict"],
        "proceed_to_restoration",
        "medium reliability is adequate under the default policy"
    );

    let strict_run = sarccd(&[
        "triage",
        "--assessments",
        assessments.to_str().unwrap(),
        "--policy",
        strict_policy.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&strict_run), 0);
    let doc: serde_json::Value = serde_json::from_slice(&strict_run.stdout).unwrap();
    assert_eq!(doc["decisions"][0]["verdict"], "escalate_to_component_level");
}

#[test]
fn report_csv_header_is_stable() {
    let dir = tempfile::tempdir().unwrap();
    let assessments = dir.path().join("assessments.json");
    std::fs::write(
        &assessments,
        r#"{"assets":[{"asset_id":"B1",
            "coh_before":{"count":9,"min":0.8,"max":0.829,"mean":0.82,"std":0.01,"two_sigma_adjusted":0.816},
            "coh_after":{"count":9,"min":0.4,"max":0.517,"mean":0.5,"std":0.01,"two_sigma_adjusted":0.501},
            "ccd":{"count":9,"min":0.4,"max":0.632,"mean":0.5,"std":0.02,"two_sigma_adjusted":0.523},
            "lkn":"high","dl":"high"}]}"#,
    )
    .unwrap();
    let result = sarccd(&[
        "report",
        "--assessments",
        assessments.to_str().unwrap(),
        "--format",
        "csv",
    ]);
    assert_eq!(exit_code(&result), 0);
    let text = String::from_utf8(result.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "asset_id,coherence_2sigma_before,coherence_2sigma_after,coherence_max_before,\
         coherence_max_after,ccd_2sigma,ccd_max,lkn,dl"
    );
    assert_eq!(
        lines.next().unwrap(),
        "B1,0.816,0.501,0.829,0.517,0.523,0.632,LKn_H,DL_H"
    );
}

#[test]
fn footprint_syntax_errors_are_input_errors() {
    let dir = tempfile::tempdir().unwrap();
    let raster = ScalarRaster::new(
        4,
        4,
        vec![0.5; 16],
        GeoTransform::identity(),
        RasterKind::Other,
    )
    .unwrap();
    let raster_path = dir.path().join("r.ccdr");
    write_scalar(&raster, &raster_path).unwrap();
    let footprints = dir.path().join("fp.tsv");
    std::fs::write(&footprints, "A\tPOLYGON((0 0, 1 0, 1 1))\n").unwrap();
    let result = sarccd(&[
        "stats",
        "--raster",
        raster_path.to_str().unwrap(),
        "--footprints",
        footprints.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&result), 2);
    assert!(String::from_utf8_lossy(&result.stderr).contains("line 1"));
}
