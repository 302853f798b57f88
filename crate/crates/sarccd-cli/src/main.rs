//! Command-line pipeline: scenes and footprints in, graded assessments,
//! triage decisions and reports out.
//!
//! Each subcommand is one pipeline stage reading and writing files, so every
//! stage can be run, inspected and tested on its own. Chaining the stages
//! produces byte-identical reports to running the whole pipeline in one
//! process. Exit codes: 0 success, 2 malformed input, 3 violated data
//! contract, 4 I/O failure.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use chrono::NaiveDate;
use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use sarccd::pipeline::ChangeProducts;
use sarccd::raster_io;
use sarccd::{
    assess_products, ccd, change_products, emit_report, estimate_coherence, multilook,
    parse_footprint_file, triage_all, validate_stack, AssetAssessment, ConnectivityConfig,
    EstimatorWindow, Error, GeoTransform, GradingThresholds, RasterKind, ReportFormat,
    ScalarRaster, TriageDecision, TriagePolicy, ZonalStats,
};

#[derive(Parser)]
#[command(
    name = "sarccd",
    version,
    about = "Coherent change detection and damage triage for complex SAR scene stacks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic scene stack from a damage scenario document.
    Synth {
        /// Scenario document (TOML).
        #[arg(long)]
        scenario: PathBuf,
        /// Directory receiving pre1.ccdr, pre2.ccdr and post.ccdr.
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Estimate windowed sample coherence of two co-registered scenes.
    Coherence {
        /// First scene (earlier acquisition).
        scene_a: PathBuf,
        /// Second scene (later acquisition).
        scene_b: PathBuf,
        /// Output coherence raster.
        #[arg(long)]
        out: PathBuf,
        /// Estimation window as ROWSxCOLS; both odd.
        #[arg(long, default_value = "5x5")]
        window: String,
        /// Multilook factors as ROWSxCOLS applied to the coherence product.
        #[arg(long, default_value = "1x1")]
        multilook: String,
    },
    /// Difference two coherence rasters (pre minus post).
    Ccd {
        /// Pre-event coherence raster.
        pre: PathBuf,
        /// Post-event coherence raster.
        post: PathBuf,
        /// Output change raster.
        #[arg(long)]
        out: PathBuf,
    },
    /// Zonal statistics of one raster under asset footprints.
    Stats {
        /// Input raster.
        #[arg(long)]
        raster: PathBuf,
        /// Footprint file: one `asset_id<TAB>WKT` polygon per line.
        #[arg(long)]
        footprints: PathBuf,
        /// Output statistics document (JSON). Stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Assess every asset of a stack: coherence, change map, statistics and
    /// grades.
    Assess {
        /// First pre-event scene.
        #[arg(long)]
        pre1: Option<PathBuf>,
        /// Second pre-event scene.
        #[arg(long)]
        pre2: Option<PathBuf>,
        /// Post-event scene.
        #[arg(long)]
        post: Option<PathBuf>,
        /// Footprint file: one `asset_id<TAB>WKT` polygon per line.
        #[arg(long)]
        footprints: PathBuf,
        /// Estimation window as ROWSxCOLS; both odd.
        #[arg(long, default_value = "5x5")]
        window: String,
        /// Multilook factors as ROWSxCOLS applied to the coherence products.
        #[arg(long, default_value = "1x1")]
        multilook: String,
        /// Threshold document (TOML) overriding the built-in grading bands.
        #[arg(long)]
        thresholds: Option<PathBuf>,
        /// Precomputed pre-event coherence raster (skips estimation).
        #[arg(long)]
        coherence_before: Option<PathBuf>,
        /// Precomputed post-event coherence raster (skips estimation).
        #[arg(long)]
        coherence_after: Option<PathBuf>,
        /// Precomputed change raster (skips differencing).
        #[arg(long)]
        ccd: Option<PathBuf>,
        /// Output assessments document (JSON, full precision). Stdout when
        /// omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Walk assessments through the triage flow to restoration verdicts.
    Triage {
        /// Assessments document produced by `assess`.
        #[arg(long)]
        assessments: PathBuf,
        /// Policy document (TOML); built-in defaults when omitted.
        #[arg(long)]
        policy: Option<PathBuf>,
        /// Connectivity document (TOML); all assets accessible when omitted.
        #[arg(long)]
        connectivity: Option<PathBuf>,
        /// Output decisions document (JSON). Stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Merge assessments and decisions into a report.
    Report {
        /// Assessments document produced by `assess`.
        #[arg(long)]
        assessments: PathBuf,
        /// Decisions document produced by `triage`.
        #[arg(long)]
        decisions: Option<PathBuf>,
        /// Output format.
        #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
        format: OutputFormat,
        /// Output file. Stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
}

/// Damage scenario document consumed by `synth`.
#[derive(Deserialize)]
struct ScenarioDoc {
    width: usize,
    height: usize,
    background_gamma: f64,
    seed: u64,
    /// Acquisition dates for pre1, pre2 and post, ISO-8601.
    #[serde(default = "default_dates")]
    dates: [String; 3],
    #[serde(default = "default_geotransform")]
    geotransform: GeoTransform,
    #[serde(default)]
    patches: Vec<PatchDoc>,
}

#[derive(Deserialize)]
struct PatchDoc {
    id: Option<String>,
    gamma: f64,
    wkt: String,
}

fn default_dates() -> [String; 3] {
    [
        "2024-01-01".to_string(),
        "2024-01-13".to_string(),
        "2024-02-06".to_string(),
    ]
}

fn default_geotransform() -> GeoTransform {
    GeoTransform::identity()
}

/// Assessments document: the full-precision intermediate between `assess`,
/// `triage` and `report`.
#[derive(Serialize, Deserialize)]
struct AssessmentsDoc {
    assets: Vec<AssetAssessment>,
}

/// Decisions document emitted by `triage`.
#[derive(Serialize, Deserialize)]
struct DecisionsDoc {
    decisions: Vec<TriageDecision>,
}

#[derive(Serialize)]
struct StatsEntry {
    asset_id: String,
    stats: ZonalStats,
}

#[derive(Serialize)]
struct StatsDoc {
    assets: Vec<StatsEntry>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(command: Command) -> Result<(), Error> {
    match command {
        Command::Synth { scenario, out_dir } => run_synth(&scenario, &out_dir),
        Command::Coherence {
            scene_a,
            scene_b,
            out,
            window,
            multilook,
        } => run_coherence(&scene_a, &scene_b, &out, &window, &multilook),
        Command::Ccd { pre, post, out } => run_ccd(&pre, &post, &out),
        Command::Stats {
            raster,
            footprints,
            out,
        } => run_stats(&raster, &footprints, out.as_deref()),
        Command::Assess {
            pre1,
            pre2,
            post,
            footprints,
            window,
            multilook,
            thresholds,
            coherence_before,
            coherence_after,
            ccd,
            out,
        } => run_assess(AssessArgs {
            pre1,
            pre2,
            post,
            footprints,
            window,
            multilook,
            thresholds,
            coherence_before,
            coherence_after,
            ccd,
            out,
        }),
        Command::Triage {
            assessments,
            policy,
            connectivity,
            out,
        } => run_triage(
            &assessments,
            policy.as_deref(),
            connectivity.as_deref(),
            out.as_deref(),
        ),
        Command::Report {
            assessments,
            decisions,
            format,
            out,
        } => run_report(&assessments, decisions.as_deref(), format, out.as_deref()),
    }
}

/// Parses `ROWSxCOLS` factor syntax, e.g. `5x5`.
fn parse_pair(text: &str, what: &str) -> Result<(usize, usize), Error> {
    let bad = || Error::Config {
        message: format!("{what} must be ROWSxCOLS (e.g. 5x5), got {text:?}"),
    };
    let (rows, cols) = text.split_once(['x', 'X']).ok_or_else(bad)?;
    Ok((
        rows.trim().parse().map_err(|_| bad())?,
        cols.trim().parse().map_err(|_| bad())?,
    ))
}

fn parse_date(text: &str) -> Result<NaiveDate, Error> {
    NaiveDate::parse_from_str(text, "%Y-%m-%d").map_err(|_| Error::MalformedDate {
        text: text.to_string(),
    })
}

fn read_text(path: &Path) -> Result<String, Error> {
    Ok(fs::read_to_string(path)?)
}

fn write_output(out: Option<&Path>, text: &str) -> Result<(), Error> {
    match out {
        Some(path) => Ok(fs::write(path, text)?),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run_synth(scenario_path: &Path, out_dir: &Path) -> Result<(), Error> {
    let doc: ScenarioDoc = toml::from_str(&read_text(scenario_path)?).map_err(|e| {
        Error::Config {
            message: format!("scenario document: {e}"),
        }
    })?;
    let mut patches = Vec::new();
    for (index, patch) in doc.patches.iter().enumerate() {
        let id = patch
            .id
            .clone()
            .unwrap_or_else(|| format!("patch{}", index + 1));
        let ring = sarccd::parse_wkt_polygon(&patch.wkt)?;
        patches.push(sarccd::DamagePatch {
            footprint: sarccd::AssetFootprint::new(id, ring)?,
            damaged_gamma: patch.gamma,
        });
    }
    let scenario = sarccd::DamageScenario {
        background_gamma: doc.background_gamma,
        patches,
        seed: doc.seed,
    };
    let dates = [
        parse_date(&doc.dates[0])?,
        parse_date(&doc.dates[1])?,
        parse_date(&doc.dates[2])?,
    ];
    let stack = sarccd::build_stack(&scenario, doc.width, doc.height, &doc.geotransform, dates)?;
    fs::create_dir_all(out_dir)?;
    raster_io::write_scene(&stack.pre1, out_dir.join("pre1.ccdr"))?;
    raster_io::write_scene(&stack.pre2, out_dir.join("pre2.ccdr"))?;
    raster_io::write_scene(&stack.post, out_dir.join("post.ccdr"))?;
    Ok(())
}

fn run_coherence(
    scene_a: &Path,
    scene_b: &Path,
    out: &Path,
    window: &str,
    multilook_arg: &str,
) -> Result<(), Error> {
    let (rows, cols) = parse_pair(window, "--window")?;
    let window = EstimatorWindow::new(rows, cols)?;
    let factors = parse_pair(multilook_arg, "--multilook")?;
    let a = raster_io::read_scene(scene_a)?;
    let b = raster_io::read_scene(scene_b)?;
    let mut coherence = estimate_coherence(&a, &b, window)?;
    if factors != (1, 1) {
        coherence = multilook(&coherence, factors.0, factors.1)?;
    }
    raster_io::write_scalar(&coherence, out)
}

fn run_ccd(pre: &Path, post: &Path, out: &Path) -> Result<(), Error> {
    let pre = raster_io::read_scalar(pre)?;
    let post = raster_io::read_scalar(post)?;
    raster_io::write_scalar(&ccd(&pre, &post)?, out)
}

fn load_footprints(path: &Path) -> Result<Vec<sarccd::AssetFootprint>, Error> {
    parse_footprint_file(&read_text(path)?)
}

fn to_json<T: Serialize>(value: &T) -> Result<String, Error> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::Config {
        message: format!("serialization: {e}"),
    })?;
    text.push('\n');
    Ok(text)
}

fn run_stats(raster: &Path, footprints: &Path, out: Option<&Path>) -> Result<(), Error> {
    let raster = raster_io::read_scalar(raster)?;
    let mut footprints = load_footprints(footprints)?;
    footprints.sort_by(|a, b| sarccd::report::natural_id_order(a.asset_id(), b.asset_id()));
    let mut entries = Vec::new();
    for footprint in &footprints {
        let mask = sarccd::rasterize_footprint(
            footprint,
            raster.geotransform(),
            raster.width(),
            raster.height(),
        )?;
        entries.push(StatsEntry {
            asset_id: footprint.asset_id().to_string(),
            stats: sarccd::asset_statistics(&raster, &mask)?,
        });
    }
    write_output(out, &to_json(&StatsDoc { assets: entries })?)
}

struct AssessArgs {
    pre1: Option<PathBuf>,
    pre2: Option<PathBuf>,
    post: Option<PathBuf>,
    footprints: PathBuf,
    window: String,
    multilook: String,
    thresholds: Option<PathBuf>,
    coherence_before: Option<PathBuf>,
    coherence_after: Option<PathBuf>,
    ccd: Option<PathBuf>,
    out: Option<PathBuf>,
}

fn run_assess(args: AssessArgs) -> Result<(), Error> {
    let thresholds = match &args.thresholds {
        Some(path) => GradingThresholds::from_toml_str(&read_text(path)?)?,
        None => GradingThresholds::default(),
    };
    let footprints = load_footprints(&args.footprints)?;

    let products = match (&args.coherence_before, &args.coherence_after) {
        (Some(before_path), Some(after_path)) => {
            let coherence_before = expect_kind(
                raster_io::read_scalar(before_path)?,
                RasterKind::Coherence,
            )?;
            let coherence_after =
                expect_kind(raster_io::read_scalar(after_path)?, RasterKind::Coherence)?;
            let ccd_map = match &args.ccd {
                Some(path) => expect_kind(raster_io::read_scalar(path)?, RasterKind::Ccd)?,
                None => ccd(&coherence_before, &coherence_after)?,
            };
            ChangeProducts {
                coherence_before,
                coherence_after,
                ccd: ccd_map,
            }
        }
        (None, None) => {
            let (pre1, pre2, post) = match (&args.pre1, &args.pre2, &args.post) {
                (Some(p1), Some(p2), Some(p3)) => (p1, p2, p3),
                _ => {
                    return Err(Error::Config {
                        message: "assess needs either --pre1/--pre2/--post or \
                                  --coherence-before/--coherence-after"
                            .to_string(),
                    })
                }
            };
            let (rows, cols) = parse_pair(&args.window, "--window")?;
            let window = EstimatorWindow::new(rows, cols)?;
            let factors = parse_pair(&args.multilook, "--multilook")?;
            let stack = validate_stack(
                raster_io::read_scene(pre1)?,
                raster_io::read_scene(pre2)?,
                raster_io::read_scene(post)?,
            )?;
            change_products(&stack, window, factors)?
        }
        _ => {
            return Err(Error::Config {
                message: "--coherence-before and --coherence-after must be given together"
                    .to_string(),
            })
        }
    };

    let mut assets = assess_products(&products, &footprints, &thresholds)?;
    assets.sort_by(|a, b| sarccd::report::natural_id_order(&a.asset_id, &b.asset_id));
    write_output(args.out.as_deref(), &to_json(&AssessmentsDoc { assets })?)
}

fn expect_kind(raster: ScalarRaster, expected: RasterKind) -> Result<ScalarRaster, Error> {
    if raster.kind() != expected {
        return Err(Error::KindMismatch {
            expected: expected.label().to_string(),
            actual: raster.kind().label().to_string(),
        });
    }
    Ok(raster)
}

fn read_assessments(path: &Path) -> Result<Vec<AssetAssessment>, Error> {
    let doc: AssessmentsDoc =
        serde_json::from_str(&read_text(path)?).map_err(|e| Error::Config {
            message: format!("assessments document: {e}"),
        })?;
    Ok(doc.assets)
}

fn run_triage(
    assessments: &Path,
    policy: Option<&Path>,
    connectivity: Option<&Path>,
    out: Option<&Path>,
) -> Result<(), Error> {
    let assessments = read_assessments(assessments)?;
    let policy = match policy {
        Some(path) => TriagePolicy::from_toml_str(&read_text(path)?)?,
        None => TriagePolicy::default(),
    };
    let connectivity = match connectivity {
        Some(path) => ConnectivityConfig::from_toml_str(&read_text(path)?)?,
        None => ConnectivityConfig::default(),
    };
    let decisions = triage_all(&assessments, &policy, &connectivity)?;
    write_output(out, &to_json(&DecisionsDoc { decisions })?)
}

fn run_report(
    assessments: &Path,
    decisions: Option<&Path>,
    format: OutputFormat,
    out: Option<&Path>,
) -> Result<(), Error> {
    let assessments = read_assessments(assessments)?;
    let decisions = match decisions {
        Some(path) => {
            let doc: DecisionsDoc =
                serde_json::from_str(&read_text(path)?).map_err(|e| Error::Config {
                    message: format!("decisions document: {e}"),
                })?;
            doc.decisions
        }
        None => Vec::new(),
    };
    let format = match format {
        OutputFormat::Csv => ReportFormat::Csv,
        OutputFormat::Json => ReportFormat::Json,
    };
    write_output(out, &emit_report(&assessments, &decisions, format)?)
}
