//! Error type shared by every stage of the pipeline.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong between reading a scene and emitting a report.
///
/// Errors fall into three families, reflected in [`Error::exit_code`]:
/// malformed input documents (exit code 2), violated data contracts
/// (exit code 3) and plain I/O failures (exit code 4).
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected_width}x{expected_height}, got {actual_width}x{actual_height}")]
    DimensionMismatch {
        context: String,
        expected_width: usize,
        expected_height: usize,
        actual_width: usize,
        actual_height: usize,
    },

    #[error("geotransform of {scene} does not match the reference scene bit-for-bit")]
    GeotransformMismatch { scene: String },

    #[error("acquisition dates out of order: {scene} dated {date} must be acquired after {reference}")]
    DateOrderViolation {
        scene: String,
        date: String,
        reference: String,
    },

    #[error("geotransform is singular (determinant is zero); cannot invert")]
    SingularTransform,

    #[error("invalid geotransform: {message}")]
    InvalidTransform { message: String },

    #[error("sample buffer holds {actual} values but {expected} are required")]
    SampleCountMismatch { expected: usize, actual: usize },

    #[error("non-finite complex sample at index {index}")]
    NonFiniteSample { index: usize },

    #[error("{kind} raster value {value} at index {index} is outside {range}")]
    ValueOutOfRange {
        kind: String,
        index: usize,
        value: f64,
        range: String,
    },

    #[error("degenerate estimator window {rows}x{cols}: both dimensions must be odd and positive")]
    DegenerateWindow { rows: usize, cols: usize },

    #[error("degenerate multilook factors {row_factor}x{col_factor}: both must be at least 1")]
    DegenerateFactors { row_factor: usize, col_factor: usize },

    #[error("raster kind mismatch: expected {expected}, got {actual}")]
    KindMismatch { expected: String, actual: String },

    #[error("invalid polygon{}: {reason}", asset_id.as_deref().map(|id| format!(" for asset {id}")).unwrap_or_default())]
    InvalidPolygon {
        asset_id: Option<String>,
        reason: String,
    },

    #[error("empty statistics: {what}")]
    EmptyStats { what: String },

    #[error("inconsistent connectivity for asset {asset_id}: asset is inaccessible but no access routes were assessed")]
    InconsistentConnectivity { asset_id: String },

    #[error("damage scenario invariant violated: {message}")]
    ScenarioInvariant { message: String },

    #[error("WKT syntax error at byte {offset}: {message}")]
    WktSyntax { offset: usize, message: String },

    #[error("unsupported geometry: {found}")]
    UnsupportedGeometry { found: String },

    #[error("polygon ring is not closed (first vertex must equal the last)")]
    UnclosedRing,

    #[error("footprint file line {line}: {message}")]
    FootprintFile { line: usize, message: String },

    #[error("bad raster container magic {found:?} (expected \"CCDR\")")]
    MagicMismatch { found: [u8; 4] },

    #[error("unsupported raster container version {found}")]
    VersionUnsupported { found: u16 },

    #[error("unknown raster payload or kind byte {value}")]
    UnknownRasterKind { value: u8 },

    #[error("raster payload size mismatch: expected {expected} bytes, found {actual}")]
    TruncatedPayload { expected: u64, actual: u64 },

    #[error("malformed acquisition date {text:?} (expected YYYY-MM-DD)")]
    MalformedDate { text: String },

    #[error("configuration error: {message}")]
    Config { message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code families: 2 = malformed input, 3 = violated data
    /// contract, 4 = I/O failure.
    pub fn exit_code(&self) -> u8 {
        use Error::*;
        match self {
            WktSyntax { .. }
            | UnsupportedGeometry { .. }
            | UnclosedRing
            | FootprintFile { .. }
            | MagicMismatch { .. }
            | VersionUnsupported { .. }
            | UnknownRasterKind { .. }
            | TruncatedPayload { .. }
            | MalformedDate { .. }
            | Config { .. } => 2,
            DimensionMismatch { .. }
            | GeotransformMismatch { .. }
            | DateOrderViolation { .. }
            | SingularTransform
            | InvalidTransform { .. }
            | SampleCountMismatch { .. }
            | NonFiniteSample { .. }
            | ValueOutOfRange { .. }
            | DegenerateWindow { .. }
            | DegenerateFactors { .. }
            | KindMismatch { .. }
            | InvalidPolygon { .. }
            | EmptyStats { .. }
            | InconsistentConnectivity { .. }
            | ScenarioInvariant { .. } => 3,
            Io(_) => 4,
        }
    }
}
