//! End-to-end analysis pipelines over CSV data: point depth, central
//! subspace screening with quantile bands, dimension selection, the
//! dispersion profile, and depth-projection clustering, plus the
//! machine-readable outputs behind the published figures.

pub mod cluster;
pub mod io;
pub mod pipeline;

pub use io::{read_csv, CliError, CsvIngest};
pub use pipeline::{
    emit_outputs, run_analyze, AnalysisConfig, AnalysisReport, Mode, PointRecord,
};

/// Process exit codes: 0 success, 2 configuration error, 3 data error,
/// 4 numeric error.
pub fn exit_code(err: &CliError) -> i32 {
    match err {
        CliError::Config { .. } => 2,
        CliError::Column { .. } | CliError::Domain { .. } | CliError::Data { .. } => 3,
        CliError::Io { .. } => 3,
        CliError::Numeric(_) => 4,
    }
}
