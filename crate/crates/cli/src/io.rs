//! CSV ingestion with column selection, optional id labels and the natural
//! log transform used for price/weight data.

use std::path::Path;

use central_depth::Sample;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {message}")]
    Config { message: String },

    #[error("column error: column '{column}' not found (header: {header:?})")]
    Column { column: String, header: Vec<String> },

    #[error("domain error: row {row}: {message}")]
    Domain { row: usize, message: String },

    #[error("data error: {message}")]
    Data { message: String },

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },

    #[error("numeric error: {0}")]
    Numeric(#[from] central_depth::Error),
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        CliError::Config {
            message: message.into(),
        }
    }

    pub fn data(message: impl Into<String>) -> Self {
        CliError::Data {
            message: message.into(),
        }
    }
}

/// Result of reading a CSV file: the sample plus ingestion diagnostics.
#[derive(Debug, Clone)]
pub struct CsvIngest {
    pub sample: Sample,
    /// Rows dropped because a selected value was missing or non-numeric, or
    /// non-positive under the log transform.
    pub rows_dropped: usize,
    /// Human-readable notes for the first few dropped rows.
    pub warnings: Vec<String>,
}

/// Read selected numeric columns (by header name or 0-based index) into a
/// sample. With `log_transform`, values are mapped through the natural log;
/// non-positive values drop the row with a warning unless `strict`, which
/// aborts instead. Row labels come from `id_col` when given, else from the
/// 1-based data row number.
pub fn read_csv(
    path: impl AsRef<Path>,
    columns: &[String],
    id_col: Option<&str>,
    log_transform: bool,
    strict: bool,
) -> Result<CsvIngest, CliError> {
    let path = path.as_ref();
    if columns.is_empty() {
        return Err(CliError::config("at least one data column is required"));
    }
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_path(path)
        .map_err(|e| match e.kind() {
            csv::ErrorKind::Io(_) => CliError::Io {
                path: path.display().to_string(),
                source: std::io::Error::other(e.to_string()),
            },
            _ => CliError::data(e.to_string()),
        })?;
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| CliError::data(e.to_string()))?
        .iter()
        .map(|s| s.to_string())
        .collect();

    let resolve = |name: &str| -> Result<usize, CliError> {
        if let Some(pos) = header.iter().position(|h| h == name) {
            return Ok(pos);
        }
        if let Ok(idx) = name.parse::<usize>() {
            if idx < header.len() {
                return Ok(idx);
            }
        }
        Err(CliError::Column {
            column: name.to_string(),
            header: header.clone(),
        })
    };
    let col_idx: Vec<usize> = columns
        .iter()
        .map(|c| resolve(c))
        .collect::<Result<_, _>>()?;
    let id_idx = id_col.map(|c| resolve(c)).transpose()?;

    let m = col_idx.len();
    let mut points: Vec<f64> = Vec::new();
    let mut labels: Vec<String> = Vec::new();
    let mut rows_dropped = 0usize;
    let mut warnings: Vec<String> = Vec::new();
    let mut warn = |row: usize, message: String, warnings: &mut Vec<String>| {
        rows_dropped += 1;
        if warnings.len() < 10 {
            warnings.push(format!("row {row}: {message}"));
        }
    };

    for (row_i, record) in reader.records().enumerate() {
        let data_row = row_i + 1;
        let record = record.map_err(|e| CliError::data(e.to_string()))?;
        let mut vals = Vec::with_capacity(m);
        let mut bad: Option<String> = None;
        for &ci in &col_idx {
            match record.get(ci).map(str::trim) {
                Some(field) if !field.is_empty() => match field.parse::<f64>() {
                    Ok(v) if v.is_finite() => vals.push(v),
                    _ => {
                        bad = Some(format!("non-numeric value '{field}' in column {ci}"));
                        break;
                    }
                },
                _ => {
                    bad = Some(format!("missing value in column {ci}"));
                    break;
                }
            }
        }
        if let Some(message) = bad {
            warn(data_row, message, &mut warnings);
            continue;
        }
        if log_transform {
            if let Some(v) = vals.iter().find(|&&v| v <= 0.0) {
                let message = format!("non-positive value {v} under log transform");
                if strict {
                    return Err(CliError::Domain {
                        row: data_row,
                        message,
                    });
                }
                warn(data_row, message, &mut warnings);
                continue;
            }
            for v in vals.iter_mut() {
                *v = v.ln();
            }
        }
        points.extend(vals);
        labels.push(match id_idx {
            Some(ci) => record.get(ci).unwrap_or("").to_string(),
            None => data_row.to_string(),
        });
    }

    let n = labels.len();
    if n == 0 {
        return Err(CliError::data("no usable rows in input"));
    }
    let sample = Sample::new(n, m, points)?.with_labels(labels)?;
    Ok(CsvIngest {
        sample,
        rows_dropped,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_tmp(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn reads_two_column_file() {
        let f = write_tmp("w,p\n1,2\n3,4\n");
        let ingest = read_csv(
            f.path(),
            &["w".to_string(), "p".to_string()],
            None,
            false,
            false,
        )
        .unwrap();
        assert_eq!(ingest.sample.n(), 2);
        assert_eq!(ingest.sample.m(), 2);
        assert_eq!(ingest.sample.points(), &[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(ingest.rows_dropped, 0);
    }

    #[test]
    fn columns_by_index() {
        let f = write_tmp("a,b,c\n1,2,3\n");
        let ingest =
            read_csv(f.path(), &["2".to_string(), "0".to_string()], None, false, false).unwrap();
        assert_eq!(ingest.sample.points(), &[3.0, 1.0]);
    }

    #[test]
    fn log_transform_examples() {
        let e = std::f64::consts::E;
        let f = write_tmp(&format!("x\n1\n{}\n{}\n", e, e * e));
        let ingest = read_csv(f.path(), &["x".to_string()], None, true, false).unwrap();
        let p = ingest.sample.points();
        assert!(p[0].abs() < 1e-12);
        assert!((p[1] - 1.0).abs() < 1e-12);
        assert!((p[2] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn bad_row_dropped_with_warning() {
        let f = write_tmp("w,p\n1,abc\n2,3\n");
        let ingest = read_csv(
            f.path(),
            &["w".to_string(), "p".to_string()],
            None,
            false,
            false,
        )
        .unwrap();
        assert_eq!(ingest.sample.n(), 1);
        assert_eq!(ingest.rows_dropped, 1);
        assert_eq!(ingest.warnings.len(), 1);
    }

    #[test]
    fn missing_column_is_reported() {
        let f = write_tmp("w,p\n1,2\n");
        let err = read_csv(f.path(), &["nope".to_string()], None, false, false).unwrap_err();
        assert!(matches!(err, CliError::Column { .. }));
        assert_eq!(crate::exit_code(&err), 3);
    }

    #[test]
    fn strict_log_aborts_on_non_positive() {
        let f = write_tmp("x\n-1\n2\n");
        let err = read_csv(f.path(), &["x".to_string()], None, true, true).unwrap_err();
        assert!(matches!(err, CliError::Domain { .. }));
        // Non-strict drops the row instead.
        let ingest = read_csv(f.path(), &["x".to_string()], None, true, false).unwrap();
        assert_eq!(ingest.sample.n(), 1);
        assert_eq!(ingest.rows_dropped, 1);
    }

    #[test]
    fn id_column_becomes_labels() {
        let f = write_tmp("id,x\nfoo,1\nbar,2\n");
        let ingest = read_csv(f.path(), &["x".to_string()], Some("id"), false, false).unwrap();
        assert_eq!(
            ingest.sample.labels().unwrap(),
            &["foo".to_string(), "bar".to_string()]
        );
    }
}
