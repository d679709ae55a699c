//! Two-column series tables: a `t,price` or `t,return` header followed by one
//! observation per line. Lines starting with `#` are comments.

use std::fmt;
use std::path::Path;

use retrade_core::tails::{returns_from_prices, TailError};
use retrade_core::ReturnSeries;
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Column {
    Price,
    Return,
}

impl Column {
    pub fn name(self) -> &'static str {
        match self {
            Column::Price => "price",
            Column::Return => "return",
        }
    }
}

impl fmt::Display for Column {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Error)]
pub enum SeriesError {
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error("line {line}: {message}")]
    Schema { line: u64, message: String },
    #[error(transparent)]
    Returns(#[from] TailError),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SeriesFile {
    pub column: Column,
    pub t: Vec<i64>,
    pub values: Vec<f64>,
}

impl SeriesFile {
    /// Percent returns: computed from prices, or the values themselves.
    pub fn returns(&self) -> Result<ReturnSeries, SeriesError> {
        match self.column {
            Column::Price => Ok(returns_from_prices(&self.values)?),
            Column::Return => Ok(ReturnSeries::from_returns(self.values.clone())),
        }
    }
}

pub fn load_series(path: &Path) -> Result<SeriesFile, SeriesError> {
    let bytes = std::fs::read(path)?;
    parse_series(&bytes)
}

pub fn parse_series(bytes: &[u8]) -> Result<SeriesFile, SeriesError> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(bytes);
    let header = rdr.headers().map_err(csv_error)?.clone();
    let header_line = header_line(bytes);
    let column = match header.iter().collect::<Vec<_>>().as_slice() {
        ["t", "price"] => Column::Price,
        ["t", "return"] => Column::Return,
        [] | [""] => {
            return Err(SeriesError::Schema {
                line: header_line,
                message: "missing header row `t,price` or `t,return`".into(),
            })
        }
        other => {
            return Err(SeriesError::Schema {
                line: header_line,
                message: format!("header must be `t,price` or `t,return`, got `{}`", other.join(",")),
            })
        }
    };
    let mut out = SeriesFile {
        column,
        t: Vec::new(),
        values: Vec::new(),
    };
    for rec in rdr.records() {
        let rec = rec.map_err(csv_error)?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != 2 {
            return Err(SeriesError::Schema {
                line,
                message: format!("expected 2 fields, found {}", rec.len()),
            });
        }
        let t: i64 = rec[0].parse().map_err(|_| SeriesError::Parse {
            line,
            message: format!("t `{}` is not an integer", &rec[0]),
        })?;
        let v: f64 = rec[1]
            .parse()
            .ok()
            .filter(|v: &f64| v.is_finite())
            .ok_or_else(|| SeriesError::Parse {
                line,
                message: format!("{} `{}` is not a finite decimal", column, &rec[1]),
            })?;
        if let Some(&prev) = out.t.last() {
            if t <= prev {
                return Err(SeriesError::Schema {
                    line,
                    message: format!("t = {t} does not exceed the previous t = {prev}"),
                });
            }
        }
        out.t.push(t);
        out.values.push(v);
    }
    Ok(out)
}

/// 1-based line of the first line that is neither blank nor a comment.
fn header_line(bytes: &[u8]) -> u64 {
    let lines = bytes.split(|&b| b == b'\n');
    let skipped = lines
        .take_while(|l| {
            let l = l.trim_ascii();
            l.is_empty() || l.starts_with(b"#")
        })
        .count();
    skipped as u64 + 1
}

fn csv_error(e: csv::Error) -> SeriesError {
    let line = e.position().map_or(0, |p| p.line());
    match e.into_kind() {
        csv::ErrorKind::Io(e) => SeriesError::Io(e),
        csv::ErrorKind::Utf8 { err, .. } => SeriesError::Parse {
            line,
            message: err.to_string(),
        },
        other => SeriesError::Parse {
            line,
            message: format!("{other:?}"),
        },
    }
}
