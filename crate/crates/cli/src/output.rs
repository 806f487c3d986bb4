//! CSV files with a `#` header carrying the resolved configuration.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use num_rational::BigRational;
use num_traits::ToPrimitive;

use crate::config::ExperimentConfig;
use crate::CliError;

/// Lines written at the top of every CSV, each prefixed with `# `.
pub fn header_lines(cfg: &ExperimentConfig, kind: &str) -> Vec<String> {
    let mut lines = vec![
        format!("triadic {} {kind}", env!("CARGO_PKG_VERSION")),
    ];
    lines.extend(cfg.resolved().into_iter().map(|(k, v)| format!("{k} = {v}")));
    lines.push(format!("config_sha256 = {}", cfg.hash()));
    lines
}

pub fn create_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

pub fn write_csv<I>(
    path: &Path,
    header: &[String],
    columns: &[&str],
    rows: I,
) -> Result<(), CliError>
where
    I: IntoIterator<Item = String>,
{
    let io = |e| CliError::io(path, e);
    let mut f = BufWriter::new(File::create(path).map_err(io)?);
    for line in header {
        writeln!(f, "# {line}").map_err(io)?;
    }
    writeln!(f, "{}", columns.join(",")).map_err(io)?;
    for row in rows {
        writeln!(f, "{row}").map_err(io)?;
    }
    f.flush().map_err(io)
}

pub fn write_json(path: &Path, value: &serde_json::Value) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).expect("json values serialize");
    std::fs::write(path, text + "\n").map_err(|e| CliError::io(path, e))
}

/// A CSV read back: header settings, column names and raw rows.
#[derive(Debug, Clone)]
pub struct Table {
    pub path: PathBuf,
    pub header: BTreeMap<String, String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn read(path: &Path) -> Result<Self, CliError> {
        let io = |e| CliError::io(path, e);
        let f = BufReader::new(File::open(path).map_err(io)?);
        let mut header = BTreeMap::new();
        let mut columns = None;
        let mut rows = Vec::new();
        for line in f.lines() {
            let line = line.map_err(io)?;
            if let Some(h) = line.strip_prefix('#') {
                if let Some((k, v)) = h.split_once('=') {
                    header.insert(k.trim().to_string(), v.trim().to_string());
                }
                continue;
            }
            if line.is_empty() {
                continue;
            }
            let fields: Vec<String> = line.split(',').map(str::to_string).collect();
            if columns.is_none() {
                columns = Some(fields);
            } else {
                rows.push(fields);
            }
        }
        let columns = columns.ok_or_else(|| CliError::Input(format!("{}: no column line", path.display())))?;
        Ok(Self {
            path: path.to_path_buf(),
            header,
            columns,
            rows,
        })
    }

    pub fn column(&self, name: &str) -> Result<usize, CliError> {
        self.columns
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| CliError::Input(format!("{}: no column '{name}'", self.path.display())))
    }

    fn bad(&self, row: usize, col: usize) -> CliError {
        CliError::Input(format!(
            "{}: row {}: cannot parse column '{}'",
            self.path.display(),
            row + 1,
            self.columns[col]
        ))
    }

    pub fn get<T: std::str::FromStr>(&self, row: usize, col: usize) -> Result<T, CliError> {
        self.rows[row]
            .get(col)
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| self.bad(row, col))
    }

    /// A value written as a float or as `num/den`.
    pub fn get_real(&self, row: usize, col: usize) -> Result<f64, CliError> {
        let s = self.rows[row].get(col).ok_or_else(|| self.bad(row, col))?;
        parse_real(s).ok_or_else(|| self.bad(row, col))
    }
}

/// Rounds to 15 significant digits and prints the shortest form, so
/// `0.6000000000000001` is written as `0.6`.
pub fn format_real(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return x.to_string();
    }
    let rounded: f64 = format!("{x:.14e}").parse().expect("valid float text");
    if rounded.abs() < 1e-4 || rounded.abs() >= 1e15 {
        format!("{rounded:e}")
    } else {
        rounded.to_string()
    }
}

pub fn format_rational(x: &BigRational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

pub fn parse_real(s: &str) -> Option<f64> {
    match s.split_once('/') {
        Some(_) => {
            let r: BigRational = s.parse().ok()?;
            r.to_f64()
        }
        None => s.parse().ok(),
    }
}
