//! Hand-off formats for external solvers.
//!
//! Both formats list the upper triangle (`i <= j`) of nonzero coefficients.
//! An off-diagonal entry carries `Qᵢⱼ + Qⱼᵢ`, the total weight of the pair,
//! and is split evenly again on import.
//!
//! JSON: `{"n": .., "offset": .., "entries": [[i, j, v], ..]}`.
//!
//! Coordinate list: one `i j v` line per entry. A `# n <n>` line precedes the
//! entries when the last variables carry no coefficients and `n` could not be
//! recovered from the indices, and a `# offset <c>` line when the offset is
//! nonzero. Any other `#` line is a comment.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::QuboInstance;
use crate::error::{QfsError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExportFormat {
    Json,
    CoordinateList,
}

impl FromStr for ExportFormat {
    type Err = QfsError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(ExportFormat::Json),
            "coo" | "coordinate-list" | "txt" => Ok(ExportFormat::CoordinateList),
            other => Err(QfsError::InvalidArgument(format!(
                "unknown export format '{other}' (expected json or coordinate-list)"
            ))),
        }
    }
}

impl ExportFormat {
    /// `.json` files are JSON, everything else a coordinate list.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("json") => ExportFormat::Json,
            _ => ExportFormat::CoordinateList,
        }
    }
}

/// Serialized shape of a [`QuboInstance`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuboFile {
    pub n: usize,
    pub offset: f64,
    pub entries: Vec<(usize, usize, f64)>,
}

impl QuboInstance {
    pub fn upper_entries(&self) -> Vec<(usize, usize, f64)> {
        let n = self.n();
        let mut entries = Vec::new();
        for i in 0..n {
            let row = self.row(i);
            if row[i] != 0.0 {
                entries.push((i, i, row[i]));
            }
            for j in i + 1..n {
                let v = row[j] + self.get(j, i);
                if v != 0.0 {
                    entries.push((i, j, v));
                }
            }
        }
        entries
    }

    pub fn to_file(&self) -> QuboFile {
        QuboFile {
            n: self.n(),
            offset: self.offset(),
            entries: self.upper_entries(),
        }
    }

    pub fn from_file(file: &QuboFile) -> Result<Self> {
        let n = file.n;
        let mut q = vec![0.0; n * n];
        for &(i, j, v) in &file.entries {
            if i >= n || j >= n {
                return Err(QfsError::Malformed(format!(
                    "entry ({i}, {j}) outside a {n}-variable instance"
                )));
            }
            if i == j {
                q[i * n + i] += v;
            } else {
                q[i * n + j] += v / 2.0;
                q[j * n + i] += v / 2.0;
            }
        }
        Ok(Self::from_dense(n, q)?.with_offset(file.offset))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("QUBO file is always serializable")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: QuboFile = serde_json::from_str(text)
            .map_err(|e| QfsError::Malformed(format!("QUBO JSON: {e}")))?;
        Self::from_file(&file)
    }

    pub fn to_coordinate_list(&self) -> String {
        let entries = self.upper_entries();
        let mut out = String::new();
        let implied_n = entries.iter().map(|&(_, j, _)| j + 1).max().unwrap_or(0);
        if implied_n != self.n() {
            writeln!(out, "# n {}", self.n()).unwrap();
        }
        if self.offset() != 0.0 {
            writeln!(out, "# offset {}", self.offset()).unwrap();
        }
        for (i, j, v) in entries {
            writeln!(out, "{i} {j} {v}").unwrap();
        }
        out
    }

    pub fn from_coordinate_list(text: &str) -> Result<Self> {
        let mut declared_n = None;
        let mut offset = 0.0;
        let mut entries = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let bad = || QfsError::Malformed(format!("line {}: '{line}'", lineno + 1));
            if let Some(comment) = line.strip_prefix('#') {
                let mut parts = comment.split_whitespace();
                match (parts.next(), parts.next()) {
                    (Some("n"), Some(v)) => declared_n = Some(v.parse().map_err(|_| bad())?),
                    (Some("offset"), Some(v)) => offset = v.parse().map_err(|_| bad())?,
                    _ => {}
                }
                continue;
            }
            let mut parts = line.split_whitespace();
            let (Some(i), Some(j), Some(v), None) =
                (parts.next(), parts.next(), parts.next(), parts.next())
            else {
                return Err(bad());
            };
            let i: usize = i.parse().map_err(|_| bad())?;
            let j: usize = j.parse().map_err(|_| bad())?;
            let v: f64 = v.parse().map_err(|_| bad())?;
            entries.push((i.min(j), i.max(j), v));
        }
        let implied_n = entries.iter().map(|&(_, j, _)| j + 1).max().unwrap_or(0);
        let n = declared_n.unwrap_or(implied_n);
        if n == 0 {
            return Err(QfsError::Malformed("coordinate list has no entries".into()));
        }
        Self::from_file(&QuboFile { n, offset, entries })
    }

    pub fn export(&self, format: ExportFormat) -> String {
        match format {
            ExportFormat::Json => self.to_json(),
            ExportFormat::CoordinateList => self.to_coordinate_list(),
        }
    }

    pub fn import(text: &str, format: ExportFormat) -> Result<Self> {
        match format {
            ExportFormat::Json => Self::from_json(text),
            ExportFormat::CoordinateList => Self::from_coordinate_list(text),
        }
    }

    pub fn write_to(&self, path: impl AsRef<Path>, format: ExportFormat) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.export(format)).map_err(|e| QfsError::io(path, e))
    }

    /// Reads a file written by [`write_to`](Self::write_to), picking the format
    /// from the extension.
    pub fn read_from(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| QfsError::io(path, e))?;
        Self::import(&text, ExportFormat::from_path(path))
    }
}
