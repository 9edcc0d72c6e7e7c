// Copyright 2026 The qcs-sim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Result tables and their CSV form.
//!
//! ```text
//! # <comment block: scenario echo, oracle-only ground truth>
//! col_a,col_b,...
//! <one data row per record>
//! # <summary lines>
//! ```
//!
//! Floats are written in `{:.16e}` form (17 significant digits), which
//! parses back to the identical `f64`.

use std::fs;
use std::io::Write;
use std::path::Path;

use super::HarnessError;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ResultTable {
    /// Leading comment lines, without the `# ` prefix.
    pub preamble: Vec<String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
    /// Trailing comment lines, without the `# ` prefix.
    pub summary: Vec<String>,
}

/// Formats a float so that it round-trips exactly.
pub(crate) fn float_cell(x: f64) -> String {
    format!("{x:.16e}")
}

impl ResultTable {
    pub fn new(columns: &[&str]) -> Self {
        ResultTable {
            columns: columns.iter().map(|c| (*c).to_owned()).collect(),
            ..Default::default()
        }
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Parses cell `(row, name)`.
    pub fn value<T: std::str::FromStr>(&self, row: usize, name: &str) -> Result<T, HarnessError> {
        let col = self
            .column(name)
            .ok_or_else(|| HarnessError::Runtime(format!("table has no column `{name}`")))?;
        let cell = self
            .rows
            .get(row)
            .and_then(|r| r.get(col))
            .ok_or_else(|| HarnessError::Runtime(format!("row {row} has no column `{name}`")))?;
        cell.parse()
            .map_err(|_| HarnessError::Runtime(format!("row {row}, `{name}`: cannot parse `{cell}`")))
    }

    /// The data part of the CSV: header and rows.
    pub fn body(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for line in &self.preamble {
            out.push_str("# ");
            out.push_str(line);
            out.push('\n');
        }
        out.push_str(&self.body());
        for line in &self.summary {
            out.push_str("# ");
            out.push_str(line);
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self, HarnessError> {
        let mut table = ResultTable::default();
        let mut seen_header = false;
        for (i, line) in text.lines().enumerate() {
            if let Some(comment) = line.strip_prefix('#') {
                let comment = comment.strip_prefix(' ').unwrap_or(comment).to_owned();
                if seen_header {
                    table.summary.push(comment);
                } else {
                    table.preamble.push(comment);
                }
                continue;
            }
            if line.is_empty() {
                continue;
            }
            let cells: Vec<String> = line.split(',').map(str::to_owned).collect();
            if !seen_header {
                table.columns = cells;
                seen_header = true;
            } else if cells.len() != table.columns.len() {
                return Err(HarnessError::Parse {
                    line: i + 1,
                    message: format!("expected {} cells, got {}", table.columns.len(), cells.len()),
                });
            } else {
                table.rows.push(cells);
            }
        }
        if !seen_header {
            return Err(HarnessError::Parse {
                line: text.lines().count().max(1),
                message: "no header row".into(),
            });
        }
        Ok(table)
    }
}

/// Writes `table` to `path`, replacing any existing file.
pub fn emit_csv(table: &ResultTable, path: &Path) -> Result<(), HarnessError> {
    let io = |e| HarnessError::Io {
        path: path.display().to_string(),
        source: e,
    };
    let mut f = fs::File::create(path).map_err(io)?;
    f.write_all(table.to_csv().as_bytes()).map_err(io)?;
    f.flush().map_err(io)
}

/// Alias of [`emit_csv`].
pub fn write_csv(table: &ResultTable, path: &Path) -> Result<(), HarnessError> {
    emit_csv(table, path)
}

pub fn read_csv(path: &Path) -> Result<ResultTable, HarnessError> {
    let text = fs::read_to_string(path).map_err(|e| HarnessError::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    ResultTable::from_csv(&text)
}
