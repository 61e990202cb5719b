//! The JSON matrix file format:
//!
//! ```json
//! {"m": 2, "n": 2, "entries": [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [-0.25, 0.0]]]}
//! ```
//!
//! `entries` holds `m` rows of `n` `[re, im]` pairs. Numbers are written in
//! their shortest round-trip decimal form, so `parse(serialize(M)) == M`
//! bit for bit.

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};
use schurkit::Matrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub m: usize,
    pub n: usize,
    pub entries: Vec<Vec<[f64; 2]>>,
}

impl MatrixFile {
    pub fn from_matrix(x: &Matrix) -> Self {
        let (m, n) = x.shape();
        let entries = (0..m)
            .map(|i| (0..n).map(|j| [x[(i, j)].re, x[(i, j)].im]).collect())
            .collect();
        Self { m, n, entries }
    }

    pub fn to_matrix(&self) -> Matrix {
        Matrix::from_fn(self.m, self.n, |i, j| {
            let [re, im] = self.entries[i][j];
            Complex64::new(re, im)
        })
    }

    /// Checks that the dimensions match the entries and every value is finite.
    pub fn validate(&self) -> std::result::Result<(), String> {
        if self.m == 0 || self.n == 0 {
            return Err(format!(
                "dimensions must be positive, got m = {}, n = {}",
                self.m, self.n
            ));
        }
        if self.entries.len() != self.m {
            return Err(format!(
                "field \"entries\": expected m = {} rows, found {} (row {} missing)",
                self.m,
                self.entries.len(),
                self.entries.len().min(self.m)
            ));
        }
        for (i, row) in self.entries.iter().enumerate() {
            if row.len() != self.n {
                return Err(format!("row {i}: expected n = {} entries, found {}", self.n, row.len()));
            }
            for (j, pair) in row.iter().enumerate() {
                if !pair.iter().all(|v| v.is_finite()) {
                    return Err(format!("row {i}, column {j}: value is not finite"));
                }
            }
        }
        Ok(())
    }

    /// Parses and validates a matrix file's contents.
    pub fn parse(text: &str) -> std::result::Result<Self, String> {
        let value: Value = serde_json::from_str(text).map_err(|e| format!("invalid JSON: {e}"))?;
        let obj = value
            .as_object()
            .ok_or("top level must be an object with fields m, n, entries")?;
        let dim = |field: &str| -> std::result::Result<usize, String> {
            let v = obj.get(field).ok_or(format!("missing field \"{field}\""))?;
            v.as_u64()
                .map(|d| d as usize)
                .ok_or(format!("field \"{field}\": expected a nonnegative integer, found {v}"))
        };
        let (m, n) = (dim("m")?, dim("n")?);
        let rows = obj
            .get("entries")
            .ok_or("missing field \"entries\"")?
            .as_array()
            .ok_or("field \"entries\": expected an array of rows")?;
        let mut entries = Vec::with_capacity(rows.len());
        for (i, row) in rows.iter().enumerate() {
            let row = row
                .as_array()
                .ok_or(format!("row {i}: expected an array of [re, im] pairs"))?;
            let mut parsed = Vec::with_capacity(row.len());
            for (j, pair) in row.iter().enumerate() {
                let bad = || format!("row {i}, column {j}: expected a [re, im] pair of numbers, found {pair}");
                let pair = pair.as_array().filter(|p| p.len() == 2).ok_or_else(bad)?;
                let re = pair[0].as_f64().ok_or_else(bad)?;
                let im = pair[1].as_f64().ok_or_else(bad)?;
                parsed.push([re, im]);
            }
            entries.push(parsed);
        }
        let file = Self { m, n, entries };
        file.validate()?;
        Ok(file)
    }

    /// One row per line; numbers in shortest round-trip form.
    pub fn serialize(&self) -> String {
        let mut out = format!("{{\n  \"m\": {},\n  \"n\": {},\n  \"entries\": [\n", self.m, self.n);
        for (i, row) in self.entries.iter().enumerate() {
            out.push_str("    [");
            for (j, [re, im]) in row.iter().enumerate() {
                if j > 0 {
                    out.push_str(", ");
                }
                let _ = write!(out, "[{}, {}]", number(*re), number(*im));
            }
            out.push(']');
            if i + 1 < self.entries.len() {
                out.push(',');
            }
            out.push('\n');
        }
        out.push_str("  ]\n}\n");
        out
    }
}

/// Shortest decimal that parses back to the same `f64`.
fn number(v: f64) -> String {
    serde_json::to_string(&v).expect("finite values serialize")
}

/// A parsed input file together with the SHA-256 of its bytes.
#[derive(Debug, Clone)]
pub struct Input {
    pub matrix: Matrix,
    pub sha256: String,
}

pub fn read_input(path: &Path) -> Result<Input> {
    let bytes = std::fs::read(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })?;
    let sha256 = hex::encode(Sha256::digest(&bytes));
    let text = String::from_utf8(bytes).map_err(|_| CliError::Parse {
        path: path.to_owned(),
        message: "file is not valid UTF-8".into(),
    })?;
    let file = MatrixFile::parse(&text).map_err(|message| CliError::Parse {
        path: path.to_owned(),
        message,
    })?;
    Ok(Input {
        matrix: file.to_matrix(),
        sha256,
    })
}

pub fn write_matrix(path: &Path, x: &Matrix) -> Result<()> {
    std::fs::write(path, MatrixFile::from_matrix(x).serialize()).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}
