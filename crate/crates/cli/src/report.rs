//! Serializable reports. The human-readable form is rendered from the same
//! JSON value as `--json`, so both carry identical data.

use serde::Serialize;
use serde_json::Value;

use crate::matrix_file::MatrixFile;
use schurkit::{Diagnostics, NormResult, Verification};

#[derive(Debug, Clone, Serialize)]
pub struct DiagnosticsReport {
    pub gap: f64,
    pub iterations: usize,
    pub feasibility_residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dual_rescale: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cuts: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub block_balance: Option<f64>,
}

impl From<&Diagnostics> for DiagnosticsReport {
    fn from(d: &Diagnostics) -> Self {
        Self {
            gap: d.gap,
            iterations: d.iterations,
            feasibility_residual: d.feasibility_residual,
            dual_rescale: d.dual_rescale,
            cuts: d.cuts,
            block_balance: d.block_balance,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CertificateCheckReport {
    /// `Tr(Z* X)` as `[re, im]`.
    pub pairing: [f64; 2],
    pub pairing_residual: f64,
    /// `||Z||_S`, recomputed from scratch.
    pub schur_norm: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub passed: bool,
    pub feasible: bool,
    pub feasibility_residual: f64,
    pub value_consistent: bool,
    pub value_residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CertificateCheckReport>,
}

impl From<&Verification> for VerificationReport {
    fn from(v: &Verification) -> Self {
        Self {
            passed: v.passed(),
            feasible: v.feasible,
            feasibility_residual: v.feasibility_residual,
            value_consistent: v.value_consistent,
            value_residual: v.value_residual,
            certificate: v.certificate.as_ref().map(|c| CertificateCheckReport {
                pairing: [c.pairing.re, c.pairing.im],
                pairing_residual: c.pairing_residual,
                schur_norm: c.schur_norm,
                passed: c.passed,
            }),
        }
    }
}

/// Output of `norm`.
#[derive(Debug, Clone, Serialize)]
pub struct ResultReport {
    pub input_sha256: String,
    pub kind: &'static str,
    pub value: f64,
    pub method: &'static str,
    pub tol: f64,
    /// Witness and certificate live on the block embedding.
    pub embedded: bool,
    pub witness: MatrixFile,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<MatrixFile>,
    pub diagnostics: DiagnosticsReport,
    pub verification: VerificationReport,
}

impl ResultReport {
    pub fn new(sha256: String, tol: f64, result: &NormResult, verification: &Verification) -> Self {
        Self {
            input_sha256: sha256,
            kind: result.kind.as_str(),
            value: result.value,
            method: result.method.as_str(),
            tol,
            embedded: result.embedded,
            witness: MatrixFile::from_matrix(&result.witness),
            certificate: result.certificate.as_ref().map(MatrixFile::from_matrix),
            diagnostics: (&result.diagnostics).into(),
            verification: verification.into(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum Factors {
    Cbb {
        eta: Vec<f64>,
        xi: Vec<f64>,
        b: MatrixFile,
        b_norm: f64,
    },
    SchurLr {
        l: MatrixFile,
        r: MatrixFile,
        l_column_norm: f64,
        r_column_norm: f64,
    },
    Sqrtp {
        p: MatrixFile,
        e: MatrixFile,
        e_norm: f64,
    },
}

#[derive(Debug, Clone, Serialize)]
pub struct FactorCheck {
    pub passed: bool,
    /// Frobenius distance between the reassembled product and `X`.
    pub reconstruction_residual: f64,
    pub reconstruction_ok: bool,
    /// Distance between the factor norm bound and the norm value.
    pub norm_residual: f64,
    pub norm_ok: bool,
}

/// Output of `factorize`.
#[derive(Debug, Clone, Serialize)]
pub struct FactorReport {
    pub input_sha256: String,
    pub kind: &'static str,
    pub value: f64,
    pub tol: f64,
    pub factors: Factors,
    pub verification: FactorCheck,
}

/// Output of `certify`: both sides of `Tr(Z* X) = ||X||_cbB` and `||Z||_S <= 1`.
#[derive(Debug, Clone, Serialize)]
pub struct CertifyReport {
    pub input_sha256: String,
    pub tol: f64,
    pub method: &'static str,
    pub value: f64,
    pub pairing: [f64; 2],
    pub pairing_residual: f64,
    pub certificate_schur_norm: f64,
    pub certificate: MatrixFile,
    pub verification: VerificationReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct SandwichCheck {
    pub schur_lower: f64,
    pub schur: f64,
    pub schur_upper: f64,
    pub cbb_lower: f64,
    pub cbb: f64,
    pub cbb_upper: f64,
    pub violations: Vec<String>,
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct BracketCheck {
    pub lower: f64,
    pub upper: f64,
    pub value: f64,
    pub contains: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct EngineCheck {
    pub first: f64,
    pub second: f64,
    pub relative_difference: f64,
    pub agree: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct InstanceChecks {
    pub sandwich: SandwichCheck,
    pub schur_bracket: BracketCheck,
    pub cbb_bracket: BracketCheck,
    /// Dispatching solver vs the barrier SDP.
    pub schur_engines: EngineCheck,
    /// Barrier SDP vs cutting plane.
    pub cbb_engines: EngineCheck,
}

#[derive(Debug, Clone, Serialize)]
pub struct InstanceReport {
    pub path: String,
    /// `"pass"`, `"fail"` or `"error"`.
    pub status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input_sha256: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub checks: Option<InstanceChecks>,
}

/// Output of `check`, one entry per input in command-line order.
#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub seed: u64,
    pub trials: usize,
    pub tol: f64,
    pub passed: usize,
    pub failed: usize,
    pub errors: usize,
    pub instances: Vec<InstanceReport>,
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(report: &T) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("reports serialize");
    s.push('\n');
    s
}

/// Indented `key: value` rendering of the report's JSON value. Matrices
/// (objects with `m`, `n`, `entries`) print one row per line.
pub fn to_text<T: Serialize>(report: &T) -> String {
    let value = serde_json::to_value(report).expect("reports serialize");
    let mut out = String::new();
    render(&value, 0, &mut out);
    out
}

fn is_matrix(v: &Value) -> bool {
    v.as_object()
        .is_some_and(|o| o.len() == 3 && o.contains_key("m") && o.contains_key("n") && o.contains_key("entries"))
}

fn render(value: &Value, depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth);
    match value {
        Value::Object(map) => {
            for (key, v) in map {
                if is_matrix(v) {
                    out.push_str(&format!("{pad}{key}: {} x {}\n", v["m"], v["n"]));
                    for row in v["entries"].as_array().into_iter().flatten() {
                        out.push_str(&format!("{pad}  {row}\n"));
                    }
                } else if v.is_object() {
                    out.push_str(&format!("{pad}{key}:\n"));
                    render(v, depth + 1, out);
                } else if let Some(items) = v.as_array().filter(|a| a.iter().any(Value::is_object)) {
                    out.push_str(&format!("{pad}{key}:\n"));
                    for (k, item) in items.iter().enumerate() {
                        out.push_str(&format!("{pad}  [{k}]\n"));
                        render(item, depth + 2, out);
                    }
                } else {
                    out.push_str(&format!("{pad}{key}: {v}\n"));
                }
            }
        }
        other => out.push_str(&format!("{pad}{other}\n")),
    }
}
