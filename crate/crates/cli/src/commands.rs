//! Subcommand grammar and handlers.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{CliError, Result, EXIT_USAGE, EXIT_VERIFICATION};
use crate::matrix_file::{read_input, write_matrix, Input, MatrixFile};
use crate::report::*;
use schurkit::linalg::{column_norm, eigvalsh, operator_norm, psd_sqrt};
use schurkit::oracles::{cbb_bracket, schur_bracket};
use schurkit::{
    cbb_factorization_with, cbb_norm, norm_sandwich, schur_lr_factorization, schur_norm, sqrtp_contraction, verify,
    CbbMethod, Matrix, SchurMethod, DEFAULT_TOL,
};

/// Smallest accepted tolerance; smaller requests are raised to it.
pub const MIN_TOL: f64 = 1e-12;
/// Environment variable consulted when `--seed` is absent.
pub const SEED_ENV: &str = "SCHURKIT_SEED";
const DEFAULT_TRIALS: usize = 200;
/// Relative agreement required between engines in `check`, at the default
/// tolerance; looser tolerances widen it proportionally.
const ENGINE_AGREEMENT: f64 = 1e-6;
/// Reconstruction tolerance of factorizations, relative to `1 + ||X||_F`.
const RECONSTRUCTION_TOL: f64 = 1e-8;
/// Agreement of a factorization's norm bound with the norm value, relative
/// to `1 + value`.
const FACTOR_NORM_TOL: f64 = 1e-6;

#[derive(Debug, Parser)]
#[command(
    name = "schurkit",
    version,
    about = "Schur multiplier norm and its dual norm for complex matrices"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Schur,
    Cbb,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Auto,
    Sdp,
    CuttingPlane,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FactorKindArg {
    Cbb,
    SchurLr,
    Sqrtp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GenType {
    Psd,
    Selfadjoint,
    General,
    Diag,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute a norm with its witness and (for cbb) its certificate.
    Norm {
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "auto")]
        method: MethodArg,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[arg(long)]
        json: bool,
    },
    /// Compute an optimal factorization.
    Factorize {
        #[arg(long, value_enum)]
        kind: FactorKindArg,
        #[arg(long = "in")]
        input: PathBuf,
        /// Engine for the cbb factorization.
        #[arg(long, value_enum, default_value = "sdp")]
        method: MethodArg,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[arg(long)]
        json: bool,
    },
    /// Compute the cbb norm with its duality certificate and re-check it from scratch.
    Certify {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "auto")]
        method: MethodArg,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[arg(long)]
        json: bool,
    },
    /// Sandwich bounds, sampled brackets and engine agreement for each input.
    Check {
        #[arg(long = "in", num_args = 1.., required = true)]
        inputs: Vec<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_TRIALS)]
        trials: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[arg(long)]
        json: bool,
    },
    /// Write a random matrix file.
    Gen {
        #[arg(long = "type", value_enum)]
        kind: GenType,
        #[arg(long)]
        n: usize,
        /// Row count (general matrices only; defaults to n).
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
}

/// Outcome of a command: text for standard output and the exit code.
struct Outcome {
    text: String,
    code: u8,
}

impl Outcome {
    fn report<T: Serialize>(report: &T, json: bool, passed: bool) -> Self {
        Self {
            text: if json { to_json(report) } else { to_text(report) },
            code: if passed { 0 } else { EXIT_VERIFICATION },
        }
    }
}

/// Runs the command line, writing reports to `out` and errors to `err`;
/// returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let display_only = matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            if display_only {
                let _ = write!(out, "{e}");
                return 0;
            }
            let _ = write!(err, "{e}");
            return EXIT_USAGE;
        }
    };
    match execute(cli.command, err) {
        Ok(o) => {
            let _ = out.write_all(o.text.as_bytes());
            o.code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn execute(command: Command, err: &mut dyn Write) -> Result<Outcome> {
    match command {
        Command::Norm {
            kind,
            input,
            method,
            tol,
            json,
        } => norm(kind, &input, method, effective_tol(tol, err)?, json),
        Command::Factorize {
            kind,
            input,
            method,
            tol,
            json,
        } => factorize(kind, &input, method, effective_tol(tol, err)?, json),
        Command::Certify {
            input,
            method,
            tol,
            json,
        } => certify(&input, method, effective_tol(tol, err)?, json),
        Command::Check {
            inputs,
            trials,
            seed,
            tol,
            json,
        } => {
            if trials == 0 {
                return Err(CliError::Usage("--trials must be at least 1".into()));
            }
            let seed = resolve_seed(seed)?.unwrap_or(0);
            check(&inputs, trials, seed, effective_tol(tol, err)?, json)
        }
        Command::Gen { kind, n, m, seed, out } => {
            let seed = resolve_seed(seed)?.ok_or_else(|| CliError::Usage(format!("gen needs --seed or {SEED_ENV}")))?;
            generate(kind, n, m, seed, &out)
        }
    }
}

/// Validates `--tol` and raises it to [`MIN_TOL`] when smaller.
fn effective_tol(tol: f64, err: &mut dyn Write) -> Result<f64> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(CliError::Usage(format!("--tol must be positive and finite, got {tol}")));
    }
    if tol < MIN_TOL {
        let _ = writeln!(err, "warning: --tol {tol:e} raised to {MIN_TOL:e}");
        return Ok(MIN_TOL);
    }
    Ok(tol)
}

fn resolve_seed(seed: Option<u64>) -> Result<Option<u64>> {
    if seed.is_some() {
        return Ok(seed);
    }
    match std::env::var(SEED_ENV) {
        Ok(s) => s
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| CliError::Usage(format!("{SEED_ENV} must be an unsigned integer, got {s:?}"))),
        Err(_) => Ok(None),
    }
}

fn cbb_method(method: MethodArg) -> CbbMethod {
    match method {
        MethodArg::Auto => CbbMethod::Auto,
        MethodArg::Sdp => CbbMethod::Sdp,
        MethodArg::CuttingPlane => CbbMethod::CuttingPlane,
    }
}

fn schur_method(method: MethodArg) -> Result<SchurMethod> {
    match method {
        MethodArg::Auto => Ok(SchurMethod::Auto),
        MethodArg::Sdp => Ok(SchurMethod::Sdp),
        MethodArg::CuttingPlane => Err(CliError::Usage(
            "--method cutting-plane applies to --kind cbb only".into(),
        )),
    }
}

fn norm(kind: KindArg, path: &Path, method: MethodArg, tol: f64, json: bool) -> Result<Outcome> {
    let Input { matrix: x, sha256 } = read_input(path)?;
    let result = match kind {
        KindArg::Schur => schur_norm(&x, schur_method(method)?, tol)?,
        KindArg::Cbb => cbb_norm(&x, cbb_method(method), tol)?,
    };
    let v = verify(&x, &result, tol)?;
    let report = ResultReport::new(sha256, tol, &result, &v);
    Ok(Outcome::report(&report, json, v.passed()))
}

fn factor_check(reconstruction: f64, x: &Matrix, bound: f64, value: f64, extra_ok: bool) -> FactorCheck {
    let reconstruction_ok = reconstruction <= RECONSTRUCTION_TOL * (1.0 + x.frobenius_norm());
    let norm_residual = (bound - value).abs();
    let norm_ok = norm_residual <= FACTOR_NORM_TOL * (1.0 + value) && extra_ok;
    FactorCheck {
        passed: reconstruction_ok && norm_ok,
        reconstruction_residual: reconstruction,
        reconstruction_ok,
        norm_residual,
        norm_ok,
    }
}

fn factorize(kind: FactorKindArg, path: &Path, method: MethodArg, tol: f64, json: bool) -> Result<Outcome> {
    let Input { matrix: x, sha256 } = read_input(path)?;
    if kind != FactorKindArg::Cbb && method != MethodArg::Sdp {
        return Err(CliError::Usage("--method applies to --kind cbb only".into()));
    }
    let (kind_name, value, factors, check) = match kind {
        FactorKindArg::Cbb => {
            let f = cbb_factorization_with(&x, cbb_method(method), tol)?;
            let unit = |v: &[f64]| (v.iter().map(|a| a * a).sum::<f64>() - 1.0).abs() <= 1e-12;
            let check = factor_check(
                f.reconstruct().frobenius_dist(&x),
                &x,
                operator_norm(&f.b),
                f.value,
                unit(&f.eta) && unit(&f.xi),
            );
            let factors = Factors::Cbb {
                eta: f.eta,
                xi: f.xi,
                b: MatrixFile::from_matrix(&f.b),
                b_norm: f.b_norm,
            };
            ("cbb", f.value, factors, check)
        }
        FactorKindArg::SchurLr => {
            let f = schur_lr_factorization(&x, tol)?;
            let (cl, cr) = (column_norm(&f.l), column_norm(&f.r));
            let check = factor_check(f.l.adjoint_mul(&f.r)?.frobenius_dist(&x), &x, cl * cr, f.value, true);
            let factors = Factors::SchurLr {
                l: MatrixFile::from_matrix(&f.l),
                r: MatrixFile::from_matrix(&f.r),
                l_column_norm: cl,
                r_column_norm: cr,
            };
            ("schur-lr", f.value, factors, check)
        }
        FactorKindArg::Sqrtp => {
            let (p, e) = sqrtp_contraction(&x, tol)?;
            let s = psd_sqrt(&p, tol)?;
            let e_norm = operator_norm(&e);
            let value = p.diag_re().into_iter().fold(0.0, f64::max);
            let band = tol * (1.0 + operator_norm(&p));
            let dominates = eigvalsh(&(&p - &x))?[0] >= -band && eigvalsh(&(&p + &x))?[0] >= -band;
            let contraction = e_norm <= 1.0 + tol;
            let schur = schur_norm(&x, SchurMethod::Auto, tol)?.value;
            let check = factor_check(
                (&(&s * &e) * &s).frobenius_dist(&x),
                &x,
                value,
                schur,
                dominates && contraction,
            );
            let factors = Factors::Sqrtp {
                p: MatrixFile::from_matrix(&p),
                e: MatrixFile::from_matrix(&e),
                e_norm,
            };
            ("sqrtp", value, factors, check)
        }
    };
    let passed = check.passed;
    let report = FactorReport {
        input_sha256: sha256,
        kind: kind_name,
        value,
        tol,
        factors,
        verification: check,
    };
    Ok(Outcome::report(&report, json, passed))
}

fn certify(path: &Path, method: MethodArg, tol: f64, json: bool) -> Result<Outcome> {
    let Input { matrix: x, sha256 } = read_input(path)?;
    let result = cbb_norm(&x, cbb_method(method), tol)?;
    let v = verify(&x, &result, tol)?;
    let (Some(z), Some(c)) = (result.certificate.as_ref(), v.certificate.as_ref()) else {
        return Err(CliError::Solver(schurkit::Error::Verification(
            "the cbb solve produced no certificate".into(),
        )));
    };
    let report = CertifyReport {
        input_sha256: sha256,
        tol,
        method: result.method.as_str(),
        value: result.value,
        pairing: [c.pairing.re, c.pairing.im],
        pairing_residual: c.pairing_residual,
        certificate_schur_norm: c.schur_norm,
        certificate: MatrixFile::from_matrix(z),
        verification: (&v).into(),
    };
    Ok(Outcome::report(&report, json, v.passed()))
}

fn engine_check(first: f64, second: f64, tol: f64) -> EngineCheck {
    let relative_difference = (first - second).abs() / (1.0 + first.abs().max(second.abs()));
    EngineCheck {
        first,
        second,
        relative_difference,
        agree: relative_difference <= ENGINE_AGREEMENT.max(100.0 * tol),
    }
}

fn check_instance(x: &Matrix, trials: usize, seed: u64, tol: f64) -> Result<InstanceChecks> {
    let s = norm_sandwich(x, tol)?;
    let slack = 1e-6 * (1.0 + s.cbb_upper);
    let sb = schur_bracket(x, trials, seed)?;
    let cb = cbb_bracket(x, trials.min(20), seed)?;
    let schur_sdp = schur_norm(x, SchurMethod::Sdp, tol)?.value;
    let cbb_sdp = cbb_norm(x, CbbMethod::Sdp, tol)?.value;
    let cbb_cp = cbb_norm(x, CbbMethod::CuttingPlane, tol)?.value;
    Ok(InstanceChecks {
        schur_bracket: BracketCheck {
            lower: sb.lower,
            upper: sb.upper,
            value: s.schur,
            contains: sb.contains(s.schur, slack),
        },
        cbb_bracket: BracketCheck {
            lower: cb.lower,
            upper: cb.upper,
            value: s.cbb,
            contains: cb.contains(s.cbb, slack),
        },
        schur_engines: engine_check(s.schur, schur_sdp, tol),
        cbb_engines: engine_check(cbb_sdp, cbb_cp, tol),
        sandwich: SandwichCheck {
            holds: s.holds(),
            schur_lower: s.schur_lower,
            schur: s.schur,
            schur_upper: s.schur_upper,
            cbb_lower: s.cbb_lower,
            cbb: s.cbb,
            cbb_upper: s.cbb_upper,
            violations: s.violations,
        },
    })
}

fn instance_passed(c: &InstanceChecks) -> bool {
    c.sandwich.holds
        && c.schur_bracket.contains
        && c.cbb_bracket.contains
        && c.schur_engines.agree
        && c.cbb_engines.agree
}

fn check(inputs: &[PathBuf], trials: usize, seed: u64, tol: f64, json: bool) -> Result<Outcome> {
    // Instances run independently; collect() keeps command-line order.
    let instances: Vec<InstanceReport> = inputs
        .par_iter()
        .map(|path| {
            let display = path.display().to_string();
            let input = match read_input(path) {
                Ok(i) => i,
                Err(e) => {
                    return InstanceReport {
                        path: display,
                        status: "error",
                        input_sha256: None,
                        error: Some(e.to_string()),
                        checks: None,
                    }
                }
            };
            match check_instance(&input.matrix, trials, seed, tol) {
                Ok(c) => InstanceReport {
                    path: display,
                    status: if instance_passed(&c) { "pass" } else { "fail" },
                    input_sha256: Some(input.sha256),
                    error: None,
                    checks: Some(c),
                },
                Err(e) => InstanceReport {
                    path: display,
                    status: "fail",
                    input_sha256: Some(input.sha256),
                    error: Some(e.to_string()),
                    checks: None,
                },
            }
        })
        .collect();
    let count = |s: &str| instances.iter().filter(|i| i.status == s).count();
    let report = CheckReport {
        seed,
        trials,
        tol,
        passed: count("pass"),
        failed: count("fail"),
        errors: count("error"),
        instances,
    };
    let mut outcome = Outcome::report(&report, json, report.failed == 0);
    if report.errors > 0 {
        outcome.code = EXIT_USAGE;
    }
    Ok(outcome)
}

fn generate(kind: GenType, n: usize, m: Option<usize>, seed: u64, out: &Path) -> Result<Outcome> {
    if n == 0 || m == Some(0) {
        return Err(CliError::Usage("dimensions must be positive".into()));
    }
    if m.is_some_and(|m| m != n) && kind != GenType::General {
        return Err(CliError::Usage("--m differs from --n only for --type general".into()));
    }
    let mut rng = schurkit::sampling::seeded(seed);
    let x = match kind {
        GenType::Psd => schurkit::sampling::psd(&mut rng, n),
        GenType::Selfadjoint => schurkit::sampling::selfadjoint(&mut rng, n),
        GenType::General => schurkit::sampling::general(&mut rng, m.unwrap_or(n), n),
        GenType::Diag => schurkit::sampling::real_diag(&mut rng, n),
    };
    write_matrix(out, &x)?;
    let (rows, cols) = x.shape();
    Ok(Outcome {
        text: format!("wrote {} ({rows} x {cols}, seed {seed})\n", out.display()),
        code: 0,
    })
}
