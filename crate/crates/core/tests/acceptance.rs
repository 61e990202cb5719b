//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails. Every tolerance is pinned below.

use std::process::ExitCode;
use std::time::Instant;

use schurkit::linalg::{block_embed, entry_norms, offdiag_compress, operator_norm, schur_product, trace_norm};
use schurkit::oracles::{rank_one_domination_cbb, rank_one_schur_norm};
use schurkit::sampling::{self, Rng};
use schurkit::{
    cbb_factorization, cbb_factorization_with, cbb_norm, schur_lr_factorization, schur_norm, sqrtp_contraction_with,
    CbbMethod, Matrix, SchurMethod,
};

/// Solver tolerance used throughout (the library default).
const TOL: f64 = 1e-8;

type Outcome = Result<String, String>;

fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / (1.0 + a.abs().max(b.abs()))
}

fn max_diag(m: &Matrix) -> f64 {
    m.diag_re().into_iter().fold(f64::NEG_INFINITY, f64::max)
}

fn min_eig(m: &Matrix) -> f64 {
    schurkit::linalg::eigvalsh(m).map(|e| e[0]).unwrap_or(f64::NEG_INFINITY)
}

macro_rules! ensure {
    ($cond:expr, $($arg:tt)*) => {
        if $cond {
        } else {
            return Err(format!($($arg)*));
        }
    };
}

/// 1. Schur's theorem on random positive matrices, through the SDP path.
fn criterion_1() -> Outcome {
    const COUNT: usize = 200;
    const REL: f64 = 1e-6;
    let mut rng = sampling::seeded(0xA001);
    let mut worst: f64 = 0.0;
    for k in 0..COUNT {
        let n = rng.random_range(1..=10);
        let x = sampling::psd(&mut rng, n);
        let r = schur_norm(&x, SchurMethod::Sdp, TOL).map_err(|e| format!("instance {k}: {e}"))?;
        let want = max_diag(&x);
        let err = (r.value - want).abs() / (1.0 + want);
        worst = worst.max(err);
        ensure!(
            err <= REL,
            "instance {k} (n = {n}): sdp {} vs max diagonal {want}",
            r.value
        );
    }
    Ok(format!(
        "{COUNT} instances, worst relative error {worst:.1e} <= {REL:.0e}"
    ))
}

/// 2. The 2x2 example diag(1, -1/4) and its two displayed factorizations.
fn criterion_2() -> Outcome {
    const ABS: f64 = 1e-8;
    let x = Matrix::from_real_diag(&[1.0, -0.25]);
    for method in [SchurMethod::Auto, SchurMethod::Sdp] {
        let r = schur_norm(&x, method, TOL).map_err(|e| e.to_string())?;
        ensure!((r.value - 1.0).abs() <= ABS, "{method:?}: value {}", r.value);
    }
    let cases = [
        (Matrix::identity(2), x.clone()),
        (
            Matrix::from_real_diag(&[1.0, 0.25]),
            Matrix::from_real_diag(&[1.0, -1.0]),
        ),
    ];
    for (p, want_e) in &cases {
        ensure!(
            min_eig(&(p - &x)) >= -ABS && min_eig(&(p + &x)) >= -ABS,
            "P is not dominating"
        );
        ensure!((max_diag(p) - 1.0).abs() <= ABS, "||diag P|| = {}", max_diag(p));
        let e = sqrtp_contraction_with(&x, p, TOL).map_err(|e| e.to_string())?;
        ensure!((operator_norm(&e) - 1.0).abs() <= ABS, "||E|| = {}", operator_norm(&e));
        ensure!(e.max_abs_diff(want_e) <= ABS, "E = {e:?}");
    }
    Ok("value 1 (auto and sdp); P = I gives E = X, P = diag(1, 1/4) gives E = diag(1, -1)".into())
}

/// Shared instances for criteria 3 and 4.
fn selfadjoint_instances() -> Vec<Matrix> {
    let mut rng = sampling::seeded(0xA003);
    (0..100)
        .map(|_| {
            let n = rng.random_range(1..=8);
            sampling::selfadjoint(&mut rng, n)
        })
        .collect()
}

/// 3. Barrier SDP and cutting plane agree; the pool stays below 50 n cuts.
fn criterion_3(xs: &[Matrix]) -> Outcome {
    const REL: f64 = 1e-6;
    const CUTS_PER_DIM: usize = 50;
    let mut worst: f64 = 0.0;
    let mut worst_cuts: f64 = 0.0;
    for (k, x) in xs.iter().enumerate() {
        let n = x.rows();
        let sdp = cbb_norm(x, CbbMethod::Sdp, TOL).map_err(|e| format!("instance {k} sdp: {e}"))?;
        let cp = cbb_norm(x, CbbMethod::CuttingPlane, TOL).map_err(|e| format!("instance {k} cutting plane: {e}"))?;
        let err = rel_diff(sdp.value, cp.value);
        worst = worst.max(err);
        ensure!(
            err <= REL,
            "instance {k} (n = {n}): sdp {} vs cutting plane {}",
            sdp.value,
            cp.value
        );
        let cuts = cp.diagnostics.cuts.unwrap_or(usize::MAX);
        worst_cuts = worst_cuts.max(cuts as f64 / n as f64);
        ensure!(cuts <= CUTS_PER_DIM * n, "instance {k}: {cuts} cuts for n = {n}");
    }
    Ok(format!(
        "{} instances, worst relative difference {worst:.1e} <= {REL:.0e}, at most {worst_cuts:.1} n cuts",
        xs.len()
    ))
}

/// 4. Certificates from both engines: ||Z||_S <= 1 + 1e-6 and Tr(ZX) = value.
fn criterion_4(xs: &[Matrix]) -> Outcome {
    const SLACK: f64 = 1e-6;
    let mut worst_norm: f64 = 0.0;
    let mut worst_pair: f64 = 0.0;
    for (k, x) in xs.iter().enumerate() {
        for method in [CbbMethod::Sdp, CbbMethod::CuttingPlane] {
            let r = cbb_norm(x, method, TOL).map_err(|e| format!("instance {k} {method:?}: {e}"))?;
            let z = r
                .certificate
                .as_ref()
                .ok_or(format!("instance {k} {method:?}: no certificate"))?;
            let zs = schur_norm(z, SchurMethod::Auto, TOL).map_err(|e| e.to_string())?.value;
            let pair = (z * x).trace();
            let err = (pair.re - r.value).abs().max(pair.im.abs());
            worst_norm = worst_norm.max(zs);
            worst_pair = worst_pair.max(err / (1.0 + r.value));
            ensure!(zs <= 1.0 + SLACK, "instance {k} {method:?}: ||Z||_S = {zs}");
            ensure!(
                err <= SLACK * (1.0 + r.value),
                "instance {k} {method:?}: Tr(ZX) = {pair} vs {}",
                r.value
            );
        }
    }
    Ok(format!(
        "{} certificates, max ||Z||_S = {worst_norm:.9}, worst relative pairing error {worst_pair:.1e}",
        2 * xs.len()
    ))
}

/// 5. ||Y||_S = ||X||_S and ||Y||_cbB = 2 ||X||_cbB for Y = block_embed(X).
fn criterion_5() -> Outcome {
    const COUNT: usize = 100;
    const REL: f64 = 1e-6;
    let mut rng = sampling::seeded(0xA005);
    let (mut ws, mut wc): (f64, f64) = (0.0, 0.0);
    for k in 0..COUNT {
        let m = rng.random_range(1..=5);
        let n = rng.random_range(1..=7);
        let x = sampling::general(&mut rng, m, n);
        let y = block_embed(&x);
        let fail = |e: schurkit::Error| format!("instance {k} ({m}x{n}): {e}");
        let sx = schur_norm(&x, SchurMethod::Auto, TOL).map_err(fail)?.value;
        let sy = schur_norm(&y, SchurMethod::Auto, TOL).map_err(fail)?.value;
        let cx = cbb_norm(&x, CbbMethod::Auto, TOL).map_err(fail)?.value;
        let cy = cbb_norm(&y, CbbMethod::Auto, TOL).map_err(fail)?.value;
        let (es, ec) = ((sy - sx).abs() / sx, (cy - 2.0 * cx).abs() / (2.0 * cx));
        ws = ws.max(es);
        wc = wc.max(ec);
        ensure!(es <= REL, "instance {k} ({m}x{n}): ||Y||_S = {sy} vs ||X||_S = {sx}");
        ensure!(
            ec <= REL,
            "instance {k} ({m}x{n}): ||Y||_cbB = {cy} vs 2 ||X||_cbB = {}",
            2.0 * cx
        );
    }
    Ok(format!(
        "{COUNT} instances up to 5x7, worst relative errors {ws:.1e} (schur), {wc:.1e} (cbb)"
    ))
}

/// 6. The off-diagonal compression does not increase the Schur norm.
fn criterion_6() -> Outcome {
    const COUNT: usize = 200;
    const SLACK: f64 = 1e-7;
    let mut rng = sampling::seeded(0xA006);
    let mut worst = f64::NEG_INFINITY;
    for k in 0..COUNT {
        let size = rng.random_range(2..=6);
        let m = rng.random_range(1..size);
        let z = sampling::general(&mut rng, size, size);
        let c = offdiag_compress(&z, m).map_err(|e| e.to_string())?;
        let fail = |e: schurkit::Error| format!("instance {k}: {e}");
        let sz = schur_norm(&z, SchurMethod::Auto, TOL).map_err(fail)?.value;
        let sc = schur_norm(&c, SchurMethod::Auto, TOL).map_err(fail)?.value;
        worst = worst.max(sc - sz);
        ensure!(sc <= sz + SLACK, "instance {k} (size {size}, m = {m}): {sc} > {sz}");
    }
    Ok(format!("{COUNT} instances, max ||Psi(Z)||_S - ||Z||_S = {worst:.2e}"))
}

/// 7. Factorizations: reconstruction, optimality of the factor norms, and
///    agreement of xi between the two engines.
fn criterion_7() -> Outcome {
    const RECON: f64 = 1e-8;
    const NORM_ABS: f64 = 1e-6;
    const XI_ABS: f64 = 1e-5;
    let mut rng = sampling::seeded(0xA007);
    let (mut w_b, mut w_lr, mut w_xi): (f64, f64, f64) = (0.0, 0.0, 0.0);
    // cbB factorizations, self-adjoint and general.
    for k in 0..60 {
        let x = if k % 2 == 0 {
            let n = rng.random_range(1..=6);
            sampling::selfadjoint(&mut rng, n)
        } else {
            let (m, n) = (rng.random_range(1..=4), rng.random_range(1..=5));
            sampling::general(&mut rng, m, n)
        };
        let f = cbb_factorization(&x, TOL).map_err(|e| format!("cbb instance {k}: {e}"))?;
        let err = f.reconstruct().frobenius_dist(&x);
        ensure!(
            err <= RECON * (1.0 + x.frobenius_norm()),
            "cbb instance {k}: reconstruction error {err:e}"
        );
        let norm = cbb_norm(&x, CbbMethod::Sdp, 1e-10).map_err(|e| e.to_string())?.value;
        w_b = w_b.max((f.b_norm - norm).abs());
        ensure!(
            (f.b_norm - norm).abs() <= NORM_ABS,
            "cbb instance {k}: ||B|| = {} vs {norm}",
            f.b_norm
        );
    }
    // L* R factorizations.
    for k in 0..40 {
        let n = rng.random_range(1..=6);
        let x = if k % 4 == 0 {
            sampling::psd(&mut rng, n)
        } else {
            sampling::selfadjoint(&mut rng, n)
        };
        let f = schur_lr_factorization(&x, TOL).map_err(|e| format!("L*R instance {k}: {e}"))?;
        let err = f.l.adjoint_mul(&f.r).map_err(|e| e.to_string())?.frobenius_dist(&x);
        ensure!(
            err <= RECON * (1.0 + x.frobenius_norm()),
            "L*R instance {k}: reconstruction error {err:e}"
        );
        let cn = schurkit::linalg::column_norm(&f.l) * schurkit::linalg::column_norm(&f.r);
        let norm = schur_norm(&x, SchurMethod::Sdp, 1e-10)
            .map_err(|e| e.to_string())?
            .value;
        w_lr = w_lr.max((cn - norm).abs());
        ensure!(
            (cn - norm).abs() <= NORM_ABS,
            "L*R instance {k}: ||L||_c ||R||_c = {cn} vs {norm}"
        );
    }
    // xi from both engines.
    for k in 0..50 {
        let n = rng.random_range(2..=7);
        let x = sampling::selfadjoint(&mut rng, n);
        let a = cbb_factorization_with(&x, CbbMethod::Sdp, TOL).map_err(|e| format!("xi instance {k} sdp: {e}"))?;
        let b = cbb_factorization_with(&x, CbbMethod::CuttingPlane, TOL)
            .map_err(|e| format!("xi instance {k} cutting plane: {e}"))?;
        let d = a.xi.iter().zip(&b.xi).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
        w_xi = w_xi.max(d);
        ensure!(d <= XI_ABS, "xi instance {k} (n = {n}): engines differ by {d:e}");
    }
    Ok(format!(
        "worst | ||B|| - norm | {w_b:.1e}, | ||L||c||R||c - norm | {w_lr:.1e}, xi difference {w_xi:.1e}"
    ))
}

/// 8. Rank-one closed forms.
fn criterion_8() -> Outcome {
    const ABS: f64 = 1e-6;
    let mut rng = sampling::seeded(0xA008);
    let (mut ws, mut wc): (f64, f64) = (0.0, 0.0);
    for k in 0..100 {
        let (m, n) = (rng.random_range(1..=6), rng.random_range(1..=6));
        let u = sampling::vector(&mut rng, m);
        let v = sampling::vector(&mut rng, n);
        let x = Matrix::outer(&u, &v);
        let s = schur_norm(&x, SchurMethod::Auto, TOL)
            .map_err(|e| format!("schur instance {k}: {e}"))?
            .value;
        let want = rank_one_schur_norm(&u, &v);
        ws = ws.max((s - want).abs());
        ensure!((s - want).abs() <= ABS, "schur instance {k}: {s} vs {want}");

        let len = rng.random_range(1..=6);
        let e = sampling::vector(&mut rng, len);
        let c = cbb_norm(&Matrix::outer(&e, &e), CbbMethod::Auto, TOL)
            .map_err(|err| format!("cbb instance {k}: {err}"))?
            .value;
        let want = rank_one_domination_cbb(&e);
        wc = wc.max((c - want).abs());
        ensure!((c - want).abs() <= ABS, "cbb instance {k}: {c} vs {want}");
    }
    for n in 1..=4 {
        let c = cbb_norm(&Matrix::ones(n, n), CbbMethod::Auto, TOL)
            .map_err(|e| e.to_string())?
            .value;
        ensure!((c - (n * n) as f64).abs() <= ABS, "cbb(J_{n}) = {c}");
    }
    Ok(format!(
        "200 rank-one instances + J_1..J_4, worst errors {ws:.1e} (schur), {wc:.1e} (cbb)"
    ))
}

/// 9. Sandwich bounds on random instances and the multiplier inequality.
fn criterion_9() -> Outcome {
    const SCHUR_SLACK: f64 = 1e-7;
    const CBB_SLACK: f64 = 1e-6;
    const MULT_SLACK: f64 = 1e-7;
    let mut rng = sampling::seeded(0xA009);
    for k in 0..120 {
        let n = rng.random_range(1..=6);
        let x = match k % 4 {
            0 => sampling::psd(&mut rng, n),
            1 => sampling::selfadjoint(&mut rng, n),
            2 => sampling::real_diag(&mut rng, n),
            _ => {
                let m = rng.random_range(1..=5);
                sampling::general(&mut rng, m, n)
            }
        };
        let fail = |e: schurkit::Error| format!("instance {k}: {e}");
        let s = schur_norm(&x, SchurMethod::Auto, TOL).map_err(fail)?.value;
        let c = cbb_norm(&x, CbbMethod::Auto, TOL).map_err(fail)?.value;
        let (max_abs, l1) = entry_norms(&x);
        let (op, tr) = (operator_norm(&x), trace_norm(&x));
        ensure!(
            max_abs - SCHUR_SLACK <= s && s <= op + SCHUR_SLACK,
            "instance {k}: schur {s} outside [{max_abs}, {op}]"
        );
        ensure!(
            tr - CBB_SLACK <= c && c <= l1 + CBB_SLACK,
            "instance {k}: cbb {c} outside [{tr}, {l1}]"
        );
    }
    let mut worst = f64::NEG_INFINITY;
    for k in 0..500 {
        let (m, n) = (rng.random_range(1..=4), rng.random_range(1..=4));
        let x = sampling::general(&mut rng, m, n);
        let y = sampling::general(&mut rng, m, n);
        let s = schur_norm(&x, SchurMethod::Auto, TOL)
            .map_err(|e| format!("pair {k}: {e}"))?
            .value;
        let lhs = operator_norm(&schur_product(&x, &y).map_err(|e| e.to_string())?);
        let rhs = s * operator_norm(&y);
        worst = worst.max(lhs - rhs);
        ensure!(lhs <= rhs + MULT_SLACK, "pair {k}: ||X o Y|| = {lhs} > {rhs}");
    }
    Ok(format!(
        "120 sandwich instances; 500 multiplier pairs, max ||XoY|| - ||X||_S ||Y|| = {worst:.2e}"
    ))
}

/// 10. Zero rows/columns: lambda vanishes there and factorization succeeds.
fn criterion_10() -> Outcome {
    const REL: f64 = 1e-8;
    let mut rng = sampling::seeded(0xA010);
    let mut worst: f64 = 0.0;
    for k in 0..40 {
        let n = rng.random_range(3..=7);
        let zeros = rng.random_range(1..n);
        let mut idx: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            idx.swap(i, rng.random_range(0..=i));
        }
        let dead = &idx[..zeros];
        let (x, lambda_dead): (Matrix, Vec<usize>) = if k % 2 == 0 {
            // Self-adjoint: zero out matching rows and columns.
            let h = sampling::selfadjoint(&mut rng, n);
            let x = Matrix::from_fn(n, n, |i, j| {
                if dead.contains(&i) || dead.contains(&j) {
                    Default::default()
                } else {
                    h[(i, j)]
                }
            });
            (x, dead.to_vec())
        } else {
            // General m x n: zero columns only; they sit at offset m in lambda.
            let m = rng.random_range(2..=4);
            let g = sampling::general(&mut rng, m, n);
            let x = Matrix::from_fn(m, n, |i, j| {
                if dead.contains(&j) {
                    Default::default()
                } else {
                    g[(i, j)]
                }
            });
            (x, dead.iter().map(|j| m + j).collect())
        };
        for method in [CbbMethod::Sdp, CbbMethod::CuttingPlane] {
            let r = cbb_norm(&x, method, TOL).map_err(|e| format!("instance {k} {method:?}: {e}"))?;
            let lambda = r.witness.diag_re();
            let trace: f64 = lambda.iter().sum();
            for &j in &lambda_dead {
                worst = worst.max(lambda[j] / trace);
                ensure!(
                    lambda[j].abs() <= REL * trace,
                    "instance {k} {method:?}: lambda[{j}] = {:e}, trace {trace}",
                    lambda[j]
                );
            }
            let f = cbb_factorization_with(&x, method, TOL).map_err(|e| format!("instance {k} {method:?}: {e}"))?;
            let xi_offset = if r.embedded { lambda.len() - x.cols() } else { 0 };
            for &j in &lambda_dead {
                ensure!(
                    f.xi[j - xi_offset] == 0.0,
                    "instance {k} {method:?}: xi[{}] nonzero",
                    j - xi_offset
                );
            }
        }
    }
    Ok(format!(
        "40 instances, both engines, max lambda_j / Tr(lambda) on zero lines {worst:.1e}"
    ))
}

type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn main() -> ExitCode {
    let xs = selfadjoint_instances();
    let criteria: Vec<Criterion> = vec![
        ("Schur's theorem on positive matrices (SDP path)", Box::new(criterion_1)),
        (
            "2x2 example diag(1,-1/4) and its two factorizations",
            Box::new(criterion_2),
        ),
        (
            "engine cross-validation (barrier SDP vs cutting plane)",
            Box::new(|| criterion_3(&xs)),
        ),
        ("duality certificates", Box::new(|| criterion_4(&xs))),
        ("block embedding identities", Box::new(criterion_5)),
        ("off-diagonal compression", Box::new(criterion_6)),
        ("factorizations and xi uniqueness", Box::new(criterion_7)),
        ("rank-one oracle equivalence", Box::new(criterion_8)),
        ("sandwich bounds and multiplier inequality", Box::new(criterion_9)),
        ("support handling", Box::new(criterion_10)),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {:>2} [PRIMARY] {name}: {detail} ({secs:.1}s)", k + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {:>2} [PRIMARY] {name}: {detail} ({secs:.1}s)", k + 1);
            }
        }
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
