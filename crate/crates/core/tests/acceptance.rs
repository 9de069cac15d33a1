//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use schur_cert::extremum::{example_l2_hessian, hessian_fd, ProductFunctional};
use schur_cert::oracle::{
    compare_with_oracle, random_bidiagonal, random_self_adjoint, standard_instance, Construction, Rng,
};
use schur_cert::schur_first::remark_identity_residual;
use schur_cert::{
    check_nn, check_nn_3x3, check_pd, check_pd_3x3, check_pd_bidiagonal, classify_critical_point, count_inequalities,
    energy_identity_residual, example_l2_functional, gen_schur_first_3, invert, is_pd_leaf, sym_eig_min, BlockMatrix,
    CheckMode, Classification, NnVerdict, PdVerdict, Tolerances,
};

fn tol() -> Tolerances {
    Tolerances::default()
}

type Criterion = (u32, &'static str, Option<Duration>, fn() -> Outcome);

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(failures: Vec<String>, summary: String) -> Outcome {
    if failures.is_empty() {
        Outcome {
            ok: true,
            detail: summary,
        }
    } else {
        let shown: Vec<&str> = failures.iter().take(5).map(String::as_str).collect();
        Outcome {
            ok: false,
            detail: format!("{summary}; {} failure(s): {}", failures.len(), shown.join("; ")),
        }
    }
}

fn recursive_count(n: u64, memo: &mut Vec<u64>) -> u64 {
    if memo[n as usize] != 0 {
        return memo[n as usize];
    }
    let v = if n == 1 {
        1
    } else if n.is_multiple_of(2) {
        4 * recursive_count(n / 2, memo)
    } else {
        2 * (recursive_count(n / 2, memo) + recursive_count(n / 2 + 1, memo))
    };
    memo[n as usize] = v;
    v
}

fn criterion_1() -> Outcome {
    let mut failures = Vec::new();
    let mut memo = vec![0u64; 1026];
    let mut over = Vec::new();
    for n in 1..=1024u64 {
        let v = count_inequalities(n as usize);
        let k = 63 - n.leading_zeros() as u64;
        let closed = (1u64 << k) * (3 * n - (1u64 << (k + 1)));
        if v != closed {
            failures.push(format!("closed form differs at n = {n}"));
        }
        if v != recursive_count(n, &mut memo) {
            failures.push(format!("recursion differs at n = {n}"));
        }
        if v < n * n {
            failures.push(format!("V_{n} = {v} < n²"));
        }
        if v > (n + 1) * (n + 1) {
            over.push((n, v));
        }
    }
    for (n, want) in [(3, 10), (4, 16), (8, 64)] {
        if count_inequalities(n) != want {
            failures.push(format!("V_{n} != {want}"));
        }
    }
    if let Some(&(n, v)) = over.first() {
        failures.push(format!(
            "upper bound V_n ≤ (n+1)² violated for {} of 1024 values, first at n = {n} (V = {v} > {})",
            over.len(),
            (n + 1) * (n + 1)
        ));
    }
    outcome(
        failures,
        "closed form and recursion agree on n = 1..1024, V₃ = 10, V₄ = 16, V₈ = 64".into(),
    )
}

fn criterion_2() -> Outcome {
    let mut failures = Vec::new();
    let mut rng = Rng::new(2);
    for n in 1..=16usize {
        let dims: Vec<usize> = (0..n).map(|_| rng.one_to(3)).collect();
        let b = random_self_adjoint(&dims, rng.range(0.1, 1.0), Construction::Gram, rng.next_u64());
        let cert = check_pd(&b, &tol(), CheckMode::FullTree).unwrap();
        let want = count_inequalities(n);
        if cert.verdict != PdVerdict::PositiveDefinite || cert.leaf_count as u64 != want {
            failures.push(format!(
                "n = {n}: {:?} with {} leaves, expected {want}",
                cert.verdict, cert.leaf_count
            ));
        }
    }
    outcome(failures, "full-tree leaf counts equal V_n for n = 1..16".into())
}

fn criterion_3() -> Outcome {
    let (mut failures, mut skipped, mut positive) = (Vec::new(), 0, 0);
    for seed in 0..500u64 {
        let b = standard_instance(seed, 6);
        let c = compare_with_oracle(&b, &tol()).unwrap();
        // boundary for the PD decision alone
        if c.lambda_min.abs() <= 10.0 * tol().pd_eps * c.scale {
            skipped += 1;
            continue;
        }
        positive += c.oracle_pd as usize;
        if !c.pd_agree {
            failures.push(format!("seed {seed}: {:?} vs λ_min = {:e}", c.pd_verdict, c.lambda_min));
        }
    }
    outcome(
        failures,
        format!("500 instances, {skipped} boundary skipped, {positive} positive definite, all verdicts agree"),
    )
}

fn criterion_4() -> Outcome {
    let (mut failures, mut compared, mut gated) = (Vec::new(), 0, 0);
    for seed in 0..500u64 {
        let b = standard_instance(seed, 6);
        let c = compare_with_oracle(&b, &tol()).unwrap();
        if c.nn_verdict == NnVerdict::PreconditionFailed {
            gated += 1;
            continue;
        }
        if c.lambda_min.abs() <= 10.0 * tol().nn_tol * c.scale {
            continue;
        }
        compared += 1;
        if (c.nn_verdict == NnVerdict::Nonnegative) != c.oracle_nn {
            failures.push(format!("seed {seed}: {:?} vs λ_min = {:e}", c.nn_verdict, c.lambda_min));
        }
    }
    outcome(
        failures,
        format!("{compared} gated instances compared ({gated} with a failed gate), all agree"),
    )
}

fn criterion_5() -> Outcome {
    let mut failures = Vec::new();
    let n = 4;
    let phi = example_l2_functional::<f64>(n).unwrap();
    let y = vec![vec![0.0; n]; 3];
    let h = hessian_fd(&phi, &y, 1e-3).unwrap();
    let want = example_l2_hessian::<f64>(n).unwrap();
    let dev = h.flatten().subtract(&want.flatten()).unwrap().max_norm();
    if dev > 1e-4 {
        failures.push(format!("Hessian deviates by {dev:e}"));
    }

    let inv = invert(h.block(0, 0), &tol()).unwrap();
    let inv_want = [[2.0 / 7.0, -1.0 / 7.0], [-1.0 / 7.0, 4.0 / 7.0]];
    let complement = gen_schur_first_3(&h, 3, 1, 3, &tol()).unwrap();
    let comp_want = [[26.0 / 7.0, 1.0], [1.0, 2.0]];
    let (mut inv_dev, mut comp_dev) = (0.0f64, 0.0f64);
    for r in 0..2 {
        for c in 0..2 {
            inv_dev = inv_dev.max((inv[(r, c)] - inv_want[r][c]).abs());
            comp_dev = comp_dev.max((complement[(r, c)] - comp_want[r][c]).abs());
        }
    }
    if inv_dev > 1e-9 {
        failures.push(format!("inverse leading block off by {inv_dev:e}"));
    }
    if comp_dev > 1e-8 {
        failures.push(format!("complement leading block off by {comp_dev:e}"));
    }

    let report = classify_critical_point(&phi, &y, &tol(), None, None).unwrap();
    if report.classification != Classification::StrongLocalMin {
        failures.push(format!("classified {:?}", report.classification));
    }
    let bi = check_pd_bidiagonal(&h, &tol()).unwrap();
    if bi.leaf_count != 5 || !bi.is_positive_definite() {
        failures.push(format!(
            "bidiagonal path: {:?} with {} checks",
            bi.verdict, bi.leaf_count
        ));
    }
    outcome(
        failures,
        format!(
            "Hessian dev {dev:.1e}, inverse dev {inv_dev:.1e}, complement dev {comp_dev:.1e}, StrongLocalMin, 5 checks"
        ),
    )
}

fn criterion_6() -> Outcome {
    let (mut failures, mut skipped, mut nn_compared) = (Vec::new(), 0, 0);
    let mut rng = Rng::new(6);
    for k in 0..500 {
        let dims: Vec<usize> = (0..3).map(|_| rng.one_to(4)).collect();
        let b = random_self_adjoint(
            &dims,
            rng.range(-1.0, 1.0),
            Construction::Conjugated { spread: 4.0 },
            rng.next_u64(),
        );
        let lam = sym_eig_min(&b.flatten(), &tol()).unwrap();
        if lam.abs() <= 10.0 * tol().pd_eps.max(tol().nn_tol) * b.scale_floor() {
            skipped += 1;
            continue;
        }
        let (general, explicit) = (
            check_pd(&b, &tol(), CheckMode::EarlyExit).unwrap(),
            check_pd_3x3(&b, &tol()).unwrap(),
        );
        if general.verdict != explicit.verdict {
            failures.push(format!(
                "3-block #{k}: check_pd {:?}, check_pd_3x3 {:?}",
                general.verdict, explicit.verdict
            ));
        }
        let (general, explicit) = (check_nn(&b, &tol()).unwrap(), check_nn_3x3(&b, &tol()).unwrap());
        if general.verdict != NnVerdict::PreconditionFailed {
            nn_compared += 1;
        }
        if general.verdict != explicit.verdict {
            failures.push(format!(
                "3-block #{k}: check_nn {:?}, check_nn_3x3 {:?}",
                general.verdict, explicit.verdict
            ));
        }
    }
    let mut bidiagonal_pd = 0;
    for k in 0..200 {
        let n = 1 + rng.one_to(5);
        let dims: Vec<usize> = (0..n).map(|_| rng.one_to(3)).collect();
        let b = random_bidiagonal(&dims, rng.next_u64());
        let general = check_pd(&b, &tol(), CheckMode::EarlyExit).unwrap();
        let fast = check_pd_bidiagonal(&b, &tol()).unwrap();
        let want_checks = 2 * n - n % 2;
        bidiagonal_pd += fast.is_positive_definite() as usize;
        if general.verdict != fast.verdict {
            failures.push(format!(
                "bidiagonal #{k}: check_pd {:?}, fast path {:?}",
                general.verdict, fast.verdict
            ));
        }
        if fast.is_positive_definite() && fast.leaf_count != want_checks {
            failures.push(format!("bidiagonal #{k}: {} checks for n = {n}", fast.leaf_count));
        }
    }
    outcome(
        failures,
        format!(
            "500 three-block ({skipped} boundary skipped, {nn_compared} with passing gates) and 200 bidiagonal ({bidiagonal_pd} PD) instances agree"
        ),
    )
}

fn criterion_7() -> Outcome {
    let (mut failures, mut worst, mut done, mut rejected) = (Vec::new(), 0.0f64, 0, 0);
    let mut rng = Rng::new(7);
    while done < 200 {
        let n = 1 + rng.one_to(5);
        let dims: Vec<usize> = (0..n).map(|_| rng.one_to(4)).collect();
        let b = random_self_adjoint(
            &dims,
            rng.range(-1.0, 1.0),
            Construction::Conjugated { spread: 4.0 },
            rng.next_u64(),
        );
        match remark_identity_residual(&b, &tol()) {
            Ok(r) => {
                let rel = r / b.scale_floor();
                worst = worst.max(rel);
                if rel > 1e-7 {
                    failures.push(format!("instance {done}: residual {rel:e}·scale"));
                }
                done += 1;
            }
            Err(_) => rejected += 1,
        }
    }
    outcome(
        failures,
        format!("200 instances ({rejected} with a singular unit redrawn), worst residual {worst:.1e}·scale"),
    )
}

fn criterion_8() -> Outcome {
    let (mut failures, mut worst, mut done) = (Vec::new(), 0.0f64, 0);
    let mut rng = Rng::new(8);
    while done < 200 {
        let dims = [rng.one_to(4), rng.one_to(4)];
        let b = random_self_adjoint(
            &dims,
            rng.range(-1.0, 1.0),
            Construction::Conjugated { spread: 4.0 },
            rng.next_u64(),
        );
        if !is_pd_leaf(b.block(0, 0), &tol()).unwrap().verdict {
            continue;
        }
        let h = rng.point(&dims);
        let r = energy_identity_residual(&b, &h, &tol()).unwrap() / b.scale_floor();
        worst = worst.max(r);
        if r > 1e-9 {
            failures.push(format!("pair {done}: residual {r:e}·scale"));
        }
        done += 1;
    }
    outcome(failures, format!("200 pairs, worst residual {worst:.1e}·scale"))
}

fn quadratic(b: BlockMatrix, center: Vec<Vec<f64>>) -> ProductFunctional<f64> {
    ProductFunctional::new(b.dims().to_vec(), move |p: &[Vec<f64>]| {
        let d: Vec<Vec<f64>> = p
            .iter()
            .zip(&center)
            .map(|(x, c)| x.iter().zip(c).map(|(a, b)| a - b).collect())
            .collect();
        0.5 * b.quadratic_form(&d).unwrap() + 3.0
    })
    .unwrap()
}

fn criterion_9() -> Outcome {
    let mut failures = Vec::new();
    let mut rng = Rng::new(9);
    let mut cases: Vec<(String, ProductFunctional<f64>, Vec<Vec<f64>>)> = vec![(
        "l2 example".into(),
        example_l2_functional(4).unwrap(),
        vec![vec![0.0; 4]; 3],
    )];
    for (i, dims) in [vec![2, 3], vec![1, 1, 1], vec![3, 2, 2, 1]].into_iter().enumerate() {
        let b = random_self_adjoint(
            &dims,
            rng.range(0.05, 0.5),
            Construction::Conjugated { spread: 4.0 },
            rng.next_u64(),
        );
        let y = rng.point(&dims);
        cases.push((format!("quadratic {}", i + 1), quadratic(b, y.clone()), y));
    }
    let mut certified = 0;
    for (name, phi, y) in &cases {
        let report = classify_critical_point(phi, y, &tol(), None, None).unwrap();
        if report.classification != Classification::StrongLocalMin {
            failures.push(format!(
                "{name}: classified {:?} ({:?})",
                report.classification, report.reason
            ));
            continue;
        }
        certified += 1;
        let scale = y.iter().flatten().map(|v| v * v).sum::<f64>().sqrt().max(1.0);
        let f0 = phi.eval(y).unwrap();
        for s in 0..100 {
            let h = rng.point_on_sphere(phi.dims(), 1e-3 * scale);
            let p: Vec<Vec<f64>> = y
                .iter()
                .zip(&h)
                .map(|(a, b)| a.iter().zip(b).map(|(x, d)| x + d).collect())
                .collect();
            if phi.eval(&p).unwrap() <= f0 {
                failures.push(format!("{name}: sample {s} does not increase Φ"));
            }
        }
    }
    outcome(
        failures,
        format!("{certified} of 4 functionals certified, 100 perturbations each increase Φ"),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        (1, "count formula", Some(Duration::from_secs(1)), criterion_1),
        (2, "full-tree leaf counts", Some(Duration::from_secs(30)), criterion_2),
        (3, "oracle equivalence (PD)", Some(Duration::from_secs(60)), criterion_3),
        (4, "oracle equivalence (NN)", Some(Duration::from_secs(60)), criterion_4),
        (5, "l2 example regression", Some(Duration::from_secs(5)), criterion_5),
        (6, "cross-path equivalence", Some(Duration::from_secs(60)), criterion_6),
        (7, "remark identity", None, criterion_7),
        (8, "energy identity", None, criterion_8),
        (9, "sufficiency sanity", None, criterion_9),
    ];
    let mut all_ok = true;
    for (id, name, limit, run) in criteria {
        let start = Instant::now();
        let mut o = run();
        let elapsed = start.elapsed();
        if let Some(limit) = limit {
            if elapsed > limit {
                o.ok = false;
                o.detail += &format!("; exceeded {} s", limit.as_secs());
            }
        }
        all_ok &= o.ok;
        println!(
            "acceptance {id} {}: {name}: {} ({:.3} s)",
            if o.ok { "PASS" } else { "FAIL" },
            o.detail,
            elapsed.as_secs_f64()
        );
    }
    if all_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
