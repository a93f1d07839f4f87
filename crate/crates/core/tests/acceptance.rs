//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs with its own harness so the summary is always printed:
//! `cargo test -p tcdesign --test acceptance`.

use std::cmp::Ordering;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use tcdesign::constructors::{e_opt_approx, e_opt_exact, g_func, h_func, optimal_control_replication, verify_btib, GhVariant};
use tcdesign::criteria::Criterion;
use tcdesign::design::{ApproximateDesign, BlockDesign};
use tcdesign::info::{apply_to_ones, compare_lambda_min, contrast_info, spectrum};
use tcdesign::oracle::{
    brute_force_optimum, certify, compositions, enumerate_designs, sweep_invariants, CertifyOptions, Claim, DesignSampler,
    DEFAULT_BUDGET,
};
use tcdesign::{ExactDesign, Rational, Value};

type Check = Result<String, String>;

fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: tcdesign::Error) -> String {
    e.to_string()
}

/// Approximate E-optimal designs reach `1/(4v)` exactly.
fn criterion_1() -> Check {
    let mut checked = 0;
    for v in 2..=5usize {
        for d in 2..=4usize {
            for rep in 0..5u64 {
                let s = DesignSampler::with_stream(1, (v * 100 + d * 10) as u64 + rep).block_weights(d);
                let design = e_opt_approx(v, &s, None).map_err(err)?;
                let n = contrast_info(&design).map_err(err)?;
                let target = rat(1, 4 * v as i64);
                ensure(apply_to_ones(&n) == vec![target.clone(); v], || format!("N·1 ≠ 1/(4v)·1 at v={v} d={d}"))?;
                ensure(compare_lambda_min(&n, &target) == Ordering::Equal, || format!("λ_min ≠ 1/(4v) at v={v} d={d}"))?;
                let float = spectrum(&n).lambda_min;
                ensure((float - 1.0 / (4.0 * v as f64)).abs() <= 1e-9, || format!("float λ_min {float} at v={v} d={d}"))?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} designs at λ_min = 1/(4v) exactly"))
}

/// Largest deviation from the E-optimality conditions: control at half of
/// each block, tests replicated `1/(2v)`.
fn condition_gap(design: &ApproximateDesign<Rational>) -> f64 {
    let v = design.v();
    let s = design.block_totals();
    let r = design.replications();
    let mut gap: f64 = 0.0;
    for k in 0..design.d() {
        let dev = design.get(0, k).clone() - s[k].clone() / rat(2, 1);
        gap = gap.max(tcdesign::scalar::rational_to_f64(&dev).abs());
    }
    for ri in r.iter().skip(1) {
        let dev = ri.clone() - rat(1, 2 * v as i64);
        gap = gap.max(tcdesign::scalar::rational_to_f64(&dev).abs());
    }
    gap
}

/// Random feasible designs never beat `1/(4v)`, and fall strictly short
/// when the conditions are violated by more than `1e-3`.
fn criterion_2() -> Check {
    let mut strict = 0;
    let per_v = 10_000;
    for v in 2..=5usize {
        let target = rat(1, 4 * v as i64);
        let bound = 1.0 / (4.0 * v as f64) + 1e-9;
        let mut sampler = DesignSampler::with_stream(2, v as u64);
        for i in 0..per_v {
            let d = 2 + i % 3;
            let design = sampler.sample(v, d).map_err(err)?;
            let n = contrast_info(&design).map_err(err)?;
            let lambda = spectrum(&n).lambda_min;
            ensure(lambda <= bound, || format!("λ_min {lambda} above 1/(4v) at v={v}: {design:?}"))?;
            if condition_gap(&design) > 1e-3 {
                ensure(compare_lambda_min(&n, &target) == Ordering::Less, || format!("no strict deficit at v={v}: {design:?}"))?;
                strict += 1;
            }
        }
    }
    Ok(format!("{} designs under the bound, {strict} with a strict deficit", 4 * per_v))
}

fn unequal_e_design() -> ExactDesign {
    ExactDesign::from_rows(vec![vec![1, 1, 2], vec![1, 0, 1], vec![0, 1, 1]]).expect("valid design")
}

/// Exact E-optimum over `D(2, 3, (2, 2, 4))`.
fn criterion_3() -> Check {
    let m = [2u64, 2, 4];
    let space = enumerate_designs(2, &m, DEFAULT_BUDGET).map_err(err)?;
    ensure(space.space().total == 540, || format!("space has {} designs", space.space().total))?;
    let e = brute_force_optimum(2, &m, Criterion::E, DEFAULT_BUDGET).map_err(err)?;
    ensure(e.exact && e.optimum == Value::Exact(rat(1, 1)), || format!("E-optimum {}", e.optimum))?;
    let built = e_opt_exact(2, &m).map_err(err)?;
    ensure(e.contains(&built), || "constructor output is not E-optimal".into())?;
    ensure(e.contains(&unequal_e_design()), || "reference design is not E-optimal".into())?;
    let vc = brute_force_optimum(2, &m, Criterion::VarCovSum, DEFAULT_BUDGET).map_err(err)?;
    ensure(vc.optimum == Value::Exact(rat(2, 1)), || format!("VarCovSum minimum {}", vc.optimum))?;
    ensure(e.optimizers.iter().all(|d| vc.contains(d)), || "an E-optimal design misses the VarCovSum minimum".into())?;
    Ok(format!("λ_min = 1 by {} designs, all with 1ᵀN⁻¹1 = 2", e.optimizers.len()))
}

/// Equal blocks of size two, `D(2, 2, (2, 2))`.
fn criterion_4() -> Check {
    let m = [2u64, 2];
    let e = brute_force_optimum(2, &m, Criterion::E, DEFAULT_BUDGET).map_err(err)?;
    ensure(e.space.total == 36, || format!("space has {} designs", e.space.total))?;
    ensure(e.optimum == Value::Exact(rat(1, 2)), || format!("E-optimum {}", e.optimum))?;
    let design = ExactDesign::from_rows(vec![vec![1, 1], vec![1, 0], vec![0, 1]]).map_err(err)?;
    ensure(e.contains(&design), || "design is not E-optimal".into())?;
    let vc = brute_force_optimum(2, &m, Criterion::VarCovSum, DEFAULT_BUDGET).map_err(err)?;
    ensure(vc.optimum == Value::Exact(rat(4, 1)), || format!("VarCovSum minimum {}", vc.optimum))?;
    ensure(vc.contains(&design), || "design misses the VarCovSum minimum".into())?;
    let cert = certify(Claim::Prop1EOpt, 2, &m, &CertifyOptions::default()).map_err(err)?;
    ensure(cert.holds && !cert.vacuous, || "certificate does not hold".into())?;
    Ok("λ_min = 1/2 and 1ᵀN⁻¹1 = 4 attained".into())
}

/// A- and R-optima over `D(3, 3, 3·1)`.
fn criterion_5() -> Check {
    let m = [3u64, 3, 3];
    let a = brute_force_optimum(3, &m, Criterion::A, DEFAULT_BUDGET).map_err(err)?;
    let r = brute_force_optimum(3, &m, Criterion::R, DEFAULT_BUDGET).map_err(err)?;
    ensure(a.space.total == 8000, || format!("space has {} designs", a.space.total))?;
    ensure(a.optimum == Value::Exact(rat(27, 10)), || format!("A-optimum {}", a.optimum))?;
    ensure(r.optimum == Value::Exact(rat(729, 1000)), || format!("R-optimum {}", r.optimum))?;
    let bibd = ExactDesign::from_rows(vec![vec![1, 1, 1], vec![1, 0, 1], vec![1, 1, 0], vec![0, 1, 1]]).map_err(err)?;
    ensure(a.contains(&bibd) && r.contains(&bibd), || "BIBD with control is not optimal".into())?;
    let rep = optimal_control_replication(3, 3, 3, GhVariant::Corrected).map_err(err)?;
    ensure(rep.r == 3, || format!("R = {}", rep.r))?;
    ensure(verify_btib(&bibd, GhVariant::Corrected).map_err(err)?.satisfied, || "BTIB conditions fail".into())?;
    let g = g_func(3, 3, 3, 3, GhVariant::Corrected).map_err(err)?;
    ensure(g.clone().map(Value::Exact) == Some(a.optimum.clone()), || format!("g(3; 3, 3, 3) = {g:?}"))?;
    ensure(a.optimizers.iter().all(|d| r.contains(d)), || "an A-optimal design is not R-optimal".into())?;
    Ok("A = 27/10 = g(3), R = 729/1000, same designs".into())
}

/// `c̃ᵀM⁻c̃` minimized by approximate E-optimal designs.
fn criterion_6() -> Check {
    let opts = CertifyOptions { samples: 1000, ..CertifyOptions::default() };
    let cert = certify(Claim::EOptCOpt, 2, &[2, 2, 4], &opts).map_err(err)?;
    ensure(cert.optimum == Value::Exact(rat(4, 1)), || format!("minimum {}", cert.optimum))?;
    ensure(cert.holds, || "an E-optimal design misses the minimum".into())?;
    let outside = cert.value("minimizers_outside_family").cloned();
    ensure(outside == Some(Value::Exact(rat(0, 1))), || format!("minimizers outside the family: {outside:?}"))?;
    Ok(format!("minimum 4 attained by {} designs, all E-optimal", cert.optimizers.len()))
}

/// Structural invariants on every enumerated design.
fn criterion_7() -> Check {
    let mut designs = 0;
    for (v, m) in [(2usize, vec![2u64, 2, 4]), (2, vec![2, 2]), (3, vec![3, 3, 3])] {
        let sweep = sweep_invariants(v, &m, DEFAULT_BUDGET).map_err(err)?;
        ensure(sweep.passed(), || format!("v={v} m={m:?}: {:?}", sweep.violations))?;
        designs += sweep.designs;
    }
    Ok(format!("{designs} designs checked"))
}

/// `h(r; d)` against the minimum over all compositions.
fn criterion_8() -> Check {
    for d in 1..=6usize {
        for r in 0..=20u64 {
            let brute = compositions(r, d).iter().map(|c| c.iter().map(|a| a * a).sum::<u64>()).min().expect("non-empty");
            let h = h_func(r, d as u64).map_err(err)?;
            ensure(h == brute, || format!("h({r}; {d}) = {h}, brute force {brute}"))?;
        }
    }
    Ok("126 cases match".into())
}

fn main() -> ExitCode {
    let criteria: [(u32, &str, Duration, fn() -> Check); 8] = [
        (1, "E-optimal approximate designs attain 1/(4v)", Duration::from_secs(1), criterion_1),
        (2, "sampled converse of the E-optimality bound", Duration::from_secs(30), criterion_2),
        (3, "exact E-optimum with unequal blocks", Duration::from_secs(1), criterion_3),
        (4, "equal-block E-optimum and variance sum", Duration::from_secs(1), criterion_4),
        (5, "A-optimal BTIB designs are R-optimal", Duration::from_secs(30), criterion_5),
        (6, "c-optimality of E-optimal approximate designs", Duration::from_secs(30), criterion_6),
        (7, "structural invariant sweep", Duration::from_secs(30), criterion_7),
        (8, "h matches brute-force minimum", Duration::from_secs(1), criterion_8),
    ];
    let mut failed = 0;
    for (id, name, limit, check) in criteria {
        let start = Instant::now();
        let result = check();
        let took = start.elapsed();
        let verdict = match &result {
            Ok(_) if took <= limit => "PASS",
            _ => "FAIL",
        };
        let detail = match result {
            Ok(msg) if took <= limit => msg,
            Ok(msg) => format!("{msg}; too slow ({:.2?} > {limit:?})", took),
            Err(msg) => msg,
        };
        if verdict == "FAIL" {
            failed += 1;
        }
        println!("criterion {id}: {verdict} [{took:.2?}] {name}: {detail}");
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
