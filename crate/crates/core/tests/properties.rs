//! Structural properties of designs, information matrices and criteria.

use std::cmp::Ordering;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use proptest::sample::subsequence;

use tcdesign::constructors::{a_opt_proportions, a_opt_approx, e_opt_approx, g_func, optimal_control_replication, verify_btib, verify_equal_block_e, GhVariant};
use tcdesign::criteria::{e_opt_bound, evaluate, evaluate_info, Criterion};
use tcdesign::design::{concurrence, product_design, BlockDesign, TestPermutation};
use tcdesign::info::{compare_lambda_min, contrast_info, full_info, inverse_info, is_entrywise_nonnegative, is_feasible};
use tcdesign::oracle::{composition_count, enumerate_designs, DesignSampler, DEFAULT_BUDGET};
use tcdesign::{ApproximateDesign, ExactDesign, Rational, Value};

fn rat(n: i64, d: i64) -> Rational {
    BigRational::new(n.into(), d.into())
}

/// Arbitrary exact design with up to 5 treatments and 4 blocks; empty
/// columns get one control trial.
fn exact_design(max_cell: u64) -> impl Strategy<Value = ExactDesign> {
    (1..=4usize, 1..=4usize)
        .prop_flat_map(move |(v, d)| prop::collection::vec(prop::collection::vec(0..=max_cell, d), v + 1))
        .prop_map(|mut rows| {
            for k in 0..rows[0].len() {
                if rows.iter().all(|r| r[k] == 0) {
                    rows[0][k] = 1;
                }
            }
            ExactDesign::from_rows(rows).unwrap()
        })
}

/// Equal-block design: each block of size `q` gets `q` treatment draws.
fn equal_block_design() -> impl Strategy<Value = ExactDesign> {
    (1..=4usize, 1..=4usize, 1..=4usize).prop_flat_map(|(v, d, q)| {
        prop::collection::vec(prop::collection::vec(0..=v, q), d).prop_map(move |cols| {
            let mut rows = vec![vec![0u64; cols.len()]; v + 1];
            for (k, col) in cols.iter().enumerate() {
                for &i in col {
                    rows[i][k] += 1;
                }
            }
            ExactDesign::from_rows(rows).unwrap()
        })
    })
}

fn with_permutation(design: impl Strategy<Value = ExactDesign>) -> impl Strategy<Value = (ExactDesign, TestPermutation)> {
    design.prop_flat_map(|x| {
        let labels: Vec<usize> = (1..=x.v()).collect();
        (Just(x), Just(labels).prop_shuffle().prop_map(|p| TestPermutation::new(p).unwrap()))
    })
}

/// Probability vector with entries in `(0, 1]`.
fn weights(len: usize) -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec(1..=50i64, len).prop_map(|w| {
        let total: i64 = w.iter().sum();
        w.into_iter().map(|x| rat(x, total)).collect()
    })
}

const PROPERTY_CRITERIA: [Criterion; 6] =
    [Criterion::A, Criterion::MV, Criterion::E, Criterion::R, Criterion::PhiR, Criterion::VarCovSum];

fn same_value(a: &Value, b: &Value) -> bool {
    match (a, b) {
        (Value::Exact(x), Value::Exact(y)) => x == y,
        _ => {
            let (x, y) = (a.to_f64(), b.to_f64());
            (x.is_infinite() && y.is_infinite()) || (x - y).abs() <= 1e-9 * x.abs().max(1.0)
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn margins_sum_to_total(x in exact_design(4)) {
        let n = rat(x.n() as i64, 1);
        let sum = |v: Vec<Rational>| v.into_iter().fold(Rational::zero(), |a, b| a + b);
        prop_assert_eq!(sum(x.replications()), n.clone());
        prop_assert_eq!(sum(x.block_totals()), n);
        let a = x.normalize();
        prop_assert_eq!(sum(a.replications()), Rational::one());
        prop_assert_eq!(sum(a.block_totals()), Rational::one());
    }

    #[test]
    fn concurrence_is_symmetric(x in exact_design(4)) {
        for i in 0..=x.v() {
            for j in 0..=x.v() {
                prop_assert_eq!(concurrence(&x, i, j).unwrap(), concurrence(&x, j, i).unwrap());
            }
        }
    }

    #[test]
    fn normalize_preserves_ratios(x in exact_design(6)) {
        let a = x.normalize();
        let n = rat(x.n() as i64, 1);
        for i in 0..=x.v() {
            for k in 0..x.d() {
                prop_assert_eq!(a.get(i, k).clone() * n.clone(), rat(x.get(i, k) as i64, 1));
            }
        }
    }

    #[test]
    fn info_matrix_structure(x in exact_design(4)) {
        let m = full_info(&x).unwrap();
        for i in 0..m.rows() {
            let row_sum = m.row(i).iter().cloned().fold(Rational::zero(), |a, b| a + b);
            prop_assert!(row_sum.is_zero());
        }
        let n = contrast_info(&x).unwrap();
        prop_assert_eq!(&m.without(0), n.matrix());
        for i in 0..x.v() {
            for j in 0..x.v() {
                if i != j {
                    prop_assert!(!n.matrix()[(i, j)].is_positive());
                }
            }
        }
    }

    #[test]
    fn scaling_by_n(x in exact_design(5)) {
        let n = rat(x.n() as i64, 1);
        let exact = contrast_info(&x).unwrap();
        let approx = contrast_info(&x.normalize()).unwrap();
        let scaled = approx.matrix().map(|e| e.clone() * n.clone());
        prop_assert_eq!(exact.matrix(), &scaled);
    }

    #[test]
    fn inverse_is_nonnegative_and_varcov_is_absolute_sum(x in exact_design(4)) {
        prop_assume!(is_feasible(&x).feasible);
        let inv = inverse_info(&contrast_info(&x).unwrap()).unwrap();
        prop_assert!(is_entrywise_nonnegative(&inv));
        let mut abs_sum = Rational::zero();
        for i in 0..x.v() {
            for j in 0..x.v() {
                abs_sum += inv[(i, j)].abs();
            }
        }
        prop_assert_eq!(evaluate(&x, Criterion::VarCovSum).unwrap().value, Value::Exact(abs_sum));
    }

    #[test]
    fn lambda_min_below_bound(x in exact_design(8)) {
        let a = x.normalize();
        let n = contrast_info(&a).unwrap();
        prop_assert_ne!(compare_lambda_min(&n, &e_opt_bound(x.v())), Ordering::Greater);
    }

    #[test]
    fn e_value_times_lambda_min_is_one(x in exact_design(4)) {
        prop_assume!(is_feasible(&x).feasible);
        let n = contrast_info(&x).unwrap();
        let e = evaluate(&x, Criterion::E).unwrap().value.to_f64();
        let lambda = tcdesign::info::spectrum(&n).lambda_min;
        prop_assert!((e * lambda - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn product_information_ignores_block_weights(
        (r, s1, s2) in (1..=4usize, 1..=4usize).prop_flat_map(|(v, d)| (weights(v + 1), weights(d), weights(d)))
    ) {
        let n1 = contrast_info(&product_design(&r, &s1).unwrap()).unwrap();
        let n2 = contrast_info(&product_design(&r, &s2).unwrap()).unwrap();
        prop_assert_eq!(n1, n2);
    }

    #[test]
    fn permutation_conjugates_information((x, p) in with_permutation(exact_design(4))) {
        let n = contrast_info(&x).unwrap();
        let np = contrast_info(&x.permute_tests(&p).unwrap()).unwrap();
        for i in 1..=x.v() {
            for j in 1..=x.v() {
                prop_assert_eq!(&np.matrix()[(p.image(i) - 1, p.image(j) - 1)], &n.matrix()[(i - 1, j - 1)]);
            }
        }
        let back = x.permute_tests(&p).unwrap().permute_tests(&p.inverse()).unwrap();
        prop_assert_eq!(back, x);
    }

    #[test]
    fn criteria_are_permutation_invariant((x, p) in with_permutation(exact_design(4))) {
        let y = x.permute_tests(&p).unwrap();
        for c in PROPERTY_CRITERIA {
            let (a, b) = (evaluate(&x, c).unwrap(), evaluate(&y, c).unwrap());
            prop_assert_eq!(a.feasible, b.feasible);
            prop_assert!(same_value(&a.value, &b.value), "{}: {} vs {}", c, a.value, b.value);
        }
    }

    #[test]
    fn symmetrization_improves_phi_r(x in equal_block_design()) {
        prop_assume!(is_feasible(&x).feasible);
        let n = contrast_info(&x).unwrap();
        let bar = n.symmetrized();
        let before = evaluate_info(&n, Criterion::PhiR).unwrap().value.to_f64();
        let after = evaluate_info(&bar, Criterion::PhiR).unwrap().value.to_f64();
        prop_assert!(after >= before * (1.0 - 1e-12), "{after} < {before}");
    }

    #[test]
    fn completely_symmetric_criteria_relations(x in equal_block_design()) {
        prop_assume!(is_feasible(&x).feasible);
        let bar = contrast_info(&x).unwrap().symmetrized();
        let v = x.v() as i32;
        let get = |c| evaluate_info(&bar, c).unwrap().value;
        let (a, mv, r) = (get(Criterion::A), get(Criterion::MV), get(Criterion::R));
        let (Value::Exact(a), Value::Exact(mv), Value::Exact(r)) = (a, mv, r) else { panic!("rational criteria expected") };
        prop_assert_eq!(a, mv.clone() * rat(v as i64, 1));
        prop_assert_eq!(r, num_traits::pow(mv, v as usize));
    }

    #[test]
    fn e_optimal_family_attains_bound_and_perturbations_lose(
        (s, block, pair) in (1..=5usize).prop_flat_map(|v| {
            (2..=4usize).prop_flat_map(move |d| (
                Just(v),
                prop::collection::vec(5..=20i64, d),
                0..d,
                subsequence((0..=v).collect::<Vec<_>>(), 2),
            ))
        }).prop_map(|(v, w, k, pair)| {
            let total: i64 = w.iter().sum();
            ((v, w.into_iter().map(|x| rat(x, total)).collect::<Vec<_>>()), k, pair)
        })
    ) {
        let (v, s) = s;
        let xi = e_opt_approx(v, &s, None).unwrap();
        let bound = e_opt_bound(v);
        let n = contrast_info(&xi).unwrap();
        prop_assert_eq!(compare_lambda_min(&n, &bound), Ordering::Equal);
        let ones = vec![Rational::one(); v];
        prop_assert_eq!(n.matrix().mul_vec(&ones), vec![bound.clone(); v]);

        // Move 1e-3 of block `block` from one treatment to another; block
        // totals are kept, but a row sum leaves its required value.
        let eps = rat(1, 1000);
        let mut rows = xi.to_rows();
        rows[pair[0]][block] -= eps.clone();
        rows[pair[1]][block] += eps;
        let moved = ApproximateDesign::new(rows).unwrap();
        let n = contrast_info(&moved).unwrap();
        prop_assert_eq!(compare_lambda_min(&n, &bound), Ordering::Less);
    }

    #[test]
    fn a_optimal_proportions(v in 1..=50usize) {
        let r = a_opt_proportions(v);
        prop_assert!((r.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        for ri in &r[1..] {
            prop_assert!((r[0] - (v as f64).sqrt() * ri).abs() <= 1e-12);
        }
    }

    #[test]
    fn enumeration_count(v in 1..=3usize, m in prop::collection::vec(1..=3u64, 1..=3)) {
        let e = enumerate_designs(v, &m, DEFAULT_BUDGET).unwrap();
        let expected: u128 = m.iter().map(|&mk| composition_count(mk, v + 1)).product();
        prop_assert_eq!(e.space().total, expected);
        let mut count = 0u128;
        for x in e.iter() {
            prop_assert_eq!(x.block_sizes(), &m[..]);
            count += 1;
        }
        prop_assert_eq!(count, expected);
    }
}

/// C(n, k) by the multiplicative formula.
fn binomial(n: u64, k: u64) -> u128 {
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

#[test]
fn composition_counts_are_binomial() {
    for m in 1..=6 {
        for v in 1..=5 {
            assert_eq!(composition_count(m, v + 1), binomial(m + v as u64, v as u64), "m={m} v={v}");
        }
    }
}

#[test]
fn a_optimal_is_r_optimal_on_random_designs() {
    for v in 2..=5usize {
        let d = 3;
        let s = [0.2, 0.3, 0.5];
        let star = evaluate(&a_opt_approx(v, &s).unwrap(), Criterion::PhiR).unwrap().value.to_f64();
        let mut sampler = DesignSampler::with_stream(11, v as u64);
        for i in 0..10_000 {
            let xi = sampler.sample(v, d).unwrap().to_f64();
            let phi = evaluate(&xi, Criterion::PhiR).unwrap().value.to_f64();
            assert!(star >= phi - 1e-12, "v={v} sample {i}: {phi} > {star}");
        }
    }
}

#[test]
fn equal_block_e_designs_have_lambda_min_mu01_over_q() {
    let mut checked = 0;
    for (v, m) in [(2usize, vec![2u64, 2]), (2, vec![4, 4]), (3, vec![2, 2, 2]), (3, vec![4, 4])] {
        let q = m[0];
        for x in enumerate_designs(v, &m, DEFAULT_BUDGET).unwrap().iter() {
            if !verify_equal_block_e(&x).unwrap().satisfied {
                continue;
            }
            let n = contrast_info(&x).unwrap();
            let mu01 = rat(x.integer_concurrence(0, 1) as i64, q as i64);
            assert_eq!(compare_lambda_min(&n, &mu01), Ordering::Equal, "{:?}", x.rows());
            checked += 1;
        }
    }
    assert!(checked > 0);
}

#[test]
fn btib_designs_are_completely_symmetric_with_trace_g() {
    let mut checked = 0;
    for (v, q, d) in [(3usize, 3u64, 3usize), (2, 3, 3), (2, 2, 4), (4, 2, 3)] {
        let m = vec![q; d];
        let rep = optimal_control_replication(d as u64, q, v as u64, GhVariant::Corrected).unwrap();
        for x in enumerate_designs(v, &m, DEFAULT_BUDGET).unwrap().iter() {
            if !verify_btib(&x, GhVariant::Corrected).unwrap().satisfied {
                continue;
            }
            let n = contrast_info(&x).unwrap();
            assert_eq!(n.symmetrized(), n, "{:?}", x.rows());
            let g = g_func(rep.r, d as u64, q, v as u64, GhVariant::Corrected).unwrap().unwrap();
            assert_eq!(inverse_info(&n).unwrap().trace(), g);
            checked += 1;
        }
    }
    assert!(checked > 0);
}

/// About 24 million designs; run with `cargo test --release -- --ignored`.
#[test]
#[ignore]
fn equal_block_e_optimality_four_tests_blocks_of_four() {
    use tcdesign::oracle::{certify, CertifyOptions, Claim};
    let opts = CertifyOptions { budget: 30_000_000, ..CertifyOptions::default() };
    let cert = certify(Claim::Prop1EOpt, 4, &[4, 4, 4, 4], &opts).unwrap();
    assert!(cert.holds, "{:?}", cert.notes);
    assert!(!cert.vacuous);
}

#[test]
fn equal_block_e_optimality_three_tests_blocks_of_four() {
    use tcdesign::oracle::{certify, CertifyOptions, Claim};
    let cert = certify(Claim::Prop1EOpt, 3, &[4, 4, 4], &CertifyOptions::default()).unwrap();
    assert!(cert.holds && !cert.vacuous, "{:?}", cert.notes);
    assert_eq!(cert.optimum, Value::Exact(rat(1, 1)));
    assert_eq!(cert.optimizers.len(), 21);
}
