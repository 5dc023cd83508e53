use modinv::ff::{matrix, Field, Matrix, PrimeField};
use modinv::nori::{
    analyze_group, bfs_enumerate, identify_type, lie_closure, order_ell_elements, trunc_exp, trunc_log,
    MatrixGroup, NoriError, ScanMode, Thresholds,
};
use proptest::prelude::*;

fn sl2(ell: u64) -> MatrixGroup {
    MatrixGroup {
        n: 2,
        ell,
        generators: vec![
            Matrix::from_rows(vec![vec![1, 1], vec![0, 1]]),
            Matrix::from_rows(vec![vec![1, 0], vec![1, 1]]),
        ],
        label: "sl2".into(),
    }
}

#[test]
fn sl2_order_seven_elements_by_enumeration() {
    let g = sl2(7);
    let f = PrimeField::new(7);
    let all = bfs_enumerate(&f, 2, &g.generators, 1_000_000).unwrap();
    assert_eq!(all.order(), 336);
    let oracle = all
        .elements
        .iter()
        .filter(|x| !matrix::is_identity(&f, x) && matrix::is_identity(&f, &matrix::pow(&f, x, 7)))
        .count();
    let u = order_ell_elements(&g, ScanMode::Exhaustive, &Thresholds::default()).unwrap();
    assert!(u.complete);
    assert_eq!(u.elements.len(), oracle);
    assert_eq!(oracle, 48);
}

#[test]
fn trivial_and_prime_to_ell_groups_have_no_unipotents() {
    let t = Thresholds::default();
    let trivial = MatrixGroup { generators: vec![], ..sl2(7) };
    let u = order_ell_elements(&trivial, ScanMode::Exhaustive, &t).unwrap();
    assert!(u.elements.is_empty() && u.complete);
    let diag = MatrixGroup {
        generators: vec![Matrix::from_rows(vec![vec![3, 0], vec![0, 5]])],
        ..sl2(7)
    };
    assert!(order_ell_elements(&diag, ScanMode::Exhaustive, &t).unwrap().elements.is_empty());
    let tight = Thresholds { bfs_cap: 10, ..Thresholds::default() };
    assert_eq!(
        order_ell_elements(&sl2(7), ScanMode::Exhaustive, &tight).unwrap_err(),
        NoriError::BfsCapExceeded(10)
    );
}

#[test]
fn log_of_jordan_block_by_series() {
    let f = PrimeField::new(11);
    let x = Matrix::from_rows(vec![vec![1, 1, 0], vec![0, 1, 1], vec![0, 0, 1]]);
    let l = trunc_log(&f, &x).unwrap();
    // n = x − I; log x = n − n²/2 with n² = E_13
    let half = f.inv(&2).unwrap();
    assert_eq!(*l.get(0, 2), f.neg(&half));
    assert_eq!(*l.get(0, 2), 5);
    assert_eq!(*l.get(0, 1), 1);
    assert_eq!(trunc_exp(&f, &l, 1).unwrap(), x);
    assert!(matrix::is_zero(&f, &trunc_log(&f, &matrix::identity(&f, 3)).unwrap()));
    assert!(trunc_log(&f, &Matrix::from_rows(vec![vec![2, 0], vec![0, 6]])).is_err());
    assert!(trunc_exp(&f, &Matrix::from_rows(vec![vec![1, 0], vec![0, 0]]), 1).is_err());
}

fn strict_upper(n: usize, p: u64) -> impl Strategy<Value = Matrix<u64>> {
    proptest::collection::vec(0..p, n * n).prop_map(move |mut v| {
        for i in 0..n {
            for j in 0..=i {
                v[i * n + j] = 0;
            }
        }
        Matrix::from_vec(n, n, v)
    })
}

fn invertible(n: usize, p: u64) -> impl Strategy<Value = (Matrix<u64>, Matrix<u64>)> {
    proptest::collection::vec(0..p, n * n).prop_filter_map("singular", move |v| {
        let f = PrimeField::new(p);
        let m = Matrix::from_vec(n, n, v);
        matrix::inverse(&f, &m).map(|i| (m, i))
    })
}

proptest! {
    #[test]
    fn exp_log_round_trip(u in strict_upper(4, 11), (p, pi) in invertible(4, 11), t1 in 0u64..11, t2 in 0u64..11) {
        let f = PrimeField::new(11);
        let n = matrix::mul(&f, &matrix::mul(&f, &p, &u), &pi);
        let x = trunc_exp(&f, &n, 1).unwrap();
        prop_assert!(matrix::is_identity(&f, &matrix::pow(&f, &x, 11)));
        prop_assert_eq!(trunc_log(&f, &x).unwrap(), n.clone());
        // one-parameter law
        let a = trunc_exp(&f, &n, t1).unwrap();
        let b = trunc_exp(&f, &n, t2).unwrap();
        prop_assert_eq!(matrix::mul(&f, &a, &b), trunc_exp(&f, &n, (t1 + t2) % 11).unwrap());
    }

    #[test]
    fn lie_closure_is_closed_and_contains_inputs(
        gens in proptest::collection::vec(strict_upper(3, 7), 1..3),
        (p, pi) in invertible(3, 7),
        (q, qi) in invertible(3, 7),
    ) {
        let f = PrimeField::new(7);
        // conjugate by two different matrices so the span is not triangular
        let mut seeds: Vec<Matrix<u64>> = gens.iter().map(|g| matrix::mul(&f, &matrix::mul(&f, &p, g), &pi)).collect();
        seeds.push(matrix::mul(&f, &matrix::mul(&f, &q, &gens[0]), &qi));
        let s = lie_closure(&f, 3, &seeds);
        for g in &seeds {
            prop_assert!(s.contains(g));
        }
        for a in &s.basis {
            for b in &s.basis {
                prop_assert!(s.contains(&matrix::bracket(&f, a, b)));
            }
        }
    }
}

#[test]
fn identify_type_is_seed_independent() {
    let f = PrimeField::new(13);
    let unit = |i: usize, j: usize| {
        let mut m = vec![0u64; 9];
        m[i * 3 + j] = 1;
        Matrix::from_vec(3, 3, m)
    };
    let s = lie_closure(&f, 3, &[unit(0, 1), unit(1, 2), unit(1, 0), unit(2, 1)]);
    assert_eq!(s.dim(), 8);
    let t = Thresholds::default();
    let first = identify_type(&s, 0, &t).unwrap();
    for seed in 1..8 {
        let other = identify_type(&s, seed, &t).unwrap();
        assert_eq!(other.cartan_matrix, first.cartan_matrix);
        assert_eq!(other.factors, first.factors);
    }
    assert_eq!(first.rank, 2);
    assert_eq!(first.dim - first.rank, 6);
}

#[test]
fn weights_of_semisimple_envelopes_sum_to_zero() {
    let t = Thresholds::default();
    for ell in [11u64, 13, 17] {
        let env = analyze_group(&sl2(ell), ScanMode::Auto, 0, &t).unwrap();
        for row in &env.weights.weights {
            assert_eq!(row.iter().sum::<i64>(), 0);
            assert!(row.iter().all(|w| w.abs() <= t.weight_bound(2)));
        }
    }
}

#[test]
fn envelope_is_deterministic_for_a_seed() {
    let t = Thresholds::default();
    let a = analyze_group(&sl2(13), ScanMode::Scan, 5, &t).unwrap().report();
    let b = analyze_group(&sl2(13), ScanMode::Scan, 5, &t).unwrap().report();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
}
