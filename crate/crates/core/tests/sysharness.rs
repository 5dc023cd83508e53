use modinv::ff::{matrix, Matrix, PrimeField};
use modinv::lierank::{self, chevalley_order, total_rank, LieFactorDescriptor, SimpleType};
use modinv::nori::{analyze_group, ScanMode, Thresholds};
use modinv::sysharness::{
    analyze_prime, apply_iota, char_map, check_independence, fixture, integer_char_poly, reduce_integral_group,
    sym_power, verify_compatibility, FrobeniusWord, SysError, SystemBundle, FIXTURES,
};
use proptest::prelude::*;

#[test]
fn reduction_examples() {
    let sl2 = vec![vec![vec![1, 1], vec![0, 1]], vec![vec![1, 0], vec![1, 1]]];
    let g = reduce_integral_group(&sl2, 2, 7, "sl2").unwrap();
    assert_eq!(g.generators[0], Matrix::from_rows(vec![vec![1, 1], vec![0, 1]]));
    assert!(reduce_integral_group(&[vec![vec![2, 0], vec![0, 1]]], 2, 2, "bad").is_err());
    let sym3 = vec![sym_power(3, [[1, 1], [0, 1]]), sym_power(3, [[1, 0], [1, 1]])];
    let g = reduce_integral_group(&sym3, 4, 11, "sym3").unwrap();
    assert_eq!(g.n, 4);
    // binomial coefficients in the last column of the upper generator
    let u = sym_power(3, [[1, 1], [0, 1]]);
    assert_eq!(u.iter().map(|r| r[3]).collect::<Vec<_>>(), vec![1, 3, 3, 1]);
}

#[test]
fn char_map_examples() {
    let f = PrimeField::new(7);
    assert_eq!(char_map(&f, &matrix::identity(&f, 2)), vec![5, 1]);
    assert_eq!(char_map(&f, &Matrix::from_rows(vec![vec![2, 0], vec![0, 3]])), vec![2, 6]);
    assert_eq!(integer_char_poly(&[vec![0, -4], vec![1, 3]]), vec![1, -3, 4]);
}

#[test]
fn compatibility_checks() {
    let b = fixture("sl2-std", &[7, 11, 13]).unwrap();
    let r = verify_compatibility(&b).unwrap();
    assert!(r.pass && !r.vacuous && r.mismatches.is_empty());
    let mut tampered = b.clone();
    tampered.frobenius_words[0].poly = vec![1, -3, 1];
    let r = verify_compatibility(&tampered).unwrap();
    assert!(!r.pass);
    assert_eq!(r.mismatches.len(), 3);
    let empty = SystemBundle { frobenius_words: vec![], ..b.clone() };
    let r = verify_compatibility(&empty).unwrap();
    assert!(r.pass && r.vacuous);
    let unknown = SystemBundle {
        frobenius_words: vec![FrobeniusWord { word: vec![5], poly: vec![1, -2, 1] }],
        ..b
    };
    assert!(matches!(verify_compatibility(&unknown), Err(SysError::UnknownGenerator(5))));
}

#[test]
fn per_prime_examples() {
    let t = Thresholds::default();
    let b = fixture("sl2-std", &[7]).unwrap();
    let r = analyze_prime(&b, 7, 0, ScanMode::Auto, &t).unwrap();
    assert_eq!(r.formal_character.lattice_basis, vec![vec![1, 1]]);
    assert_eq!(r.rank_report.total_rank, 1);
    let b = fixture("sym2", &[11]).unwrap();
    let r = analyze_prime(&b, 11, 0, ScanMode::Auto, &t).unwrap();
    assert_eq!(r.weight_matrix, vec![vec![2, 0, -2]]);
    assert_eq!(r.rank_report.total_rank, 1);
    let b = fixture("sym3", &[11, 13, 17, 19]).unwrap();
    let r = check_independence(&b, 0, ScanMode::Auto, &t).unwrap();
    assert!(r.verdict);
    for p in &r.per_prime {
        assert_eq!(p.weight_matrix, vec![vec![3, 1, -1, -3]]);
    }
    assert!(fixture("nope", &[]).is_err());
}

#[test]
fn weights_sum_to_zero_on_fixtures() {
    let t = Thresholds::default();
    for name in ["sl2-std", "sym2", "sym3", "sl2xsl2", "weil-res-sl2"] {
        let b = fixture(name, &[13]).unwrap();
        let r = analyze_prime(&b, 13, 0, ScanMode::Auto, &b.thresholds(&t)).unwrap();
        for row in &r.weight_matrix {
            assert_eq!(row.iter().sum::<i64>(), 0, "{name}");
        }
    }
}

#[test]
fn reports_are_reproducible() {
    let t = Thresholds::default();
    for name in FIXTURES {
        let b = fixture(name, &[]).unwrap();
        let a = serde_json::to_string(&check_independence(&b, 9, ScanMode::Auto, &t).unwrap()).unwrap();
        let c = serde_json::to_string(&check_independence(&b, 9, ScanMode::Auto, &t).unwrap()).unwrap();
        assert_eq!(a, c, "{name}");
    }
}

#[test]
fn rank_tables() {
    let a1 = |f, ell| LieFactorDescriptor::new(SimpleType::A(1), 1, f, ell).unwrap();
    assert_eq!(total_rank(&[a1(1, 7)]).total_rank, 1);
    assert_eq!(total_rank(&[a1(2, 7)]).total_rank, 2);
    assert_eq!(total_rank(&[]).total_rank, 0);
    assert_eq!(lierank::g_type_rank(&[a1(1, 7)], SimpleType::B(2)), 0);
    assert_eq!(chevalley_order(SimpleType::A(1), 5).unwrap(), 120);
    assert_eq!(chevalley_order(SimpleType::A(1), 13).unwrap(), 2184);
    assert_eq!(chevalley_order(SimpleType::A(2), 2).unwrap(), 168);
    assert!(LieFactorDescriptor::new(SimpleType::B(2), 2, 1, 7).is_err());
}

fn descriptor() -> impl Strategy<Value = LieFactorDescriptor> {
    (0usize..4, 1u32..4, 1u32..3, prop::sample::select(vec![5u64, 7, 11])).prop_map(|(k, n, f, ell)| {
        let ty = match k {
            0 => SimpleType::A(n),
            1 => SimpleType::B(n + 1),
            2 => SimpleType::C(n + 2),
            _ => SimpleType::D(n + 3),
        };
        LieFactorDescriptor::new(ty, 1, f, ell).unwrap()
    })
}

fn unimodular(p: u64) -> impl Strategy<Value = Matrix<u64>> {
    proptest::collection::vec(0..p, 9).prop_filter_map("singular", move |v| {
        let m = Matrix::from_vec(3, 3, v);
        matrix::inverse(&PrimeField::new(p), &m).map(|_| m)
    })
}

proptest! {
    #[test]
    fn total_rank_is_additive(a in proptest::collection::vec(descriptor(), 0..4), b in proptest::collection::vec(descriptor(), 0..4)) {
        let joined: Vec<_> = a.iter().chain(&b).cloned().collect();
        prop_assert_eq!(total_rank(&joined).total_rank, total_rank(&a).total_rank + total_rank(&b).total_rank);
        for d in &joined {
            prop_assert_eq!(lierank::g_type_rank(&joined, d.ty), lierank::g_type_rank_adjoint(&joined, d.ty));
        }
    }

    #[test]
    fn iota_is_an_involution(gens in proptest::collection::vec(unimodular(11), 1..4)) {
        let g = modinv::nori::MatrixGroup { n: 3, ell: 11, generators: gens, label: String::new() };
        prop_assert_eq!(apply_iota(&apply_iota(&g)), g);
    }

    #[test]
    fn integral_bundles_are_compatible(words in proptest::collection::vec(proptest::collection::vec(-2i64..2, 1..5), 1..4)) {
        let mut b = fixture("sym2", &[7, 11, 13]).unwrap();
        let gens = b.integral_generators.clone().unwrap();
        // exact products over Z; a negative entry −(i+1) is the inverse of generator i
        b.frobenius_words = words
            .iter()
            .map(|w| {
                let mut acc = identity(3);
                for &i in w {
                    let g = if i >= 0 { gens[i as usize].clone() } else { integral_inverse(&gens[(-i - 1) as usize]) };
                    acc = mul(&acc, &g);
                }
                FrobeniusWord { word: w.clone(), poly: integer_char_poly(&acc) }
            })
            .collect();
        let r = verify_compatibility(&b).unwrap();
        prop_assert!(r.pass);
    }
}

#[test]
fn iota_preserves_formal_character() {
    let t = Thresholds::default();
    for name in ["sl2-std", "sym2", "sym3"] {
        let b = fixture(name, &[13]).unwrap();
        let g = b.analysis_group(13).unwrap();
        let a = analyze_group(&g, ScanMode::Auto, 0, &b.thresholds(&t)).unwrap();
        let d = analyze_group(&apply_iota(&g), ScanMode::Auto, 0, &b.thresholds(&t)).unwrap();
        assert_eq!(a.formal_character, d.formal_character);
    }
}

fn identity(n: usize) -> Vec<Vec<i64>> {
    (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect()
}

fn mul(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = a.len();
    (0..n)
        .map(|i| (0..n).map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum()).collect())
        .collect()
}

/// Inverse of a determinant-one 3×3 integer matrix by cofactors.
fn integral_inverse(m: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let c = |i: usize, j: usize| {
        let r: Vec<usize> = (0..3).filter(|x| *x != i).collect();
        let s: Vec<usize> = (0..3).filter(|x| *x != j).collect();
        let minor = m[r[0]][s[0]] * m[r[1]][s[1]] - m[r[0]][s[1]] * m[r[1]][s[0]];
        if (i + j) % 2 == 0 { minor } else { -minor }
    };
    (0..3).map(|i| (0..3).map(|j| c(j, i)).collect()).collect()
}
