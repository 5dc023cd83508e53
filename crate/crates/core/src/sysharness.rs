//! Families of matrix groups indexed by primes: compatibility of
//! characteristic polynomials and `ℓ`-independence of envelope invariants.

use std::collections::BTreeMap;

use num_rational::Rational64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ff::{self, matrix, primitive_element, ExtField, Field, Matrix, NumField, PrimeField};
use crate::formchar::FormalCharacter;
use crate::inertia::multiplication_matrix;
use crate::lierank::SimpleType;
use crate::nori::{analyze_group, eval_word, EnvelopeReport, MatrixGroup, NoriError, ScanMode, Thresholds};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SysError {
    #[error("sysharness: at ℓ = {ell}: {source}")]
    Nori { ell: u64, source: NoriError },
    #[error("sysharness: determinant of generator {index} vanishes mod {ell}")]
    BadPrime { ell: u64, index: usize },
    #[error("sysharness: prime {0} is declared bad for this bundle")]
    DeclaredBad(u64),
    #[error("sysharness: word references unknown generator {0}")]
    UnknownGenerator(i64),
    #[error("sysharness: no group given for ℓ = {0}")]
    MissingGroup(u64),
    #[error("sysharness: unknown fixture {0:?}")]
    UnknownFixture(String),
    #[error("sysharness: independence needs at least two primes, got {0}")]
    TooFewPrimes(usize),
    #[error("sysharness: invalid bundle: {0}")]
    Invalid(String),
}

fn at(ell: u64) -> impl Fn(NoriError) -> SysError {
    move |source| SysError::Nori { ell, source }
}

/// A word in the generators with its expected characteristic polynomial
/// (integer coefficients, leading coefficient first).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrobeniusWord {
    pub word: Vec<i64>,
    pub poly: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeGroup {
    pub ell: u64,
    pub generators: Vec<Vec<Vec<i64>>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemBundle {
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub integral_generators: Option<Vec<Vec<Vec<i64>>>>,
    pub primes: Vec<u64>,
    /// Explicit groups; they take precedence over reductions of
    /// `integral_generators` at the same prime.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub per_prime_groups: Vec<PrimeGroup>,
    #[serde(default)]
    pub frobenius_words: Vec<FrobeniusWord>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub bad_primes: Vec<u64>,
    /// Words generating a finite-index subgroup to analyze instead.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subgroup_words: Option<Vec<Vec<i64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ell_min: Option<u64>,
    #[serde(default)]
    pub label: String,
}

impl SystemBundle {
    pub fn validate(&self) -> Result<(), SysError> {
        if let Some(g) = &self.integral_generators {
            check_shape(g, self.n)?;
        }
        for pg in &self.per_prime_groups {
            check_shape(&pg.generators, self.n)?;
        }
        for &p in &self.primes {
            if !ff::is_prime(p) {
                return Err(SysError::Invalid(format!("{p} is not prime")));
            }
            if self.bad_primes.contains(&p) {
                return Err(SysError::DeclaredBad(p));
            }
        }
        for w in &self.frobenius_words {
            if w.poly.len() != self.n + 1 {
                return Err(SysError::Invalid(format!(
                    "polynomial of degree {} for N = {}",
                    w.poly.len().saturating_sub(1),
                    self.n
                )));
            }
        }
        Ok(())
    }

    /// Thresholds with the bundle's own `ell_min` applied unless `base`
    /// already overrides it.
    pub fn thresholds(&self, base: &Thresholds) -> Thresholds {
        let mut t = base.clone();
        if t.ell_min_override.is_none() {
            t.ell_min_override = self.ell_min;
        }
        t
    }

    /// The full group at `ell` (before any subgroup restriction).
    pub fn group_at(&self, ell: u64) -> Result<MatrixGroup, SysError> {
        if self.bad_primes.contains(&ell) {
            return Err(SysError::DeclaredBad(ell));
        }
        let label = format!("{}@{ell}", self.label);
        if let Some(pg) = self.per_prime_groups.iter().find(|pg| pg.ell == ell) {
            return MatrixGroup::from_integer_rows(self.n, ell, &pg.generators, &label).map_err(at(ell));
        }
        match &self.integral_generators {
            Some(g) => reduce_integral_group(g, self.n, ell, &label),
            None => Err(SysError::MissingGroup(ell)),
        }
    }

    /// The group analyzed at `ell`: the subgroup generated by
    /// `subgroup_words` when present.
    pub fn analysis_group(&self, ell: u64) -> Result<MatrixGroup, SysError> {
        let g = self.group_at(ell)?;
        let Some(words) = &self.subgroup_words else {
            return Ok(g);
        };
        let f = g.field();
        let gens = words
            .iter()
            .map(|w| word_image(&f, &g, w))
            .collect::<Result<Vec<_>, _>>()?;
        MatrixGroup::new(g.n, ell, gens, &g.label).map_err(at(ell))
    }
}

fn check_shape(gens: &[Vec<Vec<i64>>], n: usize) -> Result<(), SysError> {
    for (i, g) in gens.iter().enumerate() {
        if g.len() != n || g.iter().any(|r| r.len() != n) {
            return Err(SysError::Invalid(format!("generator {i} is not {n}x{n}")));
        }
    }
    Ok(())
}

fn word_image(f: &PrimeField, g: &MatrixGroup, word: &[i64]) -> Result<Matrix<u64>, SysError> {
    for &w in word {
        let i = if w >= 0 { w } else { -w - 1 };
        if i as usize >= g.generators.len() {
            return Err(SysError::UnknownGenerator(w));
        }
    }
    if g.generators.is_empty() {
        return Ok(matrix::identity(f, g.n));
    }
    eval_word(f, &g.generators, word).map_err(at(g.ell))
}

/// Entrywise reduction of integer generators mod `ℓ`.
pub fn reduce_integral_group(
    gens: &[Vec<Vec<i64>>],
    n: usize,
    ell: u64,
    label: &str,
) -> Result<MatrixGroup, SysError> {
    check_shape(gens, n)?;
    if !ff::is_prime(ell) {
        return Err(SysError::Invalid(format!("{ell} is not prime")));
    }
    let f = PrimeField::new(ell);
    for (index, g) in gens.iter().enumerate() {
        let m = Matrix::from_rows(g.iter().map(|r| r.iter().map(|x| f.reduce_i64(*x)).collect()).collect());
        if f.is_zero(&matrix::determinant(&f, &m)) {
            return Err(SysError::BadPrime { ell, index });
        }
    }
    MatrixGroup::from_integer_rows(n, ell, gens, label).map_err(at(ell))
}

/// Replaces each generator by its inverse transpose.
pub fn apply_iota(g: &MatrixGroup) -> MatrixGroup {
    let f = g.field();
    let generators = g
        .generators
        .iter()
        .map(|m| matrix::inverse(&f, m).expect("generators are invertible").transpose())
        .collect();
    MatrixGroup {
        n: g.n,
        ell: g.ell,
        generators,
        label: g.label.clone(),
    }
}

/// `(c_{N-1}, …, c_0)` of the monic characteristic polynomial.
pub fn char_map(f: &PrimeField, m: &Matrix<u64>) -> Vec<u64> {
    let mut cp = matrix::char_poly(f, m);
    cp.pop();
    cp.reverse();
    cp
}

/// Characteristic polynomial of an integer matrix, leading coefficient first.
pub fn integer_char_poly(m: &[Vec<i64>]) -> Vec<i64> {
    let q = NumField::<Rational64>::new();
    let a = Matrix::from_rows(m.iter().map(|r| r.iter().map(|x| Rational64::from_integer(*x)).collect()).collect());
    let mut cp = matrix::char_poly(&q, &a);
    cp.reverse();
    cp.iter().map(|c| c.to_integer()).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompatMismatch {
    pub word: Vec<i64>,
    pub ell: u64,
    /// Reduced characteristic polynomial, leading coefficient first.
    pub got: Vec<u64>,
    pub expected: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompatReport {
    pub label: String,
    pub pass: bool,
    /// No words were declared, so nothing was checked.
    pub vacuous: bool,
    pub checked: usize,
    pub mismatches: Vec<CompatMismatch>,
}

/// Checks every declared word at every prime against its expected
/// polynomial reduced mod `ℓ`.
pub fn verify_compatibility(b: &SystemBundle) -> Result<CompatReport, SysError> {
    b.validate()?;
    let mut checked = 0;
    let mut mismatches = Vec::new();
    for &ell in &b.primes {
        let g = b.group_at(ell)?;
        let f = g.field();
        for w in &b.frobenius_words {
            let m = word_image(&f, &g, &w.word)?;
            let mut got = vec![1u64];
            got.extend(char_map(&f, &m));
            let expected: Vec<u64> = w.poly.iter().map(|c| f.reduce_i64(*c)).collect();
            checked += 1;
            if got != expected {
                mismatches.push(CompatMismatch {
                    word: w.word.clone(),
                    ell,
                    got,
                    expected,
                });
            }
        }
    }
    Ok(CompatReport {
        label: b.label.clone(),
        pass: mismatches.is_empty(),
        vacuous: b.frobenius_words.is_empty(),
        checked,
        mismatches,
    })
}

/// Seed used for the analysis at `ell`, derived from the run seed.
pub fn prime_seed(seed: u64, ell: u64) -> u64 {
    // splitmix64 finalizer over the pair
    let mut z = seed ^ ell.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn analyze_prime(
    b: &SystemBundle,
    ell: u64,
    seed: u64,
    mode: ScanMode,
    thresholds: &Thresholds,
) -> Result<EnvelopeReport, SysError> {
    if !b.primes.contains(&ell) {
        return Err(SysError::Invalid(format!("{ell} is not among the bundle primes")));
    }
    let g = b.analysis_group(ell)?;
    let t = b.thresholds(thresholds);
    let env = analyze_group(&g, mode, prime_seed(seed, ell), &t).map_err(at(ell))?;
    Ok(env.report())
}

/// `A_n` counts that are compared across primes.
pub fn is_counted_an(n: u32) -> bool {
    ![1, 2, 3, 4, 5, 7, 8].contains(&n)
}

fn an_counts(r: &EnvelopeReport) -> BTreeMap<u32, u64> {
    r.rank_report
        .per_type
        .keys()
        .filter_map(|ty| match ty {
            SimpleType::A(n) if is_counted_an(*n) => Some((*n, r.rank_report.an_count(*n))),
            _ => None,
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndependenceReport {
    pub label: String,
    pub n: usize,
    pub seed: u64,
    pub mode: ScanMode,
    pub primes: Vec<u64>,
    pub per_prime: Vec<EnvelopeReport>,
    pub fc_constant: bool,
    pub total_rank_constant: bool,
    pub an_counts_constant: bool,
    pub a4_parity_constant: bool,
    pub verdict: bool,
    /// Primes whose invariants differ from the most common ones.
    pub offending_primes: Vec<u64>,
}

fn constant<T: PartialEq>(xs: &[T]) -> bool {
    xs.windows(2).all(|w| w[0] == w[1])
}

/// Analyzes every prime (concurrently) and compares the invariants.
pub fn check_independence(
    b: &SystemBundle,
    seed: u64,
    mode: ScanMode,
    thresholds: &Thresholds,
) -> Result<IndependenceReport, SysError> {
    b.validate()?;
    let mut primes = b.primes.clone();
    primes.sort_unstable();
    primes.dedup();
    if primes.len() < 2 {
        return Err(SysError::TooFewPrimes(primes.len()));
    }
    let results: Vec<Result<EnvelopeReport, SysError>> = primes
        .par_iter()
        .map(|&ell| analyze_prime(b, ell, seed, mode, thresholds))
        .collect();
    let per_prime = results.into_iter().collect::<Result<Vec<_>, _>>()?;

    let fcs: Vec<&FormalCharacter> = per_prime.iter().map(|r| &r.formal_character).collect();
    let ranks: Vec<u64> = per_prime.iter().map(|r| r.rank_report.total_rank).collect();
    let ans: Vec<BTreeMap<u32, u64>> = per_prime.iter().map(an_counts).collect();
    let parities: Vec<u8> = per_prime.iter().map(|r| r.rank_report.an_parity).collect();
    let fc_constant = constant(&fcs);
    let total_rank_constant = constant(&ranks);
    let an_counts_constant = constant(&ans);
    let a4_parity_constant = constant(&parities);

    type Key<'a> = (&'a FormalCharacter, u64, &'a BTreeMap<u32, u64>, u8);
    let keys: Vec<Key> = (0..per_prime.len()).map(|i| (fcs[i], ranks[i], &ans[i], parities[i])).collect();
    // most common key, ties broken by the smallest prime
    let mut best = 0;
    let mut best_count = 0;
    for (i, k) in keys.iter().enumerate() {
        let c = keys.iter().filter(|x| *x == k).count();
        if c > best_count {
            best = i;
            best_count = c;
        }
    }
    let offending_primes = keys
        .iter()
        .zip(&primes)
        .filter(|(k, _)| **k != keys[best])
        .map(|(_, p)| *p)
        .collect();

    Ok(IndependenceReport {
        label: b.label.clone(),
        n: b.n,
        seed,
        mode,
        primes,
        per_prime,
        fc_constant,
        total_rank_constant,
        an_counts_constant,
        a4_parity_constant,
        verdict: fc_constant && total_rank_constant && an_counts_constant && a4_parity_constant,
        offending_primes,
    })
}

// ---------------------------------------------------------------------------
// fixtures

pub const FIXTURES: [&str; 6] = ["sl2-std", "sym2", "sym3", "sl2xsl2", "weil-res-sl2", "torus-adversarial"];

const UPPER: [[i64; 2]; 2] = [[1, 1], [0, 1]];
const LOWER: [[i64; 2]; 2] = [[1, 0], [1, 1]];

/// `Sym^k` of a 2×2 integer matrix on the basis `x^{k-i} y^i`.
pub fn sym_power(k: usize, a: [[i64; 2]; 2]) -> Vec<Vec<i64>> {
    let [[p, q], [r, s]] = a;
    // image of x^{k-i} y^i is (p x + r y)^{k-i} (q x + s y)^i; expand in t = y/x
    let mul = |u: &[i64], v: &[i64]| -> Vec<i64> {
        let mut out = vec![0i64; u.len() + v.len() - 1];
        for (i, x) in u.iter().enumerate() {
            for (j, y) in v.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        out
    };
    let mut m = vec![vec![0i64; k + 1]; k + 1];
    for i in 0..=k {
        let mut poly = vec![1i64];
        for _ in 0..k - i {
            poly = mul(&poly, &[p, r]);
        }
        for _ in 0..i {
            poly = mul(&poly, &[q, s]);
        }
        for (j, c) in poly.iter().enumerate() {
            m[j][i] = *c;
        }
    }
    m
}

fn block_diag(blocks: &[Vec<Vec<i64>>]) -> Vec<Vec<i64>> {
    let n: usize = blocks.iter().map(|b| b.len()).sum();
    let mut m = vec![vec![0i64; n]; n];
    let mut off = 0;
    for b in blocks {
        for (i, row) in b.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                m[off + i][off + j] = *x;
            }
        }
        off += b.len();
    }
    m
}

fn identity(n: usize) -> Vec<Vec<i64>> {
    (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect()
}

fn int_mul(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = a.len();
    (0..n)
        .map(|i| (0..n).map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum()).collect())
        .collect()
}

fn to_rows(a: [[i64; 2]; 2]) -> Vec<Vec<i64>> {
    a.iter().map(|r| r.to_vec()).collect()
}

/// Declared words with polynomials computed from the integer generators.
fn integral_words(gens: &[Vec<Vec<i64>>]) -> Vec<FrobeniusWord> {
    let words: Vec<Vec<i64>> = vec![vec![0], vec![1], vec![0, 1], vec![0, -2], vec![1, 1, 0]];
    words
        .into_iter()
        .filter(|w| w.iter().all(|&i| (if i >= 0 { i } else { -i - 1 }) < gens.len() as i64))
        .map(|word| {
            let mut m = identity(gens[0].len());
            for &i in &word {
                let g = if i >= 0 {
                    gens[i as usize].clone()
                } else {
                    integer_inverse(&gens[(-i - 1) as usize])
                };
                m = int_mul(&m, &g);
            }
            FrobeniusWord {
                poly: integer_char_poly(&m),
                word,
            }
        })
        .collect()
}

/// Inverse of a unimodular integer matrix.
fn integer_inverse(a: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let q = NumField::<Rational64>::new();
    let m = Matrix::from_rows(a.iter().map(|r| r.iter().map(|x| Rational64::from_integer(*x)).collect()).collect());
    let inv = matrix::inverse(&q, &m).expect("unimodular");
    inv.to_rows()
        .into_iter()
        .map(|r| r.into_iter().map(|x| x.to_integer()).collect())
        .collect()
}

/// Primes in `[ell_min(N), 31]`.
pub fn default_primes(n: usize) -> Vec<u64> {
    let lo = Thresholds::default().ell_min(n);
    (lo..=31).filter(|p| ff::is_prime(*p)).collect()
}

fn weil_res_generators(ell: u64) -> Result<Vec<Vec<Vec<i64>>>, SysError> {
    let e = ExtField::new(ff::ext_field(ell, 2).map_err(|e| at(ell)(NoriError::Field(e)))?);
    let one = e.one();
    let x = e.generator_x();
    let mut gens = Vec::new();
    for upper in [true, false] {
        for a in [&one, &x] {
            let m = multiplication_matrix(&e, a);
            let mut g = identity(4);
            for i in 0..2 {
                for j in 0..2 {
                    let v = *m.get(i, j) as i64;
                    if upper {
                        g[i][2 + j] = v;
                    } else {
                        g[2 + i][j] = v;
                    }
                }
            }
            gens.push(g);
        }
    }
    Ok(gens)
}

/// Builds a catalog bundle over the given primes (the default window when
/// empty).
pub fn fixture(name: &str, primes: &[u64]) -> Result<SystemBundle, SysError> {
    let n = match name {
        "sl2-std" => 2,
        "sym2" => 3,
        "sym3" | "sl2xsl2" | "weil-res-sl2" => 4,
        "torus-adversarial" => 2,
        _ => return Err(SysError::UnknownFixture(name.to_string())),
    };
    let primes = if primes.is_empty() { default_primes(n) } else { primes.to_vec() };
    let integral = match name {
        "sl2-std" => Some(vec![to_rows(UPPER), to_rows(LOWER)]),
        "sym2" => Some(vec![sym_power(2, UPPER), sym_power(2, LOWER)]),
        "sym3" => Some(vec![sym_power(3, UPPER), sym_power(3, LOWER)]),
        "sl2xsl2" => {
            let i2 = identity(2);
            Some(vec![
                block_diag(&[to_rows(UPPER), i2.clone()]),
                block_diag(&[to_rows(LOWER), i2.clone()]),
                block_diag(&[i2.clone(), to_rows(UPPER)]),
                block_diag(&[i2, to_rows(LOWER)]),
            ])
        }
        _ => None,
    };
    let mut per_prime_groups = Vec::new();
    let mut frobenius_words = Vec::new();
    match name {
        "weil-res-sl2" => {
            for &ell in &primes {
                per_prime_groups.push(PrimeGroup {
                    ell,
                    generators: weil_res_generators(ell)?,
                });
            }
            // every generator and the product of the two upper ones are unipotent
            for word in [vec![0], vec![2], vec![0, 1]] {
                frobenius_words.push(FrobeniusWord {
                    word,
                    poly: vec![1, -4, 6, -4, 1],
                });
            }
        }
        "torus-adversarial" => {
            // SL_2 reductions except at the second prime, where only a split
            // torus is present
            let odd = primes.get(1).copied();
            for &ell in &primes {
                let generators = if Some(ell) == odd {
                    let f = PrimeField::new(ell);
                    let g = primitive_element(&f);
                    let gi = f.inv(&g).expect("nonzero");
                    vec![vec![vec![g as i64, 0], vec![0, gi as i64]]]
                } else {
                    vec![to_rows(UPPER), to_rows(LOWER)]
                };
                per_prime_groups.push(PrimeGroup { ell, generators });
            }
        }
        _ => {}
    }
    if let Some(g) = &integral {
        frobenius_words = integral_words(g);
    }
    let b = SystemBundle {
        n,
        integral_generators: integral,
        primes,
        per_prime_groups,
        frobenius_words,
        bad_primes: Vec::new(),
        subgroup_words: None,
        ell_min: None,
        label: name.to_string(),
    };
    b.validate()?;
    Ok(b)
}
