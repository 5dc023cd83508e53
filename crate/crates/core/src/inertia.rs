//! Tame inertia characters.
//!
//! The level-`d` fundamental character is pinned by the least primitive
//! element `g` of `GF(ℓ^d)^*` (canonical index order): a representation
//! of the cyclic group is given by the image of `g`, and a character
//! `g ↦ g^e` is stored as the base-`ℓ` digits of `e mod ℓ^d − 1`.
//! Only Galois-invariant data (digit multisets up to cyclic shift) is
//! independent of this choice.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ff::{
    self, ext_field, matrix, poly, primitive_element, DlogTable, ExtElem, ExtField, FfError, Field,
    FiniteField, Matrix, PrimeField, DEFAULT_FIELD_CAP,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InertiaError {
    #[error("inertia: level {source_level} does not divide {target}")]
    LevelMismatch { source_level: u32, target: u32 },
    #[error("inertia: generator image is not semisimple of order dividing ℓ^{0} - 1")]
    NotTame(u32),
    #[error("inertia: element is not semisimple")]
    NotSemisimple,
    #[error("inertia: subgroup index {index} does not divide {group_order}")]
    BadIndex { index: u128, group_order: u128 },
    #[error("inertia: matrix shape mismatch")]
    Shape,
    #[error("inertia: level must be positive")]
    ZeroLevel,
    #[error(transparent)]
    Field(#[from] FfError),
}

/// `χ = θ_d^{Σ digits_i ℓ^i}` with digits little-endian in `[0, ℓ-1]`,
/// never all `ℓ-1`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TameCharacter {
    pub ell: u64,
    pub level: u32,
    pub digits: Vec<u64>,
}

impl TameCharacter {
    pub fn from_exponent(e: i128, level: u32, ell: u64) -> Self {
        Self {
            ell,
            level,
            digits: restrict_digits(e, level, ell),
        }
    }

    pub fn trivial(level: u32, ell: u64) -> Self {
        Self::from_exponent(0, level, ell)
    }

    /// Exponent in `[0, ℓ^d − 2]`.
    pub fn exponent(&self) -> u128 {
        self.digits
            .iter()
            .rev()
            .fold(0u128, |acc, d| acc * self.ell as u128 + *d as u128)
    }

    /// `θ ↦ θ^ℓ`: cyclic shift of the digits.
    pub fn frobenius_twist(&self) -> Self {
        let mut digits = self.digits.clone();
        digits.rotate_right(1);
        Self { digits, ..self.clone() }
    }

    /// Value on `x ∈ GF(ℓ^d)^*` presented in the level-`d` field.
    pub fn eval(&self, field: &ExtField, x: &ExtElem) -> ExtElem {
        field.pow(x, self.exponent())
    }
}

fn group_order(ell: u64, d: u32) -> u128 {
    (ell as u128).pow(d) - 1
}

/// ℓ-restricted digits of `e mod ℓ^d − 1`.
pub fn restrict_digits(e: i128, d: u32, ell: u64) -> Vec<u64> {
    let m = group_order(ell, d) as i128;
    let mut r = e.rem_euclid(m) as u128;
    let mut out = Vec::with_capacity(d as usize);
    for _ in 0..d {
        out.push((r % ell as u128) as u64);
        r /= ell as u128;
    }
    out
}

/// Image of the fixed generator of `GF(ℓ^d)^*` in `GL_n(GF(ℓ))`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TameRep {
    pub ell: u64,
    pub level: u32,
    #[serde(with = "crate::ff::matrix::serde_rows")]
    pub generator_image: Matrix<u64>,
}

impl TameRep {
    pub fn field(&self) -> PrimeField {
        PrimeField::new(self.ell)
    }

    pub fn dim(&self) -> usize {
        self.generator_image.rows()
    }

    pub fn group_order(&self) -> u128 {
        group_order(self.ell, self.level)
    }

    /// `f(g^k)`.
    pub fn image_of_power(&self, k: u128) -> Matrix<u64> {
        matrix::pow(&self.field(), &self.generator_image, k)
    }

    fn check_tame(&self) -> Result<(), InertiaError> {
        if self.level == 0 {
            return Err(InertiaError::ZeroLevel);
        }
        if !self.generator_image.is_square() {
            return Err(InertiaError::Shape);
        }
        if !matrix::is_identity(&self.field(), &self.image_of_power(self.group_order())) {
            return Err(InertiaError::NotTame(self.level));
        }
        Ok(())
    }
}

/// The level-`d` field together with its fixed generator.
pub fn level_field(ell: u64, d: u32) -> Result<(ExtField, ExtElem), InertiaError> {
    if d == 0 {
        return Err(InertiaError::ZeroLevel);
    }
    let e = ExtField::new(ext_field(ell, d)?);
    let g = primitive_element(&e);
    Ok((e, g))
}

/// Matrix over `GF(ℓ)` of multiplication by `a` on `GF(ℓ^d)` in the power
/// basis.
pub fn multiplication_matrix(e: &ExtField, a: &ExtElem) -> Matrix<u64> {
    let k = e.k();
    let cols: Vec<Vec<u64>> = (0..k)
        .map(|j| {
            let mut basis = e.zero();
            basis[j] = 1;
            e.mul(a, &basis).to_vec()
        })
        .collect();
    Matrix::from_columns(k, &cols)
}

/// The representation `g ↦ g^e` of `GF(ℓ^d)^*` on `GF(ℓ^d)` viewed as a
/// `d`-dimensional `GF(ℓ)`-space.
pub fn multiplication_rep(ell: u64, d: u32, e: u128) -> Result<TameRep, InertiaError> {
    let (field, g) = level_field(ell, d)?;
    let a = field.pow(&g, e);
    Ok(TameRep {
        ell,
        level: d,
        generator_image: multiplication_matrix(&field, &a),
    })
}

/// Characters of the representation with multiplicity, sorted by digits.
pub fn decompose_tame(r: &TameRep) -> Result<Vec<TameCharacter>, InertiaError> {
    r.check_tame()?;
    let (field, g) = level_field(r.ell, r.level)?;
    let cp = ff::char_poly(&r.field(), &r.generator_image)?;
    let cp_ext: Vec<ExtElem> = cp.iter().map(|c| field.embed(*c)).collect();
    let roots = poly::roots_with_multiplicity(&field, &cp_ext);
    let total: usize = roots.iter().map(|(_, m)| m).sum();
    if total != r.dim() {
        return Err(InertiaError::NotTame(r.level));
    }
    let table = DlogTable::new(&field, &g, DEFAULT_FIELD_CAP)?;
    let mut out = Vec::with_capacity(r.dim());
    for (root, mult) in roots {
        let e = table.log(&root)?;
        let c = TameCharacter::from_exponent(e as i128, r.level, r.ell);
        out.extend(std::iter::repeat_n(c, mult));
    }
    out.sort();
    Ok(out)
}

/// Same character at level `target` through the norm map
/// `GF(ℓ^D)^* → GF(ℓ^d)^*`.
pub fn raise_level(c: &TameCharacter, target: u32) -> Result<TameCharacter, InertiaError> {
    if c.level == 0 || target == 0 || target % c.level != 0 {
        return Err(InertiaError::LevelMismatch {
            source_level: c.level,
            target,
        });
    }
    let factor = group_order(c.ell, target) / group_order(c.ell, c.level);
    let m = group_order(c.ell, target);
    let e = (c.exponent() % m) * (factor % m) % m;
    Ok(TameCharacter::from_exponent(e as i128, target, c.ell))
}

/// `Nm_{D/d}(x) = x · x^{ℓ^d} · x^{ℓ^{2d}} ⋯` computed by repeated
/// Frobenius, for `x` in the level-`D` field.
pub fn norm_down(field: &ExtField, x: &ExtElem, d: u32) -> ExtElem {
    let big = field.degree();
    let mut acc = field.one();
    let mut conj = x.clone();
    for _ in 0..big / d {
        acc = field.mul(&acc, &conj);
        for _ in 0..d {
            conj = field.frobenius(&conj);
        }
    }
    acc
}

/// Checks `χ_d(Nm x) = χ_D(x)` on `samples` random nonzero `x`. The level-`d`
/// field is realized inside the level-`D` field as the subfield whose
/// generator is `g_D^{(ℓ^D−1)/(ℓ^d−1)}`, matching the norm of the fixed
/// generator.
pub fn raise_level_pointwise<R: Rng + ?Sized>(
    c: &TameCharacter,
    target: u32,
    samples: usize,
    rng: &mut R,
) -> Result<bool, InertiaError> {
    let raised = raise_level(c, target)?;
    let (big, _) = level_field(c.ell, target)?;
    for _ in 0..samples {
        let x = loop {
            let x = big.random(rng);
            if !big.is_zero(&x) {
                break x;
            }
        };
        let lhs = big.pow(&norm_down(&big, &x, c.level), c.exponent());
        let rhs = big.pow(&x, raised.exponent());
        if lhs != rhs {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SerreAudit {
    pub pass: bool,
    pub bound: u64,
    pub per_character: Vec<bool>,
}

/// Every digit must lie in `[0, e·i]`.
pub fn check_serre_bound(chars: &[TameCharacter], e: u64, i: u64) -> SerreAudit {
    let bound = e * i;
    let per_character: Vec<bool> = chars
        .iter()
        .map(|c| c.digits.iter().all(|d| *d <= bound))
        .collect();
    SerreAudit {
        pass: per_character.iter().all(|x| *x),
        bound,
        per_character,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RigidityVerdict {
    Confirmed,
    HypothesisNotMet,
    Violated,
}

pub fn is_semisimple(f: &PrimeField, s: &Matrix<u64>) -> bool {
    let cp = matrix::char_poly(f, s);
    let rad = poly::radical(f, &cp);
    matrix::is_zero(f, &eval_matrix_poly(f, &rad, s))
}

/// `p(a)` by Horner.
pub fn eval_matrix_poly(f: &PrimeField, p: &[u64], a: &Matrix<u64>) -> Matrix<u64> {
    let n = a.rows();
    let mut acc = matrix::zeros(f, n, n);
    for c in p.iter().rev() {
        acc = matrix::mul(f, &acc, a);
        for i in 0..n {
            let v = f.add(acc.get(i, i), c);
            acc.set(i, i, v);
        }
    }
    acc
}

fn commutes(f: &PrimeField, a: &Matrix<u64>, b: &Matrix<u64>) -> bool {
    matrix::is_zero(f, &matrix::bracket(f, a, b))
}

/// Rigidity for a torus image: if every exponent digit of `rep` is at most
/// `c`, `H ⊂ GF(ℓ^d)^*` has index `m` with `c·m ≤ ℓ − 1`, and `s` commutes
/// with `rep(H)`, then `s` should commute with the whole image.
pub fn rigidity_check(
    rep: &TameRep,
    index: u128,
    s: &Matrix<u64>,
    c: u64,
) -> Result<RigidityVerdict, InertiaError> {
    let f = rep.field();
    if s.rows() != rep.dim() || !s.is_square() {
        return Err(InertiaError::Shape);
    }
    if !is_semisimple(&f, s) {
        return Err(InertiaError::NotSemisimple);
    }
    let order = rep.group_order();
    if index == 0 || order % index != 0 {
        return Err(InertiaError::BadIndex {
            index,
            group_order: order,
        });
    }
    let chars = decompose_tame(rep)?;
    if chars.iter().flat_map(|ch| &ch.digits).any(|d| *d > c) {
        return Ok(RigidityVerdict::HypothesisNotMet);
    }
    if (c as u128) * index > (rep.ell - 1) as u128 {
        return Ok(RigidityVerdict::HypothesisNotMet);
    }
    // H is cyclic, generated by g^index
    if !commutes(&f, s, &rep.image_of_power(index)) {
        return Ok(RigidityVerdict::HypothesisNotMet);
    }
    if commutes(&f, s, &rep.generator_image) {
        Ok(RigidityVerdict::Confirmed)
    } else {
        Ok(RigidityVerdict::Violated)
    }
}

/// Block-diagonal direct sum of square matrices.
pub fn block_diagonal(f: &PrimeField, blocks: &[Matrix<u64>]) -> Matrix<u64> {
    let n: usize = blocks.iter().map(|b| b.rows()).sum();
    let mut out = matrix::zeros(f, n, n);
    let mut off = 0;
    for b in blocks {
        for i in 0..b.rows() {
            for j in 0..b.cols() {
                out.set(off + i, off + j, *b.get(i, j));
            }
        }
        off += b.rows();
    }
    out
}

/// A randomized rigidity instance: the torus image, the subgroup index and
/// an element commuting with the subgroup image.
#[derive(Clone, Debug)]
pub struct RigidityInstance {
    pub rep: TameRep,
    pub index: u128,
    pub s: Matrix<u64>,
    pub c: u64,
    pub exponents: Vec<u128>,
}

/// Random instance with `blocks` multiplication blocks `g ↦ g^{e_j}` whose
/// digits lie in `[0, c]`, and a random semisimple `s` in the centralizer of
/// `rep(H)` for `H` of index `index`.
pub fn random_rigidity_instance<R: Rng + ?Sized>(
    ell: u64,
    d: u32,
    blocks: usize,
    c: u64,
    index: u128,
    rng: &mut R,
) -> Result<RigidityInstance, InertiaError> {
    let f = PrimeField::new(ell);
    let (field, g) = level_field(ell, d)?;
    let exponents: Vec<u128> = (0..blocks)
        .map(|_| {
            (0..d).rev().fold(0u128, |acc, _| {
                acc * ell as u128 + rng.gen_range(0..=c.min(ell - 1)) as u128
            })
        })
        .collect();
    let mats: Vec<Matrix<u64>> = exponents
        .iter()
        .map(|e| multiplication_matrix(&field, &field.pow(&g, *e)))
        .collect();
    let image = block_diagonal(&f, &mats);
    let rep = TameRep {
        ell,
        level: d,
        generator_image: image,
    };
    let h = rep.image_of_power(index);
    let basis = centralizer_basis(&f, &h);
    let n = rep.dim();
    let s = loop {
        let mut s = matrix::zeros(&f, n, n);
        for b in &basis {
            let t = f.random(rng);
            s = matrix::add(&f, &s, &matrix::scale(&f, b, &t));
        }
        if !f.is_zero(&matrix::determinant(&f, &s)) && is_semisimple(&f, &s) {
            break s;
        }
    };
    Ok(RigidityInstance {
        rep,
        index,
        s,
        c,
        exponents,
    })
}

/// Basis of `{X : XA = AX}`.
pub fn centralizer_basis(f: &PrimeField, a: &Matrix<u64>) -> Vec<Matrix<u64>> {
    let n = a.rows();
    // vec(XA - AX) as a linear map on vec(X), row-major
    let mut lin = matrix::zeros(f, n * n, n * n);
    for i in 0..n {
        for j in 0..n {
            let col = i * n + j;
            // X = E_ij: (E_ij A)_{i,k} = A_{j,k}; (A E_ij)_{k,j} = A_{k,i}
            for k in 0..n {
                let r = i * n + k;
                let v = f.add(lin.get(r, col), a.get(j, k));
                lin.set(r, col, v);
                let r = k * n + j;
                let v = f.sub(lin.get(r, col), a.get(k, i));
                lin.set(r, col, v);
            }
        }
    }
    matrix::kernel(f, &lin)
        .into_iter()
        .map(|v| Matrix::from_vec(n, n, v))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn digits_examples() {
        assert_eq!(restrict_digits(7, 2, 7), vec![0, 1]);
        assert_eq!(restrict_digits(48, 2, 7), vec![0, 0]);
        assert_eq!(restrict_digits(0, 3, 7), vec![0, 0, 0]);
        assert_eq!(restrict_digits(-1, 2, 7), vec![5, 6]);
    }

    #[test]
    fn multiplication_fixture_gives_conjugate_pair() {
        let r = multiplication_rep(7, 2, 1).unwrap();
        let chars = decompose_tame(&r).unwrap();
        let digits: Vec<Vec<u64>> = chars.iter().map(|c| c.digits.clone()).collect();
        assert_eq!(digits, vec![vec![0, 1], vec![1, 0]]);
        assert_eq!(chars[0].frobenius_twist(), chars[1]);
    }

    #[test]
    fn identity_and_scalar_reps() {
        let f = PrimeField::new(11);
        let id = TameRep {
            ell: 11,
            level: 1,
            generator_image: matrix::identity(&f, 3),
        };
        let chars = decompose_tame(&id).unwrap();
        assert_eq!(chars, vec![TameCharacter::trivial(1, 11); 3]);
        // a ↦ a^3 on F_11^*: image of the generator is g^3
        let (e, g) = level_field(11, 1).unwrap();
        let v = e.pow(&g, 3)[0];
        let r = TameRep {
            ell: 11,
            level: 1,
            generator_image: Matrix::from_rows(vec![vec![v]]),
        };
        assert_eq!(decompose_tame(&r).unwrap()[0].digits, vec![3]);
    }

    #[test]
    fn unipotent_is_rejected() {
        let r = TameRep {
            ell: 7,
            level: 1,
            generator_image: Matrix::from_rows(vec![vec![1, 1], vec![0, 1]]),
        };
        assert_eq!(decompose_tame(&r), Err(InertiaError::NotTame(1)));
    }

    #[test]
    fn raising() {
        for m in 0..6u64 {
            let c = TameCharacter::from_exponent(m as i128, 1, 7);
            assert_eq!(raise_level(&c, 2).unwrap().digits, vec![m, m]);
        }
        let t2 = TameCharacter::from_exponent(1, 2, 7);
        assert_eq!(raise_level(&t2, 4).unwrap().digits, vec![1, 0, 1, 0]);
        assert!(raise_level(&t2, 3).is_err());
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(raise_level_pointwise(&t2, 4, 20, &mut rng).unwrap());
    }

    #[test]
    fn serre_examples() {
        let ok = TameCharacter { ell: 7, level: 2, digits: vec![1, 1] };
        let bad = TameCharacter { ell: 7, level: 2, digits: vec![5, 0] };
        assert!(check_serre_bound(&[ok.clone()], 1, 2).pass);
        let audit = check_serre_bound(&[ok, bad], 1, 2);
        assert!(!audit.pass);
        assert_eq!(audit.per_character, vec![true, false]);
        assert!(check_serre_bound(&[], 1, 2).pass);
    }

    fn diag(v: &[u64]) -> Matrix<u64> {
        let n = v.len();
        let mut m = Matrix::filled(n, n, 0u64);
        for (i, x) in v.iter().enumerate() {
            m.set(i, i, *x);
        }
        m
    }

    #[test]
    fn rigidity_trivial_cases() {
        let (e, g) = level_field(7, 1).unwrap();
        let rep = TameRep { ell: 7, level: 1, generator_image: diag(&[g[0], e.pow(&g, 2)[0]]) };
        let s = diag(&[2, 3]);
        assert_eq!(rigidity_check(&rep, 1, &s, 2).unwrap(), RigidityVerdict::Confirmed);
        assert_eq!(rigidity_check(&rep, 6, &s, 2).unwrap(), RigidityVerdict::HypothesisNotMet);
        let nilp = Matrix::from_rows(vec![vec![0, 1], vec![0, 0]]);
        assert_eq!(rigidity_check(&rep, 1, &nilp, 2), Err(InertiaError::NotSemisimple));
    }

    #[test]
    fn rigidity_fails_at_the_boundary() {
        // θ^0 ⊕ θ^3 over F_7 with c = 3 and H of index 2: c·m = ℓ − 1.
        // f(H) is trivial, the swap commutes with it but not with
        // f(g) = diag(1, -1).
        let (e, g) = level_field(7, 1).unwrap();
        let g3 = e.pow(&g, 3)[0];
        assert_eq!(g3, 6);
        let rep = TameRep { ell: 7, level: 1, generator_image: diag(&[1, g3]) };
        let swap = Matrix::from_rows(vec![vec![0, 1], vec![1, 0]]);
        assert_eq!(rigidity_check(&rep, 2, &swap, 3).unwrap(), RigidityVerdict::Violated);
        // strict inequality: index 2 with c = 2 separates exponents 0 and 2
        let rep2 = TameRep { ell: 7, level: 1, generator_image: diag(&[1, e.pow(&g, 2)[0]]) };
        assert_eq!(rigidity_check(&rep2, 2, &swap, 2).unwrap(), RigidityVerdict::HypothesisNotMet);
    }

    #[test]
    fn random_instances_commute_with_subgroup() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let inst = random_rigidity_instance(11, 2, 2, 2, 5, &mut rng).unwrap();
            let f = inst.rep.field();
            assert!(commutes(&f, &inst.s, &inst.rep.image_of_power(5)));
            let v = rigidity_check(&inst.rep, inst.index, &inst.s, inst.c).unwrap();
            assert_ne!(v, RigidityVerdict::HypothesisNotMet);
        }
    }
}
