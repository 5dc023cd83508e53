//! Field contexts.
//!
//! Arithmetic goes through a context object (`&F`) rather than operator
//! overloading on the element type, because the modulus of a prime or
//! extension field is only known at run time. The same generic linear
//! algebra then runs over `GF(ℓ)`, `GF(ℓ^k)` and the rationals.

use std::fmt;
use std::hash::Hash;
use std::marker::PhantomData;

use num_traits::{Num, Signed};
use rand::Rng;
use smallvec::SmallVec;

use super::FieldDescriptor;

pub trait Field: Clone + fmt::Debug + Send + Sync {
    type Elem: Clone + Eq + Hash + fmt::Debug + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    /// `None` for zero.
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
    fn from_i64(&self, v: i64) -> Self::Elem;

    fn is_zero(&self, a: &Self::Elem) -> bool {
        *a == self.zero()
    }

    fn is_one(&self, a: &Self::Elem) -> bool {
        *a == self.one()
    }

    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Option<Self::Elem> {
        self.inv(b).map(|bi| self.mul(a, &bi))
    }

    fn pow(&self, a: &Self::Elem, mut e: u128) -> Self::Elem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }
}

/// A finite field with a canonical integer encoding of its elements.
pub trait FiniteField: Field {
    fn characteristic(&self) -> u64;
    fn degree(&self) -> u32;

    fn order(&self) -> u128 {
        (self.characteristic() as u128).pow(self.degree())
    }

    /// Canonical encoding: coefficient `c_i` of the polynomial basis
    /// contributes `c_i ℓ^i`.
    fn index_of(&self, a: &Self::Elem) -> u128;
    fn from_index(&self, idx: u128) -> Self::Elem;

    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Elem {
        let q = self.order();
        self.from_index(rng.gen_range(0..q))
    }

    fn frobenius(&self, a: &Self::Elem) -> Self::Elem {
        self.pow(a, self.characteristic() as u128)
    }

    /// Whether `a` lies in the prime subfield; returns its integer value.
    fn prime_value(&self, a: &Self::Elem) -> Option<u64> {
        let idx = self.index_of(a);
        let p = self.characteristic() as u128;
        (idx < p).then_some(idx as u64)
    }
}

/// `GF(p)` with elements stored as canonical residues in `[0, p)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    /// The caller guarantees `p` is prime; see [`super::is_prime`].
    pub fn new(p: u64) -> Self {
        assert!(p >= 2 && p < (1 << 32), "prime field modulus out of range");
        Self { p }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn reduce_i64(&self, v: i64) -> u64 {
        v.rem_euclid(self.p as i64) as u64
    }

    /// Symmetric residue in `(-p/2, p/2]`.
    pub fn lift_symmetric(&self, a: u64) -> i64 {
        let a = a as i64;
        let p = self.p as i64;
        if 2 * a > p {
            a - p
        } else {
            a
        }
    }
}

impl Field for PrimeField {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1 % self.p
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 * *b as u128) % self.p as u128) as u64
    }
    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }
    fn inv(&self, a: &u64) -> Option<u64> {
        if *a == 0 {
            return None;
        }
        // extended Euclid on (a, p)
        let (mut r0, mut r1) = (self.p as i128, *a as i128);
        let (mut t0, mut t1) = (0i128, 1i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        Some(t0.rem_euclid(self.p as i128) as u64)
    }
    fn from_i64(&self, v: i64) -> u64 {
        self.reduce_i64(v)
    }
}

impl FiniteField for PrimeField {
    fn characteristic(&self) -> u64 {
        self.p
    }
    fn degree(&self) -> u32 {
        1
    }
    fn index_of(&self, a: &u64) -> u128 {
        *a as u128
    }
    fn from_index(&self, idx: u128) -> u64 {
        (idx % self.p as u128) as u64
    }
}

/// Element of `GF(ℓ^k)`: coefficients in the power basis `1, x, …, x^{k-1}`.
pub type ExtElem = SmallVec<[u64; 4]>;

/// `GF(ℓ^k) = GF(ℓ)[x] / (modulus)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtField {
    desc: FieldDescriptor,
    base: PrimeField,
}

impl ExtField {
    pub fn new(desc: FieldDescriptor) -> Self {
        let base = PrimeField::new(desc.ell);
        Self { desc, base }
    }

    pub fn descriptor(&self) -> &FieldDescriptor {
        &self.desc
    }

    pub fn base(&self) -> &PrimeField {
        &self.base
    }

    pub fn k(&self) -> usize {
        self.desc.degree as usize
    }

    /// Image of a prime-field element.
    pub fn embed(&self, a: u64) -> ExtElem {
        let mut v: ExtElem = SmallVec::from_elem(0, self.k());
        v[0] = a % self.desc.ell;
        v
    }

    /// The class of `x` (a root of the modulus).
    pub fn generator_x(&self) -> ExtElem {
        let mut v: ExtElem = SmallVec::from_elem(0, self.k());
        if self.k() > 1 {
            v[1] = 1;
        } else {
            // x ≡ 0 mod x for the degree-one convention
            v[0] = 0;
        }
        v
    }

    pub fn from_coeffs(&self, coeffs: &[u64]) -> ExtElem {
        let mut v: ExtElem = SmallVec::from_elem(0, self.k());
        for (i, c) in coeffs.iter().enumerate() {
            let c = c % self.desc.ell;
            if i < self.k() {
                v[i] = self.base.add(&v[i], &c);
            } else {
                // reduce higher terms through the modulus
                let mut mono = vec![0u64; i + 1];
                mono[i] = c;
                let r = self.reduce_poly(mono);
                for j in 0..self.k() {
                    v[j] = self.base.add(&v[j], &r[j]);
                }
            }
        }
        v
    }

    fn reduce_poly(&self, mut c: Vec<u64>) -> ExtElem {
        let k = self.k();
        let m = &self.desc.modulus;
        let bf = &self.base;
        for i in (k..c.len()).rev() {
            let lead = c[i];
            if lead == 0 {
                continue;
            }
            // modulus is monic of degree k
            for j in 0..k {
                let t = bf.mul(&lead, &m[j]);
                c[i - k + j] = bf.sub(&c[i - k + j], &t);
            }
            c[i] = 0;
        }
        let mut out: ExtElem = SmallVec::from_elem(0, k);
        for j in 0..k.min(c.len()) {
            out[j] = c[j];
        }
        out
    }
}

impl Field for ExtField {
    type Elem = ExtElem;

    fn zero(&self) -> ExtElem {
        SmallVec::from_elem(0, self.k())
    }
    fn one(&self) -> ExtElem {
        self.embed(1)
    }
    fn add(&self, a: &ExtElem, b: &ExtElem) -> ExtElem {
        a.iter().zip(b).map(|(x, y)| self.base.add(x, y)).collect()
    }
    fn sub(&self, a: &ExtElem, b: &ExtElem) -> ExtElem {
        a.iter().zip(b).map(|(x, y)| self.base.sub(x, y)).collect()
    }
    fn neg(&self, a: &ExtElem) -> ExtElem {
        a.iter().map(|x| self.base.neg(x)).collect()
    }
    fn mul(&self, a: &ExtElem, b: &ExtElem) -> ExtElem {
        let k = self.k();
        if k == 1 {
            return SmallVec::from_elem(self.base.mul(&a[0], &b[0]), 1);
        }
        let p = self.desc.ell as u128;
        let mut acc = vec![0u128; 2 * k - 1];
        for (i, x) in a.iter().enumerate() {
            if *x == 0 {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                acc[i + j] = (acc[i + j] + *x as u128 * *y as u128) % p;
            }
        }
        self.reduce_poly(acc.into_iter().map(|c| c as u64).collect())
    }
    fn inv(&self, a: &ExtElem) -> Option<ExtElem> {
        if self.is_zero(a) {
            return None;
        }
        Some(self.pow(a, self.order() - 2))
    }
    fn from_i64(&self, v: i64) -> ExtElem {
        self.embed(self.base.reduce_i64(v))
    }
    fn is_zero(&self, a: &ExtElem) -> bool {
        a.iter().all(|c| *c == 0)
    }
}

impl FiniteField for ExtField {
    fn characteristic(&self) -> u64 {
        self.desc.ell
    }
    fn degree(&self) -> u32 {
        self.desc.degree
    }
    fn index_of(&self, a: &ExtElem) -> u128 {
        let p = self.desc.ell as u128;
        a.iter().rev().fold(0u128, |acc, c| acc * p + *c as u128)
    }
    fn from_index(&self, mut idx: u128) -> ExtElem {
        let p = self.desc.ell as u128;
        let mut v: ExtElem = SmallVec::from_elem(0, self.k());
        for c in v.iter_mut() {
            *c = (idx % p) as u64;
            idx /= p;
        }
        v
    }
}

/// Any exact `num_traits` number type (rationals, big rationals) as a field.
#[derive(Clone, Copy, Debug, Default)]
pub struct NumField<T>(PhantomData<T>);

impl<T> NumField<T> {
    pub fn new() -> Self {
        Self(PhantomData)
    }
}

impl<T> Field for NumField<T>
where
    T: Num + Signed + Clone + Eq + Hash + fmt::Debug + Send + Sync + From<i64>,
{
    type Elem = T;

    fn zero(&self) -> T {
        T::zero()
    }
    fn one(&self) -> T {
        T::one()
    }
    fn add(&self, a: &T, b: &T) -> T {
        a.clone() + b.clone()
    }
    fn sub(&self, a: &T, b: &T) -> T {
        a.clone() - b.clone()
    }
    fn mul(&self, a: &T, b: &T) -> T {
        a.clone() * b.clone()
    }
    fn neg(&self, a: &T) -> T {
        -a.clone()
    }
    fn inv(&self, a: &T) -> Option<T> {
        if a.is_zero() {
            None
        } else {
            Some(T::one() / a.clone())
        }
    }
    fn from_i64(&self, v: i64) -> T {
        T::from(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::ext_field;
    use num_rational::Rational64;

    #[test]
    fn prime_field_inverse() {
        let f = PrimeField::new(11);
        for a in 1..11 {
            let ai = f.inv(&a).unwrap();
            assert_eq!(f.mul(&a, &ai), 1);
        }
        assert_eq!(f.inv(&0), None);
        assert_eq!(f.lift_symmetric(10), -1);
        assert_eq!(f.lift_symmetric(5), 5);
        assert_eq!(f.lift_symmetric(6), -5);
    }

    #[test]
    fn ext_field_inverse_and_frobenius() {
        let e = ExtField::new(ext_field(7, 2).unwrap());
        for idx in 1..49u128 {
            let a = e.from_index(idx);
            let ai = e.inv(&a).unwrap();
            assert!(e.is_one(&e.mul(&a, &ai)));
            // a^(q) = a
            assert_eq!(e.pow(&a, 49), a);
        }
        let x = e.generator_x();
        assert_ne!(e.frobenius(&x), x);
        assert_eq!(e.frobenius(&e.frobenius(&x)), x);
    }

    #[test]
    fn rationals_through_num_traits() {
        let q = NumField::<Rational64>::new();
        let a = Rational64::new(3, 4);
        assert_eq!(q.mul(&a, &q.inv(&a).unwrap()), q.one());
    }
}
