//! Dense univariate polynomials over a field context.
//!
//! Coefficients are stored low degree first and kept trimmed (no trailing
//! zeros); the zero polynomial is the empty vector.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::field::{Field, FiniteField};

pub type Poly<E> = Vec<E>;

pub fn trim<F: Field>(f: &F, mut p: Poly<F::Elem>) -> Poly<F::Elem> {
    while p.last().is_some_and(|c| f.is_zero(c)) {
        p.pop();
    }
    p
}

/// Degree, with `None` for the zero polynomial.
pub fn degree<E>(p: &Poly<E>) -> Option<usize> {
    p.len().checked_sub(1)
}

pub fn x_poly<F: Field>(f: &F) -> Poly<F::Elem> {
    vec![f.zero(), f.one()]
}

pub fn add<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Poly<F::Elem> {
    let n = a.len().max(b.len());
    let z = f.zero();
    let out = (0..n)
        .map(|i| f.add(a.get(i).unwrap_or(&z), b.get(i).unwrap_or(&z)))
        .collect();
    trim(f, out)
}

pub fn sub<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Poly<F::Elem> {
    let n = a.len().max(b.len());
    let z = f.zero();
    let out = (0..n)
        .map(|i| f.sub(a.get(i).unwrap_or(&z), b.get(i).unwrap_or(&z)))
        .collect();
    trim(f, out)
}

pub fn mul<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Poly<F::Elem> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![f.zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if f.is_zero(x) {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] = f.add(&out[i + j], &f.mul(x, y));
        }
    }
    trim(f, out)
}

pub fn scale<F: Field>(f: &F, a: &[F::Elem], c: &F::Elem) -> Poly<F::Elem> {
    trim(f, a.iter().map(|x| f.mul(x, c)).collect())
}

/// Quotient and remainder. Panics on division by the zero polynomial.
pub fn divrem<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> (Poly<F::Elem>, Poly<F::Elem>) {
    let db = degree(&b.to_vec()).expect("division by zero polynomial");
    let lead_inv = f.inv(&b[db]).expect("trimmed polynomial has nonzero lead");
    let mut r: Vec<F::Elem> = a.to_vec();
    if r.len() <= db {
        return (Vec::new(), trim(f, r));
    }
    let mut q = vec![f.zero(); r.len() - db];
    for i in (db..r.len()).rev() {
        if f.is_zero(&r[i]) {
            continue;
        }
        let c = f.mul(&r[i], &lead_inv);
        for j in 0..=db {
            let t = f.mul(&c, &b[j]);
            r[i - db + j] = f.sub(&r[i - db + j], &t);
        }
        q[i - db] = c;
    }
    r.truncate(db);
    (trim(f, q), trim(f, r))
}

pub fn rem<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Poly<F::Elem> {
    divrem(f, a, b).1
}

pub fn monic<F: Field>(f: &F, a: Poly<F::Elem>) -> Poly<F::Elem> {
    match a.last() {
        None => a,
        Some(l) => {
            let li = f.inv(l).expect("nonzero lead");
            scale(f, &a, &li)
        }
    }
}

/// Monic gcd (zero if both inputs are zero).
pub fn gcd<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Poly<F::Elem> {
    let mut a = trim(f, a.to_vec());
    let mut b = trim(f, b.to_vec());
    while !b.is_empty() {
        let r = rem(f, &a, &b);
        a = b;
        b = r;
    }
    monic(f, a)
}

pub fn derivative<F: Field>(f: &F, a: &[F::Elem]) -> Poly<F::Elem> {
    let out = a
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| f.mul(c, &f.from_i64(i as i64)))
        .collect();
    trim(f, out)
}

pub fn eval<F: Field>(f: &F, a: &[F::Elem], x: &F::Elem) -> F::Elem {
    a.iter()
        .rev()
        .fold(f.zero(), |acc, c| f.add(&f.mul(&acc, x), c))
}

/// `base^e mod m`.
pub fn powmod<F: Field>(f: &F, base: &[F::Elem], mut e: u128, m: &[F::Elem]) -> Poly<F::Elem> {
    let mut acc = rem(f, &[f.one()], m);
    let mut b = rem(f, base, m);
    while e > 0 {
        if e & 1 == 1 {
            acc = rem(f, &mul(f, &acc, &b), m);
        }
        e >>= 1;
        if e > 0 {
            b = rem(f, &mul(f, &b, &b), m);
        }
    }
    acc
}

/// Squarefree test via the gcd with the derivative.
pub fn is_squarefree<F: Field>(f: &F, a: &[F::Elem]) -> bool {
    let d = derivative(f, a);
    if d.is_empty() {
        return degree(&a.to_vec()).unwrap_or(0) == 0;
    }
    degree(&gcd(f, a, &d)) == Some(0)
}

/// Product of the distinct irreducible factors, valid when the degree is
/// below the characteristic (no inseparable parts).
pub fn radical<F: Field>(f: &F, a: &[F::Elem]) -> Poly<F::Elem> {
    let d = derivative(f, a);
    if d.is_empty() {
        return monic(f, a.to_vec());
    }
    let g = gcd(f, a, &d);
    monic(f, divrem(f, a, &g).0)
}

/// Degrees of the irreducible factors of a squarefree polynomial, by
/// distinct-degree factorization. One entry per factor.
pub fn factor_degrees<F: FiniteField>(f: &F, a: &[F::Elem]) -> Vec<usize> {
    let q = f.order();
    let mut g = monic(f, radical(f, a));
    let x = x_poly(f);
    let mut h = x.clone();
    let mut out = Vec::new();
    let mut i = 1;
    while let Some(dg) = degree(&g) {
        if dg < 2 * i {
            if dg > 0 {
                out.push(dg);
            }
            break;
        }
        h = powmod(f, &h, q, &g);
        let d = gcd(f, &g, &sub(f, &h, &x));
        let dd = degree(&d).unwrap_or(0);
        if dd > 0 {
            out.extend(std::iter::repeat(i).take(dd / i));
            g = divrem(f, &g, &d).0;
            h = rem(f, &h, &g);
        }
        i += 1;
    }
    out.sort_unstable();
    out
}

/// Irreducibility over the field itself (Ben-Or style gcd test).
pub fn is_irreducible<F: FiniteField>(f: &F, a: &[F::Elem]) -> bool {
    let n = match degree(&a.to_vec()) {
        None | Some(0) => return false,
        Some(1) => return true,
        Some(n) => n,
    };
    let q = f.order();
    let m = monic(f, a.to_vec());
    let x = x_poly(f);
    let mut h = x.clone();
    for _ in 1..=n / 2 {
        h = powmod(f, &h, q, &m);
        let g = gcd(f, &m, &sub(f, &h, &x));
        if degree(&g) != Some(0) {
            return false;
        }
    }
    true
}

/// Distinct roots lying in the field, sorted by canonical index.
pub fn roots<F: FiniteField>(f: &F, a: &[F::Elem]) -> Vec<F::Elem> {
    let a = trim(f, a.to_vec());
    match degree(&a) {
        None => return Vec::new(),
        Some(0) => return Vec::new(),
        _ => {}
    }
    let q = f.order();
    let mut out = Vec::new();
    if q % 2 == 0 || q <= 64 {
        // small or even fields: scan
        for idx in 0..q {
            let x = f.from_index(idx);
            if f.is_zero(&eval(f, &a, &x)) {
                out.push(x);
            }
        }
        return out;
    }
    let m = monic(f, a);
    let x = x_poly(f);
    let xq = powmod(f, &x, q, &m);
    let g = gcd(f, &m, &sub(f, &xq, &x));
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0f_2007);
    split_linear(f, g, q, &mut rng, &mut out);
    out.sort_by_key(|r| f.index_of(r));
    out
}

fn split_linear<F: FiniteField>(
    f: &F,
    g: Poly<F::Elem>,
    q: u128,
    rng: &mut ChaCha8Rng,
    out: &mut Vec<F::Elem>,
) {
    match degree(&g) {
        None | Some(0) => {}
        Some(1) => {
            let r = f.neg(&f.div(&g[0], &g[1]).expect("monic"));
            out.push(r);
        }
        Some(d) => loop {
            let a = f.random(rng);
            let lin = vec![a, f.one()];
            let t = powmod(f, &lin, (q - 1) / 2, &g);
            let h = gcd(f, &g, &sub(f, &t, &[f.one()]));
            let dh = degree(&h).unwrap_or(0);
            if dh > 0 && dh < d {
                let other = divrem(f, &g, &h).0;
                split_linear(f, h, q, rng, out);
                split_linear(f, monic(f, other), q, rng, out);
                return;
            }
        },
    }
}

/// Roots in the field with algebraic multiplicity, sorted by canonical index.
pub fn roots_with_multiplicity<F: FiniteField>(f: &F, a: &[F::Elem]) -> Vec<(F::Elem, usize)> {
    let rs = roots(f, a);
    let mut out = Vec::with_capacity(rs.len());
    for r in rs {
        let lin = vec![f.neg(&r), f.one()];
        let mut cur = trim(f, a.to_vec());
        let mut mult = 0;
        loop {
            let (qq, rr) = divrem(f, &cur, &lin);
            if !rr.is_empty() {
                break;
            }
            mult += 1;
            cur = qq;
        }
        out.push((r, mult));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::{ext_field, ExtField, PrimeField};

    #[test]
    fn divrem_reconstructs() {
        let f = PrimeField::new(7);
        let a = vec![3, 0, 5, 1, 2];
        let b = vec![1, 4, 1];
        let (q, r) = divrem(&f, &a, &b);
        assert_eq!(add(&f, &mul(&f, &q, &b), &r), a);
        assert!(r.len() < b.len());
    }

    #[test]
    fn roots_of_split_quadratic() {
        let f = PrimeField::new(11);
        // (x-2)(x-5) = x^2 - 7x + 10
        let p = vec![10, f.neg(&7), 1];
        assert_eq!(roots(&f, &p), vec![2, 5]);
        // x^2 + 1 has no roots mod 11
        assert!(roots(&f, &[1, 0, 1]).is_empty());
    }

    #[test]
    fn roots_in_extension() {
        let e = ExtField::new(ext_field(11, 2).unwrap());
        // x^2 + 1 splits over GF(121)
        let p = vec![e.one(), e.zero(), e.one()];
        let rs = roots(&e, &p);
        assert_eq!(rs.len(), 2);
        for r in rs {
            assert!(e.is_zero(&eval(&e, &p, &r)));
        }
    }

    #[test]
    fn multiplicities() {
        let f = PrimeField::new(13);
        // (x-1)^3 (x-4)
        let p = mul(&f, &mul(&f, &mul(&f, &[12, 1], &[12, 1]), &[12, 1]), &[9, 1]);
        assert_eq!(roots_with_multiplicity(&f, &p), vec![(1, 3), (4, 1)]);
        assert!(!is_squarefree(&f, &p));
        assert_eq!(radical(&f, &p), mul(&f, &[12, 1], &[9, 1]));
    }

    #[test]
    fn factor_degrees_mixed() {
        let f = PrimeField::new(7);
        // (x^2+1)(x-3)(x^3 + x + 1)? x^3+x+1 over GF(7): check irreducible by roots
        let cubic = vec![1, 1, 0, 1];
        assert!(roots(&f, &cubic).is_empty());
        let p = mul(&f, &mul(&f, &[1, 0, 1], &[4, 1]), &cubic);
        assert_eq!(factor_degrees(&f, &p), vec![1, 2, 3]);
        assert!(is_irreducible(&f, &cubic));
        assert!(!is_irreducible(&f, &p));
    }
}
