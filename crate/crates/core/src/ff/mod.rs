//! Exact arithmetic over `GF(ℓ)` and `GF(ℓ^k)`: fields, polynomials, dense
//! matrices, characteristic polynomials and small discrete logarithms.

mod dlog;
mod field;
pub mod matrix;
pub mod poly;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use dlog::{
    discrete_log, discrete_log_capped, factorize, is_primitive, multiplicative_order,
    primitive_element, DlogTable, DEFAULT_FIELD_CAP,
};
pub use field::{ExtElem, ExtField, Field, FiniteField, NumField, PrimeField};
pub use matrix::Matrix;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FfError {
    #[error("ffcore: {0} is not prime")]
    NotPrime(u64),
    #[error("ffcore: extension degree must be positive")]
    ZeroDegree,
    #[error("ffcore: discrete log of zero")]
    ZeroLog,
    #[error("ffcore: base is not a generator of the multiplicative group")]
    NotGenerator,
    #[error("ffcore: field of order {order} exceeds the discrete-log cap {cap}")]
    FieldTooLarge { order: u128, cap: u128 },
    #[error("ffcore: shape mismatch: {0}")]
    Shape(String),
}

/// Deterministic trial-division primality test.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// `GF(ℓ^k)` presented as `GF(ℓ)[x]/(modulus)`.
///
/// The modulus is the least monic irreducible polynomial of degree `k`,
/// ordering candidates by the integer `Σ c_i ℓ^i` of their non-leading
/// coefficients. Degree one uses the modulus `x`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldDescriptor {
    pub ell: u64,
    pub degree: u32,
    /// Coefficients low degree first, monic (last entry 1).
    pub modulus: Vec<u64>,
}

impl FieldDescriptor {
    pub fn order(&self) -> u128 {
        (self.ell as u128).pow(self.degree)
    }
}

pub fn ext_field(ell: u64, k: u32) -> Result<FieldDescriptor, FfError> {
    if !is_prime(ell) || ell >= (1 << 32) {
        return Err(FfError::NotPrime(ell));
    }
    if k == 0 {
        return Err(FfError::ZeroDegree);
    }
    if k == 1 {
        return Ok(FieldDescriptor {
            ell,
            degree: 1,
            modulus: vec![0, 1],
        });
    }
    let f = PrimeField::new(ell);
    let span = (ell as u128).pow(k);
    for idx in 0..span {
        let mut coeffs = Vec::with_capacity(k as usize + 1);
        let mut t = idx;
        for _ in 0..k {
            coeffs.push((t % ell as u128) as u64);
            t /= ell as u128;
        }
        if coeffs[0] == 0 {
            // divisible by x
            continue;
        }
        coeffs.push(1);
        if poly::is_irreducible(&f, &coeffs) {
            return Ok(FieldDescriptor {
                ell,
                degree: k,
                modulus: coeffs,
            });
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

/// Characteristic polynomial of a square prime-field matrix.
pub fn char_poly(f: &PrimeField, m: &Matrix<u64>) -> Result<Vec<u64>, FfError> {
    if !m.is_square() {
        return Err(FfError::Shape(format!("{}x{} is not square", m.rows(), m.cols())));
    }
    Ok(matrix::char_poly(f, m))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_descriptor() {
        let d = ext_field(7, 1).unwrap();
        assert_eq!(d.modulus, vec![0, 1]);
        assert_eq!(d.order(), 7);
    }

    #[test]
    fn least_irreducible_quadratic_over_gf7() {
        // oracle: enumerate monic quadratics in the documented order and
        // test irreducibility by searching for a root
        let f = PrimeField::new(7);
        let mut expected = None;
        'outer: for c1 in 0..7u64 {
            for c0 in 0..7u64 {
                let has_root = (0..7u64).any(|x| (x * x + c1 * x + c0) % 7 == 0);
                if !has_root {
                    expected = Some(vec![c0, c1, 1]);
                    break 'outer;
                }
            }
        }
        let d = ext_field(7, 2).unwrap();
        assert_eq!(Some(d.modulus.clone()), expected);
        assert_eq!(d.modulus, vec![1, 0, 1]);
        assert!(poly::is_irreducible(&f, &d.modulus));
    }

    #[test]
    fn cubic_modulus_has_no_root() {
        let d = ext_field(7, 3).unwrap();
        let f = PrimeField::new(7);
        assert!(poly::roots(&f, &d.modulus).is_empty());
    }

    #[test]
    fn rejects_composites() {
        assert_eq!(ext_field(4, 2), Err(FfError::NotPrime(4)));
        assert_eq!(ext_field(1, 1), Err(FfError::NotPrime(1)));
        assert_eq!(ext_field(7, 0), Err(FfError::ZeroDegree));
    }

    #[test]
    fn deterministic_moduli() {
        for (l, k) in [(5, 3), (11, 2), (13, 4)] {
            assert_eq!(ext_field(l, k).unwrap(), ext_field(l, k).unwrap());
        }
    }

    #[test]
    fn char_poly_examples() {
        let f = PrimeField::new(7);
        let id = matrix::identity(&f, 2);
        // x^2 - 2x + 1
        assert_eq!(char_poly(&f, &id).unwrap(), vec![1, 5, 1]);
        let d = Matrix::from_rows(vec![vec![3, 0], vec![0, 5]]);
        // (x-3)(x-5) = x^2 - 8x + 15
        assert_eq!(char_poly(&f, &d).unwrap(), vec![1, 6, 1]);
        // companion matrix of x^3 + 2x^2 + 4x + 6
        let p = [6u64, 4, 2];
        let comp = Matrix::from_rows(vec![
            vec![0, 0, f.neg(&p[0])],
            vec![1, 0, f.neg(&p[1])],
            vec![0, 1, f.neg(&p[2])],
        ]);
        assert_eq!(char_poly(&f, &comp).unwrap(), vec![6, 4, 2, 1]);
        let rect = Matrix::from_rows(vec![vec![1u64, 2, 3]]);
        assert!(char_poly(&f, &rect).is_err());
    }
}
