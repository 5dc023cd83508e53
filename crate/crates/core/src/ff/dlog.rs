use std::collections::HashMap;

use super::field::FiniteField;
use super::FfError;

/// Default ceiling on the multiplicative group size for discrete logs.
pub const DEFAULT_FIELD_CAP: u128 = 1 << 31;

/// Prime factorization by trial division, ascending.
pub fn factorize(mut n: u128) -> Vec<(u128, u32)> {
    let mut out = Vec::new();
    let mut d = 2u128;
    while d * d <= n {
        if n % d == 0 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Multiplicative order of a nonzero element of a finite field.
pub fn multiplicative_order<F: FiniteField>(f: &F, a: &F::Elem) -> Option<u128> {
    if f.is_zero(a) {
        return None;
    }
    let mut ord = f.order() - 1;
    for (p, e) in factorize(ord) {
        for _ in 0..e {
            if f.is_one(&f.pow(a, ord / p)) {
                ord /= p;
            } else {
                break;
            }
        }
    }
    Some(ord)
}

pub fn is_primitive<F: FiniteField>(f: &F, a: &F::Elem) -> bool {
    multiplicative_order(f, a) == Some(f.order() - 1)
}

/// Least primitive element under the canonical index encoding.
pub fn primitive_element<F: FiniteField>(f: &F) -> F::Elem {
    let q = f.order();
    let factors = factorize(q - 1);
    for idx in 1..q {
        let a = f.from_index(idx);
        if factors.iter().all(|(p, _)| !f.is_one(&f.pow(&a, (q - 1) / p))) {
            return a;
        }
    }
    unreachable!("every finite field has a primitive element")
}

/// Baby-step giant-step table for repeated logarithms to one base.
#[derive(Debug, Clone)]
pub struct DlogTable<F: FiniteField> {
    field: F,
    base: F::Elem,
    group_order: u128,
    step: u128,
    baby: HashMap<F::Elem, u128>,
    giant: F::Elem,
}

impl<F: FiniteField> DlogTable<F> {
    pub fn new(field: &F, base: &F::Elem, cap: u128) -> Result<Self, FfError> {
        let q = field.order();
        if q > cap {
            return Err(FfError::FieldTooLarge { order: q, cap });
        }
        if field.is_zero(base) || !is_primitive(field, base) {
            return Err(FfError::NotGenerator);
        }
        let group_order = q - 1;
        let step = (group_order as f64).sqrt().ceil() as u128 + 1;
        let mut baby = HashMap::with_capacity(step as usize);
        let mut cur = field.one();
        for j in 0..step {
            baby.entry(cur.clone()).or_insert(j);
            cur = field.mul(&cur, base);
        }
        let base_inv = field.inv(base).expect("nonzero");
        let giant = field.pow(&base_inv, step);
        Ok(Self {
            field: field.clone(),
            base: base.clone(),
            group_order,
            step,
            baby,
            giant,
        })
    }

    pub fn base(&self) -> &F::Elem {
        &self.base
    }

    /// The unique `e` in `[0, q - 2]` with `base^e = a`.
    pub fn log(&self, a: &F::Elem) -> Result<u128, FfError> {
        if self.field.is_zero(a) {
            return Err(FfError::ZeroLog);
        }
        let mut gamma = a.clone();
        for i in 0..=self.step {
            if let Some(j) = self.baby.get(&gamma) {
                return Ok((i * self.step + j) % self.group_order);
            }
            gamma = self.field.mul(&gamma, &self.giant);
        }
        // unreachable for a primitive base; report rather than panic
        Err(FfError::NotGenerator)
    }
}

/// One-shot discrete logarithm of `a` to the base `g`.
pub fn discrete_log<F: FiniteField>(f: &F, a: &F::Elem, g: &F::Elem) -> Result<u128, FfError> {
    discrete_log_capped(f, a, g, DEFAULT_FIELD_CAP)
}

pub fn discrete_log_capped<F: FiniteField>(
    f: &F,
    a: &F::Elem,
    g: &F::Elem,
    cap: u128,
) -> Result<u128, FfError> {
    if f.is_zero(a) {
        return Err(FfError::ZeroLog);
    }
    DlogTable::new(f, g, cap)?.log(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::{ext_field, ExtField, Field, PrimeField};

    #[test]
    fn three_base_two_mod_eleven() {
        let f = PrimeField::new(11);
        // power table of 2 mod 11: 1 2 4 8 5 10 9 7 3 6
        let mut table = vec![0u128; 11];
        let mut cur = 1u64;
        for e in 0..10 {
            table[cur as usize] = e;
            cur = f.mul(&cur, &2);
        }
        assert_eq!(table[3], 8);
        assert_eq!(discrete_log(&f, &3, &2).unwrap(), table[3]);
        // the power table oracle for every nonzero residue
        for a in 1..11u64 {
            assert_eq!(discrete_log(&f, &a, &2).unwrap(), table[a as usize]);
        }
    }

    #[test]
    fn errors() {
        let f = PrimeField::new(11);
        assert!(matches!(discrete_log(&f, &0, &2), Err(FfError::ZeroLog)));
        // 3 has order 5 mod 11
        assert!(matches!(discrete_log(&f, &4, &3), Err(FfError::NotGenerator)));
        assert!(matches!(
            discrete_log_capped(&f, &4, &2, 5),
            Err(FfError::FieldTooLarge { .. })
        ));
    }

    #[test]
    fn extension_logs() {
        let e = ExtField::new(ext_field(7, 2).unwrap());
        let g = primitive_element(&e);
        let t = DlogTable::new(&e, &g, DEFAULT_FIELD_CAP).unwrap();
        assert_eq!(t.log(&e.one()).unwrap(), 0);
        assert_eq!(t.log(&g).unwrap(), 1);
        for idx in 1..49 {
            let a = e.from_index(idx);
            let l = t.log(&a).unwrap();
            assert_eq!(e.pow(&g, l), a);
        }
    }

    #[test]
    fn factorize_small() {
        assert_eq!(factorize(360), vec![(2, 3), (3, 2), (5, 1)]);
        assert_eq!(factorize(97), vec![(97, 1)]);
    }
}
