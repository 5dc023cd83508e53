//! Invariants of the Lie algebra in `U = ⊕_{i=1}^{c} V^{⊗i}`.
//!
//! Vectors of `U` are stored as the concatenation of their degree blocks;
//! within `V^{⊗i}` the first tensor slot is the most significant digit.

use crate::ff::{matrix, Field, Matrix, PrimeField};

use super::lie::LieSubalgebra;
use super::NoriError;

/// Largest `dim V^{⊗c}` accepted.
pub const INVARIANT_BUDGET: usize = 1296;

/// Applies `m` to tensor slot `pos` of `u ∈ V^{⊗deg}`.
fn apply_slot(f: &PrimeField, m: &Matrix<u64>, u: &[u64], n: usize, deg: usize, pos: usize) -> Vec<u64> {
    let stride = n.pow((deg - 1 - pos) as u32);
    let mut out = vec![0u64; u.len()];
    for (idx, o) in out.iter_mut().enumerate() {
        let j = (idx / stride) % n;
        let base = idx - j * stride;
        let mut acc = 0u64;
        for k in 0..n {
            let c = *m.get(j, k);
            if c != 0 {
                acc = f.add(&acc, &f.mul(&c, &u[base + k * stride]));
            }
        }
        *o = acc;
    }
    out
}

fn derivation(f: &PrimeField, b: &Matrix<u64>, u: &[u64], n: usize, deg: usize) -> Vec<u64> {
    let mut acc = vec![0u64; u.len()];
    for pos in 0..deg {
        let v = apply_slot(f, b, u, n, deg, pos);
        for (a, x) in acc.iter_mut().zip(v) {
            *a = f.add(a, &x);
        }
    }
    acc
}

fn check_budget(n: usize, c3: usize) -> Result<(), NoriError> {
    let top = (n as u128).checked_pow(c3 as u32).unwrap_or(u128::MAX);
    if top > INVARIANT_BUDGET as u128 {
        return Err(NoriError::Budget(top.min(usize::MAX as u128) as usize));
    }
    Ok(())
}

/// Basis of the vectors of `U` killed by every element of `s`.
pub fn invariant_subspace(s: &LieSubalgebra, c3: usize) -> Result<Vec<Vec<u64>>, NoriError> {
    let n = s.ambient_dim;
    check_budget(n, c3)?;
    let f = s.field();
    let total: usize = (1..=c3).map(|i| n.pow(i as u32)).sum();
    let mut out = Vec::new();
    let mut offset = 0;
    for deg in 1..=c3 {
        let len = n.pow(deg as u32);
        // columns of `k` span the current common kernel
        let mut k: Vec<Vec<u64>> = (0..len)
            .map(|i| (0..len).map(|j| u64::from(i == j)).collect())
            .collect();
        for b in &s.basis {
            if k.is_empty() {
                break;
            }
            let images: Vec<Vec<u64>> = k.iter().map(|u| derivation(&f, b, u, n, deg)).collect();
            let ker = matrix::kernel(&f, &Matrix::from_columns(len, &images));
            k = ker
                .iter()
                .map(|c| {
                    let mut v = vec![0u64; len];
                    for (coef, u) in c.iter().zip(&k) {
                        if *coef != 0 {
                            for (x, y) in v.iter_mut().zip(u) {
                                *x = f.add(x, &f.mul(coef, y));
                            }
                        }
                    }
                    v
                })
                .collect();
        }
        for v in k {
            let mut w = vec![0u64; total];
            w[offset..offset + len].copy_from_slice(&v);
            out.push(w);
        }
        offset += len;
    }
    Ok(out)
}

/// Matrix of `g` acting on the span of `w_basis` through `g^{⊗i}` on each
/// degree block; `None` when the span is not `g`-stable.
pub fn induced_action(
    f: &PrimeField,
    g: &Matrix<u64>,
    w_basis: &[Vec<u64>],
    c3: usize,
) -> Result<Option<Matrix<u64>>, NoriError> {
    let n = g.rows();
    check_budget(n, c3)?;
    let total: usize = (1..=c3).map(|i| n.pow(i as u32)).sum();
    if w_basis.is_empty() {
        return Ok(Some(Matrix::from_vec(0, 0, Vec::new())));
    }
    let images: Vec<Vec<u64>> = w_basis
        .iter()
        .map(|w| {
            let mut out = Vec::with_capacity(total);
            let mut offset = 0;
            for deg in 1..=c3 {
                let len = n.pow(deg as u32);
                let mut block = w[offset..offset + len].to_vec();
                for pos in 0..deg {
                    block = apply_slot(f, g, &block, n, deg, pos);
                }
                out.extend(block);
                offset += len;
            }
            out
        })
        .collect();
    let a = Matrix::from_columns(total, w_basis);
    let b = Matrix::from_columns(total, &images);
    Ok(matrix::solve(f, &a, &b))
}
