//! Formal characters as integer annihilator lattices.
//!
//! A diagonalized torus acting on `N` coordinates with weights `w_1 … w_N`
//! (columns of an `r × N` integer matrix) is recorded by the lattice
//! `{ m ∈ Z^N : Σ m_j w_j = 0 }`. Two faithful representations have the
//! same formal character exactly when these lattices agree up to a
//! permutation of the coordinates, so the canonical form below is a
//! complete invariant.
//!
//! Hermite normal form convention (row style): basis vectors are rows,
//! pivots (first nonzero entries) are positive and strictly move right,
//! and every entry above a pivot lies in `[0, pivot)`. Zero rows are
//! dropped.
//!
//! The permutation-canonical form is the least HNF under column-major
//! lexicographic order over all `N!` coordinate orders. The first `k`
//! columns of the HNF of a permuted lattice only depend on which
//! coordinates come first (they are the HNF of the projection), so the
//! search is a branch and bound over coordinate prefixes. Transpositions
//! that fix the lattice collapse equivalent branches.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest ambient dimension accepted by [`canonical_form`].
pub const MAX_CANONICAL_DIM: usize = 12;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormcharError {
    #[error("formchar: canonical form is only supported for N <= {MAX_CANONICAL_DIM}, got {0}")]
    Unsupported(usize),
    #[error("formchar: dimension mismatch ({0} vs {1})")]
    DimensionMismatch(usize, usize),
    #[error("formchar: row of length {got}, expected {expected}")]
    RaggedRow { got: usize, expected: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FormalCharacter {
    pub n: usize,
    #[serde(rename = "basis")]
    pub lattice_basis: Vec<Vec<i64>>,
    #[serde(rename = "canonical")]
    pub perm_canonical: bool,
}

impl FormalCharacter {
    pub fn rank(&self) -> usize {
        self.lattice_basis.len()
    }

    /// Canonical formal character of a weight matrix.
    pub fn from_weights(weights: &[Vec<i64>], n: usize) -> Result<Self, FormcharError> {
        let lattice = annihilator_lattice(weights, n)?;
        canonical_form(&lattice, n)
    }

    pub fn canonicalized(&self) -> Result<Self, FormcharError> {
        if self.perm_canonical {
            return Ok(self.clone());
        }
        canonical_form(&self.lattice_basis, self.n)
    }
}

fn check_rows(rows: &[Vec<i64>], n: usize) -> Result<(), FormcharError> {
    for r in rows {
        if r.len() != n {
            return Err(FormcharError::RaggedRow {
                got: r.len(),
                expected: n,
            });
        }
    }
    Ok(())
}

fn sub_scaled(row: &mut [i64], other: &[i64], q: i64) {
    if q == 0 {
        return;
    }
    for (a, b) in row.iter_mut().zip(other) {
        *a -= q * b;
    }
}

/// Row-style Hermite normal form of the lattice spanned by `rows`.
pub fn hnf(rows: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let mut m: Vec<Vec<i64>> = rows.to_vec();
    let ncols = m.first().map_or(0, |r| r.len());
    let mut r = 0;
    for col in 0..ncols {
        if r == m.len() {
            break;
        }
        loop {
            let pick = (r..m.len())
                .filter(|&i| m[i][col] != 0)
                .min_by_key(|&i| (m[i][col].unsigned_abs(), i));
            let Some(pick) = pick else { break };
            m.swap(r, pick);
            let mut clean = true;
            for i in r + 1..m.len() {
                if m[i][col] != 0 {
                    let q = m[i][col] / m[r][col];
                    let pivot_row = m[r].clone();
                    sub_scaled(&mut m[i], &pivot_row, q);
                    if m[i][col] != 0 {
                        clean = false;
                    }
                }
            }
            if clean {
                break;
            }
        }
        if m[r][col] == 0 {
            continue;
        }
        if m[r][col] < 0 {
            for x in m[r].iter_mut() {
                *x = -*x;
            }
        }
        let pivot_row = m[r].clone();
        let p = pivot_row[col];
        for i in 0..r {
            let q = m[i][col].div_euclid(p);
            sub_scaled(&mut m[i], &pivot_row, q);
        }
        r += 1;
    }
    m.truncate(r);
    m.retain(|row| row.iter().any(|x| *x != 0));
    m
}

/// Basis (in HNF) of `{ m ∈ Z^N : Σ_j m_j · w_j = 0 }` where `w_j` is the
/// `j`-th column of `weights`. With no rows this is all of `Z^N`.
pub fn annihilator_lattice(weights: &[Vec<i64>], n: usize) -> Result<Vec<Vec<i64>>, FormcharError> {
    check_rows(weights, n)?;
    let r = weights.len();
    // rows (w_j | e_j); the rows of the HNF with zero left block span the kernel
    let aug: Vec<Vec<i64>> = (0..n)
        .map(|j| {
            let mut row: Vec<i64> = weights.iter().map(|w| w[j]).collect();
            row.extend((0..n).map(|i| i64::from(i == j)));
            row
        })
        .collect();
    let h = hnf(&aug);
    let kernel: Vec<Vec<i64>> = h
        .into_iter()
        .filter(|row| row[..r].iter().all(|x| *x == 0))
        .map(|row| row[r..].to_vec())
        .collect();
    Ok(hnf(&kernel))
}

/// Membership test for the lattice spanned by an HNF basis.
pub fn lattice_contains(hnf_basis: &[Vec<i64>], v: &[i64]) -> bool {
    let mut v = v.to_vec();
    for row in hnf_basis {
        let Some(p) = row.iter().position(|x| *x != 0) else {
            continue;
        };
        if v[p] % row[p] != 0 {
            return false;
        }
        let q = v[p] / row[p];
        sub_scaled(&mut v, row, q);
    }
    v.iter().all(|x| *x == 0)
}

fn project(rows: &[Vec<i64>], order: &[usize]) -> Vec<Vec<i64>> {
    rows.iter()
        .map(|r| order.iter().map(|&c| r[c]).collect())
        .collect()
}

/// Column-major flattening of an HNF padded to `rank` rows.
fn column_major(h: &[Vec<i64>], rank: usize, width: usize) -> Vec<i64> {
    let mut out = Vec::with_capacity(rank * width);
    for c in 0..width {
        for r in 0..rank {
            out.push(h.get(r).map_or(0, |row| row[c]));
        }
    }
    out
}

struct Search<'a> {
    basis: &'a [Vec<i64>],
    n: usize,
    rank: usize,
    swap_fixes: Vec<Vec<bool>>,
    best: Option<Vec<i64>>,
}

impl Search<'_> {
    fn prefix(&self, order: &[usize]) -> Vec<i64> {
        let h = hnf(&project(self.basis, order));
        column_major(&h, self.rank, order.len())
    }

    fn dfs(&mut self, order: &mut Vec<usize>, remaining: &mut Vec<usize>) {
        let depth = order.len();
        if depth == self.n {
            let full = self.prefix(order);
            if self.best.as_ref().is_none_or(|b| full < *b) {
                self.best = Some(full);
            }
            return;
        }
        let mut candidates: Vec<(Vec<i64>, usize)> = Vec::new();
        let mut seen: Vec<usize> = Vec::new();
        for &c in remaining.iter() {
            if seen.iter().any(|&t| self.swap_fixes[t][c]) {
                continue;
            }
            seen.push(c);
            order.push(c);
            let p = self.prefix(order);
            order.pop();
            candidates.push((p, c));
        }
        candidates.sort();
        for (p, c) in candidates {
            if let Some(b) = &self.best {
                if p.as_slice() > &b[..p.len()] {
                    continue;
                }
            }
            order.push(c);
            let pos = remaining.iter().position(|&x| x == c).unwrap();
            remaining.remove(pos);
            self.dfs(order, remaining);
            remaining.insert(pos, c);
            order.pop();
        }
    }
}

/// Permutation-canonical form of the lattice spanned by `basis` in `Z^n`.
pub fn canonical_form(basis: &[Vec<i64>], n: usize) -> Result<FormalCharacter, FormcharError> {
    if n > MAX_CANONICAL_DIM {
        return Err(FormcharError::Unsupported(n));
    }
    check_rows(basis, n)?;
    let h = hnf(basis);
    let rank = h.len();
    if rank == 0 || rank == n {
        // {0} and Z^n are fixed by every permutation
        let lattice_basis = if rank == 0 { Vec::new() } else { identity_rows(n) };
        return Ok(FormalCharacter {
            n,
            lattice_basis,
            perm_canonical: true,
        });
    }
    let mut swap_fixes = vec![vec![false; n]; n];
    for (j, row) in swap_fixes.iter_mut().enumerate() {
        for (k, cell) in row.iter_mut().enumerate() {
            if j == k {
                continue;
            }
            let swapped: Vec<Vec<i64>> = h
                .iter()
                .map(|r| {
                    let mut r = r.clone();
                    r.swap(j, k);
                    r
                })
                .collect();
            *cell = hnf(&swapped) == h;
        }
    }
    let mut search = Search {
        basis: &h,
        n,
        rank,
        swap_fixes,
        best: None,
    };
    let mut order = Vec::with_capacity(n);
    let mut remaining: Vec<usize> = (0..n).collect();
    search.dfs(&mut order, &mut remaining);
    let flat = search.best.expect("search visits at least one leaf");
    let lattice_basis = (0..rank)
        .map(|r| (0..n).map(|c| flat[c * rank + r]).collect())
        .collect();
    Ok(FormalCharacter {
        n,
        lattice_basis,
        perm_canonical: true,
    })
}

fn identity_rows(n: usize) -> Vec<Vec<i64>> {
    (0..n)
        .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
        .collect()
}

pub fn same_formal_character(a: &FormalCharacter, b: &FormalCharacter) -> Result<bool, FormcharError> {
    if a.n != b.n {
        return Err(FormcharError::DimensionMismatch(a.n, b.n));
    }
    Ok(a.canonicalized()?.lattice_basis == b.canonicalized()?.lattice_basis)
}

/// Every weight coordinate has absolute value at most `c`.
pub fn bounded_by(weights: &[Vec<i64>], c: u64) -> bool {
    weights
        .iter()
        .flatten()
        .all(|w| w.unsigned_abs() <= c)
}
