use serde::{Deserialize, Serialize};

use crate::ff::{matrix, Field, Matrix, PrimeField};

/// Incrementally maintained echelon basis of a subspace of `GF(ℓ)^m`.
/// Each stored row is monic at its pivot and zero at every other pivot.
#[derive(Clone, Debug)]
pub(crate) struct Span {
    f: PrimeField,
    len: usize,
    rows: Vec<Vec<u64>>,
    pivots: Vec<usize>,
}

impl Span {
    pub(crate) fn new(f: PrimeField, len: usize) -> Self {
        Self {
            f,
            len,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    fn reduce(&self, v: &mut [u64]) {
        let f = &self.f;
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            let c = v[p];
            if c != 0 {
                for (x, r) in v.iter_mut().zip(row) {
                    *x = f.sub(x, &f.mul(&c, r));
                }
            }
        }
    }

    /// Adds `v`; returns whether the span grew.
    pub(crate) fn insert(&mut self, v: &[u64]) -> bool {
        assert_eq!(v.len(), self.len);
        let f = self.f;
        let mut w = v.to_vec();
        self.reduce(&mut w);
        let Some(p) = w.iter().position(|x| *x != 0) else {
            return false;
        };
        let inv = f.inv(&w[p]).expect("nonzero");
        for x in w.iter_mut() {
            *x = f.mul(x, &inv);
        }
        for row in self.rows.iter_mut() {
            let c = row[p];
            if c != 0 {
                for (x, y) in row.iter_mut().zip(&w) {
                    *x = f.sub(x, &f.mul(&c, y));
                }
            }
        }
        self.rows.push(w);
        self.pivots.push(p);
        true
    }

    /// Rows sorted by pivot: the reduced row echelon basis.
    pub(crate) fn echelon(&self) -> (Vec<Vec<u64>>, Vec<usize>) {
        let mut idx: Vec<usize> = (0..self.rows.len()).collect();
        idx.sort_by_key(|&i| self.pivots[i]);
        (
            idx.iter().map(|&i| self.rows[i].clone()).collect(),
            idx.iter().map(|&i| self.pivots[i]).collect(),
        )
    }
}

/// A matrix Lie subalgebra of `gl_N(GF(ℓ))`.
///
/// The basis is the reduced row echelon basis of the flattened (row-major)
/// matrices, so the coordinates of a member are its entries at the pivot
/// positions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LieSubalgebra {
    pub ambient_dim: usize,
    pub ell: u64,
    pub basis: Vec<Matrix<u64>>,
    pivots: Vec<usize>,
}

impl LieSubalgebra {
    pub(crate) fn from_span(ambient_dim: usize, span: &Span) -> Self {
        let (rows, pivots) = span.echelon();
        Self {
            ambient_dim,
            ell: span.f.p(),
            basis: rows
                .into_iter()
                .map(|r| Matrix::from_vec(ambient_dim, ambient_dim, r))
                .collect(),
            pivots,
        }
    }

    pub fn zero(ambient_dim: usize, ell: u64) -> Self {
        Self {
            ambient_dim,
            ell,
            basis: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn field(&self) -> PrimeField {
        PrimeField::new(self.ell)
    }

    /// Coordinates of a member in the basis (not checked for membership).
    pub fn coords(&self, m: &Matrix<u64>) -> Vec<u64> {
        self.pivots.iter().map(|&p| m.data()[p]).collect()
    }

    pub fn contains(&self, m: &Matrix<u64>) -> bool {
        let f = self.field();
        let c = self.coords(m);
        matrix::sub(&f, m, &self.element(&c)) == matrix::zeros(&f, self.ambient_dim, self.ambient_dim)
    }

    pub fn element(&self, coords: &[u64]) -> Matrix<u64> {
        let f = self.field();
        let n = self.ambient_dim;
        let mut acc = matrix::zeros(&f, n, n);
        for (c, b) in coords.iter().zip(&self.basis) {
            if *c != 0 {
                acc = matrix::add(&f, &acc, &matrix::scale(&f, b, c));
            }
        }
        acc
    }

    /// `c[i][j]` = coordinates of `[b_i, b_j]`.
    pub fn structure_constants(&self) -> Vec<Vec<Vec<u64>>> {
        let f = self.field();
        let d = self.dim();
        let mut c = vec![vec![vec![0u64; d]; d]; d];
        for i in 0..d {
            for j in i + 1..d {
                let br = self.coords(&matrix::bracket(&f, &self.basis[i], &self.basis[j]));
                c[j][i] = br.iter().map(|x| f.neg(x)).collect();
                c[i][j] = br;
            }
        }
        c
    }

    /// `ad(b_i)` as a `d × d` matrix acting on coordinate columns.
    pub fn ad_matrices(&self) -> Vec<Matrix<u64>> {
        let c = self.structure_constants();
        let d = self.dim();
        (0..d)
            .map(|i| {
                let cols: Vec<Vec<u64>> = (0..d).map(|j| c[i][j].clone()).collect();
                Matrix::from_columns(d, &cols)
            })
            .collect()
    }

    pub fn killing_form(&self) -> Matrix<u64> {
        let f = self.field();
        let ads = self.ad_matrices();
        let d = self.dim();
        let mut k = matrix::zeros(&f, d, d);
        for i in 0..d {
            for j in i..d {
                let t = matrix::trace(&f, &matrix::mul(&f, &ads[i], &ads[j]));
                k.set(i, j, t);
                k.set(j, i, t);
            }
        }
        k
    }

    pub fn is_bracket_closed(&self) -> bool {
        let f = self.field();
        self.basis.iter().enumerate().all(|(i, a)| {
            self.basis[i + 1..]
                .iter()
                .all(|b| self.contains(&matrix::bracket(&f, a, b)))
        })
    }
}

/// Smallest bracket-closed subspace containing `gens`.
pub fn lie_closure(f: &PrimeField, n: usize, gens: &[Matrix<u64>]) -> LieSubalgebra {
    let mut span = Span::new(*f, n * n);
    let mut basis: Vec<Matrix<u64>> = Vec::new();
    for g in gens {
        if span.insert(g.data()) {
            basis.push(g.clone());
        }
    }
    saturate(f, &mut span, &mut basis);
    LieSubalgebra::from_span(n, &span)
}

pub(crate) fn saturate(f: &PrimeField, span: &mut Span, basis: &mut Vec<Matrix<u64>>) {
    let mut i = 0;
    while i < basis.len() {
        for j in 0..i {
            let br = matrix::bracket(f, &basis[i], &basis[j]);
            if span.insert(br.data()) {
                basis.push(br);
            }
        }
        i += 1;
    }
}
