//! Simultaneous eigenspaces and integer weights of the ambient representation.

use serde::{Deserialize, Serialize};

use crate::ff::{matrix, poly, ExtElem, ExtField, FiniteField, Matrix};

use super::NoriError;

/// Joint eigenspaces of commuting operators on `F^dim`. Each entry is the
/// tuple of eigenvalues and a basis (as columns). Entries are ordered by the
/// canonical index of the eigenvalue tuple.
pub fn joint_eigenspaces<F: FiniteField>(
    f: &F,
    ops: &[Matrix<F::Elem>],
    dim: usize,
) -> Result<Vec<(Vec<F::Elem>, Matrix<F::Elem>)>, NoriError> {
    if dim == 0 {
        return Ok(Vec::new());
    }
    let mut spaces = vec![(Vec::new(), matrix::identity(f, dim))];
    for a in ops {
        let mut next = Vec::new();
        for (vals, b) in spaces {
            let k = b.cols();
            let ab = matrix::mul(f, a, &b);
            let r = matrix::solve(f, &b, &ab).ok_or(NoriError::NotDiagonalizable)?;
            let cp = matrix::char_poly(f, &r);
            let roots = poly::roots_with_multiplicity(f, &cp);
            if roots.iter().map(|(_, m)| m).sum::<usize>() != k {
                return Err(NoriError::NotDiagonalizable);
            }
            for (lambda, mult) in roots {
                let shifted = matrix::sub(f, &r, &matrix::scale(f, &matrix::identity(f, k), &lambda));
                let ker = matrix::kernel(f, &shifted);
                if ker.len() != mult {
                    return Err(NoriError::NotDiagonalizable);
                }
                let sub = matrix::mul(f, &b, &Matrix::from_columns(k, &ker));
                let mut v = vals.clone();
                v.push(lambda);
                next.push((v, sub));
            }
        }
        spaces = next;
    }
    spaces.sort_by(|x, y| {
        let kx: Vec<u128> = x.0.iter().map(|e| f.index_of(e)).collect();
        let ky: Vec<u128> = y.0.iter().map(|e| f.index_of(e)).collect();
        kx.cmp(&ky)
    });
    Ok(spaces)
}

/// Weights of the ambient representation in simple-coroot coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightData {
    pub n: usize,
    /// `r × N`: column `j` is the weight of the `j`-th eigenvector.
    pub weights: Vec<Vec<i64>>,
    /// Eigenvectors as the columns of an `N × N` matrix over the splitting
    /// field, in the column order of `weights`.
    #[serde(skip)]
    pub eigenbasis: Option<Matrix<ExtElem>>,
}

impl WeightData {
    pub fn rank(&self) -> usize {
        self.weights.len()
    }

    pub fn column(&self, j: usize) -> Vec<i64> {
        self.weights.iter().map(|row| row[j]).collect()
    }
}

/// Symmetric lift of an eigenvalue that must lie in the prime field.
pub(crate) fn lift_eigenvalue(e: &ExtField, v: &ExtElem, bound: i64) -> Result<i64, NoriError> {
    let p = e
        .prime_value(v)
        .ok_or_else(|| NoriError::RootSystem("coroot eigenvalue outside the prime field".into()))?;
    let z = e.base().lift_symmetric(p);
    if z.abs() > bound {
        return Err(NoriError::WeightBound { value: z, bound });
    }
    Ok(z)
}

/// Diagonalizes the simple coroots on `E^N` and lifts their eigenvalues to
/// integers. Columns are sorted in descending lexicographic order.
pub fn weights_on_ambient(
    e: &ExtField,
    coroots: &[Matrix<ExtElem>],
    n: usize,
    bound: i64,
) -> Result<WeightData, NoriError> {
    let spaces = joint_eigenspaces(e, coroots, n)?;
    let mut cols: Vec<(Vec<i64>, Vec<ExtElem>)> = Vec::with_capacity(n);
    for (vals, basis) in &spaces {
        let w: Vec<i64> = vals
            .iter()
            .map(|v| lift_eigenvalue(e, v, bound))
            .collect::<Result<_, _>>()?;
        for c in 0..basis.cols() {
            cols.push((w.clone(), basis.column(c)));
        }
    }
    cols.sort_by(|a, b| b.0.cmp(&a.0));
    let r = coroots.len();
    let weights = (0..r).map(|i| cols.iter().map(|(w, _)| w[i]).collect()).collect();
    let vecs: Vec<Vec<ExtElem>> = cols.into_iter().map(|(_, v)| v).collect();
    Ok(WeightData {
        n,
        weights,
        eigenbasis: Some(Matrix::from_columns(n, &vecs)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::{ext_field, PrimeField};

    #[test]
    fn eigenspaces_of_commuting_diagonal_pair() {
        let f = PrimeField::new(7);
        let a = Matrix::from_rows(vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 2]]);
        let b = Matrix::from_rows(vec![vec![3, 0, 0], vec![0, 4, 0], vec![0, 0, 3]]);
        let s = joint_eigenspaces(&f, &[a, b], 3).unwrap();
        assert_eq!(s.len(), 3);
        assert!(s.iter().all(|(_, m)| m.cols() == 1));
        let nil = Matrix::from_rows(vec![vec![0, 1], vec![0, 0]]);
        assert_eq!(joint_eigenspaces(&f, &[nil], 2).unwrap_err(), NoriError::NotDiagonalizable);
    }

    #[test]
    fn sym2_weights() {
        let e = ExtField::new(ext_field(11, 1).unwrap());
        let h = Matrix::from_rows(vec![vec![2, 0, 0], vec![0, 0, 0], vec![0, 0, 9]]).map(|x| e.embed(*x));
        let w = weights_on_ambient(&e, &[h.clone()], 3, 3).unwrap();
        assert_eq!(w.weights, vec![vec![2, 0, -2]]);
        assert_eq!(
            weights_on_ambient(&e, &[h], 3, 1).unwrap_err(),
            NoriError::WeightBound { value: 2, bound: 1 }
        );
    }
}
