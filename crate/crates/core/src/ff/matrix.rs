//! Dense matrices and exact linear algebra over a field context.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::field::Field;
use super::poly::{self, Poly};

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Matrix<E> {
    rows: usize,
    cols: usize,
    data: Vec<E>,
}

impl<E: fmt::Debug> fmt::Debug for Matrix<E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", &self.data[r * self.cols..(r + 1) * self.cols])?;
        }
        write!(f, "]")
    }
}

impl<E: Clone> Matrix<E> {
    pub fn from_vec(rows: usize, cols: usize, data: Vec<E>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data length mismatch");
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<E>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        Self::from_vec(r, c, rows.into_iter().flatten().collect())
    }

    pub fn filled(rows: usize, cols: usize, v: E) -> Self {
        Self::from_vec(rows, cols, vec![v; rows * cols])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &E {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: E) {
        self.data[r * self.cols + c] = v;
    }

    pub fn data(&self) -> &[E] {
        &self.data
    }

    pub fn into_data(self) -> Vec<E> {
        self.data
    }

    pub fn row(&self, r: usize) -> &[E] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<E> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<E>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for c in 0..self.cols {
            for r in 0..self.rows {
                data.push(self.get(r, c).clone());
            }
        }
        Self::from_vec(self.cols, self.rows, data)
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(len: usize, cols: &[Vec<E>]) -> Self {
        let mut data = Vec::with_capacity(len * cols.len());
        for r in 0..len {
            for c in cols {
                data.push(c[r].clone());
            }
        }
        Self::from_vec(len, cols.len(), data)
    }

    pub fn map<T: Clone>(&self, g: impl Fn(&E) -> T) -> Matrix<T> {
        Matrix::from_vec(self.rows, self.cols, self.data.iter().map(g).collect())
    }
}

/// Serde adapter writing a matrix as a list of rows.
pub mod serde_rows {
    use serde::{de::Error, Deserialize, Deserializer, Serialize, Serializer};

    use super::Matrix;

    pub fn serialize<E: Clone + Serialize, S: Serializer>(m: &Matrix<E>, s: S) -> Result<S::Ok, S::Error> {
        m.to_rows().serialize(s)
    }

    pub fn deserialize<'de, E, D>(d: D) -> Result<Matrix<E>, D::Error>
    where
        E: Clone + Deserialize<'de>,
        D: Deserializer<'de>,
    {
        let rows: Vec<Vec<E>> = Vec::deserialize(d)?;
        let cols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != cols) {
            return Err(D::Error::custom("ragged matrix rows"));
        }
        Ok(Matrix::from_vec(rows.len(), cols, rows.into_iter().flatten().collect()))
    }
}

pub fn zeros<F: Field>(f: &F, rows: usize, cols: usize) -> Matrix<F::Elem> {
    Matrix::filled(rows, cols, f.zero())
}

pub fn identity<F: Field>(f: &F, n: usize) -> Matrix<F::Elem> {
    let mut m = zeros(f, n, n);
    for i in 0..n {
        m.set(i, i, f.one());
    }
    m
}

pub fn add<F: Field>(f: &F, a: &Matrix<F::Elem>, b: &Matrix<F::Elem>) -> Matrix<F::Elem> {
    assert_eq!((a.rows, a.cols), (b.rows, b.cols));
    Matrix::from_vec(
        a.rows,
        a.cols,
        a.data.iter().zip(&b.data).map(|(x, y)| f.add(x, y)).collect(),
    )
}

pub fn sub<F: Field>(f: &F, a: &Matrix<F::Elem>, b: &Matrix<F::Elem>) -> Matrix<F::Elem> {
    assert_eq!((a.rows, a.cols), (b.rows, b.cols));
    Matrix::from_vec(
        a.rows,
        a.cols,
        a.data.iter().zip(&b.data).map(|(x, y)| f.sub(x, y)).collect(),
    )
}

pub fn scale<F: Field>(f: &F, a: &Matrix<F::Elem>, c: &F::Elem) -> Matrix<F::Elem> {
    a.map(|x| f.mul(x, c))
}

pub fn mul<F: Field>(f: &F, a: &Matrix<F::Elem>, b: &Matrix<F::Elem>) -> Matrix<F::Elem> {
    assert_eq!(a.cols, b.rows, "shape mismatch in matrix product");
    let mut out = zeros(f, a.rows, b.cols);
    for i in 0..a.rows {
        for k in 0..a.cols {
            let x = a.get(i, k);
            if f.is_zero(x) {
                continue;
            }
            for j in 0..b.cols {
                let idx = i * b.cols + j;
                out.data[idx] = f.add(&out.data[idx], &f.mul(x, b.get(k, j)));
            }
        }
    }
    out
}

pub fn mul_vec<F: Field>(f: &F, a: &Matrix<F::Elem>, v: &[F::Elem]) -> Vec<F::Elem> {
    assert_eq!(a.cols, v.len());
    (0..a.rows)
        .map(|i| {
            a.row(i)
                .iter()
                .zip(v)
                .fold(f.zero(), |acc, (x, y)| f.add(&acc, &f.mul(x, y)))
        })
        .collect()
}

/// `[a, b] = ab - ba`.
pub fn bracket<F: Field>(f: &F, a: &Matrix<F::Elem>, b: &Matrix<F::Elem>) -> Matrix<F::Elem> {
    sub(f, &mul(f, a, b), &mul(f, b, a))
}

pub fn pow<F: Field>(f: &F, a: &Matrix<F::Elem>, mut e: u128) -> Matrix<F::Elem> {
    assert!(a.is_square());
    let mut acc = identity(f, a.rows);
    let mut base = a.clone();
    while e > 0 {
        if e & 1 == 1 {
            acc = mul(f, &acc, &base);
        }
        e >>= 1;
        if e > 0 {
            base = mul(f, &base, &base);
        }
    }
    acc
}

pub fn trace<F: Field>(f: &F, a: &Matrix<F::Elem>) -> F::Elem {
    (0..a.rows.min(a.cols)).fold(f.zero(), |acc, i| f.add(&acc, a.get(i, i)))
}

pub fn is_zero<F: Field>(f: &F, a: &Matrix<F::Elem>) -> bool {
    a.data.iter().all(|x| f.is_zero(x))
}

pub fn is_identity<F: Field>(f: &F, a: &Matrix<F::Elem>) -> bool {
    a.is_square()
        && (0..a.rows).all(|i| {
            (0..a.cols).all(|j| {
                if i == j {
                    f.is_one(a.get(i, j))
                } else {
                    f.is_zero(a.get(i, j))
                }
            })
        })
}

/// Reduced row echelon form and pivot columns.
pub fn rref<F: Field>(f: &F, a: &Matrix<F::Elem>) -> (Matrix<F::Elem>, Vec<usize>) {
    let mut m = a.clone();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..m.cols {
        if row == m.rows {
            break;
        }
        let Some(pr) = (row..m.rows).find(|&r| !f.is_zero(m.get(r, col))) else {
            continue;
        };
        if pr != row {
            for c in 0..m.cols {
                m.data.swap(pr * m.cols + c, row * m.cols + c);
            }
        }
        let inv = f.inv(m.get(row, col)).expect("nonzero pivot");
        for c in 0..m.cols {
            let v = f.mul(m.get(row, c), &inv);
            m.set(row, c, v);
        }
        for r in 0..m.rows {
            if r == row || f.is_zero(m.get(r, col)) {
                continue;
            }
            let factor = m.get(r, col).clone();
            for c in 0..m.cols {
                let v = f.sub(m.get(r, c), &f.mul(&factor, m.get(row, c)));
                m.set(r, c, v);
            }
        }
        pivots.push(col);
        row += 1;
    }
    (m, pivots)
}

pub fn rank<F: Field>(f: &F, a: &Matrix<F::Elem>) -> usize {
    rref(f, a).1.len()
}

/// Basis of the right null space `{v : a v = 0}`.
pub fn kernel<F: Field>(f: &F, a: &Matrix<F::Elem>) -> Vec<Vec<F::Elem>> {
    let (r, pivots) = rref(f, a);
    let free: Vec<usize> = (0..a.cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![f.zero(); a.cols];
            v[fc] = f.one();
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = f.neg(r.get(i, fc));
            }
            v
        })
        .collect()
}

pub fn inverse<F: Field>(f: &F, a: &Matrix<F::Elem>) -> Option<Matrix<F::Elem>> {
    assert!(a.is_square());
    let n = a.rows;
    let mut aug = zeros(f, n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            aug.set(i, j, a.get(i, j).clone());
        }
        aug.set(i, n + i, f.one());
    }
    let (r, pivots) = rref(f, &aug);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    let mut out = zeros(f, n, n);
    for i in 0..n {
        for j in 0..n {
            out.set(i, j, r.get(i, n + j).clone());
        }
    }
    Some(out)
}

pub fn determinant<F: Field>(f: &F, a: &Matrix<F::Elem>) -> F::Elem {
    assert!(a.is_square());
    let n = a.rows;
    let mut m = a.clone();
    let mut det = f.one();
    for col in 0..n {
        let Some(pr) = (col..n).find(|&r| !f.is_zero(m.get(r, col))) else {
            return f.zero();
        };
        if pr != col {
            for c in 0..n {
                m.data.swap(pr * n + c, col * n + c);
            }
            det = f.neg(&det);
        }
        let p = m.get(col, col).clone();
        det = f.mul(&det, &p);
        let pinv = f.inv(&p).expect("nonzero pivot");
        for r in col + 1..n {
            if f.is_zero(m.get(r, col)) {
                continue;
            }
            let factor = f.mul(m.get(r, col), &pinv);
            for c in col..n {
                let v = f.sub(m.get(r, c), &f.mul(&factor, m.get(col, c)));
                m.set(r, c, v);
            }
        }
    }
    det
}

/// Solve `a x = b` for a matrix `x`, `a` of full column rank. `None` if
/// some column of `b` is outside the column space of `a`.
pub fn solve<F: Field>(f: &F, a: &Matrix<F::Elem>, b: &Matrix<F::Elem>) -> Option<Matrix<F::Elem>> {
    assert_eq!(a.rows, b.rows);
    let (n, k) = (a.cols, b.cols);
    let mut aug = zeros(f, a.rows, n + k);
    for i in 0..a.rows {
        for j in 0..n {
            aug.set(i, j, a.get(i, j).clone());
        }
        for j in 0..k {
            aug.set(i, n + j, b.get(i, j).clone());
        }
    }
    let (r, pivots) = rref(f, &aug);
    if pivots.iter().any(|&p| p >= n) || pivots.len() < n {
        return None;
    }
    let mut x = zeros(f, n, k);
    for (i, &pc) in pivots.iter().enumerate() {
        for j in 0..k {
            x.set(pc, j, r.get(i, n + j).clone());
        }
    }
    Some(x)
}

/// Characteristic polynomial `det(xI - a)`, monic, low degree first.
///
/// Reduction to upper Hessenberg form followed by the standard recurrence;
/// uses only field operations, so it is exact in every characteristic.
pub fn char_poly<F: Field>(f: &F, a: &Matrix<F::Elem>) -> Poly<F::Elem> {
    assert!(a.is_square(), "characteristic polynomial of a non-square matrix");
    let n = a.rows;
    let mut h = a.clone();
    for m in 1..n.saturating_sub(1) {
        let Some(i) = (m..n).find(|&i| !f.is_zero(h.get(i, m - 1))) else {
            continue;
        };
        if i != m {
            for c in 0..n {
                h.data.swap(i * n + c, m * n + c);
            }
            for r in 0..n {
                h.data.swap(r * n + i, r * n + m);
            }
        }
        let pinv = f.inv(h.get(m, m - 1)).expect("nonzero pivot");
        for i in m + 1..n {
            if f.is_zero(h.get(i, m - 1)) {
                continue;
            }
            let u = f.mul(h.get(i, m - 1), &pinv);
            for c in 0..n {
                let v = f.sub(h.get(i, c), &f.mul(&u, h.get(m, c)));
                h.set(i, c, v);
            }
            for r in 0..n {
                let v = f.add(h.get(r, m), &f.mul(&u, h.get(r, i)));
                h.set(r, m, v);
            }
        }
    }
    // p_0 = 1; p_{m+1} = (x - h_mm) p_m - sum_{i<m} h_im (prod_{j=i+1..m} h_{j,j-1}) p_i
    let mut ps: Vec<Poly<F::Elem>> = vec![vec![f.one()]];
    for m in 0..n {
        let lin = vec![f.neg(h.get(m, m)), f.one()];
        let mut next = poly::mul(f, &lin, &ps[m]);
        let mut t = f.one();
        for i in (0..m).rev() {
            t = f.mul(&t, h.get(i + 1, i));
            let c = f.mul(h.get(i, m), &t);
            next = poly::sub(f, &next, &poly::scale(f, &ps[i], &c));
        }
        ps.push(next);
    }
    ps.pop().unwrap()
}

/// Embed a matrix into another field entrywise.
pub fn embed<E: Clone, T: Clone>(a: &Matrix<E>, g: impl Fn(&E) -> T) -> Matrix<T> {
    a.map(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::PrimeField;

    fn m(f: &PrimeField, rows: Vec<Vec<i64>>) -> Matrix<u64> {
        Matrix::from_rows(rows.into_iter().map(|r| r.into_iter().map(|x| f.reduce_i64(x)).collect()).collect())
    }

    #[test]
    fn inverse_and_det() {
        let f = PrimeField::new(7);
        let a = m(&f, vec![vec![1, 2], vec![3, 4]]);
        let ai = inverse(&f, &a).unwrap();
        assert!(is_identity(&f, &mul(&f, &a, &ai)));
        assert_eq!(determinant(&f, &a), f.reduce_i64(-2));
        let s = m(&f, vec![vec![1, 2], vec![2, 4]]);
        assert!(inverse(&f, &s).is_none());
        assert_eq!(determinant(&f, &s), 0);
    }

    #[test]
    fn kernel_is_annihilated() {
        let f = PrimeField::new(11);
        let a = m(&f, vec![vec![1, 2, 3, 4], vec![2, 4, 6, 8], vec![0, 1, 1, 0]]);
        let k = kernel(&f, &a);
        assert_eq!(k.len(), 2);
        for v in k {
            assert!(mul_vec(&f, &a, &v).iter().all(|x| *x == 0));
        }
    }

    #[test]
    fn char_poly_matches_determinant_oracle() {
        let f = PrimeField::new(13);
        let a = m(&f, vec![vec![2, 7, 1, 0], vec![5, 3, 3, 9], vec![11, 0, 4, 2], vec![1, 1, 8, 6]]);
        let cp = char_poly(&f, &a);
        assert_eq!(cp.len(), 5);
        // det(tI - a) at every t equals cp(t)
        for t in 0..13 {
            let ti = scale(&f, &identity(&f, 4), &t);
            let d = determinant(&f, &sub(&f, &ti, &a));
            assert_eq!(poly::eval(&f, &cp, &t), d);
        }
    }

    #[test]
    fn solve_recovers() {
        let f = PrimeField::new(7);
        let a = m(&f, vec![vec![1, 0], vec![2, 1], vec![0, 3]]);
        let x = m(&f, vec![vec![4], vec![5]]);
        let b = mul(&f, &a, &x);
        assert_eq!(solve(&f, &a, &b).unwrap(), x);
        let bad = m(&f, vec![vec![1], vec![0], vec![0]]);
        assert!(solve(&f, &a, &bad).is_none());
    }
}
