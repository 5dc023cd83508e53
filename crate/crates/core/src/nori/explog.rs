use crate::ff::{matrix, Field, Matrix, PrimeField};

use super::NoriError;

fn check_char(f: &PrimeField, n: usize) -> Result<(), NoriError> {
    if f.p() as usize <= n {
        return Err(NoriError::SmallCharacteristic { ell: f.p(), n });
    }
    Ok(())
}

fn is_nilpotent(f: &PrimeField, y: &Matrix<u64>) -> bool {
    matrix::is_zero(f, &matrix::pow(f, y, y.rows() as u128))
}

/// `log x = -Σ_{i=1}^{ℓ-1} (I - x)^i / i`; the series stops at `i = N - 1`
/// because `x - I` is nilpotent.
pub fn trunc_log(f: &PrimeField, x: &Matrix<u64>) -> Result<Matrix<u64>, NoriError> {
    let n = x.rows();
    check_char(f, n)?;
    let y = matrix::sub(f, x, &matrix::identity(f, n));
    if !is_nilpotent(f, &y) {
        return Err(NoriError::NotUnipotent);
    }
    let mut acc = matrix::zeros(f, n, n);
    let mut pow = y.clone();
    for i in 1..n.max(1) {
        // (-1)^{i+1} y^i / i
        let mut c = f.inv(&f.from_i64(i as i64)).expect("i < ℓ");
        if i % 2 == 0 {
            c = f.neg(&c);
        }
        acc = matrix::add(f, &acc, &matrix::scale(f, &pow, &c));
        pow = matrix::mul(f, &pow, &y);
    }
    Ok(acc)
}

/// `exp(t n) = Σ_{i<N} (t n)^i / i!`.
pub fn trunc_exp(f: &PrimeField, nil: &Matrix<u64>, t: u64) -> Result<Matrix<u64>, NoriError> {
    let n = nil.rows();
    check_char(f, n)?;
    if !is_nilpotent(f, nil) {
        return Err(NoriError::NotNilpotent);
    }
    let tn = matrix::scale(f, nil, &(t % f.p()));
    let mut acc = matrix::identity(f, n);
    let mut term = matrix::identity(f, n);
    for i in 1..n {
        let inv_i = f.inv(&f.from_i64(i as i64)).expect("i < ℓ");
        term = matrix::scale(f, &matrix::mul(f, &term, &tn), &inv_i);
        acc = matrix::add(f, &acc, &term);
    }
    Ok(acc)
}
