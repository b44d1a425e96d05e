//! Dense exact matrices as row vectors.

use super::scalar::{q, Coeff, Rational};
use crate::error::{Error, Result};

pub type Matrix<S = Rational> = Vec<Vec<S>>;

pub fn identity<S: Coeff>(n: usize) -> Matrix<S> {
    (0..n).map(|i| (0..n).map(|j| if i == j { S::one() } else { S::zero() }).collect()).collect()
}

pub fn mat_mul<S: Coeff>(a: &Matrix<S>, b: &Matrix<S>) -> Result<Matrix<S>> {
    let inner = b.len();
    if a.iter().any(|r| r.len() != inner) {
        return Err(Error::SizeMismatch("matrix product shapes".into()));
    }
    let cols = b.first().map_or(0, |r| r.len());
    Ok(a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| row.iter().zip(b).fold(S::zero(), |acc, (x, brow)| acc.add(&x.mul(&brow[j]))))
                .collect()
        })
        .collect())
}

pub fn mat_vec<S: Coeff>(a: &Matrix<S>, v: &[S]) -> Vec<S> {
    a.iter().map(|row| row.iter().zip(v).fold(S::zero(), |acc, (x, y)| acc.add(&x.mul(y)))).collect()
}

pub fn lift_matrix<S: Coeff>(a: &Matrix) -> Matrix<S> {
    a.iter().map(|r| r.iter().map(S::from_rational).collect()).collect()
}

/// Gauss-Jordan inverse; fails on singular input.
pub fn inverse(a: &Matrix) -> Result<Matrix> {
    let n = a.len();
    if a.iter().any(|r| r.len() != n) {
        return Err(Error::SizeMismatch("inverse of a non-square matrix".into()));
    }
    let mut m: Vec<Vec<Rational>> = a
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { q(1) } else { q(0) }));
            row
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !Coeff::is_zero(&m[r][col])).ok_or(Error::SingularMatrix)?;
        m.swap(col, pivot);
        let p = m[col][col].clone();
        for x in m[col].iter_mut() {
            *x /= p.clone();
        }
        for r in 0..n {
            if r != col && !Coeff::is_zero(&m[r][col]) {
                let f = m[r][col].clone();
                let pivot_row = m[col].clone();
                for (x, y) in m[r].iter_mut().zip(pivot_row) {
                    *x -= f.clone() * y;
                }
            }
        }
    }
    Ok(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn determinant(a: &Matrix) -> Result<Rational> {
    let n = a.len();
    let mut m = a.clone();
    let mut det = q(1);
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&r| !Coeff::is_zero(&m[r][col])) else { return Ok(q(0)) };
        if pivot != col {
            m.swap(col, pivot);
            det = -det;
        }
        let p = m[col][col].clone();
        det *= p.clone();
        for r in col + 1..n {
            let f = m[r][col].clone() / p.clone();
            let pivot_row = m[col].clone();
            for (x, y) in m[r].iter_mut().zip(pivot_row) {
                *x -= f.clone() * y;
            }
        }
    }
    Ok(det)
}
