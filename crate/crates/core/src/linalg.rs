//! Exact linear algebra over the rationals.

use alloc::vec::Vec;

use crate::scalar::Scalar;

pub type Matrix = Vec<Vec<Scalar>>;

/// Reduced row echelon form and pivot columns.
pub fn rref(mut m: Matrix) -> (Matrix, Vec<usize>) {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = m[r][c].recip().unwrap();
        for x in m[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in c..cols {
                    let d = &f * &m[r][j];
                    m[i][j] -= &d;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (m, pivots)
}

pub fn rank(m: &Matrix) -> usize {
    rref(m.clone()).1.len()
}

/// Linearly independent subset of `vectors` spanning the same space.
pub fn independent_subset(vectors: &[Vec<Scalar>]) -> Vec<usize> {
    if vectors.is_empty() {
        return Vec::new();
    }
    rref(transpose(vectors)).1
}

pub fn transpose(m: &[Vec<Scalar>]) -> Matrix {
    let cols = m.first().map_or(0, |r| r.len());
    (0..cols).map(|j| m.iter().map(|row| row[j].clone()).collect()).collect()
}

/// Coordinates of `v` in the span of `basis`, if it lies there.
pub fn solve(basis: &[Vec<Scalar>], v: &[Scalar]) -> Option<Vec<Scalar>> {
    let k = basis.len();
    let mut aug = transpose(basis);
    for (row, x) in aug.iter_mut().zip(v) {
        row.push(x.clone());
    }
    if aug.is_empty() {
        return Some(Vec::new());
    }
    let (red, pivots) = rref(aug);
    if pivots.last() == Some(&k) {
        return None;
    }
    let mut out = alloc::vec![Scalar::zero(); k];
    for (i, &p) in pivots.iter().enumerate() {
        out[p] = red[i][k].clone();
    }
    Some(out)
}

/// Basis of `{x : m x = 0}`.
pub fn nullspace(m: &Matrix) -> Vec<Vec<Scalar>> {
    let cols = m.first().map_or(0, |r| r.len());
    let (red, pivots) = rref(m.clone());
    let mut out = Vec::new();
    for free in (0..cols).filter(|c| !pivots.contains(c)) {
        let mut x = alloc::vec![Scalar::zero(); cols];
        x[free] = Scalar::one();
        for (i, &p) in pivots.iter().enumerate() {
            x[p] = -&red[i][free];
        }
        out.push(x);
    }
    out
}

pub fn mat_vec(m: &Matrix, v: &[Scalar]) -> Vec<Scalar> {
    m.iter().map(|row| row.iter().zip(v).filter(|(a, _)| !a.is_zero()).map(|(a, b)| a * b).sum()).collect()
}

pub fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let bt = transpose(b);
    a.iter().map(|row| bt.iter().map(|col| row.iter().zip(col).map(|(x, y)| x * y).sum()).collect()).collect()
}
