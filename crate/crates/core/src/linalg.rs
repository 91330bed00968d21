//! Exact dense linear algebra over the rationals.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::scalar::Rational;

pub(crate) type Vector = Vec<Rational>;

/// Reduced row echelon form; returns the nonzero rows and their pivot
/// columns.
pub(crate) fn rref(mut rows: Vec<Vector>, ncols: usize) -> (Vec<Vector>, Vec<usize>) {
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][col].recip();
        for v in rows[r].iter_mut() {
            *v *= &inv;
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[col].is_zero() {
                continue;
            }
            let factor = row[col].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                if !y.is_zero() {
                    *x -= &factor * y;
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    rows.truncate(r);
    (rows, pivots)
}

/// Basis of `{v : rows · v = 0}`; each basis vector has one free variable set
/// to 1 and the others to 0, in increasing free-column order.
pub(crate) fn nullspace(rows: Vec<Vector>, ncols: usize) -> Vec<Vector> {
    let (red, pivots) = rref(rows, ncols);
    let mut out = Vec::new();
    let mut is_pivot = vec![false; ncols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    for free in (0..ncols).filter(|&c| !is_pivot[c]) {
        let mut v = vec![Rational::zero(); ncols];
        v[free] = Rational::one();
        for (row, &p) in red.iter().zip(&pivots) {
            v[p] = -row[free].clone();
        }
        out.push(v);
    }
    out
}

/// A solution of `rows · v = rhs` with every free variable zero.
pub(crate) fn solve(rows: &[Vector], rhs: &[Rational], ncols: usize) -> Option<Vector> {
    let aug: Vec<Vector> = rows
        .iter()
        .zip(rhs)
        .map(|(r, b)| {
            let mut r = r.clone();
            r.push(b.clone());
            r
        })
        .collect();
    let (red, pivots) = rref(aug, ncols + 1);
    if pivots.last() == Some(&ncols) {
        return None;
    }
    let mut v = vec![Rational::zero(); ncols];
    for (row, &p) in red.iter().zip(&pivots) {
        v[p] = row[ncols].clone();
    }
    Some(v)
}

/// Inverse of a square matrix.
pub(crate) fn inverse(m: &[Vector]) -> Option<Vec<Vector>> {
    let n = m.len();
    let aug: Vec<Vector> = m
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut r = r.clone();
            r.extend((0..n).map(|j| {
                if i == j {
                    Rational::one()
                } else {
                    Rational::zero()
                }
            }));
            r
        })
        .collect();
    let (red, pivots) = rref(aug, 2 * n);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(red.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Incrementally maintained span, for closure computations.
pub(crate) struct Span {
    ncols: usize,
    rows: Vec<Vector>,
    pivots: Vec<usize>,
}

impl Span {
    pub(crate) fn new(ncols: usize) -> Self {
        Span {
            ncols,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    #[cfg(test)]
    pub(crate) fn dim(&self) -> usize {
        self.rows.len()
    }

    fn reduce(&self, v: &[Rational]) -> Vector {
        let mut v = v.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if !v[p].is_zero() {
                let f = v[p].clone();
                for (x, y) in v.iter_mut().zip(row) {
                    if !y.is_zero() {
                        *x -= &f * y;
                    }
                }
            }
        }
        v
    }

    #[cfg(test)]
    pub(crate) fn contains(&self, v: &[Rational]) -> bool {
        self.reduce(v).iter().all(Zero::is_zero)
    }

    /// Adds `v`; returns whether the span grew.
    pub(crate) fn insert(&mut self, v: &[Rational]) -> bool {
        let r = self.reduce(v);
        if r.iter().all(Zero::is_zero) {
            return false;
        }
        let mut rows = core::mem::take(&mut self.rows);
        rows.push(r);
        let (rows, pivots) = rref(rows, self.ncols);
        self.rows = rows;
        self.pivots = pivots;
        true
    }
}
