//! Dense exact linear algebra over a [`Field`].

use super::field::{Fe, Field};
use crate::error::{Error, Result};

pub const DEFAULT_ENUM_CAP: u128 = 1 << 24;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Fe>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Matrix {
        Matrix { rows, cols, data: vec![Fe::ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Matrix {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Fe::ONE);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Fe>], cols: usize) -> Matrix {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend_from_slice(r);
        }
        Matrix { rows: rows.len(), cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Fe {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Fe) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Fe] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [Fe] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<Fe>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn column(&self, c: usize) -> Vec<Fe> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    pub fn mul_vec(&self, f: &Field, v: &[Fe]) -> Vec<Fe> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows).map(|r| f.dot(self.row(r), v)).collect()
    }

    /// Row vector times matrix.
    pub fn vec_mul(&self, f: &Field, v: &[Fe]) -> Vec<Fe> {
        assert_eq!(v.len(), self.rows);
        let mut out = vec![Fe::ZERO; self.cols];
        for (r, &a) in v.iter().enumerate() {
            f.axpy(&mut out, a, self.row(r));
        }
        out
    }

    pub fn mul(&self, f: &Field, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows);
        let mut out = Matrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            let row = other.vec_mul(f, self.row(r));
            out.row_mut(r).copy_from_slice(&row);
        }
        out
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    /// dst_row += a * src_row, touching only columns from `start`.
    fn row_axpy(&mut self, f: &Field, dst: usize, a: Fe, src: usize, start: usize) {
        let cols = self.cols;
        let (lo, hi) = if dst < src { (dst, src) } else { (src, dst) };
        let (first, second) = self.data.split_at_mut(hi * cols);
        let lo_row = &mut first[lo * cols..(lo + 1) * cols];
        let hi_row = &mut second[..cols];
        if dst < src {
            f.axpy(&mut lo_row[start..], a, &hi_row[start..]);
        } else {
            f.axpy(&mut hi_row[start..], a, &lo_row[start..]);
        }
    }
}

#[derive(Clone, Debug)]
pub struct Rref {
    pub matrix: Matrix,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

/// Reduced row-echelon form by Gauss-Jordan elimination.
pub fn rref(f: &Field, m: &Matrix) -> Rref {
    let mut a = m.clone();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..a.cols {
        if row == a.rows {
            break;
        }
        let Some(pr) = (row..a.rows).find(|&r| !a.get(r, col).is_zero()) else {
            continue;
        };
        a.swap_rows(row, pr);
        let inv = f.inv(a.get(row, col));
        f.scale(&mut a.row_mut(row)[col..], inv);
        for r in 0..a.rows {
            if r != row {
                let factor = a.get(r, col);
                if !factor.is_zero() {
                    a.row_axpy(f, r, f.neg(factor), row, col);
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    Rref { rank: pivots.len(), matrix: a, pivots }
}

/// Nullspace basis: one vector per free column (that column set to 1, other free columns 0),
/// in increasing order of the free column.
pub fn nullspace(f: &Field, m: &Matrix) -> Vec<Vec<Fe>> {
    let red = rref(f, m);
    nullspace_from_rref(f, &red, m.cols())
}

pub fn nullspace_from_rref(f: &Field, red: &Rref, cols: usize) -> Vec<Vec<Fe>> {
    let mut is_pivot = vec![false; cols];
    for &p in &red.pivots {
        is_pivot[p] = true;
    }
    (0..cols)
        .filter(|&c| !is_pivot[c])
        .map(|free| {
            let mut v = vec![Fe::ZERO; cols];
            v[free] = Fe::ONE;
            for (i, &p) in red.pivots.iter().enumerate() {
                v[p] = f.neg(red.matrix.get(i, free));
            }
            v
        })
        .collect()
}

/// Nullspace vector for the first free column, if any.
pub fn first_null_vector(f: &Field, m: &Matrix) -> Option<Vec<Fe>> {
    let red = rref(f, m);
    let mut is_pivot = vec![false; m.cols()];
    for &p in &red.pivots {
        is_pivot[p] = true;
    }
    let free = (0..m.cols()).find(|&c| !is_pivot[c])?;
    let mut v = vec![Fe::ZERO; m.cols()];
    v[free] = Fe::ONE;
    for (i, &p) in red.pivots.iter().enumerate() {
        v[p] = f.neg(red.matrix.get(i, free));
    }
    Some(v)
}

/// All solutions of M x = rhs, or None when inconsistent.
pub fn affine_solutions(f: &Field, m: &Matrix, rhs: &[Fe]) -> Option<AffineSpace> {
    assert_eq!(rhs.len(), m.rows());
    let cols = m.cols();
    let mut aug = Matrix::zeros(m.rows(), cols + 1);
    for r in 0..m.rows() {
        aug.row_mut(r)[..cols].copy_from_slice(m.row(r));
        aug.set(r, cols, rhs[r]);
    }
    let red = rref(f, &aug);
    if red.pivots.last() == Some(&cols) {
        return None;
    }
    let mut offset = vec![Fe::ZERO; cols];
    for (i, &p) in red.pivots.iter().enumerate() {
        offset[p] = red.matrix.get(i, cols);
    }
    let mut is_pivot = vec![false; cols];
    for &p in &red.pivots {
        is_pivot[p] = true;
    }
    let basis: Vec<Vec<Fe>> = (0..cols)
        .filter(|&c| !is_pivot[c])
        .map(|free| {
            let mut v = vec![Fe::ZERO; cols];
            v[free] = Fe::ONE;
            for (i, &p) in red.pivots.iter().enumerate() {
                v[p] = f.neg(red.matrix.get(i, free));
            }
            v
        })
        .collect();
    Some(AffineSpace::new(f, offset, basis))
}

pub fn rank(f: &Field, m: &Matrix) -> usize {
    rref(f, m).rank
}

/// offset + span(basis); the basis is kept in reduced row-echelon form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineSpace {
    offset: Vec<Fe>,
    basis: Vec<Vec<Fe>>,
    pivots: Vec<usize>,
}

impl AffineSpace {
    /// Spans the given vectors (dependent ones are dropped).
    pub fn new(f: &Field, offset: Vec<Fe>, vectors: Vec<Vec<Fe>>) -> AffineSpace {
        let n = offset.len();
        if vectors.is_empty() {
            return AffineSpace { offset, basis: Vec::new(), pivots: Vec::new() };
        }
        let red = rref(f, &Matrix::from_rows(&vectors, n));
        let basis: Vec<Vec<Fe>> = (0..red.rank).map(|r| red.matrix.row(r).to_vec()).collect();
        let mut s = AffineSpace { offset, basis, pivots: red.pivots };
        s.offset = s.reduce(f, &s.offset.clone());
        s
    }

    pub fn point(offset: Vec<Fe>) -> AffineSpace {
        AffineSpace { offset, basis: Vec::new(), pivots: Vec::new() }
    }

    pub fn ambient_dim(&self) -> usize {
        self.offset.len()
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn offset(&self) -> &[Fe] {
        &self.offset
    }

    pub fn basis(&self) -> &[Vec<Fe>] {
        &self.basis
    }

    fn reduce(&self, f: &Field, v: &[Fe]) -> Vec<Fe> {
        let mut r = v.to_vec();
        for (b, &p) in self.basis.iter().zip(&self.pivots) {
            let c = r[p];
            if !c.is_zero() {
                f.axpy(&mut r, f.neg(c), b);
            }
        }
        r
    }

    pub fn contains(&self, f: &Field, y: &[Fe]) -> bool {
        if y.len() != self.offset.len() {
            return false;
        }
        let d = f.sub_vec(y, &self.offset);
        self.reduce(f, &d).iter().all(|c| c.is_zero())
    }

    pub fn count(&self, f: &Field) -> u128 {
        (f.size() as u128).checked_pow(self.dim() as u32).unwrap_or(u128::MAX)
    }

    /// Every point, in the order of the base-q counter over basis coefficients.
    pub fn enumerate<'a>(&'a self, f: &'a Field, cap: u128) -> Result<impl Iterator<Item = Vec<Fe>> + 'a> {
        let count = self.count(f);
        if count > cap {
            return Err(Error::CapExceeded { count, cap });
        }
        let q = f.size() as u128;
        Ok((0..count).map(move |mut idx| {
            let mut v = self.offset.clone();
            for b in &self.basis {
                let c = Fe((idx % q) as u16);
                idx /= q;
                f.axpy(&mut v, c, b);
            }
            v
        }))
    }
}
