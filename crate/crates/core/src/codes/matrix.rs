//! Dense matrices over F_q and Gaussian elimination.
//!
//! Elimination always takes the lowest-index nonzero row as pivot, so every
//! derived object (kernels, pseudo-inverses, coset representatives) is
//! reproducible bit for bit.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::bits::BitMatrix;
use super::kernels;
use crate::error::{Error, Result};
use crate::gf::{Elem, FiniteField};

/// Row-major matrix of field element indices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "Vec<Vec<Elem>>", try_from = "Vec<Vec<Elem>>")]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Elem>,
}

impl From<Matrix> for Vec<Vec<Elem>> {
    fn from(m: Matrix) -> Self {
        (0..m.rows).map(|r| m.row(r).to_vec()).collect()
    }
}

impl TryFrom<Vec<Vec<Elem>>> for Matrix {
    type Error = Error;
    fn try_from(rows: Vec<Vec<Elem>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        Matrix::from_rows(cols, &rows)
    }
}

/// Storage that the elimination routine can operate on.
pub(crate) trait Rows {
    fn nrows(&self) -> usize;
    fn ncols(&self) -> usize;
    fn get(&self, r: usize, c: usize) -> Elem;
    fn swap(&mut self, a: usize, b: usize);
    /// Multiplies row `r` by `f`; entries left of `from` are known to be zero.
    fn scale(&mut self, field: &FiniteField, r: usize, f: Elem, from: usize);
    /// Row `dst` += `f` * row `src`; entries of `src` left of `from` are zero.
    fn add_multiple(&mut self, field: &FiniteField, dst: usize, src: usize, f: Elem, from: usize);
}

/// Row echelon form with pivots restricted to the first `pivot_cols`
/// columns. With `reduced` the pivot columns are cleared above the pivot too.
pub(crate) fn echelonize<R: Rows>(m: &mut R, field: &FiniteField, pivot_cols: usize, reduced: bool) -> Vec<usize> {
    let rows = m.nrows();
    let mut pivots = Vec::new();
    for c in 0..pivot_cols.min(m.ncols()) {
        let rank = pivots.len();
        if rank == rows {
            break;
        }
        let Some(pr) = (rank..rows).find(|&r| m.get(r, c) != 0) else {
            continue;
        };
        m.swap(pr, rank);
        let v = m.get(rank, c);
        if v != 1 {
            m.scale(field, rank, field.inv(v).expect("pivot is nonzero"), c);
        }
        let start = if reduced { 0 } else { rank + 1 };
        for r in start..rows {
            if r == rank {
                continue;
            }
            let a = m.get(r, c);
            if a != 0 {
                m.add_multiple(field, r, rank, field.neg(a), c);
            }
        }
        pivots.push(c);
    }
    pivots
}

impl Rows for Matrix {
    fn nrows(&self) -> usize {
        self.rows
    }

    fn ncols(&self) -> usize {
        self.cols
    }

    #[inline]
    fn get(&self, r: usize, c: usize) -> Elem {
        self.data[r * self.cols + c]
    }

    fn swap(&mut self, a: usize, b: usize) {
        if a != b {
            let cols = self.cols;
            let (lo, hi) = self.data.split_at_mut(a.max(b) * cols);
            lo[a.min(b) * cols..(a.min(b) + 1) * cols].swap_with_slice(&mut hi[..cols]);
        }
    }

    fn scale(&mut self, field: &FiniteField, r: usize, f: Elem, from: usize) {
        let cols = self.cols;
        kernels::scale(field, &mut self.data[r * cols + from..(r + 1) * cols], f);
    }

    fn add_multiple(&mut self, field: &FiniteField, dst: usize, src: usize, f: Elem, from: usize) {
        let cols = self.cols;
        let (d, s) = if dst < src {
            let (lo, hi) = self.data.split_at_mut(src * cols);
            (&mut lo[dst * cols..(dst + 1) * cols], &hi[..cols])
        } else {
            let (lo, hi) = self.data.split_at_mut(dst * cols);
            (&mut hi[..cols], &lo[src * cols..(src + 1) * cols])
        };
        kernels::axpy(field, &mut d[from..], f, &s[from..]);
    }
}

/// Result of an elimination: the transformed matrix and its pivot columns.
#[derive(Clone, Debug)]
pub struct Echelon {
    pub matrix: Matrix,
    pub pivots: Vec<usize>,
}

impl Echelon {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    /// Builds a matrix from rows; every row must have `cols` entries.
    pub fn from_rows<R: AsRef<[Elem]>>(cols: usize, rows: &[R]) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::DimensionMismatch { expected: cols, found: r.len() });
            }
            data.extend_from_slice(r);
        }
        Ok(Matrix { rows: rows.len(), cols, data })
    }

    /// Matrix with i.i.d. uniform entries.
    pub fn random<R: Rng + ?Sized>(field: &FiniteField, rows: usize, cols: usize, rng: &mut R) -> Self {
        let q = field.order();
        let data = if q == 2 {
            let mut data = Vec::with_capacity(rows * cols);
            while data.len() < rows * cols {
                let bits: u64 = rng.random();
                let take = (rows * cols - data.len()).min(64);
                data.extend((0..take).map(|i| ((bits >> i) & 1) as Elem));
            }
            data
        } else {
            (0..rows * cols).map(|_| rng.random_range(0..q) as Elem).collect()
        };
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> Elem {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Elem) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Elem] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [Elem] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &[Elem]> {
        (0..self.rows).map(move |r| self.row(r))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&a| a == 0)
    }

    /// Largest entry plus one, or zero for an empty matrix.
    pub(crate) fn alphabet_bound(&self) -> u32 {
        self.data.iter().map(|&a| a as u32 + 1).max().unwrap_or(0)
    }

    /// Columns listed in `cols`, in that order.
    pub fn select_columns(&self, cols: &[usize]) -> Matrix {
        let mut m = Matrix::zeros(self.rows, cols.len());
        for r in 0..self.rows {
            let src = self.row(r);
            for (dst, &c) in m.row_mut(r).iter_mut().zip(cols) {
                *dst = src[c];
            }
        }
        m
    }

    pub fn select_rows(&self, rows: &[usize]) -> Matrix {
        let mut m = Matrix::zeros(rows.len(), self.cols);
        for (i, &r) in rows.iter().enumerate() {
            m.row_mut(i).copy_from_slice(self.row(r));
        }
        m
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

    /// `[self | other]`.
    pub fn hconcat(&self, other: &Matrix) -> Result<Matrix> {
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch { expected: self.rows, found: other.rows });
        }
        let mut m = Matrix::zeros(self.rows, self.cols + other.cols);
        for r in 0..self.rows {
            let row = m.row_mut(r);
            row[..self.cols].copy_from_slice(self.row(r));
            row[self.cols..].copy_from_slice(other.row(r));
        }
        Ok(m)
    }

    /// Row vector times matrix, `v · M`.
    pub fn left_mul(&self, field: &FiniteField, v: &[Elem]) -> Result<Vec<Elem>> {
        if v.len() != self.rows {
            return Err(Error::DimensionMismatch { expected: self.rows, found: v.len() });
        }
        let mut out = vec![0; self.cols];
        for (r, &a) in v.iter().enumerate() {
            kernels::axpy(field, &mut out, a, self.row(r));
        }
        Ok(out)
    }

    /// Matrix times column vector, `M · x^T`.
    pub fn right_mul(&self, field: &FiniteField, x: &[Elem]) -> Result<Vec<Elem>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch { expected: self.cols, found: x.len() });
        }
        Ok(self.row_iter().map(|row| field.dot(row, x)).collect())
    }

    /// Matrix product.
    pub fn mul(&self, field: &FiniteField, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch { expected: self.cols, found: other.rows });
        }
        let mut m = Matrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            let row = other.left_mul(field, self.row(r))?;
            m.row_mut(r).copy_from_slice(&row);
        }
        Ok(m)
    }

    /// Gaussian elimination with pivots in the first `pivot_cols` columns.
    pub fn echelon(&self, field: &FiniteField, pivot_cols: usize, reduced: bool) -> Echelon {
        if field.order() == 2 {
            let mut b = BitMatrix::from_matrix(self);
            let pivots = echelonize(&mut b, field, pivot_cols, reduced);
            Echelon { matrix: b.to_matrix(), pivots }
        } else {
            let mut m = self.clone();
            let pivots = echelonize(&mut m, field, pivot_cols, reduced);
            Echelon { matrix: m, pivots }
        }
    }

    /// Reduced row echelon form.
    pub fn rref(&self, field: &FiniteField) -> Echelon {
        self.echelon(field, self.cols, true)
    }

    pub fn rank(&self, field: &FiniteField) -> usize {
        self.echelon(field, self.cols, false).rank()
    }

    /// Basis of the row space (the nonzero rows of the RREF).
    pub fn row_basis(&self, field: &FiniteField) -> Matrix {
        let e = self.rref(field);
        let rank = e.rank();
        e.matrix.select_rows(&(0..rank).collect::<Vec<_>>())
    }

    /// Basis of `{x : M x^T = 0}`, one vector per row.
    pub fn kernel(&self, field: &FiniteField) -> Matrix {
        let e = self.rref(field);
        let mut is_pivot = vec![false; self.cols];
        for &p in &e.pivots {
            is_pivot[p] = true;
        }
        let free: Vec<usize> = (0..self.cols).filter(|&c| !is_pivot[c]).collect();
        let mut k = Matrix::zeros(free.len(), self.cols);
        for (i, &f) in free.iter().enumerate() {
            let row = k.row_mut(i);
            row[f] = 1;
            for (r, &p) in e.pivots.iter().enumerate() {
                row[p] = field.neg(e.matrix.get(r, f));
            }
        }
        k
    }

    /// Right inverse restricted to the columns in `j`: returns `M` with
    /// `(u · self_J) · M = u` for every `u`, built from the lowest-index pivots.
    pub fn right_inverse_on(&self, field: &FiniteField, j: &[usize]) -> Result<Matrix> {
        let k = self.rows;
        let sub = self.select_columns(j);
        let aug = sub.hconcat(&Matrix::identity(k))?;
        let e = aug.echelon(field, j.len(), true);
        if e.rank() < k {
            return Err(Error::RankDeficient { rank: e.rank(), k });
        }
        let mut m = Matrix::zeros(j.len(), k);
        for (i, &p) in e.pivots.iter().enumerate() {
            m.row_mut(p).copy_from_slice(&e.matrix.row(i)[j.len()..]);
        }
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;

    #[test]
    fn rank_and_kernel_small() {
        let f = FiniteField::new(2, 1).unwrap();
        let g = Matrix::from_rows(3, &[[1, 1, 1]]).unwrap();
        assert_eq!(g.rank(&f), 1);
        let k = g.kernel(&f);
        assert_eq!(k.rows(), 2);
        for r in k.row_iter() {
            assert_eq!(g.right_mul(&f, r).unwrap(), vec![0]);
        }
    }

    #[test]
    fn bit_and_generic_elimination_agree() {
        let f = FiniteField::new(2, 1).unwrap();
        let mut rng = stream_rng(7, 0);
        for _ in 0..20 {
            let m = Matrix::random(&f, 9, 70, &mut rng);
            let bit = m.rref(&f);
            let mut generic = m.clone();
            let pivots = echelonize(&mut generic, &f, m.cols(), true);
            assert_eq!(bit.pivots, pivots);
            assert_eq!(bit.matrix, generic);
        }
    }

    #[test]
    fn kernel_is_orthogonal_for_all_small_fields() {
        for q in [2, 3, 4, 5, 7, 8, 9] {
            let f = FiniteField::of_order(q).unwrap();
            let mut rng = stream_rng(q as u64, 1);
            for _ in 0..10 {
                let m = Matrix::random(&f, 4, 9, &mut rng);
                let k = m.kernel(&f);
                assert_eq!(k.rows() + m.rank(&f), 9);
                assert_eq!(k.rank(&f), k.rows());
                for r in k.row_iter() {
                    assert!(m.right_mul(&f, r).unwrap().iter().all(|&a| a == 0));
                }
            }
        }
    }

    #[test]
    fn right_inverse_property() {
        let f = FiniteField::new(3, 1).unwrap();
        let mut rng = stream_rng(3, 2);
        let g = Matrix::random(&f, 4, 12, &mut rng);
        let j: Vec<usize> = vec![0, 2, 3, 5, 7, 8, 11];
        let m = g.right_inverse_on(&f, &j).unwrap();
        let gj = g.select_columns(&j);
        assert_eq!(gj.mul(&f, &m).unwrap(), Matrix::identity(4));
    }

    #[test]
    fn serde_rows() {
        let m = Matrix::from_rows(2, &[[1, 0], [0, 1]]).unwrap();
        let json = serde_json::to_string(&m).unwrap();
        assert_eq!(json, "[[1,0],[0,1]]");
        assert_eq!(serde_json::from_str::<Matrix>(&json).unwrap(), m);
        assert!(serde_json::from_str::<Matrix>("[[1,0],[1]]").is_err());
    }
}
