//! Bit-packed GF(2) matrices for the large binary eliminations.

use super::matrix::{Matrix, Rows};
use crate::gf::{Elem, FiniteField};

#[derive(Clone, Debug)]
pub(crate) struct BitMatrix {
    rows: usize,
    cols: usize,
    words: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn from_matrix(m: &Matrix) -> Self {
        let words = m.cols().div_ceil(64).max(1);
        let mut data = vec![0u64; m.rows() * words];
        for r in 0..m.rows() {
            let row = &mut data[r * words..(r + 1) * words];
            for (c, &a) in m.row(r).iter().enumerate() {
                if a != 0 {
                    row[c / 64] |= 1 << (c % 64);
                }
            }
        }
        BitMatrix { rows: m.rows(), cols: m.cols(), words, data }
    }

    pub fn to_matrix(&self) -> Matrix {
        let mut m = Matrix::zeros(self.rows, self.cols);
        for r in 0..self.rows {
            let row = &self.data[r * self.words..(r + 1) * self.words];
            for (c, slot) in m.row_mut(r).iter_mut().enumerate() {
                *slot = ((row[c / 64] >> (c % 64)) & 1) as Elem;
            }
        }
        m
    }
}

impl Rows for BitMatrix {
    fn nrows(&self) -> usize {
        self.rows
    }

    fn ncols(&self) -> usize {
        self.cols
    }

    #[inline]
    fn get(&self, r: usize, c: usize) -> Elem {
        ((self.data[r * self.words + c / 64] >> (c % 64)) & 1) as Elem
    }

    fn swap(&mut self, a: usize, b: usize) {
        if a != b {
            for w in 0..self.words {
                self.data.swap(a * self.words + w, b * self.words + w);
            }
        }
    }

    fn scale(&mut self, _field: &FiniteField, _r: usize, _f: Elem, _from: usize) {}

    fn add_multiple(&mut self, _field: &FiniteField, dst: usize, src: usize, _f: Elem, from: usize) {
        let w0 = from / 64;
        let words = self.words;
        let (d, s) = if dst < src {
            let (lo, hi) = self.data.split_at_mut(src * words);
            (&mut lo[dst * words..(dst + 1) * words], &hi[..words])
        } else {
            let (lo, hi) = self.data.split_at_mut(dst * words);
            (&mut hi[..words], &lo[src * words..(src + 1) * words])
        };
        for (x, y) in d[w0..].iter_mut().zip(&s[w0..]) {
            *x ^= y;
        }
    }
}
