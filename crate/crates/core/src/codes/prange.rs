//! Prange's information-set search for a short codeword.
//!
//! Each round fixes a random weight-one pattern on a random set `J` of size
//! `k` and solves the parity equations for the remaining `n - k` positions.
//! The solution has expected weight `1 + (q-1)(n-k)/q`; only words hitting the
//! target `⌊(q-1)(n-k)/q⌋` exactly are returned.

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::Matrix;
use crate::error::{Error, Result};
use crate::gf::{Elem, FieldVector, FiniteField};

/// Default round budget, `30 ⌈√n⌉`.
pub fn default_prange_rounds(n: usize) -> usize {
    30 * (n as f64).sqrt().ceil() as usize
}

/// Target weight `⌊(q-1)(n-k)/q⌋` for a parity-check matrix with `n - k` rows.
pub fn prange_target(q: u32, n: usize, k: usize) -> usize {
    (q as usize - 1) * (n - k) / q as usize
}

/// Outcome of a Prange search, including every weight seen.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrangeReport {
    pub hit: Option<FieldVector>,
    pub target: usize,
    pub rounds: usize,
    pub singular_rounds: usize,
    /// Weights of the candidate words of all non-singular rounds.
    pub weight_histogram: Vec<u64>,
}

/// Runs up to `max_rounds` rounds against the parity-check matrix `h`.
pub fn prange_search<R: Rng + ?Sized>(field: &FiniteField, h: &Matrix, rng: &mut R, max_rounds: usize) -> PrangeReport {
    let n = h.cols();
    let r = h.rows();
    let k = n.saturating_sub(r);
    let target = prange_target(field.order(), n, k);
    let mut report = PrangeReport { hit: None, target, rounds: 0, singular_rounds: 0, weight_histogram: vec![0; n + 1] };
    if k == 0 || r > n {
        // no room for the weight-one pattern
        report.rounds = max_rounds;
        report.singular_rounds = max_rounds;
        return report;
    }
    let mut in_j = vec![false; n];
    for _ in 0..max_rounds {
        report.rounds += 1;
        in_j.iter_mut().for_each(|b| *b = false);
        let j = sample(rng, n, k).into_vec();
        for &i in &j {
            in_j[i] = true;
        }
        let rest: Vec<usize> = (0..n).filter(|&i| !in_j[i]).collect();
        let pos = j[rng.random_range(0..k)];
        let value = rng.random_range(1..field.order()) as Elem;

        // [H_J̄ | -value · h_pos]
        let mut aug = Matrix::zeros(r, r + 1);
        for row in 0..r {
            let src = h.row(row);
            let dst = aug.row_mut(row);
            for (d, &c) in dst.iter_mut().zip(&rest) {
                *d = src[c];
            }
            dst[r] = field.neg(field.mul(value, src[pos]));
        }
        let e = aug.echelon(field, r, true);
        if e.rank() < r {
            report.singular_rounds += 1;
            continue;
        }
        let mut c = vec![0 as Elem; n];
        c[pos] = value;
        for (i, &col) in rest.iter().enumerate() {
            c[col] = e.matrix.get(i, r);
        }
        let c = FieldVector(c);
        let w = c.weight();
        report.weight_histogram[w] += 1;
        if w == target {
            debug_assert!(h.right_mul(field, &c.0).unwrap().iter().all(|&a| a == 0));
            report.hit = Some(c);
            break;
        }
    }
    report
}

/// Nonzero codeword of weight exactly `⌊(q-1)(n-k)/q⌋`, or `NoHit`.
pub fn prange_short_codeword<R: Rng + ?Sized>(
    field: &FiniteField,
    h: &Matrix,
    rng: &mut R,
    max_rounds: usize,
) -> Result<FieldVector> {
    let report = prange_search(field, h, rng, max_rounds);
    report.hit.ok_or(Error::NoHit { rounds: report.rounds })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::LinearCode;
    use crate::rng::stream_rng;
    use std::sync::Arc;

    fn check(q: u32, n: usize, k: usize, seed: u64) {
        let field = Arc::new(FiniteField::of_order(q).unwrap());
        let mut rng = stream_rng(seed, 0);
        let h = LinearCode::random(field.clone(), n, n - k, &mut rng).generator().clone();
        let c = prange_short_codeword(&field, &h, &mut rng, 50 * default_prange_rounds(n)).unwrap();
        assert_eq!(c.weight(), prange_target(q, n, k));
        assert!(h.right_mul(&field, &c.0).unwrap().iter().all(|&a| a == 0));
    }

    #[test]
    fn binary_n20() {
        assert_eq!(prange_target(2, 20, 10), 5);
        check(2, 20, 10, 1);
    }

    #[test]
    fn ternary_n30() {
        assert_eq!(prange_target(3, 30, 15), 10);
        check(3, 30, 15, 2);
    }

    #[test]
    fn weight_one_target() {
        // n - k = 2 over GF(2): the target weight is 1
        let field = FiniteField::new(2, 1).unwrap();
        let h = Matrix::from_rows(3, &[[1, 1, 0], [0, 1, 1]]).unwrap();
        assert_eq!(prange_target(2, 3, 1), 1);
        // the code is {000, 111}: no weight-one word exists
        let report = prange_search(&field, &h, &mut stream_rng(3, 0), 40);
        assert!(report.hit.is_none());
        assert_eq!(report.weight_histogram[3] as usize + report.singular_rounds, 40);

        let h = Matrix::from_rows(3, &[[1, 0, 0], [0, 1, 0]]).unwrap();
        let c = prange_short_codeword(&field, &h, &mut stream_rng(3, 1), 40).unwrap();
        assert_eq!(c.0, vec![0, 0, 1]);
    }
}
