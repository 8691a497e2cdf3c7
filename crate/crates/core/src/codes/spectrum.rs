//! Weight enumerators of the shifted dual codes `C_s⊥ = {x : G x^T = s}`.
//!
//! Each coset is enumerated as `u_s + C⊥` by walking the dual code through
//! its own generator, so one coset costs `q^(n - rank)` rather than `q^n`.

use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::function::factorial::ln_binomial;

use super::{binary_span, check_budget, for_each_combination, pack_binary, LinearCode, Matrix};
use crate::error::{Error, Result};
use crate::gf::{Elem, FieldVector, FiniteField};

/// Default cap on the number of words enumerated per coset.
pub const DEFAULT_ENUMERATION_BUDGET: u64 = 1 << 26;
/// Cap on the number of syndromes, `q^k`.
pub const SYNDROME_BUDGET: u64 = 1 << 20;

/// Words cached across cosets when the dual code is small enough.
const CACHE_ELEMS: usize = 1 << 25;

/// Weight counts `a_s(t)` of one shifted dual code.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CosetSpectrum {
    pub syndrome: FieldVector,
    /// `counts[t]` for t = 0..=n.
    pub counts: Vec<u64>,
    /// Some `u_s` with `G u_s^T = s`; `None` when `s` is outside the image of `G`.
    pub representative: Option<FieldVector>,
}

/// Solves `G x^T = s` with the invertible `T` for which `T G` is in reduced
/// row echelon form.
#[derive(Clone, Debug)]
pub(crate) struct SyndromeSolver {
    t: Matrix,
    pivots: Vec<usize>,
    n: usize,
}

impl SyndromeSolver {
    pub fn new(field: &FiniteField, g: &Matrix) -> Self {
        let k = g.rows();
        let aug = g.hconcat(&Matrix::identity(k)).expect("same row count");
        let e = aug.echelon(field, g.cols(), true);
        let cols: Vec<usize> = (g.cols()..g.cols() + k).collect();
        SyndromeSolver { t: e.matrix.select_columns(&cols), pivots: e.pivots, n: g.cols() }
    }

    /// A solution supported on the pivot columns, or `None` if `s ∉ im G`.
    pub fn representative(&self, field: &FiniteField, s: &[Elem]) -> Option<Vec<Elem>> {
        let ts = self.t.right_mul(field, s).expect("syndrome length k");
        let r = self.pivots.len();
        if ts[r..].iter().any(|&a| a != 0) {
            return None;
        }
        let mut x = vec![0; self.n];
        for (i, &p) in self.pivots.iter().enumerate() {
            x[p] = ts[i];
        }
        Some(x)
    }
}

impl LinearCode {
    /// Weight counts of `C_s⊥`.
    pub fn coset_spectrum(&self, s: &[Elem], budget: u64) -> Result<CosetSpectrum> {
        let k = self.k();
        if s.len() != k {
            return Err(Error::DimensionMismatch { expected: k, found: s.len() });
        }
        let field = self.field();
        let n = self.n();
        let dual = self.parity_check();
        check_budget(self.q(), dual.rows(), budget)?;
        let solver = SyndromeSolver::new(field, self.generator());
        let mut counts = vec![0u64; n + 1];
        let rep = solver.representative(field, s);
        if let Some(u) = &rep {
            let neg_u = field.neg_vec(u);
            for_each_combination(field, dual, |d| {
                counts[mismatches(d, &neg_u)] += 1;
            });
        }
        Ok(CosetSpectrum { syndrome: FieldVector(s.to_vec()), counts, representative: rep.map(FieldVector) })
    }
}

/// `|u + d|` computed as the number of positions where `d ≠ -u`.
#[inline]
fn mismatches(d: &[Elem], neg_u: &[Elem]) -> usize {
    d.iter().zip(neg_u).filter(|(a, b)| a != b).count()
}

/// Weight counts of every shifted dual code, indexed by the little-endian
/// index of the syndrome.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CosetSpectra {
    pub q: u32,
    pub n: usize,
    pub k: usize,
    pub rank: usize,
    counts: Vec<u64>,
}

impl CosetSpectra {
    pub fn compute(code: &LinearCode, budget: u64) -> Result<Self> {
        Self::compute_inner(code, budget, None::<&mut rand::rngs::ThreadRng>)
    }

    /// As [`compute`](Self::compute) but with each representative `u_s`
    /// replaced by `u_s + d` for a random dual codeword `d`.
    pub fn compute_with_random_representatives<R: Rng + ?Sized>(
        code: &LinearCode,
        budget: u64,
        rng: &mut R,
    ) -> Result<Self> {
        Self::compute_inner(code, budget, Some(rng))
    }

    fn compute_inner<R: Rng + ?Sized>(code: &LinearCode, budget: u64, mut rng: Option<&mut R>) -> Result<Self> {
        let field = code.field();
        let (q, n, k) = (code.q(), code.n(), code.k());
        check_budget(q, k, SYNDROME_BUDGET)?;
        let dual = code.parity_check();
        check_budget(q, dual.rows(), budget)?;
        let solver = SyndromeSolver::new(field, code.generator());
        let num_s = (q as usize).pow(k as u32);
        let mut counts = vec![0u64; num_s * (n + 1)];

        let mut representative = |s: &[Elem]| -> Option<Vec<Elem>> {
            let mut u = solver.representative(field, s)?;
            if let Some(rng) = rng.as_deref_mut() {
                let m: Vec<Elem> = (0..dual.rows()).map(|_| rng.random_range(0..q) as Elem).collect();
                let d = dual.left_mul(field, &m).expect("message length");
                u = field.add_vec(&u, &d);
            }
            Some(u)
        };

        if q == 2 && n <= 64 {
            let basis: Vec<u64> = dual.row_iter().map(pack_binary).collect();
            let words = binary_span(&basis);
            for idx in 0..num_s {
                let s = FieldVector::from_index(idx, q, k);
                let Some(u) = representative(&s.0) else { continue };
                let u = pack_binary(&u);
                let row = &mut counts[idx * (n + 1)..(idx + 1) * (n + 1)];
                for &d in &words {
                    row[(u ^ d).count_ones() as usize] += 1;
                }
            }
        } else {
            let dual_size = (q as usize).pow(dual.rows() as u32);
            let cache = (dual_size.saturating_mul(n) <= CACHE_ELEMS).then(|| {
                let mut flat = Vec::with_capacity(dual_size * n);
                for_each_combination(field, dual, |d| flat.extend_from_slice(d));
                flat
            });
            for idx in 0..num_s {
                let s = FieldVector::from_index(idx, q, k);
                let Some(u) = representative(&s.0) else { continue };
                let neg_u = field.neg_vec(&u);
                let row = &mut counts[idx * (n + 1)..(idx + 1) * (n + 1)];
                match &cache {
                    Some(flat) if n > 0 => {
                        for d in flat.chunks_exact(n) {
                            row[mismatches(d, &neg_u)] += 1;
                        }
                    }
                    Some(_) => row[0] += 1,
                    None => for_each_combination(field, dual, |d| row[mismatches(d, &neg_u)] += 1),
                }
            }
        }
        Ok(CosetSpectra { q, n, k, rank: code.rank(), counts })
    }

    pub fn num_syndromes(&self) -> usize {
        self.counts.len() / (self.n + 1)
    }

    /// `a_s(t)` for the syndrome with index `s`.
    pub fn counts(&self, s: usize) -> &[u64] {
        &self.counts[s * (self.n + 1)..(s + 1) * (self.n + 1)]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[u64]> {
        self.counts.chunks_exact(self.n + 1)
    }

    /// Weight distribution of the dual code, `a_0(t)`.
    pub fn dual_weight_distribution(&self) -> &[u64] {
        self.counts(0)
    }
}

/// `S(t) = (q-1)^t binom(n, t) / q^k`, the mean of `a_s(t)` over uniform `G`.
pub fn expected_coset_count(q: u32, n: usize, k: usize, t: usize) -> f64 {
    if t > n {
        return 0.0;
    }
    let q = q as f64;
    (ln_binomial(n as u64, t as u64) + t as f64 * (q - 1.0).ln() - k as f64 * q.ln()).exp()
}
