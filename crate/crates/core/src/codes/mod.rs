//! Random linear codes over F_q.
//!
//! A [`LinearCode`] is the row space of a generator matrix `G` (k×n). The
//! matrix is kept as sampled, so `rank(G) < k` is possible and is reported
//! rather than repaired.

pub(crate) mod bits;
pub(crate) mod kernels;
pub mod matrix;
pub mod prange;
pub mod spectrum;

use std::sync::{Arc, OnceLock};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::{Elem, FieldSpec, FieldVector, FiniteField};
pub use matrix::{Echelon, Matrix};
pub use prange::{default_prange_rounds, prange_search, prange_short_codeword, prange_target, PrangeReport};
pub use spectrum::{expected_coset_count, CosetSpectra, CosetSpectrum, DEFAULT_ENUMERATION_BUDGET, SYNDROME_BUDGET};

/// Linear code given by a generator matrix.
#[derive(Clone, Debug)]
pub struct LinearCode {
    field: Arc<FiniteField>,
    generator: Matrix,
    parity: OnceLock<Matrix>,
    rank: OnceLock<usize>,
}

/// On-disk form of a code.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CodeFile {
    pub field: FieldSpec,
    pub n: usize,
    pub generator: Vec<Vec<Elem>>,
}

impl LinearCode {
    pub fn new(field: Arc<FiniteField>, generator: Matrix) -> Result<Self> {
        let bound = generator.alphabet_bound();
        if bound > field.order() {
            return Err(Error::InvalidElement(bound - 1));
        }
        Ok(LinearCode { field, generator, parity: OnceLock::new(), rank: OnceLock::new() })
    }

    /// Generator with i.i.d. uniform entries.
    pub fn random<R: Rng + ?Sized>(field: Arc<FiniteField>, n: usize, k: usize, rng: &mut R) -> Self {
        let generator = Matrix::random(&field, k, n, rng);
        LinearCode { field, generator, parity: OnceLock::new(), rank: OnceLock::new() }
    }

    /// The code `{x : H x^T = 0}`.
    pub fn from_parity_check(field: Arc<FiniteField>, h: &Matrix) -> Result<Self> {
        let g = h.kernel(&field);
        Self::new(field, g)
    }

    /// The repetition code of length `n`.
    pub fn repetition(field: Arc<FiniteField>, n: usize) -> Self {
        let g = Matrix::from_rows(n, &[vec![1; n]]).expect("one row of length n");
        LinearCode { field, generator: g, parity: OnceLock::new(), rank: OnceLock::new() }
    }

    pub fn from_file(file: &CodeFile) -> Result<Self> {
        let field = Arc::new(FiniteField::from_spec(file.field)?);
        let g = Matrix::from_rows(file.n, &file.generator)?;
        Self::new(field, g)
    }

    pub fn to_file(&self) -> CodeFile {
        CodeFile { field: self.field.spec(), n: self.n(), generator: self.generator.clone().into() }
    }

    pub fn field(&self) -> &FiniteField {
        &self.field
    }

    pub fn field_handle(&self) -> &Arc<FiniteField> {
        &self.field
    }

    pub fn q(&self) -> u32 {
        self.field.order()
    }

    pub fn generator(&self) -> &Matrix {
        &self.generator
    }

    pub fn n(&self) -> usize {
        self.generator.cols()
    }

    /// Number of generator rows.
    pub fn k(&self) -> usize {
        self.generator.rows()
    }

    pub fn rate(&self) -> f64 {
        self.k() as f64 / self.n() as f64
    }

    /// Dimension of the code.
    pub fn rank(&self) -> usize {
        *self.rank.get_or_init(|| self.generator.rank(&self.field))
    }

    pub fn is_full_rank(&self) -> bool {
        self.rank() == self.k()
    }

    /// Parity-check matrix H with `(n - rank)` independent rows and `G H^T = 0`.
    pub fn parity_check(&self) -> &Matrix {
        self.parity.get_or_init(|| self.generator.kernel(&self.field))
    }

    pub fn dual(&self) -> LinearCode {
        let h = self.parity_check().clone();
        let rank = h.rows();
        let code = LinearCode { field: self.field.clone(), generator: h, parity: OnceLock::new(), rank: OnceLock::new() };
        let _ = code.rank.set(rank);
        code
    }

    /// Restriction of every codeword to the coordinates in `j`.
    pub fn puncture(&self, j: &[usize]) -> LinearCode {
        LinearCode {
            field: self.field.clone(),
            generator: self.generator.select_columns(j),
            parity: OnceLock::new(),
            rank: OnceLock::new(),
        }
    }

    /// Codewords vanishing outside `j`, restricted to `j`.
    pub fn shorten(&self, j: &[usize]) -> LinearCode {
        let n = self.n();
        let mut inside = vec![false; n];
        for &i in j {
            inside[i] = true;
        }
        let outside: Vec<usize> = (0..n).filter(|&i| !inside[i]).collect();
        // messages u with u G_{J̄} = 0
        let left = self.generator.select_columns(&outside).transpose().kernel(&self.field);
        let words = left.mul(&self.field, &self.generator).expect("dimensions agree");
        let g = words.select_columns(j).row_basis(&self.field);
        LinearCode { field: self.field.clone(), generator: g, parity: OnceLock::new(), rank: OnceLock::new() }
    }

    pub fn encode(&self, m: &[Elem]) -> Result<FieldVector> {
        Ok(FieldVector(self.generator.left_mul(&self.field, m)?))
    }

    /// `G x^T`, the label of the shifted dual code containing `x`.
    pub fn syndrome(&self, x: &[Elem]) -> Result<Vec<Elem>> {
        self.generator.right_mul(&self.field, x)
    }

    pub fn contains(&self, x: &[Elem]) -> Result<bool> {
        Ok(self.parity_check().right_mul(&self.field, x)?.iter().all(|&a| a == 0))
    }

    pub fn random_message<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<Elem> {
        (0..self.k()).map(|_| rng.random_range(0..self.q()) as Elem).collect()
    }

    /// Right inverse of `G_J`: `M` with `(u G_J) M = u` for all `u`.
    pub fn pseudo_inverse(&self, j: &[usize]) -> Result<Matrix> {
        if j.len() < self.k() {
            return Err(Error::RankDeficient { rank: j.len(), k: self.k() });
        }
        self.generator.right_inverse_on(&self.field, j)
    }

    /// The codeword agreeing with `c_j` on `j`, computed as `c_J G_J^{-1} G`.
    pub fn recover_from_coordinates(&self, j: &[usize], c_j: &[Elem]) -> Result<FieldVector> {
        if c_j.len() != j.len() {
            return Err(Error::DimensionMismatch { expected: j.len(), found: c_j.len() });
        }
        let m = self.pseudo_inverse(j)?;
        let u = m.left_mul(&self.field, c_j)?;
        self.encode(&u)
    }

    /// Number of distinct codewords, `q^rank`, as a float.
    pub fn size(&self) -> f64 {
        (self.q() as f64).powi(self.rank() as i32)
    }

    /// Calls `f` on every distinct codeword.
    pub fn for_each_codeword(&self, budget: u64, f: impl FnMut(&[Elem])) -> Result<()> {
        let basis = self.generator.row_basis(&self.field);
        check_budget(self.q(), basis.rows(), budget)?;
        for_each_combination(&self.field, &basis, f);
        Ok(())
    }

    pub fn codewords(&self, budget: u64) -> Result<Vec<FieldVector>> {
        let mut out = Vec::new();
        self.for_each_codeword(budget, |w| out.push(FieldVector(w.to_vec())))?;
        Ok(out)
    }

    /// Weight distribution `A(t)`, t = 0..n.
    pub fn weight_distribution(&self, budget: u64) -> Result<Vec<u64>> {
        let mut a = vec![0u64; self.n() + 1];
        self.for_each_codeword(budget, |w| a[crate::gf::weight(w)] += 1)?;
        Ok(a)
    }
}

pub(crate) fn check_budget(q: u32, dim: usize, budget: u64) -> Result<()> {
    let needed = (q as f64).powi(dim as i32);
    if needed > budget as f64 {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    Ok(())
}

/// Visits `Σ m_i basis_i` for every message `m`, in little-endian message
/// index order (`m_0` varies fastest).
pub fn for_each_combination(field: &FiniteField, basis: &Matrix, mut f: impl FnMut(&[Elem])) {
    let q = field.order();
    let r = basis.rows();
    let mut digits = vec![0 as Elem; r];
    let mut word = vec![0 as Elem; basis.cols()];
    loop {
        f(&word);
        let mut i = 0;
        loop {
            if i == r {
                return;
            }
            let old = digits[i];
            let new = if old as u32 + 1 == q { 0 } else { old + 1 };
            digits[i] = new;
            field.axpy(&mut word, field.sub(new, old), basis.row(i));
            if new != 0 {
                break;
            }
            i += 1;
        }
    }
}

/// Binary words of length ≤ 64 packed into `u64`, bit `i` for coordinate `i`.
pub(crate) fn pack_binary(v: &[Elem]) -> u64 {
    v.iter().enumerate().fold(0u64, |acc, (i, &a)| acc | ((a as u64 & 1) << i))
}

/// Every element of the binary span of `basis`, in Gray-code order.
pub(crate) fn binary_span(basis: &[u64]) -> Vec<u64> {
    let mut out = Vec::with_capacity(1 << basis.len());
    let mut w = 0u64;
    out.push(w);
    for i in 1u64..(1 << basis.len()) {
        w ^= basis[i.trailing_zeros() as usize];
        out.push(w);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;
    use std::collections::HashSet;

    fn f(q: u32) -> Arc<FiniteField> {
        Arc::new(FiniteField::of_order(q).unwrap())
    }

    fn span(code: &LinearCode) -> HashSet<Vec<Elem>> {
        code.codewords(1 << 20).unwrap().into_iter().map(|v| v.0).collect()
    }

    #[test]
    fn random_code_is_reproducible() {
        let a = LinearCode::random(f(2), 4, 2, &mut stream_rng(11, 0));
        let b = LinearCode::random(f(2), 4, 2, &mut stream_rng(11, 0));
        assert_eq!(a.generator(), b.generator());
        assert_eq!(a.generator().rows(), 2);
    }

    #[test]
    fn gf3_one_by_one_rank() {
        let field = f(3);
        let full = (0..3)
            .filter(|&a| LinearCode::new(field.clone(), Matrix::from_rows(1, &[[a]]).unwrap()).unwrap().rank() == 1)
            .count();
        assert_eq!(full, 2);
    }

    #[test]
    fn repetition_code_dual_is_even_weight() {
        let c = LinearCode::repetition(f(2), 3);
        let d = span(&c.dual());
        let expect: HashSet<Vec<Elem>> =
            [vec![0, 0, 0], vec![0, 1, 1], vec![1, 0, 1], vec![1, 1, 0]].into_iter().collect();
        assert_eq!(d, expect);
    }

    #[test]
    fn full_code_dual_is_zero() {
        let c = LinearCode::new(f(2), Matrix::identity(5)).unwrap();
        assert_eq!(c.dual().k(), 0);
        assert_eq!(span(&c.dual()).len(), 1);
    }

    #[test]
    fn pseudo_inverse_cases() {
        let field = f(2);
        let c = LinearCode::new(field.clone(), Matrix::identity(3)).unwrap();
        assert_eq!(c.pseudo_inverse(&[0, 1, 2]).unwrap(), Matrix::identity(3));
        let z = LinearCode::new(field, Matrix::zeros(2, 4)).unwrap();
        assert!(matches!(z.pseudo_inverse(&[0, 1, 2]), Err(Error::RankDeficient { .. })));
    }

    #[test]
    fn pseudo_inverse_on_random_full_rank_restrictions() {
        for q in [2, 3, 4] {
            let field = f(q);
            let mut rng = stream_rng(5, q as u64);
            let code = LinearCode::random(field.clone(), 20, 6, &mut rng);
            let j: Vec<usize> = (0..20).step_by(2).collect();
            let Ok(m) = code.pseudo_inverse(&j) else { continue };
            let gj = code.generator().select_columns(&j);
            for _ in 0..100 {
                let u = code.random_message(&mut rng);
                let back = m.left_mul(&field, &gj.left_mul(&field, &u).unwrap()).unwrap();
                assert_eq!(back, u);
            }
        }
    }

    #[test]
    fn recovery() {
        let rep = LinearCode::repetition(f(2), 3);
        assert_eq!(rep.recover_from_coordinates(&[0], &[1]).unwrap().0, vec![1, 1, 1]);

        let field = f(2);
        let mut rng = stream_rng(9, 0);
        let mut checked = 0;
        while checked < 10 {
            let code = LinearCode::random(field.clone(), 10, 4, &mut rng);
            if !code.is_full_rank() {
                continue;
            }
            let c = code.encode(&code.random_message(&mut rng)).unwrap();
            let j: Vec<usize> = rand::seq::index::sample(&mut rng, 10, 4).into_vec();
            if code.puncture(&j).rank() < 4 {
                continue;
            }
            assert_eq!(code.recover_from_coordinates(&j, &c.restrict(&j).0).unwrap(), c);
            let all: Vec<usize> = (0..10).collect();
            assert_eq!(code.recover_from_coordinates(&all, &c.0).unwrap(), c);
            checked += 1;
        }
    }

    #[test]
    fn puncture_shorten_duality_n8() {
        let field = f(2);
        let mut rng = stream_rng(13, 0);
        for _ in 0..20 {
            let code = LinearCode::random(field.clone(), 8, 3, &mut rng);
            let j: Vec<usize> = vec![0, 2, 3, 6, 7];
            assert_eq!(span(&code.puncture(&j).dual()), span(&code.dual().shorten(&j)));
            assert_eq!(span(&code.shorten(&j).dual()), span(&code.dual().puncture(&j)));
        }
    }

    #[test]
    fn generator_times_parity_is_zero() {
        let field = f(3);
        let mut rng = stream_rng(17, 0);
        let code = LinearCode::random(field.clone(), 12, 5, &mut rng);
        let gh = code.generator().mul(&field, &code.parity_check().transpose()).unwrap();
        assert!(gh.is_zero());
        assert_eq!(code.dual().rank(), 12 - code.rank());
    }

    #[test]
    fn code_file_round_trip() {
        let code = LinearCode::random(f(4), 6, 2, &mut stream_rng(1, 1));
        let json = serde_json::to_string(&code.to_file()).unwrap();
        let back = LinearCode::from_file(&serde_json::from_str(&json).unwrap()).unwrap();
        assert_eq!(back.generator(), code.generator());
        assert_eq!(back.field().spec(), FieldSpec::new(2, 2));
    }

    #[test]
    fn binary_span_matches_enumeration() {
        let field = f(2);
        let code = LinearCode::random(field.clone(), 10, 4, &mut stream_rng(2, 2));
        let basis = code.generator().row_basis(&field);
        let packed: Vec<u64> = basis.row_iter().map(pack_binary).collect();
        let a: HashSet<u64> = binary_span(&packed).into_iter().collect();
        let b: HashSet<u64> = span(&code).iter().map(|v| pack_binary(v)).collect();
        assert_eq!(a, b);
    }
}
