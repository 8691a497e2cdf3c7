//! Small quantum states over F_q and F_q^n.
//!
//! Dense states are verification oracles only. Index order is little-endian:
//! coordinate 0 varies fastest, matching [`FieldVector::index`].

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::codes::LinearCode;
use crate::error::{Error, Result};
use crate::gf::{Elem, FieldVector, FiniteField};
use crate::noise::NoiseProfile;
use crate::scalar::Real;

/// Largest dense dimension `q^n`.
pub const DENSE_BUDGET: usize = 1 << 22;

/// State of a single qudit.
#[derive(Clone, Debug, PartialEq)]
pub struct QuditState<T> {
    amps: Vec<Complex<T>>,
}

impl<T: Real> QuditState<T> {
    pub fn new(amps: Vec<Complex<T>>) -> Self {
        QuditState { amps }
    }

    pub fn basis(q: u32, b: Elem) -> Self {
        let mut amps = vec![Complex::new(T::zero(), T::zero()); q as usize];
        amps[b as usize] = Complex::new(T::one(), T::zero());
        QuditState { amps }
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> T {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn to_dense(&self) -> DenseState<T> {
        DenseState { q: self.amps.len() as u32, n: 1, amps: self.amps.clone() }
    }
}

/// `√(1-ω)|b⟩ + Σ_{α≠b} √(ω/(q-1))|α⟩`.
pub fn noisy_symbol_state<T: Real>(profile: &NoiseProfile<T>, b: Elem) -> QuditState<T> {
    let on = profile.symbol_amplitude(true);
    let off = profile.symbol_amplitude(false);
    let amps = (0..profile.q() as Elem)
        .map(|a| Complex::new(if a == b { on } else { off }, T::zero()))
        .collect();
    QuditState { amps }
}

/// Matrix of the single-qudit transform, `F[y][x] = χ_y(x)/√q`.
fn qft_matrix<T: Real>(field: &FiniteField, inverse: bool) -> Vec<Complex<T>> {
    let q = field.order() as usize;
    let roots = field.roots_of_unity::<T>();
    let scale = T::one() / T::lit(q as f64).sqrt();
    let mut m = Vec::with_capacity(q * q);
    for y in 0..q {
        for x in 0..q {
            let w = roots[field.character_exponent(y as Elem, x as Elem) as usize];
            m.push(if inverse { w.conj() } else { w } * scale);
        }
    }
    m
}

pub fn qft_qudit<T: Real>(field: &FiniteField, state: &QuditState<T>) -> QuditState<T> {
    QuditState { amps: qft_dense(field, &state.to_dense()).amps }
}

/// State on F_q^n stored as `q^n` amplitudes.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseState<T> {
    q: u32,
    n: usize,
    amps: Vec<Complex<T>>,
}

/// One amplitude in the JSON dump.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DenseEntry {
    pub index: usize,
    pub re: f64,
    pub im: f64,
}

fn dense_dim(q: u32, n: usize) -> Result<usize> {
    let dim = (q as f64).powi(n as i32);
    if dim > DENSE_BUDGET as f64 {
        return Err(Error::BudgetExceeded { needed: dim, budget: DENSE_BUDGET as u64 });
    }
    Ok((q as usize).pow(n as u32))
}

impl<T: Real> DenseState<T> {
    pub fn zeros(q: u32, n: usize) -> Result<Self> {
        let dim = dense_dim(q, n)?;
        Ok(DenseState { q, n, amps: vec![Complex::new(T::zero(), T::zero()); dim] })
    }

    pub fn basis(q: u32, x: &FieldVector) -> Result<Self> {
        let mut s = Self::zeros(q, x.len())?;
        s.amps[x.index(q)] = Complex::new(T::one(), T::zero());
        Ok(s)
    }

    pub fn from_amplitudes(q: u32, n: usize, amps: Vec<Complex<T>>) -> Result<Self> {
        let dim = dense_dim(q, n)?;
        if amps.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: amps.len() });
        }
        Ok(DenseState { q, n, amps })
    }

    /// Tensor product `s_0 ⊗ s_1 ⊗ ...`, with `s_0` on coordinate 0.
    pub fn product(factors: &[QuditState<T>]) -> Result<Self> {
        let q = factors.first().map_or(1, |f| f.amps.len() as u32);
        dense_dim(q, factors.len())?;
        let mut amps = vec![Complex::new(T::one(), T::zero())];
        for f in factors {
            if f.amps.len() as u32 != q {
                return Err(Error::DimensionMismatch { expected: q as usize, found: f.amps.len() });
            }
            let mut next = Vec::with_capacity(amps.len() * q as usize);
            for b in &f.amps {
                next.extend(amps.iter().map(|a| a * b));
            }
            amps = next;
        }
        Ok(DenseState { q, n: factors.len(), amps })
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.amps
    }

    pub fn amplitude(&self, x: &FieldVector) -> Complex<T> {
        self.amps[x.index(self.q)]
    }

    pub fn norm_sqr(&self) -> T {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Rescales to unit norm and returns the previous squared norm.
    pub fn normalize(&mut self) -> T {
        let z = self.norm_sqr();
        if z > T::zero() {
            let s = T::one() / z.sqrt();
            for a in self.amps.iter_mut() {
                *a = *a * s;
            }
        }
        z
    }

    /// Born-rule outcome probabilities.
    pub fn probabilities(&self) -> Vec<T> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn to_entries(&self) -> Vec<DenseEntry> {
        self.amps
            .iter()
            .enumerate()
            .map(|(index, a)| DenseEntry { index, re: a.re.as_f64(), im: a.im.as_f64() })
            .collect()
    }

    pub fn from_entries(q: u32, n: usize, entries: &[DenseEntry]) -> Result<Self> {
        let mut s = Self::zeros(q, n)?;
        let dim = s.amps.len();
        for e in entries {
            let slot = s.amps.get_mut(e.index).ok_or(Error::DimensionMismatch { expected: dim, found: e.index + 1 })?;
            *slot = Complex::new(T::lit(e.re), T::lit(e.im));
        }
        Ok(s)
    }
}

fn transform_axes<T: Real>(field: &FiniteField, state: &DenseState<T>, inverse: bool) -> DenseState<T> {
    let q = field.order() as usize;
    assert_eq!(state.q as usize, q, "state and field disagree on q");
    let m = qft_matrix::<T>(field, inverse);
    let mut cur = state.amps.clone();
    let mut buf = vec![Complex::new(T::zero(), T::zero()); q];
    let mut stride = 1usize;
    for _ in 0..state.n {
        let block = stride * q;
        for base in (0..cur.len()).step_by(block) {
            for off in 0..stride {
                for (y, slot) in buf.iter_mut().enumerate() {
                    let row = &m[y * q..(y + 1) * q];
                    let mut acc = Complex::new(T::zero(), T::zero());
                    for (x, w) in row.iter().enumerate() {
                        acc = acc + w * cur[base + off + x * stride];
                    }
                    *slot = acc;
                }
                for (y, v) in buf.iter().enumerate() {
                    cur[base + off + y * stride] = *v;
                }
            }
        }
        stride = block;
    }
    DenseState { q: state.q, n: state.n, amps: cur }
}

/// `|x⟩ ↦ q^{-n/2} Σ_y χ_x(y)|y⟩`, applied coordinate by coordinate.
pub fn qft_dense<T: Real>(field: &FiniteField, state: &DenseState<T>) -> DenseState<T> {
    transform_axes(field, state, false)
}

/// Inverse transform.
pub fn qft_dense_inverse<T: Real>(field: &FiniteField, state: &DenseState<T>) -> DenseState<T> {
    transform_axes(field, state, true)
}

fn digit_table(q: u32, n: usize, dim: usize) -> Vec<Elem> {
    let mut t = Vec::with_capacity(dim * n);
    for x in 0..dim {
        t.extend_from_slice(&FieldVector::from_index(x, q, n).0);
    }
    t
}

/// `X_b : |x⟩ ↦ |x + b⟩`.
pub fn shift<T: Real>(field: &FiniteField, state: &DenseState<T>, b: &[Elem]) -> Result<DenseState<T>> {
    if b.len() != state.n {
        return Err(Error::DimensionMismatch { expected: state.n, found: b.len() });
    }
    let q = state.q;
    let mut out = vec![Complex::new(T::zero(), T::zero()); state.amps.len()];
    for (x, a) in state.amps.iter().enumerate() {
        let v = FieldVector::from_index(x, q, state.n);
        out[FieldVector(field.add_vec(&v.0, b)).index(q)] = *a;
    }
    Ok(DenseState { q, n: state.n, amps: out })
}

/// `Z_b : |x⟩ ↦ χ_x(b)|x⟩`.
pub fn phase<T: Real>(field: &FiniteField, state: &DenseState<T>, b: &[Elem]) -> Result<DenseState<T>> {
    if b.len() != state.n {
        return Err(Error::DimensionMismatch { expected: state.n, found: b.len() });
    }
    let roots = field.roots_of_unity::<T>();
    let amps = state
        .amps
        .iter()
        .enumerate()
        .map(|(x, a)| {
            let v = FieldVector::from_index(x, state.q, state.n);
            a * roots[field.vector_character_exponent(&v.0, b) as usize]
        })
        .collect();
    Ok(DenseState { q: state.q, n: state.n, amps })
}

/// `Σ_e f(e)|c + e⟩` for a single codeword `c`.
pub fn noisy_codeword_state<T: Real>(
    field: &FiniteField,
    profile: &NoiseProfile<T>,
    c: &[Elem],
) -> Result<DenseState<T>> {
    let n = c.len();
    let q = field.order();
    let factors: Vec<QuditState<T>> = c.iter().map(|&b| noisy_symbol_state(profile, b)).collect();
    let s = DenseState::product(&factors)?;
    debug_assert_eq!(s.q, q);
    debug_assert_eq!(s.n, n);
    Ok(s)
}

/// Normalised `Σ_{c∈C} Σ_e f(e)|c + e⟩`, the norm computed directly.
pub fn dense_code_superposition<T: Real>(code: &LinearCode, profile: &NoiseProfile<T>) -> Result<DenseState<T>> {
    let field = code.field();
    let (q, n) = (code.q(), code.n());
    let dim = dense_dim(q, n)?;
    let digits = digit_table(q, n, dim);
    let words = code.codewords(DENSE_BUDGET as u64)?;
    let by_weight: Vec<T> = (0..=n).map(|w| profile.f(w, n)).collect();
    let mut amps = vec![Complex::new(T::zero(), T::zero()); dim];
    for c in &words {
        let neg_c = field.neg_vec(&c.0);
        for (x, slot) in amps.iter_mut().enumerate() {
            let xd = &digits[x * n..(x + 1) * n];
            // |x - c| = #{i : x_i ≠ c_i}
            let w = xd.iter().zip(&neg_c).filter(|(a, b)| field.add(**a, **b) != 0).count();
            slot.re = slot.re + by_weight[w];
        }
    }
    let mut s = DenseState { q, n, amps };
    s.normalize();
    Ok(s)
}

/// `⟨a|b⟩`, conjugate-linear in `a`.
pub fn inner_product<T: Real>(a: &DenseState<T>, b: &DenseState<T>) -> Result<Complex<T>> {
    if a.amps.len() != b.amps.len() {
        return Err(Error::DimensionMismatch { expected: a.amps.len(), found: b.amps.len() });
    }
    Ok(a.amps.iter().zip(&b.amps).fold(Complex::new(T::zero(), T::zero()), |acc, (x, y)| acc + x.conj() * y))
}

/// Qudit version of [`inner_product`].
pub fn qudit_inner_product<T: Real>(a: &QuditState<T>, b: &QuditState<T>) -> Result<Complex<T>> {
    inner_product(&a.to_dense(), &b.to_dense())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;
    use rand::Rng;
    use std::sync::Arc;

    fn random_state(q: u32, n: usize, seed: u64) -> DenseState<f64> {
        let mut rng = stream_rng(seed, 0);
        let dim = (q as usize).pow(n as u32);
        let amps = (0..dim).map(|_| Complex::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect();
        let mut s = DenseState::from_amplitudes(q, n, amps).unwrap();
        s.normalize();
        s
    }

    fn close(a: &DenseState<f64>, b: &DenseState<f64>, tol: f64) -> bool {
        a.amps.iter().zip(&b.amps).all(|(x, y)| (x - y).norm() <= tol)
    }

    #[test]
    fn symbol_states() {
        let p0 = NoiseProfile::new(3, 0.0f64).unwrap();
        assert_eq!(noisy_symbol_state(&p0, 2), QuditState::basis(3, 2));
        let pu = NoiseProfile::new(3, 2.0 / 3.0f64).unwrap();
        for a in noisy_symbol_state(&pu, 1).amplitudes() {
            assert!((a.re - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        }
        let p = NoiseProfile::new(2, 0.1f64).unwrap();
        let s = noisy_symbol_state(&p, 1);
        assert!((s.amplitudes()[0].re - 0.1f64.sqrt()).abs() < 1e-15);
        assert!((s.amplitudes()[1].re - 0.9f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn qft_of_zero_is_uniform() {
        for q in [2, 3, 4, 5] {
            let f = FiniteField::of_order(q).unwrap();
            let out = qft_qudit(&f, &QuditState::<f64>::basis(q, 0));
            for a in out.amplitudes() {
                assert!((a - Complex::new(1.0 / (q as f64).sqrt(), 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn qft_maps_profile_to_dual_profile() {
        for q in [2, 3, 4, 5, 7, 8, 9] {
            let f = FiniteField::of_order(q).unwrap();
            for &omega in &[0.0, 0.1, 0.3, (q - 1) as f64 / q as f64] {
                let p = NoiseProfile::new(q, omega).unwrap();
                let out = qft_qudit(&f, &noisy_symbol_state(&p, 0));
                let want = noisy_symbol_state(&p.dual(), 0);
                for (a, b) in out.amplitudes().iter().zip(want.amplitudes()) {
                    assert!((a - b).norm() < 1e-12, "q={q} ω={omega}");
                }
            }
        }
    }

    #[test]
    fn qft_of_shifted_state_has_character_phases() {
        for q in [3, 4, 5] {
            let f = FiniteField::of_order(q).unwrap();
            let p = NoiseProfile::new(q, 0.2f64).unwrap();
            let hat = qft_qudit(&f, &noisy_symbol_state(&p, 0));
            for b in 1..q as Elem {
                let out = qft_qudit(&f, &noisy_symbol_state(&p, b));
                for (alpha, (a, h)) in out.amplitudes().iter().zip(hat.amplitudes()).enumerate() {
                    let phase = f.character::<f64>(alpha as Elem, b);
                    assert!((a - h * phase).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn transform_is_unitary_and_inverse() {
        for q in [2, 3, 4, 5, 7, 8, 9, 11, 13, 16] {
            let f = FiniteField::of_order(q).unwrap();
            let n = if q <= 4 { 3 } else if q <= 9 { 2 } else { 1 };
            let s = random_state(q, n, q as u64);
            let t = qft_dense(&f, &s);
            assert!((t.norm_sqr() - 1.0).abs() < 1e-10);
            assert!(close(&qft_dense_inverse(&f, &t), &s, 1e-12));
        }
    }

    #[test]
    fn shift_phase_identities() {
        let f = FiniteField::of_order(3).unwrap();
        let s = random_state(3, 3, 5);
        let b = [1, 0, 2];
        assert!(close(&shift(&f, &s, &[0, 0, 0]).unwrap(), &s, 0.0));
        let back = shift(&f, &shift(&f, &s, &b).unwrap(), &f.neg_vec(&b)).unwrap();
        assert!(close(&back, &s, 0.0));
        let lhs = qft_dense(&f, &shift(&f, &s, &b).unwrap());
        let rhs = phase(&f, &qft_dense(&f, &s), &b).unwrap();
        assert!(close(&lhs, &rhs, 1e-10));
    }

    #[test]
    fn product_structure() {
        let f = FiniteField::of_order(4).unwrap();
        let p = NoiseProfile::new(4, 0.3f64).unwrap();
        let factors: Vec<_> = [0, 3, 1].iter().map(|&b| noisy_symbol_state(&p, b)).collect();
        let dense = DenseState::product(&factors).unwrap();
        let hats: Vec<_> = factors.iter().map(|s| qft_qudit(&f, s)).collect();
        assert!(close(&qft_dense(&f, &dense), &DenseState::product(&hats).unwrap(), 1e-12));
    }

    #[test]
    fn overlaps() {
        let p = NoiseProfile::new(2, 0.1f64).unwrap();
        let a = noisy_symbol_state(&p, 0);
        let b = noisy_symbol_state(&p, 1);
        assert!((qudit_inner_product(&a, &a).unwrap().re - 1.0).abs() < 1e-15);
        let ov = qudit_inner_product(&a, &b).unwrap().norm();
        assert!((ov - 2.0 * (0.1f64 * 0.9).sqrt()).abs() < 1e-15);
        let e0 = QuditState::<f64>::basis(2, 0);
        let e1 = QuditState::<f64>::basis(2, 1);
        assert_eq!(qudit_inner_product(&e0, &e1).unwrap().norm(), 0.0);
        assert!(inner_product(&e0.to_dense(), &random_state(2, 2, 1)).is_err());
    }

    #[test]
    fn code_superposition_examples() {
        let f2 = Arc::new(FiniteField::new(2, 1).unwrap());
        let p = NoiseProfile::new(2, 0.1f64).unwrap();
        let zero = LinearCode::new(f2.clone(), crate::codes::Matrix::zeros(1, 3)).unwrap();
        let s = dense_code_superposition(&zero, &p).unwrap();
        for (x, a) in s.amplitudes().iter().enumerate() {
            let w = FieldVector::from_index(x, 2, 3).weight();
            assert!((a.re - p.f(w, 3)).abs() < 1e-15);
        }

        let rep = LinearCode::repetition(f2.clone(), 3);
        let hat = qft_dense(&f2, &dense_code_superposition(&rep, &p).unwrap());
        let dual = [0usize, 3, 5, 6];
        let scale = hat.amplitudes()[0].re / p.dual().f(0, 3);
        for (y, a) in hat.amplitudes().iter().enumerate() {
            if dual.contains(&y) {
                let w = FieldVector::from_index(y, 2, 3).weight();
                assert!((a.re - scale * p.dual().f(w, 3)).abs() < 1e-12);
            } else {
                assert!(a.norm() < 1e-12);
            }
        }

        let full = LinearCode::new(f2.clone(), crate::codes::Matrix::identity(3)).unwrap();
        let hat = qft_dense(&f2, &dense_code_superposition(&full, &p).unwrap());
        assert!((hat.amplitudes()[0].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn json_entries_round_trip() {
        let s = random_state(2, 2, 3);
        let json = serde_json::to_string(&s.to_entries()).unwrap();
        let back: Vec<DenseEntry> = serde_json::from_str(&json).unwrap();
        assert_eq!(DenseState::from_entries(2, 2, &back).unwrap(), s);
    }
}
