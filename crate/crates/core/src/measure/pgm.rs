//! The pretty-good measurement on `{ψ̂_c : c ∈ C}`.
//!
//! In the Fourier basis the states split over the shifted dual codes:
//! `ψ̂_c = Σ_s χ_c(u_s) W_s` with orthogonal `W_s` of norm `n_s`. The
//! measurement therefore reduces to a character transform of `(n_s)`.

use num_complex::Complex;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::NoiseModel;
use crate::codes::{CosetSpectra, LinearCode};
use crate::error::{Error, Result};
use crate::gf::{Elem, FieldVector};
use crate::noise::NoiseProfile;
use crate::qstate::{qft_dense, DenseState};
use crate::scalar::Real;

/// Coset norms `n_s` and the PGM success probability.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PgmSpectrum<T> {
    pub q: u32,
    pub n: usize,
    pub k: usize,
    pub omega: T,
    /// Indexed by the little-endian index of `s ∈ F_q^k`.
    pub n_s: Vec<T>,
    pub p_pgm: T,
    #[serde(skip)]
    pub rank: usize,
    /// Per-symbol nonzero mass of the transformed noise, `ω⊥` for symmetric noise.
    #[serde(skip)]
    pub dual_flip: T,
}

impl<T: Real> PgmSpectrum<T> {
    /// `n_s² = Σ_t a_s(t) (τ/(q-1))^t (1-τ)^(n-t)` and `P = (Σ n_s)² / |C|`.
    pub fn from_spectra(spectra: &CosetSpectra, omega: T, dual_flip: T) -> Self {
        let (q, n) = (spectra.q, spectra.n);
        let qm1 = T::lit((q - 1) as f64);
        let weights: Vec<T> = (0..=n)
            .map(|t| {
                let mut v = T::one();
                if t > 0 {
                    v = v * (dual_flip / qm1).powi(t as i32);
                }
                if n > t {
                    v = v * (T::one() - dual_flip).powi((n - t) as i32);
                }
                v
            })
            .collect();
        let n_s: Vec<T> = spectra
            .iter()
            .map(|row| row.iter().zip(&weights).map(|(&a, &w)| T::lit(a as f64) * w).sum::<T>().sqrt())
            .collect();
        let total: T = n_s.iter().copied().sum();
        let size = T::lit(q as f64).powi(spectra.rank as i32);
        let p_pgm = (total * total / size).min(T::one());
        PgmSpectrum { q, n, k: spectra.k, omega, n_s, p_pgm, rank: spectra.rank, dual_flip }
    }

    /// `Σ_s n_s²`, which is 1 for a normalised state.
    pub fn total_norm_sqr(&self) -> T {
        self.n_s.iter().map(|&x| x * x).sum()
    }

    /// `n_0`, the norm on the dual code itself.
    pub fn n_zero(&self) -> T {
        self.n_s[0]
    }

    /// Interval containing the optimal success probability, `[P, √P]`.
    pub fn optimal_bounds(&self) -> (T, T) {
        (self.p_pgm, self.p_pgm.sqrt())
    }
}

/// Spectrum of `code` under symmetric noise.
pub fn pgm_spectrum<T: Real>(code: &LinearCode, profile: &NoiseProfile<T>, budget: u64) -> Result<PgmSpectrum<T>> {
    if profile.q() != code.q() {
        return Err(Error::DimensionMismatch { expected: code.q() as usize, found: profile.q() as usize });
    }
    let spectra = CosetSpectra::compute(code, budget)?;
    Ok(PgmSpectrum::from_spectra(&spectra, profile.omega(), profile.omega_perp()))
}

/// PGM outcome distribution for one code.
///
/// Measuring `ψ̂_c` returns `c - dG` where `d ∈ F_q^k` is drawn with
/// probability `|N̂(d)|²`, `N̂(d) = q^{-k/2} Σ_s χ_d(s) n_s`. The law of `d`
/// does not depend on `c`.
#[derive(Clone, Debug)]
pub struct PgmMeasurement {
    spectrum: PgmSpectrum<f64>,
    shift_probs: Vec<f64>,
    sampler: WeightedIndex<f64>,
}

impl PgmMeasurement {
    pub fn new(code: &LinearCode, noise: &NoiseModel, budget: u64) -> Result<Self> {
        let spectra = CosetSpectra::compute(code, budget)?;
        Self::from_spectra(code, &spectra, noise)
    }

    pub fn from_spectra(code: &LinearCode, spectra: &CosetSpectra, noise: &NoiseModel) -> Result<Self> {
        if noise.q() != code.q() {
            return Err(Error::DimensionMismatch { expected: code.q() as usize, found: noise.q() as usize });
        }
        let spectrum = PgmSpectrum::from_spectra(spectra, noise.flip_rate(), noise.dual_flip());
        let amps = spectrum.n_s.iter().map(|&x| Complex::new(x, 0.0)).collect();
        let state = DenseState::from_amplitudes(code.q(), code.k(), amps)?;
        let shift_probs = qft_dense(code.field(), &state).probabilities();
        let sampler = WeightedIndex::new(&shift_probs)
            .map_err(|e| Error::InvalidParameter(format!("PGM outcome weights: {e}")))?;
        Ok(PgmMeasurement { spectrum, shift_probs, sampler })
    }

    pub fn spectrum(&self) -> &PgmSpectrum<f64> {
        &self.spectrum
    }

    pub fn success_probability(&self) -> f64 {
        self.spectrum.p_pgm
    }

    /// `Pr[d]` indexed by the little-endian index of `d`.
    pub fn shift_probabilities(&self) -> &[f64] {
        &self.shift_probs
    }

    /// Draws the message offset `d`.
    pub fn sample_shift<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<Elem> {
        let idx = self.sampler.sample(rng);
        FieldVector::from_index(idx, self.spectrum.q, self.spectrum.k).0
    }
}
