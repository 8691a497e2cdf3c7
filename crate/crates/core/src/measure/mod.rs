//! Measurements on noisy codeword states.
//!
//! Coordinate-wise unambiguous discrimination (full and partial), the
//! pretty-good measurement through its coset spectrum, and a dense oracle
//! for the latter.

mod dense;
mod pgm;
mod usd;

pub use dense::{pgm_dense_oracle, DensePgm, DENSE_PGM_BUDGET};
pub use pgm::{pgm_spectrum, PgmMeasurement, PgmSpectrum};
pub use usd::{
    binary_usd_sample, helstrom_success, partial_usd_probabilities, partial_usd_sample, phase_usd_params,
    phase_usd_sample, qary_usd_sample, PartialUsdOutcome, PartialUsdProbabilities, PhaseUsdParams, UsdOutcome,
};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::gf::Elem;
use crate::noise::{BinaryPhaseProfile, NoiseProfile};
use crate::qstate::{noisy_symbol_state, QuditState};

/// Per-coordinate noise on the codeword register.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NoiseModel {
    /// q-ary symmetric amplitudes `√(1-ω)`, `√(ω/(q-1))`.
    Symmetric(NoiseProfile<f64>),
    /// Binary `√(1-t)|b⟩ + e^{iθ}√t|1-b⟩`.
    Phase(BinaryPhaseProfile<f64>),
}

impl NoiseModel {
    pub fn symmetric(q: u32, omega: f64) -> Result<Self> {
        Ok(NoiseModel::Symmetric(NoiseProfile::new(q, omega)?))
    }

    pub fn phase(t: f64, theta: f64) -> Result<Self> {
        Ok(NoiseModel::Phase(BinaryPhaseProfile::new(t, theta)?))
    }

    pub fn q(&self) -> u32 {
        match self {
            NoiseModel::Symmetric(p) => p.q(),
            NoiseModel::Phase(_) => 2,
        }
    }

    /// Probability that a computational-basis measurement reads a wrong symbol.
    pub fn flip_rate(&self) -> f64 {
        match self {
            NoiseModel::Symmetric(p) => p.omega(),
            NoiseModel::Phase(p) => p.t(),
        }
    }

    /// Nonzero mass of one Fourier-transformed symbol.
    pub fn dual_flip(&self) -> f64 {
        match self {
            NoiseModel::Symmetric(p) => p.omega_perp(),
            NoiseModel::Phase(p) => p.dual_flip_prob(),
        }
    }

    pub fn usd_success(&self) -> f64 {
        match self {
            NoiseModel::Symmetric(p) => p.usd_success(),
            NoiseModel::Phase(p) => p.usd_success(),
        }
    }

    pub fn symbol_state(&self, b: Elem) -> QuditState<f64> {
        match self {
            NoiseModel::Symmetric(p) => noisy_symbol_state(p, b),
            NoiseModel::Phase(p) => {
                let on = Complex64::new((1.0 - p.t()).sqrt(), 0.0);
                let off = Complex64::from_polar(p.t().sqrt(), p.theta());
                QuditState::new(if b == 0 { vec![on, off] } else { vec![off, on] })
            }
        }
    }
}
