//! Simulation of the quantum decoding problem over random linear codes.
//!
//! The crate covers finite fields and random codes ([`gf`], [`codes`]), the
//! noise algebra behind the Fourier-dual map ([`noise`]), small dense
//! quantum states for cross-checks ([`qstate`]), the measurements used by the
//! decoders ([`measure`]), end-to-end solvers ([`solvers`]) and the code
//! version of Regev's reduction ([`regev`]). [`verify`] bundles the
//! brute-force and dense-state cross-checks.
//!
//! Closed-form numerics are generic over [`Real`] (`f32` or `f64`). Solvers,
//! samplers and the dense eigen-decomposition run in `f64`.

pub mod codes;
pub mod error;
pub mod gf;
pub mod measure;
pub mod noise;
pub mod qstate;
pub mod regev;
pub mod rng;
pub mod scalar;
pub mod solvers;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::Real;

pub type NoiseProfileF64 = noise::NoiseProfile<f64>;
pub type NoiseProfileF32 = noise::NoiseProfile<f32>;
pub type BinaryPhaseProfileF64 = noise::BinaryPhaseProfile<f64>;
pub type ThresholdSetF64 = noise::ThresholdSet<f64>;
pub type QuditStateF64 = qstate::QuditState<f64>;
pub type DenseStateF64 = qstate::DenseState<f64>;
pub type DenseStateF32 = qstate::DenseState<f32>;
pub type PgmSpectrumF64 = measure::PgmSpectrum<f64>;
pub type PgmSpectrumF32 = measure::PgmSpectrum<f32>;
