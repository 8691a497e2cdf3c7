//! Dense construction of the pretty-good measurement, used to cross-check
//! the spectral formula on small codes.
//!
//! With `A` the matrix whose columns are the code states, the PGM vectors are
//! `Y = A G^{-1/2}` on the support of the Gram matrix `G = A†A`, and the
//! success probability for `c` is `|(√G)_cc|²`. This equals the
//! `ρ^{-1/2}` construction because `AA†` and `A†A` share their nonzero
//! spectrum. The Fourier transform is unitary, so it is skipped here.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::NoiseModel;
use crate::codes::LinearCode;
use crate::error::{Error, Result};
use crate::gf::FieldVector;
use crate::qstate::DenseState;

/// Largest `q^n` accepted by [`pgm_dense_oracle`].
pub const DENSE_PGM_BUDGET: usize = 1 << 12;

/// Eigenvalues below this fraction of the largest are treated as zero.
const CUTOFF: f64 = 1e-13;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DensePgm {
    pub codewords: Vec<FieldVector>,
    /// `|(√G)_cc|²` per codeword.
    pub per_codeword: Vec<f64>,
    /// `|⟨Y_c|ψ_c⟩|²` from the explicit measurement vectors.
    pub measured: Vec<f64>,
    /// Largest entry of `Y†Y - Π` with `Π` the projector onto the support.
    pub completeness_error: f64,
    pub p_pgm: f64,
}

pub fn pgm_dense_oracle(code: &LinearCode, noise: &NoiseModel) -> Result<DensePgm> {
    let (q, n) = (code.q(), code.n());
    if noise.q() != q {
        return Err(Error::DimensionMismatch { expected: q as usize, found: noise.q() as usize });
    }
    let dim = (q as f64).powi(n as i32);
    if dim > DENSE_PGM_BUDGET as f64 {
        return Err(Error::BudgetExceeded { needed: dim, budget: DENSE_PGM_BUDGET as u64 });
    }
    let codewords = code.codewords(DENSE_PGM_BUDGET as u64)?;
    let m = codewords.len();
    let dim = dim as usize;

    let mut a = DMatrix::<Complex64>::zeros(dim, m);
    for (j, c) in codewords.iter().enumerate() {
        let factors: Vec<_> = c.0.iter().map(|&b| noise.symbol_state(b)).collect();
        let psi = DenseState::product(&factors)?;
        for (i, v) in psi.amplitudes().iter().enumerate() {
            a[(i, j)] = *v;
        }
    }
    let gram = a.adjoint() * &a;
    let eig = gram.clone().symmetric_eigen();
    let lmax = eig.eigenvalues.iter().cloned().fold(0.0f64, f64::max);
    let v = &eig.eigenvectors;
    let mut sqrt_d = DMatrix::<Complex64>::zeros(m, m);
    let mut inv_sqrt_d = DMatrix::<Complex64>::zeros(m, m);
    let mut proj_d = DMatrix::<Complex64>::zeros(m, m);
    for (i, &l) in eig.eigenvalues.iter().enumerate() {
        if l > CUTOFF * lmax {
            sqrt_d[(i, i)] = Complex64::new(l.sqrt(), 0.0);
            inv_sqrt_d[(i, i)] = Complex64::new(1.0 / l.sqrt(), 0.0);
            proj_d[(i, i)] = Complex64::new(1.0, 0.0);
        }
    }
    let sqrt_g = v * sqrt_d * v.adjoint();
    let inv_sqrt_g = v * inv_sqrt_d * v.adjoint();
    let proj = v * proj_d * v.adjoint();

    let y = &a * &inv_sqrt_g;
    let overlaps = y.adjoint() * &a;
    let per_codeword: Vec<f64> = (0..m).map(|c| sqrt_g[(c, c)].norm_sqr()).collect();
    let measured: Vec<f64> = (0..m).map(|c| overlaps[(c, c)].norm_sqr()).collect();
    let completeness_error = (y.adjoint() * &y - proj).iter().map(|z| z.norm()).fold(0.0, f64::max);
    let p_pgm = per_codeword.iter().sum::<f64>() / m as f64;
    Ok(DensePgm { codewords, per_codeword, measured, completeness_error, p_pgm })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::FiniteField;
    use crate::measure::PgmMeasurement;
    use crate::rng::stream_rng;
    use std::sync::Arc;

    #[test]
    fn matches_spectral_formula() {
        for (q, n, k) in [(2, 6, 3), (3, 4, 2), (4, 3, 1), (5, 3, 2)] {
            let field = Arc::new(FiniteField::of_order(q).unwrap());
            let code = LinearCode::random(field, n, k, &mut stream_rng(11, q as u64));
            let noise = NoiseModel::symmetric(q, 0.2).unwrap();
            let dense = pgm_dense_oracle(&code, &noise).unwrap();
            let spectral = PgmMeasurement::new(&code, &noise, 1 << 16).unwrap();
            assert!((dense.p_pgm - spectral.success_probability()).abs() < 1e-10, "q={q}");
            for (a, b) in dense.per_codeword.iter().zip(&dense.measured) {
                assert!((a - b).abs() < 1e-10);
                assert!((a - dense.p_pgm).abs() < 1e-10);
            }
            assert!(dense.completeness_error < 1e-9);
        }
    }

    #[test]
    fn phase_noise_matches() {
        let code = LinearCode::random(Arc::new(FiniteField::new(2, 1).unwrap()), 6, 2, &mut stream_rng(12, 0));
        let noise = NoiseModel::phase(0.15, 1.0).unwrap();
        let dense = pgm_dense_oracle(&code, &noise).unwrap();
        let spectral = PgmMeasurement::new(&code, &noise, 1 << 16).unwrap();
        assert!((dense.p_pgm - spectral.success_probability()).abs() < 1e-10);
    }

    #[test]
    fn over_budget() {
        let code = LinearCode::repetition(Arc::new(FiniteField::new(2, 1).unwrap()), 13);
        assert!(matches!(
            pgm_dense_oracle(&code, &NoiseModel::symmetric(2, 0.1).unwrap()),
            Err(Error::BudgetExceeded { .. })
        ));
    }
}
