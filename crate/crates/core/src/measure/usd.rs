use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::gf::Elem;
use crate::noise::{omega_perp, BinaryPhaseProfile, NoiseProfile};
use crate::scalar::Real;

/// Optimal two-state discrimination, `(1 + √(1-u²))/2` for overlap `u`.
pub fn helstrom_success<T: Real>(overlap: T) -> Result<T> {
    if overlap.is_nan() || overlap < T::zero() || overlap > T::one() {
        return Err(domain("overlap", overlap.as_f64(), "[0, 1]"));
    }
    Ok((T::one() + (T::one() - overlap * overlap).sqrt()) / T::lit(2.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum UsdOutcome {
    Symbol(Elem),
    Abort,
}

impl UsdOutcome {
    pub fn symbol(self) -> Option<Elem> {
        match self {
            UsdOutcome::Symbol(a) => Some(a),
            UsdOutcome::Abort => None,
        }
    }
}

/// Partial discrimination either leaves an `ω'`-noisy copy of the symbol or aborts.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum PartialUsdOutcome {
    /// The post-measurement state is `ψ^{ω'}_b`; `symbol` is its computational readout.
    Kept { symbol: Elem, residual_omega: f64 },
    Abort,
}

fn usd_draw<R: Rng + ?Sized>(p: f64, b: Elem, rng: &mut R) -> UsdOutcome {
    if rng.random::<f64>() < p {
        UsdOutcome::Symbol(b)
    } else {
        UsdOutcome::Abort
    }
}

/// Binary USD on `ψ^ω_b`, succeeding w.p. `1 - 2√(ω(1-ω))`.
pub fn binary_usd_sample<R: Rng + ?Sized>(omega: f64, b: Elem, rng: &mut R) -> Result<UsdOutcome> {
    let p = NoiseProfile::new(2, omega)?;
    Ok(usd_draw(p.usd_success(), b, rng))
}

/// q-ary USD on `ψ^ω_b`, succeeding w.p. `qω⊥/(q-1)`.
pub fn qary_usd_sample<T: Real, R: Rng + ?Sized>(profile: &NoiseProfile<T>, b: Elem, rng: &mut R) -> UsdOutcome {
    usd_draw(profile.usd_success().as_f64(), b, rng)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartialUsdProbabilities {
    /// `u = ω⊥ / ω'⊥`.
    pub keep: f64,
    pub abort: f64,
}

/// Keep/abort probabilities for the map `ψ^ω_b → ψ^{ω'}_b`, `0 ≤ ω' ≤ ω ≤ 1/2`.
pub fn partial_usd_probabilities(omega: f64, omega_prime: f64) -> Result<PartialUsdProbabilities> {
    if !(0.0..=0.5).contains(&omega) {
        return Err(domain("omega", omega, "[0, 1/2]"));
    }
    if !(0.0..=omega).contains(&omega_prime) {
        return Err(domain("omega_prime", omega_prime, "[0, omega]"));
    }
    let keep = if omega_prime == omega { 1.0 } else { omega_perp(2, omega)? / omega_perp(2, omega_prime)? };
    Ok(PartialUsdProbabilities { keep, abort: 1.0 - keep })
}

pub fn partial_usd_sample<R: Rng + ?Sized>(
    omega: f64,
    omega_prime: f64,
    b: Elem,
    rng: &mut R,
) -> Result<PartialUsdOutcome> {
    let pr = partial_usd_probabilities(omega, omega_prime)?;
    if rng.random::<f64>() >= pr.keep {
        return Ok(PartialUsdOutcome::Abort);
    }
    let symbol = if rng.random::<f64>() < omega_prime { 1 - b } else { b };
    Ok(PartialUsdOutcome::Kept { symbol, residual_omega: omega_prime })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseUsdParams<T> {
    pub overlap: T,
    pub usd_success: T,
    pub dual_flip_prob: T,
}

pub fn phase_usd_params<T: Real>(t: T, theta: T) -> Result<PhaseUsdParams<T>> {
    let p = BinaryPhaseProfile::new(t, theta)?;
    Ok(PhaseUsdParams { overlap: p.overlap(), usd_success: p.usd_success(), dual_flip_prob: p.dual_flip_prob() })
}

pub fn phase_usd_sample<T: Real, R: Rng + ?Sized>(profile: &BinaryPhaseProfile<T>, b: Elem, rng: &mut R) -> UsdOutcome {
    usd_draw(profile.usd_success().as_f64(), b, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;

    #[test]
    fn helstrom_endpoints() {
        assert_eq!(helstrom_success(0.0f64).unwrap(), 1.0);
        assert_eq!(helstrom_success(1.0f64).unwrap(), 0.5);
        assert!(helstrom_success(1.5f64).is_err());
    }

    #[test]
    fn helstrom_beats_usd() {
        for i in 0..=50 {
            let omega = 0.5 * i as f64 / 50.0;
            let u = 2.0 * (omega * (1.0 - omega)).sqrt();
            let usd = NoiseProfile::new(2, omega).unwrap().usd_success();
            assert!(helstrom_success(u).unwrap() >= usd - 1e-15);
        }
    }

    #[test]
    fn binary_usd_frequency() {
        let mut rng = stream_rng(1, 0);
        let omega = 0.1;
        let n = 200_000;
        let mut hits = 0;
        for _ in 0..n {
            match binary_usd_sample(omega, 1, &mut rng).unwrap() {
                UsdOutcome::Symbol(b) => {
                    assert_eq!(b, 1);
                    hits += 1;
                }
                UsdOutcome::Abort => {}
            }
        }
        let p = 1.0 - 2.0 * (0.09f64).sqrt();
        let sd = (p * (1.0 - p) / n as f64).sqrt();
        assert!((hits as f64 / n as f64 - p).abs() < 5.0 * sd);
    }

    #[test]
    fn partial_keep_probability() {
        let pr = partial_usd_probabilities(0.2, 0.2).unwrap();
        assert_eq!(pr.keep, 1.0);
        let pr = partial_usd_probabilities(0.2, 0.0).unwrap();
        let full = NoiseProfile::new(2, 0.2).unwrap().usd_success();
        assert!((pr.keep - full).abs() < 1e-15);
        let pr = partial_usd_probabilities(0.3, 0.1).unwrap();
        let want = omega_perp(2, 0.3).unwrap() / omega_perp(2, 0.1).unwrap();
        assert!((pr.keep - want).abs() < 1e-15);
        assert!(partial_usd_probabilities(0.1, 0.3).is_err());
    }

    #[test]
    fn partial_readout_noise() {
        let mut rng = stream_rng(2, 0);
        let (mut kept, mut flips) = (0u32, 0u32);
        for _ in 0..100_000 {
            if let PartialUsdOutcome::Kept { symbol, .. } = partial_usd_sample(0.3, 0.1, 0, &mut rng).unwrap() {
                kept += 1;
                flips += symbol as u32;
            }
        }
        let keep = partial_usd_probabilities(0.3, 0.1).unwrap().keep;
        assert!((kept as f64 / 1e5 - keep).abs() < 0.01);
        assert!((flips as f64 / kept as f64 - 0.1).abs() < 0.01);
    }

    #[test]
    fn phase_params() {
        let p = phase_usd_params(0.1f64, 0.0).unwrap();
        assert!((p.overlap - 0.6).abs() < 1e-15);
        assert!((p.dual_flip_prob - 0.2).abs() < 1e-15);
        let p = phase_usd_params(0.1f64, std::f64::consts::FRAC_PI_2).unwrap();
        assert_eq!(p.overlap, 0.0);
        assert_eq!(p.usd_success, 1.0);
        assert_eq!(p.dual_flip_prob, 0.5);
    }
}
