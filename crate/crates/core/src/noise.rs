//! Noise profiles and the Gilbert–Varshamov quantities around them.
//!
//! The central map is the Fourier dual
//! `ω⊥ = (√((q-1)(1-ω)) - √ω)² / q`, which sends the q-ary symmetric profile
//! with parameter `ω` to the profile of its quantum Fourier transform.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::gf::{Elem, FieldVector};
use crate::scalar::Real;

const BISECTION_TOL: f64 = 1e-12;
const BISECTION_MAX_ITER: usize = 200;

fn check_q(q: u32) -> Result<()> {
    if q < 2 {
        return Err(Error::InvalidParameter(format!("alphabet size {q} < 2")));
    }
    Ok(())
}

/// `(q-1)/q`, the largest meaningful noise rate.
pub fn max_noise<T: Real>(q: u32) -> T {
    T::lit((q - 1) as f64 / q as f64)
}

/// Accepts values a rounding error past an endpoint and clamps them.
fn clamp_domain<T: Real>(what: &'static str, x: T, lo: T, hi: T, range: &'static str) -> Result<T> {
    let slack = T::lit(1e-12);
    if x.is_nan() || x < lo - slack || x > hi + slack {
        return Err(domain(what, x.as_f64(), range));
    }
    Ok(x.max(lo).min(hi))
}

/// `x ln x` with the continuous value 0 at 0.
fn xlnx<T: Real>(x: T) -> T {
    if x <= T::zero() {
        T::zero()
    } else {
        x * x.ln()
    }
}

/// q-ary entropy `h_q(x) = x log_q(q-1) - x log_q x - (1-x) log_q(1-x)`.
///
/// At `x = 1` this takes the limit value `log_q(q-1)`.
pub fn entropy_q<T: Real>(q: u32, x: T) -> Result<T> {
    check_q(q)?;
    let x = clamp_domain("x", x, T::zero(), T::one(), "[0, 1]")?;
    let qf = T::lit(q as f64);
    let h = x * (qf - T::one()).ln() - xlnx(x) - xlnx(T::one() - x);
    Ok(h / qf.ln())
}

fn bisect<T: Real>(mut lo: T, mut hi: T, increasing: bool, mut f: impl FnMut(T) -> T, target: T) -> T {
    let two = T::lit(2.0);
    for _ in 0..BISECTION_MAX_ITER {
        if (hi - lo).as_f64() < BISECTION_TOL {
            break;
        }
        let mid = (lo + hi) / two;
        if mid <= lo || mid >= hi {
            break;
        }
        let below = f(mid) < target;
        if below == increasing {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo + hi) / two
}

/// Inverse of `h_q` on `[0, (q-1)/q]`, by bisection.
pub fn entropy_q_inv<T: Real>(q: u32, y: T) -> Result<T> {
    check_q(q)?;
    let y = clamp_domain("y", y, T::zero(), T::one(), "[0, 1]")?;
    if y == T::zero() {
        return Ok(T::zero());
    }
    if y == T::one() {
        return Ok(max_noise(q));
    }
    Ok(bisect(T::zero(), max_noise(q), true, |x| entropy_q(q, x).expect("in domain"), y))
}

/// Relative Gilbert–Varshamov distance `h_q^{-1}(1 - R)`.
pub fn delta_min<T: Real>(q: u32, rate: T) -> Result<T> {
    let rate = clamp_domain("R", rate, T::zero(), T::one(), "[0, 1]")?;
    entropy_q_inv(q, T::one() - rate)
}

/// Relative maximum weight: the root of `h_q(x) = R` on `[(q-1)/q, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum DeltaMax<T> {
    Value(T),
    Undefined,
}

pub fn delta_max<T: Real>(q: u32, rate: T) -> Result<DeltaMax<T>> {
    check_q(q)?;
    let rate = clamp_domain("R", rate, T::zero(), T::one(), "[0, 1]")?;
    let at_one = entropy_q(q, T::one())?;
    if rate < at_one {
        return Ok(DeltaMax::Undefined);
    }
    if rate == T::one() {
        return Ok(DeltaMax::Value(max_noise(q)));
    }
    let x = bisect(max_noise(q), T::one(), false, |x| entropy_q(q, x).expect("in domain"), rate);
    Ok(DeltaMax::Value(x))
}

/// Fourier-dual noise parameter `ω⊥`.
pub fn omega_perp<T: Real>(q: u32, omega: T) -> Result<T> {
    check_q(q)?;
    let omega = clamp_domain("omega", omega, T::zero(), max_noise(q), "[0, (q-1)/q]")?;
    if omega == T::zero() {
        return Ok(max_noise(q));
    }
    if omega == max_noise(q) {
        return Ok(T::zero());
    }
    let qf = T::lit(q as f64);
    let d = ((qf - T::one()) * (T::one() - omega)).sqrt() - omega.sqrt();
    Ok((d * d / qf).min(max_noise(q)))
}

/// Success probability `q ω⊥ / (q-1)` of unambiguous discrimination per symbol.
pub fn usd_success_prob<T: Real>(q: u32, omega: T) -> Result<T> {
    let perp = omega_perp(q, omega)?;
    let qf = T::lit(q as f64);
    Ok((qf * perp / (qf - T::one())).min(T::one()))
}

/// The three reference noise rates at a given code rate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdSet<T> {
    pub q: u32,
    pub rate: T,
    /// `⊥((q-1)R/q)`: below it the USD decoder succeeds.
    pub easy: T,
    /// `δ_min(R)`: classical decoding limit.
    pub classical: T,
    /// `⊥(δ_min(1-R))`: below it the PGM succeeds.
    pub tractable: T,
}

pub fn thresholds<T: Real>(q: u32, rate: T) -> Result<ThresholdSet<T>> {
    check_q(q)?;
    let rate = clamp_domain("R", rate, T::zero(), T::one(), "[0, 1]")?;
    let qf = T::lit(q as f64);
    let easy = omega_perp(q, (qf - T::one()) * rate / qf)?;
    let tractable = omega_perp(q, delta_min(q, T::one() - rate)?)?;
    let classical = delta_min(q, rate)?;
    Ok(ThresholdSet { q, rate, easy, classical, tractable })
}

/// q-ary symmetric noise: each coordinate is kept w.p. `1-ω` and replaced by
/// a uniform nonzero offset otherwise.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseProfile<T> {
    q: u32,
    omega: T,
    omega_perp: T,
}

impl<T: Real> NoiseProfile<T> {
    pub fn new(q: u32, omega: T) -> Result<Self> {
        let perp = omega_perp(q, omega)?;
        let omega = omega.max(T::zero()).min(max_noise(q));
        Ok(NoiseProfile { q, omega, omega_perp: perp })
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn omega(&self) -> T {
        self.omega
    }

    pub fn omega_perp(&self) -> T {
        self.omega_perp
    }

    /// Profile of the Fourier-transformed state.
    pub fn dual(&self) -> Self {
        NoiseProfile { q: self.q, omega: self.omega_perp, omega_perp: self.omega }
    }

    pub fn usd_success(&self) -> T {
        let qf = T::lit(self.q as f64);
        (qf * self.omega_perp / (qf - T::one())).min(T::one())
    }

    /// Single-symbol amplitude: `√(1-ω)` on the true symbol, `√(ω/(q-1))` elsewhere.
    pub fn symbol_amplitude(&self, on_symbol: bool) -> T {
        symbol_amplitude(self.q, self.omega, on_symbol)
    }

    /// `ln f(e)²` for an error of weight `w` in length `n`.
    pub fn ln_f_squared(&self, w: usize, n: usize) -> T {
        ln_weight_prob(self.q, self.omega, w, n)
    }

    /// `f(e)` for an error of weight `w` in length `n`.
    pub fn f(&self, w: usize, n: usize) -> T {
        (self.ln_f_squared(w, n) / T::lit(2.0)).exp()
    }

    /// `|f̂(y)|² = (ω⊥/(q-1))^w (1-ω⊥)^(n-w)` for `|y| = w`.
    pub fn f_hat_squared(&self, w: usize, n: usize) -> T {
        ln_weight_prob(self.q, self.omega_perp, w, n).exp()
    }

    /// Draws an error vector from the profile.
    pub fn sample_error<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> FieldVector {
        sample_error(self, n, rng)
    }
}

fn symbol_amplitude<T: Real>(q: u32, omega: T, on_symbol: bool) -> T {
    if on_symbol {
        (T::one() - omega).sqrt()
    } else {
        (omega / T::lit((q - 1) as f64)).sqrt()
    }
}

/// `ln((τ/(q-1))^w (1-τ)^(n-w))`, with `0 ln 0 = 0`.
fn ln_weight_prob<T: Real>(q: u32, tau: T, w: usize, n: usize) -> T {
    let mut acc = T::zero();
    if w > 0 {
        acc = acc + T::of_usize(w) * (tau / T::lit((q - 1) as f64)).ln();
    }
    if n > w {
        acc = acc + T::of_usize(n - w) * (T::one() - tau).ln();
    }
    acc
}

/// I.i.d. q-ary symmetric error of length `n`.
pub fn sample_error<T: Real, R: Rng + ?Sized>(profile: &NoiseProfile<T>, n: usize, rng: &mut R) -> FieldVector {
    let omega = profile.omega().as_f64();
    let q = profile.q();
    FieldVector(
        (0..n)
            .map(|_| if rng.random::<f64>() < omega { rng.random_range(1..q) as Elem } else { 0 })
            .collect(),
    )
}

/// Binary states `ζ_b = √(1-t)|b⟩ + e^{iθ}√t|1-b⟩`, the general-phase family.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BinaryPhaseProfile<T> {
    t: T,
    theta: T,
}

/// Cosine with values within a few ulps of zero returned as exactly zero,
/// since multiples of π/2 are not representable.
pub fn snapped_cos<T: Real>(theta: T) -> T {
    let c = theta.cos();
    if c.abs() <= T::epsilon() * T::lit(4.0) {
        T::zero()
    } else {
        c
    }
}

impl<T: Real> BinaryPhaseProfile<T> {
    pub fn new(t: T, theta: T) -> Result<Self> {
        let t = clamp_domain("t", t, T::zero(), T::lit(0.5), "[0, 1/2]")?;
        if theta.is_nan() || theta < T::zero() || theta >= T::TAU() {
            return Err(domain("theta", theta.as_f64(), "[0, 2π)"));
        }
        Ok(BinaryPhaseProfile { t, theta })
    }

    pub fn t(&self) -> T {
        self.t
    }

    pub fn theta(&self) -> T {
        self.theta
    }

    fn root(&self) -> T {
        T::lit(2.0) * (self.t * (T::one() - self.t)).sqrt()
    }

    /// `|⟨ζ_0|ζ_1⟩| = 2√(t(1-t))|cos θ|`.
    pub fn overlap(&self) -> T {
        (self.root() * snapped_cos(self.theta).abs()).min(T::one())
    }

    pub fn usd_success(&self) -> T {
        T::one() - self.overlap()
    }

    /// `p(t,θ) = (1 - 2√(t(1-t)) cos θ)/2`, the flip rate after the Fourier transform.
    pub fn dual_flip_prob(&self) -> T {
        (T::one() - self.root() * snapped_cos(self.theta)) / T::lit(2.0)
    }
}

/// Binary channels.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Channel {
    /// Flips w.p. `omega`.
    Bsc { omega: f64 },
    /// Erases w.p. `p`.
    Bec { p: f64 },
    /// Erases w.p. `p`, otherwise flips w.p. `omega`.
    Bseec { omega: f64, p: f64 },
}

/// Channel output: a symbol or an erasure.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ChannelOutput {
    Symbol(u8),
    Erased,
}

impl Channel {
    pub fn validate(&self) -> Result<()> {
        let check = |what, v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(domain(what, v, "[0, 1]"))
            }
        };
        match *self {
            Channel::Bsc { omega } => check("omega", omega),
            Channel::Bec { p } => check("p", p),
            Channel::Bseec { omega, p } => check("omega", omega).and(check("p", p)),
        }
    }

    /// `(erase, flip)` probabilities, the flip being conditional on no erasure.
    fn rates(&self) -> (f64, f64) {
        match *self {
            Channel::Bsc { omega } => (0.0, omega),
            Channel::Bec { p } => (p, 0.0),
            Channel::Bseec { omega, p } => (p, omega),
        }
    }

    /// Output probabilities `(b, 1-b, erased)`.
    pub fn output_probabilities(&self) -> (f64, f64, f64) {
        let (p, omega) = self.rates();
        ((1.0 - p) * (1.0 - omega), (1.0 - p) * omega, p)
    }

    pub fn sample<R: Rng + ?Sized>(&self, b: u8, rng: &mut R) -> ChannelOutput {
        let (p, omega) = self.rates();
        if rng.random::<f64>() < p {
            return ChannelOutput::Erased;
        }
        if rng.random::<f64>() < omega {
            ChannelOutput::Symbol(1 - (b & 1))
        } else {
            ChannelOutput::Symbol(b & 1)
        }
    }
}

/// Sends bit `b` through `channel`.
pub fn channel_sample<R: Rng + ?Sized>(channel: Channel, b: u8, rng: &mut R) -> ChannelOutput {
    channel.sample(b, rng)
}
