//! Regev's reduction for codes: short codewords of `C'` from a quantum
//! decoder for its dual `C = (C')⊥`.
//!
//! [`ScpInstance`] fixes the naming once. The target code is `C'` with
//! target relative weight `ω'`; the decoder works on `C` with noise
//! `ω = ⊥(ω')`. Everything below computes with `C` and `ω` and reports
//! in terms of `C'` and `ω'`.

use std::sync::Arc;

use num_complex::Complex;
use rand::seq::IndexedRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::codes::{default_prange_rounds, prange_search, prange_target, CosetSpectra, LinearCode, Matrix};
use crate::error::{Error, Result};
use crate::gf::{Elem, FieldVector, FiniteField};
use crate::measure::PgmSpectrum;
use crate::noise::{omega_perp, NoiseProfile};
use crate::qstate::{qft_dense, DenseState};
use crate::rng::stream_rng;

/// Draws of `J` before the USD path gives up.
pub const MAX_J_ATTEMPTS: usize = 10_000;
/// Redraws of `J` allowed when `(C_J)⊥` is trivial.
pub const MAX_DEGENERATE_RETRIES: usize = 32;

/// Short-codeword instance: find a word of `C'` of weight about `ω'n`.
#[derive(Clone, Debug)]
pub struct ScpInstance {
    code_prime: LinearCode,
    code: LinearCode,
    omega_prime: f64,
    omega: f64,
}

impl ScpInstance {
    pub fn new(code_prime: LinearCode, omega_prime: f64) -> Result<Self> {
        let q = code_prime.q();
        let omega = omega_perp(q, omega_prime)?;
        let code = code_prime.dual();
        Ok(ScpInstance { code_prime, code, omega_prime, omega })
    }

    /// Random `[n, k']` target code.
    pub fn random<R: Rng + ?Sized>(
        field: Arc<FiniteField>,
        n: usize,
        k_prime: usize,
        omega_prime: f64,
        rng: &mut R,
    ) -> Result<Self> {
        if k_prime > n {
            return Err(Error::InvalidParameter(format!("k' = {k_prime} exceeds n = {n}")));
        }
        Self::new(LinearCode::random(field, n, k_prime, rng), omega_prime)
    }

    pub fn q(&self) -> u32 {
        self.code.q()
    }

    pub fn n(&self) -> usize {
        self.code.n()
    }

    /// The target code `C'`.
    pub fn code_prime(&self) -> &LinearCode {
        &self.code_prime
    }

    /// The decoded code `C = (C')⊥`.
    pub fn code(&self) -> &LinearCode {
        &self.code
    }

    /// `dim C'`.
    pub fn k_prime(&self) -> usize {
        self.code_prime.rank()
    }

    /// `dim C = n - dim C'`.
    pub fn k(&self) -> usize {
        self.code.rank()
    }

    pub fn omega_prime(&self) -> f64 {
        self.omega_prime
    }

    /// Decoder noise `ω = ⊥(ω')`.
    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// `p_usd = qω'/(q-1)`, the USD success rate on `ψ^ω`.
    pub fn usd_success(&self) -> f64 {
        let q = self.q() as f64;
        (q * self.omega_prime / (q - 1.0)).min(1.0)
    }

    /// Rate of `C`.
    pub fn rate(&self) -> f64 {
        self.k() as f64 / self.n() as f64
    }

    /// Prange target `⌊(q-1)(n-k')/q⌋`.
    pub fn prange_target(&self) -> usize {
        prange_target(self.q(), self.n(), self.k_prime())
    }

    /// True for `C' = F_q^n`, where the only short word is zero.
    pub fn is_degenerate(&self) -> bool {
        self.k() == 0
    }

    /// `G c^T = 0` with `G` generating `C`, i.e. `c ∈ C'`.
    pub fn verify(&self, c: &[Elem]) -> Result<bool> {
        Ok(self.code.syndrome(c)?.iter().all(|&a| a == 0))
    }

    fn emit(&self, c: FieldVector) -> Result<ReductionOutcome> {
        if !self.verify(&c.0)? {
            return Err(Error::InvalidParameter("emitted word fails the parity check of C'".into()));
        }
        if c.is_zero() {
            return Ok(ReductionOutcome::Zero);
        }
        let weight = c.weight();
        Ok(ReductionOutcome::Codeword { word: c, weight })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReductionVariant {
    UsdPath,
    PgmPlain,
    PgmTweaked,
    PgmCounterexample,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ReductionOutcome {
    Codeword { word: FieldVector, weight: usize },
    Zero,
    /// The register carries no information on any codeword.
    Bottom,
    Abort,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReductionReport {
    pub variant: ReductionVariant,
    pub outcome: ReductionOutcome,
    /// Nonzero word of `C'` with weight at most `ω'n`.
    pub success: bool,
    pub j_size: Option<usize>,
    pub j_attempts: usize,
    pub dual_dim: Option<usize>,
    pub branch_probability: Option<f64>,
}

impl ReductionReport {
    fn new(variant: ReductionVariant, outcome: ReductionOutcome, omega_prime: f64, n: usize) -> Self {
        let success = match &outcome {
            ReductionOutcome::Codeword { weight, .. } => (*weight as f64) <= omega_prime * n as f64 + 1e-9,
            _ => false,
        };
        ReductionReport { variant, outcome, success, j_size: None, j_attempts: 0, dual_dim: None, branch_probability: None }
    }

    pub fn weight(&self) -> Option<usize> {
        match self.outcome {
            ReductionOutcome::Codeword { weight, .. } => Some(weight),
            ReductionOutcome::Zero => Some(0),
            _ => None,
        }
    }
}

fn draw_j<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Vec<usize> {
    (0..n).filter(|_| rng.random::<f64>() < p).collect()
}

/// Uniform element of `(C_J)⊥`, embedded with zeros outside `J`, and `dim (C_J)⊥`.
fn sample_shortened_dual<R: Rng + ?Sized>(code: &LinearCode, j: &[usize], rng: &mut R) -> (FieldVector, usize) {
    let field = code.field();
    let n = code.n();
    let basis = code.generator().select_columns(j).kernel(field);
    let m: Vec<Elem> = (0..basis.rows()).map(|_| rng.random_range(0..code.q()) as Elem).collect();
    let y = if basis.rows() == 0 { vec![0; j.len()] } else { basis.left_mul(field, &m).expect("message length") };
    (FieldVector::embed(&y, j, n), basis.rows())
}

/// One run of the USD path without the acceptance test on `|J|`: each
/// coordinate is revealed w.p. `p_usd`, and the dual register is measured.
pub fn sample_usd_path_raw<R: Rng + ?Sized>(scp: &ScpInstance, rng: &mut R) -> (Vec<usize>, FieldVector) {
    let j = draw_j(scp.n(), scp.usd_success(), rng);
    let (y, _) = sample_shortened_dual(&scp.code, &j, rng);
    (j, y)
}

/// USD path: reveal `J`, accept it when `(R+ε)n ≤ |J| ≤ p_usd·n`, then
/// Fourier-sample `(C_J)⊥`.
pub fn reduce_usd_path<R: Rng + ?Sized>(scp: &ScpInstance, rng: &mut R) -> Result<ReductionReport> {
    let n = scp.n();
    let p = scp.usd_success();
    let r = scp.rate();
    if p <= r {
        return Err(Error::InvalidParameter(format!("p_usd = {p} does not exceed R = {r}")));
    }
    let eps = (p - r) / 2.0;
    let lo = ((r + eps) * n as f64 - 1e-9).ceil() as usize;
    let hi = (p * n as f64 + 1e-9).floor() as usize;
    let mut attempts = 0;
    let mut degenerate = 0;
    loop {
        let j = loop {
            if attempts == MAX_J_ATTEMPTS {
                return Err(Error::JRejected { attempts });
            }
            attempts += 1;
            let j = draw_j(n, p, rng);
            if (lo..=hi).contains(&j.len()) {
                break j;
            }
        };
        let (y, dim) = sample_shortened_dual(&scp.code, &j, rng);
        if dim == 0 {
            degenerate += 1;
            if degenerate > MAX_DEGENERATE_RETRIES {
                return Err(Error::DegenerateDual);
            }
            continue;
        }
        let mut report = ReductionReport::new(ReductionVariant::UsdPath, scp.emit(y)?, scp.omega_prime, n);
        report.j_size = Some(j.len());
        report.j_attempts = attempts;
        report.dual_dim = Some(dim);
        return Ok(report);
    }
}

/// Aggregate of repeated USD-path runs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UsdPathSummary {
    pub trials: usize,
    pub accepted: usize,
    pub successes: usize,
    pub nonzero: usize,
    pub j_draws: usize,
    pub acceptance_rate: f64,
    pub mean_weight: f64,
    pub weight_histogram: Vec<u64>,
}

/// `trials` runs; run `i` draws from stream `i` of `seed`.
pub fn run_usd_path(scp: &ScpInstance, trials: usize, seed: u64) -> Result<(UsdPathSummary, Vec<ReductionReport>)> {
    let n = scp.n();
    let mut reports = Vec::with_capacity(trials);
    let mut hist = vec![0u64; n + 1];
    let (mut accepted, mut successes, mut nonzero, mut draws, mut wsum) = (0, 0, 0, 0, 0usize);
    for t in 0..trials {
        match reduce_usd_path(scp, &mut stream_rng(seed, t as u64)) {
            Ok(r) => {
                accepted += 1;
                draws += r.j_attempts;
                successes += r.success as usize;
                if let Some(w) = r.weight() {
                    hist[w] += 1;
                    wsum += w;
                    nonzero += (w > 0) as usize;
                }
                reports.push(r);
            }
            Err(Error::JRejected { attempts }) => draws += attempts,
            Err(e) => return Err(e),
        }
    }
    let summary = UsdPathSummary {
        trials,
        accepted,
        successes,
        nonzero,
        j_draws: draws,
        acceptance_rate: if draws == 0 { 0.0 } else { accepted as f64 / draws as f64 },
        mean_weight: if accepted == 0 { 0.0 } else { wsum as f64 / accepted as f64 },
        weight_histogram: hist,
    };
    Ok((summary, reports))
}

/// Exact law of `(J, y)` for [`sample_usd_path_raw`], computed from the
/// dense state `Σ_{x ∈ C_J} |x⟩` and its Fourier transform. Keys are
/// `(mask of J, index of y restricted to J)`.
pub fn usd_path_dense_distribution(scp: &ScpInstance) -> Result<Vec<((u64, usize), f64)>> {
    let (q, n) = (scp.q(), scp.n());
    if n > 20 || (q as f64).powi(n as i32) > (1 << 10) as f64 {
        return Err(Error::BudgetExceeded { needed: (q as f64).powi(n as i32), budget: 1 << 10 });
    }
    let field = scp.code.field();
    let p = scp.usd_success();
    let words = scp.code.codewords(1 << 20)?;
    let mut out = Vec::new();
    for mask in 0u64..(1 << n) {
        let j: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
        let pj = p.powi(j.len() as i32) * (1.0 - p).powi((n - j.len()) as i32);
        let mut punct: Vec<usize> = words.iter().map(|c| c.restrict(&j).index(q)).collect();
        punct.sort_unstable();
        punct.dedup();
        let mut state = DenseState::<f64>::zeros(q, j.len())?;
        let amp = 1.0 / (punct.len() as f64).sqrt();
        for &x in &punct {
            state.amplitudes_mut()[x] = Complex::new(amp, 0.0);
        }
        let hat = qft_dense(field, &state);
        for (y, pr) in hat.probabilities().into_iter().enumerate() {
            if pr > 1e-15 {
                out.push(((mask, y), pj * pr));
            }
        }
    }
    Ok(out)
}

/// Key of a raw sample in [`usd_path_dense_distribution`].
pub fn usd_path_key(q: u32, j: &[usize], y: &FieldVector) -> (u64, usize) {
    let mask = j.iter().fold(0u64, |m, &i| m | 1 << i);
    (mask, y.restrict(j).index(q))
}

/// Weight law of the Fourier-sampled dual register after an ideal decoder.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PgmPathDistribution {
    /// `p(t) = a(t)|f̂(t)|²/n_0²` with `a` the weight distribution of `C'`.
    pub p: Vec<f64>,
    pub p0: f64,
    pub n0: f64,
    pub p_pgm: f64,
}

/// Tweaked measurement: the zero word is split off the `s = 0` block.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TweakedDistribution {
    /// `p(0) = 0`, `p(t) ∝ a(t)|f̂(t)|²` for `t ≥ 1`.
    pub p: Vec<f64>,
    /// Exact success, `(Σ_{s≠0} n_s + √(n_0² - |f̂(0)|²))² / |C|`.
    pub success_prob: f64,
    /// `(√P - n_0/√|C|)²`, clamped at zero.
    pub lower_bound: f64,
    /// `(√P - 1/√|C|)²`, clamped at zero.
    pub coarse_bound: f64,
}

fn dual_weights(q: u32, n: usize, omega_prime: f64) -> Vec<f64> {
    let qm1 = (q - 1) as f64;
    (0..=n)
        .map(|t| {
            let a = if t > 0 { (omega_prime / qm1).powi(t as i32) } else { 1.0 };
            let b = if n > t { (1.0 - omega_prime).powi((n - t) as i32) } else { 1.0 };
            a * b
        })
        .collect()
}

fn spectrum_for(code: &LinearCode, profile: &NoiseProfile<f64>, budget: u64) -> Result<(CosetSpectra, PgmSpectrum<f64>)> {
    if profile.q() != code.q() {
        return Err(Error::DimensionMismatch { expected: code.q() as usize, found: profile.q() as usize });
    }
    let spectra = CosetSpectra::compute(code, budget)?;
    let spec = PgmSpectrum::from_spectra(&spectra, profile.omega(), profile.omega_perp());
    Ok((spectra, spec))
}

/// Plain PGM path on the decoded code `C` with noise `profile`.
pub fn pgm_final_distribution(code: &LinearCode, profile: &NoiseProfile<f64>, budget: u64) -> Result<PgmPathDistribution> {
    let (spectra, spec) = spectrum_for(code, profile, budget)?;
    let w = dual_weights(code.q(), code.n(), profile.omega_perp());
    let mass: Vec<f64> = spectra.dual_weight_distribution().iter().zip(&w).map(|(&a, &w)| a as f64 * w).collect();
    let n0_sq: f64 = mass.iter().sum();
    let p: Vec<f64> = mass.iter().map(|m| m / n0_sq).collect();
    Ok(PgmPathDistribution { p0: p[0], p, n0: spec.n_zero(), p_pgm: spec.p_pgm })
}

pub fn pgm_tweaked_distribution(code: &LinearCode, profile: &NoiseProfile<f64>, budget: u64) -> Result<TweakedDistribution> {
    let (spectra, spec) = spectrum_for(code, profile, budget)?;
    let w = dual_weights(code.q(), code.n(), profile.omega_perp());
    let a = spectra.dual_weight_distribution();
    if a[1..].iter().all(|&x| x == 0) {
        return Err(Error::DegenerateDual);
    }
    let mut p: Vec<f64> = a.iter().zip(&w).map(|(&a, &w)| a as f64 * w).collect();
    p[0] = 0.0;
    let rest: f64 = p.iter().sum();
    p.iter_mut().for_each(|x| *x /= rest);

    let size_sqrt = (code.q() as f64).powi(code.rank() as i32).sqrt();
    let others: f64 = spec.n_s[1..].iter().sum();
    let success_prob = ((others + rest.sqrt()) / size_sqrt).powi(2).min(1.0);
    let sp = spec.p_pgm.sqrt();
    let lower_bound = (sp - spec.n_zero() / size_sqrt).max(0.0).powi(2);
    let coarse_bound = (sp - 1.0 / size_sqrt).max(0.0).powi(2);
    Ok(TweakedDistribution { p, success_prob, lower_bound, coarse_bound })
}

/// Outcome law of the measurement that drops the `s = 0` block: a
/// codeword `c - dG` or `⊥`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleQdp {
    /// `Pr[d] = |q^{-k/2} Σ_{s≠0} χ_d(s) n_s|²` by message index.
    pub shift_probs: Vec<f64>,
    /// `Pr[⊥] = n_0²`.
    pub bottom: f64,
    /// `Pr[c' = c]`.
    pub success: f64,
    /// `(√P - n_0/√|C|)²`.
    pub branch_probability: f64,
}

pub fn counterexample_qdp_distribution(
    code: &LinearCode,
    profile: &NoiseProfile<f64>,
    budget: u64,
) -> Result<CounterexampleQdp> {
    let (_, spec) = spectrum_for(code, profile, budget)?;
    let (q, k) = (code.q(), code.k());
    let mut amps: Vec<Complex<f64>> = spec.n_s.iter().map(|&x| Complex::new(x, 0.0)).collect();
    amps[0] = Complex::new(0.0, 0.0);
    let hat = qft_dense(code.field(), &DenseState::from_amplitudes(q, k, amps)?);
    let shift_probs = hat.probabilities();
    let success = shift_probs
        .iter()
        .enumerate()
        .filter(|(d, _)| code.encode(&FieldVector::from_index(*d, q, k).0).map(|c| c.is_zero()).unwrap_or(false))
        .map(|(_, p)| p)
        .sum();
    let size_sqrt = (q as f64).powi(code.rank() as i32).sqrt();
    let branch_probability = (spec.p_pgm.sqrt() - spec.n_zero() / size_sqrt).max(0.0).powi(2);
    Ok(CounterexampleQdp { shift_probs, bottom: spec.n_zero().powi(2), success, branch_probability })
}

/// Uniform word of `C'` of weight `t`.
fn word_of_weight<R: Rng + ?Sized>(scp: &ScpInstance, t: usize, budget: u64, rng: &mut R) -> Result<FieldVector> {
    let mut words = Vec::new();
    scp.code_prime.for_each_codeword(budget, |w| {
        if crate::gf::weight(w) == t {
            words.push(FieldVector(w.to_vec()));
        }
    })?;
    words.choose(rng).cloned().ok_or(Error::DegenerateDual)
}

fn sample_weight<R: Rng + ?Sized>(p: &[f64], rng: &mut R) -> usize {
    let mut u = rng.random::<f64>();
    for (t, &x) in p.iter().enumerate() {
        if u < x {
            return t;
        }
        u -= x;
    }
    p.iter().rposition(|&x| x > 0.0).unwrap_or(0)
}

/// Runs the plain or tweaked PGM path once.
pub fn reduce_pgm_path<R: Rng + ?Sized>(
    scp: &ScpInstance,
    variant: ReductionVariant,
    budget: u64,
    rng: &mut R,
) -> Result<ReductionReport> {
    let profile = NoiseProfile::new(scp.q(), scp.omega)?;
    let n = scp.n();
    match variant {
        ReductionVariant::PgmPlain => {
            let d = pgm_final_distribution(&scp.code, &profile, budget)?;
            let t = sample_weight(&d.p, rng);
            let c = if t == 0 { FieldVector::zeros(n) } else { word_of_weight(scp, t, budget, rng)? };
            let mut r = ReductionReport::new(variant, scp.emit(c)?, scp.omega_prime, n);
            r.branch_probability = Some(d.p_pgm);
            Ok(r)
        }
        ReductionVariant::PgmTweaked => {
            let d = pgm_tweaked_distribution(&scp.code, &profile, budget)?;
            let outcome = if rng.random::<f64>() < d.success_prob {
                let t = sample_weight(&d.p, rng);
                scp.emit(word_of_weight(scp, t, budget, rng)?)?
            } else {
                ReductionOutcome::Abort
            };
            let mut r = ReductionReport::new(variant, outcome, scp.omega_prime, n);
            r.branch_probability = Some(d.success_prob);
            Ok(r)
        }
        ReductionVariant::PgmCounterexample => pgm_counterexample_run(&scp.code, &profile, budget, rng),
        ReductionVariant::UsdPath => reduce_usd_path(scp, rng),
    }
}

/// Counterexample variant: the 0-branch leaves `|⊥⟩`, so no codeword comes out.
pub fn pgm_counterexample_run<R: Rng + ?Sized>(
    code: &LinearCode,
    profile: &NoiseProfile<f64>,
    budget: u64,
    rng: &mut R,
) -> Result<ReductionReport> {
    let (_, spec) = spectrum_for(code, profile, budget)?;
    let size_sqrt = (code.q() as f64).powi(code.rank() as i32).sqrt();
    let branch = (spec.p_pgm.sqrt() - spec.n_zero() / size_sqrt).max(0.0).powi(2);
    let outcome = if rng.random::<f64>() < branch { ReductionOutcome::Bottom } else { ReductionOutcome::Abort };
    let mut r = ReductionReport::new(ReductionVariant::PgmCounterexample, outcome, profile.omega_perp(), code.n());
    r.branch_probability = Some(branch);
    Ok(r)
}

/// Paired Prange and USD-path weights on one instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrangeComparison {
    pub target: usize,
    pub degenerate_dual: bool,
    pub trials: usize,
    pub prange_hits: usize,
    /// Candidate weights over all non-singular Prange rounds.
    pub prange_histogram: Vec<u64>,
    pub usd_accepted: usize,
    pub usd_histogram: Vec<u64>,
}

impl PrangeComparison {
    /// Rows `weight, prange, usd_path`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("weight,prange,usd_path\n");
        for (w, (a, b)) in self.prange_histogram.iter().zip(&self.usd_histogram).enumerate() {
            s.push_str(&format!("{w},{a},{b}\n"));
        }
        s
    }
}

pub fn compare_prange<R: Rng + ?Sized>(scp: &ScpInstance, rng: &mut R, trials: usize) -> Result<PrangeComparison> {
    let n = scp.n();
    let mut cmp = PrangeComparison {
        target: scp.prange_target(),
        degenerate_dual: scp.is_degenerate(),
        trials,
        prange_hits: 0,
        prange_histogram: vec![0; n + 1],
        usd_accepted: 0,
        usd_histogram: vec![0; n + 1],
    };
    if cmp.degenerate_dual {
        return Ok(cmp);
    }
    let h: &Matrix = scp.code.generator();
    let rounds = default_prange_rounds(n);
    for _ in 0..trials {
        let rep = prange_search(scp.code.field(), h, rng, rounds);
        if let Some(c) = &rep.hit {
            debug_assert!(scp.verify(&c.0).unwrap_or(false));
            cmp.prange_hits += 1;
        }
        for (a, b) in cmp.prange_histogram.iter_mut().zip(&rep.weight_histogram) {
            *a += b;
        }
        match reduce_usd_path(scp, rng) {
            Ok(r) => {
                cmp.usd_accepted += 1;
                if let Some(w) = r.weight() {
                    cmp.usd_histogram[w] += 1;
                }
            }
            Err(Error::JRejected { .. }) | Err(Error::DegenerateDual) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(cmp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;

    fn binary() -> Arc<FiniteField> {
        Arc::new(FiniteField::new(2, 1).unwrap())
    }

    #[test]
    fn naming_is_normalised() {
        let scp = ScpInstance::random(binary(), 20, 12, 0.3, &mut stream_rng(1, 0)).unwrap();
        assert_eq!(scp.k() + scp.k_prime(), 20);
        assert!((omega_perp(2, scp.omega()).unwrap() - 0.3).abs() < 1e-12);
        assert!((scp.usd_success() - 0.6).abs() < 1e-15);
    }

    #[test]
    fn usd_path_emits_dual_codewords() {
        let mut rng = stream_rng(2, 0);
        let scp = ScpInstance::random(binary(), 200, 100, 0.3, &mut rng).unwrap();
        for _ in 0..20 {
            let r = reduce_usd_path(&scp, &mut rng).unwrap();
            if let ReductionOutcome::Codeword { word, weight } = &r.outcome {
                assert!(scp.verify(&word.0).unwrap());
                assert!(scp.code_prime().contains(&word.0).unwrap());
                assert_eq!(word.weight(), *weight);
            }
            let j = r.j_size.unwrap() as f64;
            assert!((0.55 * 200.0 - 1e-9..=0.6 * 200.0 + 1e-9).contains(&j));
        }
    }

    #[test]
    fn usd_path_requires_margin() {
        let scp = ScpInstance::random(binary(), 40, 20, 0.2, &mut stream_rng(3, 0)).unwrap();
        assert!(matches!(reduce_usd_path(&scp, &mut stream_rng(3, 1)), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn usd_path_matches_dense_law() {
        let scp = ScpInstance::random(binary(), 4, 2, 0.35, &mut stream_rng(4, 0)).unwrap();
        let exact: HashMap<(u64, usize), f64> = usd_path_dense_distribution(&scp).unwrap().into_iter().collect();
        assert!((exact.values().sum::<f64>() - 1.0).abs() < 1e-12);
        let mut rng = stream_rng(4, 1);
        let trials = 100_000;
        let mut counts: HashMap<(u64, usize), usize> = HashMap::new();
        for _ in 0..trials {
            let (j, y) = sample_usd_path_raw(&scp, &mut rng);
            *counts.entry(usd_path_key(2, &j, &y)).or_default() += 1;
        }
        let mut tv = 0.0;
        for (key, p) in &exact {
            tv += (counts.get(key).copied().unwrap_or(0) as f64 / trials as f64 - p).abs();
        }
        for key in counts.keys() {
            assert!(exact.contains_key(key), "sampled an impossible outcome");
        }
        assert!(tv / 2.0 < 0.02, "tv = {}", tv / 2.0);
    }

    #[test]
    fn plain_distribution_repetition() {
        // C = repetition of length 3, C' = even-weight code with a = [1, 0, 3, 0]
        let code = LinearCode::repetition(binary(), 3);
        let profile = NoiseProfile::new(2, 0.1).unwrap();
        let d = pgm_final_distribution(&code, &profile, 1 << 10).unwrap();
        let t = profile.omega_perp();
        let w0 = (1.0 - t).powi(3);
        let w2 = 3.0 * t * t * (1.0 - t);
        assert!((d.p0 - w0 / (w0 + w2)).abs() < 1e-14);
        assert!((d.p[2] - w2 / (w0 + w2)).abs() < 1e-14);
        assert_eq!(d.p[1], 0.0);
        assert!((d.p.iter().sum::<f64>() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn plain_distribution_matches_dense_fourier_sampling() {
        for (q, n, k, seed) in [(2u32, 3usize, 1usize, 0u64), (2, 6, 3, 1), (3, 4, 2, 2)] {
            let field = Arc::new(FiniteField::of_order(q).unwrap());
            let code = if seed == 0 { LinearCode::repetition(field.clone(), n) } else {
                LinearCode::random(field.clone(), n, k, &mut stream_rng(5, seed))
            };
            let profile = NoiseProfile::new(q, 0.1).unwrap();
            let d = pgm_final_distribution(&code, &profile, 1 << 12).unwrap();
            let state = crate::qstate::dense_code_superposition(&code, &profile).unwrap();
            let hat = qft_dense(&field, &state);
            let mut by_weight = vec![0.0; n + 1];
            for (y, pr) in hat.probabilities().into_iter().enumerate() {
                by_weight[FieldVector::from_index(y, q, n).weight()] += pr;
            }
            for (a, b) in by_weight.iter().zip(&d.p) {
                assert!((a - b).abs() < 1e-9, "q={q} n={n}");
            }
        }
    }

    #[test]
    fn tweaked_and_counterexample() {
        let code = LinearCode::random(binary(), 16, 8, &mut stream_rng(6, 0));
        let profile = NoiseProfile::new(2, 0.05).unwrap();
        let tw = pgm_tweaked_distribution(&code, &profile, 1 << 16).unwrap();
        assert_eq!(tw.p[0], 0.0);
        assert!((tw.p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(tw.success_prob >= tw.lower_bound - 1e-15);
        assert!(tw.lower_bound >= tw.coarse_bound - 1e-15);

        let ce = counterexample_qdp_distribution(&code, &profile, 1 << 16).unwrap();
        assert!((ce.shift_probs.iter().sum::<f64>() + ce.bottom - 1.0).abs() < 1e-12);
        assert!((ce.success - ce.branch_probability).abs() < 1e-12);
        assert!(ce.success >= tw.coarse_bound - 1e-15);

        let mut rng = stream_rng(6, 1);
        for _ in 0..100 {
            let r = pgm_counterexample_run(&code, &profile, 1 << 16, &mut rng).unwrap();
            assert!(matches!(r.outcome, ReductionOutcome::Bottom | ReductionOutcome::Abort));
            assert!(!r.success);
        }
    }

    #[test]
    fn pgm_path_runs() {
        let mut rng = stream_rng(7, 0);
        let scp = ScpInstance::random(binary(), 16, 8, 0.2, &mut rng).unwrap();
        for v in [ReductionVariant::PgmPlain, ReductionVariant::PgmTweaked] {
            for _ in 0..20 {
                let r = reduce_pgm_path(&scp, v, 1 << 16, &mut rng).unwrap();
                if let ReductionOutcome::Codeword { word, .. } = &r.outcome {
                    assert!(scp.code_prime().contains(&word.0).unwrap());
                }
                if v == ReductionVariant::PgmTweaked {
                    assert_ne!(r.outcome, ReductionOutcome::Zero);
                }
            }
        }
    }

    #[test]
    fn prange_comparison() {
        let mut rng = stream_rng(8, 0);
        let scp = ScpInstance::random(binary(), 60, 30, 0.3, &mut rng).unwrap();
        let cmp = compare_prange(&scp, &mut rng, 10).unwrap();
        assert_eq!(cmp.target, 15);
        assert_eq!(cmp.prange_hits, 10);
        assert!(cmp.to_csv().starts_with("weight,prange,usd_path\n"));

        let full = LinearCode::new(binary(), Matrix::identity(5)).unwrap();
        let scp = ScpInstance::new(full, 0.3).unwrap();
        let cmp = compare_prange(&scp, &mut rng, 3).unwrap();
        assert!(cmp.degenerate_dual);
        assert_eq!(cmp.target, 0);
    }
}
