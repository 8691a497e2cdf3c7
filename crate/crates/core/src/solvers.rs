//! End-to-end decoders for the quantum decoding problem.
//!
//! A [`QdpInstance`] holds the generator matrix and the hidden codeword. A
//! solver sees only the generator and whatever a single measurement of the
//! register returns; [`Register`] is consumed by its measurement methods, so
//! each instance can be measured once per register.

use std::sync::Arc;
use std::time::Instant;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::codes::{check_budget, for_each_combination, CosetSpectra, LinearCode};
use crate::error::{Error, Result};
use crate::gf::{Elem, FieldVector, FiniteField};
use crate::measure::{phase_usd_sample, qary_usd_sample, NoiseModel, PgmMeasurement, UsdOutcome};
use crate::noise::{thresholds, NoiseProfile};
use crate::rng::{derive_seed, stream_rng};

/// Default cap on `q^k` for maximum-likelihood decoding.
pub const ML_BUDGET: u64 = 1 << 22;

/// `|ψ_c⟩ = Σ_e f(e)|c + e⟩` for a uniformly random codeword `c`.
#[derive(Clone, Debug)]
pub struct QdpInstance {
    code: LinearCode,
    message: Vec<Elem>,
    codeword: FieldVector,
    noise: NoiseModel,
    seed: u64,
}

/// Draws a random code and a random message.
pub fn sample_instance<R: Rng + ?Sized>(
    field: Arc<FiniteField>,
    n: usize,
    k: usize,
    noise: NoiseModel,
    rng: &mut R,
) -> Result<QdpInstance> {
    if k > n {
        return Err(Error::InvalidParameter(format!("k = {k} exceeds n = {n}")));
    }
    let code = LinearCode::random(field, n, k, rng);
    QdpInstance::random_message(code, noise, rng)
}

impl QdpInstance {
    pub fn new(code: LinearCode, message: Vec<Elem>, noise: NoiseModel, seed: u64) -> Result<Self> {
        if noise.q() != code.q() {
            return Err(Error::DimensionMismatch { expected: code.q() as usize, found: noise.q() as usize });
        }
        let codeword = code.encode(&message)?;
        Ok(QdpInstance { code, message, codeword, noise, seed })
    }

    /// Instance on a fixed code with a uniformly random message.
    pub fn random_message<R: Rng + ?Sized>(code: LinearCode, noise: NoiseModel, rng: &mut R) -> Result<Self> {
        let m = code.random_message(rng);
        let seed = rng.random();
        Self::new(code, m, noise, seed)
    }

    pub fn code(&self) -> &LinearCode {
        &self.code
    }

    pub fn noise(&self) -> &NoiseModel {
        &self.noise
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn n(&self) -> usize {
        self.code.n()
    }

    pub fn k(&self) -> usize {
        self.code.k()
    }

    pub fn register(&self) -> Register<'_> {
        Register { inst: self }
    }

    /// The hidden codeword. Test harnesses only; solvers never call it.
    pub fn reveal(&self) -> &FieldVector {
        &self.codeword
    }

    pub fn judge(&self, candidate: Option<&FieldVector>) -> SolveOutcome {
        match candidate {
            None => SolveOutcome::Abstain,
            Some(c) if *c == self.codeword => SolveOutcome::Recovered,
            Some(_) => SolveOutcome::WrongCodeword,
        }
    }
}

/// The quantum register of an instance.
pub struct Register<'a> {
    inst: &'a QdpInstance,
}

impl Register<'_> {
    /// Coordinate-wise unambiguous discrimination.
    pub fn measure_usd<R: Rng + ?Sized>(self, rng: &mut R) -> Vec<UsdOutcome> {
        let c = &self.inst.codeword.0;
        match &self.inst.noise {
            NoiseModel::Symmetric(p) => c.iter().map(|&b| qary_usd_sample(p, b, rng)).collect(),
            NoiseModel::Phase(p) => c.iter().map(|&b| phase_usd_sample(p, b, rng)).collect(),
        }
    }

    /// Partial discrimination `ψ^ω → ψ^{ω'}`. Returns the kept coordinates;
    /// their post-measurement states form the register of an `ω'` instance.
    pub fn measure_partial_usd<R: Rng + ?Sized>(self, omega_prime: f64, rng: &mut R) -> Result<Vec<usize>> {
        let NoiseModel::Symmetric(p) = &self.inst.noise else {
            return Err(Error::InvalidParameter("partial USD needs symmetric noise".into()));
        };
        if p.q() != 2 {
            return Err(Error::InvalidParameter("partial USD is binary".into()));
        }
        let keep = crate::measure::partial_usd_probabilities(p.omega(), omega_prime)?.keep;
        Ok((0..self.inst.n()).filter(|_| rng.random::<f64>() < keep).collect())
    }

    /// Computational-basis readout, `c + e`.
    pub fn measure_computational<R: Rng + ?Sized>(self, rng: &mut R) -> FieldVector {
        let field = self.inst.code.field();
        let c = &self.inst.codeword;
        match &self.inst.noise {
            NoiseModel::Symmetric(p) => FieldVector(field.add_vec(&c.0, &p.sample_error(c.len(), rng).0)),
            NoiseModel::Phase(p) => {
                FieldVector(c.0.iter().map(|&b| if rng.random::<f64>() < p.t() { 1 - b } else { b }).collect())
            }
        }
    }

    /// Pretty-good measurement; returns a codeword.
    pub fn measure_pgm<R: Rng + ?Sized>(self, m: &PgmMeasurement, rng: &mut R) -> Result<FieldVector> {
        let code = &self.inst.code;
        let d = m.sample_shift(rng);
        let dg = code.encode(&d)?;
        Ok(FieldVector(code.field().sub_vec(&self.inst.codeword.0, &dg.0)))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveOutcome {
    Recovered,
    WrongCodeword,
    Abstain,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub outcome: SolveOutcome,
    pub candidate: Option<FieldVector>,
    /// Coordinates the measurement revealed, where that applies.
    pub revealed: Option<usize>,
    /// Rank of `G_J` on the revealed coordinates.
    pub rank: Option<usize>,
    pub elapsed_secs: f64,
}

impl SolveReport {
    fn finish(inst: &QdpInstance, candidate: Option<FieldVector>, start: Instant) -> Self {
        SolveReport {
            outcome: inst.judge(candidate.as_ref()),
            candidate,
            revealed: None,
            rank: None,
            elapsed_secs: start.elapsed().as_secs_f64(),
        }
    }

    pub fn recovered(&self) -> bool {
        self.outcome == SolveOutcome::Recovered
    }
}

/// Decodes from the coordinates revealed by `J`. Abstains if `rank G_J < k`.
fn decode_revealed(code: &LinearCode, j: &[usize], values: &[Elem]) -> Result<(Option<FieldVector>, usize)> {
    match code.recover_from_coordinates(j, values) {
        Ok(c) => Ok((Some(c), code.k())),
        Err(Error::RankDeficient { rank, .. }) => Ok((None, rank)),
        Err(e) => Err(e),
    }
}

/// USD on every coordinate, then linear algebra on the revealed ones.
pub fn solve_usd<R: Rng + ?Sized>(inst: &QdpInstance, rng: &mut R) -> Result<SolveReport> {
    let start = Instant::now();
    let outcomes = inst.register().measure_usd(rng);
    let (j, values): (Vec<usize>, Vec<Elem>) =
        outcomes.iter().enumerate().filter_map(|(i, o)| o.symbol().map(|b| (i, b))).unzip();
    let (candidate, rank) = decode_revealed(&inst.code, &j, &values)?;
    let mut report = SolveReport::finish(inst, candidate, start);
    report.revealed = Some(j.len());
    report.rank = Some(rank);
    Ok(report)
}

/// [`solve_usd`] for the binary phase family.
pub fn solve_phase_usd<R: Rng + ?Sized>(inst: &QdpInstance, rng: &mut R) -> Result<SolveReport> {
    if !matches!(inst.noise, NoiseModel::Phase(_)) {
        return Err(Error::InvalidParameter("instance does not carry phase noise".into()));
    }
    solve_usd(inst, rng)
}

/// Inner instance produced by partial USD.
#[derive(Clone, Debug)]
pub struct PartialReduction {
    pub inner: QdpInstance,
    /// Coordinates of the outer code kept in the inner one, ascending.
    pub kept: Vec<usize>,
}

/// Partial USD to `ω'`, keeping the `⌊pn⌋` lowest surviving coordinates.
/// The result is an instance on `C_J` with noise `ω'`.
pub fn reduce_partial_usd<R: Rng + ?Sized>(
    inst: &QdpInstance,
    omega_prime: f64,
    p: f64,
    rng: &mut R,
) -> Result<PartialReduction> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain { what: "p", value: p, range: "[0, 1]" });
    }
    let needed = (p * inst.n() as f64).floor() as usize;
    let mut kept = inst.register().measure_partial_usd(omega_prime, rng)?;
    if kept.len() < needed {
        return Err(Error::TooFewKept { kept: kept.len(), needed });
    }
    kept.truncate(needed);
    let code = inst.code.puncture(&kept);
    let noise = NoiseModel::Symmetric(NoiseProfile::new(2, omega_prime)?);
    let inner = QdpInstance::new(code, inst.message.clone(), noise, derive_seed(inst.seed, 1))?;
    debug_assert_eq!(inner.codeword, inst.codeword.restrict(&kept));
    Ok(PartialReduction { inner, kept })
}

/// Partial USD followed by full USD on the inner instance.
pub fn solve_partial_usd<R: Rng + ?Sized>(
    inst: &QdpInstance,
    omega_prime: f64,
    p: f64,
    rng: &mut R,
) -> Result<SolveReport> {
    let start = Instant::now();
    let red = match reduce_partial_usd(inst, omega_prime, p, rng) {
        Ok(r) => r,
        Err(Error::TooFewKept { .. }) => return Ok(SolveReport::finish(inst, None, start)),
        Err(e) => return Err(e),
    };
    let inner = solve_usd(&red.inner, rng)?;
    let candidate = match &inner.candidate {
        Some(c_j) => decode_revealed(&inst.code, &red.kept, &c_j.0)?.0,
        None => None,
    };
    let mut report = SolveReport::finish(inst, candidate, start);
    report.revealed = inner.revealed;
    report.rank = inner.rank;
    Ok(report)
}

/// One draw of the pretty-good measurement.
pub fn solve_pgm_exact<R: Rng + ?Sized>(inst: &QdpInstance, m: &PgmMeasurement, rng: &mut R) -> Result<SolveReport> {
    let start = Instant::now();
    let c = inst.register().measure_pgm(m, rng)?;
    Ok(SolveReport::finish(inst, Some(c), start))
}

/// Closest codeword to a computational-basis readout. Ties go to the
/// lowest message index.
pub fn solve_classical_ml<R: Rng + ?Sized>(inst: &QdpInstance, rng: &mut R, budget: u64) -> Result<SolveReport> {
    let start = Instant::now();
    let code = &inst.code;
    check_budget(code.q(), code.k(), budget)?;
    let y = inst.register().measure_computational(rng);
    let mut best: Option<(usize, Vec<Elem>)> = None;
    for_each_combination(code.field(), code.generator(), |w| {
        let d = w.iter().zip(&y.0).filter(|(a, b)| a != b).count();
        if best.as_ref().is_none_or(|(bd, _)| d < *bd) {
            best = Some((d, w.to_vec()));
        }
    });
    Ok(SolveReport::finish(inst, best.map(|(_, w)| FieldVector(w)), start))
}

/// Settings for [`tractability_sweep`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub n: usize,
    pub k: usize,
    pub omegas: Vec<f64>,
    pub trials: usize,
    /// Number of independent random codes; trial `t` uses code `t mod codes`.
    pub codes: usize,
    pub seed: u64,
    pub budget: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub omega: f64,
    pub trials: usize,
    pub successes: usize,
    /// Mean exact PGM success over the codes used.
    pub p_pgm: f64,
    pub easy_bound: f64,
    pub tractable_bound: f64,
}

/// Exact-PGM success rate across a grid of noise levels.
pub fn tractability_sweep(field: Arc<FiniteField>, cfg: &SweepConfig) -> Result<Vec<SweepRow>> {
    let q = field.order();
    if cfg.codes == 0 || cfg.k > cfg.n {
        return Err(Error::InvalidParameter("need at least one code and k ≤ n".into()));
    }
    let th = thresholds::<f64>(q, cfg.k as f64 / cfg.n as f64)?;
    let mut codes = Vec::with_capacity(cfg.codes);
    for ci in 0..cfg.codes {
        let code = LinearCode::random(field.clone(), cfg.n, cfg.k, &mut stream_rng(cfg.seed, ci as u64));
        let spectra = CosetSpectra::compute(&code, cfg.budget)?;
        codes.push((code, spectra));
    }
    let mut rows = Vec::with_capacity(cfg.omegas.len());
    for (oi, &omega) in cfg.omegas.iter().enumerate() {
        let noise = NoiseModel::symmetric(q, omega)?;
        let measurements = codes
            .iter()
            .map(|(c, s)| PgmMeasurement::from_spectra(c, s, &noise))
            .collect::<Result<Vec<_>>>()?;
        let mut successes = 0;
        let mut used = vec![false; codes.len()];
        for t in 0..cfg.trials {
            let ci = t % codes.len();
            used[ci] = true;
            let mut rng = stream_rng(derive_seed(cfg.seed, oi as u64 + 1), t as u64);
            let inst = QdpInstance::random_message(codes[ci].0.clone(), noise, &mut rng)?;
            successes += solve_pgm_exact(&inst, &measurements[ci], &mut rng)?.recovered() as usize;
        }
        let used_p: Vec<f64> =
            measurements.iter().zip(&used).filter(|(_, u)| **u).map(|(m, _)| m.success_probability()).collect();
        let p_pgm = if used_p.is_empty() {
            measurements.iter().map(|m| m.success_probability()).sum::<f64>() / measurements.len() as f64
        } else {
            used_p.iter().sum::<f64>() / used_p.len() as f64
        };
        rows.push(SweepRow {
            omega,
            trials: cfg.trials,
            successes,
            p_pgm,
            easy_bound: th.easy,
            tractable_bound: th.tractable,
        });
    }
    Ok(rows)
}
