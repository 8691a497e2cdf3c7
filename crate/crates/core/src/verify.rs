//! Cross-checks of the closed forms against brute force and dense states.
//!
//! Each check is independent and cheap enough to run on every invocation
//! of the `verify` command.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::codes::{prange_short_codeword, prange_target, CosetSpectra, LinearCode};
use crate::gf::{Elem, FieldVector, FiniteField};
use crate::measure::{pgm_dense_oracle, pgm_spectrum, NoiseModel, PgmMeasurement};
use crate::noise::{omega_perp, thresholds, NoiseProfile};
use crate::qstate::{dense_code_superposition, noisy_codeword_state, noisy_symbol_state, qft_dense, qft_qudit, DenseState};
use crate::regev::{pgm_final_distribution, sample_usd_path_raw, usd_path_dense_distribution, usd_path_key, ScpInstance};
use crate::rng::stream_rng;
use crate::Result;

/// Orders of every field the crate can build up to 16.
pub const SMALL_FIELDS: [u32; 10] = [2, 3, 4, 5, 7, 8, 9, 11, 13, 16];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn from(name: &str, r: Result<(bool, String)>) -> Self {
        match r {
            Ok((passed, detail)) => CheckResult { name: name.into(), passed, detail },
            Err(e) => CheckResult { name: name.into(), passed: false, detail: format!("error: {e}") },
        }
    }
}

/// Largest `|Σ_x χ_a(x) conj χ_b(x) - q^n δ_ab|` over all pairs in F_q^n.
/// Pairs are checked in full when `q^n ≤ 343`.
pub fn character_orthogonality_error(field: &FiniteField, n: usize) -> f64 {
    let q = field.order();
    let dim = (q as usize).pow(n as u32);
    let roots = field.roots_of_unity::<f64>();
    let vecs: Vec<FieldVector> = (0..dim).map(|i| FieldVector::from_index(i, q, n)).collect();
    let p = field.characteristic();
    // χ_a(x) conj χ_b(x) = χ_{a-b}(x), so the row for a - b is enough when
    // the table is too large for all pairs
    let full = dim <= 343;
    let mut worst = 0.0f64;
    for a in 0..dim {
        for b in 0..if full { dim } else { 1 } {
            let mut acc = Complex64::new(0.0, 0.0);
            for x in &vecs {
                let ea = field.vector_character_exponent(&vecs[a].0, &x.0);
                let eb = field.vector_character_exponent(&vecs[b].0, &x.0);
                acc += roots[((ea + p - eb) % p) as usize];
            }
            let want = if a == b { dim as f64 } else { 0.0 };
            worst = worst.max((acc - want).norm());
        }
    }
    worst
}

/// Largest entry of `U†U - I` for the transform on F_q^n.
pub fn qft_unitarity_error(field: &FiniteField, n: usize) -> Result<f64> {
    let q = field.order();
    let dim = (q as usize).pow(n as u32);
    let mut cols = Vec::with_capacity(dim);
    for i in 0..dim {
        let e = DenseState::<f64>::basis(q, &FieldVector::from_index(i, q, n))?;
        cols.push(qft_dense(field, &e));
    }
    let mut worst = 0.0f64;
    for a in 0..dim {
        for b in a..dim {
            let ip = crate::qstate::inner_product(&cols[a], &cols[b])?;
            let want = if a == b { 1.0 } else { 0.0 };
            worst = worst.max((ip - want).norm());
        }
    }
    Ok(worst)
}

/// Largest `|(ω⊥)⊥ - ω|` over `points` equally spaced ω.
pub fn dual_map_involution_error(q: u32, points: usize) -> Result<f64> {
    let top = (q - 1) as f64 / q as f64;
    let mut worst = 0.0f64;
    for i in 0..points {
        let w = top * i as f64 / (points - 1) as f64;
        worst = worst.max((omega_perp(q, omega_perp(q, w)?)? - w).abs());
    }
    Ok(worst)
}

/// Largest amplitude gap between `QFT ψ^ω_0` and `ψ^{ω⊥}_0`.
pub fn qft_profile_error(q: u32, points: usize) -> Result<f64> {
    let field = FiniteField::of_order(q)?;
    let top = (q - 1) as f64 / q as f64;
    let mut worst = 0.0f64;
    for i in 0..points {
        let p = NoiseProfile::new(q, top * i as f64 / (points - 1) as f64)?;
        let out = qft_qudit(&field, &noisy_symbol_state(&p, 0));
        let want = noisy_symbol_state(&p.dual(), 0);
        for (a, b) in out.amplitudes().iter().zip(want.amplitudes()) {
            worst = worst.max((a - b).norm());
        }
    }
    Ok(worst)
}

/// Checks the measurement that drops the `s = 0` block against explicit
/// dense vectors `Z_c = q^{-k/2} Σ_{s≠0} χ_m(s) W_s/n_s`, with `W_s` cut out
/// of `QFT ψ_0`. Returns `(dense success, dense Pr[⊥], formula success, n_0²)`.
pub fn counterexample_dense_check(code: &LinearCode, omega: f64, message: &[Elem]) -> Result<(f64, f64, f64, f64)> {
    let field = code.field();
    let (q, n, k) = (code.q(), code.n(), code.k());
    let profile = NoiseProfile::new(q, omega)?;
    let zero = qft_dense(field, &noisy_codeword_state(field, &profile, &vec![0; n])?);
    let c = code.encode(message)?;
    let hat_c = qft_dense(field, &noisy_codeword_state(field, &profile, &c.0)?);
    let dim = zero.dim();
    let syn: Vec<usize> = (0..dim)
        .map(|y| Ok(FieldVector(code.syndrome(&FieldVector::from_index(y, q, n).0)?).index(q)))
        .collect::<Result<_>>()?;
    let num_s = (q as usize).pow(k as u32);
    let mut norms = vec![0.0f64; num_s];
    for (y, a) in zero.amplitudes().iter().enumerate() {
        norms[syn[y]] += a.norm_sqr();
    }
    let norms: Vec<f64> = norms.into_iter().map(f64::sqrt).collect();
    let scale = 1.0 / (num_s as f64).sqrt();
    let mut z = vec![Complex64::new(0.0, 0.0); dim];
    for (y, a) in zero.amplitudes().iter().enumerate() {
        let s = syn[y];
        if s == 0 || norms[s] == 0.0 {
            continue;
        }
        let chi: Complex64 = field.vector_character(message, &FieldVector::from_index(s, q, k).0);
        z[y] = a * chi * (scale / norms[s]);
    }
    let overlap: Complex64 = z.iter().zip(hat_c.amplitudes()).map(|(a, b)| a.conj() * b).sum();
    let bottom: f64 = hat_c.amplitudes().iter().enumerate().filter(|(y, _)| syn[*y] == 0).map(|(_, a)| a.norm_sqr()).sum();
    let formula = (norms[1..].iter().sum::<f64>() * scale).powi(2);
    Ok((overlap.norm_sqr(), bottom, formula, norms[0] * norms[0]))
}

fn check_fields() -> Result<(bool, String)> {
    let mut worst_orth = 0.0f64;
    let mut worst_qft = 0.0f64;
    for q in SMALL_FIELDS {
        let f = FiniteField::of_order(q)?;
        for a in f.elements() {
            if a != 0 && f.mul(a, f.inv(a)?) != 1 {
                return Ok((false, format!("inverse fails in GF({q})")));
            }
            for b in f.elements() {
                if f.add(f.sub(a, b), b) != a {
                    return Ok((false, format!("subtraction fails in GF({q})")));
                }
            }
        }
        let n = if q <= 3 { 3 } else { 2 };
        worst_orth = worst_orth.max(character_orthogonality_error(&f, n));
        worst_qft = worst_qft.max(qft_unitarity_error(&f, if q <= 4 { 3 } else { 1 })?);
    }
    Ok((worst_orth < 1e-9 && worst_qft < 1e-12, format!("orthogonality {worst_orth:.1e}, unitarity {worst_qft:.1e}")))
}

fn check_dual_map() -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for q in [2, 3, 4, 5, 7, 8, 9] {
        worst = worst.max(dual_map_involution_error(q, 1000)?);
        worst = worst.max(qft_profile_error(q, 50)?);
    }
    Ok((worst < 1e-12, format!("max error {worst:.1e}")))
}

fn check_spectra() -> Result<(bool, String)> {
    for (q, n, k) in [(2u32, 8usize, 3usize), (3, 5, 2), (4, 4, 2)] {
        let field = Arc::new(FiniteField::of_order(q)?);
        let code = LinearCode::random(field, n, k, &mut stream_rng(101, q as u64));
        let spectra = CosetSpectra::compute(&code, 1 << 20)?;
        let mut brute = vec![vec![0u64; n + 1]; spectra.num_syndromes()];
        for x in 0..(q as usize).pow(n as u32) {
            let v = FieldVector::from_index(x, q, n);
            brute[FieldVector(code.syndrome(&v.0)?).index(q)][v.weight()] += 1;
        }
        for (s, row) in brute.iter().enumerate() {
            if spectra.counts(s) != row.as_slice() {
                return Ok((false, format!("q={q}: syndrome {s} differs")));
            }
        }
    }
    Ok((true, "all cosets match".into()))
}

fn check_pgm() -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for (i, (q, n, k)) in [(2u32, 8usize, 4usize), (3, 5, 2), (2, 6, 2)].into_iter().enumerate() {
        let field = Arc::new(FiniteField::of_order(q)?);
        let code = LinearCode::random(field, n, k, &mut stream_rng(102, i as u64));
        let noise = NoiseModel::symmetric(q, 0.15)?;
        let dense = pgm_dense_oracle(&code, &noise)?;
        let spectral = PgmMeasurement::new(&code, &noise, 1 << 20)?;
        worst = worst.max((dense.p_pgm - spectral.success_probability()).abs());
    }
    let rep = LinearCode::repetition(Arc::new(FiniteField::new(2, 1)?), 3);
    let p = pgm_spectrum(&rep, &NoiseProfile::new(2, 0.1f64)?, 1 << 10)?.p_pgm;
    Ok((worst < 1e-9 && (p - 0.98819).abs() < 1e-5, format!("max gap {worst:.1e}, repetition {p:.6}")))
}

fn check_pgm_path() -> Result<(bool, String)> {
    let field = Arc::new(FiniteField::new(2, 1)?);
    let code = LinearCode::repetition(field.clone(), 3);
    let profile = NoiseProfile::new(2, 0.1)?;
    let d = pgm_final_distribution(&code, &profile, 1 << 10)?;
    let hat = qft_dense(&field, &dense_code_superposition(&code, &profile)?);
    let mut by_weight = [0.0; 4];
    for (y, pr) in hat.probabilities().into_iter().enumerate() {
        by_weight[FieldVector::from_index(y, 2, 3).weight()] += pr;
    }
    let gap = by_weight.iter().zip(&d.p).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    Ok((gap < 1e-9, format!("max gap {gap:.1e}")))
}

fn check_counterexample() -> Result<(bool, String)> {
    let code = LinearCode::random(Arc::new(FiniteField::new(2, 1)?), 8, 4, &mut stream_rng(103, 0));
    let (succ, bottom, formula, n0sq) = counterexample_dense_check(&code, 0.1, &[1, 0, 1, 1])?;
    let gap = (succ - formula).abs().max((bottom - n0sq).abs());
    Ok((gap < 1e-10, format!("max gap {gap:.1e}")))
}

fn check_usd_path() -> Result<(bool, String)> {
    let scp = ScpInstance::random(Arc::new(FiniteField::new(2, 1)?), 4, 2, 0.35, &mut stream_rng(104, 0))?;
    let exact = usd_path_dense_distribution(&scp)?;
    let mut rng = stream_rng(104, 1);
    let trials = 100_000;
    let mut counts = std::collections::HashMap::new();
    for _ in 0..trials {
        let (j, y) = sample_usd_path_raw(&scp, &mut rng);
        *counts.entry(usd_path_key(2, &j, &y)).or_insert(0usize) += 1;
    }
    let mut tv = 0.0;
    let mut seen = 0;
    for (key, p) in &exact {
        let c = counts.get(key).copied().unwrap_or(0);
        seen += c;
        tv += (c as f64 / trials as f64 - p).abs();
    }
    tv = (tv + (trials - seen) as f64 / trials as f64) / 2.0;
    Ok((tv <= 0.02, format!("total variation {tv:.4}")))
}

fn check_prange() -> Result<(bool, String)> {
    let field = Arc::new(FiniteField::new(2, 1)?);
    let mut rng = stream_rng(105, 0);
    let h = LinearCode::random(field.clone(), 40, 20, &mut rng).generator().clone();
    let c = prange_short_codeword(&field, &h, &mut rng, 10_000)?;
    let ok = c.weight() == prange_target(2, 40, 20) && h.right_mul(&field, &c.0)?.iter().all(|&a| a == 0);
    Ok((ok, format!("weight {}", c.weight())))
}

fn check_thresholds() -> Result<(bool, String)> {
    let t = thresholds::<f64>(2, 0.5)?;
    let ok = (t.easy - 0.0670).abs() < 5e-5 && (t.classical - 0.1100).abs() < 5e-5 && (t.tractable - 0.1871).abs() < 5e-5;
    Ok((ok, format!("easy {:.4}, classical {:.4}, tractable {:.4}", t.easy, t.classical, t.tractable)))
}

/// Runs every check.
pub fn run_oracle_suite() -> Vec<CheckResult> {
    vec![
        CheckResult::from("fields_characters_qft", check_fields()),
        CheckResult::from("dual_map", check_dual_map()),
        CheckResult::from("coset_spectra_brute_force", check_spectra()),
        CheckResult::from("pgm_spectral_vs_dense", check_pgm()),
        CheckResult::from("pgm_path_vs_dense_fourier", check_pgm_path()),
        CheckResult::from("counterexample_vs_dense", check_counterexample()),
        CheckResult::from("usd_path_vs_dense", check_usd_path()),
        CheckResult::from("prange_target_weight", check_prange()),
        CheckResult::from("thresholds_half_rate", check_thresholds()),
    ]
}
