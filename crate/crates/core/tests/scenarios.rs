use std::sync::Arc;

use qdp_core::codes::{prange_target, LinearCode};
use qdp_core::gf::FiniteField;
use qdp_core::measure::{NoiseModel, PgmMeasurement};
use qdp_core::regev::{compare_prange, run_usd_path, ReductionOutcome, ScpInstance};
use qdp_core::rng::stream_rng;
use qdp_core::solvers::{
    reduce_partial_usd, sample_instance, solve_classical_ml, solve_partial_usd, solve_pgm_exact, solve_usd,
    QdpInstance, ML_BUDGET,
};

fn field(q: u32) -> Arc<FiniteField> {
    Arc::new(FiniteField::of_order(q).unwrap())
}

#[test]
fn random_generators_are_usually_full_rank() {
    // Pr[rank G = k] ≥ 1 - q^{k-n}
    let (k, n, draws) = (10, 20, 10_000);
    let f = field(2);
    let mut rng = stream_rng(1, 0);
    let full = (0..draws).filter(|_| LinearCode::random(f.clone(), n, k, &mut rng).is_full_rank()).count();
    let p = 1.0 - 2f64.powi(k as i32 - n as i32);
    let sd = (draws as f64 * p * (1.0 - p)).sqrt();
    assert!(full as f64 >= draws as f64 * p - 3.0 * sd - 1.0, "{full}");
}

#[test]
fn zero_dimensional_code_has_zero_codeword() {
    let mut rng = stream_rng(2, 0);
    for _ in 0..20 {
        let inst = sample_instance(field(3), 8, 0, NoiseModel::symmetric(3, 0.2).unwrap(), &mut rng).unwrap();
        assert!(inst.reveal().is_zero());
    }
}

#[test]
fn computational_readout_has_expected_weight() {
    let (n, omega) = (20_000, 0.15);
    let mut rng = stream_rng(3, 0);
    let code = LinearCode::random(field(2), n, 1, &mut rng);
    let inst = QdpInstance::new(code, vec![0], NoiseModel::symmetric(2, omega).unwrap(), 0).unwrap();
    let y = inst.register().measure_computational(&mut rng);
    let frac = y.weight() as f64 / n as f64;
    assert!((frac - omega).abs() < 4.0 * (omega * (1.0 - omega) / n as f64).sqrt(), "{frac}");
}

#[test]
fn pgm_success_tends_to_guessing_at_full_noise() {
    let code = LinearCode::random(field(2), 10, 4, &mut stream_rng(4, 0));
    let m = PgmMeasurement::new(&code, &NoiseModel::symmetric(2, 0.5).unwrap(), 1 << 20).unwrap();
    let size = 2f64.powi(code.rank() as i32);
    assert!((m.success_probability() - 1.0 / size).abs() < 1e-12);
}

#[test]
fn pgm_outcome_law_depends_on_difference_only() {
    // Pr[c'|c] = Pr[c'+d|c+d]: compare empirical laws of c' - c for two messages
    let q = 3;
    let code = LinearCode::random(field(q), 6, 2, &mut stream_rng(5, 0));
    let noise = NoiseModel::symmetric(q, 0.3).unwrap();
    let m = PgmMeasurement::new(&code, &noise, 1 << 20).unwrap();
    let f = code.field();
    let trials = 20_000;
    let mut laws = Vec::new();
    for msg in [vec![0, 0], vec![2, 1]] {
        let inst = QdpInstance::new(code.clone(), msg, noise, 0).unwrap();
        let mut rng = stream_rng(6, 0);
        let mut counts = std::collections::HashMap::new();
        for _ in 0..trials {
            let c = solve_pgm_exact(&inst, &m, &mut rng).unwrap().candidate.unwrap();
            *counts.entry(f.sub_vec(&c.0, &inst.reveal().0)).or_insert(0usize) += 1;
        }
        laws.push(counts);
    }
    // same stream, so the draws coincide exactly
    assert_eq!(laws[0], laws[1]);
}

#[test]
fn pgm_empirical_success_matches_closed_form() {
    let (n, k, omega, trials) = (24, 12, 0.05, 2000);
    let code = LinearCode::random(field(2), n, k, &mut stream_rng(7, 0));
    let noise = NoiseModel::symmetric(2, omega).unwrap();
    let m = PgmMeasurement::new(&code, &noise, 1 << 20).unwrap();
    let p = m.success_probability();
    let mut rng = stream_rng(7, 1);
    let wins = (0..trials)
        .filter(|_| {
            let inst = QdpInstance::random_message(code.clone(), noise, &mut rng).unwrap();
            solve_pgm_exact(&inst, &m, &mut rng).unwrap().recovered()
        })
        .count();
    let sd = (trials as f64 * p * (1.0 - p)).sqrt();
    assert!((wins as f64 - trials as f64 * p).abs() <= 3.0 * sd.max(1.0), "{wins} vs {p}");
}

#[test]
fn classical_ml_degrades_across_the_threshold() {
    let (n, k, trials) = (24, 12, 300);
    let code = LinearCode::random(field(2), n, k, &mut stream_rng(8, 0));
    let rates: Vec<f64> = [0.0, 0.05, 0.11, 0.2, 0.3]
        .iter()
        .map(|&omega| {
            let noise = NoiseModel::symmetric(2, omega).unwrap();
            let mut rng = stream_rng(8, (omega * 1000.0) as u64);
            (0..trials)
                .filter(|_| {
                    let inst = QdpInstance::random_message(code.clone(), noise, &mut rng).unwrap();
                    solve_classical_ml(&inst, &mut rng, ML_BUDGET).unwrap().recovered()
                })
                .count() as f64
                / trials as f64
        })
        .collect();
    assert_eq!(rates[0], 1.0);
    for w in rates.windows(2) {
        assert!(w[1] <= w[0] + 0.05, "{rates:?}");
    }
    assert!(rates[4] < 0.3, "{rates:?}");
}

#[test]
fn partial_usd_keeps_enough_coordinates() {
    // u ≈ 0.7091 for (0.1, 0.05); with p = 0.70 the cut is reached w.h.p.
    let n = 20_000;
    let code = LinearCode::random(field(2), n, 1, &mut stream_rng(9, 0));
    let inst = QdpInstance::new(code, vec![1], NoiseModel::symmetric(2, 0.1).unwrap(), 0).unwrap();
    let red = reduce_partial_usd(&inst, 0.05, 0.70, &mut stream_rng(9, 1)).unwrap();
    assert_eq!(red.kept.len(), 14_000);
    assert_eq!(red.inner.n(), 14_000);
    assert!(red.kept.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn partial_usd_identity_when_targets_coincide() {
    let code = LinearCode::random(field(2), 100, 20, &mut stream_rng(10, 0));
    let inst = QdpInstance::random_message(code, NoiseModel::symmetric(2, 0.1).unwrap(), &mut stream_rng(10, 1)).unwrap();
    let red = reduce_partial_usd(&inst, 0.1, 1.0, &mut stream_rng(10, 2)).unwrap();
    assert_eq!(red.kept, (0..100).collect::<Vec<_>>());
}

#[test]
fn partial_then_full_usd_chains() {
    // ω = 0.06 → ω' = 0.02 keeps u ≈ 0.729; inner USD reveals ≈ 0.72 of the kept part
    let (n, k, trials) = (600, 200, 60);
    let f = field(2);
    let noise = NoiseModel::symmetric(2, 0.06).unwrap();
    let mut direct = 0;
    let mut chained = 0;
    for t in 0..trials {
        let mut rng = stream_rng(11, t);
        let inst = sample_instance(f.clone(), n, k, noise, &mut rng).unwrap();
        direct += solve_usd(&inst, &mut rng).unwrap().recovered() as usize;
        chained += solve_partial_usd(&inst, 0.02, 0.66, &mut rng).unwrap().recovered() as usize;
    }
    assert!(direct >= trials as usize - 2);
    assert!(chained >= trials as usize - 4, "{chained}");
}

#[test]
fn usd_path_near_full_noise_reveals_everything() {
    let (n, k_prime) = (60, 20);
    let scp = ScpInstance::random(field(2), n, k_prime, 0.499, &mut stream_rng(12, 0)).unwrap();
    let (summary, reports) = run_usd_path(&scp, 40, 12).unwrap();
    assert!(summary.accepted > 0);
    let mean = reports.iter().filter_map(|r| r.weight()).sum::<usize>() as f64 / reports.len() as f64;
    assert!((mean - n as f64 / 2.0).abs() < 5.0, "{mean}");
    for r in &reports {
        if let ReductionOutcome::Codeword { word, .. } = &r.outcome {
            assert!(scp.verify(&word.0).unwrap());
        }
    }
}

#[test]
fn prange_comparisons() {
    let scp = ScpInstance::random(field(3), 120, 60, 0.5, &mut stream_rng(13, 0)).unwrap();
    assert_eq!(prange_target(3, 120, 60), 40);
    let cmp = compare_prange(&scp, &mut stream_rng(13, 1), 20).unwrap();
    assert_eq!(cmp.target, 40);
    assert!(cmp.prange_hits >= 18);

    let scp = ScpInstance::random(field(2), 30, 30, 0.3, &mut stream_rng(14, 0)).unwrap();
    let cmp = compare_prange(&scp, &mut stream_rng(14, 1), 5).unwrap();
    assert!(cmp.degenerate_dual);
    assert_eq!(cmp.prange_hits, 0);
    assert!(cmp.to_csv().starts_with("weight,prange,usd_path\n"));
}
