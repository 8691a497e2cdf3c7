use std::sync::Arc;

use proptest::prelude::*;
use qdp_core::codes::{CosetSpectra, LinearCode};
use qdp_core::gf::{FieldVector, FiniteField};
use qdp_core::measure::{pgm_spectrum, qary_usd_sample, NoiseModel, PgmMeasurement, UsdOutcome};
use qdp_core::noise::NoiseProfile;
use qdp_core::qstate::{qft_dense, qft_dense_inverse, DenseState};
use qdp_core::regev::{pgm_tweaked_distribution, reduce_usd_path, ScpInstance};
use qdp_core::rng::stream_rng;
use qdp_core::solvers::{sample_instance, solve_pgm_exact, solve_usd, SolveOutcome};
use qdp_core::verify::SMALL_FIELDS;
use qdp_core::Error;
use num_complex::Complex64;

const BUDGET: u64 = 1 << 20;

fn field(q: u32) -> Arc<FiniteField> {
    Arc::new(FiniteField::of_order(q).unwrap())
}

fn small_q() -> impl Strategy<Value = u32> {
    prop::sample::select(vec![2u32, 3, 4, 5])
}

/// `(q, n, k)` with `q^n` small enough for exhaustive enumeration.
fn small_code_shape() -> impl Strategy<Value = (u32, usize, usize)> {
    small_q().prop_flat_map(|q| {
        let max_n = match q {
            2 => 12usize,
            3 => 8,
            _ => 6,
        };
        (Just(q), 2..=max_n).prop_flat_map(|(q, n)| (Just(q), Just(n), 1..n))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn field_axioms(q in prop::sample::select(SMALL_FIELDS.to_vec()), a in 0u32..16, b in 0u32..16, c in 0u32..16) {
        let f = FiniteField::of_order(q).unwrap();
        let (a, b, c) = ((a % q) as u16, (b % q) as u16, (c % q) as u16);
        prop_assert_eq!(f.add(a, b), f.add(b, a));
        prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        prop_assert_eq!(f.add(a, f.neg(a)), 0);
        if a != 0 {
            prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
        }
        let p = f.characteristic();
        prop_assert_eq!(
            f.character_exponent(c, f.add(a, b)),
            (f.character_exponent(c, a) + f.character_exponent(c, b)) % p
        );
    }

    #[test]
    fn dual_of_dual_is_the_code((q, n, k) in small_code_shape(), seed in any::<u64>()) {
        let code = LinearCode::random(field(q), n, k, &mut stream_rng(seed, 0));
        let back = code.dual().dual();
        prop_assert_eq!(back.rank(), code.rank());
        for row in code.generator().row_iter() {
            prop_assert!(back.contains(row).unwrap());
        }
        prop_assert_eq!(code.dual().rank(), n - code.rank());
    }

    #[test]
    fn coset_spectra_partition_the_space((q, n, k) in small_code_shape(), seed in any::<u64>()) {
        let code = LinearCode::random(field(q), n, k, &mut stream_rng(seed, 0));
        let sp = CosetSpectra::compute(&code, BUDGET).unwrap();
        let total: u64 = sp.iter().flat_map(|r| r.iter()).sum();
        prop_assert_eq!(total, (q as u64).pow(n as u32));
        let coset = (q as u64).pow((n - code.rank()) as u32);
        for row in sp.iter() {
            let s: u64 = row.iter().sum();
            prop_assert!(s == 0 || s == coset);
        }
        prop_assert_eq!(sp.counts(0)[0], 1);
        for s in 1..sp.num_syndromes() {
            prop_assert_eq!(sp.counts(s)[0], 0);
        }
    }

    #[test]
    fn recovery_inverts_restriction((q, n, k) in small_code_shape(), seed in any::<u64>()) {
        let mut rng = stream_rng(seed, 0);
        let code = LinearCode::random(field(q), n, k, &mut rng);
        let c = code.encode(&code.random_message(&mut rng)).unwrap();
        let all: Vec<usize> = (0..n).collect();
        match code.recover_from_coordinates(&all, &c.0) {
            Ok(back) => prop_assert_eq!(back, c),
            Err(Error::RankDeficient { .. }) => prop_assert!(!code.is_full_rank()),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        }
    }

    #[test]
    fn qft_preserves_norm_and_inverts(q in small_q(), n in 1usize..4, seed in any::<u64>()) {
        let f = FiniteField::of_order(q).unwrap();
        let mut rng = stream_rng(seed, 0);
        let dim = (q as usize).pow(n as u32);
        let amps: Vec<Complex64> = (0..dim)
            .map(|_| Complex64::new(rand::Rng::random_range(&mut rng, -1.0..1.0), rand::Rng::random_range(&mut rng, -1.0..1.0)))
            .collect();
        let state = DenseState::from_amplitudes(q, n, amps).unwrap();
        let hat = qft_dense(&f, &state);
        prop_assert!((hat.norm_sqr() - state.norm_sqr()).abs() < 1e-10);
        let back = qft_dense_inverse(&f, &hat);
        for (a, b) in back.amplitudes().iter().zip(state.amplitudes()) {
            prop_assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn coset_norms_are_normalised((q, n, k) in small_code_shape(), frac in 0.0f64..1.0, seed in any::<u64>()) {
        let code = LinearCode::random(field(q), n, k, &mut stream_rng(seed, 0));
        let omega = frac * (q - 1) as f64 / q as f64;
        let s = pgm_spectrum(&code, &NoiseProfile::new(q, omega).unwrap(), BUDGET).unwrap();
        prop_assert!((s.total_norm_sqr() - 1.0).abs() < 1e-9);
        prop_assert!(s.n_s.iter().all(|&x| x >= 0.0));
        prop_assert!((0.0..=1.0).contains(&s.p_pgm));
        let (lo, hi) = s.optimal_bounds();
        prop_assert!(lo <= hi + 1e-15);
    }

    #[test]
    fn coset_norms_ignore_representatives((q, n, k) in small_code_shape(), seed in any::<u64>()) {
        let mut rng = stream_rng(seed, 0);
        let code = LinearCode::random(field(q), n, k, &mut rng);
        let a = CosetSpectra::compute(&code, BUDGET).unwrap();
        let b = CosetSpectra::compute_with_random_representatives(&code, BUDGET, &mut rng).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn usd_is_sound(q in prop::sample::select(SMALL_FIELDS.to_vec()), frac in 0.0f64..=1.0, seed in any::<u64>()) {
        let p = NoiseProfile::new(q, frac * (q - 1) as f64 / q as f64).unwrap();
        let mut rng = stream_rng(seed, 0);
        for b in 0..q as u16 {
            for _ in 0..50 {
                if let UsdOutcome::Symbol(a) = qary_usd_sample(&p, b, &mut rng) {
                    prop_assert_eq!(a, b);
                }
            }
        }
    }

    #[test]
    fn usd_decoder_never_mislabels(q in prop::sample::select(vec![2u32, 3]), n in 20usize..60, omega in 0.0f64..0.3, seed in any::<u64>()) {
        let k = n / 3;
        let mut rng = stream_rng(seed, 0);
        let inst = sample_instance(field(q), n, k, NoiseModel::symmetric(q, omega).unwrap(), &mut rng).unwrap();
        let r = solve_usd(&inst, &mut rng).unwrap();
        if r.rank == Some(k) {
            prop_assert_eq!(r.outcome, SolveOutcome::Recovered);
        } else {
            prop_assert_eq!(r.outcome, SolveOutcome::Abstain);
        }
    }

    #[test]
    fn pgm_outputs_codewords((q, n, k) in small_code_shape(), frac in 0.0f64..1.0, seed in any::<u64>()) {
        let mut rng = stream_rng(seed, 0);
        let noise = NoiseModel::symmetric(q, frac * (q - 1) as f64 / q as f64).unwrap();
        let inst = sample_instance(field(q), n, k, noise, &mut rng).unwrap();
        let m = PgmMeasurement::new(inst.code(), &noise, BUDGET).unwrap();
        let r = solve_pgm_exact(&inst, &m, &mut rng).unwrap();
        let c = r.candidate.unwrap();
        prop_assert!(inst.code().contains(&c.0).unwrap());
    }

    #[test]
    fn tweaked_success_dominates_bounds(n in 6usize..12, frac in 0.05f64..0.95, seed in any::<u64>()) {
        let code_prime = LinearCode::random(field(2), n, n / 2, &mut stream_rng(seed, 0));
        let scp = ScpInstance::new(code_prime, frac * 0.5).unwrap();
        prop_assert!((qdp_core::noise::omega_perp(2, scp.omega()).unwrap() - scp.omega_prime()).abs() < 1e-12);
        match pgm_tweaked_distribution(scp.code(), &NoiseProfile::new(2, scp.omega()).unwrap(), BUDGET) {
            Ok(d) => {
                prop_assert_eq!(d.p[0], 0.0);
                prop_assert!((d.p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
                prop_assert!(d.success_prob + 1e-12 >= d.lower_bound);
                prop_assert!(d.lower_bound + 1e-12 >= d.coarse_bound);
            }
            Err(Error::DegenerateDual) => prop_assert_eq!(scp.code_prime().rank(), 0),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        }
    }

    #[test]
    fn usd_path_words_lie_in_target(q in prop::sample::select(vec![2u32, 3]), seed in any::<u64>()) {
        let mut rng = stream_rng(seed, 0);
        let scp = ScpInstance::random(field(q), 40, 20, 0.4 * (q - 1) as f64 / q as f64 + 0.1, &mut rng).unwrap();
        match reduce_usd_path(&scp, &mut rng) {
            Ok(r) => {
                if let Some(w) = r.weight() {
                    prop_assert!(w <= 40);
                }
                if let qdp_core::regev::ReductionOutcome::Codeword { word, .. } = &r.outcome {
                    prop_assert!(scp.code_prime().contains(&word.0).unwrap());
                    prop_assert_eq!(word.0.len(), 40);
                }
            }
            Err(Error::JRejected { .. }) | Err(Error::DegenerateDual) => {}
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        }
    }

    #[test]
    fn vector_index_round_trip(q in small_q(), n in 0usize..6, raw in any::<usize>()) {
        let dim = (q as usize).pow(n as u32);
        let idx = raw % dim;
        prop_assert_eq!(FieldVector::from_index(idx, q, n).index(q), idx);
    }
}
