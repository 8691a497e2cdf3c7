//! One function per subcommand. Each returns a table and a summary; trial
//! loops run on a pool of `--threads` workers and are seeded per trial, so
//! the output does not depend on the thread count.

use std::sync::Arc;

use qdp_core::codes::{CodeFile, LinearCode};
use qdp_core::gf::FiniteField;
use qdp_core::measure::{partial_usd_probabilities, pgm_dense_oracle, pgm_spectrum, NoiseModel, PgmMeasurement};
use qdp_core::noise::{thresholds, NoiseProfile};
use qdp_core::regev::{
    compare_prange, pgm_final_distribution, pgm_tweaked_distribution, reduce_pgm_path, reduce_usd_path,
    ReductionOutcome, ReductionVariant, ScpInstance,
};
use qdp_core::rng::{derive_seed, stream_rng};
use qdp_core::solvers::{
    solve_classical_ml, solve_partial_usd, solve_pgm_exact, solve_phase_usd, solve_usd, tractability_sweep,
    QdpInstance, SolveOutcome, SweepConfig,
};
use qdp_core::verify::run_oracle_suite;
use qdp_core::Error;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{CommandKind, RunConfig, Solver, Variant};
use crate::output::{RunResult, SideTable};
use crate::CliError;

/// Seed labels, so that codes and trial streams never share a generator.
const LABEL_CODES: u64 = 1;
const LABEL_SCP: u64 = 2;

pub fn execute(cfg: &RunConfig) -> Result<RunResult, CliError> {
    match cfg.command {
        CommandKind::Thresholds => cmd_thresholds(cfg),
        CommandKind::SolveQdp => cmd_solve(cfg),
        CommandKind::Reduce => cmd_reduce(cfg),
        CommandKind::Pgm => cmd_pgm(cfg),
        CommandKind::Prange => cmd_prange(cfg),
        CommandKind::Verify => Ok(cmd_verify()),
        CommandKind::Sweep => cmd_sweep(cfg),
    }
}

fn field(cfg: &RunConfig) -> Result<Arc<FiniteField>, CliError> {
    Ok(Arc::new(FiniteField::from_spec(cfg.field)?))
}

/// Maps `f` over `0..len` on the configured pool, keeping the order.
fn par_map<T, F>(cfg: &RunConfig, len: usize, f: F) -> Result<Vec<T>, CliError>
where
    T: Send,
    F: Fn(usize) -> Result<T, CliError> + Sync + Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    pool.install(|| (0..len).into_par_iter().map(f).collect())
}

fn tag<T: serde::Serialize>(x: T) -> Value {
    serde_json::to_value(x).unwrap_or(Value::Null)
}

fn cmd_thresholds(cfg: &RunConfig) -> Result<RunResult, CliError> {
    let q = field(cfg)?.order();
    let top = (q - 1) as f64 / q as f64;
    let rows = cfg.rates.iter().map(|&r| thresholds::<f64>(q, r)).collect::<Result<Vec<_>, _>>()?;
    // every bound lies in [0, (q-1)/q], easy ≤ tractable, and each bound is
    // nonincreasing in R; checked before anything is written
    let mut bad = Vec::new();
    for t in &rows {
        let in_range = [t.easy, t.classical, t.tractable].iter().all(|x| (0.0..=top + 1e-12).contains(x));
        if !in_range || t.easy > t.tractable + 1e-12 {
            bad.push(t.rate);
        }
    }
    let mut sorted: Vec<_> = rows.iter().collect();
    sorted.sort_by(|a, b| a.rate.total_cmp(&b.rate));
    for w in sorted.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b.easy > a.easy + 1e-12 || b.classical > a.classical + 1e-12 || b.tractable > a.tractable + 1e-12 {
            bad.push(b.rate);
        }
    }
    if !bad.is_empty() {
        return Err(CliError::Verify(format!("threshold ordering fails at R = {bad:?}")));
    }
    let mut out = RunResult::new(&["q", "R", "easy", "classical", "tractable"]);
    for t in &rows {
        out.push(vec![json!(q), json!(t.rate), json!(t.easy), json!(t.classical), json!(t.tractable)]);
    }
    out.summary = json!({ "q": q, "points": rows.len() });
    Ok(out)
}

fn cmd_solve(cfg: &RunConfig) -> Result<RunResult, CliError> {
    let f = field(cfg)?;
    let q = f.order();
    let noise = match cfg.theta {
        Some(_) if q != 2 => return Err(CliError::Usage("--theta needs the binary field".into())),
        Some(_) if cfg.solver != Solver::Usd => return Err(CliError::Usage("--theta needs --solver usd".into())),
        Some(theta) => NoiseModel::phase(cfg.omega, theta)?,
        None => NoiseModel::symmetric(q, cfg.omega)?,
    };
    let (omega_prime, keep, u) = if cfg.solver == Solver::PartialUsd {
        if q != 2 {
            return Err(CliError::Usage("partial USD is binary only".into()));
        }
        let omega_prime = cfg.omega_prime.unwrap_or(cfg.omega / 2.0);
        let u = partial_usd_probabilities(cfg.omega, omega_prime)?.keep;
        (omega_prime, cfg.keep.unwrap_or(0.95 * u), u)
    } else {
        (0.0, 0.0, 0.0)
    };

    let ncodes = cfg.codes.min(cfg.trials.max(1));
    let code_seed = derive_seed(cfg.seed, LABEL_CODES);
    let codes = par_map(cfg, ncodes, |ci| {
        Ok(LinearCode::random(f.clone(), cfg.n, cfg.k, &mut stream_rng(code_seed, ci as u64)))
    })?;
    let measurements = if cfg.solver == Solver::Pgm {
        par_map(cfg, ncodes, |ci| Ok(PgmMeasurement::new(&codes[ci], &noise, cfg.budget)?))?
    } else {
        Vec::new()
    };

    let reports = par_map(cfg, cfg.trials, |t| {
        let ci = t % ncodes;
        let mut rng = stream_rng(cfg.seed, t as u64);
        let inst = QdpInstance::random_message(codes[ci].clone(), noise, &mut rng)?;
        let r = match cfg.solver {
            Solver::Usd if cfg.theta.is_some() => solve_phase_usd(&inst, &mut rng)?,
            Solver::Usd => solve_usd(&inst, &mut rng)?,
            Solver::PartialUsd => solve_partial_usd(&inst, omega_prime, keep, &mut rng)?,
            Solver::Pgm => solve_pgm_exact(&inst, &measurements[ci], &mut rng)?,
            Solver::Ml => solve_classical_ml(&inst, &mut rng, cfg.budget)?,
        };
        Ok(r)
    })?;

    let mut out = RunResult::new(&["trial", "code", "outcome", "revealed", "rank"]);
    let mut counts = [0usize; 3];
    for (t, r) in reports.iter().enumerate() {
        counts[r.outcome as usize] += 1;
        out.push(vec![json!(t), json!(t % ncodes), tag(r.outcome), json!(r.revealed), json!(r.rank)]);
    }
    let [recovered, wrong, abstained] = counts;
    let mut summary = json!({
        "solver": cfg.solver,
        "trials": cfg.trials,
        "codes": ncodes,
        "recovered": recovered,
        "wrong_codeword": wrong,
        "abstained": abstained,
        "success_rate": recovered as f64 / cfg.trials.max(1) as f64,
        "usd_success": noise.usd_success(),
    });
    match cfg.solver {
        Solver::PartialUsd => {
            summary["omega_prime"] = json!(omega_prime);
            summary["keep"] = json!(keep);
            summary["survive"] = json!(u);
            // Hoeffding: Pr[|J| < pn] ≤ exp(-2n(u - p)²) for p < u
            let shortfall = if keep < u { (-2.0 * cfg.n as f64 * (u - keep).powi(2)).exp() } else { 1.0 };
            summary["kept_shortfall_bound"] = json!(shortfall);
        }
        Solver::Pgm => {
            let mean = measurements.iter().map(|m| m.success_probability()).sum::<f64>() / ncodes as f64;
            summary["p_pgm"] = json!(mean);
        }
        _ => {}
    }
    out.summary = summary;
    Ok(out)
}

fn scp_instance(cfg: &RunConfig) -> Result<ScpInstance, CliError> {
    let mut rng = stream_rng(derive_seed(cfg.seed, LABEL_SCP), 0);
    Ok(ScpInstance::random(field(cfg)?, cfg.n, cfg.k, cfg.omega, &mut rng)?)
}

fn outcome_kind(o: &ReductionOutcome) -> &'static str {
    match o {
        ReductionOutcome::Codeword { .. } => "codeword",
        ReductionOutcome::Zero => "zero",
        ReductionOutcome::Bottom => "bottom",
        ReductionOutcome::Abort => "abort",
    }
}

fn cmd_reduce(cfg: &RunConfig) -> Result<RunResult, CliError> {
    let scp = scp_instance(cfg)?;
    let variant = match cfg.variant {
        Variant::Usd => ReductionVariant::UsdPath,
        Variant::PgmPlain => ReductionVariant::PgmPlain,
        Variant::PgmTweaked => ReductionVariant::PgmTweaked,
        Variant::PgmCounterexample => ReductionVariant::PgmCounterexample,
    };
    let rows = par_map(cfg, cfg.trials, |t| {
        let mut rng = stream_rng(cfg.seed, t as u64);
        let r = match variant {
            ReductionVariant::UsdPath => reduce_usd_path(&scp, &mut rng),
            v => reduce_pgm_path(&scp, v, cfg.budget, &mut rng),
        };
        let null = Value::Null;
        Ok(match r {
            Ok(r) => vec![
                json!(t),
                json!(outcome_kind(&r.outcome)),
                json!(r.weight()),
                json!(r.success),
                json!(r.j_size),
                json!(r.j_attempts),
                json!(r.dual_dim),
                json!(r.branch_probability),
            ],
            Err(Error::JRejected { attempts }) => {
                vec![json!(t), json!("rejected"), null.clone(), json!(false), null.clone(), json!(attempts), null.clone(), null]
            }
            Err(Error::DegenerateDual) => {
                vec![json!(t), json!("degenerate"), null.clone(), json!(false), null.clone(), json!(0), null.clone(), null]
            }
            Err(e) => return Err(e.into()),
        })
    })?;

    let mut out = RunResult::new(&[
        "trial",
        "outcome",
        "weight",
        "success",
        "j_size",
        "j_attempts",
        "dual_dim",
        "branch_probability",
    ]);
    let mut histogram = vec![0u64; scp.n() + 1];
    let (mut successes, mut nonzero, mut weight_sum) = (0usize, 0usize, 0usize);
    for row in rows {
        if row[3] == json!(true) {
            successes += 1;
        }
        if row[1] == json!("codeword") {
            let w = row[2].as_u64().unwrap_or(0) as usize;
            histogram[w] += 1;
            nonzero += 1;
            weight_sum += w;
        }
        out.push(row);
    }
    let weights: Vec<[u64; 2]> =
        histogram.iter().enumerate().filter(|(_, &c)| c > 0).map(|(w, &c)| [w as u64, c]).collect();
    out.side.push(SideTable {
        name: "histogram",
        columns: vec!["weight", "count"],
        rows: weights.iter().map(|&[w, c]| vec![json!(w), json!(c)]).collect(),
    });
    out.summary = json!({
        "variant": cfg.variant,
        "n": scp.n(),
        "k_prime": scp.k_prime(),
        "omega_prime": scp.omega_prime(),
        "omega": scp.omega(),
        "usd_success": scp.usd_success(),
        "rate": scp.rate(),
        "trials": cfg.trials,
        "successes": successes,
        "nonzero_codewords": nonzero,
        "mean_weight": if nonzero > 0 { json!(weight_sum as f64 / nonzero as f64) } else { Value::Null },
        "weight_histogram": weights,
        "prange_target": scp.prange_target(),
    });
    let flat = out.summary.as_object().into_iter().flatten().filter(|(_, v)| !v.is_array());
    let summary_rows = flat.map(|(k, v)| vec![json!(k), v.clone()]).collect();
    out.side.push(SideTable { name: "summary", columns: vec!["quantity", "value"], rows: summary_rows });
    Ok(out)
}

fn load_code(cfg: &RunConfig) -> Result<LinearCode, CliError> {
    Ok(match cfg.code.as_str() {
        "random" => {
            let mut rng = stream_rng(derive_seed(cfg.seed, LABEL_CODES), 0);
            LinearCode::random(field(cfg)?, cfg.n, cfg.k, &mut rng)
        }
        "repetition" => LinearCode::repetition(field(cfg)?, cfg.n),
        path => {
            let text = std::fs::read_to_string(path)?;
            let file: CodeFile =
                serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{path}: {e}")))?;
            LinearCode::from_file(&file)?
        }
    })
}

fn cmd_pgm(cfg: &RunConfig) -> Result<RunResult, CliError> {
    let code = load_code(cfg)?;
    let q = code.q();
    let profile = NoiseProfile::new(q, cfg.omega)?;
    let spec = pgm_spectrum(&code, &profile, cfg.budget)?;
    let (lo, hi) = spec.optimal_bounds();

    let mut out = RunResult::new(&["quantity", "index", "value"]);
    let mut put = |name: &str, i: Option<usize>, v: f64| out.push(vec![json!(name), json!(i), json!(v)]);
    for (s, &x) in spec.n_s.iter().enumerate() {
        put("n_s", Some(s), x);
    }
    put("p_pgm", None, spec.p_pgm);
    put("p_opt_lower", None, lo);
    put("p_opt_upper", None, hi);
    let plain = pgm_final_distribution(&code, &profile, cfg.budget)?;
    for (t, &p) in plain.p.iter().enumerate() {
        put("plain_p", Some(t), p);
    }
    let tweaked = match pgm_tweaked_distribution(&code, &profile, cfg.budget) {
        Ok(d) => Some(d),
        Err(Error::DegenerateDual) => None,
        Err(e) => return Err(e.into()),
    };
    if let Some(d) = &tweaked {
        for (t, &p) in d.p.iter().enumerate() {
            put("tweaked_p", Some(t), p);
        }
        put("tweaked_success", None, d.success_prob);
    }
    let dense = if cfg.dense { Some(pgm_dense_oracle(&code, &NoiseModel::Symmetric(profile))?.p_pgm) } else { None };
    if let Some(p) = dense {
        put("dense_p_pgm", None, p);
    }
    out.summary = json!({
        "q": q,
        "n": code.n(),
        "k": code.k(),
        "rank": code.rank(),
        "omega": cfg.omega,
        "p_pgm": spec.p_pgm,
        "p_opt": [lo, hi],
        "plain_p0": plain.p0,
        "tweaked_success": tweaked.as_ref().map(|d| d.success_prob),
        "tweaked_lower_bound": tweaked.as_ref().map(|d| d.lower_bound),
        "dense_p_pgm": dense,
    });
    Ok(out)
}

fn min_weight(h: &[u64]) -> Option<usize> {
    h.iter().enumerate().skip(1).find(|(_, &c)| c > 0).map(|(w, _)| w)
}

fn cmd_prange(cfg: &RunConfig) -> Result<RunResult, CliError> {
    let scp = scp_instance(cfg)?;
    let cmp = compare_prange(&scp, &mut stream_rng(cfg.seed, 0), cfg.trials)?;
    let mut out = RunResult::new(&["weight", "prange", "usd_path"]);
    for (w, (&a, &b)) in cmp.prange_histogram.iter().zip(&cmp.usd_histogram).enumerate() {
        if a > 0 || b > 0 {
            out.push(vec![json!(w), json!(a), json!(b)]);
        }
    }
    out.summary = json!({
        "n": scp.n(),
        "k_prime": scp.k_prime(),
        "omega_prime": scp.omega_prime(),
        "target": cmp.target,
        "degenerate_dual": cmp.degenerate_dual,
        "trials": cmp.trials,
        "prange_hits": cmp.prange_hits,
        "usd_accepted": cmp.usd_accepted,
        "prange_min_weight": min_weight(&cmp.prange_histogram),
        "usd_min_weight": min_weight(&cmp.usd_histogram),
    });
    Ok(out)
}

fn cmd_verify() -> RunResult {
    let checks = run_oracle_suite();
    let mut out = RunResult::new(&["name", "passed", "detail"]);
    let failed: Vec<&str> = checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
    out.summary = json!({ "checks": checks.len(), "failed": failed });
    if !failed.is_empty() {
        out.failure = Some(failed.join(", "));
    }
    for c in &checks {
        out.push(vec![json!(c.name), json!(c.passed), json!(c.detail)]);
    }
    out
}

fn cmd_sweep(cfg: &RunConfig) -> Result<RunResult, CliError> {
    let sweep = SweepConfig {
        n: cfg.n,
        k: cfg.k,
        omegas: cfg.omegas.clone(),
        trials: cfg.trials,
        codes: cfg.codes,
        seed: cfg.seed,
        budget: cfg.budget,
    };
    let rows = tractability_sweep(field(cfg)?, &sweep)?;
    let mut out = RunResult::new(&["omega", "trials", "successes", "rate", "p_pgm", "easy_bound", "tractable_bound"]);
    for r in &rows {
        out.push(vec![
            json!(r.omega),
            json!(r.trials),
            json!(r.successes),
            json!(r.successes as f64 / r.trials.max(1) as f64),
            json!(r.p_pgm),
            json!(r.easy_bound),
            json!(r.tractable_bound),
        ]);
    }
    let crossing = rows.iter().find(|r| r.p_pgm < 0.5).map(|r| r.omega);
    out.summary = json!({
        "n": cfg.n,
        "k": cfg.k,
        "points": rows.len(),
        "first_omega_below_half": crossing,
        "easy_bound": rows.first().map(|r| r.easy_bound),
        "tractable_bound": rows.first().map(|r| r.tractable_bound),
    });
    Ok(out)
}

/// `SolveOutcome` discriminants index the outcome counters.
const _: () = assert!(SolveOutcome::Recovered as usize == 0 && SolveOutcome::Abstain as usize == 2);
