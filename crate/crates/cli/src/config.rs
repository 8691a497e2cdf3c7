//! Run configuration: flags layered over an optional TOML file, resolved
//! against per-command defaults.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use qdp_core::codes::DEFAULT_ENUMERATION_BUDGET;
use qdp_core::gf::FieldSpec;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Solver {
    #[default]
    Usd,
    PartialUsd,
    Pgm,
    Ml,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    #[default]
    Usd,
    PgmPlain,
    PgmTweaked,
    PgmCounterexample,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    Thresholds,
    SolveQdp,
    Reduce,
    Pgm,
    Prange,
    Verify,
    Sweep,
}

/// Every tunable. Unset values fall back to the config file, then to the
/// command's defaults.
#[derive(Args, Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Settings {
    /// Field descriptor `p^s`
    #[arg(long, global = true)]
    pub field: Option<FieldSpec>,
    /// Code length
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// Code dimension (k' for reduce and prange)
    #[arg(long, global = true)]
    pub k: Option<usize>,
    /// Noise rate ω (ω' for reduce and prange, t with --theta)
    #[arg(long, global = true)]
    pub omega: Option<f64>,
    /// Phase θ of the binary phase family
    #[arg(long, global = true)]
    pub theta: Option<f64>,
    #[arg(long, global = true)]
    pub trials: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Enumeration budget for exhaustive steps
    #[arg(long, global = true)]
    pub budget: Option<u64>,
    /// Output file; stdout when absent. A manifest is written next to it.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Worker threads for trial loops
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Decoder used by solve-qdp
    #[arg(long, global = true, value_enum)]
    pub solver: Option<Solver>,
    /// Residual noise for the partial-USD solver
    #[arg(long, global = true)]
    pub omega_prime: Option<f64>,
    /// Kept fraction p for the partial-USD solver
    #[arg(long, global = true)]
    pub keep: Option<f64>,
    /// Number of distinct random codes; trial t uses code t mod codes
    #[arg(long, global = true)]
    pub codes: Option<usize>,
    /// Reduction variant
    #[arg(long, global = true, value_enum)]
    pub variant: Option<Variant>,
    /// Comma-separated rates for thresholds
    #[arg(long, global = true, value_delimiter = ',')]
    pub rates: Option<Vec<f64>>,
    /// Comma-separated noise grid for sweep
    #[arg(long, global = true, value_delimiter = ',')]
    pub omegas: Option<Vec<f64>>,
    /// `random`, `repetition`, or a JSON code file (pgm)
    #[arg(long, global = true)]
    pub code: Option<String>,
    /// Also run the dense oracle (pgm)
    #[arg(long, global = true, num_args = 0..=1, default_missing_value = "true")]
    pub dense: Option<bool>,
}

macro_rules! overlay {
    ($base:expr, $top:expr, $($f:ident),*) => {
        Settings { $($f: $top.$f.or($base.$f)),* }
    };
}

impl Settings {
    pub fn from_toml_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)?;
        toml::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
    }

    /// Values in `top` win.
    pub fn overlay(self, top: Settings) -> Settings {
        overlay!(
            self, top, field, n, k, omega, theta, trials, seed, budget, out, format, threads, solver, omega_prime,
            keep, codes, variant, rates, omegas, code, dense
        )
    }
}

/// Fully resolved configuration of one run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: CommandKind,
    pub field: FieldSpec,
    pub n: usize,
    pub k: usize,
    pub omega: f64,
    pub theta: Option<f64>,
    pub trials: usize,
    pub seed: u64,
    pub budget: u64,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub threads: usize,
    pub solver: Solver,
    pub omega_prime: Option<f64>,
    pub keep: Option<f64>,
    pub codes: usize,
    pub variant: Variant,
    pub rates: Vec<f64>,
    pub omegas: Vec<f64>,
    pub code: String,
    pub dense: bool,
}

fn grid(lo: f64, step: f64, count: usize) -> Vec<f64> {
    // rounded so that printed values stay short
    (0..count).map(|i| ((lo + step * i as f64) * 1e9).round() / 1e9).collect()
}

impl RunConfig {
    pub fn resolve(command: CommandKind, s: Settings) -> Result<Self, CliError> {
        use CommandKind::*;
        let field = s.field.unwrap_or(FieldSpec::new(2, 1));
        let q = field.order().ok_or_else(|| CliError::Usage(format!("field {field} is too large")))?;
        let top = (q - 1) as f64 / q as f64;
        let pgm_variant = s.variant.is_some_and(|v| v != Variant::Usd);
        let (n0, k0, trials0) = match command {
            Pgm => (16, 8, 1),
            Reduce if pgm_variant => (16, 8, 100),
            Sweep => (24, 12, 200),
            _ => (200, 100, 100),
        };
        let n = s.n.unwrap_or(n0);
        let k = s.k.unwrap_or(k0.min(n));
        // reduce and prange: ω' with p_usd = (1 + R)/2
        let omega0 = match command {
            Reduce | Prange => top * (1.0 + k as f64 / n.max(1) as f64) / 2.0,
            Pgm => 0.1,
            _ => 0.05,
        };
        let solver = s.solver.unwrap_or_default();
        let trials = s.trials.unwrap_or(trials0);
        let codes0 = match (command, solver) {
            (SolveQdp, Solver::Usd | Solver::PartialUsd) => trials.max(1),
            _ => 1,
        };
        let cfg = RunConfig {
            command,
            field,
            n,
            k,
            omega: s.omega.unwrap_or(omega0),
            theta: s.theta,
            trials,
            seed: s.seed.unwrap_or(1),
            budget: s.budget.unwrap_or(DEFAULT_ENUMERATION_BUDGET),
            // per-trial reduction records default to JSON lines
            format: s.format.unwrap_or(if command == Reduce { Format::Json } else { Format::Csv }),
            out: s.out,
            threads: s.threads.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |t| t.get())),
            solver,
            omega_prime: s.omega_prime,
            keep: s.keep,
            codes: s.codes.unwrap_or(codes0),
            variant: s.variant.unwrap_or_default(),
            rates: s.rates.unwrap_or_else(|| grid(0.01, 0.01, 99)),
            omegas: s.omegas.unwrap_or_else(|| grid(0.02, 0.02, 17)),
            code: s.code.unwrap_or_else(|| "random".into()),
            dense: s.dense.unwrap_or(false),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Usage(m));
        if self.k > self.n {
            return bad(format!("k = {} exceeds n = {}", self.k, self.n));
        }
        if self.threads == 0 {
            return bad("threads must be positive".into());
        }
        if self.codes == 0 {
            return bad("codes must be positive".into());
        }
        if !self.omega.is_finite() || self.omega < 0.0 {
            return bad(format!("omega = {} is not a probability", self.omega));
        }
        if self.command == CommandKind::Thresholds
            && (self.rates.len() < 2 || self.rates.iter().any(|r| !(*r > 0.0 && *r < 1.0)))
        {
            return bad("thresholds needs at least two rates in (0, 1)".into());
        }
        Ok(())
    }

    /// The settings that reproduce this configuration.
    pub fn to_settings(&self) -> Settings {
        Settings {
            field: Some(self.field),
            n: Some(self.n),
            k: Some(self.k),
            omega: Some(self.omega),
            theta: self.theta,
            trials: Some(self.trials),
            seed: Some(self.seed),
            budget: Some(self.budget),
            out: self.out.clone(),
            format: Some(self.format),
            threads: Some(self.threads),
            solver: Some(self.solver),
            omega_prime: self.omega_prime,
            keep: self.keep,
            codes: Some(self.codes),
            variant: Some(self.variant),
            rates: Some(self.rates.clone()),
            omegas: Some(self.omegas.clone()),
            code: Some(self.code.clone()),
            dense: Some(self.dense),
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(&self.to_settings()).expect("settings serialize")
    }

    /// SHA-256 of the canonical JSON of the fields that affect results.
    pub fn hash(&self) -> String {
        let mut v = serde_json::to_value(self).expect("config serializes");
        let obj = v.as_object_mut().expect("struct");
        for key in ["out", "threads", "format"] {
            obj.remove(key);
        }
        hex::encode(Sha256::digest(v.to_string().as_bytes()))
    }
}
