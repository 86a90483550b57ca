//! Exponent sweep: run generate → cover → verify over a grid of ε and seeds
//! and fit the slope of `log(planks_used)` against `log(1/ε)`.

use std::io::Write;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::engine::{run_cover, EngineConfig, Mode};
use crate::instances::{gen_adversarial, gen_parallel, gen_random, AdversarialParams};
use crate::measure::verify_cover;
use crate::types::{Instance, UnitVector};

use super::CliError;

pub const CSV_HEADER: &str = "epsilon,k_supplied,planks_used,covered,mode,seed,wall_time_s";

/// `ceil(c * eps^(p))` with literal `c` and `p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KRule {
    pub coefficient: f64,
    pub exponent: f64,
}

impl KRule {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let bad = || {
            CliError::Usage(format!(
                "k rule must look like \"ceil(c * eps^(p))\", got {text:?}"
            ))
        };
        let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let inner = s
            .strip_prefix("ceil(")
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(bad)?;
        let (c, rest) = inner.split_once('*').ok_or_else(bad)?;
        let p = rest
            .strip_prefix("eps^(")
            .and_then(|r| r.strip_suffix(')'))
            .or_else(|| rest.strip_prefix("eps^"))
            .ok_or_else(bad)?;
        let coefficient: f64 = c.parse().map_err(|_| bad())?;
        let exponent: f64 = p.parse().map_err(|_| bad())?;
        if !(coefficient.is_finite() && coefficient > 0.0 && exponent.is_finite()) {
            return Err(bad());
        }
        Ok(Self {
            coefficient,
            exponent,
        })
    }

    /// Values within a relative 1e-12 above an integer round down to it, so
    /// `ceil(2 * eps^(-1))` at ε = 0.1 is 20 rather than 21.
    pub fn eval(&self, eps: f64) -> usize {
        let x = self.coefficient * eps.powf(self.exponent);
        (x * (1.0 - 1e-12)).ceil().max(1.0) as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Generator {
    Random,
    Parallel,
    Adversarial,
}

impl Generator {
    pub fn as_str(&self) -> &'static str {
        match self {
            Generator::Random => "random",
            Generator::Parallel => "parallel",
            Generator::Adversarial => "adversarial",
        }
    }
}

fn default_verify_samples() -> u64 {
    100_000
}

fn default_tol() -> f64 {
    crate::convex::DEFAULT_TOL
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub epsilons: Vec<f64>,
    pub generator: Generator,
    pub mode: Mode,
    pub seeds: Vec<u64>,
    /// Required for random and parallel generators; adversarial instances
    /// set their own size.
    #[serde(default)]
    pub k_rule: Option<String>,
    #[serde(default)]
    pub normal: Option<[f64; 3]>,
    #[serde(default)]
    pub cap_angle: Option<f64>,
    #[serde(default)]
    pub separation_factor: Option<f64>,
    #[serde(default = "default_verify_samples")]
    pub verify_samples: u64,
    #[serde(default = "default_tol")]
    pub tol_support: f64,
    #[serde(default = "default_tol")]
    pub tol_empty: f64,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<Option<KRule>, CliError> {
        if self.epsilons.is_empty() {
            return Err(CliError::Usage("sweep needs at least one epsilon".into()));
        }
        if self.seeds.is_empty() {
            return Err(CliError::Usage("sweep needs at least one seed".into()));
        }
        if let Some(e) = self.epsilons.iter().find(|e| !(e.is_finite() && **e > 0.0)) {
            return Err(CliError::Usage(format!(
                "epsilon must be positive, got {e}"
            )));
        }
        if self.verify_samples == 0 {
            return Err(CliError::Usage("verify_samples must be at least 1".into()));
        }
        match (self.generator, &self.k_rule) {
            (Generator::Adversarial, _) => {
                if self.cap_angle.is_none() || self.separation_factor.is_none() {
                    return Err(CliError::Usage(
                        "adversarial sweeps need cap_angle and separation_factor".into(),
                    ));
                }
                self.k_rule.as_deref().map(KRule::parse).transpose()
            }
            (_, Some(rule)) => KRule::parse(rule).map(Some),
            (_, None) => Err(CliError::Usage(
                "k_rule is required for this generator".into(),
            )),
        }
    }

    fn instance(&self, rule: Option<KRule>, eps: f64, seed: u64) -> crate::Result<Instance> {
        match self.generator {
            Generator::Random => gen_random(rule.map_or(1, |r| r.eval(eps)), eps, seed),
            Generator::Parallel => {
                let n = self.normal.unwrap_or([0.0, 0.0, 1.0]);
                gen_parallel(
                    rule.map_or(1, |r| r.eval(eps)),
                    eps,
                    UnitVector::from_components(n)?,
                )
            }
            Generator::Adversarial => gen_adversarial(&AdversarialParams::new(
                eps,
                self.cap_angle.unwrap_or_default(),
                self.separation_factor.unwrap_or_default(),
                seed,
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub epsilon: f64,
    pub k_supplied: usize,
    pub planks_used: usize,
    pub covered: bool,
    pub mode: String,
    pub seed: u64,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SlopeFit {
    pub generator: String,
    pub mode: String,
    pub slope: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub fits: Vec<SlopeFit>,
}

/// Ordinary least-squares slope of `y` on `x`; NaN with fewer than two
/// distinct `x`.
pub fn ls_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    if points.len() < 2 {
        return f64::NAN;
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return f64::NAN;
    }
    sxy / sxx
}

/// One cell. Failures are reported on stderr and leave an uncovered row.
pub fn run_cell(config: &SweepConfig, rule: Option<KRule>, eps: f64, seed: u64) -> SweepRow {
    let start = Instant::now();
    let mut row = SweepRow {
        epsilon: eps,
        k_supplied: 0,
        planks_used: 0,
        covered: false,
        mode: config.mode.as_str().to_string(),
        seed,
        wall_time_s: 0.0,
    };
    let engine = EngineConfig {
        mode: config.mode,
        tol_support: config.tol_support,
        tol_empty: config.tol_empty,
        ..EngineConfig::default()
    };
    let outcome = config.instance(rule, eps, seed).and_then(|inst| {
        let cert = run_cover(&inst, &engine)?;
        Ok((inst, cert))
    });
    match outcome {
        Ok((inst, cert)) => {
            row.k_supplied = inst.len();
            row.planks_used = cert.planks_used;
            row.covered = cert.covered;
            if let Some(e) = &cert.error {
                eprintln!("cell eps={eps} seed={seed}: {e}");
            }
            if cert.covered {
                match verify_cover(&inst, &cert, config.verify_samples, seed) {
                    Ok(0.0) => {}
                    Ok(f) => {
                        eprintln!("cell eps={eps} seed={seed}: claimed cover leaves fraction {f}");
                        row.covered = false;
                    }
                    Err(e) => {
                        eprintln!("cell eps={eps} seed={seed}: verification failed: {e}");
                        row.covered = false;
                    }
                }
            }
        }
        Err(e) => eprintln!("cell eps={eps} seed={seed}: {e}"),
    }
    row.wall_time_s = start.elapsed().as_secs_f64();
    row
}

/// Runs every (ε, seed) cell on a pool of `workers` threads. Rows come back
/// in grid order (ε outer, seed inner) whatever the execution order.
pub fn run_sweep(config: &SweepConfig, workers: usize) -> Result<SweepResult, CliError> {
    let rule = config.validate()?;
    let cells: Vec<(f64, u64)> = config
        .epsilons
        .iter()
        .flat_map(|&e| config.seeds.iter().map(move |&s| (e, s)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start worker pool: {e}")))?;
    let rows: Vec<SweepRow> = pool.install(|| {
        use rayon::prelude::*;
        cells
            .par_iter()
            .map(|&(e, s)| run_cell(config, rule, e, s))
            .collect()
    });
    let points: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.planks_used > 0)
        .map(|r| ((1.0 / r.epsilon).ln(), (r.planks_used as f64).ln()))
        .collect();
    let fits = vec![SlopeFit {
        generator: config.generator.as_str().to_string(),
        mode: config.mode.as_str().to_string(),
        slope: ls_slope(&points),
        points: points.len(),
    }];
    Ok(SweepResult { rows, fits })
}

/// CSV rows under the fixed header, then one `# slope,...` comment line per
/// fitted group. With `omit_timing` the wall time column is written as 0.
pub fn write_csv<W: Write>(out: W, result: &SweepResult, omit_timing: bool) -> std::io::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    w.write_record(CSV_HEADER.split(','))?;
    for row in &result.rows {
        let mut row = row.clone();
        if omit_timing {
            row.wall_time_s = 0.0;
        }
        w.serialize(&row)?;
    }
    let mut out = w.into_inner().map_err(|e| e.into_error())?;
    for f in &result.fits {
        writeln!(
            out,
            "# slope,{},{},{},{}",
            f.generator, f.mode, f.slope, f.points
        )?;
    }
    out.flush()
}
