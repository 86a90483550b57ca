//! Command bodies, shared by the binary and the integration tests.

use std::fs;
use std::path::Path;

use crate::engine::{run_cover, verify_certificate_static, EngineConfig};
use crate::instances::{gen_adversarial, gen_parallel, gen_random, AdversarialParams};
use crate::measure::verify_cover;
use crate::types::{CoverCertificate, Instance, UnitVector};

use super::json::{read_json, write_json};
use super::obj::export_obj;
use super::sweep::{run_sweep, write_csv, SweepConfig, SweepResult};
use super::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum GenRequest {
    Random {
        k: usize,
        epsilon: f64,
        seed: u64,
    },
    Parallel {
        k: usize,
        epsilon: f64,
        normal: [f64; 3],
    },
    Adversarial(AdversarialParams),
}

pub fn generate(req: &GenRequest) -> Result<Instance, CliError> {
    let inst = match req {
        GenRequest::Random { k, epsilon, seed } => gen_random(*k, *epsilon, *seed)?,
        GenRequest::Parallel { k, epsilon, normal } => {
            gen_parallel(*k, *epsilon, UnitVector::from_components(*normal)?)?
        }
        GenRequest::Adversarial(p) => gen_adversarial(p)?,
    };
    Ok(inst)
}

pub fn cmd_gen(req: &GenRequest, out: &Path) -> Result<Instance, CliError> {
    let inst = generate(req)?;
    if let GenRequest::Adversarial(p) = req {
        if p.is_saturated() {
            eprintln!(
                "warning: separation {} is at least the cap diameter {}; only one plank fits",
                p.separation(),
                2.0 * p.cap_angle
            );
        }
    }
    write_json(out, &inst)?;
    Ok(inst)
}

/// Writes the certificate even when the run stopped on a numerical failure,
/// then reports that failure.
pub fn cmd_cover(
    instance: &Path,
    config: &EngineConfig,
    out: &Path,
) -> Result<CoverCertificate, CliError> {
    let inst: Instance = read_json(instance)?;
    let cert = run_cover(&inst, config)?;
    write_json(out, &cert)?;
    if let Some(e) = &cert.error {
        return Err(CliError::Numerical(e.clone()));
    }
    Ok(cert)
}

pub fn cmd_verify(
    instance: &Path,
    certificate: &Path,
    samples: u64,
    seed: u64,
) -> Result<f64, CliError> {
    let inst: Instance = read_json(instance)?;
    let cert: CoverCertificate = read_json(certificate)?;
    let report = verify_certificate_static(&inst, &cert);
    if !report.is_valid() {
        return Err(CliError::Static(report.reasons));
    }
    let fraction = verify_cover(&inst, &cert, samples, seed)?;
    println!("uncovered_fraction {fraction}");
    if fraction > 0.0 {
        return Err(CliError::Uncovered(fraction));
    }
    Ok(fraction)
}

pub fn cmd_sweep(
    config: &Path,
    out: &Path,
    workers: usize,
    omit_timing: bool,
) -> Result<SweepResult, CliError> {
    let cfg: SweepConfig = read_json(config)?;
    let result = run_sweep(&cfg, workers)?;
    let io = |source| CliError::Io {
        path: out.display().to_string(),
        source,
    };
    let file = fs::File::create(out).map_err(io)?;
    write_csv(std::io::BufWriter::new(file), &result, omit_timing).map_err(io)?;
    for f in &result.fits {
        println!(
            "slope {} {} {:.4} ({} points)",
            f.generator, f.mode, f.slope, f.points
        );
    }
    Ok(result)
}

pub fn cmd_export_obj(instance: &Path, certificate: &Path, out: &Path) -> Result<(), CliError> {
    let inst: Instance = read_json(instance)?;
    let cert: CoverCertificate = read_json(certificate)?;
    let text = export_obj(&inst, &cert)?;
    fs::write(out, text).map_err(|source| CliError::Io {
        path: out.display().to_string(),
        source,
    })
}
