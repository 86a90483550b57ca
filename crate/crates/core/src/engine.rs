//! Greedy tangent placement and certificate production.
//!
//! Each plank is translated along its normal until its upper boundary plane
//! supports the uncovered region K from above; K then gains the halfspace
//! below the plank's lower plane. K stays an intersection of convex sets, so
//! the uncovered part is connected after every step.

use serde::{Deserialize, Serialize};

use crate::convex::{is_empty, support_value, DEFAULT_TOL};
use crate::error::{CoverError, Result};
use crate::measure::{mc_parallel_volume, mc_volume, VolumeEstimate};
use crate::ordering::{
    build_angle_graph, build_angle_graph_bucketed, default_threshold, extract_order,
};
use crate::types::{
    ConvexRegion, CoverCertificate, Instance, PlacedPlank, Plank, StepRecord, StepVolumes,
};

/// Above this many planks the angle graph is built with spatial bucketing.
const BUCKETED_GRAPH_MIN: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Chunks of near-parallel planks from the angle graph.
    Chunked,
    /// Input order, verbatim.
    FixedOrder,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Chunked => "chunked",
            Mode::FixedOrder => "fixed_order",
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = CoverError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "chunked" => Ok(Mode::Chunked),
            "fixed_order" | "fixed-order" => Ok(Mode::FixedOrder),
            _ => Err(CoverError::InvalidParameter(format!("unknown mode {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EngineConfig {
    pub mode: Mode,
    pub tol_support: f64,
    pub tol_empty: f64,
    pub max_planks: usize,
    pub record_volumes: bool,
    /// Record volumes every this many steps; `None` means `max(1, k/100)`.
    pub volume_stride: Option<usize>,
    pub volume_samples: u64,
    /// Every recorded step reuses this seed, so successive estimates share
    /// their sample points.
    pub volume_seed: u64,
    /// Angle-graph threshold; `None` means `ε^α` from [`default_threshold`].
    pub threshold: Option<f64>,
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self {
            mode: Mode::Chunked,
            tol_support: DEFAULT_TOL,
            tol_empty: DEFAULT_TOL,
            max_planks: usize::MAX,
            record_volumes: false,
            volume_stride: None,
            volume_samples: 20_000,
            volume_seed: 0,
            threshold: None,
        }
    }
}

impl EngineConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(CoverError::InvalidParameter(m.into()));
        if [self.tol_support, self.tol_empty]
            .iter()
            .any(|t| t.is_nan() || *t <= 0.0)
        {
            return bad("tolerances must be positive");
        }
        if self.max_planks == 0 {
            return bad("max_planks must be at least 1");
        }
        if self.record_volumes && self.volume_samples == 0 {
            return bad("volume_samples must be at least 1");
        }
        if self.volume_stride == Some(0) {
            return bad("volume_stride must be at least 1");
        }
        if let Some(t) = self.threshold {
            if !(t > 0.0 && t < std::f64::consts::PI) {
                return bad("threshold must lie in (0, π)");
            }
        }
        Ok(())
    }
}

/// Places `plank` tangent to `region` from above.
///
/// Returns the placement and the successor region (unpruned).
pub fn place_next(
    region: &ConvexRegion,
    plank: &Plank,
    tol: f64,
) -> Result<(PlacedPlank, ConvexRegion)> {
    let h = support_value(region, &plank.normal, tol)?.value;
    let placed = PlacedPlank {
        normal: plank.normal,
        lower_offset: h - plank.width,
        upper_offset: h,
    };
    let next = region.with(placed.below());
    Ok((placed, next))
}

/// Processing order for `instance` under `config`.
pub fn processing_order(instance: &Instance, config: &EngineConfig) -> Vec<usize> {
    match config.mode {
        Mode::FixedOrder => (0..instance.len()).collect(),
        Mode::Chunked => {
            let theta = config
                .threshold
                .unwrap_or_else(|| default_threshold(instance.len(), instance.epsilon));
            let normals = instance.normals();
            let graph = if normals.len() >= BUCKETED_GRAPH_MIN {
                build_angle_graph_bucketed(&normals, theta)
            } else {
                build_angle_graph(&normals, theta)
            };
            extract_order(&graph).ordering
        }
    }
}

fn record_volumes(region: &ConvexRegion, config: &EngineConfig) -> Result<StepVolumes> {
    let (n, seed) = (config.volume_samples, config.volume_seed);
    let vol = mc_volume(region, n, seed)?;
    let parallel = match mc_parallel_volume(region, n, seed, config.tol_support) {
        Ok(v) => v,
        // No points left, so B(K) is empty too.
        Err(CoverError::EmptyRegion) => VolumeEstimate::zero(n, seed),
        Err(e) => return Err(e),
    };
    Ok(StepVolumes {
        region: vol,
        parallel,
    })
}

/// Places planks in processing order until the uncovered region is empty,
/// the planks run out, or `max_planks` is reached.
///
/// A numerical failure ends the run early; the partial certificate is
/// returned with `covered = false` and the error text attached.
pub fn run_cover(instance: &Instance, config: &EngineConfig) -> Result<CoverCertificate> {
    config.validate()?;
    let k = instance.len();
    let ordering = processing_order(instance, config);
    let stride = config.volume_stride.unwrap_or((k / 100).max(1));
    let budget = config.max_planks.min(k);

    let mut cert = CoverCertificate {
        ordering,
        placements: Vec::new(),
        steps: Vec::new(),
        covered: false,
        planks_used: 0,
        tol_support: config.tol_support,
        error: None,
    };
    let mut region = ConvexRegion::ball();
    for step in 0..budget {
        let plank = &instance.planks[cert.ordering[step]];
        let outcome = place_next(&region, plank, config.tol_support).and_then(|(placed, next)| {
            let next = next.pruned();
            let empty = is_empty(&next, config.tol_empty)?;
            Ok((placed, next, empty))
        });
        let (placed, next, empty) = match outcome {
            Ok(v) => v,
            Err(e) => {
                cert.error = Some(e.to_string());
                return Ok(cert);
            }
        };
        let last = empty || step + 1 == budget;
        let volumes = if config.record_volumes && ((step + 1) % stride == 0 || last) {
            match record_volumes(&next, config) {
                Ok(v) => Some(v),
                Err(e) => {
                    cert.error = Some(e.to_string());
                    return Ok(cert);
                }
            }
        } else {
            None
        };
        cert.placements.push(placed);
        cert.steps.push(StepRecord {
            support: placed.upper_offset,
            constraints: next.len(),
            volumes,
        });
        cert.planks_used += 1;
        region = next;
        if empty {
            cert.covered = true;
            break;
        }
    }
    Ok(cert)
}

/// Outcome of the structural certificate check; `reasons` is empty iff valid.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct StaticReport {
    pub reasons: Vec<String>,
}

impl StaticReport {
    pub fn is_valid(&self) -> bool {
        self.reasons.is_empty()
    }
}

/// Tolerance on `upper_offset − lower_offset` against the plank width.
pub const WIDTH_TOL: f64 = 1e-12;

/// Checks the permutation, per-placement normal and width preservation, and
/// tangency: each upper offset must match the support value of the region
/// rebuilt from the earlier placements within `2 · tol_support`.
pub fn verify_certificate_static(instance: &Instance, cert: &CoverCertificate) -> StaticReport {
    let k = instance.len();
    let mut reasons = Vec::new();

    let mut seen = vec![false; k];
    let mut perm_ok = cert.ordering.len() == k;
    for &i in &cert.ordering {
        if i >= k || seen[i] {
            perm_ok = false;
            break;
        }
        seen[i] = true;
    }
    if !perm_ok {
        reasons.push("ordering is not a permutation of the instance's planks".to_string());
        return StaticReport { reasons };
    }
    if cert.placements.len() > k {
        reasons.push("more placements than planks".to_string());
        return StaticReport { reasons };
    }
    if cert.planks_used != cert.placements.len() {
        reasons.push(format!(
            "planks_used {} differs from placement count {}",
            cert.planks_used,
            cert.placements.len()
        ));
    }
    let tol = 2.0 * cert.tol_support;
    let mut region = ConvexRegion::ball();
    for (i, placed) in cert.placements.iter().enumerate() {
        let plank = &instance.planks[cert.ordering[i]];
        if placed.normal != plank.normal {
            reasons.push(format!("placement {i}: normal mismatch"));
        }
        if (placed.width() - plank.width).abs() > WIDTH_TOL {
            reasons.push(format!(
                "placement {i}: width mismatch ({} vs {})",
                placed.width(),
                plank.width
            ));
        }
        match support_value(&region, &placed.normal, cert.tol_support) {
            Ok(s) if (s.value - placed.upper_offset).abs() <= tol => {}
            Ok(s) => reasons.push(format!(
                "placement {i}: not tangent (upper offset {} vs support {})",
                placed.upper_offset, s.value
            )),
            Err(e) => reasons.push(format!("placement {i}: predecessor region unusable ({e})")),
        }
        region = region.with(placed.below()).pruned();
    }
    StaticReport { reasons }
}
