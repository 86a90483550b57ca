//! Monte Carlo volume and coverage estimation.
//!
//! Uniform points in a ball of radius `R` are drawn as `R · U^{1/3} · g/|g|`
//! with `g` a standard Gaussian triple and `U` uniform on `[0, 1)`.
//!
//! Sample budgets are cut into fixed blocks of [`BLOCK`] points. Block `b`
//! draws from ChaCha8 seeded with the caller's seed on stream `b`, so an
//! estimate depends only on `(samples, seed)` and not on how rayon spreads
//! blocks across threads.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::convex::{distance_to_region, support_value, DEFAULT_TOL};
use crate::error::{CoverError, Result};
use crate::types::{ConvexRegion, CoverCertificate, Halfspace, Instance, PlacedPlank, Plank, Vec3};

pub const BLOCK: usize = 4096;

pub const UNIT_BALL_VOLUME: f64 = 4.0 * PI / 3.0;

/// Volume of the radius-2 ball, which contains B(K) for every K ⊆ B³.
pub const DOUBLE_BALL_VOLUME: f64 = 32.0 * PI / 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VolumeEstimate {
    pub mean: f64,
    /// `V_ref · sqrt(p (1 − p) / samples)` for acceptance fraction `p`.
    pub std_error: f64,
    pub samples: u64,
    pub seed: u64,
}

impl VolumeEstimate {
    fn from_hits(hits: u64, samples: u64, reference: f64, seed: u64) -> Self {
        let p = hits as f64 / samples as f64;
        Self {
            mean: reference * p,
            std_error: reference * (p * (1.0 - p) / samples as f64).sqrt(),
            samples,
            seed,
        }
    }

    /// An exact zero (used for regions with no points at all).
    pub fn zero(samples: u64, seed: u64) -> Self {
        Self {
            mean: 0.0,
            std_error: 0.0,
            samples,
            seed,
        }
    }
}

/// A uniform point in the ball of the given radius.
pub fn sample_ball<R: Rng + ?Sized>(rng: &mut R, radius: f64) -> Vec3 {
    loop {
        let g = Vec3::new(
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        );
        let n = g.norm();
        if n > 0.0 {
            let u: f64 = rng.random();
            return g * (radius * u.cbrt() / n);
        }
    }
}

fn block_rng(seed: u64, block: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block as u64);
    rng
}

/// Counts points among `samples` uniform points in the radius-`radius` ball
/// for which `accept` holds.
fn count_hits<F>(samples: u64, seed: u64, radius: f64, accept: F) -> Result<u64>
where
    F: Fn(&Vec3) -> Result<bool> + Sync,
{
    let blocks = (samples as usize).div_ceil(BLOCK);
    (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = block_rng(seed, b);
            let n = BLOCK.min(samples as usize - b * BLOCK);
            let mut hits = 0u64;
            for _ in 0..n {
                let p = sample_ball(&mut rng, radius);
                if accept(&p)? {
                    hits += 1;
                }
            }
            Ok(hits)
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))
}

fn check_samples(samples: u64) -> Result<()> {
    if samples == 0 {
        return Err(CoverError::InvalidParameter(
            "samples must be at least 1".into(),
        ));
    }
    Ok(())
}

/// Unbiased estimate of Vol K from uniform samples in the unit ball.
pub fn mc_volume(region: &ConvexRegion, samples: u64, seed: u64) -> Result<VolumeEstimate> {
    check_samples(samples)?;
    let hits = count_hits(samples, seed, 1.0, |p| Ok(region.contains(p, 0.0)))?;
    Ok(VolumeEstimate::from_hits(
        hits,
        samples,
        UNIT_BALL_VOLUME,
        seed,
    ))
}

/// Unbiased estimate of Vol B(K), `B(K) = { v : dist(v, K) ≤ 1 }`, from
/// uniform samples in the radius-2 ball.
///
/// Cheap bounds settle most samples: points of K are inside, and points
/// farther than 1 from the ball or from some constraint plane are outside.
pub fn mc_parallel_volume(
    region: &ConvexRegion,
    samples: u64,
    seed: u64,
    tol: f64,
) -> Result<VolumeEstimate> {
    check_samples(samples)?;
    let hits = count_hits(samples, seed, 2.0, |p| {
        let lower = region
            .constraints
            .iter()
            .map(|h| h.violation(p))
            .fold(p.norm() - 1.0, f64::max);
        if lower > 1.0 + tol {
            return Ok(false);
        }
        if lower <= 0.0 {
            return Ok(true);
        }
        Ok(distance_to_region(p, region, tol)? <= 1.0 + tol)
    })?;
    Ok(VolumeEstimate::from_hits(
        hits,
        samples,
        DOUBLE_BALL_VOLUME,
        seed,
    ))
}

/// Fraction of uniform unit-ball samples outside every placed plank.
///
/// An empty certificate leaves everything uncovered.
pub fn verify_cover(
    _instance: &Instance,
    cert: &CoverCertificate,
    samples: u64,
    seed: u64,
) -> Result<f64> {
    check_samples(samples)?;
    let placed = &cert.placements;
    let misses = count_hits(samples, seed, 1.0, |p| {
        Ok(!placed.iter().any(|pp| pp.contains(p)))
    })?;
    Ok(misses as f64 / samples as f64)
}

/// The translate P″ of `plank` tangent from above to B(K), and the halfspace
/// Π above its lower boundary plane.
///
/// The support of B(K) in any direction exceeds that of K by exactly 1.
/// Π is returned as `{ x · (−n) ≤ −lower }`.
pub fn shadow_plank(region: &ConvexRegion, plank: &Plank) -> Result<(PlacedPlank, Halfspace)> {
    let h = support_value(region, &plank.normal, DEFAULT_TOL)?.value;
    let upper = h + 1.0;
    let lower = upper - plank.width;
    let placed = PlacedPlank {
        normal: plank.normal,
        lower_offset: lower,
        upper_offset: upper,
    };
    Ok((placed, Halfspace::new(plank.normal.negated(), -lower)))
}
