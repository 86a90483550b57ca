//! Instance generators.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{CoverError, Result};
use crate::measure::sample_ball;
use crate::types::{angular_distance, Instance, InstanceMetadata, Plank, UnitVector};

/// Consecutive rejections that end spherical-code generation.
pub const DEFAULT_REJECTION_BUDGET: usize = 10_000;

fn check_k_eps(k: usize, epsilon: f64) -> Result<()> {
    if k == 0 {
        return Err(CoverError::InvalidParameter("k must be at least 1".into()));
    }
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(CoverError::InvalidParameter(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    Ok(())
}

/// `k` planks of width `epsilon` with normals uniform on the sphere.
pub fn gen_random(k: usize, epsilon: f64, seed: u64) -> Result<Instance> {
    check_k_eps(k, epsilon)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let planks = (0..k)
        .map(|_| {
            // Any nonzero point of the ball gives a uniform direction.
            let n = UnitVector::from_vec(&sample_ball(&mut rng, 1.0))?;
            Plank::new(n, epsilon)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut params = BTreeMap::new();
    params.insert("k".into(), json!(k));
    params.insert("epsilon".into(), json!(epsilon));
    Instance::new(
        planks,
        InstanceMetadata {
            generator: "random".into(),
            seed: Some(seed),
            params,
        },
    )
}

/// `k` identical planks.
pub fn gen_parallel(k: usize, epsilon: f64, normal: UnitVector) -> Result<Instance> {
    check_k_eps(k, epsilon)?;
    let plank = Plank::new(normal, epsilon)?;
    let mut params = BTreeMap::new();
    params.insert("k".into(), json!(k));
    params.insert("epsilon".into(), json!(epsilon));
    params.insert("normal".into(), json!(normal.to_array()));
    Instance::new(
        vec![plank; k],
        InstanceMetadata {
            generator: "parallel".into(),
            seed: None,
            params,
        },
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdversarialParams {
    pub epsilon: f64,
    /// Angular radius of the polar cap around +z, in radians.
    pub cap_angle: f64,
    /// Minimum pairwise angle is `separation_factor · ε^{2/3}`.
    pub separation_factor: f64,
    pub seed: u64,
    #[serde(default = "default_budget")]
    pub rejection_budget: usize,
}

fn default_budget() -> usize {
    DEFAULT_REJECTION_BUDGET
}

impl AdversarialParams {
    pub fn new(epsilon: f64, cap_angle: f64, separation_factor: f64, seed: u64) -> Self {
        Self {
            epsilon,
            cap_angle,
            separation_factor,
            seed,
            rejection_budget: DEFAULT_REJECTION_BUDGET,
        }
    }

    pub fn separation(&self) -> f64 {
        self.separation_factor * self.epsilon.powf(2.0 / 3.0)
    }

    /// No two points of the cap are `separation()` apart.
    pub fn is_saturated(&self) -> bool {
        self.separation() >= 2.0 * self.cap_angle
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(CoverError::InvalidParameter(m));
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return bad(format!("epsilon must be positive, got {}", self.epsilon));
        }
        if !(self.cap_angle > 0.0 && self.cap_angle < PI / 2.0) {
            return bad(format!(
                "cap angle must lie in (0, π/2), got {}",
                self.cap_angle
            ));
        }
        if !(self.separation_factor.is_finite() && self.separation_factor > 0.0) {
            return bad(format!(
                "separation factor must be positive, got {}",
                self.separation_factor
            ));
        }
        if self.rejection_budget == 0 {
            return bad("rejection budget must be at least 1".into());
        }
        Ok(())
    }
}

/// Uniform point of the spherical cap of angular radius `cap` around +z.
fn sample_cap<R: Rng + ?Sized>(rng: &mut R, cap: f64) -> Result<UnitVector> {
    let zmin = cap.cos();
    let z = 1.0 - rng.random::<f64>() * (1.0 - zmin);
    let phi = 2.0 * PI * rng.random::<f64>();
    let s = (1.0 - z * z).max(0.0).sqrt();
    UnitVector::new(s * phi.cos(), s * phi.sin(), z)
}

/// Greedy maximal spherical code in the polar cap, one plank per code point,
/// in generation order.
///
/// Candidates are drawn uniformly from the cap and kept when at least
/// `separation()` away from every kept point; generation ends after
/// `rejection_budget` consecutive rejections. When the separation is at
/// least the cap diameter only one point fits; the instance then carries
/// `"saturated": true` in its parameters.
pub fn gen_adversarial(params: &AdversarialParams) -> Result<Instance> {
    params.validate()?;
    let sep = params.separation();
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut points = vec![sample_cap(&mut rng, params.cap_angle)?];
    if !params.is_saturated() {
        let mut misses = 0;
        while misses < params.rejection_budget {
            let c = sample_cap(&mut rng, params.cap_angle)?;
            if points.iter().all(|q| angular_distance(q, &c) >= sep) {
                points.push(c);
                misses = 0;
            } else {
                misses += 1;
            }
        }
    }
    let planks = points
        .into_iter()
        .map(|n| Plank::new(n, params.epsilon))
        .collect::<Result<Vec<_>>>()?;
    let mut p = BTreeMap::new();
    p.insert("epsilon".into(), json!(params.epsilon));
    p.insert("cap_angle".into(), json!(params.cap_angle));
    p.insert("separation_factor".into(), json!(params.separation_factor));
    p.insert("rejection_budget".into(), json!(params.rejection_budget));
    p.insert("saturated".into(), json!(params.is_saturated()));
    Instance::new(
        planks,
        InstanceMetadata {
            generator: "adversarial".into(),
            seed: Some(params.seed),
            params: p,
        },
    )
}
