//! Shared geometric vocabulary.

use std::collections::BTreeMap;
use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{CoverError, Result};
use crate::measure::VolumeEstimate;

pub type Vec3 = nalgebra::Vector3<f64>;

/// Tolerance on the norm of a vector accepted as already unit length.
pub const UNIT_TOL: f64 = 1e-12;

/// A direction in R³, normalized at construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct UnitVector {
    x: f64,
    y: f64,
    z: f64,
}

impl UnitVector {
    pub const Z: UnitVector = UnitVector {
        x: 0.0,
        y: 0.0,
        z: 1.0,
    };

    /// Normalizes `(x, y, z)`. Zero and non-finite inputs are rejected.
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        Self::from_vec(&Vec3::new(x, y, z))
    }

    pub fn from_vec(v: &Vec3) -> Result<Self> {
        let norm = v.norm();
        if !norm.is_finite() || norm == 0.0 {
            return Err(CoverError::ZeroVector);
        }
        let u = v / norm;
        Ok(Self {
            x: u.x,
            y: u.y,
            z: u.z,
        })
    }

    /// Accepts components that are already unit length (within [`UNIT_TOL`])
    /// bit-for-bit and normalizes anything else.
    pub fn from_components(c: [f64; 3]) -> Result<Self> {
        let v = Vec3::new(c[0], c[1], c[2]);
        let norm = v.norm();
        if norm.is_finite() && (norm - 1.0).abs() <= UNIT_TOL {
            Ok(Self {
                x: c[0],
                y: c[1],
                z: c[2],
            })
        } else {
            Self::from_vec(&v)
        }
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn as_vec(&self) -> Vec3 {
        Vec3::new(self.x, self.y, self.z)
    }

    pub fn to_array(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn dot(&self, p: &Vec3) -> f64 {
        self.x * p.x + self.y * p.y + self.z * p.z
    }

    pub fn negated(&self) -> Self {
        Self {
            x: -self.x,
            y: -self.y,
            z: -self.z,
        }
    }

    fn bits(&self) -> [u64; 3] {
        [self.x.to_bits(), self.y.to_bits(), self.z.to_bits()]
    }
}

impl TryFrom<[f64; 3]> for UnitVector {
    type Error = CoverError;

    fn try_from(c: [f64; 3]) -> Result<Self> {
        Self::from_components(c)
    }
}

impl From<UnitVector> for [f64; 3] {
    fn from(u: UnitVector) -> Self {
        u.to_array()
    }
}

/// Angle between two directions, in `[0, π]`.
///
/// Evaluated as `atan2(|a × b|, a · b)`, which equals the arccosine of the
/// clamped dot product but keeps full precision for nearly (anti)parallel
/// inputs.
pub fn angular_distance(a: &UnitVector, b: &UnitVector) -> f64 {
    let (u, v) = (a.as_vec(), b.as_vec());
    u.cross(&v).norm().atan2(u.dot(&v))
}

/// A slab of fixed width with a fixed normal; only its position is free.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPlank")]
pub struct Plank {
    pub normal: UnitVector,
    pub width: f64,
}

#[derive(Deserialize)]
struct RawPlank {
    normal: UnitVector,
    width: f64,
}

impl TryFrom<RawPlank> for Plank {
    type Error = CoverError;

    fn try_from(raw: RawPlank) -> Result<Self> {
        Plank::new(raw.normal, raw.width)
    }
}

impl Plank {
    pub fn new(normal: UnitVector, width: f64) -> Result<Self> {
        if !(width.is_finite() && width > 0.0) {
            return Err(CoverError::InvalidWidth(width));
        }
        Ok(Self { normal, width })
    }

    /// A plank wider than the ball's diameter cannot be used without waste.
    pub fn is_oversized(&self) -> bool {
        self.width > 2.0
    }
}

/// The closed halfspace `{ x : x · normal ≤ offset }`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Halfspace {
    pub normal: UnitVector,
    pub offset: f64,
}

impl Halfspace {
    pub fn new(normal: UnitVector, offset: f64) -> Self {
        Self { normal, offset }
    }

    pub fn violation(&self, p: &Vec3) -> f64 {
        self.normal.dot(p) - self.offset
    }

    pub fn contains(&self, p: &Vec3, tol: f64) -> bool {
        self.violation(p) <= tol
    }
}

/// A plank fixed in space: `{ x : lower_offset ≤ x · normal ≤ upper_offset }`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlacedPlank {
    pub normal: UnitVector,
    pub lower_offset: f64,
    pub upper_offset: f64,
}

impl PlacedPlank {
    pub fn width(&self) -> f64 {
        self.upper_offset - self.lower_offset
    }

    pub fn contains(&self, p: &Vec3) -> bool {
        let s = self.normal.dot(p);
        self.lower_offset <= s && s <= self.upper_offset
    }

    /// The halfspace left uncovered below the lower boundary plane.
    pub fn below(&self) -> Halfspace {
        Halfspace::new(self.normal, self.lower_offset)
    }
}

/// Unit ball at the origin intersected with a list of halfspaces.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ConvexRegion {
    pub constraints: Vec<Halfspace>,
}

#[allow(clippy::len_without_is_empty)]
impl ConvexRegion {
    pub fn ball() -> Self {
        Self::default()
    }

    pub fn new(constraints: Vec<Halfspace>) -> Self {
        Self { constraints }
    }

    pub fn with(&self, h: Halfspace) -> Self {
        let mut constraints = self.constraints.clone();
        constraints.push(h);
        Self { constraints }
    }

    pub fn len(&self) -> usize {
        self.constraints.len()
    }

    pub fn is_empty_list(&self) -> bool {
        self.constraints.is_empty()
    }

    pub fn contains(&self, p: &Vec3, tol: f64) -> bool {
        region_contains(self, p, tol)
    }

    /// Drops constraints that cannot cut the ball (offset ≥ 1) and, among
    /// constraints sharing a bit-identical normal, keeps only the smallest
    /// offset. The set described is unchanged; first-occurrence order is kept.
    pub fn pruned(&self) -> Self {
        let mut slot: HashMap<[u64; 3], usize> = HashMap::new();
        let mut out: Vec<Halfspace> = Vec::with_capacity(self.constraints.len());
        for h in &self.constraints {
            if h.offset >= 1.0 {
                continue;
            }
            match slot.get(&h.normal.bits()) {
                Some(&i) => {
                    if h.offset < out[i].offset {
                        out[i].offset = h.offset;
                    }
                }
                None => {
                    slot.insert(h.normal.bits(), out.len());
                    out.push(*h);
                }
            }
        }
        Self { constraints: out }
    }
}

/// Membership in the ball and every constraint, each relaxed by `tol`.
pub fn region_contains(region: &ConvexRegion, p: &Vec3, tol: f64) -> bool {
    p.norm() <= 1.0 + tol && region.constraints.iter().all(|h| h.contains(p, tol))
}

/// Generator provenance carried with an instance.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct InstanceMetadata {
    pub generator: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default)]
    pub params: BTreeMap<String, serde_json::Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawInstance")]
pub struct Instance {
    /// Common width, or the minimum width when widths differ.
    pub epsilon: f64,
    pub metadata: InstanceMetadata,
    pub planks: Vec<Plank>,
}

#[derive(Deserialize)]
struct RawInstance {
    epsilon: f64,
    #[serde(default)]
    metadata: InstanceMetadata,
    planks: Vec<Plank>,
}

impl TryFrom<RawInstance> for Instance {
    type Error = CoverError;

    fn try_from(raw: RawInstance) -> Result<Self> {
        let inst = Instance::new(raw.planks, raw.metadata)?;
        if inst.epsilon != raw.epsilon {
            return Err(CoverError::InvalidParameter(format!(
                "epsilon {} does not match minimum plank width {}",
                raw.epsilon, inst.epsilon
            )));
        }
        Ok(inst)
    }
}

impl Instance {
    pub fn new(planks: Vec<Plank>, metadata: InstanceMetadata) -> Result<Self> {
        if planks.is_empty() {
            return Err(CoverError::InvalidParameter(
                "instance has no planks".into(),
            ));
        }
        let epsilon = planks.iter().map(|p| p.width).fold(f64::INFINITY, f64::min);
        Ok(Self {
            epsilon,
            metadata,
            planks,
        })
    }

    pub fn len(&self) -> usize {
        self.planks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.planks.is_empty()
    }

    pub fn is_uniform(&self) -> bool {
        self.planks.iter().all(|p| p.width == self.epsilon)
    }

    pub fn normals(&self) -> Vec<UnitVector> {
        self.planks.iter().map(|p| p.normal).collect()
    }
}

/// Volume estimates attached to a recorded step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepVolumes {
    /// Vol K_i.
    pub region: VolumeEstimate,
    /// Vol B(K_i), the outer parallel body at distance 1.
    pub parallel: VolumeEstimate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    /// Support value of the predecessor region in the plank normal.
    pub support: f64,
    /// Constraint count of the successor region after pruning.
    pub constraints: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub volumes: Option<StepVolumes>,
}

/// An ordering of all planks plus the placements actually made.
///
/// `ordering` is a permutation of `0..k`; `placements[i]` is the translate of
/// plank `ordering[i]`. Only the first `planks_used` entries of the ordering
/// were placed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverCertificate {
    pub ordering: Vec<usize>,
    pub placements: Vec<PlacedPlank>,
    pub steps: Vec<StepRecord>,
    pub covered: bool,
    pub planks_used: usize,
    pub tol_support: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl CoverCertificate {
    /// The uncovered region after the first `steps` placements.
    pub fn region_after(&self, steps: usize) -> ConvexRegion {
        ConvexRegion::new(
            self.placements[..steps]
                .iter()
                .map(PlacedPlank::below)
                .collect(),
        )
    }

    pub fn final_region(&self) -> ConvexRegion {
        self.region_after(self.placements.len())
    }
}
