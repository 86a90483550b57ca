//! Non-dissective translative coverings of the unit ball in R³ by planks.
//!
//! Planks are placed greedily: each translate is pushed down along its normal
//! until its upper boundary plane supports the still-uncovered region from
//! above. The uncovered region is always the unit ball intersected with
//! finitely many halfspaces, so it stays convex (and connected) after every
//! placement.
//!
//! Module map:
//!
//! - [`types`]: vectors, planks, halfspaces, regions, instances, certificates.
//! - [`convex`]: projection, support function, inner radius and emptiness.
//! - [`ordering`]: the angle graph and the chunked processing order.
//! - [`engine`]: tangent placement and certificate production.
//! - [`measure`]: Monte Carlo volumes, parallel-body volumes, coverage checks.
//! - [`instances`]: random, parallel and spherical-code instance generators.
//! - [`cli`]: file formats, the sweep harness and OBJ export.

pub mod cli;
pub mod convex;
pub mod engine;
mod error;
pub mod instances;
pub mod measure;
pub mod ordering;
pub mod types;

pub use error::{CoverError, Result};
pub use types::{
    angular_distance, region_contains, ConvexRegion, CoverCertificate, Halfspace, Instance,
    InstanceMetadata, PlacedPlank, Plank, StepRecord, UnitVector, Vec3,
};
