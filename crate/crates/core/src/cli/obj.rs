//! Wavefront OBJ export of placed plank boundary planes.
//!
//! Each boundary plane becomes the square inscribed in its section with the
//! radius-2 ball, centered at the plane's point nearest the origin. Lower
//! plane first, then upper; vertices go `+u+v, −u+v, −u−v, +u−v` with `u`
//! a fixed unit vector orthogonal to the normal and `v = n × u`.

use std::fmt::Write as _;

use crate::convex::any_orthogonal;
use crate::types::{CoverCertificate, Instance, PlacedPlank, Vec3};

use super::CliError;

pub const CLIP_RADIUS: f64 = 2.0;

pub fn quad_corners(placed: &PlacedPlank, offset: f64) -> [Vec3; 4] {
    let n = placed.normal.as_vec();
    let u = any_orthogonal(&n);
    let v = n.cross(&u);
    let half = (CLIP_RADIUS * CLIP_RADIUS - offset * offset)
        .max(0.0)
        .sqrt()
        / std::f64::consts::SQRT_2;
    let c = n * offset;
    [
        c + (u + v) * half,
        c + (v - u) * half,
        c - (u + v) * half,
        c + (u - v) * half,
    ]
}

fn check_pair(instance: &Instance, cert: &CoverCertificate) -> Result<(), CliError> {
    let k = instance.len();
    let mut seen = vec![false; k];
    let perm = cert.ordering.len() == k
        && cert
            .ordering
            .iter()
            .all(|&i| i < k && !std::mem::replace(&mut seen[i], true));
    if !perm || cert.placements.len() > k {
        return Err(CliError::Usage(
            "certificate does not match instance".into(),
        ));
    }
    for (i, p) in cert.placements.iter().enumerate() {
        if p.normal != instance.planks[cert.ordering[i]].normal {
            return Err(CliError::Usage(format!(
                "placement {i} does not match its plank"
            )));
        }
    }
    Ok(())
}

pub fn export_obj(instance: &Instance, cert: &CoverCertificate) -> Result<String, CliError> {
    check_pair(instance, cert)?;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "# plankcover slab boundaries, clipped to radius {CLIP_RADIUS}"
    );
    let _ = writeln!(out, "# placements {}", cert.placements.len());
    let mut next_vertex = 1;
    for (i, p) in cert.placements.iter().enumerate() {
        for (side, offset) in [("lower", p.lower_offset), ("upper", p.upper_offset)] {
            let _ = writeln!(out, "g plank{i}_{side}");
            for c in quad_corners(p, offset) {
                let _ = writeln!(out, "v {:.17e} {:.17e} {:.17e}", c.x, c.y, c.z);
            }
            let _ = writeln!(
                out,
                "f {} {} {} {}",
                next_vertex,
                next_vertex + 1,
                next_vertex + 2,
                next_vertex + 3
            );
            next_vertex += 4;
        }
    }
    Ok(out)
}
