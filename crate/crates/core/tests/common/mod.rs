//! Test-only helpers: random regions, samplers and brute-force oracles that
//! share no code with the solver paths they check.

#![allow(dead_code)]

use plankcover::convex::is_empty;
use plankcover::{ConvexRegion, Halfspace, UnitVector, Vec3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform direction by rejection from the cube.
pub fn random_direction<R: Rng>(rng: &mut R) -> UnitVector {
    loop {
        let v = Vec3::new(
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        );
        let n = v.norm();
        if n > 1e-3 && n <= 1.0 {
            return UnitVector::from_vec(&v).unwrap();
        }
    }
}

/// Uniform point of the unit ball by rejection from the cube.
pub fn cube_ball_point<R: Rng>(rng: &mut R) -> Vec3 {
    loop {
        let v = Vec3::new(
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        );
        if v.norm_squared() <= 1.0 {
            return v;
        }
    }
}

/// Ball ∩ 1..=max_constraints random halfspaces with offsets in
/// `[lo, 0.95]`, redrawn until the region has interior.
pub fn random_region<R: Rng>(rng: &mut R, max_constraints: usize, lo: f64) -> ConvexRegion {
    loop {
        let m = rng.random_range(1..=max_constraints);
        let constraints = (0..m)
            .map(|_| Halfspace::new(random_direction(rng), rng.random_range(lo..0.95)))
            .collect();
        let region = ConvexRegion::new(constraints);
        if !is_empty(&region, 1e-3).unwrap() {
            return region;
        }
    }
}

/// Up to `n` uniform points of the region, drawn by rejection from
/// `proposals` uniform points of the ball.
pub fn rejection_points<R: Rng>(rng: &mut R, region: &ConvexRegion, proposals: usize) -> Vec<Vec3> {
    (0..proposals)
        .map(|_| cube_ball_point(rng))
        .filter(|p| region.contains(p, 0.0))
        .collect()
}

/// Nearest-point oracle: minimum distance over `proposals` rejection samples
/// of the region, then a feasible pattern search from the best sample.
pub fn oracle_distance<R: Rng>(
    rng: &mut R,
    p: &Vec3,
    region: &ConvexRegion,
    proposals: usize,
) -> f64 {
    let mut best: Option<Vec3> = None;
    let mut best_d = f64::INFINITY;
    for _ in 0..proposals {
        let q = cube_ball_point(rng);
        if region.contains(&q, 0.0) {
            let d = (q - p).norm();
            if d < best_d {
                best_d = d;
                best = Some(q);
            }
        }
    }
    let mut x = best.expect("region too small for the oracle");
    let mut step = 0.05;
    let mut dirs: Vec<Vec3> = Vec::new();
    for dx in -1..=1 {
        for dy in -1..=1 {
            for dz in -1..=1 {
                if (dx, dy, dz) != (0, 0, 0) {
                    dirs.push(Vec3::new(dx as f64, dy as f64, dz as f64).normalize());
                }
            }
        }
    }
    while step > 1e-10 {
        let mut improved = false;
        let extra: Vec<Vec3> = (0..96).map(|_| random_direction(rng).as_vec()).collect();
        for d in dirs.iter().chain(extra.iter()) {
            let y = x + d * step;
            if region.contains(&y, 0.0) {
                let dy = (y - p).norm();
                if dy < best_d {
                    best_d = dy;
                    x = y;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    best_d
}

/// Support oracle: best feasible value among points sampled on the sphere
/// and on each constraint plane's disk inside the ball.
pub fn oracle_support<R: Rng>(
    rng: &mut R,
    region: &ConvexRegion,
    c: &Vec3,
    candidates: usize,
) -> f64 {
    let faces = 1 + region.constraints.len();
    let per_face = candidates / faces;
    let mut best = f64::NEG_INFINITY;
    let mut consider = |x: Vec3| {
        if region.contains(&x, 1e-12) {
            best = best.max(c.dot(&x));
        }
    };
    for _ in 0..per_face {
        consider(random_direction(rng).as_vec());
    }
    for h in &region.constraints {
        let n = h.normal.as_vec();
        let rho2 = 1.0 - h.offset * h.offset;
        if rho2 <= 0.0 {
            continue;
        }
        let u = if n.x.abs() < 0.9 {
            Vec3::x()
        } else {
            Vec3::y()
        };
        let u = n.cross(&u).normalize();
        let v = n.cross(&u);
        for _ in 0..per_face {
            let r = rho2.sqrt() * rng.random::<f64>().sqrt();
            let t = rng.random_range(0.0..std::f64::consts::TAU);
            consider(n * h.offset + u * (r * t.cos()) + v * (r * t.sin()));
        }
    }
    best
}

/// A point of the region: a uniform ball point when it lands inside,
/// otherwise its nearest point in the region (so boundary faces get probed
/// too).
pub fn region_point<R: Rng>(rng: &mut R, region: &ConvexRegion) -> Vec3 {
    let q = cube_ball_point(rng) * 1.2;
    if region.contains(&q, 0.0) {
        q
    } else {
        plankcover::convex::nearest_point(&q, region).unwrap()
    }
}

/// Midpoints of `pairs` random point pairs of the region that fall outside
/// it (membership slack 1e-9).
pub fn midpoint_violations<R: Rng>(rng: &mut R, region: &ConvexRegion, pairs: usize) -> usize {
    (0..pairs)
        .filter(|_| {
            let a = region_point(rng, region);
            let b = region_point(rng, region);
            !region.contains(&((a + b) * 0.5), 1e-9)
        })
        .count()
}

/// Midpoint-probe violations summed over the regions after each recorded
/// step of a certificate (every `stride` steps plus the last), skipping
/// regions without interior.
pub fn certificate_midpoint_violations<R: Rng>(
    rng: &mut R,
    cert: &plankcover::CoverCertificate,
    stride: usize,
    pairs: usize,
) -> usize {
    let n = cert.placements.len();
    (1..=n)
        .filter(|s| s % stride == 0 || *s == n)
        .map(|s| cert.region_after(s).pruned())
        .filter(|k| !is_empty(k, 1e-9).unwrap())
        .map(|k| midpoint_violations(rng, &k, pairs))
        .sum()
}
