//! Convex-analysis kernel over [`ConvexRegion`]: projection, distance,
//! support function, inner radius and emptiness.
//!
//! Two independent routes exist for the nearest point and the support value:
//! an exact active-set solver (used by the engine and the estimators) and the
//! iterative routes, Dykstra's cyclic projection and projected gradient
//! ascent on top of it. The test suites check one against the other.

mod kernel;

use serde::{Deserialize, Serialize};

use crate::error::{CoverError, Result};
use crate::types::{ConvexRegion, UnitVector, Vec3};

pub(crate) use kernel::any_orthogonal;
use kernel::{solve, Domain, Objective, KERNEL_TOL};

pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_MAX_ITER: usize = 100_000;

/// Step of the projected gradient ascent.
pub const ASCENT_STEP: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub iterations: usize,
    pub residual: f64,
    pub converged: bool,
}

/// Nearest point of `region` to `p` by Dykstra's cyclic projection over the
/// ball and each halfspace.
///
/// Stops once the squared change of all correction terms over one sweep
/// drops below `tol²` and the iterate is feasible within `tol`. If
/// `max_iter` sweeps are exhausted the last iterate is returned with
/// `converged = false`.
pub fn project_region(
    p: &Vec3,
    region: &ConvexRegion,
    tol: f64,
    max_iter: usize,
) -> (Vec3, ConvergenceReport) {
    let m = region.constraints.len();
    let mut x = *p;
    // Slot 0 is the ball, slot j + 1 is constraint j.
    let mut corr = vec![Vec3::zeros(); m + 1];
    let mut residual = f64::INFINITY;
    for sweep in 1..=max_iter {
        let mut change = 0.0;
        for (slot, c) in corr.iter_mut().enumerate() {
            let y = x + *c;
            let proj = if slot == 0 {
                let n = y.norm();
                if n > 1.0 {
                    y / n
                } else {
                    y
                }
            } else {
                let h = &region.constraints[slot - 1];
                let v = h.violation(&y);
                if v > 0.0 {
                    y - h.normal.as_vec() * v
                } else {
                    y
                }
            };
            let next = y - proj;
            change += (next - *c).norm_squared();
            *c = next;
            x = proj;
        }
        let infeasibility = (x.norm() - 1.0)
            .max(
                region
                    .constraints
                    .iter()
                    .map(|h| h.violation(&x))
                    .fold(0.0, f64::max),
            )
            .max(0.0);
        residual = change.sqrt().max(infeasibility);
        if residual <= tol {
            return (
                x,
                ConvergenceReport {
                    iterations: sweep,
                    residual,
                    converged: true,
                },
            );
        }
    }
    (
        x,
        ConvergenceReport {
            iterations: max_iter,
            residual,
            converged: false,
        },
    )
}

/// Exact nearest point of `region` to `p`.
pub fn nearest_point(p: &Vec3, region: &ConvexRegion) -> Result<Vec3> {
    if region.contains(p, 0.0) {
        return Ok(*p);
    }
    solve(
        &Domain::region(&region.constraints),
        Objective::Nearest(*p),
        KERNEL_TOL,
    )
    .map(|s| s.point)
}

/// Euclidean distance from `p` to `region`; zero inside.
///
/// `tol` is the membership slack for the fast inside test. Errors with
/// [`CoverError::EmptyRegion`] when the region has no points.
pub fn distance_to_region(p: &Vec3, region: &ConvexRegion, tol: f64) -> Result<f64> {
    if region.contains(p, tol) {
        // The slack may leave p just outside; that distance is below tol.
        return Ok(0.0);
    }
    let q = nearest_point(p, region)?;
    Ok((p - q).norm())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Support {
    /// `max { x · c : x ∈ K }`.
    pub value: f64,
    pub witness: Vec3,
    pub iterations: usize,
}

/// Support function of `region` in direction `c`, solved exactly.
///
/// On a flat support face the witness is whichever optimal point the solver
/// lands on; only the value is meaningful.
pub fn support_value(region: &ConvexRegion, c: &UnitVector, _tol: f64) -> Result<Support> {
    let s = solve(
        &Domain::region(&region.constraints),
        Objective::Maximize(c.as_vec()),
        KERNEL_TOL,
    )?;
    Ok(Support {
        value: c.dot(&s.point),
        witness: s.point,
        iterations: s.iterations,
    })
}

/// Support function by projected gradient ascent: `x ← P_K(x + η c)` with
/// `η =` [`ASCENT_STEP`], Dykstra projections and averaging over the last
/// 20% of iterates.
///
/// Starts from `warm` (projected into the region) or the origin's projection.
/// Runs until two consecutive iterates differ by at most `tol`.
pub fn support_value_ascent(
    region: &ConvexRegion,
    c: &UnitVector,
    tol: f64,
    max_iter: usize,
    warm: Option<Vec3>,
) -> Result<Support> {
    let proj_tol = tol * 0.1;
    let project = |q: &Vec3| -> Result<Vec3> {
        let (x, rep) = project_region(q, region, proj_tol, max_iter);
        if !rep.converged {
            return Err(CoverError::NonConvergence {
                iterations: rep.iterations,
                residual: rep.residual,
            });
        }
        Ok(x)
    };
    let step = c.as_vec() * ASCENT_STEP;
    let mut x = project(&warm.unwrap_or_else(Vec3::zeros))?;
    let mut trail = vec![x];
    let mut converged = false;
    for _ in 0..max_iter {
        let next = project(&(x + step))?;
        let moved = (next - x).norm();
        x = next;
        trail.push(x);
        if moved <= tol {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(CoverError::NonConvergence {
            iterations: max_iter,
            residual: f64::NAN,
        });
    }
    let tail = (trail.len() / 5).max(1);
    let avg = trail[trail.len() - tail..].iter().sum::<Vec3>() / tail as f64;
    let witness = if c.dot(&avg) >= c.dot(&x) { avg } else { x };
    Ok(Support {
        value: c.dot(&witness),
        witness,
        iterations: trail.len() - 1,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InnerRadius {
    /// `max_x min(1 − |x|, min_j (b_j − x · n_j))`; negative for empty regions.
    pub radius: f64,
    pub center: Vec3,
}

/// Largest ball inside the region, by bisection on the radius with an exact
/// feasibility test for the correspondingly shrunk region.
pub fn inner_radius(region: &ConvexRegion, tol: f64) -> Result<InnerRadius> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(CoverError::InvalidParameter(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let planes = &region.constraints;
    let centered = |r: f64| {
        solve(
            &Domain::shrunk(planes, r),
            Objective::Nearest(Vec3::zeros()),
            KERNEL_TOL,
        )
    };
    // g(0) is always attained, so it brackets from below.
    let mut lo = planes.iter().map(|h| h.offset).fold(1.0, f64::min);
    let mut center = Vec3::zeros();
    if lo >= 1.0 {
        return Ok(InnerRadius {
            radius: 1.0,
            center,
        });
    }
    let mut hi = 1.0;
    let mut rounds = 0;
    while hi - lo > tol {
        rounds += 1;
        if rounds > 2_000 {
            return Err(CoverError::NonConvergence {
                iterations: rounds,
                residual: hi - lo,
            });
        }
        let mid = 0.5 * (lo + hi);
        match centered(mid) {
            Ok(s) => {
                lo = mid;
                center = s.point;
            }
            Err(CoverError::EmptyRegion) => hi = mid,
            Err(e) => return Err(e),
        }
    }
    Ok(InnerRadius { radius: lo, center })
}

/// `inner_radius(region) < tol_empty`, decided with a single feasibility test.
///
/// Measure-zero remainders (points, segments, disks) count as empty.
pub fn is_empty(region: &ConvexRegion, tol_empty: f64) -> Result<bool> {
    if tol_empty.is_nan() || tol_empty <= 0.0 {
        return Err(CoverError::InvalidParameter(format!(
            "emptiness tolerance must be positive, got {tol_empty}"
        )));
    }
    if tol_empty >= 1.0 {
        return Ok(true);
    }
    match solve(
        &Domain::shrunk(&region.constraints, tol_empty),
        Objective::Nearest(Vec3::zeros()),
        KERNEL_TOL,
    ) {
        Ok(_) => Ok(false),
        Err(CoverError::EmptyRegion) => Ok(true),
        Err(e) => Err(e),
    }
}
