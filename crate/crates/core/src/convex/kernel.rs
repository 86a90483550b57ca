//! Exact active-set solver over `radius·B³ ∩ {x · n_j ≤ b_j − shrink}`.
//!
//! Both objectives handled here (maximize a linear function, find the nearest
//! point) are convex programs whose optimum is pinned down by at most three
//! tight constraints. The solver keeps a working set, solves the working-set
//! problem exactly by enumerating the faces that contain the most recently
//! added constraint, and adds the most violated constraint until none is
//! violated. When the working-set optimum violates a constraint `h`, some
//! optimum of the enlarged problem lies on the boundary of `h`, so only faces
//! containing `h` need to be enumerated.

use crate::error::{CoverError, Result};
use crate::types::{Halfspace, Vec3};

/// Feasibility slack used by the solver.
pub(crate) const KERNEL_TOL: f64 = 1e-12;

const PARALLEL_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy)]
pub(crate) enum Objective {
    /// Maximize `x · c`.
    Maximize(Vec3),
    /// Minimize `|x − p|`.
    Nearest(Vec3),
}

impl Objective {
    fn score(&self, x: &Vec3) -> f64 {
        match self {
            Objective::Maximize(c) => c.dot(x),
            Objective::Nearest(p) => -(x - p).norm_squared(),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Domain<'a> {
    pub radius: f64,
    pub planes: &'a [Halfspace],
    pub shrink: f64,
}

impl<'a> Domain<'a> {
    pub fn region(planes: &'a [Halfspace]) -> Self {
        Self {
            radius: 1.0,
            planes,
            shrink: 0.0,
        }
    }

    /// Centers of balls of radius `r` inside the region.
    pub fn shrunk(planes: &'a [Halfspace], r: f64) -> Self {
        Self {
            radius: 1.0 - r,
            planes,
            shrink: r,
        }
    }

    fn normal(&self, j: usize) -> Vec3 {
        self.planes[j].normal.as_vec()
    }

    fn offset(&self, j: usize) -> f64 {
        self.planes[j].offset - self.shrink
    }

    fn violation(&self, j: usize, x: &Vec3) -> f64 {
        self.planes[j].normal.dot(x) - self.offset(j)
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Solution {
    pub point: Vec3,
    pub iterations: usize,
}

pub(crate) fn solve(domain: &Domain<'_>, objective: Objective, tol: f64) -> Result<Solution> {
    let r = domain.radius;
    if r < -tol {
        return Err(CoverError::EmptyRegion);
    }
    let r = r.max(0.0);
    let mut x = match objective {
        Objective::Maximize(c) => c * (r / c.norm()),
        Objective::Nearest(p) => {
            let n = p.norm();
            if n <= r {
                p
            } else {
                p * (r / n)
            }
        }
    };
    let mut work: Vec<usize> = Vec::new();
    let max_iter = domain.planes.len() + 1;
    for iter in 0..=max_iter {
        let mut worst = None;
        let mut worst_v = tol;
        for j in 0..domain.planes.len() {
            let v = domain.violation(j, &x);
            if v > worst_v {
                worst_v = v;
                worst = Some(j);
            }
        }
        let Some(h) = worst else {
            return Ok(Solution {
                point: x,
                iterations: iter,
            });
        };
        if work.contains(&h) {
            return Err(CoverError::NonConvergence {
                iterations: iter,
                residual: worst_v,
            });
        }
        x = best_on_face(domain, r, objective, h, &work, tol).ok_or(CoverError::EmptyRegion)?;
        work.push(h);
    }
    Err(CoverError::NonConvergence {
        iterations: max_iter,
        residual: f64::NAN,
    })
}

/// Best feasible candidate among faces of `work ∪ {h}` that contain `h`.
fn best_on_face(
    domain: &Domain<'_>,
    r: f64,
    objective: Objective,
    h: usize,
    work: &[usize],
    tol: f64,
) -> Option<Vec3> {
    let feasible = |x: &Vec3| {
        x.norm() <= r + tol
            && domain.violation(h, x) <= tol
            && work.iter().all(|&j| domain.violation(j, x) <= tol)
    };
    let mut best: Option<(f64, Vec3)> = None;
    let mut offer = |x: Vec3| {
        if feasible(&x) {
            let s = objective.score(&x);
            if best.is_none_or(|(bs, _)| s > bs) {
                best = Some((s, x));
            }
        }
    };

    let (nh, bh) = (domain.normal(h), domain.offset(h));

    if let Some(p) = circle_point(&nh, bh, r, objective) {
        offer(p);
    }
    if let Objective::Nearest(p) = objective {
        offer(p - nh * (nh.dot(&p) - bh));
    }

    for (a, &i) in work.iter().enumerate() {
        let (ni, bi) = (domain.normal(i), domain.offset(i));
        if let Some(line) = Line::through(&nh, bh, &ni, bi) {
            for p in line.sphere_points(r, tol) {
                offer(p);
            }
            if let Objective::Nearest(p) = objective {
                offer(line.nearest(&p));
            }
        }
        for &j in &work[a + 1..] {
            let (nj, bj) = (domain.normal(j), domain.offset(j));
            if let Some(v) = vertex(&nh, bh, &ni, bi, &nj, bj) {
                offer(v);
            }
        }
    }
    best.map(|(_, x)| x)
}

/// Optimum of the objective on the circle `{|x| = r, x · n = b}`.
fn circle_point(n: &Vec3, b: f64, r: f64, objective: Objective) -> Option<Vec3> {
    let rho2 = r * r - b * b;
    if rho2 < -KERNEL_TOL * (1.0 + r) {
        return None;
    }
    let rho = rho2.max(0.0).sqrt();
    let target = match objective {
        Objective::Maximize(c) => c,
        Objective::Nearest(p) => p,
    };
    let tangential = target - n * n.dot(&target);
    let tn = tangential.norm();
    let dir = if tn > 1e-12 {
        tangential / tn
    } else {
        any_orthogonal(n)
    };
    Some(n * b + dir * rho)
}

pub(crate) fn any_orthogonal(n: &Vec3) -> Vec3 {
    let a = n.abs();
    let axis = if a.x <= a.y && a.x <= a.z {
        Vec3::x()
    } else if a.y <= a.z {
        Vec3::y()
    } else {
        Vec3::z()
    };
    n.cross(&axis).normalize()
}

struct Line {
    /// Point of the line closest to the origin.
    base: Vec3,
    dir: Vec3,
}

impl Line {
    fn through(n1: &Vec3, b1: f64, n2: &Vec3, b2: f64) -> Option<Self> {
        let d = n1.cross(n2);
        let d2 = d.norm_squared();
        if d2 < PARALLEL_TOL {
            return None;
        }
        let g = n1.dot(n2);
        let base = (n1 * (b1 - b2 * g) + n2 * (b2 - b1 * g)) / d2;
        Some(Self {
            base,
            dir: d / d2.sqrt(),
        })
    }

    fn nearest(&self, p: &Vec3) -> Vec3 {
        self.base + self.dir * self.dir.dot(&(p - self.base))
    }

    fn sphere_points(&self, r: f64, tol: f64) -> impl Iterator<Item = Vec3> {
        let t2 = r * r - self.base.norm_squared();
        let pts = if t2 < -tol * (1.0 + r) {
            None
        } else {
            let t = t2.max(0.0).sqrt();
            Some([self.base + self.dir * t, self.base - self.dir * t])
        };
        pts.into_iter().flatten()
    }
}

fn vertex(n1: &Vec3, b1: f64, n2: &Vec3, b2: f64, n3: &Vec3, b3: f64) -> Option<Vec3> {
    // Cramer's rule via triple products.
    let c23 = n2.cross(n3);
    let det = n1.dot(&c23);
    if det.abs() < 1e-12 {
        return None;
    }
    let p = (c23 * b1 + n3.cross(n1) * b2 + n1.cross(n2) * b3) / det;
    Some(p)
}
