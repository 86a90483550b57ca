//! Angle graph on plank normals and the chunked processing order.
//!
//! Two planks are adjacent when their normals differ by less than a threshold
//! angle θ. The order is built by repeatedly taking a vertex of at least
//! average degree together with its remaining neighbours, then deleting that
//! chunk from the graph.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::types::{angular_distance, UnitVector};

/// `α = 1/6 + β/3`, the angle exponent balancing the two volume bounds when
/// `k = ε^{−β}` planks are available.
pub fn compute_alpha(beta: f64) -> f64 {
    1.0 / 6.0 + beta / 3.0
}

/// `β = ln k / ln(1/ε)`, clamped to `[1, 2]`.
pub fn infer_beta(k: usize, epsilon: f64) -> f64 {
    let beta = (k as f64).ln() / (1.0 / epsilon).ln();
    if beta.is_nan() {
        return 2.0;
    }
    beta.clamp(1.0, 2.0)
}

/// Default adjacency threshold `ε^α` with `α = compute_alpha(infer_beta(k, ε))`.
pub fn default_threshold(k: usize, epsilon: f64) -> f64 {
    epsilon.powf(compute_alpha(infer_beta(k, epsilon)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct AngleGraph {
    pub threshold: f64,
    /// Sorted neighbour lists.
    pub adjacency: Vec<Vec<usize>>,
}

impl AngleGraph {
    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adjacency[u].binary_search(&v).is_ok()
    }
}

fn adjacent(a: &UnitVector, b: &UnitVector, theta: f64) -> bool {
    angular_distance(a, b) < theta
}

/// Exact pairwise construction, O(k²).
pub fn build_angle_graph(normals: &[UnitVector], theta: f64) -> AngleGraph {
    let k = normals.len();
    let mut adjacency = vec![Vec::new(); k];
    for u in 0..k {
        for v in u + 1..k {
            if adjacent(&normals[u], &normals[v], theta) {
                adjacency[u].push(v);
                adjacency[v].push(u);
            }
        }
    }
    AngleGraph {
        threshold: theta,
        adjacency,
    }
}

/// Same edge set as [`build_angle_graph`], with candidate pairs restricted to
/// neighbouring cells of a cubic grid over the sphere whose spacing is the
/// chord length of θ.
pub fn build_angle_graph_bucketed(normals: &[UnitVector], theta: f64) -> AngleGraph {
    if theta >= std::f64::consts::PI {
        return build_angle_graph(normals, theta);
    }
    let cell = 2.0 * (theta / 2.0).sin() * (1.0 + 1e-9);
    let key = |u: &UnitVector| -> [i64; 3] {
        [
            (u.x() / cell).floor() as i64,
            (u.y() / cell).floor() as i64,
            (u.z() / cell).floor() as i64,
        ]
    };
    let mut grid: HashMap<[i64; 3], Vec<usize>> = HashMap::new();
    for (i, u) in normals.iter().enumerate() {
        grid.entry(key(u)).or_default().push(i);
    }
    let mut adjacency = vec![Vec::new(); normals.len()];
    for (u, nu) in normals.iter().enumerate() {
        let [cx, cy, cz] = key(nu);
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    let Some(bucket) = grid.get(&[cx + dx, cy + dy, cz + dz]) else {
                        continue;
                    };
                    for &v in bucket {
                        if v != u && adjacent(nu, &normals[v], theta) {
                            adjacency[u].push(v);
                        }
                    }
                }
            }
        }
        adjacency[u].sort_unstable();
    }
    AngleGraph {
        threshold: theta,
        adjacency,
    }
}

/// A group of planks processed consecutively: the center first, then its
/// neighbours in ascending index order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Chunk {
    pub indices: Vec<usize>,
}

/// One extraction step: the chosen center, its degree, and the average
/// degree of the graph it was chosen from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    pub center: usize,
    pub degree: usize,
    pub average_degree: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Extraction {
    pub ordering: Vec<usize>,
    pub chunks: Vec<Chunk>,
    pub trace: Vec<TraceStep>,
}

/// Repeatedly picks a maximum-degree vertex (lowest index on ties), emits it
/// with its remaining neighbours as a chunk, and deletes the chunk.
pub fn extract_order(graph: &AngleGraph) -> Extraction {
    let k = graph.vertex_count();
    let mut alive = vec![true; k];
    let mut degree: Vec<usize> = graph.adjacency.iter().map(Vec::len).collect();
    let mut remaining = k;
    let mut degree_sum: usize = degree.iter().sum();
    let mut ordering = Vec::with_capacity(k);
    let mut chunks = Vec::new();
    let mut trace = Vec::new();

    while remaining > 0 {
        let average = degree_sum as f64 / remaining as f64;
        let mut center = usize::MAX;
        for v in 0..k {
            if alive[v] && (center == usize::MAX || degree[v] > degree[center]) {
                center = v;
            }
        }
        trace.push(TraceStep {
            center,
            degree: degree[center],
            average_degree: average,
        });

        let mut indices = vec![center];
        indices.extend(
            graph.adjacency[center]
                .iter()
                .copied()
                .filter(|&v| alive[v]),
        );
        for &v in &indices {
            alive[v] = false;
        }
        for &u in &indices {
            degree_sum -= degree[u];
            for &w in &graph.adjacency[u] {
                if alive[w] {
                    degree[w] -= 1;
                    degree_sum -= 1;
                }
            }
            degree[u] = 0;
        }
        remaining -= indices.len();
        ordering.extend_from_slice(&indices);
        chunks.push(Chunk { indices });
    }
    Extraction {
        ordering,
        chunks,
        trace,
    }
}
