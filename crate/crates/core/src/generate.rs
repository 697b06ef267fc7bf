//! Standard graph families.
//!
//! Infinite graphs such as integer lattices and radial trees are only ever
//! produced as finite truncations with a free boundary.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    Path { n: usize },
    Cycle { n: usize },
    Complete { n: usize },
    /// Rectangular box of the integer lattice; `wraparound` turns it into a torus.
    LatticeBox { dims: Vec<usize>, wraparound: bool },
    /// Rooted tree where every vertex at depth `i` has `branching[i]` children.
    RadialTree { branching: Vec<usize> },
    /// Uniform random labelled spanning tree plus independent extra edges.
    RandomConnected { n: usize, p: f64, seed: u64 },
}

pub fn generate(family: &Family) -> Result<Graph> {
    match family {
        Family::Path { n } => path(*n),
        Family::Cycle { n } => cycle(*n),
        Family::Complete { n } => complete(*n),
        Family::LatticeBox { dims, wraparound } => lattice_box(dims, *wraparound),
        Family::RadialTree { branching } => radial_tree(branching),
        Family::RandomConnected { n, p, seed } => random_connected(*n, *p, *seed),
    }
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

pub fn path(n: usize) -> Result<Graph> {
    if n < 2 {
        return Err(invalid(format!("path needs at least 2 vertices, got {n}")));
    }
    let edges: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
    Graph::new(n, &edges)
}

pub fn cycle(n: usize) -> Result<Graph> {
    if n < 3 {
        return Err(invalid(format!("cycle needs at least 3 vertices, got {n}")));
    }
    let edges: Vec<_> = (0..n).map(|v| (v, (v + 1) % n)).collect();
    Graph::new(n, &edges)
}

pub fn complete(n: usize) -> Result<Graph> {
    if n < 2 {
        return Err(invalid(format!("complete graph needs at least 2 vertices, got {n}")));
    }
    let edges: Vec<_> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .collect();
    Graph::new(n, &edges)
}

/// Vertex ids are row-major with the last coordinate varying fastest.
pub fn lattice_box(dims: &[usize], wraparound: bool) -> Result<Graph> {
    if dims.is_empty() {
        return Err(invalid("lattice box needs at least one dimension"));
    }
    if let Some(i) = dims.iter().position(|&d| d == 0) {
        return Err(invalid(format!("lattice dimension {i} has size 0")));
    }
    if wraparound
        && let Some(i) = dims.iter().position(|&d| d < 3) {
            return Err(invalid(format!(
                "wraparound needs every side >= 3 to stay simple, dimension {i} has size {}",
                dims[i]
            )));
        }
    let n = dims
        .iter()
        .try_fold(1usize, |acc, &d| acc.checked_mul(d))
        .ok_or_else(|| invalid("lattice box too large"))?;
    // stride[i] is the id offset of a unit step along axis i
    let mut stride = vec![1usize; dims.len()];
    for i in (0..dims.len() - 1).rev() {
        stride[i] = stride[i + 1] * dims[i + 1];
    }
    let mut edges = Vec::new();
    for v in 0..n {
        for (&size, &step) in dims.iter().zip(&stride) {
            let coord = (v / step) % size;
            if coord + 1 < size {
                edges.push((v, v + step));
            } else if wraparound {
                edges.push((v, v - coord * step));
            }
        }
    }
    Graph::new(n, &edges)
}

/// Breadth-first numbering: the root is 0, then each level left to right.
pub fn radial_tree(branching: &[usize]) -> Result<Graph> {
    if let Some(level) = branching.iter().position(|&b| b == 0) {
        return Err(invalid(format!("branching factor 0 at level {level}")));
    }
    let mut edges = Vec::new();
    let mut frontier = vec![0usize];
    let mut next_id = 1usize;
    for &b in branching {
        let mut next = Vec::with_capacity(frontier.len() * b);
        for &parent in &frontier {
            for _ in 0..b {
                edges.push((parent, next_id));
                next.push(next_id);
                next_id += 1;
            }
        }
        frontier = next;
    }
    Graph::new(next_id, &edges)
}

/// Decodes a uniformly drawn Prüfer sequence into a spanning tree, then adds
/// every remaining pair independently with probability `p`.
pub fn random_connected(n: usize, p: f64, seed: u64) -> Result<Graph> {
    if n < 2 {
        return Err(invalid(format!("random graph needs at least 2 vertices, got {n}")));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(invalid(format!("edge probability {p} outside [0, 1]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let prufer: Vec<usize> = (0..n - 2).map(|_| rng.random_range(0..n)).collect();
    let mut tree = prufer_to_edges(n, &prufer);
    let mut in_tree = vec![false; n * n];
    for &(u, v) in &tree {
        in_tree[u * n + v] = true;
        in_tree[v * n + u] = true;
    }
    for u in 0..n {
        for v in u + 1..n {
            // draw for every pair so the stream does not depend on the tree
            let coin: f64 = rng.random();
            if !in_tree[u * n + v] && coin < p {
                tree.push((u, v));
            }
        }
    }
    Graph::new(n, &tree)
}

fn prufer_to_edges(n: usize, seq: &[usize]) -> Vec<(usize, usize)> {
    let mut degree = vec![1usize; n];
    for &v in seq {
        degree[v] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    for &v in seq {
        let leaf = (0..n).find(|&u| degree[u] == 1).expect("a leaf always exists");
        edges.push((leaf, v));
        degree[leaf] -= 1;
        degree[v] -= 1;
    }
    let rest: Vec<usize> = (0..n).filter(|&u| degree[u] == 1).collect();
    edges.push((rest[0], rest[1]));
    edges
}
