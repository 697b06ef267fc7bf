//! Validated simple graphs and vertex subsets.
//!
//! A [`Graph`] is connected, undirected, unweighted, loop-free and free of
//! multi-edges, with finitely many vertices identified by dense ids
//! `0..n`. Construction is the only place these properties are checked;
//! every other module relies on them.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    adjacency: Vec<Vec<usize>>,
}

impl Graph {
    /// Builds and validates a graph from an unordered edge list.
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyGraph);
        }
        let mut adjacency = vec![Vec::new(); n];
        for &(u, v) in edges {
            for vertex in [u, v] {
                if vertex >= n {
                    return Err(Error::VertexOutOfRange { vertex, n });
                }
            }
            if u == v {
                return Err(Error::LoopEdge(u));
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for (u, nbrs) in adjacency.iter_mut().enumerate() {
            nbrs.sort_unstable();
            if let Some(w) = nbrs.windows(2).find(|w| w[0] == w[1]) {
                let (a, b) = (u.min(w[0]), u.max(w[0]));
                return Err(Error::DuplicateEdge(a, b));
            }
        }
        if n == 1 {
            return Err(Error::TrivialGraph);
        }
        let reached = reachable_count(&adjacency);
        if reached < n {
            return Err(Error::Disconnected { reached, n });
        }
        Ok(Graph { n, adjacency })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adjacency.iter().map(Vec::len).collect()
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn num_edges(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn is_adjacent(&self, u: usize, v: usize) -> bool {
        self.adjacency[u].binary_search(&v).is_ok()
    }

    /// Canonical edge list: each edge once as `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.num_edges());
        for (u, nbrs) in self.adjacency.iter().enumerate() {
            out.extend(nbrs.iter().filter(|&&v| v > u).map(|&v| (u, v)));
        }
        out
    }

    /// Hex SHA-256 of the canonical edge list, used to tie reports to inputs.
    pub fn hash(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update((self.n as u64).to_le_bytes());
        for (u, v) in self.edges() {
            hasher.update((u as u64).to_le_bytes());
            hasher.update((v as u64).to_le_bytes());
        }
        hasher
            .finalize()
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    pub(crate) fn check_vertex(&self, vertex: usize) -> Result<()> {
        if vertex < self.n {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange { vertex, n: self.n })
        }
    }

    pub(crate) fn check_set(&self, s: &VertexSet) -> Result<()> {
        match s.members.last() {
            Some(&v) => self.check_vertex(v),
            None => Ok(()),
        }
    }

    /// Vertices outside `s` adjacent to `s`, and `s` together with them.
    pub fn boundary_and_closure(&self, s: &VertexSet) -> Result<(VertexSet, VertexSet)> {
        self.check_set(s)?;
        let mut in_s = vec![false; self.n];
        for &v in s.iter() {
            in_s[v] = true;
        }
        let mut in_boundary = vec![false; self.n];
        for &v in s.iter() {
            for &u in self.neighbors(v) {
                if !in_s[u] {
                    in_boundary[u] = true;
                }
            }
        }
        let boundary = VertexSet::from_sorted_unchecked(
            (0..self.n).filter(|&v| in_boundary[v]).collect(),
        );
        let closure = VertexSet::from_sorted_unchecked(
            (0..self.n).filter(|&v| in_s[v] || in_boundary[v]).collect(),
        );
        Ok((boundary, closure))
    }

    /// First pair of adjacent members of `s`, if any.
    pub fn first_adjacent_pair(&self, s: &VertexSet) -> Option<(usize, usize)> {
        s.iter().find_map(|&v| {
            self.neighbors(v)
                .iter()
                .find(|&&u| u > v && s.contains(u))
                .map(|&u| (v, u))
        })
    }
}

fn reachable_count(adjacency: &[Vec<usize>]) -> usize {
    let mut seen = vec![false; adjacency.len()];
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    let mut count = 1;
    while let Some(v) = queue.pop_front() {
        for &u in &adjacency[v] {
            if !seen[u] {
                seen[u] = true;
                count += 1;
                queue.push_back(u);
            }
        }
    }
    count
}

/// Convenience wrapper for [`Graph::new`].
pub fn build_graph(n: usize, edges: &[(usize, usize)]) -> Result<Graph> {
    Graph::new(n, edges)
}

/// Sorted, duplicate-free set of vertex ids.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(from = "RawVertexSet")]
pub struct VertexSet {
    #[serde(rename = "vertices")]
    members: Vec<usize>,
}

// Range checks need the graph, so loading only normalizes order.
#[derive(Deserialize)]
struct RawVertexSet {
    vertices: Vec<usize>,
}

impl From<RawVertexSet> for VertexSet {
    fn from(raw: RawVertexSet) -> Self {
        let mut members = raw.vertices;
        members.sort_unstable();
        members.dedup();
        VertexSet { members }
    }
}

impl VertexSet {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Sorts and deduplicates `ids`, rejecting any id `>= n`.
    pub fn new(n: usize, ids: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut members: Vec<usize> = ids.into_iter().collect();
        members.sort_unstable();
        members.dedup();
        if let Some(&vertex) = members.last()
            && vertex >= n {
                return Err(Error::VertexOutOfRange { vertex, n });
            }
        Ok(VertexSet { members })
    }

    pub(crate) fn from_sorted_unchecked(members: Vec<usize>) -> Self {
        debug_assert!(members.windows(2).all(|w| w[0] < w[1]));
        VertexSet { members }
    }

    pub fn full(n: usize) -> Self {
        VertexSet {
            members: (0..n).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, usize> {
        self.members.iter()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.members
    }

    pub fn contains(&self, v: usize) -> bool {
        self.members.binary_search(&v).is_ok()
    }

    pub fn complement(&self, n: usize) -> Self {
        VertexSet {
            members: (0..n).filter(|&v| !self.contains(v)).collect(),
        }
    }

    pub fn union(&self, other: &VertexSet) -> Self {
        let mut members: Vec<usize> = self.iter().chain(other.iter()).copied().collect();
        members.sort_unstable();
        members.dedup();
        VertexSet { members }
    }

    pub fn with(&self, v: usize) -> Self {
        let mut members = self.members.clone();
        if let Err(pos) = members.binary_search(&v) {
            members.insert(pos, v);
        }
        VertexSet { members }
    }

    pub fn without(&self, v: usize) -> Self {
        VertexSet {
            members: self.iter().copied().filter(|&u| u != v).collect(),
        }
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.iter().all(|&v| other.contains(v))
    }

    /// First common member, if any.
    pub fn first_common(&self, other: &VertexSet) -> Option<usize> {
        self.iter().copied().find(|&v| other.contains(v))
    }
}

impl<'a> IntoIterator for &'a VertexSet {
    type Item = &'a usize;
    type IntoIter = std::slice::Iter<'a, usize>;

    fn into_iter(self) -> Self::IntoIter {
        self.members.iter()
    }
}
