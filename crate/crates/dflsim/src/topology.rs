//! Communication graphs for decentralized training.
//!
//! A [`Topology`] is an undirected, connected graph over client ids
//! `0..node_count`. Builders cover the ring, grid, clique-ring and seeded
//! random families; queries cover BFS hop distances and Metropolis-Hastings
//! gossip weights. Topologies are immutable after construction and safe to
//! share across workers.

use std::collections::{BTreeSet, VecDeque};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TopologyKind {
    Ring,
    Grid,
    CliqueRing,
    Random,
}

/// Declarative description of a topology, used by config files and the
/// regressor pipeline. `build` turns it into a concrete graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TopologySpec {
    Ring { n: usize },
    Grid { rows: usize, cols: usize },
    CliqueRing { num_cliques: usize, clique_size: usize },
    Random { n: usize, target_degree: usize, seed: u64 },
}

impl TopologySpec {
    pub fn build(&self) -> Result<Topology> {
        match *self {
            TopologySpec::Ring { n } => build_ring(n),
            TopologySpec::Grid { rows, cols } => build_grid(rows, cols),
            TopologySpec::CliqueRing {
                num_cliques,
                clique_size,
            } => build_clique_ring(num_cliques, clique_size),
            TopologySpec::Random {
                n,
                target_degree,
                seed,
            } => build_random(n, target_degree, seed),
        }
    }

    pub fn family(&self) -> &'static str {
        match self {
            TopologySpec::Ring { .. } => "ring",
            TopologySpec::Grid { .. } => "grid",
            TopologySpec::CliqueRing { .. } => "clique_ring",
            TopologySpec::Random { .. } => "random",
        }
    }

    pub fn node_count(&self) -> usize {
        match *self {
            TopologySpec::Ring { n } => n,
            TopologySpec::Grid { rows, cols } => rows * cols,
            TopologySpec::CliqueRing {
                num_cliques,
                clique_size,
            } => num_cliques * clique_size,
            TopologySpec::Random { n, .. } => n,
        }
    }
}

/// An undirected connected graph over node ids `0..node_count`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Topology {
    node_count: usize,
    kind: TopologyKind,
    edges: BTreeSet<(usize, usize)>, // normalized (min, max)
    neighbors: Vec<Vec<usize>>,      // sorted adjacency lists
}

impl Topology {
    fn from_edges(
        node_count: usize,
        kind: TopologyKind,
        edges: BTreeSet<(usize, usize)>,
    ) -> Result<Self> {
        let mut neighbors = vec![Vec::new(); node_count];
        for &(a, b) in &edges {
            if a == b {
                return Err(Error::invalid(format!("self-loop at node {a}")));
            }
            if a >= node_count || b >= node_count {
                return Err(Error::invalid(format!(
                    "edge ({a}, {b}) outside node range 0..{node_count}"
                )));
            }
            neighbors[a].push(b);
            neighbors[b].push(a);
        }
        for list in &mut neighbors {
            list.sort_unstable();
            list.dedup();
        }
        let t = Topology {
            node_count,
            kind,
            edges,
            neighbors,
        };
        if !t.is_connected() {
            return Err(Error::ConstructionFailure(format!(
                "{kind:?} graph on {node_count} nodes is not connected"
            )));
        }
        Ok(t)
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn kind(&self) -> TopologyKind {
        self.kind
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        let key = (a.min(b), a.max(b));
        self.edges.contains(&key)
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.neighbors[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.neighbors[v].len()
    }

    fn check_node(&self, v: usize) -> Result<()> {
        if v >= self.node_count {
            return Err(Error::invalid(format!(
                "node id {v} out of range 0..{}",
                self.node_count
            )));
        }
        Ok(())
    }

    fn is_connected(&self) -> bool {
        if self.node_count == 0 {
            return false;
        }
        let mut seen = vec![false; self.node_count];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = queue.pop_front() {
            for &w in &self.neighbors[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    queue.push_back(w);
                }
            }
        }
        count == self.node_count
    }

    /// BFS distances from `a` to every node (each edge counts as 1).
    pub fn hop_distances_from(&self, a: usize) -> Result<Vec<usize>> {
        self.check_node(a)?;
        let mut dist = vec![usize::MAX; self.node_count];
        let mut queue = VecDeque::from([a]);
        dist[a] = 0;
        while let Some(v) = queue.pop_front() {
            for &w in &self.neighbors[v] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        Ok(dist)
    }

    /// Shortest-path length between two nodes; 0 iff `a == b`.
    pub fn hop_distance(&self, a: usize, b: usize) -> Result<usize> {
        self.check_node(b)?;
        Ok(self.hop_distances_from(a)?[b])
    }

    /// Plain-text edge list: node count on line 1, one `i j` pair per line.
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("{}\n", self.node_count);
        for (a, b) in &self.edges {
            out.push_str(&format!("{a} {b}\n"));
        }
        out
    }

    pub fn content_hash(&self) -> String {
        rng::sha256_hex(self.to_edge_list().as_bytes())
    }
}

/// Cycle graph on `n >= 3` nodes.
pub fn build_ring(n: usize) -> Result<Topology> {
    if n < 3 {
        return Err(Error::invalid(format!("ring needs n >= 3, got {n}")));
    }
    let edges: BTreeSet<_> = (0..n)
        .map(|i| {
            let j = (i + 1) % n;
            (i.min(j), i.max(j))
        })
        .collect();
    Topology::from_edges(n, TopologyKind::Ring, edges)
}

/// 4-neighborhood lattice without wraparound; nodes in row-major order.
pub fn build_grid(rows: usize, cols: usize) -> Result<Topology> {
    if rows * cols < 2 {
        return Err(Error::invalid(format!(
            "grid needs rows*cols >= 2, got {rows}x{cols}"
        )));
    }
    let id = |r: usize, c: usize| r * cols + c;
    let mut edges = BTreeSet::new();
    for r in 0..rows {
        for c in 0..cols {
            if c + 1 < cols {
                edges.insert((id(r, c), id(r, c + 1)));
            }
            if r + 1 < rows {
                edges.insert((id(r, c), id(r + 1, c)));
            }
        }
    }
    Topology::from_edges(rows * cols, TopologyKind::Grid, edges)
}

/// `num_cliques` complete graphs on a cycle. Consecutive cliques are joined by
/// exactly one bridge: local node 0 of clique q connects to local node 1 of
/// clique q+1 (fixed convention so builds are reproducible).
pub fn build_clique_ring(num_cliques: usize, clique_size: usize) -> Result<Topology> {
    if num_cliques < 3 || clique_size < 2 {
        return Err(Error::invalid(format!(
            "clique ring needs num_cliques >= 3 and clique_size >= 2, got {num_cliques}, {clique_size}"
        )));
    }
    let n = num_cliques * clique_size;
    let mut edges = BTreeSet::new();
    for q in 0..num_cliques {
        let base = q * clique_size;
        for a in 0..clique_size {
            for b in (a + 1)..clique_size {
                edges.insert((base + a, base + b));
            }
        }
        let next = ((q + 1) % num_cliques) * clique_size + 1;
        let port = base;
        edges.insert((port.min(next), port.max(next)));
    }
    Topology::from_edges(n, TopologyKind::CliqueRing, edges)
}

const RANDOM_BUILD_RETRIES: u64 = 1000;

/// Connected random graph with degrees close to `target_degree`.
///
/// Construction: ring backbone, greedy seeded fill to the target degree,
/// then degree-preserving edge swaps; the result is rejected and rebuilt
/// (bounded retries) if the swaps disconnected it.
pub fn build_random(n: usize, target_degree: usize, seed: u64) -> Result<Topology> {
    if n < 3 || target_degree < 2 || target_degree >= n {
        return Err(Error::invalid(format!(
            "random graph needs n >= 3 and 2 <= target_degree < n, got n={n}, d={target_degree}"
        )));
    }
    for attempt in 0..RANDOM_BUILD_RETRIES {
        let mut rng = rng::stream(seed, "topology.random", &[attempt]);
        let mut set: BTreeSet<(usize, usize)> = (0..n)
            .map(|i| {
                let j = (i + 1) % n;
                (i.min(j), i.max(j))
            })
            .collect();
        let mut deg = vec![2usize; n];

        // Greedy fill toward the target degree.
        for u in 0..n {
            while deg[u] < target_degree {
                let candidates: Vec<usize> = (0..n)
                    .filter(|&v| {
                        v != u && deg[v] < target_degree && !set.contains(&(u.min(v), u.max(v)))
                    })
                    .collect();
                let Some(&v) = candidates.get(rng.gen_range(0..candidates.len().max(1))) else {
                    break;
                };
                set.insert((u.min(v), u.max(v)));
                deg[u] += 1;
                deg[v] += 1;
            }
        }

        // Degree-preserving double-edge swaps to randomize structure.
        let mut list: Vec<(usize, usize)> = set.iter().copied().collect();
        for _ in 0..10 * list.len() {
            let i = rng.gen_range(0..list.len());
            let j = rng.gen_range(0..list.len());
            if i == j {
                continue;
            }
            let (a, b) = list[i];
            let (c, d) = list[j];
            let (x, y) = if rng.gen::<bool>() { (c, d) } else { (d, c) };
            // Proposed replacement: (a,x), (b,y).
            let mut endpoints = [a, b, x, y];
            endpoints.sort_unstable();
            if endpoints.windows(2).any(|w| w[0] == w[1]) {
                continue;
            }
            let e1 = (a.min(x), a.max(x));
            let e2 = (b.min(y), b.max(y));
            if set.contains(&e1) || set.contains(&e2) {
                continue;
            }
            set.remove(&list[i]);
            set.remove(&list[j]);
            set.insert(e1);
            set.insert(e2);
            list[i] = e1;
            list[j] = e2;
        }

        if let Ok(t) = Topology::from_edges(n, TopologyKind::Random, set) {
            return Ok(t);
        }
    }
    Err(Error::ConstructionFailure(format!(
        "no connected random graph with n={n}, d={target_degree} after {RANDOM_BUILD_RETRIES} attempts"
    )))
}

/// Row-stochastic, symmetric gossip weights over a topology.
#[derive(Debug, Clone, PartialEq)]
pub struct MixingMatrix {
    n: usize,
    weights: Vec<f64>, // row-major n x n
}

impl MixingMatrix {
    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.weights[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.weights[i * self.n..(i + 1) * self.n]
    }
}

/// Metropolis-Hastings weights: `w[i][j] = 1 / (1 + max(deg i, deg j))` on
/// edges, diagonal absorbs the remainder. Symmetric and doubly stochastic on
/// any connected graph.
pub fn metropolis_weights(t: &Topology) -> MixingMatrix {
    let n = t.node_count();
    let mut weights = vec![0.0; n * n];
    for (a, b) in t.edges() {
        let w = 1.0 / (1.0 + t.degree(a).max(t.degree(b)) as f64);
        weights[a * n + b] = w;
        weights[b * n + a] = w;
    }
    for i in 0..n {
        let off: f64 = (0..n).filter(|&j| j != i).map(|j| weights[i * n + j]).sum();
        weights[i * n + i] = 1.0 - off;
    }
    MixingMatrix { n, weights }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_small_topologies() -> Vec<Topology> {
        vec![
            build_ring(3).unwrap(),
            build_ring(6).unwrap(),
            build_ring(16).unwrap(),
            build_grid(1, 5).unwrap(),
            build_grid(2, 2).unwrap(),
            build_grid(3, 3).unwrap(),
            build_grid(4, 5).unwrap(),
            build_clique_ring(3, 2).unwrap(),
            build_clique_ring(4, 3).unwrap(),
            build_clique_ring(4, 4).unwrap(),
            build_random(10, 3, 7).unwrap(),
            build_random(12, 4, 1).unwrap(),
        ]
    }

    #[test]
    fn ring_default_scale() {
        let t = build_ring(40).unwrap();
        assert_eq!(t.node_count(), 40);
        assert_eq!(t.edge_count(), 40);
        assert!((0..40).all(|v| t.degree(v) == 2));
    }

    #[test]
    fn ring_triangle_and_adjacency() {
        let t = build_ring(3).unwrap();
        assert_eq!(t.edge_count(), 3);
        let t6 = build_ring(6).unwrap();
        assert_eq!(t6.neighbors(0), &[1, 5]);
    }

    #[test]
    fn ring_too_small_rejected() {
        assert!(matches!(build_ring(2), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn grid_edge_counts() {
        let t = build_grid(3, 3).unwrap();
        assert_eq!(t.node_count(), 9);
        assert_eq!(t.edge_count(), 12); // 2rc - r - c
        let path = build_grid(1, 5).unwrap();
        assert_eq!(path.edge_count(), 4);
        assert_eq!(path.degree(0), 1);
        let square = build_grid(2, 2).unwrap();
        assert_eq!(square.edge_count(), 4);
        assert!((0..4).all(|v| square.degree(v) == 2));
        assert!(matches!(build_grid(1, 1), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn clique_ring_structure() {
        let t = build_clique_ring(4, 3).unwrap();
        assert_eq!(t.node_count(), 12);
        assert_eq!(t.edge_count(), 16); // 4 triangles + 4 bridges

        let small = build_clique_ring(3, 2).unwrap();
        assert_eq!(small.node_count(), 6);
        assert_eq!(small.edge_count(), 6);

        // Bridge endpoints end up with degree == clique_size.
        let t44 = build_clique_ring(4, 4).unwrap();
        for q in 0..4 {
            assert_eq!(t44.degree(q * 4), 4, "outgoing port of clique {q}");
            assert_eq!(t44.degree(q * 4 + 1), 4, "incoming port of clique {q}");
        }
        assert!(matches!(
            build_clique_ring(2, 3),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            build_clique_ring(3, 1),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn random_graph_deterministic_and_connected() {
        let a = build_random(10, 3, 7).unwrap();
        let b = build_random(10, 3, 7).unwrap();
        assert_eq!(
            a.edges().collect::<Vec<_>>(),
            b.edges().collect::<Vec<_>>()
        );
        let c = build_random(10, 3, 8).unwrap();
        // Different seed should virtually always give a different edge set.
        assert_ne!(
            a.edges().collect::<Vec<_>>(),
            c.edges().collect::<Vec<_>>()
        );
    }

    #[test]
    fn random_graph_full_degree_is_complete() {
        let t = build_random(4, 3, 1).unwrap();
        assert_eq!(t.edge_count(), 6);
        assert!((0..4).all(|v| t.degree(v) == 3));
    }

    #[test]
    fn hop_distance_examples() {
        let ring = build_ring(6).unwrap();
        assert_eq!(ring.hop_distance(0, 3).unwrap(), 3);
        let grid = build_grid(3, 3).unwrap();
        assert_eq!(grid.hop_distance(0, 8).unwrap(), 4);
        assert_eq!(grid.hop_distance(4, 4).unwrap(), 0);
        assert!(matches!(
            grid.hop_distance(0, 9),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn hop_distance_metric_properties() {
        for t in all_small_topologies() {
            let n = t.node_count();
            assert!(n <= 20);
            let dist: Vec<Vec<usize>> = (0..n)
                .map(|a| t.hop_distances_from(a).unwrap())
                .collect();
            for a in 0..n {
                assert_eq!(dist[a][a], 0);
                for b in 0..n {
                    assert_eq!(dist[a][b], dist[b][a]);
                    for c in 0..n {
                        assert!(dist[a][c] <= dist[a][b] + dist[b][c]);
                    }
                }
            }
        }
    }

    #[test]
    fn metropolis_ring4_uniform() {
        let t = build_ring(4).unwrap();
        let m = metropolis_weights(&t);
        for i in 0..4 {
            for j in 0..4 {
                if i == j || t.has_edge(i, j) {
                    assert!((m.weight(i, j) - 1.0 / 3.0).abs() < 1e-15);
                } else {
                    assert_eq!(m.weight(i, j), 0.0);
                }
            }
        }
    }

    #[test]
    fn metropolis_path_weights() {
        // Path of 3: end node degree 1, middle degree 2.
        let t = build_grid(1, 3).unwrap();
        let m = metropolis_weights(&t);
        assert!((m.weight(0, 1) - 1.0 / 3.0).abs() < 1e-15);
        assert!((m.weight(0, 0) - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn metropolis_doubly_stochastic_and_sparse() {
        for t in all_small_topologies() {
            let m = metropolis_weights(&t);
            let n = t.node_count();
            for i in 0..n {
                let row_sum: f64 = m.row(i).iter().sum();
                assert!((row_sum - 1.0).abs() < 1e-12, "row {i} sums to {row_sum}");
                let col_sum: f64 = (0..n).map(|j| m.weight(j, i)).sum();
                assert!((col_sum - 1.0).abs() < 1e-12);
                for j in 0..n {
                    assert!(m.weight(i, j) >= 0.0);
                    assert!((m.weight(i, j) - m.weight(j, i)).abs() < 1e-15);
                    if i != j && !t.has_edge(i, j) {
                        assert_eq!(m.weight(i, j), 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn edge_list_format() {
        let t = build_ring(3).unwrap();
        assert_eq!(t.to_edge_list(), "3\n0 1\n0 2\n1 2\n");
        assert_eq!(t.content_hash(), build_ring(3).unwrap().content_hash());
    }

    #[test]
    fn spec_roundtrip_build() {
        let spec = TopologySpec::CliqueRing {
            num_cliques: 4,
            clique_size: 3,
        };
        assert_eq!(spec.node_count(), 12);
        assert_eq!(spec.family(), "clique_ring");
        assert_eq!(spec.build().unwrap().edge_count(), 16);
    }
}
