//! Distance matrices over attacker sets and PAM k-medoids clustering.
//!
//! k-medoids is used instead of k-means because distance prediction yields a
//! dissimilarity matrix, not an embedding; PAM operates on the matrix
//! directly and is deterministic under seeded initialization.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::rng;
use crate::topology::Topology;

/// Symmetric nonnegative matrix of pairwise distances between attackers,
/// indexed by position with a parallel list of attacker node ids.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    ids: Vec<usize>,
    d: Vec<f64>, // row-major len x len
}

impl DistanceMatrix {
    pub fn new(ids: Vec<usize>, d: Vec<f64>) -> Result<Self> {
        let n = ids.len();
        if d.len() != n * n {
            return Err(Error::invalid(format!(
                "distance matrix needs {n}x{n} entries, got {}",
                d.len()
            )));
        }
        for i in 0..n {
            if d[i * n + i] != 0.0 {
                return Err(Error::invalid(format!("nonzero diagonal at {i}")));
            }
            for j in 0..n {
                let v = d[i * n + j];
                if !(v >= 0.0 && v.is_finite()) {
                    return Err(Error::invalid(format!("entry ({i},{j}) = {v}")));
                }
                if (v - d[j * n + i]).abs() > 1e-12 {
                    return Err(Error::invalid(format!("asymmetry at ({i},{j})")));
                }
            }
        }
        Ok(DistanceMatrix { ids, d })
    }

    /// Exact BFS hop distances between the given nodes.
    pub fn oracle(topology: &Topology, ids: &[usize]) -> Result<Self> {
        let n = ids.len();
        let mut d = vec![0.0; n * n];
        for (i, &a) in ids.iter().enumerate() {
            let from_a = topology.hop_distances_from(a)?;
            for (j, &b) in ids.iter().enumerate() {
                d[i * n + j] = from_a[b] as f64;
            }
        }
        DistanceMatrix::new(ids.to_vec(), d)
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[usize] {
        &self.ids
    }

    /// Entry by position (not node id).
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.d[i * self.ids.len() + j]
    }

    /// Seeded symmetric perturbation: each off-diagonal pair gets uniform
    /// noise in `±amplitude` hops, clamped at zero. Models controlled
    /// inaccuracy in distance prediction.
    pub fn inject_error(&self, amplitude: f64, seed: u64) -> Result<Self> {
        use rand::Rng;
        if amplitude == 0.0 {
            return Ok(self.clone());
        }
        let n = self.ids.len();
        let mut rng = rng::stream(seed, "attack.distance_error", &[]);
        let mut d = self.d.clone();
        for i in 0..n {
            for j in (i + 1)..n {
                let noisy = (d[i * n + j] + rng.gen_range(-amplitude..amplitude)).max(0.0);
                d[i * n + j] = noisy;
                d[j * n + i] = noisy;
            }
        }
        DistanceMatrix::new(self.ids.clone(), d)
    }

    /// Plain-text rows for the experiment sidecar.
    pub fn to_text(&self) -> String {
        let n = self.ids.len();
        let mut out = String::new();
        for i in 0..n {
            let row: Vec<String> = (0..n).map(|j| format!("{:.4}", self.get(i, j))).collect();
            out.push_str(&format!("{}: {}\n", self.ids[i], row.join(" ")));
        }
        out
    }
}

/// Exact partition of the attacker set into nonempty clusters. Clusters hold
/// sorted node ids and are ordered by their smallest member.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterAssignment {
    clusters: Vec<Vec<usize>>,
    medoids: Vec<usize>,
}

impl ClusterAssignment {
    pub fn clusters(&self) -> &[Vec<usize>] {
        &self.clusters
    }

    /// Medoid node id of each cluster, parallel to `clusters()`.
    pub fn medoids(&self) -> &[usize] {
        &self.medoids
    }

    pub fn num_clusters(&self) -> usize {
        self.clusters.len()
    }

    pub fn cluster_of(&self, id: usize) -> Option<usize> {
        self.clusters.iter().position(|c| c.contains(&id))
    }

    /// Build from an explicit members list (used for planted ground truth and
    /// the K=1 degenerate case); medoids are set to each cluster's first id.
    pub fn from_members(mut clusters: Vec<Vec<usize>>) -> Result<Self> {
        if clusters.is_empty() || clusters.iter().any(|c| c.is_empty()) {
            return Err(Error::invalid("clusters must be nonempty"));
        }
        let mut seen = BTreeSet::new();
        for c in &mut clusters {
            c.sort_unstable();
            for &id in c.iter() {
                if !seen.insert(id) {
                    return Err(Error::invalid(format!("attacker {id} in two clusters")));
                }
            }
        }
        clusters.sort_by_key(|c| c[0]);
        let medoids = clusters.iter().map(|c| c[0]).collect();
        Ok(ClusterAssignment { clusters, medoids })
    }

    pub fn to_text(&self) -> String {
        self.clusters
            .iter()
            .zip(&self.medoids)
            .map(|(c, m)| {
                let ids: Vec<String> = c.iter().map(|i| i.to_string()).collect();
                format!("medoid {m}: [{}]\n", ids.join(", "))
            })
            .collect()
    }

    /// Same partition irrespective of cluster order (for recovery checks).
    pub fn same_partition(&self, other: &ClusterAssignment) -> bool {
        self.clusters == other.clusters
    }
}

fn partition_cost(m: &DistanceMatrix, medoids: &[usize]) -> f64 {
    let n = m.len();
    (0..n)
        .map(|p| {
            medoids
                .iter()
                .map(|&md| m.get(p, md))
                .fold(f64::INFINITY, f64::min)
        })
        .sum()
}

/// Classic PAM BUILD: greedily add the medoid that most reduces total cost.
fn build_init(m: &DistanceMatrix, k: usize) -> Vec<usize> {
    let n = m.len();
    let mut medoids: Vec<usize> = Vec::with_capacity(k);
    while medoids.len() < k {
        let mut best: Option<(f64, usize)> = None;
        for cand in 0..n {
            if medoids.contains(&cand) {
                continue;
            }
            medoids.push(cand);
            let cost = partition_cost(m, &medoids);
            medoids.pop();
            let better = match best {
                None => true,
                Some((bc, _)) => cost < bc - 1e-15,
            };
            if better {
                best = Some((cost, cand));
            }
        }
        medoids.push(best.unwrap().1);
    }
    medoids.sort_unstable();
    medoids
}

/// PAM SWAP until no single medoid/non-medoid exchange improves the cost.
fn swap_until_stable(m: &DistanceMatrix, mut medoids: Vec<usize>) -> Vec<usize> {
    let n = m.len();
    loop {
        let current = partition_cost(m, &medoids);
        let mut best: Option<(f64, usize, usize)> = None;
        for mi in 0..medoids.len() {
            for h in 0..n {
                if medoids.contains(&h) {
                    continue;
                }
                let saved = medoids[mi];
                medoids[mi] = h;
                let cost = partition_cost(m, &medoids);
                medoids[mi] = saved;
                if cost < current - 1e-12 {
                    let better = match best {
                        None => true,
                        Some((bc, _, _)) => cost < bc - 1e-15,
                    };
                    if better {
                        best = Some((cost, mi, h));
                    }
                }
            }
        }
        match best {
            Some((_, mi, h)) => {
                medoids[mi] = h;
                medoids.sort_unstable();
            }
            None => return medoids,
        }
    }
}

/// PAM k-medoids over the distance matrix: greedy BUILD plus seeded random
/// restarts, each refined by SWAP; the lowest-cost solution wins, with ties
/// broken toward the lexicographically smallest medoid set. Points tied
/// between medoids go to the lower-indexed one.
pub fn cluster_attackers(m: &DistanceMatrix, k: usize, seed: u64) -> Result<ClusterAssignment> {
    let n = m.len();
    if k == 0 || k > n {
        return Err(Error::invalid(format!(
            "need 1 <= K <= |A|, got K={k} with |A|={n}"
        )));
    }
    let mut starts: Vec<Vec<usize>> = vec![build_init(m, k)];
    let mut pool: Vec<usize> = (0..n).collect();
    for restart in 0..8u64 {
        let mut r = rng::stream(seed, "attack.pam_restart", &[restart]);
        pool.shuffle(&mut r);
        let mut start: Vec<usize> = pool[..k].to_vec();
        start.sort_unstable();
        starts.push(start);
    }

    let mut best: Option<(f64, Vec<usize>)> = None;
    for start in starts {
        let medoids = swap_until_stable(m, start);
        let cost = partition_cost(m, &medoids);
        let better = match &best {
            None => true,
            Some((bc, bm)) => cost < bc - 1e-12 || (cost <= bc + 1e-12 && medoids < *bm),
        };
        if better {
            best = Some((cost, medoids));
        }
    }
    let (_, medoids) = best.unwrap();

    let mut clusters: Vec<Vec<usize>> = vec![Vec::new(); k];
    for p in 0..n {
        let mut choice = 0;
        let mut dist = f64::INFINITY;
        for (ci, &md) in medoids.iter().enumerate() {
            let d = m.get(p, md);
            if d < dist - 1e-15 {
                dist = d;
                choice = ci;
            }
        }
        clusters[choice].push(m.ids()[p]);
    }
    // A medoid is always in its own cluster, so none is empty.
    let medoid_ids: Vec<usize> = medoids.iter().map(|&p| m.ids()[p]).collect();
    let mut pairs: Vec<(Vec<usize>, usize)> = clusters.into_iter().zip(medoid_ids).collect();
    for (c, _) in &mut pairs {
        c.sort_unstable();
    }
    pairs.sort_by(|a, b| a.0[0].cmp(&b.0[0]));
    let (clusters, medoids): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
    Ok(ClusterAssignment { clusters, medoids })
}
