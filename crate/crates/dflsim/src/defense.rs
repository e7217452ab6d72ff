//! Aggregation-time defense hooks: norm-bounding of incoming updates and
//! coordinate-wise median aggregation. Applied uniformly by every client.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DefenseSpec {
    None,
    NormClip { threshold: f64 },
    NeighborMedian,
}

impl Default for DefenseSpec {
    fn default() -> Self {
        DefenseSpec::None
    }
}

impl DefenseSpec {
    pub fn validate(&self) -> Result<(), String> {
        match self {
            DefenseSpec::NormClip { threshold } if !(*threshold > 0.0) => {
                Err(format!("norm_clip threshold must be > 0, got {threshold}"))
            }
            _ => Ok(()),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            DefenseSpec::None => "none".into(),
            DefenseSpec::NormClip { threshold } => format!("norm_clip(threshold={threshold})"),
            DefenseSpec::NeighborMedian => "neighbor_median".into(),
        }
    }
}

/// Rescale the neighbor's update delta (`neighbor − own`) to L2 norm at most
/// `threshold` before it enters the mixing average.
pub fn clip_incoming(own: &[f64], neighbor: &[f64], threshold: f64) -> Vec<f64> {
    debug_assert_eq!(own.len(), neighbor.len());
    let norm: f64 = own
        .iter()
        .zip(neighbor)
        .map(|(o, n)| (n - o) * (n - o))
        .sum::<f64>()
        .sqrt();
    if norm <= threshold {
        return neighbor.to_vec();
    }
    let scale = threshold / norm;
    own.iter()
        .zip(neighbor)
        .map(|(o, n)| o + (n - o) * scale)
        .collect()
}

/// Coordinate-wise median over `{own} ∪ neighbors`, replacing the weighted
/// average for this client this round. Median of an even count is the mean of
/// the two middle values.
pub fn median_aggregate(own: &[f64], neighbors: &[&[f64]]) -> Vec<f64> {
    debug_assert!(!neighbors.is_empty());
    let n = 1 + neighbors.len();
    let mut column = vec![0.0; n];
    (0..own.len())
        .map(|k| {
            column[0] = own[k];
            for (i, nb) in neighbors.iter().enumerate() {
                column[i + 1] = nb[k];
            }
            column.sort_by(|a, b| a.partial_cmp(b).unwrap());
            if n % 2 == 1 {
                column[n / 2]
            } else {
                0.5 * (column[n / 2 - 1] + column[n / 2])
            }
        })
        .collect()
}
