//! Dataset ingestion, client sharding, and signature-image generation.

mod idx;
mod trigger;

pub use idx::load_mnist_idx;
pub use trigger::{apply_local_trigger, apply_trigger, LocalTrigger, TriggerSpec};

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::rng;

/// One training or test sample: row-major pixels in `[0, 1]` plus a label.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledImage {
    pub pixels: Vec<f64>,
    pub height: usize,
    pub width: usize,
    pub label: usize,
}

/// An attacker's distinctive probe image and the pseudo-label it is trained
/// toward during the detection phase.
#[derive(Debug, Clone, PartialEq)]
pub struct SignatureImage {
    pub owner: usize,
    pub pixels: Vec<f64>,
    pub height: usize,
    pub width: usize,
    pub pseudo_label: usize,
}

impl SignatureImage {
    pub fn as_image(&self) -> LabeledImage {
        LabeledImage {
            pixels: self.pixels.clone(),
            height: self.height,
            width: self.width,
            label: self.pseudo_label,
        }
    }
}

/// Class-conditional blob dataset: each class gets a bright Gaussian bump at
/// a class-specific location over a noisy background. Linearly learnable by
/// the MLP, regenerable from seed, never persisted.
pub fn make_synthetic(
    num_classes: usize,
    per_class: usize,
    side: usize,
    seed: u64,
) -> Result<Vec<LabeledImage>> {
    if num_classes == 0 || per_class == 0 {
        return Err(Error::invalid("num_classes and per_class must be positive"));
    }
    if side < 8 {
        return Err(Error::invalid(format!("side must be >= 8, got {side}")));
    }
    let mut rng = rng::stream(seed, "data.synthetic", &[
        num_classes as u64,
        per_class as u64,
        side as u64,
    ]);
    let centers: Vec<(f64, f64)> = (0..num_classes)
        .map(|c| {
            let angle = 2.0 * std::f64::consts::PI * c as f64 / num_classes as f64;
            let r = side as f64 / 4.0;
            let mid = (side as f64 - 1.0) / 2.0;
            (mid + r * angle.sin(), mid + r * angle.cos())
        })
        .collect();
    let sigma = side as f64 / 8.0;
    let mut data = Vec::with_capacity(num_classes * per_class);
    for label in 0..num_classes {
        let (cr, cc) = centers[label];
        for _ in 0..per_class {
            let mut pixels = Vec::with_capacity(side * side);
            for r in 0..side {
                for c in 0..side {
                    let d2 = (r as f64 - cr).powi(2) + (c as f64 - cc).powi(2);
                    let blob = 0.85 * (-d2 / (2.0 * sigma * sigma)).exp();
                    let noise = rng.gen_range(0.0..0.25);
                    pixels.push((blob + noise).clamp(0.0, 1.0));
                }
            }
            data.push(LabeledImage {
                pixels,
                height: side,
                width: side,
                label,
            });
        }
    }
    Ok(data)
}

/// Seeded uniform subsample without replacement, preserving nothing about
/// input order. Used to carve desk-scale train/test sets out of MNIST.
pub fn subset(data: &[LabeledImage], n: usize, seed: u64) -> Result<Vec<LabeledImage>> {
    if n > data.len() {
        return Err(Error::invalid(format!(
            "subset of {n} from {} samples",
            data.len()
        )));
    }
    let mut idx: Vec<usize> = (0..data.len()).collect();
    let mut rng = rng::stream(seed, "data.subset", &[n as u64]);
    idx.shuffle(&mut rng);
    Ok(idx[..n].iter().map(|&i| data[i].clone()).collect())
}

/// Disjoint seeded partition into `n_clients` shards whose sizes differ by at
/// most one (round-robin deal over a shuffled index).
pub fn shard_iid(
    data: &[LabeledImage],
    n_clients: usize,
    seed: u64,
) -> Result<Vec<Vec<LabeledImage>>> {
    if n_clients == 0 {
        return Err(Error::invalid("n_clients must be positive"));
    }
    if data.len() < n_clients {
        return Err(Error::invalid(format!(
            "cannot shard {} samples across {n_clients} clients",
            data.len()
        )));
    }
    let mut idx: Vec<usize> = (0..data.len()).collect();
    let mut rng = rng::stream(seed, "data.shard_iid", &[n_clients as u64]);
    idx.shuffle(&mut rng);
    let mut shards = vec![Vec::with_capacity(data.len() / n_clients + 1); n_clients];
    for (k, &i) in idx.iter().enumerate() {
        shards[k % n_clients].push(data[i].clone());
    }
    Ok(shards)
}

/// Seeded sparse cell pattern keyed by owner id: 4 of the 16 coarse grid
/// cells lit (owner-seeded positions), everything else dark, plus per-pixel
/// jitter. Out of distribution for both MNIST digits and the synthetic
/// blobs, and nearly orthogonal across owners — different owners' patterns
/// share at most a couple of lit cells, so one attacker's signature
/// training barely moves a model's response to another's signature.
pub fn make_signature(
    owner: usize,
    side: usize,
    num_classes: usize,
    seed: u64,
) -> Result<SignatureImage> {
    if side < 4 || num_classes == 0 {
        return Err(Error::invalid("signature needs side >= 4 and num_classes >= 1"));
    }
    let mut rng = rng::stream(seed, "data.signature", &[owner as u64, side as u64]);
    let cells = 4;
    let cell_px = side.div_ceil(cells);
    let mut positions: Vec<usize> = (0..cells * cells).collect();
    positions.shuffle(&mut rng);
    let mut grid = vec![0.0; cells * cells];
    for &p in &positions[..4] {
        grid[p] = rng.gen_range(0.8..1.0);
    }
    let mut pixels = Vec::with_capacity(side * side);
    for r in 0..side {
        for c in 0..side {
            let base = grid[(r / cell_px).min(cells - 1) * cells + (c / cell_px).min(cells - 1)];
            let jitter: f64 = rng.gen_range(-0.1..0.1);
            pixels.push((base + jitter).clamp(0.0, 1.0));
        }
    }
    let pseudo_label = rng.gen_range(0..num_classes);
    Ok(SignatureImage {
        owner,
        pixels,
        height: side,
        width: side,
        pseudo_label,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::{cross_entropy_grad, init_mlp, predict_class, sgd_step};

    #[test]
    fn synthetic_counts_and_determinism() {
        let a = make_synthetic(4, 50, 8, 3).unwrap();
        assert_eq!(a.len(), 200);
        assert_eq!(a, make_synthetic(4, 50, 8, 3).unwrap());
        assert!(a.iter().all(|im| im.pixels.len() == 64));
        assert!(a
            .iter()
            .all(|im| im.pixels.iter().all(|&p| (0.0..=1.0).contains(&p))));
        assert!(make_synthetic(4, 50, 7, 3).is_err());
    }

    #[test]
    fn synthetic_is_learnable() {
        // The spec oracle: MLP reaches >= 95% train accuracy in 30 epochs.
        let data = make_synthetic(4, 50, 8, 3).unwrap();
        let mut m = init_mlp(64, 16, 4, 0).unwrap();
        let batch_size = 32;
        let mut order: Vec<usize> = (0..data.len()).collect();
        let mut rng = crate::rng::stream(1, "test.synthetic.train", &[]);
        for _epoch in 0..30 {
            use rand::seq::SliceRandom;
            order.shuffle(&mut rng);
            for chunk in order.chunks(batch_size) {
                let batch: Vec<(&[f64], usize)> = chunk
                    .iter()
                    .map(|&i| (data[i].pixels.as_slice(), data[i].label))
                    .collect();
                let (_, g) = cross_entropy_grad(&m, &batch).unwrap();
                m = sgd_step(&m, &g, 0.1).unwrap();
            }
        }
        let correct = data
            .iter()
            .filter(|im| predict_class(&m, &im.pixels).unwrap() == im.label)
            .count();
        let acc = correct as f64 / data.len() as f64;
        assert!(acc >= 0.95, "train accuracy {acc}");
    }

    #[test]
    fn sharding_is_balanced_partition() {
        let data = make_synthetic(4, 25, 8, 0).unwrap();
        let shards = shard_iid(&data, 40, 7).unwrap();
        assert_eq!(shards.len(), 40);
        let sizes: Vec<usize> = shards.iter().map(|s| s.len()).collect();
        assert!(sizes.iter().all(|&s| s == 2 || s == 3));
        assert_eq!(sizes.iter().sum::<usize>(), 100);

        // Union equals the input multiset.
        let mut all: Vec<&LabeledImage> = shards.iter().flatten().collect();
        let mut orig: Vec<&LabeledImage> = data.iter().collect();
        let key = |im: &&LabeledImage| {
            (
                im.label,
                im.pixels
                    .iter()
                    .map(|p| p.to_bits())
                    .collect::<Vec<u64>>(),
            )
        };
        all.sort_by_key(key);
        orig.sort_by_key(key);
        assert_eq!(all, orig);

        assert_eq!(shards, shard_iid(&data, 40, 7).unwrap());
        assert_ne!(shards, shard_iid(&data, 40, 8).unwrap());
        assert!(shard_iid(&data[..10], 11, 0).is_err());
    }

    #[test]
    fn subset_is_seeded_sample() {
        let data = make_synthetic(3, 20, 8, 1).unwrap();
        let s = subset(&data, 15, 4).unwrap();
        assert_eq!(s.len(), 15);
        assert_eq!(s, subset(&data, 15, 4).unwrap());
        assert!(subset(&data, 61, 4).is_err());
    }

    #[test]
    fn signatures_distinct_across_owners() {
        // 20 signatures, pairwise fraction of pixels differing by > 0.1
        // must be at least 10%.
        let sigs: Vec<SignatureImage> = (0..20)
            .map(|o| make_signature(o, 8, 10, 5).unwrap())
            .collect();
        for a in 0..sigs.len() {
            assert_eq!(sigs[a], make_signature(a, 8, 10, 5).unwrap());
            assert!(sigs[a].pseudo_label < 10);
            for b in (a + 1)..sigs.len() {
                let differing = sigs[a]
                    .pixels
                    .iter()
                    .zip(&sigs[b].pixels)
                    .filter(|(x, y)| (*x - *y).abs() > 0.1)
                    .count();
                let frac = differing as f64 / sigs[a].pixels.len() as f64;
                assert!(frac >= 0.1, "owners {a}/{b} differ in only {frac}");
            }
        }
    }
}
