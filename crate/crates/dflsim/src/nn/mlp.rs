//! One-hidden-layer ReLU classifier with softmax output and analytic
//! cross-entropy gradients.
//!
//! Layout: `[(input, hidden), (1, hidden), (hidden, classes), (1, classes)]`
//! — W1, b1, W2, b2 — with weight blocks row-major (`w1[i*hidden + j]` maps
//! input `i` to hidden unit `j`).

use rand::Rng;

use crate::error::{Error, Result};
use crate::rng;

use super::{softmax, Arch, GradientVector, ModelParams};

/// Seeded init: weights uniform in `±1/sqrt(fan_in)`, biases zero.
pub fn init_mlp(
    input_dim: usize,
    hidden_dim: usize,
    num_classes: usize,
    seed: u64,
) -> Result<ModelParams> {
    if input_dim == 0 || hidden_dim == 0 || num_classes == 0 {
        return Err(Error::invalid("mlp dims must be positive"));
    }
    let shapes = vec![
        (input_dim, hidden_dim),
        (1, hidden_dim),
        (hidden_dim, num_classes),
        (1, num_classes),
    ];
    let mut rng = rng::stream(seed, "nn.init_mlp", &[
        input_dim as u64,
        hidden_dim as u64,
        num_classes as u64,
    ]);
    let mut values = Vec::with_capacity(shapes.iter().map(|&(a, b)| a * b).sum());
    let s1 = 1.0 / (input_dim as f64).sqrt();
    for _ in 0..input_dim * hidden_dim {
        values.push(rng.gen_range(-s1..s1));
    }
    values.extend(std::iter::repeat(0.0).take(hidden_dim));
    let s2 = 1.0 / (hidden_dim as f64).sqrt();
    for _ in 0..hidden_dim * num_classes {
        values.push(rng.gen_range(-s2..s2));
    }
    values.extend(std::iter::repeat(0.0).take(num_classes));
    ModelParams::new(Arch::MlpClassifier, shapes, values)
}

struct MlpView<'a> {
    input: usize,
    hidden: usize,
    classes: usize,
    w1: &'a [f64],
    b1: &'a [f64],
    w2: &'a [f64],
    b2: &'a [f64],
}

fn view(m: &ModelParams) -> Result<MlpView<'_>> {
    if m.arch() != Arch::MlpClassifier || m.shapes().len() != 4 {
        return Err(Error::invalid("params are not an mlp_classifier"));
    }
    let (input, hidden) = m.shapes()[0];
    let (_, classes) = m.shapes()[2];
    Ok(MlpView {
        input,
        hidden,
        classes,
        w1: m.block(0),
        b1: m.block(1),
        w2: m.block(2),
        b2: m.block(3),
    })
}

fn forward_parts(v: &MlpView<'_>, image: &[f64]) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let mut pre_h = v.b1.to_vec();
    for (i, &x) in image.iter().enumerate() {
        if x != 0.0 {
            let row = &v.w1[i * v.hidden..(i + 1) * v.hidden];
            for (j, &w) in row.iter().enumerate() {
                pre_h[j] += w * x;
            }
        }
    }
    let h: Vec<f64> = pre_h.iter().map(|&z| z.max(0.0)).collect();
    let mut logits = v.b2.to_vec();
    for (j, &hj) in h.iter().enumerate() {
        if hj != 0.0 {
            let row = &v.w2[j * v.classes..(j + 1) * v.classes];
            for (c, &w) in row.iter().enumerate() {
                logits[c] += w * hj;
            }
        }
    }
    let probs = softmax(&logits);
    (pre_h, h, probs)
}

/// Class probabilities for one image.
pub fn forward_classify(m: &ModelParams, image: &[f64]) -> Result<Vec<f64>> {
    let v = view(m)?;
    if image.len() != v.input {
        return Err(Error::invalid(format!(
            "image length {} does not match input dim {}",
            image.len(),
            v.input
        )));
    }
    Ok(forward_parts(&v, image).2)
}

/// Argmax class (lowest id wins ties).
pub fn predict_class(m: &ModelParams, image: &[f64]) -> Result<usize> {
    let probs = forward_classify(m, image)?;
    Ok(probs
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .map(|(i, _)| i)
        .unwrap())
}

/// Mean cross-entropy over the batch plus its analytic gradient.
pub fn cross_entropy_grad(
    m: &ModelParams,
    batch: &[(&[f64], usize)],
) -> Result<(f64, GradientVector)> {
    if batch.is_empty() {
        return Err(Error::invalid("cross_entropy_grad: empty batch"));
    }
    let v = view(m)?;
    let mut grad = GradientVector::zeros_like(m);
    let (w1_len, b1_len, w2_len) = (v.w1.len(), v.b1.len(), v.w2.len());
    let mut loss = 0.0;
    let inv_b = 1.0 / batch.len() as f64;

    for &(image, label) in batch {
        if image.len() != v.input {
            return Err(Error::invalid(format!(
                "image length {} does not match input dim {}",
                image.len(),
                v.input
            )));
        }
        if label >= v.classes {
            return Err(Error::invalid(format!(
                "label {label} out of range 0..{}",
                v.classes
            )));
        }
        let (pre_h, h, probs) = forward_parts(&v, image);
        loss -= probs[label].max(1e-300).ln() * inv_b;

        // dL/dlogits = (p - onehot) / B
        let dlogits: Vec<f64> = probs
            .iter()
            .enumerate()
            .map(|(c, &p)| (p - if c == label { 1.0 } else { 0.0 }) * inv_b)
            .collect();

        let g = grad.values_mut();
        // W2, b2
        for (j, &hj) in h.iter().enumerate() {
            if hj != 0.0 {
                let row = &mut g[w1_len + b1_len + j * v.classes..];
                for (c, &dl) in dlogits.iter().enumerate() {
                    row[c] += hj * dl;
                }
            }
        }
        for (c, &dl) in dlogits.iter().enumerate() {
            g[w1_len + b1_len + w2_len + c] += dl;
        }
        // Backprop through ReLU.
        let mut dpre = vec![0.0; v.hidden];
        for (j, dp) in dpre.iter_mut().enumerate() {
            if pre_h[j] > 0.0 {
                let row = &v.w2[j * v.classes..(j + 1) * v.classes];
                *dp = row.iter().zip(&dlogits).map(|(w, dl)| w * dl).sum();
            }
        }
        // W1, b1
        for (i, &x) in image.iter().enumerate() {
            if x != 0.0 {
                let row = &mut g[i * v.hidden..(i + 1) * v.hidden];
                for (j, &dp) in dpre.iter().enumerate() {
                    row[j] += x * dp;
                }
            }
        }
        for (j, &dp) in dpre.iter().enumerate() {
            g[w1_len + j] += dp;
        }
    }
    Ok((loss, grad))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::sgd_step;
    use crate::nn::testutil::{finite_difference_grad, grad_relative_error};
    use rand::Rng;

    #[test]
    fn init_shape_arithmetic() {
        let m = init_mlp(784, 32, 10, 0).unwrap();
        assert_eq!(m.len(), 784 * 32 + 32 + 32 * 10 + 10);
        assert_eq!(m.len(), 25450);
    }

    #[test]
    fn init_is_deterministic_with_zero_biases() {
        let a = init_mlp(10, 5, 3, 42).unwrap();
        let b = init_mlp(10, 5, 3, 42).unwrap();
        assert_eq!(a, b);
        assert!(a.block(1).iter().all(|&v| v == 0.0));
        assert!(a.block(3).iter().all(|&v| v == 0.0));
        let c = init_mlp(10, 5, 3, 43).unwrap();
        assert_ne!(a.values(), c.values());
    }

    #[test]
    fn zero_weights_give_uniform_probabilities() {
        let shapes = vec![(6, 4), (1, 4), (4, 3), (1, 3)];
        let m = ModelParams::new(Arch::MlpClassifier, shapes, vec![0.0; 6 * 4 + 4 + 4 * 3 + 3])
            .unwrap();
        let p = forward_classify(&m, &[0.3; 6]).unwrap();
        for &pi in &p {
            assert!((pi - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn probabilities_normalized_and_in_range() {
        let m = init_mlp(8, 5, 4, 3).unwrap();
        let mut rng = crate::rng::stream(5, "test.mlp", &[]);
        for _ in 0..20 {
            let img: Vec<f64> = (0..8).map(|_| rng.gen::<f64>()).collect();
            let p = forward_classify(&m, &img).unwrap();
            let sum: f64 = p.iter().sum();
            assert!((sum - 1.0).abs() < 1e-12);
            assert!(p.iter().all(|&pi| pi > 0.0 && pi < 1.0));
        }
    }

    #[test]
    fn forward_rejects_bad_length() {
        let m = init_mlp(8, 5, 4, 3).unwrap();
        assert!(matches!(
            forward_classify(&m, &[0.0; 7]),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn uniform_predictor_loss_is_ln_classes() {
        let shapes = vec![(6, 4), (1, 4), (4, 3), (1, 3)];
        let m = ModelParams::new(Arch::MlpClassifier, shapes, vec![0.0; 6 * 4 + 4 + 4 * 3 + 3])
            .unwrap();
        let img = [0.5; 6];
        let batch: Vec<(&[f64], usize)> = vec![(&img, 0), (&img, 2)];
        let (loss, _) = cross_entropy_grad(&m, &batch).unwrap();
        assert!((loss - 3.0f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn duplicated_batch_leaves_loss_and_grad_unchanged() {
        let m = init_mlp(6, 4, 3, 7).unwrap();
        let imgs: Vec<Vec<f64>> = (0..3)
            .map(|k| (0..6).map(|i| ((i + k) as f64 * 0.13).sin().abs()).collect())
            .collect();
        let batch: Vec<(&[f64], usize)> =
            imgs.iter().enumerate().map(|(k, im)| (im.as_slice(), k % 3)).collect();
        let doubled: Vec<(&[f64], usize)> =
            batch.iter().chain(batch.iter()).copied().collect();
        let (l1, g1) = cross_entropy_grad(&m, &batch).unwrap();
        let (l2, g2) = cross_entropy_grad(&m, &doubled).unwrap();
        assert!((l1 - l2).abs() < 1e-12);
        for (a, b) in g1.values().iter().zip(g2.values()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn empty_batch_rejected() {
        let m = init_mlp(6, 4, 3, 7).unwrap();
        assert!(matches!(
            cross_entropy_grad(&m, &[]),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn gradient_matches_finite_differences() {
        // The spec instance: 5-sample batch, dims (6, 4, 3), rel err < 1e-4.
        let m = init_mlp(6, 4, 3, 11).unwrap();
        let mut rng = crate::rng::stream(12, "test.mlp.fd", &[]);
        let imgs: Vec<Vec<f64>> = (0..5)
            .map(|_| (0..6).map(|_| rng.gen::<f64>()).collect())
            .collect();
        let labels: Vec<usize> = (0..5).map(|_| rng.gen_range(0..3)).collect();
        let batch: Vec<(&[f64], usize)> = imgs
            .iter()
            .zip(&labels)
            .map(|(im, &l)| (im.as_slice(), l))
            .collect();
        let (_, analytic) = cross_entropy_grad(&m, &batch).unwrap();
        let fd = finite_difference_grad(&m, 1e-5, |p| {
            cross_entropy_grad(p, &batch).unwrap().0
        });
        let err = grad_relative_error(analytic.values(), &fd);
        assert!(err < 1e-4, "relative error {err}");
    }

    #[test]
    fn learns_linearly_separable_toy_set() {
        // 20 points, 2 classes, 100% train accuracy within 500 steps at lr 0.1.
        let mut rng = crate::rng::stream(3, "test.mlp.toy", &[]);
        let data: Vec<(Vec<f64>, usize)> = (0..20)
            .map(|k| {
                let label = k % 2;
                let center = if label == 0 { 0.25 } else { 0.75 };
                let v: Vec<f64> = (0..4)
                    .map(|_| center + 0.1 * (rng.gen::<f64>() - 0.5))
                    .collect();
                (v, label)
            })
            .collect();
        let mut m = init_mlp(4, 8, 2, 0).unwrap();
        let batch: Vec<(&[f64], usize)> =
            data.iter().map(|(v, l)| (v.as_slice(), *l)).collect();
        let mut solved = false;
        for _ in 0..500 {
            let (_, g) = cross_entropy_grad(&m, &batch).unwrap();
            m = sgd_step(&m, &g, 0.1).unwrap();
            let correct = data
                .iter()
                .filter(|(v, l)| predict_class(&m, v).unwrap() == *l)
                .count();
            if correct == data.len() {
                solved = true;
                break;
            }
        }
        assert!(solved, "did not reach 100% train accuracy in 500 steps");
    }
}
