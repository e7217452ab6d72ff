//! Train the client MLP centrally on the synthetic dataset — the fastest way
//! to see the nn substrate converge before involving any topology.

use dflsim::data::make_synthetic;
use dflsim::nn::{cross_entropy_grad, init_mlp, predict_class, sgd_step};
use dflsim::rng;
use rand::seq::SliceRandom;

const SIDE: usize = 16;
const CLASSES: usize = 4;

fn accuracy(model: &dflsim::nn::ModelParams, data: &[dflsim::data::LabeledImage]) -> f64 {
    let hits = data
        .iter()
        .filter(|im| predict_class(model, &im.pixels).unwrap() == im.label)
        .count();
    hits as f64 / data.len() as f64
}

fn main() {
    let train = make_synthetic(CLASSES, 100, SIDE, 1).unwrap();
    let test = make_synthetic(CLASSES, 25, SIDE, 2).unwrap();
    let mut model = init_mlp(SIDE * SIDE, 32, CLASSES, 3).unwrap();

    let mut order: Vec<usize> = (0..train.len()).collect();
    let mut shuffler = rng::stream(4, "example.shuffle", &[]);

    for epoch in 0..10 {
        order.shuffle(&mut shuffler);
        let mut epoch_loss = 0.0;
        let mut batches = 0;
        for chunk in order.chunks(16) {
            let batch: Vec<(&[f64], usize)> = chunk
                .iter()
                .map(|&i| (train[i].pixels.as_slice(), train[i].label))
                .collect();
            let (loss, grad) = cross_entropy_grad(&model, &batch).unwrap();
            model = sgd_step(&model, &grad, 0.1).unwrap();
            epoch_loss += loss;
            batches += 1;
        }
        println!(
            "epoch {epoch:2}  loss {:.4}  train acc {:.3}  test acc {:.3}",
            epoch_loss / batches as f64,
            accuracy(&model, &train),
            accuracy(&model, &test),
        );
    }
}
