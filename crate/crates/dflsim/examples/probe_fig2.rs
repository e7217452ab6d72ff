//! Temporary probe: train-variant grid over one cached sample set.

use dflsim::data::make_synthetic;
use dflsim::regressor::{
    constant_baseline_mae, evaluate_distance_model, generate_samples, split_by_run,
    train_distance_model, SampleGen,
};
use dflsim::sim::{Protocol, SimConfig};
use dflsim::topology::TopologySpec;

fn main() {
    let t0 = std::time::Instant::now();
    let train_pool = make_synthetic(4, 80 * 4, 16, 42).unwrap();
    let spec = TopologySpec::Ring { n: 16 };
    let sim = SimConfig {
        protocol: Protocol::Dpsgd,
        total_rounds: 101,
        detection_rounds: 100,
        local_steps: 6,
        lr: 0.15,
        batch_size: 16,
        async_activation_fraction: 1.0,
        eval_subset: 0,
        eval_every: 1,
        hidden_dim: 24,
    };
    let gen = SampleGen {
        topology: &spec,
        dataset: &train_pool,
        num_classes: 4,
        sim: &sim,
        distance_cap: 6,
    };
    let samples = generate_samples(&gen, 150, 2, 4242).unwrap();
    let (train, held) = split_by_run(&samples, 5);
    println!(
        "{} samples ({} train / {} held) gen in {:?}",
        samples.len(),
        train.len(),
        held.len(),
        t0.elapsed()
    );

    for (epochs, lr, hidden) in [(2000usize, 0.1f64, 16usize), (3000, 0.1, 16), (2000, 0.15, 12)] {
        let t1 = std::time::Instant::now();
        let report = train_distance_model(&train, "ring", 6, epochs, lr, hidden, 0).unwrap();
        let table = evaluate_distance_model(&report.model, &held).unwrap();
        let base = constant_baseline_mae(&train, &held);
        let buckets: Vec<String> = table
            .rows
            .iter()
            .map(|(d, n, mae)| format!("d{d}:{mae:.2}(n{n})"))
            .collect();
        println!(
            "epochs={epochs} lr={lr} hidden={hidden}: trainMSE={:.3} overall={:.3} base={base:.3} {} [{:?}]",
            report.epoch_mse.last().unwrap(),
            table.overall_mae(),
            buckets.join(" "),
            t1.elapsed()
        );
    }
}
