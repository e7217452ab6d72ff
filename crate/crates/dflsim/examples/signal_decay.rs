//! The topology-detection signal: during the detection phase a lone attacker
//! trains on its signature image and watches how well each other client
//! classifies it. The poison accuracy observed at a client decays with hop
//! distance from the attacker — the raw material for distance regression.

use dflsim::attack::{AttackPlan, AttackStrategy, AttackerSet, DistanceSource};
use dflsim::data::{make_synthetic, shard_iid, TriggerSpec};
use dflsim::defense::DefenseSpec;
use dflsim::sim::{Protocol, SimConfig, SimEngine};
use dflsim::stats::spearman;
use dflsim::topology::TopologySpec;

const SIDE: usize = 16;
const CLASSES: usize = 4;
const DETECTION_ROUNDS: usize = 50;

fn main() {
    let topology = TopologySpec::Ring { n: 16 }.build().unwrap();
    let train = make_synthetic(CLASSES, 80, SIDE, 5).unwrap();
    let test = make_synthetic(CLASSES, 10, SIDE, 6).unwrap();
    let shards = shard_iid(&train, 16, 7).unwrap();

    let attackers = AttackerSet::build(&[0], 0.25, 0, SIDE, CLASSES, 8).unwrap();
    let plan = AttackPlan {
        strategy: AttackStrategy::ClusterDba,
        trigger: TriggerSpec::blocks(4, 2, 2, (0, 0), 0, 1.0, (SIDE, SIDE)).unwrap(),
        attackers,
        num_clusters: 1,
        distance_source: DistanceSource::Oracle,
        distance_error: 0.0,
    };
    let sim = SimConfig {
        protocol: Protocol::Dpsgd,
        total_rounds: DETECTION_ROUNDS + 1,
        detection_rounds: DETECTION_ROUNDS,
        local_steps: 6,
        lr: 0.15,
        batch_size: 16,
        async_activation_fraction: 1.0,
        eval_subset: 0,
        eval_every: 1,
        hidden_dim: 24,
    };

    let mut engine = SimEngine::new(
        topology.clone(),
        shards,
        test,
        plan,
        DefenseSpec::None,
        sim,
        CLASSES,
        0,
    )
    .unwrap();
    engine.run_detection().unwrap();

    // Mean signature accuracy per observer, laid against hop distance.
    let mut hops = Vec::new();
    let mut means = Vec::new();
    println!("observer  hops  mean poison acc over {DETECTION_ROUNDS} rounds");
    for observer in 1..16 {
        let hop = topology.hop_distance(0, observer).unwrap();
        let mean = engine.signals().mean(0, observer).unwrap();
        println!("{observer:8}  {hop:4}  {mean:.4}");
        hops.push(hop as f64);
        means.push(mean);
    }
    println!(
        "\nSpearman(hop, mean poison acc) = {:+.3}",
        spearman(&hops, &means)
    );
}
