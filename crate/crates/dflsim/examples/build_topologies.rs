//! Build each topology family and inspect its structure: degrees, hop
//! distances from node 0, and the Metropolis–Hastings mixing weights that
//! make D-PSGD average-preserving.

use dflsim::topology::{metropolis_weights, Topology, TopologySpec};

fn describe(name: &str, t: &Topology) {
    let degrees: Vec<usize> = (0..t.node_count()).map(|v| t.degree(v)).collect();
    let hops = t.hop_distances_from(0).unwrap();
    println!("{name}: {} nodes, {} edges", t.node_count(), t.edge_count());
    println!("  degrees       {degrees:?}");
    println!("  hops from 0   {hops:?}");

    let mixing = metropolis_weights(t);
    let row0: Vec<String> = mixing.row(0).iter().map(|w| format!("{w:.3}")).collect();
    let max_col_err = (0..t.node_count())
        .map(|j| {
            let col: f64 = (0..t.node_count()).map(|i| mixing.weight(i, j)).sum();
            (col - 1.0).abs()
        })
        .fold(0.0, f64::max);
    println!("  mixing row 0  [{}]", row0.join(", "));
    println!("  worst column-sum error: {max_col_err:.2e} (doubly stochastic)");
    println!("  content hash  {}", t.content_hash());
    println!();
}

fn main() {
    let specs = [
        ("ring(12)", TopologySpec::Ring { n: 12 }),
        ("grid(3x4)", TopologySpec::Grid { rows: 3, cols: 4 }),
        (
            "clique_ring(4,3)",
            TopologySpec::CliqueRing {
                num_cliques: 4,
                clique_size: 3,
            },
        ),
        (
            "random(12, degree 3)",
            TopologySpec::Random {
                n: 12,
                target_degree: 3,
                seed: 7,
            },
        ),
    ];
    for (name, spec) in specs {
        describe(name, &spec.build().unwrap());
    }
}
