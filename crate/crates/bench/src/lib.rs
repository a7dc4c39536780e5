//! Seeded workloads shared by the benchmarks.

use qnetcap::random::{self, BudgetKindChoice, NetworkParams};
use qnetcap::{werner_pair, BellNetwork, DensityMatrix, Network};

/// `count` random lossy networks with up to `nodes` nodes and `edges` edges.
pub fn lossy_networks(count: usize, nodes: usize, edges: usize, kind: BudgetKindChoice) -> Vec<Network> {
    let params = NetworkParams {
        max_nodes: nodes,
        max_edges: edges,
        budget: (0.0, 20.0),
        budget_kind: kind,
        ..NetworkParams::default()
    };
    let mut rng = random::rng(random::DEFAULT_SEED);
    (0..count)
        .map(|_| random::random_lossy_network(&mut rng, &params))
        .collect()
}

pub fn bell_networks(count: usize, nodes: usize, pairs: usize) -> Vec<BellNetwork> {
    let mut rng = random::rng(random::DEFAULT_SEED);
    (0..count)
        .map(|_| random::random_bell_network(&mut rng, nodes, pairs))
        .collect()
}

pub fn werner_chain(len: usize) -> Vec<DensityMatrix> {
    (0..len).map(|i| werner_pair(0.99 - 0.01 * i as f64).unwrap()).collect()
}
