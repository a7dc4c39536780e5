//! Seeded random instance generators for property tests, benchmarks and the
//! `generate` subcommand.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::aggregator::BellNetwork;
use crate::netmodel::{EdgeSpec, Network, NodeId, UsageBudget};

/// Seed used when none is given.
pub const DEFAULT_SEED: u64 = 0x5EED_2017;

/// Environment variable that overrides [`DEFAULT_SEED`].
pub const SEED_ENV: &str = "QNETCAP_SEED";

/// `QNETCAP_SEED` if set and parseable, else [`DEFAULT_SEED`].
pub fn seed_from_env() -> u64 {
    std::env::var(SEED_ENV)
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_SEED)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Shape of generated networks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetworkParams {
    pub max_nodes: usize,
    pub max_edges: usize,
    pub eta: (f64, f64),
    pub budget: (f64, f64),
    pub budget_kind: BudgetKindChoice,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BudgetKindChoice {
    Count,
    Frequency,
    Rate,
}

impl Default for NetworkParams {
    fn default() -> Self {
        NetworkParams {
            max_nodes: 10,
            max_edges: 25,
            eta: (0.05, 0.95),
            budget: (0.0, 1.0),
            budget_kind: BudgetKindChoice::Frequency,
        }
    }
}

fn node_labels(n: usize) -> Vec<NodeId> {
    let mut v = vec![NodeId::from("A"), NodeId::from("B")];
    v.extend((1..n - 1).map(|i| NodeId::new(format!("C{i}"))));
    v
}

/// Random all-lossy network: 2..=max_nodes nodes, 1..=max_edges edges with
/// random distinct endpoints and orientation, eta and budget uniform in the
/// given ranges.
pub fn random_lossy_network<R: Rng>(rng: &mut R, params: &NetworkParams) -> Network {
    let n = rng.random_range(2..=params.max_nodes.max(2));
    let nodes = node_labels(n);
    let m = rng.random_range(1..=params.max_edges.max(1));
    let edges = (0..m)
        .map(|i| {
            let u = rng.random_range(0..n);
            let mut v = rng.random_range(0..n - 1);
            if v >= u {
                v += 1;
            }
            let eta = rng.random_range(params.eta.0..=params.eta.1);
            let b = rng.random_range(params.budget.0..=params.budget.1);
            let usage = match params.budget_kind {
                BudgetKindChoice::Count => UsageBudget::Count(b),
                BudgetKindChoice::Frequency => UsageBudget::Frequency(b),
                BudgetKindChoice::Rate => UsageBudget::Rate(b),
            };
            EdgeSpec::lossy(format!("e{i}"), nodes[u].clone(), nodes[v].clone(), eta, usage)
        })
        .collect();
    Network::new(nodes.clone(), nodes[0].clone(), nodes[1].clone(), edges)
        .expect("generator produces valid networks")
}

/// Random Bell multigraph with 2..=max_nodes vertices and 0..=max_pairs pairs
/// spread over random vertex pairs.
pub fn random_bell_network<R: Rng>(rng: &mut R, max_nodes: usize, max_pairs: usize) -> BellNetwork {
    let n = rng.random_range(2..=max_nodes.max(2));
    let nodes = node_labels(n);
    let total = rng.random_range(0..=max_pairs);
    let mut counts: Vec<(String, NodeId, NodeId, u64)> = Vec::new();
    let mut left = total;
    let mut i = 0;
    while left > 0 {
        let k = rng.random_range(1..=left.min(4)) as u64;
        let u = rng.random_range(0..n);
        let mut v = rng.random_range(0..n - 1);
        if v >= u {
            v += 1;
        }
        counts.push((format!("e{i}"), nodes[u].clone(), nodes[v].clone(), k));
        left -= k as usize;
        i += 1;
    }
    BellNetwork::from_counts(nodes.clone(), nodes[0].clone(), nodes[1].clone(), counts)
}
