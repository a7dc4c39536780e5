//! Two-client rate bounds and aggregated repeater plans for quantum networks.
//!
//! Given a network of quantum channels with usage budgets, this crate
//! computes
//!
//! * an upper bound on entanglement or secret-key generation between Alice
//!   and Bob: the minimum A–B cut with squashed-entanglement edge weights
//!   (optionally with the finite-error correction),
//! * an achievable lower bound: the minimum A–B cut with two-way capacity
//!   weights, realized by routing Bell pairs along edge-disjoint paths and
//!   swapping at intermediate nodes,
//!
//! and checks the swapping error bookkeeping on small chains with an exact
//! density-matrix simulation.

pub mod aggregator;
pub mod capacity;
pub mod cuts_flows;
pub mod error;
pub mod netmodel;
pub mod qsim_oracle;
pub mod random;

pub use aggregator::{
    build_bell_network, lossy_gap_ratio, plan, plan_dot, plan_with, sandwich_report, BellNetwork,
    ErrorBudgetMode, ProtocolPlan, RateModel, Regime, SandwichReport,
};
pub use capacity::{
    binary_entropy, edge_weight, epsilon_corrected_upper, lossy_esq_upper, lossy_q_cap,
    CorrectedBound, EpsilonBudget, WeightKind,
};
pub use cuts_flows::{
    max_disjoint_paths, min_cut, min_cut_bruteforce, CutResult, FlowGraph, PathSet,
};
pub use error::{Error, Result};
pub use netmodel::{
    crossing_edges, export_dot, parse_network, Bipartition, BudgetKind, ChannelSpec, EdgeSpec,
    Network, NodeId, UsageBudget,
};
pub use qsim_oracle::{
    bell_state, swap_chain, trace_distance, verify_error_chain, werner_pair, ChainReport,
    DensityMatrix,
};
