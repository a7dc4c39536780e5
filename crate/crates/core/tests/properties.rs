use std::collections::BTreeSet;

use proptest::prelude::*;
use qnetcap::cuts_flows::FlowGraph;
use qnetcap::random::{self, BudgetKindChoice, NetworkParams};
use qnetcap::{
    build_bell_network, crossing_edges, edge_weight, epsilon_corrected_upper, min_cut,
    min_cut_bruteforce, parse_network, plan, sandwich_report, Bipartition, BudgetKind, EdgeSpec,
    Network, NodeId, RateModel, Regime, UsageBudget, WeightKind,
};

fn data(name: &str) -> String {
    let path = format!("{}/../../data/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"))
}

fn params(kind: BudgetKindChoice) -> NetworkParams {
    NetworkParams {
        budget_kind: kind,
        ..NetworkParams::default()
    }
}

fn all_sides(net: &Network) -> Vec<BTreeSet<NodeId>> {
    let free: Vec<&NodeId> = net
        .nodes()
        .iter()
        .filter(|n| *n != net.alice() && *n != net.bob())
        .collect();
    (0u32..1 << free.len())
        .map(|mask| {
            let mut s: BTreeSet<NodeId> = free
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, n)| (*n).clone())
                .collect();
            s.insert(net.alice().clone());
            s
        })
        .collect()
}

#[test]
fn sample_network_round_trips() {
    let net = parse_network(&data("sample6.json")).unwrap();
    assert_eq!(net.nodes().len(), 6);
    let again = parse_network(&net.to_json()).unwrap();
    assert_eq!(again, net);
}

#[test]
fn crossing_edges_partition_and_direction_blindness() {
    let mut rng = random::rng(101);
    for _ in 0..50 {
        let net = random::random_lossy_network(&mut rng, &params(BudgetKindChoice::Frequency));
        for side in all_sides(&net) {
            let part = Bipartition::new(&net, side.clone()).unwrap();
            let crossing: BTreeSet<&str> =
                crossing_edges(&net, &part).iter().map(|e| e.id.as_str()).collect();
            let inner: BTreeSet<&str> = net
                .edges()
                .iter()
                .filter(|e| !e.crosses(&side))
                .map(|e| e.id.as_str())
                .collect();
            assert!(crossing.is_disjoint(&inner));
            assert_eq!(crossing.len() + inner.len(), net.edges().len());

            let other = part.complement(&net);
            let flipped: BTreeSet<&str> = net
                .edges()
                .iter()
                .filter(|e| e.crosses(&other))
                .map(|e| e.id.as_str())
                .collect();
            assert_eq!(crossing, flipped);
        }
    }
}

#[test]
fn flow_min_cut_matches_bruteforce() {
    let mut rng = random::rng(202);
    for i in 0..250 {
        let net = random::random_lossy_network(&mut rng, &params(BudgetKindChoice::Frequency));
        for kind in [WeightKind::QCap, WeightKind::EsqUpper] {
            let fast = min_cut(&net, kind, BudgetKind::Frequency).unwrap();
            let slow = min_cut_bruteforce(&net, kind).unwrap();
            let scale = slow.value.max(1.0);
            assert!(
                (fast.value - slow.value).abs() <= 1e-9 * scale,
                "network {i} {kind:?}: flow {} vs brute force {}",
                fast.value,
                slow.value
            );
            // the witness must reproduce its own value
            let part = Bipartition::new(&net, fast.v_a.v_a.clone()).unwrap();
            let recomputed: f64 = crossing_edges(&net, &part)
                .iter()
                .map(|e| e.usage.value() * edge_weight(e, kind))
                .sum();
            assert!((recomputed - fast.value).abs() <= 1e-12 * scale);
        }
    }
}

#[test]
fn max_flow_equals_min_cut() {
    let mut rng = random::rng(303);
    for _ in 0..200 {
        let net = random::random_lossy_network(&mut rng, &params(BudgetKindChoice::Frequency));
        let g = FlowGraph::from_network(&net, |e| e.usage.value() * edge_weight(e, WeightKind::QCap))
            .unwrap();
        let flow = g.max_flow();
        let cut = g.min_cut();
        assert!((flow.value - cut.value).abs() <= 1e-9 * cut.value.max(1.0));

        let bell = random::random_bell_network(&mut rng, 10, 30);
        let g = bell.flow_graph();
        assert_eq!(g.max_flow().value as f64, g.min_cut().value);
    }
}

#[test]
fn menger_equality_and_path_validity() {
    let mut rng = random::rng(404);
    for i in 0..250 {
        let bell = random::random_bell_network(&mut rng, 10, 30);
        let (count, paths) = qnetcap::max_disjoint_paths(&bell);
        let oracle = bell.flow_graph().min_cut_bruteforce().unwrap();
        assert_eq!(count as f64, oracle.value, "graph {i}");
        assert_eq!(paths.len(), count);
        paths.validate(&bell.alice, &bell.bob).unwrap();
        // each path step follows a real Bell pair between the listed nodes
        let ends: std::collections::BTreeMap<&str, (&NodeId, &NodeId)> = bell
            .bell_edges
            .iter()
            .map(|b| (b.id.as_str(), (&b.ends.0, &b.ends.1)))
            .collect();
        for p in &paths.paths {
            for (k, e) in p.edges.iter().enumerate() {
                let (u, v) = ends[e.as_str()];
                let (x, y) = (&p.nodes[k], &p.nodes[k + 1]);
                assert!((u == x && v == y) || (u == y && v == x));
            }
        }
    }
}

#[test]
fn adding_an_edge_never_lowers_the_cut() {
    let mut rng = random::rng(505);
    use rand::Rng;
    for _ in 0..200 {
        let net = random::random_lossy_network(&mut rng, &params(BudgetKindChoice::Frequency));
        let before = min_cut(&net, WeightKind::QCap, BudgetKind::Frequency).unwrap().value;
        let n = net.nodes().len();
        let u = rng.random_range(0..n);
        let v = (u + rng.random_range(1..n)) % n;
        let mut edges = net.edges().to_vec();
        edges.push(EdgeSpec::lossy(
            "extra",
            net.nodes()[u].clone(),
            net.nodes()[v].clone(),
            rng.random_range(0.05..0.95),
            UsageBudget::Frequency(rng.random_range(0.01..1.0)),
        ));
        let grown = Network::new(net.nodes().to_vec(), net.alice().clone(), net.bob().clone(), edges)
            .unwrap();
        let after = min_cut(&grown, WeightKind::QCap, BudgetKind::Frequency).unwrap().value;
        assert!(after >= before - 1e-9);
    }
}

#[test]
fn sandwich_and_factor_two_on_random_lossy_networks() {
    let mut rng = random::rng(606);
    for _ in 0..250 {
        let net = random::random_lossy_network(&mut rng, &params(BudgetKindChoice::Frequency));
        let r = sandwich_report(&net, Regime::PerChannelUse, 0.0).unwrap();
        assert!(r.lower <= r.upper_esq + 1e-9);
        assert!(r.upper_esq <= 2.0 * r.lower + 1e-9);
    }
}

#[test]
fn scaling_and_regime_covariance() {
    let mut rng = random::rng(707);
    for _ in 0..100 {
        let net = random::random_lossy_network(&mut rng, &params(BudgetKindChoice::Frequency));
        let base = sandwich_report(&net, Regime::PerChannelUse, 0.0).unwrap();
        for c in [0.5, 2.0, 8.0] {
            let scaled = net.with_scaled_budgets(c).unwrap();
            let r = sandwich_report(&scaled, Regime::PerChannelUse, 0.0).unwrap();
            // powers of two scale exactly; 0.5, 2, 8 keep the witness fixed
            assert_eq!(r.lower, c * base.lower);
            assert_eq!(r.upper_esq, c * base.upper_esq);
            assert_eq!(r.lower_cut.v_a, base.lower_cut.v_a);

            let timed = scaled
                .map_edges(|e| EdgeSpec {
                    usage: UsageBudget::Rate(e.usage.value()),
                    ..e.clone()
                })
                .unwrap();
            let t = sandwich_report(&timed, Regime::PerTime, 0.0).unwrap();
            assert_eq!(t.lower, r.lower);
            assert_eq!(t.upper_esq, r.upper_esq);
        }
        // non-power-of-two factors agree to rounding
        let r = sandwich_report(&net.with_scaled_budgets(3.7).unwrap(), Regime::PerChannelUse, 0.0)
            .unwrap();
        assert!((r.lower - 3.7 * base.lower).abs() <= 1e-9 * r.lower.max(1.0));
    }
}

#[test]
fn plans_match_bell_graph_cut_and_conserve_pairs() {
    let mut rng = random::rng(808);
    let p = NetworkParams {
        budget: (0.0, 12.0),
        ..params(BudgetKindChoice::Count)
    };
    for _ in 0..150 {
        let net = random::random_lossy_network(&mut rng, &p);
        let rates = RateModel::AsymptoticQCap;
        let bell = build_bell_network(&net, &rates).unwrap();
        let plan = plan(&net, 1e-3, &rates).unwrap();
        let oracle = bell.flow_graph().min_cut_bruteforce().unwrap();
        assert_eq!(plan.m as f64, oracle.value);
        assert_eq!(plan.witness.value, oracle.value);
        for (k, &n) in &plan.pair_counts {
            assert_eq!(plan.consumed_pairs[k] + plan.unused_pairs[k], n);
        }
        for (path, sched) in plan.paths.paths.iter().zip(&plan.swap_schedules) {
            assert_eq!(sched.len() + 2, path.nodes.len());
            assert_eq!(sched[..], path.nodes[1..path.nodes.len() - 1]);
        }
    }
}

#[test]
fn generated_networks_are_deterministic_per_seed() {
    let a: Vec<Network> = {
        let mut r = random::rng(9);
        (0..5).map(|_| random::random_lossy_network(&mut r, &NetworkParams::default())).collect()
    };
    let b: Vec<Network> = {
        let mut r = random::rng(9);
        (0..5).map(|_| random::random_lossy_network(&mut r, &NetworkParams::default())).collect()
    };
    assert_eq!(a, b);
}

fn arb_network() -> impl Strategy<Value = Network> {
    (any::<u64>(), 0usize..3).prop_map(|(seed, kind)| {
        let kind = [BudgetKindChoice::Count, BudgetKindChoice::Frequency, BudgetKindChoice::Rate][kind];
        random::random_lossy_network(&mut random::rng(seed), &params(kind))
    })
}

proptest! {
    #[test]
    fn parse_serialize_identity(net in arb_network()) {
        prop_assert_eq!(parse_network(&net.to_json()).unwrap(), net);
    }

    #[test]
    fn correction_never_tightens(cut in 0.0f64..1e3, eps in 0.0f64..(1.0 / 256.0)) {
        let v = epsilon_corrected_upper(cut, eps).unwrap();
        prop_assert!(v.value().unwrap() >= cut);
    }

    #[test]
    fn vacuous_exactly_from_threshold(eps in 0.0f64..1.0) {
        let v = epsilon_corrected_upper(1.0, eps).unwrap();
        prop_assert_eq!(v.is_vacuous(), eps >= 1.0 / 256.0);
    }
}
