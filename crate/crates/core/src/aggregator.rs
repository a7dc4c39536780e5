//! Aggregated repeater planning and bound reports.
//!
//! Each edge `e` with count budget `l` and distribution rate `R` yields
//! `floor(floor(l)·R)` Bell pairs between its endpoints. The pairs form an
//! undirected multigraph; edge-disjoint A–B paths in it are turned into
//! end-to-end pairs by entanglement swapping at every intermediate node.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::capacity::{edge_weight, epsilon_corrected_upper, CorrectedBound, EpsilonBudget, WeightKind};
use crate::cuts_flows::{CutResult, FlowGraph, PathSet};
use crate::error::{Error, Result};
use crate::netmodel::{
    export_dot, Annotations, BudgetKind, EdgeSpec, Network, NodeId, UsageBudget,
};

/// Per-edge entanglement distribution rate `R^e` (ebits per channel use).
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "type")]
pub enum RateModel {
    /// `R^e` equals the edge's two-way capacity.
    #[default]
    AsymptoticQCap,
    /// `R^e = alpha · Q(e)`, `alpha` in `(0, 1]`.
    FixedFraction { alpha: f64 },
    /// Explicit rate per edge id.
    PerEdgeTable { rates: BTreeMap<String, f64> },
}

impl RateModel {
    pub fn rate(&self, edge: &EdgeSpec) -> Result<f64> {
        let r = match self {
            RateModel::AsymptoticQCap => edge_weight(edge, WeightKind::QCap),
            RateModel::FixedFraction { alpha } => {
                if !(*alpha > 0.0 && *alpha <= 1.0) {
                    return Err(Error::Domain(format!("alpha must be in (0, 1] (got {alpha})")));
                }
                alpha * edge_weight(edge, WeightKind::QCap)
            }
            RateModel::PerEdgeTable { rates } => *rates
                .get(&edge.id)
                .ok_or_else(|| Error::UnresolvedRate(edge.id.clone()))?,
        };
        if !r.is_finite() || r < 0.0 {
            return Err(Error::Domain(format!(
                "rate for edge `{}` must be finite and >= 0 (got {r})",
                edge.id
            )));
        }
        Ok(r)
    }
}

/// One Bell pair, inheriting the endpoints of its parent channel edge.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BellEdge {
    pub id: String,
    pub ends: (NodeId, NodeId),
    pub parent: String,
}

/// Undirected multigraph of Bell pairs distributed over a network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BellNetwork {
    pub vertices: Vec<NodeId>,
    pub alice: NodeId,
    pub bob: NodeId,
    pub bell_edges: Vec<BellEdge>,
    /// Pair count per parent edge id.
    pub pair_counts: BTreeMap<String, u64>,
}

fn bell_id(parent: &str, k: u64) -> String {
    format!("{parent}#{k}")
}

impl BellNetwork {
    /// Builds a Bell network directly from per-edge pair counts, given as
    /// `(parent id, u, v, count)`.
    pub fn from_counts(
        vertices: Vec<NodeId>,
        alice: NodeId,
        bob: NodeId,
        counts: impl IntoIterator<Item = (String, NodeId, NodeId, u64)>,
    ) -> BellNetwork {
        let mut bell_edges = Vec::new();
        let mut pair_counts = BTreeMap::new();
        for (parent, u, v, count) in counts {
            for k in 0..count {
                bell_edges.push(BellEdge {
                    id: bell_id(&parent, k),
                    ends: (u.clone(), v.clone()),
                    parent: parent.clone(),
                });
            }
            pair_counts.insert(parent, count);
        }
        BellNetwork {
            vertices,
            alice,
            bob,
            bell_edges,
            pair_counts,
        }
    }

    /// Unit-capacity flow graph, one arc per pair.
    pub fn flow_graph(&self) -> FlowGraph<u64> {
        FlowGraph::new(
            self.vertices.iter().cloned(),
            &self.alice,
            &self.bob,
            self.bell_edges
                .iter()
                .map(|b| (b.id.clone(), b.ends.0.clone(), b.ends.1.clone(), 1u64)),
        )
        .expect("Bell network vertices are validated by its parent network")
    }

    pub fn total_pairs(&self) -> u64 {
        self.pair_counts.values().sum()
    }
}

/// Per edge, creates `floor(floor(l)·R)` Bell pairs. Requires count budgets.
pub fn build_bell_network(net: &Network, rate_model: &RateModel) -> Result<BellNetwork> {
    net.require_budget(BudgetKind::Count)?;
    let mut counts = Vec::with_capacity(net.edges().len());
    for e in net.edges() {
        let uses = e.usage.value().floor();
        let rate = rate_model.rate(e)?;
        let pairs = (uses * rate).floor();
        if pairs > u32::MAX as f64 {
            return Err(Error::SizeLimit(format!(
                "edge `{}` would carry {pairs} Bell pairs",
                e.id
            )));
        }
        counts.push((e.id.clone(), e.tail.clone(), e.head.clone(), pairs as u64));
    }
    Ok(BellNetwork::from_counts(
        net.nodes().to_vec(),
        net.alice().clone(),
        net.bob().clone(),
        counts,
    ))
}

/// Which edges count toward the `|E|·ε` error budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorBudgetMode {
    /// Only edges that generate at least one Bell pair.
    #[default]
    GeneratingEdges,
    /// Every edge of the network.
    AllEdges,
}

/// Executable aggregated-repeater plan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolPlan {
    /// Number of end-to-end pairs (one per path).
    pub m: usize,
    pub epsilon: f64,
    pub paths: PathSet,
    /// Per path, the intermediate nodes that perform swaps, alice-side first.
    pub swap_schedules: Vec<Vec<NodeId>>,
    pub error_budget: f64,
    pub error_budget_edges: usize,
    pub pair_counts: BTreeMap<String, u64>,
    pub consumed_pairs: BTreeMap<String, u64>,
    pub unused_pairs: BTreeMap<String, u64>,
    /// Minimum cut of the Bell-pair graph; its size equals `m`.
    pub witness: CutResult,
}

impl ProtocolPlan {
    /// Ids of the Bell pairs consumed by some path.
    pub fn used_bell_edges(&self) -> std::collections::BTreeSet<&str> {
        self.paths
            .paths
            .iter()
            .flat_map(|p| p.edges.iter().map(String::as_str))
            .collect()
    }
}

/// Plans the aggregated repeater protocol with the default error-budget mode.
pub fn plan(net: &Network, epsilon: f64, rate_model: &RateModel) -> Result<ProtocolPlan> {
    plan_with(net, epsilon, rate_model, ErrorBudgetMode::default())
}

pub fn plan_with(
    net: &Network,
    epsilon: f64,
    rate_model: &RateModel,
    mode: ErrorBudgetMode,
) -> Result<ProtocolPlan> {
    let epsilon = EpsilonBudget::new(epsilon)?.epsilon();
    let bell = build_bell_network(net, rate_model)?;
    plan_bell(&bell, epsilon, mode, net.edges().len())
}

/// Plans directly on a Bell network. `edge_total` is the number of channel
/// edges used by [`ErrorBudgetMode::AllEdges`].
pub fn plan_bell(
    bell: &BellNetwork,
    epsilon: f64,
    mode: ErrorBudgetMode,
    edge_total: usize,
) -> Result<ProtocolPlan> {
    let graph = bell.flow_graph();
    let (m, paths) = graph.disjoint_paths()?;
    let witness = graph.min_cut();
    debug_assert_eq!(witness.value as usize, m);

    let swap_schedules = paths
        .paths
        .iter()
        .map(|p| p.nodes[1..p.nodes.len() - 1].to_vec())
        .collect();

    let parent_of: BTreeMap<&str, &str> = bell
        .bell_edges
        .iter()
        .map(|b| (b.id.as_str(), b.parent.as_str()))
        .collect();
    let mut consumed: BTreeMap<String, u64> =
        bell.pair_counts.keys().map(|k| (k.clone(), 0)).collect();
    for e in paths.paths.iter().flat_map(|p| &p.edges) {
        *consumed.get_mut(parent_of[e.as_str()]).expect("known parent") += 1;
    }
    let unused = bell
        .pair_counts
        .iter()
        .map(|(k, &n)| (k.clone(), n - consumed[k]))
        .collect();

    let error_budget_edges = match mode {
        ErrorBudgetMode::GeneratingEdges => bell.pair_counts.values().filter(|&&n| n > 0).count(),
        ErrorBudgetMode::AllEdges => edge_total,
    };

    Ok(ProtocolPlan {
        m,
        epsilon,
        paths,
        swap_schedules,
        error_budget: error_budget_edges as f64 * epsilon,
        error_budget_edges,
        pair_counts: bell.pair_counts.clone(),
        consumed_pairs: consumed,
        unused_pairs: unused,
        witness,
    })
}

/// DOT rendering of the Bell-pair graph: one edge per pair, solid if a path
/// consumes it and dashed otherwise.
pub fn plan_dot(net: &Network, bell: &BellNetwork, plan: &ProtocolPlan) -> Result<String> {
    let channel_of: BTreeMap<&str, _> = net.edges().iter().map(|e| (e.id.as_str(), e.channel)).collect();
    let mut path_of = BTreeMap::new();
    for (i, p) in plan.paths.paths.iter().enumerate() {
        for e in &p.edges {
            path_of.insert(e.as_str(), i);
        }
    }
    let mut ann = Annotations::new();
    let mut edges = Vec::with_capacity(bell.bell_edges.len());
    for b in &bell.bell_edges {
        let channel = *channel_of
            .get(b.parent.as_str())
            .ok_or_else(|| Error::Invalid(format!("unknown parent edge `{}`", b.parent)))?;
        edges.push(EdgeSpec::new(
            b.id.clone(),
            b.ends.0.clone(),
            b.ends.1.clone(),
            channel,
            UsageBudget::Count(1.0),
        ));
        let note = match path_of.get(b.id.as_str()) {
            Some(i) => format!("used path {i}"),
            None => "unused".to_string(),
        };
        ann.insert(b.id.clone(), note);
    }
    let pair_net = Network::new(net.nodes().to_vec(), net.alice().clone(), net.bob().clone(), edges)?;
    Ok(export_dot(&pair_net, Some(&ann)))
}

/// Asymptotic regime of a bound report, tied to the budget variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    /// Finite protocol with count budgets.
    #[serde(rename = "per-protocol")]
    PerProtocol,
    /// Rates per channel use, frequency budgets.
    #[serde(rename = "per-use")]
    PerChannelUse,
    /// Rates per unit time, rate budgets.
    #[serde(rename = "per-time")]
    PerTime,
}

impl Regime {
    pub fn budget_kind(self) -> BudgetKind {
        match self {
            Regime::PerProtocol => BudgetKind::Count,
            Regime::PerChannelUse => BudgetKind::Frequency,
            Regime::PerTime => BudgetKind::Rate,
        }
    }

    pub fn for_budget(kind: BudgetKind) -> Regime {
        match kind {
            BudgetKind::Count => Regime::PerProtocol,
            BudgetKind::Frequency => Regime::PerChannelUse,
            BudgetKind::Rate => Regime::PerTime,
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::PerProtocol => "per-protocol",
            Regime::PerChannelUse => "per-use",
            Regime::PerTime => "per-time",
        })
    }
}

impl FromStr for Regime {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "per-protocol" => Ok(Regime::PerProtocol),
            "per-use" => Ok(Regime::PerChannelUse),
            "per-time" => Ok(Regime::PerTime),
            _ => Err(Error::Domain(format!(
                "unknown regime `{s}` (expected per-protocol, per-use or per-time)"
            ))),
        }
    }
}

/// Achievable and converse cut values for one network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SandwichReport {
    pub regime: Regime,
    pub epsilon: f64,
    pub lower: f64,
    pub upper_esq: f64,
    /// ε-corrected upper bound; `None` when vacuous.
    pub upper_eps_corrected: Option<f64>,
    pub vacuous: bool,
    pub lower_cut: CutResult,
    pub upper_cut: CutResult,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl SandwichReport {
    pub fn corrected(&self) -> CorrectedBound {
        match self.upper_eps_corrected {
            Some(v) => CorrectedBound::Finite(v),
            None => CorrectedBound::Vacuous,
        }
    }
}

/// Lower bound: min cut over `Q` weights (counts floored in the per-protocol
/// regime). Upper bound: min cut over squashed-entanglement weights with the
/// raw budgets. The ε correction is applied in the per-protocol regime only;
/// the asymptotic regimes report `upper_esq` there.
pub fn sandwich_report(net: &Network, regime: Regime, epsilon: f64) -> Result<SandwichReport> {
    net.require_budget(regime.budget_kind())?;
    let epsilon = EpsilonBudget::new(epsilon)?.epsilon();
    let floor_counts = regime == Regime::PerProtocol;

    let lower_cut = FlowGraph::from_network(net, |e| {
        let b = e.usage.value();
        let b = if floor_counts { b.floor() } else { b };
        b * edge_weight(e, WeightKind::QCap)
    })?
    .min_cut();
    let upper_cut = FlowGraph::from_network(net, |e| {
        e.usage.value() * edge_weight(e, WeightKind::EsqUpper)
    })?
    .min_cut();

    let corrected = if regime == Regime::PerProtocol {
        epsilon_corrected_upper(upper_cut.value, epsilon)?
    } else {
        CorrectedBound::Finite(upper_cut.value)
    };

    Ok(SandwichReport {
        regime,
        epsilon,
        lower: lower_cut.value,
        upper_esq: upper_cut.value,
        upper_eps_corrected: corrected.value(),
        vacuous: corrected.is_vacuous(),
        lower_cut,
        upper_cut,
        warnings: net.warnings().to_vec(),
    })
}

/// `upper_esq / lower`. At most 2 for all-lossy networks.
pub fn lossy_gap_ratio(report: &SandwichReport) -> Result<f64> {
    if report.lower <= 0.0 {
        return Err(Error::UndefinedRatio {
            upper: report.upper_esq,
        });
    }
    Ok(report.upper_esq / report.lower)
}
