//! Network topology: nodes, directed channel edges with their channel model and
//! usage budget, and the two client terminals.
//!
//! A [`Network`] is validated on construction and immutable afterwards. The
//! on-disk format is JSON:
//!
//! ```json
//! { "nodes": ["A", "B", "C1"], "alice": "A", "bob": "B",
//!   "edges": [ { "id": "e1", "tail": "A", "head": "C1",
//!                "channel": {"type": "lossy", "eta": 0.9},
//!                "usage": {"count": 10} } ] }
//! ```

mod dot;

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use dot::export_dot;

/// Node label, unique within a network.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(String);

impl NodeId {
    pub fn new(label: impl Into<String>) -> Self {
        NodeId(label.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for NodeId {
    fn from(s: &str) -> Self {
        NodeId(s.to_owned())
    }
}

impl std::borrow::Borrow<str> for NodeId {
    fn borrow(&self) -> &str {
        &self.0
    }
}

/// Channel model of a single edge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", deny_unknown_fields)]
pub enum ChannelSpec {
    /// Pure-loss bosonic channel with transmittance `eta` in `[0, 1)`.
    #[serde(rename = "lossy")]
    LossyOptical { eta: f64 },
    /// User-supplied two-way capacity and squashed-entanglement upper bound,
    /// both in ebits per use.
    #[serde(rename = "custom")]
    Custom { q_cap: f64, esq_upper: f64 },
}

/// How often an edge's channel may be used.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub enum UsageBudget {
    /// Average number of uses in one protocol run.
    #[serde(rename = "count")]
    Count(f64),
    /// Uses per total channel use of the network.
    #[serde(rename = "freq")]
    Frequency(f64),
    /// Uses per unit time.
    #[serde(rename = "rate")]
    Rate(f64),
}

/// Variant tag of a [`UsageBudget`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BudgetKind {
    Count,
    Frequency,
    Rate,
}

impl fmt::Display for BudgetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BudgetKind::Count => "count",
            BudgetKind::Frequency => "freq",
            BudgetKind::Rate => "rate",
        })
    }
}

impl UsageBudget {
    pub fn value(&self) -> f64 {
        match *self {
            UsageBudget::Count(v) | UsageBudget::Frequency(v) | UsageBudget::Rate(v) => v,
        }
    }

    pub fn kind(&self) -> BudgetKind {
        match self {
            UsageBudget::Count(_) => BudgetKind::Count,
            UsageBudget::Frequency(_) => BudgetKind::Frequency,
            UsageBudget::Rate(_) => BudgetKind::Rate,
        }
    }

    /// Same variant, value multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> UsageBudget {
        match *self {
            UsageBudget::Count(v) => UsageBudget::Count(v * factor),
            UsageBudget::Frequency(v) => UsageBudget::Frequency(v * factor),
            UsageBudget::Rate(v) => UsageBudget::Rate(v * factor),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeSpec {
    pub id: String,
    pub tail: NodeId,
    pub head: NodeId,
    pub channel: ChannelSpec,
    pub usage: UsageBudget,
}

impl EdgeSpec {
    pub fn new(
        id: impl Into<String>,
        tail: impl Into<NodeId>,
        head: impl Into<NodeId>,
        channel: ChannelSpec,
        usage: UsageBudget,
    ) -> Self {
        EdgeSpec {
            id: id.into(),
            tail: tail.into(),
            head: head.into(),
            channel,
            usage,
        }
    }

    pub fn lossy(
        id: impl Into<String>,
        tail: impl Into<NodeId>,
        head: impl Into<NodeId>,
        eta: f64,
        usage: UsageBudget,
    ) -> Self {
        Self::new(id, tail, head, ChannelSpec::LossyOptical { eta }, usage)
    }

    /// True if exactly one endpoint lies in `side`.
    pub fn crosses(&self, side: &BTreeSet<NodeId>) -> bool {
        side.contains(&self.tail) != side.contains(&self.head)
    }
}

impl From<String> for NodeId {
    fn from(s: String) -> Self {
        NodeId(s)
    }
}

/// Serialized shape of a network document.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NetworkDoc {
    nodes: Vec<NodeId>,
    alice: NodeId,
    bob: NodeId,
    edges: Vec<EdgeSpec>,
}

/// A validated quantum network: a directed multigraph with two terminals.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Network {
    nodes: Vec<NodeId>,
    alice: NodeId,
    bob: NodeId,
    edges: Vec<EdgeSpec>,
    #[serde(skip)]
    warnings: Vec<String>,
}

impl Network {
    pub fn new(
        nodes: Vec<NodeId>,
        alice: NodeId,
        bob: NodeId,
        edges: Vec<EdgeSpec>,
    ) -> Result<Network> {
        let mut seen = HashSet::new();
        for n in &nodes {
            if n.as_str().is_empty() {
                return Err(Error::Invalid("node labels must be non-empty".into()));
            }
            if !seen.insert(n.as_str()) {
                return Err(Error::Invalid(format!("duplicate node `{n}`")));
            }
        }
        if !seen.contains(alice.as_str()) {
            return Err(Error::Invalid(format!("alice `{alice}` is not a declared node")));
        }
        if !seen.contains(bob.as_str()) {
            return Err(Error::Invalid(format!("bob `{bob}` is not a declared node")));
        }
        if alice == bob {
            return Err(Error::Invalid(format!(
                "alice and bob must be distinct (both `{alice}`)"
            )));
        }

        let mut edge_ids = HashSet::new();
        let mut warnings = Vec::new();
        let mut budget_kind: Option<(BudgetKind, &str)> = None;
        for e in &edges {
            if e.id.is_empty() {
                return Err(Error::Invalid("edge ids must be non-empty".into()));
            }
            if !edge_ids.insert(e.id.as_str()) {
                return Err(Error::Invalid(format!("duplicate edge id `{}`", e.id)));
            }
            for end in [&e.tail, &e.head] {
                if !seen.contains(end.as_str()) {
                    return Err(Error::Invalid(format!(
                        "edge `{}`: unknown endpoint `{end}`",
                        e.id
                    )));
                }
            }
            if e.tail == e.head {
                return Err(Error::Invalid(format!(
                    "edge `{}`: self-loop on `{}`",
                    e.id, e.tail
                )));
            }
            match e.channel {
                ChannelSpec::LossyOptical { eta } => {
                    if !eta.is_finite() || eta < 0.0 {
                        return Err(Error::Invalid(format!(
                            "edge `{}`: eta must be >= 0 (got {eta})",
                            e.id
                        )));
                    }
                    if eta >= 1.0 {
                        return Err(Error::Invalid(format!(
                            "edge `{}`: eta must be < 1 (got {eta})",
                            e.id
                        )));
                    }
                }
                ChannelSpec::Custom { q_cap, esq_upper } => {
                    for (name, v) in [("q_cap", q_cap), ("esq_upper", esq_upper)] {
                        if !v.is_finite() || v < 0.0 {
                            return Err(Error::Invalid(format!(
                                "edge `{}`: {name} must be finite and >= 0 (got {v})",
                                e.id
                            )));
                        }
                    }
                    if q_cap > esq_upper {
                        warnings.push(format!(
                            "edge `{}`: q_cap {q_cap} exceeds esq_upper {esq_upper}; \
                             the lower bound may exceed the upper bound",
                            e.id
                        ));
                    }
                }
            }
            let v = e.usage.value();
            if !v.is_finite() || v < 0.0 {
                return Err(Error::Invalid(format!(
                    "edge `{}`: usage must be finite and >= 0 (got {v})",
                    e.id
                )));
            }
            match budget_kind {
                None => budget_kind = Some((e.usage.kind(), e.id.as_str())),
                Some((k, first)) if k != e.usage.kind() => {
                    return Err(Error::Invalid(format!(
                        "edge `{}`: usage variant `{}` differs from `{k}` of edge `{first}`; \
                         mixed budget variants are not allowed",
                        e.id,
                        e.usage.kind()
                    )));
                }
                Some(_) => {}
            }
        }

        Ok(Network {
            nodes,
            alice,
            bob,
            edges,
            warnings,
        })
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn alice(&self) -> &NodeId {
        &self.alice
    }

    pub fn bob(&self) -> &NodeId {
        &self.bob
    }

    pub fn edges(&self) -> &[EdgeSpec] {
        &self.edges
    }

    pub fn edge(&self, id: &str) -> Option<&EdgeSpec> {
        self.edges.iter().find(|e| e.id == id)
    }

    /// Non-fatal findings from validation, e.g. custom channels whose
    /// achievable weight exceeds their converse weight.
    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// Budget variant shared by all edges; `None` for an edgeless network.
    pub fn budget_kind(&self) -> Option<BudgetKind> {
        self.edges.first().map(|e| e.usage.kind())
    }

    /// Checks that every edge's budget is of variant `kind`.
    pub fn require_budget(&self, kind: BudgetKind) -> Result<()> {
        match self.budget_kind() {
            Some(k) if k != kind => Err(Error::BudgetMismatch(format!(
                "network budgets are `{k}`, operation requires `{kind}`"
            ))),
            _ => Ok(()),
        }
    }

    /// Rebuilds the network with every edge passed through `f`, re-validating.
    pub fn map_edges(&self, f: impl FnMut(&EdgeSpec) -> EdgeSpec) -> Result<Network> {
        Network::new(
            self.nodes.clone(),
            self.alice.clone(),
            self.bob.clone(),
            self.edges.iter().map(f).collect(),
        )
    }

    /// Copy with every usage budget multiplied by `factor`.
    pub fn with_scaled_budgets(&self, factor: f64) -> Result<Network> {
        self.map_edges(|e| EdgeSpec {
            usage: e.usage.scaled(factor),
            ..e.clone()
        })
    }

    /// Copy with the transmittance of lossy edge `id` replaced.
    pub fn with_eta(&self, id: &str, eta: f64) -> Result<Network> {
        match self.edge(id) {
            None => return Err(Error::Invalid(format!("no edge with id `{id}`"))),
            Some(e) if !matches!(e.channel, ChannelSpec::LossyOptical { .. }) => {
                return Err(Error::Invalid(format!("edge `{id}` is not a lossy channel")))
            }
            Some(_) => {}
        }
        self.map_edges(|e| {
            let mut e = e.clone();
            if e.id == id {
                e.channel = ChannelSpec::LossyOptical { eta };
            }
            e
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("network serializes")
    }
}

/// Parses and validates a JSON network document.
pub fn parse_network(text: &str) -> Result<Network> {
    let doc: NetworkDoc = serde_json::from_str(text).map_err(|e| Error::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    Network::new(doc.nodes, doc.alice, doc.bob, doc.edges)
}

/// Node set of the Alice side of an A–B cut.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bipartition {
    pub v_a: BTreeSet<NodeId>,
}

impl Bipartition {
    /// Validates `v_a` against `net`: it must hold alice, exclude bob, and
    /// contain only declared nodes.
    pub fn new(net: &Network, v_a: BTreeSet<NodeId>) -> Result<Bipartition> {
        if !v_a.contains(net.alice()) {
            return Err(Error::Invalid("cut side must contain alice".into()));
        }
        if v_a.contains(net.bob()) {
            return Err(Error::Invalid("cut side must not contain bob".into()));
        }
        if let Some(n) = v_a.iter().find(|n| !net.nodes().contains(n)) {
            return Err(Error::Invalid(format!("cut side names unknown node `{n}`")));
        }
        Ok(Bipartition { v_a })
    }

    pub fn contains(&self, node: &NodeId) -> bool {
        self.v_a.contains(node)
    }

    /// Nodes of `net` on Bob's side.
    pub fn complement(&self, net: &Network) -> BTreeSet<NodeId> {
        net.nodes()
            .iter()
            .filter(|n| !self.v_a.contains(*n))
            .cloned()
            .collect()
    }
}

/// Edges with one endpoint on each side of `part`, in either direction, in
/// network order.
pub fn crossing_edges<'a>(net: &'a Network, part: &Bipartition) -> Vec<&'a EdgeSpec> {
    net.edges().iter().filter(|e| e.crosses(&part.v_a)).collect()
}

/// Shorthand used by the DOT exporter and plans.
pub type Annotations = BTreeMap<String, String>;
