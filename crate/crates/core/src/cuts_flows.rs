//! Minimum A–B cuts, maximum flow and edge-disjoint path extraction.
//!
//! Cuts count an edge whenever its endpoints are on different sides,
//! regardless of the channel's direction, so every edge is modeled as an
//! undirected arc of its full weight. Max-flow uses shortest augmenting paths
//! (BFS) with neighbors visited in label order, then edge-id order, which makes
//! every result reproducible.

use std::collections::{BTreeSet, VecDeque};
use std::fmt::Debug;
use std::ops::{Add, AddAssign, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use crate::aggregator::BellNetwork;
use crate::capacity::{edge_weight, WeightKind};
use crate::error::{Error, Result};
use crate::netmodel::{Bipartition, BudgetKind, EdgeSpec, Network, NodeId};

/// Largest vertex count accepted by the exhaustive cut oracle.
pub const BRUTEFORCE_MAX_NODES: usize = 20;

/// Arc capacity: real weights or integer pair counts.
pub trait Capacity:
    Copy + Debug + PartialOrd + Add<Output = Self> + Sub<Output = Self> + AddAssign + SubAssign
{
    const ZERO: Self;
    fn to_f64(self) -> f64;
    /// Whether this is a valid (finite, non-negative) capacity.
    fn is_valid(self) -> bool;
}

impl Capacity for f64 {
    const ZERO: f64 = 0.0;
    fn to_f64(self) -> f64 {
        self
    }
    fn is_valid(self) -> bool {
        self.is_finite() && self >= 0.0
    }
}

impl Capacity for u64 {
    const ZERO: u64 = 0;
    fn to_f64(self) -> f64 {
        self as f64
    }
    fn is_valid(self) -> bool {
        true
    }
}

/// Undirected edge of a [`FlowGraph`].
#[derive(Debug, Clone, PartialEq)]
pub struct FlowArc<C> {
    pub id: String,
    pub ends: (usize, usize),
    pub capacity: C,
}

/// Undirected capacitated multigraph with a source (alice) and sink (bob).
/// Vertices are kept sorted by label; vertex index order is label order.
#[derive(Debug, Clone)]
pub struct FlowGraph<C> {
    vertices: Vec<NodeId>,
    source: usize,
    sink: usize,
    arcs: Vec<FlowArc<C>>,
}

/// Result of a maximum-flow computation.
#[derive(Debug, Clone)]
pub struct MaxFlow<C> {
    pub value: C,
    /// Per arc, net flow oriented from `ends.0` to `ends.1` as
    /// `(forward, backward)`; at most one is nonzero.
    pub arc_flow: Vec<(C, C)>,
    /// Vertices reachable from the source in the final residual graph.
    pub source_side: Vec<bool>,
}

/// A minimum cut with its witness bipartition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutResult {
    pub value: f64,
    #[serde(flatten)]
    pub v_a: Bipartition,
    pub crossing: Vec<String>,
}

/// One A→B path through the Bell-pair graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BellPath {
    pub nodes: Vec<NodeId>,
    pub edges: Vec<String>,
}

/// Pairwise edge-disjoint A→B paths.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PathSet {
    pub paths: Vec<BellPath>,
}

impl PathSet {
    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    /// Checks the path-set invariants: each path runs alice→bob over simple
    /// node sequences with matching edge lists, and no edge id is reused.
    pub fn validate(&self, alice: &NodeId, bob: &NodeId) -> Result<()> {
        let mut used = BTreeSet::new();
        for (i, p) in self.paths.iter().enumerate() {
            let bad = |why: &str| Err(Error::Invalid(format!("path {i}: {why}")));
            if p.nodes.first() != Some(alice) || p.nodes.last() != Some(bob) {
                return bad("does not run from alice to bob");
            }
            if p.edges.len() + 1 != p.nodes.len() {
                return bad("edge count does not match node count");
            }
            let distinct: BTreeSet<_> = p.nodes.iter().collect();
            if distinct.len() != p.nodes.len() {
                return bad("revisits a node");
            }
            for e in &p.edges {
                if !used.insert(e.as_str()) {
                    return bad(&format!("reuses edge `{e}`"));
                }
            }
        }
        Ok(())
    }
}

impl<C: Capacity> FlowGraph<C> {
    /// Builds a graph over `vertices` (any order, must be unique) with arcs
    /// given as `(id, u, v, capacity)` on vertex labels.
    pub fn new(
        vertices: impl IntoIterator<Item = NodeId>,
        source: &NodeId,
        sink: &NodeId,
        arcs: impl IntoIterator<Item = (String, NodeId, NodeId, C)>,
    ) -> Result<Self> {
        let mut vertices: Vec<NodeId> = vertices.into_iter().collect();
        vertices.sort();
        vertices.dedup();
        let index = |n: &NodeId| {
            vertices
                .binary_search(n)
                .map_err(|_| Error::Invalid(format!("unknown vertex `{n}`")))
        };
        let s = index(source)?;
        let t = index(sink)?;
        if s == t {
            return Err(Error::Invalid("source and sink coincide".into()));
        }
        let mut out = Vec::new();
        for (id, u, v, capacity) in arcs {
            if !capacity.is_valid() {
                return Err(Error::Invalid(format!(
                    "arc `{id}`: capacity {capacity:?} must be finite and >= 0"
                )));
            }
            out.push(FlowArc {
                ends: (index(&u)?, index(&v)?),
                id,
                capacity,
            });
        }
        Ok(FlowGraph {
            vertices,
            source: s,
            sink: t,
            arcs: out,
        })
    }

    pub fn vertices(&self) -> &[NodeId] {
        &self.vertices
    }

    pub fn arcs(&self) -> &[FlowArc<C>] {
        &self.arcs
    }

    pub fn source(&self) -> &NodeId {
        &self.vertices[self.source]
    }

    pub fn sink(&self) -> &NodeId {
        &self.vertices[self.sink]
    }

    fn total_capacity(&self) -> f64 {
        self.arcs.iter().map(|a| a.capacity.to_f64()).sum()
    }

    /// Residual arcs out of every vertex: `2i` is `ends.0 -> ends.1` and
    /// `2i+1` the reverse. Sorted by (neighbor, arc id).
    fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertices.len()];
        for (i, a) in self.arcs.iter().enumerate() {
            adj[a.ends.0].push(2 * i);
            adj[a.ends.1].push(2 * i + 1);
        }
        for list in &mut adj {
            list.sort_by(|&x, &y| {
                let hx = self.arc_head(x);
                let hy = self.arc_head(y);
                hx.cmp(&hy)
                    .then_with(|| self.arcs[x / 2].id.cmp(&self.arcs[y / 2].id))
                    .then(x.cmp(&y))
            });
        }
        adj
    }

    fn arc_head(&self, residual_arc: usize) -> usize {
        let a = &self.arcs[residual_arc / 2];
        if residual_arc.is_multiple_of(2) {
            a.ends.1
        } else {
            a.ends.0
        }
    }

    /// Edmonds–Karp maximum flow. Residual capacities at or below `tol`
    /// count as saturated.
    fn max_flow_with_tol(&self, tol: C) -> MaxFlow<C> {
        let n = self.vertices.len();
        let adj = self.adjacency();
        let mut residual: Vec<C> = self
            .arcs
            .iter()
            .flat_map(|a| [a.capacity, a.capacity])
            .collect();
        let mut value = C::ZERO;

        loop {
            let mut pred: Vec<Option<usize>> = vec![None; n];
            let mut seen = vec![false; n];
            seen[self.source] = true;
            let mut queue = VecDeque::from([self.source]);
            'bfs: while let Some(u) = queue.pop_front() {
                for &ra in &adj[u] {
                    let w = self.arc_head(ra);
                    if !seen[w] && residual[ra] > tol {
                        seen[w] = true;
                        pred[w] = Some(ra);
                        if w == self.sink {
                            break 'bfs;
                        }
                        queue.push_back(w);
                    }
                }
            }
            if !seen[self.sink] {
                let arc_flow = self
                    .arcs
                    .iter()
                    .enumerate()
                    .map(|(i, a)| {
                        let fwd = residual[2 * i];
                        if fwd < a.capacity {
                            (a.capacity - fwd, C::ZERO)
                        } else {
                            (C::ZERO, fwd - a.capacity)
                        }
                    })
                    .collect();
                return MaxFlow {
                    value,
                    arc_flow,
                    source_side: seen,
                };
            }

            let mut bottleneck: Option<C> = None;
            let mut v = self.sink;
            while let Some(ra) = pred[v] {
                let r = residual[ra];
                bottleneck = Some(match bottleneck {
                    Some(b) if b < r => b,
                    _ => r,
                });
                v = self.arc_head(ra ^ 1);
            }
            let delta = bottleneck.expect("augmenting path has at least one arc");
            let mut v = self.sink;
            while let Some(ra) = pred[v] {
                residual[ra] -= delta;
                residual[ra ^ 1] += delta;
                v = self.arc_head(ra ^ 1);
            }
            value += delta;
        }
    }

    /// Cut value and crossing arcs for a source-side indicator.
    fn evaluate_cut(&self, side: &[bool]) -> (C, Vec<String>) {
        let mut value = C::ZERO;
        let mut crossing = Vec::new();
        for a in &self.arcs {
            if side[a.ends.0] != side[a.ends.1] {
                value += a.capacity;
                crossing.push(a.id.clone());
            }
        }
        (value, crossing)
    }

    fn cut_result(&self, side: &[bool]) -> CutResult {
        let (value, crossing) = self.evaluate_cut(side);
        let v_a = self
            .vertices
            .iter()
            .zip(side)
            .filter(|(_, &s)| s)
            .map(|(n, _)| n.clone())
            .collect();
        CutResult {
            value: value.to_f64(),
            v_a: Bipartition { v_a },
            crossing,
        }
    }

    /// Exhaustive minimum cut over all `2^(n-2)` bipartitions with the
    /// terminals fixed. Ties go to the lexicographically smallest sorted
    /// label list of the source side.
    pub fn min_cut_bruteforce(&self) -> Result<CutResult> {
        let n = self.vertices.len();
        if n > BRUTEFORCE_MAX_NODES {
            return Err(Error::SizeLimit(format!(
                "brute-force cut needs at most {BRUTEFORCE_MAX_NODES} vertices (got {n})"
            )));
        }
        let free: Vec<usize> = (0..n).filter(|&v| v != self.source && v != self.sink).collect();
        let tol = 1e-12 * self.total_capacity();
        let mut best: Option<(f64, Vec<bool>)> = None;
        let mut side = vec![false; n];
        for mask in 0u32..(1u32 << free.len()) {
            side.iter_mut().for_each(|s| *s = false);
            side[self.source] = true;
            for (bit, &v) in free.iter().enumerate() {
                side[v] = mask >> bit & 1 == 1;
            }
            let value: f64 = self
                .arcs
                .iter()
                .filter(|a| side[a.ends.0] != side[a.ends.1])
                .map(|a| a.capacity.to_f64())
                .sum();
            let better = match &best {
                None => true,
                Some((bv, bs)) => {
                    value < bv - tol || (value <= bv + tol && lex_less(&side, bs))
                }
            };
            if better {
                best = Some((value, side.clone()));
            }
        }
        let (_, side) = best.expect("at least one bipartition");
        Ok(self.cut_result(&side))
    }
}

/// Compares two source sides by their sorted member lists. Vertex indices
/// follow label order, so index order is label order.
fn lex_less(a: &[bool], b: &[bool]) -> bool {
    let la = a.iter().enumerate().filter(|(_, &s)| s).map(|(i, _)| i);
    let lb = b.iter().enumerate().filter(|(_, &s)| s).map(|(i, _)| i);
    la.lt(lb)
}

impl FlowGraph<f64> {
    /// One undirected arc per network edge with capacity `weight(edge)`.
    pub fn from_network(net: &Network, weight: impl Fn(&EdgeSpec) -> f64) -> Result<Self> {
        FlowGraph::new(
            net.nodes().iter().cloned(),
            net.alice(),
            net.bob(),
            net.edges()
                .iter()
                .map(|e| (e.id.clone(), e.tail.clone(), e.head.clone(), weight(e))),
        )
    }

    fn tolerance(&self) -> f64 {
        1e-12 * self.total_capacity()
    }

    pub fn max_flow(&self) -> MaxFlow<f64> {
        self.max_flow_with_tol(self.tolerance())
    }

    /// Minimum cut read off the residual graph after max-flow: the source
    /// side is everything still reachable from the source. Its value is
    /// summed from the crossing arcs, not taken from the flow.
    pub fn min_cut(&self) -> CutResult {
        let flow = self.max_flow();
        self.cut_result(&flow.source_side)
    }
}

impl FlowGraph<u64> {
    pub fn max_flow(&self) -> MaxFlow<u64> {
        self.max_flow_with_tol(0)
    }

    pub fn min_cut(&self) -> CutResult {
        let flow = self.max_flow();
        self.cut_result(&flow.source_side)
    }

    /// Maximum number of edge-disjoint source→sink paths when every arc has
    /// unit capacity, with one realizing path set.
    ///
    /// The max-flow is decomposed by walking flow-carrying arcs from the
    /// source, always taking the first unused arc in (neighbor, id) order.
    /// Revisiting a node closes a cycle, whose arcs are dropped.
    pub fn disjoint_paths(&self) -> Result<(usize, PathSet)> {
        if let Some(a) = self.arcs.iter().find(|a| a.capacity > 1) {
            return Err(Error::Invalid(format!(
                "arc `{}` has capacity {}; disjoint paths need unit arcs",
                a.id, a.capacity
            )));
        }
        let flow = self.max_flow();
        let n = self.vertices.len();

        // flow-carrying arcs out of each vertex as (head, arc index)
        let mut out: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
        for (i, (a, &(fwd, bwd))) in self.arcs.iter().zip(&flow.arc_flow).enumerate() {
            if fwd > 0 {
                out[a.ends.0].push((a.ends.1, i));
            } else if bwd > 0 {
                out[a.ends.1].push((a.ends.0, i));
            }
        }
        for list in &mut out {
            list.sort_by(|x, y| x.0.cmp(&y.0).then_with(|| self.arcs[x.1].id.cmp(&self.arcs[y.1].id)));
        }
        let mut next = vec![0usize; n];

        let mut paths = Vec::with_capacity(flow.value as usize);
        for _ in 0..flow.value {
            let mut nodes = vec![self.source];
            let mut arcs: Vec<usize> = Vec::new();
            let mut pos = vec![usize::MAX; n];
            pos[self.source] = 0;
            let mut v = self.source;
            while v != self.sink {
                let (w, arc) = *out[v]
                    .get(next[v])
                    .expect("flow conservation leaves an outgoing arc");
                next[v] += 1;
                if pos[w] != usize::MAX {
                    let keep = pos[w];
                    for &dropped in &nodes[keep + 1..] {
                        pos[dropped] = usize::MAX;
                    }
                    nodes.truncate(keep + 1);
                    arcs.truncate(keep);
                } else {
                    pos[w] = nodes.len();
                    nodes.push(w);
                    arcs.push(arc);
                }
                v = w;
            }
            paths.push(BellPath {
                nodes: nodes.iter().map(|&i| self.vertices[i].clone()).collect(),
                edges: arcs.iter().map(|&i| self.arcs[i].id.clone()).collect(),
            });
        }
        Ok((flow.value as usize, PathSet { paths }))
    }
}

/// Minimum over bipartitions of `Σ budget(e)·weight(e, kind)` across crossing
/// edges, computed by max-flow. Fails if the network's budgets are not of
/// variant `budget`.
pub fn min_cut(net: &Network, kind: WeightKind, budget: BudgetKind) -> Result<CutResult> {
    net.require_budget(budget)?;
    Ok(FlowGraph::from_network(net, |e| e.usage.value() * edge_weight(e, kind))?.min_cut())
}

/// Exhaustive oracle for [`min_cut`] on networks with at most
/// [`BRUTEFORCE_MAX_NODES`] nodes.
pub fn min_cut_bruteforce(net: &Network, kind: WeightKind) -> Result<CutResult> {
    FlowGraph::from_network(net, |e| e.usage.value() * edge_weight(e, kind))?.min_cut_bruteforce()
}

/// Maximum number of edge-disjoint A–B paths in the Bell-pair graph and a
/// path set realizing it.
pub fn max_disjoint_paths(bell: &BellNetwork) -> (usize, PathSet) {
    bell.flow_graph()
        .disjoint_paths()
        .expect("Bell-pair arcs have unit capacity")
}
