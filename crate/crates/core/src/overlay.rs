//! Per-flow overlay graphs built by route-discovery processes.
//!
//! An overlay is the subset of physical links a route-discovery process
//! (RDP) learns for one flow. Overlays come either from an idealized
//! strategy model ([`RdpStrategy`]) or from routing tables printed by an
//! external simulator ([`RoutingTableDump`]).

use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::graph::{EdgeId, Flow, NodeId, ProbGraph};

/// Idealized route-discovery behaviour.
///
/// The derived ordering (single path, then disjoint, then limited, then full,
/// each by `k`) is the row order used in sweep output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RdpStrategy {
    /// One hop-count shortest path, lexicographically smallest node sequence
    /// on ties.
    SingleShortestPath,
    /// Up to `k` edge-disjoint paths found by successive shortest paths.
    KDisjoint(usize),
    /// Union of the first `k` shortest loop-free paths.
    KLimited(usize),
    /// Every edge lying on some `s -> t` walk of the physical graph.
    FullMultipath,
}

impl RdpStrategy {
    pub fn k(&self) -> Option<usize> {
        match self {
            RdpStrategy::KDisjoint(k) | RdpStrategy::KLimited(k) => Some(*k),
            _ => None,
        }
    }
}

impl fmt::Display for RdpStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RdpStrategy::SingleShortestPath => write!(f, "shortest"),
            RdpStrategy::KDisjoint(k) => write!(f, "kdisjoint:{k}"),
            RdpStrategy::KLimited(k) => write!(f, "klimited:{k}"),
            RdpStrategy::FullMultipath => write!(f, "full"),
        }
    }
}

impl FromStr for RdpStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, arg) = match s.split_once(':') {
            Some((name, arg)) => (name.trim(), Some(arg.trim())),
            None => (s, None),
        };
        let k = || -> Result<usize> {
            let arg = arg.ok_or_else(|| {
                Error::InvalidParameter(format!("strategy '{name}' needs a route count, e.g. '{name}:3'"))
            })?;
            match arg.parse::<usize>() {
                Ok(k) if k >= 1 => Ok(k),
                _ => Err(Error::InvalidParameter(format!(
                    "route count '{arg}' must be a positive integer"
                ))),
            }
        };
        let strategy = match name {
            "shortest" | "single" => RdpStrategy::SingleShortestPath,
            "kdisjoint" | "disjoint" => RdpStrategy::KDisjoint(k()?),
            "klimited" | "limited" => RdpStrategy::KLimited(k()?),
            "full" | "multipath" => RdpStrategy::FullMultipath,
            _ => return Err(Error::InvalidParameter(format!("unknown strategy '{s}'"))),
        };
        if arg.is_some() && strategy.k().is_none() {
            return Err(Error::InvalidParameter(format!(
                "strategy '{name}' takes no route count"
            )));
        }
        Ok(strategy)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RouteEntry {
    pub node: NodeId,
    pub destination: NodeId,
    pub next_hop: NodeId,
}

/// Routing-table contents collected from every node of a simulated network.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RoutingTableDump {
    pub entries: Vec<RouteEntry>,
}

/// The edges of a physical graph discovered for one flow.
///
/// Edge ids are sorted. Every edge `(u, v)` has `u` reachable from `s` and
/// `t` reachable from `v` inside the overlay.
#[derive(Debug, Clone)]
pub struct OverlayGraph<'g> {
    base: &'g ProbGraph,
    flow: Flow,
    edge_ids: Vec<EdgeId>,
    member: Vec<bool>,
}

impl<'g> OverlayGraph<'g> {
    /// Restricts `base` to `edges` and drops edges that cannot lie on an
    /// `s -> t` walk.
    pub fn from_edges(
        base: &'g ProbGraph,
        flow: Flow,
        edges: impl IntoIterator<Item = EdgeId>,
    ) -> Self {
        let mut member = vec![false; base.edge_count()];
        for e in edges {
            member[e] = true;
        }
        let from_s = base.bfs_from(flow.s, |e| member[e]);
        let to_t = base.bfs_to(flow.t, |e| member[e]);
        let mut edge_ids = Vec::new();
        for (e, keep) in member.iter_mut().enumerate() {
            if *keep {
                let edge = base.edge(e);
                *keep = from_s[edge.tail.0].is_some() && to_t[edge.head.0].is_some();
                if *keep {
                    edge_ids.push(e);
                }
            }
        }
        OverlayGraph {
            base,
            flow,
            edge_ids,
            member,
        }
    }

    pub fn base(&self) -> &'g ProbGraph {
        self.base
    }

    pub fn flow(&self) -> Flow {
        self.flow
    }

    pub fn edge_ids(&self) -> &[EdgeId] {
        &self.edge_ids
    }

    pub fn edge_count(&self) -> usize {
        self.edge_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edge_ids.is_empty()
    }

    pub fn contains(&self, e: EdgeId) -> bool {
        self.member.get(e).copied().unwrap_or(false)
    }

    /// Same flow with one more base edge (re-pruned).
    pub fn with_edge(&self, e: EdgeId) -> Self {
        OverlayGraph::from_edges(
            self.base,
            self.flow,
            self.edge_ids.iter().copied().chain(Some(e)),
        )
    }

    pub fn is_subset_of(&self, other: &OverlayGraph<'_>) -> bool {
        self.edge_ids.iter().all(|&e| other.contains(e))
    }

    /// Shortest `s -> t` hop count inside the overlay.
    pub fn distance(&self) -> Option<usize> {
        self.base.bfs_from(self.flow.s, |e| self.member[e])[self.flow.t.0]
    }

    /// Maximum number of pairwise edge-disjoint `s -> t` paths, i.e. the
    /// minimum `s-t` edge cut of the overlay.
    pub fn disjointness_degree(&self) -> usize {
        max_unit_flow(self.base, self.flow, &self.edge_ids)
    }
}

/// Builds the overlay a strategy discovers for `f`. Unreachable flows yield
/// an empty overlay.
pub fn build_overlay<'g>(g: &'g ProbGraph, f: Flow, strategy: RdpStrategy) -> OverlayGraph<'g> {
    let edges: Vec<EdgeId> = match strategy {
        RdpStrategy::SingleShortestPath => lex_shortest_path(g, f, |_| true).unwrap_or_default(),
        RdpStrategy::KDisjoint(k) => {
            let mut removed = vec![false; g.edge_count()];
            let mut found = Vec::new();
            for _ in 0..k {
                let Some(path) = lex_shortest_path(g, f, |e| !removed[e]) else {
                    break;
                };
                for &e in &path {
                    removed[e] = true;
                }
                found.extend(path);
            }
            found
        }
        RdpStrategy::KLimited(k) => k_shortest_simple_paths(g, f, k).into_iter().flatten().collect(),
        RdpStrategy::FullMultipath => (0..g.edge_count()).collect(),
    };
    OverlayGraph::from_edges(g, f, edges)
}

/// Overlay for `f` read from routing tables: starting at `s`, follow every
/// entry toward `t` breadth first. Entries never reached from `s` are
/// ignored.
pub fn overlay_from_tables<'g>(
    g: &'g ProbGraph,
    dump: &RoutingTableDump,
    f: Flow,
) -> Result<OverlayGraph<'g>> {
    g.check_flow(f)?;
    let n = g.node_count();
    let mut next_hops: Vec<Vec<EdgeId>> = vec![Vec::new(); n];
    for entry in &dump.entries {
        for v in [entry.node, entry.destination, entry.next_hop] {
            if v.0 >= n {
                return Err(Error::NodeOutOfRange { index: v.0, n });
            }
        }
        let edge = g
            .find_edge(entry.node, entry.next_hop)
            .ok_or(Error::InconsistentDump {
                node: entry.node.0,
                next_hop: entry.next_hop.0,
            })?;
        if entry.destination == f.t {
            next_hops[entry.node.0].push(edge);
        }
    }

    let mut visited = vec![false; n];
    visited[f.s.0] = true;
    let mut queue = VecDeque::from([f.s]);
    let mut edges = Vec::new();
    while let Some(u) = queue.pop_front() {
        if u == f.t {
            continue;
        }
        for &e in &next_hops[u.0] {
            edges.push(e);
            let v = g.edge(e).head;
            if !visited[v.0] {
                visited[v.0] = true;
                queue.push_back(v);
            }
        }
    }
    Ok(OverlayGraph::from_edges(g, f, edges))
}

/// Hop-count shortest `s -> t` path over usable edges whose node sequence is
/// lexicographically smallest among all shortest paths.
pub(crate) fn lex_shortest_path(
    g: &ProbGraph,
    f: Flow,
    usable: impl Fn(EdgeId) -> bool,
) -> Option<Vec<EdgeId>> {
    let to_t = g.bfs_to(f.t, &usable);
    let mut remaining = to_t[f.s.0]?;
    let mut path = Vec::with_capacity(remaining);
    let mut u = f.s;
    while remaining > 0 {
        let e = g
            .out_edges(u)
            .iter()
            .copied()
            .filter(|&e| usable(e) && to_t[g.edge(e).head.0] == Some(remaining - 1))
            .min_by_key(|&e| g.edge(e).head)?;
        path.push(e);
        u = g.edge(e).head;
        remaining -= 1;
    }
    Some(path)
}

/// The first `k` loop-free `s -> t` paths ordered by hop count, then by node
/// sequence.
///
/// Best-first search over partial paths keyed by (length so far plus exact
/// remaining distance avoiding already visited nodes, node sequence). Every
/// queued partial path can be completed, and complete paths leave the queue
/// in key order.
pub fn k_shortest_simple_paths(g: &ProbGraph, f: Flow, k: usize) -> Vec<Vec<EdgeId>> {
    let mut found = Vec::new();
    if k == 0 || g.hop_distance(f).is_none() {
        return found;
    }
    let n = g.node_count();
    let start = g.hop_distance(f).unwrap_or(0);
    let mut heap = BinaryHeap::new();
    heap.push(Reverse((start, vec![f.s.0], Vec::<EdgeId>::new())));
    let mut on_path = vec![false; n];
    while let Some(Reverse((_, nodes, edges))) = heap.pop() {
        let u = *nodes.last().unwrap_or(&f.s.0);
        if u == f.t.0 {
            found.push(edges);
            if found.len() == k {
                break;
            }
            continue;
        }
        on_path.iter_mut().for_each(|x| *x = false);
        for &v in &nodes {
            on_path[v] = true;
        }
        let to_t = g.bfs_to(f.t, |e| {
            let edge = g.edge(e);
            !on_path[edge.tail.0] && !on_path[edge.head.0]
        });
        for &e in g.out_edges(NodeId(u)) {
            let w = g.edge(e).head.0;
            if on_path[w] {
                continue;
            }
            if let Some(rest) = to_t[w] {
                let mut child_nodes = nodes.clone();
                child_nodes.push(w);
                let mut child_edges = edges.clone();
                child_edges.push(e);
                let key = child_edges.len() + rest;
                heap.push(Reverse((key, child_nodes, child_edges)));
            }
        }
    }
    found
}

/// Unit-capacity max flow by breadth-first augmenting paths.
fn max_unit_flow(g: &ProbGraph, f: Flow, edges: &[EdgeId]) -> usize {
    if edges.is_empty() {
        return 0;
    }
    let n = g.node_count();
    // Arc 2i is overlay edge i, arc 2i+1 its residual reverse.
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut to = Vec::with_capacity(edges.len() * 2);
    let mut cap = Vec::with_capacity(edges.len() * 2);
    for &e in edges {
        let edge = g.edge(e);
        adj[edge.tail.0].push(to.len());
        to.push(edge.head.0);
        cap.push(1u8);
        adj[edge.head.0].push(to.len());
        to.push(edge.tail.0);
        cap.push(0u8);
    }
    let mut flow = 0;
    loop {
        let mut via = vec![usize::MAX; n];
        let mut seen = vec![false; n];
        seen[f.s.0] = true;
        let mut queue = VecDeque::from([f.s.0]);
        while let Some(u) = queue.pop_front() {
            if u == f.t.0 {
                break;
            }
            for &a in &adj[u] {
                let v = to[a];
                if cap[a] > 0 && !seen[v] {
                    seen[v] = true;
                    via[v] = a;
                    queue.push_back(v);
                }
            }
        }
        if !seen[f.t.0] {
            return flow;
        }
        let mut v = f.t.0;
        while v != f.s.0 {
            let a = via[v];
            cap[a] -= 1;
            cap[a ^ 1] += 1;
            v = to[a ^ 1];
        }
        flow += 1;
    }
}
