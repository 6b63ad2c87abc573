//! Probabilistic directed graphs `G = (V, E, P)`.
//!
//! Every edge carries the probability that the link is down when a
//! transmission is attempted. Failures of distinct edges are independent.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub usize);

impl NodeId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Position of an edge in its graph's edge list.
pub type EdgeId = usize;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub tail: NodeId,
    pub head: NodeId,
    pub p_fail: f64,
}

/// An ordered (source, destination) pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Flow {
    pub s: NodeId,
    pub t: NodeId,
}

impl Flow {
    pub fn new(s: usize, t: usize) -> Result<Self> {
        if s == t {
            return Err(Error::DegenerateFlow(s));
        }
        Ok(Flow {
            s: NodeId(s),
            t: NodeId(t),
        })
    }
}

impl fmt::Display for Flow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}->{}", self.s, self.t)
    }
}

/// Simple directed graph with a failure probability on every edge.
///
/// Immutable once built. Edge ids follow insertion order.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbGraph {
    n: usize,
    edges: Vec<Edge>,
    out: Vec<Vec<EdgeId>>,
    inc: Vec<Vec<EdgeId>>,
}

impl ProbGraph {
    pub fn build(n: usize, edge_list: &[(usize, usize, f64)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyGraph);
        }
        let mut seen = HashSet::with_capacity(edge_list.len());
        let mut edges = Vec::with_capacity(edge_list.len());
        let mut out = vec![Vec::new(); n];
        let mut inc = vec![Vec::new(); n];
        for &(tail, head, p_fail) in edge_list {
            for index in [tail, head] {
                if index >= n {
                    return Err(Error::NodeOutOfRange { index, n });
                }
            }
            if tail == head {
                return Err(Error::SelfLoop(tail));
            }
            if !(0.0..=1.0).contains(&p_fail) {
                return Err(Error::InvalidProbability(p_fail));
            }
            if !seen.insert((tail, head)) {
                return Err(Error::DuplicateEdge { tail, head });
            }
            let id = edges.len();
            out[tail].push(id);
            inc[head].push(id);
            edges.push(Edge {
                tail: NodeId(tail),
                head: NodeId(head),
                p_fail,
            });
        }
        Ok(ProbGraph { n, edges, out, inc })
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> &Edge {
        &self.edges[id]
    }

    pub fn out_edges(&self, v: NodeId) -> &[EdgeId] {
        &self.out[v.0]
    }

    pub fn in_edges(&self, v: NodeId) -> &[EdgeId] {
        &self.inc[v.0]
    }

    pub fn find_edge(&self, tail: NodeId, head: NodeId) -> Option<EdgeId> {
        self.out
            .get(tail.0)?
            .iter()
            .copied()
            .find(|&e| self.edges[e].head == head)
    }

    pub fn check_flow(&self, f: Flow) -> Result<()> {
        for v in [f.s, f.t] {
            if v.0 >= self.n {
                return Err(Error::NodeOutOfRange {
                    index: v.0,
                    n: self.n,
                });
            }
        }
        if f.s == f.t {
            return Err(Error::DegenerateFlow(f.s.0));
        }
        Ok(())
    }

    /// Whether `t` can be reached from `s` using only the edges in `up`.
    pub fn is_connected(&self, f: Flow, up: &BTreeSet<EdgeId>) -> bool {
        self.is_connected_with(f, |e| up.contains(&e))
    }

    pub fn is_connected_with(&self, f: Flow, up: impl Fn(EdgeId) -> bool) -> bool {
        let mut seen = vec![false; self.n];
        let mut stack = vec![f.s];
        seen[f.s.0] = true;
        while let Some(u) = stack.pop() {
            if u == f.t {
                return true;
            }
            for &e in &self.out[u.0] {
                let v = self.edges[e].head;
                if !seen[v.0] && up(e) {
                    seen[v.0] = true;
                    stack.push(v);
                }
            }
        }
        false
    }

    /// Hop count of a shortest directed `s -> t` path, `None` when `t` is
    /// unreachable.
    pub fn hop_distance(&self, f: Flow) -> Option<usize> {
        self.bfs_from(f.s, |_| true)[f.t.0]
    }

    /// Hop distances from `src` along edges accepted by `usable`.
    pub fn bfs_from(&self, src: NodeId, usable: impl Fn(EdgeId) -> bool) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n];
        dist[src.0] = Some(0);
        let mut queue = VecDeque::from([src]);
        while let Some(u) = queue.pop_front() {
            let du = dist[u.0].unwrap_or(0);
            for &e in &self.out[u.0] {
                let v = self.edges[e].head;
                if dist[v.0].is_none() && usable(e) {
                    dist[v.0] = Some(du + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// Hop distances to `dst` (along edge direction) over edges accepted by
    /// `usable`.
    pub fn bfs_to(&self, dst: NodeId, usable: impl Fn(EdgeId) -> bool) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n];
        dist[dst.0] = Some(0);
        let mut queue = VecDeque::from([dst]);
        while let Some(v) = queue.pop_front() {
            let dv = dist[v.0].unwrap_or(0);
            for &e in &self.inc[v.0] {
                let u = self.edges[e].tail;
                if dist[u.0].is_none() && usable(e) {
                    dist[u.0] = Some(dv + 1);
                    queue.push_back(u);
                }
            }
        }
        dist
    }

    pub fn out_degree(&self, v: NodeId) -> usize {
        self.out[v.0].len()
    }

    /// All ordered pairs `(s, t)` with `s != t`, in lexicographic order.
    pub fn all_flows(&self) -> Vec<Flow> {
        let n = self.n;
        (0..n)
            .flat_map(|s| {
                (0..n).filter(move |&t| t != s).map(move |t| Flow {
                    s: NodeId(s),
                    t: NodeId(t),
                })
            })
            .collect()
    }
}
