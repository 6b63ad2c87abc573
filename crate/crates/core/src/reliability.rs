//! Terminal-pair routing reliability (TPRR) of an overlay graph: the
//! probability that at least one discovered `s -> t` route has all of its
//! links up.
//!
//! Four routes to the same number:
//!
//! * [`tprr_exact`]: recursive edge factoring over a merged source set,
//!   memoized on (merged set, failed emitting edges).
//! * [`tprr_bruteforce`]: sum over all `2^m` edge states. Used as the oracle.
//! * [`cutset_spectrum`] + [`tprr_from_spectrum`]: counts of disconnecting
//!   edge subsets by size, evaluated for a uniform failure probability.
//! * [`tprr_montecarlo`]: seeded sampling for overlays too large to enumerate.

use std::collections::{BTreeMap, HashMap};

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{Flow, NodeId};
use crate::overlay::OverlayGraph;
use crate::rng::edge_uniform;

/// Default cap on the edge count for enumeration-based evaluation.
pub const DEFAULT_GUARD: usize = 30;
/// Enumeration indexes edge states with a `u64`.
pub const MAX_GUARD: usize = 62;

/// Overlay relabelled to dense local node ids.
struct Compact {
    n: usize,
    s: usize,
    t: usize,
    /// (tail, head, base edge id)
    edges: Vec<(usize, usize, usize)>,
    p: Vec<f64>,
    out: Vec<Vec<usize>>,
    inc: Vec<Vec<usize>>,
}

impl Compact {
    fn new(o: &OverlayGraph<'_>, p_override: Option<f64>) -> Self {
        let base = o.base();
        let Flow { s, t } = o.flow();
        let mut local: HashMap<NodeId, usize> = HashMap::new();
        let mut id = |v: NodeId| {
            let next = local.len();
            *local.entry(v).or_insert(next)
        };
        let (ls, lt) = (id(s), id(t));
        let mut edges = Vec::with_capacity(o.edge_count());
        let mut p = Vec::with_capacity(o.edge_count());
        for &e in o.edge_ids() {
            let edge = base.edge(e);
            edges.push((id(edge.tail), id(edge.head), e));
            p.push(p_override.unwrap_or(edge.p_fail));
        }
        let n = local.len();
        let mut out = vec![Vec::new(); n];
        let mut inc = vec![Vec::new(); n];
        for (i, &(u, v, _)) in edges.iter().enumerate() {
            out[u].push(i);
            inc[v].push(i);
        }
        Compact {
            n,
            s: ls,
            t: lt,
            edges,
            p,
            out,
            inc,
        }
    }

    fn m(&self) -> usize {
        self.edges.len()
    }

    /// Whether `t` is reachable from `s` when exactly the edges in `up` work.
    /// Requires at most 128 local nodes.
    fn connected_mask(&self, up: u64) -> bool {
        let mut reach: u128 = 1 << self.s;
        let mut frontier = reach;
        while frontier != 0 {
            let u = frontier.trailing_zeros() as usize;
            frontier &= frontier - 1;
            for &i in &self.out[u] {
                if up >> i & 1 == 1 {
                    let v = self.edges[i].1;
                    if reach >> v & 1 == 0 {
                        if v == self.t {
                            return true;
                        }
                        reach |= 1 << v;
                        frontier |= 1 << v;
                    }
                }
            }
        }
        reach >> self.t & 1 == 1
    }
}

fn check_guard(m: usize, guard: usize) -> Result<()> {
    let limit = guard.min(MAX_GUARD);
    if m > limit {
        return Err(Error::GuardExceeded { m, limit });
    }
    Ok(())
}

fn check_probability(p: Option<f64>) -> Result<()> {
    match p {
        Some(p) if !(0.0..=1.0).contains(&p) => Err(Error::InvalidProbability(p)),
        _ => Ok(()),
    }
}

/// Exact TPRR by summing the probability of every connected edge state.
///
/// Refuses overlays with more than `guard` edges.
pub fn tprr_bruteforce(o: &OverlayGraph<'_>, p_override: Option<f64>, guard: usize) -> Result<f64> {
    check_probability(p_override)?;
    check_guard(o.edge_count(), guard)?;
    let c = Compact::new(o, p_override);
    let m = c.m();
    // P(state) = low[state & lo_mask] * high[state >> lo_bits]
    let lo_bits = m / 2;
    let half_table = |range: std::ops::Range<usize>| -> Vec<f64> {
        let width = range.len();
        (0..1u64 << width)
            .map(|bits| {
                range
                    .clone()
                    .enumerate()
                    .map(|(j, i)| if bits >> j & 1 == 1 { 1.0 - c.p[i] } else { c.p[i] })
                    .product()
            })
            .collect()
    };
    let low = half_table(0..lo_bits);
    let high = half_table(lo_bits..m);
    let lo_mask = (1u64 << lo_bits) - 1;
    let mut total = Neumaier::default();
    for up in 0..1u64 << m {
        if c.connected_mask(up) {
            total.add(low[(up & lo_mask) as usize] * high[(up >> lo_bits) as usize]);
        }
    }
    Ok(total.value())
}

/// Compensated summation; a plain running sum over 2^m terms drifts by ~1e-12.
#[derive(Default)]
struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Exact TPRR by recursive factoring with source-set merging.
///
/// The working state is a set `SS` of nodes already known to be reached
/// from `s`, closed under absorption of nodes that cannot reach `t` without
/// passing through `SS`, plus the set of failed edges leaving `SS`. Each
/// step conditions on the links from `SS` into one outside node `v`: if any
/// works, `v` joins `SS`; otherwise those links are deleted.
pub fn tprr_exact(o: &OverlayGraph<'_>, p_override: Option<f64>) -> f64 {
    // An unlimited budget never fails.
    tprr_exact_budgeted(o, p_override, usize::MAX).unwrap_or(0.0)
}

/// [`tprr_exact`] that gives up after creating `max_states` memo entries.
pub fn tprr_exact_budgeted(
    o: &OverlayGraph<'_>,
    p_override: Option<f64>,
    max_states: usize,
) -> Result<f64> {
    check_probability(p_override)?;
    let c = Compact::new(o, p_override);
    let mut f = Factoring {
        c: &c,
        words_n: c.n.div_ceil(64),
        words_m: c.m().div_ceil(64).max(1),
        memo: HashMap::new(),
        max_states,
    };
    let mut ss = Bits::new(f.words_n);
    ss.insert(c.s);
    f.absorb(&mut ss);
    let dead = Bits::new(f.words_m);
    f.solve(ss, dead)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(words: usize) -> Self {
        Bits(vec![0; words])
    }

    fn contains(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }

    fn insert(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
}

struct Factoring<'a> {
    c: &'a Compact,
    words_n: usize,
    words_m: usize,
    memo: HashMap<(Bits, Bits), f64>,
    max_states: usize,
}

impl Factoring<'_> {
    /// Adds to `ss` every node that cannot reach `t` while avoiding `ss`.
    fn absorb(&self, ss: &mut Bits) {
        let c = self.c;
        if ss.contains(c.t) {
            return;
        }
        let mut alive = Bits::new(self.words_n);
        alive.insert(c.t);
        let mut stack = vec![c.t];
        while let Some(v) = stack.pop() {
            for &i in &c.inc[v] {
                let u = c.edges[i].0;
                if !alive.contains(u) && !ss.contains(u) {
                    alive.insert(u);
                    stack.push(u);
                }
            }
        }
        for v in 0..c.n {
            if !alive.contains(v) {
                ss.insert(v);
            }
        }
    }

    fn solve(&mut self, ss: Bits, dead: Bits) -> Result<f64> {
        let c = self.c;
        if ss.contains(c.t) {
            return Ok(1.0);
        }
        // Failed edges matter only while they still leave SS.
        let mut dead_key = Bits::new(self.words_m);
        let mut target = usize::MAX;
        for v in 0..c.n {
            if !ss.contains(v) {
                continue;
            }
            for &i in &c.out[v] {
                let head = c.edges[i].1;
                if ss.contains(head) {
                    continue;
                }
                if dead.contains(i) {
                    dead_key.insert(i);
                } else {
                    target = target.min(head);
                }
            }
        }
        if target == usize::MAX {
            return Ok(0.0);
        }
        let key = (ss, dead_key);
        if let Some(&r) = self.memo.get(&key) {
            return Ok(r);
        }
        if self.memo.len() >= self.max_states {
            return Err(Error::BudgetExceeded(self.max_states));
        }
        let (ss, dead_key) = key;

        let mut all_fail = 1.0;
        let mut group = Vec::new();
        for &i in &c.inc[target] {
            if ss.contains(c.edges[i].0) && !dead_key.contains(i) {
                all_fail *= c.p[i];
                group.push(i);
            }
        }

        let mut r = 0.0;
        if all_fail < 1.0 {
            let mut joined = ss.clone();
            joined.insert(target);
            self.absorb(&mut joined);
            r += (1.0 - all_fail) * self.solve(joined, dead_key.clone())?;
        }
        if all_fail > 0.0 {
            let mut failed = dead_key.clone();
            for &i in &group {
                failed.insert(i);
            }
            r += all_fail * self.solve(ss.clone(), failed)?;
        }
        self.memo.insert((ss, dead_key), r);
        Ok(r)
    }
}

/// Counts `C(i)` of edge subsets of size `i` whose failure (all other edges
/// up) disconnects `s` from `t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CutsetSpectrum {
    /// Overlay edge count.
    pub m: usize,
    /// Minimum cut size; 0 when the overlay is already disconnected.
    pub c: usize,
    /// `counts[i] = C(i)` for `i` in `0..=m`.
    pub counts: Vec<u64>,
}

impl CutsetSpectrum {
    pub fn count(&self, i: usize) -> u64 {
        self.counts.get(i).copied().unwrap_or(0)
    }

    /// The overlay has no working route even with every edge up.
    pub fn is_degenerate(&self) -> bool {
        self.c == 0
    }
}

pub fn cutset_spectrum(o: &OverlayGraph<'_>, guard: usize) -> Result<CutsetSpectrum> {
    check_guard(o.edge_count(), guard)?;
    let c = Compact::new(o, None);
    let m = c.m();
    let all = if m == 64 { u64::MAX } else { (1u64 << m) - 1 };
    let mut counts = vec![0u64; m + 1];
    for up in 0..1u64 << m {
        if !c.connected_mask(up) {
            counts[(all & !up).count_ones() as usize] += 1;
        }
    }
    let min_cut = counts.iter().position(|&n| n > 0).unwrap_or(m);
    Ok(CutsetSpectrum {
        m,
        c: min_cut,
        counts,
    })
}

/// `1 - sum_{i=c}^{m} C(i) p^i (1-p)^(m-i)`.
pub fn tprr_from_spectrum(spec: &CutsetSpectrum, p: f64) -> f64 {
    let q = 1.0 - p;
    let mut failed = Neumaier::default();
    for i in spec.c..=spec.m {
        failed.add(spec.count(i) as f64 * p.powi(i as i32) * q.powi((spec.m - i) as i32));
    }
    1.0 - failed.value()
}

/// `R(p) = sum_k coeffs[k] p^k` with exact integer coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReliabilityPolynomial {
    pub coeffs: Vec<i128>,
}

impl ReliabilityPolynomial {
    pub fn from_spectrum(spec: &CutsetSpectrum) -> Self {
        let m = spec.m;
        let mut coeffs = vec![0i128; m + 1];
        coeffs[0] = 1;
        for i in spec.c..=m {
            let count = spec.count(i) as i128;
            if count == 0 {
                continue;
            }
            // p^i (1-p)^(m-i) = sum_j binom(m-i, j) (-1)^j p^(i+j)
            let mut binom: i128 = 1;
            for j in 0..=m - i {
                let sign = if j % 2 == 0 { 1 } else { -1 };
                coeffs[i + j] -= sign * count * binom;
                binom = binom * (m - i - j) as i128 / (j + 1) as i128;
            }
        }
        ReliabilityPolynomial { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn eval(&self, p: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &a| acc * p + a as f64)
    }
}

pub fn reliability_polynomial(o: &OverlayGraph<'_>, guard: usize) -> Result<ReliabilityPolynomial> {
    Ok(ReliabilityPolynomial::from_spectrum(&cutset_spectrum(o, guard)?))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub trials: u64,
    pub seed: u64,
}

/// Fraction of sampled edge states in which `t` is reachable.
///
/// Each trial draws a key from a `ChaCha8Rng` seeded with `seed`; the state
/// of base edge `e` in that trial depends only on (key, `e`). Two overlays of
/// the same physical graph sampled with one seed therefore see identical
/// link states, and a sub-overlay never scores above its super-overlay.
pub fn tprr_montecarlo(
    o: &OverlayGraph<'_>,
    p_override: Option<f64>,
    trials: u64,
    seed: u64,
) -> Result<MonteCarloEstimate> {
    check_probability(p_override)?;
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be positive".into()));
    }
    let c = Compact::new(o, p_override);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = vec![u64::MAX; c.n];
    let mut stack = Vec::with_capacity(c.n);
    let mut hits = 0u64;
    for trial in 0..trials {
        let key = rng.next_u64();
        stack.clear();
        stack.push(c.s);
        seen[c.s] = trial;
        let mut reached = false;
        'search: while let Some(u) = stack.pop() {
            for &i in &c.out[u] {
                let (_, v, base_id) = c.edges[i];
                if seen[v] == trial || edge_uniform(key, base_id) < c.p[i] {
                    continue;
                }
                if v == c.t {
                    reached = true;
                    break 'search;
                }
                seen[v] = trial;
                stack.push(v);
            }
        }
        hits += reached as u64;
    }
    let estimate = hits as f64 / trials as f64;
    Ok(MonteCarloEstimate {
        estimate,
        std_error: (estimate * (1.0 - estimate) / trials as f64).sqrt(),
        trials,
        seed,
    })
}

/// Probability `z(s, t)` that a data flow occurs between each ordered pair.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowWeights {
    n: usize,
    z: Vec<f64>,
}

impl FlowWeights {
    pub fn uniform(n: usize, z: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&z) {
            return Err(Error::InvalidProbability(z));
        }
        let mut w = FlowWeights {
            n,
            z: vec![z; n * n],
        };
        for v in 0..n {
            w.z[v * n + v] = 0.0;
        }
        Ok(w)
    }

    /// Weight 1 on the listed flows, 0 elsewhere.
    pub fn only(n: usize, flows: &[Flow]) -> Result<Self> {
        let mut w = FlowWeights::uniform(n, 0.0)?;
        for &f in flows {
            w.set(f, 1.0)?;
        }
        Ok(w)
    }

    pub fn set(&mut self, f: Flow, z: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&z) {
            return Err(Error::InvalidProbability(z));
        }
        for v in [f.s, f.t] {
            if v.0 >= self.n {
                return Err(Error::NodeOutOfRange { index: v.0, n: self.n });
            }
        }
        self.z[f.s.0 * self.n + f.t.0] = z;
        Ok(())
    }

    pub fn get(&self, f: Flow) -> f64 {
        self.z[f.s.0 * self.n + f.t.0]
    }
}

/// Mean TPRR `sum_{s != t} z(s,t) R(s,t) / (n (n - 1))`.
pub fn mean_tprr(per_flow: &BTreeMap<Flow, f64>, weights: &FlowWeights, n: usize) -> Result<f64> {
    if n < 2 || weights.n != n {
        return Err(Error::InvalidParameter(format!(
            "mean TPRR needs n >= 2 and weights for {n} nodes"
        )));
    }
    let mut total = 0.0;
    for s in 0..n {
        for t in (0..n).filter(|&t| t != s) {
            let f = Flow {
                s: NodeId(s),
                t: NodeId(t),
            };
            let z = weights.get(f);
            if z == 0.0 {
                continue;
            }
            let r = per_flow.get(&f).ok_or(Error::MissingFlow { s, t })?;
            total += z * r;
        }
    }
    Ok(total / (n * (n - 1)) as f64)
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::*;
    use crate::graph::ProbGraph;
    use crate::overlay::{build_overlay, RdpStrategy};
    use crate::topology::generate_full_mesh;

    /// State enumeration over `BTreeSet`s and `ProbGraph::is_connected`,
    /// sharing no code with the bitmask paths above.
    fn oracle(o: &OverlayGraph<'_>, p: Option<f64>) -> f64 {
        let ids = o.edge_ids();
        let mut total = 0.0;
        for state in 0..1u32 << ids.len() {
            let mut up = BTreeSet::new();
            let mut prob = 1.0;
            for (j, &e) in ids.iter().enumerate() {
                let pe = p.unwrap_or(o.base().edge(e).p_fail);
                if state >> j & 1 == 1 {
                    up.insert(e);
                    prob *= 1.0 - pe;
                } else {
                    prob *= pe;
                }
            }
            if o.base().is_connected(o.flow(), &up) {
                total += prob;
            }
        }
        total
    }

    fn whole<'g>(g: &'g ProbGraph, s: usize, t: usize) -> OverlayGraph<'g> {
        OverlayGraph::from_edges(g, Flow::new(s, t).unwrap(), 0..g.edge_count())
    }

    fn single_edge() -> ProbGraph {
        ProbGraph::build(2, &[(0, 1, 0.3)]).unwrap()
    }

    fn chain() -> ProbGraph {
        ProbGraph::build(3, &[(0, 1, 0.5), (1, 2, 0.5)]).unwrap()
    }

    fn parallel_paths() -> ProbGraph {
        ProbGraph::build(4, &[(0, 1, 0.5), (0, 2, 0.5), (1, 3, 0.5), (2, 3, 0.5)]).unwrap()
    }

    fn bridge() -> ProbGraph {
        ProbGraph::build(
            4,
            &[(0, 1, 0.5), (0, 2, 0.5), (1, 3, 0.5), (2, 3, 0.5), (1, 2, 0.5)],
        )
        .unwrap()
    }

    #[test]
    fn oracle_reference_values() {
        // Frozen from the oracle; closed forms noted alongside.
        assert!((oracle(&whole(&single_edge(), 0, 1), None) - 0.7).abs() < 1e-15);
        assert!((oracle(&whole(&chain(), 0, 2), None) - 0.25).abs() < 1e-15);
        // 1 - (1 - (1-p)^2)^2 at p = 1/2
        assert!((oracle(&whole(&parallel_paths(), 0, 3), None) - 0.4375).abs() < 1e-15);
        assert!((oracle(&whole(&bridge(), 0, 3), None) - 0.46875).abs() < 1e-15);
    }

    #[test]
    fn bruteforce_worked_values() {
        let g = single_edge();
        assert!((tprr_bruteforce(&whole(&g, 0, 1), None, DEFAULT_GUARD).unwrap() - 0.7).abs() < 1e-15);
        let g = chain();
        assert!((tprr_bruteforce(&whole(&g, 0, 2), None, DEFAULT_GUARD).unwrap() - 0.25).abs() < 1e-15);
        let g = bridge();
        let r = tprr_bruteforce(&whole(&g, 0, 3), None, DEFAULT_GUARD).unwrap();
        assert!((r - 0.46875).abs() < 1e-15);
    }

    #[test]
    fn bruteforce_guard() {
        let g = bridge();
        let o = whole(&g, 0, 3);
        assert!(matches!(
            tprr_bruteforce(&o, None, 4),
            Err(Error::GuardExceeded { m: 5, limit: 4 })
        ));
        assert!(matches!(cutset_spectrum(&o, 3), Err(Error::GuardExceeded { .. })));
    }

    #[test]
    fn exact_worked_values() {
        assert!((tprr_exact(&whole(&single_edge(), 0, 1), None) - 0.7).abs() < 1e-15);
        assert!((tprr_exact(&whole(&parallel_paths(), 0, 3), None) - 0.4375).abs() < 1e-15);
        assert!((tprr_exact(&whole(&bridge(), 0, 3), None) - 0.46875).abs() < 1e-15);
        for p in [0.0, 0.1, 0.37, 0.9, 1.0] {
            let expect = (1.0 - p) * (1.0 - p);
            assert!((tprr_exact(&whole(&chain(), 0, 2), Some(p)) - expect).abs() < 1e-15);
        }
    }

    #[test]
    fn exact_handles_cycles_and_back_edges() {
        let g = ProbGraph::build(
            5,
            &[
                (0, 1, 0.2),
                (1, 0, 0.3),
                (1, 2, 0.4),
                (2, 1, 0.1),
                (2, 4, 0.25),
                (0, 3, 0.6),
                (3, 2, 0.5),
                (3, 4, 0.05),
                (4, 3, 0.7),
            ],
        )
        .unwrap();
        for (s, t) in [(0, 4), (4, 0), (2, 3), (3, 1)] {
            let o = whole(&g, s, t);
            let expect = oracle(&o, None);
            assert!((tprr_exact(&o, None) - expect).abs() < 1e-12, "{s}->{t}");
        }
    }

    #[test]
    fn exact_budget() {
        let g = bridge();
        let o = whole(&g, 0, 3);
        assert!(matches!(
            tprr_exact_budgeted(&o, None, 1),
            Err(Error::BudgetExceeded(1))
        ));
        assert!(tprr_exact_budgeted(&o, None, 1000).is_ok());
    }

    #[test]
    fn spectra() {
        let s = cutset_spectrum(&whole(&chain(), 0, 2), DEFAULT_GUARD).unwrap();
        assert_eq!((s.m, s.c), (2, 1));
        assert_eq!(s.counts, vec![0, 2, 1]);
        assert!((tprr_from_spectrum(&s, 0.5) - 0.25).abs() < 1e-15);

        let s = cutset_spectrum(&whole(&parallel_paths(), 0, 3), DEFAULT_GUARD).unwrap();
        assert_eq!((s.m, s.c), (4, 2));
        assert_eq!(&s.counts[2..], &[4, 4, 1]);
        assert!((tprr_from_spectrum(&s, 0.5) - 0.4375).abs() < 1e-15);
        assert_eq!(tprr_from_spectrum(&s, 0.0), 1.0);
    }

    #[test]
    fn empty_overlay_is_degenerate() {
        let g = chain();
        let o = whole(&g, 2, 0);
        assert!(o.is_empty());
        let s = cutset_spectrum(&o, DEFAULT_GUARD).unwrap();
        assert!(s.is_degenerate());
        assert_eq!((s.m, s.c, s.counts.clone()), (0, 0, vec![1]));
        for p in [0.0, 0.5, 1.0] {
            assert_eq!(tprr_from_spectrum(&s, p), 0.0);
            assert_eq!(tprr_exact(&o, Some(p)), 0.0);
            assert_eq!(tprr_bruteforce(&o, Some(p), DEFAULT_GUARD).unwrap(), 0.0);
        }
        assert_eq!(tprr_montecarlo(&o, Some(0.0), 100, 1).unwrap().estimate, 0.0);
    }

    #[test]
    fn polynomials() {
        let p = reliability_polynomial(&whole(&single_edge(), 0, 1), DEFAULT_GUARD).unwrap();
        assert_eq!(p.coeffs, vec![1, -1]);
        let p = reliability_polynomial(&whole(&chain(), 0, 2), DEFAULT_GUARD).unwrap();
        assert_eq!(p.coeffs, vec![1, -2, 1]);
        // 1 - (1 - (1-p)^2)^2 = 1 - 4p^2 + 4p^3 - p^4
        let g = parallel_paths();
        let o = whole(&g, 0, 3);
        let p = reliability_polynomial(&o, DEFAULT_GUARD).unwrap();
        assert_eq!(p.coeffs, vec![1, 0, -4, 4, -1]);
        for x in [0.1, 0.3, 0.5, 0.7, 0.9] {
            assert!((p.eval(x) - oracle(&o, Some(x))).abs() < 1e-12);
        }
        assert!((p.eval(0.5) - 0.4375).abs() < 1e-15);
    }

    #[test]
    fn montecarlo_boundaries_and_seeds() {
        let g = single_edge();
        let o = whole(&g, 0, 1);
        let est = tprr_montecarlo(&o, Some(0.0), 1000, 3).unwrap();
        assert_eq!((est.estimate, est.std_error), (1.0, 0.0));
        let est = tprr_montecarlo(&o, Some(1.0), 1000, 3).unwrap();
        assert_eq!(est.estimate, 0.0);
        assert_eq!(
            tprr_montecarlo(&o, None, 500, 9).unwrap(),
            tprr_montecarlo(&o, None, 500, 9).unwrap()
        );
        assert!(tprr_montecarlo(&o, None, 0, 9).is_err());
    }

    #[test]
    fn montecarlo_chain_within_three_sigma() {
        let g = chain();
        let est = tprr_montecarlo(&whole(&g, 0, 2), Some(0.5), 1_000_000, 2024).unwrap();
        assert!(
            (est.estimate - 0.25).abs() <= 3.0 * est.std_error,
            "{est:?}"
        );
    }

    #[test]
    fn mean_tprr_examples() {
        let f01 = Flow::new(0, 1).unwrap();
        let f10 = Flow::new(1, 0).unwrap();
        let w = FlowWeights::uniform(2, 1.0).unwrap();
        let same = BTreeMap::from([(f01, 0.9), (f10, 0.9)]);
        assert!((mean_tprr(&same, &w, 2).unwrap() - 0.9).abs() < 1e-15);
        let split = BTreeMap::from([(f01, 1.0), (f10, 0.0)]);
        assert_eq!(mean_tprr(&split, &w, 2).unwrap(), 0.5);
        let missing = BTreeMap::from([(f01, 1.0)]);
        assert!(matches!(
            mean_tprr(&missing, &w, 2),
            Err(Error::MissingFlow { s: 1, t: 0 })
        ));
        let w = FlowWeights::only(2, &[f01]).unwrap();
        assert_eq!(mean_tprr(&missing, &w, 2).unwrap(), 0.5);
    }

    #[test]
    fn mesh_single_path_mean_is_one_hop() {
        let g = generate_full_mesh(4, 0.2).unwrap();
        let w = FlowWeights::uniform(4, 1.0).unwrap();
        for p in [0.0, 0.25, 0.6] {
            let per_flow: BTreeMap<Flow, f64> = g
                .all_flows()
                .into_iter()
                .map(|f| {
                    let o = build_overlay(&g, f, RdpStrategy::SingleShortestPath);
                    (f, tprr_exact(&o, Some(p)))
                })
                .collect();
            assert!((mean_tprr(&per_flow, &w, 4).unwrap() - (1.0 - p)).abs() < 1e-15);
        }
    }
}
