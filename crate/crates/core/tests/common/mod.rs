#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use tprr::{Flow, ProbGraph};

/// Random simple digraph on `n` nodes with up to `max_edges` edges and
/// failure probabilities drawn from {0, 1, uniform} mixes.
pub fn random_graph(rng: &mut impl Rng, n: usize, max_edges: usize) -> ProbGraph {
    let mut pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (0..n).filter(move |&v| v != u).map(move |v| (u, v)))
        .collect();
    pairs.shuffle(rng);
    let m = rng.random_range(1..=max_edges.min(pairs.len()));
    let edges: Vec<_> = pairs[..m]
        .iter()
        .map(|&(u, v)| {
            let p = match rng.random_range(0..10) {
                0 => 0.0,
                1 => 1.0,
                _ => rng.random::<f64>(),
            };
            (u, v, p)
        })
        .collect();
    ProbGraph::build(n, &edges).unwrap()
}

/// Random graph whose (0 -> n-1) overlay over all edges is non-empty.
pub fn random_connected_case(rng: &mut impl Rng, max_nodes: usize, max_edges: usize) -> (ProbGraph, Flow) {
    loop {
        let n = rng.random_range(2..=max_nodes);
        let g = random_graph(rng, n, max_edges);
        let f = Flow::new(0, n - 1).unwrap();
        if g.hop_distance(f).is_some() {
            return (g, f);
        }
    }
}
