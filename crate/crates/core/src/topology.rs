//! Physical topologies: density-controlled unit-disk graphs and full meshes.
//!
//! Random placement uses `ChaCha8Rng` seeded with `seed_from_u64(seed)`.
//! Each wireless link becomes two opposite directed edges.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{NodeId, ProbGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Shape {
    #[default]
    Circle,
    Square,
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Shape::Circle => "circle",
            Shape::Square => "square",
        })
    }
}

impl FromStr for Shape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "circle" => Ok(Shape::Circle),
            "square" => Ok(Shape::Square),
            other => Err(Error::InvalidParameter(format!("unknown shape '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TopologySpec {
    pub n: usize,
    /// nodes/km²
    pub delta: f64,
    /// km
    pub r: f64,
    pub shape: Shape,
    pub seed: u64,
    pub p_fail_default: f64,
}

impl TopologySpec {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidParameter(format!(
                "topology needs at least 2 nodes, got {}",
                self.n
            )));
        }
        if !(self.delta > 0.0 && self.delta.is_finite()) || !(self.r > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "density and range must be positive (density={}, range={})",
                self.delta, self.r
            )));
        }
        if !(0.0..=1.0).contains(&self.p_fail_default) {
            return Err(Error::InvalidProbability(self.p_fail_default));
        }
        Ok(())
    }

    pub fn area(&self) -> f64 {
        self.n as f64 / self.delta
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Topology {
    pub graph: ProbGraph,
    pub coords: Vec<(f64, f64)>,
}

pub fn generate_random_geometric(spec: &TopologySpec) -> Result<Topology> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    sample_geometric(spec, &mut rng)
}

/// Keeps drawing placements from one seeded stream until no node is
/// isolated. Returns the topology and the number of rejected placements.
pub fn generate_without_isolated(spec: &TopologySpec, max_attempts: usize) -> Result<(Topology, usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    for rejected in 0..max_attempts.max(1) {
        let topo = sample_geometric(spec, &mut rng)?;
        let (_, min, _) = degree_stats(&topo.graph);
        if min > 0 {
            return Ok((topo, rejected));
        }
    }
    Err(Error::InvalidParameter(format!(
        "no placement without isolated nodes in {max_attempts} attempts"
    )))
}

fn sample_geometric(spec: &TopologySpec, rng: &mut ChaCha8Rng) -> Result<Topology> {
    spec.validate()?;
    let area = spec.area();
    let coords: Vec<(f64, f64)> = (0..spec.n)
        .map(|_| match spec.shape {
            Shape::Circle => {
                let radius = (area / PI).sqrt();
                let rho = radius * rng.random::<f64>().sqrt();
                let theta = 2.0 * PI * rng.random::<f64>();
                (rho * theta.cos(), rho * theta.sin())
            }
            Shape::Square => {
                let side = area.sqrt();
                (side * rng.random::<f64>(), side * rng.random::<f64>())
            }
        })
        .collect();
    let r2 = spec.r * spec.r;
    let mut edges = Vec::new();
    for (u, &(xu, yu)) in coords.iter().enumerate() {
        for (v, &(xv, yv)) in coords.iter().enumerate() {
            if u != v && (xu - xv).powi(2) + (yu - yv).powi(2) <= r2 {
                edges.push((u, v, spec.p_fail_default));
            }
        }
    }
    Ok(Topology {
        graph: ProbGraph::build(spec.n, &edges)?,
        coords,
    })
}

pub fn generate_full_mesh(n: usize, p_fail: f64) -> Result<ProbGraph> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("mesh needs at least 2 nodes, got {n}")));
    }
    let edges: Vec<_> = (0..n)
        .flat_map(|u| (0..n).filter(move |&v| v != u).map(move |v| (u, v, p_fail)))
        .collect();
    ProbGraph::build(n, &edges)
}

/// (mean, min, max) out-degree.
pub fn degree_stats(g: &ProbGraph) -> (f64, usize, usize) {
    let degrees = (0..g.node_count()).map(|v| g.out_degree(NodeId(v)));
    let min = degrees.clone().min().unwrap_or(0);
    let max = degrees.max().unwrap_or(0);
    (g.edge_count() as f64 / g.node_count() as f64, min, max)
}
