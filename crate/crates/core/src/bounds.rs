//! Upper bounds on the TPRR of any shortest-path route discovery.
//!
//! A shortest-path RDP discovers a single route, so its TPRR is that of a
//! series system: `(1 - p)^h` where `h` is the overlay hop count, which is
//! never below the physical hop distance. Lengths are in km, densities in
//! nodes/km².

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::graph::{Flow, ProbGraph};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetworkParams {
    pub n: usize,
    /// Node density, nodes/km².
    pub delta: f64,
    /// Transmission range, km.
    pub r: f64,
    /// Deployment area, km².
    pub area: f64,
}

impl NetworkParams {
    /// Parameters with the area implied by the density, `A = n / delta`.
    pub fn from_density(n: usize, delta: f64, r: f64) -> Result<Self> {
        if n == 0 || !(delta > 0.0) || !(r > 0.0) || !delta.is_finite() || !r.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "network parameters must be positive (n={n}, density={delta}, range={r})"
            )));
        }
        Ok(NetworkParams {
            n,
            delta,
            r,
            area: n as f64 / delta,
        })
    }
}

fn check_p(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidProbability(p));
    }
    Ok(())
}

/// `(1 - p)^h(s,t)` with `h` the physical hop distance; 0 when `t` is
/// unreachable.
pub fn sp_bound_topology(g: &ProbGraph, f: Flow, p: f64) -> Result<f64> {
    check_p(p)?;
    Ok(match g.hop_distance(f) {
        Some(h) => (1.0 - p).powi(h as i32),
        None => 0.0,
    })
}

/// Mean distance from the centre of a circular area `A` to a uniformly
/// placed destination: `2 sqrt(A) / (3 sqrt(pi))`.
pub fn avg_path_length(area: f64) -> Result<f64> {
    if !(area > 0.0) || !area.is_finite() {
        return Err(Error::InvalidParameter(format!("area must be positive, got {area}")));
    }
    Ok(2.0 * area.sqrt() / (3.0 * PI.sqrt()))
}

/// `ceil(L / r)` with `L` the average path length over `A = n / delta`.
pub fn avg_hop_distance(params: &NetworkParams) -> Result<u32> {
    let length = avg_path_length(params.n as f64 / params.delta)?;
    let hops = (length / params.r).ceil();
    Ok((hops as u32).max(1))
}

/// `(1 - p)^h` with `h` from [`avg_hop_distance`].
pub fn sp_bound_closed(params: &NetworkParams, p: f64) -> Result<f64> {
    check_p(p)?;
    Ok((1.0 - p).powi(avg_hop_distance(params)? as i32))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::generate_full_mesh;

    #[test]
    fn topology_bound() {
        let mesh = generate_full_mesh(4, 0.3).unwrap();
        let f = Flow::new(1, 2).unwrap();
        assert_eq!(sp_bound_topology(&mesh, f, 0.5).unwrap(), 0.5);
        let chain = ProbGraph::build(3, &[(0, 1, 0.1), (1, 2, 0.1)]).unwrap();
        assert_eq!(sp_bound_topology(&chain, Flow::new(0, 2).unwrap(), 0.5).unwrap(), 0.25);
        assert_eq!(sp_bound_topology(&chain, Flow::new(0, 2).unwrap(), 0.0).unwrap(), 1.0);
        assert_eq!(sp_bound_topology(&chain, Flow::new(2, 0).unwrap(), 0.0).unwrap(), 0.0);
        assert!(sp_bound_topology(&chain, Flow::new(0, 2).unwrap(), 1.5).is_err());
    }

    #[test]
    fn path_lengths() {
        assert!((avg_path_length(PI).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!((avg_path_length(0.25).unwrap() - 0.188_063).abs() < 1e-6);
        assert!((avg_path_length(1.0).unwrap() - 0.376_126).abs() < 1e-6);
        assert!(avg_path_length(0.0).is_err());
        assert!(avg_path_length(-1.0).is_err());
    }

    #[test]
    fn hop_distances() {
        let small = NetworkParams::from_density(16, 64.0, 0.25).unwrap();
        assert_eq!(avg_hop_distance(&small).unwrap(), 1);
        let large = NetworkParams::from_density(1024, 64.0, 0.25).unwrap();
        assert_eq!(avg_hop_distance(&large).unwrap(), 7);

        let length = avg_path_length(100.0 / 64.0).unwrap();
        let exact = NetworkParams::from_density(100, 64.0, length / 2.0).unwrap();
        assert_eq!(avg_hop_distance(&exact).unwrap(), 2);
    }

    #[test]
    fn closed_bound() {
        let small = NetworkParams::from_density(16, 64.0, 0.25).unwrap();
        assert_eq!(sp_bound_closed(&small, 0.5).unwrap(), 0.5);
        assert_eq!(sp_bound_closed(&small, 0.0).unwrap(), 1.0);
        let large = NetworkParams::from_density(1024, 64.0, 0.25).unwrap();
        assert!((sp_bound_closed(&large, 0.1).unwrap() - 0.478_296_9).abs() < 1e-7);
    }

    #[test]
    fn params_validation() {
        assert!(NetworkParams::from_density(0, 64.0, 0.25).is_err());
        assert!(NetworkParams::from_density(16, 0.0, 0.25).is_err());
        assert!(NetworkParams::from_density(16, 64.0, -1.0).is_err());
        let p = NetworkParams::from_density(32, 64.0, 0.25).unwrap();
        assert_eq!(p.area * p.delta, 32.0);
    }
}
