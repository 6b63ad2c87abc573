//! Terminal-pair routing reliability (TPRR) of route-discovery processes
//! over probabilistic network graphs.
//!
//! A physical topology is a [`ProbGraph`]; a route-discovery strategy turns
//! it into a per-flow [`OverlayGraph`]; the [`reliability`] module measures
//! the probability that the overlay still holds a working route when links
//! fail independently. [`bounds`] gives the closed-form ceiling for
//! shortest-path discovery and [`sweep`] runs batch experiments.

// Negated comparisons reject NaN too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod error;
pub mod formats;
pub mod graph;
pub mod overlay;
pub mod reliability;
pub mod rng;
pub mod sweep;
pub mod topology;

pub use error::{Error, Result};
pub use graph::{Edge, EdgeId, Flow, NodeId, ProbGraph};
pub use overlay::{build_overlay, overlay_from_tables, OverlayGraph, RdpStrategy, RoutingTableDump};
