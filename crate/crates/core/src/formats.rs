//! Line-oriented text formats.
//!
//! ```text
//! # graph file            # coordinate sidecar     # routing-table dump
//! nodes 3                 node 0 0.1 -0.02         route 0 2 1
//! edge 0 1 0.25           node 1 0.3 0.11          route 1 2 2
//! edge 1 2 0.1
//! ```
//!
//! An overlay file is a graph file with a `flow <s> <t>` line; its edges are
//! the overlay. Spectrum files hold `m`, `c`, `C <i> <count>` and
//! `poly a0 .. am` lines. `#` starts a comment everywhere. Probabilities are
//! written in Rust's shortest round-trip form, so reading a written file
//! restores every value bit for bit.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::graph::{Flow, NodeId, ProbGraph};
use crate::overlay::{OverlayGraph, RouteEntry, RoutingTableDump};
use crate::reliability::{CutsetSpectrum, ReliabilityPolynomial};

/// Non-empty lines with comments stripped, as (1-based line number, tokens).
fn records(reader: impl BufRead) -> impl Iterator<Item = Result<(usize, Vec<String>)>> {
    reader.lines().enumerate().filter_map(|(i, line)| match line {
        Err(e) => Some(Err(e.into())),
        Ok(line) => {
            let body = line.split('#').next().unwrap_or("");
            let tokens: Vec<String> = body.split_whitespace().map(str::to_owned).collect();
            (!tokens.is_empty()).then_some(Ok((i + 1, tokens)))
        }
    })
}

fn field<T: std::str::FromStr>(line: usize, tokens: &[String], i: usize, what: &str) -> Result<T> {
    let raw = tokens
        .get(i)
        .ok_or_else(|| Error::parse(line, format!("missing {what}")))?;
    raw.parse()
        .map_err(|_| Error::parse(line, format!("bad {what} '{raw}'")))
}

fn arity(line: usize, tokens: &[String], n: usize) -> Result<()> {
    if tokens.len() != n {
        return Err(Error::parse(
            line,
            format!("'{}' expects {} fields, got {}", tokens[0], n - 1, tokens.len() - 1),
        ));
    }
    Ok(())
}

fn write_graph_body(
    w: &mut impl Write,
    n: usize,
    edges: impl Iterator<Item = (usize, usize, f64)>,
) -> Result<()> {
    writeln!(w, "nodes {n}")?;
    for (tail, head, p) in edges {
        writeln!(w, "edge {tail} {head} {p}")?;
    }
    Ok(())
}

pub fn write_graph(g: &ProbGraph, mut w: impl Write) -> Result<()> {
    write_graph_body(
        &mut w,
        g.node_count(),
        g.edges().iter().map(|e| (e.tail.0, e.head.0, e.p_fail)),
    )
}

pub fn read_graph(reader: impl BufRead) -> Result<ProbGraph> {
    let (g, flow) = read_graph_with_flow(reader)?;
    if flow.is_some() {
        return Err(Error::parse(0, "graph file contains a flow line; is this an overlay file?"));
    }
    Ok(g)
}

/// A standalone overlay: the subgraph on its own, plus the flow.
#[derive(Debug, Clone, PartialEq)]
pub struct OverlayFile {
    pub graph: ProbGraph,
    pub flow: Flow,
}

impl OverlayFile {
    pub fn overlay(&self) -> OverlayGraph<'_> {
        OverlayGraph::from_edges(&self.graph, self.flow, 0..self.graph.edge_count())
    }
}

pub fn write_overlay(o: &OverlayGraph<'_>, mut w: impl Write) -> Result<()> {
    let base = o.base();
    let f = o.flow();
    writeln!(w, "# overlay for flow {f}, {} edges", o.edge_count())?;
    write_graph_body(
        &mut w,
        base.node_count(),
        o.edge_ids().iter().map(|&e| {
            let edge = base.edge(e);
            (edge.tail.0, edge.head.0, edge.p_fail)
        }),
    )?;
    writeln!(w, "flow {} {}", f.s, f.t)?;
    Ok(())
}

pub fn read_overlay(reader: impl BufRead) -> Result<OverlayFile> {
    let (graph, flow) = read_graph_with_flow(reader)?;
    let flow = flow.ok_or_else(|| Error::parse(0, "overlay file has no 'flow' line"))?;
    graph.check_flow(flow)?;
    Ok(OverlayFile { graph, flow })
}

fn read_graph_with_flow(reader: impl BufRead) -> Result<(ProbGraph, Option<Flow>)> {
    let mut n = None;
    let mut edges = Vec::new();
    let mut flow = None;
    for record in records(reader) {
        let (line, tokens) = record?;
        match tokens[0].as_str() {
            "nodes" => {
                arity(line, &tokens, 2)?;
                if n.is_some() {
                    return Err(Error::parse(line, "duplicate 'nodes' line"));
                }
                n = Some(field::<usize>(line, &tokens, 1, "node count")?);
            }
            "edge" => {
                arity(line, &tokens, 4)?;
                if n.is_none() {
                    return Err(Error::parse(line, "'edge' before 'nodes'"));
                }
                edges.push((
                    field(line, &tokens, 1, "tail")?,
                    field(line, &tokens, 2, "head")?,
                    field(line, &tokens, 3, "failure probability")?,
                ));
            }
            "flow" => {
                arity(line, &tokens, 3)?;
                let s = field(line, &tokens, 1, "source")?;
                let t = field(line, &tokens, 2, "destination")?;
                flow = Some(Flow::new(s, t).map_err(|e| Error::parse(line, e.to_string()))?);
            }
            other => return Err(Error::parse(line, format!("unknown record '{other}'"))),
        }
    }
    let n = n.ok_or_else(|| Error::parse(0, "missing 'nodes' line"))?;
    Ok((ProbGraph::build(n, &edges)?, flow))
}

pub fn write_coords(coords: &[(f64, f64)], mut w: impl Write) -> Result<()> {
    for (i, (x, y)) in coords.iter().enumerate() {
        writeln!(w, "node {i} {x} {y}")?;
    }
    Ok(())
}

/// Coordinates indexed by node id; ids must be exactly `0..n`.
pub fn read_coords(reader: impl BufRead) -> Result<Vec<(f64, f64)>> {
    let mut coords = Vec::new();
    for record in records(reader) {
        let (line, tokens) = record?;
        if tokens[0] != "node" {
            return Err(Error::parse(line, format!("unknown record '{}'", tokens[0])));
        }
        arity(line, &tokens, 4)?;
        let id: usize = field(line, &tokens, 1, "node id")?;
        if id != coords.len() {
            return Err(Error::parse(line, format!("expected node {}, got {id}", coords.len())));
        }
        coords.push((field(line, &tokens, 2, "x")?, field(line, &tokens, 3, "y")?));
    }
    Ok(coords)
}

pub fn read_dump(reader: impl BufRead) -> Result<RoutingTableDump> {
    let mut entries = Vec::new();
    for record in records(reader) {
        let (line, tokens) = record?;
        if tokens[0] != "route" {
            return Err(Error::parse(line, format!("unknown record '{}'", tokens[0])));
        }
        arity(line, &tokens, 4)?;
        entries.push(RouteEntry {
            node: NodeId(field(line, &tokens, 1, "node")?),
            destination: NodeId(field(line, &tokens, 2, "destination")?),
            next_hop: NodeId(field(line, &tokens, 3, "next hop")?),
        });
    }
    Ok(RoutingTableDump { entries })
}

pub fn write_dump(dump: &RoutingTableDump, mut w: impl Write) -> Result<()> {
    for e in &dump.entries {
        writeln!(w, "route {} {} {}", e.node, e.destination, e.next_hop)?;
    }
    Ok(())
}

pub fn write_spectrum(
    spec: &CutsetSpectrum,
    poly: Option<&ReliabilityPolynomial>,
    mut w: impl Write,
) -> Result<()> {
    writeln!(w, "m {}", spec.m)?;
    writeln!(w, "c {}", spec.c)?;
    if spec.is_degenerate() {
        writeln!(w, "# degenerate: no s-t route in the overlay")?;
    }
    for i in spec.c..=spec.m {
        writeln!(w, "C {i} {}", spec.count(i))?;
    }
    if let Some(poly) = poly {
        let coeffs: Vec<String> = poly.coeffs.iter().map(i128::to_string).collect();
        writeln!(w, "poly {}", coeffs.join(" "))?;
    }
    Ok(())
}

pub fn read_spectrum(reader: impl BufRead) -> Result<(CutsetSpectrum, Option<ReliabilityPolynomial>)> {
    let (mut m, mut c) = (None, None);
    let mut counts = Vec::new();
    let mut poly = None;
    for record in records(reader) {
        let (line, tokens) = record?;
        match tokens[0].as_str() {
            "m" => {
                arity(line, &tokens, 2)?;
                m = Some(field::<usize>(line, &tokens, 1, "m")?);
            }
            "c" => {
                arity(line, &tokens, 2)?;
                c = Some(field::<usize>(line, &tokens, 1, "c")?);
            }
            "C" => {
                arity(line, &tokens, 3)?;
                counts.push((
                    field::<usize>(line, &tokens, 1, "size")?,
                    field::<u64>(line, &tokens, 2, "count")?,
                ));
            }
            "poly" => {
                let coeffs = (1..tokens.len())
                    .map(|i| field::<i128>(line, &tokens, i, "coefficient"))
                    .collect::<Result<_>>()?;
                poly = Some(ReliabilityPolynomial { coeffs });
            }
            other => return Err(Error::parse(line, format!("unknown record '{other}'"))),
        }
    }
    let m = m.ok_or_else(|| Error::parse(0, "missing 'm' line"))?;
    let c = c.ok_or_else(|| Error::parse(0, "missing 'c' line"))?;
    let mut full = vec![0u64; m + 1];
    for (i, count) in counts {
        *full
            .get_mut(i)
            .ok_or_else(|| Error::parse(0, format!("cut size {i} exceeds m = {m}")))? = count;
    }
    Ok((CutsetSpectrum { m, c, counts: full }, poly))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::overlay::{build_overlay, RdpStrategy};
    use crate::reliability::{cutset_spectrum, DEFAULT_GUARD};
    use proptest::prelude::*;

    #[test]
    fn parses_comments_and_blank_lines() {
        let text = "# header\nnodes 3\n\nedge 0 1 0.5 # first\nedge 1 2 1e-3\n";
        let g = read_graph(text.as_bytes()).unwrap();
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.edge(1).p_fail, 0.001);
    }

    #[test]
    fn reports_line_numbers() {
        let err = read_graph("nodes 2\nedge 0 1\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        let err = read_graph("nodes 2\nedge 0 x 0.1\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        assert!(read_graph("edge 0 1 0.1\n".as_bytes()).is_err());
        assert!(matches!(
            read_graph("nodes 2\nedge 0 0 0.1\n".as_bytes()),
            Err(Error::SelfLoop(0))
        ));
    }

    #[test]
    fn overlay_file_round_trip() {
        let g = ProbGraph::build(4, &[(0, 1, 0.1), (0, 2, 0.2), (1, 3, 0.3), (2, 3, 0.4)]).unwrap();
        let f = Flow::new(0, 3).unwrap();
        let o = build_overlay(&g, f, RdpStrategy::SingleShortestPath);
        let mut buf = Vec::new();
        write_overlay(&o, &mut buf).unwrap();
        let file = read_overlay(buf.as_slice()).unwrap();
        assert_eq!(file.flow, f);
        assert_eq!(file.graph.edge_count(), 2);
        assert_eq!(file.overlay().edge_count(), 2);
        assert!(read_graph(buf.as_slice()).is_err());
    }

    #[test]
    fn dump_round_trip() {
        let text = "route 0 2 1\nroute 1 2 2 # last hop\n";
        let dump = read_dump(text.as_bytes()).unwrap();
        assert_eq!(dump.entries.len(), 2);
        let mut buf = Vec::new();
        write_dump(&dump, &mut buf).unwrap();
        assert_eq!(read_dump(buf.as_slice()).unwrap(), dump);
        assert!(read_dump("route 0 2\n".as_bytes()).is_err());
    }

    #[test]
    fn coords_round_trip() {
        let coords = vec![(0.1, -0.25), (1.0 / 3.0, 2e-9)];
        let mut buf = Vec::new();
        write_coords(&coords, &mut buf).unwrap();
        assert_eq!(read_coords(buf.as_slice()).unwrap(), coords);
        assert!(read_coords("node 1 0 0\n".as_bytes()).is_err());
    }

    #[test]
    fn spectrum_file() {
        let g = ProbGraph::build(4, &[(0, 1, 0.5), (0, 2, 0.5), (1, 3, 0.5), (2, 3, 0.5)]).unwrap();
        let o = build_overlay(&g, Flow::new(0, 3).unwrap(), RdpStrategy::FullMultipath);
        let spec = cutset_spectrum(&o, DEFAULT_GUARD).unwrap();
        let poly = ReliabilityPolynomial::from_spectrum(&spec);
        let mut buf = Vec::new();
        write_spectrum(&spec, Some(&poly), &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf.clone()).unwrap(),
            "m 4\nc 2\nC 2 4\nC 3 4\nC 4 1\npoly 1 0 -4 4 -1\n"
        );
        assert_eq!(read_spectrum(buf.as_slice()).unwrap(), (spec, Some(poly)));
    }

    proptest! {
        #[test]
        fn graph_text_round_trip_is_bit_exact(
            n in 2usize..8,
            raw in proptest::collection::vec((0usize..8, 0usize..8, 0.0f64..=1.0), 0..30),
        ) {
            let mut seen = std::collections::HashSet::new();
            let edges: Vec<_> = raw
                .into_iter()
                .filter(|&(u, v, _)| u < n && v < n && u != v && seen.insert((u, v)))
                .collect();
            let g = ProbGraph::build(n, &edges).unwrap();
            let mut buf = Vec::new();
            write_graph(&g, &mut buf).unwrap();
            let back = read_graph(buf.as_slice()).unwrap();
            prop_assert_eq!(&back, &g);
            for (a, b) in back.edges().iter().zip(g.edges()) {
                prop_assert_eq!(a.p_fail.to_bits(), b.p_fail.to_bits());
            }
        }
    }
}
