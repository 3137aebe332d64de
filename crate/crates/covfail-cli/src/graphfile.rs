//! Line-oriented text format for communication graphs and event streams.
//!
//! A graph file starts with a `format=1` version line and contains exactly
//! one `fence` line, optional `node` lines, and `edge` lines:
//!
//! ```text
//! format=1
//! # full-line comments start with '#'
//! fence f1 f2 f3 f4
//! node u1 0.5 0.5 fail=exp:1.0
//! node f1 0.0 0.0
//! edge u1 f1
//! ```
//!
//! Fence membership comes from the `fence` line, which also implies the ring
//! links between consecutive fence nodes. A `node` line is required for every
//! interior node and optional for fence nodes (to attach positions). Fence
//! nodes must not carry `fail=` specs. [`emit_graph`] is an exact inverse on
//! its own output: parsing and re-emitting is byte-stable.

use std::fmt::Write as _;

use thiserror::Error;

use covfail::complex::CommunicationGraph;
use covfail::monitor::FailureEvent;
use covfail::probability::Distribution;

#[derive(Error, Debug)]
pub enum GraphFileError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("no fence line in graph file")]
    MissingFence,
    #[error("graph file must start with format=1")]
    MissingFormat,
}

fn err<T>(line: usize, message: impl Into<String>) -> Result<T, GraphFileError> {
    Err(GraphFileError::Parse {
        line,
        message: message.into(),
    })
}

struct NodeLine {
    line: usize,
    label: String,
    position: Option<[f64; 2]>,
    failure: Option<Distribution>,
}

/// Parses a graph file into a communication graph. Fence nodes are created
/// in fence-line order first, so parse-emit round trips are stable.
pub fn parse_graph(text: &str) -> Result<CommunicationGraph, GraphFileError> {
    let mut fence: Option<(usize, Vec<String>)> = None;
    let mut nodes: Vec<NodeLine> = Vec::new();
    let mut edges: Vec<(usize, String, String)> = Vec::new();
    let mut format_seen = false;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        if !format_seen {
            if trimmed == "format=1" {
                format_seen = true;
                continue;
            }
            return Err(GraphFileError::MissingFormat);
        }
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        match tokens[0] {
            "fence" => {
                if fence.is_some() {
                    return err(line, "second fence line");
                }
                if tokens.len() < 4 {
                    return err(line, "fence needs at least three ids");
                }
                fence = Some((line, tokens[1..].iter().map(|s| s.to_string()).collect()));
            }
            "node" => {
                let Some(&label) = tokens.get(1) else {
                    return err(line, "node line needs an id");
                };
                let mut rest = &tokens[2..];
                let mut position = None;
                if !rest.is_empty() && !rest[0].starts_with("fail=") {
                    if rest.len() < 2 || rest[1].starts_with("fail=") {
                        return err(line, "position needs two coordinates");
                    }
                    let x: f64 = match rest[0].parse() {
                        Ok(v) => v,
                        Err(_) => return err(line, format!("bad coordinate {:?}", rest[0])),
                    };
                    let y: f64 = match rest[1].parse() {
                        Ok(v) => v,
                        Err(_) => return err(line, format!("bad coordinate {:?}", rest[1])),
                    };
                    position = Some([x, y]);
                    rest = &rest[2..];
                }
                let mut failure = None;
                if let Some(&spec) = rest.first() {
                    let Some(body) = spec.strip_prefix("fail=") else {
                        return err(line, format!("unexpected token {spec:?}"));
                    };
                    match body.parse::<Distribution>() {
                        Ok(d) => failure = Some(d),
                        Err(e) => return err(line, e.to_string()),
                    }
                    rest = &rest[1..];
                }
                if let Some(&extra) = rest.first() {
                    return err(line, format!("unexpected token {extra:?}"));
                }
                nodes.push(NodeLine {
                    line,
                    label: label.to_string(),
                    position,
                    failure,
                });
            }
            "edge" => {
                if tokens.len() != 3 {
                    return err(line, "edge line needs exactly two ids");
                }
                if tokens[1] == tokens[2] {
                    return err(line, format!("self-loop on {:?}", tokens[1]));
                }
                edges.push((line, tokens[1].to_string(), tokens[2].to_string()));
            }
            other => return err(line, format!("unknown directive {other:?}")),
        }
    }

    let Some((_, fence_labels)) = fence else {
        return Err(GraphFileError::MissingFence);
    };
    for (i, n) in nodes.iter().enumerate() {
        if nodes[..i].iter().any(|m| m.label == n.label) {
            return err(n.line, format!("duplicate node {:?}", n.label));
        }
        if n.failure.is_some() && fence_labels.contains(&n.label) {
            return err(
                n.line,
                format!("fence node {:?} cannot carry fail=", n.label),
            );
        }
    }

    let mut g = CommunicationGraph::new();
    let node_for = |label: &str| nodes.iter().find(|n| n.label == label);
    for l in &fence_labels {
        let (pos, fail) = node_for(l).map_or((None, None), |n| (n.position, n.failure));
        if g.add_node(l, pos, fail).is_err() {
            return err(0, format!("duplicate fence id {l:?}"));
        }
    }
    for n in &nodes {
        if fence_labels.contains(&n.label) {
            continue;
        }
        g.add_node(&n.label, n.position, n.failure)
            .expect("duplicates were checked above");
    }
    for (line, a, b) in &edges {
        match g.add_edge_by_labels(a, b) {
            Ok(_) => {}
            Err(e) => return err(*line, e.to_string()),
        }
    }
    let refs: Vec<&str> = fence_labels.iter().map(|s| s.as_str()).collect();
    if let Err(e) = g.set_fence_by_labels(&refs) {
        return err(0, e.to_string());
    }
    // The fence line implies its ring links; listing them is redundant.
    for i in 0..fence_labels.len() {
        let next = &fence_labels[(i + 1) % fence_labels.len()];
        g.add_edge_by_labels(&fence_labels[i], next)
            .expect("fence ids exist and are distinct");
    }
    Ok(g)
}

/// Writes a graph in the same format [`parse_graph`] reads. Fence nodes
/// without positions are implied by the fence line and get no `node` line.
pub fn emit_graph(g: &CommunicationGraph) -> String {
    let mut out = String::from("format=1\n");
    let fence_labels: Vec<&str> = g.fence().iter().map(|&v| g.label(v)).collect();
    writeln!(out, "fence {}", fence_labels.join(" ")).unwrap();
    for (v, spec) in g.nodes() {
        let is_fence = g.is_fence(v);
        if is_fence && spec.position.is_none() && spec.failure.is_none() {
            continue;
        }
        write!(out, "node {}", spec.label).unwrap();
        if let Some([x, y]) = spec.position {
            write!(out, " {x} {y}").unwrap();
        }
        if let Some(d) = spec.failure {
            write!(out, " fail={d}").unwrap();
        }
        out.push('\n');
    }
    for e in g.edges() {
        let (a, b) = e.endpoints();
        writeln!(out, "edge {} {}", g.label(a), g.label(b)).unwrap();
    }
    out
}

/// Parses an event stream: one `fail <time> <vertex-id>` per line, with
/// blank lines and `#` comments allowed.
pub fn parse_events(text: &str) -> Result<Vec<FailureEvent>, GraphFileError> {
    let mut events = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        if tokens.len() != 3 || tokens[0] != "fail" {
            return err(line, "expected: fail <time> <vertex-id>");
        }
        let time: f64 = match tokens[1].parse() {
            Ok(t) => t,
            Err(_) => return err(line, format!("bad time {:?}", tokens[1])),
        };
        if time < 0.0 || !time.is_finite() {
            return err(
                line,
                format!("time must be finite and nonnegative, got {time}"),
            );
        }
        events.push(FailureEvent {
            time,
            vertex: tokens[2].to_string(),
        });
    }
    Ok(events)
}
