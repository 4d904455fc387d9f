//! On-disk instance formats.
//!
//! The native format is one JSON object per instance, discriminated by
//! `kind`:
//!
//! ```json
//! {"kind":"dag","capacity":6000,"nodes":[{"dur":2.5,"res":100}],"edges":[[0,1]]}
//! {"kind":"ged","g1":{"labels":[0,1],"edges":[[0,1]]},"g2":{"labels":[1,1],"edges":[]}}
//! {"kind":"hcp","n":5,"edges":[[0,1],[1,2],[2,3],[3,4],[4,0]]}
//! ```
//!
//! DAG durations are seconds in the file and microseconds in memory; the
//! conversion rounds to the nearest microsecond, so values with at most six
//! fractional digits survive a round trip bit-exactly.
//!
//! Cycle-search instances additionally load from plain edge lists: optional
//! `KEY : VALUE` header lines, then one `u v` pair per line with 1-indexed
//! nodes, terminated by `-1` or `EOF` or the end of the file.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use bihyb_core::env::Instance;
use bihyb_core::graph::{DagInstance, HcpInstance, LabeledGraph, WeightedDigraph};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DagNodeFile {
    pub dur: f64,
    pub res: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphFile {
    pub labels: Vec<u32>,
    pub edges: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum InstanceFile {
    Dag {
        capacity: u64,
        nodes: Vec<DagNodeFile>,
        edges: Vec<(usize, usize)>,
    },
    Ged {
        g1: GraphFile,
        g2: GraphFile,
    },
    Hcp {
        n: usize,
        edges: Vec<(usize, usize)>,
    },
}

/// Seconds to whole microseconds, rounding half away from zero.
pub fn secs_to_micros(secs: f64) -> Result<u64> {
    if !secs.is_finite() || secs < 0.0 {
        bail!("duration must be a finite non-negative number of seconds, got {secs}");
    }
    let us = (secs * 1e6).round();
    if us > u64::MAX as f64 {
        bail!("duration {secs}s does not fit in microseconds");
    }
    Ok(us as u64)
}

pub fn micros_to_secs(us: u64) -> f64 {
    us as f64 / 1e6
}

fn labeled_graph(file: &GraphFile) -> Result<LabeledGraph> {
    let mut g = LabeledGraph::new(file.labels.clone());
    for &(u, v) in &file.edges {
        g.add_edge(u, v).with_context(|| format!("edge [{u}, {v}]"))?;
    }
    Ok(g)
}

fn graph_file(g: &LabeledGraph) -> GraphFile {
    GraphFile {
        labels: (0..g.node_count()).map(|v| g.label(v)).collect(),
        edges: g.edges().collect(),
    }
}

impl InstanceFile {
    pub fn into_instance(self) -> Result<Instance> {
        match self {
            InstanceFile::Dag {
                capacity,
                nodes,
                edges,
            } => {
                let n = nodes.len();
                let mut g = WeightedDigraph::new(n);
                for &(u, v) in &edges {
                    g.add_edge(u, v, 0).with_context(|| format!("edge [{u}, {v}]"))?;
                }
                let mut duration_us = Vec::with_capacity(n);
                let mut resource = Vec::with_capacity(n);
                for node in &nodes {
                    duration_us.push(secs_to_micros(node.dur)?);
                    resource.push(node.res);
                }
                let inst = DagInstance::new(g, duration_us, resource, capacity)
                    .map_err(|e| anyhow::anyhow!("invalid dag instance: {e}"))?;
                Ok(Instance::Dag(inst))
            }
            InstanceFile::Ged { g1, g2 } => {
                Ok(Instance::Ged(labeled_graph(&g1)?, labeled_graph(&g2)?))
            }
            InstanceFile::Hcp { n, edges } => {
                let inst = HcpInstance::new(n, &edges)
                    .map_err(|e| anyhow::anyhow!("invalid hcp instance: {e}"))?;
                Ok(Instance::Hcp(inst))
            }
        }
    }

    pub fn from_instance(instance: &Instance) -> Self {
        match instance {
            Instance::Dag(inst) => InstanceFile::Dag {
                capacity: inst.capacity,
                nodes: (0..inst.node_count())
                    .map(|v| DagNodeFile {
                        dur: micros_to_secs(inst.duration_us[v]),
                        res: inst.resource[v],
                    })
                    .collect(),
                edges: inst.graph.edges().map(|(u, v, _)| (u, v)).collect(),
            },
            Instance::Ged(g1, g2) => InstanceFile::Ged {
                g1: graph_file(g1),
                g2: graph_file(g2),
            },
            Instance::Hcp(h) => InstanceFile::Hcp {
                n: h.node_count(),
                edges: h.edges().collect(),
            },
        }
    }
}

pub fn parse_instance_json(text: &str) -> Result<Instance> {
    let file: InstanceFile = serde_json::from_str(text).context("malformed instance JSON")?;
    file.into_instance()
}

pub fn instance_to_json(instance: &Instance) -> String {
    serde_json::to_string(&InstanceFile::from_instance(instance)).expect("instances serialize")
}

/// Plain edge-list format for cycle-search instances.
pub fn parse_edge_list(text: &str) -> Result<Instance> {
    let mut declared_n: Option<usize> = None;
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut max_node = 0usize;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line == "-1" || line == "EOF" {
            if line.is_empty() {
                continue;
            }
            break;
        }
        if let Some((key, value)) = line.split_once(':') {
            if key.trim().eq_ignore_ascii_case("dimension") {
                declared_n = Some(
                    value
                        .trim()
                        .parse()
                        .with_context(|| format!("line {}: bad DIMENSION", lineno + 1))?,
                );
            }
            continue;
        }
        if line.chars().any(|c| c.is_ascii_alphabetic()) {
            continue;
        }
        let mut it = line.split_whitespace();
        let (Some(a), Some(b)) = (it.next(), it.next()) else {
            bail!("line {}: expected an edge 'u v', got {line:?}", lineno + 1);
        };
        if it.next().is_some() {
            bail!("line {}: expected exactly two node ids", lineno + 1);
        }
        let u: usize = a.parse().with_context(|| format!("line {}", lineno + 1))?;
        let v: usize = b.parse().with_context(|| format!("line {}", lineno + 1))?;
        if u == 0 || v == 0 {
            bail!("line {}: node ids are 1-indexed", lineno + 1);
        }
        max_node = max_node.max(u).max(v);
        edges.push((u - 1, v - 1));
    }
    let n = declared_n.unwrap_or(max_node);
    let inst =
        HcpInstance::new(n, &edges).map_err(|e| anyhow::anyhow!("invalid edge list: {e}"))?;
    Ok(Instance::Hcp(inst))
}

/// Loads an instance from a path: `.json` files use the native format,
/// anything else is treated as an edge list.
pub fn load_instance(path: &Path) -> Result<Instance> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    if path.extension().is_some_and(|e| e == "json") {
        parse_instance_json(&text).with_context(|| format!("parsing {}", path.display()))
    } else {
        parse_edge_list(&text).with_context(|| format!("parsing {}", path.display()))
    }
}

pub fn save_instance(path: &Path, instance: &Instance) -> Result<()> {
    fs::write(path, instance_to_json(instance) + "\n")
        .with_context(|| format!("writing {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use bihyb_core::env::ProblemKind;

    #[test]
    fn second_conversion_is_exact_to_the_microsecond() {
        for us in [0u64, 1, 999_999, 1_000_000, 4_964_500_000, 123_456_789] {
            assert_eq!(secs_to_micros(micros_to_secs(us)).unwrap(), us);
        }
        assert_eq!(secs_to_micros(2.5).unwrap(), 2_500_000);
        assert_eq!(secs_to_micros(16.3).unwrap(), 16_300_000);
        assert!(secs_to_micros(f64::NAN).is_err());
        assert!(secs_to_micros(-1.0).is_err());
    }

    #[test]
    fn dag_json_round_trips_exactly() {
        // Serialization is canonical: floats use the shortest form, edges are
        // normalized ascending. Values survive exactly; once canonical, the
        // text is a fixed point.
        let text = r#"{"kind":"dag","capacity":10,"nodes":[{"dur":2.5,"res":3},{"dur":0.000001,"res":10}],"edges":[[0,1]]}"#;
        let instance = parse_instance_json(text).unwrap();
        let Instance::Dag(inst) = &instance else {
            panic!("expected dag")
        };
        assert_eq!(inst.duration_us, vec![2_500_000, 1]);
        let emitted = instance_to_json(&instance);
        assert_eq!(
            emitted,
            r#"{"kind":"dag","capacity":10,"nodes":[{"dur":2.5,"res":3},{"dur":1e-6,"res":10}],"edges":[[0,1]]}"#
        );
        let reparsed = parse_instance_json(&emitted).unwrap();
        let Instance::Dag(inst2) = &reparsed else {
            panic!("expected dag")
        };
        assert_eq!(inst2.duration_us, inst.duration_us);
        assert_eq!(instance_to_json(&reparsed), emitted);
    }

    #[test]
    fn ged_and_hcp_round_trip() {
        // Canonical inputs come back byte for byte.
        for text in [
            r#"{"kind":"ged","g1":{"labels":[0,1,2],"edges":[[0,1],[1,2]]},"g2":{"labels":[2,2],"edges":[[0,1]]}}"#,
            r#"{"kind":"hcp","n":5,"edges":[[0,1],[0,4],[1,2],[2,3],[3,4]]}"#,
        ] {
            let instance = parse_instance_json(text).unwrap();
            assert_eq!(instance_to_json(&instance), text);
        }
        // Unordered edges are accepted and normalized.
        let scrambled =
            parse_instance_json(r#"{"kind":"hcp","n":5,"edges":[[4,0],[3,4],[2,3],[1,2],[0,1]]}"#)
                .unwrap();
        assert_eq!(
            instance_to_json(&scrambled),
            r#"{"kind":"hcp","n":5,"edges":[[0,1],[0,4],[1,2],[2,3],[3,4]]}"#
        );
    }

    #[test]
    fn malformed_instances_are_rejected() {
        for text in [
            r#"{"kind":"dag"}"#,
            r#"{"kind":"nope","n":3,"edges":[]}"#,
            r#"{"kind":"hcp","n":2,"edges":[[0,1]]}"#,
            r#"{"kind":"hcp","n":4,"edges":[[0,4]]}"#,
            r#"{"kind":"dag","capacity":5,"nodes":[{"dur":1.0,"res":9}],"edges":[]}"#,
            r#"{"kind":"dag","capacity":5,"nodes":[{"dur":1.0,"res":1},{"dur":1.0,"res":1}],"edges":[[0,1],[1,0]]}"#,
        ] {
            assert!(parse_instance_json(text).is_err(), "accepted {text}");
        }
    }

    #[test]
    fn edge_lists_parse_headers_and_one_indexing() {
        let text = "NAME : graph1\nCOMMENT : tiny ring\nDIMENSION : 5\nEDGE_DATA_FORMAT : EDGE_LIST\nEDGE_DATA_SECTION\n1 2\n2 3\n3 4\n4 5\n5 1\n-1\nEOF\n";
        let instance = parse_edge_list(text).unwrap();
        assert_eq!(instance.kind(), ProblemKind::Hcp);
        let Instance::Hcp(h) = &instance else { panic!() };
        assert_eq!(h.node_count(), 5);
        assert!(h.has_edge(0, 1));
        assert!(h.has_edge(4, 0));
        assert_eq!(h.edges().count(), 5);
    }

    #[test]
    fn edge_lists_without_headers_infer_the_node_count() {
        let instance = parse_edge_list("1 2\n2 3\n3 1\n").unwrap();
        let Instance::Hcp(h) = &instance else { panic!() };
        assert_eq!(h.node_count(), 3);
        assert!(parse_edge_list("0 1\n").is_err());
        assert!(parse_edge_list("1 2 3\n").is_err());
    }
}
