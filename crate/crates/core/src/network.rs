//! Noise-corrected weighted relatedness networks.
//!
//! The link strength between two areas is their matching probability minus
//! the homonymy noise floor, `l = p_hat - p0`. Edges at or below the
//! threshold (default 0, the noise floor itself) are kept in the data with
//! `included = false` and left out of rendered output. The subtraction
//! uses the noise mean by default; the median is selectable since both
//! travel in the noise model.

use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

use crate::overlap::OverlapMatrix;
use crate::stats::NoiseModel;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseConvention {
    Mean,
    Median,
}

/// `p_hat` minus the noise mean; may be negative.
pub fn link_strength(p_hat: f64, noise: &NoiseModel) -> f64 {
    link_strength_with(p_hat, noise, NoiseConvention::Mean)
}

pub fn link_strength_with(p_hat: f64, noise: &NoiseModel, convention: NoiseConvention) -> f64 {
    let p0 = match convention {
        NoiseConvention::Mean => noise.mean_p0,
        NoiseConvention::Median => noise.median_p0,
    };
    p_hat - p0
}

/// One undirected edge. The comparison fields (`n`, `m`, `k`,
/// `undefined`) are carried through from the overlap cell for the edge
/// list output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelatednessEdge {
    pub area_a: String,
    pub area_b: String,
    pub n: u64,
    pub m: u64,
    pub k: u64,
    pub undefined: bool,
    pub p_hat: f64,
    pub link_strength: f64,
    pub included: bool,
}

/// Undirected weighted graph over areas. At most one edge per unordered
/// pair, no self-loops, isolated nodes retained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelatednessGraph {
    pub nodes: Vec<String>,
    pub edges: Vec<RelatednessEdge>,
    pub noise_mean_p0: f64,
    pub noise_median_p0: f64,
    pub convention: NoiseConvention,
    #[serde(with = "maybe_infinite")]
    pub threshold: f64,
}

/// JSON has no literal for infinities, so an infinite threshold becomes
/// the string `"inf"`.
mod maybe_infinite {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Number(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Number(v) => Ok(v),
            Raw::Text(t) => match t.as_str() {
                "inf" | "+inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                other => Err(serde::de::Error::custom(format!("not a threshold: {other:?}"))),
            },
        }
    }
}

/// Builds the graph for a comparison matrix against a noise model, using
/// the noise-mean convention.
pub fn build_graph(matrix: &OverlapMatrix, noise: &NoiseModel, threshold: f64) -> Result<RelatednessGraph> {
    build_graph_with(matrix, noise, threshold, NoiseConvention::Mean)
}

pub fn build_graph_with(
    matrix: &OverlapMatrix,
    noise: &NoiseModel,
    threshold: f64,
    convention: NoiseConvention,
) -> Result<RelatednessGraph> {
    if threshold.is_nan() || threshold < 0.0 {
        return Err(Error::Domain(format!("threshold {threshold} must be >= 0")));
    }
    let edges = matrix
        .cells
        .iter()
        .map(|cell| {
            let l = link_strength_with(cell.p_hat, noise, convention);
            RelatednessEdge {
                area_a: cell.area_a.clone(),
                area_b: cell.area_b.clone(),
                n: cell.n,
                m: cell.m,
                k: cell.k,
                undefined: cell.undefined,
                p_hat: cell.p_hat,
                link_strength: l,
                included: l > threshold,
            }
        })
        .collect();
    Ok(RelatednessGraph {
        nodes: matrix.areas.clone(),
        edges,
        noise_mean_p0: noise.mean_p0,
        noise_median_p0: noise.median_p0,
        convention,
        threshold,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphFormat {
    GraphMl,
    Dot,
    Json,
    CsvEdgeList,
}

impl GraphFormat {
    pub fn file_extension(&self) -> &'static str {
        match self {
            GraphFormat::GraphMl => "graphml",
            GraphFormat::Dot => "dot",
            GraphFormat::Json => "json",
            GraphFormat::CsvEdgeList => "edges.csv",
        }
    }
}

impl std::str::FromStr for GraphFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "graphml" => Ok(GraphFormat::GraphMl),
            "dot" => Ok(GraphFormat::Dot),
            "json" => Ok(GraphFormat::Json),
            "csv-edgelist" => Ok(GraphFormat::CsvEdgeList),
            other => Err(Error::Config(format!(
                "unknown graph format {other:?} (expected graphml, dot, json or csv-edgelist)"
            ))),
        }
    }
}

/// Serializes a graph. GraphML and JSON carry every edge with its
/// `included` flag; dot is a rendering format and carries included edges
/// only, with line widths min-max scaled within this graph.
pub fn export_graph(graph: &RelatednessGraph, format: GraphFormat) -> Result<Vec<u8>> {
    Ok(match format {
        GraphFormat::Json => serde_json::to_vec_pretty(graph).expect("graph serializes"),
        GraphFormat::GraphMl => to_graphml(graph).into_bytes(),
        GraphFormat::Dot => to_dot(graph).into_bytes(),
        GraphFormat::CsvEdgeList => to_edge_csv(graph).into_bytes(),
    })
}

/// Reads a graph back from its JSON export.
pub fn import_graph_json(bytes: &[u8]) -> Result<RelatednessGraph> {
    serde_json::from_slice(bytes).map_err(|e| Error::format(e.line(), format!("not a graph document: {e}")))
}

fn xml_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            _ => out.push(c),
        }
    }
    out
}

fn to_graphml(graph: &RelatednessGraph) -> String {
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str(
        "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\" \
         xmlns:xsi=\"http://www.w3.org/2001/XMLSchema-instance\" \
         xsi:schemaLocation=\"http://graphml.graphdrawing.org/xmlns \
         http://graphml.graphdrawing.org/xmlns/1.0/graphml.xsd\">\n",
    );
    out.push_str("  <key id=\"label\" for=\"node\" attr.name=\"label\" attr.type=\"string\"/>\n");
    out.push_str("  <key id=\"p_hat\" for=\"edge\" attr.name=\"p_hat\" attr.type=\"double\"/>\n");
    out.push_str("  <key id=\"link_strength\" for=\"edge\" attr.name=\"link_strength\" attr.type=\"double\"/>\n");
    out.push_str("  <key id=\"included\" for=\"edge\" attr.name=\"included\" attr.type=\"boolean\"/>\n");
    out.push_str("  <graph id=\"G\" edgedefault=\"undirected\">\n");

    let node_id = |name: &str| -> String {
        let idx = graph.nodes.iter().position(|n| n == name).expect("edge endpoint is a node");
        format!("n{idx}")
    };
    for (i, name) in graph.nodes.iter().enumerate() {
        let _ = writeln!(
            out,
            "    <node id=\"n{i}\"><data key=\"label\">{}</data></node>",
            xml_escape(name)
        );
    }
    for edge in &graph.edges {
        let _ = writeln!(
            out,
            "    <edge source=\"{}\" target=\"{}\"><data key=\"p_hat\">{}</data><data key=\"link_strength\">{}</data><data key=\"included\">{}</data></edge>",
            node_id(&edge.area_a),
            node_id(&edge.area_b),
            edge.p_hat,
            edge.link_strength,
            edge.included
        );
    }
    out.push_str("  </graph>\n</graphml>\n");
    out
}

const PENWIDTH_MIN: f64 = 0.5;
const PENWIDTH_MAX: f64 = 8.0;

/// Min-max scaling of included link strengths onto `[0.5, 8.0]`. The
/// scaling is within one graph only, so widths are comparable inside a
/// figure but not across figures. A degenerate range maps to the midpoint.
fn penwidth(l: f64, min: f64, max: f64) -> f64 {
    if max > min {
        PENWIDTH_MIN + (l - min) / (max - min) * (PENWIDTH_MAX - PENWIDTH_MIN)
    } else {
        0.5 * (PENWIDTH_MIN + PENWIDTH_MAX)
    }
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

fn to_dot(graph: &RelatednessGraph) -> String {
    let included: Vec<&RelatednessEdge> = graph.edges.iter().filter(|e| e.included).collect();
    let min = included.iter().map(|e| e.link_strength).fold(f64::INFINITY, f64::min);
    let max = included.iter().map(|e| e.link_strength).fold(f64::NEG_INFINITY, f64::max);

    let mut out = String::from("graph relatedness {\n");
    for name in &graph.nodes {
        let _ = writeln!(out, "  \"{}\";", dot_escape(name));
    }
    for edge in &included {
        let _ = writeln!(
            out,
            "  \"{}\" -- \"{}\" [penwidth={:.3}];",
            dot_escape(&edge.area_a),
            dot_escape(&edge.area_b),
            penwidth(edge.link_strength, min, max)
        );
    }
    out.push_str("}\n");
    out
}

fn to_edge_csv(graph: &RelatednessGraph) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["area_a", "area_b", "n", "m", "k", "p_hat", "undefined", "link_strength", "included"])
        .expect("in-memory write");
    for e in &graph.edges {
        w.write_record([
            e.area_a.as_str(),
            e.area_b.as_str(),
            &e.n.to_string(),
            &e.m.to_string(),
            &e.k.to_string(),
            &e.p_hat.to_string(),
            &e.undefined.to_string(),
            &e.link_strength.to_string(),
            &e.included.to_string(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
}
