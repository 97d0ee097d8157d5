//! Graph file formats.
//!
//! JSON: `{"vertices": n, "edges": [[u, v], ...], "colors": [c, ...]}` with
//! `colors` optional and parallel to `edges`.
//!
//! Edge-list text: one `u v [c]` per line; `#` starts a comment. The vertex
//! count is one more than the largest id mentioned.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{ColoredGraph, Graph};
use crate::error::{Error, Result};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GraphJson {
    pub vertices: usize,
    pub edges: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub colors: Option<Vec<u32>>,
}

/// A loaded graph with its optional edge coloring.
#[derive(Clone, Debug)]
pub struct GraphFile {
    pub graph: Graph,
    pub coloring: Option<ColoredGraph>,
}

impl GraphJson {
    pub fn from_graph(g: &Graph) -> Self {
        GraphJson {
            vertices: g.vertex_count(),
            edges: g.edges().map(|(u, v)| [u, v]).collect(),
            colors: None,
        }
    }

    pub fn from_colored(c: &ColoredGraph) -> Self {
        GraphJson {
            colors: Some(c.edge_colors()),
            ..GraphJson::from_graph(c.graph())
        }
    }

    pub fn into_graph_file(self) -> Result<GraphFile> {
        let edges: Vec<(usize, usize)> = self.edges.iter().map(|e| (e[0], e[1])).collect();
        let graph = Graph::from_edges(self.vertices, &edges)?;
        let coloring = match self.colors {
            Some(colors) => Some(ColoredGraph::from_edge_colors(
                graph.clone(),
                &edges,
                &colors,
            )?),
            None => None,
        };
        Ok(GraphFile { graph, coloring })
    }
}

pub fn parse_json(text: &str) -> Result<GraphFile> {
    let raw: GraphJson = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    raw.into_graph_file()
}

pub fn parse_edge_list(text: &str) -> Result<GraphFile> {
    let mut edges = Vec::new();
    let mut colors = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let bad = || {
            Error::Parse(format!(
                "line {}: expected `u v [c]`, got {line:?}",
                lineno + 1
            ))
        };
        if !(2..=3).contains(&fields.len()) {
            return Err(bad());
        }
        let u: usize = fields[0].parse().map_err(|_| bad())?;
        let v: usize = fields[1].parse().map_err(|_| bad())?;
        edges.push((u, v));
        if let Some(c) = fields.get(2) {
            colors.push(c.parse::<u32>().map_err(|_| bad())?);
        }
    }
    if !colors.is_empty() && colors.len() != edges.len() {
        return Err(Error::Parse(
            "either every edge or no edge carries a color".into(),
        ));
    }
    let n = edges.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0);
    let graph = Graph::from_edges(n, &edges)?;
    let coloring = if colors.is_empty() {
        None
    } else {
        Some(ColoredGraph::from_edge_colors(
            graph.clone(),
            &edges,
            &colors,
        )?)
    };
    Ok(GraphFile { graph, coloring })
}

/// Loads a graph, choosing the format by the `.json` extension.
pub fn load(path: &Path) -> Result<GraphFile> {
    let text = std::fs::read_to_string(path)?;
    if path.extension().is_some_and(|e| e == "json") {
        parse_json(&text)
    } else {
        parse_edge_list(&text)
    }
}

pub fn to_edge_list(g: &Graph) -> String {
    g.edges().map(|(u, v)| format!("{u} {v}\n")).collect()
}
