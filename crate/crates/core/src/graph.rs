//! Directed graph container, text/JSON ingestion and reachability queries.
//!
//! Vertices are densified to `0..n` in order of first appearance; the
//! original labels are kept only for reporting.

use std::collections::{HashMap, HashSet, VecDeque};

use serde::Deserialize;

use crate::error::{Error, Result};

/// Finite simple directed graph: no self-loops, no parallel edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirectedGraph {
    labels: Vec<String>,
    out_adj: Vec<Vec<usize>>,
    in_adj: Vec<Vec<usize>>,
    edge_count: usize,
}

impl DirectedGraph {
    /// Builds a graph on `n` vertices labelled `0..n`.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let labels = (0..n).map(|v| v.to_string()).collect();
        Self::with_labels(labels, edges)
    }

    pub fn with_labels(labels: Vec<String>, edges: &[(usize, usize)]) -> Result<Self> {
        let n = labels.len();
        let mut graph = DirectedGraph {
            out_adj: vec![Vec::new(); n],
            in_adj: vec![Vec::new(); n],
            labels,
            edge_count: 0,
        };
        for (idx, &(u, v)) in edges.iter().enumerate() {
            graph.insert_edge(u, v, idx + 1)?;
        }
        Ok(graph)
    }

    fn insert_edge(&mut self, u: usize, v: usize, line: usize) -> Result<()> {
        let n = self.labels.len();
        if u >= n || v >= n {
            return Err(Error::Parse {
                line,
                message: format!("edge ({u}, {v}) references a vertex outside 0..{n}"),
            });
        }
        if u == v {
            return Err(Error::SelfLoop {
                line,
                vertex: self.labels[u].clone(),
            });
        }
        if self.out_adj[u].contains(&v) {
            return Err(Error::DuplicateEdge {
                line,
                from: self.labels[u].clone(),
                to: self.labels[v].clone(),
            });
        }
        self.out_adj[u].push(v);
        self.in_adj[v].push(u);
        self.edge_count += 1;
        Ok(())
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn label(&self, v: usize) -> &str {
        &self.labels[v]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// S^out(v): heads of edges leaving `v`, in insertion order.
    pub fn out_neighbors(&self, v: usize) -> &[usize] {
        &self.out_adj[v]
    }

    /// S^in(v): tails of edges entering `v`, in insertion order.
    pub fn in_neighbors(&self, v: usize) -> &[usize] {
        &self.in_adj[v]
    }

    /// d_v, the number of edges leaving `v`.
    pub fn out_degree(&self, v: usize) -> usize {
        self.out_adj[v].len()
    }

    pub fn in_degree(&self, v: usize) -> usize {
        self.in_adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.out_adj[u].contains(&v)
    }

    /// All edges, grouped by tail in vertex order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.out_adj
            .iter()
            .enumerate()
            .flat_map(|(u, heads)| heads.iter().map(move |&v| (u, v)))
    }

    /// Relabels vertex `v` as `perm[v]`; labels travel with their vertices.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let n = self.vertex_count();
        if perm.len() != n || perm.iter().collect::<HashSet<_>>().len() != n || perm.iter().any(|&p| p >= n) {
            return Err(Error::InvalidArgument("permutation must be a bijection on 0..n".into()));
        }
        let mut labels = vec![String::new(); n];
        for v in 0..n {
            labels[perm[v]] = self.labels[v].clone();
        }
        let edges: Vec<_> = self.edges().map(|(u, v)| (perm[u], perm[v])).collect();
        Self::with_labels(labels, &edges)
    }

    /// Vertices reachable from `source` along directed edges (`forward`) or
    /// against them.
    fn reach(&self, source: usize, forward: bool) -> Vec<bool> {
        let adj = if forward { &self.out_adj } else { &self.in_adj };
        let mut seen = vec![false; self.vertex_count()];
        let mut stack = vec![source];
        seen[source] = true;
        while let Some(u) = stack.pop() {
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen
    }

    /// True iff every vertex reaches every other by a directed path
    /// (forward and backward search from vertex 0).
    pub fn is_strongly_connected(&self) -> bool {
        if self.vertex_count() == 0 {
            return false;
        }
        self.reach(0, true).into_iter().all(|b| b) && self.reach(0, false).into_iter().all(|b| b)
    }

    /// Shortest directed path length from `x` to `y`, `None` when `y` is
    /// unreachable from `x`.
    pub fn distance(&self, x: usize, y: usize) -> Option<usize> {
        self.distances_from(x)[y]
    }

    /// BFS distances from `source` to every vertex.
    pub fn distances_from(&self, source: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.vertex_count()];
        dist[source] = Some(0);
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap_or(0);
            for &v in &self.out_adj[u] {
                if dist[v].is_none() {
                    dist[v] = Some(du + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// Line-oriented `u v` edge list, vertices written by label.
    pub fn to_edge_list(&self) -> String {
        self.edges()
            .map(|(u, v)| format!("{} {}", self.labels[u], self.labels[v]))
            .collect::<Vec<_>>()
            .join("\n")
    }
}

/// Parses a whitespace-separated `u v` edge list. Blank lines and lines
/// starting with `#` are skipped.
pub fn parse_edge_list(text: &str) -> Result<DirectedGraph> {
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut labels: Vec<String> = Vec::new();
    let mut intern = |label: &str, labels: &mut Vec<String>| -> usize {
        *index.entry(label.to_string()).or_insert_with(|| {
            labels.push(label.to_string());
            labels.len() - 1
        })
    };

    let mut edges = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(Error::Parse {
                line: lineno + 1,
                message: format!("expected two vertex labels, found {}", fields.len()),
            });
        }
        let u = intern(fields[0], &mut labels);
        let v = intern(fields[1], &mut labels);
        edges.push((lineno + 1, u, v));
    }
    if edges.is_empty() {
        return Err(Error::EmptyGraph);
    }

    let n = labels.len();
    let mut graph = DirectedGraph {
        out_adj: vec![Vec::new(); n],
        in_adj: vec![Vec::new(); n],
        labels,
        edge_count: 0,
    };
    for (line, u, v) in edges {
        graph.insert_edge(u, v, line)?;
    }
    Ok(graph)
}

#[derive(Deserialize)]
struct JsonGraph {
    vertices: Vec<serde_json::Value>,
    edges: Vec<(serde_json::Value, serde_json::Value)>,
}

fn json_label(value: &serde_json::Value) -> Result<String> {
    match value {
        serde_json::Value::String(s) => Ok(s.clone()),
        serde_json::Value::Number(n) => Ok(n.to_string()),
        other => Err(Error::Json(format!(
            "vertex labels must be strings or numbers, got {other}"
        ))),
    }
}

/// Parses `{"vertices": [...], "edges": [[u, v], ...]}`. Edge endpoints
/// refer to vertex labels. Errors report the 1-based edge position as the
/// line number.
pub fn parse_json_graph(text: &str) -> Result<DirectedGraph> {
    let raw: JsonGraph = serde_json::from_str(text).map_err(|e| Error::Json(e.to_string()))?;
    let mut index = HashMap::new();
    let mut labels = Vec::with_capacity(raw.vertices.len());
    for value in &raw.vertices {
        let label = json_label(value)?;
        if index.insert(label.clone(), labels.len()).is_some() {
            return Err(Error::Json(format!("vertex {label} listed twice")));
        }
        labels.push(label);
    }
    if raw.edges.is_empty() {
        return Err(Error::EmptyGraph);
    }
    let mut edges = Vec::with_capacity(raw.edges.len());
    for (pos, (u, v)) in raw.edges.iter().enumerate() {
        let lookup = |value: &serde_json::Value| -> Result<usize> {
            let label = json_label(value)?;
            index.get(&label).copied().ok_or_else(|| Error::Parse {
                line: pos + 1,
                message: format!("edge endpoint {label} is not a listed vertex"),
            })
        };
        edges.push((lookup(u)?, lookup(v)?));
    }
    DirectedGraph::with_labels(labels, &edges)
}
