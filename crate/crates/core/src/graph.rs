//! Simple undirected graphs with a fixed total order on edges, plus cycles,
//! positive traversals, scopes and parity.
//!
//! Edge ids are the positions of the edges in the input, so "first edge"
//! always means "smallest edge id".

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type VertexId = usize;
pub type EdgeId = usize;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: self-loop at vertex {label}")]
    SelfLoop { line: usize, label: i64 },
    #[error("line {line}: duplicate edge {{{u}, {v}}}")]
    DuplicateEdge { line: usize, u: i64, v: i64 },
    #[error("vertex {0} out of range")]
    VertexOutOfRange(VertexId),
    #[error("edge {0} out of range")]
    EdgeOutOfRange(EdgeId),
    #[error("not a simple cycle: {0}")]
    NotACycle(String),
    #[error("edge {edge} is not on the cycle")]
    EdgeNotOnCycle { edge: EdgeId },
    #[error("parity is only defined on even cycles (length {0})")]
    OddCycle(usize),
    #[error("position {position} out of range for a cycle of length {len}")]
    PositionOutOfRange { position: usize, len: usize },
}

/// A simple graph whose edge indices define the predetermined edge order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    vertex_count: usize,
    edges: Vec<(VertexId, VertexId)>,
    adjacency: Vec<Vec<(VertexId, EdgeId)>>,
    labels: Vec<i64>,
    edge_index: HashMap<(VertexId, VertexId), EdgeId>,
}

impl Graph {
    /// Builds a graph on `vertex_count` dense vertices. Labels default to
    /// `1..=vertex_count`.
    pub fn new(vertex_count: usize, edges: &[(VertexId, VertexId)]) -> Result<Self, GraphError> {
        let labels = (1..=vertex_count as i64).collect();
        Self::with_labels(labels, edges)
    }

    pub fn with_labels(
        labels: Vec<i64>,
        edges: &[(VertexId, VertexId)],
    ) -> Result<Self, GraphError> {
        let vertex_count = labels.len();
        let mut adjacency = vec![Vec::new(); vertex_count];
        let mut edge_index = HashMap::with_capacity(edges.len());
        let mut stored = Vec::with_capacity(edges.len());
        for (line, &(u, v)) in edges.iter().enumerate() {
            for x in [u, v] {
                if x >= vertex_count {
                    return Err(GraphError::VertexOutOfRange(x));
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop {
                    line: line + 1,
                    label: labels[u],
                });
            }
            let key = (u.min(v), u.max(v));
            if edge_index.contains_key(&key) {
                return Err(GraphError::DuplicateEdge {
                    line: line + 1,
                    u: labels[u],
                    v: labels[v],
                });
            }
            let id = stored.len();
            edge_index.insert(key, id);
            stored.push((u, v));
            adjacency[u].push((v, id));
            adjacency[v].push((u, id));
        }
        Ok(Graph {
            vertex_count,
            edges: stored,
            adjacency,
            labels,
            edge_index,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn endpoints(&self, e: EdgeId) -> (VertexId, VertexId) {
        self.edges[e]
    }

    pub fn edges(&self) -> &[(VertexId, VertexId)] {
        &self.edges
    }

    /// `(neighbor, edge)` pairs incident to `v`, in edge order.
    pub fn neighbors(&self, v: VertexId) -> &[(VertexId, EdgeId)] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adjacency[v].len()
    }

    pub fn edge_between(&self, u: VertexId, v: VertexId) -> Option<EdgeId> {
        self.edge_index.get(&(u.min(v), u.max(v))).copied()
    }

    /// Original label of a dense vertex id.
    pub fn label(&self, v: VertexId) -> i64 {
        self.labels[v]
    }

    pub fn edge_labels(&self, e: EdgeId) -> (i64, i64) {
        let (u, v) = self.edges[e];
        (self.labels[u], self.labels[v])
    }

    pub fn vertex_by_label(&self, label: i64) -> Option<VertexId> {
        self.labels.iter().position(|&l| l == label)
    }

    /// The endpoint of `e` that is not `v`.
    pub fn other_end(&self, e: EdgeId, v: VertexId) -> VertexId {
        let (a, b) = self.edges[e];
        if a == v {
            b
        } else {
            a
        }
    }

    /// Shared endpoint of two distinct edges, if they are adjacent.
    pub fn shared_vertex(&self, e: EdgeId, f: EdgeId) -> Option<VertexId> {
        if e == f {
            return None;
        }
        let (a, b) = self.edges[e];
        let (c, d) = self.edges[f];
        if a == c || a == d {
            Some(a)
        } else if b == c || b == d {
            Some(b)
        } else {
            None
        }
    }

    /// Every cycle of length `len` in which `second` directly follows `first`
    /// in the positive traversal started at `first`.
    ///
    /// Bounded depth-first search; intended for small graphs and short cycles.
    pub fn cycles_with_successive(&self, first: EdgeId, second: EdgeId, len: usize) -> Vec<Cycle> {
        let mut found = Vec::new();
        if len < 3 || first >= self.edge_count() || second >= self.edge_count() {
            return found;
        }
        let Some(pivot) = self.shared_vertex(first, second) else {
            return found;
        };
        let start = self.other_end(first, pivot);
        let next = self.other_end(second, pivot);
        let mut path = vec![start, pivot, next];
        let mut on_path = vec![false; self.vertex_count];
        for &v in &path {
            on_path[v] = true;
        }
        self.extend_paths(&mut path, &mut on_path, len, &mut |vertices| {
            if let Ok(c) = Cycle::from_vertices(self, vertices) {
                if c.successor(first) == Some(second) {
                    found.push(c);
                }
            }
        });
        found
    }

    fn extend_paths(
        &self,
        path: &mut Vec<VertexId>,
        on_path: &mut [bool],
        len: usize,
        emit: &mut dyn FnMut(&[VertexId]),
    ) {
        let last = *path.last().expect("non-empty path");
        if path.len() == len {
            if self.edge_between(last, path[0]).is_some() {
                emit(path);
            }
            return;
        }
        for &(w, _) in &self.adjacency[last] {
            if on_path[w] {
                continue;
            }
            on_path[w] = true;
            path.push(w);
            self.extend_paths(path, on_path, len, emit);
            path.pop();
            on_path[w] = false;
        }
    }

    /// Serializes the graph as an edge list using original labels.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for e in 0..self.edge_count() {
            let (u, v) = self.edge_labels(e);
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }
}

/// Parses an edge list (`u v` per line, `#` comments) or DIMACS
/// (`c` comments, `p edge n m`, `e u v`).
///
/// Edge order is input order. DIMACS vertices `1..=n` map to `0..n`; plain
/// edge lists map labels to dense ids in ascending label order.
pub fn load_graph(text: &str) -> Result<Graph, GraphError> {
    let mut declared: Option<usize> = None;
    let mut raw: Vec<(usize, i64, i64)> = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let head = tokens.next().unwrap_or_default();
        let rest: Vec<&str> = match head {
            "c" => continue,
            "p" => {
                let fields: Vec<&str> = tokens.collect();
                if fields.len() != 3 || !matches!(fields[0], "edge" | "col") {
                    return Err(GraphError::Parse {
                        line: lineno,
                        message: "expected `p edge <vertices> <edges>`".into(),
                    });
                }
                let n = fields[1].parse::<usize>().map_err(|e| GraphError::Parse {
                    line: lineno,
                    message: format!("bad vertex count: {e}"),
                })?;
                declared = Some(n);
                continue;
            }
            "e" => tokens.collect(),
            _ => std::iter::once(head).chain(tokens).collect(),
        };
        if rest.len() != 2 {
            return Err(GraphError::Parse {
                line: lineno,
                message: format!("expected two vertex labels, found {}", rest.len()),
            });
        }
        let parse = |s: &str| {
            s.parse::<i64>().map_err(|e| GraphError::Parse {
                line: lineno,
                message: format!("bad vertex label `{s}`: {e}"),
            })
        };
        raw.push((lineno, parse(rest[0])?, parse(rest[1])?));
    }

    let labels: Vec<i64> = match declared {
        Some(n) => (1..=n as i64).collect(),
        None => {
            let mut set: Vec<i64> = raw.iter().flat_map(|&(_, u, v)| [u, v]).collect();
            set.sort_unstable();
            set.dedup();
            set
        }
    };
    let index: BTreeMap<i64, VertexId> = labels.iter().enumerate().map(|(i, &l)| (l, i)).collect();

    let mut seen = HashMap::new();
    let mut edges = Vec::with_capacity(raw.len());
    for &(line, u, v) in &raw {
        if u == v {
            return Err(GraphError::SelfLoop { line, label: u });
        }
        let lookup = |l: i64| {
            index.get(&l).copied().ok_or_else(|| GraphError::Parse {
                line,
                message: format!("vertex {l} outside the declared range"),
            })
        };
        let (a, b) = (lookup(u)?, lookup(v)?);
        if seen.insert((a.min(b), a.max(b)), line).is_some() {
            return Err(GraphError::DuplicateEdge { line, u, v });
        }
        edges.push((a, b));
    }
    Graph::with_labels(labels, &edges)
}

/// A simple cycle in its positive traversal.
///
/// `edges[i]` joins `vertices[i]` and `vertices[(i + 1) % len]`. The
/// traversal starts at the smallest edge id and proceeds towards the
/// smaller of that edge's two cycle neighbours.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cycle {
    edges: Vec<EdgeId>,
    vertices: Vec<VertexId>,
}

impl Cycle {
    /// Canonical positive traversal of the cycle through `vertices` (in
    /// either direction, from any starting vertex).
    pub fn from_vertices(g: &Graph, vertices: &[VertexId]) -> Result<Self, GraphError> {
        let s = vertices.len();
        if s < 3 {
            return Err(GraphError::NotACycle(format!("{s} vertices")));
        }
        let mut seen = vec![false; g.vertex_count()];
        for &v in vertices {
            if v >= g.vertex_count() {
                return Err(GraphError::VertexOutOfRange(v));
            }
            if std::mem::replace(&mut seen[v], true) {
                return Err(GraphError::NotACycle(format!("vertex {v} repeated")));
            }
        }
        let mut raw_edges = Vec::with_capacity(s);
        for i in 0..s {
            let (u, v) = (vertices[i], vertices[(i + 1) % s]);
            let e = g
                .edge_between(u, v)
                .ok_or_else(|| GraphError::NotACycle(format!("no edge between {u} and {v}")))?;
            raw_edges.push(e);
        }
        let p = (0..s).min_by_key(|&i| raw_edges[i]).expect("non-empty");
        let forward = raw_edges[(p + 1) % s] < raw_edges[(p + s - 1) % s];
        let (edges, verts) = if forward {
            (
                (0..s).map(|i| raw_edges[(p + i) % s]).collect(),
                (0..s).map(|i| vertices[(p + i) % s]).collect(),
            )
        } else {
            // walking backwards, edge p runs from vertices[p + 1] to vertices[p]
            (
                (0..s).map(|i| raw_edges[(p + s - i) % s]).collect(),
                (0..s).map(|i| vertices[(p + 1 + s - i) % s]).collect(),
            )
        };
        Ok(Cycle {
            edges,
            vertices: verts,
        })
    }

    /// Canonical cycle from a closed walk given as consecutive edge ids.
    pub fn from_edges(g: &Graph, edges: &[EdgeId]) -> Result<Self, GraphError> {
        let s = edges.len();
        if s < 3 {
            return Err(GraphError::NotACycle(format!("{s} edges")));
        }
        for &e in edges {
            if e >= g.edge_count() {
                return Err(GraphError::EdgeOutOfRange(e));
            }
        }
        // the start vertex of edges[0] is the endpoint not shared with edges[1]
        let shared = g
            .shared_vertex(edges[0], edges[1])
            .ok_or_else(|| GraphError::NotACycle("first two edges are not adjacent".into()))?;
        let mut v = g.other_end(edges[0], shared);
        let mut vertices = Vec::with_capacity(s);
        for &e in edges {
            let (a, b) = g.endpoints(e);
            if a != v && b != v {
                return Err(GraphError::NotACycle(format!(
                    "edge {e} does not continue the walk"
                )));
            }
            vertices.push(v);
            v = g.other_end(e, v);
        }
        if v != vertices[0] {
            return Err(GraphError::NotACycle("walk does not close".into()));
        }
        Self::from_vertices(g, &vertices)
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn edges(&self) -> &[EdgeId] {
        &self.edges
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn position(&self, e: EdgeId) -> Option<usize> {
        self.edges.iter().position(|&x| x == e)
    }

    pub fn contains(&self, e: EdgeId) -> bool {
        self.edges.contains(&e)
    }

    /// The edge after `e` in the positive traversal.
    pub fn successor(&self, e: EdgeId) -> Option<EdgeId> {
        self.position(e).map(|i| self.edges[(i + 1) % self.len()])
    }

    /// Positive traversal started at `e`.
    pub fn traversal_from(&self, e: EdgeId) -> Result<Vec<EdgeId>, GraphError> {
        let p = self
            .position(e)
            .ok_or(GraphError::EdgeNotOnCycle { edge: e })?;
        Ok((0..self.len())
            .map(|i| self.edges[(p + i) % self.len()])
            .collect())
    }

    /// Scope of `(e, self)`: all but the last two edges of the positive
    /// traversal started at `e`.
    pub fn scope(&self, e: EdgeId) -> Result<ScopeView, GraphError> {
        let mut edges = self.traversal_from(e)?;
        edges.truncate(self.len() - 2);
        Ok(ScopeView {
            edge: e,
            cycle: self.clone(),
            edges,
        })
    }

    /// Whether traversal positions `i` and `j` have the same parity.
    pub fn same_parity(&self, i: usize, j: usize) -> Result<bool, GraphError> {
        let len = self.len();
        if !len.is_multiple_of(2) {
            return Err(GraphError::OddCycle(len));
        }
        for position in [i, j] {
            if position >= len {
                return Err(GraphError::PositionOutOfRange { position, len });
            }
        }
        Ok(i % 2 == j % 2)
    }

    pub fn shares_edge_with(&self, other: &Cycle) -> Option<EdgeId> {
        self.edges.iter().copied().find(|&e| other.contains(e))
    }
}

impl fmt::Display for Cycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.edges.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "e{e}")?;
        }
        write!(f, ")")
    }
}

/// The scope `sc(e, C)` of an edge/cycle pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScopeView {
    pub edge: EdgeId,
    pub cycle: Cycle,
    pub edges: Vec<EdgeId>,
}

impl ScopeView {
    pub fn contains(&self, e: EdgeId) -> bool {
        self.edges.contains(&e)
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}
