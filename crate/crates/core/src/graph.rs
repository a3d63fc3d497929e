//! Finite directed multigraphs.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub id: String,
    pub src: String,
    pub dst: String,
}

impl Edge {
    pub fn new(id: impl Into<String>, src: impl Into<String>, dst: impl Into<String>) -> Self {
        Edge {
            id: id.into(),
            src: src.into(),
            dst: dst.into(),
        }
    }
}

/// The JSON form of a graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphSpec {
    pub vertices: Vec<String>,
    pub edges: Vec<Edge>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub labels: BTreeMap<String, String>,
}

/// A validated multigraph. Vertex and edge order is the insertion order and
/// fixes the order of every matrix built from the graph.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "GraphSpec", into = "GraphSpec")]
pub struct DirectedGraph {
    vertices: Vec<String>,
    edges: Vec<Edge>,
    labels: BTreeMap<String, String>,
    vindex: HashMap<String, usize>,
    eindex: HashMap<String, usize>,
    src: Vec<usize>,
    dst: Vec<usize>,
    out: Vec<Vec<usize>>,
    inc: Vec<Vec<usize>>,
}

impl PartialEq for DirectedGraph {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices && self.edges == other.edges && self.labels == other.labels
    }
}

impl Eq for DirectedGraph {}

/// Outgoing edges of one vertex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EdgeBundle {
    pub vertex: String,
    pub edges: Vec<String>,
}

impl EdgeBundle {
    pub fn is_sink(&self) -> bool {
        self.edges.is_empty()
    }
}

impl DirectedGraph {
    pub fn new<V, S>(vertices: V, edges: Vec<Edge>) -> Result<Self>
    where
        V: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self::from_spec(GraphSpec {
            vertices: vertices.into_iter().map(Into::into).collect(),
            edges,
            labels: BTreeMap::new(),
        })
    }

    /// Build from `(id, src, dst)` triples.
    pub fn from_triples(vertices: &[&str], edges: &[(&str, &str, &str)]) -> Result<Self> {
        Self::new(
            vertices.iter().copied(),
            edges.iter().map(|&(e, s, d)| Edge::new(e, s, d)).collect(),
        )
    }

    pub fn from_spec(spec: GraphSpec) -> Result<Self> {
        let mut vindex = HashMap::new();
        for (i, v) in spec.vertices.iter().enumerate() {
            if vindex.insert(v.clone(), i).is_some() {
                return Err(Error::DuplicateId(v.clone()));
            }
        }
        let mut eindex = HashMap::new();
        let mut src = Vec::with_capacity(spec.edges.len());
        let mut dst = Vec::with_capacity(spec.edges.len());
        let mut out = vec![Vec::new(); spec.vertices.len()];
        let mut inc = vec![Vec::new(); spec.vertices.len()];
        for (i, e) in spec.edges.iter().enumerate() {
            if eindex.insert(e.id.clone(), i).is_some() {
                return Err(Error::DuplicateId(e.id.clone()));
            }
            let lookup = |v: &String| {
                vindex.get(v).copied().ok_or_else(|| Error::DanglingEndpoint {
                    edge: e.id.clone(),
                    vertex: v.clone(),
                })
            };
            let s = lookup(&e.src)?;
            let d = lookup(&e.dst)?;
            src.push(s);
            dst.push(d);
            out[s].push(i);
            inc[d].push(i);
        }
        for k in spec.labels.keys() {
            if !eindex.contains_key(k) {
                return Err(Error::UnknownEdge(k.clone()));
            }
        }
        Ok(DirectedGraph {
            vertices: spec.vertices,
            edges: spec.edges,
            labels: spec.labels,
            vindex,
            eindex,
            src,
            dst,
            out,
            inc,
        })
    }

    pub fn to_spec(&self) -> GraphSpec {
        GraphSpec {
            vertices: self.vertices.clone(),
            edges: self.edges.clone(),
            labels: self.labels.clone(),
        }
    }

    pub fn with_labels(mut self, labels: BTreeMap<String, String>) -> Result<Self> {
        for k in labels.keys() {
            if !self.eindex.contains_key(k) {
                return Err(Error::UnknownEdge(k.clone()));
            }
        }
        self.labels = labels;
        Ok(self)
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn labels(&self) -> &BTreeMap<String, String> {
        &self.labels
    }

    pub fn label(&self, edge: &str) -> Option<&str> {
        self.labels.get(edge).map(String::as_str)
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_index(&self, v: &str) -> Option<usize> {
        self.vindex.get(v).copied()
    }

    pub fn edge_index(&self, e: &str) -> Option<usize> {
        self.eindex.get(e).copied()
    }

    pub fn has_vertex(&self, v: &str) -> bool {
        self.vindex.contains_key(v)
    }

    pub fn edge(&self, e: &str) -> Option<&Edge> {
        self.edge_index(e).map(|i| &self.edges[i])
    }

    pub fn require_edge(&self, e: &str) -> Result<&Edge> {
        self.edge(e).ok_or_else(|| Error::UnknownEdge(e.to_string()))
    }

    pub fn require_vertex(&self, v: &str) -> Result<usize> {
        self.vertex_index(v).ok_or_else(|| Error::UnknownVertex(v.to_string()))
    }

    /// Source vertex index of the edge with index `e`.
    pub fn src_of(&self, e: usize) -> usize {
        self.src[e]
    }

    /// Range vertex index of the edge with index `e`.
    pub fn dst_of(&self, e: usize) -> usize {
        self.dst[e]
    }

    /// Indices of the edges leaving vertex index `v`, in edge order.
    pub fn out_edges(&self, v: usize) -> &[usize] {
        &self.out[v]
    }

    /// Indices of the edges entering vertex index `v`, in edge order.
    pub fn in_edges(&self, v: usize) -> &[usize] {
        &self.inc[v]
    }

    pub fn is_sink(&self, v: usize) -> bool {
        self.out[v].is_empty()
    }

    pub fn sinks(&self) -> Vec<usize> {
        (0..self.vertices.len()).filter(|&v| self.is_sink(v)).collect()
    }

    pub fn edge_bundle(&self, v: &str) -> Result<EdgeBundle> {
        let i = self.require_vertex(v)?;
        Ok(EdgeBundle {
            vertex: v.to_string(),
            edges: self.out[i].iter().map(|&e| self.edges[e].id.clone()).collect(),
        })
    }

    /// `m[i][j]` is the number of edges from vertex `i` to vertex `j`.
    pub fn adjacency_counts(&self) -> Vec<Vec<u64>> {
        let n = self.vertices.len();
        let mut m = vec![vec![0u64; n]; n];
        for (s, d) in self.src.iter().zip(&self.dst) {
            m[*s][*d] += 1;
        }
        m
    }

    /// Same vertices and edge ids with every edge reversed; labels kept.
    pub fn reversed(&self) -> DirectedGraph {
        let spec = GraphSpec {
            vertices: self.vertices.clone(),
            edges: self
                .edges
                .iter()
                .map(|e| Edge::new(e.id.clone(), e.dst.clone(), e.src.clone()))
                .collect(),
            labels: self.labels.clone(),
        };
        Self::from_spec(spec).expect("reversal preserves validity")
    }

    /// Whether `path` (edge indices) is composable: `r(path[i]) = s(path[i+1])`.
    pub fn is_path(&self, path: &[usize]) -> bool {
        path.windows(2).all(|w| self.dst[w[0]] == self.src[w[1]])
    }
}

impl TryFrom<GraphSpec> for DirectedGraph {
    type Error = Error;
    fn try_from(spec: GraphSpec) -> Result<Self> {
        Self::from_spec(spec)
    }
}

impl From<DirectedGraph> for GraphSpec {
    fn from(g: DirectedGraph) -> Self {
        g.to_spec()
    }
}
