//! Oriented 2-complexes: a directed 1-skeleton plus faces attached along
//! closed edge paths, and the graphs derived from them.

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, Edge, GraphSpec};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Face {
    pub id: String,
    pub boundary: Vec<String>,
}

impl Face {
    pub fn new(id: impl Into<String>, boundary: &[&str]) -> Self {
        Face {
            id: id.into(),
            boundary: boundary.iter().map(|s| s.to_string()).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.boundary.len()
    }

    pub fn is_empty(&self) -> bool {
        self.boundary.is_empty()
    }

    /// Equality of boundary words up to cyclic rotation (not reflection).
    pub fn same_cycle(&self, other: &Face) -> bool {
        let n = self.boundary.len();
        n == other.boundary.len()
            && (n == 0
                || (0..n).any(|k| (0..n).all(|i| self.boundary[(i + k) % n] == other.boundary[i])))
    }
}

/// JSON form: a graph plus faces.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexSpec {
    pub vertices: Vec<String>,
    pub edges: Vec<Edge>,
    #[serde(default)]
    pub faces: Vec<Face>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub labels: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ComplexSpec", into = "ComplexSpec")]
pub struct Oriented2Complex {
    skeleton: DirectedGraph,
    faces: Vec<Face>,
}

/// Where a boundary-graph edge comes from: face `face`, from the edge at
/// `position` in its boundary word to the one after it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundaryLabel {
    pub face: String,
    pub position: usize,
}

/// The boundary graph (or its reverse) together with face/position labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledBoundaryGraph {
    pub graph: DirectedGraph,
    /// Indexed like `graph.edges()`.
    pub labels: Vec<BoundaryLabel>,
}

/// Id of the boundary edge leaving position `pos` of face `face`.
pub fn boundary_edge_id(face: &str, pos: usize) -> String {
    format!("{face}/{pos}")
}

impl Oriented2Complex {
    pub fn new(skeleton: DirectedGraph, faces: Vec<Face>) -> Result<Self> {
        let mut seen = HashSet::new();
        for f in &faces {
            if !seen.insert(f.id.as_str()) {
                return Err(Error::DuplicateId(f.id.clone()));
            }
            let idx: Vec<usize> = f
                .boundary
                .iter()
                .map(|e| {
                    skeleton
                        .edge_index(e)
                        .ok_or_else(|| Error::UnknownEdge(e.clone()))
                })
                .collect::<Result<_>>()?;
            if idx.is_empty() {
                return Err(Error::BrokenBoundaryWord {
                    face: f.id.clone(),
                    position: 0,
                    from: String::new(),
                    to: String::new(),
                });
            }
            let n = idx.len();
            for i in 0..n {
                let (a, b) = (idx[i], idx[(i + 1) % n]);
                if skeleton.dst_of(a) != skeleton.src_of(b) {
                    return Err(Error::BrokenBoundaryWord {
                        face: f.id.clone(),
                        position: i,
                        from: f.boundary[i].clone(),
                        to: f.boundary[(i + 1) % n].clone(),
                    });
                }
            }
        }
        Ok(Oriented2Complex { skeleton, faces })
    }

    pub fn from_spec(spec: ComplexSpec) -> Result<Self> {
        let skeleton = DirectedGraph::from_spec(GraphSpec {
            vertices: spec.vertices,
            edges: spec.edges,
            labels: spec.labels,
        })?;
        Self::new(skeleton, spec.faces)
    }

    pub fn to_spec(&self) -> ComplexSpec {
        let g = self.skeleton.to_spec();
        ComplexSpec {
            vertices: g.vertices,
            edges: g.edges,
            faces: self.faces.clone(),
            labels: g.labels,
        }
    }

    pub fn skeleton(&self) -> &DirectedGraph {
        &self.skeleton
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn face(&self, id: &str) -> Option<&Face> {
        self.faces.iter().find(|f| f.id == id)
    }

    pub fn face_index(&self, id: &str) -> Option<usize> {
        self.faces.iter().position(|f| f.id == id)
    }

    /// Faces whose boundary word has length 1 or 2; accepted but unusual.
    pub fn warnings(&self) -> Vec<String> {
        self.faces
            .iter()
            .filter(|f| f.len() < 3)
            .map(|f| format!("face `{}` has a boundary word of length {}", f.id, f.len()))
            .collect()
    }

    pub fn is_triangular(&self) -> bool {
        self.faces.iter().all(|f| f.len() == 3)
    }

    pub fn require_triangular(&self) -> Result<()> {
        match self.faces.iter().find(|f| f.len() != 3) {
            Some(f) => Err(Error::NonTriangularFace(f.id.clone())),
            None => Ok(()),
        }
    }

    /// One vertex per skeleton edge, one edge `e_i -> e_{i+1}` per position of
    /// every face, ordered by face then position.
    pub fn boundary_graph(&self) -> LabeledBoundaryGraph {
        let mut edges = Vec::new();
        let mut labels = Vec::new();
        let mut tags = BTreeMap::new();
        for f in &self.faces {
            let n = f.len();
            for i in 0..n {
                let id = boundary_edge_id(&f.id, i);
                edges.push(Edge::new(id.clone(), f.boundary[i].clone(), f.boundary[(i + 1) % n].clone()));
                tags.insert(id, f.id.clone());
                labels.push(BoundaryLabel {
                    face: f.id.clone(),
                    position: i,
                });
            }
        }
        let vertices: Vec<String> = self.skeleton.edges().iter().map(|e| e.id.clone()).collect();
        let graph = DirectedGraph::new(vertices, edges)
            .and_then(|g| g.with_labels(tags))
            .expect("boundary graph of a valid complex is valid");
        LabeledBoundaryGraph { graph, labels }
    }

    /// The boundary graph with every edge reversed: `e -> e'` where `e'` precedes `e`.
    pub fn predecessor_graph(&self) -> LabeledBoundaryGraph {
        let b = self.boundary_graph();
        LabeledBoundaryGraph {
            graph: b.graph.reversed(),
            labels: b.labels,
        }
    }
}

impl TryFrom<ComplexSpec> for Oriented2Complex {
    type Error = Error;
    fn try_from(spec: ComplexSpec) -> Result<Self> {
        Self::from_spec(spec)
    }
}

impl From<Oriented2Complex> for ComplexSpec {
    fn from(c: Oriented2Complex) -> Self {
        c.to_spec()
    }
}
