//! Splicing weights along shared subobjects: two graph weights along a
//! common subgraph, and 2D CW weights on the pieces of an amalgam onto the
//! glued complex (the foundation).
//!
//! Gluing is a pushout computed with union-find. Ids are canonical: a glued
//! element takes the residue's id, every other element keeps its own id, and
//! an id claimed by several classes is prefixed with its owner as `owner.id`.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::complex::{boundary_edge_id, Face, Oriented2Complex};
use crate::cw::{CwMode, Rank2Weight};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::graph::{DirectedGraph, Edge};
use crate::weight::GraphWeight;

/// Injective, source- and range-preserving map of `source` into `target`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphEmbedding {
    pub source: DirectedGraph,
    pub target: DirectedGraph,
    pub vertex_map: BTreeMap<String, String>,
    pub edge_map: BTreeMap<String, String>,
}

impl GraphEmbedding {
    pub fn new(
        source: DirectedGraph,
        target: DirectedGraph,
        vertex_map: BTreeMap<String, String>,
        edge_map: BTreeMap<String, String>,
    ) -> Result<Self> {
        check_embedding(&source, &target, &vertex_map, &edge_map).map_err(Error::BadEmbedding)?;
        Ok(GraphEmbedding {
            source,
            target,
            vertex_map,
            edge_map,
        })
    }

    /// The inclusion of a subgraph whose ids agree with the target's.
    pub fn inclusion(source: DirectedGraph, target: DirectedGraph) -> Result<Self> {
        let vm = source.vertices().iter().map(|v| (v.clone(), v.clone())).collect();
        let em = source.edges().iter().map(|e| (e.id.clone(), e.id.clone())).collect();
        Self::new(source, target, vm, em)
    }
}

fn check_embedding(
    source: &DirectedGraph,
    target: &DirectedGraph,
    vertex_map: &BTreeMap<String, String>,
    edge_map: &BTreeMap<String, String>,
) -> std::result::Result<(), String> {
    if vertex_map.len() != source.num_vertices() || edge_map.len() != source.num_edges() {
        return Err(format!(
            "maps cover {} vertices and {} edges, source has {} and {}",
            vertex_map.len(),
            edge_map.len(),
            source.num_vertices(),
            source.num_edges()
        ));
    }
    let mut seen = BTreeSet::new();
    for v in source.vertices() {
        let t = vertex_map.get(v).ok_or_else(|| format!("vertex `{v}` is not mapped"))?;
        if !target.has_vertex(t) {
            return Err(format!("vertex `{v}` maps to unknown `{t}`"));
        }
        if !seen.insert(t) {
            return Err(format!("vertex image `{t}` is hit twice"));
        }
    }
    let mut seen = BTreeSet::new();
    for e in source.edges() {
        let t = edge_map.get(&e.id).ok_or_else(|| format!("edge `{}` is not mapped", e.id))?;
        let te = target.edge(t).ok_or_else(|| format!("edge `{}` maps to unknown `{t}`", e.id))?;
        if !seen.insert(t) {
            return Err(format!("edge image `{t}` is hit twice"));
        }
        if vertex_map[&e.src] != te.src || vertex_map[&e.dst] != te.dst {
            return Err(format!("edge `{}` -> `{t}` does not preserve endpoints", e.id));
        }
    }
    Ok(())
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }

    /// The smaller index becomes the root, so residues (listed first) name their classes.
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.0[hi] = lo;
    }
}

/// An element `id` of the piece (or residue) `owner`.
pub type Member = (String, String);

/// The pushout of pieces along residues.
#[derive(Clone, Debug, PartialEq)]
pub struct Gluing {
    pub graph: DirectedGraph,
    pub vertex_of: BTreeMap<Member, String>,
    pub edge_of: BTreeMap<Member, String>,
    /// Piece elements making up each glued vertex or edge.
    pub vertex_members: BTreeMap<String, Vec<Member>>,
    pub edge_members: BTreeMap<String, Vec<Member>>,
    /// Glued elements lying in the image of some residue.
    pub shared_vertices: BTreeSet<String>,
    pub shared_edges: BTreeSet<String>,
}

struct Attach<'a> {
    piece: usize,
    residue: usize,
    vertex_map: &'a BTreeMap<String, String>,
    edge_map: &'a BTreeMap<String, String>,
}

/// Canonical names for classes: short if unique, `owner.id` otherwise.
fn class_names(classes: &[(Member, bool)]) -> Vec<String> {
    let mut count: HashMap<&str, usize> = HashMap::new();
    for ((_, id), _) in classes {
        *count.entry(id.as_str()).or_default() += 1;
    }
    classes
        .iter()
        .map(|((owner, id), _)| {
            if count[id.as_str()] == 1 {
                id.clone()
            } else {
                format!("{owner}.{id}")
            }
        })
        .collect()
}

fn glue(residues: &[(String, &DirectedGraph)], pieces: &[(String, &DirectedGraph)], attachments: &[Attach]) -> Result<Gluing> {
    let owners: Vec<(&String, &DirectedGraph, bool)> = residues
        .iter()
        .map(|(n, g)| (n, *g, true))
        .chain(pieces.iter().map(|(n, g)| (n, *g, false)))
        .collect();
    let mut vbase = Vec::new();
    let mut ebase = Vec::new();
    let (mut nv, mut ne) = (0, 0);
    for (_, g, _) in &owners {
        vbase.push(nv);
        ebase.push(ne);
        nv += g.num_vertices();
        ne += g.num_edges();
    }
    let mut vuf = UnionFind::new(nv);
    let mut euf = UnionFind::new(ne);
    let np = residues.len();
    for a in attachments {
        let (r, p) = (residues[a.residue].1, pieces[a.piece].1);
        for (rv, pv) in a.vertex_map {
            let (i, j) = (r.require_vertex(rv)?, p.require_vertex(pv)?);
            vuf.union(vbase[a.residue] + i, vbase[np + a.piece] + j);
        }
        for (re, pe) in a.edge_map {
            let i = r.edge_index(re).ok_or_else(|| Error::UnknownEdge(re.clone()))?;
            let j = p.edge_index(pe).ok_or_else(|| Error::UnknownEdge(pe.clone()))?;
            euf.union(ebase[a.residue] + i, ebase[np + a.piece] + j);
        }
    }

    // classes in order of first appearance among piece elements
    let collect = |uf: &mut UnionFind, base: &[usize], ids: &dyn Fn(&DirectedGraph) -> Vec<String>| -> Result<_> {
        let mut order: Vec<usize> = Vec::new();
        let mut members: BTreeMap<usize, Vec<Member>> = BTreeMap::new();
        for (k, (owner, g, is_residue)) in owners.iter().enumerate() {
            if *is_residue {
                continue;
            }
            for (i, id) in ids(g).into_iter().enumerate() {
                let root = uf.find(base[k] + i);
                let list = members.entry(root).or_default();
                if list.is_empty() {
                    order.push(root);
                }
                if list.iter().any(|(o, _)| o == *owner) {
                    return Err(Error::IncompatibleAttachment(format!(
                        "gluing identifies two elements of piece `{owner}`, one of them `{id}`"
                    )));
                }
                list.push(((*owner).clone(), id));
            }
        }
        // the class representative is the root element itself
        let mut rep = BTreeMap::new();
        for (k, (owner, g, _)) in owners.iter().enumerate() {
            for (i, id) in ids(g).into_iter().enumerate() {
                let x = base[k] + i;
                if uf.find(x) == x {
                    rep.insert(x, (((*owner).clone(), id), k < np));
                }
            }
        }
        let classes: Vec<(Member, bool)> = order.iter().map(|r| rep[r].clone()).collect();
        let names = class_names(&classes);
        Ok(order
            .iter()
            .zip(names)
            .zip(classes)
            .map(|((r, name), (_, shared))| (name, shared, members.remove(r).unwrap_or_default()))
            .collect::<Vec<_>>())
    };
    let vclasses = collect(&mut vuf, &vbase, &|g| g.vertices().to_vec())?;
    let eclasses = collect(&mut euf, &ebase, &|g| g.edges().iter().map(|e| e.id.clone()).collect())?;

    let mut vertex_of = BTreeMap::new();
    let mut vertex_members = BTreeMap::new();
    let mut shared_vertices = BTreeSet::new();
    for (name, shared, members) in &vclasses {
        for m in members {
            vertex_of.insert(m.clone(), name.clone());
        }
        if *shared {
            shared_vertices.insert(name.clone());
        }
        vertex_members.insert(name.clone(), members.clone());
    }
    let piece_graph: BTreeMap<&String, &DirectedGraph> = pieces.iter().map(|(n, g)| (n, *g)).collect();
    let mut edges = Vec::new();
    let mut edge_of = BTreeMap::new();
    let mut edge_members = BTreeMap::new();
    let mut shared_edges = BTreeSet::new();
    for (name, shared, members) in &eclasses {
        let (owner, id) = &members[0];
        let e = piece_graph[owner].require_edge(id)?;
        let ends = |v: &String| vertex_of[&(owner.clone(), v.clone())].clone();
        let (src, dst) = (ends(&e.src), ends(&e.dst));
        for (o, i) in members {
            let e2 = piece_graph[o].require_edge(i)?;
            let (s2, d2) = (&vertex_of[&(o.clone(), e2.src.clone())], &vertex_of[&(o.clone(), e2.dst.clone())]);
            if *s2 != src || *d2 != dst {
                return Err(Error::IncompatibleAttachment(format!("glued edge `{name}` has inconsistent endpoints")));
            }
            edge_of.insert((o.clone(), i.clone()), name.clone());
        }
        if *shared {
            shared_edges.insert(name.clone());
        }
        edge_members.insert(name.clone(), members.clone());
        edges.push(Edge::new(name.clone(), src, dst));
    }
    let graph = DirectedGraph::new(vclasses.iter().map(|(n, _, _)| n.clone()).collect::<Vec<_>>(), edges)?;
    Ok(Gluing {
        graph,
        vertex_of,
        edge_of,
        vertex_members,
        edge_members,
        shared_vertices,
        shared_edges,
    })
}

/// A graph weight on the pushout of two graphs, with the gluing data.
#[derive(Clone, Debug, PartialEq)]
pub struct SplicedGraph<T> {
    pub gluing: Gluing,
    pub weight: GraphWeight<T>,
}

fn require_nonzero<F: Field>(f: &F, x: &F::Elem, what: &str) -> Result<()> {
    if f.is_zero(x) {
        Err(Error::NotFaithful(format!("{what} vanishes")))
    } else {
        Ok(())
    }
}

/// `g` sums over the pieces containing a vertex; an edge ranging into a glued
/// vertex gets `sum_p lambda_p(e) g_p(r(e)) / g(r(e))` over the pieces containing it;
/// any other edge keeps its value.
fn splice_pieces<F: Field>(f: &F, gl: &Gluing, weights: &BTreeMap<String, (&DirectedGraph, GraphWeight<F::Elem>)>) -> Result<GraphWeight<F::Elem>> {
    let value = |m: &BTreeMap<String, F::Elem>, owner: &str, id: &str| -> Result<F::Elem> {
        m.get(id)
            .cloned()
            .ok_or_else(|| Error::MissingValue(format!("{owner}.{id}")))
    };
    let mut g = BTreeMap::new();
    for (v, members) in &gl.vertex_members {
        let mut total = f.zero();
        for (owner, id) in members {
            let x = value(&weights[owner].1.g, owner, id)?;
            require_nonzero(f, &x, &format!("g at {owner}.{id}"))?;
            total = f.add(&total, &x);
        }
        require_nonzero(f, &total, &format!("spliced g at {v}"))?;
        g.insert(v.clone(), total);
    }
    let mut lambda = BTreeMap::new();
    for (e, members) in &gl.edge_members {
        let r = &gl.graph.require_edge(e)?.dst;
        let value_e = if !gl.shared_vertices.contains(r) && !gl.shared_edges.contains(e) {
            let (owner, id) = &members[0];
            value(&weights[owner].1.lambda, owner, id)?
        } else {
            let mut num = f.zero();
            for (owner, id) in members {
                let (pg, pw) = &weights[owner];
                let pr = &pg.require_edge(id)?.dst;
                let term = f.mul(&value(&pw.lambda, owner, id)?, &value(&pw.g, owner, pr)?);
                num = f.add(&num, &term);
            }
            f.div(&num, &g[r])?
        };
        lambda.insert(e.clone(), value_e);
    }
    Ok(GraphWeight::new(g, lambda))
}

/// Splice faithful weights on `Gamma_1`, `Gamma_2` along a common subgraph `Gamma`.
/// Pieces are named `1` and `2`, the shared subgraph `0`.
pub fn splice_graph_weights<F: Field>(
    f: &F,
    w1: &GraphWeight<F::Elem>,
    w2: &GraphWeight<F::Elem>,
    emb1: &GraphEmbedding,
    emb2: &GraphEmbedding,
) -> Result<SplicedGraph<F::Elem>> {
    if emb1.source != emb2.source {
        return Err(Error::BadEmbedding("embeddings have different sources".into()));
    }
    let residues = [("0".to_string(), &emb1.source)];
    let pieces = [("1".to_string(), &emb1.target), ("2".to_string(), &emb2.target)];
    let attachments = [
        Attach {
            piece: 0,
            residue: 0,
            vertex_map: &emb1.vertex_map,
            edge_map: &emb1.edge_map,
        },
        Attach {
            piece: 1,
            residue: 0,
            vertex_map: &emb2.vertex_map,
            edge_map: &emb2.edge_map,
        },
    ];
    let gluing = glue(&residues, &pieces, &attachments).map_err(|e| match e {
        Error::IncompatibleAttachment(m) => Error::BadEmbedding(m),
        other => other,
    })?;
    let weights = BTreeMap::from([
        ("1".to_string(), (&emb1.target, w1.clone())),
        ("2".to_string(), (&emb2.target, w2.clone())),
    ]);
    let weight = splice_pieces(f, &gluing, &weights)?;
    Ok(SplicedGraph { gluing, weight })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttachmentSpec {
    pub piece: String,
    pub residue: String,
    pub vertex_map: BTreeMap<String, String>,
    pub edge_map: BTreeMap<String, String>,
}

/// JSON form of a blueprint: pieces `Sigma_ij`, residues `Sigma_i`, and the maps `phi_ij`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AmalgamSpec {
    pub pieces: BTreeMap<String, Oriented2Complex>,
    pub residues: BTreeMap<String, DirectedGraph>,
    #[serde(default)]
    pub attachments: Vec<AttachmentSpec>,
}

/// A blueprint together with its foundation.
#[derive(Clone, Debug, PartialEq)]
pub struct Amalgam {
    pub spec: AmalgamSpec,
    pub gluing: Gluing,
    pub face_of: BTreeMap<Member, String>,
    pub foundation: Oriented2Complex,
}

impl Amalgam {
    /// Glued skeleton edges, each a single vertex of the foundation's
    /// boundary graph, with the piece edges identified into it.
    pub fn boundary_identifications(&self) -> BTreeMap<String, Vec<Member>> {
        self.gluing
            .edge_members
            .iter()
            .filter(|(_, m)| m.len() > 1)
            .map(|(e, m)| (e.clone(), m.clone()))
            .collect()
    }
}

pub fn build_amalgam(spec: AmalgamSpec) -> Result<Amalgam> {
    let residues: Vec<(String, &DirectedGraph)> = spec.residues.iter().map(|(k, g)| (k.clone(), g)).collect();
    let pieces: Vec<(String, &DirectedGraph)> = spec.pieces.iter().map(|(k, c)| (k.clone(), c.skeleton())).collect();
    let mut attachments = Vec::new();
    for a in &spec.attachments {
        let piece = pieces
            .iter()
            .position(|(k, _)| *k == a.piece)
            .ok_or_else(|| Error::IncompatibleAttachment(format!("unknown piece `{}`", a.piece)))?;
        let residue = residues
            .iter()
            .position(|(k, _)| *k == a.residue)
            .ok_or_else(|| Error::IncompatibleAttachment(format!("unknown residue `{}`", a.residue)))?;
        check_embedding(residues[residue].1, pieces[piece].1, &a.vertex_map, &a.edge_map).map_err(|m| {
            Error::IncompatibleAttachment(format!("residue `{}` into piece `{}`: {m}", a.residue, a.piece))
        })?;
        attachments.push(Attach {
            piece,
            residue,
            vertex_map: &a.vertex_map,
            edge_map: &a.edge_map,
        });
    }
    let gluing = glue(&residues, &pieces, &attachments)?;

    let all: Vec<(Member, bool)> = spec
        .pieces
        .iter()
        .flat_map(|(p, c)| c.faces().iter().map(move |f| ((p.clone(), f.id.clone()), false)))
        .collect();
    let names = class_names(&all);
    let mut face_of = BTreeMap::new();
    let mut faces = Vec::new();
    for (((p, fid), _), name) in all.iter().zip(names) {
        let face = spec.pieces[p].face(fid).expect("face listed from its piece");
        let boundary: Vec<String> = face
            .boundary
            .iter()
            .map(|e| gluing.edge_of[&(p.clone(), e.clone())].clone())
            .collect();
        faces.push(Face {
            id: name.clone(),
            boundary,
        });
        face_of.insert((p.clone(), fid.clone()), name);
    }
    let foundation = Oriented2Complex::new(gluing.graph.clone(), faces)?;
    Ok(Amalgam {
        spec,
        gluing,
        face_of,
        foundation,
    })
}

/// Splice faithful standard (or plain rank-2) weights on the pieces into a
/// weight on the foundation. Tight weights are rejected: the two splicing
/// rules for `lambda` and `lambda_tilde` break `lambda = lambda_tilde`.
pub fn splice_cw_weights<F: Field>(f: &F, am: &Amalgam, weights: &BTreeMap<String, Rank2Weight<F::Elem>>) -> Result<Rank2Weight<F::Elem>> {
    let mut mode = CwMode::Standard;
    for (p, w) in weights {
        match w.mode {
            CwMode::Tight => {
                return Err(Error::ModeError(format!("piece `{p}` carries a tight weight, which does not splice")));
            }
            CwMode::Rank2 => mode = CwMode::Rank2,
            CwMode::Standard => {}
        }
    }
    let mut skeleton = BTreeMap::new();
    for p in am.spec.pieces.keys() {
        let w = weights
            .get(p)
            .ok_or_else(|| Error::MissingValue(format!("weight for piece `{p}`")))?;
        skeleton.insert(p.clone(), (am.spec.pieces[p].skeleton(), w.skeleton_weight()));
    }
    let st = splice_pieces(f, &am.gluing, &skeleton)?;

    let mut lambda = BTreeMap::new();
    for (e, members) in &am.gluing.edge_members {
        let mut total = f.zero();
        for (p, id) in members {
            let x = weights[p]
                .lambda
                .get(id)
                .ok_or_else(|| Error::MissingValue(format!("{p}.{id}")))?;
            require_nonzero(f, x, &format!("lambda at {p}.{id}"))?;
            total = f.add(&total, x);
        }
        require_nonzero(f, &total, &format!("spliced lambda at {e}"))?;
        lambda.insert(e.clone(), total);
    }

    let mut eta = BTreeMap::new();
    let mut eta_incidence = BTreeMap::new();
    for ((p, fid), name) in &am.face_of {
        let w = &weights[p];
        let face = am.spec.pieces[p].face(fid).expect("face of its piece");
        eta.insert(
            name.clone(),
            w.eta.get(fid).cloned().ok_or_else(|| Error::MissingValue(fid.clone()))?,
        );
        let n = face.len();
        for pos in 0..n {
            let next = &face.boundary[(pos + 1) % n];
            let glued = &am.gluing.edge_of[&(p.clone(), next.clone())];
            let local = w.eta_at(fid, pos)?;
            let value = if am.gluing.shared_edges.contains(glued) {
                f.div(&f.mul(&local, &w.lambda[next]), &lambda[glued])?
            } else {
                local
            };
            let own = w.eta.get(fid);
            if own.is_none_or(|v| !f.eq(v, &value)) {
                eta_incidence.insert(boundary_edge_id(name, pos), value);
            }
        }
    }
    Ok(Rank2Weight {
        g: st.g,
        lambda_tilde: st.lambda,
        lambda,
        eta,
        eta_incidence,
        mode,
    })
}
