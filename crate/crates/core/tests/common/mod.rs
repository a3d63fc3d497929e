//! Random structures and independent exact oracles shared by the
//! integration tests.

#![allow(dead_code)]

use std::collections::BTreeMap;

use kms_weights::complex::{Face, Oriented2Complex};
use kms_weights::graph::{DirectedGraph, Edge};
use kms_weights::weight::GraphWeight;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Random multigraph on `1..=n_max` vertices with up to `e_max` extra edges.
/// With `no_sinks`, every vertex gets at least one outgoing edge.
pub fn random_graph(r: &mut ChaCha8Rng, n_max: usize, e_max: usize, no_sinks: bool) -> DirectedGraph {
    let n = r.gen_range(1..=n_max);
    let vertices: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let mut edges = Vec::new();
    let push = |s: usize, t: usize, edges: &mut Vec<Edge>| {
        let id = format!("e{}", edges.len());
        edges.push(Edge::new(id, vertices[s].clone(), vertices[t].clone()));
    };
    if no_sinks {
        for s in 0..n {
            push(s, r.gen_range(0..n), &mut edges);
        }
    }
    for _ in 0..r.gen_range(0..=e_max) {
        push(r.gen_range(0..n), r.gen_range(0..n), &mut edges);
    }
    DirectedGraph::new(vertices.clone(), edges).unwrap()
}

/// An exact faithful graph weight: random positive `g`, and at each non-sink
/// `v` random positive edge shares rescaled so the weight equation holds.
pub fn random_rational_weight(r: &mut ChaCha8Rng, graph: &DirectedGraph) -> GraphWeight<BigRational> {
    let g: Vec<BigRational> = (0..graph.num_vertices()).map(|_| q(r.gen_range(1..=9), r.gen_range(1..=4))).collect();
    let mut lambda = vec![BigRational::zero(); graph.num_edges()];
    for v in 0..graph.num_vertices() {
        let out = graph.out_edges(v);
        if out.is_empty() {
            continue;
        }
        let shares: Vec<BigRational> = out.iter().map(|_| q(r.gen_range(1..=5), 1)).collect();
        let flow: BigRational = out.iter().zip(&shares).map(|(&e, a)| a * &g[graph.dst_of(e)]).sum();
        for (&e, a) in out.iter().zip(&shares) {
            lambda[e] = a * &g[v] / &flow;
        }
    }
    GraphWeight::from_vecs(graph, g, lambda)
}

pub fn to_f64(w: &GraphWeight<BigRational>) -> GraphWeight<f64> {
    use num_traits::ToPrimitive;
    w.map(|x| x.to_f64().unwrap())
}

/// Random complex on a strongly connected skeleton: a Hamiltonian cycle plus
/// random chords, with faces closed random walks of length at most `max_face`.
pub fn random_complex(r: &mut ChaCha8Rng, n_max: usize, faces_max: usize, max_face: usize) -> Oriented2Complex {
    let n = r.gen_range(1..=n_max);
    let vertices: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let mut edges: Vec<Edge> = (0..n)
        .map(|i| Edge::new(format!("h{i}"), vertices[i].clone(), vertices[(i + 1) % n].clone()))
        .collect();
    for k in 0..r.gen_range(0..=n + 1) {
        edges.push(Edge::new(format!("c{k}"), vertices[r.gen_range(0..n)].clone(), vertices[r.gen_range(0..n)].clone()));
    }
    let sk = DirectedGraph::new(vertices, edges).unwrap();
    let mut faces = Vec::new();
    for k in 0..r.gen_range(1..=faces_max) {
        let start = r.gen_range(0..n);
        let mut at = start;
        let mut word = Vec::new();
        for _ in 0..r.gen_range(1..=max_face) {
            let e = *sk.out_edges(at).choose(r).unwrap();
            word.push(sk.edges()[e].id.clone());
            at = sk.dst_of(e);
        }
        // close along the Hamiltonian cycle
        while at != start {
            word.push(format!("h{at}"));
            at = (at + 1) % n;
        }
        let ids: Vec<&str> = word.iter().map(String::as_str).collect();
        faces.push(Face::new(format!("s{k}"), &ids));
    }
    Oriented2Complex::new(sk, faces).unwrap()
}

/// Random triangular complex: triangles chosen among the closed 3-walks of a
/// random multigraph.
pub fn random_triangular(r: &mut ChaCha8Rng) -> Option<Oriented2Complex> {
    let sk = random_graph(r, 3, 6, true);
    let mut triangles = Vec::new();
    for a in 0..sk.num_edges() {
        for &b in sk.out_edges(sk.dst_of(a)) {
            for &c in sk.out_edges(sk.dst_of(b)) {
                if sk.dst_of(c) == sk.src_of(a) {
                    triangles.push([a, b, c]);
                }
            }
        }
    }
    if triangles.is_empty() {
        return None;
    }
    let k = r.gen_range(1..=triangles.len().min(4));
    let faces = triangles
        .choose_multiple(r, k)
        .enumerate()
        .map(|(i, t)| {
            let ids: Vec<&str> = t.iter().map(|&e| sk.edges()[e].id.as_str()).collect();
            Face::new(format!("t{i}"), &ids)
        })
        .collect();
    Some(Oriented2Complex::new(sk, faces).unwrap())
}

/// A shared graph and two pieces containing it, every vertex of each piece a non-sink.
pub fn random_pieces(r: &mut ChaCha8Rng) -> (DirectedGraph, DirectedGraph, DirectedGraph) {
    let k = r.gen_range(1..=3);
    let shared_v: Vec<String> = (0..k).map(|i| format!("s{i}")).collect();
    let shared_e: Vec<Edge> = (0..r.gen_range(0..=2))
        .map(|i| Edge::new(format!("se{i}"), shared_v[r.gen_range(0..k)].clone(), shared_v[r.gen_range(0..k)].clone()))
        .collect();
    let shared = DirectedGraph::new(shared_v.clone(), shared_e.clone()).unwrap();
    let piece = |r: &mut ChaCha8Rng| {
        let extra = r.gen_range(0..=3);
        let mut vs = shared_v.clone();
        vs.extend((0..extra).map(|i| format!("p{i}")));
        let n = vs.len();
        let mut es = shared_e.clone();
        let add = |s: usize, t: usize, es: &mut Vec<Edge>| {
            let id = format!("pe{}", es.len());
            es.push(Edge::new(id, vs[s].clone(), vs[t].clone()));
        };
        for s in 0..n {
            if !es.iter().any(|e| e.src == vs[s]) {
                add(s, r.gen_range(0..n), &mut es);
            }
        }
        for _ in 0..r.gen_range(0..=3) {
            add(r.gen_range(0..n), r.gen_range(0..n), &mut es);
        }
        DirectedGraph::new(vs.clone(), es).unwrap()
    };
    let p1 = piece(r);
    let p2 = piece(r);
    (shared, p1, p2)
}

/// Determinant by Laplace expansion along the first row, skipping zeros.
pub fn laplace_det(m: &[Vec<BigRational>]) -> BigRational {
    let n = m.len();
    if n == 0 {
        return BigRational::one();
    }
    let mut total = BigRational::zero();
    for j in 0..n {
        if m[0][j].is_zero() {
            continue;
        }
        let minor: Vec<Vec<BigRational>> = m[1..]
            .iter()
            .map(|row| row.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, x)| x.clone()).collect())
            .collect();
        let term = &m[0][j] * laplace_det(&minor);
        if j % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    total
}

/// `sum lambda(e)` over edges `i -> j`, minus the identity, with sink rows zero;
/// built straight from the edge list.
pub fn weighted_matrix(graph: &DirectedGraph, lambda: &dyn Fn(usize) -> BigRational) -> Vec<Vec<BigRational>> {
    let n = graph.num_vertices();
    let mut m = vec![vec![BigRational::zero(); n]; n];
    let mut has_out = vec![false; n];
    for (k, e) in graph.edges().iter().enumerate() {
        let i = graph.vertices().iter().position(|v| *v == e.src).unwrap();
        let j = graph.vertices().iter().position(|v| *v == e.dst).unwrap();
        m[i][j] += lambda(k);
        has_out[i] = true;
    }
    for i in 0..n {
        if has_out[i] {
            m[i][i] -= BigRational::one();
        }
    }
    m
}

/// Reduced row echelon form; returns the pivot columns.
pub fn rref(m: &mut [Vec<BigRational>]) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for k in 0..cols {
                    let d = &f * &m[r][k];
                    m[i][k] -= d;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    pivots
}

/// Kernel basis of `m` by exact elimination.
pub fn kernel(m: &[Vec<BigRational>], cols: usize) -> Vec<Vec<BigRational>> {
    let mut a = m.to_vec();
    let pivots = rref(&mut a);
    (0..cols)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = vec![BigRational::zero(); cols];
            v[free] = BigRational::one();
            for (row, &p) in pivots.iter().enumerate() {
                v[p] = -a[row][free].clone();
            }
            v
        })
        .collect()
}

/// Whether `ker m` holds a strictly positive vector, decided exhaustively:
/// the cone `ker m` intersected with the positive orthant is spanned by its
/// extreme rays, which are the sign-definite generators of one-dimensional
/// kernels of column subsets; a positive vector exists iff their supports
/// cover every coordinate.
pub fn has_positive_kernel_vector(m: &[Vec<BigRational>]) -> bool {
    let n = m.first().map_or(0, Vec::len);
    let mut covered = vec![false; n];
    for mask in 1u32..(1 << n) {
        let support: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        let sub: Vec<Vec<BigRational>> = m.iter().map(|row| support.iter().map(|&j| row[j].clone()).collect()).collect();
        let k = kernel(&sub, support.len());
        if k.len() != 1 {
            continue;
        }
        let v = &k[0];
        if v.iter().all(|x| x.is_positive()) || v.iter().all(|x| x.is_negative()) {
            for &i in &support {
                covered[i] = true;
            }
        }
    }
    n > 0 && covered.iter().all(|&c| c)
}

pub fn ids_to_map<T: Clone>(ids: &[String], values: &[T]) -> BTreeMap<String, T> {
    ids.iter().cloned().zip(values.iter().cloned()).collect()
}
