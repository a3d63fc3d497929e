//! Worked examples: the two-face complex `figB`, its closed-form weights,
//! the monogon triangle, and the registry used by the command line.
//!
//! `figB` has skeleton `a: u->x, b: x->y, c: y->v, d: v->u, e: u->z, f: z->v`
//! and faces `s1 = (a, b, c, d)`, `s2 = (d, e, f)`. The endpoints are read off
//! the weight equations `g(u) = lt(a) g(x) + lt(e) g(z)`, `g(x) = lt(b) g(y)`,
//! `g(y) = lt(c) g(v)`, `g(v) = lt(d) g(u)`, `g(z) = lt(f) g(v)` and the face
//! words off the boundary system `lambda(d) = eta lambda(a) + eta lambda(e)`.

use crate::a2::{fano_plane, TrianglePresentation};
use crate::complex::{Face, Oriented2Complex};
use crate::cw::{CwMode, Rank2Weight};
use crate::field::Field;
use crate::graph::DirectedGraph;
use crate::io::Structure;
use crate::splice::{AmalgamSpec, AttachmentSpec};

pub const FIGB_VERTICES: [&str; 5] = ["x", "y", "z", "u", "v"];
pub const FIGB_EDGES: [&str; 6] = ["a", "b", "c", "d", "e", "f"];

pub fn single_loop() -> DirectedGraph {
    DirectedGraph::from_triples(&["v"], &[("e", "v", "v")]).expect("valid fixture")
}

pub fn figb_skeleton() -> DirectedGraph {
    DirectedGraph::from_triples(
        &FIGB_VERTICES,
        &[
            ("a", "u", "x"),
            ("b", "x", "y"),
            ("c", "y", "v"),
            ("d", "v", "u"),
            ("e", "u", "z"),
            ("f", "z", "v"),
        ],
    )
    .expect("valid fixture")
}

pub fn figb() -> Oriented2Complex {
    Oriented2Complex::new(
        figb_skeleton(),
        vec![Face::new("s1", &["a", "b", "c", "d"]), Face::new("s2", &["d", "e", "f"])],
    )
    .expect("valid fixture")
}

pub fn figb_boundary() -> DirectedGraph {
    figb().boundary_graph().graph
}

/// `(eta1^3, eta1^2, eta1, 1, eta2^2, eta2)` on `(a, ..., f)`.
pub fn figb_lambda0<F: Field>(f: &F, eta1: &F::Elem, eta2: &F::Elem) -> Vec<F::Elem> {
    vec![
        f.pow(eta1, 3),
        f.pow(eta1, 2),
        eta1.clone(),
        f.one(),
        f.pow(eta2, 2),
        eta2.clone(),
    ]
}

/// The standard 2D CW weight with face values `eta1` on `s1`, `eta2` on `s2`:
/// `g = C (eta1^2, eta1, eta2, eta1^3 + eta2^2, 1)`,
/// `lambda_tilde = (eta1, eta1, eta1, 1/(eta1^3 + eta2^2), eta2, eta2)`, `lambda = C lambda_0`.
/// With `eta1 = eta2 = eta0` this is the special family, where `eta^3 + eta^2 = 1/eta`.
pub fn figb_standard_weight<F: Field>(f: &F, eta1: &F::Elem, eta2: &F::Elem, scale: &F::Elem) -> Rank2Weight<F::Elem> {
    let gu = f.add(&f.pow(eta1, 3), &f.pow(eta2, 2));
    let g = [f.pow(eta1, 2), eta1.clone(), eta2.clone(), gu.clone(), f.one()]
        .iter()
        .map(|x| f.mul(x, scale))
        .collect();
    let lt = vec![
        eta1.clone(),
        eta1.clone(),
        eta1.clone(),
        f.inv(&gu).expect("eta1^3 + eta2^2 > 0"),
        eta2.clone(),
        eta2.clone(),
    ];
    let lambda = figb_lambda0(f, eta1, eta2).iter().map(|x| f.mul(x, scale)).collect();
    Rank2Weight::from_vecs(&figb(), g, lt, lambda, vec![eta1.clone(), eta2.clone()], CwMode::Standard)
}

/// The tight weight `(g, C lambda_0, eta)`: with `g(v) = 1` the skeleton
/// system gives `g = (C^2 eta^3, C eta, C eta, 1/C, 1)`, consistent exactly
/// when `1 - C^3 eta^3 - C^4 eta^6 = 0`.
pub fn figb_tight_weight<F: Field>(f: &F, eta: &F::Elem, c: &F::Elem) -> Rank2Weight<F::Elem> {
    let ce = f.mul(c, eta);
    let g = vec![
        f.mul(&f.mul(c, c), &f.pow(eta, 3)),
        ce.clone(),
        ce,
        f.inv(c).expect("C > 0"),
        f.one(),
    ];
    let lambda: Vec<F::Elem> = figb_lambda0(f, eta, eta).iter().map(|x| f.mul(x, c)).collect();
    Rank2Weight::from_vecs(&figb(), g, lambda.clone(), lambda, vec![eta.clone(), eta.clone()], CwMode::Tight)
}

/// One vertex, three loops, one triangular face `(e1, e2, e3)`.
pub fn monogon_triangle() -> Oriented2Complex {
    let g = DirectedGraph::from_triples(&["o"], &[("e1", "o", "o"), ("e2", "o", "o"), ("e3", "o", "o")])
        .expect("valid fixture");
    Oriented2Complex::new(g, vec![Face::new("t", &["e1", "e2", "e3"])]).expect("valid fixture")
}

/// Two copies `12`, `13` of `figB` glued along the residue `1 = (d: v -> u)`.
pub fn figb_amalgam() -> AmalgamSpec {
    let residue = DirectedGraph::from_triples(&["v", "u"], &[("d", "v", "u")]).expect("valid fixture");
    let id = |xs: &[&str]| xs.iter().map(|x| (x.to_string(), x.to_string())).collect();
    let attach = |piece: &str| AttachmentSpec {
        piece: piece.into(),
        residue: "1".into(),
        vertex_map: id(&["u", "v"]),
        edge_map: id(&["d"]),
    };
    AmalgamSpec {
        pieces: [("12".to_string(), figb()), ("13".to_string(), figb())].into(),
        residues: [("1".to_string(), residue)].into(),
        attachments: vec![attach("12"), attach("13")],
    }
}

/// The triangle presentation of order 2 with relations
/// `x0x0x6, x0x2x3, x1x2x6, x1x3x5, x1x5x4, x2x4x5, x3x4x6` over the Fano plane,
/// `lambda(x_i)` the line `{j, j+1, j+3}` with `j = 6, 2, 3, 4, 5, 1, 0`.
pub fn gamma_q2() -> TrianglePresentation {
    let triples = vec![[0, 0, 6], [0, 2, 3], [1, 2, 6], [1, 3, 5], [1, 5, 4], [2, 4, 5], [3, 4, 6]];
    TrianglePresentation::new(fano_plane(), vec![6, 2, 3, 4, 5, 1, 0], triples).expect("valid fixture")
}

/// Names accepted by [`fixture`].
pub const FIXTURE_NAMES: [&str; 7] = [
    "figB",
    "figB-skeleton",
    "figB-boundary",
    "figB-amalgam",
    "gamma-q2",
    "monogon",
    "single-loop",
];

pub fn fixture(name: &str) -> Option<Structure> {
    Some(match name {
        "figB" => Structure::Complex(figb()),
        "figB-skeleton" => Structure::Graph(figb_skeleton()),
        "figB-boundary" => Structure::Graph(figb_boundary()),
        "figB-amalgam" => Structure::Amalgam(figb_amalgam()),
        "gamma-q2" => Structure::Presentation(gamma_q2()),
        "monogon" => Structure::Complex(monogon_triangle()),
        "single-loop" => Structure::Graph(single_loop()),
        _ => return None,
    })
}
