//! Property tests over random graphs, complexes and weights.

mod common;

use std::collections::{BTreeMap, BTreeSet};

use common::*;
use kms_weights::cw::{solve_2dcw, verify_rank2, CwMode};
use kms_weights::field::{Field, Rationals, Reals};
use kms_weights::fixtures;
use kms_weights::graph::{DirectedGraph, GraphSpec};
use kms_weights::complex::Oriented2Complex;
use kms_weights::path_algebra::{monomial_product, GraphFunctional, Path, PathMonomial};
use kms_weights::splice::{splice_graph_weights, GraphEmbedding, Member};
use kms_weights::weight::{
    boundary_matrix_special, det_polynomial, positive_kernel, solve_special_weights, verify_graph_weight,
    verify_graph_weight_f64, KernelStatus, DEFAULT_EPS,
};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

fn cases(n: u32) -> ProptestConfig {
    ProptestConfig::with_cases(n)
}

// ---- graphs ----

proptest! {
    #![proptest_config(cases(128))]

    #[test]
    fn bundles_partition_the_edges(seed in any::<u64>()) {
        let g = random_graph(&mut rng(seed), 6, 12, false);
        let counts = g.adjacency_counts();
        let mut total = 0;
        for (i, v) in g.vertices().iter().enumerate() {
            let bundle = g.edge_bundle(v).unwrap();
            prop_assert_eq!(counts[i].iter().sum::<u64>() as usize, bundle.edges.len());
            for e in &bundle.edges {
                prop_assert_eq!(&g.edge(e).unwrap().src, v);
            }
            total += bundle.edges.len();
        }
        prop_assert_eq!(total, g.num_edges());
    }

    #[test]
    fn graph_roundtrip(seed in any::<u64>()) {
        let g = random_graph(&mut rng(seed), 6, 12, false);
        let text = serde_json::to_string(&g).unwrap();
        let back: DirectedGraph = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(&back, &g);
        prop_assert_eq!(DirectedGraph::from_spec(g.to_spec()).unwrap(), g.clone());
        let spec: GraphSpec = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(spec, g.to_spec());
    }
}

// ---- weight solver ----

proptest! {
    #![proptest_config(cases(24))]

    #[test]
    fn det_matches_laplace_expansion(seed in any::<u64>(), num in 1i64..12, den in 1i64..12) {
        let mut r = rng(seed);
        let no_sinks = r.gen_bool(0.8);
        let g = random_graph(&mut r, 8, 6, no_sinks);
        let det = det_polynomial(&boundary_matrix_special(&g));
        let eta = q(num, den);
        let m = weighted_matrix(&g, &|_| eta.clone());
        prop_assert_eq!(det.eval(&eta), laplace_det(&m));
    }

    #[test]
    fn special_families_verify(seed in any::<u64>()) {
        let g = random_graph(&mut rng(seed), 5, 5, true);
        let sol = solve_special_weights(&g, DEFAULT_EPS).unwrap();
        for fam in &sol.families {
            prop_assert!(!fam.exact_basis.is_empty(), "trivial kernel at eta = {}", fam.eta_f64());
            if !fam.faithful {
                continue;
            }
            let w = fam.weight_f64(&g, 1.0).unwrap();
            let rep = verify_graph_weight_f64(&g, &w, 1e-10).unwrap();
            prop_assert!(rep.passed(), "residual {}", rep.check.max_residual);
            if let Some(exact) = fam.weight_exact(&g) {
                prop_assert!(verify_graph_weight(&fam.field, &g, &exact, 0.0).unwrap().passed());
            }
        }
    }
}

/// Edge values on a small grid, or an exact positive weight, so both outcomes occur.
fn grid_or_weight(r: &mut ChaCha8Rng, g: &DirectedGraph) -> Vec<BigRational> {
    if r.gen_bool(0.5) {
        let grid = [q(1, 3), q(1, 2), q(1, 1), q(2, 1), q(3, 1)];
        (0..g.num_edges()).map(|_| grid.choose(r).unwrap().clone()).collect()
    } else {
        let w = random_rational_weight(r, g);
        w.lambda_vec(g).unwrap()
    }
}

proptest! {
    #![proptest_config(cases(200))]

    #[test]
    fn positive_kernel_agrees_with_exhaustive_oracle(seed in any::<u64>()) {
        let mut r = rng(seed);
        let no_sinks = r.gen_bool(0.5);
        let g = random_graph(&mut r, 4, 6, no_sinks);
        let lambda = grid_or_weight(&mut r, &g);
        let m = weighted_matrix(&g, &|e| lambda[e].clone());
        let oracle = has_positive_kernel_vector(&m);
        let mf: Vec<Vec<f64>> = m.iter().map(|row| row.iter().map(|x| x.to_f64().unwrap()).collect()).collect();
        let pk = positive_kernel(&mf, 1e-10);
        prop_assert_eq!(pk.status == KernelStatus::Positive, oracle, "{:?}", pk);
    }
}

// ---- complexes ----

fn transpose(m: &[Vec<u64>]) -> Vec<Vec<u64>> {
    (0..m.len()).map(|j| m.iter().map(|row| row[j]).collect()).collect()
}

proptest! {
    #![proptest_config(cases(96))]

    #[test]
    fn predecessor_graph_is_transpose(seed in any::<u64>()) {
        let c = random_complex(&mut rng(seed), 4, 4, 5);
        let b = c.boundary_graph().graph.adjacency_counts();
        let p = c.predecessor_graph().graph.adjacency_counts();
        prop_assert_eq!(p, transpose(&b));
    }

    #[test]
    fn boundary_sinks_are_edges_in_no_face(seed in any::<u64>()) {
        let c = random_complex(&mut rng(seed), 4, 3, 4);
        let used: BTreeSet<&String> = c.faces().iter().flat_map(|f| &f.boundary).collect();
        let b = c.boundary_graph().graph;
        for (i, e) in b.vertices().iter().enumerate() {
            prop_assert_eq!(b.is_sink(i), !used.contains(e));
        }
    }

    #[test]
    fn complex_roundtrip(seed in any::<u64>()) {
        let c = random_complex(&mut rng(seed), 4, 4, 5);
        let text = serde_json::to_string(&c).unwrap();
        let back: Oriented2Complex = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, c);
    }

    #[test]
    fn triangular_determinants_agree(seed in any::<u64>()) {
        if let Some(c) = random_triangular(&mut rng(seed)) {
            let a = det_polynomial(&boundary_matrix_special(&c.boundary_graph().graph));
            let b = det_polynomial(&boundary_matrix_special(&c.predecessor_graph().graph));
            prop_assert_eq!(a, b);
        }
    }
}

// ---- cw weights ----

proptest! {
    #![proptest_config(cases(16))]

    #[test]
    fn standard_weights_scale(num in 1i64..50, den in 1i64..50) {
        let c = fixtures::figb();
        let sol = solve_2dcw(&c, CwMode::Standard, true, DEFAULT_EPS).unwrap();
        let fam = sol.faithful_families().next().unwrap();
        let k = &fam.field;
        let s = k.from_rational(&q(num, den));
        let exact = fam.solutions[0].exact.clone().unwrap();
        let mut scaled = exact.clone();
        for m in [&mut scaled.g, &mut scaled.lambda] {
            for x in m.values_mut() {
                *x = k.mul(x, &s);
            }
        }
        prop_assert!(verify_rank2(k, &c, &scaled, 0.0).unwrap().passed);
        let cf = num as f64 / den as f64;
        let mut approx = fam.solutions[0].weight.clone();
        for m in [&mut approx.g, &mut approx.lambda] {
            for x in m.values_mut() {
                *x *= cf;
            }
        }
        prop_assert!(verify_rank2(&Reals, &c, &approx, 1e-10 * cf.max(1.0)).unwrap().passed);
    }
}

// ---- path algebra ----

/// Random path of length at most `max_len` ending at `end`, walking backwards.
fn path_into(r: &mut ChaCha8Rng, g: &DirectedGraph, end: usize, max_len: usize) -> Path {
    let mut edges = Vec::new();
    let mut at = end;
    for _ in 0..r.gen_range(0..=max_len) {
        let Some(&e) = g.in_edges(at).choose(r) else { break };
        edges.push(e);
        at = g.src_of(e);
    }
    edges.reverse();
    Path { start: at, edges }
}

fn random_monomial(r: &mut ChaCha8Rng, g: &DirectedGraph, max_len: usize) -> PathMonomial {
    let end = r.gen_range(0..g.num_vertices());
    let mu = path_into(r, g, end, max_len);
    let nu = path_into(r, g, end, max_len);
    let c = Complex64::new(r.gen_range(-2.0..2.0), r.gen_range(-2.0..2.0));
    PathMonomial::new(g, mu, nu).unwrap().scaled(c)
}

fn product(g: &DirectedGraph, a: &PathMonomial, b: &PathMonomial) -> Option<PathMonomial> {
    let mut out = monomial_product(g, a, b).unwrap();
    assert!(out.len() <= 1);
    out.pop()
}

fn close(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() <= 1e-10 * (1.0 + a.norm().max(b.norm()))
}

proptest! {
    #![proptest_config(cases(256))]

    #[test]
    fn monomial_product_is_associative(seed in any::<u64>()) {
        let mut r = rng(seed);
        let g = random_graph(&mut r, 3, 4, true);
        let [a, b, c] = [0, 1, 2].map(|_| random_monomial(&mut r, &g, 3));
        let left = product(&g, &a, &b).and_then(|ab| product(&g, &ab, &c));
        let right = product(&g, &b, &c).and_then(|bc| product(&g, &a, &bc));
        match (left, right) {
            (None, None) => {}
            (Some(x), Some(y)) => {
                prop_assert_eq!(&x.mu, &y.mu);
                prop_assert_eq!(&x.nu, &y.nu);
                prop_assert!(close(x.coeff, y.coeff));
            }
            (x, y) => prop_assert!(false, "{:?} vs {:?}", x, y),
        }
    }

    #[test]
    fn evolution_is_multiplicative(seed in any::<u64>(), t_re in -3.0f64..3.0, t_im in -1.0f64..1.0) {
        let mut r = rng(seed);
        let g = random_graph(&mut r, 3, 4, true);
        let w = to_f64(&random_rational_weight(&mut r, &g));
        let psi = GraphFunctional::new(&g, &w).unwrap();
        let t = Complex64::new(t_re, t_im);
        let a = random_monomial(&mut r, &g, 3);
        let b = random_monomial(&mut r, &g, 3);
        if let Some(ab) = product(&g, &a, &b) {
            let lhs = product(&g, &psi.evolve(&a, t).unwrap(), &psi.evolve(&b, t).unwrap()).unwrap();
            let rhs = psi.evolve(&ab, t).unwrap();
            prop_assert!(close(lhs.coeff, rhs.coeff), "{} vs {}", lhs.coeff, rhs.coeff);
        }
    }

    #[test]
    fn ck_consistency(seed in any::<u64>()) {
        let mut r = rng(seed);
        let no_sinks = r.gen_bool(0.7);
        let g = random_graph(&mut r, 5, 8, no_sinks);
        let w = to_f64(&random_rational_weight(&mut r, &g));
        prop_assert!(verify_graph_weight_f64(&g, &w, 1e-12).unwrap().passed());
        let psi = GraphFunctional::new(&g, &w).unwrap();
        for v in (0..g.num_vertices()).filter(|&v| !g.is_sink(v)) {
            let pv = psi.eval(&PathMonomial::projection(v));
            let range: Complex64 = g
                .out_edges(v)
                .iter()
                .map(|&e| {
                    let see = product(&g, &PathMonomial::edge(&g, e), &PathMonomial::edge_adjoint(&g, e)).unwrap();
                    psi.eval(&see)
                })
                .sum();
            prop_assert!((pv - range).norm() <= 1e-10, "{} vs {}", pv, range);
        }
    }
}

// ---- splicing ----

fn swap_owner(members: &[Member]) -> BTreeSet<Member> {
    members
        .iter()
        .map(|(o, id)| {
            let o = match o.as_str() {
                "1" => "2",
                "2" => "1",
                other => other,
            };
            (o.to_string(), id.clone())
        })
        .collect()
}

/// Values of `map` keyed by member sets, owners swapped when `swap`.
fn by_members<'a>(
    members: &BTreeMap<String, Vec<Member>>,
    map: &'a BTreeMap<String, BigRational>,
    swap: bool,
) -> BTreeMap<BTreeSet<Member>, &'a BigRational> {
    members
        .iter()
        .map(|(id, ms)| {
            let key = if swap { swap_owner(ms) } else { ms.iter().cloned().collect() };
            (key, &map[id])
        })
        .collect()
}

proptest! {
    #![proptest_config(cases(64))]

    #[test]
    fn splice_closure_symmetry_and_faithfulness(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (shared, p1, p2) = random_pieces(&mut r);
        let w1 = random_rational_weight(&mut r, &p1);
        let w2 = random_rational_weight(&mut r, &p2);
        let e1 = GraphEmbedding::inclusion(shared.clone(), p1.clone()).unwrap();
        let e2 = GraphEmbedding::inclusion(shared.clone(), p2.clone()).unwrap();
        let s12 = splice_graph_weights(&Rationals, &w1, &w2, &e1, &e2).unwrap();
        let s21 = splice_graph_weights(&Rationals, &w2, &w1, &e2, &e1).unwrap();
        let glued = &s12.gluing.graph;
        prop_assert_eq!(glued.num_vertices(), p1.num_vertices() + p2.num_vertices() - shared.num_vertices());
        prop_assert_eq!(glued.num_edges(), p1.num_edges() + p2.num_edges() - shared.num_edges());
        let rep = verify_graph_weight(&Rationals, glued, &s12.weight, 0.0).unwrap();
        prop_assert!(rep.passed(), "{:?}", rep.check);
        prop_assert!(s12.weight.g.values().chain(s12.weight.lambda.values()).all(|x| x.is_positive()));
        prop_assert_eq!(
            by_members(&s12.gluing.vertex_members, &s12.weight.g, false),
            by_members(&s21.gluing.vertex_members, &s21.weight.g, true)
        );
        prop_assert_eq!(
            by_members(&s12.gluing.edge_members, &s12.weight.lambda, false),
            by_members(&s21.gluing.edge_members, &s21.weight.lambda, true)
        );
    }
}

#[test]
fn kernel_oracle_sample_hits_both_outcomes() {
    let mut r = rng(7);
    let (mut yes, mut no) = (0, 0);
    for _ in 0..200 {
        let no_sinks = r.gen_bool(0.5);
        let g = random_graph(&mut r, 4, 6, no_sinks);
        let lambda = grid_or_weight(&mut r, &g);
        if has_positive_kernel_vector(&weighted_matrix(&g, &|e| lambda[e].clone())) {
            yes += 1;
        } else {
            no += 1;
        }
    }
    assert!(yes >= 20 && no >= 20, "{yes} positive, {no} not");
}
