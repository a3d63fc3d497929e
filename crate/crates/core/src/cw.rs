//! Rank-2 graph weights on oriented 2-complexes: 2D CW weights (standard and
//! tight), triangular weights, their verifiers, and the top-down solvers.
//!
//! The solvers start from special weights `(lambda, eta)` on the boundary
//! graph and lift them to `(g, lambda_tilde)` on the 1-skeleton.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::complex::{boundary_edge_id, LabeledBoundaryGraph, Oriented2Complex};
use crate::error::{Error, Result};
use crate::field::{Field, NumberField, Reals};
use crate::graph::DirectedGraph;
use crate::linalg;
use crate::poly::QPoly;
use crate::roots::{positive_roots, positive_roots_approx, AlgebraicScalar};
use crate::weight::{
    boundary_matrix_general, boundary_matrix_special, classify_kernel, det_polynomial, exact_positive_direction,
    is_constant, kernel_at_root, lookup_all, nowhere_zero, reduced_det_polynomial, solve_special_weights,
    vertex_residuals, EquationCheck, GraphWeight, KernelStatus, PositiveKernel, SpecialSolution, DEFAULT_TOL,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CwMode {
    /// No coupling between `lambda` and `lambda_tilde`.
    #[serde(rename = "rank2")]
    Rank2,
    /// `lambda(e) = lambda_tilde(e) g(r(e))`.
    #[serde(rename = "standard_2dcw")]
    Standard,
    /// `lambda(e) = lambda_tilde(e)`.
    #[serde(rename = "tight_2dcw")]
    Tight,
}

/// `(g, lambda_tilde, lambda, eta)` on vertices, edges, edges and faces.
///
/// `eta_incidence` overrides `eta` on individual boundary edges (ids
/// `face/position`); spliced weights need this because the value of `eta`
/// on a glued face can differ between its incidences.
#[derive(Clone, Debug, PartialEq)]
pub struct Rank2Weight<T> {
    pub g: BTreeMap<String, T>,
    pub lambda_tilde: BTreeMap<String, T>,
    pub lambda: BTreeMap<String, T>,
    pub eta: BTreeMap<String, T>,
    pub eta_incidence: BTreeMap<String, T>,
    pub mode: CwMode,
}

impl<T: Clone> Rank2Weight<T> {
    pub fn new(
        g: BTreeMap<String, T>,
        lambda_tilde: BTreeMap<String, T>,
        lambda: BTreeMap<String, T>,
        eta: BTreeMap<String, T>,
        mode: CwMode,
    ) -> Self {
        Rank2Weight {
            g,
            lambda_tilde,
            lambda,
            eta,
            eta_incidence: BTreeMap::new(),
            mode,
        }
    }

    /// Build from vectors in the complex's vertex, edge and face order.
    pub fn from_vecs(c: &Oriented2Complex, g: Vec<T>, lambda_tilde: Vec<T>, lambda: Vec<T>, eta: Vec<T>, mode: CwMode) -> Self {
        let sk = c.skeleton();
        let eids = || sk.edges().iter().map(|e| e.id.clone());
        Rank2Weight::new(
            sk.vertices().iter().cloned().zip(g).collect(),
            eids().zip(lambda_tilde).collect(),
            eids().zip(lambda).collect(),
            c.faces().iter().map(|f| f.id.clone()).zip(eta).collect(),
            mode,
        )
    }

    /// `(g, lambda_tilde)` as a weight on the 1-skeleton.
    pub fn skeleton_weight(&self) -> GraphWeight<T> {
        GraphWeight::new(self.g.clone(), self.lambda_tilde.clone())
    }

    /// `eta` on the boundary edge `face/position`.
    pub fn eta_at(&self, face: &str, position: usize) -> Result<T> {
        let id = boundary_edge_id(face, position);
        if let Some(v) = self.eta_incidence.get(&id) {
            return Ok(v.clone());
        }
        self.eta
            .get(face)
            .cloned()
            .ok_or_else(|| Error::MissingValue(face.to_string()))
    }

    /// `(lambda, eta)` as a weight on the boundary graph.
    pub fn boundary_weight(&self, b: &LabeledBoundaryGraph) -> Result<GraphWeight<T>> {
        let lambda = b
            .graph
            .edges()
            .iter()
            .zip(&b.labels)
            .map(|(e, l)| Ok((e.id.clone(), self.eta_at(&l.face, l.position)?)))
            .collect::<Result<_>>()?;
        Ok(GraphWeight::new(self.lambda.clone(), lambda))
    }

    pub fn map<U>(&self, mut f: impl FnMut(&T) -> U) -> Rank2Weight<U> {
        let mut m = |x: &BTreeMap<String, T>| x.iter().map(|(k, v)| (k.clone(), f(v))).collect();
        Rank2Weight {
            g: m(&self.g),
            lambda_tilde: m(&self.lambda_tilde),
            lambda: m(&self.lambda),
            eta: m(&self.eta),
            eta_incidence: m(&self.eta_incidence),
            mode: self.mode,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Rank2Report {
    pub skeleton: EquationCheck,
    pub boundary: EquationCheck,
    pub coupling: Option<EquationCheck>,
    pub faithful: bool,
    pub special: bool,
    pub passed: bool,
}

fn named<T>(ids: &[String], values: Vec<(usize, T)>) -> Vec<(String, T)> {
    values.into_iter().map(|(i, r)| (ids[i].clone(), r)).collect()
}

fn vertex_check<F: Field>(f: &F, graph: &DirectedGraph, w: &GraphWeight<F::Elem>, tol: f64) -> Result<(EquationCheck, Vec<F::Elem>)> {
    let g = w.g_vec(graph)?;
    let l = w.lambda_vec(graph)?;
    let res = named(graph.vertices(), vertex_residuals(f, graph, &g, &l));
    Ok((EquationCheck::judge(f, res, tol), l))
}

/// Coupling residuals `lambda(e) - lambda_tilde(e)` (tight) or
/// `lambda(e) - lambda_tilde(e) g(r(e))` (standard).
pub fn coupling_residuals<F: Field>(
    f: &F,
    skeleton: &DirectedGraph,
    g: &[F::Elem],
    lambda_tilde: &[F::Elem],
    lambda: &[F::Elem],
    mode: CwMode,
) -> Vec<(String, F::Elem)> {
    skeleton
        .edges()
        .iter()
        .enumerate()
        .filter_map(|(i, e)| {
            let rhs = match mode {
                CwMode::Rank2 => return None,
                CwMode::Tight => lambda_tilde[i].clone(),
                CwMode::Standard => f.mul(&lambda_tilde[i], &g[skeleton.dst_of(i)]),
            };
            Some((e.id.clone(), f.sub(&lambda[i], &rhs)))
        })
        .collect()
}

pub fn verify_rank2<F: Field>(f: &F, c: &Oriented2Complex, w: &Rank2Weight<F::Elem>, tol: f64) -> Result<Rank2Report> {
    let sk = c.skeleton();
    let (skeleton, lt) = vertex_check(f, sk, &w.skeleton_weight(), tol)?;
    let b = c.boundary_graph();
    let (boundary, etas) = vertex_check(f, &b.graph, &w.boundary_weight(&b)?, tol)?;
    let g = w.skeleton_weight().g_vec(sk)?;
    let lambda = lookup_all(&w.lambda, sk.edges().iter().map(|e| &e.id))?;
    let coupling = (w.mode != CwMode::Rank2).then(|| {
        EquationCheck::judge(f, coupling_residuals(f, sk, &g, &lt, &lambda, w.mode), tol)
    });
    let faithful = nowhere_zero(f, &g) && nowhere_zero(f, &lambda) && nowhere_zero(f, &etas);
    let special = is_constant(f, &etas);
    let passed = skeleton.passed && boundary.passed && coupling.as_ref().is_none_or(|c| c.passed);
    Ok(Rank2Report {
        skeleton,
        boundary,
        coupling,
        faithful,
        special,
        passed,
    })
}

/// `(g, lambda_tilde, lambda, eta_A, eta_B)` on a triangular complex.
#[derive(Clone, Debug, PartialEq)]
pub struct TriangularWeight<T> {
    pub g: BTreeMap<String, T>,
    pub lambda_tilde: BTreeMap<String, T>,
    pub lambda: BTreeMap<String, T>,
    pub eta_a: BTreeMap<String, T>,
    pub eta_b: BTreeMap<String, T>,
    pub tight: bool,
}

impl<T: Clone> TriangularWeight<T> {
    pub fn map<U>(&self, mut f: impl FnMut(&T) -> U) -> TriangularWeight<U> {
        let mut m = |x: &BTreeMap<String, T>| x.iter().map(|(k, v)| (k.clone(), f(v))).collect();
        TriangularWeight {
            g: m(&self.g),
            lambda_tilde: m(&self.lambda_tilde),
            lambda: m(&self.lambda),
            eta_a: m(&self.eta_a),
            eta_b: m(&self.eta_b),
            tight: self.tight,
        }
    }

    /// Constant `eta` on every face for both coefficients.
    pub fn special(
        c: &Oriented2Complex,
        g: BTreeMap<String, T>,
        lambda_tilde: BTreeMap<String, T>,
        lambda: BTreeMap<String, T>,
        eta: T,
        tight: bool,
    ) -> Self {
        let eta: BTreeMap<String, T> = c.faces().iter().map(|f| (f.id.clone(), eta.clone())).collect();
        TriangularWeight {
            g,
            lambda_tilde,
            lambda,
            eta_a: eta.clone(),
            eta_b: eta,
            tight,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TriangularReport {
    pub skeleton: EquationCheck,
    /// `lambda(e) = sum eta_A(s) lambda(e'')`, `e''` following `e`.
    pub follower: EquationCheck,
    /// `lambda(e) = sum eta_B(s) lambda(e')`, `e'` preceding `e`.
    pub predecessor: EquationCheck,
    pub tightness: Option<EquationCheck>,
    pub faithful: bool,
    pub special: bool,
    pub passed: bool,
}

fn face_coefficients<T: Clone>(b: &LabeledBoundaryGraph, eta: &BTreeMap<String, T>) -> Result<BTreeMap<String, T>> {
    b.graph
        .edges()
        .iter()
        .zip(&b.labels)
        .map(|(e, l)| {
            let v = eta.get(&l.face).cloned().ok_or_else(|| Error::MissingValue(l.face.clone()))?;
            Ok((e.id.clone(), v))
        })
        .collect()
}

pub fn verify_triangular<F: Field>(
    f: &F,
    c: &Oriented2Complex,
    w: &TriangularWeight<F::Elem>,
    tol: f64,
) -> Result<TriangularReport> {
    c.require_triangular()?;
    let sk = c.skeleton();
    let sw = GraphWeight::new(w.g.clone(), w.lambda_tilde.clone());
    let (skeleton, lt) = vertex_check(f, sk, &sw, tol)?;
    let fol = c.boundary_graph();
    let pre = c.predecessor_graph();
    let (follower, _) = vertex_check(f, &fol.graph, &GraphWeight::new(w.lambda.clone(), face_coefficients(&fol, &w.eta_a)?), tol)?;
    let (predecessor, _) =
        vertex_check(f, &pre.graph, &GraphWeight::new(w.lambda.clone(), face_coefficients(&pre, &w.eta_b)?), tol)?;
    let faces: Vec<&String> = c.faces().iter().map(|s| &s.id).collect();
    let ea = lookup_all(&w.eta_a, faces.iter().copied())?;
    let eb = lookup_all(&w.eta_b, faces.iter().copied())?;
    let g = sw.g_vec(sk)?;
    let lambda = lookup_all(&w.lambda, sk.edges().iter().map(|e| &e.id))?;
    let tightness = w.tight.then(|| {
        let mut res = coupling_residuals(f, sk, &g, &lt, &lambda, CwMode::Tight);
        res.extend(faces.iter().enumerate().map(|(i, s)| ((*s).clone(), f.sub(&ea[i], &eb[i]))));
        EquationCheck::judge(f, res, tol)
    });
    let all_positive = |xs: &[F::Elem]| xs.iter().all(|x| f.is_positive(x));
    let faithful = [&g, &lt, &lambda, &ea, &eb].iter().all(|xs| all_positive(xs));
    let mut both = ea.clone();
    both.extend(eb.iter().cloned());
    let special = is_constant(f, &both);
    let passed = skeleton.passed
        && follower.passed
        && predecessor.passed
        && tightness.as_ref().is_none_or(|t| t.passed);
    Ok(TriangularReport {
        skeleton,
        follower,
        predecessor,
        tightness,
        faithful,
        special,
        passed,
    })
}

/// The scale `C` of a tight lift: `lambda = C lambda_0`.
#[derive(Clone, Debug)]
pub struct ScaleRoot {
    pub value: f64,
    /// Present when the scale polynomial has rational coefficients.
    pub exact: Option<AlgebraicScalar>,
}

/// `q(C) = det(I - C A_0)` on the non-sink vertices of the skeleton, with
/// `A_0` the adjacency matrix weighted by `lambda_0`.
#[derive(Clone, Debug)]
pub struct ScalePolynomial {
    /// Coefficients in the field of the boundary family, lowest degree first.
    pub coefficients: Vec<QPoly>,
    /// The same polynomial over `Q`: exact when every coefficient is rational,
    /// else coefficients rounded to about `2^-128`.
    pub rational: QPoly,
    pub exact: bool,
}

#[derive(Clone, Debug)]
pub struct LiftedSolution<WE, WF> {
    pub scale: Option<ScaleRoot>,
    /// The weight over `Q(eta)`, when every value is exactly representable there.
    pub exact: Option<WE>,
    pub weight: WF,
    pub free_parameters: Vec<String>,
    pub faithful: bool,
}

/// One positive root `eta` of the boundary determinant with its lifts.
#[derive(Clone, Debug)]
pub struct Family<WE, WF> {
    pub eta: AlgebraicScalar,
    pub field: NumberField,
    pub kernel: PositiveKernel,
    pub scale_polynomial: Option<ScalePolynomial>,
    pub solutions: Vec<LiftedSolution<WE, WF>>,
}

impl<WE, WF> Family<WE, WF> {
    pub fn faithful(&self) -> bool {
        self.kernel.status == KernelStatus::Positive && self.solutions.iter().any(|s| s.faithful)
    }
}

pub type CwFamily = Family<Rank2Weight<QPoly>, Rank2Weight<f64>>;
pub type TriangularFamily = Family<TriangularWeight<QPoly>, TriangularWeight<f64>>;

#[derive(Clone, Debug)]
pub struct CwSolution {
    pub boundary: SpecialSolution,
    /// Special weights on the skeleton alone, when no face constrains `lambda`.
    pub skeleton: Option<SpecialSolution>,
    pub families: Vec<CwFamily>,
    pub diagnostics: Vec<String>,
}

impl CwSolution {
    pub fn faithful_families(&self) -> impl Iterator<Item = &CwFamily> {
        self.families.iter().filter(|f| f.faithful())
    }
}

#[derive(Clone, Debug)]
pub struct TriangularSolution {
    /// Determinant of the follower system (`eta_A`).
    pub det_a: QPoly,
    /// Determinant of the predecessor system (`eta_B`).
    pub det_b: QPoly,
    pub families: Vec<TriangularFamily>,
    pub diagnostics: Vec<String>,
}

impl TriangularSolution {
    pub fn faithful_families(&self) -> impl Iterator<Item = &TriangularFamily> {
        self.families.iter().filter(|f| f.faithful())
    }
}

/// `(g, lambda_tilde, lambda)` as vectors in skeleton order.
struct Lift<T> {
    g: Vec<T>,
    lambda_tilde: Vec<T>,
    lambda: Vec<T>,
}

impl<T> Lift<T> {
    fn map<U>(&self, mut f: impl FnMut(&T) -> U) -> Lift<U> {
        Lift {
            g: self.g.iter().map(&mut f).collect(),
            lambda_tilde: self.lambda_tilde.iter().map(&mut f).collect(),
            lambda: self.lambda.iter().map(&mut f).collect(),
        }
    }
}

fn sink_parameters(sk: &DirectedGraph) -> Vec<String> {
    sk.sinks().iter().map(|&v| format!("g({})", sk.vertices()[v])).collect()
}

/// Standard lift: `g(v) = sum_{s(e)=v} lambda(e)` off the sinks, `g = 1` at sinks,
/// then `lambda_tilde = lambda / g(r(.))`. `None` when some `g(r(e))` vanishes.
fn lift_standard<F: Field>(f: &F, sk: &DirectedGraph, lambda: &[F::Elem]) -> Option<Lift<F::Elem>> {
    let g: Vec<F::Elem> = (0..sk.num_vertices())
        .map(|v| {
            if sk.is_sink(v) {
                f.one()
            } else {
                f.sum(sk.out_edges(v).iter().map(|&e| &lambda[e]))
            }
        })
        .collect();
    let lambda_tilde = (0..sk.num_edges())
        .map(|e| f.div(&lambda[e], &g[sk.dst_of(e)]).ok())
        .collect::<Option<Vec<_>>>()?;
    Some(Lift {
        g,
        lambda_tilde,
        lambda: lambda.to_vec(),
    })
}

fn all_positive<F: Field>(f: &F, xs: &[F::Elem]) -> bool {
    xs.iter().all(|x| f.is_positive(x))
}

/// Coefficients of the polynomial through `(k, values[k])`, `k = 0..n`.
fn interpolate<F: Field>(f: &F, values: &[F::Elem]) -> Vec<F::Elem> {
    let n = values.len();
    let mut out = vec![f.zero(); n];
    for (i, vi) in values.iter().enumerate() {
        let mut basis = vec![f.one()];
        let mut denom = f.one();
        for j in (0..n).filter(|&j| j != i) {
            let shift = f.from_i64(-(j as i64));
            let mut next = vec![f.zero(); basis.len() + 1];
            for (k, b) in basis.iter().enumerate() {
                next[k + 1] = f.add(&next[k + 1], b);
                next[k] = f.add(&next[k], &f.mul(b, &shift));
            }
            basis = next;
            denom = f.mul(&denom, &f.from_i64(i as i64 - j as i64));
        }
        let scale = f.div(vi, &denom).expect("interpolation nodes are distinct");
        for (k, b) in basis.iter().enumerate() {
            out[k] = f.add(&out[k], &f.mul(b, &scale));
        }
    }
    while out.len() > 1 && f.is_zero(out.last().unwrap()) {
        out.pop();
    }
    out
}

/// `q(C) = det(I - C A_0)` on the non-sink block of the skeleton.
pub fn scale_polynomial(k: &NumberField, sk: &DirectedGraph, lambda0: &[QPoly]) -> ScalePolynomial {
    let free: Vec<usize> = (0..sk.num_vertices()).filter(|&v| !sk.is_sink(v)).collect();
    let n = free.len();
    let pos = |v: usize| free.iter().position(|&x| x == v);
    let mut a0 = vec![vec![k.zero(); n]; n];
    for e in 0..sk.num_edges() {
        if let (Some(i), Some(j)) = (pos(sk.src_of(e)), pos(sk.dst_of(e))) {
            a0[i][j] = k.add(&a0[i][j], &lambda0[e]);
        }
    }
    let values: Vec<QPoly> = (0..=n)
        .map(|c| {
            let cc = k.from_i64(c as i64);
            let m: Vec<Vec<QPoly>> = (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| {
                            let t = k.neg(&k.mul(&cc, &a0[i][j]));
                            if i == j {
                                k.add(&t, &k.one())
                            } else {
                                t
                            }
                        })
                        .collect()
                })
                .collect();
            linalg::det(k, &m)
        })
        .collect();
    let coefficients = interpolate(k, &values);
    let exact = coefficients.iter().all(|c| k.as_rational(c).is_some());
    let rational = QPoly::new(coefficients.iter().map(|c| k.approx_rational(c, 128)).collect());
    ScalePolynomial {
        coefficients,
        rational,
        exact,
    }
}

/// Tight lift: for each positive root `C` of the scale polynomial, `g` spans
/// the kernel of `C A_0 - I`.
fn lift_tight(
    k: &NumberField,
    sk: &DirectedGraph,
    lambda0_exact: Option<&[QPoly]>,
    lambda0: &[f64],
    eps: f64,
    diagnostics: &mut Vec<String>,
) -> Result<(Option<ScalePolynomial>, Vec<(ScaleRoot, Option<Lift<QPoly>>, Lift<f64>, bool)>)> {
    let exact0: Vec<QPoly> = match lambda0_exact {
        Some(l) => l.to_vec(),
        None => {
            // the kernel was not a line; fall back to rational approximations of the float vector
            lambda0
                .iter()
                .map(|x| QPoly::constant(num_rational::BigRational::from_float(*x).unwrap_or_default()))
                .collect()
        }
    };
    let sp = scale_polynomial(k, sk, &exact0);
    if sp.rational.is_constant() {
        diagnostics.push(format!(
            "scale polynomial is the constant {}; no tight scale exists",
            sp.rational.display_in("C")
        ));
        return Ok((Some(sp), Vec::new()));
    }
    let mut out = Vec::new();
    let roots = if sp.exact {
        positive_roots(&sp.rational, eps)?
    } else {
        positive_roots_approx(&sp.rational, eps)?
    };
    for c in roots {
        let value = c.to_f64();
        let exact_c = (sp.exact && lambda0_exact.is_some()).then(|| c.as_rational().cloned()).flatten();
        let exact_lift = exact_c.as_ref().and_then(|cq| {
            let lam: Vec<QPoly> = exact0.iter().map(|x| k.mul(x, &k.from_rational(cq))).collect();
            let lmap: BTreeMap<String, QPoly> = sk.edges().iter().map(|e| e.id.clone()).zip(lam.iter().cloned()).collect();
            let m = boundary_matrix_general(k, sk, &lmap).ok()?;
            let basis = linalg::kernel(k, &m.entries, sk.num_vertices());
            if basis.len() != 1 {
                return None;
            }
            let g = exact_positive_direction(k, &basis[0])?;
            Some(Lift {
                g,
                lambda_tilde: lam.clone(),
                lambda: lam,
            })
        });
        let (approx, positive) = match &exact_lift {
            Some(l) => (l.map(|x| k.to_f64(x)), true),
            None => {
                let lam: Vec<f64> = lambda0.iter().map(|x| x * value).collect();
                let lmap: BTreeMap<String, f64> = sk.edges().iter().map(|e| e.id.clone()).zip(lam.iter().copied()).collect();
                let m = boundary_matrix_general(&Reals, sk, &lmap)?;
                let kernel = classify_kernel(linalg::kernel_f64(&m.entries, sk.num_vertices(), 1e-9), DEFAULT_TOL);
                match kernel.vector {
                    Some(g) => (
                        Lift {
                            g,
                            lambda_tilde: lam.clone(),
                            lambda: lam,
                        },
                        true,
                    ),
                    None => {
                        diagnostics.push(format!("C = {value}: skeleton kernel is {:?}", kernel.status));
                        (
                            Lift {
                                g: vec![0.0; sk.num_vertices()],
                                lambda_tilde: lam.clone(),
                                lambda: lam,
                            },
                            false,
                        )
                    }
                }
            }
        };
        let exact = if exact_c.is_some() { Some(c.clone()) } else { None };
        out.push((ScaleRoot { value, exact }, exact_lift, approx, positive));
    }
    Ok((Some(sp), out))
}

/// Lift of a boundary family onto the skeleton, in either coupling mode.
#[allow(clippy::type_complexity)]
fn lift_family(
    k: &NumberField,
    sk: &DirectedGraph,
    kernel: &PositiveKernel,
    exact_vector: Option<&[QPoly]>,
    mode: CwMode,
    eps: f64,
    diagnostics: &mut Vec<String>,
) -> Result<(Option<ScalePolynomial>, Vec<(Option<ScaleRoot>, Option<Lift<QPoly>>, Lift<f64>, bool, Vec<String>)>)> {
    let Some(lambda0) = kernel.vector.as_ref() else {
        return Ok((None, Vec::new()));
    };
    let sinks = sink_parameters(sk);
    match mode {
        CwMode::Standard | CwMode::Rank2 => {
            let exact = exact_vector.and_then(|v| lift_standard(k, sk, v));
            let approx = match &exact {
                Some(l) => Some(l.map(|x| k.to_f64(x))),
                None => lift_standard(&Reals, sk, lambda0),
            };
            let Some(approx) = approx else {
                diagnostics.push("standard lift divides by a vanishing g(r(e))".into());
                return Ok((None, Vec::new()));
            };
            let faithful = match &exact {
                Some(l) => all_positive(k, &l.g) && all_positive(k, &l.lambda_tilde),
                None => approx.g.iter().chain(&approx.lambda_tilde).all(|&x| x > 0.0),
            };
            let mut free = vec!["C".to_string()];
            free.extend(sinks);
            Ok((None, vec![(None, exact, approx, faithful, free)]))
        }
        CwMode::Tight => {
            let (sp, lifts) = lift_tight(k, sk, exact_vector, lambda0, eps, diagnostics)?;
            let out = lifts
                .into_iter()
                .map(|(root, exact, approx, ok)| {
                    let mut free = vec!["g".to_string()];
                    free.extend(sinks.iter().cloned());
                    (Some(root), exact, approx, ok, free)
                })
                .collect();
            Ok((sp, out))
        }
    }
}

/// Solve for special 2D CW weights: special weights on the boundary graph,
/// then the lift to the skeleton in the requested mode.
///
/// Non-special families are not enumerated; `special = false` returns the
/// special families with a diagnostic, see [`standard_weight_for_eta`] for
/// evaluating a non-special family at chosen face values.
pub fn solve_2dcw(c: &Oriented2Complex, mode: CwMode, special: bool, eps: f64) -> Result<CwSolution> {
    if mode == CwMode::Rank2 {
        return Err(Error::ModeError("solve_2dcw needs the standard or tight coupling".into()));
    }
    let b = c.boundary_graph();
    let sk = c.skeleton();
    let boundary = solve_special_weights(&b.graph, eps)?;
    let mut diagnostics: Vec<String> = c.warnings();
    if !special {
        diagnostics.push(
            "non-special families are not enumerated; the special families are reported and non-special ones can be evaluated per face assignment"
                .into(),
        );
    }
    let mut skeleton = None;
    if boundary.unconstrained {
        diagnostics.push("no face constrains lambda; only the skeleton equation is solved".into());
        skeleton = Some(solve_special_weights(sk, eps)?);
    }
    if !boundary.sinks.is_empty() && !boundary.unconstrained {
        diagnostics.push(format!(
            "edges in no face ({}) are sinks of the boundary graph; lambda there is driven freely",
            boundary.sinks.join(", ")
        ));
    }
    let mut families = Vec::new();
    for fam in &boundary.families {
        let (scale_polynomial, lifts) = lift_family(
            &fam.field,
            sk,
            &fam.kernel,
            fam.exact_vector.as_deref(),
            mode,
            eps,
            &mut diagnostics,
        )?;
        let eta_exact = fam.field.generator();
        let eta_f = fam.eta_f64();
        let solutions = lifts
            .into_iter()
            .map(|(scale, exact, approx, faithful, free_parameters)| {
                let nf = c.faces().len();
                let exact = exact.map(|l| {
                    Rank2Weight::from_vecs(c, l.g, l.lambda_tilde, l.lambda, vec![eta_exact.clone(); nf], mode)
                });
                let weight = Rank2Weight::from_vecs(c, approx.g, approx.lambda_tilde, approx.lambda, vec![eta_f; nf], mode);
                LiftedSolution {
                    scale,
                    exact,
                    weight,
                    free_parameters,
                    faithful,
                }
            })
            .collect();
        families.push(Family {
            eta: fam.eta.clone(),
            field: fam.field.clone(),
            kernel: fam.kernel.clone(),
            scale_polynomial,
            solutions,
        });
    }
    if !families.iter().any(Family::faithful) {
        diagnostics.push("no faithful solution".into());
    }
    Ok(CwSolution {
        boundary,
        skeleton,
        families,
        diagnostics,
    })
}

/// Standard 2D CW weight for prescribed face values `eta`, in floating point:
/// the positive kernel of the boundary system (normalised to maximum 1)
/// lifted to the skeleton. `None` when the kernel has no positive vector.
pub fn standard_weight_for_eta(c: &Oriented2Complex, eta: &BTreeMap<String, f64>, tol: f64) -> Result<Option<Rank2Weight<f64>>> {
    let b = c.boundary_graph();
    let coeff = face_coefficients(&b, eta)?;
    let m = boundary_matrix_general(&Reals, &b.graph, &coeff)?;
    let kernel = classify_kernel(linalg::kernel_f64(&m.entries, b.graph.num_vertices(), tol), tol);
    let Some(lambda) = kernel.vector else {
        return Ok(None);
    };
    let Some(l) = lift_standard(&Reals, c.skeleton(), &lambda) else {
        return Ok(None);
    };
    let faces: Vec<f64> = lookup_all(eta, c.faces().iter().map(|f| &f.id))?;
    Ok(Some(Rank2Weight::from_vecs(c, l.g, l.lambda_tilde, l.lambda, faces, CwMode::Standard)))
}

/// Special triangular weights: the follower and predecessor systems share a
/// determinant; at each positive root the kernel of both systems together
/// gives `lambda`, which is then lifted to the skeleton (tight by default).
pub fn solve_triangular_special(c: &Oriented2Complex, mode: CwMode, eps: f64) -> Result<TriangularSolution> {
    c.require_triangular()?;
    if mode == CwMode::Rank2 {
        return Err(Error::ModeError("triangular lift needs the standard or tight coupling".into()));
    }
    let fol = c.boundary_graph();
    let pre = c.predecessor_graph();
    let ma = boundary_matrix_special(&fol.graph);
    let mb = boundary_matrix_special(&pre.graph);
    let det_a = det_polynomial(&ma);
    let det_b = det_polynomial(&mb);
    let mut diagnostics = c.warnings();
    if det_a != det_b {
        diagnostics.push("follower and predecessor determinants differ".into());
    }
    let sk = c.skeleton();
    let n = fol.graph.num_vertices();
    let mut stacked = ma.entries.clone();
    stacked.extend(mb.entries.iter().cloned());
    let mut families = Vec::new();
    let reduced = reduced_det_polynomial(&ma);
    if reduced.is_zero() || ma.sink_rows.len() == n {
        diagnostics.push("the follower system imposes no equation".into());
    } else {
        for eta in positive_roots(&reduced, eps)? {
            let (k, _basis, kernel, exact_vector) = kernel_at_root(&stacked, n, &eta, DEFAULT_TOL);
            if kernel.status != KernelStatus::Positive {
                diagnostics.push(format!("eta = {}: kernel is {:?}", eta.to_f64(), kernel.status));
            }
            let (scale_polynomial, lifts) =
                lift_family(&k, sk, &kernel, exact_vector.as_deref(), mode, eps, &mut diagnostics)?;
            let eta_exact = k.generator();
            let eta_f = eta.to_f64();
            let tight = mode == CwMode::Tight;
            let solutions = lifts
                .into_iter()
                .map(|(scale, exact, approx, faithful, free_parameters)| {
                    let build = |l: Lift<QPoly>| {
                        TriangularWeight::special(
                            c,
                            sk.vertices().iter().cloned().zip(l.g).collect(),
                            sk.edges().iter().map(|e| e.id.clone()).zip(l.lambda_tilde).collect(),
                            sk.edges().iter().map(|e| e.id.clone()).zip(l.lambda).collect(),
                            eta_exact.clone(),
                            tight,
                        )
                    };
                    let weight = TriangularWeight::special(
                        c,
                        sk.vertices().iter().cloned().zip(approx.g).collect(),
                        sk.edges().iter().map(|e| e.id.clone()).zip(approx.lambda_tilde).collect(),
                        sk.edges().iter().map(|e| e.id.clone()).zip(approx.lambda).collect(),
                        eta_f,
                        tight,
                    );
                    LiftedSolution {
                        scale,
                        exact: exact.map(build),
                        weight,
                        free_parameters,
                        faithful,
                    }
                })
                .collect();
            families.push(Family {
                eta,
                field: k,
                kernel,
                scale_polynomial,
                solutions,
            });
        }
    }
    Ok(TriangularSolution {
        det_a,
        det_b,
        families,
        diagnostics,
    })
}

/// Check `sum lambda = 3 eta sum lambda` (adding the rows of a triangular
/// follower system) for `lambda` in the kernel at `eta`; returns the defect.
pub fn triangular_row_sum_defect<F: Field>(f: &F, lambda: &[F::Elem], eta: &F::Elem) -> F::Elem {
    let s = f.sum(lambda.iter());
    f.sub(&s, &f.mul(&f.mul(&f.from_i64(3), eta), &s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Rationals;
    use crate::fixtures::{figb, figb_standard_weight, figb_tight_weight, monogon_triangle};
    use crate::graph::DirectedGraph;
    use crate::poly::{int, rat};
    use crate::weight::DEFAULT_EPS;

    fn eta0_field() -> NumberField {
        let roots = positive_roots(&QPoly::from_ints(&[1, 0, 0, -1, -1]), DEFAULT_EPS).unwrap();
        NumberField::new(&roots[0])
    }

    #[test]
    fn closed_form_standard_weight_is_exact() {
        let k = eta0_field();
        let eta = k.generator();
        let w = figb_standard_weight(&k, &eta, &eta, &k.from_i64(3));
        let r = verify_rank2(&k, &figb(), &w, 0.0).unwrap();
        assert!(r.passed && r.faithful && r.special, "{r:?}");
        // g(u) = C (eta^3 + eta^2) = C / eta
        let gu = &w.g["u"];
        assert!(k.eq(gu, &k.div(&k.from_i64(3), &eta).unwrap()));
    }

    #[test]
    fn broken_weight_fails() {
        let k = eta0_field();
        let eta = k.generator();
        let mut w = figb_standard_weight(&k, &eta, &eta, &k.one());
        w.lambda_tilde.insert("a".into(), k.from_i64(1));
        assert!(!verify_rank2(&k, &figb(), &w, 0.0).unwrap().passed);
    }

    #[test]
    fn standard_solve_reproduces_closed_form() {
        let sol = solve_2dcw(&figb(), CwMode::Standard, true, DEFAULT_EPS).unwrap();
        let fams: Vec<_> = sol.faithful_families().collect();
        assert_eq!(fams.len(), 1);
        let fam = fams[0];
        let k = &fam.field;
        let eta = k.generator();
        let w = fam.solutions[0].exact.as_ref().unwrap();
        // solver normalises lambda(d) = 1, i.e. C = 1
        let want = figb_standard_weight(k, &eta, &eta, &k.one());
        for (map, other) in [(&w.g, &want.g), (&w.lambda_tilde, &want.lambda_tilde), (&w.lambda, &want.lambda)] {
            for (key, v) in map {
                assert!(k.eq(v, &other[key]), "{key}");
            }
        }
        assert!(verify_rank2(k, &figb(), w, 0.0).unwrap().passed);
        let r = verify_rank2(&Reals, &figb(), &fam.solutions[0].weight, 1e-10).unwrap();
        assert!(r.passed, "{r:?}");
    }

    #[test]
    fn two_parameter_family_samples() {
        let c = figb();
        for i in 1..20 {
            let e1 = i as f64 / 20.0;
            let e2 = (1.0 - e1.powi(4)).cbrt();
            let w = figb_standard_weight(&Reals, &e1, &e2, &2.5);
            let r = verify_rank2(&Reals, &c, &w, 1e-10).unwrap();
            assert!(r.passed && r.faithful && !r.special, "{e1}: {r:?}");
            let eta: BTreeMap<String, f64> = [("s1".to_string(), e1), ("s2".to_string(), e2)].into();
            let s = standard_weight_for_eta(&c, &eta, 1e-9).unwrap().unwrap();
            let closed = figb_standard_weight(&Reals, &e1, &e2, &1.0);
            for (k, v) in &s.g {
                assert!((v - closed.g[k]).abs() < 1e-9, "{k}");
            }
        }
        let off: BTreeMap<String, f64> = [("s1".to_string(), 0.5), ("s2".to_string(), 0.5)].into();
        assert!(standard_weight_for_eta(&c, &off, 1e-9).unwrap().is_none());
    }

    #[test]
    fn tight_scale_polynomial_matches() {
        let sol = solve_2dcw(&figb(), CwMode::Tight, true, DEFAULT_EPS).unwrap();
        let fam = sol.faithful_families().next().unwrap();
        let k = &fam.field;
        let eta = k.generator();
        let sp = fam.scale_polynomial.as_ref().unwrap();
        let want = [
            k.one(),
            k.zero(),
            k.zero(),
            k.neg(&k.pow(&eta, 3)),
            k.neg(&k.pow(&eta, 6)),
        ];
        assert_eq!(sp.coefficients.len(), 5);
        for (a, b) in sp.coefficients.iter().zip(&want) {
            assert!(k.eq(a, b));
        }
        assert_eq!(fam.solutions.len(), 1);
        let s = &fam.solutions[0];
        let cval = s.scale.as_ref().unwrap().value;
        let e = fam.eta.to_f64();
        assert!((1.0 - cval.powi(3) * e.powi(3) - cval.powi(4) * e.powi(6)).abs() < 1e-12);
        assert!(verify_rank2(&Reals, &figb(), &s.weight, 1e-10).unwrap().passed);
        let closed = figb_tight_weight(&Reals, &e, &cval);
        let r = verify_rank2(&Reals, &figb(), &closed, 1e-10).unwrap();
        assert!(r.passed && r.faithful, "{r:?}");
    }

    #[test]
    fn monogon_triangle_tight() {
        let c = monogon_triangle();
        let sol = solve_triangular_special(&c, CwMode::Tight, DEFAULT_EPS).unwrap();
        assert!(sol.det_a.eq_up_to_sign(&QPoly::from_ints(&[1, 0, 0, -1])));
        assert_eq!(sol.det_a, sol.det_b);
        let fams: Vec<_> = sol.faithful_families().collect();
        assert_eq!(fams.len(), 1);
        assert_eq!(fams[0].eta, AlgebraicScalar::Rational(int(1)));
        let w = fams[0].solutions[0].exact.as_ref().unwrap();
        let k = &fams[0].field;
        for v in w.lambda.values() {
            assert_eq!(k.as_rational(v), Some(rat(1, 3)));
        }
        assert!(verify_triangular(k, &c, w, 0.0).unwrap().passed);
    }

    #[test]
    fn triangular_rejects_quadrilateral() {
        assert_eq!(
            solve_triangular_special(&figb(), CwMode::Tight, DEFAULT_EPS).unwrap_err(),
            Error::NonTriangularFace("s1".into())
        );
        let w = TriangularWeight::<BigRational>::special(&figb(), BTreeMap::new(), BTreeMap::new(), BTreeMap::new(), int(1), true);
        assert!(matches!(verify_triangular(&Rationals, &figb(), &w, 0.0), Err(Error::NonTriangularFace(_))));
    }

    #[test]
    fn no_faces_leaves_lambda_unconstrained() {
        let g = DirectedGraph::from_triples(&["v"], &[("e", "v", "v")]).unwrap();
        let c = Oriented2Complex::new(g, vec![]).unwrap();
        let sol = solve_2dcw(&c, CwMode::Standard, true, DEFAULT_EPS).unwrap();
        assert!(sol.boundary.unconstrained);
        assert!(sol.families.is_empty());
        let sk = sol.skeleton.unwrap();
        assert_eq!(sk.families.len(), 1);
    }

    #[test]
    fn interpolation_recovers_polynomial() {
        // values of 2 - x + 3 x^2 at 0, 1, 2
        let c = interpolate(&Rationals, &[int(2), int(4), int(12)]);
        assert_eq!(c, vec![int(2), int(-1), int(3)]);
    }

    use num_rational::BigRational;
}
