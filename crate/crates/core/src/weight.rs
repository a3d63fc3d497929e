//! Graph weights `(g, lambda)`: verification and the determinant-based solver
//! for special weights.
//!
//! The boundary matrix acts on the vertex-indexed vector `g`; row `i` reads
//! `sum_j lambda m_ij g_j - g_i` at a non-sink and is zero at a sink.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{Field, NumberField, Reals};
use crate::graph::DirectedGraph;
use crate::linalg;
use crate::poly::QPoly;
use crate::roots::{positive_roots, AlgebraicScalar};

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_EPS: f64 = 1e-14;
/// A normalised kernel vector is strictly positive when every component exceeds this.
pub const POSITIVITY_THRESHOLD: f64 = 1e-8;

/// Vertex function `g` and edge function `lambda`, keyed by id.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct GraphWeight<T> {
    pub g: BTreeMap<String, T>,
    pub lambda: BTreeMap<String, T>,
}

impl<T: Clone> GraphWeight<T> {
    pub fn new(g: BTreeMap<String, T>, lambda: BTreeMap<String, T>) -> Self {
        GraphWeight { g, lambda }
    }

    /// Build from vectors in the graph's vertex and edge order.
    pub fn from_vecs(graph: &DirectedGraph, g: Vec<T>, lambda: Vec<T>) -> Self {
        GraphWeight {
            g: graph.vertices().iter().cloned().zip(g).collect(),
            lambda: graph.edges().iter().map(|e| e.id.clone()).zip(lambda).collect(),
        }
    }

    pub fn g_vec(&self, graph: &DirectedGraph) -> Result<Vec<T>> {
        lookup_all(&self.g, graph.vertices().iter())
    }

    pub fn lambda_vec(&self, graph: &DirectedGraph) -> Result<Vec<T>> {
        lookup_all(&self.lambda, graph.edges().iter().map(|e| &e.id))
    }

    pub fn map<U>(&self, mut f: impl FnMut(&T) -> U) -> GraphWeight<U> {
        GraphWeight {
            g: self.g.iter().map(|(k, v)| (k.clone(), f(v))).collect(),
            lambda: self.lambda.iter().map(|(k, v)| (k.clone(), f(v))).collect(),
        }
    }
}

pub(crate) fn lookup_all<'a, T: Clone>(
    map: &BTreeMap<String, T>,
    ids: impl Iterator<Item = &'a String>,
) -> Result<Vec<T>> {
    ids.map(|id| {
        map.get(id)
            .cloned()
            .ok_or_else(|| Error::MissingValue(id.clone()))
    })
    .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Residual {
    pub id: String,
    pub value: f64,
}

/// Outcome of checking one family of linear equations.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EquationCheck {
    pub residuals: Vec<Residual>,
    pub max_residual: f64,
    pub passed: bool,
}

impl EquationCheck {
    /// Exact fields pass only on exact zeros; `f64` passes within `tol`.
    pub fn judge<F: Field>(f: &F, values: Vec<(String, F::Elem)>, tol: f64) -> Self {
        let mut passed = true;
        let residuals: Vec<Residual> = values
            .into_iter()
            .map(|(id, r)| {
                let value = f.to_f64(&r).abs();
                let ok = if f.is_exact() { f.is_zero(&r) } else { value <= tol };
                passed &= ok;
                Residual { id, value }
            })
            .collect();
        let max_residual = residuals.iter().fold(0.0f64, |m, r| m.max(r.value));
        EquationCheck {
            residuals,
            max_residual,
            passed,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeightReport {
    pub check: EquationCheck,
    pub faithful: bool,
    pub special: bool,
}

impl WeightReport {
    pub fn passed(&self) -> bool {
        self.check.passed
    }
}

/// `g(v) - sum_{s(e)=v} lambda(e) g(r(e))` at every non-sink vertex, by vertex index.
pub fn vertex_residuals<F: Field>(
    f: &F,
    graph: &DirectedGraph,
    g: &[F::Elem],
    lambda: &[F::Elem],
) -> Vec<(usize, F::Elem)> {
    (0..graph.num_vertices())
        .filter(|&v| !graph.is_sink(v))
        .map(|v| {
            let flow = graph
                .out_edges(v)
                .iter()
                .fold(f.zero(), |acc, &e| f.add(&acc, &f.mul(&lambda[e], &g[graph.dst_of(e)])));
            (v, f.sub(&g[v], &flow))
        })
        .collect()
}

pub fn nowhere_zero<F: Field>(f: &F, xs: &[F::Elem]) -> bool {
    xs.iter().all(|x| !f.is_zero(x))
}

pub fn is_constant<F: Field>(f: &F, xs: &[F::Elem]) -> bool {
    xs.windows(2).all(|w| f.eq(&w[0], &w[1]))
}

pub fn verify_graph_weight<F: Field>(
    f: &F,
    graph: &DirectedGraph,
    w: &GraphWeight<F::Elem>,
    tol: f64,
) -> Result<WeightReport> {
    let g = w.g_vec(graph)?;
    let lambda = w.lambda_vec(graph)?;
    let values = vertex_residuals(f, graph, &g, &lambda)
        .into_iter()
        .map(|(v, r)| (graph.vertices()[v].clone(), r))
        .collect();
    Ok(WeightReport {
        check: EquationCheck::judge(f, values, tol),
        faithful: nowhere_zero(f, &g),
        special: is_constant(f, &lambda),
    })
}

/// Square matrix in the graph's vertex order, plus the indices of sink rows.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryMatrix<T> {
    pub entries: Vec<Vec<T>>,
    pub sink_rows: Vec<usize>,
}

/// `(lambda m_ij) - (I_r + 0)` with `lambda` the polynomial variable.
pub fn boundary_matrix_special(graph: &DirectedGraph) -> BoundaryMatrix<QPoly> {
    let counts = graph.adjacency_counts();
    let n = graph.num_vertices();
    let sink_rows = graph.sinks();
    let entries = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if sink_rows.contains(&i) {
                        return QPoly::zero();
                    }
                    let mut p = QPoly::from_ints(&[0, counts[i][j] as i64]);
                    if i == j {
                        p = p - QPoly::one();
                    }
                    p
                })
                .collect()
        })
        .collect();
    BoundaryMatrix { entries, sink_rows }
}

/// Entry `(i, j)` sums `lambda(e)` over the edges from `v_i` to `v_j`, minus the identity on non-sinks.
pub fn boundary_matrix_general<F: Field>(
    f: &F,
    graph: &DirectedGraph,
    lambda: &BTreeMap<String, F::Elem>,
) -> Result<BoundaryMatrix<F::Elem>> {
    let lam = lookup_all(lambda, graph.edges().iter().map(|e| &e.id))?;
    let n = graph.num_vertices();
    let sink_rows = graph.sinks();
    let mut entries = vec![vec![f.zero(); n]; n];
    for (e, l) in lam.iter().enumerate() {
        let (i, j) = (graph.src_of(e), graph.dst_of(e));
        entries[i][j] = f.add(&entries[i][j], l);
    }
    for (i, row) in entries.iter_mut().enumerate() {
        if !sink_rows.contains(&i) {
            row[i] = f.sub(&row[i], &f.one());
        }
    }
    Ok(BoundaryMatrix { entries, sink_rows })
}

/// Exact determinant of the whole matrix; identically zero when sinks exist.
pub fn det_polynomial(m: &BoundaryMatrix<QPoly>) -> QPoly {
    linalg::det_poly(&m.entries)
}

/// Determinant of the square block on the non-sink vertices.
pub fn reduced_det_polynomial(m: &BoundaryMatrix<QPoly>) -> QPoly {
    let keep: Vec<usize> = (0..m.entries.len())
        .filter(|i| !m.sink_rows.contains(i))
        .collect();
    let block: Vec<Vec<QPoly>> = keep
        .iter()
        .map(|&i| keep.iter().map(|&j| m.entries[i][j].clone()).collect())
        .collect();
    linalg::det_poly(&block)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelStatus {
    /// Kernel is `{0}`.
    Trivial,
    /// A strictly positive kernel vector was found.
    Positive,
    /// The kernel contains no strictly positive vector.
    NotPositive,
    /// The best max-min combination is within tolerance of zero.
    Undetermined,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PositiveKernel {
    pub basis: Vec<Vec<f64>>,
    /// Positive kernel vector normalised to maximum component 1.
    pub vector: Option<Vec<f64>>,
    pub status: KernelStatus,
}

fn normalise_sup(v: &[f64]) -> Vec<f64> {
    let m = v.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let flip = v.iter().map(|x| x.abs()).zip(v).find(|(a, _)| *a == m).map_or(1.0, |(_, x)| x.signum());
    v.iter().map(|x| flip * x / m).collect()
}

/// Classify a floating kernel basis: a single direction is checked by sign,
/// a larger kernel by a max-min linear program.
pub fn classify_kernel(basis: Vec<Vec<f64>>, tol: f64) -> PositiveKernel {
    match basis.len() {
        0 => PositiveKernel {
            basis,
            vector: None,
            status: KernelStatus::Trivial,
        },
        1 => {
            let v = normalise_sup(&basis[0]);
            let positive = v.iter().all(|&x| x > POSITIVITY_THRESHOLD);
            PositiveKernel {
                basis,
                vector: positive.then_some(v),
                status: if positive {
                    KernelStatus::Positive
                } else {
                    KernelStatus::NotPositive
                },
            }
        }
        _ => {
            let (v, t) = linalg::max_min_combination(&basis).unwrap_or((Vec::new(), 0.0));
            let status = if t > POSITIVITY_THRESHOLD {
                KernelStatus::Positive
            } else if t.abs() <= tol {
                KernelStatus::Undetermined
            } else {
                KernelStatus::NotPositive
            };
            PositiveKernel {
                vector: (status == KernelStatus::Positive).then(|| normalise_sup(&v)),
                basis,
                status,
            }
        }
    }
}

/// Strictly positive kernel vector of a numeric square matrix, if any.
pub fn positive_kernel(m: &[Vec<f64>], tol: f64) -> PositiveKernel {
    let cols = m.first().map_or(0, Vec::len);
    classify_kernel(linalg::kernel_f64(m, cols, tol), tol)
}

/// One positive root of the determinant together with its kernel.
#[derive(Clone, Debug)]
pub struct SpecialFamily {
    /// The constant edge value.
    pub eta: AlgebraicScalar,
    pub field: NumberField,
    /// Exact kernel basis over `Q(eta)`, vertex-indexed.
    pub exact_basis: Vec<Vec<QPoly>>,
    pub kernel: PositiveKernel,
    /// Exact positive vector, normalised so its largest component is 1, when the kernel is a line.
    pub exact_vector: Option<Vec<QPoly>>,
    pub faithful: bool,
}

impl SpecialFamily {
    pub fn eta_f64(&self) -> f64 {
        self.eta.to_f64()
    }

    /// The weight `(C x, eta)` in floating point, `x` the positive kernel vector.
    pub fn weight_f64(&self, graph: &DirectedGraph, scale: f64) -> Option<GraphWeight<f64>> {
        let x = self.kernel.vector.as_ref()?;
        Some(GraphWeight::from_vecs(
            graph,
            x.iter().map(|v| v * scale).collect(),
            vec![self.eta_f64(); graph.num_edges()],
        ))
    }

    /// The weight `(x, eta)` over `Q(eta)`.
    pub fn weight_exact(&self, graph: &DirectedGraph) -> Option<GraphWeight<QPoly>> {
        let x = self.exact_vector.as_ref()?;
        Some(GraphWeight::from_vecs(
            graph,
            x.clone(),
            vec![self.field.generator(); graph.num_edges()],
        ))
    }
}

#[derive(Clone, Debug)]
pub struct SpecialSolution {
    /// Determinant of the full boundary matrix.
    pub det: QPoly,
    /// Determinant of the non-sink block; equals `det` when there are no sinks.
    pub reduced_det: QPoly,
    pub sinks: Vec<String>,
    /// No vertex carries an equation.
    pub unconstrained: bool,
    pub families: Vec<SpecialFamily>,
}

impl SpecialSolution {
    pub fn faithful_families(&self) -> impl Iterator<Item = &SpecialFamily> {
        self.families.iter().filter(|f| f.faithful)
    }
}

/// Kernel over `Q(alpha)` of a polynomial matrix evaluated at the root,
/// converted to floats and classified; an exact positive vector is kept when
/// the kernel is a line.
pub fn kernel_at_root(
    matrix: &[Vec<QPoly>],
    cols: usize,
    root: &AlgebraicScalar,
    tol: f64,
) -> (NumberField, Vec<Vec<QPoly>>, PositiveKernel, Option<Vec<QPoly>>) {
    let k = NumberField::new(root);
    let at = linalg::eval_poly_matrix(&k, matrix, &k.generator());
    let basis = linalg::kernel(&k, &at, cols);
    let fbasis: Vec<Vec<f64>> = basis
        .iter()
        .map(|v| v.iter().map(|x| k.to_f64(x)).collect())
        .collect();
    let kernel = classify_kernel(fbasis, tol);
    let exact = if basis.len() == 1 {
        exact_positive_direction(&k, &basis[0])
    } else {
        None
    };
    (k, basis, kernel, exact)
}

/// Rescale `v` to have largest component 1 if all components share a strict sign.
pub fn exact_positive_direction<F: Field>(f: &F, v: &[F::Elem]) -> Option<Vec<F::Elem>> {
    let first = f.sign(v.first()?);
    if first == std::cmp::Ordering::Equal || v.iter().any(|x| f.sign(x) != first) {
        return None;
    }
    let mut best = &v[0];
    for x in v {
        let bigger = f.sign(&f.sub(x, best)) == first;
        if bigger {
            best = x;
        }
    }
    let inv = f.inv(best).ok()?;
    Some(v.iter().map(|x| f.mul(x, &inv)).collect())
}

/// Determinant, positive roots, and positive kernels: every special weight
/// up to scaling of `g`.
pub fn solve_special_weights(graph: &DirectedGraph, eps: f64) -> Result<SpecialSolution> {
    let m = boundary_matrix_special(graph);
    let det = det_polynomial(&m);
    let reduced_det = reduced_det_polynomial(&m);
    let sinks = m
        .sink_rows
        .iter()
        .map(|&i| graph.vertices()[i].clone())
        .collect();
    let unconstrained = m.sink_rows.len() == graph.num_vertices();
    let mut families = Vec::new();
    if !unconstrained {
        for eta in positive_roots(&reduced_det, eps)? {
            let (field, exact_basis, kernel, exact_vector) =
                kernel_at_root(&m.entries, graph.num_vertices(), &eta, DEFAULT_TOL);
            let faithful = kernel.status == KernelStatus::Positive
                && (exact_basis.len() != 1 || exact_vector.is_some());
            families.push(SpecialFamily {
                eta,
                field,
                exact_basis,
                kernel,
                exact_vector,
                faithful,
            });
        }
    }
    Ok(SpecialSolution {
        det,
        reduced_det,
        sinks,
        unconstrained,
        families,
    })
}

/// With sinks present, solve the non-sink equations for `g` given `lambda`
/// and prescribed values at the sinks. Fails when the non-sink block is singular.
pub fn sink_driven_weight<F: Field>(
    f: &F,
    graph: &DirectedGraph,
    lambda: &BTreeMap<String, F::Elem>,
    sink_values: &BTreeMap<String, F::Elem>,
) -> Result<GraphWeight<F::Elem>> {
    let m = boundary_matrix_general(f, graph, lambda)?;
    let n = graph.num_vertices();
    let sinks = &m.sink_rows;
    let free: Vec<usize> = (0..n).filter(|i| !sinks.contains(i)).collect();
    let sval: Vec<F::Elem> = lookup_all(sink_values, sinks.iter().map(|&i| &graph.vertices()[i]))?;
    // augmented system [M_NN | -M_NS g_S]
    let mut aug: Vec<Vec<F::Elem>> = free
        .iter()
        .map(|&i| {
            let mut row: Vec<F::Elem> = free.iter().map(|&j| m.entries[i][j].clone()).collect();
            let rhs = sinks
                .iter()
                .zip(&sval)
                .fold(f.zero(), |acc, (&j, s)| f.sub(&acc, &f.mul(&m.entries[i][j], s)));
            row.push(rhs);
            row
        })
        .collect();
    let pivots = linalg::rref(f, &mut aug);
    if pivots.len() != free.len() || pivots.last() == Some(&free.len()) {
        return Err(Error::NotFaithful(
            "non-sink block is singular at this lambda".into(),
        ));
    }
    let mut g = vec![f.zero(); n];
    for (r, &i) in free.iter().enumerate() {
        g[i] = aug[r][free.len()].clone();
    }
    for (&i, s) in sinks.iter().zip(sval) {
        g[i] = s;
    }
    let lam = lookup_all(lambda, graph.edges().iter().map(|e| &e.id))?;
    Ok(GraphWeight::from_vecs(graph, g, lam))
}

/// Convenience: floating-point verification.
pub fn verify_graph_weight_f64(
    graph: &DirectedGraph,
    w: &GraphWeight<f64>,
    tol: f64,
) -> Result<WeightReport> {
    verify_graph_weight(&Reals, graph, w, tol)
}
