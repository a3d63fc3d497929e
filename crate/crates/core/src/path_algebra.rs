//! Path monomials `S_mu S_nu^*` over a directed graph, their Cuntz-Krieger
//! products, the weight functional `psi`, the modular flow, and finite
//! checks of the KMS identity and of gauge invariance.
//!
//! Conventions: `S_e^* S_e = P_{r(e)}` and `psi(S_mu S_nu^*) = delta lambda(nu) g(r(nu))`.
//! With `sigma_t(S_e) = lambda(e)^{it} S_e` the identity
//! `psi(x y) = psi(y sigma_z(x))` holds at `z = -i`; `beta_sign = -1` selects it.

use std::fmt;

use num_complex::Complex64;
use serde::Serialize;

use crate::complex::Oriented2Complex;
use crate::cw::Rank2Weight;
use crate::error::{Error, Result};
use crate::graph::DirectedGraph;
use crate::weight::GraphWeight;

/// The sign for which the KMS identity holds with the flow as defined here.
pub const DEFAULT_BETA_SIGN: i8 = -1;

/// A path of edge indices anchored at `start`; the empty path is the vertex itself.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Path {
    pub start: usize,
    pub edges: Vec<usize>,
}

impl Path {
    pub fn vertex(v: usize) -> Self {
        Path { start: v, edges: Vec::new() }
    }

    pub fn new(graph: &DirectedGraph, edges: Vec<usize>) -> Result<Self> {
        let first = *edges
            .first()
            .ok_or_else(|| Error::GraphMismatch("a path needs an edge or an anchor vertex".into()))?;
        if edges.iter().any(|&e| e >= graph.num_edges()) || !graph.is_path(&edges) {
            return Err(Error::GraphMismatch(format!("{edges:?} is not a path")));
        }
        Ok(Path {
            start: graph.src_of(first),
            edges,
        })
    }

    pub fn from_ids(graph: &DirectedGraph, ids: &[&str]) -> Result<Self> {
        let edges = ids
            .iter()
            .map(|id| graph.edge_index(id).ok_or_else(|| Error::UnknownEdge(id.to_string())))
            .collect::<Result<Vec<_>>>()?;
        Self::new(graph, edges)
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn source(&self) -> usize {
        self.start
    }

    pub fn range(&self, graph: &DirectedGraph) -> usize {
        self.edges.last().map_or(self.start, |&e| graph.dst_of(e))
    }

    fn valid_in(&self, graph: &DirectedGraph) -> bool {
        self.start < graph.num_vertices()
            && self.edges.iter().all(|&e| e < graph.num_edges())
            && self.edges.first().is_none_or(|&e| graph.src_of(e) == self.start)
            && graph.is_path(&self.edges)
    }

    /// `self` followed by `rest`, which must start at `r(self)`.
    fn concat(&self, rest: &[usize]) -> Path {
        let mut edges = self.edges.clone();
        edges.extend_from_slice(rest);
        Path { start: self.start, edges }
    }

    /// If `self` is a prefix of `other`, the remaining edges.
    fn strip_prefix<'a>(&self, other: &'a Path) -> Option<&'a [usize]> {
        (self.start == other.start && other.edges.starts_with(&self.edges)).then(|| &other.edges[self.edges.len()..])
    }

    pub fn display(&self, graph: &DirectedGraph) -> String {
        if self.edges.is_empty() {
            return graph.vertices()[self.start].clone();
        }
        self.edges
            .iter()
            .map(|&e| graph.edges()[e].id.as_str())
            .collect::<Vec<_>>()
            .join(".")
    }
}

/// `coeff * S_mu S_nu^*` with `r(mu) = r(nu)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PathMonomial {
    pub mu: Path,
    pub nu: Path,
    pub coeff: Complex64,
}

impl PathMonomial {
    pub fn new(graph: &DirectedGraph, mu: Path, nu: Path) -> Result<Self> {
        let m = PathMonomial {
            mu,
            nu,
            coeff: Complex64::new(1.0, 0.0),
        };
        m.validate(graph)?;
        Ok(m)
    }

    pub fn projection(v: usize) -> Self {
        PathMonomial {
            mu: Path::vertex(v),
            nu: Path::vertex(v),
            coeff: Complex64::new(1.0, 0.0),
        }
    }

    /// `S_e`.
    pub fn edge(graph: &DirectedGraph, e: usize) -> Self {
        PathMonomial {
            mu: Path {
                start: graph.src_of(e),
                edges: vec![e],
            },
            nu: Path::vertex(graph.dst_of(e)),
            coeff: Complex64::new(1.0, 0.0),
        }
    }

    /// `S_e^*`.
    pub fn edge_adjoint(graph: &DirectedGraph, e: usize) -> Self {
        Self::edge(graph, e).adjoint()
    }

    pub fn adjoint(&self) -> Self {
        PathMonomial {
            mu: self.nu.clone(),
            nu: self.mu.clone(),
            coeff: self.coeff.conj(),
        }
    }

    pub fn scaled(mut self, c: Complex64) -> Self {
        self.coeff *= c;
        self
    }

    pub fn validate(&self, graph: &DirectedGraph) -> Result<()> {
        if !self.mu.valid_in(graph) || !self.nu.valid_in(graph) {
            return Err(Error::GraphMismatch("path does not belong to this graph".into()));
        }
        if self.mu.range(graph) != self.nu.range(graph) {
            return Err(Error::GraphMismatch("r(mu) != r(nu)".into()));
        }
        Ok(())
    }

    pub fn display(&self, graph: &DirectedGraph) -> String {
        let body = if self.mu == self.nu && self.mu.is_empty() {
            format!("P_{}", self.mu.display(graph))
        } else {
            let s = if self.mu.is_empty() { String::new() } else { format!("S_{}", self.mu.display(graph)) };
            let t = if self.nu.is_empty() { String::new() } else { format!("S_{}^*", self.nu.display(graph)) };
            format!("{s}{t}")
        };
        if self.coeff == Complex64::new(1.0, 0.0) {
            body
        } else {
            format!("({}) {body}", self.coeff)
        }
    }
}

/// Reduced product; the result has at most one term.
pub fn monomial_product(graph: &DirectedGraph, a: &PathMonomial, b: &PathMonomial) -> Result<Vec<PathMonomial>> {
    a.validate(graph)?;
    b.validate(graph)?;
    let coeff = a.coeff * b.coeff;
    if let Some(rest) = a.nu.strip_prefix(&b.mu) {
        return Ok(vec![PathMonomial {
            mu: a.mu.concat(rest),
            nu: b.nu.clone(),
            coeff,
        }]);
    }
    if let Some(rest) = b.mu.strip_prefix(&a.nu) {
        return Ok(vec![PathMonomial {
            mu: a.mu.clone(),
            nu: b.nu.concat(rest),
            coeff,
        }]);
    }
    Ok(Vec::new())
}

/// `psi` of one graph weight, with the edge function that also drives the flow.
#[derive(Clone, Debug)]
pub struct GraphFunctional {
    pub graph: DirectedGraph,
    g: Vec<f64>,
    lambda: Vec<f64>,
}

impl GraphFunctional {
    pub fn new(graph: &DirectedGraph, w: &GraphWeight<f64>) -> Result<Self> {
        Ok(GraphFunctional {
            graph: graph.clone(),
            g: w.g_vec(graph)?,
            lambda: w.lambda_vec(graph)?,
        })
    }

    fn path_weight(&self, p: &Path) -> f64 {
        p.edges.iter().map(|&e| self.lambda[e]).product()
    }

    /// `delta_{mu,nu} lambda(nu) g(r(nu))` times the coefficient.
    pub fn eval(&self, m: &PathMonomial) -> Complex64 {
        if m.mu != m.nu {
            return Complex64::new(0.0, 0.0);
        }
        m.coeff * self.path_weight(&m.nu) * self.g[m.nu.range(&self.graph)]
    }

    /// `sigma_t(S_mu S_nu^*) = (lambda(mu) / lambda(nu))^{it} S_mu S_nu^*` for complex `t`.
    pub fn evolve(&self, m: &PathMonomial, t: Complex64) -> Result<PathMonomial> {
        for &e in m.mu.edges.iter().chain(&m.nu.edges) {
            if self.lambda[e] <= 0.0 {
                return Err(Error::NonpositiveWeight(self.graph.edges()[e].id.clone()));
            }
        }
        let log_ratio = self.path_weight(&m.mu).ln() - self.path_weight(&m.nu).ln();
        let factor = (Complex64::i() * t * log_ratio).exp();
        Ok(m.clone().scaled(factor))
    }
}

/// Commuting product `S_mu S_nu^* S_Omega S_Lambda^*` of a skeleton and a boundary monomial.
#[derive(Clone, Debug, PartialEq)]
pub struct Rank2Monomial {
    pub skeleton: PathMonomial,
    pub boundary: PathMonomial,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Monomial {
    Graph(PathMonomial),
    Rank2(Rank2Monomial),
}

/// `psi` built from a graph weight, or from a rank-2 weight as the product
/// of the skeleton functional `(g, lambda_tilde)` and the boundary functional `(lambda, eta)`.
#[derive(Clone, Debug)]
pub struct WeightFunctional {
    pub factors: Vec<GraphFunctional>,
    pub beta_sign: i8,
}

impl WeightFunctional {
    pub fn from_graph_weight(graph: &DirectedGraph, w: &GraphWeight<f64>, beta_sign: i8) -> Result<Self> {
        Ok(WeightFunctional {
            factors: vec![GraphFunctional::new(graph, w)?],
            beta_sign,
        })
    }

    pub fn from_rank2(c: &Oriented2Complex, w: &Rank2Weight<f64>, beta_sign: i8) -> Result<Self> {
        let b = c.boundary_graph();
        Ok(WeightFunctional {
            factors: vec![
                GraphFunctional::new(c.skeleton(), &w.skeleton_weight())?,
                GraphFunctional::new(&b.graph, &w.boundary_weight(&b)?)?,
            ],
            beta_sign,
        })
    }

    fn parts<'a>(&self, m: &'a Monomial) -> Result<Vec<&'a PathMonomial>> {
        match (m, self.factors.len()) {
            (Monomial::Graph(p), 1) => Ok(vec![p]),
            (Monomial::Rank2(r), 2) => Ok(vec![&r.skeleton, &r.boundary]),
            _ => Err(Error::GraphMismatch("monomial rank does not match the functional".into())),
        }
    }

    fn assemble(&self, parts: Vec<PathMonomial>) -> Monomial {
        let mut it = parts.into_iter();
        let first = it.next().expect("at least one factor");
        match it.next() {
            None => Monomial::Graph(first),
            Some(second) => Monomial::Rank2(Rank2Monomial {
                skeleton: first,
                boundary: second,
            }),
        }
    }

    pub fn eval(&self, m: &Monomial) -> Result<Complex64> {
        let parts = self.parts(m)?;
        Ok(parts.iter().zip(&self.factors).map(|(p, f)| f.eval(p)).product())
    }

    pub fn evolve(&self, m: &Monomial, t: Complex64) -> Result<Monomial> {
        let parts = self.parts(m)?;
        let out = parts
            .iter()
            .zip(&self.factors)
            .map(|(p, f)| f.evolve(p, t))
            .collect::<Result<Vec<_>>>()?;
        Ok(self.assemble(out))
    }

    /// Factorwise product; empty when any factor vanishes.
    pub fn product(&self, a: &Monomial, b: &Monomial) -> Result<Option<Monomial>> {
        let pa = self.parts(a)?;
        let pb = self.parts(b)?;
        let mut out = Vec::new();
        for ((x, y), f) in pa.iter().zip(&pb).zip(&self.factors) {
            match monomial_product(&f.graph, x, y)?.pop() {
                Some(m) => out.push(m),
                None => return Ok(None),
            }
        }
        Ok(Some(self.assemble(out)))
    }

    pub fn display(&self, m: &Monomial) -> String {
        match m {
            Monomial::Graph(p) => p.display(&self.factors[0].graph),
            Monomial::Rank2(r) => format!(
                "{} (x) {}",
                r.skeleton.display(&self.factors[0].graph),
                r.boundary.display(&self.factors[1].graph)
            ),
        }
    }
}

pub fn weight_eval(psi: &WeightFunctional, m: &Monomial) -> Result<Complex64> {
    psi.eval(m)
}

pub fn evolve(psi: &WeightFunctional, m: &Monomial, t: Complex64) -> Result<Monomial> {
    psi.evolve(m, t)
}

/// Every path of length at most `max_len`, vertices first, then by length.
pub fn enumerate_paths(graph: &DirectedGraph, max_len: usize) -> Vec<Path> {
    let mut out: Vec<Path> = (0..graph.num_vertices()).map(Path::vertex).collect();
    let mut frontier: Vec<Path> = out.clone();
    for _ in 0..max_len {
        let mut next = Vec::new();
        for p in &frontier {
            for &e in graph.out_edges(p.range(graph)) {
                next.push(p.concat(&[e]));
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// Every monomial `S_mu S_nu^*` with `|mu|, |nu| <= max_len`.
pub fn enumerate_monomials(graph: &DirectedGraph, max_len: usize) -> Vec<PathMonomial> {
    let paths = enumerate_paths(graph, max_len);
    let mut out = Vec::new();
    for mu in &paths {
        for nu in &paths {
            if mu.range(graph) == nu.range(graph) {
                out.push(PathMonomial {
                    mu: mu.clone(),
                    nu: nu.clone(),
                    coeff: Complex64::new(1.0, 0.0),
                });
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WorstPair {
    pub x: String,
    pub y: String,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KmsReport {
    pub pairs_checked: usize,
    pub max_discrepancy: f64,
    pub worst: Option<WorstPair>,
    pub passed: bool,
}

impl KmsReport {
    fn merge(self, other: KmsReport) -> KmsReport {
        let (max_discrepancy, worst) = if other.max_discrepancy > self.max_discrepancy {
            (other.max_discrepancy, other.worst)
        } else {
            (self.max_discrepancy, self.worst)
        };
        KmsReport {
            pairs_checked: self.pairs_checked + other.pairs_checked,
            max_discrepancy,
            worst,
            passed: self.passed && other.passed,
        }
    }
}

/// Compare `psi(x y)` with `psi(y sigma_{i beta}(x))` over all pairs in `sample`.
pub fn kms_check(psi: &WeightFunctional, sample: &[(Monomial, Monomial)], tol: f64) -> Result<KmsReport> {
    let z = Complex64::new(0.0, psi.beta_sign as f64);
    let mut max = 0.0f64;
    let mut worst = None;
    for (x, y) in sample {
        let lhs = match psi.product(x, y)? {
            Some(m) => psi.eval(&m)?,
            None => Complex64::new(0.0, 0.0),
        };
        let sx = psi.evolve(x, z)?;
        let rhs = match psi.product(y, &sx)? {
            Some(m) => psi.eval(&m)?,
            None => Complex64::new(0.0, 0.0),
        };
        let d = (lhs - rhs).norm();
        if d > max || (worst.is_none() && d >= max) {
            max = d;
            worst = Some(WorstPair {
                x: psi.display(x),
                y: psi.display(y),
                lhs: lhs.re,
                rhs: rhs.re,
            });
        }
    }
    Ok(KmsReport {
        pairs_checked: sample.len(),
        max_discrepancy: max,
        worst,
        passed: max <= tol,
    })
}

/// All ordered pairs of graph monomials with paths of length at most `max_len`.
pub fn graph_pairs(graph: &DirectedGraph, max_len: usize) -> Vec<(Monomial, Monomial)> {
    let ms = enumerate_monomials(graph, max_len);
    let mut out = Vec::with_capacity(ms.len() * ms.len());
    for x in &ms {
        for y in &ms {
            out.push((Monomial::Graph(x.clone()), Monomial::Graph(y.clone())));
        }
    }
    out
}

/// KMS check of a rank-2 functional: exhaustive on each tensor factor, plus
/// `mixed` deterministic pseudo-random pairs of joint monomials.
pub fn kms_check_rank2(psi: &WeightFunctional, max_len: usize, mixed: usize, tol: f64) -> Result<KmsReport> {
    if psi.factors.len() != 2 {
        return Err(Error::GraphMismatch("rank-2 check needs a rank-2 functional".into()));
    }
    let mut report: Option<KmsReport> = None;
    for f in &psi.factors {
        let single = WeightFunctional {
            factors: vec![f.clone()],
            beta_sign: psi.beta_sign,
        };
        let r = kms_check(&single, &graph_pairs(&f.graph, max_len), tol)?;
        report = Some(match report {
            None => r,
            Some(prev) => prev.merge(r),
        });
    }
    let sk = enumerate_monomials(&psi.factors[0].graph, max_len);
    let bd = enumerate_monomials(&psi.factors[1].graph, max_len);
    // a fixed linear congruential walk keeps the joint sample reproducible
    let mut state: u64 = 0x9e37_79b9_7f4a_7c15;
    let mut next = |n: usize| {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((state >> 33) as usize) % n
    };
    let mut sample = Vec::with_capacity(mixed);
    for _ in 0..mixed {
        let mut pick = || {
            Monomial::Rank2(Rank2Monomial {
                skeleton: sk[next(sk.len())].clone(),
                boundary: bd[next(bd.len())].clone(),
            })
        };
        let x = pick();
        let y = pick();
        sample.push((x, y));
    }
    // include pairs x, x^* so that the joint sample hits nonzero values
    let diag: Vec<(Monomial, Monomial)> = sample
        .iter()
        .map(|(x, _)| {
            let Monomial::Rank2(r) = x else { unreachable!() };
            let adj = Monomial::Rank2(Rank2Monomial {
                skeleton: r.skeleton.adjoint(),
                boundary: r.boundary.adjoint(),
            });
            (x.clone(), adj)
        })
        .collect();
    sample.extend(diag);
    let joint = kms_check(psi, &sample, tol)?;
    Ok(report.expect("two factors").merge(joint))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GaugeReport {
    pub monomials_checked: usize,
    /// Monomials with `psi(m) != 0` but `|mu| != |nu|`.
    pub violations: Vec<String>,
    pub max_discrepancy: f64,
    pub passed: bool,
}

/// `psi(gamma_z(m)) = z^{|mu| - |nu|} psi(m)` must equal `psi(m)` for each `z`.
pub fn gauge_check(psi: &WeightFunctional, sample: &[Monomial], zs: &[Complex64], tol: f64) -> Result<GaugeReport> {
    let mut violations = Vec::new();
    let mut max = 0.0f64;
    for m in sample {
        let parts = psi.parts(m)?;
        let degree: i64 = parts.iter().map(|p| p.mu.len() as i64 - p.nu.len() as i64).sum();
        let v = psi.eval(m)?;
        if v.norm() > tol && degree != 0 {
            violations.push(psi.display(m));
        }
        for z in zs {
            let d = (z.powi(degree as i32) * v - v).norm();
            max = max.max(d);
        }
    }
    Ok(GaugeReport {
        monomials_checked: sample.len(),
        passed: violations.is_empty() && max <= tol,
        violations,
        max_discrepancy: max,
    })
}

impl fmt::Display for KmsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} pairs, max discrepancy {:.3e}, {}",
            self.pairs_checked,
            self.max_discrepancy,
            if self.passed { "pass" } else { "fail" }
        )
    }
}
