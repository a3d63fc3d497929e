//! Ã2 constructions: finite projective planes, triangle presentations and
//! their one-vertex complexes, the sector graphs `G+` and `G-`, matched
//! weights on them, and weights on the truncated shape lattice.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::complex::{Face, Oriented2Complex};
use crate::error::{Error, Result};
use crate::field::{Field, Rationals};
use crate::graph::{DirectedGraph, Edge};
use crate::weight::{solve_special_weights, verify_graph_weight, GraphWeight};

/// Points and lines of a projective plane of order `q`, lines as point indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IncidencePlane {
    q: usize,
    points: Vec<String>,
    lines: Vec<BTreeSet<usize>>,
}

impl IncidencePlane {
    pub fn new(q: usize, points: Vec<String>, lines: Vec<BTreeSet<usize>>) -> Result<Self> {
        let n = q * q + q + 1;
        let bad = |m: String| Err(Error::InvalidPlane(m));
        if q < 2 {
            return bad(format!("order {q} is below 2"));
        }
        if points.len() != n || lines.len() != n {
            return bad(format!("{} points and {} lines, expected {n} each", points.len(), lines.len()));
        }
        if points.iter().collect::<BTreeSet<_>>().len() != n {
            return bad("point names are not distinct".into());
        }
        for (i, l) in lines.iter().enumerate() {
            if l.len() != q + 1 || l.iter().any(|&p| p >= n) {
                return bad(format!("line {i} does not hold {} valid points", q + 1));
            }
        }
        for p in 0..n {
            let on = lines.iter().filter(|l| l.contains(&p)).count();
            if on != q + 1 {
                return bad(format!("point `{}` lies on {on} lines", points[p]));
            }
        }
        for p in 0..n {
            for r in p + 1..n {
                let common = lines.iter().filter(|l| l.contains(&p) && l.contains(&r)).count();
                if common != 1 {
                    return bad(format!("points `{}`, `{}` share {common} lines", points[p], points[r]));
                }
            }
        }
        Ok(IncidencePlane { q, points, lines })
    }

    pub fn order(&self) -> usize {
        self.q
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn lines(&self) -> &[BTreeSet<usize>] {
        &self.lines
    }

    pub fn point_index(&self, p: &str) -> Option<usize> {
        self.points.iter().position(|x| x == p)
    }

    /// The unique line through two distinct points.
    pub fn join(&self, p: usize, r: usize) -> Option<usize> {
        (p != r).then(|| self.lines.iter().position(|l| l.contains(&p) && l.contains(&r)))?
    }

    /// The unique common point of two distinct lines.
    pub fn meet(&self, l: usize, m: usize) -> Option<usize> {
        if l == m {
            return None;
        }
        self.lines[l].intersection(&self.lines[m]).next().copied()
    }
}

/// The plane of order 2 from the difference set `{0, 1, 3}` mod 7: line `i` is `{i, i+1, i+3}`.
pub fn fano_plane() -> IncidencePlane {
    let points = (0..7).map(|i| format!("x{i}")).collect();
    let lines = (0..7).map(|i| [i, (i + 1) % 7, (i + 3) % 7].into_iter().collect()).collect();
    IncidencePlane::new(2, points, lines).expect("the Fano plane is a projective plane")
}

/// JSON form of a triangle presentation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PresentationSpec {
    pub q: usize,
    pub points: Vec<String>,
    pub lines: Vec<Vec<String>>,
    /// Point to line index.
    pub lambda: BTreeMap<String, usize>,
    pub triples: Vec<[String; 3]>,
}

/// Relations `a_x a_y a_z = 1` over a plane with a point-line bijection `lambda`,
/// one triple per relation, with `y in lambda(x)` for every cyclic rotation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PresentationSpec", into = "PresentationSpec")]
pub struct TrianglePresentation {
    plane: IncidencePlane,
    lambda: Vec<usize>,
    triples: Vec<[usize; 3]>,
    /// Incident pair `(x, y)` to the third letter `z` of its relation.
    third: BTreeMap<(usize, usize), usize>,
}

impl TrianglePresentation {
    pub fn new(plane: IncidencePlane, lambda: Vec<usize>, triples: Vec<[usize; 3]>) -> Result<Self> {
        let n = plane.points.len();
        if lambda.len() != n || lambda.iter().collect::<BTreeSet<_>>().len() != n || lambda.iter().any(|&l| l >= n) {
            return Err(Error::InvalidPlane("lambda is not a bijection from points to lines".into()));
        }
        let name = |t: &[usize; 3]| t.map(|i| plane.points.get(i).cloned().unwrap_or_else(|| format!("#{i}"))).join(" ");
        let mut third = BTreeMap::new();
        let mut classes = BTreeSet::new();
        for t in &triples {
            if t.iter().any(|&i| i >= n) {
                return Err(Error::InvalidTriple(format!("({}) uses an unknown point", name(t))));
            }
            let rots = [[t[0], t[1], t[2]], [t[1], t[2], t[0]], [t[2], t[0], t[1]]];
            if !classes.insert(*rots.iter().min().expect("three rotations")) {
                return Err(Error::InvalidTriple(format!("({}) repeats a relation", name(t))));
            }
            for r in rots {
                if !plane.lines[lambda[r[0]]].contains(&r[1]) {
                    return Err(Error::InvalidTriple(format!(
                        "({}): `{}` is not on lambda(`{}`)",
                        name(&r),
                        plane.points[r[1]],
                        plane.points[r[0]]
                    )));
                }
                if let Some(&z) = third.get(&(r[0], r[1])) {
                    if z != r[2] {
                        return Err(Error::InvalidTriple(format!("pair ({}) has two completions", name(&r))));
                    }
                }
                third.insert((r[0], r[1]), r[2]);
            }
        }
        Ok(TrianglePresentation {
            plane,
            lambda,
            triples,
            third,
        })
    }

    pub fn from_spec(spec: PresentationSpec) -> Result<Self> {
        let index: BTreeMap<&str, usize> = spec.points.iter().enumerate().map(|(i, p)| (p.as_str(), i)).collect();
        let point = |p: &str| index.get(p).copied().ok_or_else(|| Error::InvalidPlane(format!("unknown point `{p}`")));
        let lines = spec
            .lines
            .iter()
            .map(|l| l.iter().map(|p| point(p)).collect::<Result<BTreeSet<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let plane = IncidencePlane::new(spec.q, spec.points.clone(), lines)?;
        let lambda = spec
            .points
            .iter()
            .map(|p| spec.lambda.get(p).copied().ok_or_else(|| Error::MissingValue(format!("lambda({p})"))))
            .collect::<Result<Vec<_>>>()?;
        let triples = spec
            .triples
            .iter()
            .map(|t| Ok([point(&t[0])?, point(&t[1])?, point(&t[2])?]))
            .collect::<Result<Vec<_>>>()
            .map_err(|e| match e {
                Error::InvalidPlane(m) => Error::InvalidTriple(m),
                other => other,
            })?;
        Self::new(plane, lambda, triples)
    }

    pub fn to_spec(&self) -> PresentationSpec {
        let p = &self.plane.points;
        PresentationSpec {
            q: self.plane.q,
            points: p.clone(),
            lines: self.plane.lines.iter().map(|l| l.iter().map(|&i| p[i].clone()).collect()).collect(),
            lambda: p.iter().cloned().zip(self.lambda.iter().copied()).collect(),
            triples: self.triples.iter().map(|t| t.map(|i| p[i].clone())).collect(),
        }
    }

    pub fn plane(&self) -> &IncidencePlane {
        &self.plane
    }

    pub fn lambda(&self, x: usize) -> &BTreeSet<usize> {
        &self.plane.lines[self.lambda[x]]
    }

    pub fn triples(&self) -> &[[usize; 3]] {
        &self.triples
    }

    /// Incident pairs `(a, b)` with `b in lambda(a)`, in point order.
    pub fn incident_pairs(&self) -> Vec<(usize, usize)> {
        (0..self.plane.points.len())
            .flat_map(|a| self.lambda(a).iter().map(move |&b| (a, b)))
            .collect()
    }

    /// The third letter of the relation starting with `(a, b)`.
    pub fn third(&self, a: usize, b: usize) -> Option<usize> {
        self.third.get(&(a, b)).copied()
    }

    fn line_owner(&self, l: usize) -> usize {
        self.lambda.iter().position(|&m| m == l).expect("lambda is a bijection")
    }
}

impl TryFrom<PresentationSpec> for TrianglePresentation {
    type Error = Error;
    fn try_from(spec: PresentationSpec) -> Result<Self> {
        Self::from_spec(spec)
    }
}

impl From<TrianglePresentation> for PresentationSpec {
    fn from(tp: TrianglePresentation) -> Self {
        tp.to_spec()
    }
}

/// One vertex `v`, a loop per generator, and a triangular face `s{i}` per relation.
pub fn presentation_complex(tp: &TrianglePresentation) -> Result<Oriented2Complex> {
    let p = &tp.plane.points;
    let edges: Vec<(&str, &str, &str)> = p.iter().map(|x| (x.as_str(), "v", "v")).collect();
    let g = DirectedGraph::from_triples(&["v"], &edges)?;
    let faces = tp
        .triples
        .iter()
        .enumerate()
        .map(|(i, t)| Face {
            id: format!("s{i}"),
            boundary: t.iter().map(|&x| p[x].clone()).collect(),
        })
        .collect();
    Oriented2Complex::new(g, faces)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SectorSign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

/// A rule producing the set `A^{+-}_{a^{-1}, b}` of successors of `(a, b)`.
pub trait SectorRule {
    fn name(&self) -> &str;
    fn successors(&self, tp: &TrianglePresentation, a: usize, b: usize, sign: SectorSign) -> Result<Vec<(usize, usize)>>;
}

/// With `x` the third letter of the relation `(a, b, x)`:
/// `A+` pairs each `d` off `lambda(b)` with the `c` whose line joins `x` and `d`;
/// `A-` pairs each `c` with `a` off `lambda(c)` with `d = lambda(c) meet lambda(x)`.
#[derive(Clone, Copy, Debug, Default)]
pub struct ThirdLetterRule;

impl SectorRule for ThirdLetterRule {
    fn name(&self) -> &str {
        "third-letter"
    }

    fn successors(&self, tp: &TrianglePresentation, a: usize, b: usize, sign: SectorSign) -> Result<Vec<(usize, usize)>> {
        let pl = &tp.plane;
        let x = tp.third(a, b).ok_or_else(|| {
            Error::AmbiguousSector(format!("no relation starts with ({}, {})", pl.points[a], pl.points[b]))
        })?;
        let n = pl.points.len();
        let mut out = Vec::new();
        match sign {
            SectorSign::Plus => {
                for d in (0..n).filter(|d| !tp.lambda(b).contains(d)) {
                    let l = pl.join(x, d).ok_or_else(|| {
                        Error::AmbiguousSector(format!("d = x = `{}` leaves c undetermined", pl.points[d]))
                    })?;
                    out.push((tp.line_owner(l), d));
                }
            }
            SectorSign::Minus => {
                for c in (0..n).filter(|&c| !tp.lambda(c).contains(&a)) {
                    let d = pl.meet(tp.lambda[c], tp.lambda[x]).ok_or_else(|| {
                        Error::AmbiguousSector(format!("lambda(`{}`) = lambda(x) leaves d undetermined", pl.points[c]))
                    })?;
                    out.push((c, d));
                }
            }
        }
        Ok(out)
    }
}

pub fn pair_id(tp: &TrianglePresentation, (a, b): (usize, usize)) -> String {
    format!("{},{}", tp.plane.points[a], tp.plane.points[b])
}

/// `G+` and `G-` on the incident pairs.
#[derive(Clone, Debug, PartialEq)]
pub struct SectorGraphs {
    pub rule: String,
    pub plus: DirectedGraph,
    pub minus: DirectedGraph,
}

fn sector_graph(tp: &TrianglePresentation, rule: &dyn SectorRule, sign: SectorSign) -> Result<DirectedGraph> {
    let q2 = tp.plane.q * tp.plane.q;
    let pairs = tp.incident_pairs();
    let vertices: Vec<String> = pairs.iter().map(|&p| pair_id(tp, p)).collect();
    let mut edges = Vec::new();
    for &(a, b) in &pairs {
        let succ = rule.successors(tp, a, b, sign)?;
        let distinct: BTreeSet<_> = succ.iter().collect();
        let src = pair_id(tp, (a, b));
        if succ.len() != q2 || distinct.len() != q2 {
            return Err(Error::AmbiguousSector(format!(
                "({src}) has {} successors, {} distinct, expected {q2}",
                succ.len(),
                distinct.len()
            )));
        }
        for &(c, d) in &succ {
            if !tp.lambda(c).contains(&d) {
                return Err(Error::AmbiguousSector(format!(
                    "({src}) -> ({}) is not an incident pair",
                    pair_id(tp, (c, d))
                )));
            }
            let dst = pair_id(tp, (c, d));
            edges.push(Edge::new(format!("{src}>{dst}"), src.clone(), dst));
        }
    }
    DirectedGraph::new(vertices, edges)
}

/// Build `G+` and `G-`, enforcing out-degree `q^2` with distinct targets.
pub fn sector_graphs(tp: &TrianglePresentation, rule: &dyn SectorRule) -> Result<SectorGraphs> {
    Ok(SectorGraphs {
        rule: rule.name().to_string(),
        plus: sector_graph(tp, rule, SectorSign::Plus)?,
        minus: sector_graph(tp, rule, SectorSign::Minus)?,
    })
}

/// `g = 1`, `lambda = 1/q^2`.
pub fn constant_weight(graph: &DirectedGraph, q: usize) -> GraphWeight<BigRational> {
    let l = BigRational::new(BigInt::one(), BigInt::from(q * q));
    GraphWeight::from_vecs(
        graph,
        vec![BigRational::one(); graph.num_vertices()],
        vec![l; graph.num_edges()],
    )
}

/// In-degree of every vertex equals its out-degree.
pub fn is_range_regular(graph: &DirectedGraph) -> bool {
    (0..graph.num_vertices()).all(|v| graph.in_edges(v).len() == graph.out_edges(v).len())
}

/// `psi(p_{a^{-1},b}) = lambda_+ g_+` at every vertex, with the largest mismatch
/// `|lambda_+ g_+ - lambda_- g_-|`; `lambda_+-` are read off the first out-edge.
pub fn pmmatch_defect<F: Field>(
    f: &F,
    plus: (&DirectedGraph, &GraphWeight<F::Elem>),
    minus: (&DirectedGraph, &GraphWeight<F::Elem>),
) -> Result<(BTreeMap<String, F::Elem>, F::Elem)> {
    let lam = |g: &DirectedGraph, w: &GraphWeight<F::Elem>, v: usize| -> Result<F::Elem> {
        let e = *g
            .out_edges(v)
            .first()
            .ok_or_else(|| Error::MissingValue(format!("out-edge of {}", g.vertices()[v])))?;
        let id = &g.edges()[e].id;
        w.lambda.get(id).cloned().ok_or_else(|| Error::MissingValue(id.clone()))
    };
    let mut psi = BTreeMap::new();
    let mut worst = f.zero();
    for (v, id) in plus.0.vertices().iter().enumerate() {
        let vm = minus.0.require_vertex(id)?;
        let gp = plus.1.g.get(id).ok_or_else(|| Error::MissingValue(id.clone()))?;
        let gm = minus.1.g.get(id).ok_or_else(|| Error::MissingValue(id.clone()))?;
        let a = f.mul(&lam(plus.0, plus.1, v)?, gp);
        let b = f.mul(&lam(minus.0, minus.1, vm)?, gm);
        let d = f.sub(&a, &b);
        let d = if f.sign(&d).is_lt() { f.neg(&d) } else { d };
        if f.sign(&f.sub(&d, &worst)).is_gt() {
            worst = d;
        }
        psi.insert(id.clone(), a);
    }
    Ok((psi, worst))
}

#[derive(Clone, Debug, PartialEq)]
pub struct MatchedPair {
    pub plus: GraphWeight<f64>,
    pub minus: GraphWeight<f64>,
    /// `psi(p_{a^{-1},b})` per incident pair.
    pub psi: BTreeMap<String, f64>,
    pub defect: f64,
}

/// Faithful special weights on `G+` and `G-` (from the special solver), each
/// pair rescaled so that the projections agree at the first vertex, kept when
/// the matching condition holds everywhere within `eps`.
pub fn matched_weight_search(plus: &DirectedGraph, minus: &DirectedGraph, eps: f64) -> Result<Vec<MatchedPair>> {
    let sp = solve_special_weights(plus, crate::weight::DEFAULT_EPS)?;
    let sm = solve_special_weights(minus, crate::weight::DEFAULT_EPS)?;
    let mut out = Vec::new();
    for fp in sp.faithful_families() {
        for fm in sm.faithful_families() {
            let (Some(wp), Some(wm)) = (fp.weight_f64(plus, 1.0), fm.weight_f64(minus, 1.0)) else {
                continue;
            };
            let v0 = &plus.vertices()[0];
            let scale = fp.eta_f64() * wp.g[v0] / (fm.eta_f64() * wm.g[v0]);
            let wm = GraphWeight::new(wm.g.iter().map(|(k, v)| (k.clone(), v * scale)).collect(), wm.lambda);
            let (psi, defect) = pmmatch_defect(&crate::field::Reals, (plus, &wp), (minus, &wm))?;
            if defect <= eps {
                out.push(MatchedPair {
                    plus: wp,
                    minus: wm,
                    psi,
                    defect,
                });
            }
        }
    }
    Ok(out)
}

/// Verify `g = 1`, `lambda = 1/q^2` on both sector graphs and the matching condition, exactly.
pub fn constant_pair_check(sg: &SectorGraphs, q: usize) -> Result<bool> {
    let wp = constant_weight(&sg.plus, q);
    let wm = constant_weight(&sg.minus, q);
    let ok_p = verify_graph_weight(&Rationals, &sg.plus, &wp, 0.0)?.passed();
    let ok_m = verify_graph_weight(&Rationals, &sg.minus, &wm, 0.0)?.passed();
    let (_, defect) = pmmatch_defect(&Rationals, (&sg.plus, &wp), (&sg.minus, &wm))?;
    Ok(ok_p && ok_m && defect.is_zero())
}

/// How `g~(u)` decays with the shape `m = (m1, m2)` of `u`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecayLaw {
    /// `q^{-(m1 + m2)}`.
    LinearExponent,
    /// `q^{-2(m1 + m2)}`.
    DoubledExponent,
    /// `q^{-m1}`.
    FirstAxisOnly,
}

impl DecayLaw {
    pub fn factor(self, q: usize, (m1, m2): (usize, usize)) -> BigRational {
        let e = match self {
            DecayLaw::LinearExponent => m1 + m2,
            DecayLaw::DoubledExponent => 2 * (m1 + m2),
            DecayLaw::FirstAxisOnly => m1,
        };
        BigRational::new(BigInt::one(), BigInt::from(q).pow(e as u32))
    }
}

impl fmt::Display for DecayLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DecayLaw::LinearExponent => "q^-(m1+m2)",
            DecayLaw::DoubledExponent => "q^-2(m1+m2)",
            DecayLaw::FirstAxisOnly => "q^-m1",
        })
    }
}

/// Words of shape `m <= bound` over base letters; a word of shape `m` has
/// `q^2` extensions of shape `m + e_i` in each direction, all with the same
/// origin letter.
#[derive(Clone, Debug, PartialEq)]
pub struct ShapeLattice {
    pub q: usize,
    pub bound: (usize, usize),
    pub law: DecayLaw,
    pub base: BTreeMap<String, BigRational>,
}

impl ShapeLattice {
    pub fn new(q: usize, bound: (usize, usize), law: DecayLaw, base: BTreeMap<String, BigRational>) -> Result<Self> {
        if let Some((k, _)) = base.iter().find(|(_, v)| !v.is_positive()) {
            return Err(Error::NonpositiveBase(k.clone()));
        }
        Ok(ShapeLattice { q, bound, law, base })
    }

    pub fn value(&self, letter: &str, m: (usize, usize)) -> Option<BigRational> {
        self.base.get(letter).map(|b| b * self.law.factor(self.q, m))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LatticeResidual {
    pub letter: String,
    pub shape: (usize, usize),
    pub direction: usize,
    pub residual: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LatticeReport {
    pub q: usize,
    pub bound: (usize, usize),
    pub law: DecayLaw,
    pub nodes_checked: usize,
    /// Nonzero residuals per direction.
    pub nonzero: [usize; 2],
    pub max_residual: f64,
    pub worst: Option<LatticeResidual>,
    pub passed: bool,
}

/// Check `g~(u) = sum over the q^2 extensions uw in direction i of g~(uw)`
/// at every node whose extensions stay within the bound, for `i = 1, 2`.
pub fn lattice_weight_check(lattice: &ShapeLattice) -> LatticeReport {
    let q2 = lattice.q * lattice.q;
    let (b1, b2) = lattice.bound;
    let mut nonzero = [0usize; 2];
    let mut checked = 0;
    let mut max = BigRational::zero();
    let mut worst = None;
    for letter in lattice.base.keys() {
        for m1 in 0..=b1 {
            for m2 in 0..=b2 {
                let here = lattice.value(letter, (m1, m2)).expect("letter from base");
                for (dir, next) in [(1, (m1 + 1, m2)), (2, (m1, m2 + 1))] {
                    if next.0 > b1 || next.1 > b2 {
                        continue;
                    }
                    checked += 1;
                    let child = lattice.value(letter, next).expect("letter from base");
                    let total: BigRational = (0..q2).map(|_| child.clone()).sum();
                    let r = &here - total;
                    if !r.is_zero() {
                        nonzero[dir - 1] += 1;
                    }
                    if r.abs() > max || (worst.is_none() && !r.is_zero()) {
                        max = r.abs();
                        worst = Some(LatticeResidual {
                            letter: letter.clone(),
                            shape: (m1, m2),
                            direction: dir,
                            residual: r.to_string(),
                        });
                    }
                }
            }
        }
    }
    LatticeReport {
        q: lattice.q,
        bound: lattice.bound,
        law: lattice.law,
        nodes_checked: checked,
        nonzero,
        max_residual: max.to_f64().unwrap_or(f64::INFINITY),
        worst,
        passed: nonzero == [0, 0],
    }
}
