//! File formats: scalar strings, weight files and structure files.
//!
//! Scalars are strings. An integer or `p/q` is exact; anything else is a
//! decimal read as `f64`. Floats are written in shortest round-trip form and
//! rational values as `p/q`, so output is byte-stable across platforms.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::a2::TrianglePresentation;
use crate::complex::Oriented2Complex;
use crate::cw::{CwMode, Rank2Weight, TriangularWeight};
use crate::error::{Error, Result};
use crate::field::{Field, NumberField};
use crate::graph::DirectedGraph;
use crate::poly::QPoly;
use crate::roots::AlgebraicScalar;
use crate::splice::AmalgamSpec;
use crate::weight::GraphWeight;

#[derive(Clone, Debug, PartialEq)]
pub struct Scalar {
    pub value: f64,
    pub exact: Option<BigRational>,
}

pub fn parse_scalar(s: &str) -> Result<Scalar> {
    let t = s.trim();
    let bad = || Error::Parse(s.to_string());
    let exact = if let Some((p, q)) = t.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        Some(BigRational::new(p, q))
    } else {
        t.parse::<BigInt>().ok().map(BigRational::from_integer)
    };
    let value = match &exact {
        Some(q) => q.to_f64().ok_or_else(bad)?,
        None => t.parse::<f64>().map_err(|_| bad())?,
    };
    if !value.is_finite() {
        return Err(bad());
    }
    Ok(Scalar { value, exact })
}

pub fn format_f64(x: f64) -> String {
    let a = x.abs();
    if a != 0.0 && !(1e-6..1e16).contains(&a) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

pub fn format_rational(q: &BigRational) -> String {
    q.to_string()
}

/// `p/q` when `exact` is present, else the decimal form of `approx`.
pub fn format_value(approx: f64, exact: Option<&BigRational>) -> String {
    exact.map_or_else(|| format_f64(approx), format_rational)
}

/// An element of `Q(eta)`: rational form when it is rational, else decimal.
pub fn format_field_elem(k: &NumberField, e: &QPoly) -> String {
    format_value(k.to_f64(e), k.as_rational(e).as_ref())
}

/// Value, and either the exact rational or the defining polynomial with an
/// isolating interval.
pub fn algebraic_json(a: &AlgebraicScalar) -> Value {
    match a {
        AlgebraicScalar::Rational(q) => json!({ "value": format_f64(a.to_f64()), "exact": format_rational(q) }),
        AlgebraicScalar::Root(r) => {
            let (lo, hi) = r.interval();
            json!({
                "value": format_f64(a.to_f64()),
                "polynomial": r.poly().display_in("x"),
                "interval": [format_rational(lo), format_rational(hi)],
                "width": format_f64(r.width().to_f64().unwrap_or(f64::NAN)),
            })
        }
    }
}

pub fn poly_json(p: &QPoly, var: &str) -> Value {
    json!({
        "display": p.display_in(var),
        "coefficients": p.coeffs().iter().map(format_rational).collect::<Vec<_>>(),
    })
}

/// Decimal coefficients, for polynomials whose rational coefficients are
/// themselves approximations.
pub fn poly_json_approx(p: &QPoly, var: &str) -> Value {
    let coeffs: Vec<f64> = p.coeffs().iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect();
    let mut display = String::new();
    for (k, c) in coeffs.iter().enumerate().filter(|(_, c)| **c != 0.0) {
        let sign = if *c < 0.0 { "-" } else { "+" };
        if display.is_empty() {
            if *c < 0.0 {
                display.push('-');
            }
        } else {
            display.push_str(&format!(" {sign} "));
        }
        display.push_str(&format_f64(c.abs()));
        if k > 0 {
            display.push_str(&format!("*{var}"));
        }
        if k > 1 {
            display.push_str(&format!("^{k}"));
        }
    }
    json!({
        "display": if display.is_empty() { "0".to_string() } else { display },
        "coefficients": coeffs.iter().map(|c| format_f64(*c)).collect::<Vec<_>>(),
    })
}

type StrMap = BTreeMap<String, String>;

/// Weight file: any subset of the vertex, edge and face functions.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightFile {
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub g: StrMap,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub lambda: StrMap,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub lambda_tilde: StrMap,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub eta: StrMap,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub eta_incidence: StrMap,
    #[serde(default, rename = "eta_A", skip_serializing_if = "BTreeMap::is_empty")]
    pub eta_a: StrMap,
    #[serde(default, rename = "eta_B", skip_serializing_if = "BTreeMap::is_empty")]
    pub eta_b: StrMap,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<CwMode>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub free_parameters: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WeightKind {
    Graph,
    Rank2,
    Triangular,
}

fn parse_map(m: &StrMap) -> Result<BTreeMap<String, Scalar>> {
    m.iter().map(|(k, v)| Ok((k.clone(), parse_scalar(v)?))).collect()
}

fn floats(m: &StrMap) -> Result<BTreeMap<String, f64>> {
    Ok(parse_map(m)?.into_iter().map(|(k, s)| (k, s.value)).collect())
}

fn rationals(m: &StrMap) -> Result<Option<BTreeMap<String, BigRational>>> {
    Ok(parse_map(m)?.into_iter().map(|(k, s)| s.exact.map(|q| (k, q))).collect())
}

fn strings<T>(m: &BTreeMap<String, T>, f: impl Fn(&T) -> String) -> StrMap {
    m.iter().map(|(k, v)| (k.clone(), f(v))).collect()
}

impl WeightFile {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn kind(&self) -> WeightKind {
        if !self.eta_a.is_empty() || !self.eta_b.is_empty() {
            WeightKind::Triangular
        } else if !self.lambda_tilde.is_empty() || !self.eta.is_empty() || !self.eta_incidence.is_empty() {
            WeightKind::Rank2
        } else {
            WeightKind::Graph
        }
    }

    /// Every value written as an integer or `p/q`.
    pub fn is_exact(&self) -> Result<bool> {
        for m in self.maps() {
            if rationals(m)?.is_none() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn maps(&self) -> [&StrMap; 7] {
        [
            &self.g,
            &self.lambda,
            &self.lambda_tilde,
            &self.eta,
            &self.eta_incidence,
            &self.eta_a,
            &self.eta_b,
        ]
    }

    pub fn graph_f64(&self) -> Result<GraphWeight<f64>> {
        Ok(GraphWeight::new(floats(&self.g)?, floats(&self.lambda)?))
    }

    pub fn graph_exact(&self) -> Result<Option<GraphWeight<BigRational>>> {
        Ok(rationals(&self.g)?.zip(rationals(&self.lambda)?).map(|(g, l)| GraphWeight::new(g, l)))
    }

    fn rank2_with<T: Clone>(&self, conv: impl Fn(&StrMap) -> Result<Option<BTreeMap<String, T>>>) -> Result<Option<Rank2Weight<T>>> {
        let (Some(g), Some(lt), Some(l), Some(eta), Some(inc)) = (
            conv(&self.g)?,
            conv(&self.lambda_tilde)?,
            conv(&self.lambda)?,
            conv(&self.eta)?,
            conv(&self.eta_incidence)?,
        ) else {
            return Ok(None);
        };
        let mut w = Rank2Weight::new(g, lt, l, eta, self.mode.unwrap_or(CwMode::Rank2));
        w.eta_incidence = inc;
        Ok(Some(w))
    }

    /// Missing `mode` means no coupling is checked.
    pub fn rank2_f64(&self) -> Result<Rank2Weight<f64>> {
        Ok(self.rank2_with(|m| floats(m).map(Some))?.expect("float conversion is total"))
    }

    pub fn rank2_exact(&self) -> Result<Option<Rank2Weight<BigRational>>> {
        self.rank2_with(rationals)
    }

    fn triangular_with<T: Clone>(
        &self,
        conv: impl Fn(&StrMap) -> Result<Option<BTreeMap<String, T>>>,
    ) -> Result<Option<TriangularWeight<T>>> {
        let (Some(g), Some(lt), Some(l), Some(ea), Some(eb)) = (
            conv(&self.g)?,
            conv(&self.lambda_tilde)?,
            conv(&self.lambda)?,
            conv(&self.eta_a)?,
            conv(&self.eta_b)?,
        ) else {
            return Ok(None);
        };
        Ok(Some(TriangularWeight {
            g,
            lambda_tilde: lt,
            lambda: l,
            eta_a: ea,
            eta_b: eb,
            tight: self.mode == Some(CwMode::Tight),
        }))
    }

    /// `mode: tight_2dcw` switches on the tightness check.
    pub fn triangular_f64(&self) -> Result<TriangularWeight<f64>> {
        Ok(self.triangular_with(|m| floats(m).map(Some))?.expect("float conversion is total"))
    }

    pub fn triangular_exact(&self) -> Result<Option<TriangularWeight<BigRational>>> {
        self.triangular_with(rationals)
    }

    pub fn from_graph(w: &GraphWeight<f64>) -> Self {
        Self::from_graph_by(w, |x| format_f64(*x))
    }

    pub fn from_rank2(w: &Rank2Weight<f64>) -> Self {
        Self::from_rank2_by(w, |x| format_f64(*x))
    }

    pub fn from_triangular(w: &TriangularWeight<f64>) -> Self {
        Self::from_triangular_by(w, |x| format_f64(*x))
    }

    pub fn from_graph_by<T>(w: &GraphWeight<T>, fmt: impl Fn(&T) -> String) -> Self {
        WeightFile {
            g: strings(&w.g, &fmt),
            lambda: strings(&w.lambda, &fmt),
            ..Default::default()
        }
    }

    pub fn from_rank2_by<T>(w: &Rank2Weight<T>, fmt: impl Fn(&T) -> String) -> Self {
        WeightFile {
            g: strings(&w.g, &fmt),
            lambda: strings(&w.lambda, &fmt),
            lambda_tilde: strings(&w.lambda_tilde, &fmt),
            eta: strings(&w.eta, &fmt),
            eta_incidence: strings(&w.eta_incidence, &fmt),
            mode: Some(w.mode),
            ..Default::default()
        }
    }

    pub fn from_triangular_by<T>(w: &TriangularWeight<T>, fmt: impl Fn(&T) -> String) -> Self {
        WeightFile {
            g: strings(&w.g, &fmt),
            lambda: strings(&w.lambda, &fmt),
            lambda_tilde: strings(&w.lambda_tilde, &fmt),
            eta_a: strings(&w.eta_a, &fmt),
            eta_b: strings(&w.eta_b, &fmt),
            mode: Some(if w.tight { CwMode::Tight } else { CwMode::Standard }),
            ..Default::default()
        }
    }

    /// Replace every value that is rational in `k` by its `p/q` form.
    pub fn with_exact_rank2(mut self, k: &NumberField, w: &Rank2Weight<QPoly>) -> Self {
        for (dst, src) in [
            (&mut self.g, &w.g),
            (&mut self.lambda, &w.lambda),
            (&mut self.lambda_tilde, &w.lambda_tilde),
            (&mut self.eta, &w.eta),
            (&mut self.eta_incidence, &w.eta_incidence),
        ] {
            overwrite_rational(dst, k, src);
        }
        self
    }

    pub fn with_exact_triangular(mut self, k: &NumberField, w: &TriangularWeight<QPoly>) -> Self {
        for (dst, src) in [
            (&mut self.g, &w.g),
            (&mut self.lambda, &w.lambda),
            (&mut self.lambda_tilde, &w.lambda_tilde),
            (&mut self.eta_a, &w.eta_a),
            (&mut self.eta_b, &w.eta_b),
        ] {
            overwrite_rational(dst, k, src);
        }
        self
    }

    pub fn with_exact_graph(mut self, k: &NumberField, w: &GraphWeight<QPoly>) -> Self {
        overwrite_rational(&mut self.g, k, &w.g);
        overwrite_rational(&mut self.lambda, k, &w.lambda);
        self
    }
}

fn overwrite_rational(dst: &mut StrMap, k: &NumberField, src: &BTreeMap<String, QPoly>) {
    for (id, e) in src {
        if let Some(q) = k.as_rational(e) {
            dst.insert(id.clone(), format_rational(&q));
        }
    }
}

/// Any of the structure file formats, told apart by their keys.
#[derive(Clone, Debug)]
pub enum Structure {
    Graph(DirectedGraph),
    Complex(Oriented2Complex),
    Presentation(TrianglePresentation),
    Amalgam(AmalgamSpec),
}

impl Structure {
    pub fn parse(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text)?;
        let obj = v
            .as_object()
            .ok_or_else(|| Error::Parse("structure file must be a JSON object".into()))?;
        Ok(if obj.contains_key("pieces") {
            Structure::Amalgam(serde_json::from_value(v)?)
        } else if obj.contains_key("triples") {
            Structure::Presentation(serde_json::from_value(v)?)
        } else if obj.contains_key("faces") {
            Structure::Complex(serde_json::from_value(v)?)
        } else if obj.contains_key("vertices") {
            Structure::Graph(serde_json::from_value(v)?)
        } else {
            return Err(Error::Parse(
                "not a graph, complex, presentation or amalgam (expected one of the keys vertices, faces, triples, pieces)".into(),
            ));
        })
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Structure::Graph(_) => "graph",
            Structure::Complex(_) => "complex",
            Structure::Presentation(_) => "presentation",
            Structure::Amalgam(_) => "amalgam",
        }
    }

    pub fn to_json(&self) -> Value {
        let v = match self {
            Structure::Graph(g) => serde_json::to_value(g),
            Structure::Complex(c) => serde_json::to_value(c),
            Structure::Presentation(p) => serde_json::to_value(p),
            Structure::Amalgam(a) => serde_json::to_value(a),
        };
        v.expect("structures serialise")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::poly::rat;

    #[test]
    fn scalar_forms() {
        assert_eq!(parse_scalar("1/3").unwrap().exact, Some(rat(1, 3)));
        assert_eq!(parse_scalar(" -4 ").unwrap().exact, Some(rat(-4, 1)));
        let d = parse_scalar("0.6478").unwrap();
        assert_eq!(d.exact, None);
        assert_eq!(d.value, 0.6478);
        assert_eq!(parse_scalar("2.5e-3").unwrap().value, 2.5e-3);
        for bad in ["", "1/0", "x", "nan", "inf", "1/2/3"] {
            assert!(parse_scalar(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn float_format_round_trips() {
        for x in [0.0, 1.0, 0.1, 1.0 / 3.0, 0.819172513396164, 1e-9, 3.5e20, -2.25] {
            let s = format_f64(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
        assert_eq!(format_f64(0.5), "0.5");
        assert_eq!(format_rational(&rat(2, 6)), "1/3");
    }

    #[test]
    fn weight_file_round_trip() {
        let text = r#"{"g":{"v":"1"},"lambda":{"e":"1/2"},"eta":{"s":"0.25"},"mode":"standard_2dcw"}"#;
        let w = WeightFile::parse(text).unwrap();
        assert_eq!(w.kind(), WeightKind::Rank2);
        assert!(!w.is_exact().unwrap());
        let r = w.rank2_f64().unwrap();
        assert_eq!(r.mode, CwMode::Standard);
        assert_eq!(r.eta["s"], 0.25);
        assert_eq!(serde_json::to_string(&w).unwrap(), text);
        let t = WeightFile::parse(r#"{"g":{"v":"1"},"eta_A":{"s":"1/3"},"eta_B":{"s":"1/3"}}"#).unwrap();
        assert_eq!(t.kind(), WeightKind::Triangular);
        assert!(t.is_exact().unwrap());
        assert!(WeightFile::parse(r#"{"gg":{}}"#).is_err());
    }

    #[test]
    fn structures_by_key() {
        let c = Structure::Complex(fixtures::figb());
        let back = Structure::parse(&c.to_json().to_string()).unwrap();
        assert_eq!(back.kind(), "complex");
        let g = Structure::Graph(fixtures::figb_skeleton());
        assert_eq!(Structure::parse(&g.to_json().to_string()).unwrap().kind(), "graph");
        let p = Structure::Presentation(fixtures::gamma_q2());
        assert_eq!(Structure::parse(&p.to_json().to_string()).unwrap().kind(), "presentation");
        let a = Structure::Amalgam(fixtures::figb_amalgam());
        assert_eq!(Structure::parse(&a.to_json().to_string()).unwrap().kind(), "amalgam");
        assert!(Structure::parse("[1]").is_err());
        assert!(Structure::parse(r#"{"x":1}"#).is_err());
    }
}
