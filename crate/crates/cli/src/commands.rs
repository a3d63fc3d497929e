//! One function per subcommand. Each returns either a raw structure (JSON
//! printed as is) or report results with a pass flag.

use std::collections::BTreeMap;
use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};

use kms_weights::a2::{
    constant_pair_check, is_range_regular, lattice_weight_check, matched_weight_search, presentation_complex,
    sector_graphs, DecayLaw, ShapeLattice, ThirdLetterRule, TrianglePresentation,
};
use kms_weights::complex::Oriented2Complex;
use kms_weights::cw::{
    solve_2dcw, solve_triangular_special, verify_rank2, verify_triangular, CwMode, Rank2Report, Rank2Weight,
    TriangularReport,
};
use kms_weights::field::{Rationals, Reals};
use kms_weights::fixtures::{fixture, FIXTURE_NAMES};
use kms_weights::graph::DirectedGraph;
use kms_weights::io::{algebraic_json, format_f64, format_rational, parse_scalar, poly_json, poly_json_approx, Structure, WeightFile, WeightKind};
use kms_weights::path_algebra::{
    enumerate_monomials, gauge_check, graph_pairs, kms_check, kms_check_rank2, GaugeReport, KmsReport, Monomial,
    WeightFunctional,
};
use kms_weights::splice::{build_amalgam, splice_cw_weights};
use kms_weights::weight::{
    solve_special_weights, verify_graph_weight, EquationCheck, PositiveKernel, WeightReport,
};
use kms_weights::Error;
use num_complex::Complex64;
use num_rational::BigRational;
use serde_json::{json, Value};

pub enum CliError {
    Input(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Input(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

fn input_error<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Input(msg.into()))
}

pub enum Output {
    Raw(Value),
    Report { results: Value, passed: bool },
}

pub struct Settings {
    pub tol: f64,
    pub eps: f64,
    pub beta_sign: i8,
}

/// Global settings plus every input text read so far, for the digest.
pub struct Ctx {
    pub settings: Settings,
    pub inputs: Vec<String>,
    stdin_used: bool,
}

impl Ctx {
    pub fn new(settings: Settings) -> Self {
        Ctx {
            settings,
            inputs: Vec::new(),
            stdin_used: false,
        }
    }

    /// Read a file, or standard input for `None` and `-`.
    fn read(&mut self, path: Option<&Path>) -> CliResult<String> {
        let text = match path.filter(|p| p.as_os_str() != "-") {
            Some(p) => fs::read_to_string(p).map_err(|e| CliError::Input(format!("{}: {e}", p.display())))?,
            None => {
                if self.stdin_used {
                    return input_error("standard input can supply only one input");
                }
                self.stdin_used = true;
                let mut s = String::new();
                std::io::stdin()
                    .read_to_string(&mut s)
                    .map_err(|e| CliError::Input(format!("standard input: {e}")))?;
                s
            }
        };
        self.inputs.push(text.clone());
        Ok(text)
    }

    fn structure(&mut self, path: Option<&Path>) -> CliResult<Structure> {
        let text = self.read(path)?;
        Ok(Structure::parse(&text)?)
    }

    fn weight(&mut self, path: Option<&Path>) -> CliResult<WeightFile> {
        let text = self.read(path)?;
        Ok(WeightFile::parse(&text)?)
    }
}

fn complex_of(s: Structure, command: &str) -> CliResult<Oriented2Complex> {
    match s {
        Structure::Complex(c) => Ok(c),
        Structure::Presentation(p) => Ok(presentation_complex(&p)?),
        other => input_error(format!("{command} needs a complex, got a {}", other.kind())),
    }
}

fn presentation_of(s: Structure, command: &str) -> CliResult<TrianglePresentation> {
    match s {
        Structure::Presentation(p) => Ok(p),
        other => input_error(format!("{command} needs a presentation, got a {}", other.kind())),
    }
}

fn emit(path: Option<&PathBuf>, w: Option<&WeightFile>) -> CliResult<()> {
    let Some(path) = path else { return Ok(()) };
    let Some(w) = w else {
        return input_error("no faithful weight to write");
    };
    let text = serde_json::to_string_pretty(w).expect("weight files serialise") + "\n";
    fs::write(path, text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn check_json(c: &EquationCheck) -> Value {
    let worst = c
        .residuals
        .iter()
        .fold(None::<&kms_weights::weight::Residual>, |w, r| match w {
            Some(w) if w.value >= r.value => Some(w),
            _ => Some(r),
        })
        .map(|r| r.id.clone());
    json!({
        "equations": c.residuals.len(),
        "max_residual": format_f64(c.max_residual),
        "worst": worst,
        "passed": c.passed,
    })
}

fn graph_report_json(r: &WeightReport) -> Value {
    json!({
        "equation": check_json(&r.check),
        "faithful": r.faithful,
        "special": r.special,
        "passed": r.passed(),
    })
}

fn rank2_json(r: &Rank2Report) -> Value {
    json!({
        "skeleton": check_json(&r.skeleton),
        "boundary": check_json(&r.boundary),
        "coupling": r.coupling.as_ref().map(check_json),
        "faithful": r.faithful,
        "special": r.special,
        "passed": r.passed,
    })
}

fn triangular_json(r: &TriangularReport) -> Value {
    json!({
        "skeleton": check_json(&r.skeleton),
        "follower": check_json(&r.follower),
        "predecessor": check_json(&r.predecessor),
        "tightness": r.tightness.as_ref().map(check_json),
        "faithful": r.faithful,
        "special": r.special,
        "passed": r.passed,
    })
}

fn kernel_json(k: &PositiveKernel, ids: &[String]) -> Value {
    json!({
        "dimension": k.basis.len(),
        "status": k.status,
        "vector": k.vector.as_ref().map(|v| {
            ids.iter().cloned().zip(v.iter().map(|x| format_f64(*x))).collect::<BTreeMap<_, _>>()
        }),
    })
}

fn kms_json(r: &KmsReport) -> Value {
    json!({
        "pairs_checked": r.pairs_checked,
        "max_discrepancy": format_f64(r.max_discrepancy),
        "worst": r.worst.as_ref().map(|w| json!({
            "x": w.x,
            "y": w.y,
            "lhs": format_f64(w.lhs),
            "rhs": format_f64(w.rhs),
        })),
        "passed": r.passed,
    })
}

fn gauge_json(r: &GaugeReport) -> Value {
    json!({
        "monomials_checked": r.monomials_checked,
        "violations": r.violations,
        "max_discrepancy": format_f64(r.max_discrepancy),
        "passed": r.passed,
    })
}

fn mode_name(m: CwMode) -> Value {
    serde_json::to_value(m).expect("modes serialise")
}

pub fn boundary_graph(ctx: &mut Ctx, input: Option<&Path>) -> CliResult<Output> {
    let c = complex_of(ctx.structure(input)?, "boundary-graph")?;
    Ok(Output::Raw(serde_json::to_value(c.boundary_graph().graph).expect("graphs serialise")))
}

pub fn solve_graph(ctx: &mut Ctx, input: Option<&Path>, boundary: bool, emit_to: Option<&PathBuf>) -> CliResult<Output> {
    let (graph, source) = match ctx.structure(input)? {
        Structure::Graph(_) if boundary => return input_error("--boundary needs a complex"),
        Structure::Graph(g) => (g, "graph"),
        Structure::Complex(c) if boundary => (c.boundary_graph().graph, "boundary graph"),
        Structure::Complex(c) => (c.skeleton().clone(), "1-skeleton"),
        other => return input_error(format!("solve-graph needs a graph or complex, got a {}", other.kind())),
    };
    let Settings { tol, eps, .. } = ctx.settings;
    let sol = solve_special_weights(&graph, eps)?;
    let mut passed = true;
    let mut first = None;
    let mut families = Vec::new();
    for fam in &sol.families {
        let mut v = json!({
            "eta": algebraic_json(fam.field.root()),
            "kernel": kernel_json(&fam.kernel, graph.vertices()),
            "faithful": fam.faithful,
        });
        if let (true, Some(w)) = (fam.faithful, fam.weight_f64(&graph, 1.0)) {
            let float = verify_graph_weight(&Reals, &graph, &w, tol)?;
            let mut file = WeightFile::from_graph(&w);
            let mut exact = Value::Null;
            if let Some(e) = fam.weight_exact(&graph) {
                let rep = verify_graph_weight(&fam.field, &graph, &e, tol)?;
                passed &= rep.passed();
                exact = graph_report_json(&rep);
                file = file.with_exact_graph(&fam.field, &e);
            }
            passed &= float.passed();
            v["weight"] = serde_json::to_value(&file).expect("weight files serialise");
            v["check"] = json!({ "float": graph_report_json(&float), "exact": exact });
            first.get_or_insert(file);
        }
        families.push(v);
    }
    emit(emit_to, first.as_ref())?;
    Ok(Output::Report {
        results: json!({
            "source": source,
            "vertices": graph.vertices(),
            "det": poly_json(&sol.det, "eta"),
            "reduced_det": poly_json(&sol.reduced_det, "eta"),
            "sinks": sol.sinks,
            "unconstrained": sol.unconstrained,
            "families": families,
            "faithful_families": sol.faithful_families().count(),
        }),
        passed,
    })
}

pub fn solve_cw(
    ctx: &mut Ctx,
    input: Option<&Path>,
    mode: CwMode,
    special: bool,
    emit_to: Option<&PathBuf>,
) -> CliResult<Output> {
    let c = complex_of(ctx.structure(input)?, "solve-cw")?;
    let Settings { tol, eps, .. } = ctx.settings;
    let sol = solve_2dcw(&c, mode, special, eps)?;
    let bverts = c.boundary_graph().graph.vertices().to_vec();
    let mut passed = true;
    let mut first = None;
    let mut families = Vec::new();
    for fam in &sol.families {
        let mut solutions = Vec::new();
        for s in &fam.solutions {
            let float = verify_rank2(&Reals, &c, &s.weight, tol)?;
            let mut file = WeightFile::from_rank2(&s.weight);
            file.free_parameters = s.free_parameters.clone();
            let mut exact = Value::Null;
            if let Some(e) = &s.exact {
                let rep = verify_rank2(&fam.field, &c, e, tol)?;
                if s.faithful {
                    passed &= rep.passed;
                }
                exact = rank2_json(&rep);
                file = file.with_exact_rank2(&fam.field, e);
            }
            if s.faithful {
                passed &= float.passed;
                first.get_or_insert(file.clone());
            }
            solutions.push(json!({
                "weight": file,
                "faithful": s.faithful,
                "scale": s.scale.as_ref().map(|r| json!({
                    "value": format_f64(r.value),
                    "exact": r.exact.as_ref().map(algebraic_json),
                })),
                "check": { "float": rank2_json(&float), "exact": exact },
            }));
        }
        families.push(json!({
            "eta": algebraic_json(fam.field.root()),
            "kernel": kernel_json(&fam.kernel, &bverts),
            "scale_polynomial": fam.scale_polynomial.as_ref().map(|p| json!({
                "polynomial": if p.exact { poly_json(&p.rational, "C") } else { poly_json_approx(&p.rational, "C") },
                "coefficients_in_eta": p.coefficients.iter().map(|c| c.display_in("eta")).collect::<Vec<_>>(),
                "exact": p.exact,
            })),
            "faithful": fam.faithful(),
            "solutions": solutions,
        }));
    }
    emit(emit_to, first.as_ref())?;
    Ok(Output::Report {
        results: json!({
            "mode": mode_name(mode),
            "special": special,
            "boundary": {
                "det": poly_json(&sol.boundary.det, "eta"),
                "reduced_det": poly_json(&sol.boundary.reduced_det, "eta"),
                "sinks": sol.boundary.sinks,
            },
            "families": families,
            "faithful_families": sol.faithful_families().count(),
            "diagnostics": sol.diagnostics,
        }),
        passed,
    })
}

pub fn solve_triangular(ctx: &mut Ctx, input: Option<&Path>, mode: CwMode, emit_to: Option<&PathBuf>) -> CliResult<Output> {
    let c = complex_of(ctx.structure(input)?, "solve-triangular")?;
    let Settings { tol, eps, .. } = ctx.settings;
    let sol = solve_triangular_special(&c, mode, eps)?;
    let mut passed = true;
    let mut first = None;
    let mut families = Vec::new();
    for fam in &sol.families {
        let mut solutions = Vec::new();
        for s in &fam.solutions {
            let float = verify_triangular(&Reals, &c, &s.weight, tol)?;
            let mut file = WeightFile::from_triangular(&s.weight);
            file.free_parameters = s.free_parameters.clone();
            let mut exact = Value::Null;
            if let Some(e) = &s.exact {
                let rep = verify_triangular(&fam.field, &c, e, tol)?;
                if s.faithful {
                    passed &= rep.passed;
                }
                exact = triangular_json(&rep);
                file = file.with_exact_triangular(&fam.field, e);
            }
            if s.faithful {
                passed &= float.passed;
                first.get_or_insert(file.clone());
            }
            solutions.push(json!({
                "weight": file,
                "faithful": s.faithful,
                "check": { "float": triangular_json(&float), "exact": exact },
            }));
        }
        families.push(json!({
            "eta": algebraic_json(fam.field.root()),
            "kernel": kernel_json(&fam.kernel, c.skeleton().edges().iter().map(|e| e.id.clone()).collect::<Vec<_>>().as_slice()),
            "faithful": fam.faithful(),
            "solutions": solutions,
        }));
    }
    emit(emit_to, first.as_ref())?;
    Ok(Output::Report {
        results: json!({
            "mode": mode_name(mode),
            "det_a": poly_json(&sol.det_a, "eta"),
            "det_b": poly_json(&sol.det_b, "eta"),
            "determinants_agree": sol.det_a == sol.det_b,
            "families": families,
            "faithful_families": sol.faithful_families().count(),
            "diagnostics": sol.diagnostics,
        }),
        passed,
    })
}

pub fn verify(ctx: &mut Ctx, structure: &Path, weight: Option<&Path>) -> CliResult<Output> {
    let s = ctx.structure(Some(structure))?;
    let w = ctx.weight(weight)?;
    let tol = ctx.settings.tol;
    let exact = w.is_exact()?;
    let arithmetic = if exact { "exact" } else { "float" };
    let (target, report, passed) = match (s, w.kind()) {
        (Structure::Graph(g), WeightKind::Graph) => {
            let rep = match w.graph_exact()? {
                Some(e) => verify_graph_weight(&Rationals, &g, &e, tol)?,
                None => verify_graph_weight(&Reals, &g, &w.graph_f64()?, tol)?,
            };
            ("graph", graph_report_json(&rep), rep.passed())
        }
        (Structure::Amalgam(a), WeightKind::Rank2) => {
            let am = build_amalgam(a)?;
            let rep = rank2_verify(&am.foundation, &w, tol)?;
            ("foundation", rank2_json(&rep), rep.passed)
        }
        (s @ (Structure::Complex(_) | Structure::Presentation(_)), WeightKind::Rank2) => {
            let c = complex_of(s, "verify")?;
            let rep = rank2_verify(&c, &w, tol)?;
            ("complex", rank2_json(&rep), rep.passed)
        }
        (s @ (Structure::Complex(_) | Structure::Presentation(_)), WeightKind::Triangular) => {
            let c = complex_of(s, "verify")?;
            let rep = match w.triangular_exact()? {
                Some(e) => verify_triangular(&Rationals, &c, &e, tol)?,
                None => verify_triangular(&Reals, &c, &w.triangular_f64()?, tol)?,
            };
            ("complex", triangular_json(&rep), rep.passed)
        }
        (s, k) => {
            return input_error(format!("cannot verify a {k:?} weight on a {}", s.kind()).to_lowercase());
        }
    };

    Ok(Output::Report {
        results: json!({
            "target": target,
            "kind": format!("{:?}", w.kind()).to_lowercase(),
            "arithmetic": arithmetic,
            "tol": format_f64(tol),
            "report": report,
        }),
        passed,
    })
}

fn rank2_verify(c: &Oriented2Complex, w: &WeightFile, tol: f64) -> CliResult<Rank2Report> {
    Ok(match w.rank2_exact()? {
        Some(e) => verify_rank2(&Rationals, c, &e, tol)?,
        None => verify_rank2(&Reals, c, &w.rank2_f64()?, tol)?,
    })
}

pub fn kms(ctx: &mut Ctx, structure: &Path, weight: Option<&Path>, max_len: usize, mixed: usize) -> CliResult<Output> {
    let s = ctx.structure(Some(structure))?;
    let w = ctx.weight(weight)?;
    let Settings { tol, beta_sign, .. } = ctx.settings;
    let (target, results, passed) = match (s, w.kind()) {
        (Structure::Graph(g), WeightKind::Graph) => {
            let psi = WeightFunctional::from_graph_weight(&g, &w.graph_f64()?, beta_sign)?;
            let k = kms_check(&psi, &graph_pairs(&g, max_len), tol)?;
            let sample: Vec<Monomial> = enumerate_monomials(&g, max_len).into_iter().map(Monomial::Graph).collect();
            let gauge = gauge_check(&psi, &sample, &[Complex64::i(), Complex64::from_polar(1.0, 1.0)], tol)?;
            let passed = k.passed && gauge.passed;
            ("graph", json!({ "kms": kms_json(&k), "gauge": gauge_json(&gauge) }), passed)
        }
        (s @ (Structure::Complex(_) | Structure::Presentation(_)), WeightKind::Rank2) => {
            let c = complex_of(s, "kms-check")?;
            let psi = WeightFunctional::from_rank2(&c, &w.rank2_f64()?, beta_sign)?;
            let k = kms_check_rank2(&psi, max_len, mixed, tol)?;
            ("complex", json!({ "kms": kms_json(&k) }), k.passed)
        }
        (s, k) => {
            return input_error(format!("kms-check needs a graph weight on a graph or a rank-2 weight on a complex, got a {k:?} weight on a {}", s.kind()));
        }
    };
    let mut results = results;
    results["target"] = json!(target);
    results["beta_sign"] = json!(beta_sign);
    results["max_path_len"] = json!(max_len);
    results["tol"] = json!(format_f64(tol));
    Ok(Output::Report { results, passed })
}

pub fn splice(ctx: &mut Ctx, input: Option<&Path>, weights: Option<&Path>, emit_to: Option<&PathBuf>) -> CliResult<Output> {
    let spec = match ctx.structure(input)? {
        Structure::Amalgam(a) => a,
        other => return input_error(format!("splice needs an amalgam, got a {}", other.kind())),
    };
    let Settings { tol, eps, .. } = ctx.settings;
    let am = build_amalgam(spec)?;
    let mut files = BTreeMap::new();
    let source = match weights {
        Some(dir) => {
            for piece in am.spec.pieces.keys() {
                let w = ctx.weight(Some(&dir.join(format!("{piece}.json"))))?;
                if w.kind() != WeightKind::Rank2 {
                    return input_error(format!("weight for piece `{piece}` is not a 2D CW weight"));
                }
                files.insert(piece.clone(), w);
            }
            "files"
        }
        None => {
            for (piece, c) in &am.spec.pieces {
                let sol = solve_2dcw(c, CwMode::Standard, true, eps)?;
                let Some(s) = sol.faithful_families().flat_map(|f| &f.solutions).find(|s| s.faithful) else {
                    return input_error(format!("piece `{piece}` has no faithful special 2D CW weight"));
                };
                files.insert(piece.clone(), WeightFile::from_rank2(&s.weight));
            }
            "solved"
        }
    };
    let exact: Option<BTreeMap<String, Rank2Weight<BigRational>>> = files
        .iter()
        .map(|(k, w)| Ok(w.rank2_exact()?.map(|e| (k.clone(), e))))
        .collect::<CliResult<Option<_>>>()?;
    let (file, report) = match exact {
        Some(ws) => {
            let s = splice_cw_weights(&Rationals, &am, &ws)?;
            let rep = verify_rank2(&Rationals, &am.foundation, &s, tol)?;
            (WeightFile::from_rank2_by(&s, format_rational), rep)
        }
        None => {
            let ws = files.iter().map(|(k, w)| Ok((k.clone(), w.rank2_f64()?))).collect::<CliResult<_>>()?;
            let s = splice_cw_weights(&Reals, &am, &ws)?;
            let rep = verify_rank2(&Reals, &am.foundation, &s, tol)?;
            (WeightFile::from_rank2(&s), rep)
        }
    };
    emit(emit_to, Some(&file))?;
    let f = &am.foundation;
    let b = f.boundary_graph().graph;
    Ok(Output::Report {
        results: json!({
            "foundation": {
                "vertices": f.skeleton().num_vertices(),
                "edges": f.skeleton().num_edges(),
                "faces": f.faces().len(),
                "boundary_graph": { "vertices": b.num_vertices(), "edges": b.num_edges() },
            },
            "shared_vertices": am.gluing.shared_vertices,
            "shared_edges": am.gluing.shared_edges,
            "weights": source,
            "arithmetic": if files.values().all(|w| w.is_exact().unwrap_or(false)) { "exact" } else { "float" },
            "weight": file,
            "check": rank2_json(&report),
        }),
        passed: report.passed,
    })
}

pub fn a2_complex(ctx: &mut Ctx, input: Option<&Path>) -> CliResult<Output> {
    let tp = presentation_of(ctx.structure(input)?, "a2 complex")?;
    Ok(Output::Raw(serde_json::to_value(presentation_complex(&tp)?).expect("complexes serialise")))
}

fn sector_json(g: &DirectedGraph) -> Value {
    let degrees: std::collections::BTreeSet<usize> = (0..g.num_vertices()).map(|v| g.out_edges(v).len()).collect();
    json!({
        "vertices": g.num_vertices(),
        "edges": g.num_edges(),
        "out_degrees": degrees,
        "range_regular": is_range_regular(g),
    })
}

pub fn a2_sectors(ctx: &mut Ctx, input: Option<&Path>, search: bool) -> CliResult<Output> {
    let tp = presentation_of(ctx.structure(input)?, "a2 sectors")?;
    let q = tp.plane().order();
    let sg = match sector_graphs(&tp, &ThirdLetterRule) {
        Ok(sg) => sg,
        Err(Error::AmbiguousSector(msg)) => {
            return Ok(Output::Report {
                results: json!({ "rule": "third-letter", "ambiguous": msg }),
                passed: false,
            })
        }
        Err(e) => return Err(e.into()),
    };
    let constant = constant_pair_check(&sg, q)?;
    let mut results = json!({
        "rule": sg.rule,
        "q": q,
        "plus": sector_json(&sg.plus),
        "minus": sector_json(&sg.minus),
        "constant_pair": {
            "g": "1",
            "lambda": format!("1/{}", q * q),
            "exact_match": constant,
        },
    });
    if search {
        let found = matched_weight_search(&sg.plus, &sg.minus, ctx.settings.tol)?;
        results["matched_pairs"] = found
            .iter()
            .map(|m| {
                let first = |w: &BTreeMap<String, f64>| w.values().next().map(|x| format_f64(*x));
                json!({
                    "lambda_plus": first(&m.plus.lambda),
                    "lambda_minus": first(&m.minus.lambda),
                    "defect": format_f64(m.defect),
                })
            })
            .collect();
    }
    Ok(Output::Report { results, passed: constant })
}

pub fn a2_lattice(q: usize, bound: (usize, usize), law: DecayLaw, base: &[String]) -> CliResult<Output> {
    let mut values = BTreeMap::new();
    for entry in base {
        let Some((k, v)) = entry.split_once('=') else {
            return input_error(format!("base entry `{entry}` is not of the form letter=value"));
        };
        let s = parse_scalar(v)?;
        let q = match s.exact {
            Some(q) => q,
            None => BigRational::from_float(s.value).ok_or_else(|| CliError::Input(format!("bad value `{v}`")))?,
        };
        values.insert(k.trim().to_string(), q);
    }
    if values.is_empty() {
        return input_error("no base values");
    }
    let r = lattice_weight_check(&ShapeLattice::new(q, bound, law, values)?);
    Ok(Output::Report {
        results: json!({
            "q": r.q,
            "bound": [r.bound.0, r.bound.1],
            "law": r.law,
            "formula": r.law.to_string(),
            "nodes_checked": r.nodes_checked,
            "nonzero": r.nonzero,
            "max_residual": format_f64(r.max_residual),
            "worst": r.worst.as_ref().map(|w| json!({
                "letter": w.letter,
                "shape": [w.shape.0, w.shape.1],
                "direction": w.direction,
                "residual": w.residual,
            })),
        }),
        passed: r.passed,
    })
}

pub fn fixtures(name: Option<&str>) -> CliResult<Output> {
    match name {
        None => Ok(Output::Raw(json!(FIXTURE_NAMES))),
        Some(n) => match fixture(n) {
            Some(s) => Ok(Output::Raw(s.to_json())),
            None => input_error(format!("unknown fixture `{n}`; known: {}", FIXTURE_NAMES.join(", "))),
        },
    }
}
