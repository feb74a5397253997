use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use uq_un1::compact::build_compact_rep;
use uq_un1::error::Error;
use uq_un1::intertwine::{intertwiner_recursive, intertwining_residual, leading_intertwiner, DiagonalIntertwiner};
use uq_un1::operator::GeneratorSet;
use uq_un1::principal::{build_principal, build_principal_in, PrincipalParams, WindowedRep};
use uq_un1::relations::{check_relations, gl_relations};
use uq_un1::scalar::QParam;
use uq_un1::star::{
    unitary_class_label, unitary_class_params, verify_form_positivity_label, verify_form_positivity_params,
    FormSign, PositivityReport, UnitaryClass,
};
use uq_un1::structure::{classify as classify_params, decompose, finite_dim_weight, normal_form, ConstituentKind, Lattice};
use uq_un1::tableau::{enumerate_tableaux, Window};

use crate::input::{format_complex, parse_weight, Target};
use crate::matrix_io::{self, Bundle};
use crate::{CliError, Common, Format};

/// Shared report shape of every command.
#[derive(Serialize)]
struct Envelope<'a> {
    command: &'a str,
    params: crate::input::RunConfig,
    timings: BTreeMap<&'static str, f64>,
    results: Value,
}

struct Clock {
    start: Instant,
    laps: BTreeMap<&'static str, f64>,
}

impl Clock {
    fn new() -> Self {
        Self {
            start: Instant::now(),
            laps: BTreeMap::new(),
        }
    }

    fn lap(&mut self, name: &'static str) {
        self.laps.insert(name, self.start.elapsed().as_secs_f64() * 1e3);
    }

    fn finish(mut self) -> BTreeMap<&'static str, f64> {
        self.lap("total_ms");
        self.laps
    }
}

fn emit(command: &str, common: &Common, clock: Clock, results: Value) {
    let env = Envelope {
        command,
        params: common.config(),
        timings: clock.finish(),
        results,
    };
    println!("{}", serde_json::to_string_pretty(&env).expect("reports serialize"));
}

fn principal(common: &Common, command: &str) -> Result<PrincipalParams, CliError> {
    match common.target()? {
        Target::Principal(p) => Ok(p),
        Target::Compact(_) => Err(CliError::Input(format!("{command} needs principal series parameters (--c1)"))),
    }
}

/// Generators together with the columns on which relations are checked.
fn representation(common: &Common, q: &QParam) -> Result<(GeneratorSet, Vec<usize>, Value), CliError> {
    match common.target()? {
        Target::Compact(hw) => {
            let rep = build_compact_rep(&hw, q)?;
            let cols = (0..rep.basis.len()).collect();
            let info = json!({ "kind": "compact", "weight": hw.entries() });
            Ok((rep.gens, cols, info))
        }
        Target::Principal(p) => {
            let rep = build_principal(&p, &common.window(), q)?;
            let cols = rep.interior_columns();
            let info = json!({
                "kind": "principal",
                "params": p.to_string(),
                "weights": rep.weights.len(),
                "interior": cols.len(),
            });
            Ok((rep.gens, cols, info))
        }
    }
}

pub fn enumerate(common: &Common, list: bool) -> Result<(), CliError> {
    let clock = Clock::new();
    let w = common
        .weight
        .as_deref()
        .ok_or_else(|| CliError::Input("enumerate needs --weight".into()))?;
    let hw = parse_weight(w)?;
    let patterns = enumerate_tableaux(&hw);
    if common.format == Some(Format::Json) {
        let listed: Option<Vec<String>> = list.then(|| patterns.iter().map(|p| p.to_string()).collect());
        emit("enumerate", common, clock, json!({ "count": patterns.len(), "patterns": listed }));
        return Ok(());
    }
    println!("count: {}", patterns.len());
    if list {
        for (k, p) in patterns.iter().enumerate() {
            println!("{k}: {p}");
        }
    }
    Ok(())
}

pub fn build(common: &Common) -> Result<(), CliError> {
    let mut clock = Clock::new();
    let q = common.q()?;
    let (gens, cols, mut info) = representation(common, &q)?;
    clock.lap("build_ms");
    let nnz: BTreeMap<String, usize> = gens.all().map(|(g, op)| (g.to_string(), op.nnz())).collect();
    info["dim"] = json!(gens.dim());
    info["rank"] = json!(gens.rank());
    info["checked_columns"] = json!(cols.len());
    info["nnz"] = json!(nnz);
    emit("build", common, clock, info);
    Ok(())
}

pub fn verify(common: &Common, from: Option<&Path>, sample: Option<usize>, corrupt: bool) -> Result<(), CliError> {
    let mut clock = Clock::new();
    let (mut gens, mut cols, q, mut info) = match from {
        Some(path) => {
            let bundle = matrix_io::read(path, common.q)?;
            let q = QParam::new(bundle.q).map_err(|e| CliError::Input(e.to_string()))?;
            let info = json!({ "kind": "imported", "path": path.display().to_string() });
            (bundle.gens, bundle.columns, q, info)
        }
        None => {
            let q = common.q()?;
            let (gens, cols, info) = representation(common, &q)?;
            (gens, cols, q, info)
        }
    };
    clock.lap("build_ms");
    if cols.is_empty() {
        return Err(Error::EmptyInterior.into());
    }
    if let Some(n) = sample {
        let mut rng = ChaCha8Rng::seed_from_u64(common.seed);
        cols = cols.choose_multiple(&mut rng, n.min(cols.len())).copied().collect();
        cols.sort_unstable();
    }
    if corrupt {
        let target = cols[0];
        gens.k[0] = gens.k[0].map_entries(|r, c, v| if r == target && c == target { v * 1.5 } else { v });
        info["corrupted"] = json!({ "generator": "k1", "entry": [target + 1, target + 1] });
    }
    let report = check_relations(&gens, &gl_relations(gens.rank(), &q), &cols, common.tol)?;
    clock.lap("verify_ms");
    let passed = report.passed;
    let max = report.max_residual;
    info["report"] = serde_json::to_value(&report).expect("reports serialize");
    emit("verify", common, clock, info);
    if passed {
        Ok(())
    } else {
        Err(CliError::Failed(format!("max residual {max:e} above {:e}", common.tol)))
    }
}

fn class_json(c: &UnitaryClass) -> Value {
    json!({ "class": c.class.to_string(), "witness": c.witness, "star": c.is_star() })
}

fn lattice_json(lattice: &Lattice, q: &QParam) -> Result<Value, CliError> {
    let mut nodes = Vec::new();
    for (i, node) in lattice.nodes.iter().enumerate() {
        let nf = normal_form(&node.label)?;
        let class = unitary_class_label(&node.label, q)?;
        let mut v = json!({
            "index": i,
            "label": node.label.to_string(),
            "carrier": node.carrier.to_string(),
            "kind": node.label.kind,
            "l": node.label.l,
            "normal_form": {
                "label": nf.label.to_string(),
                "rules": nf.chain.iter().map(|(r, _)| r.as_str()).collect::<Vec<_>>(),
            },
            "unitary": class_json(&class),
        });
        if let ConstituentKind::FiniteDim { .. } = node.label.kind {
            v["highest_weight"] = json!(finite_dim_weight(&node.label.l)?.entries());
        }
        nodes.push(v);
    }
    Ok(json!({
        "nodes": nodes,
        "edges": lattice.edges,
        "sums": lattice.sums,
        "chain": lattice.chain(),
    }))
}

pub fn classify(common: &Common, dot: bool) -> Result<(), CliError> {
    let mut clock = Clock::new();
    let q = common.q()?;
    let p = principal(common, "classify")?;
    let cls = classify_params(&p, &q)?;
    let lattice = if cls.case.is_reducible() { Some(decompose(&p, &q)?) } else { None };
    clock.lap("classify_ms");
    if dot || common.format == Some(Format::Dot) {
        match &lattice {
            Some(l) => print!("{}", l.dot()),
            None => println!("digraph lattice {{\n  n0 [label=\"T({})\"];\n}}", cls.canonical),
        }
        return Ok(());
    }
    let mut results = serde_json::to_value(cls.case).expect("cases serialize");
    results["name"] = json!(cls.case.to_string());
    results["canonical"] = json!(cls.canonical.to_string());
    results["shift"] = json!(cls.shift);
    match &lattice {
        Some(l) => results["lattice"] = lattice_json(l, &q)?,
        None => results["unitary"] = class_json(&unitary_class_params(&p, &q)?),
    }
    emit("classify", common, clock, results);
    Ok(())
}

fn values_json(a: &DiagonalIntertwiner) -> Value {
    let v: Vec<Value> = a
        .weights
        .iter()
        .zip(&a.values)
        .map(|(w, z)| json!({ "weight": w.entries(), "value": format_complex(*z) }))
        .collect();
    json!(v)
}

/// `A T(from) - T(to) A` on the interior of `from`, both built on `a`'s
/// weights.
fn residual_of(a: &DiagonalIntertwiner, common: &Common, q: &QParam) -> Result<f64, CliError> {
    let window = common.window();
    let bounds = window.bounds(a.from.m());
    let from: WindowedRep = build_principal_in(&a.from, &window, bounds, q)?;
    let to = build_principal_in(&a.to, &window, bounds, q)?;
    let op = a.operator_on(&from)?;
    Ok(intertwining_residual(&op, &from.gens, &to.gens, &from.interior_columns())?)
}

pub fn intertwine(common: &Common) -> Result<(), CliError> {
    let mut clock = Clock::new();
    let q = common.q()?;
    let p = principal(common, "intertwine")?;
    let window = common.window();
    let mut results = json!({ "from": p.to_string(), "to": p.swapped().to_string() });
    let op = match intertwiner_recursive(&p, &window, &q) {
        Ok(a) => {
            results["kind"] = json!("regular");
            a
        }
        Err(Error::VanishingFactor { .. } | Error::InconsistentLoop { .. }) => {
            let (c1, _) = p
                .integer_point()
                .ok_or_else(|| CliError::Failed("recursion breaks down away from an integer point".into()))?;
            let lead = leading_intertwiner(&p, c1, &window, &q)?;
            results["kind"] = json!(if lead.min_order < 0 { "residue" } else { "leading" });
            results["min_order"] = json!(lead.min_order);
            results["kernel"] = json!(lead.kernel().iter().map(|w| w.entries().to_vec()).collect::<Vec<_>>());
            lead.operator
        }
        Err(e) => return Err(e.into()),
    };
    clock.lap("intertwiner_ms");
    let residual = residual_of(&op, common, &q)?;
    clock.lap("residual_ms");
    results["values"] = values_json(&op);
    results["residual"] = json!(residual);
    results["passed"] = json!(residual < common.tol);
    emit("intertwine", common, clock, results);
    if residual < common.tol {
        Ok(())
    } else {
        Err(CliError::Failed(format!("intertwining residual {residual:e} above {:e}", common.tol)))
    }
}

fn positivity_json(r: &Result<PositivityReport, Error>) -> Value {
    match r {
        Ok(r) => json!({
            "sign": r.sign,
            "weights_scanned": r.weights.len(),
            "sign_changes": r.sign_changes().len(),
            "max_imaginary": r.max_imaginary,
        }),
        Err(e) => json!({ "sign": Value::Null, "reason": e.to_string() }),
    }
}

/// `*`-classes must carry a definite form; other classes must not.
fn consistent(class: &UnitaryClass, r: &Result<PositivityReport, Error>) -> bool {
    let definite = matches!(r, Ok(r) if r.sign != FormSign::Indefinite);
    class.is_star() == definite
}

pub fn unitarity(common: &Common) -> Result<(), CliError> {
    let mut clock = Clock::new();
    let q = common.q()?;
    let p = principal(common, "unitarity")?;
    // positivity needs no interior, so no margin
    let window = Window::symmetric(common.window);
    let cls = classify_params(&p, &q)?;
    let mut entries = Vec::new();
    let mut ok = true;
    if cls.case.is_reducible() {
        for node in decompose(&p, &q)?.nodes {
            let class = unitary_class_label(&node.label, &q)?;
            let scan = verify_form_positivity_label(&node.label, &window, &q);
            ok &= consistent(&class, &scan);
            entries.push(json!({
                "label": node.label.to_string(),
                "unitary": class_json(&class),
                "form": positivity_json(&scan),
                "consistent": consistent(&class, &scan),
            }));
        }
    } else {
        let class = unitary_class_params(&p, &q)?;
        let scan = verify_form_positivity_params(&p, &window, &q);
        ok &= consistent(&class, &scan);
        entries.push(json!({
            "label": format!("T({})", cls.canonical),
            "unitary": class_json(&class),
            "form": positivity_json(&scan),
            "consistent": consistent(&class, &scan),
        }));
    }
    clock.lap("scan_ms");
    emit(
        "unitarity",
        common,
        clock,
        json!({ "case": cls.case.to_string(), "constituents": entries, "passed": ok }),
    );
    if ok {
        Ok(())
    } else {
        Err(CliError::Failed("a form sign disagrees with its class".into()))
    }
}

pub fn export(common: &Common) -> Result<(), CliError> {
    let mut clock = Clock::new();
    let q = common.q()?;
    let (gens, columns, mut info) = representation(common, &q)?;
    clock.lap("build_ms");
    let out = common.out.clone().unwrap_or_else(|| PathBuf::from("uqn1-export"));
    let bundle = Bundle { q: q.value(), columns, gens };
    let files: Vec<PathBuf> = match common.format.unwrap_or(Format::Triplet) {
        Format::Triplet => matrix_io::write_triplets(&out, &bundle)?,
        Format::Json => {
            let path = out.join("bundle.json");
            matrix_io::write_json(&path, &bundle)?;
            vec![path]
        }
        other => return Err(CliError::Input(format!("export writes triplet or json, not {other:?}"))),
    };
    clock.lap("write_ms");
    info["files"] = json!(files.iter().map(|p| p.display().to_string()).collect::<Vec<_>>());
    info["dim"] = json!(bundle.gens.dim());
    emit("export", common, clock, info);
    Ok(())
}
