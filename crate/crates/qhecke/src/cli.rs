//! Command surface of the `qhecke` binary.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qhecke_core::faithful::{cokernel_support, faithful_sufficient, hnn_theta_domains};
use qhecke_core::qdouble::DoubleAlgebra;
use qhecke_core::{
    check_class_invariance, coset_counts, commensurator, is_hecke_pair, operator_norm_estimate, rt_scan, validate_ring,
    CheckReport, ClassStatus, Error, FusionRing, HeckePair, HeckeVerdict, KappaTable, ObjectId, RingExt, Scalar, SharedRing, Side,
    SubgroupSet,
};
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::formats::{load_group, ring_to_file, Built, FormatError, Input, Loader, SubgroupSpec};
use crate::report::{Outcome, Report, Table};

#[derive(Parser, Debug)]
#[command(name = "qhecke", version, about = "Coset, Hecke algebra and modular-element computations for quantum subgroups")]
pub struct Cli {
    /// Largest grade enumerated in infinite rings.
    #[arg(long, global = true, default_value_t = 10)]
    pub max_grade: u32,
    /// Worker threads; output does not depend on this.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,
    /// Write the report to a file instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Include wall time in the report.
    #[arg(long, global = true)]
    pub timing: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Args, Debug, Clone)]
pub struct PairArgs {
    /// Ring file or recipe file.
    pub ring: PathBuf,
    /// Subgroup file; defaults to the subgroup named by the recipe.
    pub subgroup: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Checks the fusion-ring axioms.
    Validate(PairArgs),
    /// Right, left and double coset classes.
    Cosets(PairArgs),
    /// κ per object, with an optional class-invariance check.
    Kappa {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long)]
        class_invariance: bool,
    },
    /// Structure constants of the central Hecke algebra.
    Hecke {
        #[command(flatten)]
        pair: PairArgs,
        /// `all`, or pairs `A B` separated by `;`.
        #[arg(long, default_value = "all")]
        pairs: String,
    },
    /// Modular element ∇ per double class.
    Nabla {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long)]
        class: Option<String>,
    },
    /// KMS and group-likeness identities for ∇.
    Kms(PairArgs),
    /// Matrix of right convolution by a double class, with a norm estimate.
    Operator {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long)]
        tau: String,
        #[arg(long)]
        norm: bool,
    },
    /// Checks M(τ̄) against the gram-weighted transpose of M(τ).
    Adjoint {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long)]
        tau: Option<String>,
    },
    /// Largest κ ratios for each β, a lower bound for property (RT).
    RtScan {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, value_delimiter = ';')]
        beta: Vec<String>,
    },
    /// Writes the ring of a recipe as a ring file.
    Build {
        recipe: PathBuf,
        #[arg(short = 'o', long = "out")]
        out: PathBuf,
    },
    /// Quantum double of a finite group, from a group file or a built-in name.
    Qdouble { group: String },
    /// Sufficient faithfulness certificate with witnesses.
    Faithful(PairArgs),
    /// Domains of the powers of θ for an HNN recipe.
    ThetaDomains {
        recipe: PathBuf,
        #[arg(long, default_value_t = 5)]
        k_max: u32,
    },
    /// Objects in the support of products of class projections.
    CokernelSupport(PairArgs),
    /// Runs the full property battery.
    Suite(PairArgs),
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error("{0}")]
    Core(#[from] Error),
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Format(e) if e.is_validation() => 2,
            CliError::Core(e) if e.is_horizon() => 3,
            CliError::Core(Error::UnknownObject(_) | Error::Parse(_)) => 4,
            CliError::Core(_) => 2,
            _ => 4,
        }
    }
}

/// Result of one invocation.
pub struct Execution {
    pub code: i32,
    /// The rendered report.
    pub stdout: String,
    pub stderr: String,
    pub output: Option<PathBuf>,
}

impl Execution {
    fn error(code: i32, message: String) -> Self {
        Execution { code, stdout: String::new(), stderr: message, output: None }
    }
}

type CliResult<T> = Result<T, CliError>;

struct Session {
    built: Built,
    ring: SharedRing,
    sub: SubgroupSet,
    inputs: Vec<(String, String)>,
}

fn open(pair: &PairArgs, g: u32) -> CliResult<Session> {
    let mut loader = Loader::new(g);
    let (built, spec) = loader.load_ring(&pair.ring)?;
    let sub = match (&pair.subgroup, spec) {
        (Some(p), _) => loader.load_subgroup(&built, p)?,
        (None, Some(spec)) => loader.subgroup(&built, &spec, &pair.ring.display().to_string())?,
        (None, None) if built.hnn().is_some() => {
            loader.subgroup(&built, &SubgroupSpec::Rule("hnn-base".into()), &pair.ring.display().to_string())?
        }
        (None, None) => return Err(CliError::Usage("no subgroup file given and the input names none".into())),
    };
    let ring = built.shared();
    Ok(Session { built, ring, sub, inputs: loader.inputs })
}

fn open_ring(path: &Path, g: u32) -> CliResult<(Built, Vec<(String, String)>)> {
    let mut loader = Loader::new(g);
    let (built, _) = loader.load_ring(path)?;
    Ok((built, loader.inputs))
}

fn sc(x: &Scalar) -> Value {
    Value::String(x.to_string())
}

fn check_json(c: &CheckReport) -> Value {
    json!({ "name": c.name, "checked": c.checked, "skipped": c.skipped, "failures": c.failures, "passed": c.passed() })
}

fn status_str(s: ClassStatus) -> &'static str {
    s.as_str()
}

impl Session {
    fn render(&self, x: &ObjectId) -> String {
        self.ring.render(x)
    }

    fn pair(&self, g: u32) -> CliResult<HeckePair<'_>> {
        Ok(HeckePair::new(self.ring.as_ref(), &self.sub, g)?)
    }
}

/// Double classes whose representative lies within the horizon.
fn window_doubles(p: &HeckePair) -> Vec<usize> {
    let g = p.horizon();
    (0..p.cosets.double.len())
        .filter(|&i| p.ring.grade(&p.cosets.double[i].rep).map_or(false, |d| d <= g))
        .collect()
}

fn note_status(report: &mut Report, status: ClassStatus, what: &str) {
    match status {
        ClassStatus::Exact => {}
        ClassStatus::WithinHorizon => {
            let why = format!("{} computed within the horizon", what);
            if !report.completeness.contains(&why) {
                report.completeness.push(why);
            }
        }
        ClassStatus::Partial => report.incomplete(format!("{} has classes escaping the horizon", what)),
    }
}

pub fn run(cli: &Cli) -> CliResult<Report> {
    let g = cli.max_grade;
    let mut report = match &cli.command {
        Command::Validate(a) => validate(a, g)?,
        Command::Cosets(a) => cosets(a, g)?,
        Command::Kappa { pair, class_invariance } => kappa(pair, g, *class_invariance)?,
        Command::Hecke { pair, pairs } => hecke(pair, g, pairs)?,
        Command::Nabla { pair, class } => nabla(pair, g, class.as_deref())?,
        Command::Kms(a) => kms(a, g)?,
        Command::Operator { pair, tau, norm } => operator(pair, g, tau, *norm)?,
        Command::Adjoint { pair, tau } => adjoint(pair, g, tau.as_deref())?,
        Command::RtScan { pair, beta } => rt(pair, g, beta)?,
        Command::Build { recipe, out } => build(recipe, out, g)?,
        Command::Qdouble { group } => qdouble(group)?,
        Command::Faithful(a) => faithful(a, g)?,
        Command::ThetaDomains { recipe, k_max } => theta_domains(recipe, *k_max, g)?,
        Command::CokernelSupport(a) => cokernel(a, g)?,
        Command::Suite(a) => suite(a, g)?,
    };
    if cli.format == OutputFormat::Csv && report.table.is_none() {
        return Err(CliError::Usage(format!("{} has no tabular result; use --format json", report.command)));
    }
    report.horizon.get_or_insert(g);
    Ok(report)
}

fn base_report(command: &str, g: Option<u32>, inputs: &[(String, String)]) -> Report {
    let mut r = Report::new(command, g);
    r.inputs = inputs.iter().cloned().collect();
    r
}

fn validate(a: &PairArgs, g: u32) -> CliResult<Report> {
    let (built, mut inputs) = open_ring(&a.ring, g)?;
    let ring = built.shared();
    let v = validate_ring(ring.as_ref(), g);
    let mut results = json!({
        "ring": ring.name(),
        "finite": ring.is_finite(),
        "objects": v.objects,
        "checks": v.checks.iter().map(|c| json!({
            "axiom": c.axiom, "checked": c.checked, "skipped": c.skipped, "failures": c.failures, "passed": c.passed()
        })).collect::<Vec<_>>(),
        "passed": v.passed(),
    });
    let mut pass = v.passed();
    if let Some(p) = &a.subgroup {
        let mut loader = Loader::new(g);
        match loader.load_subgroup(&built, p) {
            Ok(s) => {
                results["subgroup"] = json!({
                    "closed": true,
                    "certificate": format!("{:?}", s.certificate()),
                    "members": s.members().map(|m| m.len()),
                });
            }
            Err(e) if e.is_validation() => {
                pass = false;
                results["subgroup"] = json!({ "closed": false, "error": e.to_string() });
            }
            Err(e) => return Err(e.into()),
        }
        inputs.extend(loader.inputs);
    }
    let mut r = base_report("validate", Some(g), &inputs);
    r.outcome = Outcome::from_pass(pass);
    if !ring.is_finite() {
        r.completeness.push(format!("axioms checked on products of grade at most {}", g));
    }
    r.results = results;
    Ok(r)
}

fn verdict_json(v: &HeckeVerdict) -> Value {
    match v {
        HeckeVerdict::CertifiedYes => json!({ "verdict": "certified-yes" }),
        HeckeVerdict::YesWithinHorizon => json!({ "verdict": "yes-within-horizon" }),
        HeckeVerdict::No { witness, reason } => json!({ "verdict": "no", "witness": witness, "reason": reason }),
        HeckeVerdict::Inconclusive(why) => json!({ "verdict": "inconclusive", "reason": why }),
    }
}

const MEMBER_LIMIT: usize = 32;

fn cosets(a: &PairArgs, g: u32) -> CliResult<Report> {
    let s = open(a, g)?;
    let p = s.pair(g)?;
    let data = &p.cosets;
    let mut r = base_report("cosets", Some(g), &s.inputs);
    let doubles: Vec<Value> = data
        .double
        .iter()
        .enumerate()
        .map(|(i, d)| {
            json!({
                "class": p.label(Side::Double, i),
                "l": d.l(),
                "r": d.r(),
                "status": status_str(d.status),
                "right": d.right.iter().map(|&k| p.label(Side::Right, k)).collect::<Vec<_>>(),
                "left": d.left.iter().map(|&k| p.label(Side::Left, k)).collect::<Vec<_>>(),
                "members": d.members.iter().take(MEMBER_LIMIT).map(|x| s.render(x)).collect::<Vec<_>>(),
                "member_count": d.members.len(),
            })
        })
        .collect();
    let verdict = is_hecke_pair(s.ring.as_ref(), &s.sub, data);
    let comm = commensurator(s.ring.as_ref(), data);
    note_status(&mut r, data.status(), "the coset decomposition");
    if matches!(verdict, HeckeVerdict::Inconclusive(_)) {
        r.incomplete("the Hecke-pair test is inconclusive");
    }
    r.results = json!({
        "double": doubles,
        "right_classes": data.right.len(),
        "left_classes": data.left.len(),
        "unresolved": data.unresolved.iter().map(|x| s.render(x)).collect::<Vec<_>>(),
        "hecke_pair": verdict_json(&verdict),
        "commensurator": {
            "members": comm.members.len(),
            "horizon_limited": comm.horizon_limited.iter().map(|x| s.render(x)).collect::<Vec<_>>(),
            "excluded": comm.excluded.iter().map(|x| s.render(x)).collect::<Vec<_>>(),
        },
    });
    Ok(r)
}

fn kappa(a: &PairArgs, g: u32, invariance: bool) -> CliResult<Report> {
    let s = open(a, g)?;
    let mut r = base_report("kappa", Some(g), &s.inputs);
    let table = KappaTable::new(s.ring.as_ref(), &s.sub);
    let mut objects = Vec::new();
    for x in s.ring.enumerate_up_to(g) {
        match (table.kappa_self(&x), table.kappa(&s.ring.conj(&x)?, &x)) {
            (Ok(k), Ok(kb)) => objects.push(json!({
                "object": s.render(&x),
                "kappa": sc(&k),
                "kappa_conj": sc(&kb),
                "weight": sc(&table.weight(&x)?),
            })),
            (Err(e), _) | (_, Err(e)) if e.is_horizon() => {
                r.incomplete("some κ values need products beyond the horizon");
                objects.push(json!({ "object": s.render(&x), "kappa": Value::Null }));
            }
            (Err(e), _) | (_, Err(e)) => return Err(e.into()),
        }
    }
    let mut results = json!({ "objects": objects });
    if invariance {
        let p = s.pair(g)?;
        let inv = check_class_invariance(s.ring.as_ref(), &s.sub, &p.cosets);
        if !inv.passed() {
            r.fail();
        }
        results["class_invariance"] = json!({
            "pairs_checked": inv.pairs_checked,
            "weights_checked": inv.weights_checked,
            "skipped": inv.skipped,
            "passed": inv.passed(),
            "violations": inv.violations.iter().map(|v| json!({
                "law": v.law,
                "first": v.first.iter().map(|x| s.render(x)).collect::<Vec<_>>(),
                "first_value": sc(&v.first_value),
                "second": v.second.iter().map(|x| s.render(x)).collect::<Vec<_>>(),
                "second_value": sc(&v.second_value),
            })).collect::<Vec<_>>(),
            "class_weights": inv.weights.iter().map(|(k, w)| (p.label(Side::Right, *k), sc(w))).collect::<Map<_, _>>(),
        });
    }
    r.results = results;
    Ok(r)
}

fn parse_pairs(p: &HeckePair, spec: &str) -> CliResult<Vec<(usize, usize)>> {
    let mut out = Vec::new();
    for item in spec.split(';').map(str::trim).filter(|t| !t.is_empty()) {
        let parts: Vec<&str> = item.split_whitespace().collect();
        match parts.as_slice() {
            [x, y] => out.push((p.find_double(x)?, p.find_double(y)?)),
            _ => return Err(CliError::Usage(format!("expected two classes in {:?}", item))),
        }
    }
    Ok(out)
}

fn element_json(p: &HeckePair, e: &qhecke_core::CentralHeckeElement) -> Value {
    Value::Object(e.coeffs.iter().map(|(k, v)| (p.label(Side::Double, *k), sc(v))).collect())
}

fn hecke(a: &PairArgs, g: u32, pairs: &str) -> CliResult<Report> {
    let s = open(a, g)?;
    let p = s.pair(g)?;
    let mut r = base_report("hecke", Some(g), &s.inputs);
    let mut table = Table { header: vec!["left".into(), "right".into(), "class".into(), "coefficient".into()], rows: Vec::new() };
    let mut entries = Vec::new();
    let mut checks = Vec::new();
    let mut add = |x: usize, y: usize, e: &qhecke_core::CentralHeckeElement, r: &mut Report| {
        note_status(r, e.status, &format!("{} * {}", p.label(Side::Double, x), p.label(Side::Double, y)));
        for (k, v) in &e.coeffs {
            table.rows.push(vec![p.label(Side::Double, x), p.label(Side::Double, y), p.label(Side::Double, *k), v.to_string()]);
        }
        entries.push(json!({
            "left": p.label(Side::Double, x),
            "right": p.label(Side::Double, y),
            "product": element_json(&p, e),
            "status": status_str(e.status),
        }));
    };
    let classes;
    if pairs.trim() == "all" {
        classes = window_doubles(&p);
        let st = p.structure_table(&classes)?;
        for ((x, y), e) in &st.entries {
            add(*x, *y, e, &mut r);
        }
        if !st.passed() {
            r.fail();
        }
        checks = st.checks.iter().map(check_json).collect();
    } else {
        let list = parse_pairs(&p, pairs)?;
        let mut seen: Vec<usize> = list.iter().flat_map(|&(x, y)| [x, y]).collect();
        seen.sort();
        seen.dedup();
        classes = seen;
        for (x, y) in list {
            let e = p.double_class_product(x, y)?;
            add(x, y, &e, &mut r);
        }
    }
    let mu: Map<String, Value> = classes
        .iter()
        .map(|&d| {
            let rep = &p.cosets.double[d].rep;
            let v = p.cosets.right_of(rep).map(|k| p.mu(k)).transpose().ok().flatten();
            (p.label(Side::Double, d), v.map_or(Value::Null, |x| sc(&x)))
        })
        .collect();
    r.results = json!({
        "classes": classes.iter().map(|&d| p.label(Side::Double, d)).collect::<Vec<_>>(),
        "unit": p.label(Side::Double, p.unit_class()),
        "entries": entries,
        "checks": checks,
        "mu": mu,
    });
    r.table = Some(table);
    Ok(r)
}

fn hnn_closed(s: &Session) -> CliResult<Option<Value>> {
    let Some(h) = s.built.hnn() else { return Ok(None) };
    let c = h.recipe().closed_forms()?;
    Ok(Some(json!({
        "class": format!("D:{}", h.render(&h.w(1))),
        "l_w": c.l_w,
        "r_w": c.r_w,
        "l_tilde": sc(&c.l_tilde),
        "r_tilde": sc(&c.r_tilde),
        "nabla_w": sc(&c.nabla_w),
    })))
}

fn nabla_entry(p: &HeckePair, d: usize, r: &mut Report) -> CliResult<Value> {
    let dc = &p.cosets.double[d];
    note_status(r, dc.status, "the coset decomposition");
    let value = match p.nabla(d) {
        Ok(v) => sc(&v),
        Err(e) if e.is_horizon() => {
            r.incomplete(format!("{} is not materialized within the horizon", p.label(Side::Double, d)));
            Value::Null
        }
        Err(e) => return Err(e.into()),
    };
    Ok(json!({ "class": p.label(Side::Double, d), "l": dc.l(), "r": dc.r(), "nabla": value, "status": status_str(dc.status) }))
}

fn nabla(a: &PairArgs, g: u32, class: Option<&str>) -> CliResult<Report> {
    let s = open(a, g)?;
    let p = s.pair(g)?;
    let mut r = base_report("nabla", Some(g), &s.inputs);
    let classes = match class {
        Some(c) => vec![p.find_double(c)?],
        None => window_doubles(&p),
    };
    let mut out = Vec::new();
    for d in classes {
        out.push(nabla_entry(&p, d, &mut r)?);
    }
    let mut results = json!({ "classes": out });
    if let Some(c) = hnn_closed(&s)? {
        let w = s.built.hnn().unwrap().w(1);
        if let Some(d) = p.cosets.locate(s.ring.as_ref(), &s.sub, Side::Double, &w)? {
            if let Ok(v) = p.nabla(d) {
                let agree = Some(v.to_string()) == c["nabla_w"].as_str().map(str::to_string);
                if !agree {
                    r.fail();
                }
                results["closed_forms_agree"] = Value::Bool(agree);
            }
        }
        results["closed_forms"] = c;
    }
    r.results = results;
    Ok(r)
}

fn kms(a: &PairArgs, g: u32) -> CliResult<Report> {
    let s = open(a, g)?;
    let p = s.pair(g)?;
    let mut r = base_report("kms", Some(g), &s.inputs);
    let classes = window_doubles(&p);
    let st = p.structure_table(&classes)?;
    let k = p.verify_kms(&st);
    r.outcome = Outcome::from_pass(k.passed());
    if k.skipped > 0 {
        r.completeness.push("pairs involving classes without ∇ were skipped".into());
    }
    r.results = json!({
        "classes": classes.iter().map(|&d| p.label(Side::Double, d)).collect::<Vec<_>>(),
        "kms": check_json(&k),
    });
    Ok(r)
}

fn operator(a: &PairArgs, g: u32, tau: &str, norm: bool) -> CliResult<Report> {
    let s = open(a, g)?;
    let p = s.pair(g)?;
    let t = p.find_double(tau)?;
    let mut r = base_report("operator", Some(g), &s.inputs);
    let m = p.operator_matrix(t)?;
    let labels: Vec<String> = m.classes.iter().map(|&c| p.label(Side::Right, c)).collect();
    let mut table = Table { header: vec!["row".into(), "col".into(), "value".into()], rows: Vec::new() };
    for (i, row) in m.entries.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            if !v.is_zero() {
                table.rows.push(vec![labels[i].clone(), labels[j].clone(), v.to_string()]);
            }
        }
    }
    if !s.ring.is_finite() {
        r.completeness.push("finite section of the operator on classes within the horizon".into());
    }
    let mut results = json!({
        "tau": p.label(Side::Double, t),
        "classes": labels,
        "matrix": m.entries.iter().map(|row| row.iter().map(sc).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "gram": m.gram.iter().map(sc).collect::<Vec<_>>(),
    });
    if norm {
        let n = operator_norm_estimate(&m);
        results["norm"] = json!({ "lower": n.lower, "upper": n.upper });
    }
    r.results = results;
    r.table = Some(table);
    Ok(r)
}

fn adjoint(a: &PairArgs, g: u32, tau: Option<&str>) -> CliResult<Report> {
    let s = open(a, g)?;
    let p = s.pair(g)?;
    let mut r = base_report("adjoint", Some(g), &s.inputs);
    let classes = match tau {
        Some(t) => vec![p.find_double(t)?],
        None => window_doubles(&p),
    };
    let mut out = Map::new();
    let mut pass = true;
    for d in classes {
        match p.verify_adjoint(d) {
            Ok(c) => {
                pass &= c.passed();
                out.insert(p.label(Side::Double, d), check_json(&c));
            }
            Err(e) if e.is_horizon() => {
                r.incomplete(format!("{}: {}", p.label(Side::Double, d), e));
                out.insert(p.label(Side::Double, d), Value::Null);
            }
            Err(e) => return Err(e.into()),
        }
    }
    if !pass {
        r.fail();
    }
    r.results = json!({ "adjoint": out });
    Ok(r)
}

fn rt(a: &PairArgs, g: u32, betas: &[String]) -> CliResult<Report> {
    let s = open(a, g)?;
    let mut r = base_report("rt-scan", Some(g), &s.inputs);
    let ids: Vec<ObjectId> = if betas.is_empty() {
        s.ring.enumerate_up_to(g)
    } else {
        betas.iter().map(|b| s.ring.parse(b)).collect::<Result<_, _>>()?
    };
    let entries: Vec<_> =
        ids.par_iter().map(|b| rt_scan(s.ring.as_ref(), &s.sub, g, Some(std::slice::from_ref(b))).remove(0)).collect();
    if entries.iter().any(|e| e.skipped > 0) {
        r.completeness.push("some products needed data beyond the horizon and were skipped".into());
    }
    r.results = json!({
        "entries": entries.iter().map(|e| json!({
            "beta": s.render(&e.beta),
            "ratio": sc(&e.ratio),
            "ratio_f64": e.ratio.to_f64(),
            "witness": e.witness.as_ref().map(|(x, y)| json!([s.render(x), s.render(y)])),
            "skipped": e.skipped,
        })).collect::<Vec<_>>(),
    });
    Ok(r)
}

fn build(recipe: &Path, out: &Path, g: u32) -> CliResult<Report> {
    let (built, inputs) = open_ring(recipe, g)?;
    let ring = built.shared();
    let v = validate_ring(ring.as_ref(), g);
    let mut r = base_report("build", Some(g), &inputs);
    if !v.passed() {
        r.fail();
        r.results = json!({ "written": false, "failed": v.checks.iter().filter(|c| !c.passed()).map(|c| &c.axiom).collect::<Vec<_>>() });
        return Ok(r);
    }
    let file = ring_to_file(ring.as_ref()).map_err(CliError::Usage)?;
    let mut text = serde_json::to_string_pretty(&file).expect("ring file is serializable");
    text.push('\n');
    std::fs::write(out, &text).map_err(|source| CliError::Io { path: out.display().to_string(), source })?;
    let written = Input::read(out)?;
    r.results = json!({
        "written": true,
        "path": out.display().to_string(),
        "sha256": written.sha256,
        "objects": file.objects.len(),
        "ring": ring.name(),
    });
    Ok(r)
}

fn qdouble(group: &str) -> CliResult<Report> {
    let (table, input) = load_group(group)?;
    let inputs: Vec<(String, String)> = input.map(|i| (i.path.display().to_string(), i.sha256)).into_iter().collect();
    let mut r = base_report("qdouble", None, &inputs);
    let n = table.order();
    let alg = DoubleAlgebra::new(table);
    let structure = alg.verify_structure();
    let hecke = alg.hecke_subalgebra();
    let chars = alg.verify_character_identification(&hecke);
    let endo = alg.verify_endomorphism_correspondence(&hecke);
    let pass = structure.iter().chain(endo.iter()).all(CheckReport::passed) && chars.passed();
    r.outcome = Outcome::from_pass(pass);
    r.results = json!({
        "group": group,
        "order": n,
        "dimension": alg.dim(),
        "haar_scale": sc(alg.haar_scale()),
        "structure": structure.iter().map(check_json).collect::<Vec<_>>(),
        "hecke": {
            "dimension": chars.dimension,
            "conjugacy_classes": chars.conjugacy_classes,
            "commutative": chars.commutative,
            "minimal_idempotents": chars.minimal_idempotents,
            "passed": chars.passed(),
        },
        "endomorphisms": endo.iter().map(check_json).collect::<Vec<_>>(),
    });
    Ok(r)
}

fn faithful(a: &PairArgs, g: u32) -> CliResult<Report> {
    let s = open(a, g)?;
    let mut r = base_report("faithful", Some(g), &s.inputs);
    let f = faithful_sufficient(s.ring.as_ref(), &s.sub, g);
    if f.status != qhecke_core::faithful::FaithfulStatus::CertifiedFaithful {
        r.incomplete("faithfulness is not certified");
    }
    r.results = json!({
        "status": f.status.as_str(),
        "witnesses": f.witnesses.iter().map(|(x, y)| (s.render(x), Value::String(s.render(y)))).collect::<Map<_, _>>(),
        "missing": f.missing.iter().map(|x| s.render(x)).collect::<Vec<_>>(),
        "argument": f.argument,
    });
    Ok(r)
}

fn theta_domains(recipe: &Path, k_max: u32, g: u32) -> CliResult<Report> {
    let (built, inputs) = open_ring(recipe, g)?;
    let h = built.hnn().ok_or_else(|| CliError::Usage("theta-domains needs an hnn recipe".into()))?;
    let rec = h.recipe();
    let d = hnn_theta_domains(rec, k_max);
    let base = rec.base.as_ref();
    let mut r = base_report("theta-domains", Some(k_max), &inputs);
    if d.trivial && d.argument.is_none() {
        r.completeness.push(format!("intersection checked on base objects of grade at most {}", k_max));
    }
    r.results = json!({
        "k_max": k_max,
        "sample": d.sample,
        "domains": d.chain.iter().map(|st| json!({
            "k": st.k,
            "size": st.members.len(),
            "members": st.members.iter().map(|x| base.render(x)).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
        "intersection": d.intersection.iter().map(|x| base.render(x)).collect::<Vec<_>>(),
        "trivial": d.trivial,
        "argument": d.argument,
    });
    Ok(r)
}

fn cokernel(a: &PairArgs, g: u32) -> CliResult<Report> {
    let s = open(a, g)?;
    let p = s.pair(g)?;
    let mut r = base_report("cokernel-support", Some(g), &s.inputs);
    let c = cokernel_support(&p)?;
    note_status(&mut r, c.status, "the block support");
    r.results = json!({
        "objects": c.objects.iter().map(|x| s.render(x)).collect::<Vec<_>>(),
        "count": c.objects.len(),
        "note": c.note,
        "caveat": "block support only; it does not certify faithfulness",
    });
    Ok(r)
}

fn suite(a: &PairArgs, g: u32) -> CliResult<Report> {
    let s = open(a, g)?;
    let p = s.pair(g)?;
    let mut r = base_report("suite", Some(g), &s.inputs);
    let classes = window_doubles(&p);
    let ring = s.ring.as_ref();
    type Job<'a> = Box<dyn Fn() -> Result<(Value, bool), Error> + Send + Sync + 'a>;
    let jobs: Vec<(&str, Job)> = vec![
        ("validate", Box::new(|| {
            let v = validate_ring(ring, g);
            let failed: Vec<&str> = v.checks.iter().filter(|c| !c.passed()).map(|c| c.axiom.as_str()).collect();
            Ok((json!({ "passed": v.passed(), "failed": failed }), v.passed()))
        })),
        ("hecke_pair", Box::new(|| {
            let v = is_hecke_pair(ring, &s.sub, &p.cosets);
            let ok = !matches!(v, HeckeVerdict::No { .. });
            let counts: Map<String, Value> = coset_counts(ring, &p.cosets)
                .into_iter()
                .map(|c| (c.class, json!({ "l": c.l, "r": c.r, "status": status_str(c.status) })))
                .collect();
            Ok((json!({ "verdict": verdict_json(&v), "counts": counts }), ok))
        })),
        ("class_invariance", Box::new(|| {
            let inv = check_class_invariance(ring, &s.sub, &p.cosets);
            Ok((json!({ "passed": inv.passed(), "checked": inv.pairs_checked + inv.weights_checked, "skipped": inv.skipped }), inv.passed()))
        })),
        ("structure_table", Box::new(|| {
            let st = p.structure_table(&classes)?;
            let kms = p.verify_kms(&st);
            let mut checks: Vec<Value> = st.checks.iter().map(check_json).collect();
            checks.push(check_json(&kms));
            Ok((Value::Array(checks), st.passed() && kms.passed()))
        })),
        ("grouplike", Box::new(|| {
            let c = p.verify_grouplike(g);
            Ok((check_json(&c), c.passed()))
        })),
        ("adjoint", Box::new(|| {
            let mut out = Map::new();
            let mut ok = true;
            for &d in &classes {
                match p.verify_adjoint(d) {
                    Ok(c) => {
                        ok &= c.passed();
                        out.insert(p.label(Side::Double, d), check_json(&c));
                    }
                    Err(e) if e.is_horizon() => {
                        out.insert(p.label(Side::Double, d), Value::Null);
                    }
                    Err(e) => return Err(e),
                }
            }
            Ok((Value::Object(out), ok))
        })),
        ("faithful", Box::new(|| {
            let f = faithful_sufficient(ring, &s.sub, g);
            Ok((json!({ "status": f.status.as_str(), "missing": f.missing.len(), "argument": f.argument }), true))
        })),
    ];
    let results: Vec<(String, Result<(Value, bool), Error>)> =
        jobs.par_iter().map(|(name, job)| (name.to_string(), job())).collect();
    let mut out = Map::new();
    for (name, res) in results {
        match res {
            Ok((v, ok)) => {
                if !ok {
                    r.fail();
                }
                out.insert(name, json!({ "passed": ok, "result": v }));
            }
            Err(e) if e.is_horizon() => {
                r.incomplete(format!("{}: {}", name, e));
                out.insert(name, Value::Null);
            }
            Err(e) => return Err(e.into()),
        }
    }
    note_status(&mut r, p.cosets.status(), "the coset decomposition");
    r.results = Value::Object(out);
    Ok(r)
}

/// Parses arguments, runs the command on a pool of `--threads` workers and
/// renders the report.
pub fn execute<I, T>(args: I) -> Execution
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) if e.use_stderr() => return Execution::error(4, e.to_string()),
        Err(e) => return Execution { code: 0, stdout: e.to_string(), stderr: String::new(), output: None },
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.threads.unwrap_or(0)).build() {
        Ok(p) => p,
        Err(e) => return Execution::error(4, format!("error: {}\n", e)),
    };
    let start = Instant::now();
    match pool.install(|| run(&cli)) {
        Ok(mut report) => {
            if cli.timing {
                report.wall_time_ms = Some(start.elapsed().as_secs_f64() * 1e3);
            }
            let stdout = match cli.format {
                OutputFormat::Json => report.to_json(),
                OutputFormat::Csv => report.to_csv().unwrap_or_default(),
            };
            Execution { code: report.outcome.exit_code(), stdout, stderr: String::new(), output: cli.output.clone() }
        }
        Err(e) => Execution::error(e.exit_code(), format!("error: {}\n", e)),
    }
}
