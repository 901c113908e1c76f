//! The `hd` command line: load JSON inputs, run one operation, emit a report.
//!
//! Exit codes: 0 when every finding passes, 1 when a check fails, 2 on usage or
//! input errors. JSON reports have sorted keys, so two runs on the same inputs
//! differ only in `timing_ms`.

pub mod files;

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::descent::explicit::DEFAULT_LIMIT;
use crate::descent::{descent_bicategory, is_equivalence, tau_functor, DescentObject, DescentSpace};
use crate::equivalence::{
    equivalence_report, factorize, morita_equivalent, strong_equivalence_by, Factorization, MoritaVerdict, StrongEquivalence,
    Zigzag,
};
use crate::equivariant::{equivariant_descent, eval_homotopy, eval_on_groupoid, pullback_equivariant, pullback_harness, Strength};
use crate::error::Error;
use crate::groupoid::{FiniteGroupoid, GroupoidFunctor, NatIso};
use crate::holonomy::{jandl_holonomy, oriented_holonomy, orientation_double_cover};
use crate::plus::{plus_eval, plus_on_groupoid, verify_stack};
use crate::prestacks::CyclicInstance;
use crate::site::{cover_nerve, CoverClass};
use files::{
    duplicates, CoverFile, DescentObjectFile, FormFile, FunctorFile, GroupoidFile, LoadedFunctor, OrientifoldFile, SetFile,
    SurfaceFile,
};

/// Largest face count for which `holonomy jandl` also sweeps every fundamental domain.
const SWEEP_FACES: usize = 16;

#[derive(Parser, Debug)]
#[command(name = "hd", version, about = "Descent, plus construction and holonomy on finite combinatorial data")]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[command(subcommand)]
    pub verb: Verb,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Verb {
    /// Finite groupoids.
    #[command(subcommand)]
    Groupoid(GroupoidOp),
    /// Weak equivalences, factorization and Morita equivalence.
    #[command(subcommand)]
    Equiv(EquivOp),
    /// Evaluating a prestack instance on a finite set.
    #[command(subcommand)]
    Prestack(PrestackOp),
    /// Descent data along a cover.
    #[command(subcommand)]
    Descent(DescentOp),
    /// The plus construction.
    #[command(subcommand)]
    Plus(PlusOp),
    /// Prestacks evaluated on groupoids.
    #[command(subcommand)]
    Equivariant(EquivariantOp),
    /// Surface holonomy.
    #[command(subcommand)]
    Holonomy(HolonomyOp),
    /// Structural validation of an input file.
    Validate {
        path: PathBuf,
        #[arg(long, value_enum)]
        kind: Option<Kind>,
    },
}

#[derive(Subcommand, Debug)]
pub enum GroupoidOp {
    /// Checks the groupoid axioms.
    Check { groupoid: PathBuf },
}

#[derive(Subcommand, Debug)]
pub enum EquivOp {
    /// Decides whether a functor is a weak equivalence and builds a quasi-inverse.
    Check {
        functor: PathBuf,
        #[arg(long, default_value = "surjection")]
        class: CoverClass,
        /// Re-check the quasi-inverse stored in an earlier JSON report instead of searching.
        #[arg(long)]
        verify_witness: Option<PathBuf>,
    },
    /// Factors a functor as a strong equivalence followed by a surjective equivalence.
    Factorize { functor: PathBuf },
    /// Decides Morita equivalence and builds a zigzag.
    Morita {
        first: PathBuf,
        second: PathBuf,
        #[arg(long)]
        verify_witness: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
pub enum PrestackOp {
    /// Builds `X(M)` for an instance such as `Grbtriv_Z2`.
    Eval { instance: String, set: PathBuf },
}

#[derive(Subcommand, Debug)]
pub enum DescentOp {
    /// Enumerates descent data and decides whether `τ` is an equivalence.
    Objects {
        instance: String,
        cover: PathBuf,
        /// Allow nonzero values on degenerate simplices.
        #[arg(long)]
        unnormalized: bool,
    },
    /// Checks the cocycle conditions of one descent object.
    Check { object: PathBuf },
    /// Decides whether pullback along a functor is an equivalence of descent bicategories.
    Equivalent {
        functor: PathBuf,
        #[arg(long, default_value = "Grbtriv_Z2")]
        instance: String,
    },
}

#[derive(Subcommand, Debug)]
pub enum PlusOp {
    /// Iso classes of `X⁺(M)` over covers with at most `bound` extra points.
    Objects {
        instance: String,
        base: PathBuf,
        #[arg(long, default_value_t = 1)]
        bound: usize,
        #[arg(long, default_value = "surjection")]
        class: CoverClass,
    },
    /// Checks `τ_Y` for `X` and for `X⁺` along a cover.
    VerifyStack {
        instance: String,
        cover: PathBuf,
        #[arg(long, default_value_t = 1)]
        bound: usize,
    },
    /// Iso classes of `X⁺(Γ)` for a groupoid.
    Groupoid {
        instance: String,
        groupoid: PathBuf,
        #[arg(long, default_value_t = 1)]
        bound: usize,
        #[arg(long, default_value = "surjection")]
        class: CoverClass,
    },
}

#[derive(Subcommand, Debug)]
pub enum EquivariantOp {
    /// Builds `X(Γ)` and its homotopy groups.
    Eval { instance: String, groupoid: PathBuf },
    /// Pullback along a weak equivalence, through the factorization and directly.
    Pullback {
        functor: PathBuf,
        #[arg(long, default_value = "stack")]
        mode: Strength,
        #[arg(long, default_value = "Grbtriv_Z2")]
        instance: String,
        #[arg(long)]
        verify_witness: Option<PathBuf>,
    },
    /// Descent along a functor surjective on objects and morphisms.
    Descent {
        functor: PathBuf,
        #[arg(long, default_value = "stack")]
        mode: Strength,
        #[arg(long, default_value = "Grbtriv_Z2")]
        instance: String,
    },
}

#[derive(Subcommand, Debug)]
pub enum HolonomyOp {
    /// Holonomy of a 2-form on a closed oriented surface.
    Oriented { surface: PathBuf, form: PathBuf },
    /// Holonomy of orientifold data over a fundamental domain.
    Jandl { orientifold: PathBuf },
    /// Builds and checks the orientation double cover.
    Doublecover { surface: PathBuf },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Set,
    Groupoid,
    Functor,
    Cover,
    Surface,
    Form,
    Orientifold,
    DescentObject,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::Error => 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Finding {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    #[serde(default, skip_serializing_if = "Value::is_null")]
    pub witness: Value,
}

impl Finding {
    fn new(name: &str, passed: bool, detail: impl Into<String>) -> Self {
        Finding { name: name.into(), passed, detail: detail.into(), witness: Value::Null }
    }

    fn info(name: &str, detail: impl Into<String>, witness: Value) -> Self {
        Finding { name: name.into(), passed: true, detail: detail.into(), witness }
    }

    fn with(mut self, witness: Value) -> Self {
        self.witness = witness;
        self
    }

    fn violations(name: &str, v: Vec<String>) -> Self {
        let detail = if v.is_empty() { "no violations".to_string() } else { format!("{} violations", v.len()) };
        let f = Finding::new(name, v.is_empty(), detail);
        if v.is_empty() {
            f
        } else {
            f.with(json!(v))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub status: Status,
    pub findings: Vec<Finding>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub timing_ms: u64,
}

impl Report {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let v = serde_json::to_value(self).expect("report serializes");
                serde_json::to_string_pretty(&v).expect("value serializes")
            }
            Format::Text => {
                let mut out = format!("{}: {}\n", self.command, status_word(self.status));
                for f in &self.findings {
                    let mark = if f.passed { "ok" } else { "FAIL" };
                    out.push_str(&format!("  [{mark}] {}: {}\n", f.name, f.detail));
                    if !f.passed && !f.witness.is_null() {
                        out.push_str(&format!("         witness: {}\n", f.witness));
                    }
                }
                out.pop();
                out
            }
        }
    }

    pub fn finding(&self, name: &str) -> Option<&Finding> {
        self.findings.iter().find(|f| f.name == name)
    }
}

fn status_word(s: Status) -> &'static str {
    match s {
        Status::Pass => "pass",
        Status::Fail => "fail",
        Status::Error => "error",
    }
}

/// Input or usage problems; all map to exit code 2.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}:{line}:{column}: {message}")]
    Syntax { path: String, line: usize, column: usize, message: String },
    #[error("{path}: {message}")]
    Input { path: String, message: String },
    #[error(transparent)]
    Run(#[from] Error),
}

type Outcome = std::result::Result<Vec<Finding>, CliError>;

fn read_text(path: &Path) -> std::result::Result<String, CliError> {
    let shown = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Input { path: shown.clone(), message: e.to_string() })?;
    if text.trim().is_empty() {
        return Err(CliError::Input { path: shown, message: "empty file".into() });
    }
    Ok(text)
}

/// Parses `path` against the schema `T`; errors carry line and column.
pub fn load<T: DeserializeOwned>(path: &Path) -> std::result::Result<T, CliError> {
    let text = read_text(path)?;
    serde_json::from_str(&text).map_err(|e| CliError::Syntax {
        path: path.display().to_string(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

fn at(path: &Path) -> impl Fn(Error) -> CliError + '_ {
    move |e| CliError::Input { path: path.display().to_string(), message: e.to_string() }
}

fn load_functor(path: &Path) -> std::result::Result<LoadedFunctor, CliError> {
    load::<FunctorFile>(path)?.build().map_err(at(path))
}

fn load_groupoid(path: &Path) -> std::result::Result<FiniteGroupoid, CliError> {
    load::<GroupoidFile>(path)?.build().map_err(at(path))
}

fn instance(name: &str) -> std::result::Result<CyclicInstance, CliError> {
    Ok(CyclicInstance::by_name(name)?)
}

/// Optional `HD_SEED`: reorders tiebreaks among equally valid witnesses.
pub fn seed_from_env() -> std::result::Result<Option<u64>, CliError> {
    match std::env::var("HD_SEED") {
        Err(_) => Ok(None),
        Ok(s) => s
            .trim()
            .parse::<u64>()
            .map(Some)
            .map_err(|_| CliError::Input { path: "HD_SEED".into(), message: format!("`{s}` is not an unsigned integer") }),
    }
}

fn rank_table(seed: Option<u64>, rows: usize, cols: usize) -> Vec<u64> {
    match seed {
        None => vec![0; rows * cols],
        Some(s) => {
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            (0..rows * cols).map(|_| rng.gen()).collect()
        }
    }
}

fn paths(verb: &Verb) -> Vec<&Path> {
    let mut out: Vec<&Path> = Vec::new();
    match verb {
        Verb::Groupoid(GroupoidOp::Check { groupoid }) => out.push(groupoid),
        Verb::Equiv(EquivOp::Check { functor, verify_witness, .. }) => {
            out.push(functor);
            out.extend(verify_witness.as_deref());
        }
        Verb::Equiv(EquivOp::Factorize { functor }) => out.push(functor),
        Verb::Equiv(EquivOp::Morita { first, second, verify_witness }) => {
            out.extend([first.as_path(), second.as_path()]);
            out.extend(verify_witness.as_deref());
        }
        Verb::Prestack(PrestackOp::Eval { set, .. }) => out.push(set),
        Verb::Descent(DescentOp::Objects { cover, .. }) => out.push(cover),
        Verb::Descent(DescentOp::Check { object }) => out.push(object),
        Verb::Descent(DescentOp::Equivalent { functor, .. }) => out.push(functor),
        Verb::Plus(PlusOp::Objects { base, .. }) => out.push(base),
        Verb::Plus(PlusOp::VerifyStack { cover, .. }) => out.push(cover),
        Verb::Plus(PlusOp::Groupoid { groupoid, .. }) => out.push(groupoid),
        Verb::Equivariant(EquivariantOp::Eval { groupoid, .. }) => out.push(groupoid),
        Verb::Equivariant(EquivariantOp::Pullback { functor, verify_witness, .. }) => {
            out.push(functor);
            out.extend(verify_witness.as_deref());
        }
        Verb::Equivariant(EquivariantOp::Descent { functor, .. }) => out.push(functor),
        Verb::Holonomy(HolonomyOp::Oriented { surface, form }) => out.extend([surface.as_path(), form.as_path()]),
        Verb::Holonomy(HolonomyOp::Jandl { orientifold }) => out.push(orientifold),
        Verb::Holonomy(HolonomyOp::Doublecover { surface }) => out.push(surface),
        Verb::Validate { path, .. } => out.push(path),
    }
    out
}

fn command_name(verb: &Verb) -> &'static str {
    match verb {
        Verb::Groupoid(_) => "groupoid check",
        Verb::Equiv(EquivOp::Check { .. }) => "equiv check",
        Verb::Equiv(EquivOp::Factorize { .. }) => "equiv factorize",
        Verb::Equiv(EquivOp::Morita { .. }) => "equiv morita",
        Verb::Prestack(_) => "prestack eval",
        Verb::Descent(DescentOp::Objects { .. }) => "descent objects",
        Verb::Descent(DescentOp::Check { .. }) => "descent check",
        Verb::Descent(DescentOp::Equivalent { .. }) => "descent equivalent",
        Verb::Plus(PlusOp::Objects { .. }) => "plus objects",
        Verb::Plus(PlusOp::VerifyStack { .. }) => "plus verify-stack",
        Verb::Plus(PlusOp::Groupoid { .. }) => "plus groupoid",
        Verb::Equivariant(EquivariantOp::Eval { .. }) => "equivariant eval",
        Verb::Equivariant(EquivariantOp::Pullback { .. }) => "equivariant pullback",
        Verb::Equivariant(EquivariantOp::Descent { .. }) => "equivariant descent",
        Verb::Holonomy(HolonomyOp::Oriented { .. }) => "holonomy oriented",
        Verb::Holonomy(HolonomyOp::Jandl { .. }) => "holonomy jandl",
        Verb::Holonomy(HolonomyOp::Doublecover { .. }) => "holonomy doublecover",
        Verb::Validate { .. } => "validate",
    }
}

/// Runs one parsed command and builds its report.
pub fn execute(verb: &Verb) -> Report {
    let start = Instant::now();
    let command = command_name(verb).to_string();
    let outcome = seed_from_env().and_then(|seed| {
        for p in paths(verb) {
            if !p.is_file() {
                return Err(CliError::Input { path: p.display().to_string(), message: "no such file".into() });
            }
        }
        dispatch(verb, seed).map(|f| (f, seed))
    });
    let timing_ms = start.elapsed().as_millis() as u64;
    match outcome {
        Ok((findings, seed)) => {
            let status = if findings.iter().all(|f| f.passed) { Status::Pass } else { Status::Fail };
            Report { command, status, findings, seed, timing_ms }
        }
        Err(e) => {
            let mut f = Finding::new("error", false, e.to_string());
            if let CliError::Syntax { path, line, column, .. } = &e {
                f.witness = json!({ "path": path, "line": line, "column": column });
            }
            Report { command, status: Status::Error, findings: vec![f], seed: None, timing_ms }
        }
    }
}

/// Parses arguments, runs the command, and returns the rendered output with its exit code.
pub fn run<I, T>(args: I) -> (String, i32)
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    match Cli::try_parse_from(&args) {
        Ok(cli) => {
            let r = execute(&cli.verb);
            (r.render(cli.format), r.status.exit_code())
        }
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand) {
                return (e.to_string().trim_end().to_string(), 0);
            }
            let wants_json = args.windows(2).any(|w| w[0] == "--format" && w[1] == "json") || args.iter().any(|a| a == "--format=json");
            if wants_json {
                let r = Report {
                    command: "usage".into(),
                    status: Status::Error,
                    findings: vec![Finding::new("error", false, e.to_string().trim_end())],
                    seed: None,
                    timing_ms: 0,
                };
                (r.render(Format::Json), 2)
            } else {
                (e.to_string().trim_end().to_string(), 2)
            }
        }
    }
}

fn dispatch(verb: &Verb, seed: Option<u64>) -> Outcome {
    match verb {
        Verb::Groupoid(GroupoidOp::Check { groupoid }) => groupoid_check(groupoid),
        Verb::Equiv(EquivOp::Check { functor, class, verify_witness }) => equiv_check(functor, *class, verify_witness.as_deref(), seed),
        Verb::Equiv(EquivOp::Factorize { functor }) => equiv_factorize(functor),
        Verb::Equiv(EquivOp::Morita { first, second, verify_witness }) => equiv_morita(first, second, verify_witness.as_deref()),
        Verb::Prestack(PrestackOp::Eval { instance: i, set }) => prestack_eval(i, set),
        Verb::Descent(DescentOp::Objects { instance: i, cover, unnormalized }) => descent_objects(i, cover, !unnormalized),
        Verb::Descent(DescentOp::Check { object }) => descent_check(object),
        Verb::Descent(DescentOp::Equivalent { functor, instance: i }) => descent_equivalent(functor, i),
        Verb::Plus(PlusOp::Objects { instance: i, base, bound, class }) => {
            let m = load::<SetFile>(base)?.build().map_err(at(base))?;
            plus_summary(plus_eval(&instance(i)?, &m, *class, *bound, DEFAULT_LIMIT)?)
        }
        Verb::Plus(PlusOp::VerifyStack { instance: i, cover, bound }) => plus_verify(i, cover, *bound),
        Verb::Plus(PlusOp::Groupoid { instance: i, groupoid, bound, class }) => {
            let g = load_groupoid(groupoid)?;
            plus_summary(plus_on_groupoid(&instance(i)?, &g, *class, *bound, DEFAULT_LIMIT)?)
        }
        Verb::Equivariant(EquivariantOp::Eval { instance: i, groupoid }) => equivariant_eval(i, groupoid),
        Verb::Equivariant(EquivariantOp::Pullback { functor, mode, instance: i, verify_witness }) => {
            harness(functor, *mode, i, verify_witness.as_deref(), seed)
        }
        Verb::Equivariant(EquivariantOp::Descent { functor, mode, instance: i }) => {
            let lf = load_functor(functor)?;
            let r = equivariant_descent(&instance(i)?, &lf.functor, &lf.source, &lf.target, *mode)?;
            Ok(vec![
                Finding::violations("grid", r.grid_violations.clone()),
                Finding::new("descent", r.holds, format!("{:?} mode", r.mode).to_lowercase()).with(json!(r.report)),
            ])
        }
        Verb::Holonomy(op) => holonomy(op),
        Verb::Validate { path, kind } => validate(path, *kind),
    }
}

fn groupoid_check(path: &Path) -> Outcome {
    let g = load_groupoid(path)?;
    let v = g.check_axioms();
    let comps = g.components();
    Ok(vec![
        Finding::violations("axioms", v),
        Finding::info(
            "shape",
            format!("{} objects, {} morphisms, {} components", g.n_objects(), g.n_morphisms(), comps.len()),
            json!({ "objects": g.n_objects(), "morphisms": g.n_morphisms(), "components": comps.len() }),
        ),
    ])
}

#[derive(Serialize, Deserialize)]
struct StrongWitness {
    quasi_inverse: GroupoidFunctor,
    unit: NatIso,
    counit: NatIso,
}

impl From<&StrongEquivalence> for StrongWitness {
    fn from(s: &StrongEquivalence) -> Self {
        StrongWitness { quasi_inverse: s.quasi_inverse.clone(), unit: s.unit.clone(), counit: s.counit.clone() }
    }
}

impl StrongWitness {
    fn into_strong(self) -> StrongEquivalence {
        StrongEquivalence { quasi_inverse: self.quasi_inverse, unit: self.unit, counit: self.counit }
    }
}

/// Witness payload of `name` in a JSON report written earlier.
fn stored_witness<T: DeserializeOwned>(report: &Path, name: &str) -> std::result::Result<T, CliError> {
    let r: Report = load(report)?;
    let f = r
        .finding(name)
        .ok_or_else(|| CliError::Input { path: report.display().to_string(), message: format!("no `{name}` finding") })?;
    serde_json::from_value(f.witness.clone())
        .map_err(|e| CliError::Input { path: report.display().to_string(), message: format!("`{name}` witness: {e}") })
}

fn equiv_check(path: &Path, class: CoverClass, verify: Option<&Path>, seed: Option<u64>) -> Outcome {
    let LoadedFunctor { source, target, functor: f } = load_functor(path)?;
    let fv = f.violations(&source, &target);
    if !fv.is_empty() {
        return Ok(vec![Finding::violations("functor", fv)]);
    }
    if let Some(r) = verify {
        let w: StrongWitness = stored_witness(r, "strong_equivalence")?;
        return Ok(vec![Finding::violations("witness", w.into_strong().violations(&f, &source, &target))]);
    }
    let er = equivalence_report(&f, &source, &target);
    let label = |o: usize| source.objects.label(o).to_string();
    let mut out = vec![Finding::new("functor", true, "no violations")];
    let ff = Finding::new("fully_faithful", er.fully_faithful, if er.fully_faithful { "bijective on hom-sets" } else { "hom-set mismatch" });
    out.push(match &er.fiber_defect {
        Some(d) => ff.with(json!(d)),
        None => ff,
    });
    let es = er.essentially_surjective(class);
    let es_f = Finding::new("essentially_surjective", es, format!("{} class", serde_json::to_value(class).unwrap().as_str().unwrap()));
    out.push(match &er.section {
        Some(s) => es_f.with(json!(s
            .iter()
            .enumerate()
            .map(|(w, &(x, l))| (target.objects.label(w).to_string(), label(x), target.morphisms.label(l).to_string()))
            .collect::<Vec<_>>())),
        None => {
            let missed: Vec<String> = (0..target.n_objects())
                .filter(|&w| !(0..source.n_objects()).any(|x| !target.hom(f.f0[x], w).is_empty()))
                .map(|w| target.objects.label(w).to_string())
                .collect();
            es_f.with(json!({ "unreached": missed }))
        }
    });
    if er.weak(class) {
        let ranks = rank_table(seed, source.n_objects(), target.n_morphisms());
        let rank = |x: usize, l: usize| ranks[x * target.n_morphisms() + l];
        let se = strong_equivalence_by(&f, &source, &target, &rank)
            .ok_or_else(|| CliError::Run(Error::Inconsistent("weak equivalence without quasi-inverse".into())))?;
        let v = se.violations(&f, &source, &target);
        out.push(Finding::new("strong_equivalence", v.is_empty(), "quasi-inverse with unit and counit").with(json!(StrongWitness::from(&se))));
    }
    Ok(out)
}

#[derive(Serialize, Deserialize)]
struct FactorWitness {
    middle: GroupoidFile,
    g: GroupoidFunctor,
    h: GroupoidFunctor,
    objects: Vec<(usize, usize)>,
}

impl FactorWitness {
    fn of(fac: &Factorization) -> Self {
        FactorWitness { middle: GroupoidFile::from_groupoid(&fac.middle), g: fac.g.clone(), h: fac.h.clone(), objects: fac.objects.clone() }
    }

    fn build(&self) -> crate::Result<Factorization> {
        Ok(Factorization { middle: self.middle.build()?, g: self.g.clone(), h: self.h.clone(), objects: self.objects.clone() })
    }
}

fn equiv_factorize(path: &Path) -> Outcome {
    let LoadedFunctor { source, target, functor: f } = load_functor(path)?;
    let fac = factorize(&f, &source, &target)?;
    let v = fac.violations(&f, &source, &target);
    let detail = format!("middle groupoid with {} objects and {} morphisms", fac.middle.n_objects(), fac.middle.n_morphisms());
    Ok(vec![Finding::new("factorization", v.is_empty(), detail).with(json!({ "violations": v, "factorization": FactorWitness::of(&fac) }))])
}

#[derive(Serialize, Deserialize)]
struct ZigzagWitness {
    middle: GroupoidFile,
    to_first: GroupoidFunctor,
    to_second: GroupoidFunctor,
}

fn equiv_morita(first: &Path, second: &Path, verify: Option<&Path>) -> Outcome {
    let (a, b) = (load_groupoid(first)?, load_groupoid(second)?);
    if let Some(r) = verify {
        let w: ZigzagWitness = stored_witness(r, "morita")?;
        let z = Zigzag { middle: w.middle.build().map_err(at(r))?, to_first: w.to_first, to_second: w.to_second };
        return Ok(vec![Finding::violations("witness", z.violations(&a, &b))]);
    }
    Ok(vec![match morita_equivalent(&a, &b) {
        MoritaVerdict::Equivalent(z) => {
            let v = z.violations(&a, &b);
            let w = ZigzagWitness { middle: GroupoidFile::from_groupoid(&z.middle), to_first: z.to_first, to_second: z.to_second };
            Finding::new("morita", v.is_empty(), "zigzag of weak equivalences").with(json!(w))
        }
        MoritaVerdict::Distinct(reason) => Finding::new("morita", false, reason),
    }])
}

fn prestack_eval(name: &str, path: &Path) -> Outcome {
    let inst = instance(name)?;
    let m = load::<SetFile>(path)?.build().map_err(at(path))?;
    let b = inst.eval(&m, DEFAULT_LIMIT)?;
    let (o, c1, c2) = b.counts();
    Ok(vec![
        Finding::violations("bicategory_axioms", b.axiom_violations()),
        Finding::info(
            "counts",
            format!("{o} objects, {c1} 1-cells, {c2} 2-cells, {} iso classes", b.n_iso_classes()),
            json!({ "objects": o, "one_cells": c1, "two_cells": c2, "iso_classes": b.n_iso_classes() }),
        ),
    ])
}

fn descent_objects(name: &str, path: &Path, normalized: bool) -> Outcome {
    let inst = instance(name)?;
    let c = load::<CoverFile>(path)?.build().map_err(at(path))?;
    let desc = descent_bicategory(&inst, &c, normalized, DEFAULT_LIMIT)?;
    let (eval_m, tau) = tau_functor(&inst, &c, &desc, normalized, DEFAULT_LIMIT)?;
    let (o, c1, c2) = desc.counts();
    let er = is_equivalence(&tau, &eval_m, &desc);
    let nerve = cover_nerve(&c, 4)?;
    let space = DescentSpace::new(&inst, &nerve.simplicial, normalized)?;
    let reps: Vec<DescentObject> = desc.iso_classes().iter().map(|&i| space.decode_object(&desc.objects[i])).collect();
    Ok(vec![
        Finding::info(
            "counts",
            format!("{o} objects, {c1} 1-cells, {c2} 2-cells, {} iso classes", reps.len()),
            json!({ "objects": o, "one_cells": c1, "two_cells": c2, "representatives": reps }),
        ),
        Finding::new("tau_fully_faithful", er.fully_faithful, "equivalences on Hom categories"),
        Finding::new("tau_equivalence", er.equivalence(), "every descent object is glued from the base").with(json!(er)),
    ])
}

fn descent_check(path: &Path) -> Outcome {
    let file: DescentObjectFile = load(path)?;
    let inst = instance(&file.instance)?;
    let c = file.cover.build().map_err(at(path))?;
    let nerve = cover_nerve(&c, 4)?;
    let x = &nerve.simplicial;
    let (n1, n2) = (x.size(1), x.size(2));
    if file.p.len() != n1 || file.mu.len() != n2 {
        return Err(CliError::Input {
            path: path.display().to_string(),
            message: format!("expected {n1} values of p and {n2} values of mu, found {} and {}", file.p.len(), file.mu.len()),
        });
    }
    let mut range = Vec::new();
    range.extend(file.p.iter().enumerate().filter(|(_, &v)| v >= inst.h).map(|(i, v)| format!("p[{i}] = {v} is not below {}", inst.h)));
    range.extend(file.mu.iter().enumerate().filter(|(_, &v)| v >= inst.k).map(|(i, v)| format!("mu[{i}] = {v} is not below {}", inst.k)));
    if !range.is_empty() {
        return Ok(vec![Finding::violations("ranges", range)]);
    }
    let space = DescentSpace::new(&inst, x, file.normalized)?;
    let o = DescentObject { p: file.p, mu: file.mu };
    Ok(vec![Finding::violations("cocycle", space.object_violations(&o))])
}

fn descent_equivalent(path: &Path, name: &str) -> Outcome {
    let inst = instance(name)?;
    let lf = load_functor(path)?;
    let pb = pullback_equivariant(&inst, &lf.functor, &lf.source, &lf.target, true, DEFAULT_LIMIT)?;
    let er = is_equivalence(&pb.functor, &pb.over_dst, &pb.over_src);
    Ok(vec![
        Finding::violations("bifunctor", pb.functor.violations(&pb.over_dst, &pb.over_src)),
        Finding::new("fully_faithful", er.fully_faithful, "equivalences on Hom categories"),
        Finding::new("equivalence", er.equivalence(), "pullback is a biequivalence").with(json!(er)),
    ])
}

fn plus_summary(s: crate::plus::PlusSummary) -> Outcome {
    Ok(vec![
        Finding::new("witnesses", s.witnesses_verified, format!("{} objects reduced to the base", s.objects)),
        Finding::info("classes", format!("{} of {} base classes hit", s.classes.len(), s.base_classes), json!(s)),
    ])
}

fn plus_verify(name: &str, path: &Path, bound: usize) -> Outcome {
    let inst = instance(name)?;
    let c = load::<CoverFile>(path)?.build().map_err(at(path))?;
    let r = verify_stack(&inst, &c, bound)?;
    let esso = Finding::new("stack", r.stack, "every descent object for X is glued from the base");
    Ok(vec![
        Finding::new("prestack", r.prestack, "τ for X is an equivalence on Hom categories"),
        if r.stack { esso } else { esso.with(json!({ "failures": r.failures })) },
        Finding::new("tau_witness", r.tau_witness, "homotopy inverse of τ re-checked"),
        Finding::new("plus_stack", r.plus_stack, format!("{} source pairs, {} target covers", r.plus_pairs, r.plus_targets))
            .with(json!(r)),
    ])
}

fn equivariant_eval(name: &str, path: &Path) -> Outcome {
    let inst = instance(name)?;
    let g = load_groupoid(path)?;
    let b = eval_on_groupoid(&inst, &g, true, DEFAULT_LIMIT)?;
    let h = eval_homotopy(&inst, &g)?;
    let matches = b.n_iso_classes() as u64 == h.pi0;
    Ok(vec![
        Finding::violations("bicategory_axioms", b.axiom_violations()),
        Finding::new("iso_classes", matches, format!("{} enumerated, {} from cohomology", b.n_iso_classes(), h.pi0)).with(json!(h)),
    ])
}

#[derive(Serialize, Deserialize)]
struct HarnessWitness {
    factorization: FactorWitness,
    strong_part: Option<StrongWitness>,
}

fn harness(path: &Path, mode: Strength, name: &str, verify: Option<&Path>, seed: Option<u64>) -> Outcome {
    let inst = instance(name)?;
    let LoadedFunctor { source, target, functor: f } = load_functor(path)?;
    if let Some(r) = verify {
        let w: HarnessWitness = stored_witness(r, "factorization")?;
        let fac = w.factorization.build().map_err(at(r))?;
        let mut v = fac.violations(&f, &source, &target);
        match w.strong_part {
            Some(s) => v.extend(s.into_strong().violations(&fac.g, &source, &fac.middle)),
            None => v.push("no quasi-inverse for the strong part".into()),
        }
        return Ok(vec![Finding::violations("witness", v)]);
    }
    let r = pullback_harness(&inst, &f, &source, &target, mode)?;
    let fac = factorize(&f, &source, &target)?;
    let ranks = rank_table(seed, source.n_objects(), fac.middle.n_morphisms());
    let rank = |x: usize, l: usize| ranks[x * fac.middle.n_morphisms() + l];
    let strong = strong_equivalence_by(&fac.g, &source, &fac.middle, &rank);
    let w = HarnessWitness { factorization: FactorWitness::of(&fac), strong_part: strong.as_ref().map(StrongWitness::from) };
    Ok(vec![
        Finding::new("factorization", r.factorization.is_empty() && r.strong_part, "strong part with quasi-inverse").with(json!(w)),
        Finding::new("surjective_part", r.surjective_part, "descent along the surjective part"),
        Finding::new("diagonals", r.diagonals_strong, "diagonals into fiber powers are strong"),
        Finding::new("route", r.route, "pullback is an equivalence via the factorization"),
        Finding::new("direct", r.direct, "pullback is an equivalence on cochain windows"),
        Finding::new("agree", r.agree, "both decisions coincide"),
    ])
}

fn holonomy(op: &HolonomyOp) -> Outcome {
    match op {
        HolonomyOp::Oriented { surface, form } => {
            let s = load::<SurfaceFile>(surface)?.build().map_err(at(surface))?;
            let w = load::<FormFile>(form)?.build(s).map_err(at(form))?;
            let h = oriented_holonomy(&w)?;
            Ok(vec![Finding::info("holonomy", format!("exponent {h}"), json!({ "exponent": h.to_string(), "total": w.total().to_string() }))])
        }
        HolonomyOp::Jandl { orientifold } => {
            let o = load::<OrientifoldFile>(orientifold)?.build().map_err(at(orientifold))?;
            let h = jandl_holonomy(&o)?;
            let mut out = vec![Finding::info("holonomy", format!("exponent {h}"), json!({ "exponent": h.to_string() }))];
            if o.surface.faces.len() <= SWEEP_FACES {
                let all = o.all_domain_values()?;
                let vals: Vec<String> = all.iter().map(|q| q.to_string()).collect();
                out.push(Finding::new("domain_independence", all.len() == 1, format!("{} distinct values over all fundamental domains", all.len())).with(json!(vals)));
            }
            Ok(out)
        }
        HolonomyOp::Doublecover { surface } => {
            let s = load::<SurfaceFile>(surface)?.build().map_err(at(surface))?;
            let r = orientation_double_cover(&s)?.report();
            let detail = format!("Euler {} over {}, {} components", r.total_euler, r.base_euler, r.total_components);
            let ok = r.violations.is_empty();
            Ok(vec![Finding::new("double_cover", ok, detail).with(json!(r))])
        }
    }
}

fn detect(v: &Value) -> Option<Kind> {
    let o = v.as_object()?;
    let has = |k: &str| o.contains_key(k);
    Some(if has("elements") {
        Kind::Set
    } else if has("identities") {
        Kind::Groupoid
    } else if has("source") && has("target") {
        Kind::Functor
    } else if has("instance") {
        Kind::DescentObject
    } else if has("map") {
        Kind::Cover
    } else if has("surface") {
        Kind::Orientifold
    } else if has("faces") || has("vertices") {
        Kind::Surface
    } else if has("values") {
        Kind::Form
    } else {
        return None;
    })
}

fn shape<T: DeserializeOwned>(path: &Path, v: Value) -> std::result::Result<T, CliError> {
    serde_json::from_value(v).map_err(|e| CliError::Input { path: path.display().to_string(), message: e.to_string() })
}

fn groupoid_dups(g: &GroupoidFile) -> Vec<String> {
    duplicates(g.labels())
}

/// Structural checks only: the file parses against its schema and no list repeats a label.
fn validate(path: &Path, kind: Option<Kind>) -> Outcome {
    let v: Value = load(path)?;
    let kind = match kind.or_else(|| detect(&v)) {
        Some(k) => k,
        None => return Err(CliError::Input { path: path.display().to_string(), message: "cannot tell which kind of file this is".into() }),
    };
    let dups = match kind {
        Kind::Set => duplicates(&shape::<SetFile>(path, v)?.elements),
        Kind::Groupoid => groupoid_dups(&shape::<GroupoidFile>(path, v)?),
        Kind::Functor => {
            let f: FunctorFile = shape(path, v)?;
            let mut d = groupoid_dups(&f.source);
            d.extend(groupoid_dups(&f.target));
            d
        }
        Kind::Cover => {
            let c: CoverFile = shape(path, v)?;
            let mut d = duplicates(&c.base);
            d.extend(duplicates(&c.total));
            d
        }
        Kind::Surface => duplicates(&shape::<SurfaceFile>(path, v)?.vertices),
        Kind::Form => {
            shape::<FormFile>(path, v)?;
            Vec::new()
        }
        Kind::Orientifold => duplicates(&shape::<OrientifoldFile>(path, v)?.surface.vertices),
        Kind::DescentObject => {
            let c = shape::<DescentObjectFile>(path, v)?.cover;
            let mut d = duplicates(&c.base);
            d.extend(duplicates(&c.total));
            d
        }
    };
    let kind_name = format!("{kind:?}");
    let f = Finding::new("labels", dups.is_empty(), if dups.is_empty() {
        format!("{kind_name} file, labels distinct")
    } else {
        format!("duplicate label `{}`", dups.join("`, `"))
    });
    Ok(vec![if dups.is_empty() { f } else { f.with(json!({ "duplicates": dups })) }])
}
