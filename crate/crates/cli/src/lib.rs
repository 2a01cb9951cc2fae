//! The `qtorsion` command-line front end.
//!
//! Exit codes: 0 success, 1 a check or expectation failed, 2 bad input.

pub mod document;

use std::io::{Read, Write};

use clap::{Parser, Subcommand};
use nalgebra::DVector;
use qtorsion::classify::{classify_gh_conformal, universal_identities, Check};
use qtorsion::corpus::{self, format_form, parse_form, ExampleParams, Status, EXAMPLES};
use qtorsion::transforms::{
    conformal_differentials, conformal_lee_forms, conformal_shift, conformal_table_checks, d_squared_defect, twist,
    twist_invariance_check, twist_prediction_checks, TwistData,
};
use qtorsion::{AqhModel, Quat, TorsionReport, DEFAULT_TOL};
use serde::Serialize;

pub use document::{ModelDocument, ReportDocument};

#[derive(Parser, Debug)]
#[command(name = "qtorsion", version, about = "Intrinsic torsion of invariant almost quaternion-Hermitian structures")]
pub struct Cli {
    /// Machine-readable output.
    #[arg(long, global = true)]
    pub json: bool,
    /// Relative tolerance for zero tests.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Classify a model read from a JSON file (`-` for stdin).
    Analyze { path: String },
    /// Analyse a built-in example and compare it with the reference table.
    Example {
        name: String,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        k: Option<f64>,
        #[arg(long)]
        n: Option<usize>,
        /// Print the example as a model document instead.
        #[arg(long)]
        model: bool,
    },
    /// List the built-in examples.
    ListExamples,
    /// Twist a model by a closed two-form along a vector.
    Twist {
        path: String,
        /// Closed two-form, e.g. `a1^a3 + a2^a4`.
        #[arg(long)]
        form: String,
        /// Direction, a coframe name or a combination such as `b3 + b4`.
        #[arg(long)]
        vector: String,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        a: f64,
        /// Print the twisted model as a model document instead.
        #[arg(long)]
        emit_model: bool,
    },
    /// Conformal change `e^{2σ} g` by a closed one-form `dσ`.
    Conformal {
        path: String,
        #[arg(long, allow_hyphen_values = true)]
        dsigma: String,
    },
    /// Reference table, identities and tolerance stability on all examples.
    Selftest,
}

/// Error carrying an exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

fn input_error(message: impl Into<String>) -> Failure {
    Failure { code: 2, message: message.into() }
}

impl From<qtorsion::Error> for Failure {
    fn from(e: qtorsion::Error) -> Self {
        input_error(e.to_string())
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit code.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn read_input(path: &str) -> Result<String, Failure> {
    if path == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| input_error(format!("stdin: {e}")))?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).map_err(|e| input_error(format!("{path}: {e}")))
    }
}

/// Reads and validates a model file; returns it with its own tolerance.
pub fn load_model(path: &str) -> Result<(AqhModel, Option<f64>), Failure> {
    let text = read_input(path)?;
    let doc = ModelDocument::parse(&text).map_err(|e| input_error(format!("{path}: {e}")))?;
    let model = doc.build().map_err(|e| input_error(format!("{path}: {e}")))?;
    Ok((model, doc.tolerance))
}

fn tolerance(cli: &Cli, from_file: Option<f64>) -> Result<f64, Failure> {
    let t = cli.tol.or(from_file).unwrap_or(DEFAULT_TOL);
    if t > 0.0 && t.is_finite() {
        Ok(t)
    } else {
        Err(input_error("--tol must be positive"))
    }
}

fn emit<T: Serialize>(out: &mut dyn Write, json: bool, value: &T, human: impl FnOnce() -> String) -> Result<(), Failure> {
    let text = if json { serde_json::to_string_pretty(value).expect("serialisable") + "\n" } else { human() };
    out.write_all(text.as_bytes()).map_err(|e| input_error(format!("write: {e}")))
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<i32, Failure> {
    match &cli.command {
        Command::Analyze { path } => {
            let (model, file_tol) = load_model(path)?;
            let tol = tolerance(cli, file_tol)?;
            let doc = ReportDocument::new(&model, &TorsionReport::from_model(&model, tol));
            emit(out, cli.json, &doc, || doc.render())?;
            Ok(0)
        }
        Command::Example { name, m, k, n, model } => example(cli, out, name, (*m, *k, *n), *model),
        Command::ListExamples => {
            #[derive(Serialize)]
            struct Entry {
                name: &'static str,
                params: &'static str,
                description: &'static str,
            }
            let list: Vec<Entry> =
                EXAMPLES.iter().map(|e| Entry { name: e.name, params: e.params, description: e.description }).collect();
            emit(out, cli.json, &list, || {
                list.iter()
                    .map(|e| {
                        let p = if e.params.is_empty() { String::new() } else { format!(" [--{}]", e.params) };
                        format!("{:<8}{p:<7} {}\n", e.name, e.description)
                    })
                    .collect()
            })?;
            Ok(0)
        }
        Command::Twist { path, form, vector, a, emit_model } => {
            let (model, file_tol) = load_model(path)?;
            let tol = tolerance(cli, file_tol)?;
            twist_command(cli, out, &model, form, vector, *a, *emit_model, tol)
        }
        Command::Conformal { path, dsigma } => {
            let (model, file_tol) = load_model(path)?;
            let tol = tolerance(cli, file_tol)?;
            conformal_command(cli, out, &model, dsigma, tol)
        }
        Command::Selftest => {
            let tol = tolerance(cli, None)?;
            let report = selftest(tol);
            emit(out, cli.json, &report, || report.render())?;
            Ok(if report.passed { 0 } else { 1 })
        }
    }
}

#[derive(Serialize)]
struct CheckOutcome {
    name: String,
    status: &'static str,
    residual: f64,
}

fn status_word(s: Status) -> &'static str {
    match s {
        Status::Pass => "PASS",
        Status::Fail => "FAIL",
        Status::Misprint => "MISPRINT",
    }
}

fn check_outcome(c: &Check) -> CheckOutcome {
    CheckOutcome { name: c.name.clone(), status: if c.passed { "PASS" } else { "FAIL" }, residual: c.residual }
}

fn render_checks(checks: &[CheckOutcome]) -> String {
    checks.iter().map(|c| format!("{:<8} {} (residual {:.3e})\n", c.status, c.name, c.residual)).collect()
}

fn example(
    cli: &Cli,
    out: &mut dyn Write,
    name: &str,
    (m, k, n): (Option<usize>, Option<f64>, Option<usize>),
    as_model: bool,
) -> Result<i32, Failure> {
    let d = ExampleParams::default();
    let p = ExampleParams { m: m.unwrap_or(d.m), k: k.unwrap_or(d.k), n: n.unwrap_or(d.n) };
    if p.m == 0 || p.n < 2 || !(p.k.is_finite() && p.k != 0.0) {
        return Err(input_error("parameters need m ≥ 1, n ≥ 2 and k ≠ 0"));
    }
    let model = corpus::example(name, p)?;
    let tol = tolerance(cli, None)?;
    if as_model {
        writeln!(out, "{}", ModelDocument::from_model(&model, cli.tol).to_json()).map_err(|e| input_error(e.to_string()))?;
        return Ok(0);
    }
    #[derive(Serialize)]
    struct ExampleOutput {
        name: String,
        report: ReportDocument,
        checks: Vec<CheckOutcome>,
    }
    let report = ReportDocument::new(&model, &TorsionReport::from_model(&model, tol));
    let checks: Vec<CheckOutcome> = corpus::checks_for_example(name, p, tol)?
        .into_iter()
        .map(|c| CheckOutcome { name: c.name, status: status_word(c.status), residual: c.residual })
        .collect();
    let failed = checks.iter().any(|c| c.status == "FAIL");
    let doc = ExampleOutput { name: name.to_string(), report, checks };
    emit(out, cli.json, &doc, || {
        let mut s = doc.report.render();
        s.push_str("reference checks:\n");
        s.push_str(&render_checks(&doc.checks));
        s
    })?;
    Ok(if failed { 1 } else { 0 })
}

#[derive(Serialize)]
struct TwistOutput {
    mu: [f64; 3],
    alpha: String,
    kappa_vanishes: bool,
    d_squared: f64,
    before: ReportDocument,
    after: ReportDocument,
    predictions: Vec<CheckOutcome>,
    invariance_applies: bool,
    invariances: Vec<CheckOutcome>,
}

#[allow(clippy::too_many_arguments)]
fn twist_command(
    cli: &Cli,
    out: &mut dyn Write,
    model: &AqhModel,
    form: &str,
    vector: &str,
    a: f64,
    emit_model: bool,
    tol: f64,
) -> Result<i32, Failure> {
    let names = model.algebra().names();
    let f = parse_form(form, names, Some(2))?;
    let x: DVector<f64> = parse_form(vector, names, Some(1))?.to_vector();
    let data = TwistData::new(model, f, x, a)?;
    let twisted = twist(model, &data)?;
    if emit_model {
        writeln!(out, "{}", ModelDocument::from_model(&twisted, cli.tol).to_json()).map_err(|e| input_error(e.to_string()))?;
        return Ok(0);
    }
    let before = TorsionReport::from_model(model, tol);
    let after = TorsionReport::from_model(&twisted, tol);
    let predictions: Vec<CheckOutcome> =
        twist_prediction_checks(model, &before, &after, &data, tol).iter().map(check_outcome).collect();
    let inv = twist_invariance_check(model, &before, &after, &data, tol);
    let doc = TwistOutput {
        mu: data.mu,
        alpha: format_form(&data.alpha, names),
        kappa_vanishes: data.kappa_vanishes(tol),
        d_squared: d_squared_defect(twisted.algebra()),
        before: ReportDocument::new(model, &before),
        after: ReportDocument::new(&twisted, &after),
        predictions,
        invariance_applies: inv.applies,
        invariances: inv.checks.iter().map(check_outcome).collect(),
    };
    let failed = doc.predictions.iter().chain(&doc.invariances).any(|c| c.status == "FAIL") || doc.d_squared > tol;
    emit(out, cli.json, &doc, || {
        let mut s = format!(
            "curvature split: μ = {:?}, α = {}, κ {}\n(d^W)² defect {:.3e}\nclass before: {}\nclass after:  {}\n",
            doc.mu,
            doc.alpha,
            if doc.kappa_vanishes { "= 0" } else { "≠ 0" },
            doc.d_squared,
            doc.before.label,
            doc.after.label
        );
        s.push_str("closed-form predictions:\n");
        s.push_str(&render_checks(&doc.predictions));
        if doc.invariance_applies {
            s.push_str("invariances:\n");
            s.push_str(&render_checks(&doc.invariances));
        } else {
            s.push_str("invariances: not applicable (κ ≠ 0)\n");
        }
        s.push_str("twisted structure:\n");
        s.push_str(&doc.after.render());
        s
    })?;
    Ok(if failed { 1 } else { 0 })
}

#[derive(Serialize)]
struct ConformalOutput {
    dsigma: String,
    before_label: String,
    after_label: String,
    after: ReportDocument,
    lee_forms: [String; 3],
    gray_hervella: [String; 3],
    table: Vec<CheckOutcome>,
    /// Largest difference between the transformed and recomputed torsion.
    shift_consistency: f64,
}

fn conformal_command(cli: &Cli, out: &mut dyn Write, model: &AqhModel, dsigma: &str, tol: f64) -> Result<i32, Failure> {
    let names = model.algebra().names();
    let ds = parse_form(dsigma, names, Some(1))?;
    let dw = conformal_differentials(model, &ds)?;
    let before = TorsionReport::from_model(model, tol);
    let after = TorsionReport::from_differentials(model.triple(), model.n(), &dw, tol)?;
    let shifted = conformal_shift(model, &before, &ds)?;
    let shift_consistency = Quat::ALL
        .iter()
        .map(|&a| {
            let i = a.index();
            after.beta[i].max_diff(&shifted.beta[i]).max(after.a_lambda[i].max_diff(&shifted.a_lambda[i]))
        })
        .fold(0.0, f64::max);
    let table: Vec<CheckOutcome> = conformal_table_checks(model, &before, &after, &ds, tol).iter().map(check_outcome).collect();
    // The report of the new structure: same algebra and triple, new dω.
    let mut after_doc = ReportDocument::new(model, &after);
    for a in Quat::ALL {
        after_doc.forms.insert(format!("dw[{}]", a.name()), format_form(&dw[a.index()], names));
    }
    let lee = conformal_lee_forms(model, &ds)?;
    for a in Quat::ALL {
        after_doc.forms.insert(format!("lee[{}]", a.name()), format_form(&lee[a.index()], names));
    }
    let gh = Quat::ALL.map(|a| classify_gh_conformal(model, a, &ds, tol).label);
    after_doc.gray_hervella.clear();
    after_doc.hkt.is_hkt = Quat::ALL.iter().all(|&a| dw[a.index()].act(model.endo(a)).approx_eq(&dw[0].act(model.endo(Quat::I)), tol));
    after_doc.hkt.torsion = None;
    let doc = ConformalOutput {
        dsigma: format_form(&ds, names),
        before_label: before.label(),
        after_label: after.label(),
        after: after_doc,
        lee_forms: lee.map(|l| format_form(&l, names)),
        gray_hervella: gh,
        table,
        shift_consistency,
    };
    let scale = before.scale.max(after.scale);
    let failed = doc.table.iter().any(|c| c.status == "FAIL") || qtorsion::is_nonzero(shift_consistency, scale, tol);
    emit(out, cli.json, &doc, || {
        let mut s = format!(
            "dσ = {}\nclass before: {}\nclass after:  {}\nGray–Hervella after: I {}, J {}, K {}\nHKT after: {}\n",
            doc.dsigma,
            doc.before_label,
            doc.after_label,
            doc.gray_hervella[0],
            doc.gray_hervella[1],
            doc.gray_hervella[2],
            if doc.after.hkt.is_hkt { "yes" } else { "no" }
        );
        s.push_str("transformation table:\n");
        s.push_str(&render_checks(&doc.table));
        s.push_str(&format!("shift law vs recomputation: {:.3e}\n", doc.shift_consistency));
        s.push_str("forms after the change:\n");
        for (k, v) in &doc.after.forms {
            s.push_str(&format!("  {k} = {v}\n"));
        }
        s
    })?;
    Ok(if failed { 1 } else { 0 })
}

/// Outcome of `selftest`.
#[derive(Serialize)]
pub struct SelftestReport {
    pub passed: bool,
    pub golden: Vec<(String, &'static str)>,
    pub identity_failures: Vec<String>,
    pub d_squared: f64,
    pub tolerance_sensitive: Vec<String>,
}

impl SelftestReport {
    fn render(&self) -> String {
        let mut s = String::new();
        for (name, st) in &self.golden {
            s.push_str(&format!("{st:<8} {name}\n"));
        }
        for f in &self.identity_failures {
            s.push_str(&format!("FAIL     identity: {f}\n"));
        }
        s.push_str(&format!("largest d² on the examples: {:.3e}\n", self.d_squared));
        for t in &self.tolerance_sensitive {
            s.push_str(&format!("tolerance-sensitive: {t}\n"));
        }
        s.push_str(if self.passed { "selftest passed\n" } else { "selftest FAILED\n" });
        s
    }
}

/// Every example at every parameter value used by the reference table.
pub fn example_models() -> Vec<(String, AqhModel)> {
    let mut out = Vec::new();
    for e in EXAMPLES.iter() {
        let variants: Vec<ExampleParams> = match e.params {
            "m" => [1, 2].map(|m| ExampleParams { m, ..Default::default() }).to_vec(),
            "k" => [1.0, 0.5, 2.0].map(|k| ExampleParams { k, ..Default::default() }).to_vec(),
            "n" => [2, 3].map(|n| ExampleParams { n, ..Default::default() }).to_vec(),
            _ => vec![ExampleParams::default()],
        };
        for p in variants {
            let label = match e.params {
                "m" => format!("{}(m={})", e.name, p.m),
                "k" => format!("{}(k={})", e.name, p.k),
                "n" => format!("{}(n={})", e.name, p.n),
                _ => e.name.to_string(),
            };
            out.push((label, corpus::example(e.name, p).expect("built-in example")));
        }
    }
    out
}

/// Flags of one structure at `tol`, `10 tol` and `tol / 10` agree.
pub fn tolerance_stable(model: &AqhModel, tol: f64) -> bool {
    let f = TorsionReport::from_model(model, tol).flags;
    [tol * 10.0, tol / 10.0].iter().all(|&t| TorsionReport::from_model(model, t).flags == f)
}

pub fn selftest(tol: f64) -> SelftestReport {
    let golden: Vec<(String, &'static str)> = match corpus::all_golden_checks(tol) {
        Ok(v) => v.into_iter().map(|c| (c.name, status_word(c.status))).collect(),
        Err(e) => vec![(format!("reference table: {e}"), "FAIL")],
    };
    let mut identity_failures = Vec::new();
    let mut d_squared: f64 = 0.0;
    let mut tolerance_sensitive = Vec::new();
    for (name, m) in example_models() {
        let r = TorsionReport::from_model(&m, tol);
        for (what, v) in r.identity_residuals(m.triple()) {
            if qtorsion::is_nonzero(v, r.scale, tol) {
                identity_failures.push(format!("{name}: {what} ({v:.3e})"));
            }
        }
        for c in universal_identities(&m, &r, tol).into_iter().filter(|c| !c.passed) {
            identity_failures.push(format!("{name}: {} ({:.3e})", c.name, c.residual));
        }
        d_squared = d_squared.max(d_squared_defect(m.algebra()));
        if !tolerance_stable(&m, tol) {
            tolerance_sensitive.push(name);
        }
    }
    let passed = golden.iter().all(|(_, s)| *s != "FAIL")
        && identity_failures.is_empty()
        && d_squared <= tol
        && tolerance_sensitive.is_empty();
    SelftestReport { passed, golden, identity_failures, d_squared, tolerance_sensitive }
}
