//! The `wct` command line: read a JSON space spec, run one analysis, print
//! JSON (or CSV for spectra and classification tables).
//!
//! Exit codes: 0 on success (including negative verdicts), 2 for usage
//! errors and malformed specs, 3 when the spec is valid but the analysis
//! precondition fails.

use std::io::Read;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use crate::error::Error;
use crate::exec::Execution;
use crate::expansivity::{classify, reduce_to_emv, ClassificationReport, ClassifyOptions};
use crate::expect::block_averages;
use crate::gallery::{geometric_nat_space, product_space, symmetric_space};
use crate::io::{read_problem, Problem, SpaceSpec, SpecError};
use crate::measure::AtomicMeasureSpace;
use crate::operator::{norm_bound, DomainVerdict, WctOperator};
use crate::structure::{polar_decompose, polar_residuals, spectrum, SpectrumReport};
use crate::C64;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_PRECONDITION: i32 = 3;

/// Relative size below which computed eigenvalues are reported as 0.
const NOISE: f64 = 1e-14;

#[derive(Parser, Debug)]
#[command(name = "wct", version, about = "Analyse weighted conditional type operators M_w E M_u")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Spec file; standard input when omitted.
    input: Option<PathBuf>,
    /// Exponent of L^p; overrides the spec's "p" (default 2).
    #[arg(long)]
    p: Option<f64>,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Domain verdict, J − 1 and the norm bound.
    Report(Common),
    /// E(f) for the spec function "f".
    Expect(Common),
    /// Predicted and computed spectrum (p = 2).
    Spectrum(Common),
    /// Polar decomposition with residuals (p = 2).
    Polar(Common),
    /// k-isometry / k-expansive / k-hyperexpansive classification (p = 2).
    Classify {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 4)]
        kmax: usize,
        #[arg(long, default_value_t = 20)]
        horizon: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Emit the spec of a gallery family.
    Gallery {
        #[command(subcommand)]
        family: Family,
    },
}

#[derive(Subcommand, Debug)]
enum Family {
    /// Midpoint grid on [−1, 1] paired into {t, −t}.
    Symmetric { n_pairs: usize },
    /// Geometric measure on {1..N} with blocks 3ℕ and its complement.
    Geometric { p: f64, n: usize },
    /// Product of two uniform probability spaces.
    Product { n1: usize, n2: usize },
}

/// Result of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Self {
            code: EXIT_OK,
            stdout,
            stderr: String::new(),
        }
    }

    fn fail(code: i32, kind: &str, field: Option<&str>, message: String) -> Self {
        let mut err = Map::new();
        err.insert("kind".into(), json!(kind));
        if let Some(field) = field {
            err.insert("field".into(), json!(field));
        }
        err.insert("message".into(), json!(message));
        Self {
            code,
            stdout: render(&json!({ "error": err })),
            stderr: format!("error: {message}\n"),
        }
    }
}

/// Runs the CLI on `argv` (program name first), reading the spec from
/// `stdin` when no path is given.
pub fn run<I, S>(argv: I, stdin: &mut dyn Read) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            return if code == EXIT_OK {
                Outcome::ok(text)
            } else {
                Outcome {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            };
        }
    };
    match cli.command {
        Command::Gallery { family } => gallery(family),
        Command::Report(common) => with_problem(&common, stdin, |prob, p| report(prob, p, &common)),
        Command::Expect(common) => with_problem(&common, stdin, |prob, _| expect(prob, &common)),
        Command::Spectrum(common) => with_problem(&common, stdin, |prob, p| spectrum_cmd(prob, p, &common)),
        Command::Polar(common) => with_problem(&common, stdin, |prob, p| polar(prob, p, &common)),
        Command::Classify {
            common,
            kmax,
            horizon,
            seed,
        } => with_problem(&common, stdin, |prob, p| {
            let opts = ClassifyOptions {
                k_max: kmax,
                horizon,
                tol: common.tol,
                seed,
                exec: Execution::default(),
                ..ClassifyOptions::default()
            };
            classify_cmd(prob, p, opts, &common)
        }),
    }
}

enum Failure {
    Spec(SpecError),
    Precondition(Error),
    Usage(String),
}

impl From<SpecError> for Failure {
    fn from(e: SpecError) -> Self {
        Failure::Spec(e)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Precondition(e)
    }
}

fn with_problem(
    common: &Common,
    stdin: &mut dyn Read,
    body: impl FnOnce(&Problem, f64) -> Result<String, Failure>,
) -> Outcome {
    let text = match &common.input {
        Some(path) => std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display())),
        None => {
            let mut buf = String::new();
            stdin.read_to_string(&mut buf).map(|_| buf).map_err(|e| format!("stdin: {e}"))
        }
    };
    let text = match text {
        Ok(t) => t,
        Err(msg) => return Outcome::fail(EXIT_USAGE, "io", None, msg),
    };
    let result = read_problem(&text).map_err(Failure::from).and_then(|prob| {
        let p = common.p.or(prob.p).unwrap_or(2.0);
        body(&prob, p)
    });
    match result {
        Ok(out) => Outcome::ok(out),
        Err(Failure::Spec(e)) => Outcome::fail(EXIT_USAGE, "malformed_spec", Some(&e.field), e.to_string()),
        Err(Failure::Usage(msg)) => Outcome::fail(EXIT_USAGE, "usage", None, msg),
        Err(Failure::Precondition(e)) => Outcome::fail(EXIT_PRECONDITION, "precondition", None, e.to_string()),
    }
}

fn operator(prob: &Problem, p: f64) -> Result<WctOperator, Failure> {
    Ok(WctOperator::new(
        prob.function_or_ones("u"),
        prob.function_or_ones("w"),
        prob.partition.clone(),
        prob.space.clone(),
        p,
    )?)
}

fn json_only(common: &Common, command: &str) -> Result<(), Failure> {
    match common.format {
        Format::Json => Ok(()),
        Format::Csv => Err(Failure::Usage(format!("`{command}` has no CSV view; use --format json"))),
    }
}

/// A finite number, or a structured marker for values that did not come out
/// finite.
fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        json!({ "error": "non-finite", "value": x.to_string() })
    }
}

fn complex(z: C64) -> Value {
    if z.re.is_finite() && z.im.is_finite() {
        json!([z.re, z.im])
    } else {
        json!({ "error": "non-finite", "value": [z.re.to_string(), z.im.to_string()] })
    }
}

/// Rounds components below `thr` to an exact 0 so rounding noise around
/// zero eigenvalues does not leak into reports.
fn chop(z: C64, thr: f64) -> C64 {
    let f = |x: f64| if x.abs() <= thr { 0.0 } else { x };
    C64::new(f(z.re), f(z.im))
}

fn complex_list(values: &[C64]) -> Value {
    Value::Array(values.iter().map(|&z| complex(z)).collect())
}

fn num_list(values: &[f64]) -> Value {
    Value::Array(values.iter().map(|&x| num(x)).collect())
}

fn render(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

fn header(prob: &Problem, command: &str) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("command".into(), json!(command));
    m.insert("provenance".into(), json!(prob.provenance));
    m.insert("n_atoms".into(), json!(prob.space.len()));
    m.insert("n_blocks".into(), json!(prob.partition.n_blocks()));
    m
}

fn report(prob: &Problem, p: f64, common: &Common) -> Result<String, Failure> {
    json_only(common, "report")?;
    let t = operator(prob, p)?;
    let verdict = DomainVerdict::single(&t);
    let mut m = header(prob, "report");
    m.insert("p".into(), num(p));
    m.insert(
        "norm_bound".into(),
        match norm_bound(&t) {
            Ok(x) => num(x),
            Err(e) => json!({ "error": e.to_string() }),
        },
    );
    m.insert("j_minus_1_blocks".into(), num_list(&t.j_minus_1_blocks()));
    m.insert("densely_defined".into(), json!(verdict.densely_defined()));
    m.insert("finite_ae".into(), json!(verdict.finite_ae));
    m.insert("sigma_finite_restriction".into(), json!(verdict.sigma_finite_restriction));
    m.insert("diverging_blocks".into(), json!(verdict.diverging_blocks));
    m.insert("unjudged_blocks".into(), json!(verdict.unjudged_blocks));
    Ok(render(&Value::Object(m)))
}

fn expect(prob: &Problem, common: &Common) -> Result<String, Failure> {
    json_only(common, "expect")?;
    let f = prob.functions.get("f").ok_or_else(|| SpecError {
        field: "functions.f".into(),
        message: "`expect` needs a function named f".into(),
    })?;
    let blocks = block_averages(f, &prob.partition, &prob.space)?;
    let values: Vec<C64> = (0..prob.space.len()).map(|a| blocks[prob.partition.block_of(a)]).collect();
    let mut m = header(prob, "expect");
    m.insert("block_values".into(), complex_list(&blocks));
    m.insert("values".into(), complex_list(&values));
    Ok(render(&Value::Object(m)))
}

fn spectrum_cmd(prob: &Problem, p: f64, common: &Common) -> Result<String, Failure> {
    let t = operator(prob, p)?;
    let mut r: SpectrumReport = spectrum(&t, common.tol)?;
    let thr = NOISE * r.radius.max(1.0);
    for z in r.oracle_eigenvalues.iter_mut() {
        *z = chop(*z, thr);
    }
    if common.format == Format::Csv {
        let mut rows = vec![vec!["kind".to_string(), "re".into(), "im".into(), "modulus".into()]];
        for (kind, set) in [("predicted", &r.predicted), ("eigenvalue", &r.oracle_eigenvalues)] {
            for z in set.iter() {
                rows.push(vec![kind.into(), fmt_f(z.re), fmt_f(z.im), fmt_f(z.norm())]);
            }
        }
        rows.push(vec!["radius".into(), fmt_f(r.radius), fmt_f(0.0), fmt_f(r.radius)]);
        return Ok(csv_text(rows));
    }
    let mut m = header(prob, "spectrum");
    m.insert("predicted".into(), complex_list(&r.predicted));
    m.insert("nonzero_predicted".into(), complex_list(&r.nonzero_predicted(common.tol)));
    m.insert("eigenvalues".into(), complex_list(&r.oracle_eigenvalues));
    m.insert("radius".into(), num(r.radius));
    m.insert("zero_in_spectrum".into(), json!(r.zero_in_spectrum));
    m.insert("nonzero_sets_match".into(), json!(r.nonzero_sets_match(common.tol.max(1e-8))));
    Ok(render(&Value::Object(m)))
}

fn polar(prob: &Problem, p: f64, common: &Common) -> Result<String, Failure> {
    json_only(common, "polar")?;
    let t = operator(prob, p)?;
    let pair = polar_decompose(&t)?;
    let r = polar_residuals(&t, &pair)?;
    let mut m = header(prob, "polar");
    m.insert("u_prime".into(), complex_list(pair.u_prime().values()));
    m.insert("w_prime".into(), complex_list(pair.w_prime().values()));
    m.insert("support_s".into(), json!(pair.support_s));
    m.insert("support_g".into(), json!(pair.support_g));
    m.insert(
        "polar_residuals".into(),
        json!({
            "factorization": num(r.factorization),
            "square": num(r.square),
            "partial_isometry": num(r.partial_isometry),
            "modulus_oracle": num(r.modulus_oracle),
            "modulus_min_eigenvalue": num(r.modulus_min_eigenvalue),
            "modulus_hermitian": num(r.modulus_hermitian),
            "t_frobenius": num(r.t_norm),
            "tt_frobenius": num(r.tt_norm),
        }),
    );
    Ok(render(&Value::Object(m)))
}

fn classify_cmd(prob: &Problem, p: f64, opts: ClassifyOptions, common: &Common) -> Result<String, Failure> {
    let t = operator(prob, p)?;
    let v = reduce_to_emv(&t)?;
    let mut r: ClassificationReport = classify(&v, &prob.partition, &prob.space, opts)?;
    for l in r.levels.iter_mut() {
        let thr = NOISE * l.max_eigenvalue.abs().max(l.min_eigenvalue.abs()).max(1.0);
        l.max_eigenvalue = chop(C64::new(l.max_eigenvalue, 0.0), thr).re;
        l.min_eigenvalue = chop(C64::new(l.min_eigenvalue, 0.0), thr).re;
    }
    if common.format == Format::Csv {
        let mut rows = vec![["n", "is_isometry", "is_expansive", "is_hyperexpansive", "max_eigenvalue", "min_eigenvalue", "witness_theta"]
            .map(String::from)
            .to_vec()];
        for l in &r.levels {
            rows.push(vec![
                l.n.to_string(),
                l.is_isometry.to_string(),
                l.is_expansive.to_string(),
                l.is_hyperexpansive.to_string(),
                fmt_f(l.max_eigenvalue),
                fmt_f(l.min_eigenvalue),
                l.witness.as_ref().map(|w| fmt_f(w.theta)).unwrap_or_default(),
            ]);
        }
        return Ok(csv_text(rows));
    }
    let mut m = header(prob, "classify");
    m.insert("k_max".into(), json!(opts.k_max));
    m.insert("seed".into(), json!(opts.seed));
    m.insert("tol".into(), num(opts.tol));
    m.insert("v".into(), complex_list(v.values()));
    for l in &r.levels {
        m.insert(format!("is_{}_isometry", l.n), json!(l.is_isometry));
        m.insert(format!("is_{}_expansive", l.n), json!(l.is_expansive));
        m.insert(format!("is_{}_hyperexpansive", l.n), json!(l.is_hyperexpansive));
    }
    let levels: Vec<Value> = r
        .levels
        .iter()
        .map(|l| {
            json!({
                "n": l.n,
                "is_isometry": l.is_isometry,
                "is_expansive": l.is_expansive,
                "is_hyperexpansive": l.is_hyperexpansive,
                "max_eigenvalue": num(l.max_eigenvalue),
                "min_eigenvalue": num(l.min_eigenvalue),
                "witness": l.witness.as_ref().map(|w| json!({
                    "f": complex_list(w.f.values()),
                    "theta": num(w.theta),
                    "source": w.source,
                })),
            })
        })
        .collect();
    m.insert("levels".into(), Value::Array(levels));
    let a0: Vec<Value> = r
        .necessary
        .iter()
        .map(|n| {
            json!({
                "k": n.k,
                "block_values": num_list(&n.block_values),
                "all_zero": n.all_zero,
                "all_nonpositive": n.all_nonpositive,
            })
        })
        .collect();
    m.insert("a0_block_values".into(), Value::Array(a0));
    m.insert("horizon".into(), json!(r.horizon));
    m.insert(
        "completely_hyperexpansive_up_to_horizon".into(),
        json!(r.completely_hyperexpansive_up_to_horizon),
    );
    m.insert("horizon_max_eigenvalues".into(), num_list(&r.horizon_max_eigenvalues));
    Ok(render(&Value::Object(m)))
}

fn gallery(family: Family) -> Outcome {
    let built = match family {
        Family::Symmetric { n_pairs } => symmetric_space(n_pairs),
        Family::Geometric { p, n } => geometric_nat_space(p, n),
        Family::Product { n1, n2 } => uniform(n1).and_then(|a| uniform(n2).and_then(|b| product_space(&a, &b))),
    };
    match built {
        Ok(g) => {
            let mut text = SpaceSpec::from_gallery(&g).to_json();
            text.push('\n');
            Outcome::ok(text)
        }
        Err(e) => Outcome::fail(EXIT_USAGE, "usage", None, e.to_string()),
    }
}

fn uniform(n: usize) -> crate::Result<AtomicMeasureSpace> {
    AtomicMeasureSpace::new(vec![1.0 / n as f64; n])
}

/// Shortest round-trip representation, matching the JSON output.
fn fmt_f(x: f64) -> String {
    serde_json::to_string(&num(x)).expect("numbers serialize")
}

fn csv_text(rows: Vec<Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("CSV is UTF-8")
}
