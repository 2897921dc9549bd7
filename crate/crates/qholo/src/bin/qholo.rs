//! Batch command-line front end: compute invariants, discover recursions,
//! run the verification suites, and convert documents between formats.
//!
//! All output is deterministic: identical configuration and seed produce
//! byte-identical documents. JSON output is self-describing, with a
//! provenance block recording the conventions in force.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use qholo::holonomy::{
    build_table, guess_recursion, specialization_suite, verify_recursion, RecursionAnsatz,
};
use qholo::link::{
    colored_homfly, parse_braid, skein_oracle, ColorSpec, ColoredBraid,
};
use qholo::poly::{RationalFn, RationalRepr};
use qholo::qweyl::{op_apply, op_specialize, Algebra, OperatorRepr, OreOperator, SequenceView};
use qholo::web::corpus::random_closed_webs;
use qholo::web::evaluate::{Evaluator, Mode, Policy};
use qholo::web::WebRepr;
use qholo::poly::laurent::{LaurentPoly, Subst};

#[derive(Parser)]
#[command(name = "qholo", version, about = "Colored HOMFLY invariants and their recursions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute a value: a HOMFLY polynomial, a web evaluation, or a table.
    Compute {
        /// What to compute.
        #[arg(value_enum)]
        kind: ComputeKind,
        #[command(flatten)]
        common: Common,
    },
    /// Build a table, guess a recursion, verify it, and specialize it.
    Recur {
        #[command(flatten)]
        common: Common,
        /// Maximum order of the recursion ansatz.
        #[arg(long, default_value_t = 2)]
        order: usize,
        /// Maximum M-degree of the ansatz coefficients.
        #[arg(long, default_value_t = 3)]
        mdeg: u32,
        /// Maximum |a|-degree of the ansatz coefficients.
        #[arg(long, default_value_t = 2)]
        adeg: u32,
        /// Maximum |q|-degree of the ansatz coefficients.
        #[arg(long, default_value_t = 6)]
        qdeg: u32,
        /// Comma-separated list of N values for a = q^N specialization.
        #[arg(long = "Ns", value_delimiter = ',')]
        ns: Vec<i32>,
    },
    /// Run a verification suite; exit 0 iff it passes.
    Check {
        /// Which suite to run.
        #[arg(value_enum)]
        suite: CheckSuite,
        /// Largest braid word length for the skein suite.
        #[arg(long, default_value_t = 6)]
        max_crossings: usize,
        /// Number of random trials for the confluence suite.
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Re-emit a serialized document (operator or web) in the chosen format.
    Convert {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ComputeKind {
    /// Framed colored HOMFLY of a braid closure with the braid's colors.
    Homfly,
    /// Colored HOMFLY with an explicit row/column color specification.
    Colored,
    /// Evaluate a closed web from a file.
    WebEval,
    /// Table of values with one component's color running 0..=nmax.
    Table,
}

#[derive(Clone, Copy, ValueEnum)]
enum CheckSuite {
    /// Engine vs. independent skein-resolution oracle on small braids.
    Skein,
    /// Candidate-order independence of web evaluation on random webs.
    Confluence,
    /// Commutativity of specialization with operator application.
    Diagram,
}

#[derive(Args)]
struct Common {
    /// Braid: `s=2; w=[1,1,1]; colors=[1,1]` (or `2;[1,1,1];[1,1]`), or JSON.
    #[arg(long)]
    braid: Option<String>,
    /// Input file (web JSON for web-eval, document JSON for convert).
    #[arg(long)]
    file: Option<PathBuf>,
    /// Color specification, e.g. `cols:2,2` or `rows:2,2`.
    #[arg(long)]
    colors: Option<String>,
    /// Largest color for table construction.
    #[arg(long, default_value_t = 4)]
    nmax: usize,
    /// Seed for randomized suite orders.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

/// Conventions block emitted with every document.
#[derive(Serialize)]
struct Provenance {
    tool: &'static str,
    version: &'static str,
    skein: &'static str,
    framing: &'static str,
    unknot: &'static str,
    operators: &'static str,
}

impl Provenance {
    fn new() -> Self {
        Provenance {
            tool: "qholo",
            version: env!("CARGO_PKG_VERSION"),
            skein: "X(L+) - X(L-) = (q - q^-1) X(L0)",
            framing: "framed invariant; a positive curl multiplies by a",
            unknot: "(a - a^-1)/(q - q^-1)",
            operators: "(M f)_n = q^n f_n, (L f)_n = f_{n+1}, L M = q M L",
        }
    }
}

#[derive(Serialize)]
struct Document {
    provenance: Provenance,
    command: String,
    config: BTreeMap<String, String>,
    result: serde_json::Value,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("io error on {path}: {err}")]
    Io { path: String, err: std::io::Error },
    #[error(transparent)]
    Link(#[from] qholo::link::LinkError),
    #[error(transparent)]
    Web(#[from] qholo::web::WebError),
    #[error(transparent)]
    Eval(#[from] qholo::web::evaluate::EvalError),
    #[error(transparent)]
    Holonomy(#[from] qholo::holonomy::HolonomyError),
    #[error(transparent)]
    Qweyl(#[from] qholo::qweyl::QweylError),
    #[error(transparent)]
    Poly(#[from] qholo::poly::PolyError),
    #[error("malformed input: {0}")]
    Parse(String),
    #[error("suite failed: {0}")]
    SuiteFailed(String),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let record = serde_json::json!({ "error": e.to_string() });
            eprintln!("{}", serde_json::to_string(&record).unwrap());
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Compute { kind, common } => cmd_compute(kind, &common),
        Command::Recur {
            common,
            order,
            mdeg,
            adeg,
            qdeg,
            ns,
        } => cmd_recur(&common, order, mdeg, adeg, qdeg, &ns),
        Command::Check {
            suite,
            max_crossings,
            trials,
            common,
        } => cmd_check(suite, max_crossings, trials, &common),
        Command::Convert { common } => cmd_convert(&common),
    }
}

/// Accept the keyed braid syntax and the bare `s;[w];[colors]` shorthand.
fn braid_from(text: &str) -> Result<ColoredBraid, CliError> {
    if let Ok(b) = parse_braid(text) {
        return Ok(b);
    }
    let parts: Vec<&str> = text.split(';').collect();
    if parts.len() == 3 {
        let keyed = format!("s={}; w={}; colors={}", parts[0], parts[1], parts[2]);
        if let Ok(b) = parse_braid(&keyed) {
            return Ok(b);
        }
    }
    Err(parse_braid(text).unwrap_err().into())
}

fn colors_from(text: &str, b: &ColoredBraid) -> Result<ColorSpec, CliError> {
    let (kind, list) = text
        .split_once(':')
        .ok_or_else(|| CliError::Parse(format!("color spec {text:?}: expected kind:list")))?;
    let ns: Vec<u32> = list
        .split(',')
        .map(|s| s.trim().parse::<u32>())
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::Parse(format!("color spec {text:?}: {e}")))?;
    if ns.len() != b.components().len() {
        return Err(CliError::Parse(format!(
            "color spec has {} entries for {} components",
            ns.len(),
            b.components().len()
        )));
    }
    match kind.trim() {
        "cols" | "columns" => Ok(ColorSpec::columns(&ns)),
        "rows" => Ok(ColorSpec::rows(&ns)),
        other => Err(CliError::Parse(format!(
            "color spec kind {other:?}: expected cols or rows"
        ))),
    }
}

fn read_file(path: &PathBuf) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|err| CliError::Io {
        path: path.display().to_string(),
        err,
    })
}

fn need_braid(common: &Common) -> Result<ColoredBraid, CliError> {
    let text = match (&common.braid, &common.file) {
        (Some(t), _) => t.clone(),
        (None, Some(p)) => read_file(p)?,
        (None, None) => return Err(CliError::Usage("need --braid or --file".into())),
    };
    braid_from(&text)
}

fn emit(common: &Common, doc: &Document, text_body: &str) -> Result<(), CliError> {
    let rendered = match common.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(doc).expect("document serializes");
            s.push('\n');
            s
        }
        Format::Text => text_body.to_string(),
    };
    match &common.out {
        Some(path) => std::fs::write(path, rendered).map_err(|err| CliError::Io {
            path: path.display().to_string(),
            err,
        }),
        None => {
            print!("{rendered}");
            Ok(())
        }
    }
}

fn value_json(v: &RationalFn) -> serde_json::Value {
    serde_json::json!({
        "display": format!("{v}"),
        "repr": RationalRepr::from_rational(v),
    })
}

fn cmd_compute(kind: ComputeKind, common: &Common) -> Result<(), CliError> {
    let ev = Evaluator::new();
    let mut config = BTreeMap::new();
    if let Some(b) = &common.braid {
        config.insert("braid".into(), b.clone());
    }
    if let Some(f) = &common.file {
        config.insert("file".into(), f.display().to_string());
    }
    match kind {
        ComputeKind::Homfly => {
            let b = need_braid(common)?;
            let ns: Vec<u32> = b.components().iter().map(|c| b.colors()[c[0]]).collect();
            let v = colored_homfly(&b, &ColorSpec::columns(&ns), &ev)?;
            let doc = Document {
                provenance: Provenance::new(),
                command: "compute homfly".into(),
                config,
                result: value_json(&v),
            };
            emit(common, &doc, &format!("{v}\n"))
        }
        ComputeKind::Colored => {
            let b = need_braid(common)?;
            let spec_text = common
                .colors
                .as_deref()
                .ok_or_else(|| CliError::Usage("compute colored needs --colors".into()))?;
            config.insert("colors".into(), spec_text.to_string());
            let spec = colors_from(spec_text, &b)?;
            let v = colored_homfly(&b, &spec, &ev)?;
            let doc = Document {
                provenance: Provenance::new(),
                command: "compute colored".into(),
                config,
                result: value_json(&v),
            };
            emit(common, &doc, &format!("{v}\n"))
        }
        ComputeKind::WebEval => {
            let path = common
                .file
                .as_ref()
                .ok_or_else(|| CliError::Usage("compute web-eval needs --file".into()))?;
            let repr: WebRepr = serde_json::from_str(&read_file(path)?)
                .map_err(|e| CliError::Parse(e.to_string()))?;
            let w = repr.to_web()?;
            let v = ev.evaluate(&w, Mode::Symbolic)?;
            let doc = Document {
                provenance: Provenance::new(),
                command: "compute web-eval".into(),
                config,
                result: value_json(&v),
            };
            emit(common, &doc, &format!("{v}\n"))
        }
        ComputeKind::Table => {
            let b = need_braid(common)?;
            config.insert("nmax".into(), common.nmax.to_string());
            let t = build_table(&b, 0, common.nmax, &ev)?;
            let entries: Vec<serde_json::Value> = t.values.iter().map(value_json).collect();
            let mut text = String::new();
            for (n, v) in t.values.iter().enumerate() {
                writeln!(text, "f_{n} = {v}").unwrap();
            }
            let doc = Document {
                provenance: Provenance::new(),
                command: "compute table".into(),
                config,
                result: serde_json::json!({
                    "label": t.label,
                    "axis": t.axis,
                    "values": entries,
                }),
            };
            emit(common, &doc, &text)
        }
    }
}

fn cmd_recur(
    common: &Common,
    order: usize,
    mdeg: u32,
    adeg: u32,
    qdeg: u32,
    ns: &[i32],
) -> Result<(), CliError> {
    let ev = Evaluator::new();
    let b = need_braid(common)?;
    let mut config = BTreeMap::new();
    if let Some(t) = &common.braid {
        config.insert("braid".into(), t.clone());
    }
    config.insert("nmax".into(), common.nmax.to_string());
    config.insert(
        "ansatz".into(),
        format!("order={order} mdeg={mdeg} adeg={adeg} qdeg={qdeg}"),
    );
    config.insert("Ns".into(), format!("{ns:?}"));
    let t = build_table(&b, 0, common.nmax, &ev)?;
    let ansatz = RecursionAnsatz::new(order, mdeg, adeg, qdeg);
    let found = guess_recursion(&t, &ansatz)?;
    let (result, text) = match found {
        None => (
            serde_json::json!({ "status": "no recursion found within ansatz" }),
            "no recursion found within ansatz\n".to_string(),
        ),
        Some(op) => {
            let verify = verify_recursion(&op, &t, 0)?;
            let spec = specialization_suite(&op, &t, ns)?;
            let mut text = format!("operator: {op}\n");
            writeln!(text, "verify: pass={} checked={}", verify.pass, verify.checked).unwrap();
            writeln!(text, "specializations: pass={}", spec.pass).unwrap();
            (
                serde_json::json!({
                    "status": "found",
                    "operator": {
                        "display": format!("{op}"),
                        "repr": OperatorRepr::from_op(&op),
                    },
                    "verify": verify,
                    "specializations": spec,
                }),
                text,
            )
        }
    };
    let doc = Document {
        provenance: Provenance::new(),
        command: "recur".into(),
        config,
        result,
    };
    emit(common, &doc, &text)
}

fn cmd_check(
    suite: CheckSuite,
    max_crossings: usize,
    trials: usize,
    common: &Common,
) -> Result<(), CliError> {
    let mut config = BTreeMap::new();
    config.insert("seed".into(), common.seed.to_string());
    let (name, detail) = match suite {
        CheckSuite::Skein => {
            config.insert("max_crossings".into(), max_crossings.to_string());
            let checked = check_skein(max_crossings)?;
            ("check skein", format!("{checked} braids match the skein oracle"))
        }
        CheckSuite::Confluence => {
            config.insert("trials".into(), trials.to_string());
            let checked = check_confluence(trials, common.seed)?;
            ("check confluence", format!("{checked} webs evaluate order-independently"))
        }
        CheckSuite::Diagram => {
            let checked = check_diagram(common.seed)?;
            ("check diagram", format!("{checked} operator/sequence pairs commute"))
        }
    };
    let doc = Document {
        provenance: Provenance::new(),
        command: name.into(),
        config,
        result: serde_json::json!({ "pass": true, "detail": detail }),
    };
    emit(common, &doc, &format!("{name}: pass ({detail})\n"))
}

/// Engine vs. the independent skein-resolution oracle over all 2- and
/// 3-strand words up to the length bound.
fn check_skein(max_crossings: usize) -> Result<usize, CliError> {
    let ev = Evaluator::new();
    let mut checked = 0usize;
    for strands in 2..=3usize {
        let gens: Vec<i32> = (1..strands as i32)
            .flat_map(|g| [g, -g])
            .collect();
        let mut words: Vec<Vec<i32>> = vec![vec![]];
        for len in 1..=max_crossings.min(4) {
            let mut next = Vec::new();
            for w in &words {
                if w.len() + 1 == len {
                    for &g in &gens {
                        let mut v = w.clone();
                        v.push(g);
                        next.push(v);
                    }
                }
            }
            for w in &next {
                let b = ColoredBraid::new(strands, w.clone(), vec![1; strands])?;
                let engine = colored_homfly(
                    &b,
                    &ColorSpec::columns(&vec![1; b.components().len()]),
                    &ev,
                )?;
                let oracle = skein_oracle(strands, w)?;
                if engine != oracle {
                    return Err(CliError::SuiteFailed(format!(
                        "skein mismatch on strands={strands} word={w:?}"
                    )));
                }
                checked += 1;
            }
            words.extend(next);
        }
    }
    Ok(checked)
}

/// Greedy vs. seeded-policy evaluation on a random closed-web corpus.
fn check_confluence(trials: usize, seed: u64) -> Result<usize, CliError> {
    let ev = Evaluator::new();
    let webs = random_closed_webs(seed, trials, 10, 3);
    for (i, w) in webs.iter().enumerate() {
        let base = ev.evaluate(w, Mode::Symbolic)?;
        for round in 0..2u64 {
            let alt = ev.evaluate_with_policy(
                w,
                Mode::Symbolic,
                Policy::Seeded(seed.wrapping_add(round * 1000 + i as u64)),
            )?;
            if alt != base {
                return Err(CliError::SuiteFailed(format!(
                    "confluence mismatch on web {i}"
                )));
            }
        }
    }
    Ok(webs.len())
}

/// Specializing a = q^N commutes with applying an operator to a sequence.
fn check_diagram(seed: u64) -> Result<usize, CliError> {
    use rand::Rng;
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut checked = 0usize;
    for _ in 0..20 {
        let order = rng.gen_range(1..=3usize);
        let coeffs: Vec<LaurentPoly> = (0..=order)
            .map(|_| {
                let mut p = LaurentPoly::zero();
                for _ in 0..3 {
                    let c = rng.gen_range(-5i64..=5);
                    let ea = rng.gen_range(-2i32..=2);
                    let eq = rng.gen_range(-3i32..=3);
                    let em = rng.gen_range(0i32..=2);
                    p = &p + &LaurentPoly::monomial(c, [ea, eq, em]);
                }
                p
            })
            .collect();
        let Ok(op) = OreOperator::new(Algebra::Wt, coeffs) else {
            continue;
        };
        if op.is_zero() {
            continue;
        }
        let f = SequenceView::from_fn(8, |n| {
            RationalFn::from_poly(LaurentPoly::monomial(1, [1, n as i32, 0]))
        });
        for n in 2..=4i32 {
            let s = Subst::a_to_qpow(n);
            let lhs = op_apply(&op_specialize(&op, &s)?, &f.specialize(&s)?)?;
            let rhs = {
                let applied = op_apply(&op, &f)?;
                applied.specialize(&s)?
            };
            if lhs != rhs {
                return Err(CliError::SuiteFailed(format!(
                    "diagram mismatch at N={n} for operator {op}"
                )));
            }
            checked += 1;
        }
    }
    Ok(checked)
}

fn cmd_convert(common: &Common) -> Result<(), CliError> {
    let path = common
        .file
        .as_ref()
        .ok_or_else(|| CliError::Usage("convert needs --file".into()))?;
    let raw = read_file(path)?;
    let mut config = BTreeMap::new();
    config.insert("file".into(), path.display().to_string());
    // operator, web, or rational-function document, tried in that order
    if let Ok(repr) = serde_json::from_str::<OperatorRepr>(&raw) {
        let op = repr.to_op()?;
        let doc = Document {
            provenance: Provenance::new(),
            command: "convert operator".into(),
            config,
            result: serde_json::json!({
                "display": format!("{op}"),
                "repr": OperatorRepr::from_op(&op),
            }),
        };
        return emit(common, &doc, &format!("{op}\n"));
    }
    if let Ok(repr) = serde_json::from_str::<WebRepr>(&raw) {
        let w = repr.to_web()?;
        let doc = Document {
            provenance: Provenance::new(),
            command: "convert web".into(),
            config,
            result: serde_json::json!({
                "code": w.code_string(),
                "repr": WebRepr::from_web(&w),
            }),
        };
        return emit(common, &doc, &format!("{}\n", w.code_string()));
    }
    if let Ok(repr) = serde_json::from_str::<RationalRepr>(&raw) {
        let v = repr.to_rational()?;
        let doc = Document {
            provenance: Provenance::new(),
            command: "convert value".into(),
            config,
            result: value_json(&v),
        };
        return emit(common, &doc, &format!("{v}\n"));
    }
    Err(CliError::Parse(
        "file is not an operator, web, or value document".into(),
    ))
}
