//! Command-line front end.
//!
//! Exit status: 0 success, 1 domain/validity error, 2 violation or failed
//! check, 64 usage error, 70 reference-integrator failure.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::bounds::{best_bound, BoundBreakdown, Interval, SecondDerivEndpoints};
use crate::corpus::{load_corpus, CorpusEntry};
use crate::error::Error;
use crate::functions::FunctionSpec;
use crate::means::{check_means_proposition, MeansCheckRecord, Proposition};
use crate::quadrature::{integrate_certified, CertifiedResult};
use crate::verify::{run_verification, VerifyReport, DEFAULT_Q_GRID};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_CHECK_FAILED: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_ORACLE: i32 = 70;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Human,
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(
    name = "quasiquad",
    version,
    about = "Certified trapezoid error bounds for functions with quasi-convex |f''|^q"
)]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Human, global = true)]
    pub format: Format,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate every bound for given endpoint second-derivative data.
    Bound {
        #[arg(long, allow_negative_numbers = true)]
        a: f64,
        #[arg(long, allow_negative_numbers = true)]
        b: f64,
        #[arg(long)]
        q: f64,
        /// |f''(a)|
        #[arg(long, allow_negative_numbers = true)]
        d2a: f64,
        /// |f''(b)|
        #[arg(long, allow_negative_numbers = true)]
        d2b: f64,
    },
    /// Composite trapezoid rule refined until its certificate meets --eps.
    Integrate {
        /// Function: poly:c0,c1,..., exp:c,k, recip:s
        #[arg(long = "fn")]
        function: String,
        #[arg(long, allow_negative_numbers = true)]
        a: f64,
        #[arg(long, allow_negative_numbers = true)]
        b: f64,
        #[arg(long, default_value_t = 1.0)]
        q: f64,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 1 << 20)]
        max_n: usize,
    },
    /// Check a special-means inequality for f(x) = x^n.
    Means {
        /// P5, P6 or P7
        #[arg(long)]
        prop: String,
        #[arg(long, allow_negative_numbers = true)]
        na: f64,
        #[arg(long, allow_negative_numbers = true)]
        nb: f64,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        q: f64,
    },
    /// Run the verification harness over a corpus.
    Verify {
        /// Corpus manifest (defaults to $QUASIQUAD_CORPUS, then the shipped corpus).
        #[arg(long)]
        corpus: Option<PathBuf>,
        /// Comma-separated exponents.
        #[arg(long, value_delimiter = ',')]
        q_grid: Option<Vec<f64>>,
    },
    /// List the corpus functions.
    Corpus {
        #[arg(long)]
        corpus: Option<PathBuf>,
    },
}

/// Parses `argv` (including the program name), runs the command and writes
/// its report to `--out` or `stdout`. Diagnostics go to `stderr`. Returns
/// the process exit status.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };

    let (text, status) = match execute(&cli) {
        Ok(out) => out,
        Err(e) => {
            let _ = writeln!(stderr, "quasiquad: {e}");
            return exit_code(&e);
        }
    };

    let written = match &cli.out {
        Some(path) => {
            std::fs::write(path, &text).map_err(|e| format!("cannot write {}: {e}", path.display()))
        }
        None => stdout.write_all(text.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(msg) = written {
        let _ = writeln!(stderr, "quasiquad: {msg}");
        return EXIT_DOMAIN;
    }
    status
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::OracleFailure(_) => EXIT_ORACLE,
        Error::Parse(_) => EXIT_USAGE,
        _ => EXIT_DOMAIN,
    }
}

fn execute(cli: &Cli) -> Result<(String, i32), Error> {
    let fmt = cli.format;
    match &cli.command {
        Command::Bound { a, b, q, d2a, d2b } => {
            let iv = Interval::new(*a, *b)?;
            let breakdown = best_bound(iv, *q, SecondDerivEndpoints::new(*d2a, *d2b)?)?;
            Ok((render_bound(&breakdown, fmt)?, EXIT_OK))
        }
        Command::Integrate {
            function,
            a,
            b,
            q,
            eps,
            max_n,
        } => {
            let f: FunctionSpec = function.parse()?;
            let iv = Interval::new(*a, *b)?;
            let result = integrate_certified(&f, iv, *q, *eps, *max_n)?;
            Ok((render_integrate(&f, &result, fmt)?, EXIT_OK))
        }
        Command::Means { prop, na, nb, n, q } => {
            let which: Proposition = prop.parse()?;
            let record = check_means_proposition(which, *na, *nb, *n, *q)?;
            let status = if record.holds {
                EXIT_OK
            } else {
                EXIT_CHECK_FAILED
            };
            Ok((render_means(&record, fmt)?, status))
        }
        Command::Verify { corpus, q_grid } => {
            let entries = load_corpus(corpus.as_deref())?;
            let grid = q_grid.clone().unwrap_or_else(|| DEFAULT_Q_GRID.to_vec());
            let report = run_verification(&entries, &grid)?;
            let status = if report.passed() {
                EXIT_OK
            } else {
                EXIT_CHECK_FAILED
            };
            Ok((render_verify(&report, fmt)?, status))
        }
        Command::Corpus { corpus } => {
            let entries = load_corpus(corpus.as_deref())?;
            Ok((render_corpus(&entries, fmt)?, EXIT_OK))
        }
    }
}

/// 17 significant digits: always reparses to the same `f64`.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        String::new()
    }
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

fn to_json<T: Serialize>(value: &T) -> Result<String, Error> {
    let mut s =
        serde_json::to_string_pretty(value).map_err(|e| Error::Evaluation(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn to_csv(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String, Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Evaluation(e.to_string());
    w.write_record(header).map_err(io)?;
    for row in rows {
        w.write_record(&row).map_err(io)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::Evaluation(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Evaluation(e.to_string()))
}

fn render_bound(b: &BoundBreakdown, fmt: Format) -> Result<String, Error> {
    match fmt {
        Format::Json => to_json(b),
        Format::Csv => to_csv(
            &["v1", "v2", "v3", "best", "winner"],
            [vec![
                fmt_opt(b.v1),
                fmt_f64(b.v2),
                fmt_opt(b.v3),
                fmt_f64(b.best),
                b.winner.to_string(),
            ]],
        ),
        Format::Human => {
            let show = |v: Option<f64>| v.map_or("undefined".to_string(), |x| format!("{x:.10}"));
            Ok(format!(
                "v1   = {}\nv2   = {:.10}\nv3   = {}\nbest = {:.10} ({})\n",
                show(b.v1),
                b.v2,
                show(b.v3),
                b.best,
                b.winner
            ))
        }
    }
}

#[derive(Serialize)]
struct IntegrateOutput<'a> {
    function: &'a FunctionSpec,
    #[serde(flatten)]
    result: &'a CertifiedResult,
}

fn render_integrate(f: &FunctionSpec, r: &CertifiedResult, fmt: Format) -> Result<String, Error> {
    match fmt {
        Format::Json => to_json(&IntegrateOutput {
            function: f,
            result: r,
        }),
        Format::Csv => {
            let nodes = r.partition.nodes();
            to_csv(
                &["index", "left", "right", "width", "local_bound", "winner"],
                r.certificate.per_interval.iter().map(|l| {
                    vec![
                        l.index.to_string(),
                        fmt_f64(nodes[l.index]),
                        fmt_f64(nodes[l.index + 1]),
                        fmt_f64(l.width),
                        fmt_f64(l.local_bound),
                        l.winner.to_string(),
                    ]
                }),
            )
        }
        Format::Human => {
            let mut s = String::new();
            let _ = writeln!(s, "function     {}", f.label);
            let _ = writeln!(s, "value        {:.15}", r.value);
            let _ = writeln!(
                s,
                "certificate  {:.6e} (q = {})",
                r.certificate.total, r.certificate.q
            );
            let _ = writeln!(
                s,
                "n            {} ({} doublings)",
                r.partition.len(),
                r.refinements
            );
            let _ = writeln!(
                s,
                "|f''| quasi-convex on grid: {}",
                if r.quasiconvex.holds {
                    "yes"
                } else {
                    "NO (certificate hypothesis unmet)"
                }
            );
            Ok(s)
        }
    }
}

fn render_means(r: &MeansCheckRecord, fmt: Format) -> Result<String, Error> {
    match fmt {
        Format::Json => to_json(r),
        Format::Csv => to_csv(
            &["proposition", "a", "b", "n", "q", "lhs", "rhs", "holds", "margin", "quasiconvex"],
            [vec![
                format!("{:?}", r.proposition),
                fmt_f64(r.a),
                fmt_f64(r.b),
                r.n.to_string(),
                fmt_f64(r.q),
                fmt_f64(r.lhs),
                fmt_f64(r.rhs),
                r.holds.to_string(),
                fmt_f64(r.margin),
                r.quasiconvex.to_string(),
            ]],
        ),
        Format::Human => Ok(format!(
            "{:?} on [{}, {}], n = {}, q = {}\nlhs    = {:.15}\nrhs    = {:.15}\nmargin = {:.3e}\n{}\n",
            r.proposition,
            r.a,
            r.b,
            r.n,
            r.q,
            r.lhs,
            r.rhs,
            r.margin,
            if r.holds { "holds" } else { "VIOLATED" }
        )),
    }
}

pub const RECORD_COLUMNS: [&str; 18] = [
    "function_label",
    "a",
    "b",
    "q",
    "lhs_error",
    "v1",
    "v2_proof",
    "v2_statement",
    "v3",
    "limit_bound",
    "best",
    "winner",
    "margin",
    "quasiconvex_verdict",
    "negative_domain_flag",
    "violation",
    "error",
    "schema_version",
];

fn render_verify(rep: &VerifyReport, fmt: Format) -> Result<String, Error> {
    match fmt {
        Format::Json => to_json(rep),
        Format::Csv => to_csv(
            &RECORD_COLUMNS,
            rep.records.iter().map(|r| {
                vec![
                    r.function_label.clone(),
                    fmt_f64(r.interval.a()),
                    fmt_f64(r.interval.b()),
                    fmt_f64(r.q),
                    fmt_f64(r.lhs_error),
                    fmt_opt(r.v1),
                    fmt_opt(r.v2_proof),
                    fmt_opt(r.v2_statement),
                    fmt_opt(r.v3),
                    fmt_opt(r.limit_bound),
                    fmt_f64(r.best),
                    r.winner.map(|w| w.to_string()).unwrap_or_default(),
                    fmt_f64(r.margin),
                    r.quasiconvex_verdict.to_string(),
                    r.negative_domain_flag.to_string(),
                    r.violation.to_string(),
                    r.error.clone().unwrap_or_default(),
                    rep.schema_version.to_string(),
                ]
            }),
        ),
        Format::Human => Ok(human_verify(rep)),
    }
}

fn human_verify(rep: &VerifyReport) -> String {
    let s = &rep.summary;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "records     {} ({} evaluated, {} errors, {} excluded)",
        s.records, s.evaluated, s.errors, s.excluded
    );
    let _ = writeln!(out, "violations  {}", s.violations);
    if let (Some(min), Some(mean)) = (s.min_margin, s.mean_margin) {
        let _ = writeln!(out, "margin      min {min:.3e}, mean {mean:.3e}");
    }
    for r in rep.records.iter().filter(|r| r.violation) {
        let _ = writeln!(
            out,
            "  VIOLATION {} on [{}, {}] q = {}: error {:.6e} > bound {:.6e}",
            r.function_label,
            r.interval.a(),
            r.interval.b(),
            r.q,
            r.lhs_error,
            r.best
        );
    }
    let worst_lemma = rep
        .lemma
        .iter()
        .filter_map(|l| l.check.map(|c| c.residual))
        .fold(0.0, f64::max);
    let failed_lemma = rep.lemma.iter().filter(|l| !l.passed).count();
    let _ = writeln!(
        out,
        "identity    max residual {worst_lemma:.3e}, {failed_lemma} failed"
    );
    let _ = writeln!(
        out,
        "sandwich    {} ({} exponents)",
        if rep.sandwich.passed {
            "passed"
        } else {
            "FAILED"
        },
        rep.sandwich.entries.len()
    );
    let e = &rep.exponent;
    let _ = writeln!(
        out,
        "exponent    1/q variant: {} negative margins; (q-1)/q variant: {} negative margins (of {})",
        e.proof_negative,
        e.statement_negative,
        e.rows.len()
    );
    let _ = writeln!(out, "{}", if rep.passed() { "PASS" } else { "FAIL" });
    out
}

fn render_corpus(entries: &[CorpusEntry], fmt: Format) -> Result<String, Error> {
    match fmt {
        Format::Json => to_json(&entries),
        Format::Csv => to_csv(
            &["label", "function", "a", "b"],
            entries.iter().map(|e| {
                vec![
                    e.function.label.clone(),
                    e.function.family.to_string(),
                    fmt_f64(e.interval.a()),
                    fmt_f64(e.interval.b()),
                ]
            }),
        ),
        Format::Human => {
            let mut s = String::new();
            for e in entries {
                let _ = writeln!(
                    s,
                    "{:<14} {:<22} [{}, {}]",
                    e.function.label,
                    e.function.family.to_string(),
                    e.interval.a(),
                    e.interval.b()
                );
            }
            Ok(s)
        }
    }
}
