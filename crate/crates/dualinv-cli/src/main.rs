//! Command-line front end for the dual-matrix inverse library.
//!
//! Matrices travel as JSON documents with the shape
//!
//! ```json
//! {
//!   "order": 2,
//!   "rows": 2,
//!   "cols": 2,
//!   "components": { "0": [1.0, 0.0, 0.0, 0.0], "1": [...], "2": [...], "3": [...] }
//! }
//! ```
//!
//! where `order` counts the nilpotent units, and component keys are the
//! decimal value of the unit-subset bitmask (bit 0 for the first unit, bit 1
//! for the second, and so on). Entries are row-major. Results are written in
//! the same format with 17 significant digits, so feeding an output document
//! back in reproduces the computed values bit for bit.
//!
//! Exit codes: 0 on success, 2 when a requested inverse or solution does not
//! exist (a report on standard error says which condition failed), 3 for
//! unreadable or malformed input, and 4 for shape or order mismatches.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use dualinv::dualmat::{self, DualMatrix};
use dualinv::hyperdual::{self, ExistenceReport, HyperDualMatrix, OrderLawKind, OrderLawReport};
use dualinv::linsolve::{self, HyperDualVector};
use dualinv::norder::{self, NOrderMatrix, MAX_ORDER};
use dualinv::realmat;
use dualinv::{Error, RealMatrix, Tolerance};

#[derive(Parser)]
#[command(
    name = "dualinv",
    version,
    about = "Generalized inverses of dual, hyper-dual, and n-order dual matrices"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Moore-Penrose pseudoinverse of a real matrix (order-0 document).
    Pinv(Single),
    /// Group inverse of a real matrix (order-0 document).
    Ginv(Single),
    /// Group inverse of a dual matrix (order-1 document).
    Dggi(Single),
    /// Moore-Penrose inverse of a dual matrix, when it exists.
    Dmpgi(Single),
    /// First-order perturbation of the real pseudoinverse (always defined).
    Mpdgi(Single),
    /// Canonical block decomposition of a dual matrix.
    Canonical(Single),
    /// Group inverse of a hyper-dual matrix (order-2 document).
    Hdggi(Single),
    /// Moore-Penrose inverse of a hyper-dual matrix, when it exists.
    Hdmpgi(Single),
    /// Check reverse and forward order laws for a product of two matrices.
    Orderlaw(OrderLaw),
    /// Group inverse of an n-order dual matrix (any order up to the cap).
    Nginv(Single),
    /// Solve A x = b over hyper-dual numbers (homogeneous part zero).
    Solve(Pair),
    /// h-norm of a hyper-dual vector (order-2, single-column document).
    Norm(Single),
    /// Existence report for the hyper-dual group inverse.
    Check(Single),
}

#[derive(Args)]
struct Single {
    /// Input document path.
    #[arg(short, long)]
    input: PathBuf,
    /// Output path; standard output when omitted.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Relative tolerance for rank and zero decisions.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
}

#[derive(Args)]
struct Pair {
    /// Input document paths (exactly two, in argument order).
    #[arg(short, long, required = true)]
    input: Vec<PathBuf>,
    /// Output path; standard output when omitted.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Relative tolerance for rank and zero decisions.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
}

#[derive(Args)]
struct OrderLaw {
    /// Input document paths (exactly two: left factor, then right factor).
    #[arg(short, long, required = true)]
    input: Vec<PathBuf>,
    /// Which inverse family the order law targets.
    #[arg(long, value_enum)]
    kind: LawKind,
    /// Optional path for the product-inverse document.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Relative tolerance for rank and zero decisions.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum LawKind {
    /// Group inverses.
    Group,
    /// Moore-Penrose inverses.
    Mp,
}

/// On-disk form of a matrix document.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixDocument {
    order: usize,
    rows: usize,
    cols: usize,
    components: BTreeMap<String, Vec<f64>>,
}

/// A diagnosed failure: the exit code plus the lines to print on stderr.
struct Failure {
    code: u8,
    lines: Vec<String>,
}

fn fail(code: u8, message: impl Into<String>) -> Failure {
    Failure {
        code,
        lines: vec![message.into()],
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 3,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            for line in &failure.lines {
                eprintln!("{line}");
            }
            ExitCode::from(failure.code)
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Pinv(args) => {
            let tol = parse_tol(args.tol)?;
            let a = as_real(&load_document(&args.input)?, "pinv")?;
            let x = realmat::pinv(&a, tol);
            emit(&render_document(&NOrderMatrix::from_real(x)), &args.output)
        }
        Command::Ginv(args) => {
            let tol = parse_tol(args.tol)?;
            let a = as_real(&load_document(&args.input)?, "ginv")?;
            let x = realmat::group_inverse(&a, tol).map_err(lib_failure)?;
            emit(&render_document(&NOrderMatrix::from_real(x)), &args.output)
        }
        Command::Dggi(args) => {
            let tol = parse_tol(args.tol)?;
            let a = as_dual(&load_document(&args.input)?, "dggi")?;
            let x = dualmat::dggi(&a, tol).map_err(lib_failure)?;
            emit(&render_document(&NOrderMatrix::from_dual(&x)), &args.output)
        }
        Command::Dmpgi(args) => {
            let tol = parse_tol(args.tol)?;
            let a = as_dual(&load_document(&args.input)?, "dmpgi")?;
            let x = dualmat::dmpgi(&a, tol).map_err(lib_failure)?;
            emit(&render_document(&NOrderMatrix::from_dual(&x)), &args.output)
        }
        Command::Mpdgi(args) => {
            let tol = parse_tol(args.tol)?;
            let a = as_dual(&load_document(&args.input)?, "mpdgi")?;
            let x = dualmat::mpdgi(&a, tol);
            emit(&render_document(&NOrderMatrix::from_dual(&x)), &args.output)
        }
        Command::Canonical(args) => {
            let tol = parse_tol(args.tol)?;
            let a = as_dual(&load_document(&args.input)?, "canonical")?;
            let form = dualmat::canonical_form(&a, tol).map_err(lib_failure)?;
            emit(&render_canonical(&form), &args.output)
        }
        Command::Hdggi(args) => {
            let tol = parse_tol(args.tol)?;
            let a = as_hyper(&load_document(&args.input)?, "hdggi")?;
            let x = hyperdual::hdggi(&a, tol)
                .map_err(|err| existence_failure(err, hyperdual::hdggi_exists(&a, tol).ok()))?;
            emit(
                &render_document(&NOrderMatrix::from_hyperdual(&x)),
                &args.output,
            )
        }
        Command::Hdmpgi(args) => {
            let tol = parse_tol(args.tol)?;
            let a = as_hyper(&load_document(&args.input)?, "hdmpgi")?;
            let x = hyperdual::hdmpgi(&a, tol)
                .map_err(|err| existence_failure(err, Some(hyperdual::hdmpgi_exists(&a, tol))))?;
            emit(
                &render_document(&NOrderMatrix::from_hyperdual(&x)),
                &args.output,
            )
        }
        Command::Orderlaw(args) => {
            let tol = parse_tol(args.tol)?;
            let (left, right) = load_pair(&args.input)?;
            let x = as_hyper(&left, "orderlaw")?;
            let y = as_hyper(&right, "orderlaw")?;
            let kind = match args.kind {
                LawKind::Group => OrderLawKind::Group,
                LawKind::Mp => OrderLawKind::MoorePenrose,
            };
            let report = hyperdual::order_law_check(&x, &y, kind, tol).map_err(lib_failure)?;
            let mut text = String::new();
            for line in order_law_lines(&report) {
                let _ = writeln!(text, "{line}");
            }
            print!("{text}");
            if args.output.is_some() {
                let doc = render_document(&NOrderMatrix::from_hyperdual(&report.product_inverse));
                emit(&doc, &args.output)?;
            }
            Ok(())
        }
        Command::Nginv(args) => {
            let tol = parse_tol(args.tol)?;
            let a = load_document(&args.input)?;
            let x = norder::n_group_inverse(&a, tol).map_err(lib_failure)?;
            emit(&render_document(&x), &args.output)
        }
        Command::Solve(args) => {
            let tol = parse_tol(args.tol)?;
            let (left, right) = load_pair(&args.input)?;
            let a = as_hyper(&left, "solve")?;
            let b = as_vector(&right, "solve")?;
            if b.len() != a.rows() {
                return Err(fail(
                    4,
                    format!(
                        "shape mismatch: matrix is {}x{}, right-hand side has {} rows",
                        a.rows(),
                        a.cols(),
                        b.len()
                    ),
                ));
            }
            let z = HyperDualVector::zeros(b.len());
            let x = linsolve::solve(&a, &b, &z, tol).map_err(lib_failure)?;
            let doc = NOrderMatrix::from_hyperdual(&x.as_column());
            emit(&render_document(&doc), &args.output)
        }
        Command::Norm(args) => {
            parse_tol(args.tol)?;
            let v = as_vector(&load_document(&args.input)?, "norm")?;
            let text = format!("h-norm: {}\n", fmt_float(linsolve::hnorm(&v)));
            emit(&text, &args.output)
        }
        Command::Check(args) => {
            let tol = parse_tol(args.tol)?;
            let a = as_hyper(&load_document(&args.input)?, "check")?;
            let report = hyperdual::hdggi_exists(&a, tol).map_err(lib_failure)?;
            let mut text = String::new();
            for line in existence_lines(&report) {
                let _ = writeln!(text, "{line}");
            }
            emit(&text, &args.output)
        }
    }
}

/// Validates the tolerance flag and converts it to the library's type.
fn parse_tol(value: f64) -> Result<Tolerance, Failure> {
    if value.is_finite() && value > 0.0 && value < 1.0 {
        Ok(Tolerance::new(value))
    } else {
        Err(fail(
            3,
            format!("--tol must lie strictly between 0 and 1, got {value}"),
        ))
    }
}

/// Reads, parses, and validates one matrix document.
fn load_document(path: &Path) -> Result<NOrderMatrix, Failure> {
    let name = path.display().to_string();
    let text =
        fs::read_to_string(path).map_err(|err| fail(3, format!("cannot read {name}: {err}")))?;
    let doc: MatrixDocument = serde_json::from_str(&text)
        .map_err(|err| fail(3, format!("cannot parse {name}: {err}")))?;
    if doc.order > MAX_ORDER {
        return Err(fail(
            4,
            format!(
                "{name}: order {} exceeds the supported cap {MAX_ORDER}",
                doc.order
            ),
        ));
    }
    if doc.rows == 0 || doc.cols == 0 {
        return Err(fail(3, format!("{name}: rows and cols must be positive")));
    }
    let count = 1usize << doc.order;
    if doc.components.len() != count {
        return Err(fail(
            3,
            format!(
                "{name}: order {} needs {count} components, found {}",
                doc.order,
                doc.components.len()
            ),
        ));
    }
    let mut components = Vec::with_capacity(count);
    for mask in 0..count {
        let key = mask.to_string();
        let entries = doc
            .components
            .get(&key)
            .ok_or_else(|| fail(3, format!("{name}: missing component \"{key}\"")))?;
        if entries.len() != doc.rows * doc.cols {
            return Err(fail(
                3,
                format!(
                    "{name}: component \"{key}\" has {} entries, expected {}",
                    entries.len(),
                    doc.rows * doc.cols
                ),
            ));
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(fail(
                3,
                format!("{name}: component \"{key}\" contains a non-finite entry"),
            ));
        }
        components.push(RealMatrix::new(doc.rows, doc.cols, entries.clone()));
    }
    Ok(NOrderMatrix::new(doc.order, components))
}

/// Loads the two documents of a two-input command.
fn load_pair(paths: &[PathBuf]) -> Result<(NOrderMatrix, NOrderMatrix), Failure> {
    if paths.len() != 2 {
        return Err(fail(
            3,
            format!(
                "expected exactly two --input documents, got {}",
                paths.len()
            ),
        ));
    }
    Ok((load_document(&paths[0])?, load_document(&paths[1])?))
}

fn require_order(m: &NOrderMatrix, expected: usize, command: &str) -> Result<(), Failure> {
    if m.order() != expected {
        return Err(fail(
            4,
            format!(
                "the {command} command expects an order-{expected} document, got order {}",
                m.order()
            ),
        ));
    }
    Ok(())
}

fn as_real(m: &NOrderMatrix, command: &str) -> Result<RealMatrix, Failure> {
    require_order(m, 0, command)?;
    Ok(m.to_real().expect("order was checked"))
}

fn as_dual(m: &NOrderMatrix, command: &str) -> Result<DualMatrix, Failure> {
    require_order(m, 1, command)?;
    Ok(m.to_dual().expect("order was checked"))
}

fn as_hyper(m: &NOrderMatrix, command: &str) -> Result<HyperDualMatrix, Failure> {
    require_order(m, 2, command)?;
    Ok(m.to_hyperdual().expect("order was checked"))
}

/// Interprets an order-2 single-column document as a hyper-dual vector.
fn as_vector(m: &NOrderMatrix, command: &str) -> Result<HyperDualVector, Failure> {
    let column = as_hyper(m, command)?;
    if column.cols() != 1 {
        return Err(fail(
            4,
            format!(
                "the {command} command expects a single-column document, got {}x{}",
                column.rows(),
                column.cols()
            ),
        ));
    }
    Ok(HyperDualVector::from_column(&column))
}

/// Maps a library error to an exit code: shape and order problems are usage
/// mistakes (4), everything else is a numerical verdict (2).
fn lib_failure(err: Error) -> Failure {
    let code = match err {
        Error::ShapeMismatch { .. }
        | Error::NotSquare { .. }
        | Error::OrderMismatch { .. }
        | Error::OrderZero => 4,
        _ => 2,
    };
    fail(code, format!("error: {err}"))
}

/// Like [`lib_failure`], but appends the existence report so the caller can
/// see which condition failed and by how much.
fn existence_failure(err: Error, report: Option<ExistenceReport>) -> Failure {
    let mut failure = lib_failure(err);
    if failure.code == 2 {
        if let Some(report) = report {
            failure.lines.extend(existence_lines(&report));
        }
    }
    failure
}

fn existence_lines(report: &ExistenceReport) -> Vec<String> {
    let mut lines = vec![
        format!("exists: {}", report.exists),
        format!("method: {}", report.method),
        format!(
            "projector residual: {}",
            fmt_float(report.projector_residual)
        ),
    ];
    for (i, residual) in report.component_residuals.iter().enumerate() {
        lines.push(format!(
            "component residual {}: {}",
            i + 1,
            fmt_float(*residual)
        ));
    }
    lines.push(format!("threshold: {}", fmt_float(report.threshold)));
    lines
}

fn order_law_lines(report: &OrderLawReport) -> Vec<String> {
    let kind = match report.kind {
        OrderLawKind::Group => "group",
        OrderLawKind::MoorePenrose => "moore-penrose",
    };
    let mut lines = vec![format!("kind: {kind}")];
    for hypothesis in &report.hypotheses {
        lines.push(format!(
            "{} residual: {}",
            hypothesis.name,
            fmt_float(hypothesis.residual)
        ));
        lines.push(format!("{} holds: {}", hypothesis.name, hypothesis.holds));
    }
    lines.push(format!("hypotheses hold: {}", report.hypotheses_hold));
    lines.push(format!(
        "forward residual: {}",
        fmt_float(report.forward_residual)
    ));
    lines.push(format!(
        "reverse residual: {}",
        fmt_float(report.reverse_residual)
    ));
    lines
}

/// 17 significant digits: enough for `f64` values to re-parse bit for bit.
fn fmt_float(value: f64) -> String {
    format!("{value:.16e}")
}

/// Renders a matrix document with one component per line.
fn render_document(m: &NOrderMatrix) -> String {
    let mut out = String::new();
    out.push_str("{\n");
    let _ = writeln!(out, "  \"order\": {},", m.order());
    let _ = writeln!(out, "  \"rows\": {},", m.rows());
    let _ = writeln!(out, "  \"cols\": {},", m.cols());
    out.push_str("  \"components\": {\n");
    let count = 1usize << m.order();
    for mask in 0..count {
        let entries: Vec<String> = m
            .component(mask)
            .entries()
            .iter()
            .map(|&v| fmt_float(v))
            .collect();
        let comma = if mask + 1 == count { "" } else { "," };
        let _ = writeln!(out, "    \"{mask}\": [{}]{comma}", entries.join(", "));
    }
    out.push_str("  }\n}\n");
    out
}

/// Renders an order-0 document on a single line, for nesting inside reports.
fn render_block(m: &RealMatrix) -> String {
    let entries: Vec<String> = m.entries().iter().map(|&v| fmt_float(v)).collect();
    format!(
        "{{\"order\": 0, \"rows\": {}, \"cols\": {}, \"components\": {{\"0\": [{}]}}}}",
        m.rows(),
        m.cols(),
        entries.join(", ")
    )
}

/// Renders the canonical decomposition: the rank plus the change-of-basis
/// pair and the four blocks, each as a nested order-0 document.
fn render_canonical(form: &dualmat::DualCanonicalForm) -> String {
    let mut out = String::new();
    out.push_str("{\n");
    let _ = writeln!(out, "  \"rank\": {},", form.core.rank);
    let _ = writeln!(out, "  \"p\": {},", render_block(&form.core.p));
    let _ = writeln!(out, "  \"p_inv\": {},", render_block(&form.core.p_inv));
    let _ = writeln!(out, "  \"core\": {},", render_block(&form.core.c));
    let _ = writeln!(out, "  \"b1\": {},", render_block(&form.b1));
    let _ = writeln!(out, "  \"b2\": {},", render_block(&form.b2));
    let _ = writeln!(out, "  \"b3\": {}", render_block(&form.b3));
    out.push_str("}\n");
    out
}

/// Writes `text` to the output path, or to standard output when none given.
fn emit(text: &str, output: &Option<PathBuf>) -> Result<(), Failure> {
    match output {
        Some(path) => fs::write(path, text)
            .map_err(|err| fail(3, format!("cannot write {}: {err}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
