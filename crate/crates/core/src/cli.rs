//! Command-line front end.
//!
//! Exit codes: 0 ok, 1 verification failure, 2 usage or parse error,
//! 3 domain error.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::discrete::{brute_force_n_u, h_u, n_u, relative_h, relative_n};
use crate::error::Error;
use crate::extreal::ExtReal;
use crate::prob::ProbVector;
use crate::related::{
    arimoto, fhs_entropy, fhs_relative, fhs_relative_by_definition, frittelli, renyi,
    sharma_mittal, shannon, OrderAlpha,
};
use crate::solver::SolveConfig;
use crate::utility::{transform, Transform, UtilitySpec};
use crate::verify::run_identity_suite;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;

/// Upper end of the accepted oracle gap is `ORACLE_GAP_FACTOR / resolution`.
pub const ORACLE_GAP_FACTOR: f64 = 5.0;
pub const ORACLE_GAP_FLOOR: f64 = -1e-9;

#[derive(Debug, Parser)]
#[command(name = "uentropy", version, about = "Utility-maximising entropies of discrete distributions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute entropy quantities for p (and optionally q).
    Compute(ComputeArgs),
    /// Run the identity suite over random draws.
    Verify(VerifyArgs),
    /// Compare the dual formula for n_u with a brute-force grid search.
    Oracle(OracleArgs),
}

#[derive(Debug, Args)]
struct InputArgs {
    /// Inline p, comma-separated.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "input")]
    p: Option<String>,
    /// Inline q, comma-separated.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "input")]
    pq: Option<String>,
    /// Read p (and q) from a JSON or CSV file.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Input file format; inferred from the extension when omitted.
    #[arg(long, value_enum)]
    input_format: Option<InputFormat>,
    /// Rescale vectors whose sum is off by more than the tolerance.
    #[arg(long)]
    renormalize: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum InputFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Table,
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Quantity {
    #[value(name = "h")]
    H,
    #[value(name = "H")]
    RelH,
    #[value(name = "n")]
    N,
    #[value(name = "N")]
    RelN,
    #[value(name = "fhs_D")]
    FhsD,
    #[value(name = "fhs_H")]
    FhsH,
    #[value(name = "arimoto")]
    Arimoto,
    #[value(name = "frittelli")]
    Frittelli,
    #[value(name = "shannon")]
    Shannon,
    #[value(name = "renyi")]
    Renyi,
    #[value(name = "sharma_mittal")]
    SharmaMittal,
}

impl Quantity {
    pub fn name(self) -> &'static str {
        match self {
            Quantity::H => "h",
            Quantity::RelH => "H",
            Quantity::N => "n",
            Quantity::RelN => "N",
            Quantity::FhsD => "fhs_D",
            Quantity::FhsH => "fhs_H",
            Quantity::Arimoto => "arimoto",
            Quantity::Frittelli => "frittelli",
            Quantity::Shannon => "shannon",
            Quantity::Renyi => "renyi",
            Quantity::SharmaMittal => "sharma_mittal",
        }
    }

    fn needs_q(self) -> bool {
        matches!(
            self,
            Quantity::RelH | Quantity::RelN | Quantity::FhsD | Quantity::Frittelli | Quantity::SharmaMittal
        )
    }
}

#[derive(Debug, Args)]
struct ComputeArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Utility descriptor: log | iso:<gamma> | affine:<a>:<b>:<inner> | rescale:<k>:<inner>.
    #[arg(long = "u", required = true)]
    utilities: Vec<String>,
    /// Quantity to compute (repeatable).
    #[arg(long = "q", value_enum, required = true)]
    quantities: Vec<Quantity>,
    #[arg(long, value_enum, default_value = "table")]
    format: OutputFormat,
    /// Include the optimal allocation where one exists.
    #[arg(long)]
    alloc: bool,
    /// Shift u so that u(1) = 0 before computing the Arimoto entropy.
    #[arg(long)]
    normalize: bool,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
    trials: u64,
    /// Restrict draws to these utilities; defaults to log and a spread of isoelastic orders.
    #[arg(long = "u")]
    utilities: Vec<String>,
    /// Override every identity's tolerance.
    #[arg(long, env = "UENTROPY_TOL")]
    tol: Option<f64>,
}

#[derive(Debug, Args)]
struct OracleArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long = "u", default_value = "log")]
    utility: String,
    #[arg(long, default_value_t = 10_000)]
    resolution: usize,
}

/// Failure of a command, carrying its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn domain(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_DOMAIN,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::domain(format!("domain error: {e}"))
    }
}

type CmdResult<T> = std::result::Result<T, Failure>;

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut impl Write, err: &mut impl Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{rendered}")
            } else {
                write!(err, "{rendered}")
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Compute(a) => cmd_compute(&a, out),
        Command::Verify(a) => cmd_verify(&a, out),
        Command::Oracle(a) => cmd_oracle(&a, out),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

// ---------------------------------------------------------------------------
// utility descriptors

/// Parses a utility descriptor such as `affine:2:3:iso:0.5`.
///
/// Syntax errors are usage errors (exit 2) with the column of the offending
/// token; well-formed descriptors with invalid parameters are domain errors.
fn parse_utility(desc: &str) -> CmdResult<UtilitySpec> {
    let mut tokens = Vec::new();
    let mut col = 1;
    for tok in desc.split(':') {
        tokens.push((tok, col));
        col += tok.chars().count() + 1;
    }
    let mut pos = 0;
    let u = parse_descriptor(desc, &tokens, &mut pos)?;
    if pos < tokens.len() {
        return Err(syntax(desc, tokens[pos].1, "unexpected trailing token"));
    }
    Ok(u)
}

fn syntax(desc: &str, col: usize, what: &str) -> Failure {
    Failure::usage(format!(
        "parse error in utility descriptor {desc:?} at line 1, column {col}: {what} \
         (expected log | iso:<gamma> | affine:<a>:<b>:<inner> | rescale:<k>:<inner>)"
    ))
}

fn parse_descriptor(desc: &str, tokens: &[(&str, usize)], pos: &mut usize) -> CmdResult<UtilitySpec> {
    let end_col = desc.chars().count() + 1;
    let next = |pos: &mut usize| -> CmdResult<(&str, usize)> {
        let t = tokens
            .get(*pos)
            .copied()
            .ok_or_else(|| syntax(desc, end_col, "unexpected end of descriptor"))?;
        *pos += 1;
        Ok(t)
    };
    let number = |(tok, col): (&str, usize)| -> CmdResult<f64> {
        tok.trim()
            .parse::<f64>()
            .map_err(|_| syntax(desc, col, &format!("expected a number, found {tok:?}")))
    };
    let (head, col) = next(pos)?;
    match head.trim() {
        "log" => Ok(UtilitySpec::log()),
        "iso" => {
            let g = number(next(pos)?)?;
            Ok(UtilitySpec::isoelastic(g)?)
        }
        "affine" => {
            let a = number(next(pos)?)?;
            let b = number(next(pos)?)?;
            let inner = parse_descriptor(desc, tokens, pos)?;
            Ok(transform(&inner, Transform::Affine { a, b })?)
        }
        "rescale" => {
            let k = number(next(pos)?)?;
            let inner = parse_descriptor(desc, tokens, pos)?;
            Ok(transform(&inner, Transform::Rescale { k })?)
        }
        other => Err(syntax(desc, col, &format!("unknown utility {other:?}"))),
    }
}

// ---------------------------------------------------------------------------
// input

#[derive(Debug, Deserialize)]
struct JsonInput {
    p: Vec<f64>,
    #[serde(default)]
    q: Option<Vec<f64>>,
}

struct Input {
    p: ProbVector,
    q: Option<ProbVector>,
}

fn parse_inline(name: &str, text: &str) -> CmdResult<Vec<f64>> {
    let mut col = 1;
    let mut out = Vec::new();
    for field in text.split(',') {
        let lead = field.len() - field.trim_start().len();
        let v = field.trim().parse::<f64>().map_err(|_| {
            Failure::usage(format!(
                "parse error in --{name} at line 1, column {}: expected a decimal number, found {:?}",
                col + lead,
                field.trim()
            ))
        })?;
        out.push(v);
        col += field.chars().count() + 1;
    }
    Ok(out)
}

fn parse_csv(path: &Path, text: &str) -> CmdResult<(Vec<f64>, Option<Vec<f64>>)> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            Failure::usage(format!("parse error in {} at line {line}: {e}", path.display()))
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.iter().all(str::is_empty) {
            continue;
        }
        // csv does not report columns; recover them from the raw line
        let raw = text.lines().nth(line.saturating_sub(1) as usize).unwrap_or("");
        let mut offsets = Vec::new();
        let mut col = 1;
        for piece in raw.split(',') {
            offsets.push(col + piece.len() - piece.trim_start().len());
            col += piece.chars().count() + 1;
        }
        let mut row = Vec::with_capacity(record.len());
        for (i, field) in record.iter().enumerate() {
            let v = field.parse::<f64>().map_err(|_| {
                Failure::usage(format!(
                    "parse error in {} at line {line}, column {}: expected a decimal number, found {field:?}",
                    path.display(),
                    offsets.get(i).copied().unwrap_or(1)
                ))
            })?;
            row.push(v);
        }
        rows.push(row);
    }
    let mut rows = rows.into_iter();
    let p = rows
        .next()
        .ok_or_else(|| Failure::usage(format!("{}: no vectors found", path.display())))?;
    let q = rows.next();
    if rows.next().is_some() {
        return Err(Failure::usage(format!(
            "{}: expected at most two vectors (p and q), one per line",
            path.display()
        )));
    }
    Ok((p, q))
}

fn read_input(args: &InputArgs) -> CmdResult<Input> {
    let (p, q) = match (&args.input, &args.p) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
            let format = args.input_format.unwrap_or_else(|| {
                match path.extension().and_then(|e| e.to_str()) {
                    Some(ext) if ext.eq_ignore_ascii_case("csv") => InputFormat::Csv,
                    _ => InputFormat::Json,
                }
            });
            match format {
                InputFormat::Json => {
                    let parsed: JsonInput = serde_json::from_str(&text).map_err(|e| {
                        Failure::usage(format!(
                            "parse error in {} at line {}, column {}: {e}",
                            path.display(),
                            e.line(),
                            e.column()
                        ))
                    })?;
                    (parsed.p, parsed.q)
                }
                InputFormat::Csv => parse_csv(path, &text)?,
            }
        }
        (None, Some(p)) => {
            let q = args.pq.as_deref().map(|t| parse_inline("pq", t)).transpose()?;
            (parse_inline("p", p)?, q)
        }
        (None, None) => return Err(Failure::usage("no input: pass --p or --input")),
    };
    let p = ProbVector::with_renormalize(p, args.renormalize)
        .map_err(|e| Failure::domain(format!("invalid p: {e}")))?;
    let q = q
        .map(|q| ProbVector::with_renormalize(q, args.renormalize))
        .transpose()
        .map_err(|e| Failure::domain(format!("invalid q: {e}")))?;
    if let Some(q) = &q {
        if q.len() != p.len() {
            return Err(Error::LengthMismatch(p.len(), q.len()).into());
        }
    }
    Ok(Input { p, q })
}

// ---------------------------------------------------------------------------
// compute

#[derive(Debug, Clone, PartialEq, Serialize)]
struct Row {
    utility: String,
    quantity: &'static str,
    value: ExtReal,
    lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    allocation: Option<Vec<f64>>,
}

#[derive(Serialize)]
struct JsonReport<'a> {
    p: &'a [f64],
    #[serde(skip_serializing_if = "Option::is_none")]
    q: Option<&'a [f64]>,
    rows: &'a [Row],
}

/// The Rényi order of `u` when its affine core is isoelastic; `None` for log.
fn closed_form_order(u: &UtilitySpec, quantity: Quantity) -> CmdResult<Option<OrderAlpha>> {
    let core = u.affine_core();
    if core.is_log() {
        return Ok(None);
    }
    match core.isoelastic_gamma() {
        Some(g) => Ok(Some(OrderAlpha::from_gamma(g)?)),
        None => Err(Failure::domain(format!(
            "{} requires a log or isoelastic utility up to an affine map, got {}",
            quantity.name(),
            u.label()
        ))),
    }
}

fn compute_row(
    u: &UtilitySpec,
    quantity: Quantity,
    input: &Input,
    args: &ComputeArgs,
    cfg: &SolveConfig,
) -> CmdResult<Row> {
    let p = &input.p;
    let q = match (quantity.needs_q(), &input.q) {
        (true, None) => {
            return Err(Failure::usage(format!(
                "quantity {} needs a second vector: pass --pq or a q in the input file",
                quantity.name()
            )))
        }
        (_, q) => q.as_ref(),
    };
    let mut lambda = None;
    let mut allocation = None;
    let value = match quantity {
        Quantity::H | Quantity::N => {
            let s = n_u(u, p, cfg)?;
            lambda = Some(s.lambda.lambda);
            allocation = Some(s.allocation);
            if quantity == Quantity::H {
                h_u(u, p, cfg)?.entropy
            } else {
                s.value
            }
        }
        Quantity::RelH | Quantity::RelN => {
            let q = q.expect("checked above");
            let r = relative_h(u, p, q, cfg)?;
            lambda = r.lambda;
            allocation = r.allocation;
            if quantity == Quantity::RelH {
                r.entropy
            } else {
                relative_n(u, p, q, cfg)?.value
            }
        }
        Quantity::FhsD => {
            let q = q.expect("checked above");
            let v = fhs_relative(u, p, q, cfg).map_err(|e| match e {
                Error::NotAbsolutelyContinuous { .. } => Failure::domain(
                    "domain error: fhs_D requires p << q (q_i = 0 must imply p_i = 0)",
                ),
                e => e.into(),
            })?;
            if args.alloc {
                allocation = Some(fhs_relative_by_definition(u, p, q, cfg)?.1);
            }
            v
        }
        Quantity::FhsH => fhs_entropy(u, p, cfg)?,
        Quantity::Arimoto => {
            let v = arimoto(u, p, args.normalize, cfg)?;
            allocation = Some(n_u(u, p, cfg)?.allocation);
            v
        }
        Quantity::Frittelli => {
            let q = q.expect("checked above");
            let f = frittelli(u, q, p, cfg).map_err(|e| match e {
                Error::NotAbsolutelyContinuous { .. } => Failure::domain(
                    "domain error: frittelli requires q << p (mu = q, nu = p)",
                ),
                e => e.into(),
            })?;
            lambda = f.lambda;
            f.distance
        }
        Quantity::Shannon => shannon(p, q)?,
        Quantity::Renyi => match closed_form_order(u, quantity)? {
            Some(a) => renyi(a, p, q)?,
            None => shannon(p, q)?,
        },
        Quantity::SharmaMittal => {
            let q = q.expect("checked above");
            match closed_form_order(u, quantity)? {
                Some(a) => sharma_mittal(a, p, q)?,
                None => shannon(p, Some(q))?,
            }
        }
    };
    Ok(Row {
        utility: u.label().to_string(),
        quantity: quantity.name(),
        value,
        lambda,
        allocation: if args.alloc { allocation } else { None },
    })
}

fn fmt_table(x: ExtReal) -> String {
    match x {
        ExtReal::Finite(v) => format!("{v:.6}"),
        other => other.to_string(),
    }
}

fn fmt_full(x: ExtReal) -> String {
    match x {
        ExtReal::Finite(v) => format!("{v:.16e}"),
        other => other.to_string(),
    }
}

fn cmd_compute(args: &ComputeArgs, out: &mut impl Write) -> CmdResult<i32> {
    let utilities = args
        .utilities
        .iter()
        .map(|d| parse_utility(d))
        .collect::<CmdResult<Vec<_>>>()?;
    let input = read_input(&args.input)?;
    let cfg = SolveConfig::default();
    let mut rows = Vec::new();
    for u in &utilities {
        for &quantity in &args.quantities {
            rows.push(compute_row(u, quantity, &input, args, &cfg)?);
        }
    }
    let io = |e: std::io::Error| Failure::usage(format!("write failed: {e}"));
    match args.format {
        OutputFormat::Table => {
            for r in &rows {
                let mut line = format!("{} {} {}", r.utility, r.quantity, fmt_table(r.value));
                if let Some(l) = r.lambda {
                    line.push_str(&format!(" lambda={}", fmt_table(ExtReal::from_f64(l))));
                }
                if let Some(a) = &r.allocation {
                    let parts: Vec<String> =
                        a.iter().map(|&w| fmt_table(ExtReal::from_f64(w))).collect();
                    line.push_str(&format!(" alloc=[{}]", parts.join(",")));
                }
                writeln!(out, "{line}").map_err(io)?;
            }
        }
        OutputFormat::Json => {
            let report = JsonReport {
                p: input.p.as_slice(),
                q: input.q.as_ref().map(ProbVector::as_slice),
                rows: &rows,
            };
            let text = serde_json::to_string_pretty(&report)
                .map_err(|e| Failure::domain(format!("cannot serialize report: {e}")))?;
            writeln!(out, "{text}").map_err(io)?;
        }
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let csv_err = |e: csv::Error| Failure::usage(format!("write failed: {e}"));
            w.write_record(["utility", "quantity", "value", "lambda", "allocation"])
                .map_err(csv_err)?;
            for r in &rows {
                let lambda = r.lambda.map(|l| fmt_full(ExtReal::from_f64(l))).unwrap_or_default();
                let alloc = r
                    .allocation
                    .as_ref()
                    .map(|a| {
                        a.iter()
                            .map(|&w| fmt_full(ExtReal::from_f64(w)))
                            .collect::<Vec<_>>()
                            .join(";")
                    })
                    .unwrap_or_default();
                w.write_record([
                    r.utility.as_str(),
                    r.quantity,
                    &fmt_full(r.value),
                    &lambda,
                    &alloc,
                ])
                .map_err(csv_err)?;
            }
            let bytes = w
                .into_inner()
                .map_err(|e| Failure::usage(format!("write failed: {e}")))?;
            out.write_all(&bytes).map_err(io)?;
        }
    }
    Ok(EXIT_OK)
}

// ---------------------------------------------------------------------------
// verify

fn cmd_verify(args: &VerifyArgs, out: &mut impl Write) -> CmdResult<i32> {
    let utilities = args
        .utilities
        .iter()
        .map(|d| parse_utility(d))
        .collect::<CmdResult<Vec<_>>>()?;
    if let Some(t) = args.tol {
        if !(t >= 0.0) {
            return Err(Failure::usage(format!("tolerance must be non-negative, got {t}")));
        }
    }
    let cfg = SolveConfig::default();
    let report = run_identity_suite(args.seed, args.trials as usize, &utilities, args.tol, &cfg);
    let io = |e: std::io::Error| Failure::usage(format!("write failed: {e}"));
    writeln!(out, "{:<20} {:>7} {:>14} {:>10}  status", "identity", "checks", "max_dev", "tol").map_err(io)?;
    for s in &report.stats {
        writeln!(
            out,
            "{:<20} {:>7} {:>14.6e} {:>10.1e}  {}",
            s.identity.name(),
            s.checks,
            s.max_deviation,
            s.tolerance,
            if s.passed() { "ok" } else { "FAIL" }
        )
        .map_err(io)?;
    }
    for c in &report.failures {
        write!(
            out,
            "counterexample identity={} trial={} utility={} p={:?} q={:?} lhs={} rhs={} deviation={:e}",
            c.identity.name(),
            c.trial,
            c.utility,
            c.p,
            c.q,
            c.lhs,
            c.rhs,
            c.deviation
        )
        .map_err(io)?;
        match &c.error {
            Some(e) => writeln!(out, " error={e:?}").map_err(io)?,
            None => writeln!(out).map_err(io)?,
        }
    }
    let passed = report.passed();
    writeln!(
        out,
        "verify seed={} trials={}: {}",
        report.seed,
        report.trials,
        if passed { "PASS" } else { "FAIL" }
    )
    .map_err(io)?;
    Ok(if passed { EXIT_OK } else { EXIT_VERIFY_FAILED })
}

// ---------------------------------------------------------------------------
// oracle

fn cmd_oracle(args: &OracleArgs, out: &mut impl Write) -> CmdResult<i32> {
    let u = parse_utility(&args.utility)?;
    let input = read_input(&args.input)?;
    let cfg = SolveConfig::default();
    let brute = brute_force_n_u(&u, &input.p, args.resolution)?;
    let dual = n_u(&u, &input.p, &cfg)?;
    let gap = dual.value.to_f64() - brute.to_f64();
    let upper = ORACLE_GAP_FACTOR / args.resolution as f64;
    let ok = (ORACLE_GAP_FLOOR..=upper).contains(&gap);
    let io = |e: std::io::Error| Failure::usage(format!("write failed: {e}"));
    writeln!(out, "utility {}", u.label()).map_err(io)?;
    writeln!(out, "resolution {}", args.resolution).map_err(io)?;
    writeln!(out, "dual {}", fmt_full(dual.value)).map_err(io)?;
    writeln!(out, "brute {}", fmt_full(brute)).map_err(io)?;
    writeln!(out, "gap {gap:.6e} (accepted [{ORACLE_GAP_FLOOR:e}, {upper:e}])").map_err(io)?;
    writeln!(out, "{}", if ok { "ok" } else { "FAIL" }).map_err(io)?;
    Ok(if ok { EXIT_OK } else { EXIT_VERIFY_FAILED })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut argv = vec!["uentropy"];
        argv.extend_from_slice(args);
        let code = run(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn descriptors_parse_recursively() {
        assert_eq!(parse_utility("log").unwrap().label(), "log");
        assert_eq!(parse_utility("iso:-1").unwrap().label(), "iso:-1");
        assert_eq!(
            parse_utility("affine:2:3:rescale:5:iso:0.5").unwrap().label(),
            "affine:2:3:rescale:5:iso:0.5"
        );
    }

    #[test]
    fn descriptor_syntax_errors_are_usage_errors() {
        for bad in ["", "cubic", "iso", "iso:x", "log:1", "affine:2:log"] {
            let e = parse_utility(bad).unwrap_err();
            assert_eq!(e.code, EXIT_USAGE, "{bad}");
            assert!(e.message.contains("column"), "{}", e.message);
        }
        assert_eq!(parse_utility("iso:1").unwrap_err().code, EXIT_DOMAIN);
        assert_eq!(parse_utility("affine:-1:0:log").unwrap_err().code, EXIT_DOMAIN);
    }

    #[test]
    fn inline_parse_error_reports_column() {
        let e = parse_inline("p", "0.5, abc").unwrap_err();
        assert_eq!(e.code, EXIT_USAGE);
        assert!(e.message.contains("column 6"), "{}", e.message);
    }

    #[test]
    fn compute_table_rows() {
        let (code, out, _) = run_str(&["compute", "--p", "0.5,0.5", "--u", "log", "--q", "h"]);
        assert_eq!(code, 0);
        assert!(out.starts_with("log h 0.693147"), "{out}");
        let (_, out, _) = run_str(&["compute", "--p", "0.8,0.2", "--u", "iso:0.5", "--q", "h"]);
        assert!(out.starts_with("iso:0.5 h 0.385662"), "{out}");
        let (_, out, _) =
            run_str(&["compute", "--p", "0.5,0.5", "--pq", "1,0", "--u", "log", "--q", "H"]);
        assert!(out.starts_with("log H inf"), "{out}");
    }

    #[test]
    fn fhs_d_without_abs_continuity_is_domain_error() {
        let (code, _, err) =
            run_str(&["compute", "--p", "0.5,0.5", "--pq", "1,0", "--u", "log", "--q", "fhs_D"]);
        assert_eq!(code, EXIT_DOMAIN);
        assert!(err.contains("p << q"), "{err}");
    }

    #[test]
    fn zero_trials_is_usage_error() {
        let (code, _, _) = run_str(&["verify", "--trials", "0"]);
        assert_eq!(code, EXIT_USAGE);
    }

    #[test]
    fn oracle_rejects_five_atoms() {
        let (code, _, err) = run_str(&["oracle", "--p", "0.2,0.2,0.2,0.2,0.2"]);
        assert_eq!(code, EXIT_DOMAIN, "{err}");
    }
}
