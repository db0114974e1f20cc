//! Command-line front end. [`run_command`] does all the work and returns the
//! exit code with the captured output, so tests can drive it in-process.

use std::fmt::Write as _;
use std::str::FromStr;

use clap::builder::{PossibleValuesParser, TypedValueParser};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use genlambert::closed_form::{
    BranchChoice, Equation, Family, QuadExpParams, RatioExpParams, ScalarShiftParams,
    SolveOptions, SolveReport,
};
use genlambert::identity::{closed_form_checks, errata_report, identity_suite};
use genlambert::lagrange::lagrange_coefficients;
use genlambert::numeric::{compare_report, radius_estimate, CompareRecord};
use genlambert::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Self::with_code(EXIT_OK, stdout)
    }

    fn with_code(code: i32, stdout: String) -> Self {
        Self {
            code,
            stdout,
            stderr: String::new(),
        }
    }

    fn failure(msg: impl std::fmt::Display) -> Self {
        Self {
            code: EXIT_FAILURE,
            stdout: String::new(),
            stderr: format!("error: {msg}\n"),
        }
    }

    fn usage(msg: impl std::fmt::Display) -> Self {
        Self {
            code: EXIT_USAGE,
            stdout: String::new(),
            stderr: format!("error: {msg}\n"),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "genlambert",
    version,
    about = "Series solutions of generalized Lambert-W equations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sum the series and report the root.
    Solve(SolveArgs),
    /// Print each term with its partial sum and residual.
    Terms(SolveArgs),
    /// Run the exact identity checks and the errata report.
    Verify(VerifyArgs),
    /// Estimate the radius of convergence in l.
    Radius(RadiusArgs),
    /// Compare the series root with the Newton oracle.
    Compare(SolveArgs),
    /// Solve over a grid of l values, one JSON record per line.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BranchArg {
    Auto,
    #[value(name = "baseA")]
    BaseA,
    #[value(name = "baseB")]
    BaseB,
}

impl From<BranchArg> for BranchChoice {
    fn from(b: BranchArg) -> Self {
        match b {
            BranchArg::Auto => BranchChoice::Auto,
            BranchArg::BaseA => BranchChoice::BaseA,
            BranchArg::BaseB => BranchChoice::BaseB,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    Identities,
    Errata,
    All,
}

fn family_parser() -> impl clap::builder::TypedValueParser<Value = Family> {
    PossibleValuesParser::new(Family::ALL.map(Family::name))
        .map(|s| Family::from_str(&s).expect("listed family"))
}

#[derive(Debug, Args)]
struct ParamArgs {
    #[arg(long, value_parser = family_parser())]
    family: Family,
    #[arg(long, allow_hyphen_values = true)]
    a: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    b: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    s: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    t: Option<f64>,
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[command(flatten)]
    params: ParamArgs,
    #[arg(long, allow_hyphen_values = true)]
    l: Option<f64>,
    #[command(flatten)]
    opts: OptArgs,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Debug, Args)]
struct OptArgs {
    /// Maximum number of series terms.
    #[arg(long, default_value_t = 40)]
    terms: usize,
    /// Relative stopping tolerance.
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    /// Apply Wynn epsilon acceleration.
    #[arg(long)]
    accel: bool,
    #[arg(long, value_enum, default_value = "auto")]
    branch: BranchArg,
    /// Use the printed, unvalidated term formula.
    #[arg(long = "paper-as-printed", alias = "paperAsPrinted")]
    paper_as_printed: bool,
}

impl OptArgs {
    fn solve_options(&self) -> Result<SolveOptions, String> {
        if self.terms == 0 {
            return Err("--terms must be at least 1".into());
        }
        if !(self.tol > 0.0) {
            return Err("--tol must be positive".into());
        }
        Ok(SolveOptions {
            max_terms: self.terms,
            tol: self.tol,
            accelerate: self.accel,
            branch: self.branch.into(),
            paper_as_printed: self.paper_as_printed,
        })
    }
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long, value_enum, default_value = "all")]
    suite: Suite,
    #[arg(long = "max-n", default_value_t = 10)]
    max_n: usize,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Debug, Args)]
struct RadiusArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// Number of coefficients to compute.
    #[arg(long, default_value_t = 40)]
    terms: usize,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    params: ParamArgs,
    #[arg(long = "l-min", allow_hyphen_values = true)]
    l_min: f64,
    #[arg(long = "l-max", allow_hyphen_values = true)]
    l_max: f64,
    /// Number of grid points, endpoints included.
    #[arg(long, default_value_t = 11)]
    steps: usize,
    #[command(flatten)]
    opts: OptArgs,
}

/// Flags each family needs besides `--l`.
fn required_flags(family: Family) -> &'static [&'static str] {
    match family {
        Family::QuadExp => &["a", "b"],
        Family::RatioExp => &["s", "t"],
        _ => &["a"],
    }
}

fn build_equation(p: &ParamArgs, l: f64) -> Result<Equation, String> {
    let given = [("a", p.a), ("b", p.b), ("s", p.s), ("t", p.t)];
    let need = required_flags(p.family);
    let schema = need
        .iter()
        .map(|f| format!("--{f}"))
        .collect::<Vec<_>>()
        .join(" ");
    for (name, v) in given {
        match (need.contains(&name), v) {
            (true, None) => {
                return Err(format!(
                    "--{name} is required for --family {} (expects {schema} --l)",
                    p.family
                ))
            }
            (false, Some(_)) => {
                return Err(format!(
                    "--{name} does not apply to --family {} (expects {schema} --l)",
                    p.family
                ))
            }
            _ => {}
        }
    }
    let v = |x: Option<f64>| x.unwrap_or_default();
    Ok(match p.family {
        Family::QuadExp => Equation::QuadExp(QuadExpParams {
            a: v(p.a),
            b: v(p.b),
            l,
        }),
        Family::RatioExp => Equation::RatioExp(RatioExpParams {
            s: v(p.s),
            t: v(p.t),
            l,
        }),
        Family::Gauss => Equation::Gauss(ScalarShiftParams { a: v(p.a), l }),
        Family::DoubleExp => Equation::DoubleExp(ScalarShiftParams { a: v(p.a), l }),
        Family::BesselRecip => Equation::BesselRecip(ScalarShiftParams { a: v(p.a), l }),
        Family::PlainExp => Equation::PlainExp(ScalarShiftParams { a: v(p.a), l }),
    })
}

fn equation_with_l(p: &ParamArgs, l: Option<f64>) -> Result<Equation, String> {
    let l = l.ok_or_else(|| format!("--l is required for --family {}", p.family))?;
    build_equation(p, l)
}

/// Exit code for a library error: parameter and solver problems are
/// failures, not usage errors.
fn library_failure(e: Error) -> Outcome {
    Outcome::failure(e)
}

/// Decimal rendering with at least 17 significant digits.
pub fn decimal(v: f64) -> String {
    if !v.is_finite() {
        return if v.is_nan() { "nan".into() } else if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let exp = v.abs().log10().floor() as i64;
    let prec = (16 - exp).max(0) as usize;
    format!("{v:.prec$}")
}

/// Compact JSON; every record type here serializes infallibly.
pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("report types serialize")
}

fn params_text(r: &SolveReport) -> String {
    r.params
        .iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect::<Vec<_>>()
        .join(" ")
}

fn report_text(r: &SolveReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "family       {}", r.family);
    let _ = writeln!(s, "params       {}", params_text(r));
    let _ = writeln!(s, "root         {}", r.root);
    let _ = writeln!(s, "terms used   {}", r.terms_used);
    let _ = writeln!(s, "residual     {:e}", r.residual);
    let _ = writeln!(s, "converged    {}", r.converged);
    let _ = writeln!(s, "branch       {}", branch_name(r));
    let _ = writeln!(s, "accelerated  {}", r.accelerated);
    for w in &r.warnings {
        let _ = writeln!(s, "warning: {w}");
    }
    s
}

fn branch_name(r: &SolveReport) -> &'static str {
    match r.branch {
        genlambert::closed_form::Branch::BaseA => "baseA",
        genlambert::closed_form::Branch::BaseB => "baseB",
    }
}

const REPORT_CSV_HEADER: &str = "family,root,terms_used,residual,converged,branch,accelerated";

fn report_csv_row(r: &SolveReport) -> String {
    format!(
        "{},{},{},{},{},{},{}",
        r.family,
        decimal(r.root),
        r.terms_used,
        decimal(r.residual),
        r.converged,
        branch_name(r),
        r.accelerated
    )
}

fn cmd_solve(args: &SolveArgs) -> Outcome {
    let eq = match equation_with_l(&args.params, args.l) {
        Ok(eq) => eq,
        Err(e) => return Outcome::usage(e),
    };
    let opts = match args.opts.solve_options() {
        Ok(o) => o,
        Err(e) => return Outcome::usage(e),
    };
    let report = match eq.solve(&opts) {
        Ok(r) => r,
        Err(e) => return library_failure(e),
    };
    let out = match args.format {
        Format::Json => to_json(&report) + "\n",
        Format::Csv => format!("{REPORT_CSV_HEADER}\n{}\n", report_csv_row(&report)),
        Format::Text => report_text(&report),
    };
    if report.converged {
        Outcome::ok(out)
    } else {
        let mut o = Outcome::with_code(EXIT_FAILURE, out);
        o.stderr = format!("error: series did not converge ({})\n", report.warnings.join("; "));
        o
    }
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
struct TermRow {
    n: usize,
    term: f64,
    partial_sum: f64,
    abs_residual: f64,
}

fn cmd_terms(args: &SolveArgs) -> Outcome {
    let eq = match equation_with_l(&args.params, args.l) {
        Ok(eq) => eq,
        Err(e) => return Outcome::usage(e),
    };
    let opts = match args.opts.solve_options() {
        Ok(o) => o,
        Err(e) => return Outcome::usage(e),
    };
    let trace = match eq.solve_traced(&opts) {
        Ok(t) => t,
        Err(e) => return library_failure(e),
    };
    let rows: Vec<TermRow> = trace
        .terms
        .iter()
        .zip(&trace.partial_sums[1..])
        .enumerate()
        .map(|(i, (t, s))| TermRow {
            n: i + 1,
            term: *t,
            partial_sum: *s,
            abs_residual: eq.residual(*s).abs(),
        })
        .collect();
    let out = match args.format {
        Format::Json => {
            to_json(&serde_json::json!({ "report": trace.report, "terms": rows })) + "\n"
        }
        Format::Csv => {
            let mut s = String::from("n,term,partial_sum,abs_residual\n");
            for r in &rows {
                let _ = writeln!(
                    s,
                    "{},{},{},{}",
                    r.n,
                    decimal(r.term),
                    decimal(r.partial_sum),
                    decimal(r.abs_residual)
                );
            }
            s
        }
        Format::Text => {
            let mut s = format!("{:>4}  {:>24}  {:>24}  {:>12}\n", "n", "term", "partial sum", "|residual|");
            for r in &rows {
                let _ = writeln!(
                    s,
                    "{:>4}  {:>24.16e}  {:>24.16}  {:>12.3e}",
                    r.n, r.term, r.partial_sum, r.abs_residual
                );
            }
            s
        }
    };
    Outcome::ok(out)
}

fn cmd_compare(args: &SolveArgs) -> Outcome {
    let eq = match equation_with_l(&args.params, args.l) {
        Ok(eq) => eq,
        Err(e) => return Outcome::usage(e),
    };
    let opts = match args.opts.solve_options() {
        Ok(o) => o,
        Err(e) => return Outcome::usage(e),
    };
    let rec: CompareRecord = match compare_report(&eq, &opts) {
        Ok(r) => r,
        Err(e) => return library_failure(e),
    };
    let out = match args.format {
        Format::Json => to_json(&rec) + "\n",
        Format::Csv => format!(
            "{REPORT_CSV_HEADER},newton_root,difference\n{},{},{}\n",
            report_csv_row(&rec.report),
            decimal(rec.newton_root),
            decimal(rec.difference)
        ),
        Format::Text => {
            let mut s = report_text(&rec.report);
            let _ = writeln!(s, "newton root  {}", rec.newton_root);
            let _ = writeln!(s, "difference   {:e}", rec.difference);
            if let Some(v) = rec.accelerated_value {
                let _ = writeln!(s, "wynn value   {v}");
            }
            if let Some(r) = rec.radius {
                let _ = writeln!(s, "radius       {} ({:?}, {:?})", r.estimate, r.method, r.confidence);
            }
            if let Some(p) = rec.paper_as_printed {
                let _ = writeln!(s, "printed form {p}");
            }
            s
        }
    };
    Outcome::ok(out)
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
struct RadiusRecord {
    family: Family,
    params: std::collections::BTreeMap<String, f64>,
    coefficients: usize,
    radius: genlambert::numeric::RadiusEstimate,
}

fn cmd_radius(args: &RadiusArgs) -> Outcome {
    let eq = match build_equation(&args.params, 0.0) {
        Ok(eq) => eq,
        Err(e) => return Outcome::usage(e),
    };
    if let Err(e) = eq.validate() {
        return library_failure(e);
    }
    let est = lagrange_coefficients(&eq.functional(), eq.base_point(), args.terms)
        .and_then(|sol| radius_estimate(&sol));
    let radius = match est {
        Ok(r) => r,
        Err(e) => return library_failure(e),
    };
    let mut params = eq.params();
    params.remove("l");
    let rec = RadiusRecord {
        family: eq.family(),
        params,
        coefficients: args.terms,
        radius,
    };
    let method = match radius.method {
        genlambert::numeric::RadiusMethod::Ratio => "ratio",
        genlambert::numeric::RadiusMethod::DombSykes => "dombSykes",
    };
    let confidence = match radius.confidence {
        genlambert::numeric::Confidence::Stable => "stable",
        genlambert::numeric::Confidence::Noisy => "noisy",
    };
    let out = match args.format {
        Format::Json => to_json(&rec) + "\n",
        Format::Csv => format!(
            "family,estimate,method,n_used,confidence\n{},{},{method},{},{confidence}\n",
            rec.family,
            decimal(radius.estimate),
            radius.n_used
        ),
        Format::Text => format!(
            "family      {}\nradius      {}\nmethod      {method}\nratios used {}\nconfidence  {confidence}\n",
            rec.family, radius.estimate, radius.n_used
        ),
    };
    Outcome::ok(out)
}

fn cmd_verify(args: &VerifyArgs) -> Outcome {
    let result = (|| -> genlambert::Result<(String, bool)> {
        match args.suite {
            Suite::Errata => {
                let errata = errata_report()?;
                let ok = errata
                    .iter()
                    .all(|e| e.status != genlambert::identity::ErrataStatus::Unresolved);
                let out = match args.format {
                    Format::Json => to_json(&errata) + "\n",
                    Format::Csv => errata_csv(&errata),
                    Format::Text => errata_text(&errata),
                };
                Ok((out, ok))
            }
            Suite::Identities | Suite::All => {
                let report = identity_suite(args.max_n)?;
                let closed = if args.suite == Suite::All {
                    Some(closed_form_checks()?)
                } else {
                    None
                };
                let ok = report.all_passed
                    && closed.as_ref().map_or(true, |c| c.iter().all(|c| c.passed));
                let out = match args.format {
                    Format::Json => {
                        let body = match &closed {
                            Some(c) => to_json(&serde_json::json!({
                                "checks": report.checks,
                                "closedForms": c,
                                "errata": report.errata,
                                "allPassed": ok,
                            })),
                            None => to_json(&report),
                        };
                        body + "\n"
                    }
                    Format::Csv => {
                        let mut s = String::from("check,n,passed\n");
                        for c in &report.checks {
                            let _ = writeln!(s, "{},{},{}", c.name, c.n, c.passed);
                        }
                        s
                    }
                    Format::Text => {
                        let mut s = String::new();
                        for c in &report.checks {
                            let mark = if c.passed { "PASS" } else { "FAIL" };
                            let _ = writeln!(s, "{mark} {} n={}", c.name, c.n);
                        }
                        for c in closed.iter().flatten() {
                            let mark = if c.passed { "PASS" } else { "FAIL" };
                            let _ = writeln!(
                                s,
                                "{mark} closedForm {} {:?} gap={:e}",
                                c.family, c.witness, c.max_rel_gap
                            );
                        }
                        s.push_str(&errata_text(&report.errata));
                        let _ = writeln!(s, "{}", if ok { "all checks passed" } else { "some checks FAILED" });
                        s
                    }
                };
                Ok((out, ok))
            }
        }
    })();
    match result {
        Ok((out, true)) => Outcome::ok(out),
        Ok((out, false)) => {
            let mut o = Outcome::with_code(EXIT_FAILURE, out);
            o.stderr = "error: identity mismatch\n".into();
            o
        }
        Err(e) => library_failure(e),
    }
}

fn errata_text(errata: &[genlambert::identity::ErrataEntry]) -> String {
    let mut s = String::new();
    for e in errata {
        let _ = writeln!(s, "ERRATUM {} [{:?}] {}", e.claim_id, e.status, e.paper_location);
        let _ = writeln!(s, "  printed:  {}", e.printed_form);
        let _ = writeln!(s, "  verified: {}", e.verified_form);
    }
    s
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn errata_csv(errata: &[genlambert::identity::ErrataEntry]) -> String {
    let mut s = String::from("claim_id,paper_location,printed_form,verified_form,status\n");
    for e in errata {
        let status = serde_json::to_value(e.status)
            .ok()
            .and_then(|v| v.as_str().map(str::to_string))
            .unwrap_or_default();
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            csv_field(&e.claim_id),
            csv_field(&e.paper_location),
            csv_field(&e.printed_form),
            csv_field(&e.verified_form),
            status
        );
    }
    s
}

fn cmd_sweep(args: &SweepArgs) -> Outcome {
    if args.steps < 1 || !args.l_min.is_finite() || !args.l_max.is_finite() {
        return Outcome::usage("--steps must be at least 1 and --l-min/--l-max finite");
    }
    let opts = match args.opts.solve_options() {
        Ok(o) => o,
        Err(e) => return Outcome::usage(e),
    };
    let base = match build_equation(&args.params, args.l_min) {
        Ok(eq) => eq,
        Err(e) => return Outcome::usage(e),
    };
    if let Err(e) = base.validate() {
        return library_failure(e);
    }
    let n = args.steps;
    let ls: Vec<f64> = (0..n)
        .map(|i| {
            if n == 1 {
                args.l_min
            } else if i == n - 1 {
                args.l_max
            } else {
                args.l_min + (args.l_max - args.l_min) * i as f64 / (n - 1) as f64
            }
        })
        .collect();
    // Computed in parallel, written in grid order by this thread alone.
    let lines: Result<Vec<String>, Error> = ls
        .par_iter()
        .map(|&l| base.with_l(l).solve(&opts).map(|r| to_json(&r)))
        .collect();
    match lines {
        Ok(lines) => Outcome::ok(lines.into_iter().map(|l| l + "\n").collect()),
        Err(e) => library_failure(e),
    }
}

/// Parse `argv` (including the program name) and run the command.
pub fn run_command<I, S>(argv: I) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    Outcome::ok(text)
                }
                _ => Outcome {
                    code: EXIT_USAGE,
                    stdout: String::new(),
                    stderr: text,
                },
            };
        }
    };
    match &cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Terms(a) => cmd_terms(a),
        Command::Compare(a) => cmd_compare(a),
        Command::Radius(a) => cmd_radius(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Sweep(a) => cmd_sweep(a),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &str) -> Outcome {
        run_command(std::iter::once("genlambert").chain(args.split_whitespace()))
    }

    #[test]
    fn decimal_has_enough_digits() {
        assert_eq!(decimal(0.1 / 3.0), "0.033333333333333333");
        assert_eq!(decimal(0.0), "0");
        assert_eq!(decimal(-2.5), "-2.5000000000000000");
        let digits = decimal(1.0 / 3.0).chars().filter(|c| c.is_ascii_digit()).count();
        assert!(digits >= 16);
    }

    #[test]
    fn missing_family_parameter_is_usage_error() {
        let o = run("solve --family quadexp --a 0 --l 0.1");
        assert_eq!(o.code, EXIT_USAGE);
        assert!(o.stderr.contains("--b"), "{}", o.stderr);
    }

    #[test]
    fn foreign_parameter_is_usage_error() {
        let o = run("solve --family gauss --a 0 --s 1 --l 0.1");
        assert_eq!(o.code, EXIT_USAGE);
        assert!(o.stderr.contains("--s"));
    }

    #[test]
    fn unknown_flag_is_usage_error() {
        assert_eq!(run("solve --family gauss --a 0 --l 0.1 --bogus").code, EXIT_USAGE);
        assert_eq!(run("solve --family nope --a 0 --l 0.1").code, EXIT_USAGE);
    }

    #[test]
    fn negative_values_parse() {
        let o = run("solve --family quadexp --a 0 --b -3 --l -0.1 --format json");
        assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    }

    #[test]
    fn help_exits_zero() {
        assert_eq!(run("--help").code, EXIT_OK);
    }
}
