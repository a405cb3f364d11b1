//! `expsum-ode`: solve, verify and inspect linear ODEs with exponential-sum
//! coefficients.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use expsum_ode::document::{
    source_label, verify_candidates, DocumentError, IndicialReport, ParsedProblem, ProblemDocument, RootDoc,
    SolutionDocument, TransformReport, VerifyReport,
};
use expsum_ode::roots::RootConfig;
use expsum_ode::solver::{analyze, DEFAULT_MAX_DEGREE};
use expsum_ode::verify::DEFAULT_VERIFY_TOL;
use expsum_ode::{solve, SolveError, SolverConfig};

const EXIT_FAILED_VERIFY: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_UNSUPPORTED: u8 = 3;
const EXIT_NUMERIC: u8 = 4;
const EXIT_CAP: u8 = 5;

#[derive(Parser)]
#[command(
    name = "expsum-ode",
    version,
    about = "Exponential-sum solutions of linear ODEs with exponential-sum coefficients"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute a basis of exponential-sum solutions.
    Solve {
        problem: PathBuf,
        #[command(flatten)]
        opts: Opts,
    },
    /// Substitute candidate solutions into a problem.
    Verify {
        problem: PathBuf,
        solution: PathBuf,
        #[command(flatten)]
        opts: Opts,
    },
    /// Indicial polynomial, its roots and their integer-difference classes.
    Indicial {
        problem: PathBuf,
        #[command(flatten)]
        opts: Opts,
    },
    /// The equation in t = e^w and the per-root u-equations.
    Transform {
        problem: PathBuf,
        #[command(flatten)]
        opts: Opts,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exact,
    Numeric,
}

#[derive(Args)]
struct Opts {
    /// Arithmetic; defaults to exact unless the input contains decimals.
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    /// Relative residual tolerance for floating-point verification.
    #[arg(long, default_value_t = DEFAULT_VERIFY_TOL)]
    tol: f64,
    /// Largest admissible polynomial degree.
    #[arg(long, default_value_t = DEFAULT_MAX_DEGREE)]
    max_degree: usize,
    /// Largest denominator when reading decimal frequencies as rationals.
    #[arg(long, default_value_t = RootConfig::default().denominator_bound)]
    snap_denominator_bound: u64,
    #[arg(long, default_value_t = RootConfig::default().cluster_tol)]
    cluster_tol: f64,
    #[arg(long, default_value_t = RootConfig::default().class_tol)]
    class_tol: f64,
    /// Write the JSON report to this path instead of printing a table ("-" for stdout).
    #[arg(long, value_name = "PATH")]
    json: Option<PathBuf>,
}

/// Failure carrying its exit code; the message goes to stderr.
struct Failure(u8, String);

impl From<DocumentError> for Failure {
    fn from(e: DocumentError) -> Self {
        Failure(EXIT_PARSE, e.to_string())
    }
}

impl From<SolveError> for Failure {
    fn from(e: SolveError) -> Self {
        let code = match e {
            SolveError::Unsupported { .. } => EXIT_UNSUPPORTED,
            SolveError::CapExceeded { .. } => EXIT_CAP,
            SolveError::Normalize(_) => EXIT_PARSE,
            SolveError::NumericFailure(_) | SolveError::InternalInconsistency(_) | SolveError::Algebra(_) => {
                EXIT_NUMERIC
            }
        };
        Failure(code, e.to_string())
    }
}

impl Opts {
    fn config(&self, parsed: &ParsedProblem) -> SolverConfig {
        let force_numeric = match self.mode {
            Some(ModeArg::Numeric) => true,
            Some(ModeArg::Exact) => false,
            None => parsed.approximate_input,
        };
        SolverConfig {
            max_degree: self.max_degree,
            tol: self.tol,
            roots: RootConfig {
                cluster_tol: self.cluster_tol,
                class_tol: self.class_tol,
                denominator_bound: self.snap_denominator_bound,
                ..RootConfig::default()
            },
            force_numeric,
        }
    }

    fn load(&self, path: &Path) -> Result<ParsedProblem, Failure> {
        let doc = ProblemDocument::from_json(&read(path)?)?;
        let parsed = doc.parse(self.snap_denominator_bound)?;
        if parsed.approximate_input && matches!(self.mode, Some(ModeArg::Exact)) {
            eprintln!("note: decimal coefficients are read as the exact values of their doubles");
        }
        Ok(parsed)
    }

    /// JSON to the requested path, or the table to stdout.
    fn emit(&self, json: String, table: impl FnOnce() -> String) -> Result<(), Failure> {
        match &self.json {
            Some(p) if p.as_os_str() == "-" => println!("{json}"),
            Some(p) => std::fs::write(p, json + "\n")
                .map_err(|e| Failure(EXIT_PARSE, format!("cannot write {}: {e}", p.display())))?,
            None => print!("{}", table()),
        }
        Ok(())
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure(EXIT_PARSE, format!("cannot read {}: {e}", path.display())))
}

fn roots_table(out: &mut String, roots: &[RootDoc]) {
    let w = roots.iter().map(|r| r.value.chars().count()).max().unwrap_or(0).max(4);
    let _ = writeln!(out, "roots:");
    let _ = writeln!(out, "  {:<w$}  mult  exact  class", "root");
    for r in roots {
        let _ = writeln!(
            out,
            "  {:<w$}  {:>4}  {:<5}  {}",
            r.value,
            r.multiplicity,
            if r.exact { "yes" } else { "no" },
            r.class
        );
    }
}

fn cmd_solve(problem: &Path, opts: &Opts) -> Result<u8, Failure> {
    let parsed = opts.load(problem)?;
    let report = solve(&parsed.raw, &opts.config(&parsed))?;
    let doc = SolutionDocument::from_report(&report);
    let meta = doc.metadata.as_ref().expect("reports carry metadata");
    opts.emit(doc.to_json(), || {
        let mut out = String::new();
        let _ = writeln!(out, "mode: {}", format!("{:?}", meta.mode).to_lowercase());
        let _ = writeln!(out, "indicial polynomial: {}", meta.indicial);
        roots_table(&mut out, &meta.roots);
        if report.basis.is_empty() {
            let _ = writeln!(out, "no finite-order solutions");
        } else {
            let _ = writeln!(out, "basis ({} of at most {}):", report.basis.len(), meta.count_bound);
            for (i, (sol, source, cert)) in report.basis.rendered().iter().enumerate() {
                let status = if cert.is_zero { "verified" } else { "FAILED" };
                let _ = writeln!(out, "  f{} = {sol}", i + 1);
                let _ = writeln!(out, "       {status}, {}", source_label(source));
            }
        }
        let _ = writeln!(out, "rank: {}", meta.rank);
        for n in &meta.notes {
            let _ = writeln!(out, "note: {n}");
        }
        out
    })?;
    Ok(0)
}

fn cmd_verify(problem: &Path, solution: &Path, opts: &Opts) -> Result<u8, Failure> {
    let parsed = opts.load(problem)?;
    let cands = SolutionDocument::from_json(&read(solution)?)?.candidates()?;
    let report: VerifyReport = verify_candidates(&parsed, &cands, opts.tol)?;
    let json = serde_json::to_string_pretty(&report).expect("serializable");
    opts.emit(json, || {
        let mut out = String::new();
        let _ = writeln!(out, "mode: {}", format!("{:?}", report.mode).to_lowercase());
        for c in &report.candidates {
            let v = &c.verification;
            let _ = writeln!(out, "  [{}] {}", c.index, c.solution);
            if v.verified {
                let _ = writeln!(out, "      verified (max residual {:e})", v.max_residual);
            } else {
                let _ = writeln!(
                    out,
                    "      FAILED: residual {:e} at frequency {} (threshold {:e})",
                    v.max_residual,
                    v.worst_frequency.as_deref().unwrap_or("?"),
                    v.threshold
                );
            }
        }
        let _ = writeln!(out, "{}", if report.all_verified { "all candidates verify" } else { "some candidates fail" });
        out
    })?;
    Ok(if report.all_verified { 0 } else { EXIT_FAILED_VERIFY })
}

fn cmd_indicial(problem: &Path, opts: &Opts) -> Result<u8, Failure> {
    let parsed = opts.load(problem)?;
    let a = analyze(&parsed.raw, &opts.config(&parsed))?;
    let report = IndicialReport::new(&a);
    let json = serde_json::to_string_pretty(&report).expect("serializable");
    opts.emit(json, || {
        let mut out = String::new();
        let _ = writeln!(out, "indicial polynomial: {}", report.indicial);
        roots_table(&mut out, &report.roots);
        let _ = writeln!(out, "classes:");
        for (i, c) in report.classes.iter().enumerate() {
            let _ =
                writeln!(out, "  {i}: base {}, offsets {:?}, multiplicities {:?}", c.base, c.offsets, c.multiplicities);
            if let Some(w) = &c.warning {
                let _ = writeln!(out, "     warning: {w}");
            }
        }
        out
    })?;
    Ok(0)
}

fn cmd_transform(problem: &Path, opts: &Opts) -> Result<u8, Failure> {
    let parsed = opts.load(problem)?;
    let a = analyze(&parsed.raw, &opts.config(&parsed))?;
    let report = TransformReport::new(&a).map_err(SolveError::from)?;
    let json = serde_json::to_string_pretty(&report).expect("serializable");
    opts.emit(json, || {
        let mut out = String::new();
        let _ = writeln!(out, "alpha (Σ α_i t^i v^(i) = 0):");
        for (i, p) in report.alpha.iter().enumerate() {
            let _ = writeln!(out, "  α_{i} = {p}");
        }
        let _ = writeln!(out, "operator (t^{} removed):", report.common_t_power);
        for (i, p) in report.operator.iter().enumerate() {
            let _ = writeln!(out, "  v^({i}): {p}");
        }
        for u in &report.u_equations {
            let _ = writeln!(out, "u-equation at λ = {} (t^{} removed):", u.lambda, u.common_t_power);
            for (i, p) in u.operator.iter().enumerate() {
                let _ = writeln!(out, "  u^({i}): {p}");
            }
        }
        out
    })?;
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Solve { problem, opts } => cmd_solve(problem, opts),
        Command::Verify { problem, solution, opts } => cmd_verify(problem, solution, opts),
        Command::Indicial { problem, opts } => cmd_indicial(problem, opts),
        Command::Transform { problem, opts } => cmd_transform(problem, opts),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Failure(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
