//! Command-line front end: check definitions, run the proximal iteration,
//! query the brute-force oracle, and replay the built-in corpus.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use proxima::checkers::{run_check, CheckName, CheckOutput, Verdict};
use proxima::corpus;
use proxima::instance::ProblemInstance;
use proxima::oracle;
use proxima::probfile::{self, FileError};
use proxima::report::{self, CheckDocument, OracleDocument, SolveDocument, SCHEMA_VERSION};
use proxima::solver::{iterate, SolveOptions, TraceStatus};

#[derive(Parser)]
#[command(
    name = "proxima",
    version,
    about = "Best-proximity analysis on finite point sets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check contraction classes and structural conditions.
    Check {
        #[command(flatten)]
        source: SourceArgs,
        /// Check to run (repeatable; default: all).
        #[arg(long = "def", value_name = "NAME")]
        defs: Vec<String>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run the proximal iteration.
    Solve {
        #[command(flatten)]
        source: SourceArgs,
        /// Convergence tolerance on the consecutive gap.
        #[arg(long)]
        conv_tol: Option<f64>,
        /// Iteration cap.
        #[arg(long)]
        max_iters: Option<usize>,
        /// Write the trace as CSV to this path.
        #[arg(long, value_name = "PATH")]
        trace: Option<PathBuf>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Brute-force scan for best proximity points.
    Oracle {
        #[command(flatten)]
        source: SourceArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Replay the built-in instances against their expected results.
    Corpus {
        /// Only entries whose name contains this substring.
        #[arg(long)]
        filter: Option<String>,
        /// Export every selected entry as a problem file into this directory.
        #[arg(long, value_name = "DIR")]
        export_dir: Option<PathBuf>,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Args)]
struct SourceArgs {
    /// Built-in instance name (see `corpus`).
    #[arg(long, value_name = "NAME", conflicts_with = "file")]
    builtin: Option<String>,
    /// Problem-definition file.
    #[arg(long, value_name = "PATH")]
    file: Option<PathBuf>,
    /// Override the equality tolerance eps_eq.
    #[arg(long, value_name = "X")]
    eps_eq: Option<f64>,
}

#[derive(Args)]
struct OutputArgs {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Worker threads for the scans (default: all cores).
    #[arg(long, value_name = "N")]
    threads: Option<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Structured,
}

// Exit codes: 0 all requested checks hold / solve converged; 1 a verdict
// failed or a run did not converge; 2 invalid configuration; 3 file not
// found; 4 invalid problem file.
const EXIT_FAILED: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_NOT_FOUND: u8 = 3;
const EXIT_BAD_FILE: u8 = 4;

enum CliError {
    Config(String),
    NotFound(String),
    BadFile(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::NotFound(_) => EXIT_NOT_FOUND,
            CliError::BadFile(_) => EXIT_BAD_FILE,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::NotFound(m) | CliError::BadFile(m) => m,
        }
    }
}

fn load_instance(source: &SourceArgs) -> Result<ProblemInstance, CliError> {
    let inst = match (&source.builtin, &source.file) {
        (Some(name), None) => {
            corpus::load_builtin(name)
                .map_err(|e| CliError::Config(e.to_string()))?
                .instance
        }
        (None, Some(path)) => probfile::load(path).map_err(|e| match e {
            FileError::Io { .. } => CliError::NotFound(e.to_string()),
            other => CliError::BadFile(other.to_string()),
        })?,
        _ => {
            return Err(CliError::Config(
                "exactly one of --builtin or --file is required".to_string(),
            ))
        }
    };
    match source.eps_eq {
        None => Ok(inst),
        Some(eps) => inst
            .with_eps_eq(eps)
            .map_err(|e| CliError::Config(e.to_string())),
    }
}

fn configure_threads(output: &OutputArgs) {
    if let Some(n) = output.threads {
        // ignored if a pool already exists; results do not depend on it
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
}

fn parse_defs(defs: &[String]) -> Result<Vec<CheckName>, CliError> {
    if defs.is_empty() {
        return Ok(CheckName::ALL.to_vec());
    }
    defs.iter()
        .map(|d| {
            CheckName::parse(d).ok_or_else(|| {
                let known: Vec<&str> = CheckName::ALL.iter().map(|c| c.as_str()).collect();
                CliError::Config(format!("unknown check '{d}'; known: {}", known.join(", ")))
            })
        })
        .collect()
}

fn print_check_text(inst: &ProblemInstance, outputs: &[CheckOutput], warnings: usize) {
    println!(
        "instance {} (Re: {} points, Om: {} points, D = {})",
        inst.name(),
        inst.re().len(),
        inst.om().len(),
        inst.proximity_distance()
    );
    if warnings > 0 {
        println!("note: {warnings} image(s) of F fall outside Om");
    }
    for out in outputs {
        match out {
            CheckOutput::Report(r) => {
                let verdict = match r.verdict {
                    Verdict::Holds => "holds",
                    Verdict::Fails => "fails",
                    Verdict::Vacuous => "vacuous",
                };
                print!("check {}: {verdict}", r.definition);
                if let Some(c) = r.min_c {
                    print!(" (min_c = {c})");
                }
                println!(" [scanned {}]", r.pairs_scanned);
                if let Some(w) = &r.witness {
                    println!(
                        "  witness: alpha1={} alpha2={} beta1={} beta2={}",
                        w.alpha1, w.alpha2, w.beta1, w.beta2
                    );
                    println!("  lhs = {}  rhs = {}", w.lhs, w.rhs);
                }
                if let Some(d) = &r.detail {
                    println!("  {d}");
                }
            }
            CheckOutput::Axioms(a) => {
                println!(
                    "check phi-axioms: zero_iff_equal {}, symmetric {}, triangle {} \
                     [sample {}]",
                    verdict_word(a.zero_iff_equal.holds),
                    verdict_word(a.symmetric.holds),
                    verdict_word(a.triangle.holds),
                    a.sample_size
                );
                for (axiom, v) in [
                    ("zero_iff_equal", &a.zero_iff_equal),
                    ("symmetric", &a.symmetric),
                    ("triangle", &a.triangle),
                ] {
                    if let Some(w) = &v.witness {
                        let pts: Vec<String> = w.points.iter().map(|p| p.to_string()).collect();
                        println!(
                            "  {axiom} witness: {} with lhs = {} rhs = {}",
                            pts.join(", "),
                            w.lhs,
                            w.rhs
                        );
                    }
                }
            }
        }
    }
}

fn verdict_word(holds: bool) -> &'static str {
    if holds {
        "holds"
    } else {
        "fails"
    }
}

fn cmd_check(source: &SourceArgs, defs: &[String], output: &OutputArgs) -> Result<bool, CliError> {
    let names = parse_defs(defs)?;
    let inst = load_instance(source)?;
    configure_threads(output);
    let outputs: Vec<CheckOutput> = names.iter().map(|n| run_check(&inst, *n)).collect();
    let warnings = inst.range_warnings().len();
    let all_pass = outputs.iter().all(|o| o.passes());
    match output.format {
        Format::Text => print_check_text(&inst, &outputs, warnings),
        Format::Structured => {
            let doc = CheckDocument {
                schema_version: SCHEMA_VERSION,
                instance: inst.name().to_string(),
                reports: outputs,
                range_warnings: warnings,
            };
            println!("{}", serde_json::to_string_pretty(&doc).unwrap());
        }
    }
    Ok(all_pass)
}

fn cmd_solve(
    source: &SourceArgs,
    conv_tol: Option<f64>,
    max_iters: Option<usize>,
    trace_path: Option<&PathBuf>,
    output: &OutputArgs,
) -> Result<bool, CliError> {
    let inst = load_instance(source)?;
    configure_threads(output);
    let options = SolveOptions {
        start: None,
        max_iters,
        conv_tol,
        feas_tol: None,
    };
    let trace = match iterate(&inst, &options) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return Ok(false);
        }
    };
    if let Some(path) = trace_path {
        std::fs::write(path, report::trace_csv(&trace)).map_err(|e| {
            CliError::Config(format!("cannot write trace to {}: {e}", path.display()))
        })?;
    }
    let converged = trace.status == TraceStatus::Converged;
    match output.format {
        Format::Text => {
            println!(
                "instance {}: {} after {} iteration(s)",
                inst.name(),
                match trace.status {
                    TraceStatus::Converged => "converged",
                    TraceStatus::MaxIters => "stopped at the iteration cap",
                    TraceStatus::InfeasibleStep => "stopped on an infeasible step",
                },
                trace.iterations()
            );
            println!("final point: {}", trace.final_point());
            println!("final residual: {}", trace.final_residual);
        }
        Format::Structured => {
            let doc = SolveDocument::from_trace(inst.name(), &trace);
            println!("{}", serde_json::to_string_pretty(&doc).unwrap());
        }
    }
    Ok(converged)
}

fn cmd_oracle(source: &SourceArgs, output: &OutputArgs) -> Result<bool, CliError> {
    let inst = load_instance(source)?;
    configure_threads(output);
    let result = oracle::brute_force_bpp(&inst);
    match output.format {
        Format::Text => {
            println!(
                "instance {}: D = {}, {} candidate(s), unique = {}",
                inst.name(),
                result.d_phi_value,
                result.bpp_candidates.len(),
                result.is_unique
            );
            for (p, r) in result.bpp_candidates.iter().take(10) {
                println!("  {p} with residual {r}");
            }
            if result.bpp_candidates.len() > 10 {
                println!("  ... and {} more", result.bpp_candidates.len() - 10);
            }
        }
        Format::Structured => {
            let doc = OracleDocument {
                schema_version: SCHEMA_VERSION,
                instance: inst.name().to_string(),
                result,
            };
            println!("{}", serde_json::to_string_pretty(&doc).unwrap());
        }
    }
    Ok(true)
}

#[derive(serde::Serialize)]
struct CorpusDocument {
    schema_version: u32,
    entries: Vec<corpus::EntryResult>,
}

fn cmd_corpus(
    filter: Option<&str>,
    export_dir: Option<&PathBuf>,
    output: &OutputArgs,
) -> Result<bool, CliError> {
    configure_threads(output);
    if let Some(dir) = export_dir {
        std::fs::create_dir_all(dir)
            .map_err(|e| CliError::Config(format!("cannot create {}: {e}", dir.display())))?;
        for entry in corpus::all_entries() {
            if filter.is_some_and(|f| !entry.name.contains(f)) {
                continue;
            }
            let path = dir.join(format!("{}.prob", entry.name));
            std::fs::write(&path, probfile::to_toml_string(&entry.instance))
                .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))?;
        }
    }
    let results = corpus::run_regressions(filter);
    let all_pass = results.iter().all(|r| r.passed());
    match output.format {
        Format::Text => {
            for entry in &results {
                let ok = entry.results.iter().filter(|r| r.passed).count();
                println!(
                    "{}: {} ({}/{} expectations)",
                    entry.name,
                    if entry.passed() { "pass" } else { "FAIL" },
                    ok,
                    entry.results.len()
                );
                for r in entry.results.iter().filter(|r| !r.passed) {
                    println!("  FAILED {} — {}", r.description, r.detail);
                    println!("    expected because: {}", r.note);
                }
                for d in &entry.discrepancies {
                    println!("  note: {d}");
                }
            }
            if results.is_empty() {
                println!("no entries selected");
            }
        }
        Format::Structured => {
            let doc = CorpusDocument {
                schema_version: SCHEMA_VERSION,
                entries: results,
            };
            println!("{}", serde_json::to_string_pretty(&doc).unwrap());
        }
    }
    Ok(all_pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Check {
            source,
            defs,
            output,
        } => cmd_check(source, defs, output),
        Command::Solve {
            source,
            conv_tol,
            max_iters,
            trace,
            output,
        } => cmd_solve(source, *conv_tol, *max_iters, trace.as_ref(), output),
        Command::Oracle { source, output } => cmd_oracle(source, output),
        Command::Corpus {
            filter,
            export_dir,
            output,
        } => cmd_corpus(filter.as_deref(), export_dir.as_ref(), output),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_FAILED),
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
