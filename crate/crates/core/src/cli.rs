//! The `msp` command line: solve, verify and check instances, generate test
//! corpora, and emit JSON run reports.
//!
//! Exit codes: 0 when the verdict is positive and every check passed, 1 when
//! the verdict is negative or a check failed, 2 for unreadable or invalid
//! input.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::finance::{
    arbitrage_oracle, check_na_single, consistent_price_system, ArbitrageVerdict, ConeModel,
    FinanceError, PriceProcess,
};
use crate::generate::{generate_text, Profile};
use crate::rational::{format_rational, format_vector};
use crate::solver::{
    assemble_measure, solve, verify_solution, Solution, SolutionDoc, SolverError, Verdict,
};
use crate::tree::{Document, Instance};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_INVALID: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "msp",
    version,
    about = "Exact martingale selection on finite event trees"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide solvability and construct a selector with a martingale measure.
    Solve {
        instance: PathBuf,
        /// Stop after the backward pass.
        #[arg(long)]
        no_construct: bool,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Check a solution (bare or inside a run report) against an instance.
    Verify {
        instance: PathBuf,
        solution: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Equivalent martingale measure for a price process ("values" section).
    NaCheck {
        process: PathBuf,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Strictly consistent price system for solvency cones ("cones" section).
    Cps {
        model: PathBuf,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Print a random instance.
    Gen {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        profile: String,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Worker threads for per-level parallelism (default: all cores).
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Add wall-clock time to the report (makes it nondeterministic).
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verification {
    pub passed: bool,
    pub failures: Vec<String>,
}

impl Verification {
    fn from_failures(failures: Vec<String>) -> Self {
        Verification {
            passed: failures.is_empty(),
            failures,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureDoc {
    /// Density process per node.
    pub z: BTreeMap<String, String>,
    pub total_mass_is_one: bool,
    pub expected_density_is_one: bool,
    pub all_positive: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArbitrageDoc {
    pub arbitrage: bool,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub holdings: BTreeMap<String, Vec<String>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub leaf_wealth: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    /// `sha256:` digest of the instance file bytes.
    pub instance_digest: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verdict: Option<Verdict>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solution: Option<SolutionDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measure: Option<MeasureDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verification: Option<Verification>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arbitrage: Option<ArbitrageDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subspace_nodes: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<u64>,
}

impl RunReport {
    fn new(command: &str, input: &[u8]) -> Self {
        RunReport {
            command: command.to_string(),
            instance_digest: format!("sha256:{}", hex::encode(Sha256::digest(input))),
            verdict: None,
            solution: None,
            measure: None,
            verification: None,
            arbitrage: None,
            subspace_nodes: None,
            timing_ms: None,
        }
    }

    pub fn exit_code(&self) -> i32 {
        let verdict_ok = self.verdict.as_ref().is_none_or(Verdict::is_solvable);
        let checks_ok = self.verification.as_ref().is_none_or(|v| v.passed);
        if verdict_ok && checks_ok {
            EXIT_OK
        } else {
            EXIT_NEGATIVE
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// What the process should print and return.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn invalid(message: impl std::fmt::Display) -> Self {
        Outcome {
            code: EXIT_INVALID,
            stdout: String::new(),
            stderr: format!("error: {message}\n"),
        }
    }
}

/// Input problems (exit 2), kept apart from negative verdicts.
#[derive(Debug)]
struct Invalid(String);

impl<E: std::fmt::Display> From<E> for Invalid {
    fn from(e: E) -> Self {
        Invalid(e.to_string())
    }
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_INVALID
            } else {
                EXIT_OK
            };
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Outcome {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    execute(cli.command)
}

fn execute(command: Command) -> Outcome {
    match command {
        Command::Gen {
            seed,
            profile,
            output,
        } => {
            let profile: Profile = match profile.parse() {
                Ok(p) => p,
                Err(e) => return Outcome::invalid(e),
            };
            emit(generate_text(seed, profile), output.as_deref(), EXIT_OK)
        }
        Command::Verify {
            instance,
            solution,
            output,
        } => match run_verify(&instance, &solution) {
            Ok(report) => emit(report.to_json(), output.as_deref(), report.exit_code()),
            Err(Invalid(msg)) => Outcome::invalid(msg),
        },
        Command::Solve {
            instance,
            no_construct,
            run,
        } => with_report(&run, |bytes| run_solve(bytes, !no_construct), &instance),
        Command::NaCheck { process, run } => with_report(&run, run_na_check, &process),
        Command::Cps { model, run } => with_report(&run, run_cps, &model),
    }
}

fn with_report(
    args: &RunArgs,
    body: impl FnOnce(&[u8]) -> Result<RunReport, Invalid> + Send,
    input: &Path,
) -> Outcome {
    let bytes = match std::fs::read(input) {
        Ok(b) => b,
        Err(e) => return Outcome::invalid(format!("{}: {e}", input.display())),
    };
    let start = Instant::now();
    let result = match args.threads {
        Some(0) => return Outcome::invalid("--threads must be at least 1"),
        Some(k) => match rayon::ThreadPoolBuilder::new().num_threads(k).build() {
            Ok(pool) => pool.install(|| body(&bytes)),
            Err(e) => return Outcome::invalid(e),
        },
        None => body(&bytes),
    };
    match result {
        Ok(mut report) => {
            if args.timing {
                report.timing_ms = Some(start.elapsed().as_millis() as u64);
            }
            emit(report.to_json(), args.output.as_deref(), report.exit_code())
        }
        Err(Invalid(msg)) => Outcome::invalid(msg),
    }
}

fn emit(text: String, output: Option<&Path>, code: i32) -> Outcome {
    match output {
        Some(path) => match std::fs::write(path, &text) {
            Ok(()) => Outcome {
                code,
                stdout: String::new(),
                stderr: String::new(),
            },
            Err(e) => Outcome::invalid(format!("{}: {e}", path.display())),
        },
        None => Outcome {
            code,
            stdout: text,
            stderr: String::new(),
        },
    }
}

fn parse_document(bytes: &[u8]) -> Result<Document, Invalid> {
    let text = std::str::from_utf8(bytes)?;
    Ok(Document::parse(text)?)
}

/// Engine failures on valid input are bugs, but they still must not pass.
fn solver_failure(e: SolverError) -> Invalid {
    Invalid(format!("solver failed: {e}"))
}

fn checks(inst: &Instance, sol: &Solution) -> Result<(Verification, MeasureDoc), Invalid> {
    let mut failures: Vec<String> = verify_solution(inst, sol)
        .map_err(solver_failure)?
        .iter()
        .map(ToString::to_string)
        .collect();
    let m = assemble_measure(inst, sol);
    if !m.total_mass_is_one {
        failures.push("measure: leaf weights do not sum to 1".into());
    }
    if !m.expected_density_is_one {
        failures.push("measure: E_P[z_N] differs from 1".into());
    }
    if !m.all_positive {
        failures.push("measure: some leaf weight is not positive".into());
    }
    let z = inst
        .tree
        .nodes()
        .iter()
        .zip(&m.density)
        .map(|(n, z)| (n.id.clone(), format_rational(z)))
        .collect();
    let measure = MeasureDoc {
        z,
        total_mass_is_one: m.total_mass_is_one,
        expected_density_is_one: m.expected_density_is_one,
        all_positive: m.all_positive,
    };
    Ok((Verification::from_failures(failures), measure))
}

fn attach(report: &mut RunReport, inst: &Instance, sol: &Solution) -> Result<(), Invalid> {
    let (verification, measure) = checks(inst, sol)?;
    report.solution = Some(SolutionDoc::new(inst, sol));
    report.measure = Some(measure);
    report.verification = Some(verification);
    Ok(())
}

fn run_solve(bytes: &[u8], construct: bool) -> Result<RunReport, Invalid> {
    let inst = parse_document(bytes)?.instance()?;
    let mut report = RunReport::new("solve", bytes);
    let (state, sol) = solve(&inst, construct).map_err(solver_failure)?;
    report.verdict = Some(state.verdict);
    if let Some(sol) = sol {
        attach(&mut report, &inst, &sol)?;
    }
    Ok(report)
}

fn run_verify(instance: &Path, solution: &Path) -> Result<RunReport, Invalid> {
    let read = |p: &Path| std::fs::read(p).map_err(|e| Invalid(format!("{}: {e}", p.display())));
    let bytes = read(instance)?;
    let inst = parse_document(&bytes)?.instance()?;
    let sol_text = String::from_utf8(read(solution)?)?;
    let value: serde_json::Value = serde_json::from_str(&sol_text)?;
    let doc: SolutionDoc = if value.get("command").is_some() {
        let report: RunReport = serde_json::from_value(value)?;
        report
            .solution
            .ok_or_else(|| Invalid("report carries no solution".into()))?
    } else {
        serde_json::from_value(value)?
    };
    let sol = doc.to_solution(&inst)?;
    let mut report = RunReport::new("verify", &bytes);
    let (verification, measure) = checks(&inst, &sol)?;
    report.measure = Some(measure);
    report.verification = Some(verification);
    Ok(report)
}

fn finance_failure(e: FinanceError) -> Invalid {
    match e {
        FinanceError::Solver(s) => solver_failure(s),
        other => Invalid(other.to_string()),
    }
}

fn run_na_check(bytes: &[u8]) -> Result<RunReport, Invalid> {
    let doc = parse_document(bytes)?;
    let process = PriceProcess::from_document(&doc)?;
    let mut report = RunReport::new("na-check", bytes);
    let outcome = check_na_single(&process).map_err(finance_failure)?;
    let oracle = arbitrage_oracle(&process).map_err(finance_failure)?;
    let tree = &process.tree;
    let mut extra = Vec::new();
    let arbitrage = match oracle {
        ArbitrageVerdict::NoArbitrage => ArbitrageDoc {
            arbitrage: false,
            holdings: BTreeMap::new(),
            leaf_wealth: BTreeMap::new(),
        },
        ArbitrageVerdict::Arbitrage {
            strategy,
            leaf_wealth,
        } => ArbitrageDoc {
            arbitrage: true,
            holdings: strategy
                .iter()
                .map(|(u, h)| (tree.node(*u).id.clone(), format_vector(h)))
                .collect(),
            leaf_wealth: leaf_wealth
                .iter()
                .map(|(l, w)| (tree.node(*l).id.clone(), format_rational(w)))
                .collect(),
        },
    };
    if arbitrage.arbitrage == outcome.no_arbitrage() {
        extra.push("arbitrage oracle disagrees with the martingale verdict".to_string());
    }
    report.verdict = Some(outcome.verdict.clone());
    report.arbitrage = Some(arbitrage);
    if let Some(sol) = &outcome.solution {
        attach(&mut report, &outcome.instance, sol)?;
        for (v, n) in tree.nodes().iter().enumerate() {
            if sol.x[v] != process.values[v] {
                extra.push(format!("node {}: selector differs from the price", n.id));
            }
        }
    }
    if !extra.is_empty() {
        let v = report
            .verification
            .get_or_insert_with(|| Verification::from_failures(Vec::new()));
        v.failures.extend(extra);
        v.passed = false;
    }
    Ok(report)
}

fn run_cps(bytes: &[u8]) -> Result<RunReport, Invalid> {
    let doc = parse_document(bytes)?;
    let model = ConeModel::from_document(&doc).map_err(finance_failure)?;
    let mut report = RunReport::new("cps", bytes);
    let outcome = consistent_price_system(&model).map_err(finance_failure)?;
    report.verdict = Some(outcome.verdict.clone());
    report.subspace_nodes = Some(outcome.subspace_nodes.clone());
    if let Some(sol) = &outcome.solution {
        attach(&mut report, &outcome.instance, sol)?;
    }
    Ok(report)
}
