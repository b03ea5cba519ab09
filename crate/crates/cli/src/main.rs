//! `qcsp`: command-line front end.
//!
//! Exit codes: 0 verdict produced, 1 internal error (a witness failed its
//! replay), 2 unreadable or malformed input, 3 mode precondition violated,
//! 4 resource bound exceeded, 5 output could not be written.

mod bench;
mod witness;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qcsp::analysis::{check_cross_prevention, probe_convexity, ProbeMode, Signature};
use qcsp::combine::{
    check_combined_witness, solve_auto_with, solve_complete_with, solve_convex, CombinedProblem, CombinedWitness,
    SolveOptions,
};
use qcsp::formulas::{parse_problem, render_problem, ParseError};
use qcsp::henson::{combination_problem, component_label_solve, HensonProblem};
use qcsp::oracle::superpose_bruteforce;
use qcsp::theories::{HensonSolver, TheorySolver};
use qcsp::{PPFormula, Problem, SolveError, SolveResult, TheoryId, TheoryKind, Variable};
use thiserror::Error;

#[derive(Debug, Error)]
enum CliError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: io::Error },
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: ParseError },
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error("witness replay failed: {0}")]
    Replay(String),
    #[error("write failed: {0}")]
    Write(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Replay(_) => 1,
            CliError::Read { .. } | CliError::Parse { .. } | CliError::Input(_) => 2,
            CliError::Solve(SolveError::ConvexityNotDeclared(_) | SolveError::ConvexityRefuted(_)) => 3,
            CliError::Solve(SolveError::BoundExceeded { .. }) => 4,
            CliError::Solve(_) => 2,
            CliError::Write(_) => 5,
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Write(e.to_string())
    }
}

type Result<T> = std::result::Result<T, CliError>;

#[derive(Parser)]
#[command(
    name = "qcsp",
    version,
    about = "Combined constraint satisfaction over order, equality and digraph theories"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    /// Convex propagation if every theory is declared convex, else search.
    Auto,
    Convex,
    Complete,
}

#[derive(Subcommand)]
enum Command {
    /// Decide a combined instance.
    Solve {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "auto")]
        mode: Mode,
        /// Print the arrangement and per-theory models after `SAT`.
        #[arg(long)]
        witness: bool,
        /// Explore arrangements concurrently.
        #[arg(long)]
        parallel: bool,
    },
    /// Decide by brute-force superposition over all variable partitions.
    Oracle {
        file: PathBuf,
        #[arg(long)]
        witness: bool,
    },
    /// Search small instances of one theory for a refutation of convexity.
    ProbeConvexity(ProbeArgs),
    /// Check the cross-prevention conditions for the file's instance as a
    /// pp-formula.
    CrossCheck {
        file: PathBuf,
        /// The four free variables x,y,u,v; other variables are existential.
        #[arg(long, value_delimiter = ',', required = true)]
        free: Vec<String>,
    },
    /// Henson digraph reductions.
    #[command(subcommand)]
    Henson(HensonCommand),
    /// Time convex propagation and arrangement search on seeded families.
    Bench {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Also write the table as CSV.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 5)]
        runs: usize,
    },
}

#[derive(Args)]
struct ProbeArgs {
    file: PathBuf,
    #[arg(long)]
    max_vars: usize,
    #[arg(long)]
    max_atoms: usize,
    #[arg(long, conflicts_with = "random")]
    exhaustive: bool,
    /// Number of random candidate instances.
    #[arg(long, requires = "seed")]
    random: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Theory to probe when the file declares several.
    #[arg(long)]
    theory: Option<String>,
    /// Relations to use, e.g. `leq,mi`; defaults to all of the theory's.
    #[arg(long, value_delimiter = ',')]
    relations: Option<Vec<String>>,
}

#[derive(Subcommand)]
enum HensonCommand {
    /// Decide an instance in the Henson digraph itself.
    Solve {
        file: PathBuf,
        #[arg(long)]
        witness: bool,
    },
    /// Print `S*` as an instance of the looped digraph combined with equality.
    ReduceUp { file: PathBuf },
    /// Decide an instance of the looped digraph with equality by component
    /// labelling.
    ReduceDown {
        file: PathBuf,
        #[arg(long)]
        witness: bool,
    },
}

fn load(path: &Path) -> Result<Problem> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    parse_problem(&text).map_err(|source| CliError::Parse {
        path: path.to_path_buf(),
        source,
    })
}

/// Prints the witness, then reads the printed lines back and replays them
/// against the problem.
fn emit_witness(out: &mut impl Write, problem: &Problem, w: &CombinedWitness) -> Result<()> {
    let lines = witness::witness_lines(w);
    for l in &lines {
        writeln!(out, "{l}")?;
    }
    let refs: Vec<&str> = lines.iter().map(String::as_str).collect();
    let back = witness::parse_witness(problem, &refs).map_err(CliError::Replay)?;
    check_combined_witness(problem, &back).map_err(|e| CliError::Replay(e.to_string()))
}

fn report(out: &mut impl Write, problem: &Problem, res: &SolveResult<CombinedWitness>, show: bool) -> Result<()> {
    writeln!(out, "{}", res.verdict())?;
    if let (true, Some(w)) = (show, res.witness()) {
        emit_witness(out, problem, w)?;
    }
    Ok(())
}

fn single_theory<'a>(problem: &'a Problem, requested: Option<&str>) -> Result<(&'a TheoryId, &'a TheoryKind)> {
    let mut candidates = problem
        .theories
        .iter()
        .filter(|(tid, _)| requested.is_none_or(|r| tid.name() == r));
    match (candidates.next(), candidates.next()) {
        (Some((tid, decl)), None) => Ok((tid, &decl.kind)),
        (None, _) => Err(CliError::Input(match requested {
            Some(r) => format!("no theory named {r}"),
            None => "the file declares no theory".into(),
        })),
        (Some(_), Some(_)) => Err(CliError::Input(
            "several theories declared; pick one with --theory".into(),
        )),
    }
}

fn probe(out: &mut impl Write, args: &ProbeArgs) -> Result<()> {
    let problem = load(&args.file)?;
    let (tid, kind) = single_theory(&problem, args.theory.as_deref())?;
    let signature = match &args.relations {
        None => Signature::of_solver(tid.clone(), kind),
        Some(names) => {
            let relations = names
                .iter()
                .map(|n| {
                    kind.arity_of(n)
                        .map(|k| (n.clone(), k))
                        .ok_or_else(|| CliError::Input(format!("theory {tid} has no relation {n}")))
                })
                .collect::<Result<_>>()?;
            Signature {
                theory: tid.clone(),
                relations,
            }
        }
    };
    let mode = match (args.random, args.seed) {
        (Some(count), Some(seed)) => ProbeMode::Random { count, seed },
        _ => ProbeMode::Exhaustive,
    };
    match probe_convexity(kind, &signature, args.max_vars, args.max_atoms, mode)? {
        None => writeln!(out, "NO WITNESS")?,
        Some(w) => {
            writeln!(out, "NOT CONVEX")?;
            let rendered = render_problem(&Problem::new().with_instance(w.instance().clone()));
            for line in rendered.lines() {
                writeln!(out, "{line}")?;
            }
            for (x, y) in [w.pair1(), w.pair2()] {
                writeln!(out, "pair {x} {y}")?;
            }
            let verdicts: Vec<String> = w.results().iter().map(|r| r.verdict().to_string()).collect();
            writeln!(out, "results {}", verdicts.join(" "))?;
        }
    }
    Ok(())
}

fn cross_check(out: &mut impl Write, file: &Path, free: &[String]) -> Result<()> {
    let problem = load(file)?;
    let (_, kind) = single_theory(&problem, None)?;
    if free.len() != 4 {
        return Err(CliError::Input(format!(
            "--free needs four variables, got {}",
            free.len()
        )));
    }
    let free: Vec<Variable> = free.iter().map(Variable::new).collect();
    let formula = PPFormula::new(free, problem.instance.clone()).map_err(CliError::Input)?;
    let report = check_cross_prevention(kind, &formula)?;
    writeln!(out, "{}", if report.passes() { "PASS" } else { "FAIL" })?;
    for (name, c) in [
        ("cond1", &report.cond1),
        ("cond2", &report.cond2),
        ("cond3", &report.cond3),
    ] {
        writeln!(
            out,
            "{name} {} {}",
            if c.holds { "holds" } else { "fails" },
            c.result.verdict()
        )?;
    }
    Ok(())
}

fn henson(out: &mut impl Write, cmd: &HensonCommand) -> Result<()> {
    match cmd {
        HensonCommand::Solve { file, witness } => {
            let problem = load(file)?;
            let hp = HensonProblem::from_problem(&problem)?;
            let res = hp.decide()?;
            writeln!(out, "{}", res.verdict())?;
            if let (true, Some(m)) = (*witness, res.witness()) {
                for l in witness::model_lines(&hp.theory, m) {
                    writeln!(out, "{l}")?;
                }
                HensonSolver::new(hp.forbidden.clone())
                    .check_model(&hp.instance, m)
                    .map_err(|e| CliError::Replay(e.to_string()))?;
            }
        }
        HensonCommand::ReduceUp { file } => {
            let hp = HensonProblem::from_problem(&load(file)?)?;
            write!(out, "{}", render_problem(&hp.s_star_problem()))?;
        }
        HensonCommand::ReduceDown { file, witness } => {
            let problem = load(file)?;
            let hp = HensonProblem::from_problem(&problem)?;
            let res = component_label_solve(&hp.instance, &hp.forbidden)?;
            writeln!(out, "{}", res.verdict())?;
            if let (true, Some(m)) = (*witness, res.witness()) {
                for l in witness::model_lines(&hp.theory, m) {
                    writeln!(out, "{l}")?;
                }
                let combined = combination_problem(&hp.theory, &hp.forbidden, hp.instance.clone());
                HensonSolver::with_loop_vertex(hp.forbidden.clone())
                    .check_model(&combined.instance, m)
                    .map_err(|e| CliError::Replay(e.to_string()))?;
            }
        }
    }
    Ok(())
}

fn run(cli: Cli, out: &mut impl Write) -> Result<()> {
    match cli.command {
        Command::Solve {
            file,
            mode,
            witness,
            parallel,
        } => {
            let problem = load(&file)?;
            let cp = CombinedProblem::new(problem.clone())?;
            let options = SolveOptions { parallel };
            let res = match mode {
                Mode::Auto => solve_auto_with(&cp, options)?,
                Mode::Convex => solve_convex(&cp)?,
                Mode::Complete => solve_complete_with(&cp, options)?,
            };
            report(out, &problem, &res, witness)
        }
        Command::Oracle { file, witness } => {
            let problem = load(&file)?;
            let res = superpose_bruteforce(&problem)?;
            report(out, &problem, &res, witness)
        }
        Command::ProbeConvexity(args) => probe(out, &args),
        Command::CrossCheck { file, free } => cross_check(out, &file, &free),
        Command::Henson(cmd) => henson(out, &cmd),
        Command::Bench { seed, out: path, runs } => {
            let rows = bench::run(seed, runs)?;
            bench::print_table(&rows, out)?;
            if let Some(path) = path {
                let file = fs::File::create(&path).map_err(|e| CliError::Write(format!("{}: {e}", path.display())))?;
                bench::write_csv(&rows, file).map_err(|e| CliError::Write(format!("{}: {e}", path.display())))?;
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let result = run(cli, &mut out).and_then(|()| out.flush().map_err(CliError::from));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qcsp: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use qcsp::Instance;

    #[test]
    fn exit_codes() {
        let tid = TheoryId::new("t");
        assert_eq!(
            CliError::Solve(SolveError::ConvexityNotDeclared(tid.clone())).exit_code(),
            3
        );
        assert_eq!(CliError::Solve(SolveError::ConvexityRefuted(tid)).exit_code(), 3);
        let bound = SolveError::BoundExceeded {
            what: "variables",
            found: 9,
            bound: 8,
        };
        assert_eq!(CliError::Solve(bound).exit_code(), 4);
        assert_eq!(CliError::Input("x".into()).exit_code(), 2);
        assert_eq!(CliError::Write("x".into()).exit_code(), 5);
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn empty_problem_solves() {
        let dir = std::env::temp_dir().join(format!("qcsp-empty-{}", std::process::id()));
        fs::write(&dir, "").unwrap();
        let cli = Cli::parse_from(["qcsp", "solve", dir.to_str().unwrap(), "--witness"]);
        let mut out = Vec::new();
        run(cli, &mut out).unwrap();
        fs::remove_file(&dir).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "SAT\n");
    }

    #[test]
    fn instance_helpers() {
        let p = Problem::new().with_instance(Instance::new());
        assert!(single_theory(&p, None).is_err());
    }
}
