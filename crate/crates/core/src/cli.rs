//! The `rmc` command line.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::ast::Formula;
use crate::eval::{event_alphabet, run_trace, DEFAULT_FUEL};
use crate::kleene::{TraceChoice, TruthVal};
use crate::ltlsem::{bounded_check, enumerate_runs, Bounded};
use crate::lts::{extract_lts, term_json};
use crate::normform::{check_simplified_with, FormOptions};
use crate::parser::{parse_properties, Program};
use crate::verify::{verify_with, FairSet, Limits, VerifyError};
use crate::witness::{generate_with, lassoify, validate_verdict};

pub const EXIT_USAGE: i32 = 64;
pub const EXIT_DATA: i32 = 65;
pub const EXIT_NOINPUT: i32 = 66;
pub const EXIT_SOFTWARE: i32 = 70;

#[derive(Parser, Debug)]
#[command(name = "rmc", version, about = "Model checker for reactive functional programs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check that a program is in simplified form.
    Check {
        file: PathBuf,
        /// Accept any expression as the state of a Cons cell.
        #[arg(long)]
        relaxed_state: bool,
    },
    /// Decide a property: prints True, False or Undefined.
    Verify {
        file: PathBuf,
        #[command(flatten)]
        prop: PropArgs,
        #[arg(long)]
        json: bool,
    },
    /// Decide a property and print the counterexample or witness trace.
    Witness {
        file: PathBuf,
        #[command(flatten)]
        prop: PropArgs,
        #[arg(long)]
        json: bool,
        /// Always keep the shorter trace when combining verdicts.
        #[arg(long)]
        shortest: bool,
    },
    /// Print the labelled transition system of a reactive program.
    Lts {
        file: PathBuf,
        #[arg(long, conflicts_with = "json", required_unless_present = "json")]
        dot: bool,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        keep_self_loops: bool,
    },
    /// Run a program on an event list and print the emitted states.
    Simulate {
        file: PathBuf,
        /// Comma-separated event constructors.
        #[arg(long, value_delimiter = ',')]
        events: Vec<String>,
        /// Repeat the event list forever.
        #[arg(long)]
        cycle: bool,
        /// Maximum number of states.
        #[arg(short = 'n', default_value_t = 20)]
        n: usize,
        #[arg(long)]
        json: bool,
    },
    /// Validate a verdict against the reference semantics and sample
    /// finite runs.
    Oracle {
        file: PathBuf,
        #[command(flatten)]
        prop: PropArgs,
        /// Length of the enumerated event sequences.
        #[arg(long, default_value_t = 4)]
        depth: usize,
        /// Sample this many random event sequences instead of enumerating.
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args, Debug)]
struct PropArgs {
    /// Property file; defaults to the only .ltl file next to the program.
    #[arg(long)]
    props: Option<PathBuf>,
    #[arg(long)]
    prop: String,
    /// Comma-separated fair events.
    #[arg(long, value_delimiter = ',', conflicts_with = "fair_all")]
    fair: Option<Vec<String>>,
    /// Treat every event as fair.
    #[arg(long)]
    fair_all: bool,
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

impl From<VerifyError> for Failure {
    fn from(e: VerifyError) -> Self {
        let code = match e {
            VerifyError::Budget(_) | VerifyError::Eval(_) => EXIT_SOFTWARE,
            _ => EXIT_DATA,
        };
        Failure::new(code, e.to_string())
    }
}

type CliResult = Result<i32, Failure>;

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "rmc: {}", f.message);
            f.code
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::new(EXIT_NOINPUT, format!("{}: {e}", path.display())))
}

fn load_program(path: &Path) -> Result<Program, Failure> {
    let text = read(path)?;
    Program::parse(&text).map_err(|e| Failure::new(EXIT_DATA, format!("{}: {e}", path.display())))
}

fn default_props(program: &Path) -> Result<PathBuf, Failure> {
    let dir = program.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let entries = fs::read_dir(dir).map_err(|e| Failure::new(EXIT_NOINPUT, format!("{}: {e}", dir.display())))?;
    let found: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "ltl"))
        .collect();
    match found.as_slice() {
        [one] => Ok(one.clone()),
        [] => Err(Failure::new(EXIT_USAGE, format!("no .ltl file in {}; pass --props", dir.display()))),
        _ => Err(Failure::new(EXIT_USAGE, format!("several .ltl files in {}; pass --props", dir.display()))),
    }
}

struct Query {
    program: Program,
    formula: Formula,
    fair: FairSet,
}

fn load_query(file: &Path, args: &PropArgs) -> Result<Query, Failure> {
    let program = load_program(file)?;
    let props_path = match &args.props {
        Some(p) => p.clone(),
        None => default_props(file)?,
    };
    let pf = parse_properties(&read(&props_path)?, &program.universe)
        .map_err(|e| Failure::new(EXIT_DATA, format!("{}: {e}", props_path.display())))?;
    let formula = pf
        .get(&args.prop)
        .cloned()
        .ok_or_else(|| {
            let known: Vec<&str> = pf.names().collect();
            Failure::new(
                EXIT_USAGE,
                format!("no property {} in {} (have: {})", args.prop, props_path.display(), known.join(", ")),
            )
        })?;
    let alphabet = event_alphabet(&program.term, &program.universe);
    let fair = if args.fair_all {
        FairSet::new(alphabet)
    } else if let Some(list) = &args.fair {
        if let Some(bad) = list.iter().find(|e| !alphabet.contains(e)) {
            return Err(Failure::new(EXIT_USAGE, format!("{bad} is not an event of this program")));
        }
        FairSet::new(list.clone())
    } else {
        FairSet::new(pf.fair.clone().unwrap_or_default())
    };
    Ok(Query { program, formula, fair })
}

fn truth_code(t: TruthVal) -> i32 {
    match t {
        TruthVal::True => 0,
        TruthVal::False => 1,
        TruthVal::Undefined => 2,
    }
}

fn print_json(out: &mut dyn Write, v: &serde_json::Value) {
    let _ = writeln!(out, "{}", serde_json::to_string_pretty(v).expect("serializable"));
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> CliResult {
    match cmd {
        Command::Check { file, relaxed_state } => {
            let program = load_program(&file)?;
            let report = check_simplified_with(
                &program.term,
                FormOptions {
                    strict_state: !relaxed_state,
                },
            );
            if report.conforms {
                let _ = writeln!(out, "{}: simplified form", file.display());
                Ok(0)
            } else {
                for v in &report.violations {
                    let _ = writeln!(out, "{}: {v}", file.display());
                }
                Ok(1)
            }
        }
        Command::Verify { file, prop, json } => {
            let q = load_query(&file, &prop)?;
            let o = verify_with(&q.program, &q.formula, &q.fair, Limits::default())?;
            if json {
                print_json(out, &json!({"property": prop.prop, "truth": o.truth.to_string(), "rules": o.rules}));
            } else {
                let _ = writeln!(out, "{}", o.truth);
            }
            Ok(truth_code(o.truth))
        }
        Command::Witness {
            file,
            prop,
            json,
            shortest,
        } => {
            let q = load_query(&file, &prop)?;
            let choice = if shortest {
                TraceChoice::Shortest
            } else {
                TraceChoice::Covering
            };
            let (v, _) = generate_with(&q.program, &q.formula, &q.fair, Limits::default(), choice, None)?;
            let validation = validate_verdict(&v, &q.formula);
            let lasso = lassoify(&v.trace).map_err(|e| Failure::new(EXIT_SOFTWARE, e.to_string()))?;
            if json {
                print_json(
                    out,
                    &json!({
                        "truth": v.truth.to_string(),
                        "trace": v.trace.iter().map(term_json).collect::<Vec<_>>(),
                        "lasso": {"prefixLen": lasso.prefix.len(), "loopLen": lasso.cycle.len()},
                        "validation": validation.label(),
                    }),
                );
            } else {
                let _ = writeln!(out, "{}", v.truth);
                for s in &lasso.prefix {
                    let _ = writeln!(out, "  {s}");
                }
                if lasso.is_infinite() {
                    let _ = writeln!(out, "loop:");
                    for s in &lasso.cycle {
                        let _ = writeln!(out, "  {s}");
                    }
                }
                let _ = writeln!(out, "validation: {validation}");
            }
            Ok(truth_code(v.truth))
        }
        Command::Lts {
            file,
            dot: _,
            json,
            keep_self_loops,
        } => {
            let program = load_program(&file)?;
            let lts = extract_lts(&program).map_err(|e| Failure::new(EXIT_DATA, e.to_string()))?;
            if json {
                print_json(out, &lts.to_json(keep_self_loops));
            } else {
                let _ = out.write_all(lts.to_dot(keep_self_loops).as_bytes());
            }
            Ok(0)
        }
        Command::Simulate {
            file,
            events,
            cycle,
            n,
            json,
        } => {
            let program = load_program(&file)?;
            let alphabet = event_alphabet(&program.term, &program.universe);
            if let Some(bad) = events.iter().find(|e| !alphabet.contains(e)) {
                return Err(Failure::new(EXIT_USAGE, format!("{bad} is not an event of this program")));
            }
            if cycle && events.is_empty() {
                return Err(Failure::new(EXIT_USAGE, "--cycle needs at least one event"));
            }
            let states = run_trace(&program.term, &events, cycle, n, DEFAULT_FUEL)
                .map_err(|e| Failure::new(EXIT_DATA, e.to_string()))?;
            if json {
                print_json(out, &json!(states.iter().map(term_json).collect::<Vec<_>>()));
            } else {
                for s in &states {
                    let _ = writeln!(out, "{s}");
                }
            }
            Ok(0)
        }
        Command::Oracle {
            file,
            prop,
            depth,
            samples,
            seed,
            json,
        } => {
            let q = load_query(&file, &prop)?;
            let (v, _) = generate_with(&q.program, &q.formula, &q.fair, Limits::default(), TraceChoice::Covering, None)?;
            let validation = validate_verdict(&v, &q.formula);
            let runs = match samples {
                Some(k) => sample_runs(&q.program, depth, k, seed)?,
                None => enumerate_runs(&q.program, depth).map_err(|e| Failure::new(EXIT_USAGE, e.to_string()))?,
            };
            let mut counts = [0usize; 3];
            let mut refuted: Option<Vec<String>> = None;
            for (events, trace) in &runs {
                let b = bounded_check(trace, &q.formula, 0).map_err(|e| Failure::new(EXIT_DATA, e.to_string()))?;
                counts[b as usize] += 1;
                if b == Bounded::Unsat && refuted.is_none() {
                    refuted = Some(events.clone());
                }
            }
            let consistent = !(v.truth == TruthVal::True && refuted.is_some())
                && validation != crate::witness::Validation::Invalid;
            if json {
                print_json(
                    out,
                    &json!({
                        "truth": v.truth.to_string(),
                        "validation": validation.label(),
                        "runs": runs.len(),
                        "sat": counts[0], "unsat": counts[1], "unknown": counts[2],
                        "refutingEvents": refuted,
                        "consistent": consistent,
                    }),
                );
            } else {
                let _ = writeln!(out, "verdict: {}", v.truth);
                let _ = writeln!(out, "validation: {validation}");
                let _ = writeln!(
                    out,
                    "runs: {} (Sat {}, Unsat {}, Unknown {})",
                    runs.len(),
                    counts[0],
                    counts[1],
                    counts[2]
                );
                if let Some(ev) = &refuted {
                    let _ = writeln!(out, "first refuting run: {}", ev.join(","));
                }
                let _ = writeln!(out, "{}", if consistent { "consistent" } else { "INCONSISTENT" });
            }
            Ok(if consistent { 0 } else { 1 })
        }
    }
}

fn sample_runs(program: &Program, depth: usize, k: usize, seed: u64) -> Result<Vec<(Vec<String>, Vec<crate::ast::Term>)>, Failure> {
    let alphabet = event_alphabet(&program.term, &program.universe);
    if alphabet.is_empty() {
        return Err(Failure::new(EXIT_DATA, "program has no events"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = BTreeSet::new();
    let mut runs = Vec::new();
    for _ in 0..k {
        let events: Vec<String> = (0..depth).map(|_| alphabet[rng.gen_range(0..alphabet.len())].clone()).collect();
        if !seen.insert(events.clone()) {
            continue;
        }
        let trace = run_trace(&program.term, &events, false, depth + 1, DEFAULT_FUEL)
            .map_err(|e| Failure::new(EXIT_DATA, e.to_string()))?;
        runs.push((events, trace));
    }
    Ok(runs)
}
