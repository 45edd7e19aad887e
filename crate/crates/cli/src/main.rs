use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use twsat::asp::{parse_program, primal_graph, Program};
use twsat::baselines::{clark_completion, global_translation};
use twsat::bench::{bench_scenario, local_vs_global_warning, BenchOptions};
use twsat::bijective::{translate_bijective_split, BijectiveOptions};
use twsat::cnf::{certify_width, write_dimacs, CnfFormula, OrderScope, WidthRegime, WitnessTd};
use twsat::gen::Scenario;
use twsat::hardness::{djp_parse, djp_to_program};
use twsat::oracles::{check_preservation, PreservationMode, DEFAULT_ATOM_CAP};
use twsat::ordered::{translate_ordered, OrderedOptions};
use twsat::par::Execution;
use twsat::td::{assign_rules, decompose_heuristic, make_nice, read_pace, validate_td, write_pace, Heuristic, TreeDecomposition};

#[derive(Parser)]
#[command(name = "twsat", version, about = "Treewidth-aware translations of answer set programs to SAT")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Translate a program to DIMACS CNF.
    Translate {
        #[command(flatten)]
        tr: TranslateArgs,
        /// Check the witness decomposition against the width bound.
        #[arg(long)]
        certify: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Write the witness decomposition of the CNF in PACE format.
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    /// Heuristic tree decomposition of a program's primal graph (PACE format).
    Decompose {
        input: PathBuf,
        #[command(flatten)]
        td: HeuristicArgs,
        #[arg(long)]
        nice: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Compare the translation's projected models with the program's answer sets.
    Verify {
        #[command(flatten)]
        tr: TranslateArgs,
        #[arg(long, value_enum, default_value = "weak")]
        mode: Mode,
        /// Largest program the exhaustive answer-set oracle accepts.
        #[arg(long, default_value_t = DEFAULT_ATOM_CAP)]
        cap: usize,
    },
    /// Normal program for a disjoint-paths instance.
    GenHardness {
        input: PathBuf,
        /// Decomposition of the instance's underlying graph (PACE format).
        #[arg(long)]
        td: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Write the decomposition the program was generated along.
        #[arg(long)]
        emit_td: Option<PathBuf>,
    },
    /// Width statistics over a generated corpus (JSON).
    Bench {
        #[arg(long, value_parser = parse_scenario)]
        scenario: Scenario,
        #[arg(long, default_value_t = 10)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "min-fill")]
        heuristic: Heuristic,
        /// Leave out wall times so reports are reproducible byte for byte.
        #[arg(long)]
        no_timing: bool,
        #[arg(long)]
        sequential: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct HeuristicArgs {
    #[arg(long, default_value = "min-fill")]
    heuristic: Heuristic,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct TranslateArgs {
    input: PathBuf,
    #[arg(long, value_enum, default_value = "ordered")]
    reduction: Reduction,
    /// Add the clauses that prune redundant orderings (ordered only).
    #[arg(long)]
    strengthen: bool,
    /// Share ordering positions across all nodes (ordered only).
    #[arg(long)]
    global_bits: bool,
    /// Most rules per node for the bijective translation.
    #[arg(long)]
    rules_per_node: Option<usize>,
    /// Decomposition in PACE format instead of the heuristic.
    #[arg(long, conflicts_with = "heuristic")]
    td: Option<PathBuf>,
    #[arg(long)]
    heuristic: Option<Heuristic>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Reduction {
    Ordered,
    Bijective,
    Completion,
    Global,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Weak,
    Bijective,
}

fn parse_scenario(s: &str) -> Result<Scenario, String> {
    Scenario::parse(s).ok_or_else(|| format!("unknown scenario '{s}' (expected s1, s2 or s2b)"))
}

enum Failure {
    Input(String),
    Check(String),
}

type Outcome = Result<(), Failure>;

fn input<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Input(e.to_string())
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn write_out(path: Option<&Path>, text: &str) -> Outcome {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Input(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

struct Translated {
    cnf: CnfFormula,
    witness: Option<WitnessTd>,
    input_width: usize,
    regime: WidthRegime,
}

fn load_td(p: &Program, tr: &TranslateArgs) -> Result<TreeDecomposition, Failure> {
    match &tr.td {
        Some(path) => {
            let td = read_pace(&read(path)?, None).map_err(input)?;
            let report = validate_td(&primal_graph(p), &td);
            if !report.is_valid() {
                return Err(Failure::Input(format!("{}: {}", path.display(), report.summary())));
            }
            Ok(td)
        }
        None => Ok(decompose_heuristic(&primal_graph(p), tr.heuristic.unwrap_or(Heuristic::MinFill), tr.seed)),
    }
}

fn translate(p: &Program, tr: &TranslateArgs) -> Result<Translated, Failure> {
    let td = load_td(p, tr)?;
    let input_width = td.width();
    let assign = assign_rules(p, &td).map_err(input)?;
    let scope = if tr.global_bits { OrderScope::Global } else { OrderScope::Local };
    let ordered = OrderedOptions { strengthen: tr.strengthen, scope, seed: tr.seed, log_instances: false };
    let (cnf, witness, regime) = match tr.reduction {
        Reduction::Ordered => {
            let t = translate_ordered(p, &td, &assign, &ordered).map_err(input)?;
            (t.cnf, Some(t.witness), WidthRegime::KLogK)
        }
        Reduction::Bijective => {
            let opts = BijectiveOptions { max_rules_per_node: tr.rules_per_node, seed: tr.seed, log_instances: false };
            let t = translate_bijective_split(p, &td, &assign, &opts).map_err(input)?;
            (t.cnf, Some(t.witness), WidthRegime::KSquared)
        }
        Reduction::Completion => (clark_completion(p).map_err(input)?, None, WidthRegime::KLogK),
        Reduction::Global => (global_translation(p, &ordered).map_err(input)?.cnf, None, WidthRegime::KLogK),
    };
    Ok(Translated { cnf, witness, input_width, regime })
}

fn load_program(path: &Path) -> Result<Program, Failure> {
    parse_program(&read(path)?).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Translate { tr, certify, output, witness } => {
            let p = load_program(&tr.input)?;
            let t = translate(&p, &tr)?;
            write_out(output.as_deref(), &write_dimacs(&t.cnf))?;
            if let (Some(path), Some(w)) = (&witness, &t.witness) {
                write_out(Some(path), &write_pace(&w.td))?;
            } else if witness.is_some() {
                eprintln!("note: this reduction has no witness decomposition");
            }
            if certify {
                let w = t.witness.as_ref().ok_or_else(|| Failure::Input("this reduction has no width certificate".into()))?;
                if tr.global_bits {
                    return Err(Failure::Input("width certification needs local ordering bits".into()));
                }
                let c = certify_width(&t.cnf, w, t.input_width, t.regime).map_err(|e| Failure::Check(e.to_string()))?;
                eprintln!("certified: input width {}, witness width {}, bound {}", c.input_width, c.width, c.bound);
            }
            Ok(())
        }
        Command::Decompose { input, td, nice, output } => {
            let p = load_program(&input)?;
            let mut d = decompose_heuristic(&primal_graph(&p), td.heuristic, td.seed);
            if nice {
                d = make_nice(&d).into_td();
            }
            write_out(output.as_deref(), &write_pace(&d))
        }
        Command::Verify { tr, mode, cap } => {
            let p = load_program(&tr.input)?;
            let t = translate(&p, &tr)?;
            let mode = match mode {
                Mode::Weak => PreservationMode::Weak,
                Mode::Bijective => PreservationMode::Bijective,
            };
            let report = check_preservation(&p, &t.cnf, mode, cap).map_err(input)?;
            println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
            if report.passed() {
                Ok(())
            } else {
                Err(Failure::Check("preservation check failed".into()))
            }
        }
        Command::GenHardness { input, td, seed, output, emit_td } => {
            let inst = djp_parse(&read(&input)?).map_err(|e| Failure::Input(format!("{}: {e}", input.display())))?;
            let td = match td {
                Some(path) => {
                    let d = read_pace(&read(&path)?, None).map_err(input_err_at(&path))?;
                    let report = validate_td(&inst.underlying_graph(), &d);
                    if !report.is_valid() {
                        return Err(Failure::Input(format!("{}: {}", path.display(), report.summary())));
                    }
                    Some(d)
                }
                None => None,
            };
            let red = djp_to_program(&inst, td.as_ref(), seed);
            if red.early_out {
                eprintln!("note: some node has more open pairs than bag vertices; the instance has no solution");
            }
            write_out(output.as_deref(), &red.program.to_string())?;
            if let (Some(path), Some(d)) = (emit_td, &red.td) {
                write_out(Some(&path), &write_pace(d))?;
            }
            Ok(())
        }
        Command::Bench { scenario, count, seed, heuristic, no_timing, sequential, output } => {
            let exec = if sequential { Execution::Sequential } else { Execution::default() };
            let opts = BenchOptions { heuristic, seed, timing: !no_timing, exec };
            let reports = bench_scenario(scenario, count, seed, &opts);
            if let Some(w) = local_vs_global_warning(&reports) {
                eprintln!("warning: {w}");
            }
            for r in &reports {
                for row in r.rows.iter().filter(|row| row.error.is_some()) {
                    eprintln!("warning: {} instance {}: {}", r.translation.label(), row.id, row.error.as_deref().unwrap_or(""));
                }
            }
            let json = serde_json::to_string_pretty(&reports).expect("reports serialize");
            write_out(output.as_deref(), &(json + "\n"))
        }
    }
}

fn input_err_at(path: &Path) -> impl Fn(twsat::td::TdError) -> Failure + '_ {
    move |e| Failure::Input(format!("{}: {e}", path.display()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Check(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(3)
        }
    }
}
