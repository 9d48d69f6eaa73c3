mod bench;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use fairshare::fairness::{self, check_po, Notion, NotionParams, Objective};
use fairshare::instance::{self, fixtures, GenParams, InstanceClass};
use fairshare::oracle::{exact_optimum, SearchBudget};
use fairshare::rational::{parse_rational, Rational};
use fairshare::rules::{self, Rule, TieBreak};
use fairshare::{Allocation, Instance};

#[derive(Parser)]
#[command(
    name = "fairshare",
    version,
    about = "Weighted fair division of indivisible goods"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a random or fixture instance as JSON.
    Gen(GenArgs),
    /// Run an allocation rule and write the allocation as JSON.
    Solve(SolveArgs),
    /// Check an allocation against a fairness notion (exit 1 if it fails).
    Check(CheckArgs),
    /// Exact optimum of a welfare objective by exhaustive search.
    Oracle(OracleArgs),
    /// Sweep seeds, x values and rules; write one CSV row per run.
    Bench(bench::BenchArgs),
}

fn rational(text: &str) -> std::result::Result<Rational, String> {
    parse_rational(text).map_err(|e| e.to_string())
}

#[derive(Args)]
struct GenArgs {
    /// Generator class: additive-integer, binary-additive,
    /// matroid-rank-random or submodular-table-random.
    #[arg(long, required_unless_present = "fixture")]
    class: Option<InstanceClass>,
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long, default_value_t = 6)]
    m: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Give every agent weight 1.
    #[arg(long)]
    equal_weights: bool,
    /// Largest per-good value for additive-integer.
    #[arg(long, default_value_t = 5)]
    max_value: u32,
    /// Emit a built-in instance instead: example1, mwhw-nonclean,
    /// roundrobin-ef1 or extended-harmonic.
    #[arg(long, conflicts_with = "class")]
    fixture: Option<String>,
    /// Where to write the fixture's distinguished allocation, if it has one.
    #[arg(long, requires = "fixture")]
    allocation_out: Option<PathBuf>,
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    instance: PathBuf,
    /// pick, transfer or mwhw.
    #[arg(long)]
    rule: Rule,
    #[arg(long, value_parser = rational)]
    x: Rational,
    /// Break picking ties at random from this seed instead of by lowest index.
    #[arg(long)]
    tie_seed: Option<u64>,
    /// Include the rule's trace in the output.
    #[arg(long)]
    trace: bool,
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    allocation: PathBuf,
    /// WEF, TWEF, WMEF, WWMEF1, EF1, MEF1 or PO.
    #[arg(long)]
    notion: String,
    #[arg(long, value_parser = rational)]
    x: Option<Rational>,
    /// Defaults to 1 − x.
    #[arg(long, value_parser = rational)]
    y: Option<Rational>,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    instance: PathBuf,
    /// utilitarian, WNW, WHW, HW or HW-extended.
    #[arg(long)]
    objective: String,
    /// Parameter of WHW.
    #[arg(long, value_parser = rational)]
    x: Option<Rational>,
    /// List every maximizer.
    #[arg(long)]
    all: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Gen(args) => gen(args),
        Command::Solve(args) => solve(args),
        Command::Check(args) => check(args),
        Command::Oracle(args) => oracle(args),
        Command::Bench(args) => bench::run(args),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, format!("{text}\n"))
            .with_context(|| format!("writing {}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            writeln!(stdout, "{text}")?;
            Ok(())
        }
    }
}

fn load_instance(path: &Path) -> Result<Instance> {
    instance::load_path(path).with_context(|| format!("loading instance {}", path.display()))
}

fn load_allocation(path: &Path, inst: &Instance) -> Result<Allocation> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading allocation {}", path.display()))?;
    let alloc: Allocation = serde_json::from_str(&text)
        .with_context(|| format!("parsing allocation {}", path.display()))?;
    inst.check_allocation(&alloc)?;
    Ok(alloc)
}

fn gen(args: GenArgs) -> Result<bool> {
    let inst = match (&args.fixture, args.class) {
        (Some(name), _) => {
            let f = fixtures::fixture(name)?;
            if let Some(path) = &args.allocation_out {
                let Some(a) = &f.allocation else {
                    bail!("fixture {name} has no distinguished allocation");
                };
                emit(Some(path), &instance::save_allocation(a))?;
            }
            f.instance
        }
        (None, Some(class)) => {
            let params = GenParams {
                equal_weights: args.equal_weights,
                max_value: args.max_value,
            };
            instance::generate(class, args.n, args.m, args.seed, &params)?
        }
        (None, None) => bail!("either --class or --fixture is required"),
    };
    emit(args.out.as_deref(), &instance::save(&inst))?;
    Ok(true)
}

fn solve(args: SolveArgs) -> Result<bool> {
    let inst = load_instance(&args.instance)?;
    let tie = args.tie_seed.map_or(TieBreak::Lowest, TieBreak::Seeded);
    let (alloc, trace) = match args.rule {
        Rule::Pick => {
            let (a, t) = rules::picking_sequence(&inst, &args.x, tie)?;
            (a, serde_json::to_value(t)?)
        }
        Rule::Transfer => {
            let (a, t) = rules::transfer_algorithm(&inst, &args.x)?;
            (a, serde_json::to_value(t)?)
        }
        Rule::Mwhw => {
            let a = rules::mwhw_gain(&inst, &args.x)?;
            (a, serde_json::Value::Null)
        }
    };
    let mut doc = serde_json::to_value(&alloc)?;
    if args.trace {
        doc["trace"] = trace;
    }
    emit(args.out.as_deref(), &serde_json::to_string(&doc)?)?;
    Ok(true)
}

fn check(args: CheckArgs) -> Result<bool> {
    let inst = load_instance(&args.instance)?;
    let alloc = load_allocation(&args.allocation, &inst)?;
    if args.notion.eq_ignore_ascii_case("po") {
        let report = check_po(&alloc, &inst, &SearchBudget::from_env()?)?;
        emit(None, &serde_json::to_string_pretty(&report)?)?;
        return Ok(report.verdict);
    }
    let notion: Notion = args.notion.parse()?;
    let params = if notion.takes_xy() {
        let Some(x) = args.x else {
            bail!("{notion} needs --x");
        };
        NotionParams::new(notion, x, args.y)?
    } else {
        NotionParams::plain(notion)
    };
    let report = fairness::check(&alloc, &inst, &params)?;
    emit(None, &serde_json::to_string_pretty(&report)?)?;
    Ok(report.verdict)
}

#[derive(Serialize)]
struct OracleReport {
    objective: String,
    value: fairness::WelfareValue,
    argmax_count: usize,
    states: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    maximizers: Option<Vec<Allocation>>,
}

fn oracle(args: OracleArgs) -> Result<bool> {
    let inst = load_instance(&args.instance)?;
    let objective = Objective::parse(&args.objective, args.x)?;
    let opt = exact_optimum(&inst, &objective, &SearchBudget::from_env()?)?;
    let report = OracleReport {
        objective: objective.to_string(),
        value: opt.value,
        argmax_count: opt.argmax.len(),
        states: opt.states,
        maximizers: args.all.then_some(opt.argmax),
    };
    emit(None, &serde_json::to_string_pretty(&report)?)?;
    Ok(true)
}
