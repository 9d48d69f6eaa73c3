use std::collections::BTreeMap;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Args;
use num_traits::One;
use serde::Serialize;

use fairshare::fairness::{self, Notion, NotionParams};
use fairshare::instance::{generate, GenParams, InstanceClass};
use fairshare::rational::{parse_rational, Rational};
use fairshare::rules::{self, Rule, TieBreak};
use fairshare::{Allocation, Instance};

#[derive(Args)]
pub struct BenchArgs {
    #[arg(long)]
    class: InstanceClass,
    #[arg(long, default_value_t = 3)]
    n: usize,
    #[arg(long, default_value_t = 6)]
    m: usize,
    /// Number of seeds, starting at --seed.
    #[arg(long, default_value_t = 20)]
    seeds: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Comma-separated x values.
    #[arg(long, default_value = "0,1/4,1/2,3/4,1")]
    x_grid: String,
    /// Comma-separated rules; defaults to every rule the class supports.
    #[arg(long)]
    rules: Option<String>,
    #[arg(long)]
    equal_weights: bool,
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct Row {
    seed: u64,
    n: usize,
    m: usize,
    class: String,
    rule: String,
    x: String,
    notion: String,
    verdict: bool,
    steps: usize,
    welfare: String,
}

/// The notion each rule guarantees with parameters `(x, 1 − x)`.
fn guaranteed(rule: Rule) -> Notion {
    match rule {
        Rule::Pick => Notion::Wmef,
        Rule::Transfer | Rule::Mwhw => Notion::Twef,
    }
}

fn run_rule(inst: &Instance, rule: Rule, x: &Rational) -> Result<(Allocation, usize)> {
    Ok(match rule {
        Rule::Pick => {
            let (a, t) = rules::picking_sequence(inst, x, TieBreak::Lowest)?;
            (a, t.steps.len())
        }
        Rule::Transfer => {
            let (a, t) = rules::transfer_algorithm(inst, x)?;
            (a, t.steps.len())
        }
        Rule::Mwhw => {
            let a = rules::mwhw_gain(inst, x)?;
            let grown = a.sizes().iter().sum();
            (a, grown)
        }
    })
}

fn parse_list<T>(text: &str, parse: impl Fn(&str) -> Result<T>) -> Result<Vec<T>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(parse)
        .collect()
}

pub fn run(args: BenchArgs) -> Result<bool> {
    let grid = parse_list(&args.x_grid, |s| Ok(parse_rational(s)?))?;
    let rule_list = match &args.rules {
        Some(text) => parse_list(text, |s| Ok(s.parse::<Rule>()?))?,
        None if args.class.is_matroid_rank() => Rule::ALL.to_vec(),
        None => vec![Rule::Pick],
    };
    let params = GenParams {
        equal_weights: args.equal_weights,
        ..GenParams::default()
    };

    let mut writer = match &args.out {
        Some(path) => csv::Writer::from_writer(Box::new(
            std::fs::File::create(path).with_context(|| format!("creating {}", path.display()))?,
        ) as Box<dyn std::io::Write>),
        None => csv::Writer::from_writer(Box::new(std::io::stdout()) as Box<dyn std::io::Write>),
    };
    let mut tally: BTreeMap<(String, String), (usize, usize)> = BTreeMap::new();
    for seed in args.seed..args.seed + args.seeds {
        let inst = generate(args.class, args.n, args.m, seed, &params)?;
        for x in &grid {
            for &rule in &rule_list {
                let (alloc, steps) = run_rule(&inst, rule, x)
                    .with_context(|| format!("rule {rule} on seed {seed}, x = {x}"))?;
                let notion = guaranteed(rule);
                let np = NotionParams::new(notion, x.clone(), Some(Rational::one() - x))?;
                let verdict = fairness::check(&alloc, &inst, &np)?.verdict;
                let welfare: Rational = inst.utilities(&alloc).iter().sum();
                let entry = tally
                    .entry((rule.to_string(), notion.to_string()))
                    .or_default();
                entry.0 += usize::from(verdict);
                entry.1 += 1;
                writer.serialize(Row {
                    seed,
                    n: args.n,
                    m: args.m,
                    class: args.class.to_string(),
                    rule: rule.to_string(),
                    x: x.to_string(),
                    notion: notion.to_string(),
                    verdict,
                    steps,
                    welfare: welfare.to_string(),
                })?;
            }
        }
    }
    writer.flush()?;
    for ((rule, notion), (ok, total)) in &tally {
        eprintln!(
            "{rule:<9} {notion:<6} {ok}/{total} = {:.3}",
            *ok as f64 / *total as f64
        );
    }
    Ok(true)
}
