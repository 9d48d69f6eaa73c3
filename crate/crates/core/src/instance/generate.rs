use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Instance;
use crate::bundle::Bundle;
use crate::error::{Error, Result};
use crate::rational::{int, ratio, Rational};
use crate::valuations::Valuation;

/// Largest good count for the random explicit-table class.
pub const TABLE_CLASS_MAX_GOODS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InstanceClass {
    AdditiveInteger,
    BinaryAdditive,
    MatroidRankRandom,
    SubmodularTableRandom,
}

impl InstanceClass {
    pub const ALL: [InstanceClass; 4] = [
        InstanceClass::AdditiveInteger,
        InstanceClass::BinaryAdditive,
        InstanceClass::MatroidRankRandom,
        InstanceClass::SubmodularTableRandom,
    ];

    pub fn name(self) -> &'static str {
        match self {
            InstanceClass::AdditiveInteger => "additive-integer",
            InstanceClass::BinaryAdditive => "binary-additive",
            InstanceClass::MatroidRankRandom => "matroid-rank-random",
            InstanceClass::SubmodularTableRandom => "submodular-table-random",
        }
    }

    pub fn is_matroid_rank(self) -> bool {
        matches!(
            self,
            InstanceClass::BinaryAdditive | InstanceClass::MatroidRankRandom
        )
    }
}

impl FromStr for InstanceClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        InstanceClass::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::UnsupportedGenerator(format!("unknown class {s:?}")))
    }
}

impl std::fmt::Display for InstanceClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenParams {
    /// All weights 1 instead of random `p/q` with `p ≤ 4`, `q ≤ 3`.
    pub equal_weights: bool,
    /// Per-good values of `additive-integer` are drawn from `0..=max_value`.
    pub max_value: u32,
}

impl Default for GenParams {
    fn default() -> Self {
        Self {
            equal_weights: false,
            max_value: 5,
        }
    }
}

/// Random instance of `class`, fully determined by `seed`.
pub fn generate(
    class: InstanceClass,
    n: usize,
    m: usize,
    seed: u64,
    params: &GenParams,
) -> Result<Instance> {
    if n == 0 {
        return Err(Error::NoAgents);
    }
    if class == InstanceClass::SubmodularTableRandom && m > TABLE_CLASS_MAX_GOODS {
        return Err(Error::UnsupportedGenerator(format!(
            "{class} supports at most {TABLE_CLASS_MAX_GOODS} goods, got {m}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut weights = Vec::with_capacity(n);
    let mut valuations = Vec::with_capacity(n);
    for _ in 0..n {
        weights.push(if params.equal_weights {
            int(1)
        } else {
            ratio(rng.gen_range(1..=4), rng.gen_range(1..=3))
        });
        valuations.push(match class {
            InstanceClass::AdditiveInteger => Valuation::additive(
                (0..m)
                    .map(|_| int(rng.gen_range(0..=params.max_value) as i64))
                    .collect(),
            )?,
            InstanceClass::BinaryAdditive => {
                Valuation::binary_additive((0..m).map(|_| int(rng.gen_bool(0.5) as i64)).collect())?
            }
            InstanceClass::MatroidRankRandom => random_matroid_rank(&mut rng, m)?,
            InstanceClass::SubmodularTableRandom => random_coverage_table(&mut rng, m)?,
        });
    }
    Instance::new(weights, valuations, m)
}

fn random_matroid_rank(rng: &mut ChaCha8Rng, m: usize) -> Result<Valuation> {
    if rng.gen_bool(0.5) {
        let k = rng.gen_range(1..=3);
        let mut categories = vec![Bundle::new(); k];
        for g in 0..m {
            // roughly a fifth of the goods are worthless to this agent
            if rng.gen_range(0..5) > 0 {
                categories[rng.gen_range(0..k)].insert(g);
            }
        }
        let caps = (0..k).map(|_| rng.gen_range(1..=2)).collect();
        Valuation::partition_matroid(categories, caps)
    } else {
        let values = (0..m).map(|_| int(rng.gen_bool(0.6) as i64)).collect();
        let cap = rng.gen_range(1..=(m / 2 + 1)) as i64;
        Valuation::truncated_additive(values, int(cap))
    }
}

/// Weighted coverage function: each good covers a random subset of a small
/// weighted universe and a bundle is worth the weight it covers.
fn random_coverage_table(rng: &mut ChaCha8Rng, m: usize) -> Result<Valuation> {
    let universe = (2 * m).max(2);
    let element_weights: Vec<i64> = (0..universe).map(|_| rng.gen_range(1..=4)).collect();
    let covers: Vec<u64> = (0..m)
        .map(|_| {
            (0..universe)
                .filter(|_| rng.gen_bool(0.3))
                .fold(0u64, |acc, e| acc | 1 << e)
        })
        .collect();
    let values: Vec<Rational> = (0..1u64 << m)
        .map(|mask| {
            let covered = (0..m)
                .filter(|g| mask & (1 << g) != 0)
                .fold(0u64, |acc, g| acc | covers[g]);
            int((0..universe)
                .filter(|e| covered & (1 << e) != 0)
                .map(|e| element_weights[e])
                .sum())
        })
        .collect();
    let v = Valuation::table_unchecked(m, values)?;
    v.ensure_valid(m)?;
    Ok(v)
}
