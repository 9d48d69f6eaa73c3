use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::instance::{Allocation, Instance};
use crate::oracle::{search_first, state_count, SearchBudget, SearchMode, Utilities};
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "mode")]
pub enum PoCoverage {
    Exhaustive {
        states: u64,
    },
    /// Only `samples` random allocations were tried; a `true` verdict is partial.
    Sampled {
        samples: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PoReport {
    pub verdict: bool,
    pub dominator: Option<Allocation>,
    pub coverage: PoCoverage,
}

fn dominates(candidate: &[Rational], base: &[Rational]) -> bool {
    candidate.iter().zip(base).all(|(c, b)| c >= b)
        && candidate.iter().zip(base).any(|(c, b)| c > b)
}

/// Pareto optimality of `alloc` among all allocations.
///
/// Only complete allocations are searched: valuations are monotone, so any
/// dominating allocation stays dominating once its unallocated goods are
/// handed out.
pub fn check_po(
    alloc: &Allocation,
    instance: &Instance,
    budget: &SearchBudget,
) -> Result<PoReport> {
    instance.check_allocation(alloc)?;
    let base = instance.utilities(alloc);
    match budget.mode {
        SearchMode::Exhaustive => {
            let utilities = Utilities::new(instance);
            let dominator = search_first(instance, true, budget, |counter| {
                let masks = counter.masks();
                let cand: Vec<_> = (0..masks.len())
                    .map(|i| utilities.get(i, masks[i]))
                    .collect();
                cand.iter().zip(&base).all(|(c, b)| **c >= *b)
                    && cand.iter().zip(&base).any(|(c, b)| **c > *b)
            })?;
            Ok(PoReport {
                verdict: dominator.is_none(),
                dominator,
                coverage: PoCoverage::Exhaustive {
                    states: state_count(instance.n(), instance.m(), true).unwrap_or(u64::MAX),
                },
            })
        }
        SearchMode::Sampled { samples, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (n, m) = (instance.n(), instance.m());
            for _ in 0..samples {
                let owners: Vec<Option<usize>> =
                    (0..m).map(|_| Some(rng.gen_range(0..n))).collect();
                let cand = Allocation::from_owners(&owners, n);
                if dominates(&instance.utilities(&cand), &base) {
                    return Ok(PoReport {
                        verdict: false,
                        dominator: Some(cand),
                        coverage: PoCoverage::Sampled { samples },
                    });
                }
            }
            Ok(PoReport {
                verdict: true,
                dominator: None,
                coverage: PoCoverage::Sampled { samples },
            })
        }
    }
}
