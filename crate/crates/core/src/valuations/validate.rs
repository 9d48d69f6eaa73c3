use std::fmt;

use num::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Valuation;
use crate::bundle::Bundle;
use crate::rational::Rational;

/// Up to this many goods, [`validate`] enumerates every bundle.
pub const EXHAUSTIVE_MAX_GOODS: usize = 20;

const SAMPLED_TRIPLES: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coverage {
    Exhaustive,
    /// Randomized spot checks; a clean verdict is only partial evidence.
    Sampled {
        triples: usize,
        seed: u64,
    },
}

/// First failed property of a set function. Bundles are 0-based internally
/// and rendered 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ValidityViolation {
    NotNormalized,
    NotMonotone {
        bundle: Bundle,
        good: usize,
    },
    /// `Δ(smaller, good) < Δ(larger, good)` with `smaller ⊆ larger`.
    NotSubmodular {
        smaller: Bundle,
        larger: Bundle,
        good: usize,
    },
    NonBinaryMarginal {
        bundle: Bundle,
        good: usize,
    },
}

impl fmt::Display for ValidityViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValidityViolation::NotNormalized => write!(f, "value of the empty bundle is not 0"),
            ValidityViolation::NotMonotone { bundle, good } => {
                write!(
                    f,
                    "not monotone: adding g{} to {bundle} lowers the value",
                    good + 1
                )
            }
            ValidityViolation::NotSubmodular {
                smaller,
                larger,
                good,
            } => write!(
                f,
                "not submodular: gain of g{} on {smaller} is below its gain on {larger}",
                good + 1
            ),
            ValidityViolation::NonBinaryMarginal { bundle, good } => {
                write!(
                    f,
                    "marginal gain of g{} on {bundle} is not 0 or 1",
                    good + 1
                )
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidityReport {
    pub coverage: Coverage,
    pub violation: Option<ValidityViolation>,
    /// Every inspected marginal gain was 0 or 1.
    pub binary_marginals: bool,
}

impl ValidityReport {
    pub fn is_valid(&self) -> bool {
        self.violation.is_none()
    }

    pub fn is_valid_matroid_rank(&self) -> bool {
        self.violation.is_none() && self.binary_marginals
    }
}

fn requires_binary(v: &Valuation) -> bool {
    matches!(
        v,
        Valuation::MatroidRankTable(_)
            | Valuation::BinaryAdditive(_)
            | Valuation::PartitionMatroid { .. }
    )
}

/// Checks normalization, monotonicity, submodularity and (for the
/// matroid-rank kinds) binary marginals over `m` goods.
///
/// Submodularity is checked in its local form `Δ(S, g) ≥ Δ(S ∪ {h}, g)`,
/// which is equivalent to the condition over all pairs `S ⊆ T`.
pub fn validate(v: &Valuation, m: usize, seed: u64) -> ValidityReport {
    if m <= EXHAUSTIVE_MAX_GOODS {
        exhaustive(v, m)
    } else {
        sampled(v, m, seed)
    }
}

fn is_binary(d: &Rational) -> bool {
    d.is_zero() || d.is_one()
}

fn exhaustive(v: &Valuation, m: usize) -> ValidityReport {
    let values: Vec<Rational> = match v {
        Valuation::ExplicitTable(t) | Valuation::MatroidRankTable(t) if t.goods() == m => {
            t.values().to_vec()
        }
        _ => (0..1u64 << m)
            .map(|mask| v.value(&Bundle::from_mask(mask)))
            .collect(),
    };
    let need_binary = requires_binary(v);
    let mut binary = true;
    let report = |violation, binary| ValidityReport {
        coverage: Coverage::Exhaustive,
        violation,
        binary_marginals: binary,
    };
    if !values[0].is_zero() {
        return report(Some(ValidityViolation::NotNormalized), false);
    }
    for mask in 0..values.len() {
        for g in (0..m).filter(|g| mask & (1 << g) == 0) {
            let gain = &values[mask | 1 << g] - &values[mask];
            if gain.is_negative() {
                let violation = ValidityViolation::NotMonotone {
                    bundle: Bundle::from_mask(mask as u64),
                    good: g,
                };
                return report(Some(violation), false);
            }
            if !is_binary(&gain) {
                binary = false;
                if need_binary {
                    let violation = ValidityViolation::NonBinaryMarginal {
                        bundle: Bundle::from_mask(mask as u64),
                        good: g,
                    };
                    return report(Some(violation), false);
                }
            }
            for h in (0..m).filter(|&h| h != g && mask & (1 << h) == 0) {
                let larger = mask | 1 << h;
                let later = &values[larger | 1 << g] - &values[larger];
                if gain < later {
                    let violation = ValidityViolation::NotSubmodular {
                        smaller: Bundle::from_mask(mask as u64),
                        larger: Bundle::from_mask(larger as u64),
                        good: g,
                    };
                    return report(Some(violation), binary);
                }
            }
        }
    }
    report(None, binary)
}

fn sampled(v: &Valuation, m: usize, seed: u64) -> ValidityReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let need_binary = requires_binary(v);
    let mut binary = true;
    let coverage = Coverage::Sampled {
        triples: SAMPLED_TRIPLES,
        seed,
    };
    let report = |violation, binary| ValidityReport {
        coverage,
        violation,
        binary_marginals: binary,
    };
    if !v.value(&Bundle::new()).is_zero() {
        return report(Some(ValidityViolation::NotNormalized), false);
    }
    if m < 2 {
        return report(None, binary);
    }
    for _ in 0..SAMPLED_TRIPLES {
        let g = rng.gen_range(0..m);
        let mut h = rng.gen_range(0..m - 1);
        if h >= g {
            h += 1;
        }
        let s: Bundle = (0..m)
            .filter(|&k| k != g && k != h && rng.gen_bool(0.5))
            .collect();
        let gain = v.gain(&s, g);
        if gain.is_negative() {
            return report(
                Some(ValidityViolation::NotMonotone { bundle: s, good: g }),
                false,
            );
        }
        if !is_binary(&gain) {
            binary = false;
            if need_binary {
                return report(
                    Some(ValidityViolation::NonBinaryMarginal { bundle: s, good: g }),
                    false,
                );
            }
        }
        let larger = s.with(h);
        if gain < v.gain(&larger, g) {
            let violation = ValidityViolation::NotSubmodular {
                smaller: s,
                larger,
                good: g,
            };
            return report(Some(violation), binary);
        }
    }
    report(None, binary)
}
