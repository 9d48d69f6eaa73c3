//! Valuation oracles over bundles of goods.
//!
//! Every valuation is normalized, monotone and submodular. The constructive
//! kinds (additive, partition matroid, truncated additive) enforce this through
//! their payload shape; explicit tables are checked exhaustively when built.

mod clean;
mod validate;

use num::{One, Signed, Zero};

pub use clean::{clean, is_clean};
pub use validate::{validate, Coverage, ValidityReport, ValidityViolation, EXHAUSTIVE_MAX_GOODS};

use crate::bundle::Bundle;
use crate::error::{Error, Result};
use crate::rational::{is_integer, Rational};

/// Largest good count an explicit table may cover (2^20 entries).
pub const TABLE_MAX_GOODS: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub enum Valuation {
    /// Arbitrary submodular function given by its value on every bundle.
    ExplicitTable(Table),
    /// `v(S) = sum of values[g]` over `g` in `S`.
    Additive(Vec<Rational>),
    /// Additive with every per-good value in {0, 1}.
    BinaryAdditive(Vec<Rational>),
    /// Explicit table that must also have all marginal gains in {0, 1}.
    MatroidRankTable(Table),
    /// `v(S) = sum over c of min(caps[c], |S ∩ categories[c]|)`.
    PartitionMatroid {
        categories: Vec<Bundle>,
        caps: Vec<u64>,
    },
    /// `v(S) = min(cap, sum of values[g] over g in S)`.
    TruncatedAdditive {
        values: Vec<Rational>,
        cap: Rational,
    },
}

/// Values of a set function on all `2^m` bundles, indexed by bitmask.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    m: usize,
    values: Vec<Rational>,
    binary: bool,
}

impl Table {
    pub fn goods(&self) -> usize {
        self.m
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    /// Whether every marginal gain is 0 or 1.
    pub fn has_binary_marginals(&self) -> bool {
        self.binary
    }
}

impl Valuation {
    /// Builds an explicit table from `f`, evaluated on every bundle of `m`
    /// goods, and checks it exhaustively.
    pub fn table_from_fn(m: usize, f: impl Fn(&Bundle) -> Rational) -> Result<Self> {
        let v = Self::table_unchecked(
            m,
            (0..1u64 << m)
                .map(|mask| f(&Bundle::from_mask(mask)))
                .collect(),
        )?;
        v.ensure_valid(m)?;
        Ok(v)
    }

    /// Like [`Valuation::table_from_fn`] but additionally requires binary marginals.
    pub fn matroid_table_from_fn(m: usize, f: impl Fn(&Bundle) -> Rational) -> Result<Self> {
        let Valuation::ExplicitTable(t) = Self::table_from_fn(m, f)? else {
            unreachable!()
        };
        let v = Valuation::MatroidRankTable(t);
        v.ensure_valid(m)?;
        Ok(v)
    }

    /// Wraps a mask-indexed value vector without checking monotonicity or
    /// submodularity. Use [`validate`] before trusting the result.
    pub fn table_unchecked(m: usize, values: Vec<Rational>) -> Result<Self> {
        if m > TABLE_MAX_GOODS {
            return Err(Error::TableTooLarge {
                m,
                max: TABLE_MAX_GOODS,
            });
        }
        if values.len() != 1 << m {
            return Err(Error::MalformedValuation(format!(
                "table for {m} goods needs {} entries, got {}",
                1u64 << m,
                values.len()
            )));
        }
        let binary = table_marginals_binary(m, &values);
        Ok(Valuation::ExplicitTable(Table { m, values, binary }))
    }

    pub fn additive(values: Vec<Rational>) -> Result<Self> {
        if values.iter().any(|v| v.is_negative()) {
            return Err(Error::MalformedValuation(
                "additive values must be non-negative".into(),
            ));
        }
        Ok(Valuation::Additive(values))
    }

    pub fn binary_additive(values: Vec<Rational>) -> Result<Self> {
        if values.iter().any(|v| !(v.is_zero() || v.is_one())) {
            return Err(Error::MalformedValuation(
                "binary additive values must be 0 or 1".into(),
            ));
        }
        Ok(Valuation::BinaryAdditive(values))
    }

    /// Binary additive valuation liking exactly the goods in `liked`.
    pub fn binary_from_goods(m: usize, liked: &[usize]) -> Self {
        let values = (0..m)
            .map(|g| {
                if liked.contains(&g) {
                    Rational::one()
                } else {
                    Rational::zero()
                }
            })
            .collect();
        Valuation::BinaryAdditive(values)
    }

    pub fn partition_matroid(categories: Vec<Bundle>, caps: Vec<u64>) -> Result<Self> {
        if categories.len() != caps.len() {
            return Err(Error::MalformedValuation(format!(
                "{} categories but {} caps",
                categories.len(),
                caps.len()
            )));
        }
        for (a, ca) in categories.iter().enumerate() {
            for cb in &categories[a + 1..] {
                if !ca.is_disjoint(cb) {
                    return Err(Error::MalformedValuation(
                        "partition matroid categories overlap".into(),
                    ));
                }
            }
        }
        Ok(Valuation::PartitionMatroid { categories, caps })
    }

    pub fn truncated_additive(values: Vec<Rational>, cap: Rational) -> Result<Self> {
        if values.iter().any(|v| v.is_negative()) || cap.is_negative() {
            return Err(Error::MalformedValuation(
                "truncated additive values and cap must be non-negative".into(),
            ));
        }
        Ok(Valuation::TruncatedAdditive { values, cap })
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Valuation::ExplicitTable(_) => "explicit-table",
            Valuation::Additive(_) => "additive",
            Valuation::BinaryAdditive(_) => "binary-additive",
            Valuation::MatroidRankTable(_) => "matroid-rank-table",
            Valuation::PartitionMatroid { .. } => "partition-matroid",
            Valuation::TruncatedAdditive { .. } => "truncated-additive",
        }
    }

    /// `v(S)`. Goods outside the valuation's domain contribute nothing for the
    /// constructive kinds; tables require `S` to lie within their goods.
    pub fn value(&self, s: &Bundle) -> Rational {
        match self {
            Valuation::ExplicitTable(t) | Valuation::MatroidRankTable(t) => {
                let mask = s.mask().expect("bundle outside table domain");
                t.values[mask as usize].clone()
            }
            Valuation::Additive(values) | Valuation::BinaryAdditive(values) => {
                sum_values(values, s)
            }
            Valuation::PartitionMatroid { categories, caps } => {
                let total: u64 = categories
                    .iter()
                    .zip(caps)
                    .map(|(c, &cap)| (c.intersection_len(s) as u64).min(cap))
                    .sum();
                Rational::from_integer(total.into())
            }
            Valuation::TruncatedAdditive { values, cap } => {
                let total = sum_values(values, s);
                if total > *cap {
                    cap.clone()
                } else {
                    total
                }
            }
        }
    }

    /// Checked evaluation: every good in `s` must be one of the `m` goods.
    pub fn evaluate(&self, s: &Bundle, m: usize) -> Result<Rational> {
        if let Some(g) = s.iter().find(|&g| g >= m) {
            return Err(Error::UnknownGood(g + 1));
        }
        Ok(self.value(s))
    }

    /// `Δ(S, g) = v(S ∪ {g}) − v(S)`; `g` must not be in `S`.
    pub fn marginal_gain(&self, s: &Bundle, g: usize) -> Result<Rational> {
        if s.contains(g) {
            return Err(Error::GoodInBundle { good: g + 1 });
        }
        Ok(self.gain(s, g))
    }

    /// `δ(S, g) = v(S) − v(S \ {g})`; `g` must be in `S`.
    pub fn marginal_loss(&self, s: &Bundle, g: usize) -> Result<Rational> {
        if !s.contains(g) {
            return Err(Error::GoodNotInBundle { good: g + 1 });
        }
        Ok(self.loss(s, g))
    }

    /// Unchecked marginal gain; for `g ∈ S` this is 0.
    pub(crate) fn gain(&self, s: &Bundle, g: usize) -> Rational {
        match self {
            Valuation::Additive(values) | Valuation::BinaryAdditive(values) if !s.contains(g) => {
                values.get(g).cloned().unwrap_or_else(Rational::zero)
            }
            _ => self.value(&s.with(g)) - self.value(s),
        }
    }

    /// Unchecked marginal loss; for `g ∉ S` this is 0.
    pub(crate) fn loss(&self, s: &Bundle, g: usize) -> Rational {
        self.value(s) - self.value(&s.without(g))
    }

    pub fn is_additive(&self) -> bool {
        matches!(self, Valuation::Additive(_) | Valuation::BinaryAdditive(_))
    }

    /// Per-good values for the additive kinds.
    pub fn additive_values(&self) -> Option<&[Rational]> {
        match self {
            Valuation::Additive(v) | Valuation::BinaryAdditive(v) => Some(v),
            _ => None,
        }
    }

    /// Whether this valuation is matroid-rank (submodular with 0/1 marginals).
    pub fn is_matroid_rank(&self) -> bool {
        match self {
            Valuation::BinaryAdditive(_)
            | Valuation::MatroidRankTable(_)
            | Valuation::PartitionMatroid { .. } => true,
            Valuation::Additive(values) => values.iter().all(|v| v.is_zero() || v.is_one()),
            Valuation::ExplicitTable(t) => t.binary,
            Valuation::TruncatedAdditive { values, cap } => {
                is_integer(cap) && values.iter().all(|v| v.is_zero() || v.is_one())
            }
        }
    }

    /// Payload-level checks for `m` goods; tables get the exhaustive check.
    pub(crate) fn ensure_valid(&self, m: usize) -> Result<()> {
        let too_short =
            |len: usize| Error::MalformedValuation(format!("{len} per-good values for {m} goods"));
        match self {
            Valuation::ExplicitTable(t) | Valuation::MatroidRankTable(t) => {
                if t.m != m {
                    return Err(Error::MalformedValuation(format!(
                        "table covers {} goods, instance has {m}",
                        t.m
                    )));
                }
                let report = validate(self, m, 0);
                if let Some(violation) = report.violation {
                    return Err(Error::InvalidValuation {
                        agent: 0,
                        violation,
                    });
                }
            }
            Valuation::Additive(v) | Valuation::BinaryAdditive(v) => {
                if v.len() != m {
                    return Err(too_short(v.len()));
                }
            }
            Valuation::TruncatedAdditive { values, .. } => {
                if values.len() != m {
                    return Err(too_short(values.len()));
                }
            }
            Valuation::PartitionMatroid { categories, .. } => {
                if let Some(g) = categories.iter().flat_map(|c| c.iter()).find(|&g| g >= m) {
                    return Err(Error::UnknownGood(g + 1));
                }
            }
        }
        Ok(())
    }
}

fn sum_values(values: &[Rational], s: &Bundle) -> Rational {
    let mut total = Rational::zero();
    for g in s.iter() {
        if let Some(v) = values.get(g) {
            total += v;
        }
    }
    total
}

fn table_marginals_binary(m: usize, values: &[Rational]) -> bool {
    let one = Rational::one();
    (0..values.len()).all(|mask| {
        (0..m).filter(|g| mask & (1 << g) == 0).all(|g| {
            let d = &values[mask | (1 << g)] - &values[mask];
            d.is_zero() || d == one
        })
    })
}
