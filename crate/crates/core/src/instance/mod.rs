//! Instances (agents, weights, valuations) and allocations.
//!
//! Agents and goods are 0-based in the API. Every external form (JSON,
//! reports, `Display`) uses the 1-based names `g1..gm` and agents `1..n`.

pub mod fixtures;
mod generate;
mod json;

use num::{One, Signed};

pub use generate::{generate, GenParams, InstanceClass};
pub use json::{load, load_path, save, save_allocation};

use crate::bundle::Bundle;
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::valuations::Valuation;

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(try_from = "json::InstanceDoc", into = "json::InstanceDoc")]
pub struct Instance {
    weights: Vec<Rational>,
    valuations: Vec<Valuation>,
    goods: usize,
}

impl Instance {
    pub fn new(weights: Vec<Rational>, valuations: Vec<Valuation>, goods: usize) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::NoAgents);
        }
        if weights.len() != valuations.len() {
            return Err(Error::MalformedValuation(format!(
                "{} weights but {} valuations",
                weights.len(),
                valuations.len()
            )));
        }
        for (i, w) in weights.iter().enumerate() {
            if !w.is_positive() {
                return Err(Error::NonPositiveWeight {
                    agent: i + 1,
                    weight: w.to_string(),
                });
            }
        }
        for (i, v) in valuations.iter().enumerate() {
            v.ensure_valid(goods).map_err(|e| match e {
                Error::InvalidValuation { violation, .. } => Error::InvalidValuation {
                    agent: i + 1,
                    violation,
                },
                other => other,
            })?;
        }
        Ok(Self {
            weights,
            valuations,
            goods,
        })
    }

    /// All agents with weight 1.
    pub fn unweighted(valuations: Vec<Valuation>, goods: usize) -> Result<Self> {
        Self::new(vec![Rational::one(); valuations.len()], valuations, goods)
    }

    pub fn n(&self) -> usize {
        self.weights.len()
    }

    pub fn m(&self) -> usize {
        self.goods
    }

    pub fn weight(&self, i: usize) -> &Rational {
        &self.weights[i]
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn valuation(&self, i: usize) -> &Valuation {
        &self.valuations[i]
    }

    pub fn valuations(&self) -> &[Valuation] {
        &self.valuations
    }

    pub fn all_goods(&self) -> Bundle {
        Bundle::full(self.goods)
    }

    pub fn value(&self, i: usize, s: &Bundle) -> Rational {
        self.valuations[i].value(s)
    }

    pub fn utility(&self, alloc: &Allocation, i: usize) -> Rational {
        self.value(i, alloc.bundle(i))
    }

    pub fn utilities(&self, alloc: &Allocation) -> Vec<Rational> {
        (0..self.n()).map(|i| self.utility(alloc, i)).collect()
    }

    pub fn has_equal_weights(&self) -> bool {
        self.weights.windows(2).all(|w| w[0] == w[1])
    }

    pub fn is_matroid_rank(&self) -> bool {
        self.valuations.iter().all(Valuation::is_matroid_rank)
    }

    pub fn require_matroid_rank(&self) -> Result<()> {
        match self.valuations.iter().position(|v| !v.is_matroid_rank()) {
            Some(i) => Err(Error::NotMatroidRank { agent: i + 1 }),
            None => Ok(()),
        }
    }

    /// Checks that `alloc` has one bundle per agent and only names known goods.
    pub fn check_allocation(&self, alloc: &Allocation) -> Result<()> {
        if alloc.n() != self.n() {
            return Err(Error::InvalidAllocation(format!(
                "{} bundles for {} agents",
                alloc.n(),
                self.n()
            )));
        }
        if let Some(g) = alloc
            .bundles()
            .iter()
            .flat_map(|b| b.iter())
            .find(|&g| g >= self.goods)
        {
            return Err(Error::UnknownGood(g + 1));
        }
        Ok(())
    }
}

/// Pairwise-disjoint bundles, one per agent.
#[derive(Debug, Clone, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(try_from = "json::AllocationDoc", into = "json::AllocationDoc")]
pub struct Allocation {
    bundles: Vec<Bundle>,
}

impl Allocation {
    pub fn new(bundles: Vec<Bundle>) -> Result<Self> {
        for (a, ba) in bundles.iter().enumerate() {
            for (b, bb) in bundles.iter().enumerate().skip(a + 1) {
                if !ba.is_disjoint(bb) {
                    return Err(Error::InvalidAllocation(format!(
                        "bundles of agents {} and {} overlap",
                        a + 1,
                        b + 1
                    )));
                }
            }
        }
        Ok(Self { bundles })
    }

    pub fn empty(n: usize) -> Self {
        Self {
            bundles: vec![Bundle::new(); n],
        }
    }

    /// Builds an allocation from 1-based good lists, as printed in examples.
    pub fn from_one_based(bundles: &[&[usize]]) -> Result<Self> {
        let mut out = Vec::with_capacity(bundles.len());
        for goods in bundles {
            if goods.contains(&0) {
                return Err(Error::InvalidAllocation("good indices start at 1".into()));
            }
            out.push(goods.iter().map(|g| g - 1).collect());
        }
        Self::new(out)
    }

    /// `owners[g]` is the agent holding good `g`, if any.
    pub fn from_owners(owners: &[Option<usize>], n: usize) -> Self {
        let mut bundles = vec![Bundle::new(); n];
        for (g, owner) in owners.iter().enumerate() {
            if let Some(i) = owner {
                bundles[*i].insert(g);
            }
        }
        Self { bundles }
    }

    pub fn n(&self) -> usize {
        self.bundles.len()
    }

    pub fn bundle(&self, i: usize) -> &Bundle {
        &self.bundles[i]
    }

    pub fn bundles(&self) -> &[Bundle] {
        &self.bundles
    }

    pub fn owner(&self, g: usize) -> Option<usize> {
        self.bundles.iter().position(|b| b.contains(g))
    }

    pub fn allocated(&self) -> Bundle {
        self.bundles
            .iter()
            .fold(Bundle::new(), |acc, b| acc.union(b))
    }

    pub fn unallocated(&self, m: usize) -> Bundle {
        Bundle::full(m).difference(&self.allocated())
    }

    pub fn is_complete(&self, m: usize) -> bool {
        self.bundles.iter().map(Bundle::len).sum::<usize>() == m
            && self.allocated().upper_bound() <= m
    }

    /// Gives `g` to agent `i`, taking it from its current owner if any.
    pub fn assign(&mut self, g: usize, i: usize) {
        self.unassign(g);
        self.bundles[i].insert(g);
    }

    pub fn unassign(&mut self, g: usize) -> Option<usize> {
        let owner = self.owner(g)?;
        self.bundles[owner].remove(g);
        Some(owner)
    }

    /// Number of goods held, used by callers that rely on cleanness.
    pub fn sizes(&self) -> Vec<usize> {
        self.bundles.iter().map(Bundle::len).collect()
    }
}

impl std::fmt::Display for Allocation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("(")?;
        for (i, b) in self.bundles.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{b}")?;
        }
        f.write_str(")")
    }
}
