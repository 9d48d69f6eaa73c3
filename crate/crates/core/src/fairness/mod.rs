//! Envy-based fairness predicates, Pareto optimality and welfare objectives.

mod harmonic;
mod po;
mod welfare;

use std::fmt;
use std::str::FromStr;

use num::{One, Zero};
use serde::Serialize;

pub use harmonic::{
    extended_harmonic, harmonic, modified_harmonic, modified_harmonic_table, HarmonicEstimate,
    ModHarmonic, DEFAULT_HARMONIC_TOL,
};
pub use po::{check_po, PoCoverage, PoReport};
pub use welfare::{welfare, Objective, WelfareEvaluator, WelfareValue};

use crate::bundle::Bundle;
use crate::error::{Error, Result};
use crate::instance::{Allocation, Instance};
use crate::rational::{check_unit, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Notion {
    Wef,
    Twef,
    Wmef,
    Wwmef1,
    Ef1,
    Mef1,
}

impl Notion {
    pub const ALL: [Notion; 6] = [
        Notion::Wef,
        Notion::Twef,
        Notion::Wmef,
        Notion::Wwmef1,
        Notion::Ef1,
        Notion::Mef1,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Notion::Wef => "WEF",
            Notion::Twef => "TWEF",
            Notion::Wmef => "WMEF",
            Notion::Wwmef1 => "WWMEF1",
            Notion::Ef1 => "EF1",
            Notion::Mef1 => "MEF1",
        }
    }

    /// Whether the notion is parameterized by `(x, y)`.
    pub fn takes_xy(self) -> bool {
        matches!(self, Notion::Wef | Notion::Twef | Notion::Wmef)
    }
}

impl fmt::Display for Notion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Notion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Notion::ALL
            .into_iter()
            .find(|n| n.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Precondition(format!("unknown notion {s:?}")))
    }
}

impl Serialize for Notion {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NotionParams {
    pub notion: Notion,
    pub x: Rational,
    pub y: Rational,
}

impl NotionParams {
    /// `y` defaults to `1 − x`. Parameterless notions ignore both.
    pub fn new(notion: Notion, x: Rational, y: Option<Rational>) -> Result<Self> {
        let y = y.unwrap_or_else(|| Rational::one() - &x);
        check_unit("x", &x)?;
        check_unit("y", &y)?;
        Ok(Self { notion, x, y })
    }

    /// Parameters `(x, 1 − x)`.
    pub fn complementary(notion: Notion, x: Rational) -> Result<Self> {
        Self::new(notion, x, None)
    }

    pub fn plain(notion: Notion) -> Self {
        Self {
            notion,
            x: Rational::one(),
            y: Rational::zero(),
        }
    }
}

/// How an ordered pair `(i, j)` was found satisfied.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "clause", content = "good")]
pub enum Clause {
    /// `A_j` is empty.
    EmptyBundle,
    /// `v_i(A_i) = v_i(A_i ∪ A_j)`.
    Saturated,
    /// The inequality holds after removing this good from `A_j`.
    Good(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub i: usize,
    pub j: usize,
    pub clause: Clause,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub i: usize,
    pub j: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FairnessReport {
    pub notion: Notion,
    pub x: Option<Rational>,
    pub y: Option<Rational>,
    pub verdict: bool,
    /// Sorted by `(i, j)`, 0-based.
    pub violations: Vec<Violation>,
    pub witnesses: Vec<Witness>,
    /// Set by EF1/MEF1 when the instance has unequal weights.
    pub weights_ignored: bool,
}

impl FairnessReport {
    pub fn violated_pairs(&self) -> Vec<(usize, usize)> {
        self.violations.iter().map(|v| (v.i, v.j)).collect()
    }
}

#[derive(Serialize)]
struct ReportDoc<'a> {
    notion: Notion,
    x: Option<String>,
    y: Option<String>,
    verdict: bool,
    violations: Vec<ViolationDoc<'a>>,
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    weights_ignored: bool,
}

#[derive(Serialize)]
struct ViolationDoc<'a> {
    i: usize,
    j: usize,
    reason: &'a str,
}

impl Serialize for FairnessReport {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ReportDoc {
            notion: self.notion,
            x: self.x.as_ref().map(ToString::to_string),
            y: self.y.as_ref().map(ToString::to_string),
            verdict: self.verdict,
            violations: self
                .violations
                .iter()
                .map(|v| ViolationDoc {
                    i: v.i + 1,
                    j: v.j + 1,
                    reason: &v.reason,
                })
                .collect(),
            weights_ignored: self.weights_ignored,
        }
        .serialize(s)
    }
}

enum Outcome {
    Holds(Clause),
    Fails(String),
}

/// Runs `pair` on every ordered pair of distinct agents.
fn scan(
    instance: &Instance,
    alloc: &Allocation,
    notion: Notion,
    xy: Option<(&Rational, &Rational)>,
    mut pair: impl FnMut(usize, usize) -> Outcome,
) -> Result<FairnessReport> {
    instance.check_allocation(alloc)?;
    let mut violations = Vec::new();
    let mut witnesses = Vec::new();
    for i in 0..instance.n() {
        for j in 0..instance.n() {
            if i == j {
                continue;
            }
            match pair(i, j) {
                Outcome::Holds(clause) => witnesses.push(Witness { i, j, clause }),
                Outcome::Fails(reason) => violations.push(Violation { i, j, reason }),
            }
        }
    }
    Ok(FairnessReport {
        notion,
        x: xy.map(|(x, _)| x.clone()),
        y: xy.map(|(_, y)| y.clone()),
        verdict: violations.is_empty(),
        violations,
        witnesses,
        weights_ignored: false,
    })
}

/// First good of `bundle` whose `(lhs, rhs)` satisfies `lhs ≥ rhs`, or else a
/// description of the good that comes closest.
fn first_good(
    bundle: &Bundle,
    mut sides: impl FnMut(usize) -> (Rational, Rational),
) -> std::result::Result<usize, String> {
    let mut closest: Option<(Rational, usize, Rational, Rational)> = None;
    for g in bundle.iter() {
        let (lhs, rhs) = sides(g);
        if lhs >= rhs {
            return Ok(g);
        }
        let gap = &rhs - &lhs;
        if closest.as_ref().is_none_or(|(best, ..)| gap < *best) {
            closest = Some((gap, g, lhs, rhs));
        }
    }
    let (_, g, lhs, rhs) = closest.expect("caller handles empty bundles");
    Err(format!("{lhs} < {rhs} at best good g{}", g + 1))
}

fn envy_text(i: usize, j: usize, detail: &str) -> String {
    format!("agent {} envies agent {}: {detail}", i + 1, j + 1)
}

/// WEF(x, y): `A_j = ∅` or some `g ∈ A_j` has
/// `(v_i(A_i) + y·Δ_i(A_i, g))/w_i ≥ (v_i(A_j) − x·δ_i(A_j, g))/w_j`.
pub fn check_wef(
    alloc: &Allocation,
    instance: &Instance,
    x: &Rational,
    y: &Rational,
) -> Result<FairnessReport> {
    check_unit("x", x)?;
    check_unit("y", y)?;
    scan(instance, alloc, Notion::Wef, Some((x, y)), |i, j| {
        wef_pair(alloc, instance, i, j, x, y, false)
    })
}

/// TWEF(x, y): WEF(x, y) with the escape `v_i(A_i) = v_i(A_i ∪ A_j)`.
pub fn check_twef(
    alloc: &Allocation,
    instance: &Instance,
    x: &Rational,
    y: &Rational,
) -> Result<FairnessReport> {
    check_unit("x", x)?;
    check_unit("y", y)?;
    scan(instance, alloc, Notion::Twef, Some((x, y)), |i, j| {
        wef_pair(alloc, instance, i, j, x, y, true)
    })
}

fn wef_pair(
    alloc: &Allocation,
    instance: &Instance,
    i: usize,
    j: usize,
    x: &Rational,
    y: &Rational,
    transferable: bool,
) -> Outcome {
    let (ai, aj) = (alloc.bundle(i), alloc.bundle(j));
    if aj.is_empty() {
        return Outcome::Holds(Clause::EmptyBundle);
    }
    let v = instance.valuation(i);
    let own = v.value(ai);
    if transferable && own == v.value(&ai.union(aj)) {
        return Outcome::Holds(Clause::Saturated);
    }
    let (wi, wj) = (instance.weight(i), instance.weight(j));
    let other = v.value(aj);
    let found = first_good(aj, |g| {
        let lhs = (&own + y * v.gain(ai, g)) / wi;
        let rhs = (&other - x * v.loss(aj, g)) / wj;
        (lhs, rhs)
    });
    match found {
        Ok(g) => Outcome::Holds(Clause::Good(g)),
        Err(detail) => Outcome::Fails(envy_text(i, j, &detail)),
    }
}

/// WMEF(x, y): `A_j = ∅` or some `g ∈ A_j` has `(v_i(A_i) + y·Δ_i(A_i, g))/w_i
/// ≥ (v_i(A_i ∪ A_j) − v_i(A_i) − x·δ_i(A_i ∪ A_j, g))/w_j`.
pub fn check_wmef(
    alloc: &Allocation,
    instance: &Instance,
    x: &Rational,
    y: &Rational,
) -> Result<FairnessReport> {
    check_unit("x", x)?;
    check_unit("y", y)?;
    scan(instance, alloc, Notion::Wmef, Some((x, y)), |i, j| {
        let (ai, aj) = (alloc.bundle(i), alloc.bundle(j));
        if aj.is_empty() {
            return Outcome::Holds(Clause::EmptyBundle);
        }
        let v = instance.valuation(i);
        let own = v.value(ai);
        let both = ai.union(aj);
        let marginal = v.value(&both) - &own;
        let (wi, wj) = (instance.weight(i), instance.weight(j));
        let found = first_good(aj, |g| {
            let lhs = (&own + y * v.gain(ai, g)) / wi;
            let rhs = (&marginal - x * v.loss(&both, g)) / wj;
            (lhs, rhs)
        });
        match found {
            Ok(g) => Outcome::Holds(Clause::Good(g)),
            Err(detail) => Outcome::Fails(envy_text(i, j, &detail)),
        }
    })
}

/// WWMEF1: `A_j = ∅` or some `g ∈ A_j` has either
/// `v_i(A_i)/w_i ≥ (v_i(A_i ∪ A_j \ {g}) − v_i(A_i))/w_j` or
/// `v_i(A_i ∪ {g})/w_i ≥ (v_i(A_i ∪ A_j) − v_i(A_i))/w_j`.
pub fn check_wwmef1(alloc: &Allocation, instance: &Instance) -> Result<FairnessReport> {
    scan(instance, alloc, Notion::Wwmef1, None, |i, j| {
        let (ai, aj) = (alloc.bundle(i), alloc.bundle(j));
        if aj.is_empty() {
            return Outcome::Holds(Clause::EmptyBundle);
        }
        let v = instance.valuation(i);
        let own = v.value(ai);
        let both = ai.union(aj);
        let marginal = v.value(&both) - &own;
        let (wi, wj) = (instance.weight(i), instance.weight(j));
        let found = first_good(aj, |g| {
            let removed = (v.value(&both.without(g)) - &own) / wj;
            let added = v.value(&ai.with(g)) / wi;
            let whole = &marginal / wj;
            let own_w = &own / wi;
            // report whichever alternative has the smaller gap
            if &own_w - &removed >= &added - &whole {
                (own_w, removed)
            } else {
                (added, whole)
            }
        });
        match found {
            Ok(g) => Outcome::Holds(Clause::Good(g)),
            Err(detail) => Outcome::Fails(envy_text(i, j, &detail)),
        }
    })
}

/// EF1: `A_j = ∅` or some `g ∈ A_j` has `v_i(A_i) ≥ v_i(A_j \ {g})`. Weights
/// are ignored.
pub fn check_ef1(alloc: &Allocation, instance: &Instance) -> Result<FairnessReport> {
    let mut report = scan(instance, alloc, Notion::Ef1, None, |i, j| {
        let (ai, aj) = (alloc.bundle(i), alloc.bundle(j));
        if aj.is_empty() {
            return Outcome::Holds(Clause::EmptyBundle);
        }
        let v = instance.valuation(i);
        let own = v.value(ai);
        match first_good(aj, |g| (own.clone(), v.value(&aj.without(g)))) {
            Ok(g) => Outcome::Holds(Clause::Good(g)),
            Err(_) => {
                let best = aj
                    .iter()
                    .map(|g| (v.value(&aj.without(g)), g))
                    .min()
                    .expect("nonempty");
                Outcome::Fails(format!(
                    "v_{i1}(A_{i1}) = {own} < {} = v_{i1}(A_{j1} \\ {{g{}}})",
                    best.0,
                    best.1 + 1,
                    i1 = i + 1,
                    j1 = j + 1
                ))
            }
        }
    })?;
    report.weights_ignored = !instance.has_equal_weights();
    Ok(report)
}

/// MEF1: `A_j = ∅` or some `g ∈ A_j` has
/// `v_i(A_i) ≥ v_i(A_i ∪ A_j \ {g}) − v_i(A_i)`. Weights are ignored.
pub fn check_mef1(alloc: &Allocation, instance: &Instance) -> Result<FairnessReport> {
    let mut report = scan(instance, alloc, Notion::Mef1, None, |i, j| {
        let (ai, aj) = (alloc.bundle(i), alloc.bundle(j));
        if aj.is_empty() {
            return Outcome::Holds(Clause::EmptyBundle);
        }
        let v = instance.valuation(i);
        let own = v.value(ai);
        let both = ai.union(aj);
        match first_good(aj, |g| (own.clone(), v.value(&both.without(g)) - &own)) {
            Ok(g) => Outcome::Holds(Clause::Good(g)),
            Err(detail) => Outcome::Fails(envy_text(i, j, &detail)),
        }
    })?;
    report.weights_ignored = !instance.has_equal_weights();
    Ok(report)
}

/// Dispatches on `params.notion`.
pub fn check(
    alloc: &Allocation,
    instance: &Instance,
    params: &NotionParams,
) -> Result<FairnessReport> {
    let (x, y) = (&params.x, &params.y);
    match params.notion {
        Notion::Wef => check_wef(alloc, instance, x, y),
        Notion::Twef => check_twef(alloc, instance, x, y),
        Notion::Wmef => check_wmef(alloc, instance, x, y),
        Notion::Wwmef1 => check_wwmef1(alloc, instance),
        Notion::Ef1 => check_ef1(alloc, instance),
        Notion::Mef1 => check_mef1(alloc, instance),
    }
}
