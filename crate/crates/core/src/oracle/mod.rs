//! Brute-force ground truth over the whole allocation space.
//!
//! Allocations are enumerated with a mixed-radix counter over goods, good
//! `g1` being the least significant digit. Digit `d < n` gives the good to
//! agent `d`; when incomplete allocations are included, digit `n` leaves it
//! unallocated.

use std::borrow::Cow;
use std::cmp::Ordering;

use num::{Signed, ToPrimitive};
use rayon::prelude::*;

use crate::bundle::Bundle;
use crate::error::{Error, Result};
use crate::fairness::{self, NotionParams, Objective, WelfareEvaluator, WelfareValue};
use crate::instance::{Allocation, Instance};
use crate::rational::Rational;

pub const DEFAULT_MAX_STATES: u64 = 10_000_000;

/// Goods up to which per-agent utility tables are precomputed.
const TABLE_CACHE_MAX_GOODS: usize = 16;

/// States handled by one parallel work item.
const CHUNK: u64 = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMode {
    Exhaustive,
    /// Random complete allocations; only meaningful for checks that look for
    /// a counterexample.
    Sampled {
        samples: u64,
        seed: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchBudget {
    pub max_states: u64,
    pub mode: SearchMode,
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self {
            max_states: DEFAULT_MAX_STATES,
            mode: SearchMode::Exhaustive,
        }
    }
}

impl SearchBudget {
    pub fn exhaustive(max_states: u64) -> Self {
        Self {
            max_states,
            mode: SearchMode::Exhaustive,
        }
    }

    /// Default budget, with the cap overridden by `FAIRSHARE_BUDGET` if set.
    pub fn from_env() -> Result<Self> {
        let mut budget = Self::default();
        if let Ok(text) = std::env::var("FAIRSHARE_BUDGET") {
            budget.max_states = text.trim().parse().map_err(|_| {
                Error::Precondition(format!("FAIRSHARE_BUDGET must be an integer, got {text:?}"))
            })?;
        }
        Ok(budget)
    }
}

/// `n^m` or `(n+1)^m`, or `None` on overflow.
pub fn state_count(n: usize, m: usize, complete_only: bool) -> Option<u64> {
    let radix = (n + usize::from(!complete_only)) as u64;
    (0..m).try_fold(1u64, |acc, _| acc.checked_mul(radix))
}

fn ensure_budget(n: usize, m: usize, complete_only: bool, budget: &SearchBudget) -> Result<u64> {
    match state_count(n, m, complete_only) {
        Some(states) if states <= budget.max_states && m <= 64 => Ok(states),
        other => Err(Error::BudgetExceeded {
            states: other.map_or_else(
                || {
                    let radix = n + usize::from(!complete_only);
                    format!("{radix}^{m}")
                },
                |s| s.to_string(),
            ),
            budget: budget.max_states,
        }),
    }
}

/// Mixed-radix counter holding the owner of each good and the bundle masks.
#[derive(Debug, Clone)]
pub(crate) struct Counter {
    n: usize,
    radix: usize,
    digits: Vec<usize>,
    /// One mask per agent, plus one for unallocated goods.
    masks: Vec<u64>,
}

impl Counter {
    fn at(n: usize, m: usize, complete_only: bool, mut index: u64) -> Self {
        let radix = n + usize::from(!complete_only);
        let mut digits = vec![0; m];
        let mut masks = vec![0u64; n + 1];
        for (g, d) in digits.iter_mut().enumerate() {
            *d = (index % radix as u64) as usize;
            index /= radix as u64;
            masks[*d] |= 1 << g;
        }
        Self {
            n,
            radix,
            digits,
            masks,
        }
    }

    fn advance(&mut self) {
        for g in 0..self.digits.len() {
            let d = self.digits[g];
            self.masks[d] &= !(1 << g);
            if d + 1 < self.radix {
                self.digits[g] = d + 1;
                self.masks[d + 1] |= 1 << g;
                return;
            }
            self.digits[g] = 0;
            self.masks[0] |= 1 << g;
        }
    }

    pub(crate) fn masks(&self) -> &[u64] {
        &self.masks[..self.n]
    }

    pub(crate) fn allocation(&self) -> Allocation {
        Allocation::new(self.masks().iter().map(|&m| Bundle::from_mask(m)).collect())
            .expect("counter bundles are disjoint")
    }
}

/// Every allocation of `instance` exactly once, in counter order.
pub struct Allocations {
    counter: Counter,
    remaining: u64,
}

impl Iterator for Allocations {
    type Item = Allocation;

    fn next(&mut self) -> Option<Allocation> {
        if self.remaining == 0 {
            return None;
        }
        let out = self.counter.allocation();
        self.remaining -= 1;
        if self.remaining > 0 {
            self.counter.advance();
        }
        Some(out)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let r = self.remaining as usize;
        (r, Some(r))
    }
}

pub fn enumerate_allocations(
    instance: &Instance,
    complete_only: bool,
    budget: &SearchBudget,
) -> Result<Allocations> {
    let (n, m) = (instance.n(), instance.m());
    let states = ensure_budget(n, m, complete_only, budget)?;
    Ok(Allocations {
        counter: Counter::at(n, m, complete_only, 0),
        remaining: states,
    })
}

/// `v_i(S)` by mask, tabulated for small `m`.
pub(crate) struct Utilities<'a> {
    instance: &'a Instance,
    tables: Option<Vec<Vec<Rational>>>,
}

impl<'a> Utilities<'a> {
    pub(crate) fn new(instance: &'a Instance) -> Self {
        let m = instance.m();
        let tables = (m <= TABLE_CACHE_MAX_GOODS).then(|| {
            (0..instance.n())
                .map(|i| {
                    (0..1u64 << m)
                        .into_par_iter()
                        .map(|mask| instance.value(i, &Bundle::from_mask(mask)))
                        .collect()
                })
                .collect()
        });
        Self { instance, tables }
    }

    pub(crate) fn get(&self, i: usize, mask: u64) -> Cow<'_, Rational> {
        match &self.tables {
            Some(t) => Cow::Borrowed(&t[i][mask as usize]),
            None => Cow::Owned(self.instance.value(i, &Bundle::from_mask(mask))),
        }
    }

    pub(crate) fn vector(&self, masks: &[u64]) -> Vec<Rational> {
        masks
            .iter()
            .enumerate()
            .map(|(i, &mask)| self.get(i, mask).into_owned())
            .collect()
    }

    fn all_values(&self) -> impl Iterator<Item = &Rational> {
        self.tables.iter().flatten().flatten()
    }
}

fn chunks(states: u64) -> Vec<(u64, u64)> {
    (0..states.div_ceil(CHUNK))
        .map(|c| (c * CHUNK, ((c + 1) * CHUNK).min(states)))
        .collect()
}

/// First allocation in counter order for which `pred` holds.
pub(crate) fn search_first<F>(
    instance: &Instance,
    complete_only: bool,
    budget: &SearchBudget,
    pred: F,
) -> Result<Option<Allocation>>
where
    F: Fn(&Counter) -> bool + Sync,
{
    let (n, m) = (instance.n(), instance.m());
    let states = ensure_budget(n, m, complete_only, budget)?;
    Ok(chunks(states)
        .into_par_iter()
        .find_map_first(|(start, end)| {
            let mut counter = Counter::at(n, m, complete_only, start);
            for k in start..end {
                if pred(&counter) {
                    return Some(counter.allocation());
                }
                if k + 1 < end {
                    counter.advance();
                }
            }
            None
        }))
}

#[derive(Debug, Clone)]
pub struct Optimum {
    pub value: WelfareValue,
    /// Every maximizer, in counter order.
    pub argmax: Vec<Allocation>,
    pub states: u64,
}

/// Optimum of `objective` over all allocations (including incomplete ones)
/// together with the full argmax set.
pub fn exact_optimum(
    instance: &Instance,
    objective: &Objective,
    budget: &SearchBudget,
) -> Result<Optimum> {
    let (n, m) = (instance.n(), instance.m());
    let states = ensure_budget(n, m, false, budget)?;
    let utilities = Utilities::new(instance);
    let mut evaluator = WelfareEvaluator::new(instance, objective.clone())?;
    evaluator.prepare(utilities.all_values())?;

    type Best = Option<(WelfareValue, Vec<(Vec<u64>, WelfareValue)>)>;
    let absorb = |best: &mut Best, masks: &[u64], value: WelfareValue| match best {
        None => *best = Some((value.clone(), vec![(masks.to_vec(), value)])),
        Some((top, list)) => {
            if value.beats(top) {
                *top = value.clone();
                list.retain(|(_, v)| v.ties(top));
                list.push((masks.to_vec(), value));
            } else if value.ties(top) {
                if value > *top {
                    *top = value.clone();
                }
                list.push((masks.to_vec(), value));
            }
        }
    };

    let parts: Vec<Result<Best>> = chunks(states)
        .into_par_iter()
        .map(|(start, end)| {
            let mut best: Best = None;
            let mut best_key: Option<(usize, f64)> = None;
            let mut counter = Counter::at(n, m, false, start);
            for k in start..end {
                let u = utilities.vector(counter.masks());
                let key = evaluator.estimate(&u);
                let hopeless = match (key, best_key) {
                    (Some((p, s)), Some((bp, bs))) => {
                        p < bp || (p == bp && s < bs - 1e-9 * (1.0 + bs.abs()))
                    }
                    _ => false,
                };
                if !hopeless {
                    let value = evaluator.eval(&u)?;
                    let improves = best
                        .as_ref()
                        .is_none_or(|(top, _)| value.partial_cmp(top) == Some(Ordering::Greater));
                    absorb(&mut best, counter.masks(), value);
                    if improves {
                        best_key = key;
                    }
                }
                if k + 1 < end {
                    counter.advance();
                }
            }
            Ok(best)
        })
        .collect();

    let mut best: Best = None;
    for part in parts {
        if let Some((_, list)) = part? {
            for (masks, value) in list {
                absorb(&mut best, &masks, value);
            }
        }
    }
    let (value, list) = best.expect("at least one allocation exists");
    let argmax = list
        .into_iter()
        .filter(|(_, v)| v.ties(&value))
        .map(|(masks, _)| {
            Allocation::new(masks.into_iter().map(Bundle::from_mask).collect())
                .expect("counter bundles are disjoint")
        })
        .collect();
    Ok(Optimum {
        value,
        argmax,
        states,
    })
}

/// An allocation satisfying the notion, if one exists.
pub fn notion_exists(
    instance: &Instance,
    params: &NotionParams,
    complete_only: bool,
    budget: &SearchBudget,
) -> Result<Option<Allocation>> {
    // surface parameter errors before the search swallows them
    fairness::check(&Allocation::empty(instance.n()), instance, params)?;
    search_first(instance, complete_only, budget, |counter| {
        fairness::check(&counter.allocation(), instance, params).is_ok_and(|r| r.verdict)
    })
}

/// Maximum unweighted utilitarian welfare over all allocations, by dynamic
/// programming over subsets (`n·3^m` steps), with one maximizer.
pub fn max_utilitarian(
    instance: &Instance,
    budget: &SearchBudget,
) -> Result<(Rational, Allocation)> {
    let (n, m) = (instance.n(), instance.m());
    let steps = (0..m).try_fold(n as u64, |acc, _| acc.checked_mul(3));
    match steps {
        Some(s) if s <= budget.max_states && m <= 20 => {}
        _ => {
            return Err(Error::BudgetExceeded {
                states: format!("{n}*3^{m}"),
                budget: budget.max_states,
            })
        }
    }
    let full = (1u64 << m) - 1;
    let tables: Vec<Vec<Rational>> = (0..n)
        .map(|i| {
            (0..=full)
                .into_par_iter()
                .map(|mask| instance.value(i, &Bundle::from_mask(mask)))
                .collect()
        })
        .collect();
    // machine integers whenever every value allows it
    let small: Option<Vec<Vec<i64>>> = tables
        .iter()
        .map(|t| {
            t.iter()
                .map(|q| q.is_integer().then(|| q.to_integer().to_i64()).flatten())
                .map(|v| v.filter(|v| v.abs() < i64::MAX >> 8))
                .collect()
        })
        .collect();
    let masks = match &small {
        Some(t) => subset_dp(t).1,
        None => subset_dp(&tables).1,
    };
    let bundles: Vec<Bundle> = masks.into_iter().map(Bundle::from_mask).collect();
    let value = bundles
        .iter()
        .enumerate()
        .map(|(i, b)| instance.value(i, b))
        .sum();
    Ok((value, Allocation::new(bundles)?))
}

/// `best_i[mask] = max_{S ⊆ mask} best_{i−1}[mask \ S] + v_i(S)`; returns the
/// optimum over all goods and one maximizing bundle mask per agent.
fn subset_dp<T>(tables: &[Vec<T>]) -> (T, Vec<u64>)
where
    T: Clone + Ord + Default + Send + Sync,
    for<'a> &'a T: std::ops::Add<&'a T, Output = T>,
{
    let full = tables[0].len() - 1;
    let mut best: Vec<T> = vec![T::default(); full + 1];
    let mut choice: Vec<Vec<u32>> = Vec::with_capacity(tables.len());
    for v in tables {
        let (next, pick): (Vec<T>, Vec<u32>) = (0..=full)
            .into_par_iter()
            .map(|mask| {
                let mut top = best[mask].clone();
                let mut arg = 0u32;
                let mut sub = mask;
                while sub > 0 {
                    let cand = &best[mask ^ sub] + &v[sub];
                    if cand > top {
                        top = cand;
                        arg = sub as u32;
                    }
                    sub = (sub - 1) & mask;
                }
                (top, arg)
            })
            .unzip();
        best = next;
        choice.push(pick);
    }
    let mut masks = vec![0u64; tables.len()];
    let mut mask = full;
    for i in (0..tables.len()).rev() {
        let sub = choice[i][mask] as usize;
        masks[i] = sub as u64;
        mask ^= sub;
    }
    (best[full].clone(), masks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fairness::Notion;
    use crate::instance::{fixtures, generate, GenParams, InstanceClass};
    use crate::rational::{int, ratio};
    use crate::valuations::clean;

    #[test]
    fn enumeration_counts() {
        let inst = fixtures::example1(2).instance;
        let b = SearchBudget::default();
        assert_eq!(enumerate_allocations(&inst, true, &b).unwrap().count(), 4);
        let all: Vec<_> = enumerate_allocations(&inst, false, &b).unwrap().collect();
        assert_eq!(all.len(), 9);
        let mut dedup = all.clone();
        dedup.sort_by_key(|a| format!("{a}"));
        dedup.dedup();
        assert_eq!(dedup.len(), 9);
        // g1 is the least significant digit
        assert_eq!(all[1], Allocation::from_one_based(&[&[2], &[1]]).unwrap());
    }

    #[test]
    fn single_agent_no_goods() {
        let inst = Instance::unweighted(
            vec![crate::valuations::Valuation::binary_from_goods(0, &[])],
            0,
        )
        .unwrap();
        let all: Vec<_> = enumerate_allocations(&inst, false, &SearchBudget::default())
            .unwrap()
            .collect();
        assert_eq!(all, vec![Allocation::empty(1)]);
    }

    #[test]
    fn budget_is_enforced() {
        let inst = fixtures::example1(6).instance;
        assert!(matches!(
            enumerate_allocations(&inst, false, &SearchBudget::exhaustive(100)),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn example_one_has_no_complete_wef1() {
        let inst = fixtures::example1(6).instance;
        let b = SearchBudget::default();
        let wef = NotionParams::new(Notion::Wef, int(1), Some(int(0))).unwrap();
        assert!(notion_exists(&inst, &wef, true, &b).unwrap().is_none());
        let twef = NotionParams::new(Notion::Twef, int(1), Some(int(0))).unwrap();
        let w = notion_exists(&inst, &twef, true, &b).unwrap().unwrap();
        assert!(w.is_complete(6));
        assert!(
            fairness::check_twef(&w, &inst, &int(1), &int(0))
                .unwrap()
                .verdict
        );
    }

    #[test]
    fn prop_six_allocation_in_whw_argmax() {
        let f = fixtures::mwhw_nonclean();
        let a = f.allocation.unwrap();
        for k in 0..=4 {
            let opt = exact_optimum(
                &f.instance,
                &Objective::Whw(ratio(k, 4)),
                &SearchBudget::default(),
            )
            .unwrap();
            assert!(opt.argmax.contains(&a), "x = {k}/4");
            assert!(opt.argmax.iter().all(|b| b.bundle(0).contains(0)));
        }
    }

    #[test]
    fn extended_harmonic_unique_clean_optimum() {
        let f = fixtures::extended_harmonic();
        let opt = exact_optimum(
            &f.instance,
            &Objective::HwExtended,
            &SearchBudget::default(),
        )
        .unwrap();
        let mut cleaned: Vec<_> = opt.argmax.iter().map(|a| clean(a, &f.instance)).collect();
        cleaned.dedup();
        assert_eq!(cleaned, vec![f.allocation.unwrap()]);
    }

    #[test]
    fn single_agent_utilitarian() {
        let f = fixtures::roundrobin_ef1();
        let solo = Instance::unweighted(vec![f.instance.valuation(1).clone()], 8).unwrap();
        let opt = exact_optimum(&solo, &Objective::Utilitarian, &SearchBudget::default()).unwrap();
        assert_eq!(opt.value.exact(), Some(&int(4)));
        assert!(opt
            .argmax
            .contains(&Allocation::new(vec![Bundle::full(8)]).unwrap()));
    }

    #[test]
    fn dp_matches_enumeration() {
        for seed in 0..20 {
            let class = InstanceClass::ALL[seed as usize % 4];
            let inst = generate(class, 3, 5, seed, &GenParams::default()).unwrap();
            let b = SearchBudget::default();
            let (value, alloc) = max_utilitarian(&inst, &b).unwrap();
            let opt = exact_optimum(&inst, &Objective::Utilitarian, &b).unwrap();
            assert_eq!(opt.value.exact(), Some(&value));
            assert_eq!(inst.utilities(&alloc).iter().sum::<Rational>(), value);
        }
    }
}
