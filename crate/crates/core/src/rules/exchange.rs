//! Augmenting paths in the exchange graph of a clean allocation under
//! matroid-rank valuations.
//!
//! Nodes are goods. There is an edge `g → g'` when the owner `j` of `g` can
//! trade `g` for `g'` and keep `v_j(A_j) = |A_j|`. An agent `i` grows along a
//! shortest path that starts at a good with `Δ_i(A_i, g) = 1` and ends at an
//! unallocated good: `i` takes the first good and every owner on the path
//! takes the next one.

use std::collections::VecDeque;

use num::Signed;

use crate::error::{Error, Result};
use crate::instance::{Allocation, Instance};
use crate::rational::Rational;

fn size_value(len: usize) -> Rational {
    Rational::from_integer(len.into())
}

/// Shortest augmenting path for agent `i`, if any.
pub(crate) fn find_path(instance: &Instance, alloc: &Allocation, i: usize) -> Option<Vec<usize>> {
    let m = instance.m();
    let owners: Vec<Option<usize>> = (0..m).map(|g| alloc.owner(g)).collect();
    let vi = instance.valuation(i);
    let ai = alloc.bundle(i);
    let mut prev: Vec<Option<Option<usize>>> = vec![None; m];
    let mut queue = VecDeque::new();
    let path_to = |prev: &[Option<Option<usize>>], mut g: usize| {
        let mut path = vec![g];
        while let Some(Some(p)) = prev[g] {
            path.push(p);
            g = p;
        }
        path.reverse();
        path
    };

    for g in 0..m {
        if !ai.contains(g) && vi.gain(ai, g).is_positive() {
            prev[g] = Some(None);
            if owners[g].is_none() {
                return Some(vec![g]);
            }
            queue.push_back(g);
        }
    }
    while let Some(g) = queue.pop_front() {
        let j = owners[g].expect("only owned goods are expanded");
        let aj = alloc.bundle(j);
        let keep = size_value(aj.len());
        let base = aj.without(g);
        let vj = instance.valuation(j);
        for h in 0..m {
            if prev[h].is_some() || owners[h] == Some(j) {
                continue;
            }
            if vj.value(&base.with(h)) == keep {
                prev[h] = Some(Some(g));
                if owners[h].is_none() {
                    return Some(path_to(&prev, h));
                }
                queue.push_back(h);
            }
        }
    }
    None
}

/// Grows agent `i` by one good if possible, keeping every other bundle size.
/// `alloc` must be clean. Returns whether an augmentation was applied.
pub(crate) fn augment(instance: &Instance, alloc: &mut Allocation, i: usize) -> Result<bool> {
    let Some(path) = find_path(instance, alloc, i) else {
        return Ok(false);
    };
    let before = alloc.sizes();
    let mut next = alloc.clone();
    let mut receiver = i;
    for &g in &path {
        let owner = alloc.owner(g);
        next.assign(g, receiver);
        if let Some(o) = owner {
            receiver = o;
        }
    }
    let after = next.sizes();
    for k in 0..instance.n() {
        let expected = before[k] + usize::from(k == i);
        if after[k] != expected || instance.value(k, next.bundle(k)) != size_value(after[k]) {
            return Err(Error::Augmentation(format!(
                "path {path:?} for agent {} leaves agent {} with bundle {} (expected size {expected})",
                i + 1,
                k + 1,
                next.bundle(k)
            )));
        }
    }
    *alloc = next;
    Ok(true)
}

/// Clean allocation of maximum unweighted utilitarian welfare, grown from the
/// empty allocation in rounds (each agent grows at most once per round) until
/// no agent has an augmenting path.
pub fn max_clean_utilitarian(instance: &Instance) -> Result<Allocation> {
    instance.require_matroid_rank()?;
    let mut alloc = Allocation::empty(instance.n());
    loop {
        let mut grew = false;
        for i in 0..instance.n() {
            grew |= augment(instance, &mut alloc, i)?;
        }
        if !grew {
            return Ok(alloc);
        }
    }
}
