use num::{One, Signed};
use serde::Serialize;

use super::exchange::max_clean_utilitarian;
use crate::error::{Error, Result};
use crate::fairness::check_twef;
use crate::instance::{Allocation, Instance};
use crate::rational::{self, check_unit, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TransferStep {
    #[serde(serialize_with = "super::one_based")]
    pub from: usize,
    #[serde(serialize_with = "super::one_based")]
    pub to: usize,
    #[serde(serialize_with = "super::one_based")]
    pub good: usize,
    #[serde(with = "rational::string")]
    pub phi_before: Rational,
    #[serde(with = "rational::string")]
    pub phi_after: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TransferTrace {
    pub start: Allocation,
    pub steps: Vec<TransferStep>,
}

/// `Φ(A) = Σ_i (v_i(A_i)² + (1 − 2x)·v_i(A_i))/w_i`.
pub fn potential(alloc: &Allocation, instance: &Instance, x: &Rational) -> Rational {
    let lin = Rational::one() - x - x;
    (0..instance.n())
        .map(|i| {
            let v = instance.utility(alloc, i);
            (&v * &v + &lin * &v) / instance.weight(i)
        })
        .sum()
}

/// Starts from a clean utilitarian-optimal allocation and, while some ordered
/// pair `(i, j)` violates TWEF(x, 1 − x), moves the lowest-index good of `A_j`
/// with `Δ_i(A_i, g) = 1` to agent `i`. Pairs are scanned lexicographically
/// and the scan restarts after every move.
pub fn transfer_algorithm(
    instance: &Instance,
    x: &Rational,
) -> Result<(Allocation, TransferTrace)> {
    check_unit("x", x)?;
    instance.require_matroid_rank()?;
    let y = Rational::one() - x;
    let mut alloc = max_clean_utilitarian(instance)?;
    let mut trace = TransferTrace {
        start: alloc.clone(),
        steps: Vec::new(),
    };
    let (n, m) = (instance.n(), instance.m());
    let cap = m * m * n;
    loop {
        let report = check_twef(&alloc, instance, x, &y)?;
        let Some(v) = report.violations.first() else {
            return Ok((alloc, trace));
        };
        if trace.steps.len() >= cap {
            return Err(Error::Augmentation(format!(
                "transfer algorithm exceeded {cap} transfers"
            )));
        }
        let (i, j) = (v.i, v.j);
        let vi = instance.valuation(i);
        let good = alloc
            .bundle(j)
            .iter()
            .find(|&g| vi.gain(alloc.bundle(i), g).is_positive())
            .ok_or_else(|| {
                Error::Augmentation(format!(
                    "agent {} envies agent {} but gains nothing from any single good",
                    i + 1,
                    j + 1
                ))
            })?;
        let phi_before = potential(&alloc, instance, x);
        alloc.assign(good, i);
        let phi_after = potential(&alloc, instance, x);
        trace.steps.push(TransferStep {
            from: j,
            to: i,
            good,
            phi_before,
            phi_after,
        });
    }
}
