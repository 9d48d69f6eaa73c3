use num::{One, Zero};

use super::exchange::augment;
use crate::error::Result;
use crate::instance::{Allocation, Instance};
use crate::rational::{check_unit, Rational};

/// Gain function `φ_x = w_i/(|A_i| + 1 − x)`, or `w_max + 1` when `x = 1` and
/// the bundle is empty.
pub fn phi(weight: &Rational, size: usize, x: &Rational, w_max: &Rational) -> Rational {
    if size == 0 && x.is_one() {
        return w_max + Rational::one();
    }
    weight / (Rational::from_integer(size.into()) + Rational::one() - x)
}

/// Clean allocation maximizing weighted harmonic welfare WHW_x, built from
/// the empty allocation: each round the agent with the largest `φ_x` (lowest
/// index on ties) among those that can still grow is extended by one
/// augmenting path.
pub fn mwhw_gain(instance: &Instance, x: &Rational) -> Result<Allocation> {
    check_unit("x", x)?;
    instance.require_matroid_rank()?;
    let n = instance.n();
    let w_max = instance
        .weights()
        .iter()
        .max()
        .cloned()
        .unwrap_or_else(Rational::zero);
    let mut alloc = Allocation::empty(n);
    loop {
        let mut order: Vec<(Rational, usize)> = (0..n)
            .map(|i| (phi(instance.weight(i), alloc.bundle(i).len(), x, &w_max), i))
            .collect();
        order.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
        let mut grew = false;
        for (_, i) in order {
            if augment(instance, &mut alloc, i)? {
                grew = true;
                break;
            }
        }
        if !grew {
            return Ok(alloc);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fairness::{check_twef, welfare, Objective};
    use crate::instance::fixtures;
    use crate::oracle::{exact_optimum, SearchBudget};
    use crate::rational::{int, ratio};
    use crate::valuations::is_clean;

    #[test]
    fn phi_values_and_monotonicity() {
        assert_eq!(phi(&int(2), 3, &int(0), &int(2)), ratio(1, 2));
        assert_eq!(phi(&int(2), 0, &int(1), &int(3)), int(4));
        assert_eq!(phi(&int(2), 1, &int(1), &int(3)), int(2));
        for k in 0..=4 {
            let x = ratio(k, 4);
            for w in [ratio(1, 3), int(1), int(4)] {
                let seq: Vec<_> = (0..=10).map(|s| phi(&w, s, &x, &int(4))).collect();
                assert!(seq.windows(2).all(|p| p[0] > p[1]), "x = {x}, w = {w}");
            }
        }
    }

    #[test]
    fn prop_six_gives_g1_to_agent_one() {
        let f = fixtures::mwhw_nonclean();
        for k in 0..=4 {
            let x = ratio(k, 4);
            let a = mwhw_gain(&f.instance, &x).unwrap();
            assert!(a.bundle(0).contains(0), "x = {x}: {a}");
            assert!(is_clean(&a, &f.instance));
            assert!(
                check_twef(&a, &f.instance, &x, &(int(1) - &x))
                    .unwrap()
                    .verdict
            );
            let obj = Objective::Whw(x);
            let opt = exact_optimum(&f.instance, &obj, &SearchBudget::default()).unwrap();
            assert!(welfare(&a, &f.instance, &obj).unwrap().ties(&opt.value));
        }
    }
}
