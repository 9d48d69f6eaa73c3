use num::Signed;

use crate::instance::{Allocation, Instance};

/// True iff every owned good has strictly positive marginal loss for its owner.
pub fn is_clean(alloc: &Allocation, instance: &Instance) -> bool {
    alloc.bundles().iter().enumerate().all(|(i, bundle)| {
        let v = instance.valuation(i);
        bundle.iter().all(|g| v.loss(bundle, g).is_positive())
    })
}

/// Drops goods that do not contribute to their owner's utility, scanning in
/// ascending good order and restarting after each removal. Utilities are
/// unchanged and removed goods become unallocated.
pub fn clean(alloc: &Allocation, instance: &Instance) -> Allocation {
    let mut out = alloc.clone();
    for i in 0..alloc.n() {
        let v = instance.valuation(i);
        loop {
            let bundle = out.bundle(i);
            let found = bundle.iter().find(|&g| !v.loss(bundle, g).is_positive());
            match found {
                Some(g) => out.unassign(g),
                None => break,
            };
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::fixtures;

    #[test]
    fn prop_six_allocation_cleans_agent_one_only() {
        let f = fixtures::mwhw_nonclean();
        let a = f.allocation.unwrap();
        assert!(!is_clean(&a, &f.instance));
        let c = clean(&a, &f.instance);
        assert_eq!(c, Allocation::from_one_based(&[&[1], &[4, 5, 6]]).unwrap());
        assert!(is_clean(&c, &f.instance));
        for i in 0..2 {
            assert_eq!(f.instance.utility(&c, i), f.instance.utility(&a, i));
        }
    }

    #[test]
    fn example_one_agent_two_keeps_single_good() {
        let inst = fixtures::example1(6).instance;
        let a = Allocation::from_one_based(&[&[], &[1, 2, 3, 4, 5, 6]]).unwrap();
        let c = clean(&a, &inst);
        assert_eq!(c.bundle(1).len(), 1);
        assert_eq!(inst.utility(&c, 1), inst.utility(&a, 1));
        assert_eq!(clean(&c, &inst), c);
    }

    #[test]
    fn empty_allocation_is_clean() {
        let inst = fixtures::example1(6).instance;
        assert!(is_clean(&Allocation::empty(2), &inst));
    }

    #[test]
    fn example_one_redundant_pair() {
        let inst = fixtures::example1(6).instance;
        let a = Allocation::from_one_based(&[&[], &[2, 3]]).unwrap();
        assert!(!is_clean(&a, &inst));
    }
}
