use num::{One, Zero};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::instance::{Allocation, Instance};
use crate::rational::{self, check_unit, Rational};

/// Resolution of ties between agents and between goods.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TieBreak {
    /// Lowest agent index, then lowest good index.
    #[default]
    Lowest,
    /// Uniformly among the tied candidates, driven by the seed.
    Seeded(u64),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PickStep {
    pub turn: usize,
    #[serde(serialize_with = "super::one_based")]
    pub agent: usize,
    #[serde(serialize_with = "super::one_based")]
    pub good: usize,
    #[serde(with = "rational::string")]
    pub gain: Rational,
    /// `(t_i + 1 − x)/w_i` when the agent was chosen.
    #[serde(with = "rational::string")]
    pub ratio: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct PickTrace {
    pub steps: Vec<PickStep>,
}

impl PickTrace {
    pub fn agent_order(&self) -> Vec<usize> {
        self.steps.iter().map(|s| s.agent).collect()
    }
}

/// Picking sequence π_x: at each turn the agent with the smallest
/// `(t_i + 1 − x)/w_i` takes an available good of highest marginal gain, where
/// `t_i` counts its earlier picks. Agents keep picking even when every
/// remaining good is worth nothing to them.
pub fn picking_sequence(
    instance: &Instance,
    x: &Rational,
    tie_break: TieBreak,
) -> Result<(Allocation, PickTrace)> {
    check_unit("x", x)?;
    let (n, m) = (instance.n(), instance.m());
    let mut rng = match tie_break {
        TieBreak::Lowest => None,
        TieBreak::Seeded(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
    };
    let mut pick = |tied: Vec<usize>| match rng.as_mut() {
        None => tied[0],
        Some(r) => *tied.choose(r).expect("nonempty"),
    };
    let offset = Rational::one() - x;
    let mut alloc = Allocation::empty(n);
    let mut remaining: Vec<usize> = (0..m).collect();
    let mut trace = PickTrace::default();
    for turn in 0..m {
        let ratios: Vec<Rational> = (0..n)
            .map(|i| {
                let t = Rational::from_integer(alloc.bundle(i).len().into());
                (t + &offset) / instance.weight(i)
            })
            .collect();
        let least = ratios.iter().min().expect("at least one agent");
        let agent = pick((0..n).filter(|&i| ratios[i] == *least).collect());

        let v = instance.valuation(agent);
        let bundle = alloc.bundle(agent);
        let gains: Vec<Rational> = remaining.iter().map(|&g| v.gain(bundle, g)).collect();
        let best = gains.iter().max().cloned().unwrap_or_else(Rational::zero);
        let slot = pick((0..remaining.len()).filter(|&k| gains[k] == best).collect());
        let good = remaining.remove(slot);

        alloc.assign(good, agent);
        trace.steps.push(PickStep {
            turn,
            agent,
            good,
            gain: best,
            ratio: ratios[agent].clone(),
        });
    }
    Ok((alloc, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::fixtures;
    use crate::rational::{int, ratio};
    use crate::valuations::Valuation;

    #[test]
    fn equal_weights_is_round_robin() {
        let inst = Instance::unweighted(
            (0..3)
                .map(|_| Valuation::binary_from_goods(7, &[0, 2]))
                .collect(),
            7,
        )
        .unwrap();
        for x in [int(0), ratio(1, 2), int(1)] {
            let (_, trace) = picking_sequence(&inst, &x, TieBreak::Lowest).unwrap();
            assert_eq!(trace.agent_order(), vec![0, 1, 2, 0, 1, 2, 0]);
        }
    }

    #[test]
    fn round_robin_regression() {
        let f = fixtures::roundrobin_ef1();
        let (a, trace) = picking_sequence(&f.instance, &int(0), TieBreak::Lowest).unwrap();
        assert_eq!(a, f.allocation.unwrap());
        assert_eq!(trace.steps[0].good, 3);
        assert_eq!(trace.steps[1].good, 0);
    }

    #[test]
    fn weighted_schedule() {
        let inst = fixtures::example1(3).instance;
        let (a, trace) = picking_sequence(&inst, &int(0), TieBreak::Lowest).unwrap();
        assert_eq!(trace.agent_order(), vec![1, 0, 1]);
        assert_eq!(
            trace
                .steps
                .iter()
                .map(|s| s.ratio.clone())
                .collect::<Vec<_>>(),
            vec![ratio(1, 2), int(1), int(1)]
        );
        assert!(a.is_complete(3));
    }

    #[test]
    fn seeded_ties_are_reproducible() {
        let f = fixtures::roundrobin_ef1();
        let run = |s| picking_sequence(&f.instance, &ratio(1, 2), TieBreak::Seeded(s)).unwrap();
        assert_eq!(run(9), run(9));
        assert!(run(9).0.is_complete(8));
    }

    #[test]
    fn ratios_non_decreasing_per_agent() {
        let inst = fixtures::example1(9).instance;
        let (_, trace) = picking_sequence(&inst, &ratio(1, 4), TieBreak::Lowest).unwrap();
        for i in 0..2 {
            let r: Vec<_> = trace
                .steps
                .iter()
                .filter(|s| s.agent == i)
                .map(|s| &s.ratio)
                .collect();
            assert!(r.windows(2).all(|w| w[0] <= w[1]));
        }
    }
}
