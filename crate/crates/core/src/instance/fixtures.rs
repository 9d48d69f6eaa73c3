//! Small hand-built instances with known fairness behaviour.

use num::One;

use super::{Allocation, Instance};
use crate::bundle::Bundle;
use crate::error::{Error, Result};
use crate::rational::{int, ratio, Rational};
use crate::valuations::Valuation;

pub const NAMES: [&str; 4] = [
    "example1",
    "mwhw-nonclean",
    "roundrobin-ef1",
    "extended-harmonic",
];

#[derive(Debug, Clone)]
pub struct Fixture {
    pub instance: Instance,
    /// Distinguished allocation that comes with the instance, if any.
    pub allocation: Option<Allocation>,
}

pub fn fixture(name: &str) -> Result<Fixture> {
    match name {
        "example1" => Ok(example1(6)),
        "mwhw-nonclean" => Ok(mwhw_nonclean()),
        "roundrobin-ef1" => Ok(roundrobin_ef1()),
        "extended-harmonic" => Ok(extended_harmonic()),
        other => Err(Error::UnknownFixture(other.to_string())),
    }
}

/// Weights (1, 2). Agent 1 values every good at 1; agent 2 values any
/// nonempty bundle at 1. No complete allocation is WEF(1, 0).
pub fn example1(m: usize) -> Fixture {
    let ones = vec![Rational::one(); m];
    let instance = Instance::new(
        vec![int(1), int(2)],
        vec![
            Valuation::binary_additive(ones.clone()).unwrap(),
            Valuation::truncated_additive(ones, int(1)).unwrap(),
        ],
        m,
    )
    .unwrap();
    Fixture {
        instance,
        allocation: None,
    }
}

/// Weights (1, 2), six goods. Agent 1 only values g1. Agent 2 has
/// `min(3, |S|)` without g1 and `min(4, |S|)` with it. The non-clean
/// allocation ({g1,g2,g3}, {g4,g5,g6}) maximizes weighted harmonic welfare
/// for every x yet is not TWEF(x, 1−x).
pub fn mwhw_nonclean() -> Fixture {
    let m = 6;
    let agent2 = Valuation::matroid_table_from_fn(m, |s: &Bundle| {
        let cap = if s.contains(0) { 4 } else { 3 };
        int(s.len().min(cap) as i64)
    })
    .unwrap();
    let instance = Instance::new(
        vec![int(1), int(2)],
        vec![Valuation::binary_from_goods(m, &[0]), agent2],
        m,
    )
    .unwrap();
    Fixture {
        instance,
        allocation: Some(Allocation::from_one_based(&[&[1, 2, 3], &[4, 5, 6]]).unwrap()),
    }
}

/// Equal weights, eight goods. Agent 1 likes g4 and g8; agent 2 is the
/// partition matroid {g4} {g8} {g1,g2,g3} {g5,g6,g7} with unit caps.
/// Round-robin with lexicographic ties yields ({g2,g4,g6,g8}, {g1,g3,g5,g7}),
/// which is MEF1 but not EF1.
pub fn roundrobin_ef1() -> Fixture {
    let m = 8;
    let cats: Vec<Bundle> = [&[4][..], &[8], &[1, 2, 3], &[5, 6, 7]]
        .iter()
        .map(|c| c.iter().map(|g| g - 1).collect())
        .collect();
    let instance = Instance::unweighted(
        vec![
            Valuation::binary_from_goods(m, &[3, 7]),
            Valuation::partition_matroid(cats, vec![1, 1, 1, 1]).unwrap(),
        ],
        m,
    )
    .unwrap();
    Fixture {
        instance,
        allocation: Some(Allocation::from_one_based(&[&[2, 4, 6, 8], &[1, 3, 5, 7]]).unwrap()),
    }
}

/// Equal weights, additive: v1 = (0, 4, 4), v2 = (19/10, 2, 2). Maximizing the
/// integral-extended harmonic welfare forces ({g2,g3}, {g1}), which is not EF1.
pub fn extended_harmonic() -> Fixture {
    let instance = Instance::unweighted(
        vec![
            Valuation::additive(vec![int(0), int(4), int(4)]).unwrap(),
            Valuation::additive(vec![ratio(19, 10), int(2), int(2)]).unwrap(),
        ],
        3,
    )
    .unwrap();
    Fixture {
        instance,
        allocation: Some(Allocation::from_one_based(&[&[2, 3], &[1]]).unwrap()),
    }
}
