//! Allocation rules: picking sequences, the transfer algorithm and harmonic
//! welfare maximization by gain-driven augmentation.

mod exchange;
mod mwhw;
mod picking;
mod transfer;

pub use exchange::max_clean_utilitarian;
pub use mwhw::{mwhw_gain, phi};
pub use picking::{picking_sequence, PickStep, PickTrace, TieBreak};
pub use transfer::{potential, transfer_algorithm, TransferStep, TransferTrace};

use std::fmt;
use std::str::FromStr;

use crate::error::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rule {
    Pick,
    Transfer,
    Mwhw,
}

impl Rule {
    pub const ALL: [Rule; 3] = [Rule::Pick, Rule::Transfer, Rule::Mwhw];

    pub fn name(self) -> &'static str {
        match self {
            Rule::Pick => "pick",
            Rule::Transfer => "transfer",
            Rule::Mwhw => "mwhw",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Rule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Rule::ALL
            .into_iter()
            .find(|r| r.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Precondition(format!("unknown rule {s:?}")))
    }
}

fn one_based<S: serde::Serializer>(v: &usize, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_u64(*v as u64 + 1)
}
