use std::collections::BTreeMap;
use std::path::Path;

use num::Zero;
use serde::{Deserialize, Serialize};

use super::{Allocation, Instance};
use crate::bundle::Bundle;
use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use crate::valuations::{Valuation, TABLE_MAX_GOODS};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDoc {
    agents: Vec<AgentDoc>,
    goods: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AgentDoc {
    #[serde(with = "rational::string")]
    weight: Rational,
    valuation: ValuationDoc,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct Q(#[serde(with = "rational::string")] Rational);

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
enum ValuationDoc {
    ExplicitTable {
        table: BTreeMap<String, Q>,
    },
    Additive {
        #[serde(with = "rational::string_vec")]
        values: Vec<Rational>,
    },
    BinaryAdditive {
        #[serde(with = "rational::string_vec")]
        values: Vec<Rational>,
    },
    MatroidRankTable {
        table: BTreeMap<String, Q>,
    },
    PartitionMatroid {
        categories: Vec<Vec<usize>>,
        caps: Vec<u64>,
    },
    TruncatedAdditive {
        #[serde(with = "rational::string_vec")]
        values: Vec<Rational>,
        #[serde(with = "rational::string")]
        cap: Rational,
    },
}

/// Key of a bundle in table payloads: sorted 1-based indices, e.g. `"1,3,5"`.
fn bundle_key(b: &Bundle) -> String {
    b.iter()
        .map(|g| (g + 1).to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn parse_key(key: &str, m: usize) -> Result<u64> {
    let mut mask = 0u64;
    for part in key.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let g: usize = part
            .parse()
            .map_err(|_| Error::MalformedValuation(format!("bad bundle key {key:?}")))?;
        if g == 0 || g > m {
            return Err(Error::UnknownGood(g));
        }
        mask |= 1 << (g - 1);
    }
    Ok(mask)
}

fn one_based(goods: &[usize]) -> Result<Bundle> {
    if goods.contains(&0) {
        return Err(Error::MalformedValuation("good indices start at 1".into()));
    }
    Ok(goods.iter().map(|g| g - 1).collect())
}

fn table_values(table: BTreeMap<String, Q>, m: usize) -> Result<Vec<Rational>> {
    if m > TABLE_MAX_GOODS {
        return Err(Error::TableTooLarge {
            m,
            max: TABLE_MAX_GOODS,
        });
    }
    let mut values: Vec<Option<Rational>> = vec![None; 1 << m];
    values[0] = Some(Rational::zero());
    for (key, Q(q)) in table {
        values[parse_key(&key, m)? as usize] = Some(q);
    }
    values
        .into_iter()
        .enumerate()
        .map(|(mask, v)| {
            v.ok_or_else(|| {
                Error::MalformedValuation(format!(
                    "table has no entry for bundle {:?}",
                    bundle_key(&Bundle::from_mask(mask as u64))
                ))
            })
        })
        .collect()
}

fn table_doc(values: &[Rational]) -> BTreeMap<String, Q> {
    values
        .iter()
        .enumerate()
        .map(|(mask, q)| (bundle_key(&Bundle::from_mask(mask as u64)), Q(q.clone())))
        .collect()
}

impl ValuationDoc {
    fn into_valuation(self, m: usize) -> Result<Valuation> {
        Ok(match self {
            ValuationDoc::ExplicitTable { table } => {
                Valuation::table_unchecked(m, table_values(table, m)?)?
            }
            ValuationDoc::MatroidRankTable { table } => {
                match Valuation::table_unchecked(m, table_values(table, m)?)? {
                    Valuation::ExplicitTable(t) => Valuation::MatroidRankTable(t),
                    _ => unreachable!(),
                }
            }
            ValuationDoc::Additive { values } => Valuation::additive(values)?,
            ValuationDoc::BinaryAdditive { values } => Valuation::binary_additive(values)?,
            ValuationDoc::PartitionMatroid { categories, caps } => Valuation::partition_matroid(
                categories
                    .iter()
                    .map(|c| one_based(c))
                    .collect::<Result<_>>()?,
                caps,
            )?,
            ValuationDoc::TruncatedAdditive { values, cap } => {
                Valuation::truncated_additive(values, cap)?
            }
        })
    }

    fn from_valuation(v: &Valuation) -> Self {
        match v {
            Valuation::ExplicitTable(t) => ValuationDoc::ExplicitTable {
                table: table_doc(t.values()),
            },
            Valuation::MatroidRankTable(t) => ValuationDoc::MatroidRankTable {
                table: table_doc(t.values()),
            },
            Valuation::Additive(values) => ValuationDoc::Additive {
                values: values.clone(),
            },
            Valuation::BinaryAdditive(values) => ValuationDoc::BinaryAdditive {
                values: values.clone(),
            },
            Valuation::PartitionMatroid { categories, caps } => ValuationDoc::PartitionMatroid {
                categories: categories
                    .iter()
                    .map(|c| c.iter().map(|g| g + 1).collect())
                    .collect(),
                caps: caps.clone(),
            },
            Valuation::TruncatedAdditive { values, cap } => ValuationDoc::TruncatedAdditive {
                values: values.clone(),
                cap: cap.clone(),
            },
        }
    }
}

impl TryFrom<InstanceDoc> for Instance {
    type Error = Error;

    fn try_from(doc: InstanceDoc) -> Result<Self> {
        let m = doc.goods;
        let mut weights = Vec::with_capacity(doc.agents.len());
        let mut valuations = Vec::with_capacity(doc.agents.len());
        for agent in doc.agents {
            weights.push(agent.weight);
            valuations.push(agent.valuation.into_valuation(m)?);
        }
        Instance::new(weights, valuations, m)
    }
}

impl From<Instance> for InstanceDoc {
    fn from(inst: Instance) -> Self {
        InstanceDoc {
            agents: inst
                .weights
                .iter()
                .zip(&inst.valuations)
                .map(|(w, v)| AgentDoc {
                    weight: w.clone(),
                    valuation: ValuationDoc::from_valuation(v),
                })
                .collect(),
            goods: inst.goods,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AllocationDoc {
    bundles: Vec<Vec<usize>>,
}

impl TryFrom<AllocationDoc> for Allocation {
    type Error = Error;

    fn try_from(doc: AllocationDoc) -> Result<Self> {
        let refs: Vec<&[usize]> = doc.bundles.iter().map(Vec::as_slice).collect();
        Allocation::from_one_based(&refs)
    }
}

impl From<Allocation> for AllocationDoc {
    fn from(a: Allocation) -> Self {
        AllocationDoc {
            bundles: a
                .bundles
                .iter()
                .map(|b| b.iter().map(|g| g + 1).collect())
                .collect(),
        }
    }
}

/// Parses and validates an instance from JSON text.
pub fn load(text: &str) -> Result<Instance> {
    let doc: InstanceDoc = serde_json::from_str(text)?;
    Instance::try_from(doc)
}

pub fn load_path(path: impl AsRef<Path>) -> Result<Instance> {
    load(&std::fs::read_to_string(path)?)
}

pub fn save(inst: &Instance) -> String {
    serde_json::to_string_pretty(&InstanceDoc::from(inst.clone())).expect("instance serializes")
}

pub fn save_allocation(a: &Allocation) -> String {
    serde_json::to_string(&AllocationDoc::from(a.clone())).expect("allocation serializes")
}
