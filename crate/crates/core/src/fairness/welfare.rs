use std::borrow::Cow;
use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use num::{Integer, One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use super::harmonic::{
    extended_harmonic, modified_harmonic, modified_harmonic_table, HarmonicEstimate, ModHarmonic,
};
use super::DEFAULT_HARMONIC_TOL;
use crate::error::{Error, Result};
use crate::instance::{Allocation, Instance};
use crate::rational::{check_unit, is_integer, to_f64, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Objective {
    Utilitarian,
    /// Weighted Nash welfare with the positive-agent-count rule.
    Wnw,
    /// Weighted harmonic welfare `Σ w_i·H_{v_i(A_i),x}`.
    Whw(Rational),
    /// `Σ H_{v_i(A_i)}` for integer additive valuations.
    Hw,
    /// `Σ H_{v_i(A_i)}` with real-argument harmonic numbers.
    HwExtended,
}

impl Objective {
    pub const NAMES: [&'static str; 5] = ["utilitarian", "WNW", "WHW", "HW", "HW-extended"];

    /// Parses a name from [`Objective::NAMES`]; `WHW` needs `x`.
    pub fn parse(name: &str, x: Option<Rational>) -> Result<Self> {
        let lower = name.to_ascii_lowercase();
        match lower.as_str() {
            "utilitarian" => Ok(Objective::Utilitarian),
            "wnw" => Ok(Objective::Wnw),
            "whw" => {
                let x = x.ok_or_else(|| Error::Precondition("WHW needs a value of x".into()))?;
                check_unit("x", &x)?;
                Ok(Objective::Whw(x))
            }
            "hw" => Ok(Objective::Hw),
            "hw-extended" => Ok(Objective::HwExtended),
            _ => Err(Error::Precondition(format!("unknown objective {name:?}"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Objective::Utilitarian => "utilitarian",
            Objective::Wnw => "WNW",
            Objective::Whw(_) => "WHW",
            Objective::Hw => "HW",
            Objective::HwExtended => "HW-extended",
        }
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Objective::Whw(x) => write!(f, "WHW_{x}"),
            other => f.write_str(other.name()),
        }
    }
}

/// Nash welfare restricted to agents with positive utility.
#[derive(Debug, Clone)]
pub struct NashValue {
    pub positive: usize,
    /// `Σ w_i·ln v_i` over positive agents, for display and fast comparison.
    pub log_sum: f64,
    /// `(w_i, v_i)` for positive agents.
    factors: Vec<(Rational, Rational)>,
}

impl NashValue {
    fn cmp_exact(&self, other: &NashValue) -> Ordering {
        self.positive.cmp(&other.positive).then_with(|| {
            let scale = 1.0 + self.log_sum.abs().max(other.log_sum.abs());
            if (self.log_sum - other.log_sum).abs() > 1e-9 * scale {
                return self.log_sum.total_cmp(&other.log_sum);
            }
            // ∏ v^w compared as ∏ v^{D·w} with D the lcm of weight denominators
            let d = self
                .factors
                .iter()
                .chain(&other.factors)
                .fold(num::BigInt::one(), |acc, (w, _)| acc.lcm(w.denom()));
            let power = |factors: &[(Rational, Rational)]| {
                factors.iter().fold(Rational::one(), |acc, (w, v)| {
                    let e = (w * Rational::from_integer(d.clone()))
                        .to_integer()
                        .to_i32()
                        .expect("weight exponent fits in i32");
                    acc * v.pow(e)
                })
            };
            power(&self.factors).cmp(&power(&other.factors))
        })
    }
}

#[derive(Debug, Clone)]
pub enum WelfareValue {
    /// Utilitarian, WHW_x with `x < 1`, and HW.
    Exact(Rational),
    /// `(|N⁺|, score)` compared lexicographically; used for WHW_1.
    Lexicographic {
        positive: usize,
        score: Rational,
    },
    Nash(NashValue),
    /// HW-extended: a sum of quadrature estimates.
    Approx(HarmonicEstimate),
}

impl WelfareValue {
    /// True when the two values cannot be told apart: equal for the exact
    /// kinds, overlapping error bars for [`WelfareValue::Approx`].
    pub fn ties(&self, other: &WelfareValue) -> bool {
        match (self, other) {
            (WelfareValue::Approx(a), WelfareValue::Approx(b)) => {
                (a.value - b.value).abs() <= a.error + b.error
            }
            _ => self.partial_cmp(other) == Some(Ordering::Equal),
        }
    }

    /// Strictly better and not tied.
    pub fn beats(&self, other: &WelfareValue) -> bool {
        !self.ties(other) && self.partial_cmp(other) == Some(Ordering::Greater)
    }

    pub fn approx(&self) -> f64 {
        match self {
            WelfareValue::Exact(q) => to_f64(q),
            WelfareValue::Lexicographic { score, .. } => to_f64(score),
            WelfareValue::Nash(n) => n.log_sum,
            WelfareValue::Approx(e) => e.value,
        }
    }

    pub fn exact(&self) -> Option<&Rational> {
        match self {
            WelfareValue::Exact(q) => Some(q),
            _ => None,
        }
    }
}

impl PartialEq for WelfareValue {
    fn eq(&self, other: &Self) -> bool {
        self.partial_cmp(other) == Some(Ordering::Equal)
    }
}

impl PartialOrd for WelfareValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (WelfareValue::Exact(a), WelfareValue::Exact(b)) => Some(a.cmp(b)),
            (
                WelfareValue::Lexicographic {
                    positive: pa,
                    score: sa,
                },
                WelfareValue::Lexicographic {
                    positive: pb,
                    score: sb,
                },
            ) => Some(pa.cmp(pb).then_with(|| sa.cmp(sb))),
            (WelfareValue::Nash(a), WelfareValue::Nash(b)) => Some(a.cmp_exact(b)),
            (WelfareValue::Approx(a), WelfareValue::Approx(b)) => a.value.partial_cmp(&b.value),
            _ => None,
        }
    }
}

impl fmt::Display for WelfareValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WelfareValue::Exact(q) => write!(f, "{q}"),
            WelfareValue::Lexicographic { positive, score } => write!(f, "({positive}, {score})"),
            WelfareValue::Nash(n) => write!(f, "({}, {:.12})", n.positive, n.log_sum),
            WelfareValue::Approx(e) => write!(f, "{:.12}", e.value),
        }
    }
}

impl Serialize for WelfareValue {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Doc {
            value: String,
            approx: f64,
            #[serde(skip_serializing_if = "Option::is_none")]
            positive: Option<usize>,
            #[serde(skip_serializing_if = "Option::is_none")]
            error: Option<f64>,
        }
        let (value, positive, error) = match self {
            WelfareValue::Exact(q) => (q.to_string(), None, None),
            WelfareValue::Lexicographic { positive, score } => {
                (score.to_string(), Some(*positive), None)
            }
            WelfareValue::Nash(n) => (format!("{:.12}", n.log_sum), Some(n.positive), None),
            WelfareValue::Approx(e) => (format!("{:.12}", e.value), None, Some(e.error)),
        };
        Doc {
            value,
            approx: self.approx(),
            positive,
            error,
        }
        .serialize(s)
    }
}

/// Evaluates one objective on utility vectors of one instance.
pub struct WelfareEvaluator<'a> {
    instance: &'a Instance,
    objective: Objective,
    tol: f64,
    cache: HashMap<Rational, HarmonicEstimate>,
    /// `w_i·H_{k,x}` (or `H_k` for HW) for small `k`, per agent.
    terms: Vec<Vec<ModHarmonic>>,
    /// `terms` in floating point, `None` for `-∞`.
    approx_terms: Vec<Vec<Option<f64>>>,
}

/// Utilities up to this value get precomputed harmonic terms.
const TERM_TABLE_LEN: u64 = 64;

impl<'a> WelfareEvaluator<'a> {
    /// Checks the objective's preconditions on `instance`.
    pub fn new(instance: &'a Instance, objective: Objective) -> Result<Self> {
        match &objective {
            Objective::Whw(x) => check_unit("x", x)?,
            Objective::Hw | Objective::HwExtended => {
                for (i, v) in instance.valuations().iter().enumerate() {
                    let values = v.additive_values().ok_or_else(|| {
                        Error::Precondition(format!(
                            "{} needs additive valuations; agent {} is {}",
                            objective.name(),
                            i + 1,
                            v.kind()
                        ))
                    })?;
                    if objective == Objective::Hw && !values.iter().all(is_integer) {
                        return Err(Error::Precondition(format!(
                            "HW needs integer per-good values; agent {} has fractions",
                            i + 1
                        )));
                    }
                }
            }
            Objective::Utilitarian | Objective::Wnw => {}
        }
        // one entry per reachable utility, capped
        let len = instance
            .valuations()
            .iter()
            .map(|v| {
                v.value(&instance.all_goods())
                    .ceil()
                    .to_integer()
                    .to_u64()
                    .unwrap_or(u64::MAX)
            })
            .max()
            .unwrap_or(0)
            .saturating_add(1)
            .min(TERM_TABLE_LEN);
        let terms = match &objective {
            Objective::Whw(x) => {
                let row = modified_harmonic_table(len, x)?;
                instance
                    .weights()
                    .iter()
                    .map(|w| row.iter().map(|h| scale(w, h.clone())).collect())
                    .collect()
            }
            Objective::Hw => vec![modified_harmonic_table(len, &Rational::zero())?; instance.n()],
            _ => Vec::new(),
        };
        let approx_terms = terms
            .iter()
            .map(|row| {
                row.iter()
                    .map(|t| match t {
                        ModHarmonic::Finite(q) => Some(to_f64(q)),
                        ModHarmonic::NegInfinity => None,
                    })
                    .collect()
            })
            .collect();
        Ok(Self {
            instance,
            objective,
            tol: DEFAULT_HARMONIC_TOL,
            cache: HashMap::new(),
            terms,
            approx_terms,
        })
    }

    pub fn objective(&self) -> &Objective {
        &self.objective
    }

    /// Precomputes extended harmonic numbers for the given utilities.
    pub fn prepare<'b>(&mut self, utilities: impl IntoIterator<Item = &'b Rational>) -> Result<()> {
        if self.objective != Objective::HwExtended {
            return Ok(());
        }
        for u in utilities {
            if !self.cache.contains_key(u) {
                let e = extended_harmonic(u, self.tol)?;
                self.cache.insert(u.clone(), e);
            }
        }
        Ok(())
    }

    pub fn eval_allocation(&self, alloc: &Allocation) -> Result<WelfareValue> {
        self.instance.check_allocation(alloc)?;
        self.eval(&self.instance.utilities(alloc))
    }

    /// Floating-point key `(positive, score)` that orders like [`eval`] up to
    /// rounding, for objectives with exact values. `None` when unavailable.
    ///
    /// [`eval`]: WelfareEvaluator::eval
    pub fn estimate(&self, utilities: &[Rational]) -> Option<(usize, f64)> {
        match &self.objective {
            Objective::Utilitarian => Some((0, utilities.iter().map(to_f64).sum())),
            Objective::Whw(_) | Objective::Hw => {
                let lexicographic = matches!(&self.objective, Objective::Whw(x) if x.is_one());
                let mut positive = 0;
                let mut score = 0.0;
                for (row, v) in self.approx_terms.iter().zip(utilities) {
                    if !v.is_integer() || v.is_negative() {
                        return None;
                    }
                    let k = v.to_integer().to_usize()?;
                    if let Some(t) = row.get(k)? {
                        positive += usize::from(k > 0);
                        score += t;
                    }
                }
                Some((if lexicographic { positive } else { 0 }, score))
            }
            Objective::Wnw | Objective::HwExtended => None,
        }
    }

    pub fn eval(&self, utilities: &[Rational]) -> Result<WelfareValue> {
        let weights = self.instance.weights();
        Ok(match &self.objective {
            Objective::Utilitarian => WelfareValue::Exact(utilities.iter().sum()),
            Objective::Wnw => {
                let mut positive = 0;
                let mut log_sum = 0.0;
                let mut factors = Vec::new();
                for (w, v) in weights.iter().zip(utilities) {
                    if v.is_positive() {
                        positive += 1;
                        log_sum += to_f64(w) * ln(v);
                        factors.push((w.clone(), v.clone()));
                    }
                }
                WelfareValue::Nash(NashValue {
                    positive,
                    log_sum,
                    factors,
                })
            }
            Objective::Whw(x) => {
                let mut positive = 0;
                let mut score = Rational::zero();
                for (i, (w, v)) in weights.iter().zip(utilities).enumerate() {
                    let k = whole(v, "WHW")?;
                    let term = match self.terms[i].get(k as usize) {
                        Some(t) => Cow::Borrowed(t),
                        None => Cow::Owned(scale(w, modified_harmonic(k, x)?)),
                    };
                    if let ModHarmonic::Finite(t) = term.as_ref() {
                        positive += usize::from(k > 0);
                        score += t;
                    }
                }
                if x.is_one() {
                    WelfareValue::Lexicographic { positive, score }
                } else {
                    WelfareValue::Exact(score)
                }
            }
            Objective::Hw => {
                let mut score = Rational::zero();
                for (i, v) in utilities.iter().enumerate() {
                    let k = whole(v, "HW")?;
                    match self.terms[i].get(k as usize) {
                        Some(ModHarmonic::Finite(h)) => score += h,
                        _ => score += super::harmonic(k),
                    }
                }
                WelfareValue::Exact(score)
            }
            Objective::HwExtended => {
                let mut total = HarmonicEstimate {
                    value: 0.0,
                    error: 0.0,
                };
                for v in utilities {
                    let e = match self.cache.get(v) {
                        Some(e) => *e,
                        None => extended_harmonic(v, self.tol)?,
                    };
                    total.value += e.value;
                    total.error += e.error;
                }
                WelfareValue::Approx(total)
            }
        })
    }
}

/// `ln q` for positive `q`, accurate even when numerator and denominator
/// overflow `f64`.
fn ln(q: &Rational) -> f64 {
    let big_ln = |n: &num::BigInt| {
        let bits = n.bits();
        if bits < 1000 {
            n.to_f64().expect("fits").ln()
        } else {
            let shift = bits - 64;
            (n >> shift).to_f64().expect("fits").ln() + shift as f64 * std::f64::consts::LN_2
        }
    };
    big_ln(q.numer()) - big_ln(q.denom())
}

fn scale(w: &Rational, h: ModHarmonic) -> ModHarmonic {
    match h {
        ModHarmonic::Finite(q) => ModHarmonic::Finite(w * q),
        ModHarmonic::NegInfinity => ModHarmonic::NegInfinity,
    }
}

fn whole(v: &Rational, objective: &str) -> Result<u64> {
    if v.is_integer() && !v.is_negative() {
        if let Some(k) = v.to_integer().to_u64() {
            return Ok(k);
        }
    }
    Err(Error::Precondition(format!(
        "{objective} needs non-negative integer utilities, got {v}"
    )))
}

/// Welfare of `alloc` under `objective`.
pub fn welfare(
    alloc: &Allocation,
    instance: &Instance,
    objective: &Objective,
) -> Result<WelfareValue> {
    WelfareEvaluator::new(instance, objective.clone())?.eval_allocation(alloc)
}
