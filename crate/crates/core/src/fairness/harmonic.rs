use num::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::rational::{check_unit, Rational};

pub const DEFAULT_HARMONIC_TOL: f64 = 1e-9;

/// Exponent cap on `z = p/q` for the quadrature; beyond it the polynomial
/// form of the integrand gets too long to evaluate cheaply.
const MAX_DEGREE: u64 = 1 << 20;

/// `H_k = 1 + 1/2 + … + 1/k`.
pub fn harmonic(k: u64) -> Rational {
    (1..=k).fold(Rational::zero(), |acc, j| {
        acc + Rational::new(1.into(), j.into())
    })
}

/// `H_{k,x}`, where `H_{0,1}` is a bottom element below every rational.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum ModHarmonic {
    NegInfinity,
    Finite(Rational),
}

impl ModHarmonic {
    pub fn finite(&self) -> Option<&Rational> {
        match self {
            ModHarmonic::NegInfinity => None,
            ModHarmonic::Finite(q) => Some(q),
        }
    }
}

impl std::fmt::Display for ModHarmonic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ModHarmonic::NegInfinity => f.write_str("-inf"),
            ModHarmonic::Finite(q) => write!(f, "{q}"),
        }
    }
}

/// `H_{k,x} = Σ_{j=1..k} 1/(j − x)` for `x < 1`; for `x = 1` it is `H_{k−1}`
/// when `k ≥ 1` and −∞ when `k = 0`.
pub fn modified_harmonic(k: u64, x: &Rational) -> Result<ModHarmonic> {
    check_unit("x", x)?;
    if x.is_one() {
        return Ok(match k {
            0 => ModHarmonic::NegInfinity,
            _ => ModHarmonic::Finite(harmonic(k - 1)),
        });
    }
    let sum = (1..=k).fold(Rational::zero(), |acc, j| {
        acc + (Rational::from_integer(j.into()) - x).recip()
    });
    Ok(ModHarmonic::Finite(sum))
}

/// `[H_{0,x}, …, H_{len−1,x}]`.
pub fn modified_harmonic_table(len: u64, x: &Rational) -> Result<Vec<ModHarmonic>> {
    check_unit("x", x)?;
    let mut out = Vec::with_capacity(len as usize);
    let mut sum = Rational::zero();
    for k in 0..len {
        if x.is_one() {
            if k == 0 {
                out.push(ModHarmonic::NegInfinity);
                continue;
            }
            if k > 1 {
                sum += Rational::new(1.into(), (k - 1).into());
            }
        } else if k > 0 {
            sum += (Rational::from_integer(k.into()) - x).recip();
        }
        out.push(ModHarmonic::Finite(sum.clone()));
    }
    Ok(out)
}

/// Value of an extended harmonic number with an absolute error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HarmonicEstimate {
    pub value: f64,
    pub error: f64,
}

/// `H_z = ∫₀¹ (1 − t^z)/(1 − t) dt` for rational `z ≥ 0`.
///
/// With `z = p/q` and `t = s^q` the integrand becomes
/// `q·s^{q−1}·(1 + s + … + s^{p−1})/(1 + s + … + s^{q−1})`, a smooth function
/// without the removable singularity at `t = 1`. It is integrated by adaptive
/// Gauss–Kronrod (7/15) until the summed Kronrod error estimates fall below
/// `tol`.
pub fn extended_harmonic(z: &Rational, tol: f64) -> Result<HarmonicEstimate> {
    if z.is_negative() {
        return Err(Error::Precondition(format!(
            "extended harmonic number needs z >= 0, got {z}"
        )));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Precondition(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let (p, q) = match (z.numer().to_u64(), z.denom().to_u64()) {
        (Some(p), Some(q)) if p <= MAX_DEGREE && q <= MAX_DEGREE => (p, q),
        _ => {
            return Err(Error::Precondition(format!(
                "extended harmonic number argument {z} is too large"
            )))
        }
    };
    if p == 0 {
        return Ok(HarmonicEstimate {
            value: 0.0,
            error: 0.0,
        });
    }
    let f = |s: f64| {
        let num = geometric(s, p);
        let den = geometric(s, q);
        q as f64 * s.powi((q - 1) as i32) * num / den
    };
    let mut total = 0.0;
    let mut error = 0.0;
    let mut stack = vec![(0.0f64, 1.0f64, 0u32)];
    while let Some((a, b, depth)) = stack.pop() {
        let (k, e) = gauss_kronrod(&f, a, b);
        if e <= tol * (b - a) || depth >= 40 {
            total += k;
            error += e;
        } else {
            let mid = 0.5 * (a + b);
            stack.push((mid, b, depth + 1));
            stack.push((a, mid, depth + 1));
        }
    }
    // floating-point evaluation noise on top of the truncation estimate
    error += 4.0 * f64::EPSILON * total.abs();
    Ok(HarmonicEstimate {
        value: total,
        error,
    })
}

/// `1 + s + … + s^{n−1}` by Horner's rule.
fn geometric(s: f64, n: u64) -> f64 {
    if s < 0.5 && n > 64 {
        return (1.0 - s.powf(n as f64)) / (1.0 - s);
    }
    (0..n).fold(0.0, |acc, _| acc * s + 1.0)
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Kronrod estimate on `[a, b]` and `|K − G|`.
fn gauss_kronrod(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for k in 0..7 {
        let dx = h * XGK[k];
        let pair = f(c - dx) + f(c + dx);
        kronrod += WGK[k] * pair;
        if k % 2 == 1 {
            gauss += WG[k / 2] * pair;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio, to_f64};

    /// Bracket for `H_z` from `H_z = Σ_{k≥1} z/(k(k+z))`: the first `n` terms
    /// plus a tail between `ln((n+1+z)/(n+1))` and `ln((n+z)/n)`.
    fn series_bracket(z: f64, n: u32) -> (f64, f64) {
        let head: f64 = (1..=n).map(|k| z / (k as f64 * (k as f64 + z))).sum();
        let n = n as f64;
        (
            head + ((n + 1.0 + z) / (n + 1.0)).ln(),
            head + ((n + z) / n).ln(),
        )
    }

    #[test]
    fn integer_harmonic_values() {
        assert_eq!(harmonic(0), int(0));
        assert_eq!(harmonic(3), ratio(11, 6));
        assert_eq!(harmonic(8), ratio(761, 280));
    }

    #[test]
    fn table_matches_pointwise() {
        for x in [int(0), ratio(1, 3), ratio(3, 4), int(1)] {
            let table = modified_harmonic_table(12, &x).unwrap();
            for (k, h) in table.iter().enumerate() {
                assert_eq!(*h, modified_harmonic(k as u64, &x).unwrap());
            }
        }
    }

    #[test]
    fn modified_harmonic_cases() {
        for x in [int(0), ratio(1, 4), ratio(1, 2), ratio(3, 4)] {
            assert_eq!(
                modified_harmonic(0, &x).unwrap(),
                ModHarmonic::Finite(int(0))
            );
        }
        assert_eq!(
            modified_harmonic(3, &int(0)).unwrap(),
            ModHarmonic::Finite(harmonic(3))
        );
        assert_eq!(
            modified_harmonic(0, &int(1)).unwrap(),
            ModHarmonic::NegInfinity
        );
        assert_eq!(
            modified_harmonic(1, &int(1)).unwrap(),
            ModHarmonic::Finite(int(0))
        );
        assert_eq!(
            modified_harmonic(2, &int(1)).unwrap(),
            ModHarmonic::Finite(int(1))
        );
        assert_eq!(
            modified_harmonic(2, &ratio(1, 2)).unwrap(),
            ModHarmonic::Finite(int(2) + ratio(2, 3))
        );
        assert!(ModHarmonic::NegInfinity < ModHarmonic::Finite(int(-1000)));
        assert!(modified_harmonic(1, &int(2)).is_err());
    }

    #[test]
    fn extended_matches_integers() {
        for k in 0..=30u64 {
            let e = extended_harmonic(&int(k as i64), DEFAULT_HARMONIC_TOL).unwrap();
            let exact = to_f64(&harmonic(k));
            assert!(
                (e.value - exact).abs() <= 1e-9,
                "k = {k}: {} vs {exact}",
                e.value
            );
            assert!(e.error <= 1e-9);
        }
    }

    #[test]
    fn extended_matches_series_at_fractions() {
        for (p, q) in [(19, 10), (1, 2), (1, 3), (7, 3), (5, 4), (41, 7)] {
            let z = ratio(p, q);
            let e = extended_harmonic(&z, 1e-10).unwrap();
            let (lo, hi) = series_bracket(to_f64(&z), 200_000);
            assert!(
                e.value >= lo - 1e-9 && e.value <= hi + 1e-9,
                "z = {z}: {} not in [{lo}, {hi}]",
                e.value
            );
        }
    }

    #[test]
    fn one_point_nine() {
        let e = extended_harmonic(&ratio(19, 10), DEFAULT_HARMONIC_TOL).unwrap();
        assert!(e.value > 1.459);
        let one = extended_harmonic(&int(1), DEFAULT_HARMONIC_TOL).unwrap();
        assert!((one.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn extended_rejects_negative() {
        assert!(extended_harmonic(&int(-1), 1e-9).is_err());
        assert!(extended_harmonic(&int(1), 0.0).is_err());
    }
}
