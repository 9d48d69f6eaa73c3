//! End-to-end acceptance checks. Runs without the libtest harness so every
//! criterion prints exactly one PASS/FAIL line, even on success.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use num::{One, Zero};

use fairshare::fairness::{
    check_ef1, check_mef1, check_po, check_twef, check_wef, check_wmef, check_wwmef1,
    extended_harmonic, harmonic, modified_harmonic, welfare, Notion, NotionParams, Objective,
    DEFAULT_HARMONIC_TOL,
};
use fairshare::instance::{fixtures, generate, GenParams, InstanceClass};
use fairshare::oracle::{
    enumerate_allocations, exact_optimum, max_utilitarian, notion_exists, SearchBudget,
};
use fairshare::rational::{int, ratio, to_f64, Rational};
use fairshare::rules::{mwhw_gain, picking_sequence, potential, transfer_algorithm, TieBreak};
use fairshare::valuations::{clean, is_clean};
use fairshare::{Allocation, Instance};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($fmt)+));
        }
    };
}

fn grid() -> Vec<Rational> {
    (0..=4).map(|k| ratio(k, 4)).collect()
}

fn complement(x: &Rational) -> Rational {
    Rational::one() - x
}

fn budget() -> SearchBudget {
    SearchBudget::default()
}

const SUBMODULAR: [InstanceClass; 4] = InstanceClass::ALL;
const MATROID: [InstanceClass; 2] = [
    InstanceClass::MatroidRankRandom,
    InstanceClass::BinaryAdditive,
];

fn random(classes: &[InstanceClass], seed: u64, n: usize, m: usize, equal: bool) -> Instance {
    let params = GenParams {
        equal_weights: equal,
        ..GenParams::default()
    };
    generate(classes[seed as usize % classes.len()], n, m, seed, &params)
        .unwrap_or_else(|e| panic!("seed {seed}: {e}"))
}

fn utilitarian(inst: &Instance, a: &Allocation) -> Rational {
    inst.utilities(a).iter().sum()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let inst = fixtures::example1(6).instance;
    let wef1 = NotionParams::new(Notion::Wef, int(1), Some(int(0))).map_err(|e| e.to_string())?;
    let found = notion_exists(&inst, &wef1, true, &budget()).map_err(|e| e.to_string())?;
    let secs = start.elapsed().as_secs_f64();
    ensure!(
        found.is_none(),
        "found a complete WEF(1,0) allocation: {}",
        found.unwrap()
    );
    ensure!(secs < 1.0, "took {secs:.3}s");
    Ok(format!(
        "no complete WEF(1,0) allocation among 64 ({secs:.3}s)"
    ))
}

fn criterion_2() -> Outcome {
    let mut runs = 0;
    let mut mef1_runs = 0;
    for seed in 0..500u64 {
        let n = 2 + (seed % 3) as usize;
        let m = 4 + ((seed / 3) % 7) as usize;
        let equal = seed % 4 == 0;
        let inst = random(&SUBMODULAR, seed, n, m, equal);
        for x in grid() {
            let y = complement(&x);
            for tie in [TieBreak::Lowest, TieBreak::Seeded(seed * 7919 + 1)] {
                let (a, trace) = picking_sequence(&inst, &x, tie).map_err(|e| e.to_string())?;
                ensure!(a.is_complete(m), "seed {seed}: incomplete output");
                ensure!(trace.steps.len() == m, "seed {seed}: trace length");
                let r = check_wmef(&a, &inst, &x, &y).map_err(|e| e.to_string())?;
                ensure!(
                    r.verdict,
                    "seed {seed}, x = {x}, {tie:?}: WMEF violated {:?}",
                    r.violations
                );
                runs += 1;
                if equal {
                    let r = check_mef1(&a, &inst).map_err(|e| e.to_string())?;
                    ensure!(r.verdict, "seed {seed}, x = {x}: MEF1 violated");
                    mef1_runs += 1;
                }
            }
        }
    }
    Ok(format!(
        "{runs} runs WMEF(x,1-x), {mef1_runs} equal-weight runs MEF1"
    ))
}

fn criterion_3() -> Outcome {
    let f = fixtures::roundrobin_ef1();
    let inst = &f.instance;
    let (a, _) = picking_sequence(inst, &int(0), TieBreak::Lowest).map_err(|e| e.to_string())?;
    let expected = Allocation::from_one_based(&[&[2, 4, 6, 8], &[1, 3, 5, 7]]).unwrap();
    ensure!(a == expected, "got {a}");
    let ef1 = check_ef1(&a, inst).map_err(|e| e.to_string())?;
    ensure!(
        ef1.violated_pairs() == vec![(1, 0)],
        "EF1 violations {:?}",
        ef1.violations
    );
    let v22 = inst.utility(&a, 1);
    ensure!(v22 == int(2), "v_2(A_2) = {v22}");
    ensure!(
        ef1.violations[0].reason.starts_with("v_2(A_2) = 2 < 3"),
        "reason {:?}",
        ef1.violations[0].reason
    );
    ensure!(
        check_mef1(&a, inst).map_err(|e| e.to_string())?.verdict,
        "MEF1 fails"
    );
    let union = inst.value(1, &a.bundle(0).union(a.bundle(1)));
    ensure!(union == int(4), "v_2(A_2 ∪ A_1) = {union}");
    Ok("A_1 = {g2,g4,g6,g8}; EF1 fails at (2,1) with 2 < 3; MEF1 holds; v_2(A_2∪A_1) = 4".into())
}

fn criterion_4() -> Outcome {
    let mut checked = 0;
    for seed in 0..300u64 {
        let n = 2 + (seed % 2) as usize;
        let m = 3 + ((seed / 2) % 4) as usize;
        let inst = random(&SUBMODULAR, 10_000 + seed, n, m, false);
        let opt = exact_optimum(&inst, &Objective::Wnw, &budget()).map_err(|e| e.to_string())?;
        for a in &opt.argmax {
            let r = check_wwmef1(a, &inst).map_err(|e| e.to_string())?;
            ensure!(r.verdict, "seed {seed}: {a} not WWMEF1: {:?}", r.violations);
            let po = check_po(a, &inst, &budget()).map_err(|e| e.to_string())?;
            ensure!(
                po.verdict,
                "seed {seed}: {a} dominated by {:?}",
                po.dominator
            );
            checked += 1;
        }
    }
    Ok(format!(
        "{checked} MWNW allocations over 300 instances are WWMEF1 and PO"
    ))
}

fn criterion_5() -> Outcome {
    let mut transfers = 0;
    let mut runs = 0;
    for seed in 0..300u64 {
        let n = 2 + (seed % 3) as usize;
        let m = 4 + ((seed / 3) % 7) as usize;
        let inst = random(&MATROID, 20_000 + seed, n, m, false);
        let (best, _) = max_utilitarian(&inst, &budget()).map_err(|e| e.to_string())?;
        for x in grid() {
            let (a, trace) = transfer_algorithm(&inst, &x).map_err(|e| e.to_string())?;
            ensure!(is_clean(&a, &inst), "seed {seed}, x = {x}: not clean");
            let w = utilitarian(&inst, &a);
            ensure!(
                w == best,
                "seed {seed}, x = {x}: welfare {w} vs optimum {best}"
            );
            let r = check_twef(&a, &inst, &x, &complement(&x)).map_err(|e| e.to_string())?;
            ensure!(
                r.verdict,
                "seed {seed}, x = {x}: TWEF violated {:?}",
                r.violations
            );
            ensure!(
                trace.steps.len() <= m * m * n,
                "seed {seed}: {} transfers",
                trace.steps.len()
            );
            let mut phi = potential(&trace.start, &inst, &x);
            for s in &trace.steps {
                ensure!(s.phi_before == phi, "seed {seed}: trace potential mismatch");
                ensure!(
                    s.phi_after < s.phi_before,
                    "seed {seed}, x = {x}: potential did not drop"
                );
                phi = s.phi_after.clone();
            }
            ensure!(
                phi == potential(&a, &inst, &x),
                "seed {seed}: final potential mismatch"
            );
            transfers += trace.steps.len();
            runs += 1;
        }
    }
    Ok(format!(
        "{runs} runs, {transfers} transfers, all clean, optimal and TWEF"
    ))
}

fn criterion_6() -> Outcome {
    let mut runs = 0;
    for seed in 0..300u64 {
        let n = 2 + (seed % 2) as usize;
        let m = 3 + ((seed / 2) % 4) as usize;
        let inst = random(&MATROID, 30_000 + seed, n, m, false);
        for x in grid() {
            let obj = Objective::Whw(x.clone());
            let a = mwhw_gain(&inst, &x).map_err(|e| e.to_string())?;
            let opt = exact_optimum(&inst, &obj, &budget()).map_err(|e| e.to_string())?;
            let got = welfare(&a, &inst, &obj).map_err(|e| e.to_string())?;
            ensure!(
                got == opt.value,
                "seed {seed}, x = {x}: WHW {got} vs optimum {}",
                opt.value
            );
            ensure!(is_clean(&a, &inst), "seed {seed}, x = {x}: not clean");
            let r = check_twef(&a, &inst, &x, &complement(&x)).map_err(|e| e.to_string())?;
            ensure!(
                r.verdict,
                "seed {seed}, x = {x}: TWEF violated {:?}",
                r.violations
            );
            let po = check_po(&a, &inst, &budget()).map_err(|e| e.to_string())?;
            ensure!(po.verdict, "seed {seed}, x = {x}: not PO");
            runs += 1;
        }
    }
    let f = fixtures::mwhw_nonclean();
    let nonclean = f.allocation.unwrap();
    for x in grid() {
        let opt = exact_optimum(&f.instance, &Objective::Whw(x.clone()), &budget())
            .map_err(|e| e.to_string())?;
        ensure!(
            opt.argmax.contains(&nonclean),
            "x = {x}: fixture allocation not in argmax"
        );
        let r =
            check_twef(&nonclean, &f.instance, &x, &complement(&x)).map_err(|e| e.to_string())?;
        ensure!(
            r.violated_pairs().contains(&(1, 0)),
            "x = {x}: pair (2,1) not violated"
        );
    }
    Ok(format!(
        "{runs} runs match the WHW_x optimum; fixture allocation is optimal yet not TWEF at (2,1)"
    ))
}

fn criterion_7() -> Outcome {
    let mut checked = 0;
    for seed in 0..300u64 {
        let n = 2 + (seed % 2) as usize;
        let m = 3 + ((seed / 2) % 4) as usize;
        let inst = random(&[InstanceClass::AdditiveInteger], 40_000 + seed, n, m, true);
        let opt = exact_optimum(&inst, &Objective::Hw, &budget()).map_err(|e| e.to_string())?;
        for a in &opt.argmax {
            let r = check_ef1(a, &inst).map_err(|e| e.to_string())?;
            ensure!(r.verdict, "seed {seed}: {a} not EF1: {:?}", r.violations);
            checked += 1;
        }
    }
    Ok(format!(
        "{checked} MHW allocations over 300 instances are EF1"
    ))
}

fn criterion_8() -> Outcome {
    let f = fixtures::extended_harmonic();
    let inst = &f.instance;
    let hw = |goods: &[&[usize]]| -> Result<f64, String> {
        let a = Allocation::from_one_based(goods).map_err(|e| e.to_string())?;
        Ok(welfare(&a, inst, &Objective::HwExtended)
            .map_err(|e| e.to_string())?
            .approx())
    };
    let both = hw(&[&[2, 3], &[1]])?;
    let split = hw(&[&[2], &[1, 3]])?.max(hw(&[&[3], &[1, 2]])?);
    let none = hw(&[&[], &[1, 2, 3]])?;
    ensure!(both > 4.176 - 1e-6, "both: {both}");
    ensure!(split < 4.145 + 1e-6, "split: {split}");
    ensure!(none < 2.435 + 1e-6, "none: {none}");
    let opt = exact_optimum(inst, &Objective::HwExtended, &budget()).map_err(|e| e.to_string())?;
    let mut optima: Vec<Allocation> = opt.argmax.iter().map(|a| clean(a, inst)).collect();
    optima.dedup();
    let target = f.allocation.unwrap();
    ensure!(optima == vec![target.clone()], "optimum set {optima:?}");
    let ef1 = check_ef1(&target, inst).map_err(|e| e.to_string())?;
    ensure!(
        ef1.violated_pairs() == vec![(1, 0)],
        "EF1 violations {:?}",
        ef1.violations
    );
    Ok(format!(
        "both {both:.6} > 4.176, split {split:.6} < 4.145, none {none:.6} < 2.435; unique optimum fails EF1 at (2,1)"
    ))
}

fn criterion_9() -> Outcome {
    let mut pairs = 0;
    for a in 1..=200u64 {
        let mut sum = Rational::zero();
        for b in a..=200u64 {
            sum += Rational::new(1.into(), b.into());
            let s = to_f64(&sum);
            let (af, bf) = (a as f64, b as f64);
            let lower = ((bf + 1.0) / af).ln();
            ensure!(s > lower, "a = {a}, b = {b}: {s} <= ln((b+1)/a) = {lower}");
            if a >= 2 {
                let upper = (bf / (af - 1.0)).ln();
                ensure!(s < upper, "a = {a}, b = {b}: {s} >= ln(b/(a-1)) = {upper}");
            }
            pairs += 1;
        }
    }
    let mut worst: f64 = 0.0;
    for k in 0..=30u64 {
        let e =
            extended_harmonic(&int(k as i64), DEFAULT_HARMONIC_TOL).map_err(|e| e.to_string())?;
        let diff = (e.value - to_f64(&harmonic(k))).abs();
        ensure!(diff <= 1e-9, "k = {k}: off by {diff}");
        worst = worst.max(diff);
    }
    for x in grid() {
        let seq: Vec<_> = (0..=60)
            .map(|k| modified_harmonic(k, &x))
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        ensure!(
            seq.windows(2).all(|w| w[0] < w[1]),
            "x = {x}: not increasing"
        );
    }
    Ok(format!(
        "Riemann bounds on {pairs} pairs; extended H_k within {worst:.1e}; H_(k,x) increasing"
    ))
}

fn criterion_10() -> Outcome {
    let mut allocations = 0u64;
    let mut additive = 0;
    for seed in 0..100u64 {
        let n = 1 + (seed % 3) as usize;
        let m = 2 + ((seed / 3) % 4) as usize;
        let inst = random(&SUBMODULAR, 50_000 + seed, n, m, false);
        let is_additive = inst.valuations().iter().all(|v| v.is_additive());
        additive += usize::from(is_additive);
        for a in enumerate_allocations(&inst, false, &budget()).map_err(|e| e.to_string())? {
            for x in grid() {
                let y = complement(&x);
                let twef = check_twef(&a, &inst, &x, &y)
                    .map_err(|e| e.to_string())?
                    .verdict;
                let wmef = check_wmef(&a, &inst, &x, &y)
                    .map_err(|e| e.to_string())?
                    .verdict;
                ensure!(!twef || wmef, "seed {seed}, x = {x}: {a} TWEF but not WMEF");
                if is_additive {
                    let wef = check_wef(&a, &inst, &x, &y)
                        .map_err(|e| e.to_string())?
                        .verdict;
                    ensure!(
                        wef == twef && twef == wmef,
                        "seed {seed}, x = {x}: {a} WEF {wef}, TWEF {twef}, WMEF {wmef}"
                    );
                }
            }
            allocations += 1;
        }
    }
    Ok(format!(
        "{allocations} allocations x 5 values of x; TWEF implies WMEF; {additive} additive instances agree"
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("Example 1 has no complete WEF(1,0) allocation", criterion_1),
        ("picking sequence is WMEF(x,1-x)", criterion_2),
        ("round-robin regression", criterion_3),
        ("MWNW implies WWMEF1 and PO", criterion_4),
        ("transfer algorithm", criterion_5),
        ("MWHW_x by gain function", criterion_6),
        ("MHW implies EF1", criterion_7),
        ("extended harmonic counterexample", criterion_8),
        ("harmonic bounds", criterion_9),
        ("structural implications", criterion_10),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!(
                "criterion {:>2}: PASS  {name} ({secs:.1}s): {detail}",
                k + 1
            ),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2}: FAIL  {name} ({secs:.1}s): {why}", k + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
