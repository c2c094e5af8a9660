//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Runs under `cargo test` as a harness-free test target.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::process::ExitCode;
use std::time::{Duration, Instant};

use entangled_dj::algorithms::{
    compute_m_p, run_classical_baseline, run_deutsch_jozsa, run_generalized,
    run_two_function_extension, EqualityVerdict, PromiseVerdict,
};
use entangled_dj::analysis::fidelity;
use entangled_dj::cli::{decode_outcome, simulate_case, CaseArgs, CaseSpec};
use entangled_dj::oracles::{
    build_controlled_uf, build_uf, enumerate_promise_functions, BooleanFunction, FunctionFamily,
    PromiseClass,
};
use entangled_dj::sim::{
    apply_gate, sample_shots, seeded_rng, Circuit, Gate, Histogram, StateVector,
};
use num_complex::Complex64;
use rand::Rng;
use std::sync::Arc;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn within(elapsed: Duration, limit: Duration) -> Check {
    ensure!(elapsed < limit, "took {elapsed:?}, limit {limit:?}");
    Ok(format!("{elapsed:.2?}"))
}

fn promise_functions(n: usize) -> Vec<(PromiseClass, BooleanFunction)> {
    [PromiseClass::Constant, PromiseClass::Balanced]
        .into_iter()
        .flat_map(|c| {
            enumerate_promise_functions(n, c)
                .unwrap()
                .into_iter()
                .map(move |f| (c, f))
        })
        .collect()
}

/// 1. Classic test is deterministic over every constant and balanced function, n = 1..=3.
fn classic_determinism() -> Check {
    let start = Instant::now();
    let mut count = 0;
    for n in 1..=3 {
        let fs = promise_functions(n);
        let expected = 2 + [2, 6, 70][n - 1];
        ensure!(
            fs.len() == expected,
            "n={n}: {} functions, expected {expected}",
            fs.len()
        );
        for (class, f) in fs {
            let run = run_deutsch_jozsa(&f).map_err(|e| e.to_string())?;
            let p = run.histogram.probability(&"0".repeat(n));
            match class {
                PromiseClass::Constant => ensure!(p >= 1.0 - 1e-10, "{f}: P(0^n) = {p}"),
                _ => ensure!(p <= 1e-10, "{f}: P(0^n) = {p}"),
            }
            ensure!(
                run.ledger.total() == 1,
                "{f}: {} queries",
                run.ledger.total()
            );
            count += 1;
        }
    }
    let t = within(start.elapsed(), Duration::from_secs(1))?;
    Ok(format!("{count} functions in {t}"))
}

/// All `k`-tuples drawn from `pool`.
fn tuples(pool: &[&'static str], k: usize) -> Vec<Vec<&'static str>> {
    (0..k).fold(vec![vec![]], |acc, _| {
        acc.into_iter()
            .flat_map(|prefix| {
                pool.iter().map(move |t| {
                    let mut v = prefix.clone();
                    v.push(*t);
                    v
                })
            })
            .collect()
    })
}

/// 2. Multi-function variant matches truth-table ground truth for all families, k = 1..=4.
fn generalized_exhaustive() -> Check {
    let start = Instant::now();
    let mut count = 0;
    for k in 1..=4 {
        for (class, pool) in [
            (PromiseVerdict::Constant, ["00", "11"]),
            (PromiseVerdict::Balanced, ["01", "10"]),
        ] {
            for tables in tuples(&pool, k) {
                let fs: Vec<BooleanFunction> = tables.iter().map(|t| t.parse().unwrap()).collect();
                let family = FunctionFamily::new(fs).map_err(|e| e.to_string())?;
                let q = run_generalized(&family).map_err(|e| e.to_string())?;
                let c = run_classical_baseline(&family).map_err(|e| e.to_string())?;
                let truth_eq = if k == 1 {
                    EqualityVerdict::NotApplicable
                } else if tables.iter().all(|t| *t == tables[0]) {
                    EqualityVerdict::Equal
                } else {
                    EqualityVerdict::Unequal
                };
                ensure!(
                    q.verdict.promise == class,
                    "{tables:?}: promise {}",
                    q.verdict.promise
                );
                ensure!(
                    q.verdict.equality == truth_eq,
                    "{tables:?}: equality {}",
                    q.verdict.equality
                );
                ensure!(
                    q.ledger.total() == k as u64,
                    "{tables:?}: quantum {}",
                    q.ledger.total()
                );
                ensure!(
                    c.ledger.total() == k as u64 + 1,
                    "{tables:?}: classical {}",
                    c.ledger.total()
                );
                ensure!(
                    c.verdict == q.verdict,
                    "{tables:?}: classical verdict differs"
                );
                count += 1;
            }
        }
    }
    let t = within(start.elapsed(), Duration::from_secs(1))?;
    Ok(format!("{count} families in {t}"))
}

/// 3. Two-function extension: 2m = p, register determinism, worst-case correlation bound.
fn extension_exhaustive() -> Check {
    let start = Instant::now();
    let mut pairs = 0;
    for n in 2..=3usize {
        let balanced = enumerate_promise_functions(n, PromiseClass::Balanced).unwrap();
        let constant = enumerate_promise_functions(n, PromiseClass::Constant).unwrap();
        let bound = 1.0 - 2f64.powi(1 - n as i32);
        let mut worst: f64 = 0.0;
        for f in &balanced {
            for g in &balanced {
                let (m, p) = compute_m_p(f, g).map_err(|e| e.to_string())?;
                ensure!(2 * m == p, "n={n} {f},{g}: m={m} p={p}");
                let run = run_two_function_extension(f, g).map_err(|e| e.to_string())?;
                ensure!(
                    run.register_zero_probability <= 1e-10,
                    "n={n} {f},{g}: P(0^n) = {}",
                    run.register_zero_probability
                );
                let expected = p as f64 / (1u64 << n) as f64;
                ensure!(
                    (run.correlated_probability - expected).abs() <= 1e-10,
                    "n={n} {f},{g}: correlated {} vs p/2^n {expected}",
                    run.correlated_probability
                );
                if f != g {
                    ensure!(
                        run.correlated_probability <= bound + 1e-10,
                        "n={n} {f},{g}: correlated {} exceeds {bound}",
                        run.correlated_probability
                    );
                    worst = worst.max(run.correlated_probability);
                }
                pairs += 1;
            }
        }
        for f in &constant {
            for g in &constant {
                let run = run_two_function_extension(f, g).map_err(|e| e.to_string())?;
                ensure!(
                    run.register_zero_probability >= 1.0 - 1e-10,
                    "n={n} {f},{g}: P(0^n) = {}",
                    run.register_zero_probability
                );
                if f != g {
                    ensure!(
                        run.correlated_probability <= bound + 1e-10,
                        "constant pair above bound"
                    );
                }
            }
        }
        ensure!(
            (worst - bound).abs() <= 1e-10,
            "n={n}: worst case {worst}, expected {bound}"
        );
    }
    ensure!(pairs == 36 + 4900, "{pairs} balanced pairs");
    let t = within(start.elapsed(), Duration::from_secs(30))?;
    Ok(format!("{pairs} balanced pairs in {t}"))
}

/// 4. Noiseless four-case reproduction.
fn noiseless_cases() -> Check {
    let mut outcomes = Vec::new();
    for case in CaseSpec::all() {
        let mut args = CaseArgs::new(case.case_id);
        args.noise = Some("off".into());
        let r = simulate_case(&args).map_err(|e| e.to_string())?;
        ensure!(
            r.theory.entries().len() == 1,
            "case {}: theory not single-outcome",
            case.case_id
        );
        for run in &r.runs {
            ensure!(
                run.entries().len() == 1,
                "case {}: sampled more than one outcome",
                case.case_id
            );
        }
        let decoded = decode_outcome(&r.ideal_outcome).map_err(|e| e.to_string())?;
        ensure!(
            decoded == case.expected,
            "case {}: decoded {decoded}",
            case.case_id
        );
        ensure!(
            (r.fidelity_of_mean - 1.0).abs() <= 1e-12,
            "case {}: F = {}",
            case.case_id,
            r.fidelity_of_mean
        );
        ensure!(
            (r.mean_fidelity - 1.0).abs() <= 1e-12,
            "case {}: F = {}",
            case.case_id,
            r.mean_fidelity
        );
        outcomes.push(r.ideal_outcome);
    }
    Ok(format!("outcomes {}", outcomes.join(" ")))
}

/// 5. Noisy qualitative reproduction with the shipped table.
fn noisy_cases() -> Check {
    let start = Instant::now();
    let mut f = Vec::new();
    for case in CaseSpec::all() {
        let r = simulate_case(&CaseArgs::new(case.case_id)).map_err(|e| e.to_string())?;
        ensure!(
            r.runs.len() == 10 && r.summary.shots_per_run == 8192,
            "wrong run shape"
        );
        ensure!(
            r.mean_fidelity > 0.5 && r.mean_fidelity < 1.0,
            "case {}: mean fidelity {}",
            case.case_id,
            r.mean_fidelity
        );
        f.push(r.mean_fidelity);
    }
    ensure!(f[2] >= f[1], "case 3 ({}) below case 2 ({})", f[2], f[1]);
    ensure!(f[3] >= f[1], "case 4 ({}) below case 2 ({})", f[3], f[1]);
    let t = within(start.elapsed(), Duration::from_secs(60))?;
    Ok(format!(
        "mean fidelities {:.4} {:.4} {:.4} {:.4} in {t}",
        f[0], f[1], f[2], f[3]
    ))
}

fn random_distribution(rng: &mut impl Rng, width: usize, support: usize) -> Histogram {
    let weights: Vec<f64> = (0..1usize << width)
        .map(|i| {
            if i % support == 0 {
                rng.random_range(0.0..1.0) + 1e-3
            } else {
                0.0
            }
        })
        .collect();
    let total: f64 = weights.iter().sum();
    Histogram::from_probabilities(
        width,
        entangled_dj::sim::all_outcomes(width).zip(weights.iter().map(|w| w / total)),
    )
    .unwrap()
}

/// 6. Fidelity metric properties.
fn fidelity_properties() -> Check {
    let mut rng = seeded_rng(6);
    for _ in 0..200 {
        let p = random_distribution(&mut rng, 3, 1);
        let q = random_distribution(&mut rng, 3, 2);
        let fpp = fidelity(&p, &p).map_err(|e| e.to_string())?;
        ensure!((fpp - 1.0).abs() <= 1e-12, "F(p,p) = {fpp}");
        let (a, b) = (fidelity(&p, &q).unwrap(), fidelity(&q, &p).unwrap());
        ensure!((a - b).abs() <= 1e-14, "asymmetric: {a} vs {b}");
        ensure!((0.0..=1.0).contains(&a), "out of range: {a}");
    }
    let even = Histogram::from_probabilities(2, [("00", 0.5), ("01", 0.5)]).unwrap();
    let odd = Histogram::from_probabilities(2, [("10", 0.25), ("11", 0.75)]).unwrap();
    ensure!(
        fidelity(&even, &odd).unwrap() == 0.0,
        "disjoint supports overlap"
    );
    let th = Histogram::from_probabilities(3, [("100", 1.0)]).unwrap();
    let ex = Histogram::from_probabilities(
        3,
        [("100", 0.81), ("000", 0.07), ("101", 0.06), ("110", 0.06)],
    )
    .unwrap();
    let f = fidelity(&th, &ex).unwrap();
    ensure!((f - 0.9).abs() <= 1e-12, "sqrt(0.81) case gave {f}");
    Ok("identity, symmetry, disjointness, sqrt(0.81)".into())
}

fn random_state(rng: &mut impl Rng, n: usize) -> StateVector {
    let mut amps: Vec<Complex64> = (0..1 << n)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    amps.iter_mut().for_each(|a| *a /= norm);
    StateVector::from_amplitudes(amps).unwrap()
}

fn random_gate(rng: &mut impl Rng, n: usize) -> Gate {
    let q = rng.random_range(0..n);
    let other = |rng: &mut dyn rand::RngCore| loop {
        let t = rng.random_range(0..n);
        if t != q {
            break t;
        }
    };
    match rng.random_range(0..if n > 1 { 8 } else { 4 }) {
        0 => Gate::H(q),
        1 => Gate::X(q),
        2 => Gate::Y(q),
        3 => Gate::Z(q),
        4 => Gate::Cnot {
            control: q,
            target: other(rng),
        },
        5 => Gate::Cz(q, other(rng)),
        6 => {
            let t = other(rng);
            let table = (0..2).map(|_| rng.random()).collect();
            let f = Arc::new(BooleanFunction::new(1, table).unwrap());
            build_controlled_uf(&f, q, t, 0).unwrap()
        }
        _ => {
            let target = other(rng);
            let inputs: Vec<usize> = (0..n).filter(|&i| i != target).collect();
            let table = (0..1 << inputs.len()).map(|_| rng.random()).collect();
            let f = Arc::new(BooleanFunction::new(inputs.len(), table).unwrap());
            build_uf(&f, &inputs, target, 0).unwrap()
        }
    }
}

/// 7. Simulator soundness: norm preservation, involutions, reproducible sampling.
fn simulator_soundness() -> Check {
    let mut rng = seeded_rng(7);
    for i in 0..1000 {
        let n = rng.random_range(1..=6);
        let mut circuit = Circuit::new(n).unwrap();
        for _ in 0..rng.random_range(1..=20) {
            circuit.push(random_gate(&mut rng, n)).unwrap();
        }
        let state = circuit.simulate_from(random_state(&mut rng, n)).unwrap();
        ensure!(
            (state.norm_sqr() - 1.0).abs() <= 1e-10,
            "circuit {i}: norm {}",
            state.norm_sqr()
        );
    }
    for _ in 0..200 {
        let n = rng.random_range(2..=6);
        let psi = random_state(&mut rng, n);
        let q = rng.random_range(0..n);
        let t = (q + 1 + rng.random_range(0..n - 1)) % n;
        let inputs: Vec<usize> = (0..n).filter(|&i| i != t).collect();
        let table = (0..1 << inputs.len()).map(|_| rng.random()).collect();
        let f = Arc::new(BooleanFunction::new(inputs.len(), table).unwrap());
        for g in [
            Gate::H(q),
            Gate::X(q),
            Gate::Cnot {
                control: q,
                target: t,
            },
            build_uf(&f, &inputs, t, 0).unwrap(),
        ] {
            let twice = apply_gate(apply_gate(psi.clone(), &g).unwrap(), &g).unwrap();
            let dev = twice
                .amplitudes()
                .iter()
                .zip(psi.amplitudes())
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            ensure!(dev <= 1e-10, "{g} squared deviates by {dev}");
        }
    }
    for seed in 0..20u64 {
        let hist = random_state(&mut rng, 4)
            .measure_probabilities(&[0, 1, 2, 3])
            .unwrap();
        let a = sample_shots(&hist, 8192, seed).unwrap();
        let b = sample_shots(&hist, 8192, seed).unwrap();
        ensure!(
            format!("{a:?}") == format!("{b:?}"),
            "seed {seed}: histograms differ"
        );
    }
    Ok("1000 random circuits, involutions, seeded sampling".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 7] = [
        ("classic Deutsch-Jozsa determinism", classic_determinism),
        (
            "multi-function variant, exhaustive k <= 4",
            generalized_exhaustive,
        ),
        (
            "two-function extension, exhaustive n = 2, 3",
            extension_exhaustive,
        ),
        ("four cases, noiseless", noiseless_cases),
        ("four cases, ibmqx4 noise", noisy_cases),
        ("fidelity metric properties", fidelity_properties),
        ("simulator soundness", simulator_soundness),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("[PASS] {}. {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("[FAIL] {}. {name}: {why}", i + 1);
            }
        }
    }
    println!(
        "{} of {} acceptance criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
