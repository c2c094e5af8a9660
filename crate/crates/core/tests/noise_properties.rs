use entangled_dj::analysis::{aggregate_runs, fidelity};
use entangled_dj::cli::{run_seed, CaseSpec};
use entangled_dj::noise::{noisy_sample, NoiseModel};
use entangled_dj::sim::{all_outcomes, sample_shots};

const SHOTS: u64 = 8192;

fn mean_fidelity(case: &CaseSpec, model: &NoiseModel, seeds: u64) -> f64 {
    let circuit = case.circuit().unwrap();
    let theory = circuit.probabilities().unwrap();
    (0..seeds)
        .map(|s| fidelity(&theory, &noisy_sample(&circuit, model, SHOTS, s).unwrap()).unwrap())
        .sum::<f64>()
        / seeds as f64
}

#[test]
fn doubling_rates_never_helps() {
    let base = NoiseModel::ibmqx4();
    let doubled = base.scaled(2.0);
    for case in CaseSpec::all() {
        let f1 = mean_fidelity(&case, &base, 10);
        let f2 = mean_fidelity(&case, &doubled, 10);
        assert!(f2 <= f1, "case {}: {f2} > {f1}", case.case_id);
    }
}

#[test]
fn noiseless_model_is_indistinguishable_from_ideal() {
    let model = NoiseModel::noiseless(3);
    for case in CaseSpec::all() {
        let circuit = case.circuit().unwrap();
        let ideal = circuit.probabilities().unwrap();
        let noisy = noisy_sample(&circuit, &model, SHOTS, 42).unwrap();
        let direct = sample_shots(&ideal, SHOTS, 42).unwrap();
        let tv: f64 = all_outcomes(3)
            .map(|o| (noisy.probability(&o) - direct.probability(&o)).abs())
            .sum::<f64>()
            / 2.0;
        assert!(tv < 0.02, "case {}: TV {tv}", case.case_id);
        assert_eq!(noisy, direct);
    }
}

#[test]
fn case_two_is_least_faithful_of_two_three_four() {
    let model = NoiseModel::ibmqx4();
    let f: Vec<f64> = CaseSpec::all()
        .iter()
        .map(|c| mean_fidelity(c, &model, 10))
        .collect();
    assert!(f[2] >= f[1] && f[3] >= f[1], "{f:?}");
    assert!(f.iter().all(|&x| x > 0.5 && x < 1.0), "{f:?}");
}

#[test]
fn run_spread_is_binomial_scale() {
    // Case 3 with the shipped table: per-outcome spread over 10 runs should
    // sit inside a generous band around the binomial standard deviation.
    let case = CaseSpec::get(3).unwrap();
    let circuit = case.circuit().unwrap();
    let model = NoiseModel::ibmqx4();
    let runs: Vec<_> = (0..10)
        .map(|r| noisy_sample(&circuit, &model, SHOTS, run_seed(1, r)).unwrap())
        .collect();
    let summary = aggregate_runs(&runs).unwrap();
    for o in all_outcomes(3) {
        let p = summary.mean(&o);
        let band = 3.0 * (p * (1.0 - p) / SHOTS as f64).sqrt() + 0.002;
        assert!(
            summary.stddev(&o) <= band,
            "{o}: {} > {band}",
            summary.stddev(&o)
        );
    }
    let total: f64 = summary.per_outcome_mean.values().sum();
    assert!((total - 1.0).abs() < 1e-9);
}
