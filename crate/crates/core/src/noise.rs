//! Stochastic Pauli-trajectory noise: depolarizing errors after gates and
//! symmetric readout flips, with per-qubit rates loaded from a TOML file.

use std::path::Path;

use rand::Rng;
use serde::Deserialize;
use toml::Spanned;

use crate::error::{Error, Result};
use crate::sim::{sample_shots, seeded_rng, Circuit, Gate, Histogram, OutcomeSampler, StateVector};

/// Table of ibmqx4 rates shipped with the crate.
pub const DEFAULT_NOISE_FILE: &str = include_str!("../data/ibmqx4.toml");

#[derive(Clone, Debug, PartialEq)]
pub struct QubitNoise {
    pub name: String,
    pub gate_error: f64,
    pub readout_error: f64,
    pub multiqubit_gate_error: Option<f64>,
    pub t1_us: Option<f64>,
    pub t2_us: Option<f64>,
}

impl QubitNoise {
    pub fn new(gate_error: f64, readout_error: f64, multiqubit_gate_error: Option<f64>) -> Self {
        Self {
            name: String::new(),
            gate_error,
            readout_error,
            multiqubit_gate_error,
            t1_us: None,
            t2_us: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NoiseModel {
    pub per_qubit: Vec<QubitNoise>,
    pub enabled: bool,
}

fn check_probability(value: f64, what: &str) -> Result<()> {
    if !(0.0..=1.0).contains(&value) {
        return Err(Error::Config(format!("{what} = {value} is not in [0, 1]")));
    }
    Ok(())
}

impl NoiseModel {
    pub fn new(per_qubit: Vec<QubitNoise>) -> Result<Self> {
        for (i, q) in per_qubit.iter().enumerate() {
            check_probability(q.gate_error, &format!("qubit {i} gate_error"))?;
            check_probability(q.readout_error, &format!("qubit {i} readout_error"))?;
            if let Some(p) = q.multiqubit_gate_error {
                check_probability(p, &format!("qubit {i} multiqubit_gate_error"))?;
            }
        }
        Ok(Self {
            per_qubit,
            enabled: true,
        })
    }

    /// All rates zero.
    pub fn noiseless(num_qubits: usize) -> Self {
        Self {
            per_qubit: vec![QubitNoise::new(0.0, 0.0, Some(0.0)); num_qubits],
            enabled: true,
        }
    }

    /// The shipped ibmqx4 table.
    pub fn ibmqx4() -> Self {
        Self::from_toml_str(DEFAULT_NOISE_FILE).expect("shipped noise file is valid")
    }

    /// Every error rate multiplied by `factor`, capped at 1.
    pub fn scaled(&self, factor: f64) -> Self {
        let scale = |p: f64| (p * factor).clamp(0.0, 1.0);
        Self {
            per_qubit: self
                .per_qubit
                .iter()
                .map(|q| QubitNoise {
                    gate_error: scale(q.gate_error),
                    readout_error: scale(q.readout_error),
                    multiqubit_gate_error: q.multiqubit_gate_error.map(scale),
                    ..q.clone()
                })
                .collect(),
            enabled: self.enabled,
        }
    }

    pub fn is_noiseless(&self) -> bool {
        !self.enabled
            || self.per_qubit.iter().all(|q| {
                q.gate_error == 0.0
                    && q.readout_error == 0.0
                    && q.multiqubit_gate_error.unwrap_or(0.0) == 0.0
            })
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let raw: RawNoiseFile =
            toml::from_str(text).map_err(|e| Error::Config(e.to_string().trim_end().to_owned()))?;
        if raw.qubit.is_empty() {
            return Err(Error::Config("noise file has no [[qubit]] records".into()));
        }
        let line_of = |span: std::ops::Range<usize>| text[..span.start].matches('\n').count() + 1;
        let probability = |v: &Spanned<f64>, field: &str, idx: usize| -> Result<f64> {
            let value = *v.get_ref();
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::Config(format!(
                    "line {}: qubit {idx} field `{field}` = {value} is not a probability in [0, 1]",
                    line_of(v.span())
                )));
            }
            Ok(value)
        };
        let duration = |v: &Option<Spanned<f64>>, field: &str, idx: usize| -> Result<Option<f64>> {
            match v {
                Some(s) if s.get_ref().is_nan() || *s.get_ref() <= 0.0 => {
                    Err(Error::Config(format!(
                        "line {}: qubit {idx} field `{field}` = {} must be positive",
                        line_of(s.span()),
                        s.get_ref()
                    )))
                }
                Some(s) => Ok(Some(*s.get_ref())),
                None => Ok(None),
            }
        };
        let per_qubit = raw
            .qubit
            .iter()
            .enumerate()
            .map(|(i, q)| {
                Ok(QubitNoise {
                    name: q.name.clone().unwrap_or_else(|| format!("Q{i}")),
                    gate_error: probability(&q.gate_error, "gate_error", i)?,
                    readout_error: probability(&q.readout_error, "readout_error", i)?,
                    multiqubit_gate_error: q
                        .multiqubit_gate_error
                        .as_ref()
                        .map(|v| probability(v, "multiqubit_gate_error", i))
                        .transpose()?,
                    t1_us: duration(&q.t1_us, "t1_us", i)?,
                    t2_us: duration(&q.t2_us, "t2_us", i)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            per_qubit,
            enabled: raw.enabled.unwrap_or(true),
        })
    }

    fn qubit(&self, q: usize) -> Result<&QubitNoise> {
        self.per_qubit.get(q).ok_or_else(|| {
            Error::Config(format!(
                "noise model covers {} qubits, circuit uses qubit {q}",
                self.per_qubit.len()
            ))
        })
    }

    /// Two-qubit rate for a gate on `a` and `b`: the larger of the rates
    /// listed for either qubit.
    fn pair_error(&self, a: usize, b: usize) -> Result<f64> {
        let (qa, qb) = (self.qubit(a)?, self.qubit(b)?);
        match (qa.multiqubit_gate_error, qb.multiqubit_gate_error) {
            (Some(x), Some(y)) => Ok(x.max(y)),
            (Some(x), None) | (None, Some(x)) => Ok(x),
            (None, None) => Err(Error::Config(format!(
                "no multiqubit_gate_error for qubit {a} or {b}"
            ))),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNoiseFile {
    enabled: Option<bool>,
    #[serde(default)]
    qubit: Vec<RawQubit>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawQubit {
    name: Option<String>,
    gate_error: Spanned<f64>,
    readout_error: Spanned<f64>,
    multiqubit_gate_error: Option<Spanned<f64>>,
    t1_us: Option<Spanned<f64>>,
    t2_us: Option<Spanned<f64>>,
}

/// A possible depolarizing event following a gate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NoiseEvent {
    Single {
        qubit: usize,
        probability: f64,
    },
    Pair {
        a: usize,
        b: usize,
        probability: f64,
    },
}

/// Depolarizing events for `gate`. Oracles are charged like their shortest
/// CNOT/X realization: nothing for constant-0, an X for constant-1, and a
/// CNOT per input the function depends on (plus an X when `f(0) = 1`).
pub fn noise_events(gate: &Gate, model: &NoiseModel) -> Result<Vec<NoiseEvent>> {
    let single = |q: usize| -> Result<NoiseEvent> {
        Ok(NoiseEvent::Single {
            qubit: q,
            probability: model.qubit(q)?.gate_error,
        })
    };
    let pair = |a: usize, b: usize| -> Result<NoiseEvent> {
        Ok(NoiseEvent::Pair {
            a,
            b,
            probability: model.pair_error(a, b)?,
        })
    };
    let oracle = |function: &crate::oracles::BooleanFunction, inputs: &[usize], target: usize| {
        let n = function.arity();
        let mut events = Vec::new();
        for (k, &q) in inputs.iter().enumerate() {
            let bit = 1 << (n - 1 - k);
            if (0..1usize << n).any(|x| function.eval(x) != function.eval(x ^ bit)) {
                events.push(pair(q, target)?);
            }
        }
        if function.eval(0) {
            events.push(single(target)?);
        }
        Ok::<_, Error>(events)
    };
    match gate {
        Gate::H(q) | Gate::X(q) | Gate::Y(q) | Gate::Z(q) => Ok(vec![single(*q)?]),
        Gate::Cnot { control, target } => Ok(vec![pair(*control, *target)?]),
        Gate::Cz(a, b) => Ok(vec![pair(*a, *b)?]),
        Gate::PermutationOracle {
            function,
            inputs,
            target,
            ..
        } => oracle(function, inputs, *target),
        Gate::ControlledBitOracle {
            function,
            control,
            target,
            ..
        } => oracle(function, &[*control], *target),
    }
}

fn pauli(q: usize, which: u8) -> Option<Gate> {
    match which {
        1 => Some(Gate::X(q)),
        2 => Some(Gate::Y(q)),
        3 => Some(Gate::Z(q)),
        _ => None,
    }
}

/// Samples `shots` noisy executions of `circuit`.
///
/// Each shot draws its depolarizing events gate by gate; shots without any
/// event reuse the ideal output distribution. Readout flips are applied to
/// every measured bit at the end. With all rates zero this is exactly
/// `sample_shots` of the ideal distribution under the same seed.
pub fn noisy_sample(
    circuit: &Circuit,
    model: &NoiseModel,
    shots: u64,
    seed: u64,
) -> Result<Histogram> {
    if shots < 1 {
        return Err(Error::Input("shots must be at least 1".into()));
    }
    for q in 0..circuit.num_qubits() {
        model.qubit(q)?;
    }
    let ideal = circuit.probabilities()?;
    if model.is_noiseless() {
        return sample_shots(&ideal, shots, seed);
    }

    let events = circuit
        .gates()
        .iter()
        .map(|g| noise_events(g, model))
        .collect::<Result<Vec<_>>>()?;
    let measured = circuit.measured_qubits();
    let readout: Vec<f64> = measured
        .iter()
        .map(|&q| model.per_qubit[q].readout_error)
        .collect();
    let ideal_sampler = OutcomeSampler::new(&ideal)?;

    let mut rng = seeded_rng(seed);
    let mut counts = vec![0u64; 1 << measured.len()];
    let mut inserted: Vec<(usize, Gate)> = Vec::new();
    for _ in 0..shots {
        inserted.clear();
        for (i, gate_events) in events.iter().enumerate() {
            for ev in gate_events {
                match *ev {
                    NoiseEvent::Single { qubit, probability } => {
                        if rng.random::<f64>() < probability {
                            let p = rng.random_range(1..4u8);
                            inserted.extend(pauli(qubit, p).map(|g| (i, g)));
                        }
                    }
                    NoiseEvent::Pair { a, b, probability } => {
                        if rng.random::<f64>() < probability {
                            let p = rng.random_range(1..16u8);
                            inserted.extend(pauli(a, p / 4).map(|g| (i, g)));
                            inserted.extend(pauli(b, p % 4).map(|g| (i, g)));
                        }
                    }
                }
            }
        }
        let outcome = if inserted.is_empty() {
            parse_outcome(ideal_sampler.sample(&mut rng))
        } else {
            let state = run_with_errors(circuit, &inserted)?;
            let dist = state.measure_probabilities(measured)?;
            parse_outcome(OutcomeSampler::new(&dist)?.sample(&mut rng))
        };
        let width = measured.len();
        let mut flipped = outcome;
        for (k, &r) in readout.iter().enumerate() {
            if r > 0.0 && rng.random::<f64>() < r {
                flipped ^= 1 << (width - 1 - k);
            }
        }
        counts[flipped] += 1;
    }
    Histogram::from_counts(
        measured.len(),
        crate::sim::all_outcomes(measured.len()).zip(counts),
    )
}

fn parse_outcome(bits: &str) -> usize {
    bits.bytes()
        .fold(0, |acc, b| (acc << 1) | usize::from(b == b'1'))
}

/// Runs the circuit with Pauli errors inserted after the indexed gates.
fn run_with_errors(circuit: &Circuit, inserted: &[(usize, Gate)]) -> Result<StateVector> {
    let mut state = StateVector::zero(circuit.num_qubits())?;
    let mut pending = inserted.iter().peekable();
    for (i, gate) in circuit.gates().iter().enumerate() {
        state.apply(gate)?;
        while let Some((_, err)) = pending.next_if(|(at, _)| *at == i) {
            state.apply(err)?;
        }
    }
    Ok(state)
}
