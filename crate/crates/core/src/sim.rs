//! Dense state-vector simulation.
//!
//! Qubit 0 is the most significant bit of a basis index, so the ket
//! `|q0 q1 q2>` written left to right is the binary expansion of its index.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::oracles::BooleanFunction;

pub const MAX_QUBITS: usize = 24;

/// Tolerance for norm and unitarity checks.
pub const NORM_TOLERANCE: f64 = 1e-10;

#[inline]
fn bit_mask(num_qubits: usize, qubit: usize) -> usize {
    1 << (num_qubits - 1 - qubit)
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// `|0...0>` on `num_qubits` qubits.
    pub fn zero(num_qubits: usize) -> Result<Self> {
        check_width(num_qubits)?;
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << num_qubits];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Ok(Self {
            num_qubits,
            amplitudes,
        })
    }

    /// Wraps raw amplitudes; the length must be a power of two and the
    /// vector must be normalized.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::Input(format!(
                "amplitude count must be a power of two >= 2, got {len}"
            )));
        }
        let num_qubits = len.trailing_zeros() as usize;
        check_width(num_qubits)?;
        let state = Self {
            num_qubits,
            amplitudes,
        };
        let norm = state.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::Input(format!(
                "state is not normalized: |psi|^2 = {norm}"
            )));
        }
        Ok(state)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.num_qubits != other.num_qubits {
            return Err(Error::Input(format!(
                "cannot compare states of {} and {} qubits",
                self.num_qubits, other.num_qubits
            )));
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// True when the states agree up to a global phase.
    pub fn approx_eq_up_to_phase(&self, other: &StateVector, tol: f64) -> bool {
        match self.inner(other) {
            Ok(overlap) => (overlap.norm() - 1.0).abs() <= tol,
            Err(_) => false,
        }
    }

    /// `self ⊗ other`, with `self` occupying the leading qubits.
    pub fn tensor(&self, other: &StateVector) -> Result<StateVector> {
        let num_qubits = self.num_qubits + other.num_qubits;
        check_width(num_qubits)?;
        let amplitudes = self
            .amplitudes
            .iter()
            .flat_map(|a| other.amplitudes.iter().map(move |b| a * b))
            .collect();
        Ok(StateVector {
            num_qubits,
            amplitudes,
        })
    }

    /// Applies `gate` in place.
    pub fn apply(&mut self, gate: &Gate) -> Result<()> {
        gate.validate(self.num_qubits)?;
        let n = self.num_qubits;
        let amps = &mut self.amplitudes;
        match gate {
            Gate::H(q) => {
                let m = bit_mask(n, *q);
                let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
                for i in (0..amps.len()).filter(|i| i & m == 0) {
                    let (a, b) = (amps[i], amps[i | m]);
                    amps[i] = (a + b) * h;
                    amps[i | m] = (a - b) * h;
                }
            }
            Gate::X(q) => {
                let m = bit_mask(n, *q);
                for i in (0..amps.len()).filter(|i| i & m == 0) {
                    amps.swap(i, i | m);
                }
            }
            Gate::Y(q) => {
                let m = bit_mask(n, *q);
                let i_unit = Complex64::new(0.0, 1.0);
                for i in (0..amps.len()).filter(|i| i & m == 0) {
                    let (a, b) = (amps[i], amps[i | m]);
                    amps[i] = -i_unit * b;
                    amps[i | m] = i_unit * a;
                }
            }
            Gate::Z(q) => {
                let m = bit_mask(n, *q);
                for (i, a) in amps.iter_mut().enumerate() {
                    if i & m != 0 {
                        *a = -*a;
                    }
                }
            }
            Gate::Cnot { control, target } => {
                let c = bit_mask(n, *control);
                let t = bit_mask(n, *target);
                for i in (0..amps.len()).filter(|i| i & c != 0 && i & t == 0) {
                    amps.swap(i, i | t);
                }
            }
            Gate::Cz(a, b) => {
                let both = bit_mask(n, *a) | bit_mask(n, *b);
                for (i, amp) in amps.iter_mut().enumerate() {
                    if i & both == both {
                        *amp = -*amp;
                    }
                }
            }
            Gate::PermutationOracle {
                function,
                inputs,
                target,
                ..
            } => {
                let t = bit_mask(n, *target);
                let masks: Vec<usize> = inputs.iter().map(|&q| bit_mask(n, q)).collect();
                for i in (0..amps.len()).filter(|i| i & t == 0) {
                    let x = masks
                        .iter()
                        .fold(0usize, |x, &m| (x << 1) | usize::from(i & m != 0));
                    if function.eval(x) {
                        amps.swap(i, i | t);
                    }
                }
            }
            Gate::ControlledBitOracle {
                function,
                control,
                target,
                ..
            } => {
                let c = bit_mask(n, *control);
                let t = bit_mask(n, *target);
                let (f0, f1) = (function.eval(0), function.eval(1));
                for i in (0..amps.len()).filter(|i| i & t == 0) {
                    let flip = if i & c == 0 { f0 } else { f1 };
                    if flip {
                        amps.swap(i, i | t);
                    }
                }
            }
        }
        Ok(())
    }

    /// Marginal distribution over `qubits`, in the listed order.
    pub fn measure_probabilities(&self, qubits: &[usize]) -> Result<Histogram> {
        if qubits.is_empty() {
            return Err(Error::Input("no qubits to measure".into()));
        }
        check_distinct(qubits, self.num_qubits)?;
        let masks: Vec<usize> = qubits
            .iter()
            .map(|&q| bit_mask(self.num_qubits, q))
            .collect();
        let mut acc = vec![0.0f64; 1 << qubits.len()];
        for (i, a) in self.amplitudes.iter().enumerate() {
            let p = a.norm_sqr();
            if p == 0.0 {
                continue;
            }
            let outcome = masks
                .iter()
                .fold(0usize, |o, &m| (o << 1) | usize::from(i & m != 0));
            acc[outcome] += p;
        }
        let entries = acc
            .into_iter()
            .enumerate()
            .filter(|(_, p)| *p > 0.0)
            .map(|(o, p)| (bitstring(o, qubits.len()), p))
            .collect();
        Ok(Histogram {
            width: qubits.len(),
            total_shots: 0,
            entries,
        })
    }
}

/// A computational basis state, e.g. `init_basis_state(2, "10")`.
pub fn init_basis_state(num_qubits: usize, bits: &str) -> Result<StateVector> {
    if bits.len() != num_qubits {
        return Err(Error::Input(format!(
            "bitstring {bits:?} has length {}, expected {num_qubits}",
            bits.len()
        )));
    }
    let index = parse_bitstring(bits)?;
    let mut state = StateVector::zero(num_qubits)?;
    state.amplitudes[0] = Complex64::new(0.0, 0.0);
    state.amplitudes[index] = Complex64::new(1.0, 0.0);
    Ok(state)
}

/// `(|0...0> - |1...1>)/sqrt(2)` on `n` qubits.
pub fn init_entangled_ancilla(n: usize) -> Result<StateVector> {
    if n < 1 {
        return Err(Error::Input(
            "entangled ancilla needs at least one qubit".into(),
        ));
    }
    let mut state = StateVector::zero(n)?;
    let last = state.dim() - 1;
    state.amplitudes[0] = Complex64::new(FRAC_1_SQRT_2, 0.0);
    state.amplitudes[last] = Complex64::new(-FRAC_1_SQRT_2, 0.0);
    Ok(state)
}

pub fn apply_gate(mut state: StateVector, gate: &Gate) -> Result<StateVector> {
    state.apply(gate)?;
    Ok(state)
}

pub fn measure_probabilities(state: &StateVector, qubits: &[usize]) -> Result<Histogram> {
    state.measure_probabilities(qubits)
}

fn check_width(num_qubits: usize) -> Result<()> {
    if num_qubits == 0 || num_qubits > MAX_QUBITS {
        return Err(Error::Input(format!(
            "qubit count must be in 1..={MAX_QUBITS}, got {num_qubits}"
        )));
    }
    Ok(())
}

fn check_distinct(qubits: &[usize], num_qubits: usize) -> Result<()> {
    for (i, &q) in qubits.iter().enumerate() {
        if q >= num_qubits {
            return Err(Error::Input(format!(
                "qubit index {q} out of range for {num_qubits} qubits"
            )));
        }
        if qubits[..i].contains(&q) {
            return Err(Error::Input(format!("qubit {q} listed twice")));
        }
    }
    Ok(())
}

fn parse_bitstring(bits: &str) -> Result<usize> {
    bits.chars().try_fold(0usize, |acc, c| match c {
        '0' => Ok(acc << 1),
        '1' => Ok((acc << 1) | 1),
        other => Err(Error::Input(format!("invalid bit {other:?} in {bits:?}"))),
    })
}

/// `value` as a `width`-character binary string, most significant bit first.
pub fn bitstring(value: usize, width: usize) -> String {
    (0..width)
        .map(|k| {
            if value >> (width - 1 - k) & 1 == 1 {
                '1'
            } else {
                '0'
            }
        })
        .collect()
}

/// All `2^width` bitstrings in lexicographic order.
pub fn all_outcomes(width: usize) -> impl Iterator<Item = String> {
    (0..1usize << width).map(move |v| bitstring(v, width))
}

#[derive(Clone, Debug)]
pub enum Gate {
    H(usize),
    X(usize),
    Y(usize),
    Z(usize),
    Cnot {
        control: usize,
        target: usize,
    },
    Cz(usize, usize),
    /// `|x>|y> -> |x>|y xor f(x)>`; `query` identifies the queried function.
    PermutationOracle {
        function: Arc<BooleanFunction>,
        inputs: Vec<usize>,
        target: usize,
        query: usize,
    },
    /// `|c>|a> -> |c>|a xor f(c)>` for a one-bit `f`.
    ControlledBitOracle {
        function: Arc<BooleanFunction>,
        control: usize,
        target: usize,
        query: usize,
    },
}

impl Gate {
    /// Every qubit the gate acts on.
    pub fn qubits(&self) -> Vec<usize> {
        match self {
            Gate::H(q) | Gate::X(q) | Gate::Y(q) | Gate::Z(q) => vec![*q],
            Gate::Cnot { control, target } => vec![*control, *target],
            Gate::Cz(a, b) => vec![*a, *b],
            Gate::PermutationOracle { inputs, target, .. } => {
                let mut qs = inputs.clone();
                qs.push(*target);
                qs
            }
            Gate::ControlledBitOracle {
                control, target, ..
            } => vec![*control, *target],
        }
    }

    /// The queried function index, for oracle gates.
    pub fn query(&self) -> Option<usize> {
        match self {
            Gate::PermutationOracle { query, .. } | Gate::ControlledBitOracle { query, .. } => {
                Some(*query)
            }
            _ => None,
        }
    }

    pub fn validate(&self, num_qubits: usize) -> Result<()> {
        check_distinct(&self.qubits(), num_qubits)?;
        if let Gate::PermutationOracle {
            function, inputs, ..
        } = self
        {
            if function.arity() != inputs.len() {
                return Err(Error::Input(format!(
                    "oracle arity {} does not match {} input qubits",
                    function.arity(),
                    inputs.len()
                )));
            }
        }
        if let Gate::ControlledBitOracle { function, .. } = self {
            if function.arity() != 1 {
                return Err(Error::Input(
                    "controlled oracle needs a one-bit function".into(),
                ));
            }
        }
        Ok(())
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gate::H(q) => write!(f, "H q{q}"),
            Gate::X(q) => write!(f, "X q{q}"),
            Gate::Y(q) => write!(f, "Y q{q}"),
            Gate::Z(q) => write!(f, "Z q{q}"),
            Gate::Cnot { control, target } => write!(f, "CNOT q{control} -> q{target}"),
            Gate::Cz(a, b) => write!(f, "CZ q{a} q{b}"),
            Gate::PermutationOracle {
                function,
                inputs,
                target,
                ..
            } => write!(f, "U_f[{function}] {inputs:?} -> q{target}"),
            Gate::ControlledBitOracle {
                function,
                control,
                target,
                ..
            } => write!(f, "C-U_f[{function}] q{control} -> q{target}"),
        }
    }
}

/// An ordered gate list starting from `|0...0>` and ending in terminal
/// measurement of `measured_qubits`.
#[derive(Clone, Debug)]
pub struct Circuit {
    num_qubits: usize,
    gates: Vec<Gate>,
    measured_qubits: Vec<usize>,
}

impl Circuit {
    /// A circuit measuring every qubit by default.
    pub fn new(num_qubits: usize) -> Result<Self> {
        check_width(num_qubits)?;
        Ok(Self {
            num_qubits,
            gates: Vec::new(),
            measured_qubits: (0..num_qubits).collect(),
        })
    }

    pub fn push(&mut self, gate: Gate) -> Result<&mut Self> {
        gate.validate(self.num_qubits)?;
        self.gates.push(gate);
        Ok(self)
    }

    pub fn measure(&mut self, qubits: &[usize]) -> Result<&mut Self> {
        if qubits.is_empty() {
            return Err(Error::Input("no qubits to measure".into()));
        }
        check_distinct(qubits, self.num_qubits)?;
        self.measured_qubits = qubits.to_vec();
        Ok(self)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn measured_qubits(&self) -> &[usize] {
        &self.measured_qubits
    }

    pub fn simulate(&self) -> Result<StateVector> {
        self.simulate_from(StateVector::zero(self.num_qubits)?)
    }

    pub fn simulate_from(&self, mut state: StateVector) -> Result<StateVector> {
        if state.num_qubits() != self.num_qubits {
            return Err(Error::Input(format!(
                "circuit has {} qubits but the initial state has {}",
                self.num_qubits,
                state.num_qubits()
            )));
        }
        for gate in &self.gates {
            state.apply(gate)?;
        }
        Ok(state)
    }

    /// Exact distribution over the measured qubits.
    pub fn probabilities(&self) -> Result<Histogram> {
        self.simulate()?
            .measure_probabilities(&self.measured_qubits)
    }
}

/// Outcome bitstrings mapped to probabilities (`total_shots == 0`) or to
/// counts (`total_shots > 0`).
#[derive(Clone, Debug, PartialEq)]
pub struct Histogram {
    width: usize,
    total_shots: u64,
    entries: BTreeMap<String, f64>,
}

impl Histogram {
    /// An exact distribution. Entries must be `width`-bit strings with
    /// nonnegative weights; normalization is checked by consumers.
    pub fn from_probabilities<K: Into<String>>(
        width: usize,
        probabilities: impl IntoIterator<Item = (K, f64)>,
    ) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (k, p) in probabilities {
            let k = k.into();
            check_outcome(&k, width)?;
            if !p.is_finite() || p < 0.0 {
                return Err(Error::Input(format!("invalid probability {p} for {k:?}")));
            }
            *entries.entry(k).or_insert(0.0) += p;
        }
        Ok(Self {
            width,
            total_shots: 0,
            entries,
        })
    }

    pub fn from_counts<K: Into<String>>(
        width: usize,
        counts: impl IntoIterator<Item = (K, u64)>,
    ) -> Result<Self> {
        let mut entries = BTreeMap::new();
        let mut total = 0;
        for (k, c) in counts {
            let k = k.into();
            check_outcome(&k, width)?;
            total += c;
            if c > 0 {
                *entries.entry(k).or_insert(0.0) += c as f64;
            }
        }
        if total == 0 {
            return Err(Error::Input("sampled histogram has no shots".into()));
        }
        Ok(Self {
            width,
            total_shots: total,
            entries,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn total_shots(&self) -> u64 {
        self.total_shots
    }

    pub fn is_exact(&self) -> bool {
        self.total_shots == 0
    }

    /// Raw entries: probabilities or counts depending on `is_exact`.
    pub fn entries(&self) -> &BTreeMap<String, f64> {
        &self.entries
    }

    pub fn count(&self, outcome: &str) -> u64 {
        if self.is_exact() {
            0
        } else {
            self.entries.get(outcome).copied().unwrap_or(0.0) as u64
        }
    }

    pub fn probability(&self, outcome: &str) -> f64 {
        let raw = self.entries.get(outcome).copied().unwrap_or(0.0);
        if self.is_exact() {
            raw
        } else {
            raw / self.total_shots as f64
        }
    }

    /// Probabilities (frequencies for sampled histograms) of the observed outcomes.
    pub fn probabilities(&self) -> BTreeMap<String, f64> {
        self.entries
            .keys()
            .map(|k| (k.clone(), self.probability(k)))
            .collect()
    }

    /// Probabilities over the full `2^width` outcome space, in lexicographic order.
    pub fn completed(&self) -> Vec<(String, f64)> {
        all_outcomes(self.width)
            .map(|o| {
                let p = self.probability(&o);
                (o, p)
            })
            .collect()
    }

    pub fn total_probability(&self) -> f64 {
        self.entries.keys().map(|k| self.probability(k)).sum()
    }

    /// Keeps the bits at `positions` (indices into the outcome string).
    pub fn marginal(&self, positions: &[usize]) -> Result<Histogram> {
        if positions.is_empty() {
            return Err(Error::Input("marginal needs at least one position".into()));
        }
        check_distinct(positions, self.width)?;
        let mut entries = BTreeMap::new();
        for (k, v) in &self.entries {
            let bytes = k.as_bytes();
            let key: String = positions.iter().map(|&p| bytes[p] as char).collect();
            *entries.entry(key).or_insert(0.0) += v;
        }
        Ok(Histogram {
            width: positions.len(),
            total_shots: self.total_shots,
            entries,
        })
    }
}

impl fmt::Display for Histogram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        f.write_str("{")?;
        for (k, v) in &self.entries {
            if !first {
                f.write_str(", ")?;
            }
            first = false;
            if self.is_exact() {
                write!(f, "{k}: {v:.6}")?;
            } else {
                write!(f, "{k}: {}", *v as u64)?;
            }
        }
        f.write_str("}")
    }
}

fn check_outcome(outcome: &str, width: usize) -> Result<()> {
    if outcome.len() != width || !outcome.bytes().all(|b| b == b'0' || b == b'1') {
        return Err(Error::Input(format!(
            "outcome {outcome:?} is not a {width}-bit string"
        )));
    }
    Ok(())
}

/// Seeded RNG used for all sampling in the crate.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Multinomial sampling of `shots` outcomes from an exact distribution.
pub fn sample_shots(hist: &Histogram, shots: u64, seed: u64) -> Result<Histogram> {
    let mut rng = seeded_rng(seed);
    let sampler = OutcomeSampler::new(hist)?;
    if shots < 1 {
        return Err(Error::Input("shots must be at least 1".into()));
    }
    let mut counts = vec![0u64; sampler.outcomes.len()];
    for _ in 0..shots {
        counts[sampler.index.sample(&mut rng)] += 1;
    }
    Histogram::from_counts(hist.width(), sampler.outcomes.into_iter().zip(counts))
}

/// Draws single outcomes from an exact histogram.
#[derive(Clone, Debug)]
pub struct OutcomeSampler {
    outcomes: Vec<String>,
    index: WeightedIndex<f64>,
}

impl OutcomeSampler {
    pub fn new(hist: &Histogram) -> Result<Self> {
        if !hist.is_exact() {
            return Err(Error::Input(
                "sampling requires an exact (theoretical) distribution".into(),
            ));
        }
        let total = hist.total_probability();
        if (total - 1.0).abs() > 1e-6 {
            return Err(Error::Input(format!("distribution sums to {total}, not 1")));
        }
        let (outcomes, weights): (Vec<String>, Vec<f64>) =
            hist.entries().iter().map(|(k, v)| (k.clone(), *v)).unzip();
        let index = WeightedIndex::new(&weights)
            .map_err(|e| Error::Input(format!("cannot sample distribution: {e}")))?;
        Ok(Self { outcomes, index })
    }

    pub fn sample<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> &str {
        &self.outcomes[self.index.sample(rng)]
    }
}
