//! End-to-end runs of the three query algorithms, verdict decoding, and
//! query accounting for the quantum-versus-classical comparison.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::oracles::{
    build_controlled_uf, build_uf, BooleanFunction, FunctionFamily, PromiseClass,
};
use crate::sim::{init_basis_state, init_entangled_ancilla, Circuit, Gate, Histogram, StateVector};

/// Probabilities within this distance of 0 or 1 count as exact.
pub const DECISION_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PromiseVerdict {
    Constant,
    Balanced,
}

impl From<PromiseVerdict> for PromiseClass {
    fn from(v: PromiseVerdict) -> Self {
        match v {
            PromiseVerdict::Constant => PromiseClass::Constant,
            PromiseVerdict::Balanced => PromiseClass::Balanced,
        }
    }
}

impl fmt::Display for PromiseVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        PromiseClass::from(*self).fmt(f)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EqualityVerdict {
    Equal,
    Unequal,
    /// Only one function was examined.
    NotApplicable,
}

impl fmt::Display for EqualityVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EqualityVerdict::Equal => "Equal",
            EqualityVerdict::Unequal => "Unequal",
            EqualityVerdict::NotApplicable => "n/a",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Verdict {
    pub promise: PromiseVerdict,
    pub equality: EqualityVerdict,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.equality {
            EqualityVerdict::NotApplicable => write!(f, "{}", self.promise),
            eq => write!(f, "{}, {eq}", self.promise),
        }
    }
}

/// Oracle calls per function index.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct QueryLedger {
    calls: BTreeMap<usize, u64>,
}

impl QueryLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&mut self, function: usize) {
        *self.calls.entry(function).or_insert(0) += 1;
    }

    pub fn calls(&self, function: usize) -> u64 {
        self.calls.get(&function).copied().unwrap_or(0)
    }

    pub fn per_function(&self) -> &BTreeMap<usize, u64> {
        &self.calls
    }

    pub fn total(&self) -> u64 {
        self.calls.values().sum()
    }
}

/// Result of a quantum run: verdict, queries spent, and the exact
/// distribution over the measured qubits.
#[derive(Clone, Debug)]
pub struct AlgorithmRun {
    pub verdict: Verdict,
    pub ledger: QueryLedger,
    pub histogram: Histogram,
}

/// Result of the two-function extension. Equality is reported only when the
/// correlated-ancilla probability is exactly 0 or 1.
#[derive(Clone, Debug)]
pub struct TwoFunctionRun {
    pub promise: PromiseVerdict,
    pub equality: Option<EqualityVerdict>,
    pub register_zero_probability: f64,
    pub correlated_probability: f64,
    pub ledger: QueryLedger,
    pub histogram: Histogram,
}

#[derive(Clone, Debug)]
pub struct ClassicalRun {
    pub verdict: Verdict,
    pub ledger: QueryLedger,
}

/// Applies the circuit to `initial`, logging every oracle gate.
pub fn execute(
    circuit: &Circuit,
    initial: StateVector,
    ledger: &mut QueryLedger,
) -> Result<StateVector> {
    if initial.num_qubits() != circuit.num_qubits() {
        return Err(Error::Input(format!(
            "circuit has {} qubits but the initial state has {}",
            circuit.num_qubits(),
            initial.num_qubits()
        )));
    }
    let mut state = initial;
    for gate in circuit.gates() {
        state.apply(gate)?;
        if let Some(q) = gate.query() {
            ledger.record(q);
        }
    }
    Ok(state)
}

/// Maps a probability that must be exactly 0 or 1 to a boolean.
pub fn decide(probability: f64, what: &str) -> Result<bool> {
    if probability >= 1.0 - DECISION_TOLERANCE {
        Ok(true)
    } else if probability <= DECISION_TOLERANCE {
        Ok(false)
    } else {
        Err(Error::Consistency(format!(
            "{what} has probability {probability}, expected 0 or 1"
        )))
    }
}

fn zeros(n: usize) -> String {
    "0".repeat(n)
}

fn ones(n: usize) -> String {
    "1".repeat(n)
}

fn promise_from_zero_probability(p: f64, what: &str) -> Result<PromiseVerdict> {
    Ok(if decide(p, what)? {
        PromiseVerdict::Constant
    } else {
        PromiseVerdict::Balanced
    })
}

/// Circuit for the classic single-function test: `n` query qubits and one
/// answer qubit (last), which starts in `|1>`.
pub fn deutsch_jozsa_circuit(f: &Arc<BooleanFunction>) -> Result<Circuit> {
    let n = f.arity();
    let mut circuit = Circuit::new(n + 1)?;
    for q in 0..=n {
        circuit.push(Gate::H(q))?;
    }
    let inputs: Vec<usize> = (0..n).collect();
    circuit.push(build_uf(f, &inputs, n, 0)?)?;
    for q in 0..n {
        circuit.push(Gate::H(q))?;
    }
    circuit.measure(&inputs)?;
    Ok(circuit)
}

pub fn run_deutsch_jozsa(f: &BooleanFunction) -> Result<AlgorithmRun> {
    if f.classify() == PromiseClass::Neither {
        return Err(Error::Promise(format!(
            "{f} is neither constant nor balanced"
        )));
    }
    let n = f.arity();
    let f = Arc::new(f.clone());
    let circuit = deutsch_jozsa_circuit(&f)?;
    let initial = init_basis_state(n + 1, &format!("{}1", zeros(n)))?;
    let mut ledger = QueryLedger::new();
    let state = execute(&circuit, initial, &mut ledger)?;
    let histogram = state.measure_probabilities(circuit.measured_qubits())?;
    let promise = promise_from_zero_probability(
        histogram.probability(&zeros(n)),
        "all-zeros query register",
    )?;
    Ok(AlgorithmRun {
        verdict: Verdict {
            promise,
            equality: EqualityVerdict::NotApplicable,
        },
        ledger,
        histogram,
    })
}

/// Circuit for the `k`-function variant: register qubit 0, ancilla `i + 1`
/// answering for function `i`. The entangled ancilla is supplied as part of
/// the initial state.
pub fn generalized_circuit(family: &FunctionFamily) -> Result<Circuit> {
    let k = family.len();
    let mut circuit = Circuit::new(k + 1)?;
    circuit.push(Gate::H(0))?;
    for (i, f) in family.functions().iter().enumerate() {
        circuit.push(build_controlled_uf(f, 0, i + 1, i)?)?;
    }
    circuit.push(Gate::H(0))?;
    Ok(circuit)
}

fn require_one_bit(family: &FunctionFamily) -> Result<()> {
    if family.arity() != 1 {
        return Err(Error::Input(format!(
            "expected one-bit functions, got arity {}",
            family.arity()
        )));
    }
    Ok(())
}

pub fn run_generalized(family: &FunctionFamily) -> Result<AlgorithmRun> {
    require_one_bit(family)?;
    let k = family.len();
    let circuit = generalized_circuit(family)?;
    let initial = init_basis_state(1, "0")?.tensor(&init_entangled_ancilla(k)?)?;
    let mut ledger = QueryLedger::new();
    let state = execute(&circuit, initial, &mut ledger)?;
    let histogram = state.measure_probabilities(circuit.measured_qubits())?;

    let register = histogram.marginal(&[0])?;
    let promise = promise_from_zero_probability(register.probability("0"), "register outcome 0")?;

    let equality = if k == 1 {
        EqualityVerdict::NotApplicable
    } else {
        let ancilla: Vec<usize> = (1..=k).collect();
        let answers = histogram.marginal(&ancilla)?;
        let correlated = answers.probability(&zeros(k)) + answers.probability(&ones(k));
        if decide(correlated, "correlated ancilla outcome")? {
            EqualityVerdict::Equal
        } else {
            EqualityVerdict::Unequal
        }
    };
    Ok(AlgorithmRun {
        verdict: Verdict { promise, equality },
        ledger,
        histogram,
    })
}

/// Circuit for the two-function extension on `n`-bit inputs: register
/// qubits `0..n`, ancilla `n` answers for `f` and `n + 1` for `g`.
pub fn two_function_circuit(f: &Arc<BooleanFunction>, g: &Arc<BooleanFunction>) -> Result<Circuit> {
    let n = f.arity();
    let mut circuit = Circuit::new(n + 2)?;
    for q in 0..n {
        circuit.push(Gate::H(q))?;
    }
    let inputs: Vec<usize> = (0..n).collect();
    circuit.push(build_uf(f, &inputs, n, 0)?)?;
    circuit.push(build_uf(g, &inputs, n + 1, 1)?)?;
    for q in 0..n {
        circuit.push(Gate::H(q))?;
    }
    Ok(circuit)
}

pub fn run_two_function_extension(
    f: &BooleanFunction,
    g: &BooleanFunction,
) -> Result<TwoFunctionRun> {
    let family = FunctionFamily::new(vec![f.clone(), g.clone()])?;
    let [f, g] = family.functions() else {
        unreachable!("family built from two functions");
    };
    let n = f.arity();
    let circuit = two_function_circuit(f, g)?;
    let initial = init_basis_state(n, &zeros(n))?.tensor(&init_entangled_ancilla(2)?)?;
    let mut ledger = QueryLedger::new();
    let state = execute(&circuit, initial, &mut ledger)?;
    let histogram = state.measure_probabilities(circuit.measured_qubits())?;

    let register: Vec<usize> = (0..n).collect();
    let register_zero_probability = histogram.marginal(&register)?.probability(&zeros(n));
    let promise = promise_from_zero_probability(register_zero_probability, "all-zeros register")?;

    let answers = histogram.marginal(&[n, n + 1])?;
    let correlated_probability = answers.probability("00") + answers.probability("11");
    let equality = if correlated_probability >= 1.0 - DECISION_TOLERANCE {
        Some(EqualityVerdict::Equal)
    } else if correlated_probability <= DECISION_TOLERANCE {
        Some(EqualityVerdict::Unequal)
    } else {
        None
    };
    Ok(TwoFunctionRun {
        promise,
        equality,
        register_zero_probability,
        correlated_probability,
        ledger,
        histogram,
    })
}

/// `(m, p)` where `p = |{x : f(x) = g(x)}|` and `m = |{x : f(x) = g(x) = 0}|`.
pub fn compute_m_p(f: &BooleanFunction, g: &BooleanFunction) -> Result<(usize, usize)> {
    if f.arity() != g.arity() {
        return Err(Error::Input(format!(
            "arity mismatch: {} vs {}",
            f.arity(),
            g.arity()
        )));
    }
    let agree = f.table().iter().zip(g.table()).filter(|(a, b)| a == b);
    let (m, p) = agree.fold((0, 0), |(m, p), (a, _)| (m + usize::from(!a), p + 1));
    Ok((m, p))
}

/// Truth-table access that bills every lookup to a ledger.
pub struct ClassicalOracle<'a> {
    family: &'a FunctionFamily,
    ledger: QueryLedger,
}

impl<'a> ClassicalOracle<'a> {
    pub fn new(family: &'a FunctionFamily) -> Self {
        Self {
            family,
            ledger: QueryLedger::new(),
        }
    }

    pub fn query(&mut self, function: usize, x: usize) -> bool {
        self.ledger.record(function);
        self.family.functions()[function].eval(x)
    }

    pub fn into_ledger(self) -> QueryLedger {
        self.ledger
    }
}

/// Reads `f1(0)`, `f1(1)` and `f_i(0)` for the remaining functions; under the
/// joint promise that is enough to settle both questions.
pub fn run_classical_baseline(family: &FunctionFamily) -> Result<ClassicalRun> {
    require_one_bit(family)?;
    let mut oracle = ClassicalOracle::new(family);
    let f0 = oracle.query(0, 0);
    let f1 = oracle.query(0, 1);
    let promise = if f0 == f1 {
        PromiseVerdict::Constant
    } else {
        PromiseVerdict::Balanced
    };
    let equality = if family.len() == 1 {
        EqualityVerdict::NotApplicable
    } else {
        let mut equal = true;
        for i in 1..family.len() {
            equal &= oracle.query(i, 0) == f0;
        }
        if equal {
            EqualityVerdict::Equal
        } else {
            EqualityVerdict::Unequal
        }
    };
    Ok(ClassicalRun {
        verdict: Verdict { promise, equality },
        ledger: oracle.into_ledger(),
    })
}
