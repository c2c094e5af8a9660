//! Boolean functions as explicit truth tables, promise classification, and
//! compilation into the oracle gates consumed by the simulator.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::sim::Gate;

/// Largest arity for which every balanced function may be enumerated.
pub const MAX_BALANCED_ENUMERATION_ARITY: usize = 4;

/// Largest supported arity; matches the simulator's qubit bound.
pub const MAX_ARITY: usize = crate::sim::MAX_QUBITS;

/// A function `{0,1}^n -> {0,1}` stored as its truth table.
///
/// `table[x]` is `f(x)` with `x` read as an unsigned integer whose most
/// significant bit is the first input.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BooleanFunction {
    arity: usize,
    table: Vec<bool>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PromiseClass {
    Constant,
    Balanced,
    Neither,
}

impl fmt::Display for PromiseClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            PromiseClass::Constant => "Constant",
            PromiseClass::Balanced => "Balanced",
            PromiseClass::Neither => "Neither",
        };
        f.write_str(s)
    }
}

impl BooleanFunction {
    pub fn new(arity: usize, table: Vec<bool>) -> Result<Self> {
        if arity == 0 || arity > MAX_ARITY {
            return Err(Error::Input(format!(
                "arity must be in 1..={MAX_ARITY}, got {arity}"
            )));
        }
        if table.len() != 1 << arity {
            return Err(Error::Input(format!(
                "truth table for arity {arity} needs {} entries, got {}",
                1usize << arity,
                table.len()
            )));
        }
        Ok(Self { arity, table })
    }

    pub fn constant(arity: usize, value: bool) -> Result<Self> {
        if arity == 0 || arity > MAX_ARITY {
            return Err(Error::Input(format!(
                "arity must be in 1..={MAX_ARITY}, got {arity}"
            )));
        }
        Ok(Self {
            arity,
            table: vec![value; 1 << arity],
        })
    }

    /// Builds the table by evaluating `f` on every input.
    pub fn from_fn(arity: usize, f: impl Fn(usize) -> bool) -> Result<Self> {
        let table = (0..1usize << arity.min(MAX_ARITY)).map(f).collect();
        Self::new(arity, table)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn table(&self) -> &[bool] {
        &self.table
    }

    #[inline]
    pub fn eval(&self, x: usize) -> bool {
        self.table[x]
    }

    pub fn ones(&self) -> usize {
        self.table.iter().filter(|&&b| b).count()
    }

    pub fn classify(&self) -> PromiseClass {
        classify(self)
    }
}

impl FromStr for BooleanFunction {
    type Err = Error;

    /// Parses a `{0,1}` string of length `2^n`, e.g. `"0110"`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let len = s.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::Input(format!(
                "truth table length must be a power of two >= 2, got {len}"
            )));
        }
        let table = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Input(format!(
                    "truth table may only contain '0' and '1', found {other:?}"
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(len.trailing_zeros() as usize, table)
    }
}

impl fmt::Display for BooleanFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.table {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

pub fn classify(f: &BooleanFunction) -> PromiseClass {
    let ones = f.ones();
    let size = f.table.len();
    if ones == 0 || ones == size {
        PromiseClass::Constant
    } else if 2 * ones == size {
        PromiseClass::Balanced
    } else {
        PromiseClass::Neither
    }
}

/// `U_f : |x>|y> -> |x>|y xor f(x)>` with the inputs on `inputs` (first entry
/// is the most significant input bit) and the output on `target`.
pub fn build_uf(
    f: &Arc<BooleanFunction>,
    inputs: &[usize],
    target: usize,
    query: usize,
) -> Result<Gate> {
    if inputs.len() != f.arity() {
        return Err(Error::Input(format!(
            "oracle for arity {} needs {} input qubits, got {}",
            f.arity(),
            f.arity(),
            inputs.len()
        )));
    }
    Ok(Gate::PermutationOracle {
        function: Arc::clone(f),
        inputs: inputs.to_vec(),
        target,
        query,
    })
}

/// `|c>|a> -> |c>|a xor f(c)>` for a one-bit function.
pub fn build_controlled_uf(
    f: &Arc<BooleanFunction>,
    control: usize,
    target: usize,
    query: usize,
) -> Result<Gate> {
    if f.arity() != 1 {
        return Err(Error::Input(format!(
            "controlled oracle needs a one-bit function, got arity {}",
            f.arity()
        )));
    }
    Ok(Gate::ControlledBitOracle {
        function: Arc::clone(f),
        control,
        target,
        query,
    })
}

/// All functions of the given arity in `class`, in increasing table order
/// (table read as a binary number with `f(0)` most significant).
pub fn enumerate_promise_functions(
    arity: usize,
    class: PromiseClass,
) -> Result<Vec<BooleanFunction>> {
    match class {
        PromiseClass::Constant => Ok(vec![
            BooleanFunction::constant(arity, false)?,
            BooleanFunction::constant(arity, true)?,
        ]),
        PromiseClass::Balanced => {
            if arity == 0 || arity > MAX_BALANCED_ENUMERATION_ARITY {
                return Err(Error::Input(format!(
                    "balanced enumeration supports arity 1..={MAX_BALANCED_ENUMERATION_ARITY}, got {arity}"
                )));
            }
            let size = 1usize << arity;
            let half = size as u32 / 2;
            (0u32..1 << size)
                .filter(|mask| mask.count_ones() == half)
                .map(|mask| {
                    let table = (0..size).map(|x| mask >> (size - 1 - x) & 1 == 1).collect();
                    BooleanFunction::new(arity, table)
                })
                .collect()
        }
        PromiseClass::Neither => Err(Error::Input(
            "only Constant and Balanced classes can be enumerated".into(),
        )),
    }
}

/// An ordered list of functions sharing one declared promise.
#[derive(Clone, Debug)]
pub struct FunctionFamily {
    functions: Vec<Arc<BooleanFunction>>,
    promise: PromiseClass,
}

impl FunctionFamily {
    /// Checks the joint promise eagerly from the truth tables.
    pub fn new(functions: Vec<BooleanFunction>) -> Result<Self> {
        let first = functions
            .first()
            .ok_or_else(|| Error::Input("function family is empty".into()))?;
        let arity = first.arity();
        if let Some(bad) = functions.iter().find(|f| f.arity() != arity) {
            return Err(Error::Input(format!(
                "mixed arities in family: {arity} and {}",
                bad.arity()
            )));
        }
        let promise = first.classify();
        for (i, f) in functions.iter().enumerate() {
            let class = f.classify();
            if class == PromiseClass::Neither {
                return Err(Error::Promise(format!(
                    "function {} ({f}) is neither constant nor balanced",
                    i + 1
                )));
            }
            if class != promise {
                return Err(Error::Promise(format!(
                    "function 1 is {promise} but function {} ({f}) is {class}",
                    i + 1
                )));
            }
        }
        Ok(Self {
            functions: functions.into_iter().map(Arc::new).collect(),
            promise,
        })
    }

    pub fn functions(&self) -> &[Arc<BooleanFunction>] {
        &self.functions
    }

    pub fn len(&self) -> usize {
        self.functions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
    }

    pub fn promise(&self) -> PromiseClass {
        self.promise
    }

    pub fn arity(&self) -> usize {
        self.functions[0].arity()
    }

    pub fn all_equal(&self) -> bool {
        self.functions.windows(2).all(|w| w[0] == w[1])
    }
}
