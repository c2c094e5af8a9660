//! The four two-function experiment cases and their three-qubit circuit.
//!
//! Qubit 0 is the register, qubits 1 and 2 answer for `f` and `g`. After the
//! controlled oracles, `CNOT(1 -> 2)` writes `f(c) xor g(c)` into qubit 2,
//! and `H`, `X` on qubit 1 return its `|0> - |1>` residue to `|0>`. The
//! ideal outcome is therefore `r 0 e` with `r = 1` for balanced functions
//! and `e = 1` for unequal ones.

use std::sync::Arc;

use crate::algorithms::{EqualityVerdict, PromiseVerdict, Verdict};
use crate::error::{Error, Result};
use crate::oracles::{build_controlled_uf, BooleanFunction, FunctionFamily};
use crate::sim::{Circuit, Gate};

#[derive(Clone, Debug)]
pub struct CaseSpec {
    pub case_id: u8,
    pub f: BooleanFunction,
    pub g: BooleanFunction,
    pub expected: Verdict,
}

impl CaseSpec {
    pub fn get(case_id: u8) -> Result<Self> {
        let (f, g, promise, equality) = match case_id {
            1 => ("01", "01", PromiseVerdict::Balanced, EqualityVerdict::Equal),
            2 => (
                "01",
                "10",
                PromiseVerdict::Balanced,
                EqualityVerdict::Unequal,
            ),
            3 => ("00", "00", PromiseVerdict::Constant, EqualityVerdict::Equal),
            4 => (
                "00",
                "11",
                PromiseVerdict::Constant,
                EqualityVerdict::Unequal,
            ),
            other => {
                return Err(Error::Input(format!(
                    "unknown case {other}; expected 1..=4"
                )))
            }
        };
        Ok(Self {
            case_id,
            f: f.parse()?,
            g: g.parse()?,
            expected: Verdict { promise, equality },
        })
    }

    pub fn all() -> Vec<Self> {
        (1..=4)
            .map(|k| Self::get(k).expect("cases 1..=4 exist"))
            .collect()
    }

    pub fn family(&self) -> Result<FunctionFamily> {
        FunctionFamily::new(vec![self.f.clone(), self.g.clone()])
    }

    pub fn description(&self) -> String {
        let promise = match self.expected.promise {
            PromiseVerdict::Constant => "constant",
            PromiseVerdict::Balanced => "balanced",
        };
        let equality = match self.expected.equality {
            EqualityVerdict::Equal => "equal",
            _ => "unequal",
        };
        format!("{promise} and {equality} (f = {}, g = {})", self.f, self.g)
    }

    pub fn circuit(&self) -> Result<Circuit> {
        case_circuit(&self.f, &self.g)
    }
}

/// Gate-level circuit from `|000>`, including preparation of the
/// `(|00> - |11>)/sqrt(2)` answer pair.
pub fn case_circuit(f: &BooleanFunction, g: &BooleanFunction) -> Result<Circuit> {
    let f = Arc::new(f.clone());
    let g = Arc::new(g.clone());
    let mut c = Circuit::new(3)?;
    c.push(Gate::X(1))?
        .push(Gate::H(1))?
        .push(Gate::Cnot {
            control: 1,
            target: 2,
        })?
        .push(Gate::H(0))?
        .push(build_controlled_uf(&f, 0, 1, 0)?)?
        .push(build_controlled_uf(&g, 0, 2, 1)?)?
        .push(Gate::H(0))?
        .push(Gate::Cnot {
            control: 1,
            target: 2,
        })?
        .push(Gate::H(1))?
        .push(Gate::X(1))?;
    c.measure(&[0, 1, 2])?;
    Ok(c)
}

/// Reads `(promise, equality)` off an ideal three-bit outcome `r 0 e`.
pub fn decode_outcome(outcome: &str) -> Result<Verdict> {
    let bits = outcome.as_bytes();
    if bits.len() != 3 || bits[1] != b'0' {
        return Err(Error::Consistency(format!(
            "outcome {outcome:?} is not of the form r0e"
        )));
    }
    let promise = match bits[0] {
        b'0' => PromiseVerdict::Constant,
        b'1' => PromiseVerdict::Balanced,
        _ => return Err(Error::Input(format!("invalid outcome {outcome:?}"))),
    };
    let equality = match bits[2] {
        b'0' => EqualityVerdict::Equal,
        b'1' => EqualityVerdict::Unequal,
        _ => return Err(Error::Input(format!("invalid outcome {outcome:?}"))),
    };
    Ok(Verdict { promise, equality })
}
