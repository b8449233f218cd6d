//! The NOT and CNOT tables every backend is scored against.
//!
//! NOT is the involutive bit flip (0→1, 1→0). CNOT passes the control
//! through and writes `x1 ⊕ x2` to the target.

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateKind {
    Not,
    Cnot,
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GateKind::Not => f.write_str("NOT"),
            GateKind::Cnot => f.write_str("CNOT"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruthRow {
    pub input: Vec<bool>,
    pub output: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruthTable {
    pub gate: GateKind,
    pub rows: Vec<TruthRow>,
}

impl TruthTable {
    pub fn for_gate(gate: GateKind) -> Self {
        match gate {
            GateKind::Not => Self::not(),
            GateKind::Cnot => Self::cnot(),
        }
    }

    pub fn not() -> Self {
        let rows = [false, true]
            .into_iter()
            .map(|x| TruthRow {
                input: vec![x],
                output: vec![!x],
            })
            .collect();
        TruthTable {
            gate: GateKind::Not,
            rows,
        }
    }

    pub fn cnot() -> Self {
        let mut rows = Vec::with_capacity(4);
        for x1 in [false, true] {
            for x2 in [false, true] {
                rows.push(TruthRow {
                    input: vec![x1, x2],
                    output: vec![x1, x1 ^ x2],
                });
            }
        }
        TruthTable {
            gate: GateKind::Cnot,
            rows,
        }
    }

    pub fn expected(&self, input: &[bool]) -> Option<&[bool]> {
        self.rows
            .iter()
            .find(|r| r.input == input)
            .map(|r| r.output.as_slice())
    }
}

/// Renders bits as a `0`/`1` string, most significant first.
pub fn bits_label(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

/// Basis index of a bit string, first bit most significant.
pub fn bits_to_index(bits: &[bool]) -> usize {
    bits.iter().fold(0, |acc, &b| (acc << 1) | b as usize)
}

pub fn index_to_bits(index: usize, width: usize) -> Vec<bool> {
    (0..width)
        .map(|i| (index >> (width - 1 - i)) & 1 == 1)
        .collect()
}
