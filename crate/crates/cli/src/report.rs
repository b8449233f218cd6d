//! NOT / CNOT truth tables checked on every gate backend.

use num_complex::Complex64;
use oqc_core::polarization_optics::{cnot_gate, decode_state, encode_basis, not_gate};
use oqc_core::rds::{calibrate_thresholds, cnot_gate_rds_reading, not_gate_rds_reading};
use oqc_core::spin_sim::{apply_sequence, build_hamiltonian, compile_gate, SpinGate, SpinState};
use oqc_core::truth_table::{bits_label, bits_to_index, index_to_bits, GateKind, TruthTable};
use serde_json::{json, Value};

use crate::backends::rds_setup;
use crate::config::{Backend, GateName, RdsParams, SpinParams};
use crate::table::{Cell, Table};
use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub input: Vec<bool>,
    pub expected: Vec<bool>,
    pub observed: Vec<bool>,
    /// Backend-specific confidence: outcome probability (spin), power in the
    /// expected slot (jones) or threshold margin (rds).
    pub metric: f64,
}

impl ReportRow {
    pub fn matches(&self) -> bool {
        self.observed == self.expected
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TruthTableReport {
    pub gate: GateKind,
    pub backend: Backend,
    pub metric: &'static str,
    pub rows: Vec<ReportRow>,
    pub pass: bool,
    /// Set when the backend failed before producing rows.
    pub error: Option<String>,
    /// Extra scalars, e.g. logic-level separations.
    pub details: Vec<(&'static str, f64)>,
}

impl TruthTableReport {
    fn new(gate: GateKind, backend: Backend, metric: &'static str, rows: Vec<ReportRow>) -> Self {
        let pass = !rows.is_empty() && rows.iter().all(ReportRow::matches);
        TruthTableReport {
            gate,
            backend,
            metric,
            rows,
            pass,
            error: None,
            details: Vec::new(),
        }
    }

    fn failed(gate: GateKind, backend: Backend, err: &CliError) -> Self {
        TruthTableReport {
            gate,
            backend,
            metric: "",
            rows: Vec::new(),
            pass: false,
            error: Some(err.to_string()),
            details: Vec::new(),
        }
    }

    pub fn to_json_value(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                json!({
                    "input": bits_label(&r.input),
                    "expected": bits_label(&r.expected),
                    "observed": bits_label(&r.observed),
                    self.metric: finite_or_null(r.metric),
                })
            })
            .collect();
        let details: serde_json::Map<String, Value> = self
            .details
            .iter()
            .map(|(k, v)| (k.to_string(), finite_or_null(*v)))
            .collect();
        json!({
            "gate": self.gate.to_string(),
            "backend": self.backend.to_string(),
            "pass": self.pass,
            "error": self.error,
            "details": details,
            "rows": rows,
        })
    }
}

fn finite_or_null(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

pub fn gate_kind(g: GateName) -> GateKind {
    match g {
        GateName::Not => GateKind::Not,
        GateName::Cnot => GateKind::Cnot,
    }
}

fn argmax(probs: impl IntoIterator<Item = f64>) -> usize {
    probs
        .into_iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (k, p)| {
            if p > best.1 {
                (k, p)
            } else {
                best
            }
        })
        .0
}

type Lift = fn(&[bool]) -> Vec<bool>;

/// NOT acts on spin 1 with spin 0 held at 0; CNOT uses spin 0 as control.
pub fn spin_report(gate: GateKind, p: &SpinParams) -> Result<TruthTableReport, CliError> {
    let h = build_hamiltonian(p.b0, p.j12)?;
    let (compiled, lift): (SpinGate, Lift) = match gate {
        GateKind::Not => (SpinGate::Not { target: 1 }, |b| vec![false, b[0]]),
        GateKind::Cnot => (
            SpinGate::Cnot {
                control: 0,
                target: 1,
            },
            |b| b.to_vec(),
        ),
    };
    let seq = compile_gate(compiled, &h)?;
    let mut rows = Vec::new();
    for row in TruthTable::for_gate(gate).rows {
        let input = SpinState::basis(2, bits_to_index(&lift(&row.input)))?;
        let probs = apply_sequence(&input, &seq, &h)?.probabilities();
        let observed_full = index_to_bits(argmax(probs.iter().copied()), 2);
        let observed = match gate {
            GateKind::Not => vec![observed_full[1]],
            GateKind::Cnot => observed_full,
        };
        rows.push(ReportRow {
            metric: probs[bits_to_index(&lift(&row.output))],
            input: row.input,
            expected: row.output,
            observed,
        });
    }
    Ok(TruthTableReport::new(gate, Backend::Spin, "fidelity", rows))
}

/// NOT on a single polarization qubit; CNOT with a spatial control and a
/// polarization target.
pub fn jones_report(gate: GateKind) -> Result<TruthTableReport, CliError> {
    let qubits = match gate {
        GateKind::Not => 1,
        GateKind::Cnot => 2,
    };
    let mut rows = Vec::new();
    for row in TruthTable::for_gate(gate).rows {
        let reg = encode_basis(qubits, bits_to_index(&row.input))?;
        let out = match gate {
            GateKind::Not => not_gate(&reg, 0)?,
            GateKind::Cnot => cnot_gate(&reg, 0, 1)?,
        };
        let amps: Vec<Complex64> = decode_state(&out);
        let observed = index_to_bits(argmax(amps.iter().map(|a| a.norm_sqr())), qubits);
        rows.push(ReportRow {
            metric: amps[bits_to_index(&row.output)].norm_sqr(),
            input: row.input,
            expected: row.output,
            observed,
        });
    }
    Ok(TruthTableReport::new(gate, Backend::Jones, "power", rows))
}

/// Calibrates both channels on the configured crystal, then reads every row.
pub fn rds_report(gate: GateKind, p: &RdsParams) -> Result<TruthTableReport, CliError> {
    let (_, grid, cm, _) = rds_setup(p)?;
    let cal = calibrate_thresholds(&grid, &cm, p.beam_amplitude)?;
    let mut rows = Vec::new();
    for row in TruthTable::for_gate(gate).rows {
        let (observed, metric) = match gate {
            GateKind::Not => {
                let r = not_gate_rds_reading(row.input[0], &cal, &grid, &cm)?;
                (vec![r.bit], r.margin(row.output[0]))
            }
            GateKind::Cnot => {
                let (y1, r) = cnot_gate_rds_reading(row.input[0], row.input[1], &cal, &grid, &cm)?;
                // Target 1 is read as TH power below threshold.
                (vec![y1, r.bit], r.margin(!row.output[1]))
            }
        };
        rows.push(ReportRow {
            input: row.input,
            expected: row.output,
            observed,
            metric,
        });
    }
    let mut report = TruthTableReport::new(gate, Backend::Rds, "margin", rows);
    let levels = match gate {
        GateKind::Not => cal.sh_levels,
        GateKind::Cnot => cal.th_levels,
    };
    if let Some(l) = levels {
        report.details.push(("separation", l.separation()));
        report.details.push(("threshold", l.threshold));
    }
    Ok(report)
}

fn report_for(backend: Backend, gate: GateKind) -> Result<TruthTableReport, CliError> {
    match backend {
        Backend::Spin => spin_report(gate, &SpinParams::default()),
        Backend::Jones => jones_report(gate),
        Backend::Rds => rds_report(gate, &RdsParams::default()),
        Backend::Stats => Err(CliError::Config("stats is not a gate backend".into())),
    }
}

/// NOT and CNOT reports for each backend with default parameters. A failing
/// backend yields a failed report without touching the others.
pub fn verify_truth_tables(backends: &[Backend]) -> Vec<TruthTableReport> {
    let jobs: Vec<(Backend, GateKind)> = backends
        .iter()
        .flat_map(|&b| [(b, GateKind::Not), (b, GateKind::Cnot)])
        .collect();
    oqc_core::parallel::map(&jobs, |&(b, g)| {
        report_for(b, g).unwrap_or_else(|e| TruthTableReport::failed(g, b, &e))
    })
}

pub fn reports_table(reports: &[TruthTableReport]) -> Table {
    let mut t = Table::new(&[
        "backend", "gate", "input", "expected", "observed", "metric", "value", "pass", "error",
    ]);
    for r in reports {
        if let Some(err) = &r.error {
            t.push(vec![
                r.backend.to_string().into(),
                r.gate.to_string().into(),
                "".into(),
                "".into(),
                "".into(),
                "".into(),
                Cell::Num(f64::NAN),
                "false".into(),
                csv_safe(err).into(),
            ]);
            continue;
        }
        for row in &r.rows {
            t.push(vec![
                r.backend.to_string().into(),
                r.gate.to_string().into(),
                bits_label(&row.input).into(),
                bits_label(&row.expected).into(),
                bits_label(&row.observed).into(),
                r.metric.into(),
                row.metric.into(),
                row.matches().to_string().into(),
                "".into(),
            ]);
        }
    }
    t
}

fn csv_safe(s: &str) -> String {
    s.replace([',', '\n'], ";")
}
