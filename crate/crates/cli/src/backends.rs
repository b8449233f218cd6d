//! Single-point runs and sweep summaries for each backend.

use std::f64::consts::PI;

use num_complex::Complex64;
use oqc_core::photon_stats::{
    closed_form_stats, fock_distribution, stats_csv_header, SqueezedStateParams,
};
use oqc_core::polarization_optics::{
    apply_network, cnot_network, decode_state, encode_basis, encode_state, not_network,
    ModeRegister, ModeSet, OpticalElement,
};
use oqc_core::rds::{propagate, propagate_output, CoupledModeParams, DomainGrid, FieldTriple};
use oqc_core::spin_sim::{
    apply_sequence, build_hamiltonian, compile_gate, gate_fidelity, ideal_gate, measure,
    sequence_unitary, SpinGate, SpinState, TwoSpinHamiltonian,
};
use oqc_core::truth_table::{bits_label, index_to_bits};

use crate::config::{
    BackendParams, GateName, JonesGate, JonesParams, RdsParams, SpinParams, StatsParams,
};
use crate::report;
use crate::table::{Cell, Table};
use crate::CliError;

const MAX_JONES_QUBITS: usize = 12;

pub fn run_point(params: &BackendParams, seed: u64) -> Result<Table, CliError> {
    match params {
        BackendParams::Spin(p) => spin_run(p, seed),
        BackendParams::Jones(p) => jones_run(p),
        BackendParams::Rds(p) => rds_run(p),
        BackendParams::Stats(p) => stats_run(p),
    }
}

/// Column names of a sweep table.
pub fn sweep_columns(params: &BackendParams, parameter: &str) -> Vec<String> {
    let tail: Vec<String> = match params {
        BackendParams::Spin(_) => vec!["fidelity".into(), "p_expected".into()],
        BackendParams::Jones(p) => std::iter::once("power".to_string())
            .chain(
                (0..1usize << p.qubits)
                    .map(|k| format!("p_{}", bits_label(&index_to_bits(k, p.qubits)))),
            )
            .collect(),
        BackendParams::Rds(_) => vec![
            "sh_efficiency".into(),
            "th_efficiency".into(),
            "manley_rowe_drift".into(),
        ],
        BackendParams::Stats(_) => {
            return stats_csv_header().split(',').map(String::from).collect();
        }
    };
    std::iter::once(parameter.to_string()).chain(tail).collect()
}

/// One sweep row for `params`, which already carry the swept `value`.
pub fn sweep_row(params: &BackendParams, value: f64) -> Result<Vec<Cell>, CliError> {
    let tail: Vec<Cell> = match params {
        BackendParams::Spin(p) => {
            let (fidelity, p_expected) = spin_summary(p)?;
            vec![fidelity.into(), p_expected.into()]
        }
        BackendParams::Jones(p) => {
            let reg = jones_output(p)?;
            std::iter::once(reg.power().into())
                .chain(decode_state(&reg).iter().map(|a| Cell::from(a.norm_sqr())))
                .collect()
        }
        BackendParams::Rds(p) => {
            let (fin, grid, cm, step) = rds_setup(p)?;
            let out = propagate_output(&fin, &grid, &cm, step)?;
            let p_in = fin.a1.norm_sqr();
            let mr = fin.manley_rowe();
            vec![
                (out.a2.norm_sqr() / p_in).into(),
                (out.a3.norm_sqr() / p_in).into(),
                ((out.manley_rowe() - mr).abs() / mr).into(),
            ]
        }
        BackendParams::Stats(p) => return stats_row(p),
    };
    Ok(std::iter::once(Cell::from(value)).chain(tail).collect())
}

fn spin_gate(p: &SpinParams) -> SpinGate {
    match p.gate {
        GateName::Not => SpinGate::Not { target: p.target },
        GateName::Cnot => SpinGate::Cnot {
            control: p.control,
            target: p.target,
        },
    }
}

fn spin_input(p: &SpinParams) -> Result<SpinState, CliError> {
    if p.input.len() != 2 {
        return Err(CliError::Config(format!(
            "spin input must be a two-bit label, got {:?}",
            p.input
        )));
    }
    Ok(SpinState::from_label(&p.input)?)
}

fn spin_output(p: &SpinParams, h: &TwoSpinHamiltonian) -> Result<SpinState, CliError> {
    let seq = compile_gate(spin_gate(p), h)?;
    Ok(apply_sequence(&spin_input(p)?, &seq, h)?)
}

fn spin_summary(p: &SpinParams) -> Result<(f64, f64), CliError> {
    let h = build_hamiltonian(p.b0, p.j12)?;
    let gate = spin_gate(p);
    let u = sequence_unitary(&compile_gate(gate, &h)?, &h, 2)?;
    let ideal = ideal_gate(gate, 2);
    let fidelity = gate_fidelity(&ideal, &u)?;
    let input = spin_input(p)?;
    let want = ideal.apply(input.amplitudes());
    let expected = want.iter().position(|a| a.norm_sqr() > 0.5).unwrap_or(0);
    let out = spin_output(p, &h)?;
    Ok((fidelity, out.probabilities()[expected]))
}

fn spin_run(p: &SpinParams, seed: u64) -> Result<Table, CliError> {
    let h = build_hamiltonian(p.b0, p.j12)?;
    let out = spin_output(p, &h)?;
    let hist = measure(&out, seed, p.shots)?;
    let mut t = Table::new(&["basis", "re", "im", "probability", "count"]);
    for (k, a) in out.amplitudes().iter().enumerate() {
        t.push(vec![
            bits_label(&index_to_bits(k, 2)).into(),
            a.re.into(),
            a.im.into(),
            a.norm_sqr().into(),
            hist.counts()[k].into(),
        ]);
    }
    Ok(t)
}

fn jones_input(p: &JonesParams) -> Result<ModeRegister, CliError> {
    if p.qubits == 0 || p.qubits > MAX_JONES_QUBITS {
        return Err(CliError::Config(format!(
            "jones qubits must be in 1..={MAX_JONES_QUBITS}, got {}",
            p.qubits
        )));
    }
    if let Some(amps) = &p.amplitudes {
        if amps.len() != 1 << p.qubits {
            return Err(CliError::Config(format!(
                "jones amplitudes: expected {} entries for {} qubits, got {}",
                1usize << p.qubits,
                p.qubits,
                amps.len()
            )));
        }
        let v: Vec<Complex64> = amps
            .iter()
            .map(|[re, im]| Complex64::new(*re, *im))
            .collect();
        return Ok(encode_state(&v)?);
    }
    let label = p.input.clone().unwrap_or_else(|| "0".repeat(p.qubits));
    if label.len() != p.qubits || !label.chars().all(|c| c == '0' || c == '1') {
        return Err(CliError::Config(format!(
            "jones input must be a {}-bit label, got {label:?}",
            p.qubits
        )));
    }
    let index = usize::from_str_radix(&label, 2).expect("checked bit label");
    Ok(encode_basis(p.qubits, index)?)
}

fn jones_output(p: &JonesParams) -> Result<ModeRegister, CliError> {
    let mut network = Vec::new();
    if let Some(w) = &p.waveplate {
        network.push(OpticalElement::Waveplate {
            retardance: w.retardance,
            fast_axis: w.fast_axis,
            modes: ModeSet::All,
        });
    }
    match p.gate {
        JonesGate::None => {}
        JonesGate::Not => network.extend(not_network(p.qubits, p.target)?),
        JonesGate::Cnot => network.extend(cnot_network(p.qubits, p.control, p.target)?),
    }
    Ok(apply_network(&jones_input(p)?, &network)?)
}

fn jones_run(p: &JonesParams) -> Result<Table, CliError> {
    let reg = jones_output(p)?;
    let mut t = Table::new(&["mode", "polarization", "re", "im", "power"]);
    for (m, pol, a) in reg.slots() {
        t.push(vec![
            m.into(),
            pol.label().into(),
            a.re.into(),
            a.im.into(),
            a.norm_sqr().into(),
        ]);
    }
    Ok(t)
}

/// Input fields, domain grid, coupled-mode parameters and step size.
pub(crate) fn rds_setup(
    p: &RdsParams,
) -> Result<(FieldTriple, DomainGrid, CoupledModeParams, f64), CliError> {
    let cm = CoupledModeParams {
        kappa_a: p.kappa_a,
        kappa_b: p.kappa_b,
        dk_a: p.dk_a,
        dk_b: p.dk_b,
    };
    cm.validate()?;
    if p.steps_per_domain == 0 {
        return Err(CliError::Config("rds steps_per_domain must be >= 1".into()));
    }
    let poling_dk = p.poling_dk.unwrap_or(p.dk_a);
    let lc = (poling_dk != 0.0).then(|| PI / poling_dk.abs());
    let length = match (p.length, lc) {
        (Some(l), _) => l,
        (None, Some(lc)) => lc * p.domains as f64,
        (None, None) => {
            return Err(CliError::Config(
                "rds length is required when the poling mismatch is 0".into(),
            ))
        }
    };
    let grid = if p.poled {
        let lc = lc.ok_or_else(|| {
            CliError::Config("a poled crystal needs a nonzero poling mismatch".into())
        })?;
        oqc_core::rds::make_periodic_grid(length, lc, 1)?
    } else {
        DomainGrid::uniform(length)?
    };
    let shortest_scale = [p.dk_a, p.dk_b]
        .iter()
        .filter(|dk| **dk != 0.0)
        .map(|dk| PI / dk.abs())
        .fold(grid.max_domain_length(), f64::min);
    let step = shortest_scale / p.steps_per_domain as f64;
    let [re, im] = p.input.unwrap_or([p.beam_amplitude, 0.0]);
    let fin = FieldTriple::fundamental(Complex64::new(re, im));
    let p_in = fin.a1.norm_sqr();
    if !p_in.is_finite() || p_in <= 0.0 {
        return Err(CliError::Config(
            "rds input amplitude must be nonzero and finite".into(),
        ));
    }
    Ok((fin, grid, cm, step))
}

fn rds_run(p: &RdsParams) -> Result<Table, CliError> {
    if let Some(gate) = p.gate {
        let r = report::rds_report(report::gate_kind(gate), p)?;
        return Ok(report::reports_table(&[r]));
    }
    let (fin, grid, cm, step) = rds_setup(p)?;
    let prop = propagate(&fin, &grid, &cm, step)?;
    let stride = p.stride.max(1);
    let last = prop.trajectory.len() - 1;
    let mut t = Table::new(&[
        "z",
        "re_a1",
        "im_a1",
        "re_a2",
        "im_a2",
        "re_a3",
        "im_a3",
        "manley_rowe",
    ]);
    for (i, pt) in prop.trajectory.iter().enumerate() {
        if i % stride != 0 && i != last {
            continue;
        }
        let f = &pt.fields;
        t.push(
            [
                pt.z,
                f.a1.re,
                f.a1.im,
                f.a2.re,
                f.a2.im,
                f.a3.re,
                f.a3.im,
                f.manley_rowe(),
            ]
            .into_iter()
            .map(Cell::from)
            .collect(),
        );
    }
    Ok(t)
}

fn squeezed_params(p: &StatsParams) -> Result<SqueezedStateParams, CliError> {
    Ok(SqueezedStateParams::new(
        Complex64::new(p.alpha[0], p.alpha[1]),
        p.r,
        p.theta,
    )?)
}

fn stats_row(p: &StatsParams) -> Result<Vec<Cell>, CliError> {
    let s = squeezed_params(p)?;
    let st = closed_form_stats(&s)?;
    Ok([
        s.alpha.re,
        s.alpha.im,
        s.r,
        s.theta,
        st.mean_n,
        st.var_n,
        st.mandel_q.unwrap_or(f64::NAN),
        st.g2_zero.unwrap_or(f64::NAN),
    ]
    .into_iter()
    .map(Cell::from)
    .collect())
}

fn stats_run(p: &StatsParams) -> Result<Table, CliError> {
    if p.distribution {
        let probs = fock_distribution(&squeezed_params(p)?, p.cutoff)?;
        let mut t = Table::new(&["n", "p"]);
        for (n, pn) in probs.into_iter().enumerate() {
            t.push(vec![n.into(), pn.into()]);
        }
        return Ok(t);
    }
    let cols: Vec<&str> = stats_csv_header().split(',').collect();
    let mut t = Table::new(&cols);
    t.push(stats_row(p)?);
    Ok(t)
}
