//! Qubits carried by the spatial modes and polarization of a coherent beam.
//!
//! An n-qubit register uses `M = 2^(n-1)` spatial modes, each with an H and a
//! V amplitude. The last qubit is the polarization (H = 0, V = 1); the leading
//! qubits form the binary spatial-mode index, so basis state `k` lives at
//! spatial mode `k >> 1` with polarization `k & 1`. Three qubits need four
//! spatial modes and `a|000⟩ + b|111⟩` occupies (mode 0, H) and (mode 3, V).
//!
//! The PBS transmits H and reflects V with no loss and no reflection phase.
//! A [`OpticalElement::PbsSwap`] on a mode pair therefore leaves both H
//! amplitudes in place and exchanges the V amplitudes.
//!
//! This is a coherent-amplitude model: no photon counting, no postselection.

use std::f64::consts::{FRAC_PI_4, PI};

use num_complex::Complex64;

use crate::error::{ensure_finite, Error, Result};

const NORM_INPUT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Polarization {
    H,
    V,
}

impl Polarization {
    pub fn index(self) -> usize {
        match self {
            Polarization::H => 0,
            Polarization::V => 1,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Polarization::H => "H",
            Polarization::V => "V",
        }
    }
}

/// 2×2 complex matrix acting on `(H, V)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JonesMatrix(pub [[Complex64; 2]; 2]);

impl JonesMatrix {
    pub fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        JonesMatrix([[one, zero], [zero, one]])
    }

    /// Real rotation by `angle`.
    pub fn rotation(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        JonesMatrix([
            [Complex64::new(c, 0.0), Complex64::new(-s, 0.0)],
            [Complex64::new(s, 0.0), Complex64::new(c, 0.0)],
        ])
    }

    pub fn mul(&self, other: &JonesMatrix) -> JonesMatrix {
        let a = &self.0;
        let b = &other.0;
        let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
        for (r, row) in out.iter_mut().enumerate() {
            for (c, x) in row.iter_mut().enumerate() {
                *x = a[r][0] * b[0][c] + a[r][1] * b[1][c];
            }
        }
        JonesMatrix(out)
    }

    pub fn dagger(&self) -> JonesMatrix {
        let m = &self.0;
        JonesMatrix([
            [m[0][0].conj(), m[1][0].conj()],
            [m[0][1].conj(), m[1][1].conj()],
        ])
    }

    pub fn det(&self) -> Complex64 {
        let m = &self.0;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    pub fn apply(&self, h: Complex64, v: Complex64) -> (Complex64, Complex64) {
        let m = &self.0;
        (m[0][0] * h + m[0][1] * v, m[1][0] * h + m[1][1] * v)
    }

    pub fn max_abs_diff(&self, other: &JonesMatrix) -> f64 {
        let mut d: f64 = 0.0;
        for r in 0..2 {
            for c in 0..2 {
                d = d.max((self.0[r][c] - other.0[r][c]).norm());
            }
        }
        d
    }

    pub fn unitarity_error(&self) -> f64 {
        self.dagger()
            .mul(self)
            .max_abs_diff(&JonesMatrix::identity())
    }

    /// Divides out `sqrt(det)` so that the result has unit determinant.
    pub fn su2_normalized(&self) -> JonesMatrix {
        let scale = self.det().sqrt().inv();
        let m = &self.0;
        JonesMatrix([
            [m[0][0] * scale, m[0][1] * scale],
            [m[1][0] * scale, m[1][1] * scale],
        ])
    }
}

/// Which spatial modes an element acts on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModeSet {
    All,
    Only(Vec<usize>),
}

impl ModeSet {
    fn resolve(&self, modes: usize) -> Result<Vec<usize>> {
        match self {
            ModeSet::All => Ok((0..modes).collect()),
            ModeSet::Only(list) => {
                let mut out = list.clone();
                out.sort_unstable();
                out.dedup();
                if let Some(&bad) = out.iter().find(|&&m| m >= modes) {
                    return Err(Error::IndexOutOfRange {
                        what: "spatial mode",
                        index: bad,
                        limit: modes,
                    });
                }
                Ok(out)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum OpticalElement {
    Waveplate {
        retardance: f64,
        fast_axis: f64,
        modes: ModeSet,
    },
    Rotator {
        angle: f64,
        modes: ModeSet,
    },
    PbsSwap {
        a: usize,
        b: usize,
    },
}

impl OpticalElement {
    pub fn half_wave_45(modes: ModeSet) -> Self {
        OpticalElement::Waveplate {
            retardance: PI,
            fast_axis: FRAC_PI_4,
            modes,
        }
    }

    /// The spatial modes this element reads or writes.
    pub fn support(&self, modes: usize) -> Result<Vec<usize>> {
        match self {
            OpticalElement::Waveplate { modes: set, .. }
            | OpticalElement::Rotator { modes: set, .. } => set.resolve(modes),
            OpticalElement::PbsSwap { a, b } => {
                let mut v = vec![*a, *b];
                v.sort_unstable();
                v.dedup();
                Ok(v)
            }
        }
    }
}

/// Jones matrix of a waveplate or rotator; `None` for the PBS, which couples
/// two spatial modes.
pub fn element_matrix(e: &OpticalElement) -> Option<JonesMatrix> {
    match *e {
        OpticalElement::Waveplate {
            retardance,
            fast_axis,
            ..
        } => Some(waveplate(retardance, fast_axis)),
        OpticalElement::Rotator { angle, .. } => Some(JonesMatrix::rotation(angle)),
        OpticalElement::PbsSwap { .. } => None,
    }
}

/// `R(θ)·diag(1, e^{iδ})·R(-θ)`.
pub fn waveplate(retardance: f64, fast_axis: f64) -> JonesMatrix {
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let retarder = JonesMatrix([[one, zero], [zero, Complex64::from_polar(1.0, retardance)]]);
    JonesMatrix::rotation(fast_axis)
        .mul(&retarder)
        .mul(&JonesMatrix::rotation(-fast_axis))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModeRegister {
    qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl ModeRegister {
    /// All-zero register (no light).
    pub fn dark(qubits: usize) -> Result<Self> {
        if qubits == 0 {
            return Err(Error::param("qubits", "need at least one qubit"));
        }
        Ok(ModeRegister {
            qubits,
            amplitudes: vec![Complex64::new(0.0, 0.0); 1 << qubits],
        })
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn spatial_modes(&self) -> usize {
        self.amplitudes.len() / 2
    }

    fn slot(mode: usize, pol: Polarization) -> usize {
        2 * mode + pol.index()
    }

    pub fn amplitude(&self, mode: usize, pol: Polarization) -> Complex64 {
        self.amplitudes[Self::slot(mode, pol)]
    }

    pub fn set_amplitude(
        &mut self,
        mode: usize,
        pol: Polarization,
        value: Complex64,
    ) -> Result<()> {
        let modes = self.spatial_modes();
        if mode >= modes {
            return Err(Error::IndexOutOfRange {
                what: "spatial mode",
                index: mode,
                limit: modes,
            });
        }
        self.amplitudes[Self::slot(mode, pol)] = value;
        Ok(())
    }

    pub fn power(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `(mode, polarization, amplitude)` for every slot, mode-major.
    pub fn slots(&self) -> impl Iterator<Item = (usize, Polarization, Complex64)> + '_ {
        self.amplitudes.iter().enumerate().map(|(i, &a)| {
            let pol = if i & 1 == 0 {
                Polarization::H
            } else {
                Polarization::V
            };
            (i >> 1, pol, a)
        })
    }

    /// CSV dump: `mode,polarization,re,im,power`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("mode,polarization,re,im,power\n");
        for (m, p, a) in self.slots() {
            out.push_str(&format!(
                "{m},{},{},{},{}\n",
                p.label(),
                crate::fmt_f64(a.re),
                crate::fmt_f64(a.im),
                crate::fmt_f64(a.norm_sqr())
            ));
        }
        out
    }
}

/// Places qubit amplitudes on the mode register.
pub fn encode_state(qubit_amplitudes: &[Complex64]) -> Result<ModeRegister> {
    let len = qubit_amplitudes.len();
    if len < 2 || !len.is_power_of_two() {
        return Err(Error::param(
            "qubit_amplitudes",
            format!("length must be 2^n with n >= 1, got {len}"),
        ));
    }
    let norm_sq: f64 = qubit_amplitudes.iter().map(|a| a.norm_sqr()).sum();
    if !norm_sq.is_finite() || (norm_sq - 1.0).abs() > NORM_INPUT_TOL {
        return Err(Error::NotNormalized { norm_sq });
    }
    let mut reg = ModeRegister::dark(len.trailing_zeros() as usize)?;
    for (k, &a) in qubit_amplitudes.iter().enumerate() {
        let pol = if k & 1 == 0 {
            Polarization::H
        } else {
            Polarization::V
        };
        reg.set_amplitude(k >> 1, pol, a)?;
    }
    Ok(reg)
}

pub fn encode_basis(qubits: usize, index: usize) -> Result<ModeRegister> {
    let dim = 1usize << qubits;
    if qubits == 0 || index >= dim {
        return Err(Error::IndexOutOfRange {
            what: "basis state",
            index,
            limit: dim,
        });
    }
    let mut amps = vec![Complex64::new(0.0, 0.0); dim];
    amps[index] = Complex64::new(1.0, 0.0);
    encode_state(&amps)
}

/// Inverse of [`encode_state`].
pub fn decode_state(reg: &ModeRegister) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); reg.amplitudes.len()];
    for (m, p, a) in reg.slots() {
        out[(m << 1) | p.index()] = a;
    }
    out
}

pub fn apply_element(reg: &ModeRegister, e: &OpticalElement) -> Result<ModeRegister> {
    let modes = reg.spatial_modes();
    let mut out = reg.clone();
    match e {
        OpticalElement::Waveplate {
            retardance,
            fast_axis,
            ..
        } => {
            ensure_finite("retardance", *retardance)?;
            ensure_finite("fast_axis", *fast_axis)?;
        }
        OpticalElement::Rotator { angle, .. } => ensure_finite("angle", *angle)?,
        OpticalElement::PbsSwap { a, b } => {
            for &m in [a, b] {
                if m >= modes {
                    return Err(Error::IndexOutOfRange {
                        what: "spatial mode",
                        index: m,
                        limit: modes,
                    });
                }
            }
            if a == b {
                return Err(Error::param("pbs_swap", "mode pair must be distinct"));
            }
            let va = ModeRegister::slot(*a, Polarization::V);
            let vb = ModeRegister::slot(*b, Polarization::V);
            out.amplitudes.swap(va, vb);
            return Ok(out);
        }
    }
    let m = element_matrix(e).expect("single-mode element");
    for mode in e.support(modes)? {
        let (h, v) = m.apply(
            reg.amplitude(mode, Polarization::H),
            reg.amplitude(mode, Polarization::V),
        );
        out.amplitudes[ModeRegister::slot(mode, Polarization::H)] = h;
        out.amplitudes[ModeRegister::slot(mode, Polarization::V)] = v;
    }
    Ok(out)
}

pub fn apply_network(reg: &ModeRegister, network: &[OpticalElement]) -> Result<ModeRegister> {
    network
        .iter()
        .try_fold(reg.clone(), |r, e| apply_element(&r, e))
}

/// Swaps both polarizations between two spatial modes using PBS routing and
/// half-wave plates: swap V, flip H↔V in both modes, swap V again, flip back.
pub fn mode_swap_network(a: usize, b: usize) -> Vec<OpticalElement> {
    let hwp = OpticalElement::half_wave_45(ModeSet::Only(vec![a, b]));
    vec![
        OpticalElement::PbsSwap { a, b },
        hwp.clone(),
        OpticalElement::PbsSwap { a, b },
        hwp,
    ]
}

fn check_qubit(qubits: usize, q: usize) -> Result<()> {
    if q >= qubits {
        return Err(Error::IndexOutOfRange {
            what: "qubit",
            index: q,
            limit: qubits,
        });
    }
    Ok(())
}

/// Bit of the spatial-mode index that carries spatial qubit `q`.
fn spatial_mask(qubits: usize, q: usize) -> usize {
    1 << (qubits - 2 - q)
}

/// Element network realizing NOT on qubit `q` (0 = leftmost).
pub fn not_network(qubits: usize, q: usize) -> Result<Vec<OpticalElement>> {
    check_qubit(qubits, q)?;
    if q == qubits - 1 {
        return Ok(vec![OpticalElement::half_wave_45(ModeSet::All)]);
    }
    let mask = spatial_mask(qubits, q);
    let modes = 1usize << (qubits - 1);
    Ok((0..modes)
        .filter(|m| m & mask == 0)
        .flat_map(|m| mode_swap_network(m, m | mask))
        .collect())
}

/// Element network realizing CNOT. Elements are conditioned on the spatial
/// modes where the control bit is 1; a polarization control is handled by
/// PBS routing, which moves only the V (= 1) amplitudes.
pub fn cnot_network(qubits: usize, control: usize, target: usize) -> Result<Vec<OpticalElement>> {
    check_qubit(qubits, control)?;
    check_qubit(qubits, target)?;
    if control == target {
        return Err(Error::param("cnot", "control and target must differ"));
    }
    let pol = qubits - 1;
    let modes = 1usize << (qubits - 1);
    if target == pol {
        let cmask = spatial_mask(qubits, control);
        let subset: Vec<usize> = (0..modes).filter(|m| m & cmask != 0).collect();
        return Ok(vec![OpticalElement::half_wave_45(ModeSet::Only(subset))]);
    }
    let tmask = spatial_mask(qubits, target);
    if control == pol {
        return Ok((0..modes)
            .filter(|m| m & tmask == 0)
            .map(|m| OpticalElement::PbsSwap { a: m, b: m | tmask })
            .collect());
    }
    let cmask = spatial_mask(qubits, control);
    Ok((0..modes)
        .filter(|m| m & cmask != 0 && m & tmask == 0)
        .flat_map(|m| mode_swap_network(m, m | tmask))
        .collect())
}

pub fn not_gate(reg: &ModeRegister, qubit: usize) -> Result<ModeRegister> {
    apply_network(reg, &not_network(reg.qubits, qubit)?)
}

pub fn cnot_gate(reg: &ModeRegister, control: usize, target: usize) -> Result<ModeRegister> {
    apply_network(reg, &cnot_network(reg.qubits, control, target)?)
}
