//! Two nuclear spins in a static field.
//!
//! Conventions: ħ = 1 and all energies are angular frequencies. Basis states
//! are labelled `|s₀s₁…⟩` with spin 0 leftmost and most significant, so for two
//! spins the order is `|00⟩, |01⟩, |10⟩, |11⟩`. A bit value of 0 is σz = +1.
//!
//! Pulses are ideal hard rotations in the doubly rotating frame. Free evolution
//! between pulses therefore only carries the `j12·σz₁σz₂` term; the Zeeman part
//! is absorbed by the frame. [`evolve`] is the lab-frame propagator of the full
//! Hamiltonian.
//!
//! CNOT(c → t) is compiled as (time order):
//!
//! ```text
//! Ry(-π/2) on t
//! free coupling for τ = π / (4|j12|)           -> exp(-i·sgn(j12)·π/4·Z₁Z₂)
//! Rz(-sgn(j12)·π/2) on c, as Rx(π/2) Ry(sgn·π/2) Rx(-π/2)
//! Rz(-sgn(j12)·π/2) on t, same composite
//! Ry(π/2) on t
//! ```
//!
//! which equals the ideal CNOT up to a global phase of `e^{-i·sgn·π/4}`.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{ensure_finite, Error, Result};
use crate::truth_table::bits_label;

const NORM_INPUT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct SpinState {
    spins: usize,
    amplitudes: Vec<Complex64>,
}

impl SpinState {
    /// Builds a state from amplitudes. The input must be normalized to within
    /// 1e-8; it is then rescaled to unit norm.
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::param(
                "amplitudes",
                format!("length must be 2^n with n >= 1, got {len}"),
            ));
        }
        let norm_sq: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if !norm_sq.is_finite() || (norm_sq - 1.0).abs() > NORM_INPUT_TOL {
            return Err(Error::NotNormalized { norm_sq });
        }
        let scale = 1.0 / norm_sq.sqrt();
        Ok(SpinState {
            spins: len.trailing_zeros() as usize,
            amplitudes: amplitudes.into_iter().map(|a| a * scale).collect(),
        })
    }

    pub fn basis(spins: usize, index: usize) -> Result<Self> {
        if spins == 0 {
            return Err(Error::param("spins", "need at least one spin"));
        }
        let dim = 1usize << spins;
        if index >= dim {
            return Err(Error::IndexOutOfRange {
                what: "basis state",
                index,
                limit: dim,
            });
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(SpinState { spins, amplitudes })
    }

    /// Basis state from a label such as `"01"`.
    pub fn from_label(label: &str) -> Result<Self> {
        let mut index = 0usize;
        for c in label.chars() {
            index = match c {
                '0' => index << 1,
                '1' => (index << 1) | 1,
                _ => {
                    return Err(Error::param(
                        "label",
                        format!("not a bit string: {label:?}"),
                    ))
                }
            };
        }
        Self::basis(label.len(), index)
    }

    pub fn spins(&self) -> usize {
        self.spins
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `|⟨self|other⟩|²`.
    pub fn overlap_probability(&self, other: &SpinState) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        let inner: Complex64 = self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum();
        Ok(inner.norm_sqr())
    }

    fn bit_mask(&self, spin: usize) -> Result<usize> {
        if spin >= self.spins {
            return Err(Error::IndexOutOfRange {
                what: "spin",
                index: spin,
                limit: self.spins,
            });
        }
        Ok(1 << (self.spins - 1 - spin))
    }

    fn apply_single(&mut self, spin: usize, m: [[Complex64; 2]; 2]) -> Result<()> {
        let mask = self.bit_mask(spin)?;
        for i in 0..self.amplitudes.len() {
            if i & mask == 0 {
                let j = i | mask;
                let (a0, a1) = (self.amplitudes[i], self.amplitudes[j]);
                self.amplitudes[i] = m[0][0] * a0 + m[0][1] * a1;
                self.amplitudes[j] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
        Ok(())
    }
}

/// σz eigenvalue of `spin` in basis state `index`.
fn sigma_z(index: usize, spin: usize, spins: usize) -> f64 {
    if (index >> (spins - 1 - spin)) & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `H = b0(σz₁ + σz₂) + j12·σz₁σz₂`, diagonal in the computational basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoSpinHamiltonian {
    pub b0: f64,
    pub j12: f64,
}

impl TwoSpinHamiltonian {
    pub fn energy(&self, index: usize) -> f64 {
        let s1 = sigma_z(index, 0, 2);
        let s2 = sigma_z(index, 1, 2);
        self.b0 * (s1 + s2) + self.j12 * s1 * s2
    }

    pub fn diagonal(&self) -> [f64; 4] {
        [0, 1, 2, 3].map(|k| self.energy(k))
    }

    pub fn matrix(&self) -> GateMatrix {
        let mut m = GateMatrix::zeros(4);
        for k in 0..4 {
            m.set(k, k, Complex64::new(self.energy(k), 0.0));
        }
        m
    }
}

pub fn build_hamiltonian(b0: f64, j12: f64) -> Result<TwoSpinHamiltonian> {
    ensure_finite("b0", b0)?;
    ensure_finite("j12", j12)?;
    Ok(TwoSpinHamiltonian { b0, j12 })
}

fn require_two_spins(state: &SpinState) -> Result<()> {
    if state.spins != 2 {
        return Err(Error::DimensionMismatch {
            left: state.dim(),
            right: 4,
        });
    }
    Ok(())
}

/// Applies `exp(-iHt)`. Negative `t` runs the evolution backwards.
pub fn evolve(state: &SpinState, h: &TwoSpinHamiltonian, t: f64) -> Result<SpinState> {
    ensure_finite("t", t)?;
    require_two_spins(state)?;
    let amplitudes = state
        .amplitudes
        .iter()
        .enumerate()
        .map(|(k, a)| a * Complex64::from_polar(1.0, -h.energy(k) * t))
        .collect();
    Ok(SpinState {
        spins: 2,
        amplitudes,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PulseSegment {
    /// Coupling-only evolution in the rotating frame for `duration`.
    FreeCouplingEvolution { duration: f64 },
    /// `exp(-i(θ/2)(cos φ·σx + sin φ·σy))` on one spin.
    HardRotation {
        spin: usize,
        axis_angle: f64,
        rotation_angle: f64,
    },
}

impl PulseSegment {
    pub fn rx(spin: usize, angle: f64) -> Self {
        PulseSegment::HardRotation {
            spin,
            axis_angle: 0.0,
            rotation_angle: angle,
        }
    }

    pub fn ry(spin: usize, angle: f64) -> Self {
        PulseSegment::HardRotation {
            spin,
            axis_angle: FRAC_PI_2,
            rotation_angle: angle,
        }
    }

    pub fn delay(duration: f64) -> Self {
        PulseSegment::FreeCouplingEvolution { duration }
    }
}

/// 2×2 matrix of a hard rotation.
pub fn rotation_matrix(axis_angle: f64, rotation_angle: f64) -> [[Complex64; 2]; 2] {
    let c = Complex64::new((rotation_angle / 2.0).cos(), 0.0);
    let s = (rotation_angle / 2.0).sin();
    let minus_i = Complex64::new(0.0, -1.0);
    [
        [c, minus_i * s * Complex64::from_polar(1.0, -axis_angle)],
        [minus_i * s * Complex64::from_polar(1.0, axis_angle), c],
    ]
}

pub fn apply_pulse(
    state: &SpinState,
    seg: &PulseSegment,
    h: &TwoSpinHamiltonian,
) -> Result<SpinState> {
    let mut out = state.clone();
    match *seg {
        PulseSegment::FreeCouplingEvolution { duration } => {
            ensure_finite("duration", duration)?;
            if duration < 0.0 {
                return Err(Error::param("duration", "must be >= 0"));
            }
            require_two_spins(state)?;
            for (k, a) in out.amplitudes.iter_mut().enumerate() {
                let zz = sigma_z(k, 0, 2) * sigma_z(k, 1, 2);
                *a *= Complex64::from_polar(1.0, -h.j12 * zz * duration);
            }
        }
        PulseSegment::HardRotation {
            spin,
            axis_angle,
            rotation_angle,
        } => {
            ensure_finite("axis_angle", axis_angle)?;
            ensure_finite("rotation_angle", rotation_angle)?;
            out.apply_single(spin, rotation_matrix(axis_angle, rotation_angle))?;
        }
    }
    Ok(out)
}

pub fn apply_sequence(
    state: &SpinState,
    segments: &[PulseSegment],
    h: &TwoSpinHamiltonian,
) -> Result<SpinState> {
    segments
        .iter()
        .try_fold(state.clone(), |s, seg| apply_pulse(&s, seg, h))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpinGate {
    Not { target: usize },
    Cnot { control: usize, target: usize },
}

/// Composite z rotation `Rz(θ) = Rx(-π/2)·Ry(-θ)·Rx(π/2)`, listed in time order.
fn rz_segments(spin: usize, angle: f64) -> [PulseSegment; 3] {
    [
        PulseSegment::rx(spin, FRAC_PI_2),
        PulseSegment::ry(spin, -angle),
        PulseSegment::rx(spin, -FRAC_PI_2),
    ]
}

/// Pulse sequence for a gate on a two-spin register.
pub fn compile_gate(gate: SpinGate, h: &TwoSpinHamiltonian) -> Result<Vec<PulseSegment>> {
    match gate {
        SpinGate::Not { target } => {
            check_spin(target)?;
            Ok(vec![PulseSegment::rx(target, PI)])
        }
        SpinGate::Cnot { control, target } => {
            check_spin(control)?;
            check_spin(target)?;
            if control == target {
                return Err(Error::Uncompilable("control and target must differ".into()));
            }
            if h.j12 == 0.0 {
                return Err(Error::Uncompilable(
                    "CNOT needs a nonzero j12 coupling".into(),
                ));
            }
            let sign = h.j12.signum();
            let tau = FRAC_PI_4 / h.j12.abs();
            let mut seq = vec![
                PulseSegment::ry(target, -FRAC_PI_2),
                PulseSegment::delay(tau),
            ];
            seq.extend(rz_segments(control, -sign * FRAC_PI_2));
            seq.extend(rz_segments(target, -sign * FRAC_PI_2));
            seq.push(PulseSegment::ry(target, FRAC_PI_2));
            Ok(seq)
        }
    }
}

fn check_spin(spin: usize) -> Result<()> {
    if spin >= 2 {
        return Err(Error::IndexOutOfRange {
            what: "spin",
            index: spin,
            limit: 2,
        });
    }
    Ok(())
}

/// Dense square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GateMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl GateMatrix {
    pub fn zeros(dim: usize) -> Self {
        GateMatrix {
            dim,
            entries: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for k in 0..dim {
            m.set(k, k, Complex64::new(1.0, 0.0));
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Result<Self> {
        let dim = rows.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    left: row.len(),
                    right: dim,
                });
            }
            entries.extend(row);
        }
        Ok(GateMatrix { dim, entries })
    }

    /// Builds a matrix whose k-th column is `f(k)`.
    pub fn from_columns<F>(dim: usize, mut f: F) -> Result<Self>
    where
        F: FnMut(usize) -> Result<Vec<Complex64>>,
    {
        let mut m = Self::zeros(dim);
        for col in 0..dim {
            let v = f(col)?;
            if v.len() != dim {
                return Err(Error::DimensionMismatch {
                    left: v.len(),
                    right: dim,
                });
            }
            for (row, x) in v.into_iter().enumerate() {
                m.set(row, col, x);
            }
        }
        Ok(m)
    }

    /// Permutation matrix sending basis `k` to `perm(k)`.
    pub fn permutation(dim: usize, perm: impl Fn(usize) -> usize) -> Self {
        let mut m = Self::zeros(dim);
        for k in 0..dim {
            m.set(perm(k), k, Complex64::new(1.0, 0.0));
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    pub fn set(&mut self, row: usize, col: usize, v: Complex64) {
        self.entries[row * self.dim + col] = v;
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn dagger(&self) -> Self {
        let mut m = Self::zeros(self.dim);
        for r in 0..self.dim {
            for c in 0..self.dim {
                m.set(c, r, self.get(r, c).conj());
            }
        }
        m
    }

    pub fn matmul(&self, other: &GateMatrix) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        let n = self.dim;
        let mut m = Self::zeros(n);
        for r in 0..n {
            for c in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..n {
                    acc += self.get(r, k) * other.get(k, c);
                }
                m.set(r, c, acc);
            }
        }
        Ok(m)
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|k| self.get(k, k)).sum()
    }

    pub fn max_abs_diff(&self, other: &GateMatrix) -> f64 {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `max |U†U - I|`.
    pub fn unitarity_error(&self) -> f64 {
        let prod = self.dagger().matmul(self).expect("square");
        prod.max_abs_diff(&Self::identity(self.dim))
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        (0..self.dim)
            .map(|r| (0..self.dim).map(|c| self.get(r, c) * v[c]).sum())
            .collect()
    }

    /// Rows of `re,im` pairs, row-major, 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for r in 0..self.dim {
            let row: Vec<String> = (0..self.dim)
                .flat_map(|c| {
                    let z = self.get(r, c);
                    [crate::fmt_f64(z.re), crate::fmt_f64(z.im)]
                })
                .collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// `|Tr(u†v)| / dim`; blind to the global phase of either argument.
pub fn gate_fidelity(u: &GateMatrix, v: &GateMatrix) -> Result<f64> {
    if u.dim != v.dim {
        return Err(Error::DimensionMismatch {
            left: u.dim,
            right: v.dim,
        });
    }
    let tr: Complex64 = u
        .entries
        .iter()
        .zip(&v.entries)
        .map(|(a, b)| a.conj() * b)
        .sum();
    Ok(tr.norm() / u.dim as f64)
}

/// Unitary realized by a pulse sequence on an n-spin register.
pub fn sequence_unitary(
    segments: &[PulseSegment],
    h: &TwoSpinHamiltonian,
    spins: usize,
) -> Result<GateMatrix> {
    let dim = 1usize << spins;
    GateMatrix::from_columns(dim, |k| {
        let s = apply_sequence(&SpinState::basis(spins, k)?, segments, h)?;
        Ok(s.amplitudes)
    })
}

pub fn ideal_gate(gate: SpinGate, spins: usize) -> GateMatrix {
    let dim = 1usize << spins;
    match gate {
        SpinGate::Not { target } => {
            let mask = 1 << (spins - 1 - target);
            GateMatrix::permutation(dim, |k| k ^ mask)
        }
        SpinGate::Cnot { control, target } => {
            let cmask = 1 << (spins - 1 - control);
            let tmask = 1 << (spins - 1 - target);
            GateMatrix::permutation(dim, |k| if k & cmask != 0 { k ^ tmask } else { k })
        }
    }
}

/// Outcome counts per basis index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Histogram {
    spins: usize,
    counts: Vec<u64>,
}

impl Histogram {
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn count(&self, label: &str) -> u64 {
        self.labelled().get(label).copied().unwrap_or(0)
    }

    /// Non-zero bins keyed by basis label.
    pub fn labelled(&self) -> BTreeMap<String, u64> {
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(k, &c)| {
                (
                    bits_label(&crate::truth_table::index_to_bits(k, self.spins)),
                    c,
                )
            })
            .collect()
    }
}

/// Samples `shots` projective measurements in the computational basis.
pub fn measure(state: &SpinState, seed: u64, shots: u64) -> Result<Histogram> {
    if shots == 0 {
        return Err(Error::param("shots", "must be >= 1"));
    }
    let probs = state.probabilities();
    let total: f64 = probs.iter().sum();
    if !(total > 0.0) {
        return Err(Error::ZeroNorm);
    }
    let mut cumulative = Vec::with_capacity(probs.len());
    let mut acc = 0.0;
    for p in &probs {
        acc += p / total;
        cumulative.push(acc);
    }
    let last_nonzero = probs.iter().rposition(|&p| p > 0.0).unwrap_or(0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = vec![0u64; probs.len()];
    for _ in 0..shots {
        let u: f64 = rng.gen();
        let k = cumulative
            .iter()
            .position(|&c| u < c)
            .unwrap_or(last_nonzero);
        counts[k] += 1;
    }
    Ok(Histogram {
        spins: state.spins,
        counts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn hamiltonian_diagonals() {
        assert_eq!(
            build_hamiltonian(1.0, 0.0).unwrap().diagonal(),
            [2.0, 0.0, 0.0, -2.0]
        );
        let d = build_hamiltonian(1.0, 0.1).unwrap().diagonal();
        for (got, want) in d.iter().zip([2.1, -0.1, -0.1, -1.9]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-15);
        }
        assert_eq!(
            build_hamiltonian(0.0, 1.0).unwrap().diagonal(),
            [1.0, -1.0, -1.0, 1.0]
        );
    }

    #[test]
    fn hamiltonian_rejects_non_finite() {
        assert!(matches!(
            build_hamiltonian(f64::NAN, 0.0),
            Err(Error::Parameter { name: "b0", .. })
        ));
        assert!(build_hamiltonian(0.0, f64::INFINITY).is_err());
    }

    #[test]
    fn hamiltonian_is_hermitian() {
        let m = build_hamiltonian(0.7, -0.3).unwrap().matrix();
        assert_eq!(m, m.dagger());
    }

    #[test]
    fn evolve_identity_and_eigenphase() {
        let h = build_hamiltonian(1.0, 0.1).unwrap();
        let s = SpinState::new(vec![c(0.6, 0.0), c(0.0, 0.8), c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert_eq!(evolve(&s, &h, 0.0).unwrap(), s);

        let h = build_hamiltonian(1.0, 0.0).unwrap();
        let out = evolve(&SpinState::from_label("00").unwrap(), &h, PI).unwrap();
        assert_abs_diff_eq!(out.amplitudes()[0].re, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(out.amplitudes()[0].im, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn evolve_needs_two_spins() {
        let h = build_hamiltonian(1.0, 0.1).unwrap();
        let s = SpinState::basis(3, 0).unwrap();
        assert!(evolve(&s, &h, 1.0).is_err());
    }

    #[test]
    fn pi_x_rotation_flips_with_minus_i() {
        let h = build_hamiltonian(0.0, 1.0).unwrap();
        let out = apply_pulse(
            &SpinState::from_label("00").unwrap(),
            &PulseSegment::rx(0, PI),
            &h,
        )
        .unwrap();
        let a = out.amplitudes();
        assert_abs_diff_eq!(a[0].norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(a[2].re, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(a[2].im, -1.0, epsilon = 1e-15);
    }

    #[test]
    fn zero_delay_is_identity() {
        let h = build_hamiltonian(0.3, 2.0).unwrap();
        let s = SpinState::new(vec![c(0.5, 0.0); 4]).unwrap();
        assert_eq!(apply_pulse(&s, &PulseSegment::delay(0.0), &h).unwrap(), s);
        assert!(apply_pulse(&s, &PulseSegment::delay(-1.0), &h).is_err());
    }

    #[test]
    fn rotation_spin_out_of_range() {
        let h = build_hamiltonian(0.0, 1.0).unwrap();
        let s = SpinState::from_label("00").unwrap();
        assert!(matches!(
            apply_pulse(&s, &PulseSegment::rx(2, PI), &h),
            Err(Error::IndexOutOfRange { what: "spin", .. })
        ));
    }

    #[test]
    fn composite_z_rotation() {
        let h = build_hamiltonian(0.0, 1.0).unwrap();
        let theta = 0.731;
        let u = sequence_unitary(&rz_segments(0, theta), &h, 1).unwrap();
        let want = GateMatrix::from_rows(vec![
            vec![Complex64::from_polar(1.0, -theta / 2.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), Complex64::from_polar(1.0, theta / 2.0)],
        ])
        .unwrap();
        assert!(u.max_abs_diff(&want) < 1e-14);
    }

    #[test]
    fn compiled_gates_match_ideal() {
        for j12 in [1.0, -0.37, 250.0] {
            let h = build_hamiltonian(3.0, j12).unwrap();
            for gate in [
                SpinGate::Not { target: 0 },
                SpinGate::Not { target: 1 },
                SpinGate::Cnot {
                    control: 0,
                    target: 1,
                },
                SpinGate::Cnot {
                    control: 1,
                    target: 0,
                },
            ] {
                let u = sequence_unitary(&compile_gate(gate, &h).unwrap(), &h, 2).unwrap();
                let f = gate_fidelity(&ideal_gate(gate, 2), &u).unwrap();
                assert!(f >= 1.0 - 1e-9, "{gate:?} j12={j12}: {f}");
                assert!(u.unitarity_error() < 1e-10);
            }
        }
    }

    #[test]
    fn cnot_truth_rows() {
        let h = build_hamiltonian(1.0, 0.2).unwrap();
        let seq = compile_gate(
            SpinGate::Cnot {
                control: 0,
                target: 1,
            },
            &h,
        )
        .unwrap();
        for (input, output) in [("00", "00"), ("01", "01"), ("10", "11"), ("11", "10")] {
            let out = apply_sequence(&SpinState::from_label(input).unwrap(), &seq, &h).unwrap();
            let p = out
                .overlap_probability(&SpinState::from_label(output).unwrap())
                .unwrap();
            assert!(p >= 1.0 - 1e-9, "{input}: {p}");
        }
    }

    #[test]
    fn not_on_second_spin() {
        let h = build_hamiltonian(1.0, 0.2).unwrap();
        let seq = compile_gate(SpinGate::Not { target: 1 }, &h).unwrap();
        let out = apply_sequence(&SpinState::from_label("00").unwrap(), &seq, &h).unwrap();
        let p = out
            .overlap_probability(&SpinState::from_label("01").unwrap())
            .unwrap();
        assert!((p - 1.0).abs() < 1e-9);
    }

    #[test]
    fn cnot_without_coupling_is_uncompilable() {
        let h = build_hamiltonian(1.0, 0.0).unwrap();
        assert!(matches!(
            compile_gate(
                SpinGate::Cnot {
                    control: 0,
                    target: 1
                },
                &h
            ),
            Err(Error::Uncompilable(_))
        ));
        // NOT does not need the coupling.
        assert!(compile_gate(SpinGate::Not { target: 0 }, &h).is_ok());
    }

    #[test]
    fn fidelity_values() {
        let cnot = ideal_gate(
            SpinGate::Cnot {
                control: 0,
                target: 1,
            },
            2,
        );
        assert_abs_diff_eq!(gate_fidelity(&cnot, &cnot).unwrap(), 1.0, epsilon = 1e-15);
        let mut phased = cnot.clone();
        let phase = Complex64::from_polar(1.0, PI / 3.0);
        for r in 0..4 {
            for col in 0..4 {
                phased.set(r, col, cnot.get(r, col) * phase);
            }
        }
        assert_abs_diff_eq!(gate_fidelity(&cnot, &phased).unwrap(), 1.0, epsilon = 1e-15);
        // Tr(CNOT) = 2 (the |00⟩ and |01⟩ diagonal entries).
        assert_eq!(cnot.trace(), c(2.0, 0.0));
        assert_abs_diff_eq!(
            gate_fidelity(&GateMatrix::identity(4), &cnot).unwrap(),
            0.5,
            epsilon = 1e-15
        );
        assert!(gate_fidelity(&GateMatrix::identity(2), &cnot).is_err());
    }

    #[test]
    fn measurement_deterministic_outcome() {
        let s = SpinState::from_label("01").unwrap();
        let hist = measure(&s, 123, 1000).unwrap();
        assert_eq!(hist.count("01"), 1000);
        assert_eq!(hist.labelled().len(), 1);
    }

    #[test]
    fn measurement_bell_state() {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let s = SpinState::new(vec![c(r, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(r, 0.0)]).unwrap();
        let shots = 100_000;
        let hist = measure(&s, 7, shots).unwrap();
        let sigma = (shots as f64 * 0.25).sqrt();
        for label in ["00", "11"] {
            let dev = (hist.count(label) as f64 - 50_000.0).abs();
            assert!(dev < 5.0 * sigma, "{label}: {}", hist.count(label));
        }
        assert_eq!(hist.total(), shots);
        assert_eq!(hist, measure(&s, 7, shots).unwrap());
    }

    #[test]
    fn measurement_rejects_zero_shots() {
        let s = SpinState::from_label("00").unwrap();
        assert!(measure(&s, 0, 0).is_err());
    }

    #[test]
    fn state_validation() {
        assert!(SpinState::new(vec![c(1.0, 0.0); 3]).is_err());
        assert!(SpinState::new(vec![c(1.0, 0.0), c(1.0, 0.0)]).is_err());
        assert!(SpinState::from_label("0x").is_err());
        assert_eq!(
            SpinState::from_label("10").unwrap().amplitudes()[2],
            c(1.0, 0.0)
        );
    }

    #[test]
    fn gate_matrix_csv_layout() {
        let csv = GateMatrix::identity(2).to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0].split(',').count(), 4);
        assert!(lines[0].starts_with("1.0000000000000000e0,0.0000000000000000e0"));
    }
}
