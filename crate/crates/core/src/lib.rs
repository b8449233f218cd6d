//! Numerical models of three small quantum-logic constructions and the
//! photon statistics of squeezed light:
//!
//! * [`spin_sim`]: two nuclear spins with Zeeman and `σz⊗σz` coupling, hard
//!   pulses, and NOT/CNOT compilation.
//! * [`polarization_optics`]: qubits stored in spatial modes × polarization of a
//!   coherent beam, manipulated with waveplates, rotators and PBS routing.
//! * [`rds`]: cascaded SHG/SFG propagation through a sign-alternating
//!   (regular domain structure) crystal, with threshold logic on the harmonic
//!   powers.
//! * [`photon_stats`]: closed-form and number-basis statistics of displaced
//!   squeezed states.
//!
//! All backends are checked against the same NOT/CNOT tables in
//! [`truth_table`].

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod parallel;
pub mod photon_stats;
pub mod polarization_optics;
pub mod rds;
pub mod spin_sim;
pub mod truth_table;

pub use error::{Error, Result};

pub use num_complex::Complex64;

/// Formats a float with 17 significant digits, the width used for every
/// numeric CSV field so that values round-trip exactly.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}
