//! Harmonic generation in a regular domain structure (periodically poled)
//! crystal, and threshold logic on the generated harmonics.
//!
//! The fundamental `a1` (ω), second harmonic `a2` (2ω) and third harmonic
//! `a3` (3ω) obey cascaded SHG + SFG coupled-mode equations:
//!
//! ```text
//! da1/dz = i·s(z)·[ κA·a1*·a2·e^{i·ΔkA·z} + κB·a2*·a3·e^{i·ΔkB·z} ]
//! da2/dz = i·s(z)·[ (κA/2)·a1²·e^{-i·ΔkA·z} + κB·a1*·a3·e^{i·ΔkB·z} ]
//! da3/dz = i·s(z)·[ κB·a1·a2·e^{-i·ΔkB·z} ]
//! ```
//!
//! with `s(z) = ±1` the sign of the domain at `z`. Amplitudes are photon-flux
//! normalized so that `|a1|² + 2|a2|² + 3|a3|²` is conserved.

mod grid;
mod logic;
mod propagate;

pub use grid::{make_periodic_grid, qpm_domain_length, Domain, DomainGrid, QpmPeriod};
pub use logic::{
    calibrate_thresholds, cnot_gate_rds, cnot_gate_rds_reading, logic_input, not_gate_rds,
    not_gate_rds_reading, ChannelReading, LogicLevels, LogicThresholds, MIN_LEVEL_SEPARATION,
};
pub use propagate::{
    enhancement_ratio, propagate, propagate_output, qpm_enhancement_check, CoupledModeParams,
    FieldTriple, Propagation, TrajectoryPoint,
};

/// Default coupled-mode parameters: `κA = κB = 1`, `ΔkA = ΔkB = 2π×10³ m⁻¹`.
pub fn default_params() -> CoupledModeParams {
    let dk = 2.0 * std::f64::consts::PI * 1e3;
    CoupledModeParams {
        kappa_a: 1.0,
        kappa_b: 1.0,
        dk_a: dk,
        dk_b: dk,
    }
}

pub const DEFAULT_DOMAINS: usize = 100;
pub const DEFAULT_BEAM_AMPLITUDE: f64 = 0.1;
/// Integration steps per coherence length in the default configuration.
pub const DEFAULT_STEPS_PER_DOMAIN: usize = 32;

/// First-order QPM grid of `DEFAULT_DOMAINS` coherence lengths for `ΔkA`.
pub fn default_grid(p: &CoupledModeParams) -> crate::Result<DomainGrid> {
    let lc = match qpm_domain_length(p.dk_a)? {
        QpmPeriod::Poled { domain_length } => domain_length,
        QpmPeriod::PhaseMatched => {
            return Err(crate::Error::param(
                "dk_a",
                "default grid needs a nonzero mismatch",
            ))
        }
    };
    make_periodic_grid(lc * DEFAULT_DOMAINS as f64, lc, 1)
}

/// Step used with [`default_grid`].
pub fn default_step(grid: &DomainGrid) -> f64 {
    grid.max_domain_length() / DEFAULT_STEPS_PER_DOMAIN as f64
}
