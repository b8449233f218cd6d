//! Threshold logic on harmonic powers.
//!
//! Bits are phase coded on equal-amplitude fundamental beams, `A·e^{iπx}`.
//! NOT superposes the input beam with a zero-phase bias beam of the same
//! amplitude: x = 0 gives a pump of 2A and strong SH, x = 1 cancels the pump.
//! The gate reads 1 iff the SH power reaches the threshold.
//!
//! CNOT superposes the two input beams. Equal bits give a pump of ±2A and
//! strong TH (the cascaded SHG → SFG output); unequal bits cancel. The target
//! reads 1 iff the TH power stays below threshold, so high TH (XNOR) decodes
//! to XOR. The control passes through.
//!
//! There is no hysteresis: a threshold comparison stands in for a bistable
//! element. Thresholds are only valid for the beam amplitude they were
//! calibrated at; P₂ scales as A⁴ and P₃ as A⁶.

use num_complex::Complex64;

use super::grid::DomainGrid;
use super::propagate::{propagate_output, CoupledModeParams, FieldTriple};
use crate::error::{ensure_finite, Error, Result};

/// Minimum ratio between the high and low logic levels.
pub const MIN_LEVEL_SEPARATION: f64 = 2.0;

/// The low level used for the geometric-mean threshold is floored at this
/// fraction of the high level, so that a perfectly dark low level still gives
/// a positive threshold.
const LOW_LEVEL_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogicLevels {
    pub high: f64,
    pub low: f64,
    pub threshold: f64,
}

impl LogicLevels {
    fn from_powers(channel: &'static str, high: f64, low: f64) -> Result<Self> {
        let separation = separation(high, low);
        if !(separation >= MIN_LEVEL_SEPARATION) {
            return Err(Error::Calibration {
                channel,
                high,
                low,
                separation,
                required: MIN_LEVEL_SEPARATION,
            });
        }
        let threshold = (high * low.max(high * LOW_LEVEL_FLOOR)).sqrt();
        Ok(LogicLevels {
            high,
            low,
            threshold,
        })
    }

    /// `high / low`; infinite for a dark low level.
    pub fn separation(&self) -> f64 {
        separation(self.high, self.low)
    }
}

fn separation(high: f64, low: f64) -> f64 {
    if !(high > 0.0) {
        0.0
    } else if low > 0.0 {
        high / low
    } else {
        f64::INFINITY
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogicThresholds {
    /// SH power threshold (NOT channel).
    pub p_th2: f64,
    /// TH power threshold (CNOT channel).
    pub p_th3: f64,
    pub bias_amplitude: f64,
    /// Per-beam amplitude the thresholds were calibrated for.
    pub beam_amplitude: f64,
    pub sh_levels: Option<LogicLevels>,
    pub th_levels: Option<LogicLevels>,
}

impl Default for LogicThresholds {
    /// An uncalibrated placeholder; every gate rejects it.
    fn default() -> Self {
        LogicThresholds {
            p_th2: f64::NAN,
            p_th3: f64::NAN,
            bias_amplitude: 0.0,
            beam_amplitude: 0.0,
            sh_levels: None,
            th_levels: None,
        }
    }
}

impl LogicThresholds {
    pub fn is_calibrated(&self) -> bool {
        self.p_th2.is_finite()
            && self.p_th2 > 0.0
            && self.p_th3.is_finite()
            && self.p_th3 > 0.0
            && self.beam_amplitude > 0.0
    }

    /// Fails unless these thresholds were calibrated for `beam_amplitude`.
    pub fn check_amplitude(&self, beam_amplitude: f64) -> Result<()> {
        if !self.is_calibrated() {
            return Err(Error::Uncalibrated);
        }
        if beam_amplitude != self.beam_amplitude {
            return Err(Error::StaleCalibration {
                calibrated: self.beam_amplitude,
                requested: beam_amplitude,
            });
        }
        Ok(())
    }
}

/// Superposed fundamental for phase-coded beams of amplitude `beam`.
pub fn logic_input(bits: &[bool], beam: f64) -> Complex64 {
    bits.iter()
        .map(|&b| Complex64::from_polar(beam, if b { std::f64::consts::PI } else { 0.0 }))
        .sum()
}

fn harmonic_powers(
    bits: &[bool],
    beam: f64,
    grid: &DomainGrid,
    p: &CoupledModeParams,
) -> Result<[f64; 3]> {
    let fin = FieldTriple::fundamental(logic_input(bits, beam));
    let out = propagate_output(&fin, grid, p, super::default_step(grid))?;
    Ok(out.powers())
}

/// Runs every logic input through the crystal and places each threshold at
/// the geometric mean of its two output levels.
pub fn calibrate_thresholds(
    grid: &DomainGrid,
    p: &CoupledModeParams,
    beam_amplitude: f64,
) -> Result<LogicThresholds> {
    ensure_finite("beam_amplitude", beam_amplitude)?;
    if !(beam_amplitude > 0.0) {
        return Err(Error::param("beam_amplitude", "must be > 0"));
    }
    p.validate()?;

    let bias = false;
    let not_high = harmonic_powers(&[false, bias], beam_amplitude, grid, p)?[1];
    let not_low = harmonic_powers(&[true, bias], beam_amplitude, grid, p)?[1];
    let sh = LogicLevels::from_powers("SH", not_high, not_low)?;

    let mut equal = Vec::new();
    let mut unequal = Vec::new();
    for x1 in [false, true] {
        for x2 in [false, true] {
            let p3 = harmonic_powers(&[x1, x2], beam_amplitude, grid, p)?[2];
            if x1 == x2 {
                equal.push(p3);
            } else {
                unequal.push(p3);
            }
        }
    }
    let th_high = equal.iter().copied().fold(f64::INFINITY, f64::min);
    let th_low = unequal.iter().copied().fold(0.0, f64::max);
    let th = LogicLevels::from_powers("TH", th_high, th_low)?;

    Ok(LogicThresholds {
        p_th2: sh.threshold,
        p_th3: th.threshold,
        bias_amplitude: beam_amplitude,
        beam_amplitude,
        sh_levels: Some(sh),
        th_levels: Some(th),
    })
}

/// Measured channel power next to its threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelReading {
    pub bit: bool,
    pub power: f64,
    pub threshold: f64,
}

impl ChannelReading {
    /// How far the power sits on the correct side of the threshold, as a
    /// ratio ≥ 1 when the reading is unambiguous.
    pub fn margin(&self, expect_above: bool) -> f64 {
        let floor = self.threshold * LOW_LEVEL_FLOOR;
        if expect_above {
            self.power / self.threshold
        } else {
            self.threshold / self.power.max(floor)
        }
    }
}

pub fn not_gate_rds_reading(
    x: bool,
    cal: &LogicThresholds,
    grid: &DomainGrid,
    p: &CoupledModeParams,
) -> Result<ChannelReading> {
    if !cal.is_calibrated() {
        return Err(Error::Uncalibrated);
    }
    let fin = FieldTriple::fundamental(
        logic_input(&[x], cal.beam_amplitude) + Complex64::new(cal.bias_amplitude, 0.0),
    );
    let power = propagate_output(&fin, grid, p, super::default_step(grid))?
        .a2
        .norm_sqr();
    Ok(ChannelReading {
        bit: power >= cal.p_th2,
        power,
        threshold: cal.p_th2,
    })
}

pub fn not_gate_rds(
    x: bool,
    cal: &LogicThresholds,
    grid: &DomainGrid,
    p: &CoupledModeParams,
) -> Result<bool> {
    Ok(not_gate_rds_reading(x, cal, grid, p)?.bit)
}

/// Returns the control passthrough and the TH reading for the target.
pub fn cnot_gate_rds_reading(
    x1: bool,
    x2: bool,
    cal: &LogicThresholds,
    grid: &DomainGrid,
    p: &CoupledModeParams,
) -> Result<(bool, ChannelReading)> {
    if !cal.is_calibrated() {
        return Err(Error::Uncalibrated);
    }
    if !(p.kappa_b > 0.0) {
        return Err(Error::param(
            "kappa_b",
            "CNOT needs the SFG channel (kappa_b > 0)",
        ));
    }
    let power = harmonic_powers(&[x1, x2], cal.beam_amplitude, grid, p)?[2];
    Ok((
        x1,
        ChannelReading {
            bit: power < cal.p_th3,
            power,
            threshold: cal.p_th3,
        },
    ))
}

pub fn cnot_gate_rds(
    x1: bool,
    x2: bool,
    cal: &LogicThresholds,
    grid: &DomainGrid,
    p: &CoupledModeParams,
) -> Result<(bool, bool)> {
    let (y1, reading) = cnot_gate_rds_reading(x1, x2, cal, grid, p)?;
    Ok((y1, reading.bit))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rds::{default_grid, default_params, DEFAULT_BEAM_AMPLITUDE};

    fn setup() -> (DomainGrid, CoupledModeParams, LogicThresholds) {
        let p = default_params();
        let g = default_grid(&p).unwrap();
        let cal = calibrate_thresholds(&g, &p, DEFAULT_BEAM_AMPLITUDE).unwrap();
        (g, p, cal)
    }

    #[test]
    fn not_truth_table() {
        let (g, p, cal) = setup();
        assert!(not_gate_rds(false, &cal, &g, &p).unwrap());
        assert!(!not_gate_rds(true, &cal, &g, &p).unwrap());
    }

    #[test]
    fn sh_separation_at_default() {
        let (_, _, cal) = setup();
        assert!(cal.sh_levels.unwrap().separation() >= 100.0);
    }

    #[test]
    fn cnot_truth_table() {
        let (g, p, cal) = setup();
        for (x1, x2, y1, y2) in [
            (false, false, false, false),
            (false, true, false, true),
            (true, false, true, true),
            (true, true, true, false),
        ] {
            assert_eq!(
                cnot_gate_rds(x1, x2, &cal, &g, &p).unwrap(),
                (y1, y2),
                "{x1} {x2}"
            );
        }
    }

    #[test]
    fn no_shg_cannot_calibrate() {
        let mut p = default_params();
        p.kappa_a = 0.0;
        let g = default_grid(&p).unwrap();
        assert!(matches!(
            calibrate_thresholds(&g, &p, DEFAULT_BEAM_AMPLITUDE),
            Err(Error::Calibration { channel: "SH", .. })
        ));
    }

    #[test]
    fn uncalibrated_rejected() {
        let p = default_params();
        let g = default_grid(&p).unwrap();
        let cal = LogicThresholds::default();
        assert_eq!(not_gate_rds(false, &cal, &g, &p), Err(Error::Uncalibrated));
        assert_eq!(
            cnot_gate_rds(false, true, &cal, &g, &p),
            Err(Error::Uncalibrated)
        );
    }

    #[test]
    fn doubled_amplitude_needs_recalibration() {
        let (g, p, cal) = setup();
        let a = DEFAULT_BEAM_AMPLITUDE;
        assert!(cal.check_amplitude(a).is_ok());
        assert!(matches!(
            cal.check_amplitude(2.0 * a),
            Err(Error::StaleCalibration { .. })
        ));
        let recal = calibrate_thresholds(&g, &p, 2.0 * a).unwrap();
        // P2 ∝ A⁴ in the undepleted regime.
        let ratio = recal.sh_levels.unwrap().high / cal.sh_levels.unwrap().high;
        assert!((ratio - 16.0).abs() < 0.1, "{ratio}");
    }
}
