//! Strict JSON experiment configs.
//!
//! ```json
//! {
//!   "backend": "rds",
//!   "parameters": { "kappa_a": 1.0, "length": 0.05 },
//!   "output": { "path": "out.csv", "format": "csv" },
//!   "seed": 0,
//!   "sweep": { "parameter": "length", "start": 0.001, "stop": 0.05, "count": 50 }
//! }
//! ```
//!
//! Every struct rejects unknown keys. `parameters` is parsed against the
//! schema of the selected backend.

use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Spin,
    Jones,
    Rds,
    Stats,
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Backend::Spin => "spin",
            Backend::Jones => "jones",
            Backend::Rds => "rds",
            Backend::Stats => "stats",
        })
    }
}

impl std::str::FromStr for Backend {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s.trim() {
            "spin" => Ok(Backend::Spin),
            "jones" => Ok(Backend::Jones),
            "rds" => Ok(Backend::Rds),
            "stats" => Ok(Backend::Stats),
            other => Err(CliError::Config(format!(
                "unknown backend `{other}` (expected spin, jones, rds or stats)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    /// Standard output when absent.
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: OutputFormat,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub parameter: String,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.count < 2 {
            return Err(CliError::Config(format!(
                "sweep.count must be >= 2, got {}",
                self.count
            )));
        }
        if !self.start.is_finite() || !self.stop.is_finite() {
            return Err(CliError::Config(
                "sweep.start and sweep.stop must be finite".into(),
            ));
        }
        if self.start == self.stop {
            return Err(CliError::Config(
                "sweep.start and sweep.stop must differ".into(),
            ));
        }
        Ok(())
    }

    /// Evenly spaced points; the last one is exactly `stop`.
    pub fn points(&self) -> Vec<f64> {
        let n = self.count - 1;
        (0..=n)
            .map(|i| {
                if i == n {
                    self.stop
                } else {
                    self.start + (self.stop - self.start) * i as f64 / n as f64
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GateName {
    Not,
    Cnot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum JonesGate {
    None,
    Not,
    Cnot,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpinParams {
    pub b0: f64,
    pub j12: f64,
    pub gate: GateName,
    pub control: usize,
    pub target: usize,
    /// Two-bit input label such as `"10"`.
    pub input: String,
    pub shots: u64,
}

impl Default for SpinParams {
    fn default() -> Self {
        SpinParams {
            b0: 1.0,
            j12: 0.1,
            gate: GateName::Cnot,
            control: 0,
            target: 1,
            input: "00".into(),
            shots: 1000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaveplateSpec {
    pub retardance: f64,
    pub fast_axis: f64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct JonesParams {
    pub qubits: usize,
    pub gate: JonesGate,
    pub control: usize,
    pub target: usize,
    /// Basis label such as `"101"`; ignored when `amplitudes` is set.
    pub input: Option<String>,
    /// Qubit amplitudes as `[re, im]` pairs.
    pub amplitudes: Option<Vec<[f64; 2]>>,
    /// Plate applied to every spatial mode before the gate.
    pub waveplate: Option<WaveplateSpec>,
}

impl Default for JonesParams {
    fn default() -> Self {
        JonesParams {
            qubits: 3,
            gate: JonesGate::Cnot,
            control: 0,
            target: 2,
            input: None,
            amplitudes: None,
            waveplate: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RdsParams {
    pub kappa_a: f64,
    pub kappa_b: f64,
    pub dk_a: f64,
    pub dk_b: f64,
    /// Periodic sign reversal every `π/|poling_dk|`; a single domain otherwise.
    pub poled: bool,
    /// Mismatch the poling period is cut for; defaults to `dk_a`.
    pub poling_dk: Option<f64>,
    /// Crystal length in coherence lengths of the poling mismatch, used when
    /// `length` is absent.
    pub domains: usize,
    pub length: Option<f64>,
    pub steps_per_domain: usize,
    /// Input fundamental `[re, im]`; defaults to `[beam_amplitude, 0]`.
    pub input: Option<[f64; 2]>,
    pub beam_amplitude: f64,
    /// Evaluate a logic gate instead of writing a trajectory.
    pub gate: Option<GateName>,
    /// Keep every `stride`-th trajectory point.
    pub stride: usize,
}

impl Default for RdsParams {
    fn default() -> Self {
        RdsParams {
            kappa_a: 1.0,
            kappa_b: 1.0,
            dk_a: 2.0 * PI * 1e3,
            dk_b: 2.0 * PI * 1e3,
            poled: true,
            poling_dk: None,
            domains: 100,
            length: None,
            steps_per_domain: 32,
            input: None,
            beam_amplitude: 0.1,
            gate: None,
            stride: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StatsParams {
    pub alpha: [f64; 2],
    pub r: f64,
    pub theta: f64,
    pub cutoff: usize,
    /// Emit the number distribution instead of the moment summary.
    pub distribution: bool,
}

impl Default for StatsParams {
    fn default() -> Self {
        StatsParams {
            alpha: [0.0, 0.0],
            r: 0.0,
            theta: 0.0,
            cutoff: 200,
            distribution: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum BackendParams {
    Spin(SpinParams),
    Jones(JonesParams),
    Rds(RdsParams),
    Stats(StatsParams),
}

impl BackendParams {
    pub fn backend(&self) -> Backend {
        match self {
            BackendParams::Spin(_) => Backend::Spin,
            BackendParams::Jones(_) => Backend::Jones,
            BackendParams::Rds(_) => Backend::Rds,
            BackendParams::Stats(_) => Backend::Stats,
        }
    }

    pub fn sweepable(backend: Backend) -> &'static [&'static str] {
        match backend {
            Backend::Spin => &["b0", "j12"],
            Backend::Jones => &["retardance", "fast_axis"],
            Backend::Rds => &[
                "length",
                "dk_a",
                "dk_b",
                "kappa_a",
                "kappa_b",
                "input_amplitude",
            ],
            Backend::Stats => &["alpha_re", "alpha_im", "r", "theta"],
        }
    }

    /// Copy with `name` set to `value`.
    pub fn with_value(&self, name: &str, value: f64) -> Result<BackendParams, CliError> {
        let mut out = self.clone();
        match &mut out {
            BackendParams::Spin(p) => match name {
                "b0" => p.b0 = value,
                "j12" => p.j12 = value,
                _ => return Err(unknown_sweep(name, Backend::Spin)),
            },
            BackendParams::Jones(p) => {
                let plate = p.waveplate.get_or_insert(WaveplateSpec {
                    retardance: 0.0,
                    fast_axis: 0.0,
                });
                match name {
                    "retardance" => plate.retardance = value,
                    "fast_axis" => plate.fast_axis = value,
                    _ => return Err(unknown_sweep(name, Backend::Jones)),
                }
            }
            BackendParams::Rds(p) => match name {
                "length" => p.length = Some(value),
                "dk_a" => p.dk_a = value,
                "dk_b" => p.dk_b = value,
                "kappa_a" => p.kappa_a = value,
                "kappa_b" => p.kappa_b = value,
                "input_amplitude" => p.input = Some([value, 0.0]),
                _ => return Err(unknown_sweep(name, Backend::Rds)),
            },
            BackendParams::Stats(p) => match name {
                "alpha_re" => p.alpha[0] = value,
                "alpha_im" => p.alpha[1] = value,
                "r" => p.r = value,
                "theta" => p.theta = value,
                _ => return Err(unknown_sweep(name, Backend::Stats)),
            },
        }
        Ok(out)
    }
}

fn unknown_sweep(name: &str, backend: Backend) -> CliError {
    CliError::Config(format!(
        "unknown sweep parameter `{name}` for backend {backend} (expected one of: {})",
        BackendParams::sweepable(backend).join(", ")
    ))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    backend: Backend,
    #[serde(default)]
    parameters: Option<serde_json::Value>,
    #[serde(default)]
    output: OutputSpec,
    #[serde(default)]
    seed: u64,
    #[serde(default)]
    sweep: Option<SweepSpec>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub params: BackendParams,
    pub output: OutputSpec,
    pub seed: u64,
    pub sweep: Option<SweepSpec>,
}

impl ExperimentConfig {
    pub fn backend(&self) -> Backend {
        self.params.backend()
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let raw: RawConfig =
            serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        let section = raw
            .parameters
            .unwrap_or_else(|| serde_json::Value::Object(Default::default()));
        let params = match raw.backend {
            Backend::Spin => BackendParams::Spin(section_as(section, raw.backend)?),
            Backend::Jones => BackendParams::Jones(section_as(section, raw.backend)?),
            Backend::Rds => BackendParams::Rds(section_as(section, raw.backend)?),
            Backend::Stats => BackendParams::Stats(section_as(section, raw.backend)?),
        };
        if let Some(sweep) = &raw.sweep {
            sweep.validate()?;
            params.with_value(&sweep.parameter, sweep.start)?;
        }
        Ok(ExperimentConfig {
            params,
            output: raw.output,
            seed: raw.seed,
            sweep: raw.sweep,
        })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }
}

fn section_as<T: DeserializeOwned>(
    value: serde_json::Value,
    backend: Backend,
) -> Result<T, CliError> {
    serde_json::from_value(value)
        .map_err(|e| CliError::Config(format!("parameters ({backend}): {e}")))
}
