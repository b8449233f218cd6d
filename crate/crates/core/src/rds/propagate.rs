use std::fmt::Write as _;

use num_complex::Complex64;

use super::grid::{make_periodic_grid, qpm_domain_length, DomainGrid, QpmPeriod};
use crate::error::{ensure_finite, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoupledModeParams {
    /// SHG coupling, m⁻¹ per unit amplitude.
    pub kappa_a: f64,
    /// SFG coupling, m⁻¹ per unit amplitude.
    pub kappa_b: f64,
    /// `k₂ − 2k₁`, m⁻¹.
    pub dk_a: f64,
    /// `k₃ − k₂ − k₁`, m⁻¹.
    pub dk_b: f64,
}

impl CoupledModeParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("kappa_a", self.kappa_a),
            ("kappa_b", self.kappa_b),
            ("dk_a", self.dk_a),
            ("dk_b", self.dk_b),
        ] {
            ensure_finite(name, v)?;
        }
        if self.kappa_a < 0.0 {
            return Err(Error::param("kappa_a", "must be >= 0"));
        }
        if self.kappa_b < 0.0 {
            return Err(Error::param("kappa_b", "must be >= 0"));
        }
        Ok(())
    }
}

/// Envelopes at ω, 2ω and 3ω.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FieldTriple {
    pub a1: Complex64,
    pub a2: Complex64,
    pub a3: Complex64,
}

impl FieldTriple {
    pub fn fundamental(a1: Complex64) -> Self {
        FieldTriple {
            a1,
            ..Default::default()
        }
    }

    /// `|a1|² + 2|a2|² + 3|a3|²`.
    pub fn manley_rowe(&self) -> f64 {
        self.a1.norm_sqr() + 2.0 * self.a2.norm_sqr() + 3.0 * self.a3.norm_sqr()
    }

    pub fn powers(&self) -> [f64; 3] {
        [self.a1.norm_sqr(), self.a2.norm_sqr(), self.a3.norm_sqr()]
    }

    fn axpy(&self, h: f64, k: &FieldTriple) -> FieldTriple {
        FieldTriple {
            a1: self.a1 + k.a1 * h,
            a2: self.a2 + k.a2 * h,
            a3: self.a3 + k.a3 * h,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryPoint {
    pub z: f64,
    pub fields: FieldTriple,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Propagation {
    pub output: FieldTriple,
    /// Fields at `z = 0` and after every integration step.
    pub trajectory: Vec<TrajectoryPoint>,
}

impl Propagation {
    /// Trajectory CSV sampled every `stride` steps; the final point is always
    /// included.
    pub fn to_csv(&self, stride: usize) -> String {
        let stride = stride.max(1);
        let mut out = String::from("z,re_a1,im_a1,re_a2,im_a2,re_a3,im_a3,manley_rowe\n");
        let last = self.trajectory.len().saturating_sub(1);
        for (i, p) in self.trajectory.iter().enumerate() {
            if i % stride != 0 && i != last {
                continue;
            }
            let f = &p.fields;
            let vals = [
                p.z,
                f.a1.re,
                f.a1.im,
                f.a2.re,
                f.a2.im,
                f.a3.re,
                f.a3.im,
                f.manley_rowe(),
            ];
            let row: Vec<String> = vals.iter().map(|&v| crate::fmt_f64(v)).collect();
            let _ = writeln!(out, "{}", row.join(","));
        }
        out
    }
}

fn derivative(f: &FieldTriple, z: f64, sign: f64, p: &CoupledModeParams) -> FieldTriple {
    let i_s = Complex64::new(0.0, sign);
    let pa = Complex64::from_polar(1.0, p.dk_a * z);
    let pb = Complex64::from_polar(1.0, p.dk_b * z);
    let (a1, a2, a3) = (f.a1, f.a2, f.a3);
    FieldTriple {
        a1: i_s * (a1.conj() * a2 * pa * p.kappa_a + a2.conj() * a3 * pb * p.kappa_b),
        a2: i_s * (a1 * a1 * pa.conj() * (0.5 * p.kappa_a) + a1.conj() * a3 * pb * p.kappa_b),
        a3: i_s * (a1 * a2 * pb.conj() * p.kappa_b),
    }
}

fn rk4_step(f: &FieldTriple, z: f64, h: f64, sign: f64, p: &CoupledModeParams) -> FieldTriple {
    let k1 = derivative(f, z, sign, p);
    let k2 = derivative(&f.axpy(h / 2.0, &k1), z + h / 2.0, sign, p);
    let k3 = derivative(&f.axpy(h / 2.0, &k2), z + h / 2.0, sign, p);
    let k4 = derivative(&f.axpy(h, &k3), z + h, sign, p);
    FieldTriple {
        a1: f.a1 + (k1.a1 + (k2.a1 + k3.a1) * 2.0 + k4.a1) * (h / 6.0),
        a2: f.a2 + (k1.a2 + (k2.a2 + k3.a2) * 2.0 + k4.a2) * (h / 6.0),
        a3: f.a3 + (k1.a3 + (k2.a3 + k3.a3) * 2.0 + k4.a3) * (h / 6.0),
    }
}

/// Number of equal substeps for a domain so that none exceeds `step`.
fn substeps(length: f64, step: f64) -> usize {
    let ratio = length / step;
    let rounded = ratio.round();
    if (ratio - rounded).abs() <= 1e-9 * ratio.max(1.0) {
        (rounded as usize).max(1)
    } else {
        ratio.ceil() as usize
    }
}

fn integrate(
    fin: &FieldTriple,
    grid: &DomainGrid,
    p: &CoupledModeParams,
    step: f64,
    mut record: impl FnMut(f64, &FieldTriple),
) -> Result<FieldTriple> {
    p.validate()?;
    ensure_finite("step", step)?;
    if !(step > 0.0) {
        return Err(Error::param("step", "must be > 0"));
    }
    if grid.is_empty() {
        return Err(Error::param("grid", "grid is empty"));
    }
    let mut f = *fin;
    let mut z0 = 0.0;
    record(0.0, &f);
    for d in grid.domains() {
        let n = substeps(d.length, step);
        let h = d.length / n as f64;
        let sign = f64::from(d.sign);
        for i in 0..n {
            let z = z0 + i as f64 * h;
            f = rk4_step(&f, z, h, sign, p);
            record(z + h, &f);
        }
        z0 += d.length;
    }
    Ok(f)
}

/// Integrates the coupled-mode equations across `grid` with classical RK4.
/// Steps never straddle a domain boundary: each domain is split into the
/// smallest number of equal substeps no longer than `step`.
pub fn propagate(
    fin: &FieldTriple,
    grid: &DomainGrid,
    p: &CoupledModeParams,
    step: f64,
) -> Result<Propagation> {
    let mut trajectory = Vec::new();
    let output = integrate(fin, grid, p, step, |z, f| {
        trajectory.push(TrajectoryPoint { z, fields: *f })
    })?;
    Ok(Propagation { output, trajectory })
}

/// Like [`propagate`] but only returns the output fields.
pub fn propagate_output(
    fin: &FieldTriple,
    grid: &DomainGrid,
    p: &CoupledModeParams,
    step: f64,
) -> Result<FieldTriple> {
    integrate(fin, grid, p, step, |_, _| {})
}

/// `|a2(L)|` in `grid` relative to the perfectly phase-matched undepleted
/// growth `(κA/2)|a1|²L`, for a weak SHG-only pump.
pub fn enhancement_ratio(p: &CoupledModeParams, grid: &DomainGrid, step: f64) -> Result<f64> {
    p.validate()?;
    if p.kappa_b != 0.0 {
        return Err(Error::param(
            "kappa_b",
            "enhancement check needs kappa_b = 0",
        ));
    }
    if !(p.kappa_a > 0.0) {
        return Err(Error::param(
            "kappa_a",
            "enhancement check needs kappa_a > 0",
        ));
    }
    let length = grid.total_length();
    // κA·|a1|·L = 1e-3 keeps the pump undepleted.
    let a1 = 1e-3 / (p.kappa_a * length);
    let out = propagate_output(
        &FieldTriple::fundamental(Complex64::new(a1, 0.0)),
        grid,
        p,
        step,
    )?;
    let matched = 0.5 * p.kappa_a * a1 * a1 * length;
    Ok(out.a2.norm() / matched)
}

/// Enhancement ratio of an `n_domains` first-order QPM grid for `ΔkA`.
/// Tends to 2/π.
pub fn qpm_enhancement_check(p: &CoupledModeParams, n_domains: usize) -> Result<f64> {
    if n_domains == 0 {
        return Err(Error::param("n_domains", "must be >= 1"));
    }
    let lc = match qpm_domain_length(p.dk_a)? {
        QpmPeriod::Poled { domain_length } => domain_length,
        QpmPeriod::PhaseMatched => {
            return Err(Error::param("dk_a", "enhancement check needs dk_a != 0"))
        }
    };
    let grid = make_periodic_grid(lc * n_domains as f64, lc, 1)?;
    enhancement_ratio(p, &grid, lc / super::DEFAULT_STEPS_PER_DOMAIN as f64)
}
