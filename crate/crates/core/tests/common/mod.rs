//! Reference computations used only by the tests. They deliberately take a
//! different route from the library code they check.

#![allow(dead_code)]

use num_complex::Complex64;
use rand::Rng;

pub type Dense = Vec<Vec<Complex64>>;

pub fn zeros(n: usize) -> Dense {
    vec![vec![Complex64::new(0.0, 0.0); n]; n]
}

pub fn identity(n: usize) -> Dense {
    let mut m = zeros(n);
    for (k, row) in m.iter_mut().enumerate() {
        row[k] = Complex64::new(1.0, 0.0);
    }
    m
}

pub fn matmul(a: &Dense, b: &Dense) -> Dense {
    let n = a.len();
    let mut m = zeros(n);
    for r in 0..n {
        for c in 0..n {
            m[r][c] = (0..n).map(|k| a[r][k] * b[k][c]).sum();
        }
    }
    m
}

pub fn scale(a: &Dense, s: Complex64) -> Dense {
    a.iter()
        .map(|row| row.iter().map(|x| x * s).collect())
        .collect()
}

fn add(a: &Dense, b: &Dense) -> Dense {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x + y).collect())
        .collect()
}

fn norm1(a: &Dense) -> f64 {
    let n = a.len();
    (0..n)
        .map(|c| (0..n).map(|r| a[r][c].norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Dense matrix exponential by scaling and squaring with a Taylor core.
pub fn expm(a: &Dense) -> Dense {
    let n = a.len();
    let nrm = norm1(a);
    let squarings = if nrm > 0.5 {
        (nrm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let scaled = scale(a, Complex64::new(0.5f64.powi(squarings as i32), 0.0));
    let mut result = identity(n);
    let mut term = identity(n);
    for k in 1..30 {
        term = scale(&matmul(&term, &scaled), Complex64::new(1.0 / k as f64, 0.0));
        result = add(&result, &term);
    }
    for _ in 0..squarings {
        result = matmul(&result, &result);
    }
    result
}

pub fn apply(m: &Dense, v: &[Complex64]) -> Vec<Complex64> {
    m.iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

/// Two-spin `b0(Z⊗I + I⊗Z) + j12 Z⊗Z` built from Kronecker products.
pub fn two_spin_hamiltonian(b0: f64, j12: f64) -> Dense {
    let z = [1.0, -1.0];
    let mut h = zeros(4);
    // Z⊗I, I⊗Z and Z⊗Z are all diagonal in the product basis.
    for s1 in 0..2 {
        for s2 in 0..2 {
            let k = 2 * s1 + s2;
            h[k][k] = Complex64::new(b0 * (z[s1] + z[s2]) + j12 * z[s1] * z[s2], 0.0);
        }
    }
    h
}

pub fn random_state<R: Rng>(rng: &mut R, dim: usize) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let n = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|a| a / n).collect()
}

/// Undepleted-pump SH power `(κA/2)²|a1|⁴L²·sinc²(ΔkA·L/2)`.
pub fn undepleted_sh_power(kappa_a: f64, a1: f64, dk: f64, length: f64) -> f64 {
    let x = dk * length / 2.0;
    let sinc = if x == 0.0 { 1.0 } else { x.sin() / x };
    (kappa_a / 2.0).powi(2) * a1.powi(4) * length * length * sinc * sinc
}
