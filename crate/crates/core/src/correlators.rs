//! String correlators `G^{μμ}_n` as Toeplitz minors of the kernel and the
//! collective variances of `X = Σσˣ`, `Y = Σσʸ`, `Z = Σσᶻ`.

use serde::{Deserialize, Serialize};

use crate::kernel::Kernel;
use crate::toeplitz::{leading_minors, MinorReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, PartialOrd, Ord, Hash)]
pub enum Direction {
    X,
    Y,
    Z,
}

impl Direction {
    pub fn label(self) -> &'static str {
        match self {
            Direction::X => "X",
            Direction::Y => "Y",
            Direction::Z => "Z",
        }
    }
}

/// Largest of three values with ties resolved `X ≻ Y ≻ Z`.
pub fn argmax(vx: f64, vy: f64, vz: f64) -> Direction {
    if vx >= vy && vx >= vz {
        Direction::X
    } else if vy >= vz {
        Direction::Y
    } else {
        Direction::Z
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VarianceTriple {
    pub t: f64,
    pub vx: f64,
    pub vy: f64,
    pub vz: f64,
    /// `⟨Z⟩ = N G_0`.
    pub z_exp: f64,
    pub argmax: Direction,
}

impl VarianceTriple {
    pub fn max(&self) -> f64 {
        self.vx.max(self.vy).max(self.vz)
    }

    pub fn get(&self, d: Direction) -> f64 {
        match d {
            Direction::X => self.vx,
            Direction::Y => self.vy,
            Direction::Z => self.vz,
        }
    }
}

/// `G^xx_n = det[G_{i-j-1}]_{n×n}`, `n = 1..=N-1`.
pub fn xx_minor_sequence(kernel: &Kernel) -> (Vec<f64>, MinorReport) {
    leading_minors(|d| kernel.g(d - 1), kernel.n() - 1)
}

/// `G^yy_n = det[G_{i-j+1}]_{n×n}`, `n = 1..=N-1`.
pub fn yy_minor_sequence(kernel: &Kernel) -> (Vec<f64>, MinorReport) {
    leading_minors(|d| kernel.g(d + 1), kernel.n() - 1)
}

/// `G^zz_n = G_0² - G_n G_{-n}`, `n = 1..=N-1`.
pub fn zz_sequence(kernel: &Kernel) -> Vec<f64> {
    let g0 = kernel.g(0);
    (1..kernel.n() as isize).map(|n| g0 * g0 - kernel.g(n) * kernel.g(-n)).collect()
}

/// Clamp rounding-level negatives; `tol = 1e-8 N²`.
pub fn clamp_variance(v: f64, n: usize) -> f64 {
    let tol = 1e-8 * (n * n) as f64;
    if v < 0.0 && v > -tol {
        0.0
    } else {
        v
    }
}

/// Assemble `N[1 + Σ_n G^{μμ}_n]` from the three sequences.
pub fn variances_from_sequences(t: f64, n: usize, g0: f64, xx: &[f64], yy: &[f64], zz: &[f64]) -> VarianceTriple {
    let nf = n as f64;
    let bracket = |s: &[f64]| nf * (1.0 + s.iter().sum::<f64>());
    let vx = clamp_variance(bracket(xx), n);
    let vy = clamp_variance(bracket(yy), n);
    let vz = clamp_variance(bracket(zz) - nf * nf * g0 * g0, n);
    VarianceTriple { t, vx, vy, vz, z_exp: nf * g0, argmax: argmax(vx, vy, vz) }
}

pub fn variances(kernel: &Kernel) -> VarianceTriple {
    variances_with_report(kernel).0
}

/// Variances plus the fallback report of the two minor sequences.
pub fn variances_with_report(kernel: &Kernel) -> (VarianceTriple, MinorReport, MinorReport) {
    let (xx, rx) = xx_minor_sequence(kernel);
    let (yy, ry) = yy_minor_sequence(kernel);
    let zz = zz_sequence(kernel);
    let v = variances_from_sequences(kernel.t, kernel.n(), kernel.g(0), &xx, &yy, &zz);
    if rx.used_fallback() || ry.used_fallback() {
        log::debug!(
            "t = {}: QR fallback on {} xx and {} yy orders",
            kernel.t,
            rx.fallback_orders.len(),
            ry.fallback_orders.len()
        );
    }
    (v, rx, ry)
}
