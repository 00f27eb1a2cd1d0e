//! The contraction `G_j(t)` feeding every string correlator.
//!
//! `G_j(t) = -Σ_k w_k [cos 2Φ_k cos(kj + 2θ_k) + sin 2Φ_k sin(kj + 2θ_k) cos(2ε_k t)]`
//! with post-quench `θ_k, ε_k` and mode weights `w_k` (`2/N` for paired modes).

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::spectrum::{build_modes, ModeSet, QuenchSpec, Sector, ZeroMode};

/// `G_j(t)` for `j = -(N-1) ..= N-1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel {
    pub t: f64,
    n: usize,
    values: Vec<f64>,
}

impl Kernel {
    pub fn from_values(t: f64, n: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != 2 * n - 1 {
            return Err(Error::Invalid(format!("kernel for N = {n} needs {} values, got {}", 2 * n - 1, values.len())));
        }
        Ok(Self { t, n, values })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `G_j`; panics outside `|j| ≤ N-1`.
    #[inline]
    pub fn g(&self, j: isize) -> f64 {
        self.values[(j + self.n as isize - 1) as usize]
    }

    /// Values ordered from `j = -(N-1)` to `j = N-1`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }
}

fn check_time(t: f64) -> Result<()> {
    if !t.is_finite() || t < 0.0 {
        return Err(Error::NegativeTime(t));
    }
    Ok(())
}

/// Reference evaluation: direct sum over modes in ascending `k`, `O(N)` per offset.
pub fn eval_kernel_direct(modes: &ModeSet, t: f64) -> Result<Kernel> {
    check_time(t)?;
    let n = modes.n() as isize;
    let values = (-(n - 1)..n)
        .map(|j| {
            let mut acc = 0.0;
            for m in &modes.modes {
                let x = m.k * j as f64;
                let (s, c) = x.sin_cos();
                let cos_arg = c * m.cos2theta2 - s * m.sin2theta2;
                let sin_arg = s * m.cos2theta2 + c * m.sin2theta2;
                acc += m.weight * (m.cos2phi * cos_arg + m.sin2phi * sin_arg * (2.0 * m.eps2 * t).cos());
            }
            -acc
        })
        .collect();
    Ok(Kernel { t, n: n as usize, values })
}

/// Transform-based evaluator for one quench.
///
/// `Σ_k c_k e^{ikj}` with `k = 2π(m + s)/N` is a length-`N` inverse DFT in `m`
/// times the twist `e^{2πisj/N}`, periodic in `j` up to that twist. The static
/// half of the kernel is computed once; each time point costs one FFT.
pub struct KernelPlan {
    modes: ModeSet,
    fft: Arc<dyn Fft<f64>>,
    shift: f64,
    static_part: Vec<f64>,
    /// `w_k e^{2iθ_k} (-i sin 2Φ_k)` per mode, placed at its DFT index.
    dyn_coef: Vec<(usize, Complex64, f64)>,
}

impl KernelPlan {
    pub fn new(modes: ModeSet) -> Self {
        let n = modes.n();
        let fft = FftPlanner::new().plan_fft_inverse(n);
        let shift = match modes.spec.sector {
            Sector::Integer => 0.0,
            Sector::HalfInteger => 0.5,
        };
        let mut buf = vec![Complex64::new(0.0, 0.0); n];
        let mut dyn_coef = Vec::with_capacity(modes.modes.len());
        for (m, md) in modes.modes.iter().enumerate() {
            let rot = Complex64::new(md.cos2theta2, md.sin2theta2) * md.weight;
            buf[m] += rot * md.cos2phi;
            dyn_coef.push((m, rot * Complex64::new(0.0, -md.sin2phi), md.eps2));
        }
        let mut plan = Self { modes, fft, shift, static_part: Vec::new(), dyn_coef };
        plan.static_part = plan.unfold(&mut buf);
        plan
    }

    pub fn modes(&self) -> &ModeSet {
        &self.modes
    }

    /// Transform `buf` in place and return `-Re(...)` on the offsets `-(N-1)..=N-1`.
    fn unfold(&self, buf: &mut [Complex64]) -> Vec<f64> {
        self.fft.process(buf);
        let n = self.modes.n() as isize;
        (-(n - 1)..n)
            .map(|j| {
                let v = buf[j.rem_euclid(n) as usize];
                if self.shift == 0.0 {
                    -v.re
                } else {
                    let (s, c) = (2.0 * PI * self.shift * j as f64 / n as f64).sin_cos();
                    -(v.re * c - v.im * s)
                }
            })
            .collect()
    }

    pub fn eval(&self, t: f64) -> Result<Kernel> {
        check_time(t)?;
        let n = self.modes.n();
        let mut buf = vec![Complex64::new(0.0, 0.0); n];
        for &(m, c, eps) in &self.dyn_coef {
            buf[m] += c * (2.0 * eps * t).cos();
        }
        let mut values = self.unfold(&mut buf);
        for (v, s) in values.iter_mut().zip(&self.static_part) {
            *v += s;
        }
        Ok(Kernel { t, n, values })
    }
}

/// Fast-path kernel at one time.
pub fn eval_kernel(modes: &ModeSet, t: f64) -> Result<Kernel> {
    KernelPlan::new(modes.clone()).eval(t)
}

/// Ground-state kernel of coupling `λ` (no quench, `t = 0`).
pub fn static_kernel(lambda: f64, n: usize, sector: Sector, zero_mode: ZeroMode) -> Result<Kernel> {
    let spec = QuenchSpec::new(n, lambda, lambda).with_sector(sector).with_zero_mode(zero_mode);
    eval_kernel(&build_modes(&spec)?, 0.0)
}
