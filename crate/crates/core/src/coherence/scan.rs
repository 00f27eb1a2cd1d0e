//! Parameter scans: ground-state `F_Q(λ)` with the location of its steepest
//! rise, the size-scaling `p`-index, and long-time `F_Q` versus final coupling.

use rayon::prelude::*;
use serde::Serialize;

use super::{mqfi, series_points, TimeGrid};
use crate::correlators::variances;
use crate::error::{Error, Result};
use crate::kernel::static_kernel;
use crate::spectrum::{check_coupling, QuenchSpec, Sector, ZeroMode};

/// Ground-state `F_Q` of coupling `λ`.
pub fn static_fq(lambda: f64, n: usize, sector: Sector, zero_mode: ZeroMode) -> Result<f64> {
    Ok(mqfi(&variances(&static_kernel(lambda, n, sector, zero_mode)?), n).fq)
}

/// Ground-state maximal collective variance `max(Vx, Vy, Vz)`.
pub fn static_max_variance(lambda: f64, n: usize, sector: Sector, zero_mode: ZeroMode) -> Result<f64> {
    Ok(variances(&static_kernel(lambda, n, sector, zero_mode)?).max())
}

/// Centered differences, one-sided at the ends.
pub fn discrete_derivative(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    (0..n)
        .map(|i| {
            if n < 2 {
                return 0.0;
            }
            let (a, b) = (i.saturating_sub(1), (i + 1).min(n - 1));
            (y[b] - y[a]) / (x[b] - x[a])
        })
        .collect()
}

/// Second differences on a possibly nonuniform grid; zero at the ends.
pub fn discrete_second_derivative(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    (0..n)
        .map(|i| {
            if i == 0 || i + 1 >= n {
                return 0.0;
            }
            let (h0, h1) = (x[i] - x[i - 1], x[i + 1] - x[i]);
            2.0 * (h0 * y[i + 1] - (h0 + h1) * y[i] + h1 * y[i - 1]) / (h0 * h1 * (h0 + h1))
        })
        .collect()
}

fn check_monotone(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::BadGrid("empty coupling grid".into()));
    }
    for &l in grid {
        check_coupling(l)?;
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::BadGrid("coupling grid must be strictly increasing".into()));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StaticScan {
    pub n: usize,
    pub lambdas: Vec<f64>,
    pub fq: Vec<f64>,
    pub dfq: Vec<f64>,
    /// Grid point of the largest discrete derivative.
    pub lambda_m_grid: f64,
    /// Steepest-rise point refined between the neighbours of `lambda_m_grid`.
    pub lambda_m: f64,
    /// The grid maximum sits on the boundary or the grid has fewer than three points.
    pub coarse: bool,
}

/// `F_Q(λ, t = 0)` over a grid and the coupling `λ_m` of its steepest rise.
pub fn static_scan(lambdas: &[f64], n: usize, sector: Sector, zero_mode: ZeroMode) -> Result<StaticScan> {
    check_monotone(lambdas)?;
    let fq = lambdas
        .par_iter()
        .map(|&l| static_fq(l, n, sector, zero_mode))
        .collect::<Result<Vec<_>>>()?;
    let dfq = discrete_derivative(lambdas, &fq);
    let im = (0..dfq.len()).fold(0, |b, i| if dfq[i] > dfq[b] { i } else { b });
    let coarse = lambdas.len() < 3 || im == 0 || im + 1 == lambdas.len();
    let lambda_m = if coarse {
        lambdas[im]
    } else {
        refine_steepest(lambdas[im - 1], lambdas[im + 1], n, sector, zero_mode)?
    };
    Ok(StaticScan { n, lambdas: lambdas.to_vec(), fq, dfq, lambda_m_grid: lambdas[im], lambda_m, coarse })
}

/// Golden-section maximization of `dF_Q/dλ` (central difference) on `[a, b]`.
pub fn refine_steepest(a: f64, b: f64, n: usize, sector: Sector, zero_mode: ZeroMode) -> Result<f64> {
    let nf = n as f64;
    let h = 1e-2 / nf.powf(1.5);
    let slope = |l: f64| -> Result<f64> {
        let lo = (l - h).max(0.0);
        Ok((static_fq(l + h, n, sector, zero_mode)? - static_fq(lo, n, sector, zero_mode)?) / (l + h - lo))
    };
    let tol = 1e-4 / (nf * nf);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut lo, mut hi) = (a, b);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (slope(x1)?, slope(x2)?);
    while hi - lo > tol {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = slope(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = slope(x2)?;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Least-squares slope and intercept of `y` against `x`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Size-scaling exponent `p` of the largest ground-state variance, `V ∝ N^p`.
pub fn p_index(lambda: f64, ns: &[usize], sector: Sector, zero_mode: ZeroMode) -> Result<f64> {
    if ns.len() < 2 {
        return Err(Error::Invalid("p-index needs at least two chain lengths".into()));
    }
    let v = ns
        .iter()
        .map(|&n| static_max_variance(lambda, n, sector, zero_mode))
        .collect::<Result<Vec<_>>>()?;
    let lx: Vec<f64> = ns.iter().map(|&n| (n as f64).ln()).collect();
    let ly: Vec<f64> = v.iter().map(|x| x.ln()).collect();
    Ok(linear_fit(&lx, &ly).0)
}

/// Exponent of `1 - λ_m ∝ N^a` from per-size steepest-rise points.
pub fn lambda_m_exponent(ns: &[usize], lambda_m: &[f64]) -> f64 {
    let lx: Vec<f64> = ns.iter().map(|&n| (n as f64).ln()).collect();
    let ly: Vec<f64> = lambda_m.iter().map(|l| (1.0 - l).abs().ln()).collect();
    linear_fit(&lx, &ly).0
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepConfig {
    pub lambda1: f64,
    pub lambda2: Vec<f64>,
    pub n: usize,
    pub sector: Sector,
    pub zero_mode: ZeroMode,
    /// End of the averaging window.
    pub t_ltr: f64,
    /// Width of the averaging window `[t_ltr - window, t_ltr]`.
    pub window: f64,
    pub dt: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sweep {
    pub lambda2: Vec<f64>,
    /// Ground-state `F_Q(λ2)`.
    pub static_fq: Vec<f64>,
    /// Window-averaged post-quench `F_Q`.
    pub long_time_fq: Vec<f64>,
    pub derivative: Vec<f64>,
    /// Second differences of `ln F̄_Q`.
    pub log_curvature: Vec<f64>,
    /// `λ2` of the largest `|Δ² ln F̄_Q|`: where the growth rate of the
    /// long-time value changes most abruptly.
    pub transition: f64,
    /// `λ2` of the largest `|ΔF̄_Q|`.
    pub steepest: f64,
    /// Location of the largest long-time value.
    pub peak: f64,
}

/// Long-time `F_Q` for each final coupling.
pub fn long_time_sweep(cfg: &SweepConfig) -> Result<Sweep> {
    check_monotone(&cfg.lambda2)?;
    check_coupling(cfg.lambda1)?;
    if !(cfg.window > 0.0) || cfg.window > cfg.t_ltr || !(cfg.dt > 0.0) {
        return Err(Error::BadGrid(format!(
            "window {} must be positive and at most t_ltr = {}; dt = {}",
            cfg.window, cfg.t_ltr, cfg.dt
        )));
    }
    let count = (cfg.window / cfg.dt).round() as usize + 1;
    let grid = TimeGrid::new(cfg.t_ltr - cfg.window, cfg.dt, count)?;
    let rows = cfg
        .lambda2
        .iter()
        .map(|&l2| {
            let spec = QuenchSpec::new(cfg.n, cfg.lambda1, l2).with_sector(cfg.sector).with_zero_mode(cfg.zero_mode);
            let pts = series_points(&spec, &grid)?;
            let avg = pts.iter().map(|p| p.fq).sum::<f64>() / pts.len() as f64;
            Ok((static_fq(l2, cfg.n, cfg.sector, cfg.zero_mode)?, avg))
        })
        .collect::<Result<Vec<_>>>()?;
    let (static_fq, long_time_fq): (Vec<f64>, Vec<f64>) = rows.into_iter().unzip();
    let derivative = discrete_derivative(&cfg.lambda2, &long_time_fq);
    let ln: Vec<f64> = long_time_fq.iter().map(|f| f.max(super::FQ_FLOOR).ln()).collect();
    let log_curvature = discrete_second_derivative(&cfg.lambda2, &ln);
    let arg = |v: &[f64]| (0..v.len()).fold(0, |b, i| if v[i].abs() > v[b].abs() { i } else { b });
    let peak_i = (0..long_time_fq.len()).fold(0, |b, i| if long_time_fq[i] > long_time_fq[b] { i } else { b });
    Ok(Sweep {
        transition: cfg.lambda2[arg(&log_curvature)],
        steepest: cfg.lambda2[arg(&derivative)],
        peak: cfg.lambda2[peak_i],
        lambda2: cfg.lambda2.clone(),
        static_fq,
        long_time_fq,
        derivative,
        log_curvature,
    })
}
