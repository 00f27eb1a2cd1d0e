//! Leading principal minors `det T_n`, `n = 1..=nmax`, of a nonsymmetric
//! Toeplitz matrix `T[i, j] = t(i - j)`.
//!
//! The fast path is the Levinson/Trench recursion on the first and last
//! columns of `T_n⁻¹` (`O(n)` per order). Its rounding error grows with the
//! conditioning of the leading blocks, so every step adds an error estimate
//! to a running budget. When the budget is exhausted the two columns are
//! polished by iterative refinement, with the Gohberg-Semencul form of the
//! current inverse as preconditioner (`O(n²)` per reseed). A tiny pivot after
//! a successful refinement is crossed with a block (look-ahead) step through
//! a small Schur complement. Blocks singular to working precision are crossed
//! by the plain recursion, since no method keeps relative digits there.
//! Anything else falls back to an incrementally updated Givens QR
//! factorization (backward stable, but `O(n³)` to catch up) until the
//! recursion can be reseeded from its solves.

use nalgebra::{DMatrix, DVector};

const EPS: f64 = f64::EPSILON;

/// Accumulated relative-error budget for the recursion before a reseed. The
/// per-step estimate is a worst-case bound; the error refinement actually
/// removes at a reseed is typically 1e-13 or less.
pub const DEFAULT_BUDGET: f64 = 1e-6;

/// `eps · κ` above which a leading block counts as numerically singular.
const SINGULAR_LEVEL: f64 = 1e-6;

/// Largest relative correction at which a stalled refinement is accepted.
const MAX_STALL: f64 = 1e-8;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct MinorReport {
    /// Orders whose determinant came from the QR path.
    pub fallback_orders: Vec<usize>,
    /// Number of QR factorizations started (at most one per call).
    pub rebuilds: usize,
    /// Reseeds done by iterative refinement.
    pub refinements: usize,
    /// Block steps taken across near-singular leading blocks.
    pub look_aheads: usize,
    /// Runs of orders through numerically singular blocks, advanced by the
    /// recursion without an error bound.
    pub singular_stretches: usize,
}

impl MinorReport {
    pub fn used_fallback(&self) -> bool {
        !self.fallback_orders.is_empty()
    }
}

/// Incremental QR of the growing leading block, `T_n = Q R` with `det Q = 1`.
/// `qt` holds `Qᵀ` row-major so Givens updates touch contiguous rows.
struct GrowingQr {
    cap: usize,
    n: usize,
    qt: Vec<f64>,
    r: Vec<f64>,
}

impl GrowingQr {
    fn new(cap: usize) -> Self {
        Self { cap, n: 0, qt: vec![0.0; cap * cap], r: vec![0.0; cap * cap] }
    }

    /// Grow from order `n` to `n + 1` using the Toeplitz generator.
    fn grow(&mut self, tp: &[f64], tn: &[f64]) {
        let (n, cap) = (self.n, self.cap);
        // New column of R: Q^T u with u_i = t(i - n).
        for i in 0..n {
            let row = &self.qt[i * cap..i * cap + n];
            self.r[i * cap + n] = row.iter().enumerate().map(|(l, q)| q * tn[n - l]).sum();
        }
        for l in 0..n {
            self.qt[l * cap + n] = 0.0;
            self.qt[n * cap + l] = 0.0;
        }
        self.qt[n * cap + n] = 1.0;
        // Bottom row v_j = t(n - j), corner t(0); rotated into the triangle.
        let mut row: Vec<f64> = (0..=n).map(|j| tp[n - j]).collect();
        for i in 0..n {
            let a = self.r[i * cap + i];
            let b = row[i];
            if b == 0.0 {
                continue;
            }
            let h = a.hypot(b);
            let (c, s) = (a / h, b / h);
            for j in i..=n {
                let ri = self.r[i * cap + j];
                self.r[i * cap + j] = c * ri + s * row[j];
                row[j] = -s * ri + c * row[j];
            }
            let (head, tail) = self.qt.split_at_mut(n * cap);
            let qi = &mut head[i * cap..i * cap + n + 1];
            let qn = &mut tail[..n + 1];
            for (x, y) in qi.iter_mut().zip(qn.iter_mut()) {
                let (a, b) = (*x, *y);
                *x = c * a + s * b;
                *y = -s * a + c * b;
            }
        }
        self.r[n * cap + n] = row[n];
        for j in 0..n {
            self.r[n * cap + j] = 0.0;
        }
        self.n = n + 1;
    }

    fn det(&self) -> f64 {
        (0..self.n).map(|i| self.r[i * self.cap + i]).product()
    }

    /// Solve `T_n x = e_row`; `None` if a diagonal of R vanishes.
    fn solve_unit(&self, row: usize) -> Option<Vec<f64>> {
        let (n, cap) = (self.n, self.cap);
        let mut x: Vec<f64> = (0..n).map(|i| self.qt[i * cap + row]).collect();
        for i in (0..n).rev() {
            let mut acc = x[i];
            for j in i + 1..n {
                acc -= self.r[i * cap + j] * x[j];
            }
            let d = self.r[i * cap + i];
            if d == 0.0 {
                return None;
            }
            x[i] = acc / d;
        }
        Some(x)
    }
}

fn norm1(v: &[f64]) -> f64 {
    v.iter().map(|x| x.abs()).sum()
}

fn toeplitz_apply(tp: &[f64], tn: &[f64], v: &[f64]) -> Vec<f64> {
    let n = v.len();
    (0..n)
        .map(|i| {
            let lower: f64 = (0..=i).map(|j| tp[i - j] * v[j]).sum();
            let upper: f64 = (i + 1..n).map(|j| tn[j - i] * v[j]).sum();
            lower + upper
        })
        .collect()
}

/// `T⁻¹ v` from the first column `x` and last column `y` of `T⁻¹`:
/// `T⁻¹ = (L(x) L(Jy)ᵀ - L(Zy) L(ZJx)ᵀ) / x₀` with `L(a)` lower-triangular
/// Toeplitz, `J` the reversal and `Z` the down-shift.
///
/// Direct sums, not FFT convolutions: on ill-conditioned blocks the FFT's
/// uniform absolute rounding is amplified by the inverse and refinement stalls.
fn gohberg_semencul_apply(x: &[f64], y: &[f64], v: &[f64]) -> Vec<f64> {
    let n = x.len();
    // (L(a)ᵀ v)_i = Σ_{j≥i} a_{j-i} v_j
    let p: Vec<f64> = (0..n).map(|i| (i..n).map(|j| y[n - 1 - (j - i)] * v[j]).sum()).collect();
    let q: Vec<f64> = (0..n).map(|i| (i + 1..n).map(|j| x[n - (j - i)] * v[j]).sum()).collect();
    (0..n)
        .map(|i| {
            let a: f64 = (0..=i).map(|j| x[i - j] * p[j]).sum();
            let c: f64 = (0..i).map(|j| y[i - 1 - j] * q[j]).sum();
            (a - c) / x[0]
        })
        .collect()
}

/// Refine the first and last columns of `T_m⁻¹` in place. The corrections
/// must shrink to rounding level, or stall no higher than the `eps · κ` floor
/// of the block; otherwise returns `false`, leaving the columns as given.
fn refine_columns(tp: &[f64], tn: &[f64], tmax: f64, f: &mut Vec<f64>, b: &mut Vec<f64>) -> bool {
    const MAX_SWEEPS: usize = 4;
    let m = f.len();
    let tol = 8.0 * EPS * m as f64;
    let floor = (10.0 * EPS * 0.5 * (norm1(f) + norm1(b)) * tmax * m as f64).min(MAX_STALL);
    let (mut ff, mut bb) = (f.clone(), b.clone());
    let mut last = f64::INFINITY;
    for _ in 0..MAX_SWEEPS {
        let mut rf = toeplitz_apply(tp, tn, &ff);
        let mut rb = toeplitz_apply(tp, tn, &bb);
        rf.iter_mut().for_each(|r| *r = -*r);
        rb.iter_mut().for_each(|r| *r = -*r);
        rf[0] += 1.0;
        rb[m - 1] += 1.0;
        let df = gohberg_semencul_apply(&ff, &bb, &rf);
        let db = gohberg_semencul_apply(&ff, &bb, &rb);
        let size = (norm1(&df) / norm1(&ff)).max(norm1(&db) / norm1(&bb));
        if !size.is_finite() || size >= 0.5 * last {
            if last > floor {
                return false;
            }
            break;
        }
        ff.iter_mut().zip(&df).for_each(|(x, d)| *x += d);
        bb.iter_mut().zip(&db).for_each(|(x, d)| *x += d);
        last = size;
        if size <= tol {
            break;
        }
    }
    if last > tol.max(floor) {
        return false;
    }
    *f = ff;
    *b = bb;
    true
}

const MAX_LOOK_AHEAD: usize = 8;

struct LookAhead {
    f: Vec<f64>,
    b: Vec<f64>,
    /// `det T_{m+j} / det T_m` for `j = 1..=k`.
    dets: Vec<f64>,
}

/// Border `T_m` by `k` rows and columns at once through the `k × k` Schur
/// complement `S = W - V T_m⁻¹ U`, taking the smallest `k` whose new inverse
/// columns stay within `max_norm` (in units of `1 / (tmax · order)`).
/// `f`, `b` must be accurate columns of `T_m⁻¹`.
fn look_ahead(tp: &[f64], tn: &[f64], f: &[f64], b: &[f64], max_norm: f64) -> Option<LookAhead> {
    let m = f.len();
    let kmax = MAX_LOOK_AHEAD.min(tp.len() - m);
    // z[c] = T_m⁻¹ u_c with u_c the part of column m + c above row m.
    let mut z: Vec<Vec<f64>> = Vec::with_capacity(kmax);
    for k in 2..=kmax {
        while z.len() < k {
            let c = z.len();
            let u: Vec<f64> = (0..m).map(|i| tn[m + c - i]).collect();
            z.push(gohberg_semencul_apply(f, b, &u));
        }
        let v = |r: usize, j: usize| tp[m + r - j];
        let w = |r: usize, c: usize| if r >= c { tp[r - c] } else { tn[c - r] };
        let s = DMatrix::from_fn(k, k, |r, c| w(r, c) - (0..m).map(|j| v(r, j) * z[c][j]).sum::<f64>());
        let vf = DVector::from_fn(k, |r, _| (0..m).map(|j| v(r, j) * f[j]).sum::<f64>());
        let lu = s.clone().lu();
        let (Some(xb), Some(yb)) = (lu.solve(&(-vf)), lu.solve(&DVector::from_fn(k, |r, _| if r == k - 1 { 1.0 } else { 0.0 })))
        else {
            continue;
        };
        let top = |bottom: &DVector<f64>, base: Option<&[f64]>| -> Vec<f64> {
            (0..m).map(|i| base.map_or(0.0, |x| x[i]) - (0..k).map(|c| z[c][i] * bottom[c]).sum::<f64>()).collect()
        };
        let mut nf = top(&xb, Some(f));
        nf.extend(xb.iter());
        let mut nb = top(&yb, None);
        nb.extend(yb.iter());
        let norm = 0.5 * (norm1(&nf) + norm1(&nb)) * (m + k) as f64;
        if norm.is_finite() && norm <= max_norm {
            let dets = (1..=k).map(|j| s.view((0, 0), (j, j)).into_owned().lu().determinant()).collect();
            return Some(LookAhead { f: nf, b: nb, dets });
        }
    }
    None
}

/// Leading minors with the default error budget.
pub fn leading_minors(t: impl Fn(isize) -> f64, nmax: usize) -> (Vec<f64>, MinorReport) {
    leading_minors_with_budget(t, nmax, DEFAULT_BUDGET)
}

pub fn leading_minors_with_budget(t: impl Fn(isize) -> f64, nmax: usize, budget: f64) -> (Vec<f64>, MinorReport) {
    let mut report = MinorReport::default();
    let mut det = vec![0.0; nmax];
    if nmax == 0 {
        return (det, report);
    }
    // tp[d] = t(d), tn[d] = t(-d), d = 0..nmax-1.
    let tp: Vec<f64> = (0..nmax as isize).map(&t).collect();
    let tn: Vec<f64> = (0..nmax as isize).map(|d| t(-d)).collect();
    let tmax = tp.iter().chain(&tn).fold(0.0f64, |a, x| a.max(x.abs()));
    if tmax == 0.0 {
        return (det, report);
    }

    let mut f = Vec::with_capacity(nmax);
    let mut b = Vec::with_capacity(nmax);
    let mut spent = f64::INFINITY;
    // The QR factorization is kept once built, so repeated breakdowns only pay
    // for catching up from the order it last reached.
    let mut qr: Option<GrowingQr> = None;
    let mut on_qr = false;

    if tp[0] != 0.0 && tmax / tp[0].abs() * EPS < budget {
        f.push(1.0 / tp[0]);
        b.push(1.0 / tp[0]);
        spent = tmax / tp[0].abs() * EPS;
    }
    det[0] = tp[0];
    if f.is_empty() {
        report.fallback_orders.push(1);
        let mut g = GrowingQr::new(nmax);
        g.grow(&tp, &tn);
        report.rebuilds += 1;
        qr = Some(g);
        on_qr = true;
    }

    let mut singular = false;
    let mut m = 1;
    while m < nmax {
        // Extend order m to m + 1 (or m + k after a look-ahead step).
        let mut refined = false;
        while !on_qr {
            let ef: f64 = (0..m).map(|j| tp[m - j] * f[j]).sum();
            let eb: f64 = (0..m).map(|j| tn[1 + j] * b[j]).sum();
            let den = 1.0 - ef * eb;
            let kappa = 0.5 * (norm1(&f) + norm1(&b)) * tmax * m as f64;
            let step = EPS * kappa * (1.0 + (ef * eb).abs()) / den.abs();
            // Ill-conditioned blocks limit any method to about eps * kappa; only
            // fall back when the recursion is doing much worse than that.
            let allowed = budget.max(100.0 * EPS * kappa * (m as f64).sqrt());
            // Through a block that is singular to working precision no method
            // keeps relative digits; carry on and reseed once it is behind us.
            let coast = singular && EPS * kappa >= SINGULAR_LEVEL;
            if den != 0.0 && step.is_finite() && (coast || spent + step <= allowed) {
                let saved = coast.then(|| (f.clone(), b.clone()));
                f.push(0.0);
                b.insert(0, 0.0);
                for j in 0..=m {
                    let (fj, bj) = (f[j], b[j]);
                    f[j] = (fj - ef * bj) / den;
                    b[j] = (bj - eb * fj) / den;
                }
                let d = det[m - 1] / f[0];
                if let (Some((f0, b0)), false) = (saved, d.is_finite() && f[0].is_finite()) {
                    // Overflow inside a singular stretch: leave it to QR.
                    (f, b) = (f0, b0);
                    on_qr = true;
                    break;
                }
                spent += step;
                det[m] = d;
                m += 1;
                singular &= coast;
                break;
            }
            if !refined {
                refined = true;
                if den.is_finite() && refine_columns(&tp, &tn, tmax, &mut f, &mut b) {
                    report.refinements += 1;
                    spent = EPS * 0.5 * (norm1(&f) + norm1(&b)) * tmax * m as f64;
                    continue;
                }
                if EPS * kappa >= SINGULAR_LEVEL && !singular {
                    singular = true;
                    report.singular_stretches += 1;
                    continue;
                }
            } else if let Some(step) = look_ahead(&tp, &tn, &f, &b, allowed / (EPS * tmax)) {
                let k = step.dets.len();
                for (j, d) in step.dets.iter().enumerate() {
                    det[m + j] = det[m - 1] * d;
                }
                f = step.f;
                b = step.b;
                spent = EPS * 0.5 * (norm1(&f) + norm1(&b)) * tmax * (m + k) as f64;
                report.look_aheads += 1;
                m += k;
                break;
            }
            on_qr = true;
        }
        if !on_qr {
            continue;
        }
        let g = qr.get_or_insert_with(|| {
            report.rebuilds += 1;
            GrowingQr::new(nmax)
        });
        while g.n <= m {
            g.grow(&tp, &tn);
        }
        det[m] = g.det();
        report.fallback_orders.push(m + 1);
        if m + 1 < nmax {
            if let (Some(ff), Some(bb)) = (g.solve_unit(0), g.solve_unit(m)) {
                let kappa = 0.5 * (norm1(&ff) + norm1(&bb)) * tmax * (m + 1) as f64;
                if (EPS * kappa).is_finite() {
                    f = ff;
                    b = bb;
                    spent = EPS * kappa;
                    on_qr = false;
                }
            }
        }
        m += 1;
    }
    (det, report)
}

/// All orders through the incremental QR, `O(n³)` overall.
pub fn qr_leading_minors(t: impl Fn(isize) -> f64, nmax: usize) -> Vec<f64> {
    let tp: Vec<f64> = (0..nmax as isize).map(&t).collect();
    let tn: Vec<f64> = (0..nmax as isize).map(|d| t(-d)).collect();
    let mut g = GrowingQr::new(nmax);
    (0..nmax)
        .map(|_| {
            g.grow(&tp, &tn);
            g.det()
        })
        .collect()
}

/// Reference: one partial-pivoting LU per order, `O(n⁴)` overall.
pub fn dense_leading_minors(t: impl Fn(isize) -> f64, nmax: usize) -> Vec<f64> {
    (1..=nmax)
        .map(|n| DMatrix::from_fn(n, n, |i, j| t(i as isize - j as isize)).lu().determinant())
        .collect()
}
