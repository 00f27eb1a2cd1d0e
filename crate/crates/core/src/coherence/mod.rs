//! Headline observables along a quench: MQFI `F_Q`, Loschmidt echo, the two
//! rate functions, and the detectors that turn a series into event times.

pub mod detect;
pub mod scan;

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::correlators::{variances, Direction, VarianceTriple};
use crate::error::{Error, Result};
use crate::kernel::KernelPlan;
use crate::spectrum::{build_modes, ModeSet, QuenchSpec};

pub use detect::{
    detect_dqpt_cusps, detect_mqfi_cusps, detect_revival_or_decay, rfq_first_minimum, Event, EventKind,
};

/// `F_Q` below this is reported as a divergent rate.
pub const FQ_FLOOR: f64 = 1e-300;

/// Rate function value; `Divergent` marks a zero of the underlying quantity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Rate {
    Finite(f64),
    Divergent,
}

impl Rate {
    pub fn value(self) -> Option<f64> {
        match self {
            Rate::Finite(v) => Some(v),
            Rate::Divergent => None,
        }
    }

    /// Finite value or `+∞`, for ordering-based detectors.
    pub fn or_inf(self) -> f64 {
        self.value().unwrap_or(f64::INFINITY)
    }
}

impl Serialize for Rate {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Rate::Finite(v) => s.serialize_f64(*v),
            Rate::Divergent => s.serialize_str("divergent"),
        }
    }
}

impl std::fmt::Display for Rate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Rate::Finite(v) => write!(f, "{v:.12e}"),
            Rate::Divergent => f.write_str("divergent"),
        }
    }
}

fn rate_from_log(log_value: f64, n: usize) -> Rate {
    if log_value == f64::NEG_INFINITY {
        Rate::Divergent
    } else {
        Rate::Finite(-2.0 * log_value / n as f64)
    }
}

/// `-(1/N) log(le²)`.
pub fn rate_le(le: f64, n: usize) -> Rate {
    if le <= 0.0 {
        Rate::Divergent
    } else {
        rate_from_log(le.ln(), n)
    }
}

/// `-(1/N) log(fq²)`.
pub fn rate_fq(fq: f64, n: usize) -> Rate {
    if fq < FQ_FLOOR {
        Rate::Divergent
    } else {
        rate_from_log(fq.ln(), n)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Mqfi {
    pub fq: f64,
    pub n_eff: f64,
    pub argmax: Direction,
}

/// `max(Vx, Vy, Vz)/N²`.
///
/// The rotated-direction objective is a convex combination of the three
/// variances with weights `(sin²β cos²φ, sin²β sin²φ, cos²β)`, so its maximum
/// over the sphere sits on a coordinate axis.
pub fn mqfi(var: &VarianceTriple, n: usize) -> Mqfi {
    let nf = n as f64;
    let fq = (var.get(var.argmax) / (nf * nf)).min(1.0);
    Mqfi { fq, n_eff: nf * fq, argmax: var.argmax }
}

/// `Σ_{k>0} ln|cos²Φ + sin²Φ e^{-2iε t}|`, using
/// `|cos²Φ + sin²Φ e^{-ix}|² = 1 - sin²2Φ sin²(x/2)`.
pub fn log_loschmidt_echo(modes: &ModeSet, t: f64) -> f64 {
    modes
        .paired()
        .map(|m| {
            let s = (m.eps2 * t).sin();
            0.5 * (-(m.sin2phi * m.sin2phi) * s * s).ln_1p()
        })
        .sum()
}

pub fn loschmidt_echo(modes: &ModeSet, t: f64) -> f64 {
    log_loschmidt_echo(modes, t).exp().clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TimeGrid {
    pub t0: f64,
    pub dt: f64,
    pub count: usize,
}

impl TimeGrid {
    pub fn new(t0: f64, dt: f64, count: usize) -> Result<Self> {
        let g = Self { t0, dt, count };
        g.validate()?;
        Ok(g)
    }

    /// `0, dt, ..., t_max` with `round(t_max/dt) + 1` points.
    pub fn span(t_max: f64, dt: f64) -> Result<Self> {
        if !(dt > 0.0) || !t_max.is_finite() || t_max < 0.0 {
            return Err(Error::BadGrid(format!("t_max = {t_max}, dt = {dt}")));
        }
        Self::new(0.0, dt, (t_max / dt).round() as usize + 1)
    }

    pub fn validate(&self) -> Result<()> {
        if self.count == 0 {
            return Err(Error::BadGrid("empty time grid".into()));
        }
        if !self.t0.is_finite() || self.t0 < 0.0 {
            return Err(Error::BadGrid(format!("start time {} must be finite and non-negative", self.t0)));
        }
        if self.count > 1 && !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::BadGrid(format!("step {} must be positive", self.dt)));
        }
        Ok(())
    }

    pub fn time(&self, i: usize) -> f64 {
        self.t0 + i as f64 * self.dt
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.count).map(|i| self.time(i)).collect()
    }

    pub fn end(&self) -> f64 {
        self.time(self.count - 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoherencePoint {
    pub t: f64,
    pub fq: f64,
    pub n_eff: f64,
    pub le: f64,
    pub r_le: Rate,
    pub r_fq: Rate,
    pub argmax: Direction,
    pub vx: f64,
    pub vy: f64,
    pub vz: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoherenceSeries {
    pub spec: QuenchSpec,
    pub grid: TimeGrid,
    pub points: Vec<CoherencePoint>,
    pub events: Vec<Event>,
}

impl CoherenceSeries {
    pub fn times(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.t).collect()
    }

    pub fn fq(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.fq).collect()
    }

    pub fn events_of(&self, kind: EventKind) -> Vec<f64> {
        self.events.iter().filter(|e| e.kind == kind).map(|e| e.time).collect()
    }
}

fn point(plan: &KernelPlan, t: f64) -> Result<CoherencePoint> {
    let n = plan.modes().n();
    let var = variances(&plan.eval(t)?);
    let q = mqfi(&var, n);
    let log_le = log_loschmidt_echo(plan.modes(), t);
    Ok(CoherencePoint {
        t,
        fq: q.fq,
        n_eff: q.n_eff,
        le: log_le.exp().clamp(0.0, 1.0),
        r_le: rate_from_log(log_le, n),
        r_fq: rate_fq(q.fq, n),
        argmax: q.argmax,
        vx: var.vx,
        vy: var.vy,
        vz: var.vz,
    })
}

/// Evaluate every grid time (in parallel, deterministic order) without events.
pub fn series_points(spec: &QuenchSpec, grid: &TimeGrid) -> Result<Vec<CoherencePoint>> {
    grid.validate()?;
    let plan = KernelPlan::new(build_modes(spec)?);
    (0..grid.count).into_par_iter().map(|i| point(&plan, grid.time(i))).collect()
}

/// Full series with the event detectors applied.
///
/// MQFI and DQPT cusps are always searched. The first `r_FQ` minimum is added
/// when one exists. Revival/decay is added for quenches ending at `λ2 = 1`
/// whose grid covers the detector window.
pub fn run_series(spec: &QuenchSpec, grid: &TimeGrid) -> Result<CoherenceSeries> {
    let points = series_points(spec, grid)?;
    let mut events = detect_mqfi_cusps(&points);
    events.extend(detect_dqpt_cusps(&points));
    if let Ok(e) = rfq_first_minimum(&points) {
        events.push(e);
    }
    if spec.lambda2 == 1.0 && spec.lambda1 != 1.0 {
        if let Some(pred) = crate::spectrum::revival_time_prediction(spec)?.finite() {
            if let Ok(e) = detect_revival_or_decay(&points, pred, spec.lambda1) {
                events.push(e);
            }
        }
    }
    events.sort_by(|a, b| a.time.total_cmp(&b.time).then(a.kind.cmp(&b.kind)));
    Ok(CoherenceSeries { spec: *spec, grid: *grid, points, events })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rate_examples() {
        assert_eq!(rate_le(1.0, 10), Rate::Finite(0.0));
        assert_eq!(rate_fq(1.0, 10), Rate::Finite(0.0));
        let n = 40;
        match rate_le((-(n as f64) / 2.0).exp(), n) {
            Rate::Finite(v) => assert!((v - 1.0).abs() < 1e-12),
            Rate::Divergent => panic!(),
        }
        assert_eq!(rate_le(0.0, 10), Rate::Divergent);
        assert_eq!(rate_fq(1e-301, 10), Rate::Divergent);
    }

    #[test]
    fn grid_validation() {
        assert!(TimeGrid::new(0.0, 0.1, 0).is_err());
        assert!(TimeGrid::new(-1.0, 0.1, 3).is_err());
        assert!(TimeGrid::new(0.0, 0.0, 3).is_err());
        let g = TimeGrid::span(1.0, 0.25).unwrap();
        assert_eq!(g.count, 5);
        assert_eq!(g.end(), 1.0);
    }
}
