//! Event detectors run as a sequential pass over an assembled series.

use serde::Serialize;

use super::CoherencePoint;
use crate::correlators::Direction;
use crate::error::{Error, Result};

/// Curvature threshold as a multiple of the median absolute second difference.
pub const CURVATURE_FACTOR: f64 = 10.0;
/// Candidate cusps closer than this many grid steps are one cusp.
pub const CUSP_MERGE_STEPS: usize = 10;
/// Largest ratio of stride-2 to stride-1 second differences accepted as a kink.
/// A slope discontinuity gives 2, smooth curvature gives 4.
pub const KINK_RATIO_MAX: f64 = 3.5;
/// Half-width of the revival/decay search window relative to the prediction.
pub const REVIVAL_WINDOW: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EventKind {
    DqptCusp,
    MqfiCusp,
    Revival,
    Decay,
    RfqFirstMin,
}

impl EventKind {
    pub fn label(self) -> &'static str {
        match self {
            EventKind::DqptCusp => "dqpt-cusp",
            EventKind::MqfiCusp => "mqfi-cusp",
            EventKind::Revival => "revival",
            EventKind::Decay => "decay",
            EventKind::RfqFirstMin => "rfq-first-min",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Event {
    pub kind: EventKind,
    pub time: f64,
    /// Free-form `key=value` annotations.
    pub detail: String,
}

fn variance(p: &CoherencePoint, d: Direction) -> f64 {
    match d {
        Direction::X => p.vx,
        Direction::Y => p.vy,
        Direction::Z => p.vz,
    }
}

/// Argmax switches, refined to the crossing of the two variance branches.
pub fn detect_mqfi_cusps(points: &[CoherencePoint]) -> Vec<Event> {
    points
        .windows(2)
        .filter(|w| w[0].argmax != w[1].argmax)
        .map(|w| {
            let (a, b) = (w[0].argmax, w[1].argmax);
            let d0 = variance(&w[0], a) - variance(&w[0], b);
            let d1 = variance(&w[1], a) - variance(&w[1], b);
            let frac = if d0 - d1 > 0.0 { (d0 / (d0 - d1)).clamp(0.0, 1.0) } else { 0.5 };
            Event {
                kind: EventKind::MqfiCusp,
                time: w[0].t + frac * (w[1].t - w[0].t),
                detail: format!("from={} to={}", a.label(), b.label()),
            }
        })
        .collect()
}

fn median(mut v: Vec<f64>) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

/// Indices of isolated curvature spikes of `y`: local maxima of `|Δ²y|` above
/// `CURVATURE_FACTOR` times its median that scale like a kink under a doubled
/// stride, keeping the strongest of any group of candidates closer than
/// `CUSP_MERGE_STEPS` grid steps.
pub fn curvature_spikes(y: &[f64]) -> Vec<usize> {
    if y.len() < 3 {
        return Vec::new();
    }
    let curv: Vec<f64> = (1..y.len() - 1).map(|i| (y[i + 1] - 2.0 * y[i] + y[i - 1]).abs()).collect();
    let finite: Vec<f64> = curv.iter().copied().filter(|c| c.is_finite()).collect();
    let thr = CURVATURE_FACTOR * median(finite);
    let at = |i: usize| curv.get(i).copied().unwrap_or(0.0);
    let mut candidates: Vec<usize> = (0..curv.len())
        .filter(|&i| {
            let c = curv[i];
            c > thr && c >= at(i.wrapping_sub(1)) && c >= at(i + 1) && !c.is_nan() && kink_like(y, &curv, i + 1)
        })
        .collect();
    // Group and keep the strongest spike per group.
    let mut out: Vec<usize> = Vec::new();
    let mut group: Vec<usize> = Vec::new();
    candidates.push(usize::MAX);
    for c in candidates {
        if let Some(&last) = group.last() {
            if c == usize::MAX || c - last > CUSP_MERGE_STEPS {
                let best = group.iter().copied().fold(group[0], |b, i| if curv[i] > curv[b] { i } else { b });
                out.push(best + 1);
                group.clear();
            }
        }
        if c != usize::MAX {
            group.push(c);
        }
    }
    out
}

/// Compare `|y[k+2] - 2y[k] + y[k-2]|` with `|Δ²y|` around sample `i`.
fn kink_like(y: &[f64], curv: &[f64], i: usize) -> bool {
    if i < 3 || i + 3 >= y.len() {
        return false;
    }
    let c1 = curv[i - 2..=i].iter().copied().fold(0.0, f64::max);
    let c2 = (i - 1..=i + 1).map(|k| (y[k + 2] - 2.0 * y[k] + y[k - 2]).abs()).fold(0.0, f64::max);
    c2 <= KINK_RATIO_MAX * c1
}

/// Kinks of `r_LE(t)` located as isolated curvature spikes.
pub fn detect_dqpt_cusps(points: &[CoherencePoint]) -> Vec<Event> {
    let r: Vec<f64> = points.iter().map(|p| p.r_le.or_inf()).collect();
    // A flat rate function has zero median curvature; only report genuine spikes.
    curvature_spikes(&r)
        .into_iter()
        .filter(|&i| {
            let c = (r[i + 1] - 2.0 * r[i] + r[i - 1]).abs();
            c > 1e-12 * (1.0 + r[i].abs())
        })
        .map(|i| Event { kind: EventKind::DqptCusp, time: points[i].t, detail: String::new() })
        .collect()
}

/// Vertex of the parabola through three equally spaced samples around `i`.
fn parabolic_offset(ym: f64, y0: f64, yp: f64) -> f64 {
    let denom = ym - 2.0 * y0 + yp;
    if denom == 0.0 || !denom.is_finite() {
        0.0
    } else {
        (0.5 * (ym - yp) / denom).clamp(-0.5, 0.5)
    }
}

fn refine(points: &[CoherencePoint], y: &[f64], i: usize) -> f64 {
    if i == 0 || i + 1 >= y.len() {
        return points[i].t;
    }
    let dt = points[i + 1].t - points[i].t;
    points[i].t + dt * parabolic_offset(y[i - 1], y[i], y[i + 1])
}

/// Global `F_Q` extremum within `±25%` of `prediction`: a minimum (`revival`)
/// when the chain starts ferromagnetic (`λ1 > 1`), a maximum (`decay`) when it
/// starts paramagnetic.
pub fn detect_revival_or_decay(points: &[CoherencePoint], prediction: f64, lambda1: f64) -> Result<Event> {
    if lambda1 == 1.0 {
        return Err(Error::Invalid("initial coupling at the critical point has no revival/decay kind".into()));
    }
    let (lo, hi) = ((1.0 - REVIVAL_WINDOW) * prediction, (1.0 + REVIVAL_WINDOW) * prediction);
    let end = points.last().map_or(0.0, |p| p.t);
    let start = points.first().map_or(0.0, |p| p.t);
    if end < hi || start > lo {
        return Err(Error::SeriesTooShort(format!(
            "revival window [{lo:.3}, {hi:.3}] exceeds series span [{start:.3}, {end:.3}]; extend t_max to at least {hi:.3}"
        )));
    }
    let revival = lambda1 > 1.0;
    let sign = if revival { 1.0 } else { -1.0 };
    let y: Vec<f64> = points.iter().map(|p| sign * p.fq).collect();
    let best = (0..points.len())
        .filter(|&i| points[i].t >= lo && points[i].t <= hi)
        .fold(None, |b: Option<usize>, i| match b {
            Some(j) if y[j] <= y[i] => Some(j),
            _ => Some(i),
        })
        .expect("window contains grid points");
    Ok(Event {
        kind: if revival { EventKind::Revival } else { EventKind::Decay },
        time: refine(points, &y, best),
        detail: format!("prediction={prediction} fq={}", points[best].fq),
    })
}

/// First strict local minimum of `r_FQ(t)`, refined by a parabola.
pub fn rfq_first_minimum(points: &[CoherencePoint]) -> Result<Event> {
    let r: Vec<f64> = points.iter().map(|p| p.r_fq.or_inf()).collect();
    let i = (1..r.len().saturating_sub(1))
        .find(|&i| r[i] < r[i - 1] && r[i] <= r[i + 1])
        .ok_or(Error::NoMinimum)?;
    Ok(Event { kind: EventKind::RfqFirstMin, time: refine(points, &r, i), detail: format!("rfq={}", r[i]) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coherence::{rate_fq, Rate};

    fn pt(t: f64, fq: f64, vx: f64, vy: f64) -> CoherencePoint {
        CoherencePoint {
            t,
            fq,
            n_eff: fq,
            le: 1.0,
            r_le: Rate::Finite(0.0),
            r_fq: rate_fq(fq, 10),
            argmax: crate::correlators::argmax(vx, vy, 0.0),
            vx,
            vy,
            vz: 0.0,
        }
    }

    #[test]
    fn crossing_is_interpolated() {
        let pts = vec![pt(0.0, 1.0, 3.0, 1.0), pt(1.0, 1.0, 1.0, 2.0)];
        let ev = detect_mqfi_cusps(&pts);
        assert_eq!(ev.len(), 1);
        // d0 = 2, d1 = -1: crossing at 2/3.
        assert!((ev[0].time - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn kink_is_found_and_flat_is_not() {
        let y: Vec<f64> = (0..200).map(|i| (i as f64 * 0.01 - 1.0).abs() + 0.1 * (i as f64 * 0.01).sin()).collect();
        assert_eq!(curvature_spikes(&y), vec![100]);
        assert!(curvature_spikes(&vec![0.5; 50]).is_empty());
        // A narrow but smooth bump is not a kink.
        let y: Vec<f64> = (0..400).map(|i| (-((i as f64 - 200.0) / 6.0).powi(2)).exp()).collect();
        assert!(curvature_spikes(&y).is_empty());
    }

    #[test]
    fn parabola_vertex() {
        // y = (t - 0.3)^2 sampled at -1, 0, 1.
        let f = |t: f64| (t - 0.3) * (t - 0.3);
        assert!((parabolic_offset(f(-1.0), f(0.0), f(1.0)) - 0.3).abs() < 1e-14);
    }

    #[test]
    fn short_series_rejected() {
        let pts: Vec<_> = (0..10).map(|i| pt(i as f64, 0.5, 1.0, 0.0)).collect();
        assert!(matches!(detect_revival_or_decay(&pts, 10.0, 1.5), Err(Error::SeriesTooShort(_))));
        assert_eq!(rfq_first_minimum(&pts).unwrap_err(), Error::NoMinimum);
    }
}
