use proptest::prelude::*;
use tfim_quench::coherence::*;
use tfim_quench::correlators::{Direction, VarianceTriple};
use tfim_quench::spectrum::*;
use tfim_quench::Error;

fn triple(vx: f64, vy: f64, vz: f64) -> VarianceTriple {
    VarianceTriple { t: 0.0, vx, vy, vz, z_exp: 0.0, argmax: tfim_quench::correlators::argmax(vx, vy, vz) }
}

/// Brute-force maximum of the rotated-direction objective on a (β, φ) grid.
fn grid_max(v: &VarianceTriple) -> (f64, Direction) {
    let (nb, np) = (721, 1441);
    let mut best = (f64::MIN, (0.0, 0.0));
    for i in 0..nb {
        let b = std::f64::consts::PI * i as f64 / (nb - 1) as f64;
        for j in 0..np {
            let p = 2.0 * std::f64::consts::PI * j as f64 / (np - 1) as f64;
            let (sb, cb, sp, cp) = (b.sin(), b.cos(), p.sin(), p.cos());
            let val = sb * sb * cp * cp * v.vx + sb * sb * sp * sp * v.vy + cb * cb * v.vz;
            if val > best.0 {
                best = (val, (sb * cp, sb * sp));
            }
        }
    }
    let (x, y) = best.1;
    let z = 1.0 - x * x - y * y;
    let dir = if x * x >= y * y && x * x >= z {
        Direction::X
    } else if y * y >= z {
        Direction::Y
    } else {
        Direction::Z
    };
    (best.0, dir)
}

#[test]
fn mqfi_examples() {
    let q = mqfi(&triple(9.0, 9.0, 1.0), 9);
    assert!((q.fq - 1.0 / 9.0).abs() < 1e-15);
    assert!((q.n_eff - 1.0).abs() < 1e-14);
    assert_eq!(q.argmax, Direction::X);
}

#[test]
fn mqfi_matches_grid_search() {
    let mut rng = 0x9e37_79b9_7f4a_7c15u64;
    let mut next = || {
        rng ^= rng << 13;
        rng ^= rng >> 7;
        rng ^= rng << 17;
        (rng >> 11) as f64 / (1u64 << 53) as f64
    };
    let n = 25;
    for _ in 0..6 {
        let v = triple(625.0 * next(), 625.0 * next(), 625.0 * next());
        let q = mqfi(&v, n);
        let (g, dir) = grid_max(&v);
        assert!((q.fq - g / 625.0).abs() < 1e-6);
        let mut s = [v.vx, v.vy, v.vz];
        s.sort_by(f64::total_cmp);
        if s[2] - s[1] > 1e-9 * 625.0 {
            assert_eq!(q.argmax, dir);
        }
    }
}

#[test]
fn rates() {
    assert_eq!(rate_le(1.0, 50), Rate::Finite(0.0));
    assert_eq!(rate_fq(1.0, 50), Rate::Finite(0.0));
    assert_eq!(rate_le(0.0, 50), Rate::Divergent);
    let r = rate_le((-25.0f64).exp(), 50).value().unwrap();
    assert!((r - 1.0).abs() < 1e-14);
    assert_eq!(serde_json::to_string(&Rate::Divergent).unwrap(), "\"divergent\"");
}

#[test]
fn echo_limits() {
    let ms = build_modes(&QuenchSpec::new(101, 0.3, 1.7)).unwrap();
    assert_eq!(loschmidt_echo(&ms, 0.0), 1.0);
    let ms = build_modes(&QuenchSpec::new(101, 1.7, 1.7)).unwrap();
    assert_eq!(loschmidt_echo(&ms, 12.5), 1.0);
}

#[test]
fn echo_survives_large_chains() {
    // The echo underflows f64 long before its logarithm does.
    let ms = build_modes(&QuenchSpec::new(20001, 0.2, 3.0)).unwrap();
    let l = log_loschmidt_echo(&ms, 1.3);
    assert!(l.is_finite() && l < -745.0, "{l}");
    assert_eq!(loschmidt_echo(&ms, 1.3), 0.0);
}

#[test]
fn no_quench_series_is_flat() {
    let spec = QuenchSpec::new(61, 0.6, 0.6);
    let s = run_series(&spec, &TimeGrid::span(20.0, 0.1).unwrap()).unwrap();
    let f0 = s.points[0].fq;
    for p in &s.points {
        assert!((p.fq - f0).abs() < 1e-12 && p.le == 1.0 && p.r_le == Rate::Finite(0.0));
    }
    assert!(s.events.is_empty(), "{:?}", s.events);
    assert_eq!(rfq_first_minimum(&s.points).unwrap_err(), Error::NoMinimum);
}

#[test]
fn revival_from_ferromagnet() {
    let spec = QuenchSpec::new(201, 1.5, 1.0);
    let s = run_series(&spec, &TimeGrid::span(80.0, 0.05).unwrap()).unwrap();
    let r = s.events_of(EventKind::Revival);
    assert_eq!(r.len(), 1);
    assert!((r[0] - 50.25).abs() < 0.05 * 50.25, "{r:?}");
    assert!(s.events_of(EventKind::Decay).is_empty());
}

#[test]
fn decay_from_paramagnet() {
    let spec = QuenchSpec::new(101, 0.5, 1.0);
    let s = run_series(&spec, &TimeGrid::span(40.0, 0.05).unwrap()).unwrap();
    let d = s.events_of(EventKind::Decay);
    assert_eq!(d.len(), 1);
    assert!((d[0] - 25.25).abs() < 0.05 * 25.25, "{d:?}");
}

#[test]
fn revival_window_must_fit() {
    let spec = QuenchSpec::new(101, 1.5, 1.0);
    let pts = series_points(&spec, &TimeGrid::span(20.0, 0.1).unwrap()).unwrap();
    assert!(matches!(detect_revival_or_decay(&pts, 25.25, 1.5), Err(Error::SeriesTooShort(_))));
}

#[test]
fn no_cusps_without_critical_mode() {
    let spec = QuenchSpec::new(201, 0.5, 0.7);
    let pts = series_points(&spec, &TimeGrid::span(8.0, 0.01).unwrap()).unwrap();
    assert!(detect_dqpt_cusps(&pts).is_empty());
}

#[test]
fn first_cusp_matches_critical_time() {
    for (l1, l2) in [(0.2, 2.0), (2.0, 0.2)] {
        let spec = QuenchSpec::new(201, l1, l2);
        let t0 = dqpt_critical_times(&spec, 1).unwrap().first().unwrap();
        let pts = series_points(&spec, &TimeGrid::span(2.0 * t0, 0.01).unwrap()).unwrap();
        let cusps = detect_dqpt_cusps(&pts);
        assert!(!cusps.is_empty());
        assert!((cusps[0].time - t0).abs() <= 0.02, "{l1}->{l2}: {} vs {t0}", cusps[0].time);
    }
}

#[test]
fn events_inside_span() {
    let spec = QuenchSpec::new(101, 0.2, 2.0);
    let grid = TimeGrid::span(5.0, 0.01).unwrap();
    let s = run_series(&spec, &grid).unwrap();
    assert_eq!(s.points.len(), grid.count);
    assert!(!s.events.is_empty());
    for e in &s.events {
        assert!(e.time >= 0.0 && e.time <= grid.end());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn observables_in_unit_interval(l1 in 0.0f64..3.0, l2 in 0.0f64..3.0, t in 0.0f64..40.0, half in 2usize..60) {
        let spec = QuenchSpec::new(2 * half + 1, l1, l2);
        let pts = series_points(&spec, &TimeGrid::new(t, 0.5, 3).unwrap()).unwrap();
        for p in pts {
            prop_assert!((0.0..=1.0).contains(&p.fq) && (0.0..=1.0).contains(&p.le));
            prop_assert!(p.r_le.value().map_or(true, |r| r >= 0.0));
            prop_assert!((p.n_eff - spec.n as f64 * p.fq).abs() < 1e-9);
        }
    }
}
