//! Momentum grid, Bogoliubov data and the single-particle time scales of the
//! periodic transverse-field Ising chain `H = -λ Σ σˣσˣ - Σ σᶻ`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Momentum quantization used for the mode sums.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Sector {
    /// `k = 2πm/N`, `m = 0..=(N-1)/2`, odd `N` only.
    #[default]
    Integer,
    /// `k = 2π(m + 1/2)/N`, `m = 0..N/2` (rounded so that `k ≤ π`).
    HalfInteger,
}

/// Treatment of unpaired momenta (`k = 0`, and `k = π` when it lies on the grid).
///
/// An unpaired mode is its own partner under `k → -k`, so it enters the
/// contraction sums with weight `1/N` instead of `2/N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ZeroMode {
    /// Keep unpaired modes with weight `1/N`. This reproduces the parity-projected
    /// finite-chain ground state exactly at `t = 0`.
    #[default]
    Include,
    /// Drop unpaired modes, restricting every sum to paired `0 < k < π`.
    Exclude,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuenchSpec {
    pub n: usize,
    pub lambda1: f64,
    pub lambda2: f64,
    #[serde(default)]
    pub sector: Sector,
    #[serde(default)]
    pub zero_mode: ZeroMode,
}

impl QuenchSpec {
    pub fn new(n: usize, lambda1: f64, lambda2: f64) -> Self {
        Self { n, lambda1, lambda2, sector: Sector::Integer, zero_mode: ZeroMode::Include }
    }

    pub fn with_sector(mut self, sector: Sector) -> Self {
        self.sector = sector;
        self
    }

    pub fn with_zero_mode(mut self, zero_mode: ZeroMode) -> Self {
        self.zero_mode = zero_mode;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 3 {
            return Err(Error::ChainTooShort(self.n));
        }
        if self.sector == Sector::Integer && self.n % 2 == 0 {
            return Err(Error::SectorMismatch(self.n));
        }
        check_coupling(self.lambda1)?;
        check_coupling(self.lambda2)?;
        Ok(())
    }
}

pub(crate) fn check_coupling(lambda: f64) -> Result<()> {
    if !lambda.is_finite() || lambda < 0.0 {
        return Err(Error::NegativeCoupling(lambda));
    }
    Ok(())
}

/// Bogoliubov coefficients `A_k = -2(λ cos k + 1)`, `B_k = 2λ sin k`.
pub fn bogoliubov_ab(lambda: f64, k: f64) -> (f64, f64) {
    // sin(π) is not exactly zero in floating point; the unpaired mode must be real.
    let s = if k == PI { 0.0 } else { k.sin() };
    (-2.0 * (lambda * k.cos() + 1.0), 2.0 * lambda * s)
}

/// Single-particle energy `ε_k = 2 sqrt(1 + λ² + 2λ cos k)`.
pub fn energy(lambda: f64, k: f64) -> f64 {
    let (a, b) = bogoliubov_ab(lambda, k);
    a.hypot(b)
}

/// Rotation `(cos 2θ, sin 2θ)` of one mode, with a flag set when `ε_k = 0`.
///
/// The branch is `(cos 2θ, sin 2θ) = (A, -B)/ε`, i.e. `θ = atan2(-B, A)/2`.
/// It makes `G_0 = ⟨σᶻ⟩` positive in the paramagnet and the `σˣ` string
/// correlators positive in the ferromagnet. At the gapless point
/// (`λ = 1`, `k = π`) the limit from `k < π`, `(0, -1)`, is returned.
pub fn rotation(lambda: f64, k: f64) -> (f64, f64, bool) {
    let (a, b) = bogoliubov_ab(lambda, k);
    let e = a.hypot(b);
    if e == 0.0 {
        (0.0, -1.0, true)
    } else {
        (a / e, -b / e, false)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Mode {
    pub k: f64,
    pub eps1: f64,
    pub eps2: f64,
    pub theta1: f64,
    pub theta2: f64,
    /// `Φ_k = θ_k^(2) - θ_k^(1)`.
    pub phi: f64,
    pub cos2theta2: f64,
    pub sin2theta2: f64,
    pub cos2phi: f64,
    pub sin2phi: f64,
    /// Weight of the mode in the contraction sums: `2/N` paired, `1/N` unpaired
    /// under [`ZeroMode::Include`], `0` unpaired under [`ZeroMode::Exclude`].
    pub weight: f64,
    /// `true` for `0 < k < π`.
    pub paired: bool,
    /// `ε_k = 0` for either coupling; the angle is the one-sided limit.
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeSet {
    pub spec: QuenchSpec,
    /// Ascending in `k`.
    pub modes: Vec<Mode>,
}

impl ModeSet {
    pub fn n(&self) -> usize {
        self.spec.n
    }

    /// Modes with `0 < k < π`.
    pub fn paired(&self) -> impl Iterator<Item = &Mode> {
        self.modes.iter().filter(|m| m.paired)
    }

    pub fn any_degenerate(&self) -> bool {
        self.modes.iter().any(|m| m.degenerate)
    }
}

/// Grid momenta `0 ≤ k ≤ π` of a sector, ascending.
pub fn momenta(n: usize, sector: Sector) -> Vec<f64> {
    let nf = n as f64;
    match sector {
        Sector::Integer => (0..=(n - 1) / 2).map(|m| 2.0 * PI * m as f64 / nf).collect(),
        Sector::HalfInteger => (0..(n + 1) / 2)
            .map(|m| if 2 * m + 1 == n { PI } else { 2.0 * PI * (m as f64 + 0.5) / nf })
            .collect(),
    }
}

pub fn build_modes(spec: &QuenchSpec) -> Result<ModeSet> {
    spec.validate()?;
    let nf = spec.n as f64;
    let modes = momenta(spec.n, spec.sector)
        .into_iter()
        .map(|k| {
            let paired = k > 0.0 && k < PI;
            let (c1, s1, d1) = rotation(spec.lambda1, k);
            let (c2, s2, d2) = rotation(spec.lambda2, k);
            let weight = match (paired, spec.zero_mode) {
                (true, _) => 2.0 / nf,
                (false, ZeroMode::Include) => 1.0 / nf,
                (false, ZeroMode::Exclude) => 0.0,
            };
            let theta1 = 0.5 * s1.atan2(c1);
            let theta2 = 0.5 * s2.atan2(c2);
            Mode {
                k,
                eps1: energy(spec.lambda1, k),
                eps2: energy(spec.lambda2, k),
                theta1,
                theta2,
                phi: theta2 - theta1,
                cos2theta2: c2,
                sin2theta2: s2,
                cos2phi: c2 * c1 + s2 * s1,
                sin2phi: s2 * c1 - c2 * s1,
                weight,
                paired,
                degenerate: d1 || d2,
            }
        })
        .collect();
    Ok(ModeSet { spec: *spec, modes })
}

/// Largest quasiparticle group velocity `max_k |∂ε_k/∂k|`.
pub fn max_group_velocity(lambda: f64) -> Result<f64> {
    check_coupling(lambda)?;
    Ok(if lambda <= 1.0 { 2.0 * lambda } else { 2.0 })
}

/// Light-cone time after which quasiparticles emitted from a site meet again.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "time", rename_all = "kebab-case")]
pub enum RevivalTime {
    Finite(f64),
    /// `λ2 = 0`: quasiparticles do not propagate.
    NoRevival,
}

impl RevivalTime {
    pub fn finite(self) -> Option<f64> {
        match self {
            RevivalTime::Finite(t) => Some(t),
            RevivalTime::NoRevival => None,
        }
    }
}

/// `N / (2 v_max(λ2))`.
pub fn revival_time_prediction(spec: &QuenchSpec) -> Result<RevivalTime> {
    spec.validate()?;
    let v = max_group_velocity(spec.lambda2)?;
    if v == 0.0 {
        return Ok(RevivalTime::NoRevival);
    }
    Ok(RevivalTime::Finite(spec.n as f64 / (2.0 * v)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CriticalTimes {
    /// The quench crosses the critical point; Fisher zeros reach the real axis at
    /// `t_n = t* (n + 1/2)`.
    Crossing { k_star: f64, t_star: f64, times: Vec<f64> },
    /// The quench crosses but ends at `λ2 = 1`, where `ε(k*) = 0` and the
    /// critical times move to infinity.
    Gapless { k_star: f64 },
    /// Both couplings in the same phase (or equal): no cusps expected.
    NoCriticalMode,
}

impl CriticalTimes {
    pub fn times(&self) -> &[f64] {
        match self {
            CriticalTimes::Crossing { times, .. } => times,
            _ => &[],
        }
    }

    pub fn first(&self) -> Option<f64> {
        self.times().first().copied()
    }
}

/// Critical mode `cos k* = -(1 + λ1λ2)/(λ1 + λ2)` and times `t_n = π/ε2(k*) (n + 1/2)`.
pub fn dqpt_critical_times(spec: &QuenchSpec, n_max: usize) -> Result<CriticalTimes> {
    spec.validate()?;
    if n_max == 0 {
        return Err(Error::Invalid("n_max must be at least 1".into()));
    }
    let (l1, l2) = (spec.lambda1, spec.lambda2);
    // |cos k*| ≤ 1 is equivalent to (λ1 - 1)(λ2 - 1) ≤ 0; deciding on the sign
    // avoids rounding flips right at the boundary.
    if l1 == l2 || (l1 - 1.0) * (l2 - 1.0) > 0.0 {
        return Ok(CriticalTimes::NoCriticalMode);
    }
    let c = (-(1.0 + l1 * l2) / (l1 + l2)).clamp(-1.0, 1.0);
    let k_star = c.acos();
    // Energy from cos k* directly, so k* = π gives exactly 2|λ2 - 1|.
    let eps = 2.0 * (1.0 + l2 * l2 + 2.0 * l2 * c).max(0.0).sqrt();
    if eps == 0.0 {
        return Ok(CriticalTimes::Gapless { k_star });
    }
    let t_star = PI / eps;
    let times = (0..n_max).map(|n| t_star * (n as f64 + 0.5)).collect();
    Ok(CriticalTimes::Crossing { k_star, t_star, times })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integer_grid_has_one_unpaired_mode() {
        let ms = build_modes(&QuenchSpec::new(9, 0.3, 0.7)).unwrap();
        assert_eq!(ms.modes.len(), 5);
        assert!(!ms.modes[0].paired);
        assert_eq!(ms.paired().count(), 4);
        let w: f64 = ms.modes.iter().map(|m| m.weight).sum();
        assert!((w - 1.0).abs() < 1e-15);
    }

    #[test]
    fn half_integer_grid_odd_n_ends_at_pi() {
        let ks = momenta(7, Sector::HalfInteger);
        assert_eq!(ks.len(), 4);
        assert_eq!(*ks.last().unwrap(), PI);
        let ks = momenta(8, Sector::HalfInteger);
        assert_eq!(ks.len(), 4);
        assert!(ks.iter().all(|&k| k > 0.0 && k < PI));
    }

    #[test]
    fn even_n_rejected_on_integer_grid() {
        assert_eq!(build_modes(&QuenchSpec::new(10, 1.0, 1.0)).unwrap_err(), Error::SectorMismatch(10));
        assert!(matches!(build_modes(&QuenchSpec::new(9, -0.1, 1.0)), Err(Error::NegativeCoupling(_))));
    }

    #[test]
    fn gapless_mode_flagged() {
        let spec = QuenchSpec::new(9, 1.0, 0.5).with_sector(Sector::HalfInteger);
        let ms = build_modes(&spec).unwrap();
        let last = ms.modes.last().unwrap();
        assert!(last.degenerate);
        assert_eq!(last.eps1, 0.0);
        assert!(!ms.modes[0].degenerate);
    }

    #[test]
    fn revival_prediction_variants() {
        assert_eq!(revival_time_prediction(&QuenchSpec::new(9, 1.0, 0.0)).unwrap(), RevivalTime::NoRevival);
        let spec = QuenchSpec::new(100, 0.1, 0.5).with_sector(Sector::HalfInteger);
        assert_eq!(revival_time_prediction(&spec).unwrap(), RevivalTime::Finite(50.0));
    }

    #[test]
    fn quench_into_critical_point_is_gapless() {
        let r = dqpt_critical_times(&QuenchSpec::new(9, 1.5, 1.0), 3).unwrap();
        assert!(matches!(r, CriticalTimes::Gapless { k_star } if (k_star - PI).abs() < 1e-12));
    }
}
