//! Run configurations, figure presets and command-line overrides.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use tfim_quench::spectrum::{Sector, ZeroMode};

use crate::CliError;

/// A coupling grid: either `start:stop:step` or an explicit list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Grid {
    Range { start: f64, stop: f64, step: f64 },
    Points(Vec<f64>),
}

impl Grid {
    pub fn range(start: f64, stop: f64, step: f64) -> Self {
        Grid::Range { start, stop, step }
    }

    /// Expand to values; a range includes `stop` when it lies on the grid.
    pub fn values(&self) -> Result<Vec<f64>, CliError> {
        match self {
            Grid::Points(v) if v.is_empty() => Err(CliError::Usage("empty coupling grid".into())),
            Grid::Points(v) => Ok(v.clone()),
            &Grid::Range { start, stop, step } => {
                if !(step > 0.0) || !(stop >= start) || !start.is_finite() || !stop.is_finite() {
                    return Err(CliError::Usage(format!("bad range {start}:{stop}:{step}")));
                }
                let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
                Ok((0..count).map(|i| start + i as f64 * step).collect())
            }
        }
    }
}

impl std::str::FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let num = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("{x:?}: {e}"));
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            [a, b, c] => Ok(Grid::range(num(a)?, num(b)?, num(c)?)),
            [_] => Ok(Grid::Points(s.split(',').map(num).collect::<Result<_, _>>()?)),
            _ => Err(format!("expected start:stop:step or a comma list, got {s:?}")),
        }
    }
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StaticScanConfig {
    pub ns: Vec<usize>,
    pub lambda: Grid,
    #[serde(default)]
    pub sector: Sector,
    #[serde(default)]
    pub zero_mode: ZeroMode,
}

/// One series per `(N, λ1, λ2)` combination.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuenchConfig {
    pub ns: Vec<usize>,
    pub lambda1: Vec<f64>,
    pub lambda2: Vec<f64>,
    pub t_max: f64,
    pub dt: f64,
    #[serde(default)]
    pub sector: Sector,
    #[serde(default)]
    pub zero_mode: ZeroMode,
    /// Fail when a quench into `λ2 = 1` does not reach the revival/decay window.
    #[serde(default = "default_true")]
    pub require_revival: bool,
}

/// First revival/decay time for quenches into the critical point, per `(N, λ1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RevivalScanConfig {
    pub ns: Vec<usize>,
    pub lambda1: Vec<f64>,
    /// Series length as a multiple of `N/4`.
    pub span_factor: f64,
    pub dt: f64,
    #[serde(default)]
    pub sector: Sector,
    #[serde(default)]
    pub zero_mode: ZeroMode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepFinalConfig {
    pub n: usize,
    pub lambda1: f64,
    pub lambda2: Grid,
    pub t_ltr: f64,
    pub window: f64,
    pub dt: f64,
    #[serde(default)]
    pub sector: Sector,
    #[serde(default)]
    pub zero_mode: ZeroMode,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum SuiteName {
    #[default]
    Implementation,
    Physics,
    All,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleConfig {
    #[serde(default)]
    pub suite: SuiteName,
    /// Extra exact-diagonalization comparison at this chain length.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ed_n: Option<usize>,
    #[serde(default = "OracleConfig::default_ed_quench")]
    pub ed_quench: (f64, f64),
    /// Test hook: offset added to every kernel entry.
    #[serde(default, skip_serializing_if = "is_zero")]
    pub kernel_offset: f64,
}

fn is_zero(x: &f64) -> bool {
    *x == 0.0
}

impl OracleConfig {
    fn default_ed_quench() -> (f64, f64) {
        (1.5, 0.5)
    }
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self { suite: SuiteName::default(), ed_n: None, ed_quench: Self::default_ed_quench(), kernel_offset: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum RunConfig {
    StaticScan(StaticScanConfig),
    Quench(QuenchConfig),
    RevivalScan(RevivalScanConfig),
    SweepFinal(SweepFinalConfig),
    OracleCheck(OracleConfig),
}

impl RunConfig {
    pub fn command(&self) -> &'static str {
        match self {
            RunConfig::StaticScan(_) => "static-scan",
            RunConfig::Quench(_) => "quench",
            RunConfig::RevivalScan(_) => "revival-scan",
            RunConfig::SweepFinal(_) => "sweep-final",
            RunConfig::OracleCheck(_) => "oracle-check",
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    /// SHA-256 of the compact JSON form.
    pub fn hash(&self) -> String {
        format!("{:x}", Sha256::digest(self.to_json().as_bytes()))
    }
}

pub const PRESETS: &[&str] = &[
    "fig1", "fig2a", "fig2b", "fig2c", "fig3a", "fig3b", "fig3c", "fig4a", "fig4b", "fig4c", "fig5", "fig6", "fig7",
    "fig8a", "fig8b",
];

const SIZES: [usize; 5] = [21, 61, 101, 201, 401];

fn quench(ns: &[usize], lambda1: &[f64], lambda2: &[f64], t_max: f64, dt: f64) -> RunConfig {
    RunConfig::Quench(QuenchConfig {
        ns: ns.to_vec(),
        lambda1: lambda1.to_vec(),
        lambda2: lambda2.to_vec(),
        t_max,
        dt,
        sector: Sector::default(),
        zero_mode: ZeroMode::default(),
        require_revival: true,
    })
}

fn sweep(lambda1: f64, t_ltr: f64, stop: f64) -> RunConfig {
    RunConfig::SweepFinal(SweepFinalConfig {
        n: 401,
        lambda1,
        lambda2: Grid::range(0.2, stop, 0.02),
        t_ltr,
        window: 0.2 * t_ltr,
        dt: 0.1,
        sector: Sector::default(),
        zero_mode: ZeroMode::default(),
    })
}

/// Configuration reproducing one figure panel.
pub fn preset(name: &str) -> Option<RunConfig> {
    // Series into λ2 = 1 run to 1.5 N/4 so the revival window of the largest N fits.
    let qcp_span = |n: usize| 1.5 * n as f64 / 4.0;
    Some(match name {
        "fig1" => RunConfig::StaticScan(StaticScanConfig {
            ns: vec![21, 101, 401, 1001],
            lambda: Grid::range(0.0, 2.0, 0.01),
            sector: Sector::default(),
            zero_mode: ZeroMode::default(),
        }),
        "fig2a" => quench(&SIZES, &[1.5], &[1.0], qcp_span(401), 0.05),
        "fig2b" => quench(&SIZES, &[0.5], &[1.0], qcp_span(401), 0.05),
        "fig2c" => RunConfig::RevivalScan(RevivalScanConfig {
            ns: SIZES.to_vec(),
            lambda1: vec![0.5, 1.5],
            span_factor: 1.5,
            dt: 0.05,
            sector: Sector::default(),
            zero_mode: ZeroMode::default(),
        }),
        "fig3a" => quench(&[201], &[1.1], &[1.0], qcp_span(201), 0.05),
        "fig3b" => quench(&[201], &[0.9], &[1.0], qcp_span(201), 0.05),
        "fig3c" => quench(&[201], &[0.0, 0.5, 0.7, 0.9], &[1.0], qcp_span(201), 0.05),
        "fig4a" => quench(&SIZES, &[2.0], &[0.2], 10.0, 0.05),
        // Revival at N / (2 v_max(0.2)) = 1.25 N.
        "fig4b" => quench(&SIZES[..4], &[2.0], &[0.2], 300.0, 0.05),
        "fig4c" => quench(&[201], &[0.2], &[2.0, 3.0, 4.0], 75.0, 0.05),
        "fig5" | "fig6" => quench(&[201], &[2.0], &[0.2], 3.0, 0.01),
        "fig7" => quench(&[201], &[0.2], &[2.0], 3.0, 0.01),
        "fig8a" => sweep(2.0, 20.0, 3.0),
        "fig8b" => sweep(0.2, 80.0, 2.0),
        _ => return None,
    })
}

/// Default configuration of a subcommand when neither a preset nor a file is given.
pub fn default_for(command: &str) -> RunConfig {
    match command {
        "static-scan" => RunConfig::StaticScan(StaticScanConfig {
            ns: vec![101],
            lambda: Grid::range(0.0, 2.0, 0.01),
            sector: Sector::default(),
            zero_mode: ZeroMode::default(),
        }),
        "quench" => quench(&[201], &[0.2], &[2.0], 3.0, 0.01),
        "sweep-final" => sweep(2.0, 20.0, 3.0),
        _ => RunConfig::OracleCheck(OracleConfig::default()),
    }
}

/// Whether a configuration of kind `found` may be run by subcommand `command`.
pub fn accepts(command: &str, found: &RunConfig) -> bool {
    found.command() == command || (command == "quench" && matches!(found, RunConfig::RevivalScan(_)))
}

/// Values given on the command line; `None` keeps the configured value.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub n: Option<Vec<usize>>,
    pub lambda: Option<Grid>,
    pub lambda1: Option<Vec<f64>>,
    pub lambda2: Option<Grid>,
    pub sector: Option<Sector>,
    pub zero_mode: Option<ZeroMode>,
    pub t_max: Option<f64>,
    pub dt: Option<f64>,
    pub window: Option<f64>,
}

fn single<T: Copy + std::fmt::Display>(v: &[T], flag: &str) -> Result<T, CliError> {
    match v {
        [x] => Ok(*x),
        _ => Err(CliError::Usage(format!("{flag} takes a single value for this command"))),
    }
}

fn unused(name: &str, given: bool, command: &str) -> Result<(), CliError> {
    if given {
        return Err(CliError::Usage(format!("{name} does not apply to {command}")));
    }
    Ok(())
}

impl Overrides {
    pub fn apply(&self, cfg: &mut RunConfig) -> Result<(), CliError> {
        let cmd = cfg.command();
        match cfg {
            RunConfig::StaticScan(c) => {
                if let Some(n) = &self.n {
                    c.ns = n.clone();
                }
                if let Some(l) = &self.lambda {
                    c.lambda = l.clone();
                }
                set(&mut c.sector, self.sector);
                set(&mut c.zero_mode, self.zero_mode);
                unused("--lambda1", self.lambda1.is_some(), cmd)?;
                unused("--lambda2", self.lambda2.is_some(), cmd)?;
                unused("--t-max", self.t_max.is_some(), cmd)?;
                unused("--dt", self.dt.is_some(), cmd)?;
                unused("--window", self.window.is_some(), cmd)?;
            }
            RunConfig::Quench(c) => {
                if let Some(n) = &self.n {
                    c.ns = n.clone();
                }
                if let Some(l) = &self.lambda1 {
                    c.lambda1 = l.clone();
                }
                if let Some(l) = &self.lambda2 {
                    c.lambda2 = l.values()?;
                }
                set(&mut c.t_max, self.t_max);
                set(&mut c.dt, self.dt);
                set(&mut c.sector, self.sector);
                set(&mut c.zero_mode, self.zero_mode);
                unused("--lambda", self.lambda.is_some(), cmd)?;
                unused("--window", self.window.is_some(), cmd)?;
            }
            RunConfig::RevivalScan(c) => {
                if let Some(n) = &self.n {
                    c.ns = n.clone();
                }
                if let Some(l) = &self.lambda1 {
                    c.lambda1 = l.clone();
                }
                set(&mut c.dt, self.dt);
                set(&mut c.sector, self.sector);
                set(&mut c.zero_mode, self.zero_mode);
                unused("--lambda", self.lambda.is_some(), cmd)?;
                unused("--lambda2 (fixed at 1)", self.lambda2.is_some(), cmd)?;
                unused("--t-max (set by span_factor)", self.t_max.is_some(), cmd)?;
                unused("--window", self.window.is_some(), cmd)?;
            }
            RunConfig::SweepFinal(c) => {
                if let Some(n) = &self.n {
                    c.n = single(n, "--n")?;
                }
                if let Some(l) = &self.lambda1 {
                    c.lambda1 = single(l, "--lambda1")?;
                }
                if let Some(l) = &self.lambda2 {
                    c.lambda2 = l.clone();
                }
                set(&mut c.t_ltr, self.t_max);
                set(&mut c.dt, self.dt);
                set(&mut c.window, self.window);
                set(&mut c.sector, self.sector);
                set(&mut c.zero_mode, self.zero_mode);
                unused("--lambda", self.lambda.is_some(), cmd)?;
            }
            RunConfig::OracleCheck(c) => {
                if let Some(n) = &self.n {
                    c.ed_n = Some(single(n, "--n")?);
                }
                if let Some(l1) = &self.lambda1 {
                    c.ed_quench.0 = single(l1, "--lambda1")?;
                }
                if let Some(l2) = &self.lambda2 {
                    c.ed_quench.1 = single(&l2.values()?, "--lambda2")?;
                }
                unused("--lambda", self.lambda.is_some(), cmd)?;
                unused("--sector", self.sector.is_some(), cmd)?;
                unused("--zero-mode", self.zero_mode.is_some(), cmd)?;
                unused("--t-max", self.t_max.is_some(), cmd)?;
                unused("--dt", self.dt.is_some(), cmd)?;
                unused("--window", self.window.is_some(), cmd)?;
            }
        }
        Ok(())
    }
}

fn set<T>(slot: &mut T, v: Option<T>) {
    if let Some(v) = v {
        *slot = v;
    }
}
