//! One function per run kind, each producing the tables to emit.

use tfim_quench::coherence::scan::{lambda_m_exponent, linear_fit, long_time_sweep, static_scan, SweepConfig};
use tfim_quench::coherence::{detect_revival_or_decay, mqfi, run_series, CoherenceSeries, EventKind, TimeGrid};
use tfim_quench::correlators::variances;
use tfim_quench::kernel::KernelPlan;
use tfim_quench::oracle::{ed, run_checks, CheckLine, Faults, Suite};
use tfim_quench::spectrum::{build_modes, revival_time_prediction, QuenchSpec};

use crate::config::{
    OracleConfig, QuenchConfig, RevivalScanConfig, RunConfig, StaticScanConfig, SuiteName, SweepFinalConfig,
};
use crate::output::{col, Table};
use crate::CliError;

pub fn run(cfg: &RunConfig) -> Result<Vec<Table>, CliError> {
    match cfg {
        RunConfig::StaticScan(c) => static_scan_tables(c),
        RunConfig::Quench(c) => quench_tables(c),
        RunConfig::RevivalScan(c) => revival_tables(c),
        RunConfig::SweepFinal(c) => sweep_tables(c),
        RunConfig::OracleCheck(c) => Ok(vec![oracle_table(&oracle_lines(c)?)]),
    }
}

fn non_empty<T>(v: &[T], what: &str) -> Result<(), CliError> {
    if v.is_empty() {
        return Err(CliError::Usage(format!("{what} must not be empty")));
    }
    Ok(())
}

pub fn static_scan_tables(c: &StaticScanConfig) -> Result<Vec<Table>, CliError> {
    non_empty(&c.ns, "chain lengths")?;
    let lambdas = c.lambda.values()?;
    let scans = c
        .ns
        .iter()
        .map(|&n| static_scan(&lambdas, n, c.sector, c.zero_mode))
        .collect::<Result<Vec<_>, _>>()?;

    let mut main = Table::new(
        "",
        vec![
            col("n", "chain length N", "sites"),
            col("lambda", "coupling λ", "dimensionless"),
            col("fq", "ground-state MQFI density F_Q", "dimensionless"),
            col("dfq", "discrete derivative dF_Q/dλ", "dimensionless"),
        ],
    );
    for s in &scans {
        for i in 0..s.lambdas.len() {
            main.push(vec![s.n.into(), s.lambdas[i].into(), s.fq[i].into(), s.dfq[i].into()]);
        }
    }

    let mut steep = Table::new(
        "lambda-m",
        vec![
            col("n", "chain length N", "sites"),
            col("lambda_m", "coupling of the steepest rise of F_Q, refined", "dimensionless"),
            col("lambda_m_grid", "grid point of the largest dF_Q/dλ", "dimensionless"),
            col("coarse", "true when the maximum sits on the grid boundary", "flag"),
        ],
    );
    for s in &scans {
        steep.push(vec![s.n.into(), s.lambda_m.into(), s.lambda_m_grid.into(), s.coarse.into()]);
    }
    let mut tables = vec![main];
    if scans.len() >= 2 {
        let lm: Vec<f64> = scans.iter().map(|s| s.lambda_m).collect();
        steep.note("exponent_one_minus_lambda_m", lambda_m_exponent(&c.ns, &lm));

        // V = F_Q N² ∝ N^p at each coupling.
        let mut p = Table::new(
            "p-index",
            vec![
                col("lambda", "coupling λ", "dimensionless"),
                col("p_index", "exponent p of max variance ∝ N^p over the scanned N", "dimensionless"),
            ],
        );
        let lx: Vec<f64> = c.ns.iter().map(|&n| (n as f64).ln()).collect();
        for (i, &l) in lambdas.iter().enumerate() {
            let ly: Vec<f64> = scans.iter().map(|s| (s.fq[i] * (s.n * s.n) as f64).ln()).collect();
            p.push(vec![l.into(), linear_fit(&lx, &ly).0.into()]);
        }
        tables.push(steep);
        tables.push(p);
    } else {
        tables.push(steep);
    }
    Ok(tables)
}

fn revival_expected(spec: &QuenchSpec) -> bool {
    spec.lambda2 == 1.0 && spec.lambda1 != 1.0
}

/// Series with the revival/decay detector made mandatory for quenches into `λ2 = 1`.
fn checked_series(spec: &QuenchSpec, grid: &TimeGrid, require_revival: bool) -> Result<CoherenceSeries, CliError> {
    let s = run_series(spec, grid)?;
    let found = s.events.iter().any(|e| matches!(e.kind, EventKind::Revival | EventKind::Decay));
    if require_revival && revival_expected(spec) && !found {
        if let Some(pred) = revival_time_prediction(spec)?.finite() {
            // Reruns the detector only to surface its error.
            detect_revival_or_decay(&s.points, pred, spec.lambda1)?;
        }
    }
    Ok(s)
}

const RUN_COLUMNS: [(&str, &str, &str); 3] = [
    ("n", "chain length N", "sites"),
    ("lambda1", "initial coupling λ1", "dimensionless"),
    ("lambda2", "final coupling λ2", "dimensionless"),
];

pub fn quench_tables(c: &QuenchConfig) -> Result<Vec<Table>, CliError> {
    non_empty(&c.ns, "chain lengths")?;
    non_empty(&c.lambda1, "initial couplings")?;
    non_empty(&c.lambda2, "final couplings")?;
    let grid = TimeGrid::span(c.t_max, c.dt)?;
    let run_cols = || RUN_COLUMNS.iter().map(|&(a, b, u)| col(a, b, u));
    let mut series = Table::new(
        "",
        run_cols()
            .chain([
                col("t", "time after the quench", "1/J"),
                col("fq", "MQFI density F_Q = max(Vx, Vy, Vz)/N²", "dimensionless"),
                col("nEff", "effective entangled-cluster size N F_Q", "sites"),
                col("le", "Loschmidt echo |<ψ0|ψ(t)>|", "dimensionless"),
                col("rLe", "echo rate function -(1/N) ln LE², or divergent", "dimensionless"),
                col("rFq", "MQFI rate function -(1/N) ln F_Q², or divergent", "dimensionless"),
                col("argmax", "direction of the largest collective variance", "X|Y|Z"),
                col("vx", "variance of Σσˣ", "dimensionless"),
                col("vy", "variance of Σσʸ", "dimensionless"),
                col("vz", "variance of Σσᶻ", "dimensionless"),
            ])
            .collect(),
    );
    let mut events = Table::new(
        "events",
        run_cols()
            .chain([
                col("kind", "event type", "label"),
                col("time", "event time", "1/J"),
                col("detail", "space-separated key=value annotations", "text"),
            ])
            .collect(),
    );
    for &n in &c.ns {
        for &l1 in &c.lambda1 {
            for &l2 in &c.lambda2 {
                let spec = QuenchSpec::new(n, l1, l2).with_sector(c.sector).with_zero_mode(c.zero_mode);
                let s = checked_series(&spec, &grid, c.require_revival)?;
                for p in &s.points {
                    series.push(vec![
                        n.into(),
                        l1.into(),
                        l2.into(),
                        p.t.into(),
                        p.fq.into(),
                        p.n_eff.into(),
                        p.le.into(),
                        p.r_le.into(),
                        p.r_fq.into(),
                        p.argmax.label().into(),
                        p.vx.into(),
                        p.vy.into(),
                        p.vz.into(),
                    ]);
                }
                for e in &s.events {
                    events.push(vec![
                        n.into(),
                        l1.into(),
                        l2.into(),
                        e.kind.label().into(),
                        e.time.into(),
                        e.detail.clone().into(),
                    ]);
                }
            }
        }
    }
    Ok(vec![series, events])
}

pub fn revival_tables(c: &RevivalScanConfig) -> Result<Vec<Table>, CliError> {
    non_empty(&c.ns, "chain lengths")?;
    non_empty(&c.lambda1, "initial couplings")?;
    if !(c.span_factor > 1.25) {
        return Err(CliError::Usage(format!(
            "span_factor {} must exceed 1.25 to cover the detector window",
            c.span_factor
        )));
    }
    let mut t = Table::new(
        "",
        vec![
            col("n", "chain length N", "sites"),
            col("lambda1", "initial coupling λ1 (λ2 = 1)", "dimensionless"),
            col("kind", "revival (λ1 > 1) or decay (λ1 < 1)", "label"),
            col("time", "measured first revival/decay time", "1/J"),
            col("prediction", "light-cone prediction N/(2 v_max)", "1/J"),
            col("rel_dev", "|time - prediction| / prediction", "dimensionless"),
        ],
    );
    let (mut ns, mut ts) = (Vec::new(), Vec::new());
    let mut per_l1: Vec<(f64, Vec<f64>, Vec<f64>)> = c.lambda1.iter().map(|&l| (l, Vec::new(), Vec::new())).collect();
    for &n in &c.ns {
        for (l1, xs, ys) in per_l1.iter_mut() {
            let spec = QuenchSpec::new(n, *l1, 1.0).with_sector(c.sector).with_zero_mode(c.zero_mode);
            if !revival_expected(&spec) {
                return Err(CliError::Usage("revival scan needs λ1 ≠ 1".into()));
            }
            let grid = TimeGrid::span(c.span_factor * n as f64 / 4.0, c.dt)?;
            let s = checked_series(&spec, &grid, true)?;
            let e = s
                .events
                .iter()
                .find(|e| matches!(e.kind, EventKind::Revival | EventKind::Decay))
                .expect("checked_series guarantees a revival/decay event");
            let pred = revival_time_prediction(&spec)?.finite().unwrap_or(f64::NAN);
            t.push(vec![
                n.into(),
                (*l1).into(),
                e.kind.label().into(),
                e.time.into(),
                pred.into(),
                ((e.time - pred).abs() / pred).into(),
            ]);
            ns.push(n as f64);
            ts.push(e.time);
            xs.push(n as f64);
            ys.push(e.time);
        }
    }
    if c.ns.len() >= 2 {
        let (slope, intercept) = linear_fit(&ns, &ts);
        t.note("slope", slope);
        t.note("intercept", intercept);
        for (l1, xs, ys) in &per_l1 {
            t.note(format!("slope_lambda1_{l1}"), linear_fit(xs, ys).0);
        }
    }
    Ok(vec![t])
}

pub fn sweep_tables(c: &SweepFinalConfig) -> Result<Vec<Table>, CliError> {
    let s = long_time_sweep(&SweepConfig {
        lambda1: c.lambda1,
        lambda2: c.lambda2.values()?,
        n: c.n,
        sector: c.sector,
        zero_mode: c.zero_mode,
        t_ltr: c.t_ltr,
        window: c.window,
        dt: c.dt,
    })?;
    let mut t = Table::new(
        "",
        vec![
            col("lambda2", "final coupling λ2", "dimensionless"),
            col("static_fq", "ground-state F_Q at λ2", "dimensionless"),
            col("long_time_fq", "post-quench F_Q averaged over [t_ltr - window, t_ltr]", "dimensionless"),
            col("derivative", "discrete derivative of long_time_fq in λ2", "dimensionless"),
            col("log_curvature", "second difference of ln long_time_fq in λ2", "dimensionless"),
        ],
    );
    for i in 0..s.lambda2.len() {
        t.push(vec![
            s.lambda2[i].into(),
            s.static_fq[i].into(),
            s.long_time_fq[i].into(),
            s.derivative[i].into(),
            s.log_curvature[i].into(),
        ]);
    }
    t.note("transition", s.transition);
    t.note("steepest", s.steepest);
    t.note("peak", s.peak);
    Ok(vec![t])
}

/// Exact-diagonalization comparison at a caller-chosen size.
fn ed_line(n: usize, (l1, l2): (f64, f64), faults: Faults) -> Result<CheckLine, CliError> {
    let times: Vec<f64> = (0..=20).map(|i| 0.15 * i as f64).collect();
    let points = ed::ed_quench_observables(l1, l2, n, &times)?;
    let plan = KernelPlan::new(build_modes(&QuenchSpec::new(n, l1, l2))?);
    let mut line = CheckLine {
        name: format!("Toeplitz F_Q vs exact diagonalization (N={n}, {l1}->{l2})"),
        max_deviation: 0.0,
        tolerance: 0.05,
        worst_case: String::new(),
        pass: true,
    };
    let nn = (n * n) as f64;
    for p in points {
        let mut k = plan.eval(p.t)?;
        for v in k.values_mut() {
            *v += faults.kernel_offset;
        }
        let d = (mqfi(&variances(&k), n).fq - p.vx.max(p.vy).max(p.vz) / nn).abs();
        if d > line.max_deviation {
            line.max_deviation = d;
            line.worst_case = format!("N={n} {l1}->{l2} t={}", p.t);
        }
    }
    line.pass = line.max_deviation <= line.tolerance;
    Ok(line)
}

pub fn oracle_lines(c: &OracleConfig) -> Result<Vec<CheckLine>, CliError> {
    let faults = Faults { kernel_offset: c.kernel_offset };
    let mut lines = Vec::new();
    // Validate the ED size before spending time on the suites.
    if let Some(n) = c.ed_n {
        lines.push(ed_line(n, c.ed_quench, faults)?);
    }
    let suite = match c.suite {
        SuiteName::Implementation => Suite::Implementation,
        SuiteName::Physics => Suite::Physics,
        SuiteName::All => Suite::All,
    };
    let mut all = run_checks(suite, faults)?;
    all.extend(lines);
    Ok(all)
}

pub fn oracle_table(lines: &[CheckLine]) -> Table {
    let mut t = Table::new(
        "",
        vec![
            col("check", "compared observable", "text"),
            col("max_deviation", "largest absolute (or stated relative) deviation", "dimensionless"),
            col("tolerance", "allowed deviation", "dimensionless"),
            col("pass", "max_deviation <= tolerance", "flag"),
            col("worst_case", "spec and time of the largest deviation", "text"),
        ],
    );
    for l in lines {
        t.push(vec![
            l.name.clone().into(),
            l.max_deviation.into(),
            l.tolerance.into(),
            l.pass.into(),
            l.worst_case.clone().into(),
        ]);
    }
    t
}
