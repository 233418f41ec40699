//! Published values and the `reproduce` pipeline that checks against them.

use painleve_core::asymptotics::{analytic_b, analytic_c, wkb_energy, WkbParams};
use painleve_core::eigen::{EigenvalueKind, EigenvalueRecord};

use crate::config::{Family, RunConfig};
use crate::error::CliError;
use crate::output::Table;
use crate::pipeline;

/// `(n, value, tolerance)` for the slope family at y(0) = 1.
pub const SLOPE_VALUES: [(usize, f64, f64); 7] = [
    (1, 3.15837325, 1e-6),
    (2, 6.18498704, 1e-6),
    (3, 8.79172082, 1e-6),
    (4, 11.1720921, 1e-6),
    (5, 13.3990049, 1e-6),
    (11, 24.9911479, 1e-5),
    (12, 26.7370929, 1e-5),
];

/// `(n, value, tolerance)` for the value family at y'(0) = 0.
pub const VALUE_VALUES: [(usize, f64, f64); 6] = [
    (1, -1.98740393, 1e-6),
    (2, -3.23535569, 1e-6),
    (3, -4.1616081, 1e-6),
    (4, -4.91908695, 1e-6),
    (11, -8.51211189, 1e-5),
    (12, -8.90805963, 1e-5),
];

pub const B_CONSTANT: f64 = 4.256843;
pub const C_CONSTANT: f64 = -2.626587;
pub const TOY_LIMIT: f64 = 1.781797;

/// One line of the reproduction summary.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub entry: String,
    pub expected: f64,
    pub computed: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    pub fn abs(entry: impl Into<String>, expected: f64, computed: f64, tolerance: f64) -> Self {
        let pass = (computed - expected).abs() <= tolerance;
        Self {
            entry: entry.into(),
            expected,
            computed,
            tolerance,
            pass,
        }
    }

    pub fn flag(entry: impl Into<String>, pass: bool) -> Self {
        let v = if pass { 1.0 } else { 0.0 };
        Self {
            entry: entry.into(),
            expected: 1.0,
            computed: v,
            tolerance: 0.0,
            pass,
        }
    }

    fn describe(&self) -> String {
        format!(
            "{}: expected {}, computed {}, |diff| {:e} > {:e}",
            self.entry,
            self.expected,
            self.computed,
            (self.computed - self.expected).abs(),
            self.tolerance
        )
    }
}

pub fn summary_table(checks: &[Check]) -> Table {
    let mut t = Table::new(&[
        "entry",
        "expected",
        "computed",
        "tolerance",
        "deviation",
        "pass",
    ]);
    for c in checks {
        t.push(vec![
            c.entry.as_str().into(),
            c.expected.into(),
            c.computed.into(),
            c.tolerance.into(),
            (c.computed - c.expected).abs().into(),
            c.pass.into(),
        ]);
    }
    t
}

/// `ratio_n` for n = 4..=12 lies in [0.9, 1.1] at the end and `|ratio − 1|`
/// shrinks monotonically.
pub fn energy_drift_ok(ratios: &[f64]) -> bool {
    let last = match ratios.last() {
        Some(&r) => r,
        None => return false,
    };
    (0.9..=1.1).contains(&last)
        && ratios
            .windows(2)
            .all(|w| (w[1] - 1.0).abs() < (w[0] - 1.0).abs())
}

pub fn energy_ratios(
    records: &[EigenvalueRecord],
    family: Family,
    ns: core::ops::RangeInclusive<usize>,
) -> Vec<f64> {
    ns.filter_map(|n| {
        let r = records.iter().find(|r| r.n == n)?;
        let e = wkb_energy(WkbParams {
            g: 0.125,
            epsilon: 4.0,
            n: n as u32,
        })
        .ok()?;
        let numerical = match family {
            Family::Slope => r.value * r.value / 8.0,
            Family::Value => r.value.abs().powi(3) / 8.0,
        };
        Some(numerical / e)
    })
    .collect()
}

fn records(
    cfg: &RunConfig,
    kind: &EigenvalueKind,
    n: usize,
) -> Result<Vec<EigenvalueRecord>, CliError> {
    let pool = pipeline::pool(cfg.workers);
    let results = pipeline::solve_family(&pool, kind, n, cfg.tol, &cfg.solver);
    pipeline::all_ok(&results).map_err(|e| CliError::Numerical(e.to_string()))
}

/// Runs both families, both extrapolations, the toy model and the audit,
/// and compares each result with the published value.
pub fn evaluate(cfg: &RunConfig) -> Result<Vec<Check>, CliError> {
    let mut checks = Vec::new();
    let b = records(cfg, &Family::Slope.kind(None), 12)?;
    let c = records(cfg, &Family::Value.kind(None), 15)?;
    for &(n, v, tol) in &SLOPE_VALUES {
        checks.push(Check::abs(format!("b{n}"), v, b[n - 1].value, tol));
    }
    for &(n, v, tol) in &VALUE_VALUES {
        checks.push(Check::abs(format!("c{n}"), v, c[n - 1].value, tol));
    }
    let fit_b =
        pipeline::extrapolate(&b, 0.75, 5).map_err(|e| CliError::Numerical(e.to_string()))?;
    let fit_c =
        pipeline::extrapolate(&c, 0.5, 4).map_err(|e| CliError::Numerical(e.to_string()))?;
    checks.push(Check::abs("B_richardson", B_CONSTANT, fit_b.limit, 1e-4));
    checks.push(Check::abs("C_richardson", C_CONSTANT, fit_c.limit, 1e-4));
    checks.push(Check::abs("B_analytic", B_CONSTANT, analytic_b(), 5e-7));
    checks.push(Check::abs("C_analytic", C_CONSTANT, analytic_c(), 5e-7));

    let law = |rs: &[EigenvalueRecord]| rs.iter().take(12).all(|r| r.pole_count == r.n / 2);
    checks.push(Check::flag("pole_law_slope", law(&b)));
    checks.push(Check::flag("pole_law_value", law(&c)));
    let residues = b
        .iter()
        .chain(&c)
        .all(|r| r.diagnostics.max_residue_deviation < 1e-3);
    checks.push(Check::flag("residues", residues));

    checks.push(Check::flag(
        "energy_slope",
        energy_drift_ok(&energy_ratios(&b, Family::Slope, 4..=12)),
    ));
    checks.push(Check::flag(
        "energy_value",
        energy_drift_ok(&energy_ratios(&c, Family::Value, 4..=12)),
    ));

    let toy = records(cfg, &EigenvalueKind::toy(), 10)?;
    let toy_fit = pipeline::toy_limit(&toy, 4).map_err(|e| CliError::Numerical(e.to_string()))?;
    checks.push(Check::abs(
        "toy_limit",
        TOY_LIMIT,
        toy_fit.limit,
        0.01 * TOY_LIMIT,
    ));

    let pool = pipeline::pool(cfg.workers);
    let ns = [2, 4, 8, 12];
    let audits = pipeline::audits(
        &pool,
        &b,
        &ns,
        pipeline::DEFAULT_AUDIT_ANGLE,
        1.0,
        &cfg.solver,
    );
    let ratios: Result<Vec<f64>, _> = audits
        .iter()
        .map(|a| a.as_ref().map(|a| a.last_ratio()))
        .collect();
    let ratios = ratios.map_err(|e| CliError::Numerical(format!("audit: {e}")))?;
    checks.push(Check::flag(
        "audit_trend",
        pipeline::strictly_decreasing(&ratios),
    ));
    Ok(checks)
}

pub fn reproduce(cfg: &RunConfig) -> Result<(), CliError> {
    let checks = evaluate(cfg)?;
    let written =
        summary_table(&checks).write(&cfg.output_dir.join("reproduce_summary"), cfg.format)?;
    for c in &checks {
        println!("{:<16} {}", c.entry, if c.pass { "PASS" } else { "FAIL" });
    }
    println!("wrote {}", written.display());
    let failed: Vec<String> = checks
        .iter()
        .filter(|c| !c.pass)
        .map(Check::describe)
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Mismatch(failed))
    }
}
