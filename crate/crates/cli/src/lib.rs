//! Command-line front end for `painleve-core`: eigenvalue sweeps,
//! classification traces, extrapolation, WKB tables, audits and the
//! end-to-end `reproduce` check.
//!
//! Exit codes: 0 success, 2 usage or configuration error, 3 numerical
//! failure, 4 reproduction mismatch. Failures also leave an
//! `error_report.json` in the output directory.

pub mod config;
pub mod error;
pub mod manifest;
pub mod output;
pub mod pipeline;

use std::ffi::OsString;
use std::path::Path;

use clap::{Parser, Subcommand};
use painleve_core::asymptotics::{
    analytic_b, analytic_c, slope_from_energy, wkb_energy, WkbParams,
};
use painleve_core::classify::{count_poles, count_upward_poles, shoot, ClassificationKind};
use painleve_core::eigen::{EigenError, EigenvalueKind, EigenvalueRecord};

use config::{Family, Format, Overrides, RunConfig};
use error::CliError;
use output::{emit_trace, ensure_dir, Table};

#[derive(Debug, Parser)]
#[command(
    name = "painleve",
    version,
    about = "Separatrix eigenvalues of the fourth Painlevé equation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub overrides: Overrides,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Locate the first n eigenvalues of a family.
    Eigen {
        #[arg(long, value_enum, default_value = "slope")]
        kind: Family,
        #[arg(long, default_value_t = 12)]
        n_max: usize,
        /// Held initial datum (default y(0) = 1 for slopes, y'(0) = 0 for values).
        #[arg(long, allow_hyphen_values = true)]
        datum: Option<f64>,
        /// Also write the trace of each eigenfunction.
        #[arg(long)]
        traces: bool,
    },
    /// Classify one initial condition and write its trace.
    Classify {
        #[arg(long, allow_hyphen_values = true, default_value_t = 1.0)]
        value: f64,
        #[arg(long, allow_hyphen_values = true)]
        slope: f64,
        #[arg(long, default_value = "trace")]
        name: String,
    },
    /// Richardson extrapolation of value_n / n^p.
    Extrapolate {
        #[arg(long, value_enum, default_value = "slope")]
        kind: Family,
        #[arg(long)]
        order: Option<usize>,
        #[arg(long)]
        n_max: Option<usize>,
        /// Eigenvalue table from a previous `eigen` run (CSV).
        #[arg(long)]
        input: Option<std::path::PathBuf>,
    },
    /// WKB energies of H = p²/2 + g x²(ix)^ε and the implied slopes.
    Wkb {
        #[arg(long, default_value_t = 0.125)]
        g: f64,
        #[arg(long, default_value_t = 4.0)]
        epsilon: f64,
        /// Level range `a..b` (inclusive) or a single level.
        #[arg(long, default_value = "1..12")]
        n: String,
    },
    /// Energy balance H + I = H(0) along a complex ray.
    Audit {
        #[arg(long, value_enum, default_value = "slope")]
        kind: Family,
        /// Comma-separated eigenvalue indices.
        #[arg(long, default_value = "2,4,8,12", value_delimiter = ',')]
        n: Vec<usize>,
        #[arg(long, allow_hyphen_values = true, default_value_t = pipeline::DEFAULT_AUDIT_ANGLE)]
        angle: f64,
        #[arg(long, default_value_t = 1.0)]
        x_max: f64,
    },
    /// Thresholds of y' = cos(π t y) and the limit of a_n / √n.
    Toy {
        #[arg(long, default_value_t = 10)]
        n_max: usize,
        #[arg(long, default_value_t = 4)]
        order: usize,
    },
    /// Full pipeline checked against the published values.
    Reproduce,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Eigen { .. } => "eigen",
            Command::Classify { .. } => "classify",
            Command::Extrapolate { .. } => "extrapolate",
            Command::Wkb { .. } => "wkb",
            Command::Audit { .. } => "audit",
            Command::Toy { .. } => "toy",
            Command::Reproduce => "reproduce",
        }
    }
}

/// Parses arguments, runs the command and returns the exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let command = cli.command.name();
    let dir = cli
        .overrides
        .output_dir
        .clone()
        .unwrap_or_else(|| ".".into());
    match RunConfig::resolve(cli.overrides).and_then(|cfg| run(&cli.command, &cfg)) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if let CliError::Mismatch(items) = &e {
                for item in items {
                    eprintln!("  {item}");
                }
            }
            let _ = error::write_report(&dir, command, &e);
            e.exit_code()
        }
    }
}

pub fn run(command: &Command, cfg: &RunConfig) -> Result<(), CliError> {
    ensure_dir(&cfg.output_dir)?;
    match command {
        Command::Eigen {
            kind,
            n_max,
            datum,
            traces,
        } => eigen(cfg, *kind, *n_max, *datum, *traces),
        Command::Classify { value, slope, name } => classify(cfg, *value, *slope, name),
        Command::Extrapolate {
            kind,
            order,
            n_max,
            input,
        } => extrapolate(cfg, *kind, *order, *n_max, input.as_deref()),
        Command::Wkb { g, epsilon, n } => wkb(cfg, *g, *epsilon, n),
        Command::Audit {
            kind,
            n,
            angle,
            x_max,
        } => audit(cfg, *kind, n, *angle, *x_max),
        Command::Toy { n_max, order } => toy(cfg, *n_max, *order),
        Command::Reproduce => manifest::reproduce(cfg),
    }
}

fn need(cond: bool, msg: &str) -> Result<(), CliError> {
    if cond {
        Ok(())
    } else {
        Err(CliError::Config(msg.to_string()))
    }
}

pub const EIGEN_COLUMNS: [&str; 10] = [
    "n",
    "value",
    "bracket_width",
    "pole_count",
    "raw_pole_count",
    "iterations",
    "max_residue_deviation",
    "tracking_start",
    "noise_floor",
    "status",
];

pub fn eigen_table(results: &[Result<EigenvalueRecord, EigenError>]) -> Table {
    let mut t = Table::new(&EIGEN_COLUMNS);
    for (i, r) in results.iter().enumerate() {
        let (rec, status) = match r {
            Ok(rec) => (Some(*rec), "ok".to_string()),
            Err(EigenError::ToleranceUnreachable { best }) => {
                (Some(*best), "tolerance_unreachable".to_string())
            }
            Err(e) => (None, e.to_string()),
        };
        let row = match rec {
            Some(r) => vec![
                r.n.into(),
                r.value.into(),
                r.bracket_width.into(),
                r.pole_count.into(),
                r.diagnostics.raw_pole_count.into(),
                r.diagnostics.iterations.into(),
                r.diagnostics.max_residue_deviation.into(),
                r.diagnostics.tracking_start.unwrap_or(f64::NAN).into(),
                r.diagnostics.noise_floor.into(),
                status.into(),
            ],
            None => vec![
                (i + 1).into(),
                f64::NAN.into(),
                f64::NAN.into(),
                0usize.into(),
                0usize.into(),
                0usize.into(),
                f64::NAN.into(),
                f64::NAN.into(),
                false.into(),
                status.into(),
            ],
        };
        t.push(row);
    }
    t
}

fn failures(results: &[Result<EigenvalueRecord, EigenError>]) -> Result<(), CliError> {
    let errs: Vec<String> = results
        .iter()
        .filter_map(|r| r.as_ref().err())
        .map(|e| e.to_string())
        .collect();
    if errs.is_empty() {
        Ok(())
    } else {
        Err(CliError::Numerical(errs.join("; ")))
    }
}

fn eigen(
    cfg: &RunConfig,
    family: Family,
    n_max: usize,
    datum: Option<f64>,
    traces: bool,
) -> Result<(), CliError> {
    need(n_max >= 1, "n_max must be at least 1")?;
    let kind = family.kind(datum);
    kind.validate()
        .map_err(|e| CliError::Config(e.to_string()))?;
    let pool = pipeline::pool(cfg.workers);
    let results = pipeline::solve_family(&pool, &kind, n_max, cfg.tol, &cfg.solver);
    let path = cfg
        .output_dir
        .join(format!("eigenvalues_{}", family.name()));
    let written = eigen_table(&results).write(&path, cfg.format)?;
    println!("wrote {}", written.display());
    if traces {
        for r in results.iter().flatten() {
            let (y0, yp0) = r.kind.initial_data(r.value);
            let (record, _) = shoot(y0, yp0, &cfg.solver.trace, &cfg.solver.classifier);
            emit_trace(
                &record,
                &cfg.output_dir
                    .join(format!("trace_{}_{}.csv", family.name(), r.n)),
            )?;
        }
    }
    failures(&results)
}

fn classify(cfg: &RunConfig, value: f64, slope: f64, name: &str) -> Result<(), CliError> {
    need(value != 0.0, "y(0) must be nonzero")?;
    let k = &cfg.solver.classifier;
    let (record, c) = shoot(value, slope, &cfg.solver.trace, k);
    let mut t = Table::new(&[
        "value",
        "slope",
        "kind",
        "re_decided_at",
        "im_decided_at",
        "pole_count",
        "upward_pole_count",
        "departure",
        "termination",
    ]);
    t.push(vec![
        value.into(),
        slope.into(),
        format!("{:?}", c.kind).into(),
        c.decided_at.re.into(),
        c.decided_at.im.into(),
        count_poles(&record, k.tube_width, k.track_length).into(),
        count_upward_poles(&record, k.tube_width, k.track_length).into(),
        c.departure
            .map_or("none".to_string(), |d| format!("{d:?}"))
            .into(),
        format!("{:?}", record.termination).into(),
    ]);
    let written = t.write(
        &cfg.output_dir.join(format!("{name}_classification")),
        cfg.format,
    )?;
    emit_trace(&record, &cfg.output_dir.join(format!("{name}.csv")))?;
    println!(
        "{:?} at t = {} after {} poles; wrote {}",
        c.kind,
        c.decided_at,
        c.pole_count,
        written.display()
    );
    if c.kind == ClassificationKind::Undecided {
        return Err(CliError::Numerical(
            "classification undecided at the horizon".into(),
        ));
    }
    Ok(())
}

fn read_eigen_csv(path: &Path, family: Family) -> Result<Vec<EigenvalueRecord>, CliError> {
    let mut like = Table::new(&EIGEN_COLUMNS);
    like.push(eigen_table(&[Err(EigenError::InvalidKind)]).rows.remove(0));
    let t = Table::read_csv(path, &like)?;
    let col = |name: &str| {
        t.column(name)
            .ok_or_else(|| CliError::Config(format!("{}: missing column `{name}`", path.display())))
    };
    let (ni, vi, wi) = (col("n")?, col("value")?, col("bracket_width")?);
    let kind = family.kind(None);
    t.rows
        .iter()
        .map(|row| {
            let get = |i: usize| match &row[i] {
                output::Cell::Float(x) => Ok(*x),
                output::Cell::Int(x) => Ok(*x as f64),
                _ => Err(CliError::Config(format!(
                    "{}: non-numeric cell",
                    path.display()
                ))),
            };
            Ok(EigenvalueRecord {
                kind,
                n: get(ni)? as usize,
                value: get(vi)?,
                bracket_width: get(wi)?,
                pole_count: 0,
                diagnostics: Default::default(),
            })
        })
        .collect()
}

pub fn extrapolation_table(r: &painleve_core::asymptotics::ExtrapolationResult) -> Table {
    let mut cols: Vec<String> = vec!["n".into()];
    cols.extend((0..=r.order).map(|k| format!("order_{k}")));
    let refs: Vec<&str> = cols.iter().map(String::as_str).collect();
    let mut t = Table::new(&refs);
    let len = r.tableau[0].len();
    for i in 0..len {
        let mut row = vec![(i + 1).into()];
        for k in 0..=r.order {
            // Column k entry i combines terms i-k+1 ..= i+1; aligned on the last.
            row.push(if i >= k {
                r.tableau[k][i - k].into()
            } else {
                f64::NAN.into()
            });
        }
        t.push(row);
    }
    t
}

fn extrapolate(
    cfg: &RunConfig,
    family: Family,
    order: Option<usize>,
    n_max: Option<usize>,
    input: Option<&Path>,
) -> Result<(), CliError> {
    let (default_order, default_n) = match family {
        Family::Slope => (5, 12),
        Family::Value => (4, 15),
    };
    let order = order.unwrap_or(default_order);
    let records = match input {
        Some(p) => read_eigen_csv(p, family)?,
        None => {
            let n = n_max.unwrap_or(default_n);
            need(n >= 1, "n_max must be at least 1")?;
            let pool = pipeline::pool(cfg.workers);
            let results =
                pipeline::solve_family(&pool, &family.kind(None), n, cfg.tol, &cfg.solver);
            failures(&results)?;
            pipeline::all_ok(&results).map_err(|e| CliError::Numerical(e.to_string()))?
        }
    };
    let r = pipeline::extrapolate(&records, family.exponent(), order)
        .map_err(|e| CliError::Numerical(e.to_string()))?;
    let name = format!("extrapolation_{}", family.name());
    extrapolation_table(&r).write(&cfg.output_dir.join(&name), cfg.format)?;
    let analytic = match family {
        Family::Slope => analytic_b(),
        Family::Value => analytic_c(),
    };
    let mut s = Table::new(&[
        "order",
        "limit",
        "stability_estimate",
        "half_power_limit",
        "analytic",
    ]);
    s.push(vec![
        r.order.into(),
        r.limit.into(),
        r.stability_estimate.into(),
        r.half_power_limit.unwrap_or(f64::NAN).into(),
        analytic.into(),
    ]);
    let written = s.write(&cfg.output_dir.join(format!("{name}_summary")), cfg.format)?;
    println!(
        "limit {} (analytic {analytic}); wrote {}",
        r.limit,
        written.display()
    );
    Ok(())
}

pub fn parse_range(s: &str) -> Result<(u32, u32), CliError> {
    let bad = || CliError::Config(format!("invalid level range `{s}`"));
    let (a, b) = match s.split_once("..") {
        Some((a, b)) => (
            a.trim().parse().map_err(|_| bad())?,
            b.trim().parse().map_err(|_| bad())?,
        ),
        None => {
            let n = s.trim().parse().map_err(|_| bad())?;
            (n, n)
        }
    };
    if a < 1 || b < a {
        return Err(bad());
    }
    Ok((a, b))
}

fn wkb(cfg: &RunConfig, g: f64, epsilon: f64, n: &str) -> Result<(), CliError> {
    let (a, b) = parse_range(n)?;
    let mut t = Table::new(&["n", "energy", "slope"]);
    for n in a..=b {
        let p = WkbParams::new(g, epsilon, n)
            .map_err(|_| CliError::Config("need g > 0 and epsilon >= 0".into()))?;
        let e = wkb_energy(p).map_err(|e| CliError::Numerical(e.to_string()))?;
        let s = slope_from_energy(e).map_err(|e| CliError::Numerical(e.to_string()))?;
        t.push(vec![(n as usize).into(), e.into(), s.into()]);
    }
    let written = t.write(&cfg.output_dir.join("wkb"), cfg.format)?;
    println!("wrote {}", written.display());
    Ok(())
}

fn audit(
    cfg: &RunConfig,
    family: Family,
    ns: &[usize],
    angle: f64,
    x_max: f64,
) -> Result<(), CliError> {
    need(
        !ns.is_empty() && ns.iter().all(|&n| n >= 1),
        "audit levels must be at least 1",
    )?;
    need(x_max >= 0.0, "x_max must be non-negative")?;
    let pool = pipeline::pool(cfg.workers);
    let n_max = *ns.iter().max().unwrap();
    let results = pipeline::solve_family(&pool, &family.kind(None), n_max, cfg.tol, &cfg.solver);
    failures(&results)?;
    let records = pipeline::all_ok(&results).map_err(|e| CliError::Numerical(e.to_string()))?;
    let audits = pipeline::audits(&pool, &records, ns, angle, x_max, &cfg.solver);
    let mut summary = Table::new(&["n", "re_h0", "im_h0", "energy", "ratio", "abs_i"]);
    for (a, &n) in audits.iter().zip(ns) {
        let a = a
            .as_ref()
            .map_err(|e| CliError::Numerical(format!("audit n = {n}: {e}")))?;
        let mut t = Table::new(&["re_x", "im_x", "re_h", "im_h", "re_i", "im_i", "ratio"]);
        for s in &a.samples {
            t.push(vec![
                s.x.re.into(),
                s.x.im.into(),
                s.h.re.into(),
                s.h.im.into(),
                s.i.re.into(),
                s.i.im.into(),
                s.ratio.into(),
            ]);
        }
        t.write(
            &cfg.output_dir.join(format!("audit_{}_{n}", family.name())),
            cfg.format,
        )?;
        let last = a.samples.last().unwrap();
        summary.push(vec![
            n.into(),
            a.h0.re.into(),
            a.h0.im.into(),
            a.energy.into(),
            last.ratio.into(),
            last.i.norm().into(),
        ]);
    }
    let written = summary.write(
        &cfg.output_dir
            .join(format!("audit_{}_summary", family.name())),
        cfg.format,
    )?;
    println!("wrote {}", written.display());
    Ok(())
}

fn toy(cfg: &RunConfig, n_max: usize, order: usize) -> Result<(), CliError> {
    need(n_max >= 1, "n_max must be at least 1")?;
    let pool = pipeline::pool(cfg.workers);
    let results =
        pipeline::solve_family(&pool, &EigenvalueKind::toy(), n_max, cfg.tol, &cfg.solver);
    eigen_table(&results).write(&cfg.output_dir.join("toy_eigenvalues"), cfg.format)?;
    failures(&results)?;
    let records = pipeline::all_ok(&results).map_err(|e| CliError::Numerical(e.to_string()))?;
    let r = pipeline::toy_limit(&records, order.min(n_max - 1))
        .map_err(|e| CliError::Numerical(e.to_string()))?;
    let written =
        extrapolation_table(&r).write(&cfg.output_dir.join("toy_extrapolation"), cfg.format)?;
    println!(
        "a_n/sqrt(n) -> {} (2^(5/6) = {}); wrote {}",
        r.limit,
        2f64.powf(5.0 / 6.0),
        written.display()
    );
    Ok(())
}

/// Output format helper for callers that build their own tables.
pub fn write_table(t: &Table, cfg: &RunConfig, name: &str) -> Result<std::path::PathBuf, CliError> {
    t.write(&cfg.output_dir.join(name), cfg.format)
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}
