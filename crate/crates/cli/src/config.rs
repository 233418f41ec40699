//! Run configuration: defaults, a flat `key = value` file, and command-line
//! overrides, applied in that order.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use painleve_core::eigen::{EigenvalueKind, SolverConfig};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Slope,
    Value,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Slope => "slope",
            Family::Value => "value",
        }
    }

    pub fn kind(self, datum: Option<f64>) -> EigenvalueKind {
        match self {
            Family::Slope => EigenvalueKind::slope(datum.unwrap_or(1.0)),
            Family::Value => EigenvalueKind::value(datum.unwrap_or(0.0)),
        }
    }

    /// Exponent in `value_n ∼ K n^p`.
    pub fn exponent(self) -> f64 {
        match self {
            Family::Slope => 0.75,
            Family::Value => 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Settings shared by every command. Each may come from the command line
/// or the config file; unset values fall back to the defaults.
#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    /// Flat key = value configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub output_dir: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    #[arg(long, global = true)]
    pub rel_tol: Option<f64>,
    #[arg(long, global = true)]
    pub abs_tol: Option<f64>,
    #[arg(long, global = true)]
    pub h_init: Option<f64>,
    #[arg(long, global = true)]
    pub h_min: Option<f64>,
    #[arg(long, global = true)]
    pub h_max: Option<f64>,
    #[arg(long, global = true)]
    pub max_steps: Option<usize>,
    /// `|y|` at which a pole is declared.
    #[arg(long, global = true)]
    pub threshold: Option<f64>,
    #[arg(long, global = true)]
    pub min_radius: Option<f64>,
    #[arg(long, global = true)]
    pub max_radius: Option<f64>,
    #[arg(long, global = true)]
    pub horizon: Option<f64>,
    #[arg(long, global = true)]
    pub window: Option<f64>,
    #[arg(long, global = true)]
    pub tube_width: Option<f64>,
    #[arg(long, global = true)]
    pub track_length: Option<f64>,
    #[arg(long, global = true)]
    pub cascade_poles: Option<usize>,
    #[arg(long, global = true)]
    pub slope_step: Option<f64>,
    #[arg(long, global = true)]
    pub value_step: Option<f64>,
    #[arg(long, global = true)]
    pub toy_step: Option<f64>,
    /// Eigenvalue tolerance (final bracket width).
    #[arg(long, global = true)]
    pub tol: Option<f64>,
}

macro_rules! merge_fields {
    ($hi:expr, $lo:expr, $($f:ident),*) => {
        Overrides { config: $hi.config.or($lo.config), $($f: $hi.$f.or($lo.$f)),* }
    };
}

impl Overrides {
    /// Values set here win over those in `lower`.
    pub fn over(self, lower: Overrides) -> Overrides {
        merge_fields!(
            self,
            lower,
            output_dir,
            format,
            workers,
            rel_tol,
            abs_tol,
            h_init,
            h_min,
            h_max,
            max_steps,
            threshold,
            min_radius,
            max_radius,
            horizon,
            window,
            tube_width,
            track_length,
            cascade_poles,
            slope_step,
            value_step,
            toy_step,
            tol
        )
    }

    pub fn from_file(path: &Path) -> Result<Overrides, CliError> {
        let text = fs::read_to_string(path).map_err(|e| {
            CliError::Config(format!("cannot read config file {}: {e}", path.display()))
        })?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Overrides, CliError> {
        let mut o = Overrides::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Config(format!("line {}: expected `key = value`", lineno + 1))
            })?;
            let key = key.trim().replace('-', "_");
            let value = value.trim();
            let at = |msg: String| CliError::Config(format!("line {}: {msg}", lineno + 1));
            macro_rules! num {
                ($field:ident) => {
                    o.$field = Some(
                        value
                            .parse()
                            .map_err(|_| at(format!("invalid value `{value}` for `{key}`")))?,
                    )
                };
            }
            match key.as_str() {
                "output_dir" => o.output_dir = Some(PathBuf::from(value)),
                "format" => {
                    o.format = Some(
                        Format::from_str(value, true)
                            .map_err(|_| at(format!("unknown format `{value}`")))?,
                    )
                }
                "workers" => num!(workers),
                "rel_tol" => num!(rel_tol),
                "abs_tol" => num!(abs_tol),
                "h_init" => num!(h_init),
                "h_min" => num!(h_min),
                "h_max" => num!(h_max),
                "max_steps" => num!(max_steps),
                "threshold" => num!(threshold),
                "min_radius" => num!(min_radius),
                "max_radius" => num!(max_radius),
                "horizon" => num!(horizon),
                "window" => num!(window),
                "tube_width" => num!(tube_width),
                "track_length" => num!(track_length),
                "cascade_poles" => num!(cascade_poles),
                "slope_step" => num!(slope_step),
                "value_step" => num!(value_step),
                "toy_step" => num!(toy_step),
                "tol" => num!(tol),
                _ => return Err(at(format!("unknown key `{key}`"))),
            }
        }
        Ok(o)
    }
}

/// Fully resolved settings.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub solver: SolverConfig,
    pub tol: f64,
    pub output_dir: PathBuf,
    pub format: Format,
    pub workers: usize,
}

impl RunConfig {
    /// Resolves command-line values over the config file (if any) over defaults.
    pub fn resolve(cli: Overrides) -> Result<RunConfig, CliError> {
        let file = match &cli.config {
            Some(path) => Overrides::from_file(path)?,
            None => Overrides::default(),
        };
        Self::from_overrides(cli.over(file))
    }

    pub fn from_overrides(o: Overrides) -> Result<RunConfig, CliError> {
        let mut s = SolverConfig::default();
        let c = &mut s.trace.control;
        c.rel_tol = o.rel_tol.unwrap_or(c.rel_tol);
        c.abs_tol = o.abs_tol.unwrap_or(c.abs_tol);
        c.h_init = o.h_init.unwrap_or(c.h_init);
        c.h_min = o.h_min.unwrap_or(c.h_min);
        c.h_max = o.h_max.unwrap_or(c.h_max);
        c.max_steps = o.max_steps.unwrap_or(c.max_steps);
        let t = &mut s.trace;
        t.threshold = o.threshold.unwrap_or(t.threshold);
        t.min_radius = o.min_radius.unwrap_or(t.min_radius);
        t.max_radius = o.max_radius.unwrap_or(t.max_radius);
        let k = &mut s.classifier;
        k.horizon = o.horizon.unwrap_or(k.horizon);
        k.window = o.window.unwrap_or(k.window);
        k.tube_width = o.tube_width.unwrap_or(k.tube_width);
        k.track_length = o.track_length.unwrap_or(k.track_length);
        k.cascade_poles = o.cascade_poles.unwrap_or(k.cascade_poles);
        s.slope_step = o.slope_step.unwrap_or(s.slope_step);
        s.value_step = o.value_step.unwrap_or(s.value_step);
        s.toy_step = o.toy_step.unwrap_or(s.toy_step);
        let cfg = RunConfig {
            solver: s,
            tol: o.tol.unwrap_or(1e-10),
            output_dir: o.output_dir.unwrap_or_else(|| PathBuf::from(".")),
            format: o.format.unwrap_or(Format::Csv),
            workers: o.workers.unwrap_or(1),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: &str| Err(CliError::Config(m.to_string()));
        if self.workers < 1 {
            return bad("workers must be at least 1");
        }
        if self.solver.trace.control.validate().is_err() {
            return bad("step control needs 0 < h_min <= h_init <= h_max, positive tolerances and max_steps > 0");
        }
        if !(self.tol > 0.0) {
            return bad("tol must be positive");
        }
        let t = &self.solver.trace;
        if !(t.threshold > 1.0) {
            return bad("threshold must exceed 1");
        }
        if !(t.min_radius > 0.0 && t.min_radius <= t.max_radius) {
            return bad("detour radii need 0 < min_radius <= max_radius");
        }
        let k = &self.solver.classifier;
        if !(k.horizon > 0.0 && k.window > 0.0 && k.tube_width > 0.0 && k.track_length >= 0.0) {
            return bad("horizon, window and tube_width must be positive");
        }
        if k.cascade_poles < 1 {
            return bad("cascade_poles must be at least 1");
        }
        if !(self.solver.slope_step > 0.0
            && self.solver.value_step > 0.0
            && self.solver.toy_step > 0.0)
        {
            return bad("scan steps must be positive");
        }
        Ok(())
    }
}
