//! Nonlinear eigenvalues: initial slopes `b_n` at fixed `y(0)`, initial
//! values `c_n` at fixed `y'(0)`, and the thresholds `a_n` of the toy problem
//! `y' = cos(π t y)`.
//!
//! Every initial datum gets an integer label: for the Painlevé families `1`
//! for a pole cascade and `0` for stable oscillation, for the toy problem the
//! number of maxima. Eigenvalues sit where the label changes; they are
//! bracketed on a grid and refined by bisection.

use alloc::vec::Vec;
use core::fmt;

use crate::classify::{
    count_poles, count_upward_poles, shoot, Classification, ClassificationKind, ClassifierConfig,
    Departure,
};
use crate::integrator::{integrate_path, Checkpoint, PathSegment, Point, StepControl, Watch};
use crate::ode::ToyModel;
use crate::pole::TraceConfig;
use crate::C64;
use num_traits::Float;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EigenvalueTag {
    /// Shoot on `y'(0)`; `y(0)` is held.
    InitialSlope,
    /// Shoot on `y(0)`; `y'(0)` is held.
    InitialValue,
    /// Thresholds `a_n` of `y' = cos(π t y)`, `y(0) = a`.
    ToyModel,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenvalueKind {
    pub tag: EigenvalueTag,
    /// The held initial datum; unused for the toy problem.
    pub fixed_datum: f64,
}

impl EigenvalueKind {
    /// `b_n` family with `y(0) = value`.
    pub fn slope(value: f64) -> Self {
        Self {
            tag: EigenvalueTag::InitialSlope,
            fixed_datum: value,
        }
    }

    /// `c_n` family with `y'(0) = slope`.
    pub fn value(slope: f64) -> Self {
        Self {
            tag: EigenvalueTag::InitialValue,
            fixed_datum: slope,
        }
    }

    pub fn toy() -> Self {
        Self {
            tag: EigenvalueTag::ToyModel,
            fixed_datum: 0.0,
        }
    }

    pub fn validate(&self) -> Result<(), EigenError> {
        if !self.fixed_datum.is_finite() {
            return Err(EigenError::InvalidKind);
        }
        if self.tag == EigenvalueTag::InitialSlope && self.fixed_datum == 0.0 {
            return Err(EigenError::InvalidKind);
        }
        Ok(())
    }

    /// `(y(0), y'(0))` for trial parameter `x`.
    pub fn initial_data(&self, x: f64) -> (f64, f64) {
        match self.tag {
            EigenvalueTag::InitialSlope => (self.fixed_datum, x),
            EigenvalueTag::InitialValue => (x, self.fixed_datum),
            EigenvalueTag::ToyModel => (x, 0.0),
        }
    }

    /// Direction in which `|value|` grows with `n`.
    pub fn outward(&self) -> f64 {
        match self.tag {
            EigenvalueTag::InitialValue => -1.0,
            _ => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub trace: TraceConfig,
    pub classifier: ClassifierConfig,
    pub slope_step: f64,
    pub value_step: f64,
    pub toy_step: f64,
    /// Scans stop once `|x|` exceeds this.
    pub scan_limit: f64,
    pub max_iterations: usize,
    /// Integration length for the toy problem; `None` uses `4·n_max + 10`.
    pub toy_horizon: Option<f64>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            trace: TraceConfig::default(),
            classifier: ClassifierConfig::default(),
            slope_step: 0.25,
            value_step: 0.1,
            toy_step: 0.05,
            scan_limit: 100.0,
            max_iterations: 200,
            toy_horizon: None,
        }
    }
}

impl SolverConfig {
    pub fn step_for(&self, kind: &EigenvalueKind) -> f64 {
        match kind.tag {
            EigenvalueTag::InitialSlope => self.slope_step,
            EigenvalueTag::InitialValue => self.value_step,
            EigenvalueTag::ToyModel => self.toy_step,
        }
    }
}

/// Run metadata attached to each eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Diagnostics {
    pub iterations: usize,
    pub lower: f64,
    pub upper: f64,
    pub lower_label: i64,
    pub upper_label: i64,
    /// All poles before the tracking stretch, both residue signs.
    pub raw_pole_count: usize,
    pub max_residue_deviation: f64,
    /// Start of the `−2t` tracking stretch (distance from the origin).
    pub tracking_start: Option<f64>,
    pub departure: Option<Departure>,
    /// Set when bisection stopped on the noise floor instead of the tolerance.
    pub noise_floor: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenvalueRecord {
    pub kind: EigenvalueKind,
    pub n: usize,
    pub value: f64,
    pub bracket_width: f64,
    /// Residue `+1` poles passed by the separatrix (zero for the toy problem).
    pub pole_count: usize,
    pub diagnostics: Diagnostics,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EigenError {
    InvalidKind,
    InvalidBracket,
    /// Both ends of the bracket carry the same label.
    DiscriminantAgreement {
        label: Option<i64>,
    },
    /// The label could not be decided before the tolerance was met; carries
    /// the best bracket reached.
    ToleranceUnreachable {
        best: EigenvalueRecord,
    },
    /// Fewer eigenvalues were bracketed than requested.
    NotBracketed {
        n: usize,
    },
}

impl fmt::Display for EigenError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EigenError::InvalidKind => f.write_str("invalid eigenvalue kind"),
            EigenError::InvalidBracket => f.write_str("bracket must satisfy lo < hi"),
            EigenError::DiscriminantAgreement { label } => {
                write!(f, "bracket endpoints share the label {label:?}")
            }
            EigenError::ToleranceUnreachable { best } => write!(
                f,
                "tolerance unreachable; best bracket width {:e} around {}",
                best.bracket_width, best.value
            ),
            EigenError::NotBracketed { n } => write!(f, "eigenvalue {n} was not bracketed"),
        }
    }
}

/// Label of a Painlevé classification: `1` cascade, `0` oscillation.
pub fn painleve_label(c: &Classification) -> Option<i64> {
    match c.kind {
        ClassificationKind::PoleCascade => Some(1),
        ClassificationKind::StableOscillation => Some(0),
        _ => None,
    }
}

/// Label of trial parameter `x`, `None` when undecided.
pub fn label(kind: &EigenvalueKind, x: f64, config: &SolverConfig, n_max: usize) -> Option<i64> {
    match kind.tag {
        EigenvalueTag::ToyModel => {
            toy_maxima(x, toy_horizon(config, n_max), &config.trace.control).map(|m| m as i64)
        }
        _ => {
            let (value, slope) = kind.initial_data(x);
            let (_, c) = shoot(value, slope, &config.trace, &config.classifier);
            painleve_label(&c)
        }
    }
}

fn toy_horizon(config: &SolverConfig, n_max: usize) -> f64 {
    config.toy_horizon.unwrap_or(4.0 * n_max as f64 + 10.0)
}

/// Number of maxima of the real solution of `y' = cos(π t y)`, `y(0) = a`,
/// on `[0, horizon]`, read off sign changes of the exact derivative.
pub fn toy_maxima(a: f64, horizon: f64, control: &StepControl) -> Option<usize> {
    let start = Point::new(C64::new(0.0, 0.0), [C64::new(a, 0.0), C64::new(0.0, 0.0)]);
    let path = [PathSegment::line(
        C64::new(0.0, 0.0),
        C64::new(horizon, 0.0),
    )];
    let control = StepControl {
        h_max: control.h_max.min(0.05),
        ..*control
    };
    let mut maxima = 0usize;
    let mut rising = true;
    integrate_path(&ToyModel, start, &path, &control, |cp: &Checkpoint| {
        let now = cp.yp.re > 0.0;
        if rising && !now {
            maxima += 1;
        }
        rising = now;
        Watch::Continue
    })
    .ok()
    .filter(|r| r.termination == crate::integrator::Termination::PathComplete)
    .map(|_| maxima)
}

/// Grid `lo, lo + step, …` up to `hi` inclusive.
pub fn grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    if !(lo < hi) || !(step > 0.0) {
        return Vec::new();
    }
    let count = Float::floor((hi - lo) / step * (1.0 + 1e-12)) as usize;
    (0..=count).map(|k| lo + k as f64 * step).collect()
}

/// Adjacent grid pairs whose labels are both known and differ.
pub fn brackets_from_labels(points: &[f64], labels: &[Option<i64>]) -> Vec<(f64, f64)> {
    points
        .windows(2)
        .zip(labels.windows(2))
        .filter_map(|(x, l)| match (l[0], l[1]) {
            (Some(a), Some(b)) if a != b => Some((x[0], x[1])),
            _ => None,
        })
        .collect()
}

/// Brackets of label changes on the grid over `[lo, hi]`, left to right.
pub fn scan_brackets(
    kind: &EigenvalueKind,
    lo: f64,
    hi: f64,
    step: f64,
    config: &SolverConfig,
) -> Vec<(f64, f64)> {
    let points = grid(lo, hi, step);
    let labels: Vec<_> = points.iter().map(|&x| label(kind, x, config, 10)).collect();
    brackets_from_labels(&points, &labels)
}

/// Bisects a bracket to width `tol`. The separatrix solve at the final
/// midpoint provides the pole count.
pub fn bisect(
    kind: &EigenvalueKind,
    bracket: (f64, f64),
    tol: f64,
    config: &SolverConfig,
) -> Result<EigenvalueRecord, EigenError> {
    bisect_with(kind, bracket, tol, config, 10, None, None)
}

fn bisect_with(
    kind: &EigenvalueKind,
    bracket: (f64, f64),
    tol: f64,
    config: &SolverConfig,
    n_max: usize,
    known: Option<(i64, i64)>,
    n: Option<usize>,
) -> Result<EigenvalueRecord, EigenError> {
    kind.validate()?;
    let (mut lo, mut hi) = bracket;
    if !(lo < hi) || !(tol > 0.0) {
        return Err(EigenError::InvalidBracket);
    }
    let (lo_label, hi_label) = match known {
        Some(pair) => pair,
        None => {
            let a = label(kind, lo, config, n_max);
            let b = label(kind, hi, config, n_max);
            match (a, b) {
                (Some(a), Some(b)) if a != b => (a, b),
                _ => return Err(EigenError::DiscriminantAgreement { label: a.or(b) }),
            }
        }
    };
    let mut iterations = 0;
    let mut noise_floor = false;
    while hi - lo > tol && iterations < config.max_iterations {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            noise_floor = true;
            break;
        }
        iterations += 1;
        match label(kind, mid, config, n_max) {
            Some(l) if l == lo_label => lo = mid,
            Some(_) => hi = mid,
            None => {
                noise_floor = true;
                break;
            }
        }
    }
    let value = 0.5 * (lo + hi);
    let mut diagnostics = Diagnostics {
        iterations,
        lower: lo,
        upper: hi,
        lower_label: lo_label,
        upper_label: hi_label,
        noise_floor,
        ..Diagnostics::default()
    };
    let mut pole_count = 0;
    if kind.tag != EigenvalueTag::ToyModel {
        let (y0, yp0) = kind.initial_data(value);
        let (record, c) = shoot(y0, yp0, &config.trace, &config.classifier);
        let cc = &config.classifier;
        pole_count = count_upward_poles(&record, cc.tube_width, cc.track_length);
        diagnostics.raw_pole_count = count_poles(&record, cc.tube_width, cc.track_length);
        diagnostics.max_residue_deviation = record
            .poles
            .iter()
            .map(|p| p.residue_deviation())
            .fold(0.0, f64::max);
        diagnostics.tracking_start = c.tracking_start;
        diagnostics.departure = c.departure;
    }
    let out = EigenvalueRecord {
        kind: *kind,
        n: n.unwrap_or(0),
        value,
        bracket_width: hi - lo,
        pole_count,
        diagnostics,
    };
    if hi - lo > tol {
        return Err(EigenError::ToleranceUnreachable { best: out });
    }
    Ok(out)
}

/// Scans outward from zero until `n_max` brackets are found, nearest first.
/// Each entry carries the bracket and its endpoint labels.
pub fn outward_brackets(
    kind: &EigenvalueKind,
    n_max: usize,
    config: &SolverConfig,
    mut labeller: impl FnMut(&[f64]) -> Vec<Option<i64>>,
) -> Vec<((f64, f64), (i64, i64))> {
    let step = config.step_for(kind);
    let sign = kind.outward();
    let chunk = 32usize;
    let mut found = Vec::new();
    let mut prev: Option<(f64, Option<i64>)> = None;
    let mut k = 0usize;
    while found.len() < n_max {
        let xs: Vec<f64> = (k..k + chunk).map(|i| sign * i as f64 * step).collect();
        if xs[0].abs() > config.scan_limit {
            break;
        }
        let labels = labeller(&xs);
        for (&x, &l) in xs.iter().zip(&labels) {
            if let Some((px, pl)) = prev {
                if let (Some(a), Some(b)) = (pl, l) {
                    if a != b && found.len() < n_max {
                        found.push(((px.min(x), px.max(x)), if px < x { (a, b) } else { (b, a) }));
                    }
                }
            }
            prev = Some((x, l));
        }
        k += chunk;
    }
    found
}

/// The first `n_max` eigenvalues of `kind`, in order of increasing `|value|`.
pub fn solve_sequence(
    kind: &EigenvalueKind,
    n_max: usize,
    tol: f64,
    config: &SolverConfig,
) -> Vec<Result<EigenvalueRecord, EigenError>> {
    if let Err(e) = kind.validate() {
        return alloc::vec![Err(e)];
    }
    let brackets = outward_brackets(kind, n_max, config, |xs| {
        xs.iter().map(|&x| label(kind, x, config, n_max)).collect()
    });
    let mut out: Vec<_> = brackets
        .iter()
        .enumerate()
        .map(|(i, &(b, labels))| solve_bracket(kind, i + 1, b, labels, tol, config, n_max))
        .collect();
    for n in out.len() + 1..=n_max {
        out.push(Err(EigenError::NotBracketed { n }));
    }
    out
}

/// Bisection of the `n`-th bracket; building block for parallel sweeps.
pub fn solve_bracket(
    kind: &EigenvalueKind,
    n: usize,
    bracket: (f64, f64),
    labels: (i64, i64),
    tol: f64,
    config: &SolverConfig,
    n_max: usize,
) -> Result<EigenvalueRecord, EigenError> {
    bisect_with(kind, bracket, tol, config, n_max, Some(labels), Some(n))
}

/// Toy thresholds `a_1 … a_{n_max}`: `a_n` is where the maxima count jumps
/// from `n` to `n + 1`.
pub fn toy_eigenvalues(
    n_max: usize,
    tol: f64,
    config: &SolverConfig,
) -> Vec<Result<EigenvalueRecord, EigenError>> {
    let kind = EigenvalueKind::toy();
    let t = toy_horizon(config, n_max);
    let control = config.trace.control;
    let brackets = outward_brackets(&kind, n_max, config, |xs| {
        xs.iter()
            .map(|&x| toy_maxima(x, t, &control).map(|m| m as i64))
            .collect()
    });
    let mut out: Vec<_> = brackets
        .iter()
        .enumerate()
        .map(|(i, &(b, labels))| {
            if labels != (i as i64 + 1, i as i64 + 2) {
                return Err(EigenError::DiscriminantAgreement {
                    label: Some(labels.0),
                });
            }
            solve_bracket(&kind, i + 1, b, labels, tol, config, n_max)
        })
        .collect();
    for n in out.len() + 1..=n_max {
        out.push(Err(EigenError::NotBracketed { n }));
    }
    out
}

/// Checks that values are strictly monotone in `n` in the direction of the family.
pub fn is_monotone(records: &[EigenvalueRecord]) -> bool {
    records.windows(2).all(|w| {
        let sign = w[0].kind.outward();
        sign * (w[1].value - w[0].value) > 0.0
    })
}
