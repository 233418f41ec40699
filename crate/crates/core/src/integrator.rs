//! Adaptive Dormand–Prince 5(4) integration along line segments and circular
//! arcs in the complex t-plane.
//!
//! A segment is parameterised by arclength `s`, so a step of size `h` moves
//! `t` by `h · dt/ds` with `|dt/ds| = 1`. On an arc `dt/ds = ±i e^{iθ}`,
//! which folds the contour derivative into the right-hand side and lets one
//! step controller serve both segment kinds.

use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};
use core::fmt;

use crate::ode::{finite, OdeError, PainleveState};
use crate::pole::PoleEvent;
use crate::C64;
use num_traits::Float;

/// First-order system in two complex slots, integrated along a contour.
pub trait System {
    fn rhs(&self, t: C64, w: &[C64; 2]) -> Result<[C64; 2], OdeError>;

    /// Solution value and derivative `(y, y')` corresponding to the integrated state.
    fn observe(&self, _t: C64, w: &[C64; 2]) -> (C64, C64) {
        (w[0], w[1])
    }
}

/// Integrated state at a point of the contour.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub t: C64,
    pub w: [C64; 2],
}

impl Point {
    pub fn new(t: C64, w: [C64; 2]) -> Self {
        Self { t, w }
    }

    pub fn from_state(state: &PainleveState) -> Self {
        Self::new(state.t, [state.y, state.yp])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Orientation {
    #[default]
    CounterClockwise,
    Clockwise,
}

impl Orientation {
    pub fn sign(self) -> f64 {
        match self {
            Orientation::CounterClockwise => 1.0,
            Orientation::Clockwise => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PathSegment {
    Line {
        start: C64,
        end: C64,
    },
    Arc {
        center: C64,
        radius: f64,
        start_angle: f64,
        end_angle: f64,
        orientation: Orientation,
    },
}

impl PathSegment {
    pub fn line(start: C64, end: C64) -> Self {
        PathSegment::Line { start, end }
    }

    /// Arc from `start_angle` sweeping by `±|end_angle − start_angle|`, the
    /// sign fixed by `orientation`.
    pub fn arc(
        center: C64,
        radius: f64,
        start_angle: f64,
        end_angle: f64,
        orientation: Orientation,
    ) -> Self {
        PathSegment::Arc {
            center,
            radius,
            start_angle,
            end_angle,
            orientation,
        }
    }

    pub fn validate(&self) -> Result<(), PathError> {
        match *self {
            PathSegment::Line { start, end } => {
                if !(finite(start) && finite(end)) || start == end {
                    return Err(PathError::DegenerateSegment);
                }
            }
            PathSegment::Arc {
                center,
                radius,
                start_angle,
                end_angle,
                orientation,
            } => {
                let sweep = end_angle - start_angle;
                if !finite(center) || !(radius > 0.0) || !radius.is_finite() {
                    return Err(PathError::DegenerateSegment);
                }
                if !sweep.is_finite() || sweep == 0.0 || sweep.abs() > TAU + 1e-12 {
                    return Err(PathError::DegenerateSegment);
                }
                if sweep * orientation.sign() < 0.0 {
                    return Err(PathError::OrientationMismatch);
                }
            }
        }
        Ok(())
    }

    pub fn length(&self) -> f64 {
        match *self {
            PathSegment::Line { start, end } => (end - start).norm(),
            PathSegment::Arc {
                radius,
                start_angle,
                end_angle,
                ..
            } => radius * (end_angle - start_angle).abs(),
        }
    }

    pub fn start_point(&self) -> C64 {
        self.point(0.0)
    }

    pub fn end_point(&self) -> C64 {
        match *self {
            PathSegment::Line { end, .. } => end,
            PathSegment::Arc {
                center,
                radius,
                end_angle,
                ..
            } => center + C64::from_polar(radius, end_angle),
        }
    }

    /// Point at arclength `s` from the start.
    pub fn point(&self, s: f64) -> C64 {
        match *self {
            PathSegment::Line { start, end } => {
                let len = (end - start).norm();
                start + (end - start) * (s / len)
            }
            PathSegment::Arc {
                center,
                radius,
                start_angle,
                orientation,
                ..
            } => center + C64::from_polar(radius, start_angle + orientation.sign() * s / radius),
        }
    }

    /// Unit tangent `dt/ds` at arclength `s`.
    pub fn tangent(&self, s: f64) -> C64 {
        match *self {
            PathSegment::Line { start, end } => (end - start) / (end - start).norm(),
            PathSegment::Arc {
                radius,
                start_angle,
                orientation,
                ..
            } => {
                let sign = orientation.sign();
                let theta = start_angle + sign * s / radius;
                C64::new(0.0, sign) * C64::from_polar(1.0, theta)
            }
        }
    }

    pub fn is_line(&self) -> bool {
        matches!(self, PathSegment::Line { .. })
    }

    /// Same contour traversed backwards.
    pub fn reversed(&self) -> Self {
        match *self {
            PathSegment::Line { start, end } => PathSegment::Line {
                start: end,
                end: start,
            },
            PathSegment::Arc {
                center,
                radius,
                start_angle,
                end_angle,
                orientation,
            } => PathSegment::Arc {
                center,
                radius,
                start_angle: end_angle,
                end_angle: start_angle,
                orientation: match orientation {
                    Orientation::CounterClockwise => Orientation::Clockwise,
                    Orientation::Clockwise => Orientation::CounterClockwise,
                },
            },
        }
    }
}

/// Normalises an angle to `(−π, π]`.
pub(crate) fn wrap_angle(theta: f64) -> f64 {
    let mut a = theta % TAU;
    if a <= -PI {
        a += TAU;
    } else if a > PI {
        a -= TAU;
    }
    a
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub h_init: f64,
    pub h_min: f64,
    pub h_max: f64,
    pub max_steps: usize,
}

impl Default for StepControl {
    fn default() -> Self {
        Self {
            rel_tol: 1e-12,
            abs_tol: 1e-12,
            h_init: 1e-3,
            h_min: 1e-13,
            h_max: 0.1,
            max_steps: 2_000_000,
        }
    }
}

impl StepControl {
    pub fn with_tolerances(mut self, rel_tol: f64, abs_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self.abs_tol = abs_tol;
        self
    }

    pub fn validate(&self) -> Result<(), PathError> {
        let ordered = 0.0 < self.h_min && self.h_min <= self.h_init && self.h_init <= self.h_max;
        if !ordered || !(self.rel_tol > 0.0) || !(self.abs_tol > 0.0) || self.max_steps == 0 {
            return Err(PathError::InvalidControl);
        }
        Ok(())
    }
}

/// Accepted integration step, observed in the y-picture.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Checkpoint {
    pub t: C64,
    pub y: C64,
    pub yp: C64,
    /// Cumulative arclength along the whole path.
    pub arclength: f64,
    pub segment_index: usize,
    /// True when the sample lies on a pole detour rather than the main ray.
    pub on_detour: bool,
    /// Raw integrated state, needed to restart from this sample.
    pub w: [C64; 2],
}

impl Checkpoint {
    pub fn point(&self) -> Point {
        Point::new(self.t, self.w)
    }

    pub fn state(&self) -> PainleveState {
        PainleveState::new(self.t, self.y, self.yp)
    }
}

/// Why a watcher stopped an integration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    PoleDetected,
    Decided,
    Requested,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Watch {
    Continue,
    Abort(StopReason),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SegmentOutcome {
    Complete,
    WatcherAbort(StopReason),
    StepUnderflow { h: f64 },
    MaxStepsExceeded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SegmentRun {
    pub end: Point,
    pub samples: Vec<Checkpoint>,
    pub outcome: SegmentOutcome,
    pub steps: usize,
    pub rejected: usize,
}

impl SegmentRun {
    pub fn final_state<S: System>(&self, system: &S) -> PainleveState {
        let (y, yp) = system.observe(self.end.t, &self.end.w);
        PainleveState::new(self.end.t, y, yp)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PathError {
    DegenerateSegment,
    OrientationMismatch,
    InvalidControl,
    StartMismatch { distance: f64 },
    NonFiniteState,
    NonContiguousPath { index: usize, gap: f64 },
}

impl fmt::Display for PathError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PathError::DegenerateSegment => f.write_str("degenerate path segment"),
            PathError::OrientationMismatch => {
                f.write_str("arc orientation disagrees with its angular sweep")
            }
            PathError::InvalidControl => f.write_str("invalid step control parameters"),
            PathError::StartMismatch { distance } => {
                write!(f, "state is {distance:e} away from the segment start")
            }
            PathError::NonFiniteState => f.write_str("initial state is not finite"),
            PathError::NonContiguousPath { index, gap } => {
                write!(
                    f,
                    "segment {index} starts {gap:e} away from the previous end"
                )
            }
        }
    }
}

/// How an integration along a whole path ended.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Termination {
    PathComplete,
    WatcherAbort(StopReason),
    StepUnderflow,
    MaxStepsExceeded,
    /// Pole handling gave up (for example, poles too close to separate).
    DetourFailed,
}

/// Full trace of one integration.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveRecord {
    pub checkpoints: Vec<Checkpoint>,
    pub poles: Vec<PoleEvent>,
    pub segments: Vec<PathSegment>,
    pub termination: Termination,
    /// Unit direction of the main ray (for traces toward −∞ this is −1).
    pub direction: C64,
    pub origin: C64,
}

impl SolveRecord {
    pub fn empty(origin: C64, direction: C64) -> Self {
        Self {
            checkpoints: Vec::new(),
            poles: Vec::new(),
            segments: Vec::new(),
            termination: Termination::PathComplete,
            direction,
            origin,
        }
    }

    pub fn last(&self) -> Option<&Checkpoint> {
        self.checkpoints.last()
    }

    /// Distance of `t` from the origin measured along the main ray.
    pub fn ray_coordinate(&self, t: C64) -> f64 {
        ((t - self.origin) * self.direction.conj()).re
    }

    /// Checkpoints lying on the main ray, in path order.
    pub fn ray_samples(&self) -> impl Iterator<Item = &Checkpoint> + '_ {
        self.checkpoints.iter().filter(|c| !c.on_detour)
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;
const PI_BETA: f64 = 0.04;

#[inline]
fn axpy(w: &[C64; 2], terms: &[(f64, &[C64; 2])], h: f64) -> [C64; 2] {
    let mut out = *w;
    for (coef, k) in terms {
        out[0] += k[0] * (coef * h);
        out[1] += k[1] * (coef * h);
    }
    out
}

struct ContourRhs<'a, S: System> {
    system: &'a S,
    segment: &'a PathSegment,
}

impl<S: System> ContourRhs<'_, S> {
    fn eval(&self, s: f64, w: &[C64; 2]) -> Result<[C64; 2], OdeError> {
        let t = self.segment.point(s);
        let dt = self.segment.tangent(s);
        let f = self.system.rhs(t, w)?;
        let out = [f[0] * dt, f[1] * dt];
        if finite(out[0]) && finite(out[1]) {
            Ok(out)
        } else {
            Err(OdeError::NonFinite)
        }
    }
}

/// Integrates from `start` across one segment.
///
/// `arclength_offset` and `segment_index` only label the emitted checkpoints.
/// The watcher sees every accepted step and may stop the integration.
#[allow(clippy::too_many_arguments)]
pub fn integrate_segment<S, W>(
    system: &S,
    start: Point,
    segment: &PathSegment,
    control: &StepControl,
    arclength_offset: f64,
    segment_index: usize,
    on_detour: bool,
    mut watch: W,
) -> Result<SegmentRun, PathError>
where
    S: System,
    W: FnMut(&Checkpoint) -> Watch,
{
    segment.validate()?;
    control.validate()?;
    if !(finite(start.t) && finite(start.w[0]) && finite(start.w[1])) {
        return Err(PathError::NonFiniteState);
    }
    let length = segment.length();
    let distance = (start.t - segment.start_point()).norm();
    if distance > 1e-9 * (1.0 + length) {
        return Err(PathError::StartMismatch { distance });
    }

    let rhs = ContourRhs { system, segment };
    let mut samples = Vec::new();
    let mut w = start.w;
    let mut s = 0.0;
    let mut h = control.h_init.min(control.h_max).min(length);
    let mut err_old: f64 = 1e-4;
    let mut steps = 0usize;
    let mut rejected = 0usize;
    let mut last_rejected = false;

    let mut k1 = match rhs.eval(0.0, &w) {
        Ok(k) => k,
        Err(_) => {
            return Ok(SegmentRun {
                end: Point::new(start.t, w),
                samples,
                outcome: SegmentOutcome::StepUnderflow { h: 0.0 },
                steps,
                rejected,
            })
        }
    };

    let finish =
        |w: [C64; 2], s: f64, samples, outcome, steps, rejected| -> Result<SegmentRun, PathError> {
            let t = if outcome == SegmentOutcome::Complete {
                segment.end_point()
            } else {
                segment.point(s)
            };
            Ok(SegmentRun {
                end: Point::new(t, w),
                samples,
                outcome,
                steps,
                rejected,
            })
        };

    loop {
        if s >= length {
            return finish(
                w,
                length,
                samples,
                SegmentOutcome::Complete,
                steps,
                rejected,
            );
        }
        if steps + rejected >= control.max_steps {
            return finish(
                w,
                s,
                samples,
                SegmentOutcome::MaxStepsExceeded,
                steps,
                rejected,
            );
        }
        let remaining = length - s;
        let last_step = h >= remaining * (1.0 - 1e-12);
        if last_step {
            h = remaining;
        } else if h < control.h_min {
            return finish(
                w,
                s,
                samples,
                SegmentOutcome::StepUnderflow { h },
                steps,
                rejected,
            );
        }

        match dp_step(&rhs, s, &w, &k1, h) {
            Ok((w_new, k7, err_vec)) => {
                let err = error_norm(&w, &w_new, &err_vec, control);
                if err <= 1.0 {
                    steps += 1;
                    s = if last_step { length } else { s + h };
                    w = w_new;
                    k1 = k7;
                    let t = if last_step {
                        segment.end_point()
                    } else {
                        segment.point(s)
                    };
                    let (y, yp) = system.observe(t, &w);
                    let cp = Checkpoint {
                        t,
                        y,
                        yp,
                        arclength: arclength_offset + s,
                        segment_index,
                        on_detour,
                        w,
                    };
                    samples.push(cp);
                    let fac = if err == 0.0 {
                        FAC_MAX
                    } else {
                        (SAFETY
                            * Float::powf(err, -0.2 + 0.75 * PI_BETA)
                            * Float::powf(err_old, PI_BETA))
                        .clamp(FAC_MIN, FAC_MAX)
                    };
                    let fac = if last_rejected { fac.min(1.0) } else { fac };
                    err_old = err.max(1e-4);
                    last_rejected = false;
                    h = (h * fac).min(control.h_max);
                    if let Watch::Abort(reason) = watch(&cp) {
                        return finish(
                            w,
                            s,
                            samples,
                            SegmentOutcome::WatcherAbort(reason),
                            steps,
                            rejected,
                        );
                    }
                } else {
                    rejected += 1;
                    last_rejected = true;
                    let fac = (SAFETY * Float::powf(err, -0.2)).clamp(FAC_MIN, 1.0);
                    h *= fac;
                }
            }
            Err(_) => {
                rejected += 1;
                last_rejected = true;
                h *= 0.25;
            }
        }
    }
}

#[allow(clippy::type_complexity)]
fn dp_step<S: System>(
    rhs: &ContourRhs<'_, S>,
    s: f64,
    w: &[C64; 2],
    k1: &[C64; 2],
    h: f64,
) -> Result<([C64; 2], [C64; 2], [C64; 2]), OdeError> {
    let k2 = rhs.eval(s + C2 * h, &axpy(w, &[(A21, k1)], h))?;
    let k3 = rhs.eval(s + C3 * h, &axpy(w, &[(A31, k1), (A32, &k2)], h))?;
    let k4 = rhs.eval(
        s + C4 * h,
        &axpy(w, &[(A41, k1), (A42, &k2), (A43, &k3)], h),
    )?;
    let k5 = rhs.eval(
        s + C5 * h,
        &axpy(w, &[(A51, k1), (A52, &k2), (A53, &k3), (A54, &k4)], h),
    )?;
    let k6 = rhs.eval(
        s + h,
        &axpy(
            w,
            &[(A61, k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
            h,
        ),
    )?;
    let w_new = axpy(
        w,
        &[(B1, k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)],
        h,
    );
    let k7 = rhs.eval(s + h, &w_new)?;
    let mut err = [C64::new(0.0, 0.0); 2];
    for i in 0..2 {
        err[i] = (k1[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6 + k7[i] * E7) * h;
    }
    Ok((w_new, k7, err))
}

fn error_norm(w: &[C64; 2], w_new: &[C64; 2], err: &[C64; 2], control: &StepControl) -> f64 {
    let mut acc = 0.0;
    for i in 0..2 {
        let scale = control.abs_tol + control.rel_tol * w[i].norm().max(w_new[i].norm());
        let r = err[i].norm() / scale;
        acc += r * r;
    }
    Float::sqrt(acc / 2.0)
}

/// Integrates along consecutive segments, recording every accepted step.
///
/// The starting point is recorded as checkpoint zero when the path is non-empty.
pub fn integrate_path<S, W>(
    system: &S,
    initial: Point,
    path: &[PathSegment],
    control: &StepControl,
    mut watch: W,
) -> Result<SolveRecord, PathError>
where
    S: System,
    W: FnMut(&Checkpoint) -> Watch,
{
    let direction = match path.first() {
        Some(seg) => seg.tangent(0.0),
        None => C64::new(-1.0, 0.0),
    };
    let mut record = SolveRecord::empty(initial.t, direction);
    if path.is_empty() {
        return Ok(record);
    }
    for (k, pair) in path.windows(2).enumerate() {
        let gap = (pair[0].end_point() - pair[1].start_point()).norm();
        if gap > 1e-9 * (1.0 + pair[0].length()) {
            return Err(PathError::NonContiguousPath { index: k + 1, gap });
        }
    }
    let (y, yp) = system.observe(initial.t, &initial.w);
    record.checkpoints.push(Checkpoint {
        t: initial.t,
        y,
        yp,
        arclength: 0.0,
        segment_index: 0,
        on_detour: false,
        w: initial.w,
    });
    let mut current = initial;
    let mut offset = 0.0;
    for (index, segment) in path.iter().enumerate() {
        let run = integrate_segment(
            system, current, segment, control, offset, index, false, &mut watch,
        )?;
        record.segments.push(*segment);
        record.checkpoints.extend_from_slice(&run.samples);
        offset += segment.length();
        current = run.end;
        match run.outcome {
            SegmentOutcome::Complete => {}
            SegmentOutcome::WatcherAbort(reason) => {
                record.termination = Termination::WatcherAbort(reason);
                return Ok(record);
            }
            SegmentOutcome::StepUnderflow { .. } => {
                record.termination = Termination::StepUnderflow;
                return Ok(record);
            }
            SegmentOutcome::MaxStepsExceeded => {
                record.termination = Termination::MaxStepsExceeded;
                return Ok(record);
            }
        }
    }
    record.termination = Termination::PathComplete;
    Ok(record)
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::E;

    struct Exponential;

    impl System for Exponential {
        fn rhs(&self, _t: C64, w: &[C64; 2]) -> Result<[C64; 2], OdeError> {
            Ok([w[0], C64::new(0.0, 0.0)])
        }
    }

    /// `y = 1/(t − t₀)` as the solution of `y' = −y²`.
    struct Reciprocal;

    impl System for Reciprocal {
        fn rhs(&self, _t: C64, w: &[C64; 2]) -> Result<[C64; 2], OdeError> {
            Ok([-w[0] * w[0], C64::new(0.0, 0.0)])
        }
    }

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn zero() -> C64 {
        c(0.0)
    }

    #[test]
    fn exponential_reaches_e() {
        let run = integrate_segment(
            &Exponential,
            Point::new(zero(), [c(1.0), zero()]),
            &PathSegment::line(zero(), c(1.0)),
            &StepControl::default(),
            0.0,
            0,
            false,
            |_| Watch::Continue,
        )
        .unwrap();
        assert_eq!(run.outcome, SegmentOutcome::Complete);
        assert_eq!(run.end.t, c(1.0));
        assert!((run.end.w[0].re - E).abs() < 1e-11 * E);
        assert!(run.end.w[0].im.abs() < 1e-15);
    }

    #[test]
    fn degenerate_line_rejected() {
        let err = integrate_segment(
            &Exponential,
            Point::new(zero(), [c(1.0), zero()]),
            &PathSegment::line(zero(), zero()),
            &StepControl::default(),
            0.0,
            0,
            false,
            |_| Watch::Continue,
        )
        .unwrap_err();
        assert_eq!(err, PathError::DegenerateSegment);
    }

    #[test]
    fn arc_orientation_must_match_sweep() {
        let seg = PathSegment::arc(zero(), 1.0, 0.0, PI, Orientation::Clockwise);
        assert_eq!(seg.validate(), Err(PathError::OrientationMismatch));
        let seg = PathSegment::arc(zero(), 1.0, 0.0, 7.0, Orientation::CounterClockwise);
        assert_eq!(seg.validate(), Err(PathError::DegenerateSegment));
        let seg = PathSegment::arc(zero(), 0.0, 0.0, 1.0, Orientation::CounterClockwise);
        assert_eq!(seg.validate(), Err(PathError::DegenerateSegment));
    }

    #[test]
    fn arc_geometry() {
        let seg = PathSegment::arc(c(-3.0), 0.1, 0.0, PI, Orientation::CounterClockwise);
        assert!((seg.start_point() - c(-2.9)).norm() < 1e-15);
        assert!((seg.end_point() - c(-3.1)).norm() < 1e-15);
        assert!((seg.point(seg.length() / 2.0) - C64::new(-3.0, 0.1)).norm() < 1e-15);
        assert!((seg.length() - 0.1 * PI).abs() < 1e-15);
        // Heading up at the rightmost point of a counter-clockwise arc.
        assert!((seg.tangent(0.0) - C64::new(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn start_mismatch_rejected() {
        let err = integrate_segment(
            &Exponential,
            Point::new(c(0.5), [c(1.0), zero()]),
            &PathSegment::line(zero(), c(1.0)),
            &StepControl::default(),
            0.0,
            0,
            false,
            |_| Watch::Continue,
        )
        .unwrap_err();
        assert!(matches!(err, PathError::StartMismatch { .. }));
    }

    #[test]
    fn empty_path_is_complete() {
        let rec = integrate_path(
            &Exponential,
            Point::new(zero(), [c(1.0), zero()]),
            &[],
            &StepControl::default(),
            |_| Watch::Continue,
        )
        .unwrap();
        assert!(rec.checkpoints.is_empty());
        assert_eq!(rec.termination, Termination::PathComplete);
    }

    #[test]
    fn split_path_matches_single_segment() {
        let control = StepControl::default();
        let init = Point::new(zero(), [c(1.0), zero()]);
        let single = integrate_path(
            &Exponential,
            init,
            &[PathSegment::line(zero(), C64::new(1.0, 0.5))],
            &control,
            |_| Watch::Continue,
        )
        .unwrap();
        let mid = C64::new(0.3, 0.15);
        let split = integrate_path(
            &Exponential,
            init,
            &[
                PathSegment::line(zero(), mid),
                PathSegment::line(mid, C64::new(1.0, 0.5)),
            ],
            &control,
            |_| Watch::Continue,
        )
        .unwrap();
        let a = single.last().unwrap().y;
        let b = split.last().unwrap().y;
        assert!((a - b).norm() <= 10.0 * control.rel_tol * a.norm());
    }

    #[test]
    fn non_contiguous_path_rejected() {
        let err = integrate_path(
            &Exponential,
            Point::new(zero(), [c(1.0), zero()]),
            &[
                PathSegment::line(zero(), c(1.0)),
                PathSegment::line(c(1.1), c(2.0)),
            ],
            &StepControl::default(),
            |_| Watch::Continue,
        )
        .unwrap_err();
        assert!(matches!(err, PathError::NonContiguousPath { index: 1, .. }));
    }

    #[test]
    fn detour_continues_reciprocal_through_pole() {
        // y = 1/(t − t₀) with t₀ = −1 starting from t = 0; detour above the pole.
        let t0 = c(-1.0);
        let r = 0.1;
        let path = [
            PathSegment::line(zero(), t0 + r),
            PathSegment::arc(t0, r, 0.0, PI, Orientation::CounterClockwise),
            PathSegment::line(t0 - r, c(-2.0)),
        ];
        let rec = integrate_path(
            &Reciprocal,
            Point::new(zero(), [c(1.0), zero()]),
            &path,
            &StepControl::default(),
            |_| Watch::Continue,
        )
        .unwrap();
        assert_eq!(rec.termination, Termination::PathComplete);
        let end = rec.last().unwrap();
        assert!((end.t - c(-2.0)).norm() < 1e-14);
        assert!((end.y - c(-1.0)).norm() < 1e-10);
        let mut prev = -1.0;
        for cp in &rec.checkpoints {
            assert!(cp.arclength > prev);
            prev = cp.arclength;
        }
    }

    #[test]
    fn watcher_abort_stops_early() {
        let run = integrate_segment(
            &Exponential,
            Point::new(zero(), [c(1.0), zero()]),
            &PathSegment::line(zero(), c(5.0)),
            &StepControl::default(),
            0.0,
            0,
            false,
            |cp| {
                if cp.y.re > 10.0 {
                    Watch::Abort(StopReason::Requested)
                } else {
                    Watch::Continue
                }
            },
        )
        .unwrap();
        assert_eq!(
            run.outcome,
            SegmentOutcome::WatcherAbort(StopReason::Requested)
        );
        assert!(run.end.t.re < 5.0 && run.end.w[0].re > 10.0);
    }

    #[test]
    fn step_underflow_reported() {
        // y' = −y² from y(0) = 1 has a pole at t = −1 on the path toward −2.
        let control = StepControl {
            h_min: 1e-6,
            h_init: 1e-3,
            ..StepControl::default()
        };
        let run = integrate_segment(
            &Reciprocal,
            Point::new(zero(), [c(1.0), zero()]),
            &PathSegment::line(zero(), c(-2.0)),
            &control,
            0.0,
            0,
            false,
            |_| Watch::Continue,
        )
        .unwrap();
        assert!(matches!(run.outcome, SegmentOutcome::StepUnderflow { .. }));
    }

    #[test]
    fn wrap_angle_range() {
        assert!((wrap_angle(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-15);
        assert!((wrap_angle(-PI) - PI).abs() < 1e-15);
        assert_eq!(wrap_angle(0.5), 0.5);
    }
}
