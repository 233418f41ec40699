//! Movable-pole handling: detection from the Laurent leading term
//! `y ≈ a/(t − t₀)`, semicircular detours, and the ray driver that splices
//! detours into an integration heading away from the origin.

use alloc::vec::Vec;
use core::fmt;

use crate::integrator::{
    integrate_segment, wrap_angle, Checkpoint, Orientation, PathError, PathSegment, Point,
    SegmentOutcome, SolveRecord, StepControl, StopReason, System, Termination, Watch,
};
use crate::ode::finite;
use crate::C64;

/// Estimated simple pole and the detour taken around it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoleEvent {
    pub location: C64,
    pub residue: C64,
    pub detected_at: C64,
    pub detour_radius: f64,
    /// Spread between successive extrapolation orders of the location estimate.
    pub location_uncertainty: f64,
}

impl PoleEvent {
    /// `min(|a − 1|, |a + 1|)`.
    pub fn residue_deviation(&self) -> f64 {
        (self.residue - 1.0).norm().min((self.residue + 1.0).norm())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PoleError {
    /// `|y'|` is too small for the leading-term estimator.
    DegenerateDerivative,
    /// Another known pole lies within twice the detour radius.
    OverlappingPoles {
        distance: f64,
    },
    /// The entry point is already inside the detour circle.
    EntryInsideDetour {
        distance: f64,
    },
    /// The pole is too far from the ray to be skirted with this radius.
    PoleOffPath {
        offset: f64,
    },
    Path(PathError),
}

impl fmt::Display for PoleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PoleError::DegenerateDerivative => {
                f.write_str("derivative too small to locate the pole")
            }
            PoleError::OverlappingPoles { distance } => {
                write!(
                    f,
                    "another pole lies {distance:e} away; shrink the detour radius"
                )
            }
            PoleError::EntryInsideDetour { distance } => {
                write!(f, "entry point is only {distance:e} from the pole")
            }
            PoleError::PoleOffPath { offset } => write!(f, "pole is {offset:e} off the ray"),
            PoleError::Path(e) => write!(f, "{e}"),
        }
    }
}

impl From<PathError> for PoleError {
    fn from(e: PathError) -> Self {
        PoleError::Path(e)
    }
}

/// Leading-term pole estimate `(t₀, a)` with `a = −y²/y'` and `t₀ = t − a/y`.
///
/// Returns `Ok(None)` while `|y|` is below `threshold`.
pub fn detect_pole(
    t: C64,
    y: C64,
    yp: C64,
    threshold: f64,
) -> Result<Option<(C64, C64)>, PoleError> {
    if y.norm() < threshold {
        return Ok(None);
    }
    // Near a pole |y'| ~ |y|²; anything below |y| means |t − t₀| > 1.
    if yp.norm() < y.norm() {
        return Err(PoleError::DegenerateDerivative);
    }
    let a = -y * y / yp;
    let t0 = t - a / y;
    if !(finite(a) && finite(t0)) {
        return Err(PoleError::DegenerateDerivative);
    }
    Ok(Some((t0, a)))
}

/// Neville extrapolation of `values` sampled at complex `nodes` to zero.
fn extrapolate_to_zero(nodes: &[C64], values: &[C64]) -> C64 {
    let mut p: Vec<C64> = values.to_vec();
    let n = p.len();
    for m in 1..n {
        for i in 0..n - m {
            let (xi, xj) = (nodes[i], nodes[i + m]);
            p[i] = (xj * p[i] - xi * p[i + 1]) / (xj - xi);
        }
    }
    p[0]
}

/// Refines the leading-term estimate using six approach samples with `|y|`
/// falling by factors of `√2` from the detection value, extrapolating location
/// and residue to `1/y → 0`.
///
/// `approach` must end with the detection sample.
pub fn refine_pole(approach: &[Checkpoint], detour_radius: f64) -> Result<PoleEvent, PoleError> {
    let det = approach.last().ok_or(PoleError::DegenerateDerivative)?;
    let (t0_raw, a_raw) =
        detect_pole(det.t, det.y, det.yp, 0.0)?.ok_or(PoleError::DegenerateDerivative)?;
    let mut nodes = Vec::with_capacity(6);
    let mut locs = Vec::with_capacity(6);
    let mut res = Vec::with_capacity(6);
    nodes.push(det.y.inv());
    locs.push(t0_raw);
    res.push(a_raw);
    let mut target = det.y.norm();
    let mut idx = approach.len() - 1;
    for _ in 0..5 {
        target *= core::f64::consts::FRAC_1_SQRT_2;
        let found = approach[..idx].iter().rposition(|c| c.y.norm() <= target);
        let Some(k) = found else { break };
        let cp = &approach[k];
        match detect_pole(cp.t, cp.y, cp.yp, 0.0) {
            Ok(Some((t0, a))) => {
                nodes.push(cp.y.inv());
                locs.push(t0);
                res.push(a);
                idx = k;
            }
            _ => break,
        }
    }
    let (location, residue, spread) = if nodes.len() >= 2 {
        let loc = extrapolate_to_zero(&nodes, &locs);
        let m = nodes.len() - 1;
        let lower = extrapolate_to_zero(&nodes[..m], &locs[..m]);
        (loc, extrapolate_to_zero(&nodes, &res), (loc - lower).norm())
    } else {
        (t0_raw, a_raw, (t0_raw - det.t).norm())
    };
    Ok(PoleEvent {
        location,
        residue,
        detected_at: det.t,
        detour_radius,
        location_uncertainty: spread,
    })
}

/// Segments that skirt `pole` on a semicircle while travelling in `direction`.
///
/// The path runs from `entry_t` (on the ray) to the circle, around half of
/// it, and back onto the ray at distance `r` past the pole's projection.
/// `others` are already known pole locations used for the overlap guard.
pub fn plan_detour(
    pole: &PoleEvent,
    entry_t: C64,
    orientation: Orientation,
    direction: C64,
    others: &[C64],
) -> Result<Vec<PathSegment>, PoleError> {
    let r = pole.detour_radius;
    let t0 = pole.location;
    let d = direction / direction.norm();
    if let Some(distance) = others
        .iter()
        .map(|o| (o - t0).norm())
        .filter(|&dist| dist < 2.0 * r)
        .reduce(f64::min)
    {
        return Err(PoleError::OverlappingPoles { distance });
    }
    let along = ((t0 - entry_t) * d.conj()).re;
    let foot = entry_t + d * along;
    let offset = t0 - foot;
    if offset.norm() >= 0.5 * r {
        return Err(PoleError::PoleOffPath {
            offset: offset.norm(),
        });
    }
    let entry_distance = (t0 - entry_t).norm();
    if along < r * (1.0 - 1e-9) {
        return Err(PoleError::EntryInsideDetour {
            distance: entry_distance,
        });
    }
    let start_angle = wrap_angle((-d).arg());
    let end_angle = start_angle + orientation.sign() * core::f64::consts::PI;
    let arc = PathSegment::arc(t0, r, start_angle, end_angle, orientation);
    let arc_start = arc.start_point();
    let arc_end = arc.end_point();
    let resume = foot + d * r;
    let tiny = 1e-13 * (1.0 + t0.norm());

    let mut path = Vec::with_capacity(3);
    if (arc_start - entry_t).norm() > tiny {
        path.push(PathSegment::line(entry_t, arc_start));
    }
    path.push(arc);
    if (resume - arc_end).norm() > tiny {
        path.push(PathSegment::line(arc_end, resume));
    }
    Ok(path)
}

/// Residue deviation `min(|a−1|, |a+1|)` of every recorded pole.
pub fn residue_check(record: &SolveRecord) -> Vec<(PoleEvent, f64)> {
    record
        .poles
        .iter()
        .map(|p| (*p, p.residue_deviation()))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceConfig {
    pub control: StepControl,
    /// `|y|` at which a pole is declared.
    pub threshold: f64,
    pub orientation: Orientation,
    pub min_radius: f64,
    pub max_radius: f64,
    /// Smallest radius tried when shrinking to separate close poles.
    pub radius_floor: f64,
    pub max_poles: usize,
}

impl Default for TraceConfig {
    fn default() -> Self {
        Self {
            control: StepControl::default(),
            threshold: 1e3,
            orientation: Orientation::CounterClockwise,
            min_radius: 0.05,
            max_radius: 0.2,
            radius_floor: 1e-3,
            max_poles: 400,
        }
    }
}

/// Integrates from `start` along the ray `start.t + s·direction`, `0 ≤ s ≤ length`,
/// detouring around every pole met on the way.
///
/// `monitor` sees each accepted checkpoint together with the poles passed so
/// far and may stop the trace. Checkpoints from the final approach to a pole
/// (inside the detour circle) are dropped from the record once the detour is
/// planned, so the recorded arclength stays strictly increasing.
pub fn trace_ray<S, M>(
    system: &S,
    start: Point,
    direction: C64,
    length: f64,
    config: &TraceConfig,
    mut monitor: M,
) -> SolveRecord
where
    S: System,
    M: FnMut(&Checkpoint, &[PoleEvent]) -> Option<StopReason>,
{
    let d = direction / direction.norm();
    let mut record = SolveRecord::empty(start.t, d);
    let (y, yp) = system.observe(start.t, &start.w);
    record.checkpoints.push(Checkpoint {
        t: start.t,
        y,
        yp,
        arclength: 0.0,
        segment_index: 0,
        on_detour: false,
        w: start.w,
    });
    if !(length > 0.0) {
        record.termination = Termination::PathComplete;
        return record;
    }
    let ray_end = start.t + d * length;
    let mut current = start;
    let mut stretch_start = 0usize;

    loop {
        let along_now = record.ray_coordinate(current.t);
        if along_now >= length * (1.0 - 1e-14) {
            record.termination = Termination::PathComplete;
            return record;
        }
        let segment = PathSegment::line(current.t, ray_end);
        let offset = record.last().map_or(0.0, |c| c.arclength);
        let index = record.segments.len();
        let threshold = config.threshold;
        let poles_so_far = record.poles.clone();
        let run = integrate_segment(
            system,
            current,
            &segment,
            &config.control,
            offset,
            index,
            false,
            |cp| {
                if cp.y.norm() >= threshold {
                    return Watch::Abort(StopReason::PoleDetected);
                }
                match monitor(cp, &poles_so_far) {
                    Some(reason) => Watch::Abort(reason),
                    None => Watch::Continue,
                }
            },
        );
        let run = match run {
            Ok(run) => run,
            Err(_) => {
                record.termination = Termination::DetourFailed;
                return record;
            }
        };
        record.segments.push(segment);
        record.checkpoints.extend_from_slice(&run.samples);
        match run.outcome {
            SegmentOutcome::Complete => {
                record.termination = Termination::PathComplete;
                return record;
            }
            SegmentOutcome::WatcherAbort(StopReason::PoleDetected) => {}
            SegmentOutcome::WatcherAbort(reason) => {
                record.termination = Termination::WatcherAbort(reason);
                return record;
            }
            SegmentOutcome::StepUnderflow { .. } => {
                record.termination = Termination::StepUnderflow;
                return record;
            }
            SegmentOutcome::MaxStepsExceeded => {
                record.termination = Termination::MaxStepsExceeded;
                return record;
            }
        }
        if record.poles.len() >= config.max_poles {
            record.termination = Termination::DetourFailed;
            return record;
        }

        match splice_detour(system, &mut record, stretch_start, config, &mut monitor) {
            Ok(DetourEnd::Resumed(point)) => {
                current = point;
                stretch_start = record.checkpoints.len() - 1;
            }
            Ok(DetourEnd::Stopped(reason)) => {
                record.termination = Termination::WatcherAbort(reason);
                return record;
            }
            Err(termination) => {
                record.termination = termination;
                return record;
            }
        }
    }
}

enum DetourEnd {
    Resumed(Point),
    Stopped(StopReason),
}

fn splice_detour<S, M>(
    system: &S,
    record: &mut SolveRecord,
    stretch_start: usize,
    config: &TraceConfig,
    monitor: &mut M,
) -> Result<DetourEnd, Termination>
where
    S: System,
    M: FnMut(&Checkpoint, &[PoleEvent]) -> Option<StopReason>,
{
    let d = record.direction;
    let approach = &record.checkpoints[stretch_start..];
    let detected = *approach.last().ok_or(Termination::DetourFailed)?;
    let mut pole = refine_pole(approach, 0.0).map_err(|_| Termination::DetourFailed)?;
    let known: Vec<C64> = record.poles.iter().map(|p| p.location).collect();

    let mut radius =
        (2.0 * (detected.t - pole.location).norm()).clamp(config.min_radius, config.max_radius);
    let pole_along = record.ray_coordinate(pole.location);
    let (entry_index, plan) = loop {
        if radius < config.radius_floor {
            return Err(Termination::DetourFailed);
        }
        pole.detour_radius = radius;
        // Last sample of this stretch at least `radius` before the pole.
        let entry = record.checkpoints[stretch_start..]
            .iter()
            .rposition(|c| pole_along - record.ray_coordinate(c.t) >= radius)
            .map(|k| k + stretch_start);
        let Some(entry_index) = entry else {
            radius *= 0.5;
            continue;
        };
        let entry_t = record.checkpoints[entry_index].t;
        match plan_detour(&pole, entry_t, config.orientation, d, &known) {
            Ok(plan) => break (entry_index, plan),
            Err(PoleError::OverlappingPoles { .. }) | Err(PoleError::PoleOffPath { .. }) => {
                radius *= 0.5;
            }
            Err(_) => return Err(Termination::DetourFailed),
        }
    };

    record.checkpoints.truncate(entry_index + 1);
    record.poles.push(pole);
    let entry = record.checkpoints[entry_index];
    let mut current = entry.point();
    let mut offset = entry.arclength;
    let guard = config.threshold * 1e3;
    let poles = record.poles.clone();
    for segment in plan {
        let index = record.segments.len();
        let run = integrate_segment(
            system,
            current,
            &segment,
            &config.control,
            offset,
            index,
            true,
            |cp| {
                if cp.y.norm() >= guard {
                    return Watch::Abort(StopReason::PoleDetected);
                }
                match monitor(cp, &poles) {
                    Some(reason) => Watch::Abort(reason),
                    None => Watch::Continue,
                }
            },
        )
        .map_err(|_| Termination::DetourFailed)?;
        record.segments.push(segment);
        record.checkpoints.extend_from_slice(&run.samples);
        offset += segment.length();
        current = run.end;
        match run.outcome {
            SegmentOutcome::Complete => {}
            SegmentOutcome::WatcherAbort(StopReason::PoleDetected) => {
                return Err(Termination::DetourFailed)
            }
            SegmentOutcome::WatcherAbort(reason) => return Ok(DetourEnd::Stopped(reason)),
            SegmentOutcome::StepUnderflow { .. } => return Err(Termination::StepUnderflow),
            SegmentOutcome::MaxStepsExceeded => return Err(Termination::MaxStepsExceeded),
        }
    }
    // The resume point lies on the ray; mark it as such for consumers of ray samples.
    if let Some(last) = record.checkpoints.last_mut() {
        last.on_detour = false;
    }
    Ok(DetourEnd::Resumed(current))
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn event(location: C64, radius: f64) -> PoleEvent {
        PoleEvent {
            location,
            residue: c(1.0),
            detected_at: location,
            detour_radius: radius,
            location_uncertainty: 0.0,
        }
    }

    #[test]
    fn detect_exact_laurent_terms() {
        let t0 = C64::new(-2.3, 0.0);
        let t = t0 + 0.1;
        let (est, a) = detect_pole(t, c(10.0), c(-100.0), 5.0).unwrap().unwrap();
        assert!((a - 1.0).norm() < 1e-14);
        assert!((est - t0).norm() < 1e-14);

        let t = t0 + 0.05;
        let (est, a) = detect_pole(t, c(-20.0), c(400.0), 5.0).unwrap().unwrap();
        assert!((a + 1.0).norm() < 1e-14);
        assert!((est - t0).norm() < 1e-14);
    }

    #[test]
    fn detect_below_threshold_is_none() {
        assert_eq!(detect_pole(c(0.0), c(3.0), c(9.0), 10.0).unwrap(), None);
    }

    #[test]
    fn detect_degenerate_derivative() {
        assert_eq!(
            detect_pole(c(0.0), c(100.0), c(1.0), 10.0),
            Err(PoleError::DegenerateDerivative)
        );
    }

    #[test]
    fn detour_on_real_pole() {
        let plan = plan_detour(
            &event(c(-3.0), 0.1),
            c(-2.9),
            Orientation::CounterClockwise,
            c(-1.0),
            &[],
        )
        .unwrap();
        assert_eq!(plan.len(), 1);
        match plan[0] {
            PathSegment::Arc {
                center,
                radius,
                start_angle,
                end_angle,
                orientation,
            } => {
                assert_eq!(center, c(-3.0));
                assert_eq!(radius, 0.1);
                assert!(start_angle.abs() < 1e-15);
                assert!((end_angle - PI).abs() < 1e-15);
                assert_eq!(orientation, Orientation::CounterClockwise);
            }
            _ => panic!("expected an arc"),
        }
        assert!((plan[0].end_point() - c(-3.1)).norm() < 1e-14);
    }

    #[test]
    fn detour_with_entry_before_circle_and_offset_pole() {
        let t0 = C64::new(-3.0, 0.02);
        let plan = plan_detour(
            &event(t0, 0.1),
            c(-2.5),
            Orientation::CounterClockwise,
            c(-1.0),
            &[],
        )
        .unwrap();
        assert_eq!(plan.len(), 3);
        assert!(plan[0].is_line());
        assert!((plan[0].start_point() - c(-2.5)).norm() < 1e-15);
        match plan[1] {
            PathSegment::Arc { center, .. } => assert_eq!(center, t0),
            _ => panic!("expected an arc"),
        }
        let exit = plan[2].end_point();
        assert!(exit.im.abs() < 1e-15);
        assert!(exit.re < t0.re - 0.1 * (1.0 - 1e-9));
        for pair in plan.windows(2) {
            assert!((pair[0].end_point() - pair[1].start_point()).norm() < 1e-14);
        }
    }

    #[test]
    fn detour_overlap_guard() {
        let err = plan_detour(
            &event(c(-3.0), 0.1),
            c(-2.5),
            Orientation::CounterClockwise,
            c(-1.0),
            &[c(-2.85)],
        )
        .unwrap_err();
        assert!(matches!(err, PoleError::OverlappingPoles { .. }));
    }

    #[test]
    fn detour_entry_inside_circle() {
        let err = plan_detour(
            &event(c(-3.0), 0.1),
            c(-2.95),
            Orientation::CounterClockwise,
            c(-1.0),
            &[],
        )
        .unwrap_err();
        assert!(matches!(err, PoleError::EntryInsideDetour { .. }));
    }

    #[test]
    fn clockwise_detour_goes_below() {
        let plan = plan_detour(
            &event(c(-3.0), 0.1),
            c(-2.9),
            Orientation::Clockwise,
            c(-1.0),
            &[],
        )
        .unwrap();
        let mid = plan[0].point(plan[0].length() / 2.0);
        assert!((mid - C64::new(-3.0, -0.1)).norm() < 1e-14);
    }

    #[test]
    fn neville_recovers_polynomial() {
        let nodes = [
            C64::new(0.1, 0.01),
            C64::new(0.2, 0.02),
            C64::new(0.4, 0.03),
            C64::new(0.8, 0.0),
        ];
        let f = |x: C64| C64::new(2.0, -1.0) + x * 3.0 - x * x * 0.5 + x * x * x;
        let vals: Vec<C64> = nodes.iter().map(|&x| f(x)).collect();
        assert!((extrapolate_to_zero(&nodes, &vals) - C64::new(2.0, -1.0)).norm() < 1e-12);
    }
}
