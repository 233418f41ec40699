//! Asymptotic behaviour of a trace toward `t → −∞`: an endless pole cascade,
//! stable oscillation about `y = −2t/3`, or tracking of the unstable line
//! `y = −2t`.
//!
//! Samples are scored along the main ray only; detour samples are ignored.
//! The same incremental [`Classifier`] runs online (stopping a trace as soon
//! as the behaviour is settled) and offline over a finished [`SolveRecord`].

use alloc::vec::Vec;
use core::fmt;

use crate::integrator::{Checkpoint, Point, SolveRecord, StopReason, System, Termination};
use crate::pole::{trace_ray, PoleEvent, TraceConfig};
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifierConfig {
    /// Distance from the origin at which the trace stops.
    pub horizon: f64,
    /// Minimum pole-free stretch for an oscillation verdict.
    pub window: f64,
    /// Tube half-width around `−2t`, relative to `max(1, |t|)`.
    pub tube_width: f64,
    /// Tube residence needed before a sample run counts as tracking `−2t`.
    pub track_length: f64,
    /// Poles beyond `cascade_onset` that settle a cascade.
    pub cascade_poles: usize,
    pub cascade_onset: f64,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        Self {
            horizon: 20.0,
            window: 3.0,
            tube_width: 0.5,
            track_length: 1.0,
            cascade_poles: 8,
            cascade_onset: 10.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassificationKind {
    PoleCascade,
    StableOscillation,
    SeparatrixCandidate,
    Undecided,
}

/// Side on which a trace leaves the tube around `−2t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Departure {
    DepartsAbove,
    DepartsBelow,
    StillTracking,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Classification {
    pub kind: ClassificationKind,
    pub decided_at: C64,
    /// Poles met before the decision.
    pub pole_count: usize,
    /// Set when the verdict came from leaving a tracked stretch of the tube.
    pub departure: Option<Departure>,
    /// Ray coordinate where the longest tracking stretch began.
    pub tracking_start: Option<f64>,
}

/// The trace never stayed in the tube around `−2t` long enough to track it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NeverTracked;

impl fmt::Display for NeverTracked {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("trace never tracked y = -2t")
    }
}

fn tube_offset(cp: &Checkpoint) -> f64 {
    (cp.y + 2.0 * cp.t).re
}

fn in_tube(cp: &Checkpoint, tube_width: f64) -> bool {
    (cp.y + 2.0 * cp.t).norm() < tube_width * cp.t.norm().max(1.0)
}

/// Incremental classifier fed with checkpoints in path order.
#[derive(Debug, Clone)]
pub struct Classifier {
    config: ClassifierConfig,
    origin: C64,
    direction: C64,
    poles_seen: usize,
    last_pole_along: f64,
    last_sign: Option<bool>,
    sign_changes: usize,
    window_start: f64,
    run_start: Option<f64>,
    run_end: f64,
    longest_run: Option<(f64, f64)>,
    late_poles: usize,
    last: Option<Checkpoint>,
    decision: Option<Classification>,
}

impl Classifier {
    pub fn new(config: ClassifierConfig, origin: C64, direction: C64) -> Self {
        Self {
            config,
            origin,
            direction: direction / direction.norm(),
            poles_seen: 0,
            last_pole_along: 0.0,
            last_sign: None,
            sign_changes: 0,
            window_start: 0.0,
            run_start: None,
            run_end: 0.0,
            longest_run: None,
            late_poles: 0,
            last: None,
            decision: None,
        }
    }

    fn along(&self, t: C64) -> f64 {
        ((t - self.origin) * self.direction.conj()).re
    }

    pub fn decision(&self) -> Option<Classification> {
        self.decision
    }

    fn decide(
        &mut self,
        kind: ClassificationKind,
        at: C64,
        departure: Option<Departure>,
    ) -> Classification {
        let c = Classification {
            kind,
            decided_at: at,
            pole_count: self.poles_seen,
            departure,
            tracking_start: self.longest_run.map(|r| r.0),
        };
        self.decision = Some(c);
        c
    }

    fn note_poles(&mut self, poles: &[PoleEvent]) {
        while self.poles_seen < poles.len() {
            let pole = poles[self.poles_seen];
            let along = self.along(pole.location);
            self.poles_seen += 1;
            self.last_pole_along = along;
            self.last_sign = None;
            self.sign_changes = 0;
            self.window_start = along;
            if along >= self.config.cascade_onset {
                self.late_poles += 1;
            }
            self.close_run();
        }
    }

    fn close_run(&mut self) {
        if let Some(start) = self.run_start.take() {
            let len = self.run_end - start;
            if len >= self.config.track_length
                && self.longest_run.is_none_or(|(a, b)| len > b - a)
            {
                self.longest_run = Some((start, self.run_end));
            }
        }
    }

    /// Feeds one checkpoint; returns the verdict once it is settled.
    pub fn observe(&mut self, cp: &Checkpoint, poles: &[PoleEvent]) -> Option<Classification> {
        if let Some(d) = self.decision {
            return Some(d);
        }
        self.note_poles(poles);
        if cp.on_detour {
            return None;
        }
        self.last = Some(*cp);
        let s = self.along(cp.t);
        let cfg = self.config;

        if in_tube(cp, cfg.tube_width) {
            if self.run_start.is_none() {
                self.run_start = Some(s);
            }
            self.run_end = s;
        } else if let Some(start) = self.run_start {
            let tracked = self.run_end - start >= cfg.track_length;
            self.close_run();
            if tracked {
                let (kind, side) = if tube_offset(cp) > 0.0 {
                    (ClassificationKind::PoleCascade, Departure::DepartsAbove)
                } else {
                    (
                        ClassificationKind::StableOscillation,
                        Departure::DepartsBelow,
                    )
                };
                return Some(self.decide(kind, cp.t, Some(side)));
            }
        }

        // Sign changes of y + 2t/3 count only while y stays in a band about the stable line.
        let offset = (cp.y + 2.0 * cp.t / 3.0).re;
        if offset.abs() > 2.0 * cp.t.norm().max(1.0) {
            self.window_start = s;
            self.sign_changes = 0;
            self.last_sign = None;
        } else {
            let sign = offset > 0.0;
            if self.last_sign.is_some_and(|prev| prev != sign) {
                self.sign_changes += 1;
            }
            self.last_sign = Some(sign);
        }
        if self.sign_changes >= 3 && s - self.window_start >= cfg.window {
            return Some(self.decide(ClassificationKind::StableOscillation, cp.t, None));
        }
        if self.late_poles >= cfg.cascade_poles {
            return Some(self.decide(ClassificationKind::PoleCascade, cp.t, None));
        }
        None
    }

    /// Verdict once the trace has ended without an online decision.
    pub fn finish(&mut self, poles: &[PoleEvent], horizon_reached: bool) -> Classification {
        if let Some(d) = self.decision {
            return d;
        }
        self.note_poles(poles);
        let at = self.last.map_or(self.origin, |c| c.t);
        let s = self.along(at);
        let tracking_now = self
            .run_start
            .is_some_and(|a| self.run_end - a >= self.config.track_length);
        self.close_run();
        if !horizon_reached {
            return self.decide(ClassificationKind::Undecided, at, None);
        }
        if tracking_now {
            return self.decide(
                ClassificationKind::SeparatrixCandidate,
                at,
                Some(Departure::StillTracking),
            );
        }
        let recent_pole = self.poles_seen > 0 && s - self.last_pole_along < self.config.window;
        if recent_pole {
            return self.decide(ClassificationKind::PoleCascade, at, None);
        }
        self.decide(ClassificationKind::Undecided, at, None)
    }
}

/// Replays a finished record through the classifier.
pub fn classify(record: &SolveRecord, config: &ClassifierConfig) -> Classification {
    let mut classifier = Classifier::new(*config, record.origin, record.direction);
    let mut poles_known = 0;
    for cp in &record.checkpoints {
        while poles_known < record.poles.len()
            && record.ray_coordinate(record.poles[poles_known].location)
                <= record.ray_coordinate(cp.t)
        {
            poles_known += 1;
        }
        if let Some(c) = classifier.observe(cp, &record.poles[..poles_known]) {
            return c;
        }
    }
    let reached = record
        .last()
        .is_some_and(|c| record.ray_coordinate(c.t) >= config.horizon * (1.0 - 1e-12));
    classifier.finish(&record.poles, reached)
}

/// Longest run of consecutive ray samples inside the tube, as `(start, end)`
/// ray coordinates and the index of the sample that ends it.
fn longest_tracking(
    record: &SolveRecord,
    tube_width: f64,
    track_length: f64,
) -> Option<(f64, f64, usize)> {
    let mut best: Option<(f64, f64, usize)> = None;
    let mut start: Option<f64> = None;
    let mut end = 0.0;
    let mut end_idx = 0usize;
    let mut pole_idx = 0usize;
    let flush = |start: &mut Option<f64>,
                 end: f64,
                 end_idx: usize,
                 best: &mut Option<(f64, f64, usize)>| {
        if let Some(a) = start.take() {
            if end - a >= track_length && best.is_none_or(|(b0, b1, _)| end - a > b1 - b0) {
                *best = Some((a, end, end_idx));
            }
        }
    };
    for (i, cp) in record.checkpoints.iter().enumerate() {
        let s = record.ray_coordinate(cp.t);
        while pole_idx < record.poles.len()
            && record.ray_coordinate(record.poles[pole_idx].location) <= s
        {
            pole_idx += 1;
            flush(&mut start, end, end_idx, &mut best);
        }
        if cp.on_detour {
            continue;
        }
        if in_tube(cp, tube_width) {
            if start.is_none() {
                start = Some(s);
            }
            end = s;
            end_idx = i;
        } else {
            flush(&mut start, end, end_idx, &mut best);
        }
    }
    flush(&mut start, end, end_idx, &mut best);
    best
}

/// Side on which the trace first leaves the tube after its longest tracking stretch.
pub fn deviation_sign(
    record: &SolveRecord,
    tube_width: f64,
    track_length: f64,
) -> Result<Departure, NeverTracked> {
    let (_, _, end_idx) = longest_tracking(record, tube_width, track_length).ok_or(NeverTracked)?;
    let exit = record.checkpoints[end_idx + 1..]
        .iter()
        .find(|c| !c.on_detour && !in_tube(c, tube_width));
    Ok(match exit {
        None => Departure::StillTracking,
        Some(cp) if tube_offset(cp) > 0.0 => Departure::DepartsAbove,
        Some(_) => Departure::DepartsBelow,
    })
}

/// Simple poles met before the longest tracking stretch (all poles when the
/// trace never tracked `−2t`).
pub fn count_poles(record: &SolveRecord, tube_width: f64, track_length: f64) -> usize {
    match longest_tracking(record, tube_width, track_length) {
        Some((start, _, _)) => record
            .poles
            .iter()
            .filter(|p| record.ray_coordinate(p.location) < start)
            .count(),
        None => record.poles.len(),
    }
}

/// Poles of residue `+1` before the longest tracking stretch.
///
/// Approached from the origin these are the blow-ups to `+∞`. On the real
/// axis `y` changes sign only at poles, so they pair with residue `−1` poles
/// that bring the solution back to positive values; this counts the pairs.
pub fn count_upward_poles(record: &SolveRecord, tube_width: f64, track_length: f64) -> usize {
    let limit = longest_tracking(record, tube_width, track_length).map_or(f64::INFINITY, |r| r.0);
    record
        .poles
        .iter()
        .filter(|p| record.ray_coordinate(p.location) < limit && p.residue.re > 0.0)
        .count()
}

/// Traces `y(0) = value, y'(0) = slope` toward `−∞` with the classifier
/// running online, stopping as soon as the behaviour is decided.
pub fn shoot(
    value: f64,
    slope: f64,
    trace: &TraceConfig,
    config: &ClassifierConfig,
) -> (SolveRecord, Classification) {
    let system = crate::ode::UPicture;
    let w = match crate::ode::UPicture::initial(value, slope) {
        Ok(w) => w,
        Err(_) => {
            let origin = C64::new(0.0, 0.0);
            let record = SolveRecord::empty(origin, C64::new(-1.0, 0.0));
            let c = Classification {
                kind: ClassificationKind::Undecided,
                decided_at: origin,
                pole_count: 0,
                departure: None,
                tracking_start: None,
            };
            return (record, c);
        }
    };
    shoot_system(&system, Point::new(C64::new(0.0, 0.0), w), trace, config)
}

pub fn shoot_system<S: System>(
    system: &S,
    start: Point,
    trace: &TraceConfig,
    config: &ClassifierConfig,
) -> (SolveRecord, Classification) {
    let direction = C64::new(-1.0, 0.0);
    let mut classifier = Classifier::new(*config, start.t, direction);
    let record = trace_ray(
        system,
        start,
        direction,
        config.horizon,
        trace,
        |cp, poles| classifier.observe(cp, poles).map(|_| StopReason::Decided),
    );
    let reached = record.termination == Termination::PathComplete;
    let c = classifier.finish(&record.poles, reached);
    (record, c)
}

/// Ray samples as `(t, y)` real pairs; convenient for diagnostics.
pub fn real_trace(record: &SolveRecord) -> Vec<(f64, f64)> {
    record.ray_samples().map(|c| (c.t.re, c.y.re)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cp(t: f64, y: f64) -> Checkpoint {
        Checkpoint {
            t: C64::new(t, 0.0),
            y: C64::new(y, 0.0),
            yp: C64::new(0.0, 0.0),
            arclength: -t,
            segment_index: 0,
            on_detour: false,
            w: [C64::new(0.0, 0.0); 2],
        }
    }

    fn record_from(f: impl Fn(f64) -> f64, until: f64) -> SolveRecord {
        let mut rec = SolveRecord::empty(C64::new(0.0, 0.0), C64::new(-1.0, 0.0));
        let mut t = 0.0;
        while t >= -until {
            rec.checkpoints.push(cp(t, f(t)));
            t -= 0.01;
        }
        rec
    }

    #[test]
    fn tracking_then_departing_above_is_cascade() {
        let rec = record_from(
            |t| {
                if t > -4.0 {
                    -2.0 * t
                } else {
                    -2.0 * t + 10.0 * (-4.0 - t)
                }
            },
            6.0,
        );
        let c = classify(&rec, &ClassifierConfig::default());
        assert_eq!(c.kind, ClassificationKind::PoleCascade);
        assert_eq!(c.departure, Some(Departure::DepartsAbove));
        assert_eq!(deviation_sign(&rec, 0.5, 1.0), Ok(Departure::DepartsAbove));
    }

    #[test]
    fn oscillation_about_stable_line() {
        let rec = record_from(|t| -2.0 * t / 3.0 + (5.0 * t).sin(), 8.0);
        let c = classify(&rec, &ClassifierConfig::default());
        assert_eq!(c.kind, ClassificationKind::StableOscillation);
        assert_eq!(c.departure, None);
        assert_eq!(deviation_sign(&rec, 0.5, 1.0), Err(NeverTracked));
    }

    #[test]
    fn tracking_to_horizon_is_candidate() {
        let cfg = ClassifierConfig {
            horizon: 5.0,
            ..ClassifierConfig::default()
        };
        let rec = record_from(|t| -2.0 * t + 0.1, 5.0);
        assert_eq!(
            classify(&rec, &cfg).kind,
            ClassificationKind::SeparatrixCandidate
        );
        assert_eq!(deviation_sign(&rec, 0.5, 1.0), Ok(Departure::StillTracking));
    }

    #[test]
    fn short_record_is_undecided() {
        let rec = record_from(|t| 1.0 + t * t, 2.0);
        assert_eq!(
            classify(&rec, &ClassifierConfig::default()).kind,
            ClassificationKind::Undecided
        );
    }
}
