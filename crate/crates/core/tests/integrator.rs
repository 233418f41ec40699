use painleve_core::{
    integrate_path, integrate_segment, shoot, ClassifierConfig, PathSegment, Point, SegmentOutcome,
    StepControl, TraceConfig, UPicture, Watch, C64,
};
use proptest::prelude::*;

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Final state, and the coarse a-priori global error bound: the sum over
/// accepted steps of the per-step tolerance `abs_tol + rel_tol·|w|`.
fn end_state(y0: f64, b: f64, end: C64, control: &StepControl) -> ([C64; 2], f64) {
    let start = Point::new(c(0.0), UPicture::initial(y0, b).unwrap());
    let run = integrate_segment(
        &UPicture,
        start,
        &PathSegment::line(c(0.0), end),
        control,
        0.0,
        0,
        false,
        |_| Watch::Continue,
    )
    .unwrap();
    assert_eq!(run.outcome, SegmentOutcome::Complete);
    let bound = run
        .samples
        .iter()
        .map(|s| control.abs_tol + control.rel_tol * s.w[0].norm().max(s.w[1].norm()))
        .sum();
    (run.end.w, bound)
}

fn dist(a: &[C64; 2], b: &[C64; 2]) -> f64 {
    (a[0] - b[0]).norm().max((a[1] - b[1]).norm())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn halving_tolerances_stays_within_coarse_error(y0 in 0.5f64..2.0, b in -1.0f64..1.0, im in -0.5f64..0.5) {
        let end = C64::new(-0.8, im);
        let coarse = StepControl::default().with_tolerances(1e-8, 1e-8);
        let half = coarse.with_tolerances(5e-9, 5e-9);
        let (wc, estimate) = end_state(y0, b, end, &coarse);
        let (wh, _) = end_state(y0, b, end, &half);
        prop_assert!(dist(&wh, &wc) < estimate, "{} vs {}", dist(&wh, &wc), estimate);
    }

    #[test]
    fn forward_then_back_returns(y0 in 0.5f64..2.0, b in -1.0f64..1.0, im in -0.5f64..0.5) {
        let control = StepControl::default();
        let end = C64::new(-0.8, im);
        let start = Point::new(c(0.0), UPicture::initial(y0, b).unwrap());
        let fwd = PathSegment::line(c(0.0), end);
        let out = integrate_segment(&UPicture, start, &fwd, &control, 0.0, 0, false, |_| Watch::Continue).unwrap();
        let back = integrate_segment(&UPicture, out.end, &fwd.reversed(), &control, 0.0, 0, false, |_| Watch::Continue)
            .unwrap();
        let scale = out.samples.iter().fold(1.0f64, |m, s| m.max(s.w[0].norm()).max(s.w[1].norm()));
        prop_assert!(dist(&back.end.w, &start.w) <= 100.0 * control.rel_tol * scale);
    }

    #[test]
    fn checkpoint_arclength_strictly_increases(b in 0.0f64..14.0) {
        let (record, _) = shoot(1.0, b, &TraceConfig::default(), &ClassifierConfig::default());
        prop_assert!(record.checkpoints.len() > 2);
        for w in record.checkpoints.windows(2) {
            prop_assert!(w[1].arclength > w[0].arclength);
        }
    }
}

#[test]
fn concatenated_path_arclength_is_cumulative() {
    let path = [
        PathSegment::line(c(0.0), c(-0.5)),
        PathSegment::line(c(-0.5), C64::new(-0.5, 0.5)),
    ];
    let start = Point::new(c(0.0), UPicture::initial(1.0, 0.3).unwrap());
    let record = integrate_path(&UPicture, start, &path, &StepControl::default(), |_| {
        Watch::Continue
    })
    .unwrap();
    let last = record.last().unwrap();
    assert!((last.arclength - 1.0).abs() < 1e-12);
    assert_eq!(last.segment_index, 1);
    assert!((last.t - C64::new(-0.5, 0.5)).norm() < 1e-14);
}
