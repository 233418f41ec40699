use std::sync::OnceLock;

use painleve_core::eigen::is_monotone;
use painleve_core::{
    audit_data, bisect, scan_brackets, solve_sequence, toy_eigenvalues, trace_ray, EigenvalueKind,
    EigenvalueRecord, Point, SolverConfig, TraceConfig, UPicture, C64,
};

const TOL: f64 = 1e-10;

fn family(kind: EigenvalueKind, n: usize) -> Vec<EigenvalueRecord> {
    solve_sequence(&kind, n, TOL, &SolverConfig::default())
        .into_iter()
        .map(|r| r.expect("converged eigenvalue"))
        .collect()
}

fn slopes() -> &'static [EigenvalueRecord] {
    static CELL: OnceLock<Vec<EigenvalueRecord>> = OnceLock::new();
    CELL.get_or_init(|| family(EigenvalueKind::slope(1.0), 12))
}

fn values() -> &'static [EigenvalueRecord] {
    static CELL: OnceLock<Vec<EigenvalueRecord>> = OnceLock::new();
    CELL.get_or_init(|| family(EigenvalueKind::value(0.0), 12))
}

#[test]
fn slopes_agree_with_off_axis_reference() {
    // 8th-order Dormand–Prince shooting on a contour at Im t = 0.5.
    let reference = [(2, 6.18498771898), (4, 11.1720931645)];
    for (n, v) in reference {
        let got = slopes()[n - 1].value;
        assert!((got - v).abs() < 2e-9, "b{n}: {got} vs {v}");
    }
}

#[test]
fn sequences_are_indexed_outward_and_monotone() {
    for (i, r) in slopes().iter().chain(values()).enumerate() {
        assert_eq!(r.n, i % 12 + 1);
        assert!(r.bracket_width <= TOL);
    }
    assert!(is_monotone(slopes()));
    assert!(is_monotone(values()));
    assert!(values().iter().all(|r| r.value < 0.0));
}

#[test]
fn scan_brackets_contain_the_eigenvalues() {
    let kind = EigenvalueKind::slope(1.0);
    let brackets = scan_brackets(&kind, 0.0, 14.0, 0.25, &SolverConfig::default());
    assert_eq!(brackets.len(), 5);
    for ((lo, hi), r) in brackets.iter().zip(slopes()) {
        assert!(*lo < r.value && r.value < *hi);
        assert!((hi - lo - 0.25).abs() < 1e-12);
    }
}

#[test]
fn bisection_halves_the_bracket_each_iteration() {
    let kind = EigenvalueKind::slope(1.0);
    let r = bisect(&kind, (3.0, 3.25), 1e-9, &SolverConfig::default()).unwrap();
    let expected = 0.25 / 2f64.powi(r.diagnostics.iterations as i32);
    assert!((r.bracket_width - expected).abs() <= 1e-15);
    assert!(r.bracket_width <= 1e-9 && 2.0 * r.bracket_width > 1e-9);
}

#[test]
fn tighter_integration_tolerance_moves_eigenvalues_little() {
    let mut tight = SolverConfig::default();
    tight.trace.control = tight.trace.control.with_tolerances(1e-13, 1e-13);
    let kind = EigenvalueKind::slope(1.0);
    let again = solve_sequence(&kind, 6, TOL, &tight);
    for (a, b) in again.iter().zip(slopes()) {
        let a = a.as_ref().unwrap();
        assert!(
            (a.value - b.value).abs() < 1e-8,
            "b{}: {} vs {}",
            b.n,
            a.value,
            b.value
        );
    }
}

#[test]
fn scaled_sequences_increase_toward_their_limits() {
    let b: Vec<f64> = slopes()
        .iter()
        .map(|r| r.value / (r.n as f64).powf(0.75))
        .collect();
    let c: Vec<f64> = values()
        .iter()
        .map(|r| r.value.abs() / (r.n as f64).sqrt())
        .collect();
    for s in [&b, &c] {
        assert!(s.windows(2).all(|w| w[1] > w[0]), "{s:?}");
    }
    assert!(b[11] < 4.256843 && c[11] < 2.626587);
}

#[test]
fn slope_separatrices_pass_through_half_n_upward_pole_pairs() {
    for r in slopes() {
        assert_eq!(r.pole_count, r.n / 2, "b{}", r.n);
        assert_eq!(r.diagnostics.raw_pole_count, 2 * (r.n / 2), "b{}", r.n);
        assert!(r.diagnostics.max_residue_deviation < 1e-6);
    }
}

#[test]
fn value_separatrices_start_negative_and_cross_an_odd_number_of_poles() {
    for r in values() {
        assert_eq!(r.pole_count, (r.n - 1) / 2, "c{}", r.n);
        assert_eq!(
            r.diagnostics.raw_pole_count,
            2 * ((r.n - 1) / 2) + 1,
            "c{}",
            r.n
        );
        assert!(r.diagnostics.max_residue_deviation < 1e-6);
    }
}

#[test]
fn held_value_changes_spectrum_but_not_energy_levels() {
    let one = &slopes()[..8];
    let two = family(EigenvalueKind::slope(2.0), 8);
    let energy = |y0: f64, b: f64| b * b / (8.0 * y0) - y0.powi(3) / 8.0;
    assert!(energy(2.0, two[0].value) < 0.0);
    let dev: Vec<f64> = (0..7)
        .map(|i| (energy(2.0, two[i + 1].value) / energy(1.0, one[i].value) - 1.0).abs())
        .collect();
    assert!(dev[1..].windows(2).all(|w| w[1] < w[0]), "{dev:?}");
    assert!(dev[6] < 0.01);
}

#[test]
fn reflected_data_traces_the_mirror_image() {
    let r = &slopes()[2];
    let cfg = TraceConfig::default();
    let trace = |y0: f64, dir: f64| {
        let start = Point::new(C64::new(0.0, 0.0), UPicture::initial(y0, r.value).unwrap());
        trace_ray(&UPicture, start, C64::new(dir, 0.0), 3.0, &cfg, |_, _| None)
    };
    let left = trace(1.0, -1.0);
    let right = trace(-1.0, 1.0);
    assert_eq!(left.poles.len(), 2);
    assert_eq!(right.poles.len(), 2);
    for (p, q) in left.poles.iter().zip(&right.poles) {
        assert!((p.location + q.location.conj()).norm() < 1e-8);
    }
    let (a, b) = (left.last().unwrap(), right.last().unwrap());
    assert!((a.t + b.t).norm() < 1e-14);
    assert!(
        (a.y + b.y.conj()).norm() < 1e-8 * a.y.norm().max(1.0),
        "{} vs {}",
        a.y,
        b.y
    );
}

#[test]
fn audit_is_mirror_symmetric_between_the_lower_rays() {
    let r = &slopes()[3];
    let cfg = TraceConfig::default();
    let a = audit_data(
        EigenvalueKind::slope(1.0),
        r.value,
        4,
        -std::f64::consts::FRAC_PI_4,
        1.0,
        &cfg,
    )
    .unwrap();
    let b = audit_data(
        EigenvalueKind::slope(-1.0),
        r.value,
        4,
        -3.0 * std::f64::consts::FRAC_PI_4,
        1.0,
        &cfg,
    )
    .unwrap();
    let (sa, sb) = (a.samples.last().unwrap(), b.samples.last().unwrap());
    assert!((sa.x + sb.x.conj()).norm() < 1e-14);
    assert!(
        (sa.i + sb.i.conj()).norm() < 1e-8 * sa.i.norm(),
        "{} vs {}",
        sa.i,
        sb.i
    );
    assert!((sa.h.norm() - sb.h.norm()).abs() < 1e-8 * sa.h.norm());
    assert_eq!(a.h0.norm(), b.h0.norm());
}

#[test]
fn toy_thresholds_match_reference() {
    // Independent RK45 integration with event-located maxima.
    let reference = [
        1.6025729320,
        2.3883581431,
        2.9766824569,
        3.4675415067,
        3.8974839740,
        4.2847241334,
        4.6398920825,
        4.9698300113,
        5.2792481436,
        5.5715524313,
    ];
    let toy = toy_eigenvalues(10, TOL, &SolverConfig::default());
    for (r, v) in toy.iter().zip(reference) {
        let r = r.as_ref().unwrap();
        assert!((r.value - v).abs() < 1e-8, "a{}: {} vs {v}", r.n, r.value);
    }
}
