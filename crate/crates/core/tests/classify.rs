use painleve_core::{
    deviation_sign, shoot, ClassificationKind, ClassifierConfig, Departure, SolverConfig,
    TraceConfig,
};

const SLOPES: [f64; 7] = [
    3.1583732528,
    6.1849877191,
    8.7917212050,
    11.1720931646,
    13.3990057292,
    15.5116810018,
    17.5343498519,
];

fn kind_at(b: f64) -> ClassificationKind {
    shoot(
        1.0,
        b,
        &TraceConfig::default(),
        &ClassifierConfig::default(),
    )
    .1
    .kind
}

#[test]
fn documented_examples() {
    assert_eq!(kind_at(5.18498704), ClassificationKind::PoleCascade);
    assert_eq!(kind_at(7.18), ClassificationKind::StableOscillation);
    assert_eq!(kind_at(12.17), ClassificationKind::StableOscillation);
}

#[test]
fn generic_slopes_fall_into_a_stable_bundle() {
    for k in 0..=56 {
        let b = 0.25 * k as f64;
        if SLOPES.iter().any(|s| (s - b).abs() < 0.05) {
            continue;
        }
        let kind = kind_at(b);
        assert!(
            matches!(
                kind,
                ClassificationKind::PoleCascade | ClassificationKind::StableOscillation
            ),
            "b = {b}: {kind:?}"
        );
    }
}

#[test]
fn classification_alternates_across_eigenvalues() {
    let below = kind_at(SLOPES[0] - 1.0);
    assert_eq!(below, ClassificationKind::StableOscillation);
    let mut expected = ClassificationKind::PoleCascade;
    for w in SLOPES.windows(2) {
        for f in [0.2, 0.5, 0.8] {
            let b = w[0] + f * (w[1] - w[0]);
            assert_eq!(kind_at(b), expected, "b = {b}");
        }
        expected = match expected {
            ClassificationKind::PoleCascade => ClassificationKind::StableOscillation,
            _ => ClassificationKind::PoleCascade,
        };
    }
}

#[test]
fn departure_side_flips_at_the_first_eigenvalue() {
    let cfg = SolverConfig::default();
    let side = |b: f64| {
        let (record, _) = shoot(
            1.0,
            b,
            &cfg.trace,
            &ClassifierConfig {
                horizon: 20.0,
                ..cfg.classifier
            },
        );
        deviation_sign(
            &record,
            cfg.classifier.tube_width,
            cfg.classifier.track_length,
        )
    };
    let lo = side(SLOPES[0] - 1e-6).unwrap();
    let hi = side(SLOPES[0] + 1e-6).unwrap();
    assert_ne!(lo, hi);
    assert!(matches!(
        lo,
        Departure::DepartsAbove | Departure::DepartsBelow
    ));
    assert!(matches!(
        hi,
        Departure::DepartsAbove | Departure::DepartsBelow
    ));
}
