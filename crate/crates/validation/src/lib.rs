//! Acceptance criteria for the solver, each evaluated against published or
//! independently computed values.
//!
//! [`Context::compute`] runs the expensive solves once; every `criterion_*`
//! function then returns a [`Verdict`].

use painleve::pipeline;
use painleve_core::asymptotics::{
    analytic_b, analytic_c, fit_constant, gamma, richardson, wkb_energy, WkbParams,
};
use painleve_core::{
    audit_ray, integrate_segment, shoot, EigenvalueKind, EigenvalueRecord, PathSegment, Point,
    SolveRecord, SolverConfig, StepControl, UPicture, Watch, C64,
};

pub const SLOPES: [(usize, f64, f64); 7] = [
    (1, 3.15837325, 1e-6),
    (2, 6.18498704, 1e-6),
    (3, 8.79172082, 1e-6),
    (4, 11.1720921, 1e-6),
    (5, 13.3990049, 1e-6),
    (11, 24.9911479, 1e-5),
    (12, 26.7370929, 1e-5),
];

pub const VALUES: [(usize, f64, f64); 6] = [
    (1, -1.98740393, 1e-6),
    (2, -3.23535569, 1e-6),
    (3, -4.1616081, 1e-6),
    (4, -4.91908695, 1e-6),
    (11, -8.51211189, 1e-5),
    (12, -8.90805963, 1e-5),
];

pub const B_IV: f64 = 4.256843;
pub const C_IV: f64 = -2.626587;

/// `[√π Γ(5/3) n / Γ(7/6)]^{3/2}` at n = 1, 10, 100, to 30 digits.
pub const SEXTIC_LEVELS: [(u32, f64); 3] = [
    (1, 2.265089372402299683),
    (10, 71.62841520632607056),
    (100, 2265.089372402299683),
];

/// Eigenvalue tolerance for every acceptance solve.
pub const TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub criterion: u32,
    pub pass: bool,
    pub detail: String,
}

impl Verdict {
    fn new(criterion: u32, pass: bool, detail: String) -> Self {
        Self {
            criterion,
            pass,
            detail,
        }
    }

    pub fn line(&self) -> String {
        format!(
            "criterion {:>2} {} {}",
            self.criterion,
            if self.pass { "PASS" } else { "FAIL" },
            self.detail
        )
    }
}

/// Solves shared by several criteria.
pub struct Context {
    pub config: SolverConfig,
    pub slopes: Vec<EigenvalueRecord>,
    pub values: Vec<EigenvalueRecord>,
    pub toy: Vec<EigenvalueRecord>,
    pub cascade: SolveRecord,
}

fn solve(
    kind: EigenvalueKind,
    n: usize,
    config: &SolverConfig,
    workers: usize,
) -> Vec<EigenvalueRecord> {
    let results = pipeline::solve_family(&pipeline::pool(workers), &kind, n, TOL, config);
    pipeline::all_ok(&results).unwrap_or_else(|e| panic!("{kind:?}: {e}"))
}

impl Context {
    pub fn compute(workers: usize) -> Self {
        let config = SolverConfig::default();
        let slopes = solve(EigenvalueKind::slope(1.0), 12, &config, workers);
        let values = solve(EigenvalueKind::value(0.0), 15, &config, workers);
        let toy = solve(EigenvalueKind::toy(), 10, &config, workers);
        let (cascade, _) = shoot(1.0, 5.18498704, &config.trace, &config.classifier);
        Self {
            config,
            slopes,
            values,
            toy,
            cascade,
        }
    }
}

fn compare(
    criterion: u32,
    name: &str,
    records: &[EigenvalueRecord],
    expected: &[(usize, f64, f64)],
) -> Verdict {
    let mut fails = Vec::new();
    let mut worst: f64 = 0.0;
    for &(n, v, tol) in expected {
        let d = (records[n - 1].value - v).abs();
        worst = worst.max(d / tol);
        if d > tol {
            fails.push(format!(
                "{name}{n} = {:.10} off by {d:.2e} > {tol:.0e}",
                records[n - 1].value
            ));
        }
    }
    let detail = if fails.is_empty() {
        format!("{} values, worst |diff|/tol = {worst:.3}", expected.len())
    } else {
        fails.join("; ")
    };
    Verdict::new(criterion, fails.is_empty(), detail)
}

pub fn criterion_1(ctx: &Context) -> Verdict {
    compare(1, "b", &ctx.slopes, &SLOPES)
}

pub fn criterion_2(ctx: &Context) -> Verdict {
    compare(2, "c", &ctx.values, &VALUES)
}

pub fn criterion_3(ctx: &Context) -> Verdict {
    let b = fit_constant(&ctx.slopes[..12], 0.75, 5);
    let c = fit_constant(&ctx.values[..15], 0.5, 4);
    match (b, c) {
        (Ok(b), Ok(c)) => {
            let (db, dc) = ((b.limit - B_IV).abs(), (c.limit - C_IV).abs());
            let half = b
                .half_power_limit
                .map_or(String::new(), |h| format!(", half-power {h:.7}"));
            let detail = format!(
                "B = {:.7} (|diff| {db:.2e}, spread {:.1e}{half}), C = {:.7} (|diff| {dc:.2e}), tol 1e-4",
                b.limit, b.stability_estimate, c.limit
            );
            Verdict::new(3, db <= 1e-4 && dc <= 1e-4, detail)
        }
        (b, c) => Verdict::new(3, false, format!("extrapolation failed: {b:?} {c:?}")),
    }
}

pub fn criterion_4() -> Verdict {
    let (b, c) = (analytic_b(), analytic_c());
    let (db, dc) = ((b - B_IV).abs(), (c - C_IV).abs());
    Verdict::new(
        4,
        db <= 5e-7 && dc <= 5e-7,
        format!("B = {b:.9} (|diff| {db:.1e}), C = {c:.9} (|diff| {dc:.1e})"),
    )
}

pub fn criterion_5() -> Verdict {
    let mut worst: f64 = 0.0;
    for (n, e) in SEXTIC_LEVELS {
        let got = wkb_energy(WkbParams {
            g: 0.125,
            epsilon: 4.0,
            n,
        })
        .unwrap_or(f64::NAN);
        worst = worst.max(((got - e) / e).abs());
    }
    Verdict::new(
        5,
        worst <= 1e-12,
        format!("worst relative error {worst:.2e} over n = 1, 10, 100"),
    )
}

pub fn criterion_6(ctx: &Context) -> Verdict {
    let mut fails = Vec::new();
    for (name, records) in [("b", &ctx.slopes), ("c", &ctx.values)] {
        for r in records.iter().take(12) {
            if r.pole_count != r.n / 2 {
                fails.push(format!(
                    "{name}{} has {} (raw {})",
                    r.n, r.pole_count, r.diagnostics.raw_pole_count
                ));
            }
        }
    }
    let detail = if fails.is_empty() {
        "pole count = floor(n/2) for n = 1..12 in both families".to_string()
    } else {
        format!("expected floor(n/2): {}", fails.join(", "))
    };
    Verdict::new(6, fails.is_empty(), detail)
}

pub fn criterion_7(ctx: &Context) -> Verdict {
    let cfg = &ctx.config;
    let mut worst: f64 = 0.0;
    let mut count = 0usize;
    let mut visit = |record: &SolveRecord| {
        for p in &record.poles {
            worst = worst.max(p.residue_deviation());
            count += 1;
        }
    };
    visit(&ctx.cascade);
    for r in ctx.slopes.iter().chain(&ctx.values) {
        let (y0, yp0) = r.kind.initial_data(r.value);
        visit(&shoot(y0, yp0, &cfg.trace, &cfg.classifier).0);
    }
    Verdict::new(
        7,
        count > 0 && worst < 1e-3,
        format!("{count} poles, worst min(|a-1|,|a+1|) = {worst:.2e}"),
    )
}

pub fn criterion_8(ctx: &Context) -> Verdict {
    let target = 2f64.powf(5.0 / 6.0);
    match pipeline::toy_limit(&ctx.toy, 4) {
        Ok(r) => {
            let rel = ((r.limit - target) / target).abs();
            Verdict::new(
                8,
                rel <= 0.01,
                format!(
                    "limit {:.6} vs 2^(5/6) = {target:.6}, relative {rel:.2e}",
                    r.limit
                ),
            )
        }
        Err(e) => Verdict::new(8, false, format!("extrapolation failed: {e}")),
    }
}

fn energy_ratios(records: &[EigenvalueRecord], power: i32) -> Vec<f64> {
    records[3..12]
        .iter()
        .map(|r| {
            let e = wkb_energy(WkbParams {
                g: 0.125,
                epsilon: 4.0,
                n: r.n as u32,
            })
            .unwrap_or(f64::NAN);
            r.value.abs().powi(power) / 8.0 / e
        })
        .collect()
}

fn drifts_to_one(r: &[f64]) -> bool {
    let last = r[r.len() - 1];
    (0.9..=1.1).contains(&last)
        && r.windows(2)
            .all(|w| (w[1] - 1.0).abs() < (w[0] - 1.0).abs())
}

pub fn criterion_9(ctx: &Context) -> Verdict {
    let b = energy_ratios(&ctx.slopes, 2);
    let c = energy_ratios(&ctx.values, 3);
    let ok = drifts_to_one(&b) && drifts_to_one(&c);
    Verdict::new(
        9,
        ok,
        format!(
            "b: {:.4} -> {:.4}, c: {:.4} -> {:.4} over n = 4..12",
            b[0], b[8], c[0], c[8]
        ),
    )
}

pub fn criterion_10(ctx: &Context) -> Verdict {
    let ns = [2usize, 4, 8, 12];
    let mut ratios = Vec::new();
    let mut actions = Vec::new();
    for n in ns {
        match audit_ray(
            &ctx.slopes[n - 1],
            pipeline::DEFAULT_AUDIT_ANGLE,
            1.0,
            &ctx.config.trace,
        ) {
            Ok(a) => {
                ratios.push(a.last_ratio());
                actions.push(a.samples.last().map_or(f64::NAN, |s| s.i.norm()));
            }
            Err(e) => return Verdict::new(10, false, format!("audit n = {n} failed: {e}")),
        }
    }
    let ok = pipeline::strictly_decreasing(&ratios);
    let fmt = |xs: &[f64]| {
        xs.iter()
            .map(|x| format!("{x:.4}"))
            .collect::<Vec<_>>()
            .join(", ")
    };
    Verdict::new(
        10,
        ok,
        format!(
            "|I|/|H0| at |x| = 1 for n = 2, 4, 8, 12: [{}]; |I|: [{}]",
            fmt(&ratios),
            fmt(&actions)
        ),
    )
}

/// Final state and the sum over accepted steps of `abs_tol + rel_tol·|w|`,
/// the a-priori bound on the global error.
fn end_state(y0: f64, b: f64, end: C64, control: &StepControl) -> Option<([C64; 2], f64)> {
    let start = Point::new(C64::new(0.0, 0.0), UPicture::initial(y0, b).ok()?);
    let seg = PathSegment::line(start.t, end);
    let run = integrate_segment(&UPicture, start, &seg, control, 0.0, 0, false, |_| {
        Watch::Continue
    })
    .ok()?;
    let bound = run
        .samples
        .iter()
        .map(|s| control.abs_tol + control.rel_tol * s.w[0].norm().max(s.w[1].norm()))
        .sum();
    Some((run.end.w, bound))
}

fn dist(a: &[C64; 2], b: &[C64; 2]) -> f64 {
    (a[0] - b[0]).norm().max((a[1] - b[1]).norm())
}

fn tolerance_convergence() -> Result<(), String> {
    let coarse = StepControl::default().with_tolerances(1e-8, 1e-8);
    let half = coarse.with_tolerances(5e-9, 5e-9);
    for y0 in [0.5, 1.0, 1.5] {
        for b in [-1.0, 0.0, 1.0] {
            for im in [-0.4, 0.0, 0.4] {
                let end = C64::new(-0.8, im);
                let ((wc, estimate), (wh, _)) =
                    match (end_state(y0, b, end, &coarse), end_state(y0, b, end, &half)) {
                        (Some(a), Some(b)) => (a, b),
                        _ => return Err(format!("integration failed at y0 = {y0}, b = {b}")),
                    };
                if dist(&wh, &wc) >= estimate {
                    return Err(format!(
                        "halving tolerances moved the state too far at y0 = {y0}, b = {b}"
                    ));
                }
            }
        }
    }
    Ok(())
}

fn reversibility() -> Result<(), String> {
    let control = StepControl::default();
    for y0 in [0.5, 1.0, 1.5] {
        for b in [-1.0, 0.0, 1.0] {
            let start = Point::new(C64::new(0.0, 0.0), UPicture::initial(y0, b).unwrap());
            let seg = PathSegment::line(start.t, C64::new(-0.8, 0.3));
            let fwd = integrate_segment(&UPicture, start, &seg, &control, 0.0, 0, false, |_| {
                Watch::Continue
            })
            .map_err(|e| e.to_string())?;
            let back = integrate_segment(
                &UPicture,
                fwd.end,
                &seg.reversed(),
                &control,
                0.0,
                0,
                false,
                |_| Watch::Continue,
            )
            .map_err(|e| e.to_string())?;
            let scale = fwd
                .samples
                .iter()
                .fold(1.0f64, |m, s| m.max(s.w[0].norm()).max(s.w[1].norm()));
            if dist(&back.end.w, &start.w) > 100.0 * control.rel_tol * scale {
                return Err(format!(
                    "round trip error {:.2e} at y0 = {y0}, b = {b}",
                    dist(&back.end.w, &start.w)
                ));
            }
        }
    }
    Ok(())
}

fn polynomial_elimination() -> Result<(), String> {
    for m in 1..=4usize {
        for order in m..=m + 1 {
            for (l, scale) in [(1.0, 0.5), (-2.5, 3.0), (4.2, -1.25)] {
                let a: Vec<f64> = (1..=m).map(|k| scale * (k as f64 - 0.3)).collect();
                let seq: Vec<f64> = (1..=order + 1)
                    .map(|n| {
                        l + a
                            .iter()
                            .enumerate()
                            .map(|(k, ak)| ak / (n as f64).powi(k as i32 + 1))
                            .sum::<f64>()
                    })
                    .collect();
                let got = richardson(&seq, order).map_err(|e| e.to_string())?.limit;
                let bound = 1e3 * f64::EPSILON * a.iter().fold(l.abs(), |m, x| m.max(x.abs()));
                if (got - l).abs() > bound {
                    return Err(format!(
                        "order {order} on a degree-{m} tail: error {:.2e}",
                        (got - l).abs()
                    ));
                }
            }
        }
    }
    Ok(())
}

fn gamma_recurrence() -> Result<(), String> {
    for k in 0..=380 {
        let x = 0.5 + 0.025 * k as f64;
        let (g1, g0) = match (gamma(x + 1.0), gamma(x)) {
            (Ok(a), Ok(b)) => (a, b),
            _ => return Err(format!("gamma undefined at x = {x}")),
        };
        let rel = ((g1 - x * g0) / g1).abs();
        if rel > 1e-13 {
            return Err(format!("gamma recurrence off by {rel:.2e} at x = {x}"));
        }
    }
    Ok(())
}

pub fn criterion_11() -> Verdict {
    let checks: [(&str, fn() -> Result<(), String>); 4] = [
        ("tolerance convergence", tolerance_convergence),
        ("reversibility", reversibility),
        ("polynomial elimination", polynomial_elimination),
        ("gamma recurrence", gamma_recurrence),
    ];
    let mut fails = Vec::new();
    for (name, check) in checks {
        if let Err(e) = check() {
            fails.push(format!("{name}: {e}"));
        }
    }
    let detail = if fails.is_empty() {
        checks.map(|c| c.0).join(", ")
    } else {
        fails.join("; ")
    };
    Verdict::new(11, fails.is_empty(), detail)
}

pub fn evaluate_all(ctx: &Context) -> Vec<Verdict> {
    vec![
        criterion_1(ctx),
        criterion_2(ctx),
        criterion_3(ctx),
        criterion_4(),
        criterion_5(),
        criterion_6(ctx),
        criterion_7(ctx),
        criterion_8(ctx),
        criterion_9(ctx),
        criterion_10(ctx),
        criterion_11(),
    ]
}
