//! Energy balance in the `u = √y` picture. Multiplying
//! `u'' = t²u + 2tu³ + ¾u⁵` by `u'` and integrating gives
//!
//! ```text
//! H(x) + I(x) = H(0),   H = −½u'² + ⅛u⁶,   I(x) = ∫₀ˣ (t²uu' + 2tu³u') dt.
//! ```
//!
//! When `I` is small next to `H(0)` the flow is close to that of the sextic
//! Hamiltonian. In terms of `y`: `H = −y'²/(8y) + y³/8` and the integrand of
//! `I` is `(t²/2 + ty) y'`.

use alloc::vec::Vec;
use core::fmt;

use num_traits::Float;

use crate::eigen::{EigenvalueKind, EigenvalueRecord, EigenvalueTag};
use crate::integrator::{Checkpoint, Point, SolveRecord, Termination};
use crate::ode::{u_rhs, UPicture, UState};
use crate::pole::{trace_ray, TraceConfig};
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AuditError {
    ZeroDenominator,
    /// The tracked square root jumps between checkpoints `index − 1` and `index`.
    BranchDiscontinuity {
        index: usize,
    },
    /// The re-integration did not reach the end of the ray.
    Integration(Termination),
    InvalidKind,
}

impl fmt::Display for AuditError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AuditError::ZeroDenominator => f.write_str("y(0) = 0"),
            AuditError::BranchDiscontinuity { index } => {
                write!(f, "square root jumps branch at checkpoint {index}")
            }
            AuditError::Integration(t) => write!(f, "integration stopped early: {t:?}"),
            AuditError::InvalidKind => f.write_str("audits need a Painlevé eigenvalue"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuditSample {
    pub x: C64,
    pub h: C64,
    pub i: C64,
    /// `|I(x)| / |H(0)|`.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditRecord {
    pub n: usize,
    pub ray_angle: f64,
    pub samples: Vec<AuditSample>,
    pub h0: C64,
    /// Energy matched to the WKB spectrum: `b²/8` for slopes, `|c|³/8` for values.
    pub energy: f64,
}

impl AuditRecord {
    pub fn last_ratio(&self) -> f64 {
        self.samples.last().map_or(0.0, |s| s.ratio)
    }
}

/// `H(0) = −b²/(8y₀) + y₀³/8` for `y(0) = y₀`, `y'(0) = b`.
pub fn energy_at_origin(y0: f64, b: f64) -> Result<f64, AuditError> {
    if y0 == 0.0 {
        return Err(AuditError::ZeroDenominator);
    }
    Ok(-b * b / (8.0 * y0) + y0 * y0 * y0 / 8.0)
}

/// `H = −½u'² + ⅛u⁶` from `u` and `u'`.
pub fn hamiltonian_u(u: C64, up: C64) -> C64 {
    let u2 = u * u;
    -0.5 * up * up + u2 * u2 * u2 / 8.0
}

/// Integrand of `I` at a point.
fn integrand(t: C64, y: C64, yp: C64) -> C64 {
    (0.5 * t * t + t * y) * yp
}

/// `(y, y', y'')` at a checkpoint of a u-picture record.
fn jet(cp: &Checkpoint) -> (C64, C64, C64) {
    let (u, up) = (cp.w[0], cp.w[1]);
    let (_, upp) = u_rhs(&UState::new(cp.t, u, up));
    (u * u, 2.0 * u * up, 2.0 * (up * up + u * upp))
}

const LOBATTO_NODES: [f64; 5] = [
    0.0,
    0.172_673_164_646_011_43,
    0.5,
    0.827_326_835_353_988_6,
    1.0,
];
const LOBATTO_WEIGHTS: [f64; 5] = [
    0.05,
    0.272_222_222_222_222_2,
    0.355_555_555_555_555_6,
    0.272_222_222_222_222_2,
    0.05,
];

/// `∫` of the integrand over one step, on the quintic Hermite interpolant of
/// `y` along the chord from `a` to `b`, by five-point Gauss–Lobatto.
fn step_integral(a: &Checkpoint, b: &Checkpoint) -> C64 {
    let dt = b.t - a.t;
    let (y0, d0, s0) = jet(a);
    let (y1, d1, s1) = jet(b);
    // Derivatives with respect to τ ∈ [0, 1].
    let (d0, d1) = (d0 * dt, d1 * dt);
    let (s0, s1) = (s0 * dt * dt, s1 * dt * dt);
    let mut total = C64::new(0.0, 0.0);
    for (&tau, &w) in LOBATTO_NODES.iter().zip(&LOBATTO_WEIGHTS) {
        let (y, dy) = hermite5(tau, y0, d0, s0, y1, d1, s1);
        let t = a.t + dt * tau;
        total += integrand(t, y, dy / dt) * w;
    }
    total * dt
}

/// Quintic Hermite interpolant and its derivative on `[0, 1]`.
fn hermite5(x: f64, p0: C64, d0: C64, s0: C64, p1: C64, d1: C64, s1: C64) -> (C64, C64) {
    let x2 = x * x;
    let x3 = x2 * x;
    let x4 = x3 * x;
    let x5 = x4 * x;
    let h = [
        1.0 - 10.0 * x3 + 15.0 * x4 - 6.0 * x5,
        x - 6.0 * x3 + 8.0 * x4 - 3.0 * x5,
        0.5 * x2 - 1.5 * x3 + 1.5 * x4 - 0.5 * x5,
        10.0 * x3 - 15.0 * x4 + 6.0 * x5,
        -4.0 * x3 + 7.0 * x4 - 3.0 * x5,
        0.5 * x3 - x4 + 0.5 * x5,
    ];
    let dh = [
        -30.0 * x2 + 60.0 * x3 - 30.0 * x4,
        1.0 - 18.0 * x2 + 32.0 * x3 - 15.0 * x4,
        x - 4.5 * x2 + 6.0 * x3 - 2.5 * x4,
        30.0 * x2 - 60.0 * x3 + 30.0 * x4,
        -12.0 * x2 + 28.0 * x3 - 15.0 * x4,
        1.5 * x2 - 4.0 * x3 + 2.5 * x4,
    ];
    let v = [p0, d0, s0, p1, d1, s1];
    let mut y = C64::new(0.0, 0.0);
    let mut dy = C64::new(0.0, 0.0);
    for k in 0..6 {
        y += v[k] * h[k];
        dy += v[k] * dh[k];
    }
    (y, dy)
}

fn check_branch(prev: &Checkpoint, next: &Checkpoint, index: usize) -> Result<(), AuditError> {
    let (a, b) = (prev.w[0], next.w[0]);
    if (b - a).norm_sqr() > (b + a).norm_sqr() {
        return Err(AuditError::BranchDiscontinuity { index });
    }
    Ok(())
}

/// Running value of `I` at every checkpoint of a u-picture record.
pub fn action_profile(record: &SolveRecord) -> Result<Vec<C64>, AuditError> {
    let mut out = Vec::with_capacity(record.checkpoints.len());
    let mut acc = C64::new(0.0, 0.0);
    for (k, cp) in record.checkpoints.iter().enumerate() {
        if k > 0 {
            let prev = &record.checkpoints[k - 1];
            check_branch(prev, cp, k)?;
            acc += step_integral(prev, cp);
        }
        out.push(acc);
    }
    Ok(out)
}

/// `I` at the last checkpoint, accumulated along the recorded path.
pub fn action_integral(record: &SolveRecord) -> Result<C64, AuditError> {
    Ok(action_profile(record)?
        .last()
        .copied()
        .unwrap_or(C64::new(0.0, 0.0)))
}

/// Re-integrates an eigen-solution along the ray `arg t = angle` up to
/// `|t| = x_max` and samples `H` and `I` on the ray.
pub fn audit_ray(
    eig: &EigenvalueRecord,
    angle: f64,
    x_max: f64,
    config: &TraceConfig,
) -> Result<AuditRecord, AuditError> {
    audit_data(eig.kind, eig.value, eig.n, angle, x_max, config)
}

/// As [`audit_ray`] for an explicit trial parameter.
pub fn audit_data(
    kind: EigenvalueKind,
    x: f64,
    n: usize,
    angle: f64,
    x_max: f64,
    config: &TraceConfig,
) -> Result<AuditRecord, AuditError> {
    if kind.tag == EigenvalueTag::ToyModel {
        return Err(AuditError::InvalidKind);
    }
    let (y0, b) = kind.initial_data(x);
    let h0 = C64::new(energy_at_origin(y0, b)?, 0.0);
    let energy = match kind.tag {
        EigenvalueTag::InitialSlope => b * b / 8.0,
        _ => Float::abs(y0).powi(3) / 8.0,
    };
    let w = UPicture::initial(y0, b).map_err(|_| AuditError::ZeroDenominator)?;
    let direction = C64::from_polar(1.0, angle);
    let record = trace_ray(
        &UPicture,
        Point::new(C64::new(0.0, 0.0), w),
        direction,
        x_max,
        config,
        |_, _| None,
    );
    if record.termination != Termination::PathComplete {
        return Err(AuditError::Integration(record.termination));
    }
    let profile = action_profile(&record)?;
    let samples = record
        .checkpoints
        .iter()
        .zip(&profile)
        .filter(|(c, _)| !c.on_detour)
        .map(|(c, &i)| AuditSample {
            x: c.t,
            h: hamiltonian_u(c.w[0], c.w[1]),
            i,
            ratio: i.norm() / h0.norm(),
        })
        .collect();
    Ok(AuditRecord {
        n,
        ray_angle: angle,
        samples,
        h0,
        energy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::FRAC_PI_4;

    #[test]
    fn energy_at_origin_examples() {
        let b = 3.0;
        assert!((energy_at_origin(1.0, b).unwrap() - (-b * b / 8.0 + 0.125)).abs() < 1e-15);
        let c = -1.7;
        assert!((energy_at_origin(c, 0.0).unwrap() - c * c * c / 8.0).abs() < 1e-15);
        assert_eq!(energy_at_origin(0.0, 1.0), Err(AuditError::ZeroDenominator));
    }

    #[test]
    fn energy_coefficients_are_half_and_eighth() {
        // u(0) = 1, u'(0) = b/2: H = −½(b/2)² + ⅛.
        let q = energy_at_origin(1.0, 2.0).unwrap() - energy_at_origin(1.0, 0.0).unwrap();
        assert!((q + 0.5).abs() < 1e-15);
        // u'(0) = 0, u(0)⁶ = y₀³: H = ⅛·y₀³.
        assert!((energy_at_origin(2.0, 0.0).unwrap() / 8.0 - 0.125).abs() < 1e-15);
    }

    #[test]
    fn hermite_reproduces_quintics() {
        let p = |x: f64| 1.0 + 2.0 * x - x * x * x + 0.5 * x.powi(5);
        let dp = |x: f64| 2.0 - 3.0 * x * x + 2.5 * x.powi(4);
        let sp = |x: f64| -6.0 * x + 10.0 * x.powi(3);
        let c = |v: f64| C64::new(v, 0.0);
        for x in [0.1, 0.37, 0.8] {
            let (y, dy) = hermite5(
                x,
                c(p(0.0)),
                c(dp(0.0)),
                c(sp(0.0)),
                c(p(1.0)),
                c(dp(1.0)),
                c(sp(1.0)),
            );
            assert!((y.re - p(x)).abs() < 1e-14);
            assert!((dy.re - dp(x)).abs() < 1e-13);
        }
    }

    #[test]
    fn zero_length_audit() {
        let kind = EigenvalueKind::slope(1.0);
        let a = audit_data(
            kind,
            3.15837325,
            1,
            -FRAC_PI_4,
            0.0,
            &TraceConfig::default(),
        )
        .unwrap();
        assert_eq!(a.samples.len(), 1);
        assert_eq!(a.samples[0].ratio, 0.0);
        assert_eq!(a.samples[0].i, C64::new(0.0, 0.0));
    }

    #[test]
    fn balance_holds_along_the_real_axis() {
        // H + I is conserved along a pole-free stretch.
        let kind = EigenvalueKind::slope(1.0);
        let a = audit_data(
            kind,
            1.0,
            1,
            core::f64::consts::PI,
            2.5,
            &TraceConfig::default(),
        )
        .unwrap();
        for s in &a.samples {
            assert!(
                (s.h + s.i - a.h0).norm() < 1e-9 * (1.0 + a.h0.norm()),
                "{:?}",
                s
            );
        }
    }

    #[test]
    fn branch_jump_is_reported() {
        let mut record = SolveRecord::empty(C64::new(0.0, 0.0), C64::new(-1.0, 0.0));
        let mk = |t: f64, u: f64| Checkpoint {
            t: C64::new(t, 0.0),
            y: C64::new(u * u, 0.0),
            yp: C64::new(0.0, 0.0),
            arclength: -t,
            segment_index: 0,
            on_detour: false,
            w: [C64::new(u, 0.0), C64::new(0.0, 0.0)],
        };
        record.checkpoints = alloc::vec![mk(0.0, 1.0), mk(-0.1, 1.01), mk(-0.2, -1.02)];
        assert_eq!(
            action_profile(&record),
            Err(AuditError::BranchDiscontinuity { index: 2 })
        );
    }
}
