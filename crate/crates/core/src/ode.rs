//! Right-hand sides of the equations and the `u = √y` substitution.
//!
//! The fourth Painlevé equation (both free parameters zero) solved for `y''`:
//!
//! ```text
//! y'' = y'²/(2y) + 2t²y + 4ty² + (3/2)y³
//! ```
//!
//! With `u² = y` it becomes the polynomial equation
//! `u'' = t²u + 2tu³ + (3/4)u⁵`, which is regular at the (double) zeros of
//! `y`. Poles of `y` are square-root branch points of `u`.

use core::f64::consts::PI;
use core::fmt;

use num_traits::Float;

use crate::integrator::System;
use crate::C64;

/// Default guard on `|y|` below which the y-form right-hand side refuses to evaluate.
pub const DEFAULT_ZERO_GUARD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OdeError {
    /// `|y|` fell below the zero guard; the `y'²/(2y)` term cannot be evaluated.
    ZeroDenominator { modulus: f64 },
    /// A stage produced a non-finite value.
    NonFinite,
}

impl fmt::Display for OdeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OdeError::ZeroDenominator { modulus } => {
                write!(f, "|y| = {modulus:e} is below the zero guard")
            }
            OdeError::NonFinite => f.write_str("non-finite value in right-hand side"),
        }
    }
}

/// Point on a solution of the fourth Painlevé equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PainleveState {
    pub t: C64,
    pub y: C64,
    pub yp: C64,
}

impl PainleveState {
    pub fn new(t: C64, y: C64, yp: C64) -> Self {
        Self { t, y, yp }
    }

    /// Initial data `y(0) = value`, `y'(0) = slope`.
    pub fn at_origin(value: f64, slope: f64) -> Self {
        Self::new(
            C64::new(0.0, 0.0),
            C64::new(value, 0.0),
            C64::new(slope, 0.0),
        )
    }

    pub fn is_finite(&self) -> bool {
        finite(self.t) && finite(self.y) && finite(self.yp)
    }
}

/// Point in the `u = √y` picture.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UState {
    pub t: C64,
    pub u: C64,
    pub up: C64,
}

impl UState {
    pub fn new(t: C64, u: C64, up: C64) -> Self {
        Self { t, u, up }
    }

    /// Back to the y-picture: `y = u²`, `y' = 2uu'`.
    pub fn to_y(&self) -> PainleveState {
        PainleveState::new(self.t, self.u * self.u, 2.0 * self.u * self.up)
    }
}

pub(crate) fn finite(z: C64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// `(y', y'')` for the fourth Painlevé equation.
pub fn p4_rhs(state: &PainleveState, zero_guard: f64) -> Result<(C64, C64), OdeError> {
    let PainleveState { t, y, yp } = *state;
    let modulus = y.norm();
    if modulus < zero_guard {
        return Err(OdeError::ZeroDenominator { modulus });
    }
    let ypp = yp * yp / (2.0 * y) + 2.0 * t * t * y + 4.0 * t * y * y + 1.5 * y * y * y;
    if !finite(ypp) {
        return Err(OdeError::NonFinite);
    }
    Ok((yp, ypp))
}

/// `(u', u'')` for `u'' = t²u + 2tu³ + (3/4)u⁵`.
pub fn u_rhs(state: &UState) -> (C64, C64) {
    let UState { t, u, up } = *state;
    let u2 = u * u;
    let upp = u * (t * t + u2 * (2.0 * t + 0.75 * u2));
    (up, upp)
}

/// `cos(π t y)`, the right-hand side of the toy threshold problem.
pub fn toy_rhs(t: f64, y: f64) -> f64 {
    Float::cos(PI * t * y)
}

/// Principal square root `u = √y` with `u' = y'/(2u)`.
pub fn to_u_picture(y: C64, yp: C64, zero_guard: f64) -> Result<(C64, C64), OdeError> {
    let modulus = y.norm();
    if modulus < zero_guard {
        return Err(OdeError::ZeroDenominator { modulus });
    }
    let u = y.sqrt();
    Ok((u, yp / (2.0 * u)))
}

/// Square root of `y` on the branch closest to `previous`, so that `u` stays
/// continuous along a path.
pub fn to_u_picture_near(
    y: C64,
    yp: C64,
    previous: C64,
    zero_guard: f64,
) -> Result<(C64, C64), OdeError> {
    let (mut u, _) = to_u_picture(y, yp, zero_guard)?;
    if (u - previous).norm_sqr() > (u + previous).norm_sqr() {
        u = -u;
    }
    Ok((u, yp / (2.0 * u)))
}

/// The y-form system integrated directly; state is `[y, y']`.
#[derive(Debug, Clone, Copy)]
pub struct YPicture {
    pub zero_guard: f64,
}

impl Default for YPicture {
    fn default() -> Self {
        Self {
            zero_guard: DEFAULT_ZERO_GUARD,
        }
    }
}

impl System for YPicture {
    fn rhs(&self, t: C64, w: &[C64; 2]) -> Result<[C64; 2], OdeError> {
        let (dy, dyp) = p4_rhs(&PainleveState::new(t, w[0], w[1]), self.zero_guard)?;
        Ok([dy, dyp])
    }
}

/// The u-form system; state is `[u, u']`, observed as `(u², 2uu')`.
#[derive(Debug, Clone, Copy, Default)]
pub struct UPicture;

impl UPicture {
    /// State vector for initial data `y(0) = value`, `y'(0) = slope` on the principal branch.
    pub fn initial(value: f64, slope: f64) -> Result<[C64; 2], OdeError> {
        let (u, up) = to_u_picture(
            C64::new(value, 0.0),
            C64::new(slope, 0.0),
            DEFAULT_ZERO_GUARD,
        )?;
        Ok([u, up])
    }
}

impl System for UPicture {
    fn rhs(&self, t: C64, w: &[C64; 2]) -> Result<[C64; 2], OdeError> {
        let (du, dup) = u_rhs(&UState::new(t, w[0], w[1]));
        if !finite(dup) {
            return Err(OdeError::NonFinite);
        }
        Ok([du, dup])
    }

    fn observe(&self, _t: C64, w: &[C64; 2]) -> (C64, C64) {
        (w[0] * w[0], 2.0 * w[0] * w[1])
    }
}

/// First-order toy problem `y' = cos(π t y)` embedded in the two-slot state `[y, 0]`.
/// Only the real parts are meaningful.
#[derive(Debug, Clone, Copy, Default)]
pub struct ToyModel;

impl System for ToyModel {
    fn rhs(&self, t: C64, w: &[C64; 2]) -> Result<[C64; 2], OdeError> {
        Ok([C64::new(toy_rhs(t.re, w[0].re), 0.0), C64::new(0.0, 0.0)])
    }

    fn observe(&self, t: C64, w: &[C64; 2]) -> (C64, C64) {
        (w[0], C64::new(toy_rhs(t.re, w[0].re), 0.0))
    }
}
