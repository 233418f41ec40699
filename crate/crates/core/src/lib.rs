//! Separatrix eigenvalues of the fourth Painlevé equation
//!
//! ```text
//! y y'' = ½ y'² + 2t² y² + 4t y³ + (3/2) y⁴
//! ```
//!
//! integrated from `t = 0` toward `t → −∞` with semicircular detours around
//! the movable simple poles. For fixed `y(0) = 1` a discrete set of slopes
//! `y'(0) = b_n`, and for fixed `y'(0) = 0` a discrete set of values
//! `y(0) = c_n`, produce unstable solutions approaching `y = −2t`. This crate
//! locates them by shooting and bisection, extrapolates their large-n
//! constants and compares them with the WKB spectrum of the sextic
//! Hamiltonian `½p² + ⅛x⁶`.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the CLI and
//! parallel sweeps live in the `painleve` companion crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod asymptotics;
pub mod audit;
pub mod classify;
pub mod eigen;
pub mod integrator;
pub mod ode;
pub mod pole;

/// Complex scalar used for the independent variable and the solution.
pub type C64 = num_complex::Complex64;

pub use asymptotics::{
    analytic_b, analytic_c, fit_constant, gamma, richardson, slope_from_energy, wkb_energy,
    AsymptoticsError, ExtrapolationResult, WkbParams,
};
pub use audit::{
    action_integral, audit_data, audit_ray, energy_at_origin, AuditError, AuditRecord, AuditSample,
};
pub use classify::{
    classify, count_poles, count_upward_poles, deviation_sign, shoot, Classification,
    ClassificationKind, ClassifierConfig, Departure, NeverTracked,
};
pub use eigen::{
    bisect, scan_brackets, solve_sequence, toy_eigenvalues, EigenError, EigenvalueKind,
    EigenvalueRecord, EigenvalueTag, SolverConfig,
};
pub use integrator::{
    integrate_path, integrate_segment, Checkpoint, Orientation, PathError, PathSegment, Point,
    SegmentOutcome, SegmentRun, SolveRecord, StepControl, StopReason, System, Termination, Watch,
};
pub use ode::{
    p4_rhs, to_u_picture, toy_rhs, u_rhs, OdeError, PainleveState, ToyModel, UPicture, UState,
    YPicture,
};
pub use pole::{
    detect_pole, plan_detour, residue_check, trace_ray, PoleError, PoleEvent, TraceConfig,
};
