//! Parallel sweeps over independent solves. Work is split by index and
//! collected in index order, so results do not depend on the worker count.

use core::f64::consts::FRAC_PI_4;

use painleve_core::asymptotics::{fit_constant, richardson, AsymptoticsError, ExtrapolationResult};
use painleve_core::audit::{audit_ray, AuditError, AuditRecord};
use painleve_core::eigen::{
    label, outward_brackets, solve_bracket, EigenError, EigenvalueKind, EigenvalueRecord,
    EigenvalueTag, SolverConfig,
};
use rayon::prelude::*;
use rayon::ThreadPool;

pub fn pool(workers: usize) -> ThreadPool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .expect("thread pool")
}

/// First `n_max` eigenvalues of `kind` (Painlevé or toy), nearest to zero first.
pub fn solve_family(
    pool: &ThreadPool,
    kind: &EigenvalueKind,
    n_max: usize,
    tol: f64,
    config: &SolverConfig,
) -> Vec<Result<EigenvalueRecord, EigenError>> {
    if let Err(e) = kind.validate() {
        return vec![Err(e)];
    }
    pool.install(|| {
        let brackets = outward_brackets(kind, n_max, config, |xs| {
            xs.par_iter()
                .map(|&x| label(kind, x, config, n_max))
                .collect()
        });
        let mut out: Vec<_> = brackets
            .par_iter()
            .enumerate()
            .map(|(i, &(b, labels))| {
                if kind.tag == EigenvalueTag::ToyModel && labels != (i as i64 + 1, i as i64 + 2) {
                    return Err(EigenError::DiscriminantAgreement {
                        label: Some(labels.0),
                    });
                }
                solve_bracket(kind, i + 1, b, labels, tol, config, n_max)
            })
            .collect();
        for n in out.len() + 1..=n_max {
            out.push(Err(EigenError::NotBracketed { n }));
        }
        out
    })
}

/// Successful records if every index converged, or the first failure.
pub fn all_ok(
    results: &[Result<EigenvalueRecord, EigenError>],
) -> Result<Vec<EigenvalueRecord>, EigenError> {
    results.iter().copied().collect()
}

/// Richardson limit of `value_n / n^exponent`.
pub fn extrapolate(
    records: &[EigenvalueRecord],
    exponent: f64,
    order: usize,
) -> Result<ExtrapolationResult, AsymptoticsError> {
    fit_constant(records, exponent, order)
}

/// Richardson limit of `a_n / √n` for the toy thresholds.
pub fn toy_limit(
    records: &[EigenvalueRecord],
    order: usize,
) -> Result<ExtrapolationResult, AsymptoticsError> {
    let seq: Vec<f64> = records
        .iter()
        .map(|r| r.value / (r.n as f64).sqrt())
        .collect();
    richardson(&seq, order)
}

/// Audits of the listed eigenvalues on one ray, up to `|t| = x_max`.
pub fn audits(
    pool: &ThreadPool,
    records: &[EigenvalueRecord],
    ns: &[usize],
    angle: f64,
    x_max: f64,
    config: &SolverConfig,
) -> Vec<Result<AuditRecord, AuditError>> {
    pool.install(|| {
        ns.par_iter()
            .map(|&n| match records.iter().find(|r| r.n == n) {
                Some(r) => audit_ray(r, angle, x_max, &config.trace),
                None => Err(AuditError::InvalidKind),
            })
            .collect()
    })
}

pub const DEFAULT_AUDIT_ANGLE: f64 = -FRAC_PI_4;

/// True when `xs` is strictly decreasing.
pub fn strictly_decreasing(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[1] < w[0])
}
