//! Large-n constants: Richardson extrapolation of eigenvalue sequences, the
//! WKB spectrum of `H = ½p² + g x²(ix)^ε`, and the closed forms
//!
//! ```text
//! B = 2^{3/2} κ^{3/4},   C = −2 κ^{1/2},   κ = √π Γ(5/3) / Γ(7/6).
//! ```

use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use num_traits::Float;

use crate::eigen::EigenvalueRecord;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AsymptoticsError {
    InsufficientLength {
        needed: usize,
        got: usize,
    },
    /// Argument outside the domain of the function.
    Domain,
    /// Order above five refused: input noise exceeds the projected tail term.
    NoiseGuard {
        noise: f64,
        tail: f64,
    },
}

impl fmt::Display for AsymptoticsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AsymptoticsError::InsufficientLength { needed, got } => {
                write!(f, "need at least {needed} terms, got {got}")
            }
            AsymptoticsError::Domain => f.write_str("argument outside the domain"),
            AsymptoticsError::NoiseGuard { noise, tail } => {
                write!(
                    f,
                    "amplified input noise {noise:e} exceeds the tail term {tail:e}"
                )
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtrapolationResult {
    pub limit: f64,
    pub order: usize,
    /// `tableau[k]` holds the order-`k` estimates; `tableau[0]` is the input.
    pub tableau: Vec<Vec<f64>>,
    /// Largest pairwise spread among the last three order-`order` estimates.
    pub stability_estimate: f64,
    /// Set by [`fit_constant`] when the tableau stalls: the limit obtained by
    /// eliminating powers of `n^{-1/2}` instead.
    pub half_power_limit: Option<f64>,
}

impl ExtrapolationResult {
    /// Stability estimate of column `k`.
    pub fn spread(&self, k: usize) -> f64 {
        spread(&self.tableau[k])
    }
}

fn spread(col: &[f64]) -> f64 {
    let tail = &col[col.len().saturating_sub(3)..];
    let mut s: f64 = 0.0;
    for (i, a) in tail.iter().enumerate() {
        for b in &tail[i + 1..] {
            s = s.max((a - b).abs());
        }
    }
    s
}

/// Richardson extrapolation of `s_n`, `n = 1, 2, …`, assuming
/// `s_n = L + a₁/n + a₂/n² + …`.
pub fn richardson(seq: &[f64], order: usize) -> Result<ExtrapolationResult, AsymptoticsError> {
    richardson_in(seq, order, 1.0)
}

/// Richardson extrapolation in the variable `n^{-power}`: order `k` removes
/// the terms `n^{-power}, …, n^{-k·power}`.
pub fn richardson_in(
    seq: &[f64],
    order: usize,
    power: f64,
) -> Result<ExtrapolationResult, AsymptoticsError> {
    if seq.len() < order + 1 {
        return Err(AsymptoticsError::InsufficientLength {
            needed: order + 1,
            got: seq.len(),
        });
    }
    let x: Vec<f64> = (1..=seq.len())
        .map(|n| Float::powf(n as f64, -power))
        .collect();
    let mut tableau = alloc::vec![seq.to_vec()];
    for k in 1..=order {
        let prev = &tableau[k - 1];
        let col: Vec<f64> = (0..prev.len() - 1)
            .map(|i| (x[i] * prev[i + 1] - x[i + k] * prev[i]) / (x[i] - x[i + k]))
            .collect();
        tableau.push(col);
    }
    let last = &tableau[order];
    Ok(ExtrapolationResult {
        limit: *last.last().unwrap(),
        order,
        stability_estimate: spread(last),
        tableau,
        half_power_limit: None,
    })
}

/// Sum of the absolute Richardson weights at `order` on the last terms of a
/// sequence of length `len`: the factor by which input noise is amplified.
pub fn noise_amplification(len: usize, order: usize) -> f64 {
    let n0 = len - order;
    let mut total = 0.0;
    let mut binom = 1.0;
    let mut fact = 1.0;
    for k in 1..=order {
        fact *= k as f64;
    }
    for k in 0..=order {
        if k > 0 {
            binom *= (order - k + 1) as f64 / k as f64;
        }
        total += binom / fact * Float::powi((n0 + k) as f64, order as i32);
    }
    total
}

/// Richardson extrapolation of `value_n / n^exponent` over `eigs` (`n = 1..N`).
///
/// Orders above five are refused when the amplified bracket noise exceeds
/// the last tableau correction. When the tableau stalls (the top order is no
/// more stable than the one below it) the half-power limit is recorded.
pub fn fit_constant(
    eigs: &[EigenvalueRecord],
    exponent: f64,
    order: usize,
) -> Result<ExtrapolationResult, AsymptoticsError> {
    let seq: Vec<f64> = eigs
        .iter()
        .enumerate()
        .map(|(i, r)| r.value / Float::powf((i + 1) as f64, exponent))
        .collect();
    let mut result = richardson(&seq, order)?;
    if order > 5 {
        let noise = eigs
            .iter()
            .enumerate()
            .map(|(i, r)| r.bracket_width / Float::powf((i + 1) as f64, exponent))
            .fold(0.0, f64::max)
            * noise_amplification(seq.len(), order);
        let tail = (result.limit - result.tableau[order - 1].last().unwrap()).abs();
        if noise > tail {
            return Err(AsymptoticsError::NoiseGuard { noise, tail });
        }
    }
    if order >= 2 && result.spread(order) >= result.spread(order - 1) {
        let half = richardson_in(&seq, (2 * order).min(seq.len() - 1), 0.5)?;
        result.half_power_limit = Some(half.limit);
    }
    Ok(result)
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Euler's gamma function for `x > 0` (Lanczos approximation, `g = 7`).
pub fn gamma(x: f64) -> Result<f64, AsymptoticsError> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(AsymptoticsError::Domain);
    }
    if x < 0.5 {
        return Ok(PI / (Float::sin(PI * x) * gamma(1.0 - x)?));
    }
    let z = x - 1.0;
    let mut sum = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        sum += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    Ok(Float::sqrt(2.0 * PI) * Float::powf(t, z + 0.5) * Float::exp(-t) * sum)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WkbParams {
    pub g: f64,
    pub epsilon: f64,
    pub n: u32,
}

impl WkbParams {
    pub fn new(g: f64, epsilon: f64, n: u32) -> Result<Self, AsymptoticsError> {
        let p = Self { g, epsilon, n };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), AsymptoticsError> {
        if self.g > 0.0
            && self.epsilon >= 0.0
            && self.n >= 1
            && self.g.is_finite()
            && self.epsilon.is_finite()
        {
            Ok(())
        } else {
            Err(AsymptoticsError::Domain)
        }
    }
}

/// Leading-order WKB energy of level `n` for `H = ½p² + g x²(ix)^ε`.
pub fn wkb_energy(p: WkbParams) -> Result<f64, AsymptoticsError> {
    p.validate()?;
    let WkbParams { g, epsilon: e, n } = p;
    let q = 1.0 / (e + 2.0);
    let core =
        gamma(1.5 + q)? * Float::sqrt(PI) * n as f64 / (Float::sin(PI * q) * gamma(1.0 + q)?);
    Ok(
        0.5 * Float::powf(2.0 * g, 2.0 / (4.0 + e))
            * Float::powf(core, (2.0 * e + 4.0) / (e + 4.0)),
    )
}

/// `b = 4√(E/2)`.
pub fn slope_from_energy(e: f64) -> Result<f64, AsymptoticsError> {
    if !(e >= 0.0) {
        return Err(AsymptoticsError::Domain);
    }
    Ok(4.0 * Float::sqrt(e / 2.0))
}

/// `κ = √π Γ(5/3) / Γ(7/6)`.
pub fn kappa() -> f64 {
    Float::sqrt(PI) * gamma(5.0 / 3.0).unwrap() / gamma(7.0 / 6.0).unwrap()
}

/// `B = 2^{3/2} κ^{3/4}`, the constant in `b_n ∼ B n^{3/4}`.
pub fn analytic_b() -> f64 {
    Float::powf(2.0, 1.5) * Float::powf(kappa(), 0.75)
}

/// `C = −2 κ^{1/2}`, the constant in `c_n ∼ C n^{1/2}`.
pub fn analytic_c() -> f64 {
    -2.0 * Float::sqrt(kappa())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn richardson_removes_one_term() {
        let s: Vec<f64> = (1..=6).map(|n| 1.0 + 1.0 / n as f64).collect();
        let r = richardson(&s, 1).unwrap();
        assert!((r.limit - 1.0).abs() < 1e-14);
        assert_eq!(r.tableau[0], s);
    }

    #[test]
    fn richardson_constant_sequence() {
        let s = [PI; 7];
        for order in 0..=6 {
            assert!((richardson(&s, order).unwrap().limit - PI).abs() < 1e-13);
        }
    }

    #[test]
    fn richardson_two_terms() {
        let s: Vec<f64> = (1..=8)
            .map(|n| {
                let n = n as f64;
                2.0 + 3.0 / n - 5.0 / (n * n)
            })
            .collect();
        assert!((richardson(&s, 2).unwrap().limit - 2.0).abs() < 1e-12);
    }

    #[test]
    fn richardson_needs_enough_terms() {
        assert_eq!(
            richardson(&[1.0, 2.0], 2).unwrap_err(),
            AsymptoticsError::InsufficientLength { needed: 3, got: 2 }
        );
    }

    #[test]
    fn richardson_matches_closed_form_weights() {
        // s_N = Σ s_{n+k} (n+k)^N (−1)^{k+N} / (k!(N−k)!)
        let s: Vec<f64> = (1..=9)
            .map(|n| Float::sin(n as f64) / n as f64 + 0.3)
            .collect();
        let order = 4;
        let n0 = s.len() - order;
        let mut fact = [1.0f64; 10];
        for i in 1..10 {
            fact[i] = fact[i - 1] * i as f64;
        }
        let mut expect = 0.0;
        for k in 0..=order {
            let n = (n0 + k) as f64;
            let sign = if (k + order) % 2 == 0 { 1.0 } else { -1.0 };
            expect +=
                s[n0 + k - 1] * Float::powi(n, order as i32) * sign / (fact[k] * fact[order - k]);
        }
        assert!((richardson(&s, order).unwrap().limit - expect).abs() < 1e-10);
    }

    #[test]
    fn half_power_variant_removes_root_terms() {
        let s: Vec<f64> = (1..=8)
            .map(|n| {
                let n = n as f64;
                1.5 + 0.7 / Float::sqrt(n) - 0.2 / n
            })
            .collect();
        assert!((richardson_in(&s, 2, 0.5).unwrap().limit - 1.5).abs() < 1e-12);
    }

    /// Γ(x) = ∫₀^∞ t^{x−1} e^{−t} dt by composite Simpson after t = u^k.
    fn gamma_quadrature(x: f64) -> f64 {
        // With t = u^6 the integrand 6 u^{6x−1} e^{−u^6} is smooth for x ≥ 1/6.
        let f = |u: f64| 6.0 * Float::powf(u, 6.0 * x - 1.0) * Float::exp(-Float::powi(u, 6));
        let (a, b, m) = (0.0, 4.0, 200_000);
        let h = (b - a) / m as f64;
        let mut s = f(a) + f(b);
        for i in 1..m {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * f(a + i as f64 * h);
        }
        s * h / 3.0
    }

    #[test]
    fn gamma_values() {
        assert!((gamma(1.0).unwrap() - 1.0).abs() < 1e-14);
        assert!(rel(gamma(0.5).unwrap(), Float::sqrt(PI)) < 1e-14);
        assert!(rel(gamma(5.0).unwrap(), 24.0) < 1e-14);
        assert!(rel(gamma(7.0 / 6.0).unwrap(), gamma_quadrature(7.0 / 6.0)) < 1e-12);
        assert!(rel(gamma(5.0 / 3.0).unwrap(), gamma_quadrature(5.0 / 3.0)) < 1e-12);
        assert!((gamma(7.0 / 6.0).unwrap() - 0.927719).abs() < 1e-6);
        assert_eq!(gamma(0.0), Err(AsymptoticsError::Domain));
        assert_eq!(gamma(-1.5), Err(AsymptoticsError::Domain));
    }

    #[test]
    fn wkb_sextic_closed_form() {
        let k = kappa();
        for n in [1u32, 10, 100] {
            let e = wkb_energy(WkbParams::new(0.125, 4.0, n).unwrap()).unwrap();
            assert!(rel(e, Float::powf(k * n as f64, 1.5)) < 1e-12);
        }
    }

    #[test]
    fn wkb_harmonic_oscillator() {
        // g = ½, ε = 0: H = ½p² + ½x² has E_n ∼ n.
        let e = wkb_energy(WkbParams::new(0.5, 0.0, 3).unwrap()).unwrap();
        assert!(rel(e, 3.0) < 1e-13);
    }

    #[test]
    fn wkb_rejects_bad_params() {
        assert!(WkbParams::new(0.0, 4.0, 1).is_err());
        assert!(WkbParams::new(1.0, -0.5, 1).is_err());
        assert!(WkbParams::new(1.0, 1.0, 0).is_err());
    }

    #[test]
    fn slope_from_energy_values() {
        assert_eq!(slope_from_energy(0.0).unwrap(), 0.0);
        assert!((slope_from_energy(2.0).unwrap() - 4.0).abs() < 1e-15);
        assert!(slope_from_energy(-1.0).is_err());
        let e = wkb_energy(WkbParams::new(0.125, 4.0, 7).unwrap()).unwrap();
        assert!(
            rel(
                slope_from_energy(e).unwrap(),
                analytic_b() * Float::powf(7.0, 0.75)
            ) < 1e-13
        );
    }

    #[test]
    fn analytic_constants() {
        let b = analytic_b();
        let c = analytic_c();
        assert!((b - 4.256843).abs() < 5e-7);
        assert!((c + 2.626587).abs() < 5e-7);
        assert!(c < 0.0);
        let e1 = wkb_energy(WkbParams::new(0.125, 4.0, 1).unwrap()).unwrap();
        assert!(rel(slope_from_energy(e1).unwrap(), b) < 1e-14);
        assert!(rel(Float::powf(b / Float::powf(2.0, 1.5), 4.0 / 3.0), kappa()) < 1e-14);
        assert!(
            rel(
                Float::powi(c / -2.0, 4),
                Float::powf(b / Float::powf(2.0, 1.5), 8.0 / 3.0)
            ) < 1e-13
        );
    }

    #[test]
    fn noise_amplification_matches_weights() {
        // Order 1 on the last two of five terms: weights  5 and 4.
        assert!((noise_amplification(5, 1) - 9.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn gamma_recurrence(x in 0.5f64..10.0) {
            let lhs = gamma(x + 1.0).unwrap();
            let rhs = x * gamma(x).unwrap();
            prop_assert!(rel(lhs, rhs) < 1e-13);
        }

        #[test]
        fn richardson_exact_on_polynomial_tails(
            l in -5.0f64..5.0,
            a in proptest::collection::vec(-3.0f64..3.0, 1..=4),
        ) {
            let m = a.len();
            let amax = a.iter().fold(l.abs(), |acc, c| acc.max(c.abs()));
            for order in m..=m + 1 {
                let s: Vec<f64> = (1..=order + 1).map(|n| {
                    let n = n as f64;
                    l + a.iter().enumerate().map(|(k, c)| c / Float::powi(n, k as i32 + 1)).sum::<f64>()
                }).collect();
                let r = richardson(&s, order).unwrap();
                prop_assert!((r.limit - l).abs() <= 1e3 * f64::EPSILON * amax,
                    "order {} off by {}", order, (r.limit - l).abs());
            }
        }

        #[test]
        fn wkb_monotone(g in 0.01f64..5.0, e in 0.0f64..8.0, n in 1u32..50) {
            let here = wkb_energy(WkbParams { g, epsilon: e, n }).unwrap();
            let next_n = wkb_energy(WkbParams { g, epsilon: e, n: n + 1 }).unwrap();
            let more_g = wkb_energy(WkbParams { g: g * 1.1, epsilon: e, n }).unwrap();
            prop_assert!(next_n > here && more_g > here);
            let doubled = wkb_energy(WkbParams { g, epsilon: e, n: 2 * n }).unwrap();
            prop_assert!(rel(doubled / here, Float::powf(2.0, (2.0 * e + 4.0) / (e + 4.0))) < 1e-12);
        }
    }
}
