//! Many-copy behaviour: power laws, error exponents of the optimized
//! `Q_s` bound, the Hoeffding trade-off and the Stein endpoints.

use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::oaqcb_point;
use crate::error::{check_open_unit_interval, check_unit_interval, QrocError, Result};
use crate::optimize::scan_then_maximize;
use crate::states::QsEvaluator;

/// Largest `s` considered by the Hoeffding search before the boundary
/// limit takes over.
pub const HOEFFDING_S_MAX: f64 = 1.0 - 1e-6;
pub const HOEFFDING_SCAN: usize = 2048;
pub const HOEFFDING_TOL: f64 = 1e-10;

pub fn ncopy_fidelity(f1: f64, n: u32) -> f64 {
    f1.powi(n as i32)
}

pub fn ncopy_qs(q1: f64, n: u32) -> f64 {
    q1.powi(n as i32)
}

/// `Q_s` of `n` copies built from a single-copy evaluator.
#[derive(Clone, Copy, Debug)]
pub struct NCopy<E> {
    pub single: E,
    pub copies: u32,
}

impl<E: QsEvaluator> QsEvaluator for NCopy<E> {
    fn value(&self, s: f64) -> f64 {
        self.single.value(s).powi(self.copies as i32)
    }

    fn derivative(&self, s: f64) -> f64 {
        let n = self.copies as i32;
        n as f64 * self.single.value(s).powi(n - 1) * self.single.derivative(s)
    }

    fn log_derivative(&self, s: f64) -> f64 {
        self.copies as f64 * self.single.log_derivative(s)
    }
}

/// Optimized bound for `n` copies from single-copy data:
/// `α_n = α_1^n / (1-p)^{n-1}`, `β_n = β_1^n / p^{n-1}`.
pub fn oaqcb_ncopy_point<E: QsEvaluator + ?Sized>(qs: &E, p: f64, n: u32) -> Result<(f64, f64)> {
    check_open_unit_interval("p", p)?;
    if n == 0 {
        return Err(QrocError::ParameterOutOfRange { name: "copies", value: 0.0 });
    }
    let (a, b) = oaqcb_point(qs, p)?;
    let k = n as i32;
    Ok((a.powi(k) / (1.0 - p).powi(k - 1), b.powi(k) / p.powi(k - 1)))
}

/// Decay rates (nats per copy) of the optimized bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ExponentPair {
    pub gamma_alpha: f64,
    pub gamma_beta: f64,
}

fn exponents_unchecked<E: QsEvaluator + ?Sized>(qs: &E, p: f64) -> ExponentPair {
    let l = qs.value(p).ln();
    let dl = qs.log_derivative(p);
    ExponentPair {
        gamma_alpha: (p * dl - l).max(0.0),
        gamma_beta: (-(1.0 - p) * dl - l).max(0.0),
    }
}

/// `γ_α = p L' - L`, `γ_β = -(1-p) L' - L` with `L = ln Q_p`.
pub fn error_exponents<E: QsEvaluator + ?Sized>(qs: &E, p: f64) -> Result<ExponentPair> {
    check_unit_interval("p", p)?;
    Ok(exponents_unchecked(qs, p))
}

/// `(S(ρ1‖ρ2), S(ρ2‖ρ1))` in nats from the endpoint derivatives of `Q_s`.
pub fn stein_exponents<E: QsEvaluator + ?Sized>(qs: &E) -> (f64, f64) {
    (-qs.derivative(0.0), qs.derivative(1.0))
}

/// Largest `β` decay rate the family reaches (its `p → 0` end).
pub fn max_beta_rate<E: QsEvaluator + ?Sized>(qs: &E) -> f64 {
    exponents_unchecked(qs, 0.0).gamma_beta
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HoeffdingValue {
    pub value: f64,
    pub argmax: f64,
}

/// `b_max(r) = sup_{0 ≤ s < 1} (-s r - ln Q_s)/(1 - s)` for `r` in
/// `[0, S(ρ1‖ρ2)]`. When the supremum sits at `s → 1` the limit is taken
/// analytically.
pub fn hoeffding_bmax<E: QsEvaluator + ?Sized>(qs: &E, r: f64) -> Result<HoeffdingValue> {
    let max_rate = max_beta_rate(qs);
    if !(r >= 0.0) || r > max_rate * (1.0 + 1e-12) + 1e-15 {
        return Err(QrocError::RateOutOfRange { rate: r, max_rate });
    }
    let objective = |s: f64| (-s * r - qs.value(s).ln()) / (1.0 - s);
    let (s, v) = scan_then_maximize(objective, 0.0, HOEFFDING_S_MAX, HOEFFDING_SCAN, HOEFFDING_TOL);
    let numerator_at_one = -r - qs.value(1.0).ln();
    if numerator_at_one > 1e-14 {
        return Ok(HoeffdingValue {
            value: f64::INFINITY,
            argmax: 1.0,
        });
    }
    if numerator_at_one.abs() <= 1e-14 {
        let limit = r + qs.log_derivative(1.0);
        if limit > v {
            return Ok(HoeffdingValue { value: limit, argmax: 1.0 });
        }
    }
    Ok(HoeffdingValue { value: v, argmax: s })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SaturationRow {
    pub p: f64,
    pub gamma_alpha: f64,
    pub gamma_beta: f64,
    pub b_max: f64,
    pub argmax: f64,
    pub deviation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SaturationReport {
    pub rows: Vec<SaturationRow>,
    pub worst_deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
    /// All exponents vanish (identical states).
    pub trivial: bool,
}

/// Checks that the optimized bound's exponent pair lies on the Hoeffding
/// curve, i.e. `b_max(γ_β(p)) = γ_α(p)` on every grid point.
pub fn check_hoeffding_saturation<E: QsEvaluator + ?Sized>(qs: &E, p_grid: &[f64], tol: f64) -> Result<SaturationReport> {
    for &p in p_grid {
        check_open_unit_interval("p", p)?;
    }
    let max_rate = max_beta_rate(qs);
    let rows: Result<Vec<SaturationRow>> = p_grid
        .par_iter()
        .map(|&p| {
            let e = exponents_unchecked(qs, p);
            let h = hoeffding_bmax(qs, e.gamma_beta.min(max_rate))?;
            Ok(SaturationRow {
                p,
                gamma_alpha: e.gamma_alpha,
                gamma_beta: e.gamma_beta,
                b_max: h.value,
                argmax: h.argmax,
                deviation: (h.value - e.gamma_alpha).abs(),
            })
        })
        .collect();
    let rows = rows?;
    let worst_deviation = rows.iter().map(|r| r.deviation).fold(0.0, f64::max);
    let trivial = rows.iter().all(|r| r.gamma_alpha <= 1e-12 && r.gamma_beta <= 1e-12);
    Ok(SaturationReport {
        worst_deviation,
        tolerance: tol,
        passed: worst_deviation <= tol,
        trivial,
        rows,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LogConvexityReport {
    pub points: usize,
    pub min_second_difference: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// Second divided differences of `ln Q_s` on `s_points` equally spaced
/// interior points of `(0, 1)`.
pub fn logconvexity_check<E: QsEvaluator + ?Sized>(qs: &E, s_points: usize, tol: f64) -> LogConvexityReport {
    let n = s_points.max(3);
    let h = 1.0 / (n + 1) as f64;
    let l: Vec<f64> = (1..=n).map(|i| qs.value(i as f64 * h).ln()).collect();
    let min_second_difference = l
        .windows(3)
        .map(|w| (w[2] - 2.0 * w[1] + w[0]) / (h * h))
        .fold(f64::INFINITY, f64::min);
    LogConvexityReport {
        points: n,
        min_second_difference,
        tolerance: tol,
        passed: min_second_difference >= -tol,
    }
}
