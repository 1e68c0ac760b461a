//! Closed-form ROC bounds from the fidelity, from `Q_s`, and from the
//! relative entropies.

use rayon::prelude::*;

use crate::curve::{BoundKind, PointKind, RocCurve, RocPoint};
use crate::error::{check_open_unit_interval, check_unit_interval, QrocError, Result};
use crate::optimize::bisect_predicate;
use crate::states::QsEvaluator;

/// Parametric lower bound from the fidelity, as `(α, β)`.
pub fn fidelity_lb_point(fidelity: f64, p: f64) -> Result<(f64, f64)> {
    check_unit_interval("fidelity", fidelity)?;
    check_open_unit_interval("p", p)?;
    let f2 = fidelity * fidelity;
    let disc = 1.0 - 4.0 * p * (1.0 - p) * f2;
    if disc < 1e-14 {
        return Err(QrocError::DegenerateParameter(format!(
            "1 - 4p(1-p)F^2 = {disc:e} at p = {p}, F = {fidelity}"
        )));
    }
    let root = disc.sqrt();
    let alpha = (2.0 * (1.0 - p) * f2 - 1.0 + root) / (2.0 * root);
    let beta = (2.0 * p * f2 - 1.0 + root) / (2.0 * root);
    Ok((alpha.clamp(0.0, 1.0), beta.clamp(0.0, 1.0)))
}

/// Fidelity lower bound with `p` eliminated; zero beyond `β = F²`.
pub fn fidelity_lb_alpha(fidelity: f64, beta: f64) -> f64 {
    let f2 = fidelity * fidelity;
    if beta >= f2 {
        return 0.0;
    }
    let beta = beta.max(0.0);
    let cross = ((1.0 - beta) * beta * (1.0 - f2)).max(0.0).sqrt();
    (beta - 2.0 * beta * f2 + fidelity * (fidelity - 2.0 * cross)).clamp(0.0, 1.0)
}

/// Parametric (unclipped) fidelity upper bound, as `(α, β)`.
pub fn fidelity_ub_point(fidelity: f64, p: f64) -> Result<(f64, f64)> {
    check_unit_interval("fidelity", fidelity)?;
    check_open_unit_interval("p", p)?;
    let r = (p / (1.0 - p)).sqrt();
    Ok((0.5 * fidelity / r, 0.5 * fidelity * r))
}

/// Fidelity upper bound with tangent lines through `(0,1)` and `(1,0)`.
pub fn fidelity_ub_alpha(fidelity: f64, beta: f64) -> f64 {
    let f2 = fidelity * fidelity;
    if f2 <= 0.0 {
        return 0.0;
    }
    let beta = beta.clamp(0.0, 1.0);
    if beta <= 0.5 * f2 {
        1.0 - beta / f2
    } else if beta <= 0.5 {
        f2 / (4.0 * beta)
    } else {
        (1.0 - beta) * f2
    }
}

fn check_caqcb(q_s0: f64, s0: f64) -> Result<()> {
    if !(q_s0 > 0.0 && q_s0 <= 1.0 + 1e-12) {
        return Err(QrocError::ParameterOutOfRange {
            name: "q_s0",
            value: q_s0,
        });
    }
    check_open_unit_interval("s0", s0)
}

/// Constant-`s0` bound at weight `p`, as `(α, β)`. Values above one are
/// returned unclipped.
pub fn caqcb_point(q_s0: f64, s0: f64, p: f64) -> Result<(f64, f64)> {
    check_caqcb(q_s0, s0)?;
    check_open_unit_interval("p", p)?;
    let ratio = (1.0 - p) / p;
    let alpha = ratio.powf(s0) * (1.0 - s0) * q_s0;
    let beta = ratio.powf(s0 - 1.0) * s0 * q_s0;
    Ok((alpha, beta))
}

/// Constant-`s0` bound with tangent lines through `(0,1)` and `(1,0)`.
pub fn caqcb_alpha(q_s0: f64, s0: f64, beta: f64) -> Result<f64> {
    check_caqcb(q_s0, s0)?;
    check_unit_interval("beta", beta)?;
    let q = q_s0.min(1.0);
    let knot = s0 * q.powf(1.0 / s0);
    Ok(if beta <= knot {
        1.0 - beta * q.powf(-1.0 / s0)
    } else if beta <= s0 {
        (1.0 - s0) * q.powf(1.0 / (1.0 - s0)) * (s0 / beta).powf(s0 / (1.0 - s0))
    } else {
        (1.0 - beta) * q.powf(1.0 / (1.0 - s0))
    })
}

/// Optimized bound at curve parameter `s`, as `(α, β)`:
/// `α = e^{-s L'}(1-s)Q_s`, `β = e^{(1-s)L'} s Q_s` with `L = ln Q_s`.
pub fn oaqcb_point<E: QsEvaluator + ?Sized>(qs: &E, s: f64) -> Result<(f64, f64)> {
    check_unit_interval("p", s)?;
    let q = qs.value(s);
    if !(q > 0.0) {
        return Ok((0.0, 0.0));
    }
    let dl = qs.log_derivative(s);
    let alpha = if s == 0.0 { q } else { (-s * dl).exp() * (1.0 - s) * q };
    let beta = if s == 1.0 { q } else { ((1.0 - s) * dl).exp() * s * q };
    Ok((alpha, beta))
}

/// The optimized bound as a function of `β`, returned with the curve
/// parameter that produced it. `β` grows monotonically with the parameter
/// (log-convexity of `Q_s`), so the parameter is found by bisection.
pub fn oaqcb_alpha_at_beta<E: QsEvaluator + ?Sized>(qs: &E, beta: f64) -> Result<(f64, f64)> {
    check_unit_interval("beta", beta)?;
    let (a_end, b_end) = oaqcb_point(qs, 1.0)?;
    if beta >= b_end {
        return Ok((a_end, 1.0));
    }
    if beta <= 0.0 {
        return Ok((oaqcb_point(qs, 0.0)?.0, 0.0));
    }
    let (lo, hi) = bisect_predicate(
        |s| oaqcb_point(qs, s).map(|(_, b)| b < beta).unwrap_or(false),
        0.0,
        1.0,
        1e-14,
    );
    let (a0, b0) = oaqcb_point(qs, lo)?;
    let (a1, b1) = oaqcb_point(qs, hi)?;
    let alpha = if b1 > b0 {
        a0 + (a1 - a0) * (beta - b0) / (b1 - b0)
    } else {
        a1
    };
    Ok((alpha, 0.5 * (lo + hi)))
}

/// Binary entropy in bits with `0 log 0 = 0`.
pub fn binary_entropy(eps: f64) -> Result<f64> {
    check_unit_interval("eps", eps)?;
    let term = |x: f64| if x <= 0.0 { 0.0 } else { -x * x.log2() };
    Ok(term(eps) + term(1.0 - eps))
}

fn qre_bound(s_bits: f64, err: f64) -> f64 {
    if !s_bits.is_finite() || err >= 1.0 {
        return 0.0;
    }
    let err = err.max(0.0);
    let h = binary_entropy(err).unwrap_or(0.0);
    (-(s_bits + h) / (1.0 - err)).exp2()
}

/// `α ≥ 2^{-(S(ρ2‖ρ1) + h(β))/(1-β)}`; zero when the entropy diverges.
pub fn qre_lb_alpha(s21_bits: f64, beta: f64) -> f64 {
    qre_bound(s21_bits, beta)
}

/// `β ≥ 2^{-(S(ρ1‖ρ2) + h(α))/(1-α)}`; zero when the entropy diverges.
pub fn qre_lb_beta(s12_bits: f64, alpha: f64) -> f64 {
    qre_bound(s12_bits, alpha)
}

/// Inputs for drawing one bound.
#[derive(Clone, Copy)]
pub enum BoundSpec<'a> {
    FidelityLower { fidelity: f64 },
    FidelityUpper { fidelity: f64 },
    Caqcb { q_s0: f64, s0: f64 },
    Oaqcb { qs: &'a dyn QsEvaluator },
    QreLowerAlpha { s21_bits: f64 },
    QreLowerBeta { s12_bits: f64 },
}

impl BoundSpec<'_> {
    pub fn kind(&self) -> BoundKind {
        match self {
            BoundSpec::FidelityLower { .. } => BoundKind::FidelityLower,
            BoundSpec::FidelityUpper { .. } => BoundKind::FidelityUpper,
            BoundSpec::Caqcb { .. } => BoundKind::Caqcb,
            BoundSpec::Oaqcb { .. } => BoundKind::Oaqcb,
            BoundSpec::QreLowerAlpha { .. } => BoundKind::QreLowerAlpha,
            BoundSpec::QreLowerBeta { .. } => BoundKind::QreLowerBeta,
        }
    }
}

/// Uniform grid of `n` points on `[0, 1]`.
pub fn uniform_grid(n: usize) -> Vec<f64> {
    let n = n.max(2);
    (0..n).map(|i| i as f64 / (n - 1) as f64).collect()
}

/// Samples a bound on `grid`. The grid is read as `β` values, except for
/// the `β ≥ g(α)` relative-entropy bound, where it is read as `α` values.
pub fn bound_curve(spec: &BoundSpec<'_>, grid: &[f64]) -> Result<RocCurve> {
    for &x in grid {
        check_unit_interval("grid", x)?;
    }
    let kind = PointKind::Bound(spec.kind());
    let mk = |p: Option<f64>, beta: f64, alpha: f64| RocPoint {
        p,
        q: None,
        beta,
        alpha,
        kind,
    };
    let points: Result<Vec<RocPoint>> = grid
        .par_iter()
        .map(|&x| {
            Ok(match *spec {
                BoundSpec::FidelityLower { fidelity } => mk(None, x, fidelity_lb_alpha(fidelity, x)),
                BoundSpec::FidelityUpper { fidelity } => mk(None, x, fidelity_ub_alpha(fidelity, x)),
                BoundSpec::Caqcb { q_s0, s0 } => mk(None, x, caqcb_alpha(q_s0, s0, x)?),
                BoundSpec::Oaqcb { qs } => {
                    let (alpha, s) = oaqcb_alpha_at_beta(qs, x)?;
                    mk(Some(s), x, alpha)
                }
                BoundSpec::QreLowerAlpha { s21_bits } => mk(None, x, qre_lb_alpha(s21_bits, x)),
                BoundSpec::QreLowerBeta { s12_bits } => mk(None, qre_lb_beta(s12_bits, x), x),
            })
        })
        .collect();
    Ok(RocCurve::from_points(points?))
}
