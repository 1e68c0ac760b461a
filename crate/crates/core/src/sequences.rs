//! Measurement sequences on pure product states: fixed single-copy
//! measurements combined by a Boolean rule, and adaptive sequences that
//! reproduce the joint optimum.

use serde::Serialize;

use crate::bounds::fidelity_lb_point;
use crate::error::{check_open_unit_interval, check_unit_interval, QrocError, Result};

/// How three single-copy verdicts are combined.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ThreeCopyRule {
    /// Decide ρ1 only if all three verdicts say ρ1.
    A,
    /// Majority vote.
    B,
    /// Decide ρ2 only if all three verdicts say ρ2.
    C,
}

impl ThreeCopyRule {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "a" | "A" => Some(ThreeCopyRule::A),
            "b" | "B" => Some(ThreeCopyRule::B),
            "c" | "C" => Some(ThreeCopyRule::C),
            _ => None,
        }
    }
}

/// Errors `(α, β)` of three identical optimal single-copy measurements at
/// weight `p` combined by `rule`.
pub fn nonadaptive_three_copy(f1: f64, p: f64, rule: ThreeCopyRule) -> Result<(f64, f64)> {
    check_unit_interval("fidelity", f1)?;
    check_open_unit_interval("p", p)?;
    let (a, b) = single_step(f1, p)?;
    let all = |e: f64| e.powi(3);
    let any = |e: f64| 1.0 - (1.0 - e).powi(3);
    let majority = |e: f64| 3.0 * e * e - 2.0 * e.powi(3);
    Ok(match rule {
        ThreeCopyRule::A => (any(a), all(b)),
        ThreeCopyRule::B => (majority(a), majority(b)),
        ThreeCopyRule::C => (all(a), any(b)),
    })
}

/// Branch weights for each step of an adaptive sequence. Step `i` uses
/// `minus[i]` or `plus[i]` depending on the previous verdict.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SequencePlan {
    pub p0: f64,
    pub fidelities: Vec<f64>,
    pub minus: Vec<f64>,
    pub plus: Vec<f64>,
}

/// `p_i∓ = (1 ∓ √(1 - 4 p0 (1-p0) Π_{j<i} F_j²))/2` for `i = 1..len`.
pub fn adaptive_parameters(p0: f64, fidelities: &[f64]) -> Result<SequencePlan> {
    check_open_unit_interval("p0", p0)?;
    for &f in fidelities {
        check_unit_interval("fidelity", f)?;
    }
    let mut minus = Vec::with_capacity(fidelities.len());
    let mut plus = Vec::with_capacity(fidelities.len());
    let mut prod = 1.0;
    for &f in fidelities {
        prod *= f * f;
        let root = (1.0 - 4.0 * p0 * (1.0 - p0) * prod).max(0.0).sqrt();
        let lo = 0.5 * (1.0 - root);
        minus.push(lo);
        plus.push(1.0 - lo);
    }
    Ok(SequencePlan {
        p0,
        fidelities: fidelities.to_vec(),
        minus,
        plus,
    })
}

/// Optimal single-copy errors at weight `p`, extended to the closed
/// interval and to the degenerate `F = 1, p = 1/2` point, where every
/// deterministic decision is optimal.
pub(crate) fn single_step(f: f64, p: f64) -> Result<(f64, f64)> {
    if p <= 0.0 {
        return Ok((1.0, 0.0));
    }
    if p >= 1.0 {
        return Ok((0.0, 1.0));
    }
    if 1.0 - 4.0 * p * (1.0 - p) * f * f < 1e-14 {
        return Ok(if p <= 0.5 { (1.0, 0.0) } else { (0.0, 1.0) });
    }
    fidelity_lb_point(f, p)
}

fn adaptive_from(p: f64, fidelities: &[f64]) -> Result<(f64, f64)> {
    let (f, rest) = match fidelities.split_first() {
        Some(x) => x,
        None => return Ok(if p <= 0.5 { (1.0, 0.0) } else { (0.0, 1.0) }),
    };
    let (a0, b0) = single_step(*f, p)?;
    if rest.is_empty() {
        return Ok((a0, b0));
    }
    let root = (1.0 - 4.0 * p * (1.0 - p) * f * f).max(0.0).sqrt();
    let (minus, plus) = (0.5 * (1.0 - root), 0.5 * (1.0 + root));
    let (a1, b1) = adaptive_from(plus, rest)?;
    let (a2, b2) = adaptive_from(minus, rest)?;
    Ok(((1.0 - a0) * a1 + a0 * a2, b0 * b1 + (1.0 - b0) * b2))
}

/// Errors of the adaptive sequence over subsystems with the given
/// single-copy fidelities: the optimal measurement at `p0` on the first
/// subsystem, then on each later one the plus-branch weight after a ρ1
/// verdict and the minus-branch weight after a ρ2 verdict. Only the last
/// verdict decides.
pub fn adaptive_errors(p0: f64, fidelities: &[f64]) -> Result<(f64, f64)> {
    check_open_unit_interval("p0", p0)?;
    if fidelities.is_empty() {
        return Err(QrocError::Malformed("empty fidelity list".into()));
    }
    for &f in fidelities {
        check_unit_interval("fidelity", f)?;
    }
    adaptive_from(p0, fidelities)
}

/// Two-step special case of [`adaptive_errors`].
pub fn adaptive_sequence_errors(p0: f64, f1: f64, f2: f64) -> Result<(f64, f64)> {
    adaptive_errors(p0, &[f1, f2])
}

/// `|errors - optimum for the product fidelity|`, the largest of the two.
pub fn adaptive_identity_residual(p0: f64, fidelities: &[f64]) -> Result<f64> {
    let (a, b) = adaptive_errors(p0, fidelities)?;
    let prod: f64 = fidelities.iter().product();
    let (ea, eb) = single_step(prod, p0)?;
    Ok((a - ea).abs().max((b - eb).abs()))
}
