//! Exact ROC boundary from the Neyman-Pearson measurement
//! `{(1-p)ρ2 - pρ1}_∓`, with linear segments across kernel points.

use rayon::prelude::*;
use serde::Serialize;

use crate::curve::{PointKind, RocCurve, RocPoint};
use crate::error::{check_unit_interval, QrocError, Result};
use crate::linalg::{default_zero_tol, hermitian_eig, signed_projectors, trace_norm, trace_product, HermitianMatrix};
use crate::optimize::bisect_predicate;
use crate::states::{check_dims, DensityMatrix};

/// Width to which kernel points are bisected.
pub const KERNEL_WIDTH: f64 = 1e-12;
/// Kernel points closer than this are merged.
pub const KERNEL_DEDUP: f64 = 1e-9;
pub const DEFAULT_KERNEL_SCAN: usize = 2048;
pub const DEFAULT_GRID_POINTS: usize = 512;

/// `(1-p)ρ2 - pρ1`.
pub fn weighted_difference(rho1: &DensityMatrix, rho2: &DensityMatrix, p: f64) -> HermitianMatrix {
    rho2.matrix().combine(1.0 - p, rho1.matrix(), -p)
}

/// `t_p = ‖(1-p)ρ2 - pρ1‖₁`.
pub fn weighted_trace_norm(rho1: &DensityMatrix, rho2: &DensityMatrix, p: f64) -> Result<f64> {
    check_unit_interval("p", p)?;
    check_dims(rho1, rho2)?;
    Ok(trace_norm(&weighted_difference(rho1, rho2, p)))
}

/// The optimal measurement at weight `p`: `p1` decides ρ1 (negative part),
/// `p2` decides ρ2 (positive part), `p0` is the kernel.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HelstromParts {
    pub p: f64,
    #[serde(skip)]
    pub p1: HermitianMatrix,
    #[serde(skip)]
    pub p2: HermitianMatrix,
    #[serde(skip)]
    pub p0: HermitianMatrix,
    pub t_p: f64,
    /// `Tr[P0 ρ1]`.
    pub x_p: f64,
    /// `Tr[P0 ρ2]`.
    pub y_p: f64,
    /// `Tr[P2 ρ1]`.
    pub alpha_base: f64,
    /// `Tr[P1 ρ2]`.
    pub beta_base: f64,
}

impl HelstromParts {
    /// Errors when a fraction `q` of the kernel is assigned to ρ1.
    pub fn errors(&self, q: f64) -> (f64, f64) {
        let alpha = self.alpha_base + (1.0 - q) * self.x_p;
        let beta = self.beta_base + q * self.y_p;
        (alpha.clamp(0.0, 1.0), beta.clamp(0.0, 1.0))
    }

    /// Whether the kernel carries weight under either hypothesis.
    pub fn has_kernel(&self) -> bool {
        self.x_p > 1e-14 || self.y_p > 1e-14
    }
}

pub fn neyman_pearson_povm(
    rho1: &DensityMatrix,
    rho2: &DensityMatrix,
    p: f64,
    zero_tol: Option<f64>,
) -> Result<HelstromParts> {
    check_unit_interval("p", p)?;
    check_dims(rho1, rho2)?;
    let x = weighted_difference(rho1, rho2, p);
    let sp = signed_projectors(&x, zero_tol);
    let t_p = sp.eigen.eigenvalues.iter().map(|v| v.abs()).sum();
    let r1 = rho1.matrix();
    let r2 = rho2.matrix();
    Ok(HelstromParts {
        p,
        x_p: trace_product(&sp.zero, r1),
        y_p: trace_product(&sp.zero, r2),
        alpha_base: trace_product(&sp.plus, r1),
        beta_base: trace_product(&sp.minus, r2),
        p1: sp.minus,
        p2: sp.plus,
        p0: sp.zero,
        t_p,
    })
}

/// `(α, β)` of the optimal measurement at `(p, q)`.
pub fn exact_errors(rho1: &DensityMatrix, rho2: &DensityMatrix, p: f64, q: f64) -> Result<(f64, f64)> {
    check_unit_interval("q", q)?;
    Ok(neyman_pearson_povm(rho1, rho2, p, None)?.errors(q))
}

fn sorted_eigenvalues(rho1: &DensityMatrix, rho2: &DensityMatrix, p: f64) -> Vec<f64> {
    hermitian_eig(&weighted_difference(rho1, rho2, p)).eigenvalues
}

/// Values of `p ∈ (0,1)` at which `(1-p)ρ2 - pρ1` acquires a kernel that
/// is absent on either side. Each sorted eigenvalue is non-increasing in
/// `p`, so it changes sign at most once; sign changes found on a uniform
/// scan are bisected on the eigenvalue itself. Eigenvalues that stay
/// inside the zero band throughout (common null space) are ignored.
pub fn locate_kernel_points(
    rho1: &DensityMatrix,
    rho2: &DensityMatrix,
    scan_points: usize,
    zero_tol: Option<f64>,
) -> Vec<f64> {
    if rho1.dim() != rho2.dim() {
        return Vec::new();
    }
    let n = scan_points.max(100);
    let grid: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
    let spectra: Vec<Vec<f64>> = grid.par_iter().map(|&p| sorted_eigenvalues(rho1, rho2, p)).collect();
    let dim = rho1.dim();
    let tol_at = |eigs: &[f64]| {
        zero_tol.unwrap_or_else(|| default_zero_tol(eigs.iter().fold(0.0_f64, |m, v| m.max(v.abs()))))
    };
    let tols: Vec<f64> = spectra.iter().map(|e| tol_at(e)).collect();

    let mut brackets = Vec::new();
    for k in 0..dim {
        let mut last_plus: Option<usize> = None;
        for (i, eigs) in spectra.iter().enumerate() {
            let v = eigs[k];
            if v > tols[i] {
                last_plus = Some(i);
            } else if v < -tols[i] {
                if let Some(j) = last_plus {
                    brackets.push((k, grid[j], grid[i]));
                }
                break;
            }
        }
    }

    let mut roots: Vec<f64> = brackets
        .par_iter()
        .map(|&(k, lo, hi)| {
            let (a, b) = bisect_predicate(|p| sorted_eigenvalues(rho1, rho2, p)[k] > 0.0, lo, hi, KERNEL_WIDTH);
            0.5 * (a + b)
        })
        .collect();
    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|b, a| (*b - *a).abs() < KERNEL_DEDUP);
    roots.retain(|&p| p > 0.0 && p < 1.0);
    roots
}

/// Chebyshev-spaced grid of `n` points in the open interval `(0, 1)`.
pub fn default_p_grid(n: usize) -> Vec<f64> {
    (1..=n)
        .map(|k| 0.5 * (1.0 - ((2 * k - 1) as f64 * std::f64::consts::PI / (2 * n) as f64).cos()))
        .collect()
}

fn point(p: f64, q: f64, (alpha, beta): (f64, f64), kind: PointKind) -> RocPoint {
    RocPoint {
        p: Some(p),
        q: Some(q),
        beta,
        alpha,
        kind,
    }
}

/// Exact ROC curve. Every grid `p` contributes its `q = 0` point; every
/// kernel point and both endpoints `p = 0, 1` contribute `q = 0` and
/// `q = 1`, so linear segments and the `β = 0`, `β = 1` ends are present.
pub fn roc_curve_exact(
    rho1: &DensityMatrix,
    rho2: &DensityMatrix,
    p_grid: &[f64],
    zero_tol: Option<f64>,
) -> Result<RocCurve> {
    check_dims(rho1, rho2)?;
    for &p in p_grid {
        check_unit_interval("p", p)?;
    }
    let kernels = locate_kernel_points(rho1, rho2, DEFAULT_KERNEL_SCAN, zero_tol);
    let mut jobs: Vec<(f64, bool)> = p_grid.iter().map(|&p| (p, false)).collect();
    jobs.extend(kernels.iter().map(|&p| (p, true)));
    jobs.push((0.0, true));
    jobs.push((1.0, true));

    let per_job: Vec<Result<Vec<RocPoint>>> = jobs
        .par_iter()
        .map(|&(p, segment)| {
            let parts = neyman_pearson_povm(rho1, rho2, p, zero_tol)?;
            Ok(if segment {
                vec![
                    point(p, 0.0, parts.errors(0.0), PointKind::KernelSegment),
                    point(p, 1.0, parts.errors(1.0), PointKind::KernelSegment),
                ]
            } else {
                vec![point(p, 0.0, parts.errors(0.0), PointKind::Exact)]
            })
        })
        .collect();
    let mut points = Vec::with_capacity(jobs.len() + kernels.len() + 4);
    for pts in per_job {
        points.extend(pts?);
    }
    Ok(RocCurve::from_points(points))
}

/// Exact curve on the default Chebyshev grid.
pub fn roc_curve_default(rho1: &DensityMatrix, rho2: &DensityMatrix) -> Result<RocCurve> {
    roc_curve_exact(rho1, rho2, &default_p_grid(DEFAULT_GRID_POINTS), None)
}

/// Smallest achievable `α` subject to `β ≤ beta`, located by bisection in
/// `p` and linear interpolation across any kernel segment.
pub fn exact_alpha_at_beta(rho1: &DensityMatrix, rho2: &DensityMatrix, beta: f64) -> Result<f64> {
    check_unit_interval("beta", beta)?;
    check_dims(rho1, rho2)?;
    let at = |p: f64| neyman_pearson_povm(rho1, rho2, p, None);
    // β at q = 0 is non-decreasing in p.
    let start = at(0.0)?;
    let (a1, b1) = start.errors(1.0);
    if b1 >= beta {
        // A rounding-level β on the q = 1 end counts as β = 0.
        if b1 - beta <= 1e-14 {
            return Ok(a1);
        }
        let (a0, b0) = start.errors(0.0);
        return Ok(interpolate((b0, a0), (b1, a1), beta));
    }
    let (lo, hi) = bisect_predicate(
        |p| at(p).map(|h| h.errors(0.0).1 < beta).unwrap_or(false),
        0.0,
        1.0,
        KERNEL_WIDTH,
    );
    let mut cands = Vec::with_capacity(4);
    for p in [lo, hi] {
        let h = at(p)?;
        for q in [0.0, 1.0] {
            let (a, b) = h.errors(q);
            cands.push((b, a));
        }
    }
    cands.sort_by(|x, y| x.0.total_cmp(&y.0).then(y.1.total_cmp(&x.1)));
    let below = cands.iter().rev().find(|c| c.0 <= beta).copied();
    let above = cands.iter().find(|c| c.0 >= beta).copied();
    Ok(match (below, above) {
        (Some(b), Some(a)) => interpolate(b, a, beta),
        (Some(b), None) => b.1,
        (None, Some(a)) => a.1,
        (None, None) => return Err(QrocError::DegenerateParameter("empty bracket".into())),
    })
}

/// Smallest achievable `β` subject to `α ≤ alpha`.
pub fn exact_beta_at_alpha(rho1: &DensityMatrix, rho2: &DensityMatrix, alpha: f64) -> Result<f64> {
    exact_alpha_at_beta(rho2, rho1, alpha)
}

fn interpolate((b0, a0): (f64, f64), (b1, a1): (f64, f64), beta: f64) -> f64 {
    if (b1 - b0).abs() <= 1e-300 {
        return a0.min(a1);
    }
    a0 + (a1 - a0) * (beta - b0) / (b1 - b0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn qubit_pair() -> (DensityMatrix, DensityMatrix) {
        (
            DensityMatrix::from_diagonal(&[0.8, 0.2]).unwrap(),
            DensityMatrix::from_diagonal(&[0.6, 0.4]).unwrap(),
        )
    }

    #[test]
    fn trace_norm_examples() {
        let (r1, r2) = qubit_pair();
        assert!((weighted_trace_norm(&r1, &r2, 0.5).unwrap() - 0.2).abs() < 1e-14);
        for p in [0.0, 0.3, 0.5, 0.9] {
            assert!((weighted_trace_norm(&r1, &r1, p).unwrap() - (1.0 - 2.0 * p).abs()).abs() < 1e-14);
        }
        let up = DensityMatrix::from_diagonal(&[1.0, 0.0]).unwrap();
        let down = DensityMatrix::from_diagonal(&[0.0, 1.0]).unwrap();
        assert!((weighted_trace_norm(&up, &down, 0.37).unwrap() - 1.0).abs() < 1e-14);
        assert!(weighted_trace_norm(&up, &down, 1.2).is_err());
    }

    #[test]
    fn povm_at_half() {
        let (r1, r2) = qubit_pair();
        let h = neyman_pearson_povm(&r1, &r2, 0.5, None).unwrap();
        assert!((h.p1.as_matrix()[(0, 0)].re - 1.0).abs() < 1e-14);
        let (a, b) = h.errors(0.0);
        assert!((a - 0.2).abs() < 1e-14 && (b - 0.6).abs() < 1e-14);
        assert!((0.5 * a + 0.5 * b - (1.0 - h.t_p) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn identical_states_kernel() {
        let (r1, _) = qubit_pair();
        let h = neyman_pearson_povm(&r1, &r1, 0.5, None).unwrap();
        assert!((h.x_p - 1.0).abs() < 1e-12 && (h.y_p - 1.0).abs() < 1e-12);
        for q in [0.0, 0.25, 1.0] {
            let (a, b) = h.errors(q);
            assert!((a + b - 1.0).abs() < 1e-12);
        }
        let k = locate_kernel_points(&r1, &r1, 400, None);
        assert_eq!(k.len(), 1);
        assert!((k[0] - 0.5).abs() < 1e-11);
    }

    #[test]
    fn endpoint_measurement() {
        let (r1, r2) = qubit_pair();
        let (a, b) = exact_errors(&r1, &r2, 0.0, 0.0).unwrap();
        assert!((a - 1.0).abs() < 1e-14 && b.abs() < 1e-14);
    }

    #[test]
    fn qubit_kernel_points() {
        let (r1, r2) = qubit_pair();
        let k = locate_kernel_points(&r1, &r2, 2048, None);
        assert_eq!(k.len(), 2);
        assert!((k[0] - 3.0 / 7.0).abs() < 1e-11);
        assert!((k[1] - 2.0 / 3.0).abs() < 1e-11);
    }

    #[test]
    fn orthogonal_pure_states() {
        let up = DensityMatrix::from_diagonal(&[1.0, 0.0]).unwrap();
        let down = DensityMatrix::from_diagonal(&[0.0, 1.0]).unwrap();
        assert!(locate_kernel_points(&up, &down, 500, None).is_empty());
        let (a, b) = exact_errors(&up, &down, 0.4, 0.0).unwrap();
        assert!(a.abs() < 1e-14 && b.abs() < 1e-14);
    }

    #[test]
    fn qubit_curve_vertices() {
        let (r1, r2) = qubit_pair();
        let c = roc_curve_exact(&r1, &r2, &default_p_grid(64), None).unwrap();
        for (beta, alpha) in [(0.0, 1.0), (0.6, 0.2), (1.0, 0.0), (0.3, 0.6), (0.8, 0.1)] {
            assert!((c.alpha_at(beta).unwrap() - alpha).abs() < 1e-12, "beta {beta}");
        }
        assert!(c.convexity_violation() < 1e-8);
        assert!(c.monotonicity_violation() < 1e-12);
    }

    #[test]
    fn alpha_at_beta_on_segments() {
        let (r1, r2) = qubit_pair();
        for (beta, alpha) in [(0.0, 1.0), (0.3, 0.6), (0.6, 0.2), (0.8, 0.1), (1.0, 0.0)] {
            assert!((exact_alpha_at_beta(&r1, &r2, beta).unwrap() - alpha).abs() < 1e-10, "beta {beta}");
        }
        assert!((exact_beta_at_alpha(&r1, &r2, 0.2).unwrap() - 0.6).abs() < 1e-10);
    }

    #[test]
    fn pure_pair_curve_matches_closed_form() {
        let f: f64 = 0.9;
        let a = DensityMatrix::pure(&[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]).unwrap();
        let b = DensityMatrix::pure(&[Complex64::new(f, 0.0), Complex64::new((1.0 - f * f).sqrt(), 0.0)]).unwrap();
        for beta in [0.01, 0.2, 0.5, 0.81, 0.9] {
            let expect = if beta >= f * f {
                0.0
            } else {
                (f * (1.0 - beta).sqrt() - (beta * (1.0 - f * f)).sqrt()).powi(2)
            };
            assert!((exact_alpha_at_beta(&a, &b, beta).unwrap() - expect).abs() < 1e-9);
        }
    }

    #[test]
    fn chebyshev_grid_is_interior_and_sorted() {
        let g = default_p_grid(512);
        assert_eq!(g.len(), 512);
        assert!(g[0] > 0.0 && g[511] < 1.0);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }
}
