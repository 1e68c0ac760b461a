//! Gaussian bosonic states described by first and second moments.
//!
//! Conventions: quadratures ordered `x1, p1, …, xm, pm`, `[x, p] = i`,
//! vacuum covariance `I/2`, symplectic form built from blocks
//! `[[0, 1], [-1, 0]]`.
//!
//! Fractional powers of `W = -2 V iΩ` use the similarity
//! `W = R H R⁻¹` with `R = V^{1/2}` and `H = -2 R iΩ R` Hermitian, so
//! every matrix function reduces to a Hermitian eigendecomposition.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{check_open_unit_interval, QrocError, Result};
use crate::linalg::{general_trace_norm, hermitian_eig, psd_function_of, CMatrix, EigenSystem, HermitianMatrix, MatrixFunction};
use crate::states::{DensityMatrix, QsEvaluator};

pub const SYMMETRY_TOL: f64 = 1e-10;
pub const PHYSICALITY_TOL: f64 = 1e-8;
/// Minimum distance of a symplectic eigenvalue above `1/2`.
pub const PURITY_MARGIN: f64 = 1e-8;
/// Largest accepted condition number of `V^{1/2}`.
pub const CONDITION_LIMIT: f64 = 1e8;
/// Endpoint offset used when `Q_s` is requested at `s = 0` or `s = 1`.
pub const ENDPOINT_STEP: f64 = 1e-6;
pub const MAX_DEFICIT: f64 = 1e-6;
pub const MAX_TWO_MODE_CUTOFF: usize = 64;

#[derive(Clone, Debug, PartialEq)]
pub struct GaussianState {
    pub modes: usize,
    pub mean: DVector<f64>,
    pub cov: DMatrix<f64>,
}

/// The symplectic form `Ω` for `modes` modes.
pub fn symplectic_form(modes: usize) -> DMatrix<f64> {
    let mut o = DMatrix::zeros(2 * modes, 2 * modes);
    for k in 0..modes {
        o[(2 * k, 2 * k + 1)] = 1.0;
        o[(2 * k + 1, 2 * k)] = -1.0;
    }
    o
}

fn i_omega(modes: usize) -> CMatrix {
    symplectic_form(modes).map(|v| Complex64::new(0.0, v))
}

fn complexify(m: &DMatrix<f64>) -> CMatrix {
    m.map(|v| Complex64::new(v, 0.0))
}

pub fn validate_gaussian(mean: DVector<f64>, cov: DMatrix<f64>, modes: usize) -> Result<GaussianState> {
    let n = 2 * modes;
    if modes == 0 || cov.nrows() != n || cov.ncols() != n {
        return Err(QrocError::DimensionMismatch {
            left: n,
            right: cov.nrows(),
        });
    }
    if mean.len() != n {
        return Err(QrocError::DimensionMismatch {
            left: n,
            right: mean.len(),
        });
    }
    if cov.iter().chain(mean.iter()).any(|v| !v.is_finite()) {
        return Err(QrocError::Malformed("non-finite moment".into()));
    }
    let asymmetry = (&cov - cov.transpose()).amax();
    if asymmetry > SYMMETRY_TOL {
        return Err(QrocError::AsymmetricCovariance { asymmetry });
    }
    let cov = (&cov + cov.transpose()) * 0.5;
    let check = complexify(&cov) + i_omega(modes) * Complex64::new(0.5, 0.0);
    let eig = hermitian_eig(&HermitianMatrix::hermitian_part(check));
    let min = eig.eigenvalues.last().copied().unwrap_or(0.0);
    if min < -PHYSICALITY_TOL {
        return Err(QrocError::Unphysical { min_eigenvalue: min });
    }
    Ok(GaussianState { modes, mean, cov })
}

impl GaussianState {
    pub fn new(mean: Vec<f64>, cov: DMatrix<f64>) -> Result<Self> {
        let modes = mean.len() / 2;
        if !mean.len().is_multiple_of(2) {
            return Err(QrocError::Malformed("mean vector must have even length".into()));
        }
        validate_gaussian(DVector::from_vec(mean), cov, modes)
    }

    pub fn vacuum(modes: usize) -> Self {
        GaussianState {
            modes,
            mean: DVector::zeros(2 * modes),
            cov: DMatrix::identity(2 * modes, 2 * modes) * 0.5,
        }
    }

    /// Single-mode thermal state with mean photon number `nbar`.
    pub fn thermal(nbar: f64) -> Result<Self> {
        if !(nbar >= 0.0 && nbar.is_finite()) {
            return Err(QrocError::ParameterOutOfRange { name: "nbar", value: nbar });
        }
        Ok(GaussianState {
            modes: 1,
            mean: DVector::zeros(2),
            cov: DMatrix::identity(2, 2) * (nbar + 0.5),
        })
    }

    /// Single-mode coherent state `|α⟩`.
    pub fn coherent(alpha: Complex64) -> Self {
        let s = std::f64::consts::SQRT_2;
        GaussianState {
            modes: 1,
            mean: DVector::from_vec(vec![s * alpha.re, s * alpha.im]),
            cov: DMatrix::identity(2, 2) * 0.5,
        }
    }

    /// Displaces the state by `shift` in phase space.
    pub fn displaced(mut self, shift: &[f64]) -> Result<Self> {
        if shift.len() != self.mean.len() {
            return Err(QrocError::DimensionMismatch {
                left: self.mean.len(),
                right: shift.len(),
            });
        }
        for (m, d) in self.mean.iter_mut().zip(shift) {
            *m += d;
        }
        Ok(self)
    }

    /// Symplectic eigenvalues in descending order.
    pub fn symplectic_eigenvalues(&self) -> Vec<f64> {
        let r = sym_sqrt(&self.cov);
        let h = complexify(&r) * i_omega(self.modes) * complexify(&r);
        let eig = hermitian_eig(&HermitianMatrix::hermitian_part(h));
        eig.eigenvalues[..self.modes].iter().map(|v| v.abs()).collect()
    }
}

fn sym_sqrt(m: &DMatrix<f64>) -> DMatrix<f64> {
    let e = m.clone().symmetric_eigen();
    let d = DMatrix::from_diagonal(&e.eigenvalues.map(|v| v.max(0.0).sqrt()));
    &e.eigenvectors * d * e.eigenvectors.transpose()
}

/// `√det(V + iΩ/2) = Π √(ν² - 1/4)`; zero exactly for pure states.
pub fn gaussian_zeta(g: &GaussianState) -> f64 {
    g.symplectic_eigenvalues()
        .iter()
        .map(|nu| (nu * nu - 0.25).max(0.0).sqrt())
        .product()
}

/// Two-mode squeezed vacuum with `nbar` photons per mode whose second mode
/// passes through a thermal loss channel of transmissivity `tau` and
/// thermal photon number `nth`.
pub fn tmsv_through_thermal_loss(nbar: f64, tau: f64, nth: f64) -> Result<GaussianState> {
    if !(nbar >= 0.0 && nbar.is_finite()) {
        return Err(QrocError::ParameterOutOfRange { name: "nbar", value: nbar });
    }
    if !(0.0..=1.0).contains(&tau) {
        return Err(QrocError::ParameterOutOfRange { name: "tau", value: tau });
    }
    if !(nth >= 0.0 && nth.is_finite()) {
        return Err(QrocError::ParameterOutOfRange { name: "nth", value: nth });
    }
    let a = nbar + 0.5;
    let b = tau * a + (1.0 - tau) * (nth + 0.5);
    let c = tau.sqrt() * (nbar * (nbar + 1.0)).sqrt();
    let mut cov = DMatrix::zeros(4, 4);
    cov[(0, 0)] = a;
    cov[(1, 1)] = a;
    cov[(2, 2)] = b;
    cov[(3, 3)] = b;
    cov[(0, 2)] = c;
    cov[(2, 0)] = c;
    cov[(1, 3)] = -c;
    cov[(3, 1)] = -c;
    validate_gaussian(DVector::zeros(4), cov, 2)
}

/// Precomputed spectral data for `t ↦ V(tG)`.
#[derive(Clone, Debug)]
struct PowerFamily {
    modes: usize,
    r: CMatrix,
    r_inv: CMatrix,
    h: EigenSystem,
    /// `g_k = ln((2ν_k + 1)/(2ν_k - 1))` per mode.
    g: Vec<f64>,
    ln_z: f64,
}

fn ln_sinh(y: f64) -> f64 {
    // stable for large y
    y + (-(-2.0 * y).exp_m1()).ln() - std::f64::consts::LN_2
}

impl PowerFamily {
    fn new(state: &GaussianState) -> Result<Self> {
        let e = state.cov.clone().symmetric_eigen();
        let (lo, hi) = e
            .eigenvalues
            .iter()
            .fold((f64::INFINITY, 0.0_f64), |(a, b), &v| (a.min(v), b.max(v)));
        let condition = if lo > 0.0 { (hi / lo).sqrt() } else { f64::INFINITY };
        if condition > CONDITION_LIMIT {
            return Err(QrocError::IllConditioned { condition });
        }
        let q = complexify(&e.eigenvectors);
        let diag = |f: &dyn Fn(f64) -> f64| {
            CMatrix::from_diagonal(&e.eigenvalues.map(|v| Complex64::new(f(v), 0.0)))
        };
        let r = &q * diag(&|v| v.sqrt()) * q.adjoint();
        let r_inv = &q * diag(&|v| 1.0 / v.sqrt()) * q.adjoint();
        let h = &r * i_omega(state.modes) * &r * Complex64::new(-2.0, 0.0);
        let h = hermitian_eig(&HermitianMatrix::hermitian_part(h));
        let nus: Vec<f64> = h.eigenvalues[..state.modes].iter().map(|v| 0.5 * v.abs()).collect();
        let min_nu = nus.iter().copied().fold(f64::INFINITY, f64::min);
        if min_nu <= 0.5 + PURITY_MARGIN {
            return Err(QrocError::SingularGaussianState { min_symplectic: min_nu });
        }
        let g: Vec<f64> = nus.iter().map(|nu| 2.0 * (1.0 / (2.0 * nu)).atanh()).collect();
        let mut fam = PowerFamily {
            modes: state.modes,
            r,
            r_inv,
            h,
            g,
            ln_z: 0.0,
        };
        fam.ln_z = fam.ln_z_at(1.0);
        Ok(fam)
    }

    /// `ln Z(tG) = Σ_k [-ln 2 - ln sinh(t g_k / 2)]`.
    fn ln_z_at(&self, t: f64) -> f64 {
        self.g
            .iter()
            .map(|g| -std::f64::consts::LN_2 - ln_sinh(0.5 * t * g))
            .sum()
    }

    fn ln_z_derivative(&self, t: f64) -> f64 {
        self.g.iter().map(|g| -0.5 * g / (0.5 * t * g).tanh()).sum()
    }

    /// `(V(tG), dV(tG)/dt)`.
    fn cov_at(&self, t: f64) -> (DMatrix<f64>, DMatrix<f64>) {
        let n = self.h.eigenvalues.len();
        let mut w = Vec::with_capacity(n);
        let mut dw = Vec::with_capacity(n);
        for &h in &self.h.eigenvalues {
            let sign = h.signum();
            let g = 2.0 * (1.0 / h.abs()).atanh();
            let y = 0.5 * t * g;
            w.push(sign / y.tanh());
            dw.push(-sign * 0.5 * g / y.sinh().powi(2));
        }
        let io = i_omega(self.modes);
        let lift = |vals: &[f64]| {
            let mut f = CMatrix::zeros(n, n);
            for (k, &v) in vals.iter().enumerate() {
                let col = self.h.eigenvectors.column(k);
                f += col * col.adjoint() * Complex64::new(v, 0.0);
            }
            let wm = &self.r * f * &self.r_inv;
            let v = wm * &io * Complex64::new(-0.5, 0.0);
            let re = v.map(|z| z.re);
            (&re + re.transpose()) * 0.5
        };
        (lift(&w), lift(&dw))
    }
}

/// `Q_s = Tr[ρ2^s ρ1^{1-s}]` for a pair of Gaussian states, with its
/// logarithmic derivative.
#[derive(Clone, Debug)]
pub struct GaussianQs {
    first: PowerFamily,
    second: PowerFamily,
    delta: DVector<f64>,
}

/// Builds the evaluator; both states must be strictly mixed.
pub fn gaussian_qs_evaluator(g1: &GaussianState, g2: &GaussianState) -> Result<GaussianQs> {
    if g1.modes != g2.modes {
        return Err(QrocError::DimensionMismatch {
            left: g1.modes,
            right: g2.modes,
        });
    }
    Ok(GaussianQs {
        first: PowerFamily::new(g1)?,
        second: PowerFamily::new(g2)?,
        delta: &g1.mean - &g2.mean,
    })
}

impl GaussianQs {
    /// `(ln Q_s, d ln Q_s / ds)` for `s` strictly inside `(0, 1)`.
    pub fn log_value_and_slope(&self, s: f64) -> (f64, f64) {
        let (v2, dv2) = self.second.cov_at(s);
        let (v1, dv1) = self.first.cov_at(1.0 - s);
        let m = v2 + v1;
        let dm = dv2 - dv1;
        let Some(chol) = m.clone().cholesky() else {
            return (f64::NAN, f64::NAN);
        };
        let ln_det: f64 = 2.0 * chol.l().diagonal().iter().map(|d| d.ln()).sum::<f64>();
        let m_inv_delta = chol.solve(&self.delta);
        let quad = self.delta.dot(&m_inv_delta);
        let m_inv_dm = chol.solve(&dm);

        let log_q = self.second.ln_z_at(s) - s * self.second.ln_z + self.first.ln_z_at(1.0 - s)
            - (1.0 - s) * self.first.ln_z
            - 0.5 * quad
            - 0.5 * ln_det;
        let slope = self.second.ln_z_derivative(s) - self.second.ln_z - self.first.ln_z_derivative(1.0 - s)
            + self.first.ln_z
            + 0.5 * m_inv_delta.dot(&(&dm * &m_inv_delta))
            - 0.5 * m_inv_dm.trace();
        (log_q, slope)
    }

    /// `V(s)` of the second state, or of the first when `first` is set.
    pub fn covariance_power(&self, first: bool, t: f64) -> DMatrix<f64> {
        if first { self.first.cov_at(t).0 } else { self.second.cov_at(t).0 }
    }
}

fn interior(s: f64) -> f64 {
    s.clamp(ENDPOINT_STEP, 1.0 - ENDPOINT_STEP)
}

impl QsEvaluator for GaussianQs {
    fn value(&self, s: f64) -> f64 {
        self.log_value_and_slope(interior(s)).0.exp()
    }

    fn derivative(&self, s: f64) -> f64 {
        let (l, d) = self.log_value_and_slope(interior(s));
        l.exp() * d
    }

    fn log_derivative(&self, s: f64) -> f64 {
        self.log_value_and_slope(interior(s)).1
    }
}

pub fn gaussian_q_s(g1: &GaussianState, g2: &GaussianState, s: f64) -> Result<f64> {
    check_open_unit_interval("s", s)?;
    let e = gaussian_qs_evaluator(g1, g2)?;
    Ok(e.log_value_and_slope(s).0.exp())
}

/// `q_s = -∂_s ln Q_s`.
pub fn gaussian_q_s_logderiv(g1: &GaussianState, g2: &GaussianState, s: f64) -> Result<f64> {
    check_open_unit_interval("s", s)?;
    let e = gaussian_qs_evaluator(g1, g2)?;
    Ok(-e.log_value_and_slope(s).1)
}

/// A Fock-basis truncation stored as nonzero entries `(row, col, value)`.
/// Basis index of `|n_1 … n_m⟩` is `Σ n_k c^{m-1-k}`.
#[derive(Clone, Debug)]
pub struct FockState {
    pub modes: usize,
    pub cutoff: usize,
    pub entries: Vec<(usize, usize, Complex64)>,
    /// `1 - Tr ρ_truncated`.
    pub trace_deficit: f64,
}

impl FockState {
    pub fn dim(&self) -> usize {
        self.cutoff.pow(self.modes as u32)
    }

    pub fn to_matrix(&self) -> HermitianMatrix {
        let n = self.dim();
        let mut m = CMatrix::zeros(n, n);
        for &(r, c, v) in &self.entries {
            m[(r, c)] = v;
        }
        HermitianMatrix::hermitian_part(m)
    }

    /// The truncated (not renormalized) operator as a density matrix.
    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix::from_trusted(self.to_matrix())
    }
}

fn complex_covariance(g: &GaussianState) -> (CMatrix, Vec<Complex64>) {
    let m = g.modes;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut l = CMatrix::zeros(2 * m, 2 * m);
    for k in 0..m {
        l[(k, 2 * k)] = Complex64::new(h, 0.0);
        l[(k, 2 * k + 1)] = Complex64::new(0.0, -h);
        l[(m + k, 2 * k)] = Complex64::new(h, 0.0);
        l[(m + k, 2 * k + 1)] = Complex64::new(0.0, h);
    }
    let sigma = &l * complexify(&g.cov) * l.adjoint();
    let alpha: Vec<Complex64> = (0..m)
        .map(|k| Complex64::new(g.mean[2 * k], g.mean[2 * k + 1]) * h)
        .collect();
    let beta = alpha.iter().copied().chain(alpha.iter().map(|a| a.conj())).collect();
    (sigma, beta)
}

fn chop(v: Complex64, scale: f64) -> Complex64 {
    let t = 1e-14 * scale;
    Complex64::new(
        if v.re.abs() < t { 0.0 } else { v.re },
        if v.im.abs() < t { 0.0 } else { v.im },
    )
}

/// Fock-basis matrix elements by the loop-hafnian recursion. Entries
/// whose coupling vanishes by symmetry come out as exact zeros, so only
/// the nonzero pattern is stored.
pub fn gaussian_to_fock(g: &GaussianState, cutoff: usize) -> Result<FockState> {
    let m = g.modes;
    if m == 0 || m > 2 {
        return Err(QrocError::ParameterOutOfRange {
            name: "modes",
            value: m as f64,
        });
    }
    if cutoff == 0 || (m == 2 && cutoff > MAX_TWO_MODE_CUTOFF) {
        return Err(QrocError::ParameterOutOfRange {
            name: "cutoff",
            value: cutoff as f64,
        });
    }
    let (sigma, beta) = complex_covariance(g);
    let n2 = 2 * m;
    let qmat = sigma + CMatrix::identity(n2, n2) * Complex64::new(0.5, 0.0);
    let q_inv = qmat
        .clone()
        .try_inverse()
        .ok_or_else(|| QrocError::Malformed("singular Husimi covariance".into()))?;
    let mut x = CMatrix::zeros(n2, n2);
    for k in 0..m {
        x[(k, m + k)] = Complex64::new(1.0, 0.0);
        x[(m + k, k)] = Complex64::new(1.0, 0.0);
    }
    let a_raw = &x * (CMatrix::identity(n2, n2) - &q_inv).map(|z| z.conj());
    let beta_v = nalgebra::DVector::from_vec(beta.clone());
    let gamma_raw = beta_v.map(|z| z.conj()) - &a_raw * &beta_v;
    let a_scale = a_raw.iter().fold(1.0_f64, |s, z| s.max(z.norm()));
    let g_scale = gamma_raw.iter().fold(1.0_f64, |s, z| s.max(z.norm()));
    let a = a_raw.map(|z| chop(z, a_scale));
    let gamma: Vec<Complex64> = gamma_raw.iter().map(|&z| chop(z, g_scale)).collect();
    let quad = (beta_v.transpose() * &q_inv * beta_v.map(|z| z.conj()))[(0, 0)].re;
    let det_q = qmat.determinant().re;
    let t0 = Complex64::new((-0.5 * quad).exp() / det_q.sqrt(), 0.0);

    let c = cutoff;
    let c2 = if m == 2 { c } else { 1 };
    let nb = c * c2;
    let decode = |f: usize| [f / c2, f % c2];
    let encode = |l: [usize; 2]| l[0] * c2 + l[1];
    let sq: Vec<f64> = (0..=c).map(|k| (k as f64).sqrt()).collect();

    // Row ket = 0: bra-only recursion.
    let mut bra = vec![Complex64::new(0.0, 0.0); nb];
    bra[0] = t0;
    for f in 1..nb {
        let l = decode(f);
        let i = if l[0] > 0 { 0 } else { 1 };
        let mut prev = l;
        prev[i] -= 1;
        let mut v = gamma[m + i] * bra[encode(prev)];
        for j in 0..m {
            if prev[j] > 0 {
                let aij = a[(m + i, m + j)];
                if aij != Complex64::new(0.0, 0.0) {
                    let mut pp = prev;
                    pp[j] -= 1;
                    v += aij * sq[prev[j]] * bra[encode(pp)];
                }
            }
        }
        bra[f] = v / sq[l[i]];
    }

    // One ket step: slice(k + e_i) from slice(k) and slices k - e_j.
    let step = |i: usize, k: [usize; 2], cur: &[Complex64], lower: [Option<&[Complex64]>; 2]| {
        let mut out = vec![Complex64::new(0.0, 0.0); nb];
        for (f, o) in out.iter_mut().enumerate() {
            let l = decode(f);
            let mut v = gamma[i] * cur[f];
            for j in 0..m {
                if let Some(s) = lower[j] {
                    let aij = a[(i, j)];
                    if aij != Complex64::new(0.0, 0.0) {
                        v += aij * sq[k[j]] * s[f];
                    }
                }
                if l[j] > 0 {
                    let aij = a[(i, m + j)];
                    if aij != Complex64::new(0.0, 0.0) {
                        let mut ll = l;
                        ll[j] -= 1;
                        v += aij * sq[l[j]] * cur[encode(ll)];
                    }
                }
            }
            *o = v / sq[k[i] + 1];
        }
        out
    };

    let mut entries = Vec::new();
    let mut trace = 0.0;
    let mut emit = |k: [usize; 2], slice: &[Complex64]| {
        let col = encode(k);
        for (row, &v) in slice.iter().enumerate() {
            if v != Complex64::new(0.0, 0.0) {
                if row == col {
                    trace += v.re;
                }
                entries.push((row, col, v));
            }
        }
    };

    let mut col0: Vec<Vec<Complex64>> = Vec::with_capacity(c2);
    let mut prev_row: Vec<Vec<Complex64>> = Vec::new();
    for k2 in 0..c2 {
        let first = if k2 == 0 {
            bra.clone()
        } else {
            let lower = if k2 >= 2 { Some(col0[k2 - 2].as_slice()) } else { None };
            step(1, [0, k2 - 1], &col0[k2 - 1], [None, lower])
        };
        col0.push(first.clone());
        let mut row: Vec<Vec<Complex64>> = Vec::with_capacity(c);
        row.push(first);
        for k1 in 1..c {
            let k = [k1 - 1, k2];
            let l0 = if k1 >= 2 { Some(row[k1 - 2].as_slice()) } else { None };
            let l1 = if k2 >= 1 { Some(prev_row[k1 - 1].as_slice()) } else { None };
            let next = step(0, k, &row[k1 - 1], [l0, l1]);
            row.push(next);
        }
        for (k1, slice) in row.iter().enumerate() {
            emit([k1, k2], slice);
        }
        prev_row = row;
    }
    let trace_deficit = 1.0 - trace;
    if trace_deficit > MAX_DEFICIT {
        return Err(QrocError::CutoffTooSmall { deficit: trace_deficit });
    }
    Ok(FockState {
        modes: m,
        cutoff,
        entries,
        trace_deficit,
    })
}

/// Fidelity of two truncations with the summed trace deficits as an
/// error estimate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TruncatedFidelity {
    pub fidelity: f64,
    pub error: f64,
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// `‖√A √B‖₁` for sparse PSD operators, block by block over the
/// connected components of the joint nonzero pattern.
pub fn sparse_fidelity(a: &FockState, b: &FockState) -> Result<f64> {
    let n = a.dim();
    if b.dim() != n {
        return Err(QrocError::DimensionMismatch { left: n, right: b.dim() });
    }
    let mut parent: Vec<usize> = (0..n).collect();
    for &(r, c, _) in a.entries.iter().chain(&b.entries) {
        let (x, y) = (find(&mut parent, r), find(&mut parent, c));
        if x != y {
            parent[x.max(y)] = x.min(y);
        }
    }
    let mut groups: HashMap<usize, Vec<usize>> = HashMap::new();
    for i in 0..n {
        let root = find(&mut parent, i);
        groups.entry(root).or_default().push(i);
    }
    let mut slot = vec![0usize; n];
    let mut block_of = vec![0usize; n];
    let mut blocks: Vec<Vec<usize>> = groups.into_values().collect();
    blocks.sort_by_key(|g| g[0]);
    for (bi, g) in blocks.iter().enumerate() {
        for (p, &i) in g.iter().enumerate() {
            slot[i] = p;
            block_of[i] = bi;
        }
    }
    let dense = |s: &FockState| {
        let mut mats: Vec<CMatrix> = blocks.iter().map(|g| CMatrix::zeros(g.len(), g.len())).collect();
        for &(r, c, v) in &s.entries {
            mats[block_of[r]][(slot[r], slot[c])] = v;
        }
        mats
    };
    let ma = dense(a);
    let mb = dense(b);
    let mut total = 0.0;
    for (x, y) in ma.into_iter().zip(mb) {
        if x.iter().all(|z| *z == Complex64::new(0.0, 0.0)) || y.iter().all(|z| *z == Complex64::new(0.0, 0.0)) {
            continue;
        }
        let rx = psd_function_of(&hermitian_eig(&HermitianMatrix::hermitian_part(x)), MatrixFunction::Sqrt)?;
        let ry = psd_function_of(&hermitian_eig(&HermitianMatrix::hermitian_part(y)), MatrixFunction::Sqrt)?;
        total += general_trace_norm(&(rx.as_matrix() * ry.as_matrix()));
    }
    Ok(total)
}

pub fn gaussian_fidelity_truncated(g1: &GaussianState, g2: &GaussianState, cutoff: usize) -> Result<TruncatedFidelity> {
    if g1.modes != g2.modes {
        return Err(QrocError::DimensionMismatch {
            left: g1.modes,
            right: g2.modes,
        });
    }
    let a = gaussian_to_fock(g1, cutoff)?;
    let b = gaussian_to_fock(g2, cutoff)?;
    Ok(TruncatedFidelity {
        fidelity: sparse_fidelity(&a, &b)?,
        error: a.trace_deficit.max(0.0) + b.trace_deficit.max(0.0),
    })
}
