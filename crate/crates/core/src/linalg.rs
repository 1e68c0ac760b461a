//! Dense Hermitian linear algebra shared by the state models and ROC engines.
//!
//! Everything is built on a single primitive, [`hermitian_eig`], which
//! splits block-diagonal inputs (exact zero structure) into independent
//! blocks before handing them to the dense solver. Fock-space states with a
//! conserved quantum number therefore decompose cheaply.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{QrocError, Result};

pub type CMatrix = DMatrix<Complex64>;

/// Relative Hermiticity tolerance, as a fraction of the largest entry.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Eigenvalues below `-PSD_TOL * spectral radius` reject a PSD input.
pub const PSD_TOL: f64 = 1e-10;
/// Eigenvalues below `CLAMP_TOL * largest eigenvalue` count as exact zeros.
pub const CLAMP_TOL: f64 = 1e-14;
/// Default relative zero threshold for signed projectors.
pub const ZERO_TOL_REL: f64 = 1e-10;
/// Absolute floor for the signed-projector zero threshold.
pub const ZERO_TOL_ABS: f64 = 1e-14;

/// A square complex matrix equal to its conjugate transpose.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix {
    m: CMatrix,
}

impl HermitianMatrix {
    /// Validates Hermiticity to within [`HERMITIAN_TOL`] of the largest entry.
    pub fn new(m: CMatrix) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(QrocError::DimensionMismatch {
                left: m.nrows(),
                right: m.ncols(),
            });
        }
        let scale = m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()));
        let asymmetry = max_hermitian_defect(&m);
        let allowed = HERMITIAN_TOL * scale;
        if asymmetry > allowed {
            return Err(QrocError::NonHermitianInput { asymmetry, allowed });
        }
        Ok(Self::hermitian_part(m))
    }

    /// Takes `(M + M†)/2` without checking.
    pub fn hermitian_part(m: CMatrix) -> Self {
        let sym = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
        Self { m: sym }
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(QrocError::Malformed("matrix is not square".into()));
        }
        let m = CMatrix::from_fn(n, n, |i, j| Complex64::new(rows[i][j], 0.0));
        Self::new(m)
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        let m = CMatrix::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::new(diag[i], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        Self { m }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            m: CMatrix::zeros(dim, dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            m: CMatrix::identity(dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn as_matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn into_matrix(self) -> CMatrix {
        self.m
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.m[(i, i)].re).sum()
    }

    /// `a * self + b * other`.
    pub fn combine(&self, a: f64, other: &HermitianMatrix, b: f64) -> HermitianMatrix {
        let m = &self.m * Complex64::new(a, 0.0) + &other.m * Complex64::new(b, 0.0);
        HermitianMatrix { m }
    }

    pub fn scale(&self, a: f64) -> HermitianMatrix {
        HermitianMatrix {
            m: &self.m * Complex64::new(a, 0.0),
        }
    }

    pub fn kron(&self, other: &HermitianMatrix) -> HermitianMatrix {
        HermitianMatrix {
            m: self.m.kronecker(&other.m),
        }
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
    }
}

fn max_hermitian_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Eigenvalues (descending) with matching orthonormal eigenvector columns.
#[derive(Clone, Debug)]
pub struct EigenSystem {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMatrix,
}

impl EigenSystem {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0_f64, |acc, l| acc.max(l.abs()))
    }

    /// `U diag(f(λ)) U†`.
    pub fn reconstruct_with<F: Fn(f64) -> f64>(&self, f: F) -> CMatrix {
        let n = self.dim();
        let mut scaled = self.eigenvectors.clone();
        for (k, &l) in self.eigenvalues.iter().enumerate() {
            let w = f(l);
            for i in 0..n {
                scaled[(i, k)] *= w;
            }
        }
        &scaled * self.eigenvectors.adjoint()
    }

    /// Projector onto the span of the selected eigenvector columns.
    pub fn projector(&self, select: impl Fn(usize) -> bool) -> HermitianMatrix {
        let n = self.dim();
        let cols: Vec<usize> = (0..n).filter(|&k| select(k)).collect();
        if cols.is_empty() {
            return HermitianMatrix::zeros(n);
        }
        let sub = self.eigenvectors.select_columns(cols.iter());
        HermitianMatrix::hermitian_part(&sub * sub.adjoint())
    }
}

/// Groups indices into connected components of the union of the nonzero
/// patterns of the given square matrices. Only exact zeros separate blocks.
pub fn block_components(mats: &[&CMatrix]) -> Vec<Vec<usize>> {
    let n = mats.first().map_or(0, |m| m.nrows());
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for m in mats {
        for j in 0..n {
            for i in 0..n {
                if i != j && m[(i, j)] != Complex64::new(0.0, 0.0) {
                    let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                    if a != b {
                        parent[a.max(b)] = a.min(b);
                    }
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        if slot[r] == usize::MAX {
            slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[r]].push(i);
    }
    groups
}

pub(crate) fn sub_block(m: &CMatrix, idx: &[usize]) -> CMatrix {
    CMatrix::from_fn(idx.len(), idx.len(), |i, j| m[(idx[i], idx[j])])
}

fn dense_eig(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = m.nrows();
    if n == 1 {
        return (vec![m[(0, 0)].re], CMatrix::identity(1, 1));
    }
    let eig = m.clone().symmetric_eigen();
    (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues sorted descending.
pub fn hermitian_eig(m: &HermitianMatrix) -> EigenSystem {
    let n = m.dim();
    let blocks = block_components(&[m.as_matrix()]);
    let mut pairs: Vec<(f64, usize, CMatrix)> = Vec::with_capacity(n);
    if blocks.len() <= 1 {
        let (vals, vecs) = dense_eig(m.as_matrix());
        for (k, v) in vals.into_iter().enumerate() {
            pairs.push((v, k, CMatrix::from_column_slice(n, 1, vecs.column(k).into_owned().as_slice())));
        }
    } else {
        for idx in &blocks {
            let (vals, vecs) = dense_eig(&sub_block(m.as_matrix(), idx));
            for (k, v) in vals.into_iter().enumerate() {
                let mut full = CMatrix::zeros(n, 1);
                for (r, &i) in idx.iter().enumerate() {
                    full[(i, 0)] = vecs[(r, k)];
                }
                pairs.push((v, pairs.len(), full));
            }
        }
    }
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    let mut eigenvectors = CMatrix::zeros(n, n);
    let mut eigenvalues = Vec::with_capacity(n);
    for (k, (v, _, col)) in pairs.into_iter().enumerate() {
        eigenvalues.push(v);
        eigenvectors.set_column(k, &col.column(0));
    }
    EigenSystem {
        eigenvalues,
        eigenvectors,
    }
}

/// Scalar functions applied to the spectrum of a PSD matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MatrixFunction {
    Sqrt,
    Power(f64),
    Log,
}

impl MatrixFunction {
    /// Value on a strictly positive eigenvalue.
    fn on_positive(self, x: f64) -> f64 {
        match self {
            MatrixFunction::Sqrt => x.sqrt(),
            MatrixFunction::Power(s) => x.powf(s),
            MatrixFunction::Log => x.ln(),
        }
    }
}

/// Checks an eigen-spectrum for positive semidefiniteness and returns the
/// clamp threshold below which eigenvalues count as zero.
pub(crate) fn psd_clamp(eig: &EigenSystem) -> Result<f64> {
    let largest = eig.eigenvalues.first().copied().unwrap_or(0.0).max(0.0);
    let radius = eig.spectral_radius();
    if let Some(&min) = eig.eigenvalues.last() {
        if min < -PSD_TOL * radius {
            return Err(QrocError::NotPositiveSemidefinite {
                min_eigenvalue: min,
            });
        }
    }
    Ok(CLAMP_TOL * largest)
}

/// Applies `f` to a PSD matrix through its spectrum. Eigenvalues below the
/// clamp threshold are exact zeros: `0^s = 0` (including `s = 0`, so the
/// result is supported on the support of `m`) and the logarithm is
/// restricted to the support.
pub fn psd_matrix_function(m: &HermitianMatrix, f: MatrixFunction) -> Result<HermitianMatrix> {
    let eig = hermitian_eig(m);
    psd_function_of(&eig, f)
}

pub(crate) fn psd_function_of(eig: &EigenSystem, f: MatrixFunction) -> Result<HermitianMatrix> {
    let clamp = psd_clamp(eig)?;
    let out = eig.reconstruct_with(|l| if l > clamp { f.on_positive(l) } else { 0.0 });
    Ok(HermitianMatrix::hermitian_part(out))
}

/// Sum of absolute eigenvalues.
pub fn trace_norm(m: &HermitianMatrix) -> f64 {
    hermitian_eig(m).eigenvalues.iter().map(|l| l.abs()).sum()
}

/// Trace norm of an arbitrary square matrix (sum of singular values).
pub fn general_trace_norm(m: &CMatrix) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    m.clone().singular_values().iter().sum()
}

/// Orthogonal projectors onto the positive, negative and (numerically)
/// null eigenspaces of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct SignedProjectors {
    pub plus: HermitianMatrix,
    pub minus: HermitianMatrix,
    pub zero: HermitianMatrix,
    /// Threshold actually used to classify eigenvalues as zero.
    pub zero_tol: f64,
    pub eigen: EigenSystem,
}

/// Default zero threshold: relative to the spectral radius, with an
/// absolute floor.
pub fn default_zero_tol(spectral_radius: f64) -> f64 {
    (ZERO_TOL_REL * spectral_radius).max(ZERO_TOL_ABS)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Sign {
    Plus,
    Minus,
    Zero,
}

/// Classifies eigenvalues (sorted descending) into signs. Runs of eigenvalues
/// separated by gaps below `zero_tol` form clusters; a cluster touching the
/// zero band is assigned to it as a whole.
pub(crate) fn classify(eigenvalues: &[f64], zero_tol: f64) -> Vec<Sign> {
    let n = eigenvalues.len();
    let mut out = vec![Sign::Zero; n];
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && eigenvalues[end - 1] - eigenvalues[end] < zero_tol {
            end += 1;
        }
        let cluster = &eigenvalues[start..end];
        let sign = if cluster.iter().any(|l| l.abs() <= zero_tol) {
            Sign::Zero
        } else if cluster[0] > 0.0 {
            Sign::Plus
        } else {
            Sign::Minus
        };
        out[start..end].iter_mut().for_each(|s| *s = sign);
        start = end;
    }
    out
}

/// Splits the space by the sign of the spectrum of `m`. `zero_tol = None`
/// picks [`default_zero_tol`].
pub fn signed_projectors(m: &HermitianMatrix, zero_tol: Option<f64>) -> SignedProjectors {
    let eigen = hermitian_eig(m);
    let tol = zero_tol.unwrap_or_else(|| default_zero_tol(eigen.spectral_radius()));
    let signs = classify(&eigen.eigenvalues, tol);
    let plus = eigen.projector(|k| signs[k] == Sign::Plus);
    let minus = eigen.projector(|k| signs[k] == Sign::Minus);
    let zero = eigen.projector(|k| signs[k] == Sign::Zero);
    SignedProjectors {
        plus,
        minus,
        zero,
        zero_tol: tol,
        eigen,
    }
}

/// `Re Tr[A B]` for Hermitian `A`, `B`.
pub fn trace_product(a: &HermitianMatrix, b: &HermitianMatrix) -> f64 {
    let (a, b) = (a.as_matrix(), b.as_matrix());
    let n = a.nrows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            acc += (a[(i, j)] * b[(j, i)]).re;
        }
    }
    acc
}

pub fn frobenius_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}
