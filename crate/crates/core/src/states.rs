//! Finite-dimensional density matrices, fidelity, and the overlap
//! decomposition `Q_s = Σ c λ^s μ^(1-s)` behind the Chernoff-type bounds.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{check_unit_interval, QrocError, Result};
use crate::linalg::{
    block_components, general_trace_norm, hermitian_eig, psd_clamp, psd_function_of, sub_block,
    CMatrix, HermitianMatrix, MatrixFunction,
};
use crate::optimize::golden_section_min;

/// Allowed deviation of the trace from one.
pub const TRACE_TOL: f64 = 1e-8;
/// Overlap terms with weight below this are dropped.
pub const OVERLAP_DROP: f64 = 1e-14;
/// Mass against a null target eigenvalue beyond which a relative entropy
/// is declared infinite.
pub const DIVERGENCE_MASS: f64 = 1e-12;

/// A validated quantum state: Hermitian, PSD and of unit trace.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    m: HermitianMatrix,
}

/// Validates a Hermitian matrix as a density matrix.
pub fn validate_density(matrix: HermitianMatrix) -> Result<DensityMatrix> {
    let eig = hermitian_eig(&matrix);
    psd_clamp(&eig)?;
    let trace = matrix.trace();
    if (trace - 1.0).abs() > TRACE_TOL {
        return Err(QrocError::TraceNotOne { trace });
    }
    Ok(DensityMatrix { m: matrix })
}

impl DensityMatrix {
    pub fn new(matrix: HermitianMatrix) -> Result<Self> {
        validate_density(matrix)
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        validate_density(HermitianMatrix::from_real_rows(rows)?)
    }

    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        validate_density(HermitianMatrix::from_real_diagonal(diag))
    }

    /// The projector onto a (normalized) state vector.
    pub fn pure(amplitudes: &[Complex64]) -> Result<Self> {
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(QrocError::Malformed("zero state vector".into()));
        }
        let v = DMatrix::from_iterator(amplitudes.len(), 1, amplitudes.iter().map(|a| a / norm));
        Ok(DensityMatrix {
            m: HermitianMatrix::hermitian_part(&v * v.adjoint()),
        })
    }

    /// Wraps a matrix already known to be a state, skipping validation.
    pub(crate) fn from_trusted(m: HermitianMatrix) -> Self {
        DensityMatrix { m }
    }

    pub fn dim(&self) -> usize {
        self.m.dim()
    }

    pub fn matrix(&self) -> &HermitianMatrix {
        &self.m
    }

    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        DensityMatrix {
            m: self.m.kron(&other.m),
        }
    }

    /// `self^{⊗n}`.
    pub fn tensor_power(&self, n: usize) -> DensityMatrix {
        let mut out = self.clone();
        for _ in 1..n.max(1) {
            out = out.tensor(self);
        }
        out
    }
}

pub(crate) fn check_dims(a: &DensityMatrix, b: &DensityMatrix) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(QrocError::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    Ok(())
}

/// Fidelity `‖√ρ1 √ρ2‖₁`. Block-diagonal pairs (sharing an exact zero
/// pattern) are processed block by block.
pub fn fidelity(rho1: &DensityMatrix, rho2: &DensityMatrix) -> Result<f64> {
    check_dims(rho1, rho2)?;
    fidelity_of_psd(rho1.matrix().as_matrix(), rho2.matrix().as_matrix())
}

/// `‖√A √B‖₁` for PSD `A`, `B` of any trace.
pub(crate) fn fidelity_of_psd(a: &CMatrix, b: &CMatrix) -> Result<f64> {
    let mut total = 0.0;
    for idx in block_components(&[a, b]) {
        let sa = HermitianMatrix::hermitian_part(sub_block(a, &idx));
        let sb = HermitianMatrix::hermitian_part(sub_block(b, &idx));
        let ra = psd_function_of(&hermitian_eig(&sa), MatrixFunction::Sqrt)?;
        let rb = psd_function_of(&hermitian_eig(&sb), MatrixFunction::Sqrt)?;
        total += general_trace_norm(&(ra.as_matrix() * rb.as_matrix()));
    }
    Ok(total)
}

/// One term `c λ^s μ^(1-s)` of the overlap decomposition: `λ` is an
/// eigenvalue of ρ2, `μ` of ρ1, `c` the squared eigenvector overlap.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OverlapTerm {
    pub c: f64,
    pub lambda: f64,
    pub mu: f64,
}

/// Flattened eigen-overlap decomposition of a state pair.
#[derive(Clone, Debug, PartialEq)]
pub struct OverlapDecomposition {
    pub entries: Vec<OverlapTerm>,
}

fn clamped_spectrum(m: &HermitianMatrix) -> Result<(Vec<f64>, CMatrix)> {
    let eig = hermitian_eig(m);
    let clamp = psd_clamp(&eig)?;
    let vals = eig
        .eigenvalues
        .iter()
        .map(|&l| if l > clamp { l } else { 0.0 })
        .collect();
    Ok((vals, eig.eigenvectors))
}

/// Builds `{c_ij, λ_j, μ_i}` from the eigenbases of ρ1 (`μ`, `f_i`) and
/// ρ2 (`λ`, `e_j`) with `c_ij = |⟨e_j|f_i⟩|²`. Terms null on both sides
/// never contribute and are omitted.
pub fn overlap_decomposition(rho1: &DensityMatrix, rho2: &DensityMatrix) -> Result<OverlapDecomposition> {
    check_dims(rho1, rho2)?;
    let (mu, f) = clamped_spectrum(rho1.matrix())?;
    let (lambda, e) = clamped_spectrum(rho2.matrix())?;
    let overlaps = e.adjoint() * &f;
    let mut entries = Vec::with_capacity(mu.len() * lambda.len());
    for (i, &m) in mu.iter().enumerate() {
        for (j, &l) in lambda.iter().enumerate() {
            let c = overlaps[(j, i)].norm_sqr();
            if c >= OVERLAP_DROP && (l > 0.0 || m > 0.0) {
                entries.push(OverlapTerm { c, lambda: l, mu: m });
            }
        }
    }
    Ok(OverlapDecomposition { entries })
}

/// `x^e` with the support convention `0^e = 0` for every `e`.
fn pow0(x: f64, e: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x.powf(e)
    }
}

impl OverlapDecomposition {
    /// `(Σ c μ, Σ c λ)`, which reconstruct `Tr ρ1` and `Tr ρ2`.
    pub fn trace_sums(&self) -> (f64, f64) {
        self.entries
            .iter()
            .fold((0.0, 0.0), |(a, b), t| (a + t.c * t.mu, b + t.c * t.lambda))
    }

    fn value_unchecked(&self, s: f64) -> f64 {
        self.entries
            .iter()
            .map(|t| t.c * pow0(t.lambda, s) * pow0(t.mu, 1.0 - s))
            .sum()
    }

    fn derivative_unchecked(&self, s: f64) -> f64 {
        self.entries
            .iter()
            .map(|t| {
                let w = t.c * pow0(t.lambda, s) * pow0(t.mu, 1.0 - s);
                if w == 0.0 {
                    0.0
                } else {
                    w * (t.lambda.ln() - t.mu.ln())
                }
            })
            .sum()
    }

    /// The decomposition of the `n`-fold tensor power of the pair.
    pub fn tensor_power(&self, n: usize) -> OverlapDecomposition {
        let mut out = self.clone();
        for _ in 1..n.max(1) {
            let mut next = Vec::with_capacity(out.entries.len() * self.entries.len());
            for a in &out.entries {
                for b in &self.entries {
                    next.push(OverlapTerm {
                        c: a.c * b.c,
                        lambda: a.lambda * b.lambda,
                        mu: a.mu * b.mu,
                    });
                }
            }
            out.entries = next;
        }
        out
    }
}

/// `Q_s = Tr[ρ2^s ρ1^(1-s)]`.
pub fn q_s(d: &OverlapDecomposition, s: f64) -> Result<f64> {
    check_unit_interval("s", s)?;
    Ok(d.value_unchecked(s))
}

/// `dQ_s/ds`, one-sided at the endpoints. Terms whose weight vanishes
/// (a null eigenvalue raised to a positive power) contribute nothing.
pub fn q_s_derivative(d: &OverlapDecomposition, s: f64) -> Result<f64> {
    check_unit_interval("s", s)?;
    Ok(d.derivative_unchecked(s))
}

/// Anything that can evaluate `s ↦ (Q_s, dQ_s/ds)` on `[0, 1]`.
pub trait QsEvaluator: Sync {
    fn value(&self, s: f64) -> f64;
    fn derivative(&self, s: f64) -> f64;

    /// `d ln Q_s / ds`.
    fn log_derivative(&self, s: f64) -> f64 {
        self.derivative(s) / self.value(s)
    }
}

impl QsEvaluator for OverlapDecomposition {
    fn value(&self, s: f64) -> f64 {
        self.value_unchecked(s.clamp(0.0, 1.0))
    }

    fn derivative(&self, s: f64) -> f64 {
        self.derivative_unchecked(s.clamp(0.0, 1.0))
    }
}

impl<E: QsEvaluator + ?Sized> QsEvaluator for &E {
    fn value(&self, s: f64) -> f64 {
        (**self).value(s)
    }
    fn derivative(&self, s: f64) -> f64 {
        (**self).derivative(s)
    }
    fn log_derivative(&self, s: f64) -> f64 {
        (**self).log_derivative(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EntropyUnit {
    Nats,
    Bits,
}

/// `S(ρ1‖ρ2)` and `S(ρ2‖ρ1)`; `f64::INFINITY` when support containment fails.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RelativeEntropies {
    pub s12: f64,
    pub s21: f64,
    pub unit: EntropyUnit,
}

impl RelativeEntropies {
    pub fn to_bits(self) -> RelativeEntropies {
        match self.unit {
            EntropyUnit::Bits => self,
            EntropyUnit::Nats => RelativeEntropies {
                s12: self.s12 / std::f64::consts::LN_2,
                s21: self.s21 / std::f64::consts::LN_2,
                unit: EntropyUnit::Bits,
            },
        }
    }
}

fn directed_entropy<'a>(terms: impl Iterator<Item = (f64, f64, f64)> + 'a) -> f64 {
    // (c, a, b) -> Σ c a (ln a - ln b)
    let mut acc = 0.0;
    for (c, a, b) in terms {
        let mass = c * a;
        if mass == 0.0 {
            continue;
        }
        if b <= 0.0 {
            if mass > DIVERGENCE_MASS {
                return f64::INFINITY;
            }
            continue;
        }
        acc += mass * (a.ln() - b.ln());
    }
    acc.max(0.0)
}

pub fn relative_entropies(d: &OverlapDecomposition, unit: EntropyUnit) -> RelativeEntropies {
    let s12 = directed_entropy(d.entries.iter().map(|t| (t.c, t.mu, t.lambda)));
    let s21 = directed_entropy(d.entries.iter().map(|t| (t.c, t.lambda, t.mu)));
    let nats = RelativeEntropies {
        s12,
        s21,
        unit: EntropyUnit::Nats,
    };
    match unit {
        EntropyUnit::Nats => nats,
        EntropyUnit::Bits => nats.to_bits(),
    }
}

/// Location and value of the quantum Chernoff optimum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ChernoffOptimum {
    pub s_star: f64,
    pub q_star: f64,
}

/// Tolerance on `s` for the Chernoff search.
pub const CHERNOFF_S_TOL: f64 = 1e-10;

/// Minimizes the log-convex `Q_s` over `[0, 1]`. A flat `Q_s` (identical
/// states) reports `s* = 1/2`.
pub fn chernoff_s_star<E: QsEvaluator + ?Sized>(q: &E) -> ChernoffOptimum {
    let probe: Vec<f64> = (0..=64).map(|i| q.value(i as f64 / 64.0)).collect();
    let (lo, hi) = probe
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    if hi - lo <= 1e-14 {
        return ChernoffOptimum {
            s_star: 0.5,
            q_star: q.value(0.5),
        };
    }
    let (s_star, q_star) = golden_section_min(|s| q.value(s), 0.0, 1.0, CHERNOFF_S_TOL);
    ChernoffOptimum { s_star, q_star }
}
