#![allow(dead_code)]

use num_complex::Complex64;
use qroc_core::linalg::{psd_matrix_function, trace_product, MatrixFunction};
use qroc_core::{CMatrix, DensityMatrix, HermitianMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian_complex(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Ginibre-ensemble density matrix; full rank with probability one.
pub fn random_density(rng: &mut ChaCha8Rng, dim: usize) -> DensityMatrix {
    let g = CMatrix::from_fn(dim, dim, |_, _| gaussian_complex(rng));
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    DensityMatrix::new(HermitianMatrix::hermitian_part(m / Complex64::new(tr, 0.0))).unwrap()
}

/// Full-rank state with spectrum bounded away from zero.
pub fn random_mixed(rng: &mut ChaCha8Rng, dim: usize, floor: f64) -> DensityMatrix {
    let raw = random_density(rng, dim);
    let mixed = raw
        .matrix()
        .combine(1.0 - floor, &HermitianMatrix::identity(dim), floor / dim as f64);
    DensityMatrix::new(mixed).unwrap()
}

pub fn random_pure(rng: &mut ChaCha8Rng, dim: usize) -> DensityMatrix {
    let v: Vec<Complex64> = (0..dim).map(|_| gaussian_complex(rng)).collect();
    DensityMatrix::pure(&v).unwrap()
}

/// `S(a‖b) = Tr a ln a - Tr a ln b` in nats, through matrix logarithms.
pub fn direct_relative_entropy(a: &DensityMatrix, b: &DensityMatrix) -> f64 {
    let la = psd_matrix_function(a.matrix(), MatrixFunction::Log).unwrap();
    let lb = psd_matrix_function(b.matrix(), MatrixFunction::Log).unwrap();
    trace_product(a.matrix(), &la) - trace_product(a.matrix(), &lb)
}

/// Lower ROC boundary of two classical distributions: outcomes are
/// assigned to "decide ρ1" in order of decreasing likelihood ratio, giving
/// the vertices `(β, α)`.
pub fn classical_roc_vertices(p1: &[f64], p2: &[f64]) -> Vec<(f64, f64)> {
    let mut order: Vec<usize> = (0..p1.len()).collect();
    order.sort_by(|&i, &j| (p1[j] * p2[i]).total_cmp(&(p1[i] * p2[j])));
    let mut beta = 0.0;
    let mut alpha = 1.0;
    let mut out = vec![(beta, alpha)];
    for i in order {
        beta += p2[i];
        alpha -= p1[i];
        out.push((beta, alpha.max(0.0)));
    }
    out
}

pub fn interpolate_vertices(v: &[(f64, f64)], beta: f64) -> f64 {
    for w in v.windows(2) {
        let (b0, a0) = w[0];
        let (b1, a1) = w[1];
        if beta >= b0 && beta <= b1 {
            if b1 - b0 < 1e-300 {
                return a0.min(a1);
            }
            return a0 + (a1 - a0) * (beta - b0) / (b1 - b0);
        }
    }
    v.last().unwrap().1
}

pub fn beta_grid(n: usize) -> Vec<f64> {
    (0..n).map(|i| i as f64 / (n - 1) as f64).collect()
}

/// Prints the one-line verdict used by the acceptance suite.
pub fn report(id: u32, name: &str, pass: bool, detail: &str) {
    println!("[{}] criterion {id:>2}: {name} ({detail})", if pass { "PASS" } else { "FAIL" });
}
