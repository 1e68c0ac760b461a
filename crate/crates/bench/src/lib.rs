//! Fixed inputs shared by the benchmarks.

use qroc_core::gaussian::tmsv_through_thermal_loss;
use qroc_core::{DensityMatrix, GaussianState};

/// Deterministic full-rank real density matrix of dimension `dim`.
pub fn dense_state(dim: usize, seed: f64) -> DensityMatrix {
    let a: Vec<Vec<f64>> = (0..dim)
        .map(|i| (0..dim).map(|j| (1.3 * i as f64 + 0.7 * j as f64 + seed).sin()).collect())
        .collect();
    let mut rows = vec![vec![0.0; dim]; dim];
    for i in 0..dim {
        for j in 0..dim {
            rows[i][j] = (0..dim).map(|k| a[i][k] * a[j][k]).sum::<f64>() + if i == j { 0.1 } else { 0.0 };
        }
    }
    let trace: f64 = (0..dim).map(|i| rows[i][i]).sum();
    rows.iter_mut().flatten().for_each(|v| *v /= trace);
    DensityMatrix::from_real_rows(&rows).expect("positive by construction")
}

pub fn qutrit_pair() -> (DensityMatrix, DensityMatrix) {
    (
        DensityMatrix::from_diagonal(&[0.6, 0.2, 0.2]).unwrap(),
        DensityMatrix::from_real_rows(&[vec![0.6, 0.1, 0.1], vec![0.1, 0.2, 0.1], vec![0.1, 0.1, 0.2]]).unwrap(),
    )
}

/// Two lossy two-mode squeezed states.
pub fn lossy_pair() -> (GaussianState, GaussianState) {
    (
        tmsv_through_thermal_loss(4.0, 0.7, 0.4).unwrap(),
        tmsv_through_thermal_loss(4.0, 0.3, 0.6).unwrap(),
    )
}
