//! JSON state documents.

use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;
use qroc_core::{CMatrix, DensityMatrix, GaussianState, HermitianMatrix, QrocError};
use serde::Deserialize;

use crate::failure::Failure;

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum StateSpec {
    Density {
        dim: usize,
        /// Rows of `[re, im]` pairs.
        matrix: Vec<Vec<[f64; 2]>>,
    },
    Gaussian {
        modes: usize,
        mean: Vec<f64>,
        cov: Vec<Vec<f64>>,
    },
    PureOverlap {
        fidelity: f64,
    },
}

/// A validated state.
#[derive(Debug, Clone)]
pub enum State {
    Density(DensityMatrix),
    Gaussian(GaussianState),
    PureOverlap(f64),
}

impl State {
    pub fn kind(&self) -> &'static str {
        match self {
            State::Density(_) => "density",
            State::Gaussian(_) => "gaussian",
            State::PureOverlap(_) => "pure-overlap",
        }
    }
}

fn malformed(msg: impl Into<String>) -> Failure {
    Failure::from(QrocError::Malformed(msg.into()))
}

impl StateSpec {
    pub fn validate(self) -> Result<State, Failure> {
        match self {
            StateSpec::Density { dim, matrix } => {
                if dim == 0 || matrix.len() != dim || matrix.iter().any(|r| r.len() != dim) {
                    return Err(malformed(format!("density matrix must be {dim}x{dim}")));
                }
                let m = CMatrix::from_fn(dim, dim, |i, j| Complex64::new(matrix[i][j][0], matrix[i][j][1]));
                let h = HermitianMatrix::new(m)?;
                Ok(State::Density(DensityMatrix::new(h)?))
            }
            StateSpec::Gaussian { modes, mean, cov } => {
                let n = 2 * modes;
                if modes == 0 || mean.len() != n || cov.len() != n || cov.iter().any(|r| r.len() != n) {
                    return Err(malformed(format!("gaussian state with {modes} modes needs a {n}-vector mean and {n}x{n} cov")));
                }
                let c = DMatrix::from_fn(n, n, |i, j| cov[i][j]);
                Ok(State::Gaussian(GaussianState::new(mean, c)?))
            }
            StateSpec::PureOverlap { fidelity } => {
                qroc_core::error::check_unit_interval("fidelity", fidelity)?;
                Ok(State::PureOverlap(fidelity))
            }
        }
    }
}

pub fn read_state(path: &Path) -> Result<State, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| malformed(format!("{}: {e}", path.display())))?;
    let spec: StateSpec = serde_json::from_str(&text).map_err(|e| malformed(format!("{}: {e}", path.display())))?;
    spec.validate()
}

/// The two hypotheses of a command. A pure pair given by its overlap may
/// be supplied as a single document.
#[derive(Debug, Clone)]
pub enum Pair {
    Density(DensityMatrix, DensityMatrix),
    Gaussian(GaussianState, GaussianState),
    PureOverlap(f64),
}

pub fn read_pair(first: &Path, second: Option<&Path>) -> Result<Pair, Failure> {
    let a = read_state(first)?;
    let b = match second {
        Some(p) => Some(read_state(p)?),
        None => None,
    };
    match (a, b) {
        (State::Density(x), Some(State::Density(y))) => {
            if x.dim() != y.dim() {
                return Err(QrocError::DimensionMismatch { left: x.dim(), right: y.dim() }.into());
            }
            Ok(Pair::Density(x, y))
        }
        (State::Gaussian(x), Some(State::Gaussian(y))) => {
            if x.modes != y.modes {
                return Err(QrocError::DimensionMismatch { left: x.modes, right: y.modes }.into());
            }
            Ok(Pair::Gaussian(x, y))
        }
        (State::PureOverlap(f), None) => Ok(Pair::PureOverlap(f)),
        (State::PureOverlap(f), Some(State::PureOverlap(g))) if f == g => Ok(Pair::PureOverlap(f)),
        (State::PureOverlap(_), Some(State::PureOverlap(_))) => {
            Err(malformed("the two pure-overlap documents disagree on the fidelity"))
        }
        (a, None) => Err(malformed(format!("a {} state needs a second state", a.kind()))),
        (a, Some(b)) => Err(malformed(format!("cannot pair a {} state with a {} state", a.kind(), b.kind()))),
    }
}

/// Two qubit pure states with the given overlap.
pub fn pure_pair(fidelity: f64) -> (DensityMatrix, DensityMatrix) {
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let a = DensityMatrix::pure(&[one, zero]).expect("unit vector");
    let b = DensityMatrix::pure(&[
        Complex64::new(fidelity, 0.0),
        Complex64::new((1.0 - fidelity * fidelity).max(0.0).sqrt(), 0.0),
    ])
    .expect("unit vector");
    (a, b)
}
