//! An incoherent channel sending every state to a fixed incoherent state.
//!
//! The channel dephases first, then applies the cyclic Kraus family
//! `A_i^dag`, which spreads any diagonal input onto `diag(mu)`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{CoherenceError, Result};
use crate::model::{CMatrix, Channel, DensityMatrix, KrausOperator, ProbabilityProfile};
use crate::tolerance::ToleranceConfig;

/// The diagonal `mu` of the incoherent target state.
#[derive(Debug, Clone, PartialEq)]
pub struct IncoherentTarget {
    pub mu: ProbabilityProfile,
}

impl IncoherentTarget {
    pub fn new(mu: ProbabilityProfile) -> Self {
        Self { mu }
    }

    /// Accepts only density matrices that are diagonal within `herm_tol`.
    pub fn from_density(sigma: &DensityMatrix, tol: &ToleranceConfig) -> Result<Self> {
        let off = sigma.max_off_diagonal();
        if off > tol.herm_tol {
            return Err(CoherenceError::InvalidDensityMatrix(format!(
                "target state is not incoherent (off-diagonal modulus {off:e})"
            )));
        }
        let mu = ProbabilityProfile::with_tolerance(sigma.diagonal_entries(), tol)?;
        Ok(Self { mu })
    }

    pub fn dim(&self) -> usize {
        self.mu.len()
    }
}

/// `A_i = sum_s sqrt(mu_{(s+i) mod d}) |s><(s+i) mod d|` for `i = 0..d`.
///
/// These satisfy `sum_i A_i A_i^dag = I`.
pub fn cyclic_kraus(mu: &ProbabilityProfile) -> Vec<KrausOperator> {
    let d = mu.len();
    (0..d)
        .map(|i| {
            let mut a = DMatrix::<Complex64>::zeros(d, d);
            for s in 0..d {
                let m = (s + i) % d;
                a[(s, m)] = Complex64::new(mu.entries()[m].sqrt(), 0.0);
            }
            KrausOperator(a)
        })
        .collect()
}

/// `Phi_2 ∘ Phi_1`: dephasing `{|k><k|}` followed by `{A_i^dag}`.
pub fn absorb_channel(target: &IncoherentTarget, d: usize) -> Result<Channel> {
    if target.dim() != d {
        return Err(CoherenceError::DimensionMismatch {
            expected: d,
            found: target.dim(),
        });
    }
    let dephasing: Vec<KrausOperator> = (0..d)
        .map(|k| {
            let mut p = DMatrix::<Complex64>::zeros(d, d);
            p[(k, k)] = Complex64::new(1.0, 0.0);
            KrausOperator(p)
        })
        .collect();
    let spread: Vec<KrausOperator> = cyclic_kraus(&target.mu)
        .iter()
        .map(KrausOperator::adjoint)
        .collect();
    let phi1 = Channel::new(dephasing)?;
    let phi2 = Channel::new(spread)?;
    Ok(phi1.then(&phi2)?.pruned(0.0))
}

/// The stochastic matrix `C[r][s] = mu_r` that `Phi_2` induces on
/// diagonals. Kraus operator `i` moves weight `lambda_s` to `(s+i) mod d`
/// scaled by `mu_{(s+i) mod d}`; summed over the cyclic shifts every input
/// weight is redistributed as `mu`.
pub fn diagonal_action(mu: &ProbabilityProfile) -> DMatrix<f64> {
    let d = mu.len();
    DMatrix::from_fn(d, d, |r, _| mu.entries()[r])
}

/// `sum_i A_i A_i^dag`.
pub fn cyclic_gram(ops: &[KrausOperator]) -> CMatrix {
    let d = ops[0].dim_out();
    ops.iter().fold(DMatrix::zeros(d, d), |acc, a| {
        acc + a.matrix() * a.matrix().adjoint()
    })
}
