//! Coherence measures for pure states and the skew-information
//! counterexample.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{CoherenceError, Result};
use crate::majorization;
use crate::model::{
    apply_with, fidelity_to_pure, hermiticity_residual, CMatrix, DensityMatrix, ProbabilityProfile,
    PureState,
};
use crate::synthesis;
use crate::tolerance::ToleranceConfig;

/// A Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Observable {
    matrix: CMatrix,
}

impl Observable {
    pub fn new(matrix: CMatrix, tol: &ToleranceConfig) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() || matrix.nrows() == 0 {
            return Err(CoherenceError::InvalidObservable(format!(
                "observable must be square and nonempty, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let herm = hermiticity_residual(&matrix);
        if herm > tol.herm_tol {
            return Err(CoherenceError::InvalidObservable(format!(
                "not Hermitian (residual {herm:e})"
            )));
        }
        Ok(Self { matrix })
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let d = values.len();
        let mut matrix = DMatrix::zeros(d, d);
        for (k, &v) in values.iter().enumerate() {
            matrix[(k, k)] = Complex64::new(v, 0.0);
        }
        Self { matrix }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }
}

/// Sum of the `d - l + 1` smallest entries (1-based `l`, `1 <= l <= d`).
pub fn tail_sum(p: &ProbabilityProfile, l: usize) -> Result<f64> {
    let d = p.len();
    if l == 0 || l > d {
        return Err(CoherenceError::IndexOutOfRange { index: l, dim: d });
    }
    let (sorted, _) = majorization::sort_desc(p);
    Ok(sorted.entries()[l - 1..].iter().sum())
}

/// `C_l(|s><s|)`: the tail sum of the sorted profile from position `l`
/// (1-based, `2 <= l <= dim`).
pub fn c_l(s: &PureState, l: usize) -> Result<f64> {
    if l < 2 || l > s.dim() {
        return Err(CoherenceError::IndexOutOfRange {
            index: l,
            dim: s.dim(),
        });
    }
    tail_sum(&s.profile(), l)
}

/// All of `C_2, ..., C_d`.
pub fn c_l_all(s: &PureState) -> Vec<f64> {
    (2..=s.dim())
        .map(|l| c_l(s, l).expect("l in range"))
        .collect()
}

/// `sqrt(rho)` by Hermitian eigendecomposition.
///
/// Eigenvalues at or below the round-off floor `64 d eps` count as zero.
pub fn sqrt_psd(rho: &DensityMatrix) -> CMatrix {
    let floor = 64.0 * rho.dim() as f64 * f64::EPSILON;
    let eig = rho.matrix().clone().symmetric_eigen();
    let roots: Vec<Complex64> = eig
        .eigenvalues
        .iter()
        .map(|&l| Complex64::new(if l > floor { l.sqrt() } else { 0.0 }, 0.0))
        .collect();
    let v = &eig.eigenvectors;
    v * DMatrix::from_diagonal(&nalgebra::DVector::from_vec(roots)) * v.adjoint()
}

/// Skew information `-1/2 Tr([sqrt(rho), K]^2)`.
pub fn skew_information(rho: &DensityMatrix, k: &Observable) -> Result<f64> {
    if rho.dim() != k.dim() {
        return Err(CoherenceError::DimensionMismatch {
            expected: rho.dim(),
            found: k.dim(),
        });
    }
    let root = sqrt_psd(rho);
    let comm = &root * k.matrix() - k.matrix() * &root;
    Ok(-0.5 * (&comm * &comm).trace().re)
}

/// Outcome of running the skew-information counterexample.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotoneReport {
    pub majorized: bool,
    pub skew_before: f64,
    pub skew_after: f64,
    pub violation: bool,
    pub cl_before: Vec<f64>,
    pub cl_after: Vec<f64>,
    pub cl_decreased: bool,
    pub channel_incoherent: bool,
    pub completeness_residual: f64,
    pub output_fidelity: f64,
}

/// Converts the maximally coherent qutrit into `(|1> + |2>)/sqrt(2)` with a
/// synthesized incoherent channel and measures skew information with
/// `K = diag(1, 10, 5)` before and after.
///
/// Skew information rises from 122/9 to 81/4 even though the conversion is
/// incoherent, while every `C_l` falls.
pub fn check_monotone_violation(tol: &ToleranceConfig) -> Result<MonotoneReport> {
    let psi = PureState::maximally_coherent(3)?;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let phi = PureState::from_real(&[h, h, 0.0])?;
    let k = Observable::diagonal(&[1.0, 10.0, 5.0]);

    let majorized = majorization::majorizes(&psi.profile(), &phi.profile(), tol)?;
    let channel = synthesis::synthesize(&psi, &phi, tol)?;
    let out = apply_with(&channel, &DensityMatrix::from_pure(&psi), tol)?;

    let skew_before = skew_information(&DensityMatrix::from_pure(&psi), &k)?;
    let skew_after = skew_information(&out, &k)?;

    let cl_before = c_l_all(&psi);
    let cl_after = c_l_all(&phi);
    let cl_decreased = cl_before
        .iter()
        .zip(&cl_after)
        .all(|(b, a)| a <= &(b + tol.major_tol));

    Ok(MonotoneReport {
        majorized,
        skew_before,
        skew_after,
        violation: skew_after > skew_before + tol.purity_tol,
        cl_before,
        cl_after,
        cl_decreased,
        channel_incoherent: channel.is_incoherent(tol),
        completeness_residual: channel.completeness_residual(),
        output_fidelity: fidelity_to_pure(&out, &phi)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real(v: &[f64]) -> PureState {
        PureState::from_real(v).unwrap()
    }

    #[test]
    fn c_l_examples() {
        let s = PureState::maximally_coherent(3).unwrap();
        assert!((c_l(&s, 2).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!((c_l(&s, 3).unwrap() - 1.0 / 3.0).abs() < 1e-15);

        let e1 = PureState::basis(3, 0).unwrap();
        assert_eq!(c_l(&e1, 2).unwrap(), 0.0);
        assert_eq!(c_l(&e1, 3).unwrap(), 0.0);

        let h = std::f64::consts::FRAC_1_SQRT_2;
        let s = real(&[h, h, 0.0]);
        assert_eq!(c_l(&s, 3).unwrap(), 0.0);
        assert!((c_l(&s, 2).unwrap() - 0.5).abs() < 1e-15);

        assert!(c_l(&s, 1).is_err());
        assert!(c_l(&s, 4).is_err());
    }

    #[test]
    fn skew_information_examples() {
        let k = Observable::diagonal(&[1.0, 10.0, 5.0]);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let phi = DensityMatrix::from_pure(&real(&[h, h, 0.0]));
        assert!((skew_information(&phi, &k).unwrap() - 81.0 / 4.0).abs() < 1e-12);
        let psi = DensityMatrix::from_pure(&PureState::maximally_coherent(3).unwrap());
        assert!((skew_information(&psi, &k).unwrap() - 122.0 / 9.0).abs() < 1e-12);

        let diag = DensityMatrix::diagonal(&ProbabilityProfile::new(vec![0.2, 0.5, 0.3]).unwrap());
        assert!(skew_information(&diag, &k).unwrap().abs() < 1e-14);

        let wrong = Observable::diagonal(&[1.0, 2.0]);
        assert!(matches!(
            skew_information(&diag, &wrong),
            Err(CoherenceError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn observable_must_be_hermitian() {
        let tol = ToleranceConfig::default();
        let c = |re: f64, im: f64| Complex64::new(re, im);
        let m =
            DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 1.0), c(0.0, 1.0), c(2.0, 0.0)]);
        assert!(Observable::new(m, &tol).is_err());
        let m =
            DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(2.0, 0.0)]);
        assert!(Observable::new(m, &tol).is_ok());
    }

    #[test]
    fn counterexample_report() {
        let report = check_monotone_violation(&ToleranceConfig::default()).unwrap();
        assert!(report.majorized);
        assert!(report.violation);
        assert!((report.skew_before - 122.0 / 9.0).abs() < 1e-12);
        assert!((report.skew_after - 81.0 / 4.0).abs() < 1e-8);
        assert!(report.cl_decreased);
        assert!((report.cl_before[0] - 2.0 / 3.0).abs() < 1e-15);
        assert!((report.cl_after[0] - 0.5).abs() < 1e-15);
        assert!((report.cl_before[1] - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(report.cl_after[1], 0.0);
        assert!(report.channel_incoherent);
        assert!(report.completeness_residual <= 1e-9);
    }
}
