use nalgebra::DMatrix;
use num_complex::Complex64;

use super::density::{max_abs_diff, DensityMatrix};
use super::CMatrix;
use crate::error::{CoherenceError, Result};
use crate::tolerance::ToleranceConfig;

/// A single `dim_out x dim_in` Kraus operator.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausOperator(pub CMatrix);

impl KrausOperator {
    pub fn new(matrix: CMatrix) -> Self {
        Self(matrix)
    }

    pub fn identity(dim: usize) -> Self {
        Self(DMatrix::identity(dim, dim))
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn dim_in(&self) -> usize {
        self.0.ncols()
    }

    pub fn dim_out(&self) -> usize {
        self.0.nrows()
    }

    pub fn adjoint(&self) -> KrausOperator {
        KrausOperator(self.0.adjoint())
    }

    /// True when every column has at most one entry with modulus above `zero_tol`.
    pub fn is_incoherent(&self, zero_tol: f64) -> bool {
        self.0
            .column_iter()
            .all(|col| col.iter().filter(|z| z.norm() > zero_tol).count() <= 1)
    }

    pub(crate) fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// A trace-preserving Kraus list: `sum_n K_n^dag K_n = I`.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    kraus: Vec<KrausOperator>,
}

impl Channel {
    pub fn new(kraus: Vec<KrausOperator>) -> Result<Self> {
        Self::with_tolerance(kraus, &ToleranceConfig::default())
    }

    pub fn with_tolerance(kraus: Vec<KrausOperator>, tol: &ToleranceConfig) -> Result<Self> {
        let first = kraus
            .first()
            .ok_or_else(|| CoherenceError::InvalidChannel("no Kraus operators".into()))?;
        let (rows, cols) = first.0.shape();
        if rows == 0 || cols == 0 {
            return Err(CoherenceError::InvalidChannel(
                "empty Kraus operator".into(),
            ));
        }
        for (n, k) in kraus.iter().enumerate() {
            if k.0.shape() != (rows, cols) {
                return Err(CoherenceError::ShapeMismatch(format!(
                    "kraus[{n}] is {}x{}, expected {rows}x{cols}",
                    k.0.nrows(),
                    k.0.ncols()
                )));
            }
            if k.0.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
                return Err(CoherenceError::InvalidChannel(format!(
                    "kraus[{n}] has a non-finite entry"
                )));
            }
        }
        let channel = Self { kraus };
        let residual = channel.completeness_residual();
        if residual > tol.complete_tol {
            return Err(CoherenceError::IncompleteChannel { residual });
        }
        Ok(channel)
    }

    /// Single-Kraus identity channel.
    pub fn identity(dim: usize) -> Self {
        Self {
            kraus: vec![KrausOperator::identity(dim)],
        }
    }

    pub fn kraus(&self) -> &[KrausOperator] {
        &self.kraus
    }

    pub fn len(&self) -> usize {
        self.kraus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kraus.is_empty()
    }

    pub fn dim_in(&self) -> usize {
        self.kraus[0].dim_in()
    }

    pub fn dim_out(&self) -> usize {
        self.kraus[0].dim_out()
    }

    /// `max |sum_n K_n^dag K_n - I|` entrywise.
    pub fn completeness_residual(&self) -> f64 {
        let d = self.dim_in();
        let sum = self
            .kraus
            .iter()
            .fold(DMatrix::<Complex64>::zeros(d, d), |acc, k| {
                acc + k.0.adjoint() * &k.0
            });
        max_abs_diff(&sum, &DMatrix::identity(d, d))
    }

    pub fn is_complete(&self, tol: &ToleranceConfig) -> bool {
        self.completeness_residual() <= tol.complete_tol
    }

    /// See [`is_incoherent`].
    pub fn is_incoherent(&self, tol: &ToleranceConfig) -> bool {
        self.kraus.iter().all(|k| k.is_incoherent(tol.nonneg_tol))
    }

    /// Applies `self` first, then `second`: Kraus set `{L_m K_n}`.
    ///
    /// No pruning; see [`Channel::pruned`].
    pub fn then(&self, second: &Channel) -> Result<Channel> {
        if self.dim_out() != second.dim_in() {
            return Err(CoherenceError::ShapeMismatch(format!(
                "first channel outputs dimension {}, second expects {}",
                self.dim_out(),
                second.dim_in()
            )));
        }
        let kraus = second
            .kraus
            .iter()
            .flat_map(|l| self.kraus.iter().map(move |k| KrausOperator(&l.0 * &k.0)))
            .collect();
        Ok(Channel { kraus })
    }

    /// Drops Kraus operators whose largest entry is at most `zero_tol`.
    /// Keeps at least one operator.
    pub fn pruned(mut self, zero_tol: f64) -> Channel {
        if self.kraus.len() > 1 {
            let keep: Vec<KrausOperator> = self
                .kraus
                .iter()
                .filter(|k| k.max_abs() > zero_tol)
                .cloned()
                .collect();
            if !keep.is_empty() {
                self.kraus = keep;
            }
        }
        self
    }

    /// Wraps every Kraus operator as `post * K * pre`.
    pub(crate) fn conjugated(&self, pre: &CMatrix, post: &CMatrix) -> Channel {
        Channel {
            kraus: self
                .kraus
                .iter()
                .map(|k| KrausOperator(post * &k.0 * pre))
                .collect(),
        }
    }

    pub(crate) fn from_kraus_unchecked(kraus: Vec<KrausOperator>) -> Channel {
        Channel { kraus }
    }
}

/// `sum_n K_n rho K_n^dag`.
pub fn apply(ch: &Channel, rho: &DensityMatrix) -> Result<DensityMatrix> {
    apply_with(ch, rho, &ToleranceConfig::default())
}

pub fn apply_with(
    ch: &Channel,
    rho: &DensityMatrix,
    tol: &ToleranceConfig,
) -> Result<DensityMatrix> {
    if ch.dim_in() != rho.dim() {
        return Err(CoherenceError::DimensionMismatch {
            expected: ch.dim_in(),
            found: rho.dim(),
        });
    }
    let residual = ch.completeness_residual();
    if residual > tol.complete_tol {
        return Err(CoherenceError::IncompleteChannel { residual });
    }
    let d = ch.dim_out();
    let out = ch
        .kraus
        .iter()
        .fold(DMatrix::<Complex64>::zeros(d, d), |acc, k| {
            acc + &k.0 * rho.matrix() * k.0.adjoint()
        });
    DensityMatrix::with_tolerance(out, tol)
}

/// True iff every column of every Kraus operator has at most one entry
/// with modulus above `nonneg_tol`.
pub fn is_incoherent(ch: &Channel, tol: &ToleranceConfig) -> bool {
    ch.is_incoherent(tol)
}
