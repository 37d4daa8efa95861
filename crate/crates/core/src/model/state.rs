use num_complex::Complex64;

use crate::error::{CoherenceError, Result};
use crate::tolerance::ToleranceConfig;

/// A unit-norm amplitude vector in the fixed incoherent basis.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: Vec<Complex64>,
}

impl PureState {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        Self::with_tolerance(amplitudes, &ToleranceConfig::default())
    }

    pub fn with_tolerance(amplitudes: Vec<Complex64>, tol: &ToleranceConfig) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(CoherenceError::InvalidState(
                "dim must be at least 1".into(),
            ));
        }
        if amplitudes
            .iter()
            .any(|a| !(a.re.is_finite() && a.im.is_finite()))
        {
            return Err(CoherenceError::InvalidState("non-finite amplitude".into()));
        }
        let norm_sqr: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sqr - 1.0).abs() > tol.norm_tol {
            return Err(CoherenceError::InvalidState(format!(
                "squared norm is {norm_sqr}, expected 1"
            )));
        }
        Ok(Self { amplitudes })
    }

    /// Real amplitudes.
    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::new(amplitudes.iter().map(|&a| Complex64::new(a, 0.0)).collect())
    }

    /// Rescales an arbitrary nonzero vector to unit norm.
    pub fn normalized(amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(CoherenceError::InvalidState(
                "cannot normalize a zero vector".into(),
            ));
        }
        Self::new(amplitudes.into_iter().map(|a| a / norm).collect())
    }

    /// The state with amplitudes `sqrt(p_i)`.
    pub fn from_profile(p: &ProbabilityProfile) -> Self {
        let amps: Vec<Complex64> = p
            .entries()
            .iter()
            .map(|&x| Complex64::new(x.sqrt(), 0.0))
            .collect();
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        Self {
            amplitudes: amps.into_iter().map(|a| a / norm).collect(),
        }
    }

    /// Computational basis state `|index>` (0-based).
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(CoherenceError::IndexOutOfRange { index, dim });
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(Self { amplitudes })
    }

    /// The maximally coherent state with uniform amplitudes.
    pub fn maximally_coherent(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(CoherenceError::InvalidState(
                "dim must be at least 1".into(),
            ));
        }
        let a = Complex64::new(1.0 / (dim as f64).sqrt(), 0.0);
        Ok(Self {
            amplitudes: vec![a; dim],
        })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// The squared-modulus profile `(|a_1|^2, ..., |a_d|^2)`.
    pub fn profile(&self) -> ProbabilityProfile {
        ProbabilityProfile {
            entries: self.amplitudes.iter().map(|a| a.norm_sqr()).collect(),
        }
    }

    /// Tensor product; composite index `(i, j)` maps to `i * b.dim() + j`.
    pub fn tensor(&self, other: &PureState) -> PureState {
        let amplitudes = self
            .amplitudes
            .iter()
            .flat_map(|a| other.amplitudes.iter().map(move |b| a * b))
            .collect();
        PureState { amplitudes }
    }
}

/// Free-function form of [`PureState::profile`].
pub fn profile(s: &PureState) -> ProbabilityProfile {
    s.profile()
}

/// Free-function form of [`PureState::tensor`].
pub fn tensor(a: &PureState, b: &PureState) -> PureState {
    a.tensor(b)
}

/// A probability vector. Slightly negative entries (within `nonneg_tol`)
/// are clamped to zero on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityProfile {
    entries: Vec<f64>,
}

impl ProbabilityProfile {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        Self::with_tolerance(entries, &ToleranceConfig::default())
    }

    pub fn with_tolerance(mut entries: Vec<f64>, tol: &ToleranceConfig) -> Result<Self> {
        if entries.is_empty() {
            return Err(CoherenceError::InvalidProfile("profile is empty".into()));
        }
        for (k, e) in entries.iter_mut().enumerate() {
            if !e.is_finite() {
                return Err(CoherenceError::InvalidProfile(format!(
                    "entry {k} is not finite"
                )));
            }
            if *e < -tol.nonneg_tol {
                return Err(CoherenceError::InvalidProfile(format!(
                    "entry {k} is negative ({e})"
                )));
            }
            if *e < 0.0 {
                *e = 0.0;
            }
        }
        let total: f64 = entries.iter().sum();
        if (total - 1.0).abs() > tol.norm_tol {
            return Err(CoherenceError::InvalidProfile(format!(
                "entries sum to {total}, expected 1"
            )));
        }
        Ok(Self { entries })
    }

    /// Skips validation; callers guarantee the invariants up to rounding.
    pub(crate) fn from_raw(entries: Vec<f64>) -> Self {
        Self { entries }
    }

    /// The uniform profile `(1/d, ..., 1/d)`.
    pub fn uniform(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(CoherenceError::InvalidProfile("profile is empty".into()));
        }
        Ok(Self {
            entries: vec![1.0 / dim as f64; dim],
        })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<f64> {
        self.entries
    }

    pub fn total(&self) -> f64 {
        self.entries.iter().sum()
    }

    /// Outer product flattened in the same order as [`PureState::tensor`].
    pub fn tensor(&self, other: &ProbabilityProfile) -> ProbabilityProfile {
        let entries = self
            .entries
            .iter()
            .flat_map(|a| other.entries.iter().map(move |b| a * b))
            .collect();
        ProbabilityProfile { entries }
    }
}
