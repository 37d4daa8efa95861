//! Majorization: ordering, comparison, doubly stochastic certification and
//! T-transform chains.
//!
//! `majorizes(x, y)` is true when `x ≺ y`: every descending partial sum of
//! `x` is bounded by the corresponding partial sum of `y`. In coherence
//! terms the state with profile `x` can be converted into the one with
//! profile `y`.

use nalgebra::DMatrix;

use crate::error::{CoherenceError, Result};
use crate::model::ProbabilityProfile;
use crate::tolerance::ToleranceConfig;

/// An elementary doubly stochastic step mixing coordinates `i < j` (0-based).
///
/// As a matrix it is the identity except for the block
/// `[[t, 1-t], [1-t, t]]` on rows/columns `i, j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TTransform {
    pub i: usize,
    pub j: usize,
    pub t: f64,
}

impl TTransform {
    pub fn new(i: usize, j: usize, t: f64) -> Result<Self> {
        if i >= j {
            return Err(CoherenceError::InvalidTTransform(format!(
                "indices must satisfy i < j, got ({i}, {j})"
            )));
        }
        if !(0.0..=1.0).contains(&t) {
            return Err(CoherenceError::InvalidTTransform(format!(
                "weight t = {t} outside [0, 1]"
            )));
        }
        Ok(Self { i, j, t })
    }

    /// Dense `d x d` matrix form.
    pub fn to_matrix(&self, d: usize) -> Result<DMatrix<f64>> {
        if self.j >= d {
            return Err(CoherenceError::IndexOutOfRange {
                index: self.j,
                dim: d,
            });
        }
        let mut m = DMatrix::identity(d, d);
        m[(self.i, self.i)] = self.t;
        m[(self.j, self.j)] = self.t;
        m[(self.i, self.j)] = 1.0 - self.t;
        m[(self.j, self.i)] = 1.0 - self.t;
        Ok(m)
    }

    fn apply_raw(&self, v: &mut [f64]) {
        let (a, b) = (v[self.i], v[self.j]);
        v[self.i] = self.t * a + (1.0 - self.t) * b;
        v[self.j] = (1.0 - self.t) * a + self.t * b;
    }
}

/// A bijection on `0..d`. `image[k]` is the original position of the
/// element now at position `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation {
    image: Vec<usize>,
}

impl Permutation {
    pub fn new(image: Vec<usize>) -> Result<Self> {
        let d = image.len();
        let mut seen = vec![false; d];
        for &k in &image {
            if k >= d || seen[k] {
                return Err(CoherenceError::Precondition(format!(
                    "{image:?} is not a permutation of 0..{d}"
                )));
            }
            seen[k] = true;
        }
        Ok(Self { image })
    }

    pub fn identity(d: usize) -> Self {
        Self {
            image: (0..d).collect(),
        }
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    pub fn is_identity(&self) -> bool {
        self.image.iter().enumerate().all(|(k, &v)| k == v)
    }

    /// Puts `sorted[k]` back at position `image[k]`.
    pub fn unsort<T: Copy + Default>(&self, sorted: &[T]) -> Vec<T> {
        let mut out = vec![T::default(); sorted.len()];
        for (k, &src) in self.image.iter().enumerate() {
            out[src] = sorted[k];
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ComparisonResult {
    /// `x ≺ y` only: the first state converts to the second.
    ConvertsTo,
    /// `y ≺ x` only.
    ConvertsFrom,
    /// `x↓ = y↓`.
    Equivalent,
    Incomparable,
}

impl std::fmt::Display for ComparisonResult {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ComparisonResult::ConvertsTo => "ConvertsTo",
            ComparisonResult::ConvertsFrom => "ConvertsFrom",
            ComparisonResult::Equivalent => "Equivalent",
            ComparisonResult::Incomparable => "Incomparable",
        };
        f.write_str(s)
    }
}

/// Stable descending sort (ties keep their original order).
pub fn sort_desc(x: &ProbabilityProfile) -> (ProbabilityProfile, Permutation) {
    let e = x.entries();
    let mut order: Vec<usize> = (0..e.len()).collect();
    order.sort_by(|&a, &b| e[b].total_cmp(&e[a]));
    let sorted = order.iter().map(|&k| e[k]).collect();
    (
        ProbabilityProfile::from_raw(sorted),
        Permutation { image: order },
    )
}

fn sorted_entries(x: &ProbabilityProfile) -> Vec<f64> {
    let mut v = x.entries().to_vec();
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

fn check_len(x: &ProbabilityProfile, y: &ProbabilityProfile) -> Result<()> {
    if x.len() != y.len() {
        return Err(CoherenceError::DimensionMismatch {
            expected: x.len(),
            found: y.len(),
        });
    }
    Ok(())
}

/// True iff `x ≺ y`.
pub fn majorizes(
    x: &ProbabilityProfile,
    y: &ProbabilityProfile,
    tol: &ToleranceConfig,
) -> Result<bool> {
    check_len(x, y)?;
    Ok(majorizes_unchecked(x.entries(), y.entries(), tol))
}

/// Slice form of [`majorizes`]; lengths must agree.
pub(crate) fn majorizes_unchecked(x: &[f64], y: &[f64], tol: &ToleranceConfig) -> bool {
    let mut xs = x.to_vec();
    let mut ys = y.to_vec();
    xs.sort_by(|a, b| b.total_cmp(a));
    ys.sort_by(|a, b| b.total_cmp(a));
    let (mut sx, mut sy) = (0.0, 0.0);
    let d = xs.len();
    for k in 0..d {
        sx += xs[k];
        sy += ys[k];
        if k + 1 < d && sx > sy + tol.major_tol {
            return false;
        }
    }
    (sx - sy).abs() <= tol.norm_tol
}

pub fn compare(
    x: &ProbabilityProfile,
    y: &ProbabilityProfile,
    tol: &ToleranceConfig,
) -> Result<ComparisonResult> {
    check_len(x, y)?;
    let forward = majorizes_unchecked(x.entries(), y.entries(), tol);
    let backward = majorizes_unchecked(y.entries(), x.entries(), tol);
    let equal = sorted_entries(x)
        .iter()
        .zip(sorted_entries(y))
        .all(|(a, b)| (a - b).abs() <= tol.major_tol);
    Ok(if equal {
        ComparisonResult::Equivalent
    } else {
        match (forward, backward) {
            (true, false) => ComparisonResult::ConvertsTo,
            (false, true) => ComparisonResult::ConvertsFrom,
            // both directions with unequal sorted vectors only happens at
            // the tolerance boundary
            (true, true) => ComparisonResult::Equivalent,
            (false, false) => ComparisonResult::Incomparable,
        }
    })
}

/// Nonnegative entries, unit row and column sums.
pub fn is_doubly_stochastic(a: &DMatrix<f64>, tol: &ToleranceConfig) -> Result<bool> {
    if a.nrows() != a.ncols() {
        return Err(CoherenceError::ShapeMismatch(format!(
            "doubly stochastic check needs a square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    if a.iter().any(|&v| !v.is_finite() || v < -tol.nonneg_tol) {
        return Ok(false);
    }
    let rows_ok = a.row_iter().all(|r| (r.sum() - 1.0).abs() <= tol.norm_tol);
    let cols_ok = a
        .column_iter()
        .all(|c| (c.sum() - 1.0).abs() <= tol.norm_tol);
    Ok(rows_ok && cols_ok)
}

/// Applies one T-transform; the coordinate sum is preserved.
pub fn apply_t(t: &TTransform, v: &ProbabilityProfile) -> Result<ProbabilityProfile> {
    if t.j >= v.len() {
        return Err(CoherenceError::IndexOutOfRange {
            index: t.j,
            dim: v.len(),
        });
    }
    let mut out = v.entries().to_vec();
    t.apply_raw(&mut out);
    Ok(ProbabilityProfile::from_raw(out))
}

fn is_sorted_desc(v: &[f64], tol: f64) -> bool {
    v.windows(2).all(|w| w[0] >= w[1] - tol)
}

/// T-transforms `T_1, ..., T_k` (k <= d-1) with `T_k ... T_1 y = x`, for
/// descending-sorted `x ≺ y`.
///
/// Each step takes the largest index `i` where the running vector `v`
/// exceeds `x`, the first index `j > i` where it falls short, and moves
/// `min(v_i - x_i, x_j - v_j)` from `i` to `j`. This keeps `v` sorted and
/// majorizing `x`, and pins at least one coordinate to `x` per step.
pub fn t_chain(
    x: &ProbabilityProfile,
    y: &ProbabilityProfile,
    tol: &ToleranceConfig,
) -> Result<Vec<TTransform>> {
    check_len(x, y)?;
    let (xs, ys) = (x.entries(), y.entries());
    if !is_sorted_desc(xs, tol.major_tol) || !is_sorted_desc(ys, tol.major_tol) {
        return Err(CoherenceError::Precondition(
            "t_chain needs both profiles sorted in descending order".into(),
        ));
    }
    if !majorizes_unchecked(xs, ys, tol) {
        return Err(CoherenceError::NotMajorized);
    }
    let d = xs.len();
    let eps = tol.major_tol;
    let mut v = ys.to_vec();
    let mut chain = Vec::new();

    while let Some(i) = (0..d).rev().find(|&k| v[k] - xs[k] > eps) {
        let j = (i + 1..d).find(|&k| xs[k] - v[k] > eps).or_else(|| {
            // surplus at i is within a few eps of being absorbed
            (i + 1..d)
                .filter(|&k| xs[k] > v[k])
                .max_by(|&a, &b| (xs[a] - v[a]).total_cmp(&(xs[b] - v[b])))
        });
        let Some(j) = j else { break };
        let surplus = v[i] - xs[i];
        let deficit = xs[j] - v[j];
        let delta = surplus.min(deficit);
        let t = (1.0 - delta / (v[i] - v[j])).clamp(0.0, 1.0);
        let step = TTransform { i, j, t };
        step.apply_raw(&mut v);
        if surplus <= deficit {
            v[i] = xs[i];
        }
        if deficit <= surplus {
            v[j] = xs[j];
        }
        chain.push(step);
        if chain.len() >= d {
            return Err(CoherenceError::Precondition(
                "T-transform chain did not converge".into(),
            ));
        }
    }

    let residual = v
        .iter()
        .zip(xs)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    if residual > d as f64 * eps {
        return Err(CoherenceError::NotMajorized);
    }
    Ok(chain)
}
