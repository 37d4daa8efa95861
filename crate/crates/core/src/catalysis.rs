//! Coherent catalysis: `x ⊗ c ≺ y ⊗ c` queries and a grid search for
//! catalysts `c`.

use rayon::prelude::*;

use crate::error::{CoherenceError, Result};
use crate::majorization::{self, sort_desc};
use crate::model::ProbabilityProfile;
use crate::tolerance::ToleranceConfig;

#[derive(Debug, Clone, PartialEq)]
pub struct CatalysisQuery {
    pub source: ProbabilityProfile,
    pub target: ProbabilityProfile,
    pub catalyst_dim: usize,
    pub grid_step: f64,
}

impl CatalysisQuery {
    pub fn new(
        source: ProbabilityProfile,
        target: ProbabilityProfile,
        catalyst_dim: usize,
        grid_step: f64,
    ) -> Self {
        Self {
            source,
            target,
            catalyst_dim,
            grid_step,
        }
    }

    /// Number of grid units in the simplex, `1 / grid_step`.
    fn units(&self) -> Result<u32> {
        if self.source.len() != self.target.len() {
            return Err(CoherenceError::DimensionMismatch {
                expected: self.source.len(),
                found: self.target.len(),
            });
        }
        if self.catalyst_dim < 2 {
            return Err(CoherenceError::InvalidGrid(format!(
                "catalyst dimension must be at least 2, got {}",
                self.catalyst_dim
            )));
        }
        let step = self.grid_step;
        if !(step > 0.0 && step < 1.0) {
            return Err(CoherenceError::InvalidGrid(format!(
                "grid step {step} outside (0, 1)"
            )));
        }
        let n = (1.0 / step).round();
        if (n * step - 1.0).abs() > 1e-9 || n > u32::MAX as f64 {
            return Err(CoherenceError::InvalidGrid(format!(
                "grid step {step} does not divide 1 evenly"
            )));
        }
        Ok(n as u32)
    }
}

/// True iff `x ⊗ c ≺ y ⊗ c`.
pub fn catalyzes(
    x: &ProbabilityProfile,
    y: &ProbabilityProfile,
    c: &ProbabilityProfile,
    tol: &ToleranceConfig,
) -> Result<bool> {
    majorization::majorizes(&x.tensor(c), &y.tensor(c), tol)
}

/// Necessary condition for any catalyst: `x↓_1 <= y↓_1` and `x↓_d >= y↓_d`.
/// A `false` return rules out catalysts of every dimension.
pub fn catalysis_necessary(
    x: &ProbabilityProfile,
    y: &ProbabilityProfile,
    tol: &ToleranceConfig,
) -> Result<bool> {
    if x.len() != y.len() {
        return Err(CoherenceError::DimensionMismatch {
            expected: x.len(),
            found: y.len(),
        });
    }
    let (xs, _) = sort_desc(x);
    let (ys, _) = sort_desc(y);
    let (xs, ys) = (xs.entries(), ys.entries());
    let d = xs.len();
    Ok(xs[0] <= ys[0] + tol.major_tol && xs[d - 1] >= ys[d - 1] - tol.major_tol)
}

/// Two-way catalytic convertibility, which holds iff `x↓ = y↓`.
pub fn interconvertible_catalytic(
    x: &ProbabilityProfile,
    y: &ProbabilityProfile,
    tol: &ToleranceConfig,
) -> Result<bool> {
    if x.len() != y.len() {
        return Err(CoherenceError::DimensionMismatch {
            expected: x.len(),
            found: y.len(),
        });
    }
    let (xs, _) = sort_desc(x);
    let (ys, _) = sort_desc(y);
    Ok(xs
        .entries()
        .iter()
        .zip(ys.entries())
        .all(|(a, b)| (a - b).abs() <= tol.major_tol))
}

/// Exhaustive search over nonincreasing catalysts whose entries are
/// multiples of `grid_step`, in ascending lexicographic order (the most
/// uniform candidate first). Returns the first hit.
///
/// `None` does not prove that no catalyst exists unless
/// [`catalysis_necessary`] fails.
pub fn search_catalyst(
    q: &CatalysisQuery,
    tol: &ToleranceConfig,
) -> Result<Option<ProbabilityProfile>> {
    let n = q.units()?;
    let k = q.catalyst_dim as u32;
    if !catalysis_necessary(&q.source, &q.target, tol)? {
        return Ok(None);
    }
    let step = 1.0 / n as f64;
    // smallest admissible leading entry is ceil(n / k)
    let first_lead = n.div_ceil(k);
    let hit = (first_lead..=n).into_par_iter().find_map_first(|lead| {
        let mut parts = vec![lead];
        search_tail(&mut parts, n - lead, lead, k, &|c: &[u32]| {
            let profile =
                ProbabilityProfile::from_raw(c.iter().map(|&u| u as f64 * step).collect());
            majorization::majorizes_unchecked(
                q.source.tensor(&profile).entries(),
                q.target.tensor(&profile).entries(),
                tol,
            )
        })
    });
    Ok(hit.map(|c| ProbabilityProfile::from_raw(c.into_iter().map(|u| u as f64 * step).collect())))
}

/// Depth-first enumeration of nonincreasing completions of `parts` to
/// length `k` summing to the original total, in ascending lexicographic
/// order.
fn search_tail(
    parts: &mut Vec<u32>,
    remaining: u32,
    cap: u32,
    k: u32,
    accept: &dyn Fn(&[u32]) -> bool,
) -> Option<Vec<u32>> {
    let slots = k - parts.len() as u32;
    if slots == 0 {
        return (remaining == 0 && accept(parts)).then(|| parts.clone());
    }
    // this entry must leave at most cap * (slots - 1) for the rest
    let lo = remaining.saturating_sub(cap * (slots - 1));
    let lo = lo.max(remaining.div_ceil(slots));
    let hi = cap.min(remaining);
    for v in lo..=hi {
        parts.push(v);
        let found = search_tail(parts, remaining - v, v, k, accept);
        parts.pop();
        if found.is_some() {
            return found;
        }
    }
    None
}

/// All grid catalysts in search order. Only used to cross-check the search.
pub fn grid_candidates(catalyst_dim: usize, grid_step: f64) -> Result<Vec<Vec<u32>>> {
    let q = CatalysisQuery::new(
        ProbabilityProfile::uniform(1)?,
        ProbabilityProfile::uniform(1)?,
        catalyst_dim,
        grid_step,
    );
    let n = q.units()?;
    let k = catalyst_dim as u32;
    let out = std::cell::RefCell::new(Vec::new());
    for lead in n.div_ceil(k)..=n {
        let mut parts = vec![lead];
        search_tail(&mut parts, n - lead, lead, k, &|c: &[u32]| {
            out.borrow_mut().push(c.to_vec());
            false
        });
    }
    Ok(out.into_inner())
}
