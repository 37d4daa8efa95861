//! Explicit incoherent channels for allowed pure-state conversions.
//!
//! The pipeline for `psi -> phi` with `profile(psi) ≺ profile(phi)`:
//!
//! 1. Rotate both states by diagonal phases and a permutation so that
//!    amplitudes are real, nonnegative and nonincreasing (`U psi`, `V phi`).
//! 2. Strip the common zero tail: if `psi` vanishes beyond index `k`, so
//!    does `phi`.
//! 3. Connect the sorted profiles by a T-transform chain and realize every
//!    T-step as a two-Kraus incoherent channel.
//! 4. Re-embed the zero tail and conjugate by `U` and `V^dag`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{CoherenceError, Result};
use crate::majorization::{self, sort_desc, TTransform};
use crate::model::{CMatrix, Channel, KrausOperator, ProbabilityProfile, PureState};
use crate::tolerance::ToleranceConfig;

/// Every piece of a synthesized conversion.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthesisPlan {
    /// `U`: maps `psi` to its sorted nonnegative form.
    pub pre_unitary: KrausOperator,
    /// Chain between the sorted profiles on the nonzero support
    /// (`T_k ... T_1 phi↓ = psi↓`).
    pub chain: Vec<TTransform>,
    /// One channel per T-step, in application order, on the support.
    pub steps: Vec<Channel>,
    /// Number of nonzero amplitudes of `psi`.
    pub support: usize,
    /// `V^dag`: maps the sorted form back to `phi`.
    pub post_unitary: KrausOperator,
    /// The full composed channel.
    pub channel: Channel,
}

/// Returns `(U, U s)` with `U = P_pi diag(e^{-i alpha_k})`, where `alpha_k`
/// are the amplitude phases and `pi` the stable descending-modulus sort.
pub fn normalize_state(s: &PureState) -> (KrausOperator, PureState) {
    let d = s.dim();
    let (_, perm) = sort_desc(&s.profile());
    let mut u = DMatrix::<Complex64>::zeros(d, d);
    let mut sorted = Vec::with_capacity(d);
    for (row, &src) in perm.image().iter().enumerate() {
        let a = s.amplitudes()[src];
        let phase = if a.norm() > 0.0 {
            a.conj() / a.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        u[(row, src)] = phase;
        sorted.push(Complex64::new(a.norm(), 0.0));
    }
    (
        KrausOperator(u),
        PureState::normalized(sorted).expect("unit norm input"),
    )
}

/// Checks that `s` has real nonnegative amplitudes and returns them.
fn real_nonnegative(s: &PureState, name: &str, tol: &ToleranceConfig) -> Result<Vec<f64>> {
    s.amplitudes()
        .iter()
        .enumerate()
        .map(|(k, a)| {
            if a.im.abs() > tol.nonneg_tol || a.re < -tol.nonneg_tol {
                Err(CoherenceError::Precondition(format!(
                    "{name}[{k}] = {a} is not real and nonnegative"
                )))
            } else {
                Ok(a.re.max(0.0))
            }
        })
        .collect()
}

fn diag(entries: &[f64]) -> CMatrix {
    let d = entries.len();
    let mut m = DMatrix::zeros(d, d);
    for (k, &e) in entries.iter().enumerate() {
        m[(k, k)] = Complex64::new(e, 0.0);
    }
    m
}

/// The two-Kraus channel for `dim = 2`: `K_1 = sqrt(a) diag(phi_1/psi_1, phi_2/psi_2)`,
/// `K_2 = sqrt(1-a) [[0, phi_1/psi_2], [phi_2/psi_1, 0]]`, with `a` solving
/// `psi_1^2 = a phi_1^2 + (1-a) phi_2^2`.
pub fn synth_dim2(psi: &PureState, phi: &PureState, tol: &ToleranceConfig) -> Result<Channel> {
    if psi.dim() != 2 || phi.dim() != 2 {
        return Err(CoherenceError::Precondition(
            "synth_dim2 needs dimension 2".into(),
        ));
    }
    let s = real_nonnegative(psi, "psi", tol)?;
    let f = real_nonnegative(phi, "phi", tol)?;
    if s[0] < s[1] - tol.major_tol || f[0] < f[1] - tol.major_tol {
        return Err(CoherenceError::Precondition(
            "amplitudes must be sorted descending".into(),
        ));
    }
    if !majorization::majorizes(&psi.profile(), &phi.profile(), tol)? {
        return Err(CoherenceError::NotMajorized);
    }
    if s[1] <= tol.nonneg_tol {
        // psi = |1>, hence phi = |1>
        return Ok(Channel::identity(2));
    }
    let (p1, p2) = (f[0] * f[0], f[1] * f[1]);
    let a = if (p1 - p2).abs() <= tol.major_tol {
        1.0
    } else {
        ((s[0] * s[0] - p2) / (p1 - p2)).clamp(0.0, 1.0)
    };
    let (ra, rb) = (a.sqrt(), (1.0 - a).sqrt());
    let c = |v: f64| Complex64::new(v, 0.0);
    let k1 = DMatrix::from_row_slice(
        2,
        2,
        &[c(ra * f[0] / s[0]), c(0.0), c(0.0), c(ra * f[1] / s[1])],
    );
    let k2 = DMatrix::from_row_slice(
        2,
        2,
        &[c(0.0), c(rb * f[0] / s[1]), c(rb * f[1] / s[0]), c(0.0)],
    );
    Channel::with_tolerance(vec![KrausOperator(k1), KrausOperator(k2)], tol)
}

/// The two-Kraus channel realizing one T-step `psi -> phi`, where
/// `profile(psi) = T profile(phi)`.
///
/// `K_1 = sqrt(t) diag(r)` and `K_2 = sqrt(1-t) diag(r') P_(i j)`, with
/// `r_i = phi_i/psi_i`, `r_j = phi_j/psi_j`, `r'_i = phi_i/psi_j`,
/// `r'_j = phi_j/psi_i` and every other ratio equal to 1 (the step leaves
/// those amplitudes unchanged).
pub fn synth_t_step(
    psi: &PureState,
    phi: &PureState,
    step: &TTransform,
    tol: &ToleranceConfig,
) -> Result<Channel> {
    let d = psi.dim();
    if phi.dim() != d {
        return Err(CoherenceError::DimensionMismatch {
            expected: d,
            found: phi.dim(),
        });
    }
    if step.j >= d || step.i >= step.j {
        return Err(CoherenceError::IndexOutOfRange {
            index: step.j,
            dim: d,
        });
    }
    let s = real_nonnegative(psi, "psi", tol)?;
    let f = real_nonnegative(phi, "phi", tol)?;
    let (i, j, t) = (step.i, step.j, step.t);
    for k in [i, j] {
        if s[k] <= tol.nonneg_tol {
            return Err(CoherenceError::Precondition(format!(
                "psi[{k}] is zero; route zero amplitudes through embed_zero_tail"
            )));
        }
    }
    let mixed = majorization::apply_t(step, &phi.profile())?;
    let mismatch = mixed
        .entries()
        .iter()
        .zip(psi.profile().entries())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    if mismatch > tol.major_tol {
        return Err(CoherenceError::Precondition(format!(
            "profile(psi) differs from T profile(phi) by {mismatch:e}"
        )));
    }

    let mut r = vec![1.0; d];
    r[i] = f[i] / s[i];
    r[j] = f[j] / s[j];
    let mut r_swapped = vec![1.0; d];
    r_swapped[i] = f[i] / s[j];
    r_swapped[j] = f[j] / s[i];

    let mut swap = DMatrix::<Complex64>::identity(d, d);
    swap.swap_rows(i, j);

    let k1 = diag(&r) * Complex64::new(t.sqrt(), 0.0);
    let k2 = diag(&r_swapped) * swap * Complex64::new((1.0 - t).sqrt(), 0.0);
    Channel::with_tolerance(vec![KrausOperator(k1), KrausOperator(k2)], tol)
}

/// Extends every Kraus operator of a `k`-dimensional channel to
/// `K_n ⊕ I_{d-k} / sqrt(N)`, `N` being the number of Kraus operators.
pub fn embed_zero_tail(inner: &Channel, d: usize) -> Result<Channel> {
    let k = inner.dim_in();
    if inner.dim_out() != k {
        return Err(CoherenceError::ShapeMismatch(
            "inner channel must be square".into(),
        ));
    }
    if k >= d {
        return Err(CoherenceError::Precondition(format!(
            "inner dimension {k} must be smaller than {d}"
        )));
    }
    let weight = Complex64::new(1.0 / (inner.len() as f64).sqrt(), 0.0);
    let kraus = inner
        .kraus()
        .iter()
        .map(|op| {
            let mut m = DMatrix::<Complex64>::zeros(d, d);
            m.view_mut((0, 0), (k, k)).copy_from(op.matrix());
            for r in k..d {
                m[(r, r)] = weight;
            }
            KrausOperator(m)
        })
        .collect();
    Ok(Channel::from_kraus_unchecked(kraus))
}

/// `first` then `second`: the Kraus set `{L_m K_n}`.
pub fn compose(first: &Channel, second: &Channel) -> Result<Channel> {
    first.then(second)
}

/// An incoherent channel taking `|psi><psi|` to `|phi><phi|`.
pub fn synthesize(psi: &PureState, phi: &PureState, tol: &ToleranceConfig) -> Result<Channel> {
    synthesize_plan(psi, phi, tol).map(|plan| plan.channel)
}

/// [`synthesize`] with every intermediate piece retained.
pub fn synthesize_plan(
    psi: &PureState,
    phi: &PureState,
    tol: &ToleranceConfig,
) -> Result<SynthesisPlan> {
    let d = psi.dim();
    if phi.dim() != d {
        return Err(CoherenceError::DimensionMismatch {
            expected: d,
            found: phi.dim(),
        });
    }
    if !majorization::majorizes(&psi.profile(), &phi.profile(), tol)? {
        return Err(CoherenceError::NotMajorized);
    }

    let (u, psi_sorted) = normalize_state(psi);
    let (v, phi_sorted) = normalize_state(phi);

    let support = psi_sorted
        .amplitudes()
        .iter()
        .take_while(|a| a.re > tol.nonneg_tol)
        .count()
        .max(1);
    let x = truncated_profile(&psi_sorted, support);
    let y = truncated_profile(&phi_sorted, support);

    let chain = majorization::t_chain(&x, &y, tol)?;

    // profiles along the chain: path[0] = y, path[m] = T_m path[m-1]
    let mut path = vec![y];
    for step in &chain {
        let next = majorization::apply_t(step, path.last().unwrap())?;
        path.push(next);
    }

    let mut steps = Vec::with_capacity(chain.len());
    let mut core = Channel::identity(support);
    for m in (1..path.len()).rev() {
        let src = PureState::from_profile(&path[m]);
        let dst = PureState::from_profile(&path[m - 1]);
        let step = synth_t_step(&src, &dst, &chain[m - 1], tol)?;
        core = if steps.is_empty() {
            step.clone()
        } else {
            core.then(&step)?.pruned(tol.nonneg_tol)
        };
        steps.push(step);
    }

    let embedded = if support < d {
        embed_zero_tail(&core, d)?
    } else {
        core
    };
    let post = v.adjoint();
    let channel = embedded
        .conjugated(u.matrix(), post.matrix())
        .pruned(tol.nonneg_tol);
    let channel = Channel::with_tolerance(channel.kraus().to_vec(), tol)?;

    Ok(SynthesisPlan {
        pre_unitary: u,
        chain,
        steps,
        support,
        post_unitary: post,
        channel,
    })
}

fn truncated_profile(s: &PureState, k: usize) -> ProbabilityProfile {
    let head: Vec<f64> = s.amplitudes()[..k].iter().map(|a| a.norm_sqr()).collect();
    let total: f64 = head.iter().sum();
    ProbabilityProfile::from_raw(head.into_iter().map(|p| p / total).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{apply, fidelity_to_pure, max_abs_diff, DensityMatrix};
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    fn real(v: &[f64]) -> PureState {
        PureState::from_real(v).unwrap()
    }

    fn maps(ch: &Channel, psi: &PureState, phi: &PureState) -> f64 {
        let out = apply(ch, &DensityMatrix::from_pure(psi)).unwrap();
        fidelity_to_pure(&out, phi).unwrap()
    }

    #[test]
    fn normalize_sorted_state_is_identity() {
        let s = real(&[0.8, 0.6]);
        let (u, sorted) = normalize_state(&s);
        assert!(max_abs_diff(u.matrix(), &DMatrix::identity(2, 2)) < 1e-15);
        assert_eq!(sorted, s);
    }

    #[test]
    fn normalize_phase_and_swap() {
        let ph = Complex64::from_polar(1.0, PI / 3.0);
        let s =
            PureState::new(vec![ph * 0.1f64.sqrt(), Complex64::new(0.9f64.sqrt(), 0.0)]).unwrap();
        let (u, sorted) = normalize_state(&s);
        let expected_sorted = [0.9f64.sqrt(), 0.1f64.sqrt()];
        for (a, e) in sorted.amplitudes().iter().zip(expected_sorted) {
            assert!((a.re - e).abs() < 1e-15 && a.im == 0.0);
        }
        // swap * diag(e^{-i pi/3}, 1)
        let z = Complex64::new(0.0, 0.0);
        let expected = DMatrix::from_row_slice(2, 2, &[z, Complex64::new(1.0, 0.0), ph.conj(), z]);
        assert!(max_abs_diff(u.matrix(), &expected) < 1e-15);
        // apply-and-check
        let us = u.matrix() * nalgebra::DVector::from_column_slice(s.amplitudes());
        for (a, e) in us.iter().zip(expected_sorted) {
            assert!((a - Complex64::new(e, 0.0)).norm() < 1e-15);
        }
        assert!(KrausOperator(u.matrix().clone()).is_incoherent(1e-12));
        assert!(u.adjoint().is_incoherent(1e-12));
    }

    #[test]
    fn dim2_collapse_to_ground() {
        let psi = real(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2]);
        let phi = real(&[1.0, 0.0]);
        let ch = synth_dim2(&psi, &phi, &tol()).unwrap();
        let c = |v: f64| Complex64::new(v, 0.0);
        let k1 = DMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(0.0)]);
        let k2 = DMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(0.0), c(0.0)]);
        // a = 1/2 gives sqrt(a) phi_1/psi_1 = 1
        assert!(max_abs_diff(ch.kraus()[0].matrix(), &k1) < 1e-15);
        assert!(max_abs_diff(ch.kraus()[1].matrix(), &k2) < 1e-15);
        assert!((maps(&ch, &psi, &phi) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn dim2_identity_cases() {
        let psi = real(&[0.8, 0.6]);
        let ch = synth_dim2(&psi, &psi, &tol()).unwrap();
        assert!(ch.kraus()[1].matrix().iter().all(|z| z.norm() < 1e-15));
        assert!((maps(&ch, &psi, &psi) - 1.0).abs() < 1e-14);

        let u = real(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2]);
        let ch = synth_dim2(&u, &u, &tol()).unwrap();
        assert!((maps(&ch, &u, &u) - 1.0).abs() < 1e-14);

        let e1 = real(&[1.0, 0.0]);
        assert_eq!(synth_dim2(&e1, &e1, &tol()).unwrap(), Channel::identity(2));

        assert!(matches!(
            synth_dim2(&e1, &u, &tol()),
            Err(CoherenceError::NotMajorized)
        ));
    }

    #[test]
    fn dim2_agrees_with_single_t_step() {
        let psi = real(&[0.7f64.sqrt(), 0.3f64.sqrt()]);
        let phi = real(&[0.9f64.sqrt(), 0.1f64.sqrt()]);
        let a = synth_dim2(&psi, &phi, &tol()).unwrap();
        // psi^2 = a phi^2 + (1-a)(swap phi^2): 0.7 = 0.9a + 0.1(1-a) -> a = 0.75
        let b = synth_t_step(&psi, &phi, &TTransform::new(0, 1, 0.75).unwrap(), &tol()).unwrap();
        for (ka, kb) in a.kraus().iter().zip(b.kraus()) {
            assert!(max_abs_diff(ka.matrix(), kb.matrix()) < 1e-14);
        }
    }

    #[test]
    fn t_step_trivial_weight() {
        let psi = real(&[0.6f64.sqrt(), 0.3f64.sqrt(), 0.1f64.sqrt()]);
        let ch = synth_t_step(&psi, &psi, &TTransform::new(0, 2, 1.0).unwrap(), &tol()).unwrap();
        assert!(max_abs_diff(ch.kraus()[0].matrix(), &DMatrix::identity(3, 3)) < 1e-15);
        assert!(ch.kraus()[1].matrix().iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn t_step_maps_through_mixed_profile() {
        // phi^2 = (0.5, 5/12, 1/12); T = (2,3,t=0.75) gives psi^2 = (0.5, 1/3, 1/6)
        let phi = real(&[
            0.5f64.sqrt(),
            (5.0f64 / 12.0).sqrt(),
            (1.0f64 / 12.0).sqrt(),
        ]);
        let psi = real(&[0.5f64.sqrt(), (1.0f64 / 3.0).sqrt(), (1.0f64 / 6.0).sqrt()]);
        let step = TTransform::new(1, 2, 0.75).unwrap();
        let ch = synth_t_step(&psi, &phi, &step, &tol()).unwrap();
        assert!(ch.is_incoherent(&tol()));
        assert!(ch.completeness_residual() < 1e-14);
        assert!((maps(&ch, &psi, &phi) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn t_step_rejects_zero_pivot_and_mismatch() {
        let phi = real(&[1.0, 0.0, 0.0]);
        let psi = real(&[1.0, 0.0, 0.0]);
        assert!(matches!(
            synth_t_step(&psi, &phi, &TTransform::new(1, 2, 0.5).unwrap(), &tol()),
            Err(CoherenceError::Precondition(_))
        ));
        let psi = real(&[0.8, 0.6, 0.0]);
        let phi = real(&[0.6, 0.8, 0.0]);
        assert!(matches!(
            synth_t_step(&psi, &phi, &TTransform::new(0, 1, 0.5).unwrap(), &tol()),
            Err(CoherenceError::Precondition(_))
        ));
    }

    #[test]
    fn embed_identity_and_dim2_example() {
        let id = embed_zero_tail(&Channel::identity(1), 2).unwrap();
        assert_eq!(id, Channel::identity(2));

        let psi2 = real(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2]);
        let phi2 = real(&[1.0, 0.0]);
        let inner = synth_dim2(&psi2, &phi2, &tol()).unwrap();
        let ch = embed_zero_tail(&inner, 3).unwrap();
        assert!(ch.completeness_residual() < 1e-15);
        assert!(ch.is_incoherent(&tol()));
        let psi = real(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.0]);
        assert!((maps(&ch, &psi, &real(&[1.0, 0.0, 0.0])) - 1.0).abs() < 1e-14);

        assert!(embed_zero_tail(&inner, 2).is_err());
    }

    #[test]
    fn compose_with_identity_is_same_map() {
        let psi = real(&[0.7f64.sqrt(), 0.3f64.sqrt()]);
        let phi = real(&[0.9f64.sqrt(), 0.1f64.sqrt()]);
        let ch = synth_dim2(&psi, &phi, &tol()).unwrap();
        let composed = compose(&Channel::identity(2), &ch).unwrap();
        assert_eq!(composed.len(), ch.len());
        // basis of 2x2 density matrices
        let h = FRAC_1_SQRT_2;
        let inputs = [
            real(&[1.0, 0.0]),
            real(&[0.0, 1.0]),
            real(&[h, h]),
            PureState::new(vec![Complex64::new(h, 0.0), Complex64::new(0.0, h)]).unwrap(),
        ];
        for s in &inputs {
            let rho = DensityMatrix::from_pure(s);
            let a = apply(&ch, &rho).unwrap();
            let b = apply(&composed, &rho).unwrap();
            assert!(max_abs_diff(a.matrix(), b.matrix()) < 1e-15);
        }
        assert!(compose(&Channel::identity(3), &ch).is_err());
    }

    #[test]
    fn synthesize_uniform_qutrit_to_half_half() {
        let third = (1.0f64 / 3.0).sqrt();
        let psi = real(&[third, third, third]);
        let phi = real(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.0]);
        let plan = synthesize_plan(&psi, &phi, &tol()).unwrap();
        assert_eq!(plan.chain.len(), 2);
        assert!(plan.channel.is_incoherent(&tol()));
        assert!(plan.channel.completeness_residual() <= 1e-9);
        assert!(maps(&plan.channel, &psi, &phi) >= 1.0 - 1e-10);
    }

    #[test]
    fn synthesize_identity_and_refusal() {
        let psi = PureState::new(vec![Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)]).unwrap();
        let ch = synthesize(&psi, &psi, &tol()).unwrap();
        assert!(maps(&ch, &psi, &psi) >= 1.0 - 1e-12);

        let third = (1.0f64 / 3.0).sqrt();
        let psi = real(&[third, third, third]);
        let phi = real(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.0]);
        assert!(matches!(
            synthesize(&phi, &psi, &tol()),
            Err(CoherenceError::NotMajorized)
        ));
        assert!(matches!(
            synthesize(&psi, &real(&[1.0, 0.0]), &tol()),
            Err(CoherenceError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn synthesize_with_zero_tail_and_complex_phases() {
        let psi = PureState::normalized(vec![
            Complex64::new(0.0, 0.0),
            Complex64::new(0.3, 0.4),
            Complex64::new(-0.5, 0.0),
            Complex64::new(0.1, -0.2),
        ])
        .unwrap();
        let phi = PureState::new(vec![
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, -1.0),
            Complex64::new(0.0, 0.0),
        ])
        .unwrap();
        let plan = synthesize_plan(&psi, &phi, &tol()).unwrap();
        assert_eq!(plan.support, 3);
        assert!(plan.channel.is_incoherent(&tol()));
        assert!(maps(&plan.channel, &psi, &phi) >= 1.0 - 1e-10);
    }

    #[test]
    fn synthesize_basis_to_basis() {
        let psi = real(&[0.0, 1.0, 0.0]);
        let phi = real(&[0.0, 0.0, 1.0]);
        let ch = synthesize(&psi, &phi, &tol()).unwrap();
        assert!(ch.is_incoherent(&tol()));
        assert!(maps(&ch, &psi, &phi) >= 1.0 - 1e-12);
    }
}
