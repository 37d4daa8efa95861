#![allow(dead_code)]

use coherence_core::majorization::{self, TTransform};
use coherence_core::{
    CMatrix, Channel, Complex64, DensityMatrix, KrausOperator, ProbabilityProfile, PureState,
};
use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;
pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random profile; with `zeros` some entries are forced to zero.
pub fn random_profile(rng: &mut TestRng, d: usize, zeros: bool) -> ProbabilityProfile {
    loop {
        let mut v: Vec<f64> = (0..d)
            .map(|_| -rng.random::<f64>().max(1e-300).ln())
            .collect();
        if zeros && d > 1 {
            let n_zero = rng.random_range(0..d);
            let mut idx: Vec<usize> = (0..d).collect();
            idx.shuffle(rng);
            for &k in &idx[..n_zero] {
                v[k] = 0.0;
            }
        }
        let total: f64 = v.iter().sum();
        if total > 0.0 {
            return ProbabilityProfile::new(v.into_iter().map(|x| x / total).collect()).unwrap();
        }
    }
}

pub fn random_permutation(rng: &mut TestRng, d: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..d).collect();
    p.shuffle(rng);
    p
}

/// Convex combination of random permutation matrices.
pub fn random_doubly_stochastic(rng: &mut TestRng, d: usize) -> DMatrix<f64> {
    let terms = rng.random_range(1..=d + 1);
    let weights: Vec<f64> = (0..terms).map(|_| rng.random::<f64>() + 1e-3).collect();
    let total: f64 = weights.iter().sum();
    let mut m = DMatrix::zeros(d, d);
    for w in weights {
        let p = random_permutation(rng, d);
        for (r, &c) in p.iter().enumerate() {
            m[(r, c)] += w / total;
        }
    }
    m
}

/// `(x, y)` with `x = D y` for a random doubly stochastic `D`, so `x ≺ y`.
pub fn random_majorized_pair(
    rng: &mut TestRng,
    d: usize,
) -> (ProbabilityProfile, ProbabilityProfile) {
    let zeros = rng.random_bool(0.3);
    let y = random_profile(rng, d, zeros);
    let dmat = random_doubly_stochastic(rng, d);
    let x = &dmat * nalgebra::DVector::from_column_slice(y.entries());
    let x: Vec<f64> = x.iter().map(|v| v.max(0.0)).collect();
    let total: f64 = x.iter().sum();
    (
        ProbabilityProfile::new(x.into_iter().map(|v| v / total).collect()).unwrap(),
        y,
    )
}

/// A state with the given profile and random phases.
pub fn state_with_profile(rng: &mut TestRng, p: &ProbabilityProfile) -> PureState {
    let amps = p
        .entries()
        .iter()
        .map(|&x| Complex64::from_polar(x.sqrt(), rng.random_range(0.0..std::f64::consts::TAU)))
        .collect();
    PureState::normalized(amps).unwrap()
}

pub fn random_state(rng: &mut TestRng, d: usize) -> PureState {
    let p = random_profile(rng, d, false);
    state_with_profile(rng, &p)
}

pub fn random_complex(rng: &mut TestRng) -> Complex64 {
    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

pub fn random_density(rng: &mut TestRng, d: usize) -> DensityMatrix {
    let rank = rng.random_range(1..=d);
    let g = DMatrix::from_fn(d, rank, |_, _| random_complex(rng));
    let m = &g * g.adjoint();
    let tr = m.trace();
    let m = m / tr;
    // exact Hermitian symmetrization of rounding noise
    let m = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
    DensityMatrix::new(m).unwrap()
}

/// Random permutation-times-phase unitary (incoherent both ways).
pub fn random_incoherent_unitary(rng: &mut TestRng, d: usize) -> CMatrix {
    let p = random_permutation(rng, d);
    let mut u = DMatrix::zeros(d, d);
    for (c, &r) in p.iter().enumerate() {
        u[(r, c)] = Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU));
    }
    u
}

/// Random incoherent Kraus operators (one nonzero per column at a random
/// row), scaled so that `sum K^dag K <= I`, then completed with rank-one
/// incoherent operators `|r><w|` from the eigendecomposition of the gap.
pub fn random_incoherent_channel(rng: &mut TestRng, d: usize) -> Channel {
    let n = rng.random_range(1..=3);
    let mut ops: Vec<CMatrix> = (0..n)
        .map(|_| {
            let mut k = DMatrix::zeros(d, d);
            for c in 0..d {
                if rng.random_bool(0.9) {
                    let r = rng.random_range(0..d);
                    k[(r, c)] = random_complex(rng);
                }
            }
            k
        })
        .collect();
    let s = ops
        .iter()
        .fold(DMatrix::<Complex64>::zeros(d, d), |acc, k| {
            acc + k.adjoint() * k
        });
    let lmax = s
        .clone()
        .symmetric_eigenvalues()
        .iter()
        .cloned()
        .fold(0.0, f64::max);
    if lmax > 0.0 {
        let scale = rng.random_range(0.5..=1.0) / lmax.sqrt();
        for k in ops.iter_mut() {
            *k *= Complex64::new(scale, 0.0);
        }
    }
    let s = ops
        .iter()
        .fold(DMatrix::<Complex64>::zeros(d, d), |acc, k| {
            acc + k.adjoint() * k
        });
    let gap = DMatrix::<Complex64>::identity(d, d) - s;
    let gap = (&gap + gap.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = gap.symmetric_eigen();
    for (idx, &lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda <= 1e-15 {
            continue;
        }
        let w = eig.eigenvectors.column(idx) * Complex64::new(lambda.sqrt(), 0.0);
        let r = rng.random_range(0..d);
        let mut l = DMatrix::zeros(d, d);
        for c in 0..d {
            l[(r, c)] = w[c].conj();
        }
        ops.push(l);
    }
    Channel::new(ops.into_iter().map(KrausOperator).collect()).unwrap()
}

/// Folds `apply_t` over a chain.
pub fn fold_chain(chain: &[TTransform], start: &ProbabilityProfile) -> ProbabilityProfile {
    chain
        .iter()
        .fold(start.clone(), |v, t| majorization::apply_t(t, &v).unwrap())
}

pub fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

pub fn sorted_desc(p: &ProbabilityProfile) -> ProbabilityProfile {
    majorization::sort_desc(p).0
}

/// Brute-force majorization: for every subset size k, the largest k-subset
/// sum of x is at most that of y (enumerating all subsets).
pub fn majorizes_by_subsets(x: &[f64], y: &[f64], slack: f64) -> bool {
    let d = x.len();
    let best = |v: &[f64], k: usize| -> f64 {
        (0u32..(1 << d))
            .filter(|m| m.count_ones() as usize == k)
            .map(|m| {
                (0..d)
                    .filter(|&i| m & (1 << i) != 0)
                    .map(|i| v[i])
                    .sum::<f64>()
            })
            .fold(f64::NEG_INFINITY, f64::max)
    };
    (1..d).all(|k| best(x, k) <= best(y, k) + slack)
        && (x.iter().sum::<f64>() - y.iter().sum::<f64>()).abs() <= slack
}
