//! Seeded random states and observables.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{eig_hermitian, partial_transpose, ComplexMatrix, Subsystem};
use crate::qstates::{DensityMatrix, HermitianOperator};
use crate::C64;

pub type QotRng = ChaCha8Rng;

/// Seed used when `QOT_SEED` is unset or unparsable.
pub const DEFAULT_SEED: u64 = 20_240_917;

pub fn rng_from_seed(seed: u64) -> QotRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Seed from the `QOT_SEED` environment variable.
pub fn seed_from_env() -> u64 {
    std::env::var("QOT_SEED")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_SEED)
}

fn gaussian(rng: &mut QotRng) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn ginibre(rng: &mut QotRng, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// Haar-random unit vector.
pub fn random_state_vector(rng: &mut QotRng, d: usize) -> Vec<C64> {
    let v: Vec<C64> = (0..d).map(|_| gaussian(rng)).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}

pub fn random_pure(rng: &mut QotRng, d: usize) -> DensityMatrix {
    let psi = random_state_vector(rng, d);
    DensityMatrix::from_trusted(ComplexMatrix::projector(&psi), vec![d])
}

/// `G G† / Tr(G G†)` with a `d × rank` Ginibre matrix `G`.
pub fn random_density_rank(rng: &mut QotRng, d: usize, rank: usize) -> DensityMatrix {
    let g = ginibre(rng, d, rank);
    let m = g.matmul(&g.dagger());
    let t = m.trace().re;
    DensityMatrix::from_trusted(m.scale_real(1.0 / t), vec![d])
}

/// Full-rank Ginibre state.
pub fn random_density(rng: &mut QotRng, d: usize) -> DensityMatrix {
    random_density_rank(rng, d, d)
}

/// Hermitian matrix with independent Gaussian entries (GUE up to scale).
pub fn random_hermitian(rng: &mut QotRng, d: usize) -> HermitianOperator {
    let g = ginibre(rng, d, d);
    HermitianOperator::from_trusted(g.hermitian_part(), vec![d])
}

/// Haar-random unitary from the eigenvectors of a GUE sample.
pub fn random_unitary(rng: &mut QotRng, d: usize) -> ComplexMatrix {
    let h = random_hermitian(rng, d);
    eig_hermitian(h.matrix()).expect("Hermitian by construction").eigenvectors
}

/// Random two-party state with positive partial transpose.
///
/// Ginibre states are rejected until one is PPT. Every eight failed draws the
/// candidates get an extra 10% admixture of white noise.
pub fn random_ppt_state(rng: &mut QotRng, d1: usize, d2: usize) -> DensityMatrix {
    let n = d1 * d2;
    for attempt in 0.. {
        let rho = random_density(rng, n);
        let noise = (attempt / 8) as f64 * 0.1;
        let m = &rho.matrix().scale_real(1.0 - noise.min(1.0))
            + &ComplexMatrix::identity(n).scale_real(noise.min(1.0) / n as f64);
        let pt = partial_transpose(&m, Subsystem::First, (d1, d2)).expect("square");
        let lmin = eig_hermitian(&pt).expect("Hermitian").min_eigenvalue();
        if lmin >= 1e-9 {
            return DensityMatrix::from_trusted(m, vec![d1, d2]);
        }
    }
    unreachable!()
}
