#![allow(dead_code)]

use entdiss::quantum::{DensityMatrix, PureState};
use entdiss::{c64, ComplexMatrix};
use rand::Rng;

pub fn random_matrix<R: Rng>(rng: &mut R, n: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |_, _| {
        c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    })
}

pub fn random_hermitian<R: Rng>(rng: &mut R, n: usize) -> ComplexMatrix {
    random_matrix(rng, n).hermitian_part()
}

pub fn random_density<R: Rng>(rng: &mut R, n: usize) -> DensityMatrix {
    let g = random_matrix(rng, n);
    let p = g.matmul(&g.adjoint());
    let tr = p.trace().re;
    DensityMatrix::new(p.scale_real(1.0 / tr)).expect("G G† / tr is a state")
}

pub fn random_pure<R: Rng>(rng: &mut R, n: usize) -> PureState {
    let v = (0..n)
        .map(|_| c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    PureState::normalized(v).expect("nonzero with probability one")
}

/// `exp(iH)` for a random Hermitian `H`.
pub fn random_unitary<R: Rng>(rng: &mut R, n: usize) -> ComplexMatrix {
    entdiss::linalg::expm(&random_hermitian(rng, n).scale(c64(0.0, 1.0)))
}

pub fn conjugate(u: &ComplexMatrix, rho: &DensityMatrix) -> DensityMatrix {
    DensityMatrix::from_matrix_unchecked(u.matmul(rho.matrix()).matmul(&u.adjoint()))
        .expect("square")
}
