//! Dense complex linear algebra for matrices up to 16x16.

mod cubic;
mod eig;
mod expm;
mod lu;
mod matrix;

pub use cubic::{char_poly_3x3, eig_real_3x3, Real3};
pub use eig::{hermitian_eig, sqrt_psd, HermitianEig, PSD_CLIP_TOL};
pub use expm::expm;
pub use lu::{solve_linear, Lu};
pub use matrix::{kron, ComplexMatrix};

use num_complex::Complex64;

#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Single-qubit Pauli matrices in the standard basis.
pub mod pauli {
    use super::{c64, ComplexMatrix};

    pub fn x() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[[0.0, 1.0], [1.0, 0.0]])
    }

    pub fn y() -> ComplexMatrix {
        ComplexMatrix::from_rows(&[
            [c64(0.0, 0.0), c64(0.0, -1.0)],
            [c64(0.0, 1.0), c64(0.0, 0.0)],
        ])
    }

    pub fn z() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[[1.0, 0.0], [0.0, -1.0]])
    }

    pub fn identity() -> ComplexMatrix {
        ComplexMatrix::identity(2)
    }
}
