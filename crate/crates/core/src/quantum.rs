//! State containers and the quantities measured on them.
//!
//! Liouville vectors use row-major stacking: `r[m * n + k] = ρ[m][k]` for an
//! `n`-level system (zero-based), so that `vec(A ρ B) = (A ⊗ Bᵀ) vec(ρ)`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{c64, hermitian_eig, kron, pauli, sqrt_psd, ComplexMatrix};

pub const HERMITIAN_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;
pub const POSITIVITY_TOL: f64 = 1e-9;
pub const NORM_TOL: f64 = 1e-10;
pub const BLOCH_BALL_TOL: f64 = 1e-9;
/// Largest `ρ₁₁ + ρ₄₄` accepted by [`restrict_23`].
pub const LEAKAGE_TOL: f64 = 1e-9;

/// Zero-based indices of `|01>` and `|10>`.
pub const SUBSPACE_23: [usize; 2] = [1, 2];

/// Zero-based Liouville index of `ρ[row][col]` for a `dim`-level system.
#[inline]
pub fn liouville_index(dim: usize, row: usize, col: usize) -> usize {
    row * dim + col
}

/// Normalized state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    vec: Vec<Complex64>,
}

impl PureState {
    pub fn new(vec: Vec<Complex64>) -> Result<Self> {
        let norm = l2_norm(&vec);
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!("state norm {norm} is not 1")));
        }
        Ok(Self { vec })
    }

    /// Rescales `vec` to unit norm.
    pub fn normalized(vec: Vec<Complex64>) -> Result<Self> {
        let norm = l2_norm(&vec);
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidState("cannot normalize a zero vector".into()));
        }
        Ok(Self {
            vec: vec.into_iter().map(|z| z / norm).collect(),
        })
    }

    pub fn basis(dim: usize, k: usize) -> Self {
        let mut vec = vec![c64(0.0, 0.0); dim];
        vec[k] = c64(1.0, 0.0);
        Self { vec }
    }

    /// `(|01> + |10>) / √2`.
    pub fn bell() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            vec: vec![c64(0.0, 0.0), c64(h, 0.0), c64(h, 0.0), c64(0.0, 0.0)],
        }
    }

    pub fn dim(&self) -> usize {
        self.vec.len()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.vec
    }

    pub fn norm(&self) -> f64 {
        l2_norm(&self.vec)
    }

    /// Applies a propagator without renormalizing.
    pub(crate) fn evolved(&self, u: &ComplexMatrix) -> Self {
        Self {
            vec: u.matvec(&self.vec),
        }
    }
}

fn l2_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Density matrix. Constructed either validated ([`DensityMatrix::new`]) or
/// raw ([`DensityMatrix::from_matrix_unchecked`]) for propagation
/// intermediates that may violate positivity at round-off scale.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        let rho = Self::from_matrix_unchecked(mat)?;
        rho.validate()?;
        Ok(rho)
    }

    pub fn from_matrix_unchecked(mat: ComplexMatrix) -> Result<Self> {
        if !mat.is_square() || mat.rows() == 0 {
            return Err(Error::DimensionMismatch(format!(
                "density matrix of shape {}x{}",
                mat.rows(),
                mat.cols()
            )));
        }
        Ok(Self { mat })
    }

    pub fn from_pure(state: &PureState) -> Self {
        Self {
            mat: ComplexMatrix::outer(state.as_slice(), state.as_slice()),
        }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            mat: ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64),
        }
    }

    /// Checks Hermiticity, unit trace and positivity.
    pub fn validate(&self) -> Result<()> {
        self.validate_with(POSITIVITY_TOL)
    }

    pub fn validate_with(&self, positivity_tol: f64) -> Result<()> {
        let deviation = self.mat.hermitian_deviation();
        if deviation > HERMITIAN_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        let tr = self.mat.trace();
        if (tr - c64(1.0, 0.0)).norm() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} is not 1")));
        }
        let lowest = self.min_eigenvalue()?;
        if lowest < -positivity_tol {
            return Err(Error::NotPsd { eigenvalue: lowest });
        }
        Ok(())
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        let eig = hermitian_eig(&self.mat)?;
        Ok(eig.eigenvalues[0])
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.mat
    }

    pub fn trace(&self) -> Complex64 {
        self.mat.trace()
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.mat[(row, col)]
    }
}

/// Row-major flattening of a density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct LiouvilleVector {
    dim: usize,
    data: Vec<Complex64>,
}

impl LiouvilleVector {
    pub fn new(data: Vec<Complex64>) -> Result<Self> {
        let dim = (data.len() as f64).sqrt().round() as usize;
        if dim == 0 || dim * dim != data.len() {
            return Err(Error::DimensionMismatch(format!(
                "Liouville vector of length {} is not a square",
                data.len()
            )));
        }
        Ok(Self { dim, data })
    }

    /// Dimension `N` of the underlying Hilbert space (the vector has `N²` entries).
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<Complex64> {
        self.data
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[liouville_index(self.dim, row, col)]
    }
}

pub fn vectorize(rho: &DensityMatrix) -> LiouvilleVector {
    LiouvilleVector {
        dim: rho.dim(),
        data: rho.matrix().as_slice().to_vec(),
    }
}

/// Inverse of [`vectorize`]; the result is not validated.
pub fn devectorize(r: &LiouvilleVector) -> DensityMatrix {
    DensityMatrix {
        mat: ComplexMatrix::from_vec(r.dim, r.dim, r.data.clone())
            .expect("length is a perfect square by construction"),
    }
}

/// Real Bloch vector `(⟨X⟩, ⟨Y⟩, ⟨Z⟩)` of a qubit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVector(pub [f64; 3]);

impl BlochVector {
    pub fn norm(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn x(&self) -> f64 {
        self.0[0]
    }

    pub fn y(&self) -> f64 {
        self.0[1]
    }

    pub fn z(&self) -> f64 {
        self.0[2]
    }
}

pub fn bloch_from_density(rho: &DensityMatrix) -> Result<BlochVector> {
    if rho.dim() != 2 {
        return Err(Error::DimensionMismatch(format!(
            "Bloch vector of a {}-level state",
            rho.dim()
        )));
    }
    let m = rho.matrix();
    let expect = |p: &ComplexMatrix| p.matmul(m).trace().re;
    Ok(BlochVector([
        expect(&pauli::x()),
        expect(&pauli::y()),
        expect(&pauli::z()),
    ]))
}

/// `½ (I + s_x X + s_y Y + s_z Z)`.
pub fn density_from_bloch(s: &BlochVector) -> Result<DensityMatrix> {
    let norm = s.norm();
    if norm > 1.0 + BLOCH_BALL_TOL {
        return Err(Error::OutsideBlochBall { norm });
    }
    let [x, y, z] = s.0;
    let mat = ComplexMatrix::from_rows(&[
        [c64(0.5 * (1.0 + z), 0.0), c64(0.5 * x, -0.5 * y)],
        [c64(0.5 * x, 0.5 * y), c64(0.5 * (1.0 - z), 0.0)],
    ]);
    Ok(DensityMatrix { mat })
}

/// Population of a two-qubit state outside the `{|01>, |10>}` block.
pub fn leakage_23(rho: &DensityMatrix) -> f64 {
    rho.entry(0, 0).re.abs() + rho.entry(3, 3).re.abs()
}

/// Restriction of a two-qubit state to the `{|01>, |10>}` block.
pub fn restrict_23(rho: &DensityMatrix) -> Result<DensityMatrix> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch(format!(
            "restriction of a {}-level state",
            rho.dim()
        )));
    }
    let population = leakage_23(rho);
    if population > LEAKAGE_TOL {
        return Err(Error::LeakyState { population });
    }
    Ok(DensityMatrix {
        mat: rho.matrix().submatrix(&SUBSPACE_23),
    })
}

/// Places a qubit state on the `{|01>, |10>}` block of a two-qubit state.
pub fn embed_23(rho2: &DensityMatrix) -> Result<DensityMatrix> {
    if rho2.dim() != 2 {
        return Err(Error::DimensionMismatch(format!(
            "embedding of a {}-level state",
            rho2.dim()
        )));
    }
    let mut mat = ComplexMatrix::zeros(4, 4);
    for (i, &r) in SUBSPACE_23.iter().enumerate() {
        for (j, &c) in SUBSPACE_23.iter().enumerate() {
            mat[(r, c)] = rho2.entry(i, j);
        }
    }
    Ok(DensityMatrix { mat })
}

/// `tr(ρ²)`.
pub fn purity(rho: &DensityMatrix) -> f64 {
    let m = rho.matrix();
    m.matmul(m).trace().re
}

/// Wootters concurrence of a two-qubit state.
///
/// The square roots of the eigenvalues of `ρ (Y⊗Y) ρ* (Y⊗Y)` are the
/// singular values of `M = S (Y⊗Y) S*` with `S = √ρ`, since
/// `S (Y⊗Y) ρ* (Y⊗Y) S = M M†` has the same spectrum. They are read off the
/// Hermitian dilation `[[0, M], [M†, 0]]`, whose eigenvalues are `±σᵢ`; this
/// avoids square-rooting eigenvalues at round-off level. Complex conjugation
/// is taken in the standard basis.
pub fn concurrence(rho: &DensityMatrix) -> Result<f64> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch(format!(
            "concurrence of a {}-level state",
            rho.dim()
        )));
    }
    let yy = kron(&pauli::y(), &pauli::y());
    let s = sqrt_psd(rho.matrix())?;
    let m = s.matmul(&yy).matmul(&s.conj());
    let dilation = ComplexMatrix::from_fn(8, 8, |i, j| match (i < 4, j < 4) {
        (true, false) => m[(i, j - 4)],
        (false, true) => m[(j, i - 4)].conj(),
        _ => c64(0.0, 0.0),
    });
    let eig = hermitian_eig(&dilation)?;
    let sigma: Vec<f64> = eig
        .eigenvalues
        .iter()
        .rev()
        .take(4)
        .map(|&l| l.max(0.0))
        .collect();
    Ok((sigma[0] - sigma[1] - sigma[2] - sigma[3]).max(0.0))
}

/// Concurrence of [`embed_23`]`(rho2)`.
pub fn concurrence_2x2_embedded(rho2: &DensityMatrix) -> Result<f64> {
    concurrence(&embed_23(rho2)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bell_rho() -> DensityMatrix {
        DensityMatrix::from_pure(&PureState::bell())
    }

    #[test]
    fn bell_state_vectorizes_to_known_pattern() {
        let r = vectorize(&bell_rho());
        let expected = [
            0., 0., 0., 0., 0., 1., 1., 0., 0., 1., 1., 0., 0., 0., 0., 0.,
        ];
        for (z, &e) in r.as_slice().iter().zip(&expected) {
            assert!((z - c64(0.5 * e, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn maximally_mixed_vectorizes_to_diagonal_positions() {
        let r = vectorize(&DensityMatrix::maximally_mixed(4));
        for i in 0..4 {
            for j in 0..4 {
                let expected = if i == j { 0.25 } else { 0.0 };
                assert_eq!(r.get(i, j), c64(expected, 0.0));
                assert_eq!(r.as_slice()[liouville_index(4, i, j)], c64(expected, 0.0));
            }
        }
    }

    #[test]
    fn liouville_vector_requires_square_length() {
        assert!(matches!(
            LiouvilleVector::new(vec![c64(0.0, 0.0); 5]),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn bloch_examples() {
        let mixed = bloch_from_density(&DensityMatrix::maximally_mixed(2)).unwrap();
        assert_eq!(mixed.0, [0.0, 0.0, 0.0]);
        let zero = bloch_from_density(&DensityMatrix::from_pure(&PureState::basis(2, 0))).unwrap();
        assert_eq!(zero.0, [0.0, 0.0, 1.0]);
        let block = restrict_23(&bell_rho()).unwrap();
        let s = bloch_from_density(&block).unwrap();
        assert!((s.x() - 1.0).abs() < 1e-15 && s.y().abs() < 1e-15 && s.z().abs() < 1e-15);
    }

    #[test]
    fn bloch_ball_is_enforced() {
        assert!(matches!(
            density_from_bloch(&BlochVector([1.0, 0.1, 0.0])),
            Err(Error::OutsideBlochBall { .. })
        ));
        assert!(density_from_bloch(&BlochVector([0.0, 0.0, 1.0 + 1e-10])).is_ok());
        assert!(bloch_from_density(&bell_rho()).is_err());
    }

    #[test]
    fn restriction_and_embedding() {
        let block = restrict_23(&bell_rho()).unwrap();
        let half = ComplexMatrix::from_real_rows(&[[0.5, 0.5], [0.5, 0.5]]);
        assert!(block.matrix().max_abs_diff(&half) < 1e-15);

        let embedded = embed_23(&DensityMatrix::maximally_mixed(2)).unwrap();
        assert_eq!(
            *embedded.matrix(),
            ComplexMatrix::from_real_diag(&[0.0, 0.5, 0.5, 0.0])
        );
        let back = restrict_23(&embedded).unwrap();
        assert_eq!(back, DensityMatrix::maximally_mixed(2));
    }

    #[test]
    fn restriction_rejects_leaky_states() {
        let leaky = DensityMatrix::maximally_mixed(4);
        assert!(matches!(restrict_23(&leaky), Err(Error::LeakyState { .. })));
        let mut m = embed_23(&DensityMatrix::maximally_mixed(2))
            .unwrap()
            .into_matrix();
        m[(0, 0)] = c64(5e-10, 0.0);
        m[(1, 1)] = c64(0.5 - 5e-10, 0.0);
        assert!(restrict_23(&DensityMatrix::new(m).unwrap()).is_ok());
    }

    #[test]
    fn dephased_bell_state_restriction() {
        let (gamma, t) = (1.3f64, 0.8f64);
        let k = (-gamma * t).exp();
        let mut m = ComplexMatrix::zeros(4, 4);
        m[(1, 1)] = c64(0.5, 0.0);
        m[(2, 2)] = c64(0.5, 0.0);
        m[(1, 2)] = c64(0.5 * k, 0.0);
        m[(2, 1)] = c64(0.5 * k, 0.0);
        let rho = DensityMatrix::new(m).unwrap();
        let block = restrict_23(&rho).unwrap();
        let expected = ComplexMatrix::from_real_rows(&[[0.5, 0.5 * k], [0.5 * k, 0.5]]);
        assert!(block.matrix().max_abs_diff(&expected) < 1e-15);
        assert!((concurrence(&rho).unwrap() - k).abs() < 1e-12);
    }

    #[test]
    fn purity_examples() {
        assert!((purity(&bell_rho()) - 1.0).abs() < 1e-15);
        assert!((purity(&DensityMatrix::maximally_mixed(2)) - 0.5).abs() < 1e-15);
        // off-diagonal ±i/3 on the qubit block
        let m = ComplexMatrix::from_rows(&[
            [c64(0.5, 0.0), c64(0.0, 1.0 / 3.0)],
            [c64(0.0, -1.0 / 3.0), c64(0.5, 0.0)],
        ]);
        let rho = DensityMatrix::new(m).unwrap();
        assert!((purity(&rho) - 13.0 / 18.0).abs() < 1e-15);
        assert!((concurrence_2x2_embedded(&rho).unwrap() - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn concurrence_of_reference_states() {
        assert!((concurrence(&bell_rho()).unwrap() - 1.0).abs() < 1e-12);
        let product = DensityMatrix::from_pure(&PureState::basis(4, 0));
        assert!(concurrence(&product).unwrap() < 1e-12);
        assert!(concurrence(&DensityMatrix::maximally_mixed(4)).unwrap() < 1e-12);
        assert!(concurrence_2x2_embedded(&DensityMatrix::maximally_mixed(2)).unwrap() < 1e-12);
        let block =
            DensityMatrix::new(ComplexMatrix::from_real_rows(&[[0.5, 0.5], [0.5, 0.5]])).unwrap();
        assert!((concurrence_2x2_embedded(&block).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn concurrence_of_oscillating_pure_state() {
        for k in 0..50 {
            let theta = 0.07 * k as f64;
            let v = PureState::new(vec![
                c64(0.0, 0.0),
                c64(theta.cos(), 0.0),
                c64(0.0, theta.sin()),
                c64(0.0, 0.0),
            ])
            .unwrap();
            let c = concurrence(&DensityMatrix::from_pure(&v)).unwrap();
            assert!(
                (c - (2.0 * theta).sin().abs()).abs() < 1e-10,
                "theta = {theta}"
            );
        }
    }

    #[test]
    fn concurrence_rejects_wrong_dimension() {
        assert!(concurrence(&DensityMatrix::maximally_mixed(2)).is_err());
        assert!(concurrence_2x2_embedded(&bell_rho()).is_err());
    }

    #[test]
    fn validation_catches_bad_states() {
        let not_unit = ComplexMatrix::identity(2);
        assert!(DensityMatrix::new(not_unit).is_err());
        let negative = ComplexMatrix::from_real_diag(&[1.5, -0.5]);
        assert!(matches!(
            DensityMatrix::new(negative),
            Err(Error::NotPsd { .. })
        ));
        let skew = ComplexMatrix::from_real_rows(&[[0.5, 0.2], [0.0, 0.5]]);
        assert!(matches!(
            DensityMatrix::new(skew),
            Err(Error::NotHermitian { .. })
        ));
        assert!(PureState::new(vec![c64(1.0, 0.0), c64(1.0, 0.0)]).is_err());
        assert!(PureState::normalized(vec![c64(0.0, 0.0)]).is_err());
    }
}
