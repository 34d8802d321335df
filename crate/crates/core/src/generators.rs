//! Hamiltonians and Liouvillian superoperators.
//!
//! Every superoperator acts on row-major Liouville vectors (see
//! [`crate::quantum`]), for which `A ρ B ↦ (A ⊗ Bᵀ) r`.

use std::ops::Add;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{c64, kron, ComplexMatrix};
use crate::quantum::{liouville_index, LiouvilleVector};

/// Matrix acting on Liouville vectors of an `N`-level system.
#[derive(Debug, Clone, PartialEq)]
pub struct Superoperator {
    dim: usize,
    mat: ComplexMatrix,
}

impl Superoperator {
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            mat: ComplexMatrix::zeros(dim * dim, dim * dim),
        }
    }

    pub fn from_matrix(mat: ComplexMatrix) -> Result<Self> {
        let dim = (mat.rows() as f64).sqrt().round() as usize;
        if !mat.is_square() || dim * dim != mat.rows() || dim == 0 {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix is not a superoperator",
                mat.rows(),
                mat.cols()
            )));
        }
        Ok(Self { dim, mat })
    }

    /// Hilbert-space dimension `N`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn apply(&self, r: &LiouvilleVector) -> Result<LiouvilleVector> {
        if r.dim() != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "superoperator on {} levels applied to a {}-level state",
                self.dim,
                r.dim()
            )));
        }
        LiouvilleVector::new(self.mat.matvec(r.as_slice()))
    }

    pub fn entry(&self, row: (usize, usize), col: (usize, usize)) -> Complex64 {
        let n = self.dim;
        self.mat[(
            liouville_index(n, row.0, row.1),
            liouville_index(n, col.0, col.1),
        )]
    }

    pub fn scale_real(&self, s: f64) -> Self {
        Self {
            dim: self.dim,
            mat: self.mat.scale_real(s),
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.mat.max_abs_diff(&other.mat)
    }

    pub fn is_diagonal(&self) -> bool {
        let n = self.mat.rows();
        (0..n).all(|i| (0..n).all(|j| i == j || self.mat[(i, j)] == c64(0.0, 0.0)))
    }
}

impl Add for &Superoperator {
    type Output = Superoperator;

    fn add(self, rhs: &Superoperator) -> Superoperator {
        assert_eq!(self.dim, rhs.dim, "superoperator dimension mismatch");
        Superoperator {
            dim: self.dim,
            mat: &self.mat + &rhs.mat,
        }
    }
}

/// Local fields and Heisenberg coupling of
/// `H = a Z⊗I + b I⊗Z + c (X⊗X + Y⊗Y + Z⊗Z)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct HamiltonianParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl HamiltonianParams {
    pub fn new(a: f64, b: f64, c: f64) -> Self {
        Self { a, b, c }
    }

    /// Diagonal entries `x₁..x₄` of the Hamiltonian.
    pub fn diagonal(&self) -> [f64; 4] {
        let Self { a, b, c } = *self;
        [a + b + c, a - b - c, -a + b - c, -a - b + c]
    }

    /// Coupling `y = 2c` between `|01>` and `|10>`.
    pub fn coupling(&self) -> f64 {
        2.0 * self.c
    }
}

pub fn build_hamiltonian(p: &HamiltonianParams) -> ComplexMatrix {
    let x = p.diagonal();
    let y = p.coupling();
    ComplexMatrix::from_real_rows(&[
        [x[0], 0.0, 0.0, 0.0],
        [0.0, x[1], y, 0.0],
        [0.0, y, x[2], 0.0],
        [0.0, 0.0, 0.0, x[3]],
    ])
}

/// `L_H = -i (H ⊗ I - I ⊗ Hᵀ)`, the generator of `-i[H, ρ]`.
pub fn hamiltonian_superop(h: &ComplexMatrix) -> Result<Superoperator> {
    let deviation = h.hermitian_deviation();
    if deviation > 1e-10 {
        return Err(Error::NotHermitian { deviation });
    }
    let n = h.rows();
    let id = ComplexMatrix::identity(n);
    let comm = &kron(h, &id) - &kron(&id, &h.transpose());
    Ok(Superoperator {
        dim: n,
        mat: comm.scale(c64(0.0, -1.0)),
    })
}

/// Generator of `D[V]ρ = V ρ V† - ½ (V†V ρ + ρ V†V)`.
///
/// # Panics
///
/// Panics if `v` is not square.
pub fn lindblad_dissipator_superop(v: &ComplexMatrix) -> Superoperator {
    assert!(v.is_square(), "Lindblad operator must be square");
    let n = v.rows();
    let id = ComplexMatrix::identity(n);
    let vdv = v.adjoint().matmul(v);
    let jump = kron(v, &v.conj());
    let anti = &kron(&vdv, &id) + &kron(&id, &vdv.transpose());
    Superoperator {
        dim: n,
        mat: &jump - &anti.scale_real(0.5),
    }
}

/// `Σ_s D[V_s]`.
pub fn lindblad_dissipator_sum(ops: &[ComplexMatrix]) -> Result<Superoperator> {
    let first = ops
        .first()
        .ok_or_else(|| Error::InvalidParameter("no Lindblad operators".into()))?;
    let mut total = Superoperator::zero(first.rows());
    for v in ops {
        if v.rows() != first.rows() {
            return Err(Error::DimensionMismatch(
                "Lindblad operators differ in size".into(),
            ));
        }
        total = &total + &lindblad_dissipator_superop(v);
    }
    Ok(total)
}

fn rate_matrix(rates: Vec<Vec<f64>>, symmetric: bool, what: &str) -> Result<(usize, Vec<f64>)> {
    let n = rates.len();
    if n == 0 || rates.iter().any(|row| row.len() != n) {
        return Err(Error::DimensionMismatch(format!(
            "{what} must be a square matrix"
        )));
    }
    for (i, row) in rates.iter().enumerate() {
        if row[i] != 0.0 {
            return Err(Error::InvalidParameter(format!(
                "{what} diagonal must be zero"
            )));
        }
        for (j, &r) in row.iter().enumerate() {
            if !r.is_finite() || r < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "{what}[{i}][{j}] = {r} must be finite and nonnegative"
                )));
            }
            if symmetric && r != rates[j][i] {
                return Err(Error::InvalidParameter(format!("{what} must be symmetric")));
            }
        }
    }
    Ok((n, rates.into_iter().flatten().collect()))
}

/// Symmetric pure-dephasing rates `Γ_kn` (zero-based, zero diagonal).
#[derive(Debug, Clone, PartialEq)]
pub struct DephasingRates {
    dim: usize,
    rates: Vec<f64>,
}

impl DephasingRates {
    pub fn new(rates: Vec<Vec<f64>>) -> Result<Self> {
        let (dim, rates) = rate_matrix(rates, true, "dephasing rates")?;
        Ok(Self { dim, rates })
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            rates: vec![0.0; dim * dim],
        }
    }

    /// Sets `Γ_ij = Γ_ji = rate`.
    pub fn with_pair(mut self, i: usize, j: usize, rate: f64) -> Result<Self> {
        if i == j || i >= self.dim || j >= self.dim {
            return Err(Error::InvalidParameter(format!(
                "invalid level pair ({i}, {j})"
            )));
        }
        if !rate.is_finite() || rate < 0.0 {
            return Err(Error::InvalidParameter(format!("dephasing rate {rate}")));
        }
        self.rates[i * self.dim + j] = rate;
        self.rates[j * self.dim + i] = rate;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.rates[i * self.dim + j]
    }

    pub fn max(&self) -> f64 {
        self.rates.iter().copied().fold(0.0, f64::max)
    }
}

/// Population transfer rates; `get(n, k)` is the rate of `|k> → |n>`.
#[derive(Debug, Clone, PartialEq)]
pub struct RelaxationRates {
    dim: usize,
    rates: Vec<f64>,
}

impl RelaxationRates {
    pub fn new(rates: Vec<Vec<f64>>) -> Result<Self> {
        let (dim, rates) = rate_matrix(rates, false, "relaxation rates")?;
        Ok(Self { dim, rates })
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            rates: vec![0.0; dim * dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, n: usize, k: usize) -> f64 {
        self.rates[n * self.dim + k]
    }
}

/// Rate-equation superoperator: coherences `ρ_kn` decay at `Γ_kn`,
/// populations exchange at `γ_nk`.
pub fn phenomenological_superop(d: &DephasingRates, g: &RelaxationRates) -> Result<Superoperator> {
    if d.dim != g.dim {
        return Err(Error::DimensionMismatch(format!(
            "dephasing rates on {} levels, relaxation rates on {}",
            d.dim, g.dim
        )));
    }
    let n = d.dim;
    let mut l = Superoperator::zero(n);
    let idx = |i, j| liouville_index(n, i, j);
    for k in 0..n {
        for m in 0..n {
            if k == m {
                continue;
            }
            l.mat[(idx(k, m), idx(k, m))] = c64(-d.get(k, m), 0.0);
            // gain of |m> from |k>
            l.mat[(idx(m, m), idx(k, k))] = c64(g.get(m, k), 0.0);
        }
    }
    for m in 0..n {
        let loss: f64 = (0..n).filter(|&k| k != m).map(|k| g.get(k, m)).sum();
        l.mat[(idx(m, m), idx(m, m))] = c64(-loss, 0.0);
    }
    Ok(l)
}

/// Diagonal Lindblad amplitudes `a_ii` of the pure-dephasing operators
/// `V_i = a_ii E_ii`.
#[derive(Debug, Clone, PartialEq)]
pub struct LindbladAmplitudes {
    pub a_diag: Vec<Complex64>,
}

impl LindbladAmplitudes {
    pub fn new(a_diag: Vec<Complex64>) -> Self {
        Self { a_diag }
    }

    /// Real signed amplitudes, the canonical phase convention.
    pub fn from_real(a: &[f64]) -> Self {
        Self {
            a_diag: a.iter().map(|&x| c64(x, 0.0)).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.a_diag.len()
    }

    /// One operator `a_ii E_ii` per level.
    pub fn operators(&self) -> Vec<ComplexMatrix> {
        let n = self.dim();
        self.a_diag
            .iter()
            .enumerate()
            .map(|(i, &a)| {
                let mut e = ComplexMatrix::zeros(n, n);
                e[(i, i)] = a;
                e
            })
            .collect()
    }

    /// `Γ_ij = ½ (|a_ii|² + |a_jj|²)`.
    pub fn rates(&self) -> DephasingRates {
        let n = self.dim();
        let mut rates = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    rates[i * n + j] =
                        0.5 * (self.a_diag[i].norm_sqr() + self.a_diag[j].norm_sqr());
                }
            }
        }
        DephasingRates { dim: n, rates }
    }
}

/// Rates from the amplitudes together with the diagonal pure-dephasing
/// generator (no population transfer).
///
/// Each amplitude is an independent operator `a_ii E_ii`, so the generator
/// equals `Σ_i D[a_ii E_ii]` whatever the phases of the `a_ii`.
pub fn pure_dephasing_from_amplitudes(a: &LindbladAmplitudes) -> (DephasingRates, Superoperator) {
    let rates = a.rates();
    let l = phenomenological_superop(&rates, &RelaxationRates::zeros(a.dim()))
        .expect("dimensions agree by construction");
    (rates, l)
}

/// `D[diag(a)]`: the same amplitudes combined into a single operator.
///
/// Unlike [`pure_dephasing_from_amplitudes`] this depends on relative
/// phases: coherence `ρ_kn` decays at `½ |a_kk - a_nn|²`, so equal amplitudes
/// give the zero generator.
pub fn collective_dephasing_superop(a: &LindbladAmplitudes) -> Superoperator {
    lindblad_dissipator_superop(&ComplexMatrix::from_diag(&a.a_diag))
}

/// Coherence decay rates `½ |a_kk - a_nn|²` of [`collective_dephasing_superop`].
pub fn collective_dephasing_rates(a: &LindbladAmplitudes) -> DephasingRates {
    let n = a.dim();
    let mut rates = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                rates[i * n + j] = 0.5 * (a.a_diag[i] - a.a_diag[j]).norm_sqr();
            }
        }
    }
    DephasingRates { dim: n, rates }
}

/// Outcome of [`check_dephasing_constraints`].
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintCheck {
    pub physical: bool,
    /// Nonnegative `x_i = |a_ii|²` with `Γ_ij = (x_i + x_j) / 2`.
    pub witness: Option<[f64; 4]>,
}

/// Decides whether two-qubit dephasing rates come from diagonal Lindblad
/// operators: `Γ₁₂+Γ₃₄ = Γ₁₄+Γ₂₃ = Γ₁₃+Γ₂₄` and the implied `x_i` are
/// nonnegative.
pub fn check_dephasing_constraints(d: &DephasingRates) -> Result<ConstraintCheck> {
    if d.dim != 4 {
        return Err(Error::DimensionMismatch(format!(
            "constraint check needs 4 levels, got {}",
            d.dim
        )));
    }
    let tol = 1e-9 * d.max();
    let g = |i: usize, j: usize| d.get(i - 1, j - 1);
    let sums = [g(1, 2) + g(3, 4), g(1, 4) + g(2, 3), g(1, 3) + g(2, 4)];
    let rejected = ConstraintCheck {
        physical: false,
        witness: None,
    };
    if (sums[0] - sums[1]).abs() > tol || (sums[0] - sums[2]).abs() > tol {
        return Ok(rejected);
    }

    let x1 = g(1, 2) + g(1, 3) - g(2, 3);
    let x2 = g(1, 2) + g(2, 3) - g(1, 3);
    let x3 = g(1, 3) + g(2, 3) - g(1, 2);
    let x4 = 2.0 * g(1, 4) - x1;
    let x = [x1, x2, x3, x4];
    if x.iter().any(|&xi| xi < -tol) {
        return Ok(rejected);
    }
    let x = x.map(|xi| xi.max(0.0));
    for i in 0..4 {
        for j in (i + 1)..4 {
            if ((x[i] + x[j]) / 2.0 - d.get(i, j)).abs() > 4.0 * tol {
                return Ok(rejected);
            }
        }
    }
    Ok(ConstraintCheck {
        physical: true,
        witness: Some(x),
    })
}

/// `L = L_H + Σ L_D`.
pub fn assemble_liouvillian(
    h: &ComplexMatrix,
    dissipators: &[Superoperator],
) -> Result<Superoperator> {
    let mut l = hamiltonian_superop(h)?;
    for d in dissipators {
        if d.dim != l.dim {
            return Err(Error::DimensionMismatch(format!(
                "{}-level dissipator with a {}-level Hamiltonian",
                d.dim, l.dim
            )));
        }
        l = &l + d;
    }
    Ok(l)
}
