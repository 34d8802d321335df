//! Direct (Wiseman-Milburn) feedback on the `{|01>, |10>}` subspace.
//!
//! A weak continuous measurement of `M = √m Z⊗I` drives the feedback
//! Hamiltonian `F = √f X⊗X`. Averaged over the measurement record the state
//! obeys
//!
//! ```text
//! ρ̇ = -i[H₀ + (M†F + FM)/2, ρ] + D[M - iF]ρ + D[V]ρ,   V = √Γ Z⊗I,
//! ```
//!
//! which leaves the `{|01>, |10>}` block invariant. On that block the
//! operators reduce to `H₀ = μZ + yX`, `M = √m Z`, `F = √f X`, `V = √Γ Z`,
//! and the Bloch vector obeys `ṡ = A s + c`.
//!
//! `Γ` is the coefficient of the Lindblad operator, so without feedback the
//! qubit coherence decays at `2Γ`.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::generators::{
    assemble_liouvillian, build_hamiltonian, lindblad_dissipator_superop, HamiltonianParams,
    Superoperator,
};
use crate::linalg::{c64, eig_real_3x3, kron, pauli, solve_linear, ComplexMatrix, Real3};
use crate::quantum::{BlochVector, DensityMatrix};

/// Rates in units of inverse time; `mu` and `y` are energies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeedbackParams {
    /// Measurement strength.
    pub m: f64,
    /// Feedback strength.
    pub f: f64,
    /// Level splitting on the subspace.
    pub mu: f64,
    /// Environmental dephasing.
    pub gamma: f64,
    /// Open-loop control.
    pub y: f64,
}

impl FeedbackParams {
    pub fn new(m: f64, f: f64, mu: f64, gamma: f64, y: f64) -> Result<Self> {
        let p = Self { m, f, mu, gamma, y };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("m", self.m), ("f", self.f), ("gamma", self.gamma)] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "{name} = {v} must be finite and nonnegative"
                )));
            }
        }
        for (name, v) in [("mu", self.mu), ("y", self.y)] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "{name} = {v} must be finite"
                )));
            }
        }
        Ok(())
    }

    /// Two-qubit Hamiltonian parameters whose `{|01>, |10>}` block is
    /// `μZ + yX` up to a multiple of the identity.
    pub fn hamiltonian_params(&self) -> HamiltonianParams {
        HamiltonianParams::new(self.mu / 2.0, -self.mu / 2.0, self.y / 2.0)
    }

    pub fn measurement_operator(&self) -> ComplexMatrix {
        kron(&pauli::z(), &pauli::identity()).scale_real(self.m.sqrt())
    }

    pub fn feedback_operator(&self) -> ComplexMatrix {
        kron(&pauli::x(), &pauli::x()).scale_real(self.f.sqrt())
    }

    pub fn environment_operator(&self) -> ComplexMatrix {
        kron(&pauli::z(), &pauli::identity()).scale_real(self.gamma.sqrt())
    }

    /// `(M†F + FM) / 2`.
    pub fn feedback_correction(&self) -> ComplexMatrix {
        let m = self.measurement_operator();
        let f = self.feedback_operator();
        (&m.adjoint().matmul(&f) + &f.matmul(&m)).scale_real(0.5)
    }
}

fn feedback_jump(m: &ComplexMatrix, f: &ComplexMatrix) -> ComplexMatrix {
    m - &f.scale(c64(0.0, 1.0))
}

/// Full 16x16 Liouvillian of the feedback master equation.
pub fn wm_full_generator(p: &FeedbackParams) -> Superoperator {
    let h = &build_hamiltonian(&p.hamiltonian_params()) + &p.feedback_correction();
    let jump = feedback_jump(&p.measurement_operator(), &p.feedback_operator());
    assemble_liouvillian(
        &h,
        &[
            lindblad_dissipator_superop(&jump),
            lindblad_dissipator_superop(&p.environment_operator()),
        ],
    )
    .expect("Hermitian 4-level operators")
}

/// Qubit Liouvillian of the feedback master equation on the subspace.
pub fn wm_subspace_generator(p: &FeedbackParams) -> Superoperator {
    let (x, z) = (pauli::x(), pauli::z());
    let h = &z.scale_real(p.mu) + &x.scale_real(p.y);
    let jump = feedback_jump(&z.scale_real(p.m.sqrt()), &x.scale_real(p.f.sqrt()));
    assemble_liouvillian(
        &h,
        &[
            lindblad_dissipator_superop(&jump),
            lindblad_dissipator_superop(&z).scale_real(p.gamma),
        ],
    )
    .expect("Hermitian qubit operators")
}

/// Affine Bloch equation `ṡ = A s + c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochSystem {
    pub a: Real3,
    pub c: [f64; 3],
}

impl BlochSystem {
    pub fn velocity(&self, s: &BlochVector) -> [f64; 3] {
        let mut v = self.c;
        for (i, vi) in v.iter_mut().enumerate() {
            *vi += (0..3).map(|j| self.a[i][j] * s.0[j]).sum::<f64>();
        }
        v
    }

    /// `s = -A⁻¹ c`.
    pub fn steady_state(&self) -> Result<BlochVector> {
        let a = ComplexMatrix::from_real_rows(&self.a);
        let rhs: Vec<Complex64> = self.c.iter().map(|&x| c64(-x, 0.0)).collect();
        let s = match solve_linear(&a, &rhs) {
            Ok(s) => s,
            Err(Error::Singular { .. }) => return Err(Error::NonUniqueSteadyState),
            Err(e) => return Err(e),
        };
        Ok(BlochVector([s[0].re, s[1].re, s[2].re]))
    }

    pub fn eigenvalues(&self) -> [Complex64; 3] {
        eig_real_3x3(&self.a)
    }
}

/// Bloch matrix `A = -2 [[m+Γ, μ, 0], [-μ, f+m+Γ, y], [0, -y, f]]` and
/// drive `c = (0, -4√(mf), 0)`.
///
/// The drive sign is the one generated by `D[√m Z - i√f X]` in the
/// convention `s = (tr Xρ, tr Yρ, tr Zρ)`; it places the steady-state
/// coherence `ρ₀₁` at `+i √(fm) / (Γ+f+m)` for `μ = 0`.
pub fn bloch_system(p: &FeedbackParams) -> BlochSystem {
    let FeedbackParams { m, f, mu, gamma, y } = *p;
    BlochSystem {
        a: [
            [-2.0 * (m + gamma), -2.0 * mu, 0.0],
            [2.0 * mu, -2.0 * (f + m + gamma), -2.0 * y],
            [0.0, 2.0 * y, -2.0 * f],
        ],
        c: [0.0, -4.0 * (m * f).sqrt(), 0.0],
    }
}

/// `{-2f, -f-2Γ-2m ± √(f²-4μ²)}`, valid for `y = 0`.
pub fn bloch_eigenvalues(p: &FeedbackParams) -> Result<[Complex64; 3]> {
    if p.y != 0.0 {
        return Err(Error::RequiresZeroY { y: p.y });
    }
    let FeedbackParams {
        m, f, mu, gamma, ..
    } = *p;
    let root = c64(f * f - 4.0 * mu * mu, 0.0).sqrt();
    let centre = c64(-f - 2.0 * gamma - 2.0 * m, 0.0);
    Ok([c64(-2.0 * f, 0.0), centre + root, centre - root])
}

/// Closed-form steady state for `y = 0` and `f > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedFormSteadyState {
    /// Qubit state on `{|01>, |10>}`.
    pub rho: DensityMatrix,
    pub purity: f64,
    pub concurrence: f64,
}

fn closed_form_denominator(m: f64, f: f64, mu: f64, gamma: f64) -> f64 {
    mu * mu + (gamma + m) * (gamma + m + f)
}

/// `C_ss = 2 √(mf) (μ² + (Γ+m)²)^½ / (μ² + (Γ+m)(Γ+m+f))`.
pub fn closed_form_concurrence(m: f64, f: f64, mu: f64, gamma: f64) -> f64 {
    2.0 * (m * f).sqrt() * (mu * mu + (gamma + m).powi(2)).sqrt()
        / closed_form_denominator(m, f, mu, gamma)
}

/// `P_ss = ½ + 2 fm (μ² + (Γ+m)²) / (μ² + (Γ+m)(Γ+m+f))²`.
pub fn closed_form_purity(m: f64, f: f64, mu: f64, gamma: f64) -> f64 {
    0.5 + 2.0 * f * m * (mu * mu + (gamma + m).powi(2))
        / closed_form_denominator(m, f, mu, gamma).powi(2)
}

pub fn steady_state_closed_form(p: &FeedbackParams) -> Result<ClosedFormSteadyState> {
    if p.y != 0.0 {
        return Err(Error::RequiresZeroY { y: p.y });
    }
    if p.f <= 0.0 {
        return Err(Error::NonUnique);
    }
    let FeedbackParams {
        m, f, mu, gamma, ..
    } = *p;
    let den = closed_form_denominator(m, f, mu, gamma);
    let off = c64(mu, gamma + m) * ((f * m).sqrt() / den);
    let mat = ComplexMatrix::from_rows(&[[c64(0.5, 0.0), off], [off.conj(), c64(0.5, 0.0)]]);
    Ok(ClosedFormSteadyState {
        rho: DensityMatrix::new(mat)?,
        purity: closed_form_purity(m, f, mu, gamma),
        concurrence: closed_form_concurrence(m, f, mu, gamma),
    })
}

/// Steady-state concurrence over an `(m, f)` grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ConcurrenceSweep {
    pub m_values: Vec<f64>,
    pub f_values: Vec<f64>,
    pub gamma: f64,
    pub mu: f64,
    /// Row-major: `[i * f_values.len() + j]` holds `(m_values[i], f_values[j])`.
    pub concurrence: Vec<f64>,
    pub purity: Vec<f64>,
}

impl ConcurrenceSweep {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.concurrence[i * self.f_values.len() + j]
    }

    pub fn log10_one_minus(&self) -> Vec<f64> {
        self.concurrence.iter().map(|c| (1.0 - c).log10()).collect()
    }

    /// `(m, f, C_ss, P_ss)` in row-major order.
    pub fn cells(&self) -> impl Iterator<Item = (f64, f64, f64, f64)> + '_ {
        let nf = self.f_values.len();
        (0..self.concurrence.len()).map(move |k| {
            (
                self.m_values[k / nf],
                self.f_values[k % nf],
                self.concurrence[k],
                self.purity[k],
            )
        })
    }
}

/// `C_ss = 2√(mf)/(Γ+m+f)` over the grid (`μ = 0`).
pub fn concurrence_sweep(m_grid: &[f64], f_grid: &[f64], gamma: f64) -> Result<ConcurrenceSweep> {
    concurrence_sweep_detuned(m_grid, f_grid, gamma, 0.0)
}

/// Closed-form steady-state concurrence and purity over the grid at splitting `mu`.
pub fn concurrence_sweep_detuned(
    m_grid: &[f64],
    f_grid: &[f64],
    gamma: f64,
    mu: f64,
) -> Result<ConcurrenceSweep> {
    let positive = |v: &f64| v.is_finite() && *v > 0.0;
    if m_grid.is_empty() || f_grid.is_empty() {
        return Err(Error::InvalidParameter("empty sweep grid".into()));
    }
    if !m_grid.iter().all(positive) || !f_grid.iter().all(positive) {
        return Err(Error::InvalidParameter(
            "sweep grids must be positive".into(),
        ));
    }
    if !positive(&gamma) || !mu.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "gamma = {gamma} must be positive"
        )));
    }
    let nf = f_grid.len();
    let (concurrence, purity): (Vec<f64>, Vec<f64>) = (0..m_grid.len() * nf)
        .into_par_iter()
        .map(|k| {
            let (m, f) = (m_grid[k / nf], f_grid[k % nf]);
            (
                closed_form_concurrence(m, f, mu, gamma),
                closed_form_purity(m, f, mu, gamma),
            )
        })
        .unzip();
    Ok(ConcurrenceSweep {
        m_values: m_grid.to_vec(),
        f_values: f_grid.to_vec(),
        gamma,
        mu,
        concurrence,
        purity,
    })
}
