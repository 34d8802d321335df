//! Time propagation and steady states.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::generators::Superoperator;
use crate::linalg::{c64, expm, ComplexMatrix, Lu};
use crate::quantum::{
    bloch_from_density, concurrence, devectorize, liouville_index, purity, DensityMatrix,
    LiouvilleVector, PureState,
};

/// Uniform sampling of `[t_start, t_end]`, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    t_start: f64,
    t_end: f64,
    n_samples: usize,
}

impl TimeGrid {
    pub fn new(t_start: f64, t_end: f64, n_samples: usize) -> Result<Self> {
        if !t_start.is_finite() || !t_end.is_finite() || t_end <= t_start {
            return Err(Error::InvalidParameter(format!(
                "time grid needs t_end > t_start (got [{t_start}, {t_end}])"
            )));
        }
        if n_samples < 2 {
            return Err(Error::InvalidParameter(
                "time grid needs at least 2 samples".into(),
            ));
        }
        Ok(Self {
            t_start,
            t_end,
            n_samples,
        })
    }

    /// `[0, t_end]` split into `intervals` equal steps.
    pub fn from_steps(t_end: f64, intervals: usize) -> Result<Self> {
        Self::new(0.0, t_end, intervals + 1)
    }

    pub fn t_start(&self) -> f64 {
        self.t_start
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn len(&self) -> usize {
        self.n_samples
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn times(&self) -> Vec<f64> {
        let span = self.t_end - self.t_start;
        let last = self.n_samples - 1;
        (0..self.n_samples)
            .map(|k| {
                if k == last {
                    self.t_end
                } else {
                    self.t_start + span * k as f64 / last as f64
                }
            })
            .collect()
    }
}

/// Sampled states plus named observable series.
#[derive(Debug, Clone)]
pub struct Trajectory<S> {
    pub times: Vec<f64>,
    pub states: Vec<S>,
    pub observables: BTreeMap<String, Vec<f64>>,
}

impl<S> Trajectory<S> {
    pub fn observable(&self, name: &str) -> Option<&[f64]> {
        self.observables.get(name).map(Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Sign `s` of the propagator `exp(s i t H)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PropagatorSign {
    /// `exp(+itH)`.
    #[default]
    Plus,
    /// `exp(-itH)`.
    Minus,
}

impl PropagatorSign {
    pub fn as_f64(self) -> f64 {
        match self {
            Self::Plus => 1.0,
            Self::Minus => -1.0,
        }
    }
}

/// Propagates `v0` with `exp(sign · i t H)` at every grid time.
///
/// Observables: `norm`, plus `concurrence` for two-qubit states.
pub fn unitary_evolve(
    h: &ComplexMatrix,
    v0: &PureState,
    grid: &TimeGrid,
    sign: PropagatorSign,
) -> Result<Trajectory<PureState>> {
    let deviation = h.hermitian_deviation();
    if deviation > 1e-10 {
        return Err(Error::NotHermitian { deviation });
    }
    if h.rows() != v0.dim() {
        return Err(Error::DimensionMismatch(format!(
            "{}-level Hamiltonian with a {}-level state",
            h.rows(),
            v0.dim()
        )));
    }
    let times = grid.times();
    let generator = h.scale(c64(0.0, sign.as_f64()));
    let states: Vec<PureState> = times
        .iter()
        .map(|&t| v0.evolved(&expm(&generator.scale_real(t))))
        .collect();

    let mut observables = BTreeMap::new();
    observables.insert(
        "norm".to_string(),
        states.iter().map(PureState::norm).collect(),
    );
    if v0.dim() == 4 {
        let conc = states
            .iter()
            .map(|s| concurrence(&DensityMatrix::from_pure(s)))
            .collect::<Result<Vec<_>>>()?;
        observables.insert("concurrence".to_string(), conc);
    }
    Ok(Trajectory {
        times,
        states,
        observables,
    })
}

/// Observable series for a sequence of density matrices.
///
/// Always: `trace`, `purity`, `min_eigenvalue`. Two-qubit states add
/// `concurrence`; qubit states add `bloch_x`, `bloch_y`, `bloch_z`.
pub fn density_observables(states: &[DensityMatrix]) -> Result<BTreeMap<String, Vec<f64>>> {
    let mut obs: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    let mut push = |k: &str, v: f64| obs.entry(k.to_string()).or_default().push(v);
    for rho in states {
        push("trace", rho.trace().re);
        push("purity", purity(rho));
        push("min_eigenvalue", rho.min_eigenvalue()?);
        match rho.dim() {
            4 => push("concurrence", concurrence(rho)?),
            2 => {
                let s = bloch_from_density(rho)?;
                push("bloch_x", s.x());
                push("bloch_y", s.y());
                push("bloch_z", s.z());
            }
            _ => {}
        }
    }
    Ok(obs)
}

fn check_dims(l: &Superoperator, r0: &LiouvilleVector) -> Result<()> {
    if l.dim() != r0.dim() {
        return Err(Error::DimensionMismatch(format!(
            "{}-level Liouvillian with a {}-level state",
            l.dim(),
            r0.dim()
        )));
    }
    Ok(())
}

fn density_trajectory(
    times: Vec<f64>,
    vectors: Vec<LiouvilleVector>,
) -> Result<Trajectory<DensityMatrix>> {
    let states: Vec<DensityMatrix> = vectors.iter().map(devectorize).collect();
    let observables = density_observables(&states)?;
    Ok(Trajectory {
        times,
        states,
        observables,
    })
}

/// `r(t) = exp(L t) r₀`, with the exponential recomputed at each sample.
pub fn propagate_expm(
    l: &Superoperator,
    r0: &LiouvilleVector,
    grid: &TimeGrid,
) -> Result<Trajectory<DensityMatrix>> {
    check_dims(l, r0)?;
    let times = grid.times();
    let vectors = times
        .iter()
        .map(|&t| LiouvilleVector::new(expm(&l.matrix().scale_real(t)).matvec(r0.as_slice())))
        .collect::<Result<Vec<_>>>()?;
    density_trajectory(times, vectors)
}

/// Tolerances of the adaptive integrator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-12,
        }
    }
}

// Dormand-Prince 5(4); the system is autonomous so the nodes c_i are not needed
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
// fifth-order weights minus fourth-order weights
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

struct Dopri<'a> {
    l: &'a ComplexMatrix,
    opts: OdeOptions,
    h_min: f64,
}

impl Dopri<'_> {
    fn rhs(&self, y: &[Complex64]) -> Vec<Complex64> {
        self.l.matvec(y)
    }

    /// Integrates from `t` to `t_target`, updating `y`, `k1` (FSAL) and the
    /// proposed step `h`.
    fn advance(
        &self,
        t: &mut f64,
        t_target: f64,
        y: &mut [Complex64],
        k1: &mut Vec<Complex64>,
        h: &mut f64,
    ) -> Result<()> {
        let n = y.len();
        while *t < t_target {
            let remaining = t_target - *t;
            let last = *h >= remaining;
            let step = if last { remaining } else { *h };

            let mut k: Vec<Vec<Complex64>> = Vec::with_capacity(7);
            k.push(k1.clone());
            let mut stage = vec![c64(0.0, 0.0); n];
            for a_row in &A[1..] {
                for (i, st) in stage.iter_mut().enumerate() {
                    let mut acc = y[i];
                    for (kj, &a) in k.iter().zip(a_row) {
                        if a != 0.0 {
                            acc += kj[i] * (step * a);
                        }
                    }
                    *st = acc;
                }
                k.push(self.rhs(&stage));
            }
            // stage now holds the fifth-order solution, k[6] its derivative
            let mut err: f64 = 0.0;
            for i in 0..n {
                let e: Complex64 = (0..7).map(|s| k[s][i] * E[s]).sum::<Complex64>() * step;
                let sc = self.opts.atol + self.opts.rtol * y[i].norm().max(stage[i].norm());
                err = err.max(e.norm() / sc);
            }

            if err <= 1.0 {
                *t = if last { t_target } else { *t + step };
                y.copy_from_slice(&stage);
                *k1 = k.pop().expect("seven stages");
            }
            let factor = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            let factor = if err > 1.0 { factor.min(1.0) } else { factor };
            // a clamped final step does not shrink the proposal
            if !(last && err <= 1.0 && step < *h) {
                *h = step * factor;
            }
            if *h < self.h_min {
                return Err(Error::StepUnderflow { t: *t });
            }
        }
        Ok(())
    }
}

/// Adaptive Dormand-Prince 5(4) integration of `ṙ = L r`.
pub fn propagate_ode(
    l: &Superoperator,
    r0: &LiouvilleVector,
    grid: &TimeGrid,
    opts: OdeOptions,
) -> Result<Trajectory<DensityMatrix>> {
    check_dims(l, r0)?;
    if !(opts.rtol > 0.0 && opts.atol > 0.0) {
        return Err(Error::InvalidParameter(
            "ODE tolerances must be positive".into(),
        ));
    }
    let times = grid.times();
    let span = grid.t_end() - grid.t_start();
    let solver = Dopri {
        l: l.matrix(),
        opts,
        h_min: 1e-14 * span,
    };

    let mut y = r0.as_slice().to_vec();
    let mut k1 = solver.rhs(&y);
    let scale = l.matrix().norm1();
    let mut h = if scale > 0.0 {
        (opts.rtol.powf(0.2) / scale).min(span)
    } else {
        span
    };
    let mut t = grid.t_start();
    let mut vectors = Vec::with_capacity(times.len());
    for &target in &times {
        solver.advance(&mut t, target, &mut y, &mut k1, &mut h)?;
        vectors.push(LiouvilleVector::new(y.clone())?);
    }
    density_trajectory(times, vectors)
}

fn trace_row(dim: usize) -> Vec<usize> {
    (0..dim).map(|i| liouville_index(dim, i, i)).collect()
}

/// Unique trace-one solution of `L r = 0`.
///
/// Solves the bordered system in which the `ρ₀₀` row of `L` is replaced by
/// the trace functional. That row is redundant for a trace-preserving `L`,
/// so the system is singular exactly when the kernel is degenerate.
pub fn steady_state(l: &Superoperator) -> Result<DensityMatrix> {
    let n = l.dim();
    let mut bordered = l.matrix().clone();
    let cols = bordered.cols();
    for j in 0..cols {
        bordered[(0, j)] = c64(0.0, 0.0);
    }
    for j in trace_row(n) {
        bordered[(0, j)] = c64(1.0, 0.0);
    }
    let mut rhs = vec![c64(0.0, 0.0); cols];
    rhs[0] = c64(1.0, 0.0);

    let lu = match Lu::factor(&bordered) {
        Ok(lu) => lu,
        Err(Error::Singular { .. }) => return Err(Error::NonUniqueSteadyState),
        Err(e) => return Err(e),
    };
    let mut x = lu.solve(&rhs);
    let res: Vec<Complex64> = bordered
        .matvec(&x)
        .iter()
        .zip(&rhs)
        .map(|(a, b)| b - a)
        .collect();
    for (xi, d) in x.iter_mut().zip(lu.solve(&res)) {
        *xi += d;
    }
    let mat = ComplexMatrix::from_vec(n, n, x)?.hermitian_part();
    DensityMatrix::new(mat)
}

/// Restriction of `l` to states supported on the levels in `support`.
///
/// Fails unless the coherences and populations on `support` form an
/// invariant subspace of `l`.
pub fn restrict_superop(l: &Superoperator, support: &[usize]) -> Result<Superoperator> {
    let n = l.dim();
    if support.is_empty() || support.iter().any(|&k| k >= n) {
        return Err(Error::InvalidParameter(format!(
            "invalid support {support:?}"
        )));
    }
    let inside: Vec<usize> = support
        .iter()
        .flat_map(|&i| support.iter().map(move |&j| liouville_index(n, i, j)))
        .collect();
    let m = l.matrix();
    let scale = m.max_abs();
    for &col in &inside {
        for row in 0..n * n {
            if !inside.contains(&row) && m[(row, col)].norm() > 1e-12 * scale {
                return Err(Error::InvalidParameter(format!(
                    "levels {support:?} are not invariant under the Liouvillian"
                )));
            }
        }
    }
    Superoperator::from_matrix(m.submatrix(&inside))
}

/// Steady state of the dynamics restricted to the invariant levels
/// `support`, embedded back into the full space.
pub fn steady_state_on_support(l: &Superoperator, support: &[usize]) -> Result<DensityMatrix> {
    let reduced = steady_state(&restrict_superop(l, support)?)?;
    let n = l.dim();
    let mut mat = ComplexMatrix::zeros(n, n);
    for (i, &r) in support.iter().enumerate() {
        for (j, &c) in support.iter().enumerate() {
            mat[(r, c)] = reduced.entry(i, j);
        }
    }
    DensityMatrix::new(mat)
}
