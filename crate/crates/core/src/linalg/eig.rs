use num_complex::Complex64;

use super::ComplexMatrix;
use crate::error::{Error, Result};

const HERMITIAN_TOL: f64 = 1e-10;
const OFF_DIAG_TOL: f64 = 1e-14;
const MAX_SWEEPS: usize = 100;

/// Eigenvalues in `[-PSD_CLIP_TOL, 0)` are treated as round-off and clipped to zero.
pub const PSD_CLIP_TOL: f64 = 1e-10;

/// Spectral decomposition `m = V diag(λ) V†` of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEig {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Column `k` is the eigenvector of `eigenvalues[k]`.
    pub eigenvectors: ComplexMatrix,
}

impl HermitianEig {
    pub fn reconstruct(&self) -> ComplexMatrix {
        self.apply(|x| x)
    }

    /// `V diag(f(λ)) V†`.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let v = &self.eigenvectors;
        let n = v.rows();
        let vals: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        ComplexMatrix::from_fn(n, n, |i, j| {
            (0..n).map(|k| v[(i, k)] * vals[k] * v[(j, k)].conj()).sum()
        })
    }
}

/// Cyclic complex Jacobi eigensolver.
///
/// Each rotation first removes the phase of the pivot `m[p][q]`, then applies
/// the real symmetric Schur rotation, so the accumulated transform stays
/// unitary and the diagonal stays real.
pub fn hermitian_eig(m: &ComplexMatrix) -> Result<HermitianEig> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "eigendecomposition of a {}x{} matrix",
            m.rows(),
            m.cols()
        )));
    }
    let deviation = m.hermitian_deviation();
    if deviation > HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation });
    }
    let n = m.rows();
    let mut a = m.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius();

    let mut converged = scale == 0.0;
    for _ in 0..MAX_SWEEPS {
        if converged || off_diagonal_norm(&a) <= OFF_DIAG_TOL * scale {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged && off_diagonal_norm(&a) > OFF_DIAG_TOL * scale {
        return Err(Error::NoConvergence { sweeps: MAX_SWEEPS });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let eigenvalues = order.iter().map(|&k| a[(k, k)].re).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok(HermitianEig {
        eigenvalues,
        eigenvectors,
    })
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let phase = (apq / mag).conj();
    let tau = (a[(q, q)].re - a[(p, p)].re) / (2.0 * mag);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    // J = diag(1, phase) * [[c, s], [-s, c]] on the (p, q) plane
    let jpp = Complex64::new(c, 0.0);
    let jpq = Complex64::new(s, 0.0);
    let jqp = phase * (-s);
    let jqq = phase * c;

    let n = a.rows();
    for k in 0..n {
        let (akp, akq) = (a[(k, p)], a[(k, q)]);
        a[(k, p)] = akp * jpp + akq * jqp;
        a[(k, q)] = akp * jpq + akq * jqq;
        let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
        v[(k, p)] = vkp * jpp + vkq * jqp;
        v[(k, q)] = vkp * jpq + vkq * jqq;
    }
    for k in 0..n {
        let (apk, aqk) = (a[(p, k)], a[(q, k)]);
        a[(p, k)] = jpp.conj() * apk + jqp.conj() * aqk;
        a[(q, k)] = jpq.conj() * apk + jqq.conj() * aqk;
    }
    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);
    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);
}

/// Principal square root of a positive semidefinite Hermitian matrix.
pub fn sqrt_psd(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = hermitian_eig(m)?;
    if let Some(&lowest) = eig.eigenvalues.first() {
        if lowest < -PSD_CLIP_TOL {
            return Err(Error::NotPsd { eigenvalue: lowest });
        }
    }
    Ok(eig.apply(|l| l.max(0.0).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c64, pauli};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
        let g = ComplexMatrix::from_fn(n, n, |_, _| {
            c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        g.hermitian_part()
    }

    fn assert_decomposition(m: &ComplexMatrix, eig: &HermitianEig) {
        let n = m.rows();
        assert!(eig.reconstruct().max_abs_diff(m) <= 1e-10);
        let v = &eig.eigenvectors;
        assert!(
            v.adjoint()
                .matmul(v)
                .max_abs_diff(&ComplexMatrix::identity(n))
                <= 1e-10
        );
        assert!(eig.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn pauli_z_spectrum() {
        let eig = hermitian_eig(&pauli::z()).unwrap();
        assert_eq!(eig.eigenvalues, vec![-1.0, 1.0]);
    }

    #[test]
    fn identity_spectrum() {
        let eig = hermitian_eig(&ComplexMatrix::identity(4)).unwrap();
        assert_eq!(eig.eigenvalues, vec![1.0; 4]);
        assert_decomposition(&ComplexMatrix::identity(4), &eig);
    }

    #[test]
    fn pauli_y_has_complex_eigenvectors() {
        let eig = hermitian_eig(&pauli::y()).unwrap();
        assert!((eig.eigenvalues[0] + 1.0).abs() < 1e-15);
        assert!((eig.eigenvalues[1] - 1.0).abs() < 1e-15);
        assert_decomposition(&pauli::y(), &eig);
    }

    #[test]
    fn heisenberg_middle_block() {
        // a = b, c = y/2: the {|01>,|10>} block is [[-c, y], [y, -c]]
        let (a, c) = (0.7, 0.4);
        let y = 2.0 * c;
        let h = ComplexMatrix::from_real_rows(&[
            [2.0 * a + c, 0.0, 0.0, 0.0],
            [0.0, -c, y, 0.0],
            [0.0, y, -c, 0.0],
            [0.0, 0.0, 0.0, -2.0 * a + c],
        ]);
        let eig = hermitian_eig(&h).unwrap();
        let x2 = -c;
        for target in [x2 + y, x2 - y] {
            assert!(eig.eigenvalues.iter().any(|&l| (l - target).abs() < 1e-12));
        }
    }

    #[test]
    fn random_hermitian_decompositions() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for &n in &[2usize, 3, 4, 16] {
            for _ in 0..250 {
                let m = random_hermitian(&mut rng, n);
                let eig = hermitian_eig(&m).unwrap();
                assert_decomposition(&m, &eig);
            }
        }
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = ComplexMatrix::from_real_rows(&[[0.0, 1.0], [0.0, 0.0]]);
        assert!(matches!(hermitian_eig(&m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn sqrt_examples() {
        let s = sqrt_psd(&ComplexMatrix::from_real_diag(&[4.0, 9.0])).unwrap();
        assert!(s.max_abs_diff(&ComplexMatrix::from_real_diag(&[2.0, 3.0])) < 1e-14);
        let i3 = ComplexMatrix::identity(3);
        assert!(sqrt_psd(&i3).unwrap().max_abs_diff(&i3) < 1e-14);
        let proj = (&pauli::identity() + &pauli::x()).scale_real(0.5);
        assert!(sqrt_psd(&proj).unwrap().max_abs_diff(&proj) < 1e-14);
    }

    #[test]
    fn sqrt_clips_round_off_and_rejects_negative() {
        let tiny = ComplexMatrix::from_real_diag(&[1.0, -5e-11]);
        let s = sqrt_psd(&tiny).unwrap();
        assert_eq!(s[(1, 1)], c64(0.0, 0.0));
        let neg = ComplexMatrix::from_real_diag(&[1.0, -1e-6]);
        assert!(matches!(sqrt_psd(&neg), Err(Error::NotPsd { .. })));
    }

    #[test]
    fn random_psd_square_roots() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for &n in &[2usize, 4, 8] {
            for _ in 0..100 {
                let g = ComplexMatrix::from_fn(n, n, |_, _| {
                    c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
                });
                let m = g.matmul(&g.adjoint());
                let s = sqrt_psd(&m).unwrap();
                assert!(s.matmul(&s).max_abs_diff(&m) <= 1e-9);
                assert!(s.is_hermitian(1e-12));
            }
        }
    }
}
