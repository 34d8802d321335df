use super::{ComplexMatrix, Lu};

const PADE_ORDER: usize = 6;
const SCALED_NORM_BOUND: f64 = 0.5;

/// Matrix exponential by scaling and squaring with a diagonal Padé(6,6)
/// approximant.
///
/// # Panics
///
/// Panics if `m` is not square or contains non-finite entries.
pub fn expm(m: &ComplexMatrix) -> ComplexMatrix {
    assert!(m.is_square(), "expm of a non-square matrix");
    let n = m.rows();
    let norm = m.norm1();
    assert!(norm.is_finite(), "expm of a non-finite matrix");
    if norm == 0.0 {
        return ComplexMatrix::identity(n);
    }

    let squarings = if norm > SCALED_NORM_BOUND {
        (norm / SCALED_NORM_BOUND).log2().ceil() as i32
    } else {
        0
    };
    let a = m.scale_real(0.5f64.powi(squarings));

    // c_k = (2p - k)! p! / ((2p)! k! (p - k)!)
    let mut coeffs = [0.0; PADE_ORDER + 1];
    coeffs[0] = 1.0;
    for k in 1..=PADE_ORDER {
        coeffs[k] =
            coeffs[k - 1] * (PADE_ORDER + 1 - k) as f64 / (k * (2 * PADE_ORDER + 1 - k)) as f64;
    }

    let mut numer = ComplexMatrix::identity(n);
    let mut denom = ComplexMatrix::identity(n);
    let mut power = ComplexMatrix::identity(n);
    for (k, &ck) in coeffs.iter().enumerate().skip(1) {
        power = power.matmul(&a);
        let term = power.scale_real(ck);
        numer += &term;
        if k % 2 == 0 {
            denom += &term;
        } else {
            denom = &denom - &term;
        }
    }

    // The Padé denominator is well conditioned for ‖a‖₁ ≤ 0.5.
    let lu = Lu::factor(&denom).expect("Padé denominator is nonsingular");
    let mut result = lu.solve_matrix(&numer);
    for _ in 0..squarings {
        result = result.matmul(&result);
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c64, hermitian_eig, pauli};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_exponent() {
        assert_eq!(
            expm(&ComplexMatrix::zeros(3, 3)),
            ComplexMatrix::identity(3)
        );
    }

    #[test]
    fn pauli_rotation() {
        for &theta in &[0.1, 1.0, 2.5, 17.0] {
            let u = expm(&pauli::x().scale(c64(0.0, theta)));
            let expected = &pauli::identity().scale_real(theta.cos())
                + &pauli::x().scale(c64(0.0, theta.sin()));
            assert!(u.max_abs_diff(&expected) < 1e-12, "theta = {theta}");
        }
    }

    #[test]
    fn diagonal_matches_scalar_exp() {
        let d = ComplexMatrix::from_diag(&[c64(-3.0, 0.0), c64(0.5, 2.0), c64(10.0, -1.0)]);
        let e = expm(&d);
        for i in 0..3 {
            let exact = d[(i, i)].exp();
            assert!((e[(i, i)] - exact).norm() <= 1e-13 * exact.norm());
        }
    }

    #[test]
    fn matches_spectral_exponential_of_hermitian() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let h = ComplexMatrix::from_fn(4, 4, |_, _| {
                c64(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))
            })
            .hermitian_part();
            let t = rng.gen_range(0.0..5.0);
            let u = expm(&h.scale(c64(0.0, t)));
            let eig = hermitian_eig(&h).unwrap();
            let v = &eig.eigenvectors;
            let phases: Vec<_> = eig
                .eigenvalues
                .iter()
                .map(|&l| c64(0.0, l * t).exp())
                .collect();
            let spectral = v
                .matmul(&ComplexMatrix::from_diag(&phases))
                .matmul(&v.adjoint());
            assert!(u.max_abs_diff(&spectral) < 1e-10);
            assert!(
                u.adjoint()
                    .matmul(&u)
                    .max_abs_diff(&ComplexMatrix::identity(4))
                    < 1e-9
            );
        }
    }

    #[test]
    fn inverse_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for &n in &[2usize, 4, 16] {
            for _ in 0..20 {
                let m = ComplexMatrix::from_fn(n, n, |_, _| {
                    c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
                });
                let p = expm(&m).matmul(&expm(&-&m));
                assert!(p.max_abs_diff(&ComplexMatrix::identity(n)) <= 1e-9);
            }
        }
    }
}
