use std::f64::consts::PI;

use num_complex::Complex64;

pub type Real3 = [[f64; 3]; 3];

/// Coefficients `[c0, c1, c2]` of the monic characteristic polynomial
/// `λ³ + c2 λ² + c1 λ + c0` of `a`.
pub fn char_poly_3x3(a: &Real3) -> [f64; 3] {
    let trace = a[0][0] + a[1][1] + a[2][2];
    let minors = a[0][0] * a[1][1] - a[0][1] * a[1][0] + a[0][0] * a[2][2] - a[0][2] * a[2][0]
        + a[1][1] * a[2][2]
        - a[1][2] * a[2][1];
    let det = a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
        - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
        + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
    [-det, minors, -trace]
}

fn eval(c: &[f64; 3], z: Complex64) -> (Complex64, Complex64) {
    let p = ((z + c[2]) * z + c[1]) * z + c[0];
    let dp = (z * 3.0 + 2.0 * c[2]) * z + c[1];
    (p, dp)
}

/// Rounding bound for evaluating the polynomial at `z`.
fn eval_bound(c: &[f64; 3], z: Complex64) -> f64 {
    let r = z.norm();
    16.0 * f64::EPSILON * (r.powi(3) + c[2].abs() * r * r + c[1].abs() * r + c[0].abs())
}

/// Eigenvalues of a real 3x3 matrix as roots of its characteristic cubic.
///
/// Roots come from Cardano's formula (trigonometric form when all three are
/// real), followed by a Newton polishing step. Clustered roots are snapped to
/// the nearby critical point of the cubic when that point is a root to
/// working precision, which keeps exact double and triple roots accurate.
/// The order of the returned values is unspecified.
pub fn eig_real_3x3(a: &Real3) -> [Complex64; 3] {
    let c = char_poly_3x3(a);
    let mut roots = cardano(&c);
    for r in roots.iter_mut() {
        polish(&c, r);
    }
    merge_clusters(&c, &mut roots);
    roots
}

fn cardano(c: &[f64; 3]) -> [Complex64; 3] {
    let shift = c[2] / 3.0;
    // depressed cubic x³ + p x + q with λ = x - c2/3
    let p = c[1] - c[2] * c[2] / 3.0;
    let q = 2.0 * c[2].powi(3) / 27.0 - c[2] * c[1] / 3.0 + c[0];
    let disc = (q / 2.0).powi(2) + (p / 3.0).powi(3);

    let xs: [Complex64; 3] = if p == 0.0 && q == 0.0 {
        [Complex64::new(0.0, 0.0); 3]
    } else if disc > 0.0 {
        let sq = disc.sqrt();
        let w = if q >= 0.0 {
            -q / 2.0 - sq
        } else {
            -q / 2.0 + sq
        };
        let u = w.cbrt();
        let v = if u != 0.0 { -p / (3.0 * u) } else { 0.0 };
        let re = -(u + v) / 2.0;
        let im = 3f64.sqrt() / 2.0 * (u - v);
        [
            Complex64::new(u + v, 0.0),
            Complex64::new(re, im),
            Complex64::new(re, -im),
        ]
    } else {
        let r = 2.0 * (-p / 3.0).sqrt();
        let arg = (3.0 * q / (p * r)).clamp(-1.0, 1.0);
        let phi = arg.acos() / 3.0;
        [0.0, 1.0, 2.0].map(|k| Complex64::new(r * (phi - 2.0 * PI * k / 3.0).cos(), 0.0))
    };
    xs.map(|x| x - shift)
}

fn polish(c: &[f64; 3], z: &mut Complex64) {
    let (p, dp) = eval(c, *z);
    if dp.norm() == 0.0 || !p.is_finite() {
        return;
    }
    let cand = *z - p / dp;
    if cand.is_finite() && eval(c, cand).0.norm() <= p.norm() {
        *z = cand;
    }
}

fn merge_clusters(c: &[f64; 3], roots: &mut [Complex64; 3]) {
    let scale = 1.0 + roots.iter().map(|r| r.norm()).fold(0.0, f64::max);
    let cluster_tol = 1e-5 * scale;
    let close = |a: Complex64, b: Complex64| (a - b).norm() < cluster_tol;

    if close(roots[0], roots[1]) && close(roots[1], roots[2]) {
        let t = Complex64::new(-c[2] / 3.0, 0.0);
        let (p, dp) = eval(c, t);
        if p.norm() <= eval_bound(c, t) && dp.norm() <= 1e-10 * scale * scale {
            *roots = [t; 3];
            return;
        }
    }

    // critical points: roots of 3λ² + 2 c2 λ + c1
    let qd = Complex64::new(c[2] * c[2] - 3.0 * c[1], 0.0).sqrt();
    let crit = [(-c[2] + qd) / 3.0, (-c[2] - qd) / 3.0].map(|z| {
        if z.im.abs() <= 1e-12 * scale {
            Complex64::new(z.re, 0.0)
        } else {
            z
        }
    });
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        if !close(roots[i], roots[j]) {
            continue;
        }
        let mid = (roots[i] + roots[j]) / 2.0;
        let t = if (crit[0] - mid).norm() <= (crit[1] - mid).norm() {
            crit[0]
        } else {
            crit[1]
        };
        if eval(c, t).0.norm() <= eval_bound(c, t) {
            roots[i] = t;
            roots[j] = t;
        }
    }
}
