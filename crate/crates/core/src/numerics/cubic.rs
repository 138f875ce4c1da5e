//! Roots of a real monic cubic.

use num_complex::Complex64;

/// Roots of `x^3 + a2 x^2 + a1 x + a0`.
///
/// Ordering: real roots first in descending order, then a complex
/// conjugate pair with the positive imaginary part first. Conjugate pairs
/// are exact conjugates of each other.
pub fn cubic_roots(a2: f64, a1: f64, a0: f64) -> [Complex64; 3] {
    let r = polish_real(a2, a1, a0, real_root(a2, a1, a0));
    // Deflate: (x - r)(x^2 + b1 x + b0).
    let b1 = a2 + r;
    let b0 = if r.abs() > 1.0 && a0 != 0.0 { -a0 / r } else { a1 + r * b1 };
    let disc = 0.25 * b1 * b1 - b0;
    if disc < 0.0 {
        let z = Complex64::new(-0.5 * b1, (-disc).sqrt());
        let z = polish_complex(a2, a1, a0, z);
        return [Complex64::new(r, 0.0), z, z.conj()];
    }
    let s = disc.sqrt();
    let q = -0.5 * b1 - s.copysign(b1);
    let (x1, x2) = if q == 0.0 { (0.0, 0.0) } else { (q, b0 / q) };
    let mut reals = [r, polish_real(a2, a1, a0, x1), polish_real(a2, a1, a0, x2)];
    reals.sort_by(|a, b| b.total_cmp(a));
    reals.map(|x| Complex64::new(x, 0.0))
}

fn real_root(a2: f64, a1: f64, a0: f64) -> f64 {
    // Depressed cubic t^3 + p t + q with x = t - a2/3.
    let shift = a2 / 3.0;
    let p = a1 - a2 * shift;
    let q = a0 - a1 * shift + 2.0 * shift * shift * shift;
    let disc = 0.25 * q * q + p * p * p / 27.0;
    let t = if disc >= 0.0 {
        let u = (-0.5 * q - disc.sqrt().copysign(q)).cbrt();
        if u == 0.0 {
            0.0
        } else {
            u - p / (3.0 * u)
        }
    } else {
        // Three real roots: take the largest in magnitude for stable deflation.
        let m = 2.0 * (-p / 3.0).sqrt();
        let arg = (3.0 * q / (p * m)).clamp(-1.0, 1.0);
        let theta = arg.acos() / 3.0;
        let candidates = [0.0, 1.0, 2.0].map(|k| m * (theta - 2.0 * std::f64::consts::PI * k / 3.0).cos());
        candidates.into_iter().max_by(|a, b| a.abs().total_cmp(&b.abs())).unwrap_or(0.0)
    };
    t - shift
}

fn eval_real(a2: f64, a1: f64, a0: f64, x: f64) -> (f64, f64) {
    let p = ((x + a2) * x + a1) * x + a0;
    let dp = (3.0 * x + 2.0 * a2) * x + a1;
    (p, dp)
}

fn polish_real(a2: f64, a1: f64, a0: f64, mut x: f64) -> f64 {
    let (mut p, _) = eval_real(a2, a1, a0, x);
    for _ in 0..6 {
        let (_, dp) = eval_real(a2, a1, a0, x);
        if dp == 0.0 || p == 0.0 {
            break;
        }
        let next = x - p / dp;
        let (pn, _) = eval_real(a2, a1, a0, next);
        if pn.abs() >= p.abs() {
            break;
        }
        x = next;
        p = pn;
    }
    x
}

fn polish_complex(a2: f64, a1: f64, a0: f64, mut z: Complex64) -> Complex64 {
    let eval = |z: Complex64| {
        let p = ((z + a2) * z + a1) * z + a0;
        let dp = (3.0 * z + 2.0 * a2) * z + a1;
        (p, dp)
    };
    let (mut p, _) = eval(z);
    for _ in 0..6 {
        let (_, dp) = eval(z);
        if dp.norm() == 0.0 || p.norm() == 0.0 {
            break;
        }
        let next = z - p / dp;
        let (pn, _) = eval(next);
        if pn.norm() >= p.norm() {
            break;
        }
        z = next;
        p = pn;
    }
    z
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::Matrix3;
    use proptest::prelude::*;

    fn residual(a2: f64, a1: f64, a0: f64, z: Complex64) -> f64 {
        (((z + a2) * z + a1) * z + a0).norm()
    }

    fn companion_roots(a2: f64, a1: f64, a0: f64) -> Vec<Complex64> {
        let m = Matrix3::new(-a2, -a1, -a0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0);
        m.complex_eigenvalues().iter().copied().collect()
    }

    #[test]
    fn integer_roots() {
        let r = cubic_roots(-6.0, 11.0, -6.0);
        let re: Vec<f64> = r.iter().map(|z| z.re).collect();
        assert!(r.iter().all(|z| z.im == 0.0));
        for (got, want) in re.iter().zip([3.0, 2.0, 1.0]) {
            assert!((got - want).abs() < 1e-13);
        }
    }

    #[test]
    fn complex_pair_ordering() {
        // (x - 2)(x^2 + 1)
        let r = cubic_roots(-2.0, 1.0, -2.0);
        assert!((r[0] - Complex64::new(2.0, 0.0)).norm() < 1e-14);
        assert!((r[1] - Complex64::new(0.0, 1.0)).norm() < 1e-14);
        assert_eq!(r[2], r[1].conj());
    }

    #[test]
    fn triple_root() {
        let r = cubic_roots(-3.0, 3.0, -1.0);
        for z in r {
            assert!((z - 1.0).norm() < 1e-5);
        }
    }

    proptest! {
        #[test]
        fn agrees_with_companion_matrix(a2 in -50.0f64..50.0, a1 in -500.0f64..500.0, a0 in -5000.0f64..5000.0) {
            let ours = cubic_roots(a2, a1, a0);
            for z in ours {
                let scale = 1.0f64.max(z.norm().powi(3)).max(a1.abs() * z.norm()).max(a0.abs());
                prop_assert!(residual(a2, a1, a0, z) <= 1e-12 * scale, "root {z}");
            }
            let sum: Complex64 = ours.iter().sum();
            prop_assert!((sum.re + a2).abs() <= 1e-10 * (1.0 + a2.abs() + ours.iter().map(|z| z.norm()).sum::<f64>()));
            let mut theirs = companion_roots(a2, a1, a0);
            for z in ours {
                let (i, d) = theirs
                    .iter()
                    .enumerate()
                    .map(|(i, w)| (i, (w - z).norm()))
                    .min_by(|a, b| a.1.total_cmp(&b.1))
                    .unwrap();
                prop_assert!(d <= 1e-6 * (1.0 + z.norm()), "{z} unmatched, distance {d}");
                theirs.remove(i);
            }
        }
    }
}
