//! Legendre polynomials at complex argument.

use num_complex::Complex64;

/// `P_n(z)` by the three-term recurrence.
pub fn legendre_p(n: usize, z: Complex64) -> Complex64 {
    let mut prev = Complex64::new(1.0, 0.0);
    if n == 0 {
        return prev;
    }
    let mut cur = z;
    for k in 1..n {
        let k = k as f64;
        let next = ((2.0 * k + 1.0) * z * cur - k * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms() {
        let z = Complex64::new(0.3, -1.2);
        let p2 = 0.5 * (3.0 * z * z - 1.0);
        let p3 = 0.5 * (5.0 * z * z * z - 3.0 * z);
        assert!((legendre_p(2, z) - p2).norm() < 1e-14);
        assert!((legendre_p(3, z) - p3).norm() < 1e-14);
    }

    #[test]
    fn unit_argument() {
        for n in 0..50 {
            assert!((legendre_p(n, Complex64::new(1.0, 0.0)) - 1.0).norm() < 1e-12);
        }
    }
}
