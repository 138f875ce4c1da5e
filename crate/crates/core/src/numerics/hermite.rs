//! Normalized Hermite functions and Gauss–Hermite quadrature.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// `psi_n(u) = (2^n n! sqrt(pi))^{-1/2} H_n(u) e^{-u^2/2}`, orthonormal on
/// the real line.
pub fn hermite_wavefunction(n: usize, u: f64) -> f64 {
    let mut prev = 0.0;
    let mut cur = PI.powf(-0.25) * (-0.5 * u * u).exp();
    for k in 0..n {
        let k = k as f64;
        let next = u * (2.0 / (k + 1.0)).sqrt() * cur - (k / (k + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `psi_0(u), ..., psi_n_max(u)`.
pub fn hermite_wavefunctions(n_max: usize, u: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n_max + 1);
    let mut prev = 0.0;
    let mut cur = PI.powf(-0.25) * (-0.5 * u * u).exp();
    out.push(cur);
    for k in 0..n_max {
        let k = k as f64;
        let next = u * (2.0 / (k + 1.0)).sqrt() * cur - (k / (k + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
        out.push(cur);
    }
    out
}

/// Gauss–Hermite rule with the weight folded back into the weights, so
/// `sum_i w_i g(x_i)` approximates `int g(x) dx` and is exact whenever
/// `g(x) e^{x^2}` is a polynomial of degree below `2 * len`.
#[derive(Debug, Clone)]
pub struct GaussHermite {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// Largest node count supported.
pub const MAX_GAUSS_HERMITE_NODES: usize = 600;

impl GaussHermite {
    pub fn new(len: usize) -> Result<Self> {
        if len == 0 || len > MAX_GAUSS_HERMITE_NODES {
            return Err(Error::InvalidParameter(format!(
                "Gauss-Hermite node count must be in 1..={MAX_GAUSS_HERMITE_NODES}, got {len}"
            )));
        }
        let n = len;
        let nf = n as f64;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let half = n.div_ceil(2);
        let mut z = 0.0f64;
        for i in 0..half {
            z = match i {
                0 => (2.0 * nf + 1.0).sqrt() - 1.855_75 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
                1 => z - 1.14 * nf.powf(0.426) / z,
                2 => 1.86 * z - 0.86 * nodes[0],
                3 => 1.91 * z - 0.91 * nodes[1],
                _ => 2.0 * z - nodes[i - 2],
            };
            let mut converged = false;
            for _ in 0..100 {
                // Recurrence on psi_k(z) which carries e^{-z^2/2}: bounded.
                let (p_n, p_nm1) = psi_pair(n, z);
                let dp = (2.0 * nf).sqrt() * p_nm1;
                // Newton on psi_n: the exponential factor has derivative
                // -z psi_n, which vanishes at a root.
                let step = p_n / (dp - z * p_n);
                z -= step;
                if step.abs() <= 1e-15 * z.abs().max(1.0) {
                    converged = true;
                    break;
                }
            }
            if !converged {
                return Err(Error::RootFinding(format!("Gauss-Hermite node {i} of {n} did not converge")));
            }
            let (_, p_nm1) = psi_pair(n, z);
            let scaled_derivative = (2.0 * nf).sqrt() * p_nm1;
            // Standard weight 2 / H'^2 (orthonormal form) times e^{z^2}.
            let w = 2.0 / (scaled_derivative * scaled_derivative);
            nodes[i] = z;
            nodes[n - 1 - i] = -z;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        nodes.reverse();
        weights.reverse();
        Ok(GaussHermite { nodes, weights })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// `(psi_n(z), psi_{n-1}(z))` using the orthonormal recurrence without the
/// Gaussian factor removed.
fn psi_pair(n: usize, z: f64) -> (f64, f64) {
    let mut prev = 0.0;
    let mut cur = PI.powf(-0.25) * (-0.5 * z * z).exp();
    for k in 0..n {
        let k = k as f64;
        let next = z * (2.0 / (k + 1.0)).sqrt() * cur - (k / (k + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    (cur, prev)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ground_state_shape() {
        for u in [-2.0f64, 0.0, 0.7, 3.0] {
            let want = PI.powf(-0.25) * (-0.5 * u * u).exp();
            assert!((hermite_wavefunction(0, u) - want).abs() < 1e-16);
        }
        // psi_1 = sqrt(2) u psi_0
        let u = 0.9;
        assert!((hermite_wavefunction(1, u) - 2f64.sqrt() * u * hermite_wavefunction(0, u)).abs() < 1e-16);
    }

    #[test]
    fn vector_matches_scalar() {
        let v = hermite_wavefunctions(40, 1.3);
        for (n, x) in v.iter().enumerate() {
            assert!((x - hermite_wavefunction(n, 1.3)).abs() < 1e-15);
        }
    }

    #[test]
    fn small_rules_exact() {
        let r = GaussHermite::new(2).unwrap();
        let x = 0.5f64.sqrt();
        assert!((r.nodes[1] - x).abs() < 1e-15);
        // weight sqrt(pi)/2 times e^{1/2}
        assert!((r.weights[1] - PI.sqrt() / 2.0 * 0.5f64.exp()).abs() < 1e-14);
    }

    #[test]
    fn gaussian_moments() {
        let r = GaussHermite::new(30).unwrap();
        // int x^{2k} e^{-x^2} dx = Gamma(k + 1/2)
        let mut gamma = PI.sqrt();
        for k in 0..20 {
            let got: f64 = r.nodes.iter().zip(&r.weights).map(|(x, w)| w * x.powi(2 * k) * (-x * x).exp()).sum();
            assert!((got / gamma - 1.0).abs() < 1e-12, "k = {k}: {got} vs {gamma}");
            gamma *= k as f64 + 0.5;
        }
    }

    #[test]
    fn orthonormality_by_quadrature() {
        let n_max = 60;
        let r = GaussHermite::new(n_max + 1).unwrap();
        let table: Vec<Vec<f64>> = r.nodes.iter().map(|&x| hermite_wavefunctions(n_max, x)).collect();
        for a in 0..=n_max {
            for b in 0..=n_max {
                let s: f64 = table.iter().zip(&r.weights).map(|(row, w)| w * row[a] * row[b]).sum();
                let want = if a == b { 1.0 } else { 0.0 };
                assert!((s - want).abs() < 1e-11, "({a}, {b}): {s}");
            }
        }
    }

    #[test]
    fn large_rule_converges() {
        let r = GaussHermite::new(400).unwrap();
        let total: f64 = r.nodes.iter().zip(&r.weights).map(|(x, w)| w * (-x * x).exp()).sum();
        assert!((total - PI.sqrt()).abs() < 1e-11);
        assert!(r.nodes.windows(2).all(|p| p[0] < p[1]));
    }
}
