//! Closed forms for a free harmonic oscillator of frequency `omega` at
//! temperature `t`. These double as integral kernels: the coupled
//! oscillator's free energy and entropy are spectral averages of them.

/// `coth(omega / 2T)`; exactly 1 at `T = 0`.
pub fn coth_half(omega: f64, t: f64) -> f64 {
    if t == 0.0 {
        return 1.0;
    }
    let x = omega / t;
    if x < 1e-4 {
        2.0 / x + x / 6.0
    } else {
        1.0 + 2.0 / x.exp_m1()
    }
}

/// Free energy `T ln(2 sinh(omega / 2T))`, `omega / 2` at `T = 0`.
pub fn free_energy_kernel(omega: f64, t: f64) -> f64 {
    if t == 0.0 {
        return 0.5 * omega;
    }
    let x = omega / t;
    if x > 700.0 {
        return 0.5 * omega;
    }
    0.5 * omega + t * (-(-x).exp_m1()).ln()
}

/// Entropy `x / (e^x - 1) - ln(1 - e^-x)` with `x = omega / T`; zero at `T = 0`.
pub fn entropy_kernel(omega: f64, t: f64) -> f64 {
    if t == 0.0 {
        return 0.0;
    }
    let x = omega / t;
    if x > 700.0 {
        return 0.0;
    }
    x / x.exp_m1() - (-(-x).exp_m1()).ln()
}

/// Mean energy `(omega / 2) coth(omega / 2T)`.
pub fn energy_kernel(omega: f64, t: f64) -> f64 {
    0.5 * omega * coth_half(omega, t)
}

/// `ln Z = -ln(2 sinh(omega / 2T))` for `T > 0`.
pub fn ln_partition_function(omega: f64, t: f64) -> f64 {
    let x = omega / t;
    -0.5 * x - (-(-x).exp_m1()).ln()
}

/// Heat capacity `x^2 e^x / (e^x - 1)^2`, zero at `T = 0`.
pub fn heat_capacity_kernel(omega: f64, t: f64) -> f64 {
    if t == 0.0 {
        return 0.0;
    }
    let x = omega / t;
    if x > 700.0 {
        return 0.0;
    }
    let s = 0.5 * x / (0.5 * x).sinh();
    s * s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coth_branches_meet() {
        for x in [0.99e-4f64, 1.01e-4] {
            let exact = 1.0 / (0.5 * x).tanh();
            assert!((coth_half(x, 1.0) / exact - 1.0).abs() < 1e-12);
        }
        assert_eq!(coth_half(3.0, 0.0), 1.0);
        assert_eq!(coth_half(1e4, 1.0), 1.0);
    }

    #[test]
    fn thermodynamic_identities() {
        let (w, t) = (1.3, 0.7);
        let f = free_energy_kernel(w, t);
        let s = entropy_kernel(w, t);
        let u = energy_kernel(w, t);
        assert!((f + t * s - u).abs() < 1e-14);
        let h = 1e-5;
        let ds = -(free_energy_kernel(w, t + h) - free_energy_kernel(w, t - h)) / (2.0 * h);
        assert!((ds - s).abs() < 1e-9);
        assert!((-t * ln_partition_function(w, t) - f).abs() < 1e-14);
        let dc = t * (entropy_kernel(w, t + h) - entropy_kernel(w, t - h)) / (2.0 * h);
        assert!((dc - heat_capacity_kernel(w, t)).abs() < 1e-8);
    }

    #[test]
    fn zero_temperature() {
        assert_eq!(free_energy_kernel(2.0, 0.0), 1.0);
        assert_eq!(entropy_kernel(2.0, 0.0), 0.0);
        assert_eq!(energy_kernel(2.0, 0.0), 1.0);
        assert_eq!(entropy_kernel(2.0, 1e-3), 0.0);
    }
}
