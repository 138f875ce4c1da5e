//! Gamma-family special functions: complex log-gamma, Hurwitz zeta (and
//! the trigamma function built on it), and the exponential integrals.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_741_780_329_736_405_6;
const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_606_512_090_082_4;

/// B_2, B_4, ..., B_16.
const BERNOULLI_EVEN: [f64; 8] =
    [1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0, 5.0 / 66.0, -691.0 / 2730.0, 7.0 / 6.0, -3617.0 / 510.0];

/// Real part below which the argument is shifted up before the Stirling
/// series is applied.
const STIRLING_SHIFT: f64 = 15.0;

/// `log Gamma(z)` on the branch that is analytic in the plane cut along the
/// non-positive real axis, so `ln_gamma(z + 1) = ln_gamma(z) + ln z` holds
/// exactly off the cut. For real `z > 0` it coincides with the real
/// log-gamma.
pub fn log_gamma_complex(z: Complex64) -> Result<Complex64> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::Domain(format!("log-gamma of non-finite argument {z}")));
    }
    if z.im == 0.0 && z.re <= 0.0 && z.re.fract() == 0.0 {
        return Err(Error::Domain(format!("log-gamma pole at z = {}", z.re)));
    }
    let mut w = z;
    let mut shift = Complex64::new(0.0, 0.0);
    while w.re < STIRLING_SHIFT {
        shift += w.ln();
        w += 1.0;
    }
    Ok(stirling(w) - shift)
}

fn stirling(z: Complex64) -> Complex64 {
    let inv = z.inv();
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut pow = inv;
    for (k, b) in BERNOULLI_EVEN.iter().enumerate() {
        let n = 2.0 * (k as f64 + 1.0);
        series += pow * (b / (n * (n - 1.0)));
        pow *= inv2;
    }
    (z - 0.5) * z.ln() - z + LN_SQRT_2PI + series
}

/// Real log-gamma for `x > 0`.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("real log-gamma requires x > 0, got {x}")));
    }
    Ok(log_gamma_complex(Complex64::new(x, 0.0))?.re)
}

/// `ln |Gamma(z)|^2 = 2 Re log Gamma(z)`: the log of `Gamma(z) Gamma(conj z)`,
/// real and positive by construction.
pub fn ln_gamma_conjugate_pair(z: Complex64) -> Result<f64> {
    Ok(2.0 * log_gamma_complex(z)?.re)
}

/// Hurwitz zeta `sum_{k >= 0} (x + k)^-s` for `s > 1`, `x > 0`, by
/// Euler–Maclaurin summation after shifting `x` past 20.
pub fn hurwitz_zeta(s: f64, x: f64) -> Result<f64> {
    if !(s > 1.0) || !(x > 0.0) {
        return Err(Error::Domain(format!("Hurwitz zeta requires s > 1 and x > 0, got s = {s}, x = {x}")));
    }
    const START: f64 = 20.0;
    let mut head = 0.0;
    let mut a = x;
    while a < START {
        head += a.powf(-s);
        a += 1.0;
    }
    // Tail from a to infinity.
    let mut tail = a.powf(1.0 - s) / (s - 1.0) + 0.5 * a.powf(-s);
    // Rising factorial s (s+1) ... (s+2j-2) over (2j)!, times a^(-s-2j+1).
    let mut rising = s;
    let mut factorial = 2.0;
    let mut pow = a.powf(-s - 1.0);
    let a2 = a * a;
    for (j, b) in BERNOULLI_EVEN.iter().enumerate() {
        let term = b / factorial * rising * pow;
        tail += term;
        let j1 = j as f64 + 1.0;
        rising *= (s + 2.0 * j1 - 1.0) * (s + 2.0 * j1);
        factorial *= (2.0 * j1 + 1.0) * (2.0 * j1 + 2.0);
        pow /= a2;
    }
    Ok(head + tail)
}

/// Trigamma `psi'(x) = sum_{k >= 0} (x + k)^-2`.
pub fn trigamma(x: f64) -> Result<f64> {
    hurwitz_zeta(2.0, x)
}

/// `e^x E_1(x)` for `x > 0`.
pub fn e1_scaled(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("E1 requires x > 0, got {x}")));
    }
    if x <= 1.0 {
        let mut sum = 0.0;
        let mut term = 1.0;
        for k in 1..60 {
            let k = k as f64;
            term *= -x / k;
            let add = term / k;
            sum += add;
            if add.abs() < 1e-17 * sum.abs().max(1e-300) {
                break;
            }
        }
        let e1 = -EULER_GAMMA - x.ln() - sum;
        return Ok(e1 * x.exp());
    }
    // Modified Lentz evaluation of the continued fraction for e^x E_1(x).
    let tiny = 1e-300;
    let mut b = x + 1.0;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..500 {
        let an = -(i as f64) * (i as f64);
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            return Ok(h);
        }
    }
    Err(Error::Domain(format!("E1 continued fraction did not converge at x = {x}")))
}

/// `e^-x Ei(x)` for `x > 0`.
pub fn ei_scaled(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("Ei requires x > 0, got {x}")));
    }
    if x < 40.0 {
        let mut sum = 0.0;
        let mut term = 1.0;
        for k in 1..400 {
            let k = k as f64;
            term *= x / k;
            let add = term / k;
            sum += add;
            if add < 1e-17 * sum {
                break;
            }
        }
        return Ok((EULER_GAMMA + x.ln() + sum) * (-x).exp());
    }
    // Asymptotic series, truncated at its smallest term.
    let mut sum = 1.0;
    let mut term = 1.0;
    for k in 1..100 {
        let next = term * k as f64 / x;
        if next.abs() > term.abs() || next < 1e-17 {
            break;
        }
        term = next;
        sum += term;
    }
    Ok(sum / x)
}

/// Reflection `ln Gamma(z) + ln Gamma(1 - z) = ln(pi / sin(pi z))`, exposed
/// for tests of the left half-plane.
pub fn reflection_rhs(z: Complex64) -> Complex64 {
    (Complex64::new(PI, 0.0) / (z * PI).sin()).ln()
}
