//! The oscillator and its Drude bath: spectral density, memory kernels,
//! linear response, the three characteristic poles and the phase of the
//! susceptibility.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{cubic_roots, e1_scaled, ei_scaled, integrate_semi_infinite, QuadratureSpec};
use crate::oscillator::coth_half;

/// Oscillator mass and frequency together with the Drude bath coupling
/// `gamma` and cutoff.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BathParams {
    pub m: f64,
    pub omega0: f64,
    pub gamma: f64,
    pub cutoff: f64,
}

impl BathParams {
    pub fn new(m: f64, omega0: f64, gamma: f64, cutoff: f64) -> Result<Self> {
        let p = BathParams { m, omega0, gamma, cutoff };
        p.validate()?;
        if cutoff <= omega0 {
            log::warn!("Drude cutoff {cutoff} does not exceed omega0 = {omega0}");
        }
        Ok(p)
    }

    /// Unit mass and frequency.
    pub fn natural(gamma: f64, cutoff: f64) -> Result<Self> {
        Self::new(1.0, 1.0, gamma, cutoff)
    }

    pub fn validate(&self) -> Result<()> {
        let check = |ok: bool, what: &str, v: f64| {
            if ok {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!("{what}, got {v}")))
            }
        };
        check(self.m.is_finite() && self.m > 0.0, "mass must be positive", self.m)?;
        check(self.omega0.is_finite() && self.omega0 > 0.0, "omega0 must be positive", self.omega0)?;
        check(self.gamma.is_finite() && self.gamma >= 0.0, "gamma must be non-negative", self.gamma)?;
        check(self.cutoff.is_finite() && self.cutoff > 0.0, "cutoff must be positive", self.cutoff)
    }

    pub fn with_gamma(self, gamma: f64) -> Result<Self> {
        let p = BathParams { gamma, ..self };
        p.validate().map(|_| p)
    }

    pub fn with_cutoff(self, cutoff: f64) -> Result<Self> {
        let p = BathParams { cutoff, ..self };
        p.validate().map(|_| p)
    }

    pub fn with_omega0(self, omega0: f64) -> Result<Self> {
        let p = BathParams { omega0, ..self };
        p.validate().map(|_| p)
    }

    pub fn with_mass(self, m: f64) -> Result<Self> {
        let p = BathParams { m, ..self };
        p.validate().map(|_| p)
    }

    /// Coefficients `(c1, c0)` of `nu^3 + cutoff nu^2 + c1 nu + c0`.
    fn cubic_coefficients(&self) -> (f64, f64) {
        let c1 = self.omega0 * self.omega0 + self.gamma * self.cutoff / self.m;
        let c0 = self.omega0 * self.omega0 * self.cutoff;
        (c1, c0)
    }
}

/// `J(omega) = gamma omega cutoff^2 / (omega^2 + cutoff^2)`.
pub fn spectral_density(omega: f64, p: &BathParams) -> f64 {
    let g2 = p.cutoff * p.cutoff;
    p.gamma * omega * g2 / (omega * omega + g2)
}

/// `gamma(t) = gamma cutoff e^{-cutoff t}`.
pub fn damping_kernel(t: f64, p: &BathParams) -> f64 {
    p.gamma * p.cutoff * (-p.cutoff * t).exp()
}

/// One-sided Fourier transform `gamma cutoff / (cutoff - i omega)`.
pub fn damping_fourier(omega: f64, p: &BathParams) -> Complex64 {
    p.gamma * p.cutoff / Complex64::new(p.cutoff, -omega)
}

/// Laplace transform `gamma cutoff / (nu + cutoff)`.
pub fn damping_laplace(nu: f64, p: &BathParams) -> f64 {
    p.gamma * p.cutoff / (nu + p.cutoff)
}

/// `chi(omega) = 1 / [m (omega0^2 - omega^2) - i omega gamma~(omega)]`.
pub fn susceptibility(omega: f64, p: &BathParams) -> Complex64 {
    let den = Complex64::new(p.m * (p.omega0 * p.omega0 - omega * omega), 0.0)
        - Complex64::new(0.0, omega) * damping_fourier(omega, p);
    den.inv()
}

/// `Im chi(omega)`, written without cancellation: `omega Re gamma~ / |den|^2`.
pub fn susceptibility_im(omega: f64, p: &BathParams) -> f64 {
    let g2 = p.cutoff * p.cutoff;
    let w2 = omega * omega;
    let re_g = p.gamma * g2 / (g2 + w2);
    let im_g = p.gamma * p.cutoff * omega / (g2 + w2);
    let re_den = p.m * (p.omega0 * p.omega0 - w2) + omega * im_g;
    let im_den = omega * re_g;
    im_den / (re_den * re_den + im_den * im_den)
}

/// The characteristic frequencies: roots of
/// `lambda^3 - cutoff lambda^2 + (omega0^2 + gamma cutoff / m) lambda - omega0^2 cutoff`,
/// i.e. minus the zeros of the Matsubara denominator continued to complex
/// `nu`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DrudePoles {
    /// Real root first, then a conjugate pair (positive imaginary part
    /// first) or, in the overdamped case, the remaining real roots in
    /// descending order.
    pub lambda: [Complex64; 3],
}

impl DrudePoles {
    /// Whether `lambda[1]`, `lambda[2]` form a complex conjugate pair.
    pub fn has_complex_pair(&self) -> bool {
        self.lambda[1].im != 0.0
    }

    /// Frequencies where integrands built from the response function
    /// change character; used as quadrature breakpoints.
    pub fn feature_frequencies(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for z in self.lambda {
            out.push(z.norm());
            if z.im > 0.0 {
                let (w, d) = (z.im, z.re.abs());
                out.push(w);
                for k in [1.0, 5.0, 25.0] {
                    out.push(w - k * d);
                    out.push(w + k * d);
                }
            }
        }
        out.retain(|w| w.is_finite() && *w > 0.0);
        out
    }
}

pub fn drude_poles(p: &BathParams) -> DrudePoles {
    let (c1, c0) = p.cubic_coefficients();
    DrudePoles { lambda: cubic_roots(-p.cutoff, c1, -c0) }
}

/// Phase `phi(omega) = arg chi(omega)`, continuous and rising from 0 to
/// `pi`. Computed from the common-denominator form
/// `atan2(gamma cutoff^2 omega / m, A(omega))`, which equals the pole sum
/// `sum_j arctan(omega / lambda_j) - arctan(omega / cutoff)`.
pub fn phase(omega: f64, p: &BathParams) -> f64 {
    let (a, b) = phase_components(omega, p);
    b.atan2(a)
}

fn phase_components(omega: f64, p: &BathParams) -> (f64, f64) {
    let (c1, c0) = p.cubic_coefficients();
    let g = p.cutoff;
    let w2 = omega * omega;
    let a = g * c0 + (c1 - g * g) * w2 - w2 * w2;
    let b = p.gamma * g * g / p.m * omega;
    (a, b)
}

/// `d phi / d omega = Im d ln chi / d omega`, as the rational function
/// `(gamma cutoff^2 / m)(cutoff c0 - (c1 - cutoff^2) omega^2 + 3 omega^4) / (A^2 + B^2)`.
///
/// For `gamma = 0` this is zero everywhere except for a delta function of
/// weight `pi` at `omega0`, which is not representable; callers treat the
/// uncoupled case in closed form.
pub fn log_chi_derivative_im(omega: f64, p: &BathParams) -> f64 {
    if p.gamma == 0.0 {
        return 0.0;
    }
    let (c1, c0) = p.cubic_coefficients();
    let g = p.cutoff;
    let w2 = omega * omega;
    let (a, b) = phase_components(omega, p);
    let beta = p.gamma * g * g / p.m;
    let num = beta * (g * c0 - (c1 - g * g) * w2 + 3.0 * w2 * w2);
    num / (a * a + b * b)
}

/// Same derivative from the poles:
/// `sum_j lambda_j / (lambda_j^2 + omega^2) - cutoff / (cutoff^2 + omega^2)`.
pub fn log_chi_derivative_im_poles(omega: f64, poles: &DrudePoles, p: &BathParams) -> f64 {
    let w2 = omega * omega;
    let sum: Complex64 = poles.lambda.iter().map(|&l| l / (l * l + w2)).sum();
    sum.re - p.cutoff / (p.cutoff * p.cutoff + w2)
}

/// Quadrature layout for integrals over the response function: the split
/// between the finite panel and the mapped tail, and interior breakpoints.
pub(crate) fn integration_layout(p: &BathParams, t: f64) -> (f64, Vec<f64>) {
    let poles = drude_poles(p);
    let mut points = poles.feature_frequencies();
    points.push(p.omega0);
    points.push(p.cutoff);
    if t > 0.0 {
        points.extend([t, 10.0 * t, 40.0 * t]);
    }
    let scale = points.iter().copied().fold(p.omega0.max(p.cutoff), f64::max);
    let split = 10.0 * scale;
    points.retain(|w| *w > 0.0 && *w < split);
    points.sort_by(f64::total_cmp);
    points.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs());
    (split, points)
}

/// Symmetrized noise correlation
/// `K(t) = (1/pi) int_0^inf J(omega) coth(omega / 2T) cos(omega t) d omega`.
///
/// The zero-temperature part has the closed form
/// `-(gamma cutoff^2 / 2 pi) [e^{-x} Ei(x) - e^x E_1(x)]` with
/// `x = cutoff |t|`; the thermal remainder, weighted by `coth - 1`, decays
/// exponentially and is integrated numerically. `K(0)` diverges
/// logarithmically for the Drude density and is reported as a domain
/// error.
pub fn noise_correlation(t: f64, temperature: f64, p: &BathParams, quad: &QuadratureSpec) -> Result<f64> {
    if !(temperature >= 0.0) {
        return Err(Error::InvalidParameter(format!("temperature must be non-negative, got {temperature}")));
    }
    let t = t.abs();
    if t == 0.0 {
        return Err(Error::Domain("noise correlation diverges at t = 0 for the Drude spectral density".into()));
    }
    let x = p.cutoff * t;
    let vacuum = -0.5 * (ei_scaled(x)? - e1_scaled(x)?) * p.gamma * p.cutoff * p.cutoff / PI;
    if temperature == 0.0 || p.gamma == 0.0 {
        return Ok(vacuum);
    }
    let integrand = |w: f64| spectral_density(w, p) * (coth_half(w, temperature) - 1.0) * (w * t).cos();
    let split = 40.0 * temperature.max(p.cutoff).max(1.0 / t);
    let mut points = vec![temperature, p.cutoff];
    points.retain(|w| *w < split);
    let est = integrate_semi_infinite(integrand, split, &points, quad)
        .map_err(|e| Error::quadrature(format!("noise correlation at t = {t}, T = {temperature}"), e))?;
    Ok(vacuum + est.value / PI)
}
