//! Stationary second moments of the damped oscillator from the
//! fluctuation–dissipation theorem, plus the imaginary-frequency
//! (Matsubara) cross-check for the position variance.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::bath::{integration_layout, susceptibility_im, BathParams};
use crate::error::{Error, Result};
use crate::numerics::{brent_expanding, hurwitz_zeta, integrate_semi_infinite, QuadratureSpec};
use crate::oscillator::coth_half;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumMoments {
    pub temperature: f64,
    pub q2: f64,
    pub p2: f64,
    pub mean_energy: f64,
}

impl EquilibriumMoments {
    pub fn new(temperature: f64, q2: f64, p2: f64, p: &BathParams) -> Self {
        let mean_energy = 0.5 * p2 / p.m + 0.5 * p.m * p.omega0 * p.omega0 * q2;
        EquilibriumMoments { temperature, q2, p2, mean_energy }
    }

    /// `sqrt(<q^2><p^2>)`, at least 1/2.
    pub fn uncertainty_product(&self) -> f64 {
        (self.q2 * self.p2).sqrt()
    }
}

pub(crate) fn check_temperature(t: f64) -> Result<()> {
    if t.is_finite() && t >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("temperature must be finite and non-negative, got {t}")))
    }
}

fn fdt_integral(t: f64, p: &BathParams, quad: &QuadratureSpec, what: &str, weight: impl Fn(f64) -> f64) -> Result<f64> {
    let (split, points) = integration_layout(p, t);
    let est = integrate_semi_infinite(|w| weight(w) * coth_half(w, t) * susceptibility_im(w, p), split, &points, quad)
        .map_err(|e| {
            Error::quadrature(
                format!(
                    "{what} at T = {t}, m = {}, omega0 = {}, gamma = {}, cutoff = {}",
                    p.m, p.omega0, p.gamma, p.cutoff
                ),
                e,
            )
        })?;
    Ok(est.value / PI)
}

/// `<q^2> = (1/pi) int coth(omega / 2T) Im chi(omega) d omega`.
pub fn position_variance(t: f64, p: &BathParams, quad: &QuadratureSpec) -> Result<f64> {
    check_temperature(t)?;
    if p.gamma == 0.0 {
        return Ok(coth_half(p.omega0, t) / (2.0 * p.m * p.omega0));
    }
    fdt_integral(t, p, quad, "position variance", |_| 1.0)
}

/// `<p^2> = (1/pi) int m^2 omega^2 coth(omega / 2T) Im chi(omega) d omega`.
pub fn momentum_variance(t: f64, p: &BathParams, quad: &QuadratureSpec) -> Result<f64> {
    check_temperature(t)?;
    if p.gamma == 0.0 {
        return Ok(0.5 * p.m * p.omega0 * coth_half(p.omega0, t));
    }
    let m2 = p.m * p.m;
    fdt_integral(t, p, quad, "momentum variance", |w| m2 * w * w)
}

pub fn equilibrium_moments(t: f64, p: &BathParams, quad: &QuadratureSpec) -> Result<EquilibriumMoments> {
    let q2 = position_variance(t, p, quad)?;
    let p2 = momentum_variance(t, p, quad)?;
    Ok(EquilibriumMoments::new(t, q2, p2, p))
}

/// `<H_s> = <p^2>/2m + m omega0^2 <q^2>/2`.
pub fn mean_energy(t: f64, p: &BathParams, quad: &QuadratureSpec) -> Result<f64> {
    Ok(equilibrium_moments(t, p, quad)?.mean_energy)
}

/// Number of Matsubara terms after which the large-frequency expansion
/// used for the remainder is accurate to roughly double precision.
pub fn recommended_matsubara_terms(t: f64, p: &BathParams) -> usize {
    let nu1 = 2.0 * PI * t;
    let scale = p.cutoff.max(p.omega0).max((p.gamma * p.cutoff / p.m).sqrt());
    ((200.0 * scale / nu1).ceil() as usize).clamp(64, 20_000_000)
}

/// `<q^2> = (T/m) sum_{n=-N..N} 1 / (omega0^2 + nu_n^2 + |nu_n| gamma^(|nu_n|) / m)`
/// with `nu_n = 2 pi n T`, plus the remainder `|n| > N` from the expansion
/// `nu^-2 - a nu^-4 + b nu^-5 + (a^2 - b cutoff) nu^-6`, where
/// `a = omega0^2 + gamma cutoff / m` and `b = gamma cutoff^2 / m`, summed
/// with Hurwitz zeta functions.
pub fn matsubara_position_variance(t: f64, p: &BathParams, n_terms: usize) -> Result<f64> {
    check_temperature(t)?;
    if t == 0.0 {
        return Err(Error::Domain("Matsubara sum needs T > 0; use the quadrature route at T = 0".into()));
    }
    if n_terms == 0 {
        return Err(Error::InvalidParameter("n_terms must be at least 1".into()));
    }
    let nu1 = 2.0 * PI * t;
    let w02 = p.omega0 * p.omega0;
    let term = |n: usize| {
        let nu = nu1 * n as f64;
        1.0 / (w02 + nu * nu + nu * p.gamma * p.cutoff / (p.m * (nu + p.cutoff)))
    };
    // Smallest terms first.
    let mut sum = 0.0;
    for n in (1..=n_terms).rev() {
        sum += term(n);
    }
    let a = w02 + p.gamma * p.cutoff / p.m;
    let b = p.gamma * p.cutoff * p.cutoff / p.m;
    let x = n_terms as f64 + 1.0;
    let tail = hurwitz_zeta(2.0, x)? / nu1.powi(2) - a * hurwitz_zeta(4.0, x)? / nu1.powi(4)
        + b * hurwitz_zeta(5.0, x)? / nu1.powi(5)
        + (a * a - b * p.cutoff) * hurwitz_zeta(6.0, x)? / nu1.powi(6);
    Ok(t / p.m * (1.0 / w02 + 2.0 * (sum + tail)))
}

/// Coupling strength for which the zero-temperature mean energy equals
/// `target`, with the other parameters taken from `template`.
pub fn gamma_for_ground_energy(target: f64, template: &BathParams, quad: &QuadratureSpec) -> Result<f64> {
    let floor = 0.5 * template.omega0;
    if !(target > floor) {
        return Err(Error::InvalidParameter(format!(
            "target energy {target} must exceed the uncoupled ground energy {floor}"
        )));
    }
    brent_expanding(
        |g| Ok(mean_energy(0.0, &template.with_gamma(g)?, quad)? - target),
        1e-3 * template.omega0,
        template.omega0,
        1e-10,
    )
}

/// `(x + y)/4 - 1/2` with `x = 2 m omega0 <q^2>`, `y = 2 <p^2> / (m omega0)`.
pub fn mean_occupation(moments: &EquilibriumMoments, p: &BathParams) -> f64 {
    let b2 = p.m * p.omega0;
    let x = 2.0 * b2 * moments.q2;
    let y = 2.0 * moments.p2 / b2;
    0.25 * (x + y) - 0.5
}

/// Coupling strength for which the mean occupation of the unperturbed
/// oscillator levels equals `target` at temperature `t`.
pub fn gamma_for_occupation(target: f64, t: f64, template: &BathParams, quad: &QuadratureSpec) -> Result<f64> {
    check_temperature(t)?;
    let floor = mean_occupation(&equilibrium_moments(t, &template.with_gamma(0.0)?, quad)?, template);
    if !(target > floor) {
        return Err(Error::InvalidParameter(format!(
            "target occupation {target} must exceed the uncoupled value {floor}"
        )));
    }
    brent_expanding(
        |g| {
            let p = template.with_gamma(g)?;
            Ok(mean_occupation(&equilibrium_moments(t, &p, quad)?, &p) - target)
        },
        1e-3 * template.omega0,
        template.omega0,
        1e-10,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    fn params(gamma: f64, cutoff: f64) -> BathParams {
        BathParams::natural(gamma, cutoff).unwrap()
    }

    #[test]
    fn weak_coupling_limit() {
        for t in [0.0, 0.3, 2.0] {
            let p = params(1e-6, 10.0);
            let c = coth_half(1.0, t);
            let q2 = position_variance(t, &p, &q()).unwrap();
            let p2 = momentum_variance(t, &p, &q()).unwrap();
            assert!((q2 / (0.5 * c) - 1.0).abs() < 1e-4, "T = {t}: {q2}");
            assert!((p2 / (0.5 * c) - 1.0).abs() < 1e-4, "T = {t}: {p2}");
        }
        let e = mean_energy(0.0, &params(1e-6, 10.0), &q()).unwrap();
        assert!((e - 0.5).abs() < 1e-4);
    }

    #[test]
    fn uncoupled_is_exact() {
        let p = BathParams::new(2.0, 1.5, 0.0, 10.0).unwrap();
        let q2 = position_variance(0.0, &p, &q()).unwrap();
        assert_eq!(q2, 1.0 / 6.0);
        let p2 = momentum_variance(0.0, &p, &q()).unwrap();
        assert_eq!(p2, 1.5);
    }

    #[test]
    fn equipartition() {
        let p = params(1.0, 10.0);
        let t = 100.0;
        let m = equilibrium_moments(t, &p, &q()).unwrap();
        assert!((m.q2 / t - 1.0).abs() < 0.01);
        assert!((m.p2 / t - 1.0).abs() < 0.01);
        assert!((m.mean_energy / t - 1.0).abs() < 0.01);
    }

    #[test]
    fn ground_energy_tuning() {
        let template = params(0.0, 10.0);
        let g = gamma_for_ground_energy(1.0, &template, &q()).unwrap();
        assert!((2.3..=2.6).contains(&g), "{g}");
        let e = mean_energy(0.0, &template.with_gamma(g).unwrap(), &q()).unwrap();
        assert!((e - 1.0).abs() < 1e-8);
        let e243 = mean_energy(0.0, &params(2.43, 10.0), &q()).unwrap();
        assert!((e243 - 1.0).abs() < 0.01);
    }

    #[test]
    fn zero_temperature_energy_exceeds_ground_state() {
        for g in [0.05, 0.5, 2.0] {
            assert!(mean_energy(0.0, &params(g, 10.0), &q()).unwrap() > 0.5);
        }
    }

    #[test]
    fn matsubara_uncoupled_matches_coth() {
        let p = params(0.0, 10.0);
        for t in [0.1, 1.0, 5.0] {
            let n = recommended_matsubara_terms(t, &p);
            let v = matsubara_position_variance(t, &p, n).unwrap();
            let exact = 0.5 * coth_half(1.0, t);
            assert!((v / exact - 1.0).abs() < 1e-8, "T = {t}: {v} vs {exact}");
        }
    }

    #[test]
    fn matsubara_matches_quadrature() {
        let p = params(1.0, 10.0);
        let t = 1.0;
        let n = recommended_matsubara_terms(t, &p);
        let a = matsubara_position_variance(t, &p, n).unwrap();
        let b = position_variance(t, &p, &q()).unwrap();
        assert!((a / b - 1.0).abs() < 1e-6, "{a} vs {b}");
    }

    #[test]
    fn matsubara_term_doubling() {
        let p = params(1.0, 10.0);
        let n = recommended_matsubara_terms(1.0, &p);
        let a = matsubara_position_variance(1.0, &p, n).unwrap();
        let b = matsubara_position_variance(1.0, &p, 2 * n).unwrap();
        assert!((a - b).abs() < 1e-8 * a);
        assert!(matches!(matsubara_position_variance(0.0, &p, n), Err(Error::Domain(_))));
    }

    #[test]
    fn monotone_in_gamma_at_zero_temperature() {
        let mut last: Option<EquilibriumMoments> = None;
        for k in 0..8 {
            let g = 0.1 + 0.4 * k as f64;
            let m = equilibrium_moments(0.0, &params(g, 10.0), &q()).unwrap();
            if let Some(prev) = last {
                assert!(m.q2 < prev.q2);
                assert!(m.p2 > prev.p2);
            }
            assert!(m.uncertainty_product() >= 0.5);
            last = Some(m);
        }
    }

    #[test]
    fn rejects_bad_temperature() {
        let p = params(1.0, 10.0);
        assert!(position_variance(-1.0, &p, &q()).is_err());
        assert!(momentum_variance(f64::NAN, &p, &q()).is_err());
    }
}
