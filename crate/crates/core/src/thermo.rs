//! Thermodynamics of the damped oscillator from its partition function:
//! free energy, entropy, internal energy, specific heat, interaction energy,
//! and the heat/work bookkeeping of quasi-static parameter changes.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bath::{drude_poles, integration_layout, log_chi_derivative_im, BathParams};
use crate::error::{Error, Result};
use crate::fluctuations::{check_temperature, equilibrium_moments};
use crate::gaussian_state::GaussianState;
use crate::numerics::{hurwitz_zeta, integrate_semi_infinite, log_gamma_complex, QuadratureSpec};
use crate::oscillator::{entropy_kernel, free_energy_kernel, ln_partition_function as ln_z_free};

/// Relative step for centered differences in temperature and parameters.
pub const DEFAULT_RELATIVE_STEP: f64 = 1e-4;

/// Quadrature settings used inside finite differences, where integration
/// noise is amplified by the inverse step.
pub(crate) fn tight(quad: &QuadratureSpec) -> QuadratureSpec {
    QuadratureSpec {
        rel_tol: quad.rel_tol.min(1e-13),
        abs_tol: quad.abs_tol.min(1e-15),
        max_subdivisions: quad.max_subdivisions.max(8000),
        ..*quad
    }
}

fn require_positive_temperature(t: f64) -> Result<()> {
    check_temperature(t)?;
    if t == 0.0 {
        return Err(Error::Domain("partition function needs T > 0; use the zero-temperature limits of F and S".into()));
    }
    Ok(())
}

/// `ln Z = ln(omega0 / 2 pi nu) + sum_j ln Gamma(lambda_j / nu) - ln Gamma(cutoff / nu)`
/// with `nu = 2 pi T` and `lambda_j` the characteristic poles. A conjugate
/// pair contributes `2 Re ln Gamma`, so the result is real by construction.
pub fn ln_partition_function(t: f64, p: &BathParams) -> Result<f64> {
    require_positive_temperature(t)?;
    if p.gamma == 0.0 {
        return Ok(ln_z_free(p.omega0, t));
    }
    let nu = 2.0 * PI * t;
    let poles = drude_poles(p);
    let mut sum = (p.omega0 / (2.0 * PI * nu)).ln();
    if poles.has_complex_pair() {
        sum += log_gamma_complex(poles.lambda[0] / nu)?.re;
        sum += 2.0 * log_gamma_complex(poles.lambda[1] / nu)?.re;
    } else {
        for l in poles.lambda {
            sum += log_gamma_complex(Complex64::new(l.re, 0.0) / nu)?.re;
        }
    }
    sum -= log_gamma_complex(Complex64::new(p.cutoff / nu, 0.0))?.re;
    Ok(sum)
}

pub fn partition_function(t: f64, p: &BathParams) -> Result<f64> {
    Ok(ln_partition_function(t, p)?.exp())
}

/// Matsubara product form
/// `ln Z = -ln(omega0 / T) + sum_{n >= 1} ln[nu_n^2 / (omega0^2 + nu_n^2 + nu_n gamma^(nu_n) / m)]`,
/// truncated after `n_terms` with the remainder from the large-`nu`
/// expansion of the logarithm.
pub fn ln_partition_function_product(t: f64, p: &BathParams, n_terms: usize) -> Result<f64> {
    require_positive_temperature(t)?;
    if n_terms == 0 {
        return Err(Error::InvalidParameter("n_terms must be at least 1".into()));
    }
    let nu1 = 2.0 * PI * t;
    let w02 = p.omega0 * p.omega0;
    let mut sum = 0.0;
    for n in (1..=n_terms).rev() {
        let nu = nu1 * n as f64;
        let rest = w02 + nu * p.gamma * p.cutoff / (p.m * (nu + p.cutoff));
        sum -= (rest / (nu * nu)).ln_1p();
    }
    let a = w02 + p.gamma * p.cutoff / p.m;
    let b = p.gamma * p.cutoff * p.cutoff / p.m;
    let x = n_terms as f64 + 1.0;
    let tail = a * hurwitz_zeta(2.0, x)? / nu1.powi(2) - b * hurwitz_zeta(3.0, x)? / nu1.powi(3)
        + (b * p.cutoff - 0.5 * a * a) * hurwitz_zeta(4.0, x)? / nu1.powi(4);
    Ok(-(p.omega0 / t).ln() + sum - tail)
}

/// Free energy. For `T > 0` this is `-T ln Z` from the pole form; at
/// `T = 0` it is the spectral integral with `f(omega, 0) = omega / 2`.
pub fn free_energy(t: f64, p: &BathParams, quad: &QuadratureSpec) -> Result<f64> {
    check_temperature(t)?;
    if p.gamma == 0.0 {
        return Ok(free_energy_kernel(p.omega0, t));
    }
    if t == 0.0 {
        return free_energy_integral(t, p, quad);
    }
    Ok(-t * ln_partition_function(t, p)?)
}

fn spectral_average(
    t: f64,
    p: &BathParams,
    quad: &QuadratureSpec,
    what: &str,
    kernel: impl Fn(f64) -> f64,
) -> Result<f64> {
    let (split, points) = integration_layout(p, t);
    let est =
        integrate_semi_infinite(|w| kernel(w) * log_chi_derivative_im(w, p), split, &points, quad).map_err(|e| {
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

/// `F = (1/pi) int f(omega, T) phi'(omega) d omega` with `f` the free energy
/// of an uncoupled oscillator of frequency `omega`.
pub fn free_energy_integral(t: f64, p: &BathParams, quad: &QuadratureSpec) -> Result<f64> {
    check_temperature(t)?;
    if p.gamma == 0.0 {
        return Ok(free_energy_kernel(p.omega0, t));
    }
    spectral_average(t, p, quad, "free energy", |w| free_energy_kernel(w, t))
}

/// `S = (1/pi) int s(omega, T) phi'(omega) d omega`.
pub fn entropy(t: f64, p: &BathParams, quad: &QuadratureSpec) -> Result<f64> {
    check_temperature(t)?;
    if t == 0.0 {
        return Ok(0.0);
    }
    if p.gamma == 0.0 {
        return Ok(entropy_kernel(p.omega0, t));
    }
    spectral_average(t, p, quad, "entropy", |w| entropy_kernel(w, t))
}

/// `U = F + T S`.
pub fn internal_energy(t: f64, p: &BathParams, quad: &QuadratureSpec) -> Result<f64> {
    Ok(free_energy(t, p, quad)? + t * entropy(t, p, quad)?)
}

/// `C = T dS/dT` by a centered difference with relative step `1e-4`; zero
/// at `T = 0`.
pub fn specific_heat(t: f64, p: &BathParams, quad: &QuadratureSpec) -> Result<f64> {
    check_temperature(t)?;
    if t == 0.0 {
        return Ok(0.0);
    }
    let h = DEFAULT_RELATIVE_STEP * t;
    let q = tight(quad);
    let up = entropy(t + h, p, &q)?;
    let down = entropy(t - h, p, &q)?;
    Ok(t * (up - down) / (2.0 * h))
}

/// Both routes to the interaction energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InteractionEnergyRoutes {
    /// `U - <H_s>`.
    pub from_energies: f64,
    /// `cutoff dF/dcutoff`.
    pub from_cutoff_derivative: f64,
}

pub fn interaction_energy_routes(t: f64, p: &BathParams, quad: &QuadratureSpec) -> Result<InteractionEnergyRoutes> {
    check_temperature(t)?;
    let q = tight(quad);
    let u = internal_energy(t, p, &q)?;
    let h_s = equilibrium_moments(t, p, &q)?.mean_energy;
    let h = DEFAULT_RELATIVE_STEP * p.cutoff;
    let up = free_energy(t, &p.with_cutoff(p.cutoff + h)?, &q)?;
    let down = free_energy(t, &p.with_cutoff(p.cutoff - h)?, &q)?;
    Ok(InteractionEnergyRoutes { from_energies: u - h_s, from_cutoff_derivative: p.cutoff * (up - down) / (2.0 * h) })
}

/// `U_int = U - <H_s>`, cross-checked against `cutoff dF/dcutoff`.
pub fn interaction_energy(t: f64, p: &BathParams, quad: &QuadratureSpec) -> Result<f64> {
    let r = interaction_energy_routes(t, p, quad)?;
    let tol = 1e-4 * r.from_energies.abs().max(1e-3 * p.omega0);
    if (r.from_energies - r.from_cutoff_derivative).abs() > tol {
        return Err(Error::InternalConsistency(format!(
            "interaction energy at T = {t}: U - <H_s> = {} but cutoff dF/dcutoff = {}",
            r.from_energies, r.from_cutoff_derivative
        )));
    }
    Ok(r.from_energies)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermoPoint {
    pub temperature: f64,
    /// `None` at `T = 0`.
    pub partition_function: Option<f64>,
    pub ln_partition_function: Option<f64>,
    pub free_energy: f64,
    pub entropy: f64,
    pub internal_energy: f64,
    pub specific_heat: f64,
    pub interaction_energy: f64,
}

pub fn thermo_point(t: f64, p: &BathParams, quad: &QuadratureSpec) -> Result<ThermoPoint> {
    check_temperature(t)?;
    let ln_z = if t > 0.0 { Some(ln_partition_function(t, p)?) } else { None };
    let f = free_energy(t, p, quad)?;
    let s = entropy(t, p, quad)?;
    Ok(ThermoPoint {
        temperature: t,
        partition_function: ln_z.map(f64::exp),
        ln_partition_function: ln_z,
        free_energy: f,
        entropy: s,
        internal_energy: f + t * s,
        specific_heat: specific_heat(t, p, quad)?,
        interaction_energy: interaction_energy(t, p, quad)?,
    })
}

/// Thermodynamic entropy against the von Neumann entropy of the reduced
/// state; their difference is the system–bath mutual information.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropyComparison {
    pub temperature: f64,
    pub s_thermo: f64,
    pub s_von_neumann: f64,
    pub mutual_information: f64,
}

pub fn entropy_comparison(t: f64, p: &BathParams, quad: &QuadratureSpec) -> Result<EntropyComparison> {
    let s_thermo = entropy(t, p, quad)?;
    let s_von_neumann = GaussianState::from_bath(t, p, quad)?.von_neumann_entropy();
    Ok(EntropyComparison { temperature: t, s_thermo, s_von_neumann, mutual_information: s_von_neumann - s_thermo })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VariedParameter {
    Omega0,
    Mass,
}

/// Differentials for a quasi-static change `d lambda = step` of one
/// oscillator parameter at fixed temperature and bath.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VariationReport {
    pub parameter: VariedParameter,
    pub temperature: f64,
    /// Relative step actually used (after any refinement).
    pub delta: f64,
    /// Absolute step `d lambda`.
    pub step: f64,
    pub d_free_energy: f64,
    pub d_entropy: f64,
    /// Total heat `T dS`.
    pub heat: f64,
    /// `Tr[rho_s dH_s]`.
    pub work_system: f64,
    /// `Tr[H_s d rho_s] = d<H_s> - dW_s`.
    pub heat_system: f64,
    pub d_interaction_energy: f64,
    pub d_mean_energy: f64,
}

impl VariationReport {
    /// Largest relative violation of `dF = dW_s` and `T dS = dQ_s + dU_int`.
    pub fn identity_residual(&self) -> f64 {
        let rel = |lhs: f64, rhs: f64, scale: f64| {
            let scale = scale.max(f64::MIN_POSITIVE);
            (lhs - rhs).abs() / scale
        };
        let first = rel(self.d_free_energy, self.work_system, self.d_free_energy.abs().max(self.work_system.abs()));
        let second = rel(
            self.heat,
            self.heat_system + self.d_interaction_energy,
            self.heat.abs().max(self.heat_system.abs()).max(self.d_interaction_energy.abs()),
        );
        first.max(second)
    }
}

struct Sample {
    f: f64,
    s: f64,
    h_s: f64,
    u_int: f64,
}

fn sample(t: f64, p: &BathParams, quad: &QuadratureSpec) -> Result<Sample> {
    let f = free_energy(t, p, quad)?;
    let s = entropy(t, p, quad)?;
    let h_s = equilibrium_moments(t, p, quad)?.mean_energy;
    Ok(Sample { f, s, h_s, u_int: f + t * s - h_s })
}

fn variation_once(
    t: f64,
    p: &BathParams,
    which: VariedParameter,
    delta: f64,
    quad: &QuadratureSpec,
) -> Result<VariationReport> {
    type Shift = fn(&BathParams, f64) -> Result<BathParams>;
    let (value, shifted): (f64, Shift) = match which {
        VariedParameter::Omega0 => (p.omega0, |p, v| p.with_omega0(v)),
        VariedParameter::Mass => (p.m, |p, v| p.with_mass(v)),
    };
    let h = delta * value;
    let up = sample(t, &shifted(p, value + h)?, quad)?;
    let down = sample(t, &shifted(p, value - h)?, quad)?;
    let centre = equilibrium_moments(t, p, quad)?;
    let dh_dlambda = match which {
        VariedParameter::Omega0 => p.m * p.omega0 * centre.q2,
        VariedParameter::Mass => -centre.p2 / (2.0 * p.m * p.m) + 0.5 * p.omega0 * p.omega0 * centre.q2,
    };
    let d_mean_energy = 0.5 * (up.h_s - down.h_s);
    let work_system = dh_dlambda * h;
    let d_entropy = 0.5 * (up.s - down.s);
    Ok(VariationReport {
        parameter: which,
        temperature: t,
        delta,
        step: h,
        d_free_energy: 0.5 * (up.f - down.f),
        d_entropy,
        heat: t * d_entropy,
        work_system,
        heat_system: d_mean_energy - work_system,
        d_interaction_energy: 0.5 * (up.u_int - down.u_int),
        d_mean_energy,
    })
}

/// Bookkeeping tolerance for [`quasi_static_variation`].
pub const VARIATION_TOLERANCE: f64 = 1e-5;

/// Heat and work for a quasi-static change of `omega0` or `m` by the
/// relative step `delta`. The step is halved up to three times if the
/// identities `dF = dW_s` and `T dS = dQ_s + dU_int` are violated beyond
/// [`VARIATION_TOLERANCE`].
pub fn quasi_static_variation(
    t: f64,
    p: &BathParams,
    which: VariedParameter,
    delta: f64,
    quad: &QuadratureSpec,
) -> Result<VariationReport> {
    check_temperature(t)?;
    if !(delta > 0.0 && delta < 0.5) {
        return Err(Error::InvalidParameter(format!("relative step must be in (0, 0.5), got {delta}")));
    }
    let q = tight(quad);
    let mut step = delta;
    let mut last = None;
    for _ in 0..4 {
        let report = variation_once(t, p, which, step, &q)?;
        if report.identity_residual() <= VARIATION_TOLERANCE {
            return Ok(report);
        }
        last = Some(report);
        step *= 0.5;
    }
    let r = last.expect("at least one attempt");
    Err(Error::InternalConsistency(format!(
        "heat bookkeeping violated after step refinement (residual {:.3e}): dF = {}, dW_s = {}, T dS = {}, dQ_s + dU_int = {}",
        r.identity_residual(),
        r.d_free_energy,
        r.work_system,
        r.heat,
        r.heat_system + r.d_interaction_energy
    )))
}
