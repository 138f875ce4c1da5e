//! The reduced state of the oscillator: a zero-mean Gaussian with no
//! position–momentum correlation, fixed by `<q^2>` and `<p^2>`.
//!
//! Number-basis quantities refer to the levels of the uncoupled oscillator
//! with length scale `1/b`, `b^2 = m omega0`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bath::BathParams;
use crate::error::{Error, Result};
use crate::fluctuations::equilibrium_moments;
use crate::numerics::{legendre_p, GaussHermite, QuadratureSpec};
use crate::oscillator::entropy_kernel;

/// Largest truncation for the full number-basis block.
pub const MAX_BLOCK_N: usize = 200;
/// Probability mass allowed outside an automatically chosen truncation.
pub const TAIL_MASS: f64 = 1e-10;
/// Trace deficit above which a block is reported as truncated.
pub const TRUNCATION_WARNING: f64 = 1e-6;
/// Hard limit for diagonal-only evaluations.
const MAX_DIAGONAL_N: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianState {
    q2: f64,
    p2: f64,
    /// `b^2 = m omega0`.
    b2: f64,
    x: f64,
    y: f64,
    big_d: f64,
    a: f64,
    d: f64,
    mu: f64,
}

impl GaussianState {
    /// State with the given variances, measured against the oscillator
    /// levels of `p`.
    pub fn new(q2: f64, p2: f64, p: &BathParams) -> Result<Self> {
        Self::with_scale(q2, p2, p.m * p.omega0)
    }

    fn with_scale(q2: f64, p2: f64, b2: f64) -> Result<Self> {
        if !(q2 > 0.0 && q2.is_finite() && p2 > 0.0 && p2.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "variances must be positive and finite, got <q^2> = {q2}, <p^2> = {p2}"
            )));
        }
        let mut mu = 0.5 / (q2 * p2).sqrt();
        if mu > 1.0 {
            if mu - 1.0 > 1e-12 {
                return Err(Error::Domain(format!(
                    "variances violate the uncertainty relation: <q^2><p^2> = {}",
                    q2 * p2
                )));
            }
            mu = 1.0;
        }
        let x = 2.0 * b2 * q2;
        let y = 2.0 * p2 / b2;
        let big_d = (1.0 + x) * (1.0 + y);
        Ok(GaussianState { q2, p2, b2, x, y, big_d, a: (y - x) / big_d, d: (x * y - 1.0) / big_d, mu })
    }

    /// Stationary reduced state of the damped oscillator at temperature `t`.
    pub fn from_bath(t: f64, p: &BathParams, quad: &QuadratureSpec) -> Result<Self> {
        let m = equilibrium_moments(t, p, quad)?;
        Self::new(m.q2, m.p2, p)
    }

    /// Gibbs state of the uncoupled oscillator with mean occupation `n_bar`.
    pub fn thermal_state(n_bar: f64, p: &BathParams) -> Result<Self> {
        check_occupation(n_bar)?;
        let b2 = p.m * p.omega0;
        let s = 2.0 * n_bar + 1.0;
        Self::with_scale(0.5 * s / b2, 0.5 * s * b2, b2)
    }

    /// Squeezed vacuum with `<n> = sinh^2 r = n_bar`, squeezed in position.
    pub fn squeezed_vacuum(n_bar: f64, p: &BathParams) -> Result<Self> {
        check_occupation(n_bar)?;
        let b2 = p.m * p.omega0;
        let r = n_bar.sqrt().asinh();
        let x = (-2.0 * r).exp();
        let y = (2.0 * r).exp();
        Self::with_scale(0.5 * x / b2, 0.5 * y * b2, b2)
    }

    pub fn q2(&self) -> f64 {
        self.q2
    }

    pub fn p2(&self) -> f64 {
        self.p2
    }

    /// Normalized position variance `x = 2 b^2 <q^2>` (1 in the ground state).
    pub fn x(&self) -> f64 {
        self.x
    }

    /// Normalized momentum variance `y = 2 <p^2> / b^2`.
    pub fn y(&self) -> f64 {
        self.y
    }

    /// `D = (1 + x)(1 + y)`.
    pub fn big_d(&self) -> f64 {
        self.big_d
    }

    /// `a = (y - x) / D`.
    pub fn a(&self) -> f64 {
        self.a
    }

    /// `d = (xy - 1) / D`.
    pub fn d(&self) -> f64 {
        self.d
    }

    /// `mu = Tr rho^2 = (1/2) / sqrt(<q^2><p^2>)`.
    pub fn purity(&self) -> f64 {
        self.mu
    }

    /// Position-space kernel `rho(q, q')`.
    pub fn kernel(&self, q: f64, qp: f64) -> f64 {
        let u = q + qp;
        let v = q - qp;
        (-u * u / (8.0 * self.q2) - 0.5 * self.p2 * v * v).exp() / (2.0 * PI * self.q2).sqrt()
    }

    /// Ratio of consecutive eigenvalues `(1 - mu) / (1 + mu)`.
    fn eigen_ratio(&self) -> f64 {
        (1.0 - self.mu) / (1.0 + self.mu)
    }

    /// Smallest `n_max` with eigenvalue tail `((1-mu)/(1+mu))^(n_max+1)`
    /// below [`TAIL_MASS`].
    pub fn eigen_truncation(&self) -> usize {
        let r = self.eigen_ratio();
        if r <= 0.0 {
            return 0;
        }
        let n = (TAIL_MASS.ln() / r.ln()).ceil() - 1.0;
        (n.max(0.0) as usize).min(MAX_DIAGONAL_N)
    }

    pub fn eigenvalues(&self, n_max: usize) -> Result<SpectralDecomposition> {
        if self.mu > 1.0 {
            return Err(Error::Domain(format!("purity {} exceeds 1", self.mu)));
        }
        let r = self.eigen_ratio();
        let p0 = 2.0 * self.mu / (1.0 + self.mu);
        let mut p_n = Vec::with_capacity(n_max + 1);
        let mut v = p0;
        for _ in 0..=n_max {
            p_n.push(v);
            v *= r;
        }
        Ok(SpectralDecomposition { mu: self.mu, p_n, c: (self.p2 / self.q2).powf(0.25), n_max })
    }

    /// `S_v = ((1-mu)/mu) artanh(mu) - ln(2 mu / (1 + mu))`, zero for a pure state.
    pub fn von_neumann_entropy(&self) -> f64 {
        von_neumann_entropy_of_purity(self.mu)
    }

    /// Frequency, mass and partition function of the oscillator whose
    /// Gibbs state at temperature `t` equals this state.
    pub fn effective_oscillator(&self, t: f64) -> Result<EffectiveOscillator> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::Domain(format!("effective oscillator needs a finite T > 0, got {t}")));
        }
        if self.mu >= 1.0 {
            return Err(Error::Domain("a pure state has no effective oscillator at finite temperature".into()));
        }
        let k = self.mu.atanh();
        let omega = 2.0 * t * k;
        Ok(EffectiveOscillator {
            temperature: t,
            omega,
            mass: (self.p2 / self.q2).sqrt() / omega,
            partition_function: 0.5 / k.sinh(),
        })
    }

    /// `rho_nn = sqrt(4/D) Q_n` with `Q_n = (d^2 - a^2)^{n/2} P_n(d / sqrt(d^2 - a^2))`,
    /// generated by the real recurrence
    /// `(n+1) Q_{n+1} = (2n+1) d Q_n - n (d^2 - a^2) Q_{n-1}`.
    pub fn number_basis_diagonals(&self, n_max: usize) -> Result<Vec<f64>> {
        if n_max > MAX_DIAGONAL_N {
            return Err(Error::InvalidParameter(format!("n_max {n_max} exceeds {MAX_DIAGONAL_N}")));
        }
        let pref = (4.0 / self.big_d).sqrt();
        let s2 = self.d * self.d - self.a * self.a;
        let mut out = Vec::with_capacity(n_max + 1);
        let mut prev = 0.0;
        let mut cur = 1.0;
        for n in 0..=n_max {
            let v = pref * cur;
            if v < -1e-10 {
                return Err(Error::InternalConsistency(format!("negative population rho_{n}{n} = {v}")));
            }
            out.push(v.max(0.0));
            let nf = n as f64;
            let next = ((2.0 * nf + 1.0) * self.d * cur - nf * s2 * prev) / (nf + 1.0);
            prev = cur;
            cur = next;
        }
        Ok(out)
    }

    pub fn number_basis_diagonal(&self, n: usize) -> Result<f64> {
        Ok(self.number_basis_diagonals(n)?[n])
    }

    /// Same diagonal through a complex Legendre polynomial evaluation. When
    /// `d^2 < a^2` the intermediate values are complex and the imaginary
    /// part of the combination must vanish.
    pub fn number_basis_diagonal_legendre(&self, n: usize) -> Result<f64> {
        let pref = (4.0 / self.big_d).sqrt();
        let s2 = self.d * self.d - self.a * self.a;
        let s = Complex64::new(s2, 0.0).sqrt();
        let q = if s.norm() < 1e-150 {
            // Leading coefficient of P_n times d^n.
            let mut c = 1.0;
            for k in 1..=n {
                c *= (2 * k - 1) as f64 / k as f64;
            }
            Complex64::new(c * self.d.powi(n as i32), 0.0)
        } else {
            s.powu(n as u32) * legendre_p(n, Complex64::new(self.d, 0.0) / s)
        };
        if q.im.abs() > 1e-8 * q.norm().max(1e-300) && q.im.abs() > 1e-14 {
            return Err(Error::InternalConsistency(format!("imaginary residue {} in rho_{n}{n}", q.im)));
        }
        let v = pref * q.re;
        if v < -1e-10 {
            return Err(Error::InternalConsistency(format!("negative population rho_{n}{n} = {v}")));
        }
        Ok(v.max(0.0))
    }

    /// Smallest `n_max` with `1 - sum_{n <= n_max} rho_nn` below [`TAIL_MASS`],
    /// and never below the eigenvalue truncation.
    pub fn auto_n_max(&self) -> Result<usize> {
        let mut n_cap = 64;
        loop {
            let diag = self.number_basis_diagonals(n_cap)?;
            let mut acc = 0.0;
            for (n, v) in diag.iter().enumerate() {
                acc += v;
                if 1.0 - acc < TAIL_MASS {
                    return Ok(n.max(self.eigen_truncation().min(n_cap)));
                }
            }
            if n_cap >= MAX_DIAGONAL_N {
                return Err(Error::Domain(format!(
                    "occupation tail does not fall below {TAIL_MASS} within {MAX_DIAGONAL_N} levels"
                )));
            }
            n_cap = (n_cap * 4).min(MAX_DIAGONAL_N);
        }
    }

    /// The block `rho_nm`, `0 <= n, m <= n_max`, in the uncoupled oscillator
    /// basis.
    ///
    /// With `u = (q + q')/2`, `v = q - q'` the kernel times both Hermite
    /// exponentials is `exp(-alpha_u u^2 - alpha_v v^2)` and the rest is a
    /// polynomial of degree `n + m`, so a tensor Gauss–Hermite rule with
    /// `n_max + 1` nodes per axis is exact. Entries with `n + m` odd vanish
    /// by parity and are set to zero.
    pub fn number_basis_block(&self, n_max: usize) -> Result<NumberBasisBlock> {
        if n_max > MAX_BLOCK_N {
            return Err(Error::InvalidParameter(format!(
                "block truncation {n_max} exceeds {MAX_BLOCK_N}; use the diagonal route"
            )));
        }
        let b = self.b2.sqrt();
        let alpha_u = self.b2 + 0.5 / self.q2;
        let alpha_v = 0.25 * self.b2 + 0.5 * self.p2;
        let rule = GaussHermite::new(n_max + 1)?;
        let k = rule.len();
        let norm = b / ((2.0 * PI * self.q2).sqrt() * (alpha_u * alpha_v).sqrt());
        // sqrt of the standard weights w e^{-t^2}.
        let root_w: Vec<f64> =
            rule.nodes.iter().zip(&rule.weights).map(|(t, w)| w.sqrt() * (-0.5 * t * t).exp()).collect();
        let rows = k * k;
        let mut left = DMatrix::<f64>::zeros(rows, n_max + 1);
        let mut right = DMatrix::<f64>::zeros(rows, n_max + 1);
        let mut h = vec![0.0; n_max + 1];
        for i in 0..k {
            let u = rule.nodes[i] / alpha_u.sqrt();
            for j in 0..k {
                let v = rule.nodes[j] / alpha_v.sqrt();
                let g = i * k + j;
                let s = root_w[i] * root_w[j] * norm.sqrt();
                hermite_polynomials(b * (u + 0.5 * v), &mut h);
                for (n, hv) in h.iter().enumerate() {
                    left[(g, n)] = s * hv;
                }
                hermite_polynomials(b * (u - 0.5 * v), &mut h);
                for (n, hv) in h.iter().enumerate() {
                    right[(g, n)] = s * hv;
                }
            }
        }
        let mut rho = left.transpose() * right;
        for n in 0..=n_max {
            for m in 0..=n_max {
                if (n + m) % 2 == 1 {
                    rho[(n, m)] = 0.0;
                }
            }
        }
        // Symmetrize away round-off.
        let rho = (&rho + rho.transpose()) * 0.5;
        let trace = rho.trace();
        let trace_deficit = 1.0 - trace;
        let suggested_n_max = if trace_deficit > TRUNCATION_WARNING {
            let s = self.auto_n_max().ok();
            log::warn!(
                "number-basis block truncated at n_max = {n_max}: trace deficit {trace_deficit:.3e}{}",
                s.map(|s| format!(", suggested n_max = {s}")).unwrap_or_default()
            );
            s
        } else {
            None
        };
        Ok(NumberBasisBlock { rho, n_max, trace_deficit, suggested_n_max })
    }

    /// Mean and variance of the occupation of the uncoupled oscillator
    /// levels, summed over `n <= n_max`.
    pub fn occupation_statistics(&self, n_max: usize) -> Result<OccupationStatistics> {
        let diag = self.number_basis_diagonals(n_max)?;
        let mut mass = 0.0;
        let mut m1 = 0.0;
        let mut m2 = 0.0;
        for (n, r) in diag.iter().enumerate() {
            let n = n as f64;
            mass += r;
            m1 += n * r;
            m2 += n * n * r;
        }
        let trace_deficit = 1.0 - mass;
        if trace_deficit > TRUNCATION_WARNING {
            log::warn!("occupation statistics truncated at n_max = {n_max}: trace deficit {trace_deficit:.3e}");
        }
        let mean = m1;
        let closed = self.mean_occupation();
        if trace_deficit < TAIL_MASS && (mean - closed).abs() > 1e-8 * closed.max(1.0) {
            return Err(Error::InternalConsistency(format!(
                "mean occupation {mean} from populations but {closed} from variances"
            )));
        }
        Ok(OccupationStatistics { mean, variance: m2 - m1 * m1, trace_deficit })
    }

    /// `<n> = (x + y)/4 - 1/2`.
    pub fn mean_occupation(&self) -> f64 {
        0.25 * (self.x + self.y) - 0.5
    }

    /// `(Delta n)^2 = (x^2 + y^2 - 2)/8`.
    pub fn occupation_variance(&self) -> f64 {
        (self.x * self.x + self.y * self.y - 2.0) / 8.0
    }

    /// `-sum rho_nn ln rho_nn` over `n <= n_max`.
    pub fn shannon_entropy_diagonal(&self, n_max: usize) -> Result<f64> {
        let diag = self.number_basis_diagonals(n_max)?;
        let deficit = 1.0 - diag.iter().sum::<f64>();
        if deficit > TRUNCATION_WARNING {
            log::warn!("diagonal entropy truncated at n_max = {n_max}: trace deficit {deficit:.3e}");
        }
        Ok(diag.iter().filter(|r| **r > 0.0).map(|r| -r * r.ln()).sum())
    }
}

fn check_occupation(n_bar: f64) -> Result<()> {
    if n_bar.is_finite() && n_bar >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("mean occupation must be finite and non-negative, got {n_bar}")))
    }
}

/// Normalized Hermite polynomials `psi_n(x) e^{x^2/2}`.
fn hermite_polynomials(x: f64, out: &mut [f64]) {
    let mut prev = 0.0;
    let mut cur = PI.powf(-0.25);
    for (k, slot) in out.iter_mut().enumerate() {
        *slot = cur;
        let kf = k as f64;
        let next = x * (2.0 / (kf + 1.0)).sqrt() * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
}

pub fn von_neumann_entropy_of_purity(mu: f64) -> f64 {
    if mu >= 1.0 {
        return 0.0;
    }
    (1.0 - mu) / mu * mu.atanh() - (2.0 * mu / (1.0 + mu)).ln()
}

/// `dS_v / d mu = -artanh(mu) / mu^2`.
pub fn von_neumann_entropy_derivative(mu: f64) -> f64 {
    -mu.atanh() / (mu * mu)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralDecomposition {
    pub mu: f64,
    /// `p_n = (2 mu / (1 + mu)) ((1 - mu)/(1 + mu))^n`.
    pub p_n: Vec<f64>,
    /// Scale of the eigenfunctions `sqrt(c) psi_n(c q)`, `c = (<p^2>/<q^2>)^{1/4}`.
    pub c: f64,
    pub n_max: usize,
}

impl SpectralDecomposition {
    pub fn tail_mass(&self) -> f64 {
        1.0 - self.p_n.iter().sum::<f64>()
    }

    /// `-sum p_n ln p_n` over the kept eigenvalues.
    pub fn entropy_series(&self) -> f64 {
        self.p_n.iter().filter(|p| **p > 0.0).map(|p| -p * p.ln()).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectiveOscillator {
    pub temperature: f64,
    pub omega: f64,
    pub mass: f64,
    pub partition_function: f64,
}

impl EffectiveOscillator {
    /// Entropy of the effective Gibbs state, in Bose form; equals the von
    /// Neumann entropy of the state it was built from.
    pub fn bose_entropy(&self) -> f64 {
        entropy_kernel(self.omega, self.temperature)
    }

    /// `Z_eff^-1 exp(-omega_eff (n + 1/2) / T)`.
    pub fn population(&self, n: usize) -> f64 {
        (-(self.omega * (n as f64 + 0.5)) / self.temperature).exp() / self.partition_function
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NumberBasisBlock {
    pub rho: DMatrix<f64>,
    pub n_max: usize,
    /// `1 - sum_n rho_nn`.
    pub trace_deficit: f64,
    /// Set when the deficit exceeds [`TRUNCATION_WARNING`].
    pub suggested_n_max: Option<usize>,
}

impl NumberBasisBlock {
    pub fn trace(&self) -> f64 {
        self.rho.trace()
    }

    /// `sum_{nm} rho_nm^2`, which tends to the purity.
    pub fn purity_sum(&self) -> f64 {
        self.rho.iter().map(|v| v * v).sum()
    }

    pub fn get(&self, n: usize, m: usize) -> f64 {
        self.rho[(n, m)]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OccupationStatistics {
    pub mean: f64,
    pub variance: f64,
    pub trace_deficit: f64,
}
