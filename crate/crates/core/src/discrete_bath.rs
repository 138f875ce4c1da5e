//! A finite bath of `N` oscillators at equidistant frequencies, coupled bilinearly to the system with the potential counter-term. The
//! coupled quadratic form is solved exactly and serves as an independent
//! check of the continuum formulas.
//!
//! The mass-weighted potential matrix has arrowhead shape: the system row
//! and column are full, the bath block is diagonal. Its eigenvalues
//! interlace the squared bath frequencies and are found one bracket at a
//! time from the secular equation, in `O(N^2)` work overall.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::bath::{spectral_density, BathParams};
use crate::error::{Error, Result};
use crate::fluctuations::check_temperature;
use crate::oscillator::{coth_half, free_energy_kernel};

/// Default ratio between the highest bath frequency and the cutoff.
pub const DEFAULT_SPAN: f64 = 16.0;
/// Largest size accepted by the dense cross-check.
pub const MAX_DENSE_N: usize = 2000;

/// Placement of the bath frequencies on the grid of spacing `Delta`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FrequencyGrid {
    /// `omega_i = i Delta`. Low-temperature moments converge only to
    /// first order in `Delta`.
    Endpoint,
    /// `omega_i = (i - 1/2) Delta`, second order in `Delta`.
    #[default]
    Midpoint,
}

impl FrequencyGrid {
    fn offset(self) -> f64 {
        match self {
            FrequencyGrid::Endpoint => 0.0,
            FrequencyGrid::Midpoint => 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteBath {
    pub system: BathParams,
    pub n: usize,
    /// Frequency spacing; the bath spans `(0, n * delta]`.
    pub delta: f64,
    pub grid: FrequencyGrid,
    pub omegas: Vec<f64>,
    pub masses: Vec<f64>,
    pub couplings: Vec<f64>,
}

impl DiscreteBath {
    pub fn build(n: usize, p: &BathParams) -> Result<Self> {
        Self::build_with(n, p, DEFAULT_SPAN, FrequencyGrid::default())
    }

    pub fn build_with_span(n: usize, p: &BathParams, span: f64) -> Result<Self> {
        Self::build_with(n, p, span, FrequencyGrid::default())
    }

    /// Bath with `n * Delta = span * cutoff`; `span >= 8`.
    pub fn build_with(n: usize, p: &BathParams, span: f64, grid: FrequencyGrid) -> Result<Self> {
        p.validate()?;
        if n == 0 {
            return Err(Error::InvalidParameter("bath needs at least one oscillator".into()));
        }
        if !(span >= 8.0 && span.is_finite()) {
            return Err(Error::InvalidParameter(format!("frequency span must be at least 8 cutoffs, got {span}")));
        }
        let delta = span * p.cutoff / n as f64;
        let omegas: Vec<f64> = (1..=n).map(|i| (i as f64 - grid.offset()) * delta).collect();
        let masses = vec![1.0; n];
        let couplings = omegas
            .iter()
            .zip(&masses)
            .map(|(w, mi)| (2.0 * delta * mi * w * spectral_density(*w, p) / PI).sqrt())
            .collect();
        Ok(DiscreteBath { system: *p, n, delta, grid, omegas, masses, couplings })
    }

    /// `sum c_i^2 / (2 m_i omega_i^2)`, the coefficient of `q^2` added to
    /// the system potential.
    pub fn counter_term(&self) -> f64 {
        self.couplings.iter().zip(&self.omegas).zip(&self.masses).map(|((c, w), mi)| c * c / (2.0 * mi * w * w)).sum()
    }

    /// Mass-weighted couplings `c_i / sqrt(m m_i)`.
    fn kappas(&self) -> Vec<f64> {
        self.couplings.iter().zip(&self.masses).map(|(c, mi)| c / (self.system.m * mi).sqrt()).collect()
    }

    /// Diagonal system entry of the mass-weighted potential.
    fn k00(&self) -> f64 {
        let w0 = self.system.omega0;
        w0 * w0 + 2.0 * self.counter_term() / self.system.m
    }

    /// Dense mass-weighted potential matrix, system coordinate first.
    pub fn potential_matrix(&self) -> DMatrix<f64> {
        let n = self.n;
        let kappa = self.kappas();
        let mut k = DMatrix::zeros(n + 1, n + 1);
        k[(0, 0)] = self.k00();
        for i in 0..n {
            k[(0, i + 1)] = -kappa[i];
            k[(i + 1, 0)] = -kappa[i];
            k[(i + 1, i + 1)] = self.omegas[i] * self.omegas[i];
        }
        k
    }

    /// Normal modes from the secular equation.
    pub fn normal_modes(&self) -> Result<NormalModes> {
        if self.system.gamma == 0.0 {
            return Ok(self.uncoupled_modes());
        }
        let kappa = self.kappas();
        let k2: Vec<f64> = kappa.iter().map(|k| k * k).collect();
        let k00 = self.k00();
        let d2 = self.delta * self.delta;
        let n = self.n;
        // Below the lowest bath frequency the secular function ends at
        // omega0^2 > 0 when lambda -> 0, so a root there is positive.
        if self.system.omega0 <= 0.0 {
            return Err(Error::ModelConstruction("non-positive bare frequency".into()));
        }
        let mut frequencies = Vec::with_capacity(n + 1);
        let mut weights = Vec::with_capacity(n + 1);
        let mut shifts = Vec::with_capacity(n);
        let w0sq = self.system.omega0 * self.system.omega0;
        for k in 0..=n {
            let (lambda, weight, offset) = if k == 0 {
                // Solve in lambda itself. Using K00 - sum kappa^2/omega_j^2 =
                // omega0^2 the secular function is
                // -omega0^2 + lambda + lambda sum kappa^2 / (omega_j^2 (omega_j^2 - lambda)),
                // free of cancellation when lambda << omega_1^2.
                let eval = |lambda: f64| {
                    let mut sum = 0.0;
                    let mut sum2 = 0.0;
                    for (kk, w) in k2.iter().zip(&self.omegas) {
                        let w2 = w * w;
                        let den = w2 - lambda;
                        sum += kk / (w2 * den);
                        sum2 += kk / (den * den);
                    }
                    (-w0sq + lambda + lambda * sum, 1.0 + sum2)
                };
                let lambda = solve_increasing(eval, self.omegas[0].powi(2), false)
                    .map_err(|e| Error::ModelConstruction(format!("lowest normal mode not bracketed: {e}")))?;
                (lambda, 1.0 / eval(lambda).1, lambda - self.omegas[0].powi(2))
            } else {
                // Origin at the bath pole `j0`; lambda = origin + s sigma.
                let (j0, s, gap) = if k < n {
                    let upper = self.omegas[k];
                    let lower = self.omegas[k - 1];
                    (k + 1, -1.0, (upper - lower) * (upper + lower))
                } else {
                    let bound = k00 + kappa.iter().map(|x| x.abs()).sum::<f64>() + 1.0;
                    (n, 1.0, bound)
                };
                let origin = self.omegas[j0 - 1].powi(2);
                // omega_j^2 - omega_j0^2 = (j - j0)(j + j0 - 2 a) Delta^2 without
                // cancellation.
                let a2 = 2.0 * self.grid.offset();
                let offsets = |j: usize| (j as f64 - j0 as f64) * (j as f64 + j0 as f64 - a2) * d2;
                let eval = |sigma: f64| {
                    let mut sum = 0.0;
                    let mut sum2 = 0.0;
                    for (j, kk) in k2.iter().enumerate() {
                        let den = offsets(j + 1) - s * sigma;
                        sum += kk / den;
                        sum2 += kk / (den * den);
                    }
                    (-s * (k00 - origin) + sigma + s * sum, 1.0 + sum2)
                };
                let sigma = solve_increasing(eval, gap, k == n)
                    .map_err(|e| Error::ModelConstruction(format!("normal mode {k} not bracketed: {e}")))?;
                (origin + s * sigma, 1.0 / eval(sigma).1, s * sigma)
            };
            if lambda <= 0.0 {
                return Err(Error::ModelConstruction(format!(
                    "non-positive squared mode frequency {lambda} (mode {k})"
                )));
            }
            let w = lambda.sqrt();
            frequencies.push(w);
            weights.push(weight);
            if k < n {
                let upper = self.omegas[k];
                shifts.push(offset / (w + upper));
            }
        }
        Ok(NormalModes { frequencies, system_weights: weights, shifts })
    }

    fn uncoupled_modes(&self) -> NormalModes {
        let mut modes: Vec<(f64, f64)> = self.omegas.iter().map(|w| (*w, 0.0)).collect();
        modes.push((self.system.omega0, 1.0));
        modes.sort_by(|a, b| a.0.total_cmp(&b.0));
        NormalModes {
            frequencies: modes.iter().map(|m| m.0).collect(),
            system_weights: modes.iter().map(|m| m.1).collect(),
            shifts: vec![0.0; self.n],
        }
    }

    /// Normal modes from a dense symmetric eigensolve (cross-check).
    pub fn normal_modes_dense(&self) -> Result<NormalModes> {
        if self.n > MAX_DENSE_N {
            return Err(Error::InvalidParameter(format!("dense eigensolve limited to N <= {MAX_DENSE_N}")));
        }
        let eig = SymmetricEigen::new(self.potential_matrix());
        let mut modes: Vec<(f64, f64)> =
            eig.eigenvalues.iter().zip(eig.eigenvectors.column_iter()).map(|(l, v)| (*l, v[0] * v[0])).collect();
        modes.sort_by(|a, b| a.0.total_cmp(&b.0));
        if let Some(bad) = modes.iter().find(|m| m.0 <= 0.0) {
            return Err(Error::ModelConstruction(format!("non-positive squared mode frequency {}", bad.0)));
        }
        let frequencies: Vec<f64> = modes.iter().map(|m| m.0.sqrt()).collect();
        let shifts = (0..self.n).map(|k| frequencies[k] - self.omegas[k]).collect();
        Ok(NormalModes { frequencies, system_weights: modes.iter().map(|m| m.1).collect(), shifts })
    }

    /// `<q^2>` and `<p^2>` of the system coordinate in the thermal state of
    /// the full chain.
    pub fn exact_moments(&self, t: f64) -> Result<ExactMoments> {
        check_temperature(t)?;
        let modes = self.normal_modes()?;
        Ok(modes.moments(t, self.system.m))
    }

    /// `F_tot = sum_k f(omega'_k)` and `F_b = sum_i f(omega_i)`. Their
    /// difference is summed pairwise, mode `k` against bath frequency
    /// `k + 1`, to avoid cancellation.
    pub fn exact_total_free_energy(&self, t: f64) -> Result<FreeEnergyDecomposition> {
        check_temperature(t)?;
        let modes = self.normal_modes()?;
        let total: f64 = modes.frequencies.iter().map(|w| free_energy_kernel(*w, t)).sum();
        let bath: f64 = self.omegas.iter().map(|w| free_energy_kernel(*w, t)).sum();
        let mut difference = free_energy_kernel(modes.frequencies[self.n], t);
        for k in 0..self.n {
            difference += free_energy_kernel(modes.frequencies[k], t) - free_energy_kernel(self.omegas[k], t);
        }
        Ok(FreeEnergyDecomposition { temperature: t, total, bath, difference })
    }

    /// Eigenfrequencies of the `N = 1` chain from the closed-form 2x2
    /// eigenvalues.
    pub fn two_oscillator_frequencies(&self) -> Result<[f64; 2]> {
        if self.n != 1 {
            return Err(Error::InvalidParameter("closed form needs N = 1".into()));
        }
        let a = self.k00();
        let b = self.omegas[0] * self.omegas[0];
        let k = self.kappas()[0];
        let mean = 0.5 * (a + b);
        let r = (0.25 * (a - b) * (a - b) + k * k).sqrt();
        // det = a b - k^2 = omega0^2 omega_1^2 exactly.
        let det = self.system.omega0.powi(2) * b;
        let lo = det / (mean + r);
        Ok([lo.sqrt(), (mean + r).sqrt()])
    }
}

/// Root of a strictly increasing function on `(0, hi)` that starts at
/// `-inf` and is positive at (or tends to `+inf` towards) `hi`; `closed_top`
/// asks for the value at `hi` to be checked first.
/// `eval` returns the value and derivative. Newton steps are kept inside
/// the bracket; bisection is geometric while the bracket spans decades.
fn solve_increasing<F>(mut eval: F, hi: f64, closed_top: bool) -> Result<f64>
where
    F: FnMut(f64) -> (f64, f64),
{
    let mut lo = 0.0;
    let mut hi = hi;
    if closed_top {
        let (g, _) = eval(hi);
        if !(g > 0.0) {
            return Err(Error::RootFinding(format!("no sign change, g(hi) = {g}")));
        }
    }
    let mut x = 0.5 * hi;
    for _ in 0..400 {
        let (g, dg) = eval(x);
        if !g.is_finite() {
            return Err(Error::RootFinding(format!("non-finite secular value at {x}")));
        }
        if g == 0.0 {
            return Ok(x);
        }
        if g > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        if hi - lo <= 4.0 * f64::EPSILON * hi {
            return Ok(0.5 * (lo + hi));
        }
        let newton = x - g / dg;
        x = if newton > lo && newton < hi && newton.is_finite() {
            if (newton - x).abs() <= 2.0 * f64::EPSILON * x {
                return Ok(newton);
            }
            newton
        } else if lo == 0.0 {
            hi * 1e-4
        } else if hi > 16.0 * lo {
            (lo * hi).sqrt()
        } else {
            0.5 * (lo + hi)
        };
    }
    Err(Error::RootFinding("secular iteration did not converge".into()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalModes {
    /// Ascending eigenfrequencies, `N + 1` of them.
    pub frequencies: Vec<f64>,
    /// Squared system component of each mass-weighted eigenvector.
    pub system_weights: Vec<f64>,
    /// `omega'_k - omega_{k+1}` for `k < N`.
    pub shifts: Vec<f64>,
}

impl NormalModes {
    pub fn len(&self) -> usize {
        self.frequencies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frequencies.is_empty()
    }

    fn moments(&self, t: f64, m: f64) -> ExactMoments {
        let mut q2 = 0.0;
        let mut p2 = 0.0;
        for (w, v2) in self.frequencies.iter().zip(&self.system_weights) {
            let c = coth_half(*w, t);
            q2 += v2 * c / (2.0 * w);
            p2 += v2 * w * c / 2.0;
        }
        ExactMoments { temperature: t, q2: q2 / m, p2: p2 * m }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExactMoments {
    pub temperature: f64,
    pub q2: f64,
    pub p2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FreeEnergyDecomposition {
    pub temperature: f64,
    pub total: f64,
    pub bath: f64,
    /// `F_tot - F_b`, to be compared with the system free energy.
    pub difference: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bath::phase;
    use crate::fluctuations::equilibrium_moments;
    use crate::numerics::QuadratureSpec;
    use crate::thermo::free_energy;

    fn chain(n: usize, gamma: f64, cutoff: f64) -> DiscreteBath {
        DiscreteBath::build(n, &BathParams::natural(gamma, cutoff).unwrap()).unwrap()
    }

    #[test]
    fn construction() {
        let b = chain(500, 1.0, 10.0);
        assert_eq!(b.omegas.len(), 500);
        assert!((b.delta * 500.0 - 160.0).abs() < 1e-12);
        assert!(b.omegas.iter().all(|w| *w > 0.0));
        assert!(DiscreteBath::build(0, &b.system).is_err());
        assert!(DiscreteBath::build_with_span(10, &b.system, 4.0).is_err());
    }

    #[test]
    fn uncoupled_chain() {
        let b = chain(200, 0.0, 10.0);
        let m = b.normal_modes().unwrap();
        assert_eq!(m.len(), 201);
        let mut expect: Vec<f64> = b.omegas.clone();
        expect.push(1.0);
        expect.sort_by(f64::total_cmp);
        for (a, e) in m.frequencies.iter().zip(&expect) {
            assert!((a - e).abs() < 1e-12);
        }
        let mom = b.exact_moments(0.7).unwrap();
        assert!((mom.q2 - coth_half(1.0, 0.7) / 2.0).abs() < 1e-14);
        assert!((mom.p2 - coth_half(1.0, 0.7) / 2.0).abs() < 1e-14);
        let f = b.exact_total_free_energy(0.7).unwrap();
        assert!((f.difference - free_energy_kernel(1.0, 0.7)).abs() < 1e-12);
    }

    #[test]
    fn secular_roots_match_dense_eigensolve() {
        for (gamma, cutoff) in [(1.0, 10.0), (0.05, 5.0), (3.0, 2.0)] {
            let b = chain(300, gamma, cutoff);
            let s = b.normal_modes().unwrap();
            let d = b.normal_modes_dense().unwrap();
            assert_eq!(s.len(), d.len());
            for k in 0..s.len() {
                assert!((s.frequencies[k] - d.frequencies[k]).abs() < 1e-10 * s.frequencies[k].max(1.0), "mode {k}");
                assert!((s.system_weights[k] - d.system_weights[k]).abs() < 1e-10);
            }
            let total: f64 = s.system_weights.iter().sum();
            assert!((total - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn two_oscillator_closed_form() {
        let b = chain(1, 2.0, 3.0);
        let m = b.normal_modes().unwrap();
        let exact = b.two_oscillator_frequencies().unwrap();
        assert!((m.frequencies[0] - exact[0]).abs() < 1e-12);
        assert!((m.frequencies[1] - exact[1]).abs() < 1e-12);
        assert!(chain(2, 2.0, 3.0).two_oscillator_frequencies().is_err());
    }

    #[test]
    fn trace_identity_and_interlacing() {
        let b = chain(500, 1.5, 10.0);
        let m = b.normal_modes().unwrap();
        let lhs: f64 = m.frequencies.iter().map(|w| w * w).sum();
        let rhs = b.omegas.iter().map(|w| w * w).sum::<f64>() + 1.0 + 2.0 * b.counter_term();
        assert!((lhs - rhs).abs() < 1e-10 * rhs);
        for k in 0..b.n {
            let below = if k == 0 { 0.0 } else { b.omegas[k - 1] };
            assert!(m.frequencies[k] > below && m.frequencies[k] < b.omegas[k]);
        }
        assert!(m.frequencies[b.n] > b.omegas[b.n - 1]);
    }

    #[test]
    fn counter_term_converges() {
        let p = BathParams::natural(1.0, 10.0).unwrap();
        let a = DiscreteBath::build(2000, &p).unwrap().counter_term();
        let b = DiscreteBath::build(4000, &p).unwrap().counter_term();
        assert!((a - b).abs() < 0.01 * b);
        // Riemann sum of (1/pi) int_0^{16 Gamma} J / omega.
        let exact = p.gamma * p.cutoff / PI * (16.0f64).atan();
        assert!((b - exact).abs() < 0.01 * exact);
    }

    #[test]
    fn moments_converge_to_continuum() {
        let p = BathParams::natural(1.0, 10.0).unwrap();
        let quad = QuadratureSpec::default();
        let cont = equilibrium_moments(0.5, &p, &quad).unwrap();
        let small = DiscreteBath::build(1000, &p).unwrap().exact_moments(0.5).unwrap();
        let big = DiscreteBath::build(2000, &p).unwrap().exact_moments(0.5).unwrap();
        assert!((big.q2 - cont.q2).abs() < 0.005 * cont.q2);
        assert!((big.p2 - cont.p2).abs() < 0.005 * cont.p2);
        assert!((big.q2 - cont.q2).abs() <= (small.q2 - cont.q2).abs() + 1e-12);
    }

    #[test]
    fn weak_coupling_mode_shifts() {
        let p = BathParams::natural(0.2, 10.0).unwrap();
        let b = DiscreteBath::build(4000, &p).unwrap();
        let m = b.normal_modes().unwrap();
        let mut checked = 0;
        for k in 0..b.n {
            let w = b.omegas[k];
            if !(0.5..=20.0).contains(&w) {
                continue;
            }
            let predicted = -b.delta / PI * phase(m.frequencies[k], &p);
            assert!(
                (m.shifts[k] - predicted).abs() < 0.1 * predicted.abs().max(1e-3 * b.delta),
                "omega = {w}: {} vs {predicted}",
                m.shifts[k]
            );
            checked += 1;
        }
        assert!(checked > 100);
    }

    #[test]
    fn grid_convergence_orders() {
        let p = BathParams::natural(2.43, 10.0).unwrap();
        let cont = equilibrium_moments(0.0, &p, &QuadratureSpec::default()).unwrap().q2;
        let err = |n: usize, grid: FrequencyGrid| {
            let b = DiscreteBath::build_with(n, &p, DEFAULT_SPAN, grid).unwrap();
            b.exact_moments(0.0).unwrap().q2 - cont
        };
        // Halving Delta halves the endpoint error.
        let ratio = err(500, FrequencyGrid::Endpoint) / err(1000, FrequencyGrid::Endpoint);
        assert!((ratio - 2.0).abs() < 0.2, "{ratio}");
        let mid = err(1000, FrequencyGrid::Midpoint).abs();
        assert!(mid < 0.2 * err(1000, FrequencyGrid::Endpoint).abs());
        let a = DiscreteBath::build(1000, &p).unwrap().exact_moments(0.0).unwrap().q2;
        let b = DiscreteBath::build(2000, &p).unwrap().exact_moments(0.0).unwrap().q2;
        assert!((a - b).abs() < 0.003 * b);
    }

    #[test]
    fn free_energy_decomposition() {
        let p = BathParams::natural(1.0, 10.0).unwrap();
        let f = free_energy(1.0, &p, &QuadratureSpec::default()).unwrap();
        let d = DiscreteBath::build(2000, &p).unwrap().exact_total_free_energy(1.0).unwrap();
        assert!((d.difference - f).abs() < 0.01 * f.abs(), "{} vs {f}", d.difference);
        assert!((d.total - d.bath - d.difference).abs() < 1e-8 * d.total.abs());
    }
}
