//! Heat per bit of reduced-state entropy for quasi-static changes of the
//! oscillator frequency, compared with `T ln 2`.

use std::f64::consts::LN_2;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bath::BathParams;
use crate::error::{Error, Result};
use crate::fluctuations::equilibrium_moments;
use crate::gaussian_state::von_neumann_entropy_derivative;
use crate::numerics::QuadratureSpec;
use crate::thermo::{entropy, tight};

pub const DEFAULT_DELTA: f64 = 1e-3;
/// Below this `|dS_v|` the ratio is undefined.
pub const DEGENERATE_DS_V: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LandauerPoint {
    pub temperature: f64,
    /// `|T dS / (dS_v / ln 2)|`, energy per bit.
    pub ratio: f64,
    /// `T ln 2`.
    pub bound: f64,
    pub below_bound: bool,
    pub ratio_over_bound: f64,
    /// `ratio / omega0`.
    pub ratio_per_omega0: f64,
    /// Centered differences for the step `delta * omega0`.
    pub d_entropy: f64,
    pub d_von_neumann: f64,
}

fn purity_at(t: f64, p: &BathParams, quad: &QuadratureSpec) -> Result<f64> {
    let m = equilibrium_moments(t, p, quad)?;
    Ok(0.5 / (m.q2 * m.p2).sqrt())
}

pub fn landauer_ratio(t: f64, p: &BathParams, delta: f64, quad: &QuadratureSpec) -> Result<LandauerPoint> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Domain(format!("Landauer ratio needs a finite T > 0, got {t}")));
    }
    if !(delta > 0.0 && delta < 0.5) {
        return Err(Error::InvalidParameter(format!("relative step must be in (0, 0.5), got {delta}")));
    }
    let q = tight(quad);
    let h = delta * p.omega0;
    let up = p.with_omega0(p.omega0 + h)?;
    let down = p.with_omega0(p.omega0 - h)?;
    let d_entropy = 0.5 * (entropy(t, &up, &q)? - entropy(t, &down, &q)?);
    let mu = purity_at(t, p, &q)?;
    let d_mu = 0.5 * (purity_at(t, &up, &q)? - purity_at(t, &down, &q)?);
    let d_von_neumann = von_neumann_entropy_derivative(mu) * d_mu;
    if !(d_von_neumann.abs() >= DEGENERATE_DS_V) {
        return Err(Error::DegenerateVariation(format!(
            "von Neumann entropy change {d_von_neumann:e} at T = {t} is too small to define a ratio"
        )));
    }
    let ratio = (t * d_entropy * LN_2 / d_von_neumann).abs();
    let bound = t * LN_2;
    Ok(LandauerPoint {
        temperature: t,
        ratio,
        bound,
        below_bound: ratio < bound,
        ratio_over_bound: ratio / bound,
        ratio_per_omega0: ratio / p.omega0,
        d_entropy,
        d_von_neumann,
    })
}

/// Pointwise ratios over an ascending temperature grid, evaluated in
/// parallel and returned in grid order. A failing point does not stop the
/// sweep.
pub fn landauer_sweep(
    temperatures: &[f64],
    p: &BathParams,
    delta: f64,
    quad: &QuadratureSpec,
) -> Result<Vec<Result<LandauerPoint>>> {
    if temperatures.is_empty() {
        return Err(Error::InvalidParameter("empty temperature grid".into()));
    }
    if temperatures.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
        return Err(Error::InvalidParameter("temperatures must be finite and positive".into()));
    }
    if temperatures.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidParameter("temperature grid must be ascending".into()));
    }
    Ok(temperatures.par_iter().map(|t| landauer_ratio(*t, p, delta, quad)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn at(t: f64, gamma: f64, cutoff: f64) -> LandauerPoint {
        let p = BathParams::natural(gamma, cutoff).unwrap();
        landauer_ratio(t, &p, DEFAULT_DELTA, &QuadratureSpec::default()).unwrap()
    }

    #[test]
    fn weak_coupling_recovers_bound() {
        let pt = at(1.0, 1e-5, 10.0);
        assert!((pt.ratio_over_bound - 1.0).abs() < 1e-3, "{}", pt.ratio_over_bound);
        assert_eq!(pt.bound, LN_2);
    }

    #[test]
    fn low_temperature_lies_below_bound() {
        assert!(at(0.05, 0.5, 10.0).below_bound);
        assert!(at(0.1, 0.1, 10.0).below_bound);
    }

    #[test]
    fn quadratic_onset() {
        let p = BathParams::natural(0.5, 100.0).unwrap();
        let pts: Vec<f64> = [0.01, 0.02, 0.03]
            .iter()
            .map(|t| landauer_ratio(*t, &p, DEFAULT_DELTA, &QuadratureSpec::default()).unwrap().ratio / (t * t))
            .collect();
        let max = pts.iter().cloned().fold(f64::MIN, f64::max);
        let min = pts.iter().cloned().fold(f64::MAX, f64::min);
        assert!(max / min < 1.2, "{pts:?}");
    }

    #[test]
    fn high_temperature_approaches_bound() {
        for gamma in [0.1, 0.5] {
            let pt = at(5.0, gamma, 10.0);
            assert!((pt.ratio_over_bound - 1.0).abs() < 0.02, "gamma = {gamma}: {}", pt.ratio_over_bound);
        }
    }

    #[test]
    fn coupling_ordering_changes_with_temperature() {
        // Deep in the quantum regime the weaker coupling sits further below
        // the bound; above T ~ 0.2 the order reverses.
        assert!(at(0.05, 0.1, 10.0).ratio < at(0.05, 0.5, 10.0).ratio);
        assert!(at(0.5, 0.1, 10.0).ratio > at(0.5, 0.5, 10.0).ratio);
    }

    #[test]
    fn entropies_move_together() {
        for t in [0.02, 0.3, 2.0] {
            let pt = at(t, 0.5, 10.0);
            assert!(pt.d_entropy < 0.0 && pt.d_von_neumann < 0.0);
        }
    }

    #[test]
    fn step_robustness() {
        let p = BathParams::natural(0.5, 10.0).unwrap();
        let q = QuadratureSpec::default();
        let a = landauer_ratio(0.3, &p, 1e-3, &q).unwrap().ratio;
        let b = landauer_ratio(0.3, &p, 5e-4, &q).unwrap().ratio;
        assert!((a - b).abs() < 1e-4 * a);
    }

    #[test]
    fn weak_coupling_limit_is_monotone() {
        let gaps: Vec<f64> =
            [1e-2, 1e-3, 1e-4].iter().map(|g| (at(0.5, *g, 10.0).ratio_over_bound - 1.0).abs()).collect();
        assert!(gaps[0] > gaps[1] && gaps[1] > gaps[2], "{gaps:?}");
    }

    #[test]
    fn sweep_preserves_order_and_rejects_bad_grids() {
        let p = BathParams::natural(0.5, 10.0).unwrap();
        let q = QuadratureSpec::default();
        let grid = [0.05, 0.1, 0.5, 1.0];
        let out = landauer_sweep(&grid, &p, DEFAULT_DELTA, &q).unwrap();
        assert_eq!(out.len(), grid.len());
        for (pt, t) in out.iter().zip(grid) {
            assert_eq!(pt.as_ref().unwrap().temperature, t);
        }
        assert!(landauer_sweep(&[1.0, 0.5], &p, DEFAULT_DELTA, &q).is_err());
        assert!(landauer_sweep(&[], &p, DEFAULT_DELTA, &q).is_err());
        assert!(landauer_ratio(0.0, &p, DEFAULT_DELTA, &q).is_err());
    }
}
