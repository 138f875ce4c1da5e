//! Centered finite differences.

use crate::error::Result;

/// `(f(x + h) - f(x - h)) / 2h`.
pub fn centered<F>(mut f: F, x: f64, h: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    Ok((f(x + h)? - f(x - h)?) / (2.0 * h))
}

/// One Richardson step on top of [`centered`]: `(4 D(h/2) - D(h)) / 3`.
/// Returns the extrapolated value and the size of the correction, which
/// is a usable error estimate.
pub fn centered_richardson<F>(mut f: F, x: f64, h: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let coarse = centered(&mut f, x, h)?;
    let fine = centered(&mut f, x, 0.5 * h)?;
    let extrapolated = (4.0 * fine - coarse) / 3.0;
    Ok((extrapolated, (extrapolated - fine).abs()))
}
