//! Bracketing scalar root finder.

use crate::error::{Error, Result};

/// Brent's method on `[a, b]`. `f` may fail; its errors are propagated.
/// Requires `f(a)` and `f(b)` to have opposite signs (or one to vanish).
pub fn brent<F>(mut f: F, mut a: f64, mut b: f64, x_tol: f64, max_iter: usize) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut fa = f(a)?;
    let mut fb = f(b)?;
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::RootFinding(format!("no sign change on [{a}, {b}]: f = {fa}, {fb}")));
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..max_iter {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * x_tol;
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b)?;
    }
    Err(Error::RootFinding(format!("Brent did not converge in {max_iter} iterations (last x = {b})")))
}

/// Expands `[lo, hi]` geometrically (both ends positive) until `f` changes
/// sign, then runs [`brent`].
pub fn brent_expanding<F>(mut f: F, mut lo: f64, mut hi: f64, x_tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut flo = f(lo)?;
    let mut fhi = f(hi)?;
    let mut tries = 0;
    while flo.signum() == fhi.signum() && flo != 0.0 && fhi != 0.0 {
        tries += 1;
        if tries > 60 {
            return Err(Error::RootFinding(format!("could not bracket a root starting from [{lo}, {hi}]")));
        }
        if flo.abs() < fhi.abs() {
            lo *= 0.5;
            flo = f(lo)?;
        } else {
            hi *= 2.0;
            fhi = f(hi)?;
        }
    }
    brent(f, lo, hi, x_tol, 200)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_cos_fixed_point() {
        let x = brent(|x| Ok(x.cos() - x), 0.0, 1.0, 1e-15, 100).unwrap();
        assert!((x - 0.739_085_133_215_160_6).abs() < 1e-14);
    }

    #[test]
    fn rejects_missing_bracket() {
        assert!(brent(|x| Ok(x * x + 1.0), -1.0, 1.0, 1e-12, 100).is_err());
    }

    #[test]
    fn expanding_bracket() {
        let x = brent_expanding(|x| Ok(x.ln() - 3.0), 1.0, 2.0, 1e-13).unwrap();
        assert!((x - 3f64.exp()).abs() < 1e-11);
    }

    #[test]
    fn propagates_errors() {
        let r = brent(|_| Err(Error::Domain("boom".into())), 0.0, 1.0, 1e-12, 10);
        assert!(matches!(r, Err(Error::Domain(_))));
    }
}
