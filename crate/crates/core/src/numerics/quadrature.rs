//! Globally adaptive Gauss–Kronrod quadrature.
//!
//! The engine keeps every panel in a max-heap keyed by its error estimate and
//! bisects the worst panel until the summed error meets
//! `max(abs_tol, rel_tol * |value|)`. Semi-infinite integrals are split at a
//! caller-chosen point `split`: the head `[0, split]` is integrated directly
//! (with optional interior breakpoints at known features of the integrand) and
//! the tail `(split, inf)` is folded onto `u in (0, 1]` via `w = split * u^-alpha`.
//! Both pieces share one heap, so refinement goes where the error is.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use thiserror::Error;

/// Tolerances and limits for the adaptive integrators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    /// Algebraic decay exponent `p` of the integrand, `|f(w)| ~ w^-p`, used to
    /// pick the tail map. Use `f64::INFINITY` for exponentially damped
    /// integrands.
    pub tail_decay_exponent: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { rel_tol: 1e-10, abs_tol: 1e-12, max_subdivisions: 4000, tail_decay_exponent: 2.0 }
    }
}

impl QuadratureSpec {
    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_abs_tol(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }

    pub fn with_tail_decay(mut self, exponent: f64) -> Self {
        self.tail_decay_exponent = exponent;
        self
    }

    pub fn validate(&self) -> Result<(), QuadratureError> {
        if !(self.rel_tol > 0.0) || !self.rel_tol.is_finite() {
            return Err(QuadratureError::InvalidSpec(format!("rel_tol must be positive, got {}", self.rel_tol)));
        }
        if !(self.abs_tol > 0.0) || !self.abs_tol.is_finite() {
            return Err(QuadratureError::InvalidSpec(format!("abs_tol must be positive, got {}", self.abs_tol)));
        }
        if self.max_subdivisions < 1 {
            return Err(QuadratureError::InvalidSpec("max_subdivisions must be at least 1".into()));
        }
        if !(self.tail_decay_exponent > 1.0) {
            return Err(QuadratureError::InvalidSpec(format!(
                "tail decay exponent must exceed 1 for an integrable tail, got {}",
                self.tail_decay_exponent
            )));
        }
        Ok(())
    }

    /// Exponent `alpha` of the tail map `w = split * u^-alpha`. With decay
    /// `w^-p` the mapped integrand behaves like `u^(alpha (p - 1) - 1)`, which
    /// is bounded at `u = 0` once `alpha >= 1 / (p - 1)`.
    fn tail_map_exponent(&self) -> f64 {
        let p = self.tail_decay_exponent;
        if p >= 2.0 {
            1.0
        } else {
            1.0 / (p - 1.0)
        }
    }
}

/// Integral value together with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub subdivisions: usize,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum QuadratureError {
    #[error("invalid quadrature spec: {0}")]
    InvalidSpec(String),
    #[error("invalid integration interval [{a}, {b}]")]
    InvalidInterval { a: f64, b: f64 },
    #[error("integrand is not finite at x = {at}")]
    NonFinite { at: f64 },
    #[error("no convergence after {subdivisions} subdivisions: estimate {value:e}, error bound {error:e}")]
    NoConvergence { value: f64, error: f64, subdivisions: usize },
}

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// One 21-point Gauss–Kronrod panel with the QUADPACK error heuristic.
fn gk21<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Result<(f64, f64), QuadratureError> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    if !fc.is_finite() {
        return Err(QuadratureError::NonFinite { at: center });
    }
    let mut resk = fc * WGK[10];
    let mut resabs = resk.abs();
    let mut resg = 0.0;
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let (x1, x2) = (center - dx, center + dx);
        let (f1, f2) = (f(x1), f(x2));
        if !f1.is_finite() {
            return Err(QuadratureError::NonFinite { at: x1 });
        }
        if !f2.is_finite() {
            return Err(QuadratureError::NonFinite { at: x2 });
        }
        fv1[j] = f1;
        fv2[j] = f2;
        resk += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
    }
    let reskh = 0.5 * resk;
    let mut resasc = WGK[10] * (fc - reskh).abs();
    for j in 0..10 {
        resasc += WGK[j] * ((fv1[j] - reskh).abs() + (fv2[j] - reskh).abs());
    }
    let result = resk * half;
    let resabs = resabs * half.abs();
    let resasc = resasc * half.abs();
    let mut err = ((resk - resg) * half).abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    Ok((result, err))
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Map {
    Identity,
    /// `w = split * u^-alpha`, `dw = alpha * split * u^(-alpha-1) du`.
    Tail {
        split: f64,
        alpha: f64,
    },
}

impl Map {
    #[inline]
    fn apply<F: FnMut(f64) -> f64>(self, f: &mut F, x: f64) -> f64 {
        match self {
            Map::Identity => f(x),
            Map::Tail { split, alpha } => {
                let w = split * x.powf(-alpha);
                if !w.is_finite() {
                    return 0.0;
                }
                let v = f(w);
                if v == 0.0 {
                    0.0
                } else {
                    // (v w) stays bounded for decaying f; dividing by x last avoids overflow.
                    v * w * alpha / x
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    map: Map,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn panel<F: FnMut(f64) -> f64>(
    f: &mut F,
    a: f64,
    b: f64,
    map: Map,
    evaluations: &mut usize,
) -> Result<Panel, QuadratureError> {
    let mut g = |x: f64| map.apply(f, x);
    let (value, error) = gk21(&mut g, a, b)?;
    *evaluations += 21;
    Ok(Panel { a, b, map, value, error })
}

fn adapt<F: FnMut(f64) -> f64>(
    f: &mut F,
    initial: &[(f64, f64, Map)],
    spec: &QuadratureSpec,
) -> Result<Estimate, QuadratureError> {
    spec.validate()?;
    let mut evaluations = 0;
    let mut heap = BinaryHeap::with_capacity(initial.len() + 2 * spec.max_subdivisions);
    for &(a, b, map) in initial {
        if b > a {
            heap.push(panel(f, a, b, map, &mut evaluations)?);
        }
    }
    let mut frozen_value = 0.0;
    let mut frozen_error = 0.0;
    let mut subdivisions = 0;

    loop {
        let (value, error) = heap.iter().fold((frozen_value, frozen_error), |(v, e), p| (v + p.value, e + p.error));
        let tol = spec.abs_tol.max(spec.rel_tol * value.abs());
        if error <= tol {
            return Ok(Estimate { value, error, subdivisions, evaluations });
        }
        if subdivisions >= spec.max_subdivisions {
            return Err(QuadratureError::NoConvergence { value, error, subdivisions });
        }
        let Some(worst) = heap.pop() else {
            return Err(QuadratureError::NoConvergence { value, error, subdivisions });
        };
        let mid = 0.5 * (worst.a + worst.b);
        let scale = worst.a.abs().max(worst.b.abs()).max(f64::MIN_POSITIVE);
        if (worst.b - worst.a) <= 64.0 * f64::EPSILON * scale || mid <= worst.a || mid >= worst.b {
            // Panel cannot be refined further in double precision.
            frozen_value += worst.value;
            frozen_error += worst.error;
            continue;
        }
        heap.push(panel(f, worst.a, mid, worst.map, &mut evaluations)?);
        heap.push(panel(f, mid, worst.b, worst.map, &mut evaluations)?);
        subdivisions += 1;
    }
}

/// Integrate `f` over the finite interval `[a, b]`.
pub fn integrate<F>(mut f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<Estimate, QuadratureError>
where
    F: FnMut(f64) -> f64,
{
    if !(a.is_finite() && b.is_finite()) || b < a {
        return Err(QuadratureError::InvalidInterval { a, b });
    }
    adapt(&mut f, &[(a, b, Map::Identity)], spec)
}

/// Integrate over `[points[0], points[last]]`, starting from the panels
/// delimited by the (ascending) `points`.
pub fn integrate_with_breakpoints<F>(
    mut f: F,
    points: &[f64],
    spec: &QuadratureSpec,
) -> Result<Estimate, QuadratureError>
where
    F: FnMut(f64) -> f64,
{
    if points.len() < 2 {
        return Err(QuadratureError::InvalidInterval { a: points.first().copied().unwrap_or(f64::NAN), b: f64::NAN });
    }
    let mut initial = Vec::with_capacity(points.len());
    for w in points.windows(2) {
        if !(w[0].is_finite() && w[1].is_finite()) || w[1] < w[0] {
            return Err(QuadratureError::InvalidInterval { a: w[0], b: w[1] });
        }
        initial.push((w[0], w[1], Map::Identity));
    }
    adapt(&mut f, &initial, spec)
}

/// Integrate `f` over `(0, inf)`.
///
/// `split` separates the directly integrated head from the mapped tail and
/// should sit well beyond every feature of `f`. `breakpoints` are optional
/// interior points of `(0, split)` (peaks, kinks, thermal scales); points
/// outside that range are ignored.
pub fn integrate_semi_infinite<F>(
    mut f: F,
    split: f64,
    breakpoints: &[f64],
    spec: &QuadratureSpec,
) -> Result<Estimate, QuadratureError>
where
    F: FnMut(f64) -> f64,
{
    if !(split > 0.0 && split.is_finite()) {
        return Err(QuadratureError::InvalidInterval { a: 0.0, b: split });
    }
    spec.validate()?;
    let mut pts: Vec<f64> = breakpoints.iter().copied().filter(|&x| x.is_finite() && x > 0.0 && x < split).collect();
    pts.sort_by(f64::total_cmp);
    pts.dedup_by(|a, b| (*a - *b).abs() <= 1e-13 * a.abs().max(b.abs()));

    let mut initial = Vec::with_capacity(pts.len() + 2);
    let mut lo = 0.0;
    for &p in &pts {
        initial.push((lo, p, Map::Identity));
        lo = p;
    }
    initial.push((lo, split, Map::Identity));
    initial.push((0.0, 1.0, Map::Tail { split, alpha: spec.tail_map_exponent() }));
    adapt(&mut f, &initial, spec)
}
