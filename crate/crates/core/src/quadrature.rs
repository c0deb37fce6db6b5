//! Adaptive integration of exponentially decaying integrands over `[0, ∞)`.
//!
//! The rate integrands all carry an `exp(-2 eta z)` factor. Substituting
//! `u = 2 eta z` maps the decay scale to one, the range is truncated at the
//! point where the `u^2 exp(-u)` envelope leaves less than `tail_threshold` of
//! the total, and `[0, U]` is integrated with globally adaptive 7/15-point
//! Gauss-Kronrod. The truncation point is then doubled until the next segment
//! contributes less than `tail_threshold` of the running total.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Lower end of the eta range, in units of `1/z`. The integrands vanish at
/// `eta = 0` (at least linearly), so the skipped sliver contributes below
/// `1e-18` of the total.
pub const LOWER_EPS: f64 = 1e-9;

/// Maximum number of times the truncation point is doubled.
const MAX_TAIL_EXTENSIONS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureSettings {
    pub rel_tol: f64,
    /// Absolute error floor in the integrand's units (0 disables it).
    pub abs_floor: f64,
    /// Maximum number of interval bisections.
    pub max_refinements: usize,
    /// Acceptable tail-to-total ratio when truncating the range.
    pub tail_threshold: f64,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        QuadratureSettings {
            rel_tol: 1e-8,
            abs_floor: 0.0,
            max_refinements: 60,
            tail_threshold: 1e-12,
        }
    }
}

impl QuadratureSettings {
    pub fn with_rel_tol(self, rel_tol: f64) -> Self {
        QuadratureSettings { rel_tol, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol.is_finite()) {
            return Err(Error::Config(format!(
                "rel_tol must be positive, got {}",
                self.rel_tol
            )));
        }
        if self.max_refinements < 1 {
            return Err(Error::Config("max_refinements must be >= 1".into()));
        }
        if !(self.tail_threshold > 0.0 && self.tail_threshold < 1.0) {
            return Err(Error::Config(format!(
                "tail_threshold must lie in (0, 1), got {}",
                self.tail_threshold
            )));
        }
        if !(self.abs_floor >= 0.0) {
            return Err(Error::Config(format!(
                "abs_floor must be >= 0, got {}",
                self.abs_floor
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct QuadratureDiagnostics {
    /// Number of integrand evaluations.
    pub evaluations: usize,
    /// Upper end of the integrated eta range, 1/m.
    pub truncation_eta: f64,
    /// Estimated relative error of the returned value.
    pub est_error: f64,
}

// Gauss-Kronrod 7/15 nodes and weights (QUADPACK qk15).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut err = err.abs();
    if res_asc != 0.0 && err != 0.0 {
        let scale = (200.0 * err / res_asc).powf(1.5);
        err = if scale < 1.0 {
            res_asc * scale
        } else {
            res_asc
        };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    err
}

fn kronrod15<F>(f: &F, a: f64, b: f64, evals: &mut usize) -> Result<Segment>
where
    F: Fn(f64) -> Result<f64>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center)?;
    let mut res_k = fc * WGK[7];
    let mut res_g = fc * WG[3];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx)?;
        let f2 = f(center + dx)?;
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    *evals += 15;
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half;
    let error = rescale_error(
        (res_k - res_g) * half,
        res_abs * half.abs(),
        res_asc * half.abs(),
    );
    if !value.is_finite() {
        return Err(Error::domain(format!(
            "integrand not finite on [{a:e}, {b:e}]"
        )));
    }
    Ok(Segment { a, b, value, error })
}

/// Globally adaptive Gauss-Kronrod on `[a, b]`. Returns `(value, abs_error)`.
fn adaptive<F>(
    f: &F,
    a: f64,
    b: f64,
    settings: &QuadratureSettings,
    evals: &mut usize,
) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    let first = kronrod15(f, a, b, evals)?;
    let mut heap = BinaryHeap::new();
    let (mut value, mut error) = (first.value, first.error);
    heap.push(first);
    let mut refinements = 0;
    while error > settings.abs_floor.max(settings.rel_tol * value.abs()) {
        if refinements >= settings.max_refinements {
            return Err(Error::NonConvergence {
                partial: value,
                rel_error: error / value.abs(),
                refinements,
            });
        }
        let worst = heap.pop().expect("heap holds at least one segment");
        let mid = 0.5 * (worst.a + worst.b);
        let left = kronrod15(f, worst.a, mid, evals)?;
        let right = kronrod15(f, mid, worst.b, evals)?;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        refinements += 1;
        if error <= 50.0 * f64::EPSILON * value.abs() {
            break;
        }
    }
    // re-sum to shed accumulated cancellation from the running updates
    let value = heap.iter().map(|s| s.value).sum();
    let error = heap.iter().map(|s| s.error).sum();
    Ok((value, error))
}

/// Smallest `U` for which `int_U^inf u^2 e^{-u} du / 2 = e^{-U}(U^2 + 2U + 2)/2`
/// drops below `threshold`.
fn envelope_cutoff(threshold: f64) -> f64 {
    let tail = |u: f64| (-u).exp() * (u * u + 2.0 * u + 2.0) / 2.0;
    let mut u = 1.0;
    while tail(u) > threshold {
        u *= 1.25;
    }
    // bisect back down between u/1.25 and u
    let (mut lo, mut hi) = (u / 1.25, u);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if tail(mid) > threshold {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// Integrate `f(eta)` over `eta in [0, ∞)`, where `f` decays at least like
/// `exp(-2 eta z)` times a power of `eta`.
pub fn integrate_semi_infinite<F>(
    f: F,
    z: f64,
    settings: &QuadratureSettings,
) -> Result<(f64, QuadratureDiagnostics)>
where
    F: Fn(f64) -> Result<f64>,
{
    integrate_semi_infinite_from(f, 0.0, z, settings)
}

/// As [`integrate_semi_infinite`], over `[max(eta_min, LOWER_EPS / z), ∞)`.
pub fn integrate_semi_infinite_from<F>(
    f: F,
    eta_min: f64,
    z: f64,
    settings: &QuadratureSettings,
) -> Result<(f64, QuadratureDiagnostics)>
where
    F: Fn(f64) -> Result<f64>,
{
    if !(z > 0.0 && z.is_finite()) {
        return Err(Error::domain(format!(
            "atom height must be positive, got {z}"
        )));
    }
    if !(eta_min >= 0.0 && eta_min.is_finite()) {
        return Err(Error::domain(format!(
            "lower bound must be finite and >= 0, got {eta_min}"
        )));
    }
    settings.validate()?;
    let scale = 1.0 / (2.0 * z);
    let g = |u: f64| f(u * scale).map(|v| v * scale);
    let mut evals = 0;

    let lower = (2.0 * eta_min * z).max(2.0 * LOWER_EPS);
    let mut upper = envelope_cutoff(settings.tail_threshold).max(2.0 * lower);
    let (mut value, mut error) = adaptive(&g, lower, upper, settings, &mut evals)?;
    for _ in 0..MAX_TAIL_EXTENSIONS {
        let tail_settings = QuadratureSettings {
            abs_floor: settings.abs_floor.max(settings.rel_tol * value.abs()),
            ..*settings
        };
        let (ext, ext_err) = adaptive(&g, upper, 2.0 * upper, &tail_settings, &mut evals)?;
        value += ext;
        error += ext_err;
        upper *= 2.0;
        if ext.abs() <= settings.tail_threshold * value.abs() || (ext == 0.0 && value == 0.0) {
            break;
        }
    }
    let est_error = if value != 0.0 {
        error / value.abs()
    } else {
        error
    };
    Ok((
        value,
        QuadratureDiagnostics {
            evaluations: evals,
            truncation_eta: upper * scale,
            est_error,
        },
    ))
}
