//! Globally adaptive Gauss-Kronrod (7, 15) quadrature for complex integrands.
//!
//! Real and imaginary parts carry separate error estimates; refinement
//! continues until both are below the requested absolute tolerance.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;

use crate::error::{Error, Result};

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

#[allow(clippy::excessive_precision)]
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

// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7].
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: Complex64,
    /// Error estimates for the real and imaginary parts.
    pub error_re: f64,
    pub error_im: f64,
    pub evaluations: usize,
}

impl Quadrature {
    pub fn error(&self) -> f64 {
        self.error_re.max(self.error_im)
    }
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: Complex64,
    err_re: f64,
    err_im: f64,
}

impl Segment {
    fn key(&self) -> f64 {
        self.err_re.max(self.err_im)
    }
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.key() == other.key()
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
        self.key().total_cmp(&other.key())
    }
}

fn gk15<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (j, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = half * x;
        let sum = f(center - dx) + f(center + dx);
        kronrod += sum * w;
        if j % 2 == 1 {
            gauss += sum * WG[j / 2];
        }
    }
    let diff = (kronrod - gauss) * half;
    let value = kronrod * half;
    // Floor the estimate at rounding level of the segment value.
    let floor = |v: f64| 50.0 * f64::EPSILON * v.abs();
    Segment {
        a,
        b,
        value,
        err_re: diff.re.abs().max(floor(value.re)),
        err_im: diff.im.abs().max(floor(value.im)),
    }
}

/// Integrate `f` over `[a, b]` to absolute tolerance `tol` on both the real
/// and imaginary parts.
pub fn integrate<F>(f: F, a: f64, b: f64, tol: f64) -> Result<Quadrature>
where
    F: Fn(f64) -> Complex64,
{
    integrate_with_limit(f, a, b, tol, 4096)
}

pub fn integrate_with_limit<F>(f: F, a: f64, b: f64, tol: f64, max_segments: usize) -> Result<Quadrature>
where
    F: Fn(f64) -> Complex64,
{
    if !(tol > 0.0) {
        return Err(Error::invalid("tol", format!("must be positive, got {tol}")));
    }
    if a == b {
        return Ok(Quadrature { value: Complex64::new(0.0, 0.0), error_re: 0.0, error_im: 0.0, evaluations: 0 });
    }
    let mut heap = BinaryHeap::new();
    let first = gk15(&f, a, b);
    let mut total = first.value;
    let mut err_re = first.err_re;
    let mut err_im = first.err_im;
    heap.push(first);
    let mut evaluations = 15;

    while err_re > tol || err_im > tol {
        if heap.len() >= max_segments {
            return Err(Error::Accuracy { tol, achieved: err_re.max(err_im) });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a.min(worst.b) || mid >= worst.a.max(worst.b) {
            return Err(Error::Accuracy { tol, achieved: err_re.max(err_im) });
        }
        let left = gk15(&f, worst.a, mid);
        let right = gk15(&f, mid, worst.b);
        evaluations += 30;
        total += left.value + right.value - worst.value;
        err_re += left.err_re + right.err_re - worst.err_re;
        err_im += left.err_im + right.err_im - worst.err_im;
        heap.push(left);
        heap.push(right);
    }

    // Re-sum from the segments to shed accumulated update rounding.
    let mut value = Complex64::new(0.0, 0.0);
    let (mut er, mut ei) = (0.0, 0.0);
    let mut segments = heap.into_vec();
    segments.sort_by(|x, y| x.a.total_cmp(&y.a));
    for s in &segments {
        value += s.value;
        er += s.err_re;
        ei += s.err_im;
    }
    Ok(Quadrature { value, error_re: er, error_im: ei, evaluations })
}

/// Real-valued convenience wrapper.
pub fn integrate_real<F>(f: F, a: f64, b: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    integrate(|t| Complex64::new(f(t), 0.0), a, b, tol).map(|q| q.value.re)
}
