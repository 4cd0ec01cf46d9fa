//! Systematic-error sensitivity `q_s = -dP2/d(p0^2)` at `p0 = 0`, from the
//! perturbative integral and from exact dynamics.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::csv::CsvTable;
use crate::designer::Protocol;
use crate::dynamics::{propagate, EvolveOptions};
use crate::error::{ensure_positive, Error, Result};
use crate::quadrature::integrate;
use crate::schedules::{build_theta_cubic, AngleSet, Schedule};
use crate::spinor::Spinor;

pub const DEFAULT_TOL: f64 = 1e-10;

/// `q_s` at a root found by [`find_nu_zero`] must not exceed this.
pub const ZERO_THRESHOLD: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensitivityResult {
    /// `J = int_0^{t_f} e^{-i gamma} (-i sin(beta) - cos(theta) cos(beta)) dt`
    pub j: Complex64,
    /// `e^{i pi nu} J`; equal to `J` outside the optimal family.
    pub k: Complex64,
    pub qs: f64,
}

impl SensitivityResult {
    fn new(j: Complex64, nu: f64, c: f64, hbar: f64) -> Self {
        let k = j * Complex64::from_polar(1.0, PI * nu);
        SensitivityResult { j, k, qs: (c / hbar).powi(2) * j.norm_sqr() }
    }
}

fn check_units(t_f: f64, c: f64, hbar: f64, tol: f64) -> Result<()> {
    ensure_positive("t_f", t_f)?;
    ensure_positive("c", c)?;
    ensure_positive("hbar", hbar)?;
    ensure_positive("tol", tol)
}

/// Sensitivity of the optimal family with parameter `nu`, using the reduced
/// integrand `e^{-i nu (2 theta - sin 2 theta)} (-i - 4 nu s^3 cos theta) / sqrt(1 + 16 nu^2 s^6)`.
pub fn qs_optimal(nu: f64, t_f: f64, c: f64, hbar: f64, tol: f64) -> Result<SensitivityResult> {
    check_units(t_f, c, hbar, tol)?;
    let theta = build_theta_cubic(t_f)?;
    let integrand = |t: f64| {
        let th = theta.value(t);
        let (s, co) = th.sin_cos();
        let s3 = s * s * s;
        let phase = Complex64::from_polar(1.0, -nu * (2.0 * th - (2.0 * th).sin()));
        phase * Complex64::new(-4.0 * nu * s3 * co, -1.0) / (1.0 + 16.0 * nu * nu * s3 * s3).sqrt()
    };
    let q = integrate(integrand, 0.0, t_f, tol)?;
    Ok(SensitivityResult::new(q.value, nu, c, hbar))
}

/// Sensitivity for arbitrary auxiliary angles. `K` is reported with `nu = 0`.
pub fn qs_general(angles: &AngleSet, t_f: f64, c: f64, hbar: f64, tol: f64) -> Result<SensitivityResult> {
    check_units(t_f, c, hbar, tol)?;
    if (angles.t_f - t_f).abs() > 1e-12 * t_f {
        return Err(Error::invalid("t_f", format!("angles span {} but t_f = {t_f}", angles.t_f)));
    }
    let integrand = |t: f64| {
        let (sb, cb) = angles.beta.value(t).sin_cos();
        let ct = angles.theta.value(t).cos();
        Complex64::from_polar(1.0, -angles.gamma.value(t)) * Complex64::new(-ct * cb, -sb)
    };
    let q = integrate(integrand, 0.0, t_f, tol)?;
    if !q.value.re.is_finite() || !q.value.im.is_finite() {
        return Err(Error::Accuracy { tol, achieved: f64::INFINITY });
    }
    Ok(SensitivityResult::new(q.value, 0.0, c, hbar))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NuScanRow {
    pub nu: f64,
    pub qs: f64,
    pub im_k: f64,
}

/// `q_s(nu)` on a uniform grid, ordered by `nu`.
#[derive(Debug, Clone, PartialEq)]
pub struct NuScan {
    pub rows: Vec<NuScanRow>,
    /// Largest `|Re K| / t_f` seen over the scan.
    pub max_re_k: f64,
}

impl NuScan {
    pub fn to_csv(&self) -> CsvTable {
        let mut t = CsvTable::new(&["nu", "qs", "imK"]);
        for r in &self.rows {
            t.push(vec![r.nu, r.qs, r.im_k]);
        }
        t
    }

    /// Brackets `(nu_k, nu_{k+1})` over which `Im K` changes sign.
    pub fn sign_changes(&self) -> Vec<(f64, f64)> {
        self.rows
            .windows(2)
            .filter(|w| w[0].im_k == 0.0 || w[0].im_k.signum() != w[1].im_k.signum())
            .map(|w| (w[0].nu, w[1].nu))
            .collect()
    }
}

pub fn scan_nu(nu_min: f64, nu_max: f64, steps: usize, t_f: f64, c: f64, hbar: f64, tol: f64) -> Result<NuScan> {
    if !(nu_min < nu_max) {
        return Err(Error::invalid("nu_min", "must be below nu_max"));
    }
    if steps < 2 {
        return Err(Error::invalid("steps", "need at least 2 grid points"));
    }
    let results: Vec<Result<(f64, SensitivityResult)>> = (0..steps)
        .into_par_iter()
        .map(|k| {
            let nu = if k == steps - 1 { nu_max } else { nu_min + (nu_max - nu_min) * k as f64 / (steps - 1) as f64 };
            qs_optimal(nu, t_f, c, hbar, tol).map(|r| (nu, r))
        })
        .collect();
    let mut rows = Vec::with_capacity(steps);
    let mut max_re_k: f64 = 0.0;
    for r in results {
        let (nu, res) = r?;
        max_re_k = max_re_k.max(res.k.re.abs() / t_f);
        rows.push(NuScanRow { nu, qs: res.qs, im_k: res.k.im });
    }
    Ok(NuScan { rows, max_re_k })
}

/// Zero of `q_s` for the optimal family inside `[lo, hi]`, by bisection on
/// `Im K`, which crosses zero transversally where `q_s` only touches it.
/// Works in units `c = hbar = t_f = 1`; the root does not depend on them.
pub fn find_nu_zero(lo: f64, hi: f64, tol: f64) -> Result<f64> {
    ensure_positive("tol", tol)?;
    if !(lo < hi) {
        return Err(Error::invalid("bracket", "lower end must be below upper end"));
    }
    let quad_tol = 1e-13;
    let im_k = |nu: f64| qs_optimal(nu, 1.0, 1.0, 1.0, quad_tol).map(|r| (r.k.im, r.qs));
    let (mut a, mut b) = (lo, hi);
    let (mut fa, _) = im_k(a)?;
    let (fb, _) = im_k(b)?;
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::Bracketing { lo, hi, f_lo: fa, f_hi: fb });
    }
    let mut mid = 0.5 * (a + b);
    let mut qs_mid = f64::INFINITY;
    // Keep halving past `tol` until q_s itself is below the threshold.
    for _ in 0..200 {
        mid = 0.5 * (a + b);
        let (fm, q) = im_k(mid)?;
        qs_mid = q;
        if fm == 0.0 || (b - a <= 2.0 * tol && qs_mid <= ZERO_THRESHOLD) {
            break;
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
        if b - a <= f64::EPSILON * mid.abs().max(1.0) {
            break;
        }
    }
    if qs_mid > ZERO_THRESHOLD {
        return Err(Error::SymmetryViolation { nu: mid, qs: qs_mid, threshold: ZERO_THRESHOLD });
    }
    Ok(mid)
}

/// Integration settings for [`qs_from_dynamics`]; tight, since the second
/// difference divides integration error by `dp^2`.
pub fn curvature_options() -> EvolveOptions {
    EvolveOptions { rtol: 1e-12, atol: 1e-14, samples: 2 }
}

/// `P2(t_f)` for a plane wave with momentum offset `p0` started in `|1>`.
pub fn final_p2(protocol: &Protocol, p0: f64, opts: &EvolveOptions) -> Result<f64> {
    Ok(propagate(protocol, p0, Spinor::up(), 0.0, protocol.t_f(), opts)?.populations().1)
}

/// `-[P2(dp) - 2 P2(0) + P2(-dp)] / (2 dp^2)`: the central second difference
/// estimates `d^2 P2 / dp0^2 = -2 q_s`.
pub fn qs_from_dynamics(protocol: &Protocol, dp: f64) -> Result<f64> {
    ensure_positive("dp", dp)?;
    let opts = curvature_options();
    let p: Vec<Result<f64>> = [-dp, 0.0, dp].par_iter().map(|&p0| final_p2(protocol, p0, &opts)).collect();
    let (pm, p0, pp) = (p[0].clone()?, p[1].clone()?, p[2].clone()?);
    Ok(-(pp - 2.0 * p0 + pm) / (2.0 * dp * dp))
}
