//! Drive protocols `(Omega(t), Delta(t))` and their instantaneous eigenstructure.
//!
//! The quantum-optics symbols map onto the Dirac ones as `m c^2 = hbar Delta / 2`
//! and `alpha_t = hbar Omega / 2`.

use std::f64::consts::{FRAC_PI_4, PI};
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{ensure_positive, Error, Result};
use crate::quadrature::integrate_real;
use crate::schedules::{
    build_beta_quartic, build_theta_cubic, AngleSet, IntegratedPhase, PolynomialSchedule, Schedule,
};
use crate::spinor::{RealHamiltonian, Spinor};

/// Default mid-time value of the simple-protocol `beta_s`.
pub const SIMPLE_BETA_MID: f64 = 2.0 * PI / 17.0;

/// Default `beta_s'(0)` of the simple protocol, in units of `1/t_f`.
pub const SIMPLE_EDGE_SLOPE: f64 = -15.0 * PI / 17.0;

/// Smallest `|nu|` nullifying the sensitivity of the optimal family.
pub const OPTIMAL_NU: f64 = 0.643;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProtocolKind {
    Optimal,
    Simple,
    PiPulse,
    /// No drive at all (`Omega = Delta = 0`): free massless transport.
    ZeroDrive,
}

impl ProtocolKind {
    pub fn name(&self) -> &'static str {
        match self {
            ProtocolKind::Optimal => "optimal",
            ProtocolKind::Simple => "simple",
            ProtocolKind::PiPulse => "pi",
            ProtocolKind::ZeroDrive => "zero",
        }
    }
}

impl fmt::Display for ProtocolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for ProtocolKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "optimal" => Ok(ProtocolKind::Optimal),
            "simple" => Ok(ProtocolKind::Simple),
            "pi" | "pi_pulse" | "pi-pulse" => Ok(ProtocolKind::PiPulse),
            "zero" => Ok(ProtocolKind::ZeroDrive),
            other => Err(Error::invalid("kind", format!("unknown protocol kind `{other}`"))),
        }
    }
}

/// Angles of the simple family. `theta` is the cubic and `beta` the quartic;
/// the first is antisymmetric about `t_f/2` (`theta(t_f - t) = pi - theta(t)`)
/// and the second symmetric, so every quantity is evaluated on the half closer
/// to an endpoint. That keeps `sin(theta)` and `cos(beta)` accurate as they
/// vanish at `t_f`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimpleDrive {
    theta: PolynomialSchedule,
    beta: PolynomialSchedule,
    t_f: f64,
}

#[derive(Debug, Clone, Copy)]
struct LocalAngles {
    sin_th: f64,
    cos_th: f64,
    th_dot: f64,
    th_ddot: f64,
    /// `beta - pi/2`
    beta_shift: f64,
    beta_dot: f64,
    /// distance to the nearest endpoint
    edge_distance: f64,
}

impl SimpleDrive {
    fn local(&self, t: f64) -> LocalAngles {
        let mirrored = t > 0.5 * self.t_f;
        let u = if mirrored { self.t_f - t } else { t };
        let th = self.theta.value(u);
        let (sin_th, cos_th) = th.sin_cos();
        // beta_s(0) = pi/2 is a boundary condition of the family, so the
        // constant term is dropped rather than carrying its solve rounding.
        let c = self.beta.coefficients();
        let beta_shift = u * c[1..].iter().rev().fold(0.0, |acc, &x| acc * u + x);
        let sign = if mirrored { -1.0 } else { 1.0 };
        LocalAngles {
            sin_th,
            cos_th: sign * cos_th,
            th_dot: self.theta.derivative(u),
            th_ddot: sign * self.theta.second_derivative(u),
            beta_shift,
            beta_dot: sign * self.beta.derivative(u),
            edge_distance: u,
        }
    }

    fn at_edge(&self, l: &LocalAngles) -> bool {
        l.edge_distance <= 1e-12 * self.t_f || l.sin_th == 0.0
    }

    pub fn theta(&self) -> &PolynomialSchedule {
        &self.theta
    }

    pub fn beta(&self) -> &PolynomialSchedule {
        &self.beta
    }

    pub fn omega(&self, t: f64) -> f64 {
        let l = self.local(t);
        l.th_dot / l.beta_shift.cos()
    }

    pub fn omega_dot(&self, t: f64) -> f64 {
        let l = self.local(t);
        let sin_b = l.beta_shift.cos();
        let cos_b = -l.beta_shift.sin();
        l.th_ddot / sin_b - l.th_dot * cos_b * l.beta_dot / (sin_b * sin_b)
    }

    /// `theta' cos(beta) / (sin(theta) sin(beta))`; at the endpoints the
    /// leading-order series gives `-2 beta'(edge)` (t = 0) and `+2 beta'(edge)`
    /// (t = t_f), i.e. `-2 beta'(0)` in both cases by symmetry.
    pub fn gamma_rate(&self, t: f64) -> f64 {
        let l = self.local(t);
        if self.at_edge(&l) {
            let mirrored = t > 0.5 * self.t_f;
            let b0 = if mirrored { -l.beta_dot } else { l.beta_dot };
            return -2.0 * b0;
        }
        let sin_b = l.beta_shift.cos();
        let cos_b = -l.beta_shift.sin();
        l.th_dot * cos_b / (l.sin_th * sin_b)
    }

    /// `Omega cot(theta) cos(beta) - beta'`; the endpoint limit is `-3 beta'(edge)`.
    pub fn delta(&self, t: f64) -> f64 {
        let l = self.local(t);
        if self.at_edge(&l) {
            return -3.0 * l.beta_dot;
        }
        let sin_b = l.beta_shift.cos();
        let cos_b = -l.beta_shift.sin();
        l.th_dot * l.cos_th * cos_b / (l.sin_th * sin_b) - l.beta_dot
    }
}

#[derive(Debug, Clone)]
enum Drive {
    Optimal { theta: PolynomialSchedule, nu: f64 },
    Simple(SimpleDrive),
    PiPulse,
    Zero,
}

/// A physical drive plus its provenance.
#[derive(Debug, Clone)]
pub struct Protocol {
    kind: ProtocolKind,
    nu: Option<f64>,
    t_f: f64,
    c: f64,
    hbar: f64,
    drive: Drive,
}

fn check_units(t_f: f64, c: f64, hbar: f64) -> Result<()> {
    ensure_positive("t_f", t_f)?;
    ensure_positive("c", c)?;
    ensure_positive("hbar", hbar)
}

/// Optimal robust protocol from the ansatz `gamma = nu [2 theta - sin 2 theta]`.
pub fn design_optimal(nu: f64, t_f: f64, c: f64, hbar: f64) -> Result<Protocol> {
    check_units(t_f, c, hbar)?;
    if !nu.is_finite() {
        return Err(Error::invalid("nu", "must be finite"));
    }
    Ok(Protocol {
        kind: ProtocolKind::Optimal,
        nu: Some(nu),
        t_f,
        c,
        hbar,
        drive: Drive::Optimal { theta: build_theta_cubic(t_f)?, nu },
    })
}

/// Simple comparison protocol with the same cubic `theta` and a quartic `beta_s`.
/// `edge_slope` is `beta_s'(0)` in absolute units (rad/time).
pub fn design_simple(t_f: f64, beta_mid: f64, edge_slope: f64, c: f64, hbar: f64) -> Result<Protocol> {
    check_units(t_f, c, hbar)?;
    let theta = build_theta_cubic(t_f)?;
    let beta = build_beta_quartic(t_f, beta_mid, edge_slope)?;
    // sin(beta_s) must not vanish inside (0, t_f)
    let n = 4000;
    let mut prev_sign = 0.0;
    for k in 0..=n {
        let s = beta.value(t_f * k as f64 / n as f64).sin();
        if s.abs() < 1e-12 || (prev_sign != 0.0 && s.signum() != prev_sign) {
            return Err(Error::DegenerateSchedule(format!(
                "sin(beta_s) vanishes near t = {}",
                t_f * k as f64 / n as f64
            )));
        }
        prev_sign = s.signum();
    }
    Ok(Protocol {
        kind: ProtocolKind::Simple,
        nu: None,
        t_f,
        c,
        hbar,
        drive: Drive::Simple(SimpleDrive { theta, beta, t_f }),
    })
}

/// Simple protocol with the default `beta_s(t_f/2) = 2 pi / 17` and
/// `beta_s'(0) = -15 pi / (17 t_f)`.
pub fn design_simple_default(t_f: f64, c: f64, hbar: f64) -> Result<Protocol> {
    design_simple(t_f, SIMPLE_BETA_MID, SIMPLE_EDGE_SLOPE / t_f, c, hbar)
}

/// Flat resonant pi pulse: `Omega = pi / t_f`, `Delta = 0`.
pub fn design_pi_pulse(t_f: f64, c: f64, hbar: f64) -> Result<Protocol> {
    check_units(t_f, c, hbar)?;
    Ok(Protocol { kind: ProtocolKind::PiPulse, nu: None, t_f, c, hbar, drive: Drive::PiPulse })
}

/// No drive: `Omega = Delta = 0` over `[0, t_f]`.
pub fn design_zero_drive(t_f: f64, c: f64, hbar: f64) -> Result<Protocol> {
    check_units(t_f, c, hbar)?;
    Ok(Protocol { kind: ProtocolKind::ZeroDrive, nu: None, t_f, c, hbar, drive: Drive::Zero })
}

impl Protocol {
    pub fn kind(&self) -> ProtocolKind {
        self.kind
    }

    pub fn nu(&self) -> Option<f64> {
        self.nu
    }

    pub fn t_f(&self) -> f64 {
        self.t_f
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    /// Rabi frequency `Omega(t)`.
    pub fn omega(&self, t: f64) -> f64 {
        match &self.drive {
            Drive::Optimal { theta, nu } => {
                let s = theta.value(t).sin();
                let s6 = s.powi(6);
                theta.derivative(t) * (1.0 + 16.0 * nu * nu * s6).sqrt()
            }
            Drive::Simple(d) => d.omega(t),
            Drive::PiPulse => PI / self.t_f,
            Drive::Zero => 0.0,
        }
    }

    /// Detuning `Delta(t)`.
    pub fn delta(&self, t: f64) -> f64 {
        match &self.drive {
            Drive::Optimal { theta, nu } => {
                let (s, c) = theta.value(t).sin_cos();
                let s6 = s.powi(6);
                16.0 * nu * s * s * c * theta.derivative(t) * (1.0 + 4.0 * nu * nu * s6)
                    / (1.0 + 16.0 * nu * nu * s6)
            }
            Drive::Simple(d) => d.delta(t),
            Drive::PiPulse | Drive::Zero => 0.0,
        }
    }

    /// Analytic time derivative of `Omega`.
    pub fn omega_dot(&self, t: f64) -> f64 {
        match &self.drive {
            Drive::Optimal { theta, nu } => {
                let (s, c) = theta.value(t).sin_cos();
                let root = (1.0 + 16.0 * nu * nu * s.powi(6)).sqrt();
                let th_dot = theta.derivative(t);
                theta.second_derivative(t) * root + th_dot * th_dot * 48.0 * nu * nu * s.powi(5) * c / root
            }
            Drive::Simple(d) => d.omega_dot(t),
            Drive::PiPulse | Drive::Zero => 0.0,
        }
    }

    /// Simulated rest energy `m c^2 = hbar Delta / 2`.
    pub fn mass_energy(&self, t: f64) -> f64 {
        0.5 * self.hbar * self.delta(t)
    }

    /// Simulated vector potential `alpha_t = hbar Omega / 2`.
    pub fn alpha(&self, t: f64) -> f64 {
        0.5 * self.hbar * self.omega(t)
    }

    pub fn alpha_dot(&self, t: f64) -> f64 {
        0.5 * self.hbar * self.omega_dot(t)
    }

    /// `H_{p0}(t) = (c p0 + alpha_t) sigma_x + m c^2 sigma_z`.
    pub fn hamiltonian(&self, t: f64, p0: f64) -> RealHamiltonian {
        RealHamiltonian { hx: self.c * p0 + self.alpha(t), hz: self.mass_energy(t) }
    }

    /// Pulse area `int_0^t_f Omega dt`.
    pub fn pulse_area(&self) -> Result<f64> {
        integrate_real(|t| self.omega(t), 0.0, self.t_f, 1e-12)
    }

    /// Design angles `(theta, beta, gamma)`; `None` for the undriven protocol.
    /// For the simple family `gamma` is the quadrature of its rate.
    pub fn angles(&self) -> Result<Option<AngleSet>> {
        Ok(match &self.drive {
            Drive::Optimal { nu, .. } => Some(AngleSet::optimal(*nu, self.t_f)?),
            Drive::PiPulse => Some(AngleSet::pi_pulse(self.t_f)?),
            Drive::Simple(d) => {
                let rate_src = d.clone();
                let gamma = IntegratedPhase::new(Arc::new(move |t| rate_src.gamma_rate(t)), self.t_f, 1e-14)?;
                Some(AngleSet::new(Arc::new(d.theta.clone()), Arc::new(d.beta.clone()), Arc::new(gamma), self.t_f))
            }
            Drive::Zero => None,
        })
    }

    pub fn simple_drive(&self) -> Option<&SimpleDrive> {
        match &self.drive {
            Drive::Simple(d) => Some(d),
            _ => None,
        }
    }

    /// `key=value` provenance strings for output headers.
    pub fn describe(&self) -> Vec<String> {
        let mut v = vec![
            format!("kind={}", self.kind),
            format!("t_f={}", self.t_f),
            format!("c={}", self.c),
            format!("hbar={}", self.hbar),
        ];
        if let Some(nu) = self.nu {
            v.push(format!("nu={nu}"));
        }
        if let Drive::Simple(d) = &self.drive {
            v.push(format!("beta_mid={}", d.beta.value(0.5 * self.t_f)));
            v.push(format!("edge_slope={}", d.beta.derivative(0.0)));
        }
        v
    }
}

/// Orthonormal pair of two-component states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinorBasisPair {
    pub plus: Spinor,
    pub minus: Spinor,
}

/// Eigenstates of the invariant `I_0(theta, beta)`.
pub fn invariant_eigenstates(theta: f64, beta: f64) -> SpinorBasisPair {
    let (s, c) = (0.5 * theta).sin_cos();
    let up = Complex64::from_polar(1.0, 0.5 * beta);
    let down = Complex64::from_polar(1.0, -0.5 * beta);
    SpinorBasisPair {
        plus: Spinor::new(up * c, down * s),
        minus: Spinor::new(up * s, -down * c),
    }
}

/// Norm of `[H_0(t), I_0(t)]` for unit-magnitude invariant `I_0 ~ n(theta, beta) . sigma`.
pub fn invariant_commutator_norm(protocol: &Protocol, angles: &AngleSet, t: f64) -> f64 {
    let th = angles.theta.value(t);
    let b = angles.beta.value(t);
    let n = [th.sin() * b.cos(), -th.sin() * b.sin(), th.cos()];
    let h = [0.5 * protocol.hbar * protocol.omega(t), 0.0, 0.5 * protocol.hbar * protocol.delta(t)];
    let cross = [
        h[1] * n[2] - h[2] * n[1],
        h[2] * n[0] - h[0] * n[2],
        h[0] * n[1] - h[1] * n[0],
    ];
    2.0 * cross.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Instantaneous eigenstructure of `H_0(t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdiabaticSpectrum {
    pub e_plus: f64,
    pub e_minus: f64,
    pub states: SpinorBasisPair,
    /// `Omega = Delta = 0`: the states are the limit along the path from the
    /// nearest interior instant rather than eigenvectors of the (zero) matrix.
    pub degenerate: bool,
}

fn adiabatic_states(omega: f64, delta: f64) -> SpinorBasisPair {
    // mixing angle measured from the sigma_z axis so (cos, sin) is the +E eigenvector
    let phi = omega.atan2(delta);
    let (s, c) = (0.5 * phi).sin_cos();
    SpinorBasisPair {
        plus: Spinor::new(Complex64::new(c, 0.0), Complex64::new(s, 0.0)),
        minus: Spinor::new(Complex64::new(s, 0.0), Complex64::new(-c, 0.0)),
    }
}

pub fn adiabatic_spectrum(protocol: &Protocol, t: f64) -> AdiabaticSpectrum {
    let omega = protocol.omega(t);
    let delta = protocol.delta(t);
    let r = omega.hypot(delta);
    let e = 0.5 * protocol.hbar * r;
    let degenerate = r <= 1e-14 / protocol.t_f;
    let states = if degenerate {
        let step = 1e-6 * protocol.t_f;
        let probe = if t + step <= protocol.t_f { t + step } else { t - step };
        adiabatic_states(protocol.omega(probe), protocol.delta(probe))
    } else {
        adiabatic_states(omega, delta)
    };
    AdiabaticSpectrum { e_plus: e, e_minus: -e, states, degenerate }
}

/// `|phi_+(0)> = e^{i pi/4} |1>` for `beta(0) = pi/2`.
pub fn initial_invariant_phase() -> Complex64 {
    Complex64::from_polar(1.0, FRAC_PI_4)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_PI_2;

    fn dense_max(f: impl Fn(f64) -> f64, t_f: f64, n: usize) -> f64 {
        (0..=n).map(|k| f(t_f * k as f64 / n as f64).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn optimal_edges_and_peaks() {
        let p = design_optimal(0.643, 1.0, 1.0, 1.0).unwrap();
        assert_eq!(p.omega(0.0), 0.0);
        assert_eq!(p.delta(0.0), 0.0);
        assert_abs_diff_eq!(p.omega(1.0), 0.0, epsilon = 1e-10);
        let closed = 1.5 * PI * (1.0 + 16.0 * 0.643f64 * 0.643).sqrt();
        assert_abs_diff_eq!(p.omega(0.5), closed, epsilon = 1e-12);
        assert_abs_diff_eq!(dense_max(|t| p.omega(t), 1.0, 20000), closed, epsilon = 1e-6);
        assert!((closed - 13.0).abs() < 0.5);
        let dmax = dense_max(|t| p.delta(t), 1.0, 20000);
        assert!((dmax - 10.0).abs() < 0.5, "max |Delta| = {dmax}");
    }

    #[test]
    fn optimal_time_symmetry() {
        let p = design_optimal(0.643, 1.0, 1.0, 1.0).unwrap();
        for k in 0..=50 {
            let t = k as f64 / 50.0;
            assert_abs_diff_eq!(p.omega(t), p.omega(1.0 - t), epsilon = 1e-10);
            assert_abs_diff_eq!(p.delta(t), -p.delta(1.0 - t), epsilon = 1e-10);
        }
    }

    #[test]
    fn simple_examples() {
        let p = design_simple_default(1.0, 1.0, 1.0).unwrap();
        assert_abs_diff_eq!(p.omega(0.5), 1.5 * PI / (2.0 * PI / 17.0).sin(), epsilon = 1e-12);
        assert_abs_diff_eq!(p.omega(0.5), 13.05, epsilon = 0.01);
        assert_eq!(p.omega(0.0), 0.0);
        assert_abs_diff_eq!(p.delta(0.0), 45.0 * PI / 17.0, epsilon = 1e-12);
        assert_abs_diff_eq!(p.delta(1.0), -45.0 * PI / 17.0, epsilon = 1e-12);
    }

    #[test]
    fn simple_edge_limit_matches_richardson() {
        let p = design_simple_default(1.0, 1.0, 1.0).unwrap();
        let h = 1e-4;
        // Delta(t) = Delta(0) + a t + O(t^2): Richardson with h and h/2
        let d1 = p.delta(h);
        let d2 = p.delta(0.5 * h);
        let extrapolated = 2.0 * d2 - d1;
        assert_abs_diff_eq!(extrapolated, 45.0 * PI / 17.0, epsilon = 1e-6);
        assert_abs_diff_eq!(p.delta(1.0 - 1e-9), -45.0 * PI / 17.0, epsilon = 1e-6);
    }

    #[test]
    fn degenerate_beta_is_rejected() {
        // beta_mid = 0 forces sin(beta_s) = 0 at the midpoint
        let r = design_simple(1.0, 0.0, -15.0 * PI / 17.0, 1.0, 1.0);
        assert!(matches!(r, Err(Error::DegenerateSchedule(_))));
    }

    #[test]
    fn pi_pulse_examples() {
        let p = design_pi_pulse(1.0, 1.0, 1.0).unwrap();
        assert_eq!(p.omega(0.2), PI);
        assert_eq!(p.delta(0.37), 0.0);
        let p2 = design_pi_pulse(2.0, 1.0, 1.0).unwrap();
        assert_abs_diff_eq!(p2.pulse_area().unwrap(), PI, epsilon = 1e-13);
        assert!(design_pi_pulse(0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn optimal_pulse_area_is_smaller() {
        let a = design_optimal(0.643, 1.0, 1.0, 1.0).unwrap().pulse_area().unwrap();
        let b = design_simple_default(1.0, 1.0, 1.0).unwrap().pulse_area().unwrap();
        // measured: 5.1073 vs 5.9320
        assert!(a < b, "optimal area {a} should be smaller than simple {b}");
        assert!((a - 5.1073).abs() < 1e-3 && (b - 5.9320).abs() < 1e-3, "areas {a} vs {b}");
    }

    #[test]
    fn auxiliary_equations_hold_for_designed_families() {
        for p in [design_optimal(0.643, 1.0, 1.0, 1.0).unwrap(), design_simple_default(1.0, 1.0, 1.0).unwrap()] {
            let a = p.angles().unwrap().unwrap();
            for k in 1..200 {
                let t = k as f64 / 200.0;
                let th = a.theta.value(t);
                let b = a.beta.value(t);
                let om = p.omega(t);
                let r1 = a.theta.derivative(t) - om * b.sin();
                let r2 = a.beta.derivative(t) - (om * b.cos() / th.tan() - p.delta(t));
                let scale = 1.0 + om.abs();
                assert!(r1.abs() / scale < 1e-8, "{:?} t={t} r1={r1}", p.kind());
                assert!(r2.abs() / scale < 1e-8, "{:?} t={t} r2={r2}", p.kind());
            }
        }
    }

    #[test]
    fn omega_dot_matches_finite_differences() {
        for p in [design_optimal(0.643, 1.0, 1.0, 1.0).unwrap(), design_simple_default(1.0, 1.0, 1.0).unwrap()] {
            for k in 1..100 {
                let t = k as f64 / 100.0;
                let h = 1e-6;
                let fd = (p.omega(t + h) - p.omega(t - h)) / (2.0 * h);
                assert!((fd - p.omega_dot(t)).abs() < 1e-6 * (1.0 + fd.abs()), "t={t}");
            }
        }
    }

    #[test]
    fn invariant_eigenstate_examples() {
        let e0 = invariant_eigenstates(0.0, FRAC_PI_2);
        assert!(e0.plus.distance(&Spinor::up().scale(Complex64::from_polar(1.0, FRAC_PI_4))) < 1e-15);
        let ef = invariant_eigenstates(PI, FRAC_PI_2);
        assert!(ef.plus.distance(&Spinor::down().scale(Complex64::from_polar(1.0, -FRAC_PI_4))) < 1e-15);
        for &(th, b) in &[(0.3, 1.1), (2.0, -0.4), (PI, 0.0)] {
            let e = invariant_eigenstates(th, b);
            assert!(e.plus.inner(&e.minus).norm() < 1e-15);
            assert_abs_diff_eq!(e.plus.norm(), 1.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn invariant_and_hamiltonian_commute_at_edges() {
        let p = design_optimal(0.643, 1.0, 1.0, 1.0).unwrap();
        let a = p.angles().unwrap().unwrap();
        assert!(invariant_commutator_norm(&p, &a, 0.0) < 1e-10);
        assert!(invariant_commutator_norm(&p, &a, 1.0) < 1e-10);
        assert!(invariant_commutator_norm(&p, &a, 0.5) > 1.0);
    }

    #[test]
    fn adiabatic_spectrum_examples() {
        let p = design_optimal(0.643, 1.0, 1.0, 1.0).unwrap();
        let s0 = adiabatic_spectrum(&p, 0.0);
        assert!(s0.degenerate);
        assert_eq!(s0.e_plus, 0.0);
        assert_eq!(s0.e_minus, 0.0);

        let st = adiabatic_states(3.0, 4.0);
        assert_abs_diff_eq!(0.5 * 1.0 * 3f64.hypot(4.0), 2.5);
        // eigenvector check for Omega = 3, Delta = 4
        let h = RealHamiltonian { hx: 1.5, hz: 2.0 };
        let hv = h.apply(&st.plus);
        assert!(hv.distance(&(st.plus * 2.5)) < 1e-14);

        let pi = design_pi_pulse(1.0, 1.0, 1.0).unwrap();
        let s = adiabatic_spectrum(&pi, 0.3);
        assert_abs_diff_eq!(s.states.plus.overlap(&Spinor::up()), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(s.e_plus, 0.5 * PI, epsilon = 1e-15);
        assert!(s.states.plus.inner(&s.states.minus).norm() < 1e-15);
    }

    #[test]
    fn kind_round_trips_through_text() {
        for k in [ProtocolKind::Optimal, ProtocolKind::Simple, ProtocolKind::PiPulse, ProtocolKind::ZeroDrive] {
            assert_eq!(k.name().parse::<ProtocolKind>().unwrap(), k);
        }
        assert!("bogus".parse::<ProtocolKind>().is_err());
    }
}
