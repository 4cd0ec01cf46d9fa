//! Trapped-ion realization: Lamb-Dicke parameter, zero-point size and the
//! carrier/sideband Rabi frequencies that reproduce a designed protocol.
//!
//! Identifications: `m c^2 = hbar Omega_c`, `c = 2 eta Lambda Omega~_1`,
//! `g = hbar eta Omega~_2 / Lambda = alpha_dot / c`.

use crate::csv::CsvTable;
use crate::designer::Protocol;
use crate::dynamics::uniform_times;
use crate::error::{ensure_positive, Error, Result};
use crate::quadrature::integrate_real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IonParameters {
    /// Driving-field wave number (1/length).
    pub k: f64,
    /// Ion mass.
    pub mass: f64,
    /// Centre-of-mass mode frequency (rad/time).
    pub nu0: f64,
    pub hbar: f64,
    /// Lamb-Dicke parameter `k sqrt(hbar / 2 M nu0)`.
    pub eta: f64,
    /// Zero-point size `sqrt(hbar / 4 M nu0)`.
    pub lambda: f64,
}

pub fn derive_ion_parameters(k: f64, mass: f64, nu0: f64, hbar: f64) -> Result<IonParameters> {
    if !(k >= 0.0) || !k.is_finite() {
        return Err(Error::invalid("k", format!("must be finite and non-negative, got {k}")));
    }
    ensure_positive("M", mass)?;
    ensure_positive("nu0", nu0)?;
    ensure_positive("hbar", hbar)?;
    Ok(IonParameters {
        k,
        mass,
        nu0,
        hbar,
        eta: k * (hbar / (2.0 * mass * nu0)).sqrt(),
        lambda: (hbar / (4.0 * mass * nu0)).sqrt(),
    })
}

/// Laser phases are not fixed by the mapping; they are carried as metadata.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LaserPhases {
    pub carrier: f64,
    pub red: f64,
    pub blue: f64,
}

/// Laboratory schedules for one designed protocol.
#[derive(Debug, Clone)]
pub struct LabSchedule {
    protocol: Protocol,
    pub ion: IonParameters,
    /// Constant bichromatic sideband Rabi frequency `c / (2 eta Lambda)`.
    pub omega_tilde_1: f64,
    /// `Omega(0)`, needed to rebuild `Omega` from its derivative.
    pub omega_start: f64,
    pub phases: LaserPhases,
}

pub fn map_protocol(protocol: &Protocol, ion: &IonParameters) -> Result<LabSchedule> {
    if ion.eta == 0.0 || ion.lambda == 0.0 {
        return Err(Error::DegenerateGeometry(format!("eta = {}, Lambda = {}", ion.eta, ion.lambda)));
    }
    if (ion.hbar - protocol.hbar()).abs() > 1e-12 * ion.hbar {
        return Err(Error::invalid("hbar", format!("ion uses {} but the protocol uses {}", ion.hbar, protocol.hbar())));
    }
    Ok(LabSchedule {
        protocol: protocol.clone(),
        ion: *ion,
        omega_tilde_1: protocol.c() / (2.0 * ion.eta * ion.lambda),
        omega_start: protocol.omega(0.0),
        phases: LaserPhases::default(),
    })
}

impl LabSchedule {
    pub fn t_f(&self) -> f64 {
        self.protocol.t_f()
    }

    /// Carrier Rabi frequency `Delta / 2`.
    pub fn omega_c(&self, t: f64) -> f64 {
        0.5 * self.protocol.delta(t)
    }

    /// Coupling slope `g = hbar Omega_dot / (2 c)`.
    pub fn g(&self, t: f64) -> f64 {
        self.protocol.hbar() * self.protocol.omega_dot(t) / (2.0 * self.protocol.c())
    }

    /// Second-ion drive `Lambda Omega_dot / (2 c eta)`.
    pub fn omega_tilde_2(&self, t: f64) -> f64 {
        self.ion.lambda * self.protocol.omega_dot(t) / (2.0 * self.protocol.c() * self.ion.eta)
    }

    /// Speed of light recovered from the lab parameters, `2 eta Lambda Omega~_1`.
    pub fn c(&self) -> f64 {
        2.0 * self.ion.eta * self.ion.lambda * self.omega_tilde_1
    }

    /// `(Omega(t), Delta(t))` rebuilt from lab quantities only: `Delta = 2 Omega_c`
    /// and `Omega` from `Omega(0)` plus the integral of `2 c eta Omega~_2 / Lambda`.
    pub fn reconstruct(&self, t: f64) -> Result<(f64, f64)> {
        let c = self.c();
        let scale = 2.0 * c * self.ion.eta / self.ion.lambda;
        let omega = if t == 0.0 {
            self.omega_start
        } else {
            let rate = |s: f64| scale * self.omega_tilde_2(s);
            // Tolerance relative to the total variation, which bounds the roundoff floor.
            let variation = integrate_real(|s| rate(s).abs(), 0.0, t, 1e-6)?;
            self.omega_start + integrate_real(rate, 0.0, t, 1e-13 * (1.0 + variation))?
        };
        Ok((omega, 2.0 * self.omega_c(t)))
    }

    /// `t,omega_c,omega_tilde_2` on a uniform grid, with scalar header lines.
    pub fn to_csv(&self, samples: usize) -> CsvTable {
        let mut table = CsvTable::new(&["t", "omega_c", "omega_tilde_2"])
            .comments(self.protocol.describe())
            .comment(format!("k={}", self.ion.k))
            .comment(format!("M={}", self.ion.mass))
            .comment(format!("nu0={}", self.ion.nu0))
            .comment(format!("eta={}", self.ion.eta))
            .comment(format!("Lambda={}", self.ion.lambda))
            .comment(format!("omega_tilde_1={}", self.omega_tilde_1))
            .comment(format!("phi_c={}", self.phases.carrier))
            .comment(format!("phi_r={}", self.phases.red))
            .comment(format!("phi_b={}", self.phases.blue));
        for t in uniform_times(self.t_f(), samples.max(2)) {
            table.push(vec![t, self.omega_c(t), self.omega_tilde_2(t)]);
        }
        table
    }
}
