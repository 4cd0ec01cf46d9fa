//! Plane-wave dynamics under `H_{p0}(t) = (c p0 + alpha_t) sigma_x + m c^2 sigma_z`,
//! momentum scans and Gaussian wave-packet averages.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::csv::CsvTable;
use crate::designer::{adiabatic_spectrum, invariant_eigenstates, Protocol};
use crate::error::{ensure_positive, Error, Result};
use crate::ode::{Dopri5, OdeStats};
use crate::schedules::AngleSet;
use crate::spinor::Spinor;

/// Integration settings for plane-wave evolution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolveOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Number of uniformly spaced output instants over `[0, t_f]`.
    pub samples: usize,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        EvolveOptions { rtol: 1e-10, atol: 1e-12, samples: 201 }
    }
}

impl EvolveOptions {
    pub fn with_tol(tol: f64) -> Self {
        EvolveOptions { rtol: tol, atol: tol * 1e-2, ..Self::default() }
    }

    pub fn samples(mut self, n: usize) -> Self {
        self.samples = n;
        self
    }

    fn solver(&self) -> Dopri5 {
        Dopri5::with_tolerance(self.rtol, self.atol)
    }
}

/// `n` uniform instants covering `[0, t_f]` inclusive.
pub fn uniform_times(t_f: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![t_f],
        _ => (0..n).map(|k| if k == n - 1 { t_f } else { t_f * k as f64 / (n - 1) as f64 }).collect(),
    }
}

/// Time history of one momentum component.
#[derive(Debug, Clone)]
pub struct SpinorTrajectory {
    pub p0: f64,
    pub times: Vec<f64>,
    pub states: Vec<Spinor>,
    pub stats: OdeStats,
}

impl SpinorTrajectory {
    pub fn final_state(&self) -> Spinor {
        *self.states.last().expect("trajectories hold at least one state")
    }

    /// `|<2|phi(t_f)>|^2`.
    pub fn final_p2(&self) -> f64 {
        self.final_state().populations().1
    }

    pub fn norm_drift(&self) -> f64 {
        let n0 = self.states[0].norm_sqr();
        self.states.iter().map(|s| (s.norm_sqr() - n0).abs()).fold(0.0, f64::max)
    }

    pub fn populations(&self) -> PopulationSeries {
        let (p1, p2) = self.states.iter().map(|s| s.populations()).unzip();
        PopulationSeries { times: self.times.clone(), p1, p2 }
    }
}

fn schrodinger_rhs(protocol: &Protocol, p0: f64) -> impl Fn(f64, &Spinor) -> Spinor + '_ {
    let minus_i_over_hbar = Complex64::new(0.0, -1.0 / protocol.hbar());
    move |t, y| {
        let h = protocol.hamiltonian(t, p0);
        let hy = h.apply(y);
        hy.scale(minus_i_over_hbar)
    }
}

/// Integrate `i hbar d/dt phi = H_{p0} phi` over `[0, t_f]`, reporting the state
/// on a uniform grid of `opts.samples` instants.
pub fn evolve_spinor(protocol: &Protocol, p0: f64, initial: Spinor, opts: &EvolveOptions) -> Result<SpinorTrajectory> {
    let times = uniform_times(protocol.t_f(), opts.samples.max(2));
    evolve_spinor_at(protocol, p0, initial, opts, &times)
}

/// As [`evolve_spinor`] with explicit output instants inside `[0, t_f]`.
pub fn evolve_spinor_at(
    protocol: &Protocol,
    p0: f64,
    initial: Spinor,
    opts: &EvolveOptions,
    times: &[f64],
) -> Result<SpinorTrajectory> {
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("times", "sample instants must be strictly increasing"));
    }
    let sol = opts.solver().integrate(schrodinger_rhs(protocol, p0), 0.0, initial, protocol.t_f(), times)?;
    Ok(SpinorTrajectory { p0, times: times.to_vec(), states: sol.samples, stats: sol.stats })
}

/// Evolve `state` from `t_start` to `t_end` (either direction) and return the end state.
pub fn propagate(protocol: &Protocol, p0: f64, state: Spinor, t_start: f64, t_end: f64, opts: &EvolveOptions) -> Result<Spinor> {
    Ok(opts.solver().integrate(schrodinger_rhs(protocol, p0), t_start, state, t_end, &[])?.last)
}

/// Outcome of checking the dressed invariant eigenstate against direct integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LrCheck {
    /// `max_t || psi(t) - e^{-i gamma/2} phi_+(t) ||`
    pub max_deviation: f64,
    /// `max_t |arg <phi_+|psi> + gamma/2|`, wrapped to `(-pi, pi]`
    pub max_phase_error: f64,
}

/// `e^{-i gamma(t)/2} |phi_+(t)>`.
pub fn lr_state(angles: &AngleSet, t: f64) -> Spinor {
    let phi = invariant_eigenstates(angles.theta.value(t), angles.beta.value(t)).plus;
    phi.scale(Complex64::from_polar(1.0, -0.5 * angles.gamma.value(t)))
}

fn wrap_phase(x: f64) -> f64 {
    let tau = std::f64::consts::TAU;
    let y = x.rem_euclid(tau);
    if y > std::f64::consts::PI {
        y - tau
    } else {
        y
    }
}

/// Integrate from the dressed invariant eigenstate at `t = 0` and compare with
/// the closed form along the whole interval.
pub fn verify_lr_solution(protocol: &Protocol, angles: &AngleSet, opts: &EvolveOptions) -> Result<LrCheck> {
    let start = lr_state(angles, 0.0);
    let traj = evolve_spinor(protocol, 0.0, start, opts)?;
    let mut check = LrCheck { max_deviation: 0.0, max_phase_error: 0.0 };
    for (&t, psi) in traj.times.iter().zip(&traj.states) {
        let expected = lr_state(angles, t);
        check.max_deviation = check.max_deviation.max(psi.distance(&expected));
        let phi = invariant_eigenstates(angles.theta.value(t), angles.beta.value(t)).plus;
        let phase = phi.inner(psi).arg();
        let err = wrap_phase(phase + 0.5 * angles.gamma.value(t)).abs();
        check.max_phase_error = check.max_phase_error.max(err);
    }
    Ok(check)
}

/// One row of a momentum scan. Failed integrations keep their error.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanRow {
    pub p0: f64,
    pub p2_final: std::result::Result<f64, Error>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentumScan {
    pub rows: Vec<ScanRow>,
}

impl MomentumScan {
    pub fn values(&self) -> Result<Vec<(f64, f64)>> {
        self.rows.iter().map(|r| r.p2_final.clone().map(|v| (r.p0, v))).collect()
    }

    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| r.p2_final.is_err()).count()
    }

    /// `p0,p2_final`; failed rows are written as NaN.
    pub fn to_csv(&self) -> CsvTable {
        let mut t = CsvTable::new(&["p0", "p2_final"]);
        for r in &self.rows {
            t.push(vec![r.p0, r.p2_final.clone().unwrap_or(f64::NAN)]);
        }
        t
    }
}

/// Final excited-state probability for every `p0`, starting from `|1>`.
/// Rows are computed in parallel and returned in grid order.
pub fn momentum_scan(protocol: &Protocol, p_grid: &[f64], opts: &EvolveOptions) -> MomentumScan {
    let rows = p_grid
        .par_iter()
        .map(|&p0| {
            let r = propagate(protocol, p0, Spinor::up(), 0.0, protocol.t_f(), opts).map(|s| s.populations().1);
            ScanRow { p0, p2_final: r }
        })
        .collect();
    MomentumScan { rows }
}

/// `n` points uniformly spanning `[-p_max, p_max]`.
pub fn symmetric_grid(p_max: f64, n: usize) -> Vec<f64> {
    let n = n.max(2);
    (0..n)
        .map(|k| {
            // Integer offsets keep the grid exactly antisymmetric.
            let j = 2 * k as i64 - (n - 1) as i64;
            p_max * j as f64 / (n - 1) as f64
        })
        .collect()
}

/// Momentum grid with trapezoid weights for `|a(p0)|^2 ~ exp(-p0^2 / sigma^2)`,
/// renormalized to sum exactly to one on the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumEnsemble {
    pub p_values: Vec<f64>,
    pub weights: Vec<f64>,
    pub sigma: f64,
}

/// Upper bound on the weight outside `|p| > half_width` for the density
/// `exp(-p^2/sigma^2) / (sqrt(pi) sigma)`, i.e. `erfc(x) < exp(-x^2) / (x sqrt(pi))`.
pub fn gaussian_tail_bound(half_width: f64, sigma: f64) -> f64 {
    let x = half_width / sigma;
    if x <= 0.0 {
        return 1.0;
    }
    ((-x * x).exp() / (x * std::f64::consts::PI.sqrt())).min(1.0)
}

impl MomentumEnsemble {
    pub const MAX_TAIL: f64 = 1e-10;

    pub fn gaussian(sigma: f64, half_width: f64, points: usize) -> Result<Self> {
        ensure_positive("sigma", sigma)?;
        ensure_positive("half_width", half_width)?;
        if points < 3 {
            return Err(Error::invalid("points", "need at least 3 grid points"));
        }
        let tail = gaussian_tail_bound(half_width, sigma);
        if tail > Self::MAX_TAIL {
            return Err(Error::Coverage(format!(
                "grid +/-{half_width} leaves weight up to {tail:e} outside for sigma = {sigma}"
            )));
        }
        let p_values = symmetric_grid(half_width, points);
        let n = p_values.len();
        let mut weights: Vec<f64> = p_values
            .iter()
            .enumerate()
            .map(|(k, p)| {
                let end = if k == 0 || k == n - 1 { 0.5 } else { 1.0 };
                end * (-(p * p) / (sigma * sigma)).exp()
            })
            .collect();
        let total: f64 = weights.iter().sum();
        for w in &mut weights {
            *w /= total;
        }
        Ok(MomentumEnsemble { p_values, weights, sigma })
    }
}

/// Bare-level populations over time.
#[derive(Debug, Clone, PartialEq)]
pub struct PopulationSeries {
    pub times: Vec<f64>,
    pub p1: Vec<f64>,
    pub p2: Vec<f64>,
}

impl PopulationSeries {
    pub fn final_p2(&self) -> f64 {
        *self.p2.last().expect("series is non-empty")
    }

    pub fn to_csv(&self) -> CsvTable {
        let mut t = CsvTable::new(&["t", "p1", "p2"]);
        for k in 0..self.times.len() {
            t.push(vec![self.times[k], self.p1[k], self.p2[k]]);
        }
        t
    }

    /// Largest pointwise deviation of either population; the time grids must match.
    pub fn max_deviation(&self, other: &PopulationSeries) -> Result<f64> {
        if self.times.len() != other.times.len() {
            return Err(Error::GridMismatch(format!("{} vs {} samples", self.times.len(), other.times.len())));
        }
        let mut worst: f64 = 0.0;
        for k in 0..self.times.len() {
            let dt = (self.times[k] - other.times[k]).abs();
            if dt > 1e-12 * (1.0 + self.times[k].abs()) {
                return Err(Error::GridMismatch(format!("sample {k}: t = {} vs {}", self.times[k], other.times[k])));
            }
            worst = worst.max((self.p1[k] - other.p1[k]).abs()).max((self.p2[k] - other.p2[k]).abs());
        }
        Ok(worst)
    }
}

/// Momentum-grid settings for wave-packet averages.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleSettings {
    /// Grid half-width in units of `sigma`.
    pub half_width_sigmas: f64,
    /// Initial number of grid points (odd keeps `p0 = 0` on the grid).
    pub points: usize,
    /// Refinement stops once successive results differ by less than this.
    pub refine_tol: f64,
    pub max_points: usize,
}

impl Default for EnsembleSettings {
    fn default() -> Self {
        EnsembleSettings { half_width_sigmas: 5.0, points: 101, refine_tol: 1e-6, max_points: 3201 }
    }
}

/// Weighted sum of per-momentum populations on a fixed ensemble.
pub fn ensemble_average(protocol: &Protocol, ensemble: &MomentumEnsemble, opts: &EvolveOptions) -> Result<PopulationSeries> {
    let times = uniform_times(protocol.t_f(), opts.samples.max(2));
    let trajectories: Vec<Result<SpinorTrajectory>> = ensemble
        .p_values
        .par_iter()
        .map(|&p| evolve_spinor_at(protocol, p, Spinor::up(), opts, &times))
        .collect();
    let mut p1 = vec![0.0; times.len()];
    let mut p2 = vec![0.0; times.len()];
    for (traj, &w) in trajectories.into_iter().zip(&ensemble.weights) {
        let traj = traj?;
        for (k, s) in traj.states.iter().enumerate() {
            let (a, b) = s.populations();
            p1[k] += w * a;
            p2[k] += w * b;
        }
    }
    Ok(PopulationSeries { times, p1, p2 })
}

/// Global populations of a Gaussian wave packet centred at zero momentum,
/// refining the momentum grid until the result settles.
pub fn gaussian_average(
    protocol: &Protocol,
    sigma: f64,
    settings: &EnsembleSettings,
    opts: &EvolveOptions,
) -> Result<PopulationSeries> {
    ensure_positive("sigma", sigma)?;
    if settings.half_width_sigmas < 5.0 {
        return Err(Error::Coverage(format!("grid must span at least +/-5 sigma, got {}", settings.half_width_sigmas)));
    }
    let half_width = settings.half_width_sigmas * sigma;
    let mut points = settings.points.max(101);
    let mut current = ensemble_average(protocol, &MomentumEnsemble::gaussian(sigma, half_width, points)?, opts)?;
    loop {
        let finer = 2 * points - 1;
        if finer > settings.max_points {
            return Ok(current);
        }
        let next = ensemble_average(protocol, &MomentumEnsemble::gaussian(sigma, half_width, finer)?, opts)?;
        let change = next.max_deviation(&current)?;
        current = next;
        points = finer;
        if change < settings.refine_tol {
            return Ok(current);
        }
    }
}

/// Instantaneous overlaps between adiabatic, invariant and bare states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdiabaticRow {
    pub t: f64,
    pub e_plus: f64,
    pub e_minus: f64,
    /// `|<E_+|phi_+>|^2`
    pub overlap_plus: f64,
    /// `|<E_-|phi_+>|^2`
    pub overlap_minus: f64,
    /// `|<1|E_+>|^2`
    pub pop1_plus: f64,
    /// `|<1|E_->|^2`
    pub pop1_minus: f64,
    pub degenerate: bool,
}

pub fn adiabatic_populations(protocol: &Protocol, angles: &AngleSet, samples: usize) -> Vec<AdiabaticRow> {
    uniform_times(protocol.t_f(), samples.max(2))
        .into_iter()
        .map(|t| {
            let levels = adiabatic_spectrum(protocol, t);
            let phi = invariant_eigenstates(angles.theta.value(t), angles.beta.value(t)).plus;
            AdiabaticRow {
                t,
                e_plus: levels.e_plus,
                e_minus: levels.e_minus,
                overlap_plus: levels.states.plus.overlap(&phi),
                overlap_minus: levels.states.minus.overlap(&phi),
                pop1_plus: levels.states.plus.overlap(&Spinor::up()),
                pop1_minus: levels.states.minus.overlap(&Spinor::up()),
                degenerate: levels.degenerate,
            }
        })
        .collect()
}
