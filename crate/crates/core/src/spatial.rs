//! Split-step spectral evolution of full spatial wave packets, used as an
//! independent check of the plane-wave decomposition and of the frame change
//! to a linear scalar potential.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::csv::CsvTable;
use crate::designer::Protocol;
use crate::dynamics::{uniform_times, PopulationSeries};
use crate::error::{ensure_positive, Error, Result};
use crate::spinor::{RealHamiltonian, Spinor};

/// Density threshold for the outer 10% of the box (position and momentum).
pub const EDGE_THRESHOLD: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Frame {
    /// Homogeneous field as a time-dependent vector potential.
    H,
    /// Linear scalar potential `-alpha_dot x / c`.
    Hu,
}

impl fmt::Display for Frame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Frame::H => "H",
            Frame::Hu => "Hu",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameTag {
    pub frame: Frame,
    pub alpha_at_t: f64,
}

/// Periodic grid with cached FFT plans.
pub struct SpectralGrid {
    n: usize,
    length: f64,
    hbar: f64,
    momenta: Vec<f64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for SpectralGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpectralGrid").field("n", &self.n).field("length", &self.length).field("hbar", &self.hbar).finish()
    }
}

impl SpectralGrid {
    pub fn new(n: usize, length: f64, hbar: f64) -> Result<Self> {
        if n < 16 || !n.is_power_of_two() {
            return Err(Error::invalid("n_points", format!("must be a power of two >= 16, got {n}")));
        }
        ensure_positive("length", length)?;
        ensure_positive("hbar", hbar)?;
        let dk = 2.0 * PI / length;
        let momenta = (0..n)
            .map(|k| {
                let j = if k < n / 2 { k as f64 } else { k as f64 - n as f64 };
                hbar * dk * j
            })
            .collect();
        let mut planner = FftPlanner::new();
        Ok(SpectralGrid { n, length, hbar, momenta, forward: planner.plan_fft_forward(n), inverse: planner.plan_fft_inverse(n) })
    }

    pub fn n_points(&self) -> usize {
        self.n
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn dx(&self) -> f64 {
        self.length / self.n as f64
    }

    /// Grid positions, centred on zero: `x_j = -L/2 + j dx`.
    pub fn position(&self, j: usize) -> f64 {
        -0.5 * self.length + j as f64 * self.dx()
    }

    /// Momenta in FFT order.
    pub fn momenta(&self) -> &[f64] {
        &self.momenta
    }

    /// Largest representable momentum, `pi hbar / dx`.
    pub fn p_max(&self) -> f64 {
        PI * self.hbar / self.dx()
    }
}

/// Two-component wave function on a periodic grid.
#[derive(Debug, Clone)]
pub struct SpatialPacket {
    grid: Arc<SpectralGrid>,
    pub psi1: Vec<Complex64>,
    pub psi2: Vec<Complex64>,
    pub time: f64,
    pub tag: FrameTag,
}

/// Internal state `|1>` times a Gaussian whose momentum density is
/// `~ exp(-p^2 / sigma_p^2)`, centred in the box with zero mean momentum.
pub fn init_gaussian_packet(sigma_p: f64, n_points: usize, length: f64, hbar: f64) -> Result<SpatialPacket> {
    ensure_positive("sigma_p", sigma_p)?;
    let grid = SpectralGrid::new(n_points, length, hbar)?;
    if length < 20.0 * hbar / sigma_p {
        return Err(Error::Coverage(format!("box length {length} is below 20 hbar / sigma_p = {}", 20.0 * hbar / sigma_p)));
    }
    if grid.p_max() < 10.0 * sigma_p {
        return Err(Error::Coverage(format!("momentum cutoff {} is below 10 sigma_p", grid.p_max())));
    }
    let width = hbar / sigma_p;
    let mut psi1: Vec<Complex64> = (0..n_points)
        .map(|j| {
            let x = grid.position(j) / width;
            Complex64::new((-0.5 * x * x).exp(), 0.0)
        })
        .collect();
    let norm: f64 = psi1.iter().map(|z| z.norm_sqr()).sum::<f64>() * grid.dx();
    let scale = 1.0 / norm.sqrt();
    for z in &mut psi1 {
        *z *= scale;
    }
    Ok(SpatialPacket {
        grid: Arc::new(grid),
        psi1,
        psi2: vec![Complex64::new(0.0, 0.0); n_points],
        time: 0.0,
        tag: FrameTag { frame: Frame::H, alpha_at_t: 0.0 },
    })
}

impl SpatialPacket {
    pub fn grid(&self) -> &SpectralGrid {
        &self.grid
    }

    pub fn norm(&self) -> f64 {
        let (a, b) = self.populations();
        a + b
    }

    /// Bare-level populations `(P1, P2)`.
    pub fn populations(&self) -> (f64, f64) {
        let dx = self.grid.dx();
        (
            self.psi1.iter().map(|z| z.norm_sqr()).sum::<f64>() * dx,
            self.psi2.iter().map(|z| z.norm_sqr()).sum::<f64>() * dx,
        )
    }

    pub fn mean_position(&self) -> f64 {
        let dx = self.grid.dx();
        (0..self.grid.n).map(|j| self.grid.position(j) * (self.psi1[j].norm_sqr() + self.psi2[j].norm_sqr())).sum::<f64>() * dx
    }

    /// `<sigma_x> = 2 Re sum conj(psi1) psi2 dx`.
    pub fn mean_sigma_x(&self) -> f64 {
        2.0 * self.psi1.iter().zip(&self.psi2).map(|(a, b)| (a.conj() * b).re).sum::<f64>() * self.grid.dx()
    }

    /// Mean position of the `sigma_x = +1` and `sigma_x = -1` components, each
    /// normalized by its own weight.
    pub fn chirality_positions(&self) -> (f64, f64) {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let (mut wp, mut wm, mut xp, mut xm) = (0.0, 0.0, 0.0, 0.0);
        for j in 0..self.grid.n {
            let x = self.grid.position(j);
            let plus = ((self.psi1[j] + self.psi2[j]) * s).norm_sqr();
            let minus = ((self.psi1[j] - self.psi2[j]) * s).norm_sqr();
            wp += plus;
            wm += minus;
            xp += x * plus;
            xm += x * minus;
        }
        (xp / wp, xm / wm)
    }

    fn spectra(&self) -> (Vec<Complex64>, Vec<Complex64>) {
        let mut a = self.psi1.clone();
        let mut b = self.psi2.clone();
        self.grid.forward.process(&mut a);
        self.grid.forward.process(&mut b);
        (a, b)
    }

    /// Normalized momentum density in FFT order.
    pub fn momentum_density(&self) -> Vec<f64> {
        let (a, b) = self.spectra();
        let w: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x.norm_sqr() + y.norm_sqr()).collect();
        let total: f64 = w.iter().sum();
        w.into_iter().map(|v| v / total).collect()
    }

    /// `<p>` by spectral differentiation.
    pub fn mean_momentum(&self) -> f64 {
        self.momentum_density().iter().zip(self.grid.momenta()).map(|(w, p)| w * p).sum()
    }

    /// Largest weight found in the outer 10% of the box, in position or in momentum.
    pub fn edge_weight(&self) -> f64 {
        let n = self.grid.n;
        let band = n / 10;
        let dx = self.grid.dx();
        let pos: f64 = (0..band)
            .chain(n - band..n)
            .map(|j| self.psi1[j].norm_sqr() + self.psi2[j].norm_sqr())
            .sum::<f64>()
            * dx;
        let cutoff = 0.8 * self.grid.p_max();
        let mom: f64 = self
            .momentum_density()
            .iter()
            .zip(self.grid.momenta())
            .filter(|(_, p)| p.abs() >= cutoff)
            .map(|(w, _)| w)
            .sum();
        pos.max(mom)
    }

    fn check_edges(&self) -> Result<()> {
        let w = self.edge_weight();
        if w > EDGE_THRESHOLD {
            return Err(Error::Aliasing { t: self.time, amplitude: w, threshold: EDGE_THRESHOLD });
        }
        Ok(())
    }

    /// Multiply by the scalar phase `exp(i a x / (hbar c))`.
    fn kick(&mut self, a: f64, c: f64) {
        if a == 0.0 {
            return;
        }
        let k = a / (self.grid.hbar * c);
        for j in 0..self.grid.n {
            let ph = Complex64::from_polar(1.0, k * self.grid.position(j));
            self.psi1[j] *= ph;
            self.psi2[j] *= ph;
        }
    }

    /// Exact per-mode step under `(c p + shift) sigma_x + mass sigma_z`.
    fn kinetic(&mut self, c: f64, shift: f64, mass: f64, dt: f64) {
        let (mut a, mut b) = self.spectra();
        let hbar = self.grid.hbar;
        for (k, &p) in self.grid.momenta.iter().enumerate() {
            let h = RealHamiltonian { hx: c * p + shift, hz: mass };
            let s = h.propagate(&Spinor::new(a[k], b[k]), dt, hbar);
            a[k] = s.a1;
            b[k] = s.a2;
        }
        self.grid.inverse.process(&mut a);
        self.grid.inverse.process(&mut b);
        let inv_n = 1.0 / self.grid.n as f64;
        for k in 0..self.grid.n {
            self.psi1[k] = a[k] * inv_n;
            self.psi2[k] = b[k] * inv_n;
        }
    }

    /// Move to `frame` at the packet's current time: `Psi_u = exp(i alpha_t x / (hbar c)) Psi`.
    pub fn to_frame(&self, frame: Frame, protocol: &Protocol) -> SpatialPacket {
        let mut out = self.clone();
        let alpha = protocol.alpha(self.time);
        match (self.tag.frame, frame) {
            (Frame::H, Frame::Hu) => out.kick(alpha, protocol.c()),
            (Frame::Hu, Frame::H) => out.kick(-alpha, protocol.c()),
            _ => {}
        }
        out.tag = FrameTag { frame, alpha_at_t: alpha };
        out
    }

    /// One Strang step from `t` to `t + dt`. In the `Hu` frame the potential is
    /// applied as exact half-step phases; the `H` frame has no x dependence so
    /// the momentum-space factor is the whole step.
    pub fn step(&mut self, protocol: &Protocol, t: f64, dt: f64) {
        let c = protocol.c();
        let tm = t + 0.5 * dt;
        let (a0, am, a1) = (protocol.alpha(t), protocol.alpha(tm), protocol.alpha(t + dt));
        let mass = protocol.mass_energy(tm);
        match self.tag.frame {
            Frame::H => self.kinetic(c, am, mass, dt),
            Frame::Hu => {
                self.kick(am - a0, c);
                self.kinetic(c, 0.0, mass, dt);
                self.kick(a1 - am, c);
            }
        }
        self.time = t + dt;
        self.tag.alpha_at_t = a1;
    }
}

/// `<p>` in the `H` frame, `<p - alpha_t / c>` in the `Hu` frame.
pub fn invariant_expectation(packet: &SpatialPacket, protocol: &Protocol) -> f64 {
    let p = packet.mean_momentum();
    match packet.tag.frame {
        Frame::H => p,
        Frame::Hu => p - protocol.alpha(packet.time) / protocol.c(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpatialOptions {
    /// Upper bound on the time step; the actual step divides `t_f` evenly.
    pub dt: f64,
    pub samples: usize,
}

impl Default for SpatialOptions {
    fn default() -> Self {
        SpatialOptions { dt: 5e-4, samples: 101 }
    }
}

/// Sampled observables of one split-step evolution.
#[derive(Debug, Clone)]
pub struct SpatialRun {
    pub frame: Frame,
    pub dt: f64,
    pub times: Vec<f64>,
    pub p1: Vec<f64>,
    pub p2: Vec<f64>,
    /// Frame-appropriate momentum invariant, see [`invariant_expectation`].
    pub exp_p: Vec<f64>,
    pub norm: Vec<f64>,
    pub exp_x: Vec<f64>,
    pub exp_sigma_x: Vec<f64>,
    pub final_packet: SpatialPacket,
}

impl SpatialRun {
    pub fn populations(&self) -> PopulationSeries {
        PopulationSeries { times: self.times.clone(), p1: self.p1.clone(), p2: self.p2.clone() }
    }

    pub fn final_p2(&self) -> f64 {
        *self.p2.last().expect("runs record at least two samples")
    }

    pub fn invariant_drift(&self) -> f64 {
        self.exp_p.iter().map(|v| (v - self.exp_p[0]).abs()).fold(0.0, f64::max)
    }

    pub fn to_csv(&self) -> CsvTable {
        let mut t = CsvTable::new(&["t", "p1", "p2", "exp_p", "norm"]);
        for k in 0..self.times.len() {
            t.push(vec![self.times[k], self.p1[k], self.p2[k], self.exp_p[k], self.norm[k]]);
        }
        t
    }

    /// Largest residual of `d<x>/dt = c <sigma_x>` by central differences on the samples.
    pub fn heisenberg_residual(&self, c: f64) -> f64 {
        (1..self.times.len() - 1)
            .map(|k| {
                let v = (self.exp_x[k + 1] - self.exp_x[k - 1]) / (self.times[k + 1] - self.times[k - 1]);
                (v - c * self.exp_sigma_x[k]).abs()
            })
            .fold(0.0, f64::max)
    }
}

/// Largest `Omega` and `|Delta|` magnitudes over a dense sample of `[0, t_f]`.
fn drive_scales(protocol: &Protocol) -> f64 {
    uniform_times(protocol.t_f(), 2001)
        .into_iter()
        .map(|t| protocol.omega(t).abs().max(protocol.delta(t).abs()))
        .fold(0.0, f64::max)
}

/// Evolve `packet` from its current frame over `[0, t_f]`.
pub fn split_step_evolve(packet: &SpatialPacket, protocol: &Protocol, opts: &SpatialOptions) -> Result<SpatialRun> {
    ensure_positive("dt", opts.dt)?;
    if opts.samples < 2 {
        return Err(Error::invalid("samples", "need at least 2 samples"));
    }
    if packet.time != 0.0 {
        return Err(Error::invalid("packet", "evolution starts from t = 0"));
    }
    let scale = drive_scales(protocol);
    if scale > 0.0 && opts.dt > 0.2 / scale {
        return Err(Error::invalid("dt", format!("must resolve the drive, dt <= {:e}", 0.2 / scale)));
    }
    let t_f = protocol.t_f();
    let intervals = opts.samples - 1;
    let per_sample = ((t_f / opts.dt) / intervals as f64).ceil().max(1.0) as usize;
    let n_steps = per_sample * intervals;
    let dt = t_f / n_steps as f64;

    let mut psi = packet.clone();
    psi.tag.alpha_at_t = protocol.alpha(0.0);
    let times = uniform_times(t_f, opts.samples);
    let mut run = SpatialRun {
        frame: psi.tag.frame,
        dt,
        times: times.clone(),
        p1: Vec::with_capacity(times.len()),
        p2: Vec::with_capacity(times.len()),
        exp_p: Vec::with_capacity(times.len()),
        norm: Vec::with_capacity(times.len()),
        exp_x: Vec::with_capacity(times.len()),
        exp_sigma_x: Vec::with_capacity(times.len()),
        final_packet: packet.clone(),
    };
    let record = |psi: &SpatialPacket, run: &mut SpatialRun| -> Result<()> {
        psi.check_edges()?;
        let (a, b) = psi.populations();
        run.p1.push(a);
        run.p2.push(b);
        run.norm.push(a + b);
        run.exp_p.push(invariant_expectation(psi, protocol));
        run.exp_x.push(psi.mean_position());
        run.exp_sigma_x.push(psi.mean_sigma_x());
        Ok(())
    };
    record(&psi, &mut run)?;
    for s in 0..n_steps {
        let t = t_f * s as f64 / n_steps as f64;
        psi.step(protocol, t, dt);
        if (s + 1) % per_sample == 0 {
            psi.time = times[(s + 1) / per_sample];
            record(&psi, &mut run)?;
        }
    }
    run.final_packet = psi;
    Ok(run)
}

/// Largest population difference between a spatial run and a momentum-ensemble
/// average sampled at the same instants.
pub fn compare_decomposition(spatial: &SpatialRun, ensemble: &PopulationSeries) -> Result<f64> {
    spatial.populations().max_deviation(ensemble)
}
