//! Command implementations behind the `dirac-sta` binary. Each command reads a
//! [`RunConfig`], records every value it used, and returns CSV tables and/or
//! report lines; the binary only parses flags and writes the results.

use std::collections::BTreeMap;
use std::path::Path;

use crate::csv::CsvTable;
use crate::designer::{
    design_optimal, design_pi_pulse, design_simple, design_zero_drive, Protocol, ProtocolKind,
    OPTIMAL_NU, SIMPLE_BETA_MID, SIMPLE_EDGE_SLOPE,
};
use crate::dynamics::{
    adiabatic_populations, evolve_spinor, gaussian_average, momentum_scan, symmetric_grid, uniform_times, EnsembleSettings,
    EvolveOptions,
};
use crate::error::{Error, Result};
use crate::ion_map::{derive_ion_parameters, map_protocol};
use crate::sensitivity::{find_nu_zero, qs_optimal, scan_nu, DEFAULT_TOL};
use crate::spatial::{compare_decomposition, init_gaussian_packet, split_step_evolve, Frame, SpatialOptions};
use crate::spinor::Spinor;

fn show(x: f64) -> String {
    if x != 0.0 && (x.abs() < 1e-3 || x.abs() >= 1e6) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

/// Effective configuration: `key = value` pairs from a file, overridden by flags,
/// plus every default a command falls back on.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunConfig {
    values: BTreeMap<String, String>,
}

fn canonical_key(key: &str) -> String {
    match key.trim() {
        "tf" => "t_f".to_string(),
        other => other.replace('-', "_"),
    }
}

impl RunConfig {
    pub fn new() -> Self {
        Self::default()
    }

    /// Parse `key = value` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`, got `{line}`", n + 1)))?;
            if k.trim().is_empty() {
                return Err(Error::Config(format!("line {}: empty key", n + 1)));
            }
            cfg.set(k, v.trim());
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        self.values.insert(canonical_key(key), value.into());
    }

    /// Values in `other` win.
    pub fn merge(&mut self, other: &RunConfig) {
        for (k, v) in &other.values {
            self.values.insert(k.clone(), v.clone());
        }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(&canonical_key(key)).map(String::as_str)
    }

    fn take<T: std::str::FromStr>(&mut self, key: &str, default: T, shown: String) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        let key = canonical_key(key);
        match self.values.get(&key) {
            Some(v) => v.parse().map_err(|e| Error::Config(format!("`{key}` = `{v}`: {e}"))),
            None => {
                self.values.insert(key, shown);
                Ok(default)
            }
        }
    }

    pub fn f64_or(&mut self, key: &str, default: f64) -> Result<f64> {
        self.take(key, default, show(default))
    }

    pub fn usize_or(&mut self, key: &str, default: usize) -> Result<usize> {
        self.take(key, default, format!("{default}"))
    }

    pub fn kind_or(&mut self, key: &str, default: ProtocolKind) -> Result<ProtocolKind> {
        self.take(key, default, default.name().to_string())
    }

    /// Comma-separated list of floats.
    pub fn list_or(&mut self, key: &str, default: &[f64]) -> Result<Vec<f64>> {
        let key = canonical_key(key);
        match self.values.get(&key) {
            Some(v) => v
                .split(',')
                .map(|s| s.trim().parse::<f64>().map_err(|e| Error::Config(format!("`{key}` = `{v}`: {e}"))))
                .collect(),
            None => {
                let shown: Vec<String> = default.iter().map(|&x| show(x)).collect();
                self.values.insert(key, shown.join(","));
                Ok(default.to_vec())
            }
        }
    }

    /// `key=value` lines in key order, for CSV headers.
    pub fn header_lines(&self) -> Vec<String> {
        self.values.iter().filter(|(k, _)| k.as_str() != "out" && k.as_str() != "config").map(|(k, v)| format!("{k}={v}")).collect()
    }
}

/// Tables and human-readable lines produced by one command.
#[derive(Debug, Clone, Default)]
pub struct CommandOutput {
    /// `(file stem, table)` pairs.
    pub tables: Vec<(String, CsvTable)>,
    pub report: Vec<String>,
}

impl CommandOutput {
    fn table(mut self, name: impl Into<String>, t: CsvTable) -> Self {
        self.tables.push((name.into(), t));
        self
    }

    fn line(mut self, s: impl Into<String>) -> Self {
        self.report.push(s.into());
        self
    }

    /// Attach the effective configuration to every table.
    fn stamp(mut self, cfg: &RunConfig) -> Self {
        for (_, t) in &mut self.tables {
            let mut c = cfg.header_lines();
            for line in t.comments.drain(..) {
                if !c.contains(&line) {
                    c.push(line);
                }
            }
            t.comments = c;
        }
        self
    }
}

/// Protocol of kind `kind` from the `nu`, `t_f`, `c`, `hbar` (and, for the
/// simple family, `beta_mid`, `edge_slope`) entries.
pub fn build_protocol(cfg: &mut RunConfig, kind: ProtocolKind) -> Result<Protocol> {
    let t_f = cfg.f64_or("t_f", 1.0)?;
    let c = cfg.f64_or("c", 1.0)?;
    let hbar = cfg.f64_or("hbar", 1.0)?;
    match kind {
        ProtocolKind::Optimal => design_optimal(cfg.f64_or("nu", OPTIMAL_NU)?, t_f, c, hbar),
        ProtocolKind::Simple => {
            let beta_mid = cfg.f64_or("beta_mid", SIMPLE_BETA_MID)?;
            // edge slope in units of 1/t_f
            let slope = cfg.f64_or("edge_slope", SIMPLE_EDGE_SLOPE)?;
            design_simple(t_f, beta_mid, slope / t_f, c, hbar)
        }
        ProtocolKind::PiPulse => design_pi_pulse(t_f, c, hbar),
        ProtocolKind::ZeroDrive => design_zero_drive(t_f, c, hbar),
    }
}

fn evolve_options(cfg: &mut RunConfig, samples: usize) -> Result<EvolveOptions> {
    let rtol = cfg.f64_or("rtol", 1e-10)?;
    let atol = cfg.f64_or("atol", 1e-12)?;
    Ok(EvolveOptions { rtol, atol, samples })
}

fn protocol_table(p: &Protocol, points: usize) -> CsvTable {
    let mut t = CsvTable::new(&["t", "omega", "delta"]).comments(p.describe());
    for s in uniform_times(p.t_f(), points.max(2)) {
        t.push(vec![s, p.omega(s), p.delta(s)]);
    }
    t
}

/// `t,omega,delta` for one protocol.
pub fn cmd_design(cfg: &mut RunConfig) -> Result<CommandOutput> {
    let kind = cfg.kind_or("kind", ProtocolKind::Optimal)?;
    let p = build_protocol(cfg, kind)?;
    let points = cfg.usize_or("points", 1001)?;
    Ok(CommandOutput::default().table(format!("design_{}", kind.name()), protocol_table(&p, points)).stamp(cfg))
}

/// `nu,qs,imK` over `[nu_min, nu_max]`.
pub fn cmd_scan(cfg: &mut RunConfig) -> Result<CommandOutput> {
    let lo = cfg.f64_or("nu_min", 0.0)?;
    let hi = cfg.f64_or("nu_max", 2.0)?;
    let points = cfg.usize_or("points", 201)?;
    let t_f = cfg.f64_or("t_f", 1.0)?;
    let c = cfg.f64_or("c", 1.0)?;
    let hbar = cfg.f64_or("hbar", 1.0)?;
    let tol = cfg.f64_or("tol", DEFAULT_TOL)?;
    let scan = scan_nu(lo, hi, points, t_f, c, hbar, tol)?;
    let mut out = CommandOutput::default().line(format!("max |Re K| / t_f = {:e}", scan.max_re_k));
    for (a, b) in scan.sign_changes() {
        out = out.line(format!("Im K changes sign in [{a}, {b}]"));
    }
    Ok(out.table("scan_nu", scan.to_csv()).stamp(cfg))
}

/// `p0,p2_final` for a plane-wave momentum scan.
pub fn cmd_momentum(cfg: &mut RunConfig) -> Result<CommandOutput> {
    let kind = cfg.kind_or("kind", ProtocolKind::Optimal)?;
    let p = build_protocol(cfg, kind)?;
    let p_max = cfg.f64_or("p_max", 1.5)?;
    let points = cfg.usize_or("points", 301)?;
    let opts = evolve_options(cfg, 2)?;
    let scan = momentum_scan(&p, &symmetric_grid(p_max, points), &opts);
    let mut out = CommandOutput::default();
    if scan.failures() > 0 {
        out = out.line(format!("{} rows failed to integrate", scan.failures()));
    }
    Ok(out.table(format!("momentum_{}", kind.name()), scan.to_csv()).stamp(cfg))
}

/// `t,p1,p2` for a plane wave at `p0`, or for a Gaussian packet when `sigma` is set.
pub fn cmd_evolve(cfg: &mut RunConfig) -> Result<CommandOutput> {
    let kind = cfg.kind_or("kind", ProtocolKind::Optimal)?;
    let p = build_protocol(cfg, kind)?;
    let samples = cfg.usize_or("points", 201)?;
    let series = if cfg.get("sigma").is_some() {
        let sigma = cfg.f64_or("sigma", 0.3)?;
        let settings = ensemble_settings(cfg)?;
        let opts = evolve_options(cfg, samples)?;
        gaussian_average(&p, sigma, &settings, &opts)?
    } else {
        let p0 = cfg.f64_or("p0", 0.0)?;
        let opts = evolve_options(cfg, samples)?;
        evolve_spinor(&p, p0, Spinor::up(), &opts)?.populations()
    };
    Ok(CommandOutput::default()
        .line(format!("P2(t_f) = {:.10}", series.final_p2()))
        .table(format!("evolve_{}", kind.name()), series.to_csv())
        .stamp(cfg))
}

fn ensemble_settings(cfg: &mut RunConfig) -> Result<EnsembleSettings> {
    let d = EnsembleSettings::default();
    Ok(EnsembleSettings {
        half_width_sigmas: cfg.f64_or("half_width_sigmas", d.half_width_sigmas)?,
        points: cfg.usize_or("ensemble_points", d.points)?,
        refine_tol: cfg.f64_or("refine_tol", d.refine_tol)?,
        max_points: cfg.usize_or("ensemble_max_points", d.max_points)?,
    })
}

/// Root of `q_s` inside `[lo, hi]`.
pub fn cmd_find_nu(cfg: &mut RunConfig) -> Result<CommandOutput> {
    let lo = cfg.f64_or("lo", 0.5)?;
    let hi = cfg.f64_or("hi", 0.8)?;
    let tol = cfg.f64_or("tol", 1e-4)?;
    let nu = find_nu_zero(lo, hi, tol)?;
    let r = qs_optimal(nu, 1.0, 1.0, 1.0, DEFAULT_TOL)?;
    Ok(CommandOutput::default()
        .line(format!("nu={nu:.16e}"))
        .line(format!("qs={:.16e}", r.qs))
        .line(format!("imK={:.16e}", r.k.im)))
}

/// Spatial split-step runs in both frames against the momentum ensemble.
pub fn cmd_oracle(cfg: &mut RunConfig) -> Result<CommandOutput> {
    let kind = cfg.kind_or("kind", ProtocolKind::Optimal)?;
    let p = build_protocol(cfg, kind)?;
    let sigma = cfg.f64_or("sigma", 0.3)?;
    let n_points = cfg.usize_or("n_points", 4096)?;
    let length = cfg.f64_or("length", 40.0 * p.hbar() / sigma)?;
    let dt = cfg.f64_or("dt", SpatialOptions::default().dt)?;
    let samples = cfg.usize_or("points", 51)?;
    let threshold = cfg.f64_or("threshold", 1e-5)?;
    let packet = init_gaussian_packet(sigma, n_points, length, p.hbar())?;
    let opts = SpatialOptions { dt, samples };
    let settings = ensemble_settings(cfg)?;
    let ode = evolve_options(cfg, samples)?;
    let ((h, hu), ensemble) = rayon::join(
        || {
            rayon::join(
                || split_step_evolve(&packet, &p, &opts),
                || split_step_evolve(&packet.to_frame(Frame::Hu, &p), &p, &opts),
            )
        },
        || gaussian_average(&p, sigma, &settings, &ode),
    );
    let (h, hu, ensemble) = (h?, hu?, ensemble?);
    let frames = h.populations().max_deviation(&hu.populations())?;
    let decomposition = compare_decomposition(&h, &ensemble)?;
    let worst = frames.max(decomposition);
    let out = CommandOutput::default()
        .line(format!("P2(t_f) spatial H frame = {:.10}", h.final_p2()))
        .line(format!("P2(t_f) spatial Hu frame = {:.10}", hu.final_p2()))
        .line(format!("P2(t_f) momentum ensemble = {:.10}", ensemble.final_p2()))
        .line(format!("max deviation H vs Hu = {frames:e}"))
        .line(format!("max deviation spatial vs ensemble = {decomposition:e}"))
        .line(format!("<p> drift (H frame) = {:e}", h.invariant_drift()))
        .line(format!("<p - alpha/c> drift (Hu frame) = {:e}", hu.invariant_drift()))
        .table("oracle_h", h.to_csv())
        .table("oracle_hu", hu.to_csv())
        .stamp(cfg);
    if worst > threshold {
        return Err(Error::Accuracy { tol: threshold, achieved: worst });
    }
    Ok(out)
}

/// Trapped-ion schedules for a designed protocol.
pub fn cmd_ion(cfg: &mut RunConfig) -> Result<CommandOutput> {
    let kind = cfg.kind_or("kind", ProtocolKind::Optimal)?;
    let p = build_protocol(cfg, kind)?;
    let ion = derive_ion_parameters(cfg.f64_or("k", 1.0)?, cfg.f64_or("mass", 1.0)?, cfg.f64_or("nu0", 1.0)?, p.hbar())?;
    let points = cfg.usize_or("points", 1001)?;
    let lab = map_protocol(&p, &ion)?;
    Ok(CommandOutput::default().table(format!("ion_{}", kind.name()), lab.to_csv(points)).stamp(cfg))
}

/// Data behind figure `n` (1 to 7).
pub fn cmd_figure(n: u32, cfg: &mut RunConfig) -> Result<CommandOutput> {
    let out = match n {
        1 => {
            let lo = cfg.f64_or("nu_min", 0.0)?;
            let hi = cfg.f64_or("nu_max", 2.0)?;
            let points = cfg.usize_or("points", 2001)?;
            let tol = cfg.f64_or("tol", DEFAULT_TOL)?;
            let scan = scan_nu(lo, hi, points, 1.0, 1.0, 1.0, tol)?;
            CommandOutput::default().table("fig1", scan.to_csv())
        }
        2 => {
            let p = build_protocol(cfg, ProtocolKind::Optimal)?;
            let points = cfg.usize_or("points", 1001)?;
            let opts = evolve_options(cfg, points)?;
            let pops = evolve_spinor(&p, 0.0, Spinor::up(), &opts)?.populations();
            CommandOutput::default()
                .line(format!("P2(t_f) = {:.10}", pops.final_p2()))
                .table("fig2_protocol", protocol_table(&p, points))
                .table("fig2_populations", pops.to_csv())
        }
        3 => {
            let p = build_protocol(cfg, ProtocolKind::Optimal)?;
            let sigmas = cfg.list_or("sigmas", &[0.3, 0.9])?;
            let points = cfg.usize_or("points", 201)?;
            let settings = ensemble_settings(cfg)?;
            let opts = evolve_options(cfg, points)?;
            let mut out = CommandOutput::default();
            for s in sigmas {
                let series = gaussian_average(&p, s, &settings, &opts)?;
                out = out
                    .line(format!("sigma = {s}: P2(t_f) = {:.10}", series.final_p2()))
                    .table(format!("fig3_sigma{s}"), series.to_csv());
            }
            out
        }
        4 | 5 => {
            let p = build_protocol(cfg, ProtocolKind::Optimal)?;
            let angles = p.angles()?.expect("optimal protocols carry angles");
            let points = cfg.usize_or("points", 1001)?;
            let rows = adiabatic_populations(&p, &angles, points);
            if n == 4 {
                let mut e = CsvTable::new(&["t", "Eplus", "Eminus"]);
                let mut pop = CsvTable::new(&["t", "pop1_plus", "pop1_minus"]);
                for r in &rows {
                    e.push(vec![r.t, r.e_plus, r.e_minus]);
                    pop.push(vec![r.t, r.pop1_plus, r.pop1_minus]);
                }
                CommandOutput::default().table("fig4_energies", e).table("fig4_populations", pop)
            } else {
                let mut t = CsvTable::new(&["t", "overlap_plus", "overlap_minus"]);
                for r in &rows {
                    t.push(vec![r.t, r.overlap_plus, r.overlap_minus]);
                }
                CommandOutput::default().table("fig5", t)
            }
        }
        6 => {
            let opt = build_protocol(cfg, ProtocolKind::Optimal)?;
            let simple = build_protocol(cfg, ProtocolKind::Simple)?;
            let points = cfg.usize_or("points", 1001)?;
            let mut t = CsvTable::new(&["t", "omega_s", "delta_s", "omega", "delta"]);
            for s in uniform_times(opt.t_f(), points.max(2)) {
                t.push(vec![s, simple.omega(s), simple.delta(s), opt.omega(s), opt.delta(s)]);
            }
            CommandOutput::default().table("fig6", t)
        }
        7 => {
            let opt = build_protocol(cfg, ProtocolKind::Optimal)?;
            let simple = build_protocol(cfg, ProtocolKind::Simple)?;
            let p_max = cfg.f64_or("p_max", 1.5)?;
            let points = cfg.usize_or("points", 301)?;
            let opts = evolve_options(cfg, 2)?;
            let grid = symmetric_grid(p_max, points);
            let a = momentum_scan(&opt, &grid, &opts).values()?;
            let b = momentum_scan(&simple, &grid, &opts).values()?;
            let mut t = CsvTable::new(&["p0", "p2_optimal", "p2_simple"]);
            for (x, y) in a.iter().zip(&b) {
                t.push(vec![x.0, x.1, y.1]);
            }
            CommandOutput::default().table("fig7", t)
        }
        _ => return Err(Error::invalid("figure", format!("must be 1 to 7, got {n}"))),
    };
    Ok(out.stamp(cfg))
}
