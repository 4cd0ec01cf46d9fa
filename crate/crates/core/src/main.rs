use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dirac_sta::cli::{
    cmd_design, cmd_evolve, cmd_figure, cmd_find_nu, cmd_ion, cmd_momentum, cmd_oracle, cmd_scan, CommandOutput, RunConfig,
};
use dirac_sta::Error;

/// Robust population inversion protocols for simulated 1+1 Dirac dynamics.
#[derive(Parser)]
#[command(name = "dirac-sta", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// `key = value` file; flags override its entries.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file (or directory for `figure`); stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    nu: Option<f64>,
    #[arg(long, global = true)]
    tf: Option<f64>,
    #[arg(long, global = true)]
    sigma: Option<f64>,
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true)]
    points: Option<usize>,
    /// Protocol family: optimal, simple, pi, zero.
    #[arg(long, global = true)]
    kind: Option<String>,
    /// Extra `key=value` settings (repeatable).
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Sample Omega(t) and Delta(t).
    Design,
    /// Data for figure N (1 to 7).
    Figure { n: u32 },
    /// Locate the zero of q_s by bisection on Im K.
    FindNu {
        #[arg(long, allow_hyphen_values = true)]
        lo: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        hi: Option<f64>,
    },
    /// q_s over a range of nu.
    Scan {
        #[arg(long, allow_hyphen_values = true)]
        nu_min: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        nu_max: Option<f64>,
    },
    /// Final P2 over a symmetric momentum grid.
    Momentum {
        #[arg(long)]
        p_max: Option<f64>,
    },
    /// Population history of a plane wave, or of a Gaussian packet with --sigma.
    Evolve {
        #[arg(long, allow_hyphen_values = true)]
        p0: Option<f64>,
    },
    /// Spatial split-step runs compared with the momentum decomposition.
    Oracle {
        /// Box length; defaults to 40 hbar / sigma.
        #[arg(long)]
        length: Option<f64>,
        #[arg(long)]
        n_points: Option<usize>,
        #[arg(long)]
        dt: Option<f64>,
    },
    /// Trapped-ion laboratory schedules.
    Ion {
        #[arg(long)]
        k: Option<f64>,
        #[arg(long)]
        mass: Option<f64>,
        #[arg(long)]
        nu0: Option<f64>,
    },
}

fn put<T: ToString>(cfg: &mut RunConfig, key: &str, v: Option<T>) {
    if let Some(v) = v {
        cfg.set(key, v.to_string());
    }
}

fn config(cli: &Cli) -> Result<RunConfig, Error> {
    let mut cfg = match &cli.common.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::new(),
    };
    let mut flags = RunConfig::new();
    let c = &cli.common;
    put(&mut flags, "nu", c.nu);
    put(&mut flags, "t_f", c.tf);
    put(&mut flags, "sigma", c.sigma);
    put(&mut flags, "tol", c.tol);
    put(&mut flags, "points", c.points);
    put(&mut flags, "kind", c.kind.clone());
    for kv in &c.set {
        let (k, v) = kv.split_once('=').ok_or_else(|| Error::Config(format!("--set expects KEY=VALUE, got `{kv}`")))?;
        flags.set(k, v.trim());
    }
    match &cli.command {
        Command::FindNu { lo, hi } => {
            put(&mut flags, "lo", *lo);
            put(&mut flags, "hi", *hi);
        }
        Command::Scan { nu_min, nu_max } => {
            put(&mut flags, "nu_min", *nu_min);
            put(&mut flags, "nu_max", *nu_max);
        }
        Command::Momentum { p_max } => put(&mut flags, "p_max", *p_max),
        Command::Evolve { p0 } => put(&mut flags, "p0", *p0),
        Command::Oracle { length, n_points, dt } => {
            put(&mut flags, "length", *length);
            put(&mut flags, "n_points", *n_points);
            put(&mut flags, "dt", *dt);
        }
        Command::Ion { k, mass, nu0 } => {
            put(&mut flags, "k", *k);
            put(&mut flags, "mass", *mass);
            put(&mut flags, "nu0", *nu0);
        }
        Command::Design | Command::Figure { .. } => {}
    }
    cfg.merge(&flags);
    Ok(cfg)
}

fn emit(out: &CommandOutput, target: Option<&Path>, as_dir: bool) -> Result<(), Error> {
    if !out.tables.is_empty() || target.is_some() {
        for line in &out.report {
            eprintln!("{line}");
        }
    }
    match target {
        None => {
            for (name, table) in &out.tables {
                if out.tables.len() > 1 {
                    println!("# file={name}.csv");
                }
                print!("{}", table.render());
            }
            if out.tables.is_empty() {
                for line in &out.report {
                    println!("{line}");
                }
            }
        }
        Some(path) if as_dir || out.tables.len() > 1 => {
            std::fs::create_dir_all(path)?;
            for (name, table) in &out.tables {
                table.write_to(&path.join(format!("{name}.csv")))?;
            }
        }
        Some(path) => match out.tables.first() {
            Some((_, table)) => table.write_to(path)?,
            None => std::fs::write(path, out.report.join("\n") + "\n")?,
        },
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Error> {
    let mut cfg = config(&cli)?;
    let (out, as_dir) = match cli.command {
        Command::Design => (cmd_design(&mut cfg)?, false),
        Command::Figure { n } => (cmd_figure(n, &mut cfg)?, true),
        Command::FindNu { .. } => (cmd_find_nu(&mut cfg)?, false),
        Command::Scan { .. } => (cmd_scan(&mut cfg)?, false),
        Command::Momentum { .. } => (cmd_momentum(&mut cfg)?, false),
        Command::Evolve { .. } => (cmd_evolve(&mut cfg)?, false),
        Command::Oracle { .. } => (cmd_oracle(&mut cfg)?, true),
        Command::Ion { .. } => (cmd_ion(&mut cfg)?, false),
    };
    emit(&out, cli.common.out.as_deref(), as_dir)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
