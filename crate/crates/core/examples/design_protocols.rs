//! Build each protocol family and print its peak couplings and pulse area.

use dirac_sta::designer::{design_optimal, design_pi_pulse, design_simple_default, OPTIMAL_NU};
use dirac_sta::dynamics::uniform_times;

fn main() -> dirac_sta::Result<()> {
    let t_f = 1.0;
    let families = [
        design_optimal(OPTIMAL_NU, t_f, 1.0, 1.0)?,
        design_simple_default(t_f, 1.0, 1.0)?,
        design_pi_pulse(t_f, 1.0, 1.0)?,
    ];
    for p in &families {
        let grid = uniform_times(t_f, 2001);
        let max_omega = grid.iter().map(|&t| p.omega(t).abs()).fold(0.0, f64::max);
        let max_delta = grid.iter().map(|&t| p.delta(t).abs()).fold(0.0, f64::max);
        println!(
            "{:>8}: max|Omega| = {max_omega:.6}, max|Delta| = {max_delta:.6}, area = {:.6}",
            p.kind().name(),
            p.pulse_area()?
        );
    }

    let opt = &families[0];
    println!("\noptimal schedule, t / t_f, Omega, Delta");
    for t in uniform_times(t_f, 11) {
        println!("{t:5.2} {:12.6} {:12.6}", opt.omega(t), opt.delta(t));
    }
    Ok(())
}
