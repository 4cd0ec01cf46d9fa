//! Population inversion of a Gaussian momentum distribution.

use dirac_sta::designer::{design_optimal, design_pi_pulse, design_simple_default, OPTIMAL_NU};
use dirac_sta::dynamics::{gaussian_average, EnsembleSettings, EvolveOptions};

fn main() -> dirac_sta::Result<()> {
    let settings = EnsembleSettings::default();
    let opts = EvolveOptions::default().samples(11);
    let families = [
        design_optimal(OPTIMAL_NU, 1.0, 1.0, 1.0)?,
        design_simple_default(1.0, 1.0, 1.0)?,
        design_pi_pulse(1.0, 1.0, 1.0)?,
    ];
    println!("sigma   optimal     simple      pi");
    for sigma in [0.1, 0.3, 0.6, 0.9] {
        let mut line = format!("{sigma:4.1}");
        for p in &families {
            line += &format!("  {:.8}", gaussian_average(p, sigma, &settings, &opts)?.final_p2());
        }
        println!("{line}");
    }
    println!("pi pulse closed form at 0.3: {:.8}", 0.5 * (1.0 + (-0.09f64).exp()));
    Ok(())
}
