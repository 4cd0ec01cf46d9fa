//! Laser settings that realise the optimal protocol on a trapped 40Ca+ ion.

use std::f64::consts::PI;

use dirac_sta::designer::{design_optimal, OPTIMAL_NU};
use dirac_sta::ion_map::{derive_ion_parameters, map_protocol};

const HBAR: f64 = 1.054_571_817e-34;
const AMU: f64 = 1.660_539_066_6e-27;

fn main() -> dirac_sta::Result<()> {
    let k = 2.0 * PI / 729e-9 * 2f64.sqrt();
    let nu0 = 2.0 * PI * 1.0e6;
    let ion = derive_ion_parameters(k, 40.0 * AMU, nu0, HBAR)?;
    println!("eta = {:.5}, Lambda = {:.4e} m", ion.eta, ion.lambda);

    // A 20 us protocol with c chosen so Omega_tilde_1 is 2 pi x 10 kHz.
    let t_f = 20e-6;
    let c = 2.0 * PI * 1e4 * 2.0 * ion.eta * ion.lambda;
    let p = design_optimal(OPTIMAL_NU, t_f, c, HBAR)?;
    let lab = map_protocol(&p, &ion)?;
    println!("Omega_tilde_1 = {:.4e} rad/s", lab.omega_tilde_1);
    println!("\n   t/us   Omega_c/(2pi kHz)   Omega_tilde_2/(2pi kHz)");
    for j in 0..=10 {
        let t = t_f * j as f64 / 10.0;
        let (om, _) = lab.reconstruct(t)?;
        assert!((om - p.omega(t)).abs() <= 1e-9 * (1.0 + p.omega(t).abs()));
        println!(
            "{:7.2} {:15.4} {:22.4}",
            t * 1e6,
            lab.omega_c(t) / (2.0 * PI * 1e3),
            lab.omega_tilde_2(t) / (2.0 * PI * 1e3)
        );
    }
    Ok(())
}
