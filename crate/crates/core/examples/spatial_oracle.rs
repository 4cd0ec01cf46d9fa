//! Evolve a Gaussian wave packet on a spatial grid in both frames and compare
//! with the momentum-decomposed ensemble average.

use dirac_sta::designer::{design_optimal, OPTIMAL_NU};
use dirac_sta::dynamics::{gaussian_average, EnsembleSettings, EvolveOptions};
use dirac_sta::spatial::{compare_decomposition, init_gaussian_packet, split_step_evolve, Frame, SpatialOptions};

fn main() -> dirac_sta::Result<()> {
    let sigma = 0.3;
    let protocol = design_optimal(OPTIMAL_NU, 1.0, 1.0, 1.0)?;
    let packet = init_gaussian_packet(sigma, 4096, 40.0 / sigma, 1.0)?;
    let opts = SpatialOptions { dt: 1e-4, samples: 51 };

    let (h, hu) = rayon::join(
        || split_step_evolve(&packet, &protocol, &opts),
        || split_step_evolve(&packet.to_frame(Frame::Hu, &protocol), &protocol, &opts),
    );
    let (h, hu) = (h?, hu?);
    let ensemble = gaussian_average(&protocol, sigma, &EnsembleSettings::default(), &EvolveOptions::default().samples(51))?;

    println!("P2(t_f): spatial {:.8}, ensemble {:.8}", h.final_p2(), ensemble.final_p2());
    println!("H vs Hu frame:        {:.3e}", h.populations().max_deviation(&hu.populations())?);
    println!("spatial vs ensemble:  {:.3e}", compare_decomposition(&h, &ensemble)?);
    println!("<p> drift (H):        {:.3e}", h.invariant_drift());
    println!("<p - a/c> drift (Hu): {:.3e}", hu.invariant_drift());
    Ok(())
}
