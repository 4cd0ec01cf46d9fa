//! Sensitivity of each protocol family, perturbative and from exact dynamics.

use dirac_sta::designer::{design_optimal, design_pi_pulse, design_simple_default, OPTIMAL_NU};
use dirac_sta::sensitivity::{find_nu_zero, qs_from_dynamics, qs_general, scan_nu, DEFAULT_TOL};

fn main() -> dirac_sta::Result<()> {
    let nu = find_nu_zero(0.5, 0.8, 1e-6)?;
    println!("first zero of q_s: nu = {nu:.6}");

    let scan = scan_nu(0.0, 2.0, 201, 1.0, 1.0, 1.0, DEFAULT_TOL)?;
    println!("sign changes of Im K on [0, 2]: {:?}", scan.sign_changes());

    for p in [design_pi_pulse(1.0, 1.0, 1.0)?, design_simple_default(1.0, 1.0, 1.0)?, design_optimal(OPTIMAL_NU, 1.0, 1.0, 1.0)?] {
        let angles = p.angles()?.expect("designed protocols carry angles");
        let q = qs_general(&angles, 1.0, 1.0, 1.0, DEFAULT_TOL)?.qs;
        let d = qs_from_dynamics(&p, 1e-2)?;
        println!("{:>10}: perturbative {q:.6e}, curvature {d:.6e}", p.kind().name());
    }
    Ok(())
}
