//! Instantaneous eigenvalues of the optimal protocol and how the invariant
//! eigenstate spreads over them.

use dirac_sta::designer::{design_optimal, OPTIMAL_NU};
use dirac_sta::dynamics::adiabatic_populations;

fn main() -> dirac_sta::Result<()> {
    let p = design_optimal(OPTIMAL_NU, 1.0, 1.0, 1.0)?;
    let angles = p.angles()?.expect("optimal protocol carries angles");
    println!("    t      E+        |<E+|phi>|^2  |<1|E+>|^2");
    for row in adiabatic_populations(&p, &angles, 21) {
        println!(
            "{:5.2} {:10.5} {:12.6} {:12.6}{}",
            row.t,
            row.e_plus,
            row.overlap_plus,
            row.pop1_plus,
            if row.degenerate { "  (degenerate)" } else { "" }
        );
    }
    Ok(())
}
