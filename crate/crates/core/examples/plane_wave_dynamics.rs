//! Evolve single momentum components and check against the invariant solution.

use dirac_sta::designer::{design_optimal, design_simple_default, OPTIMAL_NU};
use dirac_sta::dynamics::{evolve_spinor, momentum_scan, symmetric_grid, verify_lr_solution, EvolveOptions};
use dirac_sta::spinor::Spinor;

fn main() -> dirac_sta::Result<()> {
    let opt = design_optimal(OPTIMAL_NU, 1.0, 1.0, 1.0)?;
    let opts = EvolveOptions::default();

    let tr = evolve_spinor(&opt, 0.0, Spinor::up(), &opts)?;
    println!("p0 = 0: P2(t_f) = {:.12}, norm drift {:.1e}", tr.final_p2(), tr.norm_drift());

    let angles = opt.angles()?.expect("optimal protocol carries angles");
    let check = verify_lr_solution(&opt, &angles, &EvolveOptions::with_tol(1e-12))?;
    println!("invariant solution deviation {:.2e}", check.max_deviation);

    let simple = design_simple_default(1.0, 1.0, 1.0)?;
    let grid = symmetric_grid(1.0, 9);
    let a = momentum_scan(&opt, &grid, &opts).values()?;
    let b = momentum_scan(&simple, &grid, &opts).values()?;
    println!("\n   p0   optimal    simple");
    for ((p, x), (_, y)) in a.iter().zip(&b) {
        println!("{p:5.2}  {x:.6}  {y:.6}");
    }
    Ok(())
}
