//! Write every figure table into a directory (default `figures/`).

use std::path::PathBuf;

use dirac_sta::cli::{cmd_figure, RunConfig};

fn main() -> dirac_sta::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "figures".into()));
    std::fs::create_dir_all(&dir)?;
    for n in 1..=7 {
        let mut cfg = RunConfig::new();
        let out = cmd_figure(n, &mut cfg)?;
        for (name, table) in &out.tables {
            let path = dir.join(format!("{name}.csv"));
            table.write_to(&path)?;
            println!("{} ({} rows)", path.display(), table.rows.len());
        }
    }
    Ok(())
}
