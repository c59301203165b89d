//! Benchmark sweep over N = 1, 2, 4, ..., 1024 and the fitted eps ~ N^slope.

use dicke_reset::experiments::{self, SweepSpec};
use dicke_reset::model::SystemParams;

fn main() -> dicke_reset::Result<()> {
    let table = experiments::sweep(&SweepSpec::benchmark(SystemParams::unit(1)?))?;
    for name in ["quench", "linear", "exponential"] {
        println!("{name}");
        for (n, s) in table.series(name) {
            println!(
                "  N = {n:>5}  eps = {:.6e}  Q/N = {:.6}",
                s.epsilon_final, s.heat_per_qubit
            );
        }
        let fit = experiments::scaling_fit(&table, name, (128, 1024))?;
        println!("  slope on [128, 1024]: {:.4}", fit.slope);
    }
    Ok(())
}
