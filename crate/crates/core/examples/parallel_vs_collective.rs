use dicke_reset::dynamics::IntegratorOptions;
use dicke_reset::experiments;
use dicke_reset::model::{Protocol, SystemParams};

/// Heat and residual error of one collective reset relative to N
/// independent single-qubit resets driven by the same schedule.
fn main() -> dicke_reset::Result<()> {
    for n in [2, 8, 32, 128, 512] {
        let p = SystemParams::unit(n)?;
        for prot in Protocol::benchmark_set(&p) {
            let c = experiments::parallel_vs_collective(&p, &prot, &IntegratorOptions::default())?;
            println!(
                "N = {n:>3} {:<12} heat ratio {:.4}  eps ratio {:.4e}",
                prot.kind_name(),
                c.heat_ratio,
                c.epsilon_ratio
            );
        }
    }
    Ok(())
}
