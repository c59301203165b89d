//! Every inequality check for a few runs, including a per-sample view of
//! N eps(t) against the asymptotic window.

use dicke_reset::bounds;
use dicke_reset::dynamics::{self, IntegratorOptions};
use dicke_reset::model::{Protocol, SystemParams};
use dicke_reset::thermo;

fn main() -> dicke_reset::Result<()> {
    for n in [1, 16, 256] {
        let p = SystemParams::unit(n)?;
        for prot in Protocol::benchmark_set(&p) {
            let traj = dynamics::integrate(&p, &prot, &IntegratorOptions::default())?;
            let s = thermo::summarize(&traj, &p)?;
            println!("N = {n} {}", prot.kind_name());
            for b in bounds::check_all(&traj, &s, &p, &prot)? {
                println!(
                    "  {:<16} lhs {:>12.6e}  rhs {:>12.6e}  margin {:>+12.4e}  {:?}/{:?}",
                    b.name, b.lhs, b.rhs, b.margin, b.severity, b.outcome
                );
            }
        }
    }

    let p = SystemParams::unit(1024)?;
    let prot = Protocol::benchmark_quench(&p);
    let opts =
        IntegratorOptions::default().with_grid(IntegratorOptions::uniform_grid(0.0, p.tau, 6));
    let traj = dynamics::integrate(&p, &prot, &opts)?;
    println!("N eps(t) for the N = 1024 quench");
    for (t, ne, lo, hi) in bounds::window_profile(&traj, &p, &prot) {
        println!("  t = {t:.1}  N eps = {ne:.6}  window [{lo:.5}, {hi:.5}]");
    }
    Ok(())
}
