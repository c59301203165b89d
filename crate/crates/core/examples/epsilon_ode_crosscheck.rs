//! The scalar equation for eps(t), driven by zeta(t) from the full chain,
//! reproduces the chain's own eps(t).

use dicke_reset::dynamics::{self, IntegratorOptions};
use dicke_reset::model::{Protocol, SystemParams};

fn main() -> dicke_reset::Result<()> {
    for n in [1, 4, 16, 64, 256] {
        let p = SystemParams::unit(n)?;
        for prot in Protocol::benchmark_set(&p) {
            let dev = dynamics::epsilon_crosscheck(&p, &prot, &IntegratorOptions::default())?;
            println!(
                "N = {n:>3} {:<12} max |d eps| = {dev:.2e}",
                prot.kind_name()
            );
        }
    }
    Ok(())
}
