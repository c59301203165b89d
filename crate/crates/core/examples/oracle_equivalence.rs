//! Full 2^N Lindblad evolution projected on the Dicke ladder versus the
//! reduced birth-death chain.

use dicke_reset::dynamics::IntegratorOptions;
use dicke_reset::model::{Protocol, SystemParams};
use dicke_reset::oracle;

fn main() -> dicke_reset::Result<()> {
    for n in 1..=6 {
        let p = SystemParams::unit(n)?;
        for prot in Protocol::benchmark_set(&p) {
            let rep = oracle::oracle_check(&p, &prot, &IntegratorOptions::default(), 21)?;
            println!(
                "N = {n}  {:<12} max |dp| = {:.2e}  |dQ| = {:.2e}  leakage = {:.2e}",
                prot.kind_name(),
                rep.max_population_deviation,
                rep.heat_deviation,
                rep.max_leakage
            );
        }
    }

    // positivity and trace of the full density matrix along the way
    let p = SystemParams::unit(4)?;
    let full = oracle::integrate_full(
        &p,
        &Protocol::benchmark_linear(&p),
        &IntegratorOptions::default(),
    )?;
    println!(
        "N = 4 linear: min eigenvalue {:.2e}, trace error {:.2e}, hermiticity {:.2e}",
        full.min_eigenvalue, full.max_trace_error, full.max_hermiticity_error
    );
    Ok(())
}
