//! Reset factor F = (Q/N) tau / (1 - 2 eps)^2 as N grows, against the
//! N-qubit and single-qubit lower bounds.

use dicke_reset::bounds::{reset_factor_bound, FactorBound};
use dicke_reset::experiments::{self, SweepSpec};
use dicke_reset::model::SystemParams;

fn main() -> dicke_reset::Result<()> {
    let mut spec = SweepSpec::benchmark(SystemParams::unit(1)?);
    spec.n_values = experiments::powers_of_two(256);
    let table = experiments::sweep(&spec)?;
    println!(
        "{:>5} {:>12} {:>12} {:>12} {:>8}",
        "N", "protocol", "F", "bound_N", "bound_1"
    );
    for row in &table.rows {
        let Some(s) = row.summary() else { continue };
        println!(
            "{:>5} {:>12} {:>12.6} {:>12.6} {:>8.3}",
            row.n_qubits,
            row.protocol,
            s.reset_factor.unwrap_or(f64::NAN),
            reset_factor_bound(&row.params, FactorBound::Collective),
            reset_factor_bound(&row.params, FactorBound::SingleQubit),
        );
    }
    Ok(())
}
