//! Single-qubit quench against its closed form.

use dicke_reset::dynamics::{self, IntegratorOptions};
use dicke_reset::model::{Protocol, SystemParams};
use dicke_reset::thermo;

fn main() -> dicke_reset::Result<()> {
    let p = SystemParams::unit(1)?;
    let traj = dynamics::integrate(
        &p,
        &Protocol::benchmark_quench(&p),
        &IntegratorOptions::default(),
    )?;
    let s = thermo::summarize(&traj, &p)?;

    let e = std::f64::consts::E;
    let eps_exact = 1.0 / (1.0 + e) + (0.5 - 1.0 / (1.0 + e)) / e;
    println!(
        "eps  = {:.12}  (closed form {:.12})",
        s.epsilon_final, eps_exact
    );
    println!(
        "Q    = {:.12}  (closed form {:.12})",
        s.heat_total,
        0.5 - eps_exact
    );
    println!("F    = {:.9}", s.reset_factor()?);
    println!(
        "D    = {:.12}  (1 - 2 eps = {:.12})",
        s.distance,
        1.0 - 2.0 * s.epsilon_final
    );
    Ok(())
}
