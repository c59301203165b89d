//! A piecewise-linear schedule given as (t, omega) points, e.g. a ramp that
//! saturates halfway through.

use dicke_reset::dynamics::{self, IntegratorOptions};
use dicke_reset::model::{Protocol, SystemParams};
use dicke_reset::{io, thermo};

fn main() -> dicke_reset::Result<()> {
    let p = SystemParams::unit(32)?;
    let prot = Protocol::tabulated(vec![(0.0, 0.0), (0.5, 4.0), (1.0, 4.0)], p.tau)?;
    let opts =
        IntegratorOptions::default().with_grid(IntegratorOptions::uniform_grid(0.0, p.tau, 11));
    let traj = dynamics::integrate(&p, &prot, &opts)?;
    let s = thermo::summarize(&traj, &p)?;
    println!(
        "eps = {:.6e}, Q/N = {:.6}, F = {:?}",
        s.epsilon_final, s.heat_per_qubit, s.reset_factor
    );

    let mut out = std::io::stdout().lock();
    io::write_trajectory_csv(&mut out, &traj, false)
}
