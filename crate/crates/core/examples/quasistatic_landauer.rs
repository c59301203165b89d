//! Slow linear ramps approach the collective erasure cost ln(N + 1) / beta.

use dicke_reset::dynamics::IntegratorOptions;
use dicke_reset::experiments;
use dicke_reset::model::SystemParams;

fn main() -> dicke_reset::Result<()> {
    let taus = [1.0, 10.0, 100.0, 1e3, 1e4];
    for n in [1, 2, 4, 16] {
        let p = SystemParams::unit(n)?;
        let rows = experiments::quasistatic_convergence(
            &p,
            &taus,
            10.0 / p.beta,
            &IntegratorOptions::default(),
        )?;
        println!("N = {n}, ln(N+1) = {:.6}", rows[0].landauer);
        for r in rows {
            println!(
                "  tau = {:>7}  Q = {:.6}  excess = {:+.3e}  eps = {:.2e}{}",
                r.tau,
                r.heat_total,
                r.relative_excess,
                r.epsilon_final,
                if r.perfect_reset { "  (reset)" } else { "" }
            );
        }
    }
    Ok(())
}
