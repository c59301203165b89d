//! Scalar observables of a reset run.

use serde::{Deserialize, Serialize};

use crate::dynamics::Trajectory;
use crate::error::{Error, Result};
use crate::model::{DickeDistribution, SystemParams};

/// Fraction of excited qubits, (1/N) sum_n n p_n.
pub fn error_probability(d: &DickeDistribution) -> f64 {
    let n_q = d.n_qubits() as f64;
    d.probs()
        .iter()
        .enumerate()
        .map(|(n, p)| n as f64 * p)
        .sum::<f64>()
        / n_q
}

/// sum_n (n / N)^2 p_n.
pub fn zeta(d: &DickeDistribution) -> f64 {
    let n_q = d.n_qubits() as f64;
    d.probs()
        .iter()
        .enumerate()
        .map(|(n, p)| (n * n) as f64 * p)
        .sum::<f64>()
        / (n_q * n_q)
}

pub fn one_norm_distance(a: &DickeDistribution, b: &DickeDistribution) -> Result<f64> {
    if a.n_qubits() != b.n_qubits() {
        return Err(Error::domain(format!(
            "distance between N = {} and N = {} distributions",
            a.n_qubits(),
            b.n_qubits()
        )));
    }
    Ok(a.probs()
        .iter()
        .zip(b.probs())
        .map(|(x, y)| (x - y).abs())
        .sum())
}

/// Time-averaged dynamical activity over the trajectory's window.
pub fn avg_dynamical_activity(traj: &Trajectory) -> Result<f64> {
    let span = traj.end_time() - traj.start_time();
    if span.is_nan() || span <= 0.0 {
        return Err(Error::domain("activity average over a zero-length window"));
    }
    Ok(traj.total_activity() / span)
}

/// |1 - 2 eps| below this counts as no reset progress.
pub const PROGRESS_FLOOR: f64 = 1e-12;

/// F = Q tau / (1 - 2 eps)^2 with Q the heat per qubit.
pub fn reset_factor(heat_per_qubit: f64, tau: f64, epsilon: f64) -> Result<f64> {
    let progress = 1.0 - 2.0 * epsilon;
    if progress.abs() < PROGRESS_FLOOR {
        return Err(Error::UndefinedResetFactor);
    }
    Ok(heat_per_qubit * tau / (progress * progress))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResetSummary {
    pub epsilon_final: f64,
    pub heat_total: f64,
    pub heat_per_qubit: f64,
    pub distance: f64,
    pub avg_activity: f64,
    pub entropy_production: f64,
    /// `None` when eps = 1/2 and F is undefined.
    pub reset_factor: Option<f64>,
}

impl ResetSummary {
    pub fn reset_factor(&self) -> Result<f64> {
        self.reset_factor.ok_or(Error::UndefinedResetFactor)
    }
}

pub fn summarize(traj: &Trajectory, params: &SystemParams) -> Result<ResetSummary> {
    if traj.n_qubits != params.n_qubits {
        return Err(Error::domain("trajectory and params disagree on N"));
    }
    let last = traj.final_state();
    let epsilon_final = error_probability(last);
    let heat_total = traj.total_heat();
    let heat_per_qubit = heat_total / params.n_qubits as f64;
    let distance = one_norm_distance(last, traj.first_state())?;
    let avg_activity = avg_dynamical_activity(traj)?;
    let reset_factor = match reset_factor(heat_per_qubit, params.tau, epsilon_final) {
        Ok(f) => Some(f),
        Err(Error::UndefinedResetFactor) => None,
        Err(e) => return Err(e),
    };
    Ok(ResetSummary {
        epsilon_final,
        heat_total,
        heat_per_qubit,
        distance,
        avg_activity,
        entropy_production: traj.total_entropy_production(),
        reset_factor,
    })
}

/// Sigma - (S_final - S_initial + beta Q). Zero for exact dynamics.
pub fn first_law_residual(traj: &Trajectory, params: &SystemParams) -> f64 {
    let ds = traj.final_state().shannon_entropy() - traj.first_state().shannon_entropy();
    traj.total_entropy_production() - (ds + params.beta * traj.total_heat())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{integrate, IntegratorOptions};
    use crate::model::{initial_state, Protocol};
    use approx::assert_abs_diff_eq;

    fn dist(p: &[f64]) -> DickeDistribution {
        DickeDistribution::new(p.to_vec()).unwrap()
    }

    #[test]
    fn error_probability_examples() {
        for n in [1, 2, 5, 100] {
            assert_abs_diff_eq!(
                error_probability(&initial_state(n).unwrap()),
                0.5,
                epsilon = 1e-15
            );
        }
        assert_eq!(error_probability(&dist(&[1.0, 0.0, 0.0])), 0.0);
        assert_abs_diff_eq!(
            error_probability(&dist(&[0.5, 0.3, 0.2])),
            0.35,
            epsilon = 1e-15
        );
    }

    #[test]
    fn zeta_examples() {
        let d = dist(&[0.3, 0.7]);
        assert_eq!(zeta(&d), error_probability(&d));
        assert_abs_diff_eq!(
            zeta(&initial_state(2).unwrap()),
            5.0 / 12.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(zeta(&initial_state(2).unwrap()), 0.41667, epsilon = 1e-5);
        assert_eq!(zeta(&dist(&[1.0, 0.0, 0.0, 0.0])), 0.0);
    }

    #[test]
    fn distance_examples() {
        let a = dist(&[0.2, 0.8]);
        assert_eq!(one_norm_distance(&a, &a).unwrap(), 0.0);
        assert_abs_diff_eq!(
            one_norm_distance(&dist(&[1.0, 0.0]), &dist(&[0.5, 0.5])).unwrap(),
            1.0,
            epsilon = 1e-15
        );
        let third = 1.0 / 3.0;
        assert_abs_diff_eq!(
            one_norm_distance(&dist(&[1.0, 0.0, 0.0]), &dist(&[third, third, third])).unwrap(),
            4.0 / 3.0,
            epsilon = 1e-15
        );
        assert!(one_norm_distance(&dist(&[1.0, 0.0]), &dist(&[1.0, 0.0, 0.0])).is_err());
    }

    #[test]
    fn reset_factor_examples() {
        // two-level closed form at beta = gamma0 = tau = 1
        let e = std::f64::consts::E;
        let eps = 1.0 / (1.0 + e) + (0.5 - 1.0 / (1.0 + e)) / e;
        let q = 0.5 - eps;
        let f = reset_factor(q, 1.0, eps).unwrap();
        assert_abs_diff_eq!(f, q / (1.0 - 2.0 * eps).powi(2), epsilon = 1e-15);
        assert_abs_diff_eq!(f, 1.7117, epsilon = 1e-4);
        assert!(f > 1.0);
        assert!(matches!(
            reset_factor(0.1, 1.0, 0.5),
            Err(Error::UndefinedResetFactor)
        ));
    }

    #[test]
    fn activity_of_symmetric_two_level() {
        let p = SystemParams::unit(1).unwrap();
        let traj = integrate(
            &p,
            &Protocol::idle(1.0).unwrap(),
            &IntegratorOptions::default(),
        )
        .unwrap();
        assert_abs_diff_eq!(avg_dynamical_activity(&traj).unwrap(), 0.5, epsilon = 1e-14);
    }

    #[test]
    fn summary_of_two_level_quench() {
        let p = SystemParams::unit(1).unwrap();
        let traj = integrate(
            &p,
            &Protocol::benchmark_quench(&p),
            &IntegratorOptions::default(),
        )
        .unwrap();
        let s = summarize(&traj, &p).unwrap();
        assert_abs_diff_eq!(s.epsilon_final, 0.353944, epsilon = 1e-6);
        assert_abs_diff_eq!(s.heat_total, 0.146056, epsilon = 1e-6);
        assert_abs_diff_eq!(s.heat_per_qubit, s.heat_total, epsilon = 0.0);
        assert_abs_diff_eq!(s.reset_factor.unwrap(), 1.7117, epsilon = 1e-4);
        assert!(s.avg_activity <= 0.5 + 1e-12);
        assert_abs_diff_eq!(s.distance, 1.0 - 2.0 * s.epsilon_final, epsilon = 1e-12);
    }

    #[test]
    fn summary_of_idle_run_flags_reset_factor() {
        let p = SystemParams::unit(3).unwrap();
        let traj = integrate(
            &p,
            &Protocol::idle(1.0).unwrap(),
            &IntegratorOptions::default(),
        )
        .unwrap();
        let s = summarize(&traj, &p).unwrap();
        assert_abs_diff_eq!(s.epsilon_final, 0.5, epsilon = 1e-15);
        assert_eq!(s.heat_total, 0.0);
        assert!(s.reset_factor.is_none());
        assert!(matches!(s.reset_factor(), Err(Error::UndefinedResetFactor)));
    }
}
