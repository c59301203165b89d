//! Adaptive time steppers.
//!
//! [`sdirk`] is the stiff workhorse for the birth-death chain: a
//! singly-diagonally-implicit scheme whose stage equations for an affine
//! right-hand side reduce to one tridiagonal solve each. [`dopri`] is an
//! explicit Dormand-Prince 5(4) pair used by the full-space oracle, where
//! the problem is small and not stiff.

pub mod dopri;
pub mod sdirk;
pub mod tridiag;

/// Error control and step budget shared by both steppers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_steps: usize,
    /// First trial step. Estimated from the initial slope when absent.
    pub h_init: Option<f64>,
}

impl Default for StepControl {
    fn default() -> Self {
        StepControl {
            rel_tol: 1e-8,
            abs_tol: 1e-12,
            max_steps: 500_000,
            h_init: None,
        }
    }
}

/// Why a stepper stopped early.
#[derive(Debug, Clone, PartialEq)]
pub struct StepFailure {
    pub t: f64,
    pub reason: String,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
}

/// Sorted list of times every step sequence must land on exactly.
pub(crate) struct Stops {
    times: Vec<f64>,
    next: usize,
}

impl Stops {
    pub(crate) fn new(t0: f64, t_end: f64, extra: &[f64]) -> Self {
        let mut times: Vec<f64> = extra
            .iter()
            .copied()
            .filter(|&t| t > t0 && t < t_end)
            .collect();
        times.push(t_end);
        times.sort_by(f64::total_cmp);
        times.dedup();
        Stops { times, next: 0 }
    }

    pub(crate) fn upcoming(&self) -> f64 {
        self.times[self.next]
    }

    pub(crate) fn advance(&mut self) {
        self.next += 1;
    }

    pub(crate) fn done(&self) -> bool {
        self.next >= self.times.len()
    }
}

/// Scaled max-norm error, `max |err_i| / (atol + rtol max(|a_i|, |b_i|))`.
pub(crate) fn scaled_error(err: &[f64], a: &[f64], b: &[f64], ctl: &StepControl) -> f64 {
    err.iter()
        .zip(a.iter().zip(b))
        .map(|(e, (x, y))| e.abs() / (ctl.abs_tol + ctl.rel_tol * x.abs().max(y.abs())))
        .fold(0.0, f64::max)
}

/// Smallest step the stepper is willing to take at time `t`.
pub(crate) fn min_step(t: f64, span: f64) -> f64 {
    64.0 * f64::EPSILON * t.abs().max(span.abs()).max(1e-300)
}
