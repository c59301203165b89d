//! L-stable, stiffly accurate SDIRK method of order 4 with an embedded
//! order-3 solution (Hairer & Wanner, Solving ODEs II, table IV.6.5,
//! gamma = 1/4).
//!
//! The stepper is specialised to affine systems `y' = J(t) y + g(t)`: every
//! stage is a single shifted linear solve, so there are no Newton
//! iterations. Quadrature variables `q' = phi(t, y, y')` ride along with the
//! same stages and enter the error estimate.

use super::{min_step, scaled_error, StepControl, StepFailure, StepStats, Stops};

pub const STAGES: usize = 5;
pub const GAMMA: f64 = 0.25;

pub const C: [f64; STAGES] = [0.25, 0.75, 11.0 / 20.0, 0.5, 1.0];

pub const A: [[f64; STAGES]; STAGES] = [
    [0.25, 0.0, 0.0, 0.0, 0.0],
    [0.5, 0.25, 0.0, 0.0, 0.0],
    [17.0 / 50.0, -1.0 / 25.0, 0.25, 0.0, 0.0],
    [371.0 / 1360.0, -137.0 / 2720.0, 15.0 / 544.0, 0.25, 0.0],
    [25.0 / 24.0, -49.0 / 48.0, 125.0 / 16.0, -85.0 / 12.0, 0.25],
];

/// Weights of the order-4 solution (equal to the last row of `A`).
pub const B: [f64; STAGES] = A[STAGES - 1];

/// Weights of the embedded order-3 solution.
pub const B_HAT: [f64; STAGES] = [59.0 / 48.0, -17.0 / 96.0, 225.0 / 32.0, -85.0 / 12.0, 0.0];

/// An affine ODE `y' = J(t) y + g(t)` with cheap shifted solves.
pub trait AffineSystem {
    fn dim(&self) -> usize;

    /// Number of quadrature variables carried alongside the state.
    fn quad_dim(&self) -> usize {
        0
    }

    /// `dy = J(t) y + g(t)`.
    fn rhs(&mut self, t: f64, y: &[f64], dy: &mut [f64]);

    /// Solve `(I - c J(t)) x = b + c g(t)`, or `(I - c J(t)) x = b` when
    /// `forced` is false.
    fn solve_shifted(&mut self, t: f64, c: f64, b: &[f64], forced: bool, x: &mut [f64]);

    /// Quadrature integrands at a stage.
    fn quad(&mut self, _t: f64, _y: &[f64], _dy: &[f64], _out: &mut [f64]) {}
}

/// Integrate from `t0` to `t_end`, landing exactly on every time in `stops`.
///
/// `observe(t, y, q)` is called at `t0` and after every accepted step.
#[allow(clippy::too_many_arguments)]
pub fn integrate<S, F>(
    sys: &mut S,
    t0: f64,
    t_end: f64,
    y0: &[f64],
    q0: &[f64],
    stops: &[f64],
    ctl: &StepControl,
    mut observe: F,
) -> Result<StepStats, StepFailure>
where
    S: AffineSystem,
    F: FnMut(f64, &[f64], &[f64]),
{
    let dim = sys.dim();
    let qdim = sys.quad_dim();
    assert_eq!(y0.len(), dim);
    assert_eq!(q0.len(), qdim);

    let mut y = y0.to_vec();
    let mut q = q0.to_vec();
    let mut t = t0;
    observe(t, &y, &q);

    let span = t_end - t0;
    if span <= 0.0 {
        return Ok(StepStats::default());
    }

    let mut k = vec![vec![0.0; dim]; STAGES];
    let mut phi = vec![vec![0.0; qdim]; STAGES];
    let mut stage_y = vec![0.0; dim];
    let mut base = vec![0.0; dim];
    let mut y_new = vec![0.0; dim];
    let mut q_new = vec![0.0; qdim];
    let mut err_raw = vec![0.0; dim];
    let mut err_y = vec![0.0; dim];
    let mut err_q = vec![0.0; qdim];

    let mut h = match ctl.h_init {
        Some(h) => h.min(span),
        None => {
            sys.rhs(t0, &y, &mut base);
            let d0 = scaled_error(&y, &y, &y, ctl);
            let d1 = scaled_error(&base, &y, &y, ctl);
            if d1 <= 1e-10 || d0 <= 1e-10 {
                1e-3 * span
            } else {
                (0.01 * d0 / d1).min(span)
            }
        }
    };

    let mut stops = Stops::new(t0, t_end, stops);
    let mut stats = StepStats::default();
    let mut just_rejected = false;

    while !stops.done() {
        if stats.accepted + stats.rejected >= ctl.max_steps {
            return Err(StepFailure {
                t,
                reason: format!("step budget of {} exhausted", ctl.max_steps),
            });
        }
        let target = stops.upcoming();
        let remaining = target - t;
        let (h_try, lands) = if h >= remaining * (1.0 - 1e-12) {
            (remaining, true)
        } else {
            (h, false)
        };
        if h_try < min_step(t, span) {
            return Err(StepFailure {
                t,
                reason: format!("step size underflow (h = {h_try:.3e})"),
            });
        }

        let hg = h_try * GAMMA;
        for i in 0..STAGES {
            base.copy_from_slice(&y);
            for (j, kj) in k.iter().enumerate().take(i) {
                let a = h_try * A[i][j];
                if a != 0.0 {
                    base.iter_mut().zip(kj).for_each(|(b, kv)| *b += a * kv);
                }
            }
            let ti = t + C[i] * h_try;
            sys.solve_shifted(ti, hg, &base, true, &mut stage_y);
            sys.rhs(ti, &stage_y, &mut k[i]);
            if qdim > 0 {
                sys.quad(ti, &stage_y, &k[i], &mut phi[i]);
            }
        }
        // stiffly accurate: the last stage is the order-4 solution
        y_new.copy_from_slice(&stage_y);

        for (e, idx) in err_raw.iter_mut().zip(0..dim) {
            *e = (0..STAGES)
                .map(|i| (B[i] - B_HAT[i]) * k[i][idx])
                .sum::<f64>()
                * h_try;
        }
        let t_new = if lands { target } else { t + h_try };
        // (I - h gamma J)^-1 filter damps the raw estimate on stiff modes
        sys.solve_shifted(t_new, hg, &err_raw, false, &mut err_y);

        for m in 0..qdim {
            let mut inc = 0.0;
            let mut diff = 0.0;
            for i in 0..STAGES {
                inc += B[i] * phi[i][m];
                diff += (B[i] - B_HAT[i]) * phi[i][m];
            }
            q_new[m] = q[m] + h_try * inc;
            err_q[m] = h_try * diff;
        }

        let err = scaled_error(&err_y, &y, &y_new, ctl).max(scaled_error(&err_q, &q, &q_new, ctl));
        if !err.is_finite() {
            stats.rejected += 1;
            h = h_try * 0.1;
            just_rejected = true;
            continue;
        }

        let mut factor = if err == 0.0 {
            5.0
        } else {
            0.9 * err.powf(-0.25)
        };
        factor = factor.clamp(0.2, 5.0);

        if err <= 1.0 {
            stats.accepted += 1;
            t = t_new;
            std::mem::swap(&mut y, &mut y_new);
            std::mem::swap(&mut q, &mut q_new);
            observe(t, &y, &q);
            if lands {
                stops.advance();
            }
            if just_rejected {
                factor = factor.min(1.0);
            }
            let proposed = h_try * factor;
            h = if lands && factor >= 1.0 {
                proposed.max(h)
            } else {
                proposed
            };
            just_rejected = false;
        } else {
            stats.rejected += 1;
            h = h_try * factor.min(1.0);
            just_rejected = true;
        }
    }
    Ok(stats)
}
