//! Dormand-Prince 5(4) with first-same-as-last stage reuse.

use super::{min_step, scaled_error, StepControl, StepFailure, StepStats, Stops};

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];

const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];

/// b - b_hat
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Integrate `y' = f(t, y)` from `t0` to `t_end`, landing exactly on every
/// time in `stops`. `observe(t, y)` is called at `t0` and after each
/// accepted step.
pub fn integrate<F, O>(
    mut f: F,
    t0: f64,
    t_end: f64,
    y0: &[f64],
    stops: &[f64],
    ctl: &StepControl,
    mut observe: O,
) -> Result<StepStats, StepFailure>
where
    F: FnMut(f64, &[f64], &mut [f64]),
    O: FnMut(f64, &[f64]),
{
    let dim = y0.len();
    let mut y = y0.to_vec();
    let mut t = t0;
    observe(t, &y);
    let span = t_end - t0;
    if span <= 0.0 {
        return Ok(StepStats::default());
    }

    let mut k = vec![vec![0.0; dim]; 7];
    let mut tmp = vec![0.0; dim];
    let mut err = vec![0.0; dim];
    f(t, &y, &mut k[0]);

    let mut h = match ctl.h_init {
        Some(h) => h.min(span),
        None => {
            let d0 = scaled_error(&y, &y, &y, ctl);
            let d1 = scaled_error(&k[0], &y, &y, ctl);
            if d0 <= 1e-10 || d1 <= 1e-10 {
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

        for s in 1..7 {
            tmp.copy_from_slice(&y);
            for j in 0..s {
                let a = h_try * A[s][j];
                if a != 0.0 {
                    tmp.iter_mut().zip(&k[j]).for_each(|(v, kv)| *v += a * kv);
                }
            }
            f(t + C[s] * h_try, &tmp, &mut k[s]);
        }
        // tmp now holds the 5th-order solution (stage 7 argument)
        for (idx, e) in err.iter_mut().enumerate() {
            *e = h_try * (0..7).map(|s| E[s] * k[s][idx]).sum::<f64>();
        }
        let e = scaled_error(&err, &y, &tmp, ctl);
        if !e.is_finite() {
            stats.rejected += 1;
            h = h_try * 0.1;
            just_rejected = true;
            continue;
        }
        let mut factor = if e == 0.0 { 5.0 } else { 0.9 * e.powf(-0.2) };
        factor = factor.clamp(0.2, 5.0);

        if e <= 1.0 {
            stats.accepted += 1;
            t = if lands { target } else { t + h_try };
            std::mem::swap(&mut y, &mut tmp);
            k.swap(0, 6);
            observe(t, &y);
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

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator() {
        let ctl = StepControl {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            ..Default::default()
        };
        let mut last = vec![];
        integrate(
            |_, y, dy| {
                dy[0] = y[1];
                dy[1] = -y[0];
            },
            0.0,
            std::f64::consts::PI,
            &[1.0, 0.0],
            &[1.0],
            &ctl,
            |_, y| last = y.to_vec(),
        )
        .unwrap();
        assert!((last[0] + 1.0).abs() < 1e-8);
        assert!(last[1].abs() < 1e-8);
    }

    #[test]
    fn rows_consistent() {
        for s in 1..7 {
            let sum: f64 = A[s].iter().sum();
            assert!((sum - C[s]).abs() < 1e-14, "row {s}");
        }
        assert!(E.iter().sum::<f64>().abs() < 1e-15);
    }
}
