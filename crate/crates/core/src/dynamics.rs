//! Integration of the (N+1)-level birth-death master equation
//!
//! ```text
//! dp_n/dt = w+_{n-1} p_{n-1} + w-_{n+1} p_{n+1} - (w-_n + w+_n) p_n
//! ```
//!
//! with rates following omega(t). Heat, Schnakenberg entropy production and
//! dynamical activity are carried as quadrature variables under the same
//! error control as the populations.

use crate::error::{Error, Result};
use crate::model::{
    initial_state, DickeDistribution, Protocol, RateSet, SystemParams, NEGATIVITY_TOL, NORM_TOL,
};
use crate::solver::sdirk::{self, AffineSystem};
use crate::solver::{tridiag, StepControl, StepStats};
use crate::thermo;

/// Floor applied to probabilities inside logarithms.
const LOG_FLOOR: f64 = 1e-300;

#[derive(Debug, Clone, PartialEq)]
pub struct IntegratorOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_steps: usize,
    /// Sample times. `None` records every accepted step.
    pub output_grid: Option<Vec<f64>>,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        IntegratorOptions {
            rel_tol: 1e-8,
            abs_tol: 1e-12,
            max_steps: 500_000,
            output_grid: None,
        }
    }
}

impl IntegratorOptions {
    pub fn with_grid(mut self, grid: Vec<f64>) -> Self {
        self.output_grid = Some(grid);
        self
    }

    pub fn with_tolerances(mut self, rel_tol: f64, abs_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self.abs_tol = abs_tol;
        self
    }

    /// `points` evenly spaced samples on [t0, t1], endpoints included.
    pub fn uniform_grid(t0: f64, t1: f64, points: usize) -> Vec<f64> {
        let points = points.max(2);
        (0..points)
            .map(|i| {
                if i == points - 1 {
                    t1
                } else {
                    t0 + (t1 - t0) * i as f64 / (points - 1) as f64
                }
            })
            .collect()
    }

    pub fn validate(&self, t0: f64, t1: f64) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(Error::config("tolerances must be > 0"));
        }
        if self.max_steps == 0 {
            return Err(Error::config("max_steps must be > 0"));
        }
        if let Some(grid) = &self.output_grid {
            if grid.windows(2).any(|w| w[1] < w[0]) {
                return Err(Error::config("output grid must be sorted"));
            }
            if grid.iter().any(|&t| t < t0 || t > t1) {
                return Err(Error::config(format!(
                    "output grid must lie inside [{t0}, {t1}]"
                )));
            }
        }
        Ok(())
    }

    pub(crate) fn step_control(&self) -> StepControl {
        StepControl {
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            max_steps: self.max_steps,
            h_init: None,
        }
    }
}

/// Sampled solution of the birth-death chain.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub n_qubits: usize,
    pub times: Vec<f64>,
    pub states: Vec<DickeDistribution>,
    /// Heat released to the bath since the first sample.
    pub heat_acc: Vec<f64>,
    /// Entropy production since the first sample (k_B = 1).
    pub ep_acc: Vec<f64>,
    /// Expected number of jumps since the first sample.
    pub activity_integral: Vec<f64>,
    pub stats: StepStats,
}

impl Trajectory {
    fn empty(n_qubits: usize) -> Self {
        Trajectory {
            n_qubits,
            times: Vec::new(),
            states: Vec::new(),
            heat_acc: Vec::new(),
            ep_acc: Vec::new(),
            activity_integral: Vec::new(),
            stats: StepStats::default(),
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn first_state(&self) -> &DickeDistribution {
        &self.states[0]
    }

    pub fn final_state(&self) -> &DickeDistribution {
        self.states
            .last()
            .expect("trajectory has at least one sample")
    }

    pub fn start_time(&self) -> f64 {
        self.times[0]
    }

    pub fn end_time(&self) -> f64 {
        *self
            .times
            .last()
            .expect("trajectory has at least one sample")
    }

    pub fn total_heat(&self) -> f64 {
        *self.heat_acc.last().unwrap_or(&0.0)
    }

    pub fn total_entropy_production(&self) -> f64 {
        *self.ep_acc.last().unwrap_or(&0.0)
    }

    pub fn total_activity(&self) -> f64 {
        *self.activity_integral.last().unwrap_or(&0.0)
    }

    pub fn epsilon_series(&self) -> Vec<f64> {
        self.states.iter().map(thermo::error_probability).collect()
    }

    pub fn zeta_series(&self) -> Vec<f64> {
        self.states.iter().map(thermo::zeta).collect()
    }

    fn push(&mut self, t: f64, p: &[f64], q: &[f64]) {
        self.times.push(t);
        self.states.push(DickeDistribution::from_raw(p.to_vec()));
        self.heat_acc.push(q[0]);
        self.ep_acc.push(q[1]);
        self.activity_integral.push(q[2]);
    }
}

/// d p / dt for a given rate set.
pub fn rhs(p: &DickeDistribution, rates: &RateSet) -> Result<Vec<f64>> {
    if p.n_qubits() != rates.n_qubits() {
        return Err(Error::domain(format!(
            "distribution has N = {}, rates have N = {}",
            p.n_qubits(),
            rates.n_qubits()
        )));
    }
    let mut dp = vec![0.0; p.probs().len()];
    apply_generator(rates, p.probs(), &mut dp);
    Ok(dp)
}

fn apply_generator(rates: &RateSet, p: &[f64], dp: &mut [f64]) {
    let n_q = p.len() - 1;
    for n in 0..=n_q {
        let mut v = -rates.escape(n) * p[n];
        if n > 0 {
            v += rates.w_plus[n - 1] * p[n - 1];
        }
        if n < n_q {
            v += rates.w_minus[n + 1] * p[n + 1];
        }
        dp[n] = v;
    }
}

/// Instantaneous (heat rate, entropy production rate, activity rate).
pub fn flux_rates(
    rates: &RateSet,
    beta: f64,
    omega: f64,
    p: &[f64],
    dp: &[f64],
) -> (f64, f64, f64) {
    let n_q = p.len() - 1;
    let dn: f64 = dp.iter().enumerate().map(|(n, v)| n as f64 * v).sum();
    let heat = -omega * dn;

    // ln(J+/J-) = ln(gamma_down/gamma_up) + ln(p_{n+1}/p_n) = beta omega + ...
    let bias = beta * omega;
    let mut ep = 0.0;
    for n in 0..n_q {
        let down = rates.w_minus[n + 1] * p[n + 1];
        let up = rates.w_plus[n] * p[n];
        let net = down - up;
        if net != 0.0 {
            ep += net * (bias + p[n + 1].max(LOG_FLOOR).ln() - p[n].max(LOG_FLOOR).ln());
        }
    }
    let activity = (0..=n_q).map(|n| rates.escape(n) * p[n]).sum();
    (heat, ep, activity)
}

struct BirthDeath<'a> {
    params: &'a SystemParams,
    protocol: &'a Protocol,
    rates: RateSet,
    rates_t: f64,
    lower: Vec<f64>,
    diag: Vec<f64>,
    upper: Vec<f64>,
    rhs_buf: Vec<f64>,
    scratch: Vec<f64>,
}

impl<'a> BirthDeath<'a> {
    fn new(params: &'a SystemParams, protocol: &'a Protocol) -> Self {
        let dim = params.n_qubits + 1;
        BirthDeath {
            params,
            protocol,
            rates: RateSet::zeros(params.n_qubits),
            rates_t: f64::NAN,
            lower: vec![0.0; dim],
            diag: vec![0.0; dim],
            upper: vec![0.0; dim],
            rhs_buf: vec![0.0; dim],
            scratch: vec![0.0; dim],
        }
    }

    fn rates_at(&mut self, t: f64) {
        if self.rates_t != t {
            self.rates.update(self.params, self.protocol.eval(t));
            self.rates_t = t;
        }
    }
}

impl AffineSystem for BirthDeath<'_> {
    fn dim(&self) -> usize {
        self.params.n_qubits + 1
    }

    fn quad_dim(&self) -> usize {
        3
    }

    fn rhs(&mut self, t: f64, y: &[f64], dy: &mut [f64]) {
        self.rates_at(t);
        apply_generator(&self.rates, y, dy);
    }

    fn solve_shifted(&mut self, t: f64, c: f64, b: &[f64], _forced: bool, x: &mut [f64]) {
        self.rates_at(t);
        let n_q = self.params.n_qubits;
        for n in 0..=n_q {
            self.diag[n] = 1.0 + c * self.rates.escape(n);
            self.lower[n] = if n > 0 {
                -c * self.rates.w_plus[n - 1]
            } else {
                0.0
            };
            self.upper[n] = if n < n_q {
                -c * self.rates.w_minus[n + 1]
            } else {
                0.0
            };
        }
        self.rhs_buf.copy_from_slice(b);
        tridiag::solve(
            &self.lower,
            &self.diag,
            &self.upper,
            &self.rhs_buf,
            x,
            &mut self.scratch,
        );
    }

    fn quad(&mut self, t: f64, y: &[f64], dy: &[f64], out: &mut [f64]) {
        self.rates_at(t);
        let omega = self.protocol.eval(t);
        let (heat, ep, act) = flux_rates(&self.rates, self.params.beta, omega, y, dy);
        out[0] = heat;
        out[1] = ep;
        out[2] = act;
    }
}

/// Integrate from the uniform initial state over [0, tau].
pub fn integrate(
    params: &SystemParams,
    protocol: &Protocol,
    opts: &IntegratorOptions,
) -> Result<Trajectory> {
    let start = initial_state(params.n_qubits)?;
    integrate_from(params, protocol, 0.0, &start, opts)
}

/// Integrate from an arbitrary state at `t0` to the end of the protocol.
/// Accumulators restart at zero.
pub fn integrate_from(
    params: &SystemParams,
    protocol: &Protocol,
    t0: f64,
    start: &DickeDistribution,
    opts: &IntegratorOptions,
) -> Result<Trajectory> {
    params.validate()?;
    protocol.validate()?;
    if (protocol.duration - params.tau).abs() > 1e-12 * params.tau {
        return Err(Error::config(format!(
            "protocol duration {} differs from tau {}",
            protocol.duration, params.tau
        )));
    }
    if start.n_qubits() != params.n_qubits {
        return Err(Error::domain(
            "initial state has the wrong number of levels",
        ));
    }
    if !(0.0..params.tau).contains(&t0) {
        return Err(Error::domain(format!("start time {t0} outside [0, tau)")));
    }
    let t_end = params.tau;
    opts.validate(t0, t_end)?;

    let grid: Option<Vec<f64>> = opts.output_grid.as_ref().map(|g| {
        let mut g: Vec<f64> = g.iter().copied().filter(|&t| t > t0).collect();
        g.push(t_end);
        g.dedup();
        g
    });
    let mut stops = protocol.breakpoints();
    if let Some(g) = &grid {
        stops.extend_from_slice(g);
    }

    let mut sys = BirthDeath::new(params, protocol);
    let mut traj = Trajectory::empty(params.n_qubits);
    let mut next_sample = 0usize;
    let result = sdirk::integrate(
        &mut sys,
        t0,
        t_end,
        start.probs(),
        &[0.0; 3],
        &stops,
        &opts.step_control(),
        |t, y, q| match &grid {
            None => traj.push(t, y, q),
            Some(g) => {
                if t == t0 {
                    traj.push(t, y, q);
                } else if next_sample < g.len() && t == g[next_sample] {
                    traj.push(t, y, q);
                    next_sample += 1;
                }
            }
        },
    );

    match result {
        Ok(stats) => traj.stats = stats,
        Err(fail) => {
            return Err(Error::Integration {
                t: fail.t,
                reason: fail.reason,
                partial: Some(Box::new(traj)),
            })
        }
    }
    check_trajectory(&traj)?;
    Ok(traj)
}

fn check_trajectory(traj: &Trajectory) -> Result<()> {
    for (t, s) in traj.times.iter().zip(&traj.states) {
        let drift = (s.total() - 1.0).abs();
        if drift.is_nan() || drift > NORM_TOL {
            return Err(Error::Integrity(format!(
                "probability sum drifted by {drift:.3e} at t = {t}"
            )));
        }
        let min = s.min();
        if min < -NEGATIVITY_TOL {
            return Err(Error::Integrity(format!(
                "level weight {min:.3e} at t = {t}"
            )));
        }
    }
    Ok(())
}

/// Smooth interpolant of zeta(t) built from a trajectory: cubic Hermite
/// through the samples with slopes taken from the master equation.
#[derive(Debug, Clone)]
pub struct ZetaInterpolant {
    times: Vec<f64>,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl ZetaInterpolant {
    pub fn from_trajectory(
        traj: &Trajectory,
        params: &SystemParams,
        protocol: &Protocol,
    ) -> Result<Self> {
        let n_q = params.n_qubits;
        if traj.n_qubits != n_q {
            return Err(Error::domain("trajectory and params disagree on N"));
        }
        let norm = (n_q * n_q) as f64;
        let mut rates = RateSet::zeros(n_q);
        let mut dp = vec![0.0; n_q + 1];
        let mut slopes = Vec::with_capacity(traj.len());
        for (t, s) in traj.times.iter().zip(&traj.states) {
            rates.update(params, protocol.eval(*t));
            apply_generator(&rates, s.probs(), &mut dp);
            slopes.push(
                dp.iter()
                    .enumerate()
                    .map(|(n, v)| (n * n) as f64 * v)
                    .sum::<f64>()
                    / norm,
            );
        }
        Ok(ZetaInterpolant {
            times: traj.times.clone(),
            values: traj.zeta_series(),
            slopes,
        })
    }

    pub fn at(&self, t: f64) -> f64 {
        let k = self.times.partition_point(|&x| x <= t);
        if k == 0 {
            return self.values[0];
        }
        if k >= self.times.len() {
            return *self.values.last().unwrap();
        }
        let (t0, t1) = (self.times[k - 1], self.times[k]);
        let h = t1 - t0;
        let s = (t - t0) / h;
        let (y0, y1) = (self.values[k - 1], self.values[k]);
        let (m0, m1) = (self.slopes[k - 1] * h, self.slopes[k] * h);
        let s2 = s * s;
        let s3 = s2 * s;
        (2.0 * s3 - 3.0 * s2 + 1.0) * y0
            + (s3 - 2.0 * s2 + s) * m0
            + (-2.0 * s3 + 3.0 * s2) * y1
            + (s3 - s2) * m1
    }
}

/// Sampled solution of the scalar error-probability equation.
#[derive(Debug, Clone, PartialEq)]
pub struct EpsilonPath {
    pub times: Vec<f64>,
    pub epsilon: Vec<f64>,
}

impl EpsilonPath {
    /// Linear interpolation between samples.
    pub fn at(&self, t: f64) -> f64 {
        let k = self.times.partition_point(|&x| x <= t);
        if k == 0 {
            return self.epsilon[0];
        }
        if k >= self.times.len() {
            return *self.epsilon.last().unwrap();
        }
        let (t0, t1) = (self.times[k - 1], self.times[k]);
        let w = (t - t0) / (t1 - t0);
        self.epsilon[k - 1] * (1.0 - w) + self.epsilon[k] * w
    }

    /// Largest |eps_ode(t) - eps_full(t)| over the trajectory's samples.
    pub fn max_deviation(&self, traj: &Trajectory) -> f64 {
        traj.times
            .iter()
            .zip(traj.epsilon_series())
            .map(|(&t, e)| (self.at(t) - e).abs())
            .fold(0.0, f64::max)
    }
}

struct EpsilonOde<'a, Z: Fn(f64) -> f64> {
    params: &'a SystemParams,
    protocol: &'a Protocol,
    zeta: Z,
}

impl<Z: Fn(f64) -> f64> EpsilonOde<'_, Z> {
    /// eps' = slope * eps + forcing
    fn coefficients(&self, t: f64) -> (f64, f64) {
        let p = self.params;
        let (_, _, delta) = crate::model::bath_rates(p.beta, p.gamma0, self.protocol.eval(t));
        let n = p.n_qubits as f64;
        let slope = -(p.gamma0 + n * delta);
        let forcing = 0.5 * (p.gamma0 - delta) + n * delta * (self.zeta)(t);
        (slope, forcing)
    }
}

impl<Z: Fn(f64) -> f64> AffineSystem for EpsilonOde<'_, Z> {
    fn dim(&self) -> usize {
        1
    }

    fn rhs(&mut self, t: f64, y: &[f64], dy: &mut [f64]) {
        let (a, g) = self.coefficients(t);
        dy[0] = a * y[0] + g;
    }

    fn solve_shifted(&mut self, t: f64, c: f64, b: &[f64], forced: bool, x: &mut [f64]) {
        let (a, g) = self.coefficients(t);
        let g = if forced { g } else { 0.0 };
        x[0] = (b[0] + c * g) / (1.0 - c * a);
    }
}

/// Integrate `eps' = (G0 - D)/2 - G0 eps - N D (eps - zeta)` from
/// eps(0) = 1/2 with zeta(t) supplied externally.
pub fn integrate_epsilon_ode<Z>(
    params: &SystemParams,
    protocol: &Protocol,
    zeta_source: Z,
    opts: &IntegratorOptions,
) -> Result<EpsilonPath>
where
    Z: Fn(f64) -> f64,
{
    params.validate()?;
    opts.validate(0.0, params.tau)?;
    let mut stops = protocol.breakpoints();
    if let Some(g) = &opts.output_grid {
        stops.extend_from_slice(g);
    }
    let mut sys = EpsilonOde {
        params,
        protocol,
        zeta: zeta_source,
    };
    let mut path = EpsilonPath {
        times: Vec::new(),
        epsilon: Vec::new(),
    };
    sdirk::integrate(
        &mut sys,
        0.0,
        params.tau,
        &[0.5],
        &[],
        &stops,
        &opts.step_control(),
        |t, y, _| {
            path.times.push(t);
            path.epsilon.push(y[0]);
        },
    )
    .map_err(|f| Error::Integration {
        t: f.t,
        reason: f.reason,
        partial: None,
    })?;
    Ok(path)
}

/// Run the full chain, then the scalar equation driven by the chain's zeta,
/// and return max |eps_ode - eps_full| over the chain's samples.
pub fn epsilon_crosscheck(
    params: &SystemParams,
    protocol: &Protocol,
    opts: &IntegratorOptions,
) -> Result<f64> {
    let traj = integrate(params, protocol, opts)?;
    let zeta = ZetaInterpolant::from_trajectory(&traj, params, protocol)?;
    let eps_opts = opts.clone().with_grid(traj.times.clone());
    let path = integrate_epsilon_ode(params, protocol, |t| zeta.at(t), &eps_opts)?;
    Ok(path.max_deviation(&traj))
}
