//! Physical configuration, driving protocols and the Dicke-level distribution.
//!
//! Natural units throughout: hbar = k_B = 1, so energies are measured in the
//! same units as 1/beta and rates in the same units as gamma0.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Allowed drift of the total probability away from one.
pub const NORM_TOL: f64 = 1e-9;
/// Most negative level weight tolerated before it is treated as an
/// integration error.
pub const NEGATIVITY_TOL: f64 = 1e-12;

/// Register size, bath temperature, bare coupling and protocol duration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    pub n_qubits: usize,
    pub beta: f64,
    pub gamma0: f64,
    pub tau: f64,
}

impl SystemParams {
    pub fn new(n_qubits: usize, beta: f64, gamma0: f64, tau: f64) -> Result<Self> {
        let params = SystemParams {
            n_qubits,
            beta,
            gamma0,
            tau,
        };
        params.validate()?;
        Ok(params)
    }

    /// beta = gamma0 = tau = 1, the setting used for the scaling figures.
    pub fn unit(n_qubits: usize) -> Result<Self> {
        Self::new(n_qubits, 1.0, 1.0, 1.0)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_qubits < 1 {
            return Err(Error::config("n_qubits must be at least 1"));
        }
        for (name, v) in [
            ("beta", self.beta),
            ("gamma0", self.gamma0),
            ("tau", self.tau),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::config(format!(
                    "{name} must be finite and > 0, got {v}"
                )));
            }
        }
        Ok(())
    }

    /// Same physics, different register size.
    pub fn with_n(&self, n_qubits: usize) -> Result<Self> {
        Self::new(n_qubits, self.beta, self.gamma0, self.tau)
    }

    pub fn with_tau(&self, tau: f64) -> Result<Self> {
        Self::new(self.n_qubits, self.beta, self.gamma0, tau)
    }
}

/// Shape of the level-splitting schedule omega(t).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ProtocolKind {
    /// omega(t) = omega for t in [0, tau]; the jump from zero happens just
    /// before t = 0 and exchanges work only.
    Quench { omega: f64 },
    /// omega(t) = rate_coeff * t.
    Linear { rate_coeff: f64 },
    /// omega(t) = scale * (exp(rate * t) - 1).
    Exponential { scale: f64, rate: f64 },
    /// Piecewise-linear interpolation through (t, omega) points.
    Tabulated { points: Vec<(f64, f64)> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Protocol {
    #[serde(flatten)]
    pub kind: ProtocolKind,
    pub duration: f64,
}

impl Protocol {
    pub fn new(kind: ProtocolKind, duration: f64) -> Result<Self> {
        let protocol = Protocol { kind, duration };
        protocol.validate()?;
        Ok(protocol)
    }

    pub fn quench(omega: f64, duration: f64) -> Result<Self> {
        Self::new(ProtocolKind::Quench { omega }, duration)
    }

    pub fn linear(rate_coeff: f64, duration: f64) -> Result<Self> {
        Self::new(ProtocolKind::Linear { rate_coeff }, duration)
    }

    pub fn exponential(scale: f64, rate: f64, duration: f64) -> Result<Self> {
        Self::new(ProtocolKind::Exponential { scale, rate }, duration)
    }

    pub fn tabulated(points: Vec<(f64, f64)>, duration: f64) -> Result<Self> {
        Self::new(ProtocolKind::Tabulated { points }, duration)
    }

    /// Zero splitting throughout. The register stays uniform.
    pub fn idle(duration: f64) -> Result<Self> {
        Self::quench(0.0, duration)
    }

    /// omega(t) = 1/beta.
    pub fn benchmark_quench(params: &SystemParams) -> Self {
        Self::quench(1.0 / params.beta, params.tau).expect("valid params give a valid quench")
    }

    /// omega(t) = gamma0 t / beta.
    pub fn benchmark_linear(params: &SystemParams) -> Self {
        Self::linear(params.gamma0 / params.beta, params.tau)
            .expect("valid params give a valid linear ramp")
    }

    /// omega(t) = (exp(gamma0 t) - 1) / beta.
    pub fn benchmark_exponential(params: &SystemParams) -> Self {
        Self::exponential(1.0 / params.beta, params.gamma0, params.tau)
            .expect("valid params give a valid exponential ramp")
    }

    /// The three reference schedules: quench, linear, exponential.
    pub fn benchmark_set(params: &SystemParams) -> Vec<Self> {
        vec![
            Self::benchmark_quench(params),
            Self::benchmark_linear(params),
            Self::benchmark_exponential(params),
        ]
    }

    pub fn validate(&self) -> Result<()> {
        let tau = self.duration;
        if !(tau.is_finite() && tau > 0.0) {
            return Err(Error::config(format!(
                "protocol duration must be > 0, got {tau}"
            )));
        }
        let finite = |v: f64, what: &str| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::config(format!("{what} must be finite")))
            }
        };
        match &self.kind {
            ProtocolKind::Quench { omega } => {
                finite(*omega, "quench omega")?;
                if *omega < 0.0 {
                    return Err(Error::config("quench omega must be >= 0"));
                }
            }
            ProtocolKind::Linear { rate_coeff } => {
                finite(*rate_coeff, "linear rate_coeff")?;
                if *rate_coeff < 0.0 {
                    return Err(Error::config("linear rate_coeff must be >= 0"));
                }
            }
            ProtocolKind::Exponential { scale, rate } => {
                finite(*scale, "exponential scale")?;
                finite(*rate, "exponential rate")?;
                if scale * rate < 0.0 {
                    return Err(Error::config(
                        "exponential protocol would go negative: scale and rate need the same sign",
                    ));
                }
                if !(scale * (rate * tau).exp_m1()).is_finite() {
                    return Err(Error::config("exponential protocol overflows on [0, tau]"));
                }
            }
            ProtocolKind::Tabulated { points } => {
                if points.len() < 2 {
                    return Err(Error::config(
                        "tabulated protocol needs at least two points",
                    ));
                }
                for &(t, w) in points {
                    finite(t, "tabulated time")?;
                    finite(w, "tabulated omega")?;
                    if w < 0.0 {
                        return Err(Error::config(format!("tabulated omega < 0 at t = {t}")));
                    }
                }
                if points.windows(2).any(|w| w[1].0 <= w[0].0) {
                    return Err(Error::config("tabulated times must be strictly increasing"));
                }
                if points[0].0 != 0.0 {
                    return Err(Error::config("tabulated protocol must start at t = 0"));
                }
                let last = points[points.len() - 1].0;
                if (last - tau).abs() > 1e-12 * tau.max(1.0) {
                    return Err(Error::config(format!(
                        "tabulated protocol ends at t = {last}, duration is {tau}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            ProtocolKind::Quench { .. } => "quench",
            ProtocolKind::Linear { .. } => "linear",
            ProtocolKind::Exponential { .. } => "exponential",
            ProtocolKind::Tabulated { .. } => "tabulated",
        }
    }

    /// omega(t) for t in [0, tau].
    ///
    /// The quench value is returned at t = 0 as well, i.e. the schedule is
    /// taken right-continuous at the origin.
    pub fn omega_at(&self, t: f64) -> Result<f64> {
        if !(0.0..=self.duration).contains(&t) {
            return Err(Error::domain(format!(
                "t = {t} outside protocol window [0, {}]",
                self.duration
            )));
        }
        Ok(self.eval(t))
    }

    /// Evaluation without the window check. `t` is clamped into [0, tau] so
    /// round-off in stage times cannot leak outside.
    pub(crate) fn eval(&self, t: f64) -> f64 {
        let t = t.clamp(0.0, self.duration);
        match &self.kind {
            ProtocolKind::Quench { omega } => *omega,
            ProtocolKind::Linear { rate_coeff } => rate_coeff * t,
            ProtocolKind::Exponential { scale, rate } => scale * (rate * t).exp_m1(),
            ProtocolKind::Tabulated { points } => interpolate(points, t),
        }
    }

    /// lim_{t -> 0+} omega(t).
    pub fn omega_zero_plus(&self) -> f64 {
        match &self.kind {
            ProtocolKind::Quench { omega } => *omega,
            ProtocolKind::Linear { .. } | ProtocolKind::Exponential { .. } => 0.0,
            ProtocolKind::Tabulated { points } => points[0].1,
        }
    }

    /// Whether omega(t) is non-decreasing on (0, tau].
    pub fn is_monotone_increasing(&self) -> bool {
        match &self.kind {
            ProtocolKind::Quench { .. } => true,
            ProtocolKind::Linear { rate_coeff } => *rate_coeff >= 0.0,
            ProtocolKind::Exponential { scale, rate } => scale * rate >= 0.0,
            ProtocolKind::Tabulated { points } => points.windows(2).all(|w| w[1].1 >= w[0].1),
        }
    }

    /// Interior times where omega(t) has a kink. Integrators end steps there.
    pub fn breakpoints(&self) -> Vec<f64> {
        match &self.kind {
            ProtocolKind::Tabulated { points } if points.len() > 2 => {
                points[1..points.len() - 1].iter().map(|p| p.0).collect()
            }
            _ => Vec::new(),
        }
    }
}

fn interpolate(points: &[(f64, f64)], t: f64) -> f64 {
    let idx = points.partition_point(|p| p.0 <= t);
    if idx == 0 {
        return points[0].1;
    }
    if idx == points.len() {
        return points[points.len() - 1].1;
    }
    let (t0, w0) = points[idx - 1];
    let (t1, w1) = points[idx];
    w0 + (w1 - w0) * (t - t0) / (t1 - t0)
}

/// Degeneracy factor n (N - n + 1) shared by the link between Dicke levels
/// n - 1 and n.
#[inline]
pub fn link_factor(n_qubits: usize, n: usize) -> f64 {
    debug_assert!(n >= 1 && n <= n_qubits);
    (n * (n_qubits - n + 1)) as f64
}

/// Bath rates at a given splitting and the level-resolved jump rates they
/// induce on the Dicke ladder.
#[derive(Debug, Clone, PartialEq)]
pub struct RateSet {
    pub gamma_down: f64,
    pub gamma_up: f64,
    /// gamma_down - gamma_up
    pub delta: f64,
    /// `w_minus[n]`: rate of n -> n - 1.
    pub w_minus: Vec<f64>,
    /// `w_plus[n]`: rate of n -> n + 1.
    pub w_plus: Vec<f64>,
}

impl RateSet {
    pub fn zeros(n_qubits: usize) -> Self {
        RateSet {
            gamma_down: 0.0,
            gamma_up: 0.0,
            delta: 0.0,
            w_minus: vec![0.0; n_qubits + 1],
            w_plus: vec![0.0; n_qubits + 1],
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.w_minus.len() - 1
    }

    /// Overwrite in place; the integrator calls this at every stage.
    pub fn update(&mut self, params: &SystemParams, omega: f64) {
        let (down, up, delta) = bath_rates(params.beta, params.gamma0, omega);
        self.gamma_down = down;
        self.gamma_up = up;
        self.delta = delta;
        let n_q = self.n_qubits();
        for n in 0..=n_q {
            self.w_minus[n] = if n == 0 {
                0.0
            } else {
                link_factor(n_q, n) * down
            };
            self.w_plus[n] = if n == n_q {
                0.0
            } else {
                link_factor(n_q, n + 1) * up
            };
        }
    }

    /// Total escape rate from level n.
    #[inline]
    pub fn escape(&self, n: usize) -> f64 {
        self.w_minus[n] + self.w_plus[n]
    }
}

/// (gamma_down, gamma_up, delta) at splitting `omega`.
pub fn bath_rates(beta: f64, gamma0: f64, omega: f64) -> (f64, f64, f64) {
    let boltz = (-beta * omega).exp();
    let down = gamma0 / (1.0 + boltz);
    let up = gamma0 * boltz / (1.0 + boltz);
    let delta = gamma0 * (0.5 * beta * omega).tanh();
    (down, up, delta)
}

pub fn build_rates(params: &SystemParams, omega: f64) -> Result<RateSet> {
    if !(omega.is_finite() && omega >= 0.0) {
        return Err(Error::domain(format!(
            "omega must be finite and >= 0, got {omega}"
        )));
    }
    let mut rates = RateSet::zeros(params.n_qubits);
    rates.update(params, omega);
    Ok(rates)
}

/// Populations of the N + 1 Dicke levels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DickeDistribution {
    n_qubits: usize,
    p: Vec<f64>,
}

impl DickeDistribution {
    pub fn new(p: Vec<f64>) -> Result<Self> {
        if p.len() < 2 {
            return Err(Error::domain(
                "distribution needs at least two levels (N >= 1)",
            ));
        }
        let d = DickeDistribution {
            n_qubits: p.len() - 1,
            p,
        };
        d.check()?;
        Ok(d)
    }

    /// Construction without the invariant check. Used for raw integrator
    /// output, which is checked separately.
    pub(crate) fn from_raw(p: Vec<f64>) -> Self {
        DickeDistribution {
            n_qubits: p.len() - 1,
            p,
        }
    }

    /// p_n = delta_{n0}.
    pub fn ground(n_qubits: usize) -> Result<Self> {
        if n_qubits < 1 {
            return Err(Error::domain("n_qubits must be at least 1"));
        }
        let mut p = vec![0.0; n_qubits + 1];
        p[0] = 1.0;
        Ok(Self::from_raw(p))
    }

    /// Geometric equilibrium p_n ~ exp(-n beta omega).
    pub fn thermal(n_qubits: usize, beta: f64, omega: f64) -> Result<Self> {
        if n_qubits < 1 {
            return Err(Error::domain("n_qubits must be at least 1"));
        }
        let x = beta * omega;
        let mut p: Vec<f64> = (0..=n_qubits).map(|n| (-(n as f64) * x).exp()).collect();
        let z: f64 = p.iter().sum();
        p.iter_mut().for_each(|v| *v /= z);
        Ok(Self::from_raw(p))
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn probs(&self) -> &[f64] {
        &self.p
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.p
    }

    pub fn total(&self) -> f64 {
        self.p.iter().sum()
    }

    pub fn min(&self) -> f64 {
        self.p.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Normalisation and positivity within [`NORM_TOL`] / [`NEGATIVITY_TOL`].
    pub fn check(&self) -> Result<()> {
        let drift = (self.total() - 1.0).abs();
        if drift.is_nan() || drift > NORM_TOL {
            return Err(Error::Integrity(format!(
                "probability sum drifted by {drift:.3e} (limit {NORM_TOL:e})"
            )));
        }
        let min = self.min();
        if min < -NEGATIVITY_TOL {
            return Err(Error::Integrity(format!(
                "negative level weight {min:.3e} (limit -{NEGATIVITY_TOL:e})"
            )));
        }
        Ok(())
    }

    /// Shannon entropy -sum p ln p, with tiny negative excursions ignored.
    pub fn shannon_entropy(&self) -> f64 {
        self.p
            .iter()
            .filter(|&&v| v > 0.0)
            .map(|&v| -v * v.ln())
            .sum()
    }
}

/// Uniform weight 1/(N+1) on every Dicke level: each qubit is excited with
/// probability one half.
pub fn initial_state(n_qubits: usize) -> Result<DickeDistribution> {
    if n_qubits < 1 {
        return Err(Error::domain("n_qubits must be at least 1"));
    }
    let w = 1.0 / (n_qubits as f64 + 1.0);
    Ok(DickeDistribution::from_raw(vec![w; n_qubits + 1]))
}
