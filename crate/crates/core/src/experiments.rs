//! Parameter sweeps over register size and protocol.

use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{self, BoundReport};
use crate::dynamics::{self, IntegratorOptions};
use crate::error::{Error, Result};
use crate::model::{Protocol, SystemParams};
use crate::thermo::{self, ResetSummary};

/// Smallest N used by default when fitting the large-N exponent.
pub const FIT_MIN_N: usize = 64;

/// Residual error probability below which a run counts as a perfect reset.
pub const PERFECT_RESET_EPS: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub n_values: Vec<usize>,
    /// Rows are keyed by [`Protocol::kind_name`], so at most one protocol of
    /// each kind.
    pub protocols: Vec<Protocol>,
    /// `n_qubits` is replaced per row.
    pub params_base: SystemParams,
    pub options: IntegratorOptions,
}

/// Powers of two from 1 to `n_max` inclusive.
pub fn powers_of_two(n_max: usize) -> Vec<usize> {
    std::iter::successors(Some(1usize), |n| n.checked_mul(2))
        .take_while(|&n| n <= n_max)
        .collect()
}

impl SweepSpec {
    /// N = 1, 2, 4, ..., 1024 with the three benchmark schedules.
    pub fn benchmark(params_base: SystemParams) -> Self {
        SweepSpec {
            n_values: powers_of_two(1024),
            protocols: Protocol::benchmark_set(&params_base),
            params_base,
            options: IntegratorOptions::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params_base.validate()?;
        self.options.validate(0.0, self.params_base.tau)?;
        if self.n_values.is_empty() || self.n_values[0] < 1 {
            return Err(Error::config("sweep needs at least one N >= 1"));
        }
        if self.n_values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::config("sweep N values must be strictly increasing"));
        }
        if self.protocols.is_empty() {
            return Err(Error::config("sweep needs at least one protocol"));
        }
        for (i, p) in self.protocols.iter().enumerate() {
            p.validate()?;
            if self.protocols[..i]
                .iter()
                .any(|q| q.kind_name() == p.kind_name())
            {
                return Err(Error::config(format!(
                    "two {} protocols in one sweep",
                    p.kind_name()
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRecord {
    pub summary: ResetSummary,
    pub bounds: Vec<BoundReport>,
}

#[derive(Debug)]
pub struct SweepRow {
    pub n_qubits: usize,
    pub protocol: String,
    pub params: SystemParams,
    pub result: Result<RunRecord>,
}

impl SweepRow {
    pub fn summary(&self) -> Option<&ResetSummary> {
        self.result.as_ref().ok().map(|r| &r.summary)
    }
}

/// Rows ordered protocol-major, then by N, independent of scheduling.
#[derive(Debug)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    /// Successful rows of one protocol as (N, summary), ascending in N.
    pub fn series(&self, protocol: &str) -> Vec<(usize, &ResetSummary)> {
        self.rows
            .iter()
            .filter(|r| r.protocol == protocol)
            .filter_map(|r| r.summary().map(|s| (r.n_qubits, s)))
            .collect()
    }

    pub fn get(&self, protocol: &str, n_qubits: usize) -> Option<&SweepRow> {
        self.rows
            .iter()
            .find(|r| r.protocol == protocol && r.n_qubits == n_qubits)
    }

    pub fn failures(&self) -> impl Iterator<Item = &SweepRow> {
        self.rows.iter().filter(|r| r.result.is_err())
    }
}

/// Integrate, summarize and check one (params, protocol) pair.
pub fn run_one(
    params: &SystemParams,
    protocol: &Protocol,
    opts: &IntegratorOptions,
) -> Result<RunRecord> {
    let traj = dynamics::integrate(params, protocol, opts)?;
    let summary = thermo::summarize(&traj, params)?;
    let bounds = bounds::check_all(&traj, &summary, params, protocol)?;
    Ok(RunRecord { summary, bounds })
}

/// Every (N, protocol) pair in parallel. A failing row keeps its error and
/// the rest of the sweep carries on.
pub fn sweep(spec: &SweepSpec) -> Result<SweepTable> {
    spec.validate()?;
    let jobs: Vec<(usize, &Protocol)> = spec
        .protocols
        .iter()
        .flat_map(|p| spec.n_values.iter().map(move |&n| (n, p)))
        .collect();
    let rows = jobs
        .into_par_iter()
        .map(|(n, protocol)| {
            let (params, result) = match spec.params_base.with_n(n) {
                Ok(params) => {
                    let r = run_one(&params, protocol, &spec.options);
                    (params, r)
                }
                Err(e) => (spec.params_base, Err(e)),
            };
            SweepRow {
                n_qubits: n,
                protocol: protocol.kind_name().to_string(),
                params,
                result,
            }
        })
        .collect();
    Ok(SweepTable { rows })
}

/// ln eps = slope ln N + intercept over N in `window`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalingFit {
    pub slope: f64,
    pub intercept: f64,
    pub window: (usize, usize),
    pub points: usize,
}

/// Ordinary least squares of ln y against ln x.
pub fn fit_power_law(points: &[(f64, f64)]) -> Result<(f64, f64)> {
    if points.len() < 4 {
        return Err(Error::domain(format!(
            "power-law fit needs at least 4 points, got {}",
            points.len()
        )));
    }
    if points.iter().any(|&(x, y)| !(x > 0.0 && y > 0.0)) {
        return Err(Error::domain("power-law fit needs positive data"));
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let m = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / m;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::domain("power-law fit needs distinct abscissae"));
    }
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}

pub fn scaling_fit(
    table: &SweepTable,
    protocol: &str,
    window: (usize, usize),
) -> Result<ScalingFit> {
    let points: Vec<(f64, f64)> = table
        .series(protocol)
        .into_iter()
        .filter(|(n, _)| (window.0..=window.1).contains(n))
        .map(|(n, s)| (n as f64, s.epsilon_final))
        .collect();
    let (slope, intercept) = fit_power_law(&points)?;
    Ok(ScalingFit {
        slope,
        intercept,
        window,
        points: points.len(),
    })
}

/// N independent single-qubit resets against one collective reset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParallelComparison {
    pub n_qubits: usize,
    pub heat_parallel: f64,
    pub epsilon_parallel: f64,
    pub heat_collective: f64,
    pub epsilon_collective: f64,
    /// collective / parallel
    pub heat_ratio: f64,
    pub epsilon_ratio: f64,
}

pub fn parallel_vs_collective(
    params: &SystemParams,
    protocol: &Protocol,
    opts: &IntegratorOptions,
) -> Result<ParallelComparison> {
    let single = params.with_n(1)?;
    let one = thermo::summarize(&dynamics::integrate(&single, protocol, opts)?, &single)?;
    let all = thermo::summarize(&dynamics::integrate(params, protocol, opts)?, params)?;
    let heat_parallel = params.n_qubits as f64 * one.heat_total;
    Ok(ParallelComparison {
        n_qubits: params.n_qubits,
        heat_parallel,
        epsilon_parallel: one.epsilon_final,
        heat_collective: all.heat_total,
        epsilon_collective: all.epsilon_final,
        heat_ratio: all.heat_total / heat_parallel,
        epsilon_ratio: all.epsilon_final / one.epsilon_final,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuasistaticRow {
    pub tau: f64,
    pub heat_total: f64,
    pub epsilon_final: f64,
    /// ln(N + 1) / beta
    pub landauer: f64,
    /// (Q - landauer) / landauer
    pub relative_excess: f64,
    pub perfect_reset: bool,
}

/// Linear ramps 0 -> `final_omega` over each duration in `taus`.
/// `params.tau` is ignored.
pub fn quasistatic_convergence(
    params: &SystemParams,
    taus: &[f64],
    final_omega: f64,
    opts: &IntegratorOptions,
) -> Result<Vec<QuasistaticRow>> {
    if !(final_omega > 0.0 && final_omega.is_finite()) {
        return Err(Error::config("final omega must be positive"));
    }
    if taus.is_empty() || taus.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::config(
            "quasistatic durations must be non-empty and increasing",
        ));
    }
    if opts.output_grid.is_some() {
        return Err(Error::config("quasistatic runs take no output grid"));
    }
    let landauer = bounds::landauer_collective(params);
    taus.par_iter()
        .map(|&tau| {
            let p = params.with_tau(tau)?;
            let ramp = Protocol::linear(final_omega / tau, tau)?;
            let traj = dynamics::integrate(&p, &ramp, opts)?;
            let eps = thermo::error_probability(traj.final_state());
            let heat = traj.total_heat();
            Ok(QuasistaticRow {
                tau,
                heat_total: heat,
                epsilon_final: eps,
                landauer,
                relative_excess: (heat - landauer) / landauer,
                perfect_reset: eps < PERFECT_RESET_EPS,
            })
        })
        .collect()
}
