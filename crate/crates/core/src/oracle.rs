//! Brute-force check of the birth-death reduction.
//!
//! The full Lindblad equation with collective jump operator L = sum_j
//! sigma_j^- is integrated on the 2^N-dimensional register for small N,
//! starting from the Dicke-diagonal mixture, and projected back onto the
//! Dicke basis. Basis index bit j set means qubit j is excited.
//!
//! The right-hand side never forms dense products: L and L^dagger act by
//! flipping single bits, so each superoperator term costs O(N 4^N).

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::dynamics::{self, IntegratorOptions, Trajectory};
use crate::error::{Error, Result};
use crate::model::{bath_rates, Protocol, SystemParams};
use crate::solver::dopri;

/// Largest register the oracle will build (256 x 256 density matrix).
pub const MAX_QUBITS: usize = 8;

/// Density-matrix sanity limits.
pub const STATE_TOL: f64 = 1e-10;
/// Beyond this the oracle run is rejected outright.
pub const FAIL_TOL: f64 = 1e-8;

type C = Complex64;

/// Dense complex matrix on the full register.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    pub entries: DMatrix<C>,
}

impl DenseOperator {
    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn trace(&self) -> C {
        self.entries.trace()
    }

    /// max |A - A^dagger|
    pub fn hermiticity_error(&self) -> f64 {
        let a = &self.entries;
        let n = a.nrows();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        let herm = (&self.entries + self.entries.adjoint()) * C::new(0.5, 0.0);
        herm.symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }
}

fn guard(n_qubits: usize) -> Result<()> {
    if !(1..=MAX_QUBITS).contains(&n_qubits) {
        return Err(Error::domain(format!(
            "full-space oracle supports 1 <= N <= {MAX_QUBITS}, got {n_qubits}"
        )));
    }
    Ok(())
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Symmetric Dicke states |D_N^n>, n = 0..=N.
#[derive(Debug, Clone, PartialEq)]
pub struct DickeBasis {
    pub n_qubits: usize,
    pub vectors: Vec<DVector<f64>>,
}

impl DickeBasis {
    pub fn new(n_qubits: usize) -> Result<Self> {
        guard(n_qubits)?;
        let dim = 1usize << n_qubits;
        let vectors = (0..=n_qubits)
            .map(|n| {
                let amp = 1.0 / binomial(n_qubits, n).sqrt();
                DVector::from_fn(dim, |i, _| {
                    if i.count_ones() as usize == n {
                        amp
                    } else {
                        0.0
                    }
                })
            })
            .collect();
        Ok(DickeBasis { n_qubits, vectors })
    }

    /// <D_n| rho |D_n> for every n. Amplitudes are real so only Re(rho)
    /// contributes.
    fn populations(&self, rho: &[C], dim: usize) -> Vec<f64> {
        self.vectors
            .iter()
            .map(|v| {
                let idx: Vec<(usize, f64)> = v
                    .iter()
                    .enumerate()
                    .filter(|(_, a)| **a != 0.0)
                    .map(|(i, a)| (i, *a))
                    .collect();
                let mut acc = 0.0;
                for &(a, va) in &idx {
                    for &(b, vb) in &idx {
                        acc += va * vb * rho[a * dim + b].re;
                    }
                }
                acc
            })
            .collect()
    }
}

/// H = omega sum_j |e><e|_j and L = sum_j |g><e|_j as dense matrices.
pub fn build_operators(n_qubits: usize, omega: f64) -> Result<(DenseOperator, DenseOperator)> {
    guard(n_qubits)?;
    let dim = 1usize << n_qubits;
    let h = DMatrix::from_fn(dim, dim, |i, j| {
        if i == j {
            C::new(omega * i.count_ones() as f64, 0.0)
        } else {
            C::new(0.0, 0.0)
        }
    });
    let mut l = DMatrix::from_element(dim, dim, C::new(0.0, 0.0));
    for c in 0..dim {
        for j in 0..n_qubits {
            if c & (1 << j) != 0 {
                l[(c ^ (1 << j), c)] += C::new(1.0, 0.0);
            }
        }
    }
    Ok((DenseOperator { entries: h }, DenseOperator { entries: l }))
}

/// Full-space solution projected onto the Dicke levels.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProjectedTrajectory {
    pub n_qubits: usize,
    pub times: Vec<f64>,
    /// `populations[k][n]` = <D_n| rho(t_k) |D_n>
    pub populations: Vec<Vec<f64>>,
    pub heat_acc: Vec<f64>,
    /// 1 - sum_n p_n at each sample.
    pub leakage: Vec<f64>,
    pub max_trace_error: f64,
    pub max_hermiticity_error: f64,
    pub min_eigenvalue: f64,
}

impl ProjectedTrajectory {
    pub fn max_leakage(&self) -> f64 {
        self.leakage.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }
}

/// Superoperator workspace for one register size.
struct Lindblad {
    n_qubits: usize,
    dim: usize,
    excitations: Vec<f64>,
    rho: Vec<C>,
    tmp: Vec<C>,
    tmp2: Vec<C>,
    out: Vec<C>,
}

impl Lindblad {
    fn new(n_qubits: usize) -> Self {
        let dim = 1usize << n_qubits;
        let zero = vec![C::new(0.0, 0.0); dim * dim];
        Lindblad {
            n_qubits,
            dim,
            excitations: (0..dim).map(|i| i.count_ones() as f64).collect(),
            rho: zero.clone(),
            tmp: zero.clone(),
            tmp2: zero.clone(),
            out: zero,
        }
    }

    /// out = L x (row lowering): out[a][b] = sum_{j not in a} x[a | j][b]
    fn lower_rows(&self, x: &[C], out: &mut [C]) {
        let d = self.dim;
        for a in 0..d {
            let row = &mut out[a * d..(a + 1) * d];
            row.iter_mut().for_each(|v| *v = C::new(0.0, 0.0));
            for j in 0..self.n_qubits {
                let bit = 1 << j;
                if a & bit == 0 {
                    let src = &x[(a | bit) * d..((a | bit) + 1) * d];
                    row.iter_mut().zip(src).for_each(|(o, s)| *o += s);
                }
            }
        }
    }

    /// out = L^dagger x: out[a][b] = sum_{j in a} x[a ^ j][b]
    fn raise_rows(&self, x: &[C], out: &mut [C]) {
        let d = self.dim;
        for a in 0..d {
            let row = &mut out[a * d..(a + 1) * d];
            row.iter_mut().for_each(|v| *v = C::new(0.0, 0.0));
            for j in 0..self.n_qubits {
                let bit = 1 << j;
                if a & bit != 0 {
                    let src = &x[(a ^ bit) * d..((a ^ bit) + 1) * d];
                    row.iter_mut().zip(src).for_each(|(o, s)| *o += s);
                }
            }
        }
    }

    /// out = x L^dagger: out[a][b] = sum_{k not in b} x[a][b | k]
    fn lower_cols(&self, x: &[C], out: &mut [C]) {
        let d = self.dim;
        for a in 0..d {
            for b in 0..d {
                let mut acc = C::new(0.0, 0.0);
                for k in 0..self.n_qubits {
                    let bit = 1 << k;
                    if b & bit == 0 {
                        acc += x[a * d + (b | bit)];
                    }
                }
                out[a * d + b] = acc;
            }
        }
    }

    /// out = x L: out[a][b] = sum_{k in b} x[a][b ^ k]
    fn raise_cols(&self, x: &[C], out: &mut [C]) {
        let d = self.dim;
        for a in 0..d {
            for b in 0..d {
                let mut acc = C::new(0.0, 0.0);
                for k in 0..self.n_qubits {
                    let bit = 1 << k;
                    if b & bit != 0 {
                        acc += x[a * d + (b ^ bit)];
                    }
                }
                out[a * d + b] = acc;
            }
        }
    }

    /// Fill `self.out` with d rho / dt for `self.rho`.
    fn apply(&mut self, omega: f64, down: f64, up: f64) {
        let d = self.dim;
        let rho = std::mem::take(&mut self.rho);
        let mut tmp = std::mem::take(&mut self.tmp);
        let mut tmp2 = std::mem::take(&mut self.tmp2);
        let mut out = std::mem::take(&mut self.out);

        // coherent part: -i omega (n_a - n_b) rho_ab
        for a in 0..d {
            for b in 0..d {
                let w = omega * (self.excitations[a] - self.excitations[b]);
                out[a * d + b] = C::new(0.0, -w) * rho[a * d + b];
            }
        }

        // emission: down (L rho L^dag - {L^dag L, rho} / 2)
        self.lower_rows(&rho, &mut tmp); // L rho
        self.lower_cols(&tmp, &mut tmp2); // L rho L^dag
        accumulate(&mut out, &tmp2, down);
        self.raise_rows(&tmp, &mut tmp2); // L^dag L rho
        anticommutator_half(&mut out, &tmp2, d, down);

        // absorption: up (L^dag rho L - {L L^dag, rho} / 2)
        self.raise_rows(&rho, &mut tmp); // L^dag rho
        self.raise_cols(&tmp, &mut tmp2); // L^dag rho L
        accumulate(&mut out, &tmp2, up);
        self.lower_rows(&tmp, &mut tmp2); // L L^dag rho
        anticommutator_half(&mut out, &tmp2, d, up);

        self.rho = rho;
        self.tmp = tmp;
        self.tmp2 = tmp2;
        self.out = out;
    }
}

fn accumulate(out: &mut [C], x: &[C], w: f64) {
    out.iter_mut().zip(x).for_each(|(o, v)| *o += v * w);
}

/// out -= w (X + X^dagger) / 2, with X = K rho so that X^dagger = rho K.
fn anticommutator_half(out: &mut [C], x: &[C], d: usize, w: f64) {
    for a in 0..d {
        for b in 0..d {
            out[a * d + b] -= (x[a * d + b] + x[b * d + a].conj()) * (0.5 * w);
        }
    }
}

fn unpack(y: &[f64], rho: &mut [C]) {
    for (k, v) in rho.iter_mut().enumerate() {
        *v = C::new(y[2 * k], y[2 * k + 1]);
    }
}

fn to_operator(rho: &[C], dim: usize) -> DenseOperator {
    DenseOperator {
        entries: DMatrix::from_fn(dim, dim, |i, j| rho[i * dim + j]),
    }
}

/// Integrate the full master equation from sum_n |D_n><D_n| / (N + 1).
pub fn integrate_full(
    params: &SystemParams,
    protocol: &Protocol,
    opts: &IntegratorOptions,
) -> Result<ProjectedTrajectory> {
    params.validate()?;
    protocol.validate()?;
    guard(params.n_qubits)?;
    opts.validate(0.0, params.tau)?;
    let n_q = params.n_qubits;
    let basis = DickeBasis::new(n_q)?;
    let mut lind = Lindblad::new(n_q);
    let dim = lind.dim;

    // rho_0 = sum_n |D_n><D_n| / (N + 1); state = interleaved (re, im) + heat
    let mut y0 = vec![0.0; 2 * dim * dim + 1];
    let w = 1.0 / (n_q as f64 + 1.0);
    for a in 0..dim {
        for b in 0..dim {
            let (na, nb) = (a.count_ones(), b.count_ones());
            if na == nb {
                y0[2 * (a * dim + b)] = w / binomial(n_q, na as usize);
            }
        }
    }

    let grid: Option<Vec<f64>> = opts.output_grid.as_ref().map(|g| {
        let mut g: Vec<f64> = g.iter().copied().filter(|&t| t > 0.0).collect();
        g.push(params.tau);
        g.dedup();
        g
    });
    let mut stops = protocol.breakpoints();
    if let Some(g) = &grid {
        stops.extend_from_slice(g);
    }

    let heat_slot = 2 * dim * dim;
    let rhs = |t: f64, y: &[f64], dy: &mut [f64]| {
        let omega = protocol.eval(t);
        let (down, up, _) = bath_rates(params.beta, params.gamma0, omega);
        unpack(y, &mut lind.rho);
        lind.apply(omega, down, up);
        let mut dn = 0.0;
        for (k, v) in lind.out.iter().enumerate() {
            dy[2 * k] = v.re;
            dy[2 * k + 1] = v.im;
        }
        for a in 0..dim {
            dn += lind.excitations[a] * lind.out[a * dim + a].re;
        }
        // heat released: -Tr(rho_dot H)
        dy[heat_slot] = -omega * dn;
    };

    let mut out = ProjectedTrajectory {
        n_qubits: n_q,
        times: Vec::new(),
        populations: Vec::new(),
        heat_acc: Vec::new(),
        leakage: Vec::new(),
        max_trace_error: 0.0,
        max_hermiticity_error: 0.0,
        min_eigenvalue: f64::INFINITY,
    };
    let mut rho_buf = vec![C::new(0.0, 0.0); dim * dim];
    let mut next = 0usize;
    let mut record = |t: f64, y: &[f64]| {
        unpack(y, &mut rho_buf);
        let pops = basis.populations(&rho_buf, dim);
        let op = to_operator(&rho_buf, dim);
        out.max_trace_error = out
            .max_trace_error
            .max((op.trace() - C::new(1.0, 0.0)).norm());
        out.max_hermiticity_error = out.max_hermiticity_error.max(op.hermiticity_error());
        out.min_eigenvalue = out.min_eigenvalue.min(op.min_eigenvalue());
        out.leakage.push(1.0 - pops.iter().sum::<f64>());
        out.populations.push(pops);
        out.heat_acc.push(y[heat_slot]);
        out.times.push(t);
    };

    let ctl = opts.step_control();
    dopri::integrate(
        rhs,
        0.0,
        params.tau,
        &y0,
        &stops,
        &ctl,
        |t, y| match &grid {
            None => record(t, y),
            Some(g) => {
                if t == 0.0 {
                    record(t, y);
                } else if next < g.len() && t == g[next] {
                    record(t, y);
                    next += 1;
                }
            }
        },
    )
    .map_err(|f| Error::Integration {
        t: f.t,
        reason: f.reason,
        partial: None,
    })?;

    if out.max_trace_error > FAIL_TOL
        || out.max_hermiticity_error > FAIL_TOL
        || out.min_eigenvalue < -FAIL_TOL
    {
        return Err(Error::Integrity(format!(
            "full-space state degraded: trace error {:.2e}, hermiticity error {:.2e}, min eigenvalue {:.2e}",
            out.max_trace_error, out.max_hermiticity_error, out.min_eigenvalue
        )));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeviationReport {
    pub n_qubits: usize,
    /// max over samples and levels of |p_full - p_reduced|
    pub max_population_deviation: f64,
    /// |Q_full(tau) - Q_reduced(tau)|
    pub heat_deviation: f64,
    pub max_leakage: f64,
}

impl DeviationReport {
    pub fn within(&self, tol: f64, leakage_tol: f64) -> bool {
        self.max_population_deviation <= tol
            && self.heat_deviation <= tol
            && self.max_leakage <= leakage_tol
    }
}

pub fn compare(full: &ProjectedTrajectory, reduced: &Trajectory) -> Result<DeviationReport> {
    if full.n_qubits != reduced.n_qubits {
        return Err(Error::domain("oracle and reduced runs have different N"));
    }
    if full.times.len() != reduced.times.len()
        || full.times.iter().zip(&reduced.times).any(|(a, b)| a != b)
    {
        return Err(Error::domain(
            "oracle and reduced runs are sampled on different grids",
        ));
    }
    let mut max_dev: f64 = 0.0;
    for (pf, pr) in full.populations.iter().zip(&reduced.states) {
        for (a, b) in pf.iter().zip(pr.probs()) {
            max_dev = max_dev.max((a - b).abs());
        }
    }
    let heat_deviation = (full.heat_acc.last().unwrap_or(&0.0) - reduced.total_heat()).abs();
    Ok(DeviationReport {
        n_qubits: full.n_qubits,
        max_population_deviation: max_dev,
        heat_deviation,
        max_leakage: full.max_leakage(),
    })
}

/// Run both integrators on a common grid and compare them.
pub fn oracle_check(
    params: &SystemParams,
    protocol: &Protocol,
    opts: &IntegratorOptions,
    grid_points: usize,
) -> Result<DeviationReport> {
    let grid = IntegratorOptions::uniform_grid(0.0, params.tau, grid_points);
    let opts = opts.clone().with_grid(grid);
    let full = integrate_full(params, protocol, &opts)?;
    let reduced = dynamics::integrate(params, protocol, &opts)?;
    compare(&full, &reduced)
}
