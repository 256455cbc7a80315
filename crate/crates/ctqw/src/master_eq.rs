//! Direct integration of the dephasing master equation for the full density
//! matrix, plus an exact superoperator-exponential oracle for small systems.
//!
//! The equation of motion is
//!
//! ```text
//! d rho_{j,k} / dt = -i/4 sum_{m=1}^{l} (rho_{j+m,k} - rho_{j,k+m}
//!                                        + rho_{j-m,k} - rho_{j,k-m})
//!                    - gamma (1 - delta_{j,k}) rho_{j,k}
//! ```
//!
//! with all indices modulo `n`. The coherent part is the commutator with the
//! hopping Hamiltonian at amplitude 1/4; the dephasing rate `gamma` damps all
//! off-diagonals uniformly, with no distance dependence.

use ndarray::Array2;
use num_complex::Complex64 as C64;

use crate::coherent::ProbabilityDist;
use crate::network::RegularNetwork;
use crate::Error;

/// Hopping amplitude of the renormalized walk Hamiltonian.
pub const HOPPING: f64 = 0.25;

/// Largest size accepted by [`evolve_exact`]; the superoperator is kept dense
/// at `n^2 x n^2`.
pub const EXACT_MAX_N: usize = 12;

/// `n x n` Hermitian unit-trace state of the walker at a given time.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    pub entries: Array2<C64>,
    pub time: f64,
    /// Node the walk started from; carried along so the diagonal can be
    /// reported as a [`ProbabilityDist`].
    pub origin: usize,
}

impl DensityMatrix {
    pub fn n(&self) -> usize {
        self.entries.nrows()
    }

    pub fn trace(&self) -> C64 {
        (0..self.n()).map(|j| self.entries[(j, j)]).sum()
    }

    /// Max deviation from Hermiticity, `max |rho_{j,k} - conj(rho_{k,j})|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.n();
        let mut worst: f64 = 0.0;
        for j in 0..n {
            for k in j..n {
                worst = worst.max((self.entries[(j, k)] - self.entries[(k, j)].conj()).norm());
            }
        }
        worst
    }

    /// `trace(rho^2)`, real part; at most 1 for a physical state.
    pub fn purity(&self) -> f64 {
        let n = self.n();
        let mut acc = C64::new(0.0, 0.0);
        for j in 0..n {
            for k in 0..n {
                acc += self.entries[(j, k)] * self.entries[(k, j)];
            }
        }
        acc.re
    }

    /// Sum of squared magnitudes of the off-diagonal entries.
    pub fn coherence_norm_sqr(&self) -> f64 {
        let n = self.n();
        let mut acc = 0.0;
        for j in 0..n {
            for k in 0..n {
                if j != k {
                    acc += self.entries[(j, k)].norm_sqr();
                }
            }
        }
        acc
    }

    /// Checks unit trace, Hermiticity, and diagonal positivity within `tol`.
    pub fn check_invariants(&self, tol: f64) -> Result<(), Error> {
        let trace_err = (self.trace() - C64::new(1.0, 0.0)).norm();
        if trace_err > tol {
            return Err(Error::InvariantViolation(format!(
                "trace deviates by {trace_err:.3e} at t = {}",
                self.time
            )));
        }
        let herm = self.hermiticity_defect();
        if herm > tol {
            return Err(Error::InvariantViolation(format!(
                "Hermiticity defect {herm:.3e} at t = {}",
                self.time
            )));
        }
        for j in 0..self.n() {
            if self.entries[(j, j)].re < -tol {
                return Err(Error::InvariantViolation(format!(
                    "negative population {:.3e} at node {j}, t = {}",
                    self.entries[(j, j)].re,
                    self.time
                )));
            }
        }
        Ok(())
    }
}

/// Integration controls.
#[derive(Debug, Clone, Copy)]
pub struct SimConfig {
    /// Base time step; the effective step also respects `0.05 / (1 + gamma)`
    /// and `0.05 / l` so neither the dephasing rate nor the bandwidth per
    /// step gets large.
    pub step: f64,
    pub t_end: f64,
    /// Record every this many steps (the final state is always recorded).
    pub record_stride: usize,
    /// Invariant tolerance; integration aborts when trace or Hermiticity
    /// drifts beyond `100 * tol`.
    pub tol: f64,
}

impl SimConfig {
    pub fn new(t_end: f64) -> Self {
        Self { step: 0.01, t_end, record_stride: 100, tol: 1e-9 }
    }

    pub fn validate(&self) -> Result<(), Error> {
        if !(self.step > 0.0) || !(self.t_end >= 0.0) || !(self.tol > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "need step > 0, t_end >= 0, tol > 0; got {self:?}"
            )));
        }
        Ok(())
    }
}

/// `rho = |origin><origin|`.
pub fn init_density(n: usize, origin: usize) -> Result<DensityMatrix, Error> {
    if origin >= n {
        return Err(Error::InvalidParameter(format!(
            "origin {origin} out of range for n = {n}"
        )));
    }
    let mut entries = Array2::zeros((n, n));
    entries[(origin, origin)] = C64::new(1.0, 0.0);
    Ok(DensityMatrix { entries, time: 0.0, origin })
}

/// Right-hand side with the standard hopping amplitude 1/4.
pub fn rhs(net: &RegularNetwork, gamma: f64, rho: &Array2<C64>) -> Array2<C64> {
    rhs_with_hopping(net, HOPPING, gamma, rho)
}

/// Right-hand side with an explicit hopping amplitude; `hop = 0` isolates the
/// pure-dephasing channel.
pub fn rhs_with_hopping(
    net: &RegularNetwork,
    hop: f64,
    gamma: f64,
    rho: &Array2<C64>,
) -> Array2<C64> {
    let n = net.n();
    let l = net.l();
    let mut out = Array2::zeros((n, n));
    for j in 0..n {
        for k in 0..n {
            let mut acc = C64::new(0.0, 0.0);
            for m in 1..=l {
                acc += rho[((j + m) % n, k)] + rho[((j + n - m) % n, k)]
                    - rho[(j, (k + m) % n)]
                    - rho[(j, (k + n - m) % n)];
            }
            let mut v = C64::new(0.0, -hop) * acc;
            if j != k {
                v -= gamma * rho[(j, k)];
            }
            out[(j, k)] = v;
        }
    }
    out
}

fn effective_step(cfg: &SimConfig, gamma: f64, l: usize) -> f64 {
    cfg.step.min(0.05 / (1.0 + gamma)).min(0.05 / l as f64)
}

fn rk4_step(net: &RegularNetwork, gamma: f64, rho: &Array2<C64>, h: f64) -> Array2<C64> {
    let k1 = rhs(net, gamma, rho);
    let k2 = rhs(net, gamma, &(rho + &(&k1 * C64::new(0.5 * h, 0.0))));
    let k3 = rhs(net, gamma, &(rho + &(&k2 * C64::new(0.5 * h, 0.0))));
    let k4 = rhs(net, gamma, &(rho + &(&k3 * C64::new(h, 0.0))));
    rho + &((k1 + k2 * 2.0 + k3 * 2.0 + k4) * C64::new(h / 6.0, 0.0))
}

/// Fixed-step 4th-order integration of the master equation, recording every
/// `record_stride` steps plus the final state.
pub fn evolve(
    net: &RegularNetwork,
    gamma: f64,
    rho0: &DensityMatrix,
    cfg: &SimConfig,
) -> Result<Vec<DensityMatrix>, Error> {
    cfg.validate()?;
    if gamma < 0.0 {
        return Err(Error::InvalidParameter(format!("need gamma >= 0, got {gamma}")));
    }
    rho0.check_invariants(100.0 * cfg.tol)?;
    let h_cap = effective_step(cfg, gamma, net.l());
    let n_steps = (cfg.t_end / h_cap).ceil().max(1.0) as usize;
    let h = cfg.t_end / n_steps as f64;

    let mut samples = Vec::new();
    let mut rho = rho0.entries.clone();
    let record = |entries: &Array2<C64>, time: f64, out: &mut Vec<DensityMatrix>| {
        out.push(DensityMatrix { entries: entries.clone(), time, origin: rho0.origin });
    };
    record(&rho, 0.0, &mut samples);
    if cfg.t_end == 0.0 {
        return Ok(samples);
    }
    for step in 1..=n_steps {
        rho = rk4_step(net, gamma, &rho, h);
        if step % cfg.record_stride == 0 || step == n_steps {
            let t = step as f64 * h;
            let state = DensityMatrix { entries: rho.clone(), time: t, origin: rho0.origin };
            state.check_invariants(100.0 * cfg.tol)?;
            samples.push(state);
        }
    }
    Ok(samples)
}

/// Integrates through the given sorted sample times, landing on each exactly.
/// Plumbing for time-series output and cross-checks at prescribed grids.
pub fn evolve_to_times(
    net: &RegularNetwork,
    gamma: f64,
    rho0: &DensityMatrix,
    times: &[f64],
    cfg: &SimConfig,
) -> Result<Vec<DensityMatrix>, Error> {
    cfg.validate()?;
    if times.windows(2).any(|w| w[1] < w[0]) || times.first().map_or(false, |&t| t < 0.0) {
        return Err(Error::InvalidParameter("sample times must be sorted and >= 0".into()));
    }
    let h_cap = effective_step(cfg, gamma, net.l());
    let mut samples = Vec::with_capacity(times.len());
    let mut rho = rho0.entries.clone();
    let mut t = 0.0;
    for &target in times {
        let span = target - t;
        if span > 0.0 {
            let n_steps = (span / h_cap).ceil().max(1.0) as usize;
            let h = span / n_steps as f64;
            for _ in 0..n_steps {
                rho = rk4_step(net, gamma, &rho, h);
            }
            t = target;
        }
        let state = DensityMatrix { entries: rho.clone(), time: target, origin: rho0.origin };
        state.check_invariants(100.0 * cfg.tol)?;
        samples.push(state);
    }
    Ok(samples)
}

/// Dense generator of the master equation acting on vectorized states,
/// column by column.
fn superoperator(net: &RegularNetwork, gamma: f64) -> Array2<C64> {
    let n = net.n();
    let dim = n * n;
    let mut gen = Array2::zeros((dim, dim));
    for col in 0..dim {
        let mut basis = Array2::zeros((n, n));
        basis[(col / n, col % n)] = C64::new(1.0, 0.0);
        let image = rhs(net, gamma, &basis);
        for row in 0..dim {
            gen[(row, col)] = image[(row / n, row % n)];
        }
    }
    gen
}

fn one_norm(a: &Array2<C64>) -> f64 {
    let (rows, cols) = a.dim();
    (0..cols)
        .map(|c| (0..rows).map(|r| a[(r, c)].norm()).sum())
        .fold(0.0, f64::max)
}

/// `exp(a)` by scaling and squaring with a truncated Taylor series; the
/// scaled 1-norm is brought below 0.5 before summing.
fn expm(a: &Array2<C64>) -> Array2<C64> {
    let n = a.nrows();
    let norm = one_norm(a);
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as u32 } else { 0 };
    let scaled = a / C64::new(2f64.powi(squarings as i32), 0.0);
    let mut result = Array2::eye(n);
    let mut term: Array2<C64> = Array2::eye(n);
    for k in 1..80 {
        term = term.dot(&scaled) / C64::new(k as f64, 0.0);
        result = result + &term;
        if one_norm(&term) < 1e-18 {
            break;
        }
    }
    for _ in 0..squarings {
        result = result.dot(&result);
    }
    result
}

/// Exact propagation oracle: vectorizes `rho0`, applies the exponential of
/// the dense superoperator, and un-vectorizes. Cost-guarded to `n <= 12`.
pub fn evolve_exact(
    net: &RegularNetwork,
    gamma: f64,
    rho0: &DensityMatrix,
    t: f64,
) -> Result<DensityMatrix, Error> {
    let n = net.n();
    if n > EXACT_MAX_N {
        return Err(Error::SizeLimit(format!(
            "evolve_exact keeps an n^2 x n^2 dense superoperator; n = {n} > {EXACT_MAX_N}"
        )));
    }
    if t < 0.0 {
        return Err(Error::InvalidParameter(format!("need t >= 0, got {t}")));
    }
    let gen = superoperator(net, gamma);
    let prop = expm(&(&gen * C64::new(t, 0.0)));
    let mut vec_rho = vec![C64::new(0.0, 0.0); n * n];
    for j in 0..n {
        for k in 0..n {
            vec_rho[j * n + k] = rho0.entries[(j, k)];
        }
    }
    let mut entries = Array2::zeros((n, n));
    for row in 0..n * n {
        let v: C64 = (0..n * n).map(|c| prop[(row, c)] * vec_rho[c]).sum();
        entries[(row / n, row % n)] = v;
    }
    Ok(DensityMatrix { entries, time: rho0.time + t, origin: rho0.origin })
}

/// Node distribution read off the diagonal.
pub fn diagonal(rho: &DensityMatrix) -> ProbabilityDist {
    let values = (0..rho.n()).map(|j| rho.entries[(j, j)].re).collect();
    ProbabilityDist { values, origin: rho.origin }
}
