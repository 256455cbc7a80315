//! Closed-form solutions in the large-decoherence regime: per-mode decay
//! rates, the asymptotic node distribution, and its exact time average.
//!
//! At large `gamma` each Fourier mode of the populations splits into four
//! exponential branches; only the slow branch `s_k / (2 gamma)` survives on
//! walk time scales, with unit coefficient. The fast branches are retained in
//! [`DecayRates`] for inspection but excluded from the distribution.

use std::f64::consts::PI;

use crate::coherent::ProbabilityDist;
use crate::network::RegularNetwork;
use crate::Error;

/// Below this rate the closed forms drop terms that are no longer small.
pub const VALIDITY_GATE: f64 = 5.0;

/// The four per-mode exponential decay rates, `k = 0..n-1`.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayRates {
    /// Branch 0: identically zero (conserved total probability).
    pub gamma0: Vec<f64>,
    /// Branch 1: `gamma`.
    pub gamma1: Vec<f64>,
    /// Branch 2: `gamma - s_k / (2 gamma)`.
    pub gamma2: Vec<f64>,
    /// Branch 3 (the surviving one): `s_k / (2 gamma)`.
    pub gamma3: Vec<f64>,
    /// Set when `gamma` is below [`VALIDITY_GATE`] and the derivation's
    /// dropped terms are not necessarily small.
    pub below_validity_gate: bool,
}

/// Per-mode decay rates for decoherence rate `gamma > 0`.
pub fn decay_rates(net: &RegularNetwork, gamma: f64) -> Result<DecayRates, Error> {
    if !(gamma > 0.0) {
        return Err(Error::InvalidParameter(format!("need gamma > 0, got {gamma}")));
    }
    let n = net.n();
    let s: Vec<f64> = (0..n).map(|k| net.sin2_sum(k)).collect();
    Ok(DecayRates {
        gamma0: vec![0.0; n],
        gamma1: vec![gamma; n],
        gamma2: s.iter().map(|&sk| gamma - sk / (2.0 * gamma)).collect(),
        gamma3: s.iter().map(|&sk| sk / (2.0 * gamma)).collect(),
        below_validity_gate: gamma < VALIDITY_GATE,
    })
}

/// Large-decoherence node distribution
/// `(1/n) sum_k exp(-t s_k / (2 gamma)) cos(2 pi (j - origin) k / n)`.
///
/// May be marginally negative at intermediate times; the total is 1 to
/// rounding regardless, and values are reported unclamped.
pub fn approx_distribution(
    net: &RegularNetwork,
    gamma: f64,
    t: f64,
    origin: usize,
) -> Result<ProbabilityDist, Error> {
    if !(gamma > 0.0) {
        return Err(Error::InvalidParameter(format!("need gamma > 0, got {gamma}")));
    }
    let coeffs: Vec<f64> = (0..net.n())
        .map(|k| (-t * net.sin2_sum(k) / (2.0 * gamma)).exp())
        .collect();
    Ok(cosine_series(net.n(), &coeffs, origin))
}

/// `(1/n) sum_k coeffs[k] cos(2 pi (j - origin) k / n)` for every node `j`,
/// with the cosines taken from a precomputed table indexed mod `n`.
fn cosine_series(n: usize, coeffs: &[f64], origin: usize) -> ProbabilityDist {
    let nf = n as f64;
    let cos_table: Vec<f64> = (0..n).map(|q| (2.0 * PI * q as f64 / nf).cos()).collect();
    let values = (0..n)
        .map(|j| {
            let d = (j + n - origin) % n;
            (0..n)
                .map(|k| coeffs[k] * cos_table[d * k % n])
                .sum::<f64>()
                / nf
        })
        .collect();
    ProbabilityDist { values, origin }
}

/// `(1 - exp(-x)) / x`, with a series branch for tiny `x` to avoid
/// cancellation.
fn expm1_ratio(x: f64) -> f64 {
    if x.abs() < 1e-8 { 1.0 - 0.5 * x } else { (1.0 - (-x).exp()) / x }
}

/// Exact time average of [`approx_distribution`] over `[0, horizon]`:
/// `1/n + (2 gamma / (horizon n)) sum_{k != 0} (1 - exp(-horizon s_k / (2 gamma))) / s_k * cos(...)`.
pub fn approx_time_avg_distribution(
    net: &RegularNetwork,
    gamma: f64,
    horizon: f64,
    origin: usize,
) -> Result<ProbabilityDist, Error> {
    if !(gamma > 0.0) {
        return Err(Error::InvalidParameter(format!("need gamma > 0, got {gamma}")));
    }
    if horizon < 0.0 {
        return Err(Error::InvalidParameter(format!("need horizon >= 0, got {horizon}")));
    }
    let coeffs: Vec<f64> = (0..net.n())
        .map(|k| expm1_ratio(horizon * net.sin2_sum(k) / (2.0 * gamma)))
        .collect();
    Ok(cosine_series(net.n(), &coeffs, origin))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn decay_rate_examples() {
        let net = RegularNetwork::new(8, 3).unwrap();
        let rates = decay_rates(&net, 10.0).unwrap();
        assert_abs_diff_eq!(rates.gamma3[0], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(rates.gamma3[1], 0.075, epsilon = 1e-14);
        assert!(!rates.below_validity_gate);

        let big = RegularNetwork::new(100, 1).unwrap();
        let rates = decay_rates(&big, 10.0).unwrap();
        assert_abs_diff_eq!(rates.gamma3[1], (PI / 100.0).sin().powi(2) / 20.0, epsilon = 1e-16);

        assert!(decay_rates(&net, 0.0).is_err());
        assert!(decay_rates(&net, 2.0).unwrap().below_validity_gate);
    }

    #[test]
    fn rate_branch_identities() {
        let net = RegularNetwork::new(12, 4).unwrap();
        let gamma = 8.0;
        let rates = decay_rates(&net, gamma).unwrap();
        for k in 0..12 {
            assert_eq!(rates.gamma0[k], 0.0);
            assert_eq!(rates.gamma1[k], gamma);
            assert_abs_diff_eq!(rates.gamma2[k] + rates.gamma3[k], gamma, epsilon = 1e-13);
            assert!(rates.gamma3[k] >= 0.0);
            assert_abs_diff_eq!(rates.gamma3[k], rates.gamma3[(12 - k) % 12], epsilon = 1e-15);
        }
    }

    #[test]
    fn approx_delta_at_zero_and_uniform_at_infinity() {
        let net = RegularNetwork::new(8, 1).unwrap();
        let d0 = approx_distribution(&net, 10.0, 0.0, 3).unwrap();
        for (j, v) in d0.values.iter().enumerate() {
            let expect = if j == 3 { 1.0 } else { 0.0 };
            assert_abs_diff_eq!(*v, expect, epsilon = 1e-12);
        }
        let gamma = 10.0;
        let t = 100.0 * 2.0 * gamma / net.sin2_sum(1);
        let dinf = approx_distribution(&net, gamma, t, 3).unwrap();
        for v in &dinf.values {
            assert_abs_diff_eq!(*v, 0.125, epsilon = 1e-8);
        }
    }

    #[test]
    fn mode_decay_identity() {
        // DFT coefficient of mode k equals exp(-t gamma3_k) exactly.
        let net = RegularNetwork::new(10, 3).unwrap();
        let gamma = 20.0;
        let t = 37.0;
        let d = approx_distribution(&net, gamma, t, 0).unwrap();
        let rates = decay_rates(&net, gamma).unwrap();
        for k in 0..10 {
            let coeff: f64 = (0..10)
                .map(|j| d.values[j] * (2.0 * PI * (j * k) as f64 / 10.0).cos())
                .sum();
            assert_abs_diff_eq!(coeff, (-t * rates.gamma3[k]).exp(), epsilon = 1e-12);
        }
    }

    #[test]
    fn coefficients_non_increasing_in_time() {
        let net = RegularNetwork::new(14, 2).unwrap();
        let gamma = 15.0;
        let rates = decay_rates(&net, gamma).unwrap();
        let mut prev = vec![1.0; 14];
        for step in 1..=50 {
            let t = 4.0 * step as f64;
            let cur: Vec<f64> = rates.gamma3.iter().map(|&g| (-t * g).exp()).collect();
            for (c, p) in cur.iter().zip(&prev) {
                assert!(c <= p);
            }
            prev = cur;
        }
    }

    #[test]
    fn sum_is_one_and_symmetric_even_when_negative() {
        let net = RegularNetwork::new(16, 3).unwrap();
        for &t in &[0.0, 5.0, 40.0, 300.0] {
            let d = approx_distribution(&net, 12.0, t, 5).unwrap();
            assert_abs_diff_eq!(d.total(), 1.0, epsilon = 1e-12);
            for off in 1..16 {
                let a = d.values[(5 + off) % 16];
                let b = d.values[(5 + 16 - off) % 16];
                assert_abs_diff_eq!(a, b, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn time_average_limits() {
        let net = RegularNetwork::new(8, 1).unwrap();
        // horizon -> 0: average of an instant is the initial delta.
        let d0 = approx_time_avg_distribution(&net, 10.0, 1e-12, 0).unwrap();
        for (j, v) in d0.values.iter().enumerate() {
            let expect = if j == 0 { 1.0 } else { 0.0 };
            assert_abs_diff_eq!(*v, expect, epsilon = 1e-9);
        }
        // horizon -> infinity: uniform. The residual is (2 gamma / T) * sum(1/s_k) / n,
        // so the horizon must be ~1e7 * gamma for a 1e-6 tolerance here.
        let dinf = approx_time_avg_distribution(&net, 10.0, 1e7 * 10.0, 0).unwrap();
        for v in &dinf.values {
            assert_abs_diff_eq!(*v, 0.125, epsilon = 1e-6);
        }
    }

    #[test]
    fn time_average_matches_trapezoid_quadrature() {
        let net = RegularNetwork::new(8, 2).unwrap();
        let (gamma, horizon, origin) = (20.0, 100.0, 0);
        let steps = 20_000usize;
        let h = horizon / steps as f64;
        let mut acc = vec![0.0f64; 8];
        for i in 0..=steps {
            let w = if i == 0 || i == steps { 0.5 } else { 1.0 };
            let d = approx_distribution(&net, gamma, i as f64 * h, origin).unwrap();
            for (a, v) in acc.iter_mut().zip(&d.values) {
                *a += w * v * h;
            }
        }
        let quad: Vec<f64> = acc.iter().map(|a| a / horizon).collect();
        let exact = approx_time_avg_distribution(&net, gamma, horizon, origin).unwrap();
        for (q, e) in quad.iter().zip(&exact.values) {
            assert_abs_diff_eq!(*q, *e, epsilon = 1e-8);
        }
    }
}
