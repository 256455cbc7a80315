//! Total-variation distance, measured instantaneous and average mixing
//! times, and the analytic lower/upper bounds on both.
//!
//! The total-variation convention is the un-halved sum
//! `|| d1 - d2 || = sum_j |d1(j) - d2(j)|`, so a delta against uniform on `n`
//! nodes gives `2 (n - 1) / n`. The halved convention is available behind a
//! flag but the un-halved sum is what the bound formulas assume.

use std::f64::consts::PI;

use crate::coherent::ProbabilityDist;
use crate::large_decoherence::{approx_distribution, approx_time_avg_distribution, VALIDITY_GATE};
use crate::network::RegularNetwork;
use crate::Error;

/// Un-halved total-variation distance.
pub fn total_variation(d1: &ProbabilityDist, d2: &ProbabilityDist) -> Result<f64, Error> {
    total_variation_conv(d1, d2, false)
}

/// Total-variation distance; `halved` selects the 1/2-normalized convention.
pub fn total_variation_conv(
    d1: &ProbabilityDist,
    d2: &ProbabilityDist,
    halved: bool,
) -> Result<f64, Error> {
    if d1.len() != d2.len() {
        return Err(Error::LengthMismatch(d1.len(), d2.len()));
    }
    let sum: f64 = d1
        .values
        .iter()
        .zip(&d2.values)
        .map(|(a, b)| (a - b).abs())
        .sum();
    Ok(if halved { 0.5 * sum } else { sum })
}

/// Un-halved distance to the uniform distribution on the same node set.
pub fn tv_to_uniform(d: &ProbabilityDist) -> f64 {
    let inv_n = 1.0 / d.len() as f64;
    d.values.iter().map(|v| (v - inv_n).abs()).sum()
}

/// Controls for the first-crossing search: a coarse scan grid over the cap,
/// then bisection to the given relative width.
#[derive(Debug, Clone, Copy)]
pub struct SearchConfig {
    pub grid_points: usize,
    pub rel_tol: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self { grid_points: 2048, rel_tol: 1e-6 }
    }
}

/// First time on `[0, t_cap]` where `tv(dist_at(t), uniform) <= eps`,
/// detected on the scan grid and refined by bisection. The result is the
/// first grid-detected crossing; TV is not proven monotone, so an earlier
/// dip between grid points would be missed at coarse grids.
pub fn first_crossing_time<F>(dist_at: F, eps: f64, t_cap: f64, search: &SearchConfig) -> Option<f64>
where
    F: Fn(f64) -> ProbabilityDist,
{
    let tv_at = |t: f64| tv_to_uniform(&dist_at(t));
    if tv_at(0.0) <= eps {
        return Some(0.0);
    }
    let points = search.grid_points.max(2);
    let dt = t_cap / (points - 1) as f64;
    let mut lo = 0.0;
    let mut hi = None;
    for i in 1..points {
        let t = i as f64 * dt;
        if tv_at(t) <= eps {
            hi = Some(t);
            break;
        }
        lo = t;
    }
    let mut hi = hi?;
    while hi - lo > search.rel_tol * hi {
        let mid = 0.5 * (lo + hi);
        if tv_at(mid) <= eps {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi)
}

fn check_eps_gamma(gamma: f64, eps: f64) -> Result<(), Error> {
    if !(gamma > 0.0) {
        return Err(Error::InvalidParameter(format!("need gamma > 0, got {gamma}")));
    }
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter(format!("need eps > 0, got {eps}")));
    }
    Ok(())
}

/// Measured instantaneous mixing time of the large-decoherence closed form:
/// first `t` with `TV(P(t), uniform) <= eps`. The search cap comes from the
/// slowest mode, `t_cap = (2 gamma / s_min) ln(2 n / eps)`.
pub fn instantaneous_mixing_time(
    net: &RegularNetwork,
    gamma: f64,
    eps: f64,
    origin: usize,
    search: &SearchConfig,
) -> Result<f64, Error> {
    check_eps_gamma(gamma, eps)?;
    let n = net.n();
    let s_min = net.min_sin2_sum();
    let t_cap = (2.0 * gamma / s_min) * (2.0 * n as f64 / eps).ln();
    first_crossing_time(
        |t| approx_distribution(net, gamma, t, origin).expect("gamma checked"),
        eps,
        t_cap,
        search,
    )
    .ok_or(Error::NotMixed { t_cap })
}

/// Measured average mixing time: first horizon `T` with
/// `TV(avg P over [0, T], uniform) <= eps`. Capped at ten times the analytic
/// upper bound.
pub fn average_mixing_time(
    net: &RegularNetwork,
    gamma: f64,
    eps: f64,
    origin: usize,
    search: &SearchConfig,
) -> Result<f64, Error> {
    check_eps_gamma(gamma, eps)?;
    let (_, upper) = bounds_average(net.n(), net.l(), gamma, eps)?;
    let t_cap = 10.0 * upper;
    first_crossing_time(
        |t| approx_time_avg_distribution(net, gamma, t, origin).expect("gamma checked"),
        eps,
        t_cap,
        search,
    )
    .ok_or(Error::NotMixed { t_cap })
}

/// Analytic bounds on the instantaneous mixing time. The lower bounds exist
/// only for `eps < 2 / n`; otherwise they are absent and the flag is set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InstantaneousBounds {
    /// `(2 gamma / s_1) ln(2 / (n eps))` with the exact sine sum `s_1`.
    pub lower_exact: Option<f64>,
    /// Large-`n` form `2 gamma n^2 / (pi^2 sum m^2) ln(2 / (n eps))`.
    pub lower_asym: Option<f64>,
    /// `gamma n^2 / (2 sum m^2) ln((2 + eps) / eps)`.
    pub upper: f64,
    pub epsilon_too_large: bool,
}

/// `sum_{m in ranges} sin^2(pi k m / n)`.
pub fn sine_sum_ranges(n: usize, ranges: &[usize], k: usize) -> f64 {
    ranges
        .iter()
        .map(|&m| (PI * (k * m) as f64 / n as f64).sin().powi(2))
        .sum()
}

/// `sum_{m in ranges} m^2`.
pub fn sum_sq_ranges(ranges: &[usize]) -> f64 {
    ranges.iter().map(|&m| (m * m) as f64).sum()
}

/// Bound formulas for an arbitrary set of link ranges. A 1D regular network
/// is `ranges = 1..=l`; a long-range interacting cycle is `ranges = [1, m]`.
pub fn bounds_instantaneous_ranges(
    n: usize,
    ranges: &[usize],
    gamma: f64,
    eps: f64,
) -> Result<InstantaneousBounds, Error> {
    check_eps_gamma(gamma, eps)?;
    if ranges.is_empty() {
        return Err(Error::InvalidParameter("empty range set".into()));
    }
    let nf = n as f64;
    let sum_sq = sum_sq_ranges(ranges);
    let upper = gamma * nf * nf / (2.0 * sum_sq) * ((2.0 + eps) / eps).ln();
    // At eps == 2/n the logarithm is exactly zero and the lower bounds
    // degenerate to 0, which is still a valid bound; only eps beyond that
    // makes them meaningless.
    let log_arg = 2.0 / (nf * eps);
    if log_arg < 1.0 {
        return Ok(InstantaneousBounds {
            lower_exact: None,
            lower_asym: None,
            upper,
            epsilon_too_large: true,
        });
    }
    let s1 = sine_sum_ranges(n, ranges, 1);
    Ok(InstantaneousBounds {
        lower_exact: Some(2.0 * gamma / s1 * log_arg.ln()),
        lower_asym: Some(2.0 * gamma * nf * nf / (PI * PI * sum_sq) * log_arg.ln()),
        upper,
        epsilon_too_large: false,
    })
}

/// Instantaneous-time bounds for the 1D regular network with range `l`.
pub fn bounds_instantaneous(
    n: usize,
    l: usize,
    gamma: f64,
    eps: f64,
) -> Result<InstantaneousBounds, Error> {
    let ranges: Vec<usize> = (1..=l).collect();
    bounds_instantaneous_ranges(n, &ranges, gamma, eps)
}

/// `(lower, upper)` bounds on the average mixing time for an arbitrary set
/// of link ranges: `4 gamma n / (eps pi^2 sum m^2)` and
/// `gamma n^2 pi^2 / (6 eps sum m^2)`.
pub fn bounds_average_ranges(
    n: usize,
    ranges: &[usize],
    gamma: f64,
    eps: f64,
) -> Result<(f64, f64), Error> {
    check_eps_gamma(gamma, eps)?;
    if ranges.is_empty() {
        return Err(Error::InvalidParameter("empty range set".into()));
    }
    let nf = n as f64;
    let sum_sq = sum_sq_ranges(ranges);
    let lower = 4.0 * gamma * nf / (eps * PI * PI * sum_sq);
    let upper = gamma * nf * nf * PI * PI / (6.0 * eps * sum_sq);
    Ok((lower, upper))
}

/// Average-time bounds for the 1D regular network with range `l`.
pub fn bounds_average(n: usize, l: usize, gamma: f64, eps: f64) -> Result<(f64, f64), Error> {
    let ranges: Vec<usize> = (1..=l).collect();
    bounds_average_ranges(n, &ranges, gamma, eps)
}

/// Measured mixing times next to the analytic bounds, with validity flags.
#[derive(Debug, Clone, PartialEq)]
pub struct MixingReport {
    pub epsilon: f64,
    /// Absent when the threshold was never crossed by the search cap.
    pub t_ins_measured: Option<f64>,
    pub t_ave_measured: Option<f64>,
    pub ins_lower_exact: Option<f64>,
    pub ins_lower_asym: Option<f64>,
    pub ins_upper: f64,
    pub ave_lower: f64,
    pub ave_upper: f64,
    /// `eps >= 2 / n`, so the instantaneous lower bounds do not exist.
    pub epsilon_too_large_for_lower_bound: bool,
    /// `gamma` below the regime the closed forms were derived in.
    pub gamma_below_large_decoherence_gate: bool,
}

/// Measures both mixing times against the large-decoherence closed forms and
/// evaluates all four bounds.
pub fn mixing_report(
    net: &RegularNetwork,
    gamma: f64,
    eps: f64,
    origin: usize,
    search: &SearchConfig,
) -> Result<MixingReport, Error> {
    let ins_bounds = bounds_instantaneous(net.n(), net.l(), gamma, eps)?;
    let (ave_lower, ave_upper) = bounds_average(net.n(), net.l(), gamma, eps)?;
    let not_mixed_to_none = |r: Result<f64, Error>| match r {
        Ok(t) => Ok(Some(t)),
        Err(Error::NotMixed { .. }) => Ok(None),
        Err(e) => Err(e),
    };
    let t_ins = not_mixed_to_none(instantaneous_mixing_time(net, gamma, eps, origin, search))?;
    let t_ave = not_mixed_to_none(average_mixing_time(net, gamma, eps, origin, search))?;
    Ok(MixingReport {
        epsilon: eps,
        t_ins_measured: t_ins,
        t_ave_measured: t_ave,
        ins_lower_exact: ins_bounds.lower_exact,
        ins_lower_asym: ins_bounds.lower_asym,
        ins_upper: ins_bounds.upper,
        ave_lower,
        ave_upper,
        epsilon_too_large_for_lower_bound: ins_bounds.epsilon_too_large,
        gamma_below_large_decoherence_gate: gamma < VALIDITY_GATE,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn tv_examples() {
        let a = ProbabilityDist { values: vec![0.4, 0.2, 0.2, 0.2], origin: 0 };
        let u = ProbabilityDist::uniform(4);
        assert_abs_diff_eq!(total_variation(&a, &a).unwrap(), 0.0);
        assert_abs_diff_eq!(total_variation(&a, &u).unwrap(), 0.3, epsilon = 1e-15);
        assert_abs_diff_eq!(total_variation_conv(&a, &u, true).unwrap(), 0.15, epsilon = 1e-15);
        for n in 3..=64 {
            let d = ProbabilityDist::delta(n, 0);
            let u = ProbabilityDist::uniform(n);
            let expect = 2.0 * (n as f64 - 1.0) / n as f64;
            assert_abs_diff_eq!(total_variation(&d, &u).unwrap(), expect, epsilon = 1e-14);
        }
        let short = ProbabilityDist::uniform(3);
        assert!(total_variation(&a, &short).is_err());
    }

    #[test]
    fn crossing_at_zero_for_large_eps() {
        let net = RegularNetwork::new(10, 1).unwrap();
        let eps = 2.0 * 9.0 / 10.0 + 1e-9; // TV of delta vs uniform, plus rounding slack
        let t = instantaneous_mixing_time(&net, 10.0, eps, 0, &SearchConfig::default()).unwrap();
        assert_eq!(t, 0.0);
    }

    #[test]
    fn instantaneous_bound_values() {
        let b = bounds_instantaneous(100, 1, 10.0, 0.01).unwrap();
        let expect_asym = 2.0 * 10.0 * 1e4 / (PI * PI) * 2.0f64.ln();
        let expect_upper = 10.0 * 1e4 / 2.0 * 201.0f64.ln();
        assert_relative_eq!(b.lower_asym.unwrap(), expect_asym, max_relative = 1e-12);
        assert_relative_eq!(b.upper, expect_upper, max_relative = 1e-12);
        assert_relative_eq!(b.lower_asym.unwrap(), 1.404e4, max_relative = 1e-3);
        assert_relative_eq!(b.upper, 2.651e5, max_relative = 1e-3);
        let s1 = (PI / 100.0).sin().powi(2);
        assert_relative_eq!(
            b.lower_exact.unwrap(),
            2.0 * 10.0 / s1 * 2.0f64.ln(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn lower_bounds_flagged_for_large_eps() {
        let b = bounds_instantaneous(100, 1, 10.0, 0.5).unwrap();
        assert!(b.epsilon_too_large);
        assert!(b.lower_exact.is_none() && b.lower_asym.is_none());
        assert!(b.upper > 0.0);
    }

    #[test]
    fn average_bound_values() {
        let (lower, upper) = bounds_average(100, 1, 10.0, 0.01).unwrap();
        assert_relative_eq!(lower, 4.0 * 10.0 * 100.0 / (0.01 * PI * PI), max_relative = 1e-12);
        assert_relative_eq!(upper, 10.0 * 1e4 * PI * PI / 0.06, max_relative = 1e-12);
        assert_relative_eq!(upper, 1.645e7, max_relative = 1e-3);
        assert!(lower < upper);
    }

    #[test]
    fn sum_sq_ratio_between_l_values() {
        // l = 3 bounds are exactly 1/14 of the l = 1 bounds.
        let b1 = bounds_average(100, 1, 10.0, 0.01).unwrap();
        let b3 = bounds_average(100, 3, 10.0, 0.01).unwrap();
        assert_relative_eq!(b3.0 * 14.0, b1.0, max_relative = 1e-12);
        assert_relative_eq!(b3.1 * 14.0, b1.1, max_relative = 1e-12);
        let i1 = bounds_instantaneous(100, 1, 10.0, 0.01).unwrap();
        let i3 = bounds_instantaneous(100, 3, 10.0, 0.01).unwrap();
        assert_relative_eq!(i3.upper * 14.0, i1.upper, max_relative = 1e-12);
        assert_relative_eq!(
            i3.lower_asym.unwrap() * 14.0,
            i1.lower_asym.unwrap(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn cycle_reduction_l1() {
        // l = 1 formulas equal the standalone cycle expressions.
        let (n, gamma, eps) = (64usize, 12.0, 0.005);
        let nf = n as f64;
        let b = bounds_instantaneous(n, 1, gamma, eps).unwrap();
        let cycle_lower = 2.0 * gamma * nf * nf / (PI * PI) * (2.0 / (nf * eps)).ln();
        let cycle_upper = gamma * nf * nf / 2.0 * ((2.0 + eps) / eps).ln();
        assert_relative_eq!(b.lower_asym.unwrap(), cycle_lower, max_relative = 1e-12);
        assert_relative_eq!(b.upper, cycle_upper, max_relative = 1e-12);
    }

    #[test]
    fn lric_reduction_single_extra_range() {
        // ranges = {1, m}: sum m^2 = 1 + m^2, the long-range interacting
        // cycle form.
        let (n, gamma, eps) = (64usize, 12.0, 0.005);
        let nf = n as f64;
        for m in [2usize, 3, 5] {
            let b = bounds_instantaneous_ranges(n, &[1, m], gamma, eps).unwrap();
            let lric_upper =
                gamma * nf * nf / (2.0 * (1.0 + (m * m) as f64)) * ((2.0 + eps) / eps).ln();
            assert_relative_eq!(b.upper, lric_upper, max_relative = 1e-12);
            let lric_lower = 2.0 * gamma * nf * nf / (PI * PI * (1.0 + (m * m) as f64))
                * (2.0 / (nf * eps)).ln();
            assert_relative_eq!(b.lower_asym.unwrap(), lric_lower, max_relative = 1e-12);
        }
    }

    #[test]
    fn measured_time_between_bounds() {
        let net = RegularNetwork::new(100, 1).unwrap();
        let t = instantaneous_mixing_time(&net, 10.0, 0.01, 0, &SearchConfig::default()).unwrap();
        let b = bounds_instantaneous(100, 1, 10.0, 0.01).unwrap();
        assert!(t >= b.lower_asym.unwrap());
        assert!(t <= b.upper);
        assert!(t >= 1.40e4 && t <= 2.65e5);
    }

    #[test]
    fn doubling_gamma_doubles_measured_time() {
        let net = RegularNetwork::new(100, 2).unwrap();
        let search = SearchConfig::default();
        let t1 = instantaneous_mixing_time(&net, 10.0, 0.01, 0, &search).unwrap();
        let t2 = instantaneous_mixing_time(&net, 20.0, 0.01, 0, &search).unwrap();
        assert!((t2 / t1 - 2.0).abs() < 0.01 * 2.0);
    }

    #[test]
    fn instantaneous_before_average() {
        let net = RegularNetwork::new(50, 1).unwrap();
        let search = SearchConfig::default();
        let t_ins = instantaneous_mixing_time(&net, 10.0, 0.05, 0, &search).unwrap();
        let t_ave = average_mixing_time(&net, 10.0, 0.05, 0, &search).unwrap();
        assert!(t_ave >= t_ins);
    }

    #[test]
    fn report_carries_flags_and_bounds() {
        let net = RegularNetwork::new(50, 2).unwrap();
        let search = SearchConfig::default();
        let r = mixing_report(&net, 20.0, 0.01, 0, &search).unwrap();
        assert!(!r.epsilon_too_large_for_lower_bound);
        assert!(!r.gamma_below_large_decoherence_gate);
        let t_ave = r.t_ave_measured.unwrap();
        assert!(t_ave >= r.ave_lower && t_ave <= r.ave_upper);
        assert!(r.ins_lower_asym.unwrap() <= r.ins_upper);

        let low_gamma = mixing_report(&net, 2.0, 0.01, 0, &search).unwrap();
        assert!(low_gamma.gamma_below_large_decoherence_gate);

        let wide = mixing_report(&net, 20.0, 1.0, 0, &search).unwrap();
        assert!(wide.epsilon_too_large_for_lower_bound);
        assert!(wide.ins_lower_asym.is_none());
    }
}
