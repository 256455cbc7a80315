//! 1D regular network topology and its closed-form circulant spectrum.

use std::f64::consts::PI;

use ndarray::Array2;
use num_complex::Complex64 as C64;

use crate::Error;

/// Cycle of `n` nodes where each node is linked to its `2l` nearest neighbors
/// (`l` on either side). All index arithmetic is modulo `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RegularNetwork {
    n: usize,
    l: usize,
}

impl RegularNetwork {
    /// Validates `n >= 3` and `1 <= l <= floor((n - 1) / 2)`, so that the
    /// `±m` neighbors of a node are all distinct and the degree is exactly `2l`.
    pub fn new(n: usize, l: usize) -> Result<Self, Error> {
        if n < 3 {
            return Err(Error::InvalidParameter(format!("need n >= 3, got n = {n}")));
        }
        if l < 1 || 2 * l >= n {
            return Err(Error::InvalidParameter(format!(
                "need 1 <= l <= floor((n - 1) / 2); got n = {n}, l = {l}"
            )));
        }
        Ok(Self { n, l })
    }

    pub fn n(&self) -> usize { self.n }

    pub fn l(&self) -> usize { self.l }

    /// Neighbors of node `j`, sorted ascending.
    pub fn neighbors(&self, j: usize) -> Vec<usize> {
        let mut out: Vec<usize> = (1..=self.l)
            .flat_map(|m| [(j + m) % self.n, (j + self.n - m) % self.n])
            .collect();
        out.sort_unstable();
        out
    }

    /// `sum_{m=1}^{l} m^2 = l(l+1)(2l+1)/6`.
    pub fn sum_sq(&self) -> f64 {
        let l = self.l;
        (l * (l + 1) * (2 * l + 1)) as f64 / 6.0
    }

    /// Mode angle `theta_n = 2 pi n / n_nodes`, computed directly (not by
    /// accumulated increments) so the reflection symmetry of the spectrum
    /// holds to rounding.
    pub fn theta(&self, mode: usize) -> f64 {
        2.0 * PI * mode as f64 / self.n as f64
    }

    /// Mode sine-sum `s_k = sum_{m=1}^{l} sin^2(pi k m / n)`.
    pub fn sin2_sum(&self, k: usize) -> f64 {
        (1..=self.l)
            .map(|m| (PI * (k * m) as f64 / self.n as f64).sin().powi(2))
            .sum()
    }

    /// Smallest nonzero-mode sine-sum, `min_{k != 0} s_k`. Controls the
    /// slowest decaying mode at large decoherence.
    pub fn min_sin2_sum(&self) -> f64 {
        (1..self.n)
            .map(|k| self.sin2_sum(k))
            .fold(f64::INFINITY, f64::min)
    }

    /// Closed-form spectrum for hopping amplitude `g > 0`.
    pub fn spectrum(&self, g: f64) -> Result<Spectrum, Error> {
        if !(g > 0.0) {
            return Err(Error::InvalidParameter(format!("need g > 0, got g = {g}")));
        }
        let n = self.n;
        let thetas: Vec<f64> = (0..n).map(|k| self.theta(k)).collect();
        let cos_sums: Vec<f64> = thetas
            .iter()
            .map(|&th| (1..=self.l).map(|m| (m as f64 * th).cos()).sum())
            .collect();
        let laplacian_rates: Vec<f64> =
            cos_sums.iter().map(|&c| 2.0 * self.l as f64 - 2.0 * c).collect();
        let hop_freqs: Vec<f64> = cos_sums.iter().map(|&c| 2.0 * g * c).collect();
        let sin2_sums: Vec<f64> = (0..n).map(|k| self.sin2_sum(k)).collect();
        Ok(Spectrum { thetas, laplacian_rates, hop_freqs, sin2_sums })
    }

    /// Explicit Hamiltonian matrix: diagonal `-2l`, `+1` at distances
    /// `1..=l` (mod `n`). The uniform diagonal only contributes a global
    /// phase to probabilities downstream.
    pub fn hamiltonian(&self) -> Array2<f64> {
        let n = self.n;
        let mut h = Array2::zeros((n, n));
        for j in 0..n {
            h[(j, j)] = -2.0 * self.l as f64;
            for m in 1..=self.l {
                h[(j, (j + m) % n)] = 1.0;
                h[(j, (j + n - m) % n)] = 1.0;
            }
        }
        h
    }

    /// Brute-force spectral oracle: applies the explicit Hamiltonian to each
    /// Bloch vector and returns `max_k ||H q_k - E_k q_k||_inf`, with `E_k`
    /// from the closed form.
    pub fn verify_spectrum(&self) -> f64 {
        let n = self.n;
        let h = self.hamiltonian();
        let norm = 1.0 / (n as f64).sqrt();
        let mut max_resid: f64 = 0.0;
        for mode in 0..n {
            let th = self.theta(mode);
            let q: Vec<C64> = (0..n)
                .map(|j| (C64::new(0.0, -th * j as f64)).exp() * norm)
                .collect();
            let energy = -2.0 * self.l as f64
                + 2.0 * (1..=self.l).map(|m| (m as f64 * th).cos()).sum::<f64>();
            for j in 0..n {
                let hq: C64 = (0..n).map(|k| h[(j, k)] * q[k]).sum();
                max_resid = max_resid.max((hq - energy * q[j]).norm());
            }
        }
        max_resid
    }
}

/// Per-mode closed-form spectral data of a [`RegularNetwork`].
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    /// Mode angles `theta_k = 2 pi k / n`.
    pub thetas: Vec<f64>,
    /// Laplacian relaxation rates `lambda_k = 2l - 2 sum_m cos(m theta_k) >= 0`.
    pub laplacian_rates: Vec<f64>,
    /// Hopping eigenfrequencies `eps_k = 2 g sum_m cos(m theta_k)`.
    pub hop_freqs: Vec<f64>,
    /// Sine sums `s_k = sum_m sin^2(pi k m / n)`; note `lambda_k = 4 s_k`.
    pub sin2_sums: Vec<f64>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn build_rejects_bad_parameters() {
        assert!(RegularNetwork::new(2, 1).is_err());
        assert!(RegularNetwork::new(4, 2).is_err());
        assert!(RegularNetwork::new(8, 0).is_err());
        assert!(RegularNetwork::new(8, 4).is_err());
        assert!(RegularNetwork::new(3, 1).is_ok());
        assert!(RegularNetwork::new(9, 4).is_ok());
    }

    #[test]
    fn neighbors_of_node_zero() {
        let net = RegularNetwork::new(8, 3).unwrap();
        assert_eq!(net.neighbors(0), vec![1, 2, 3, 5, 6, 7]);
        let cycle = RegularNetwork::new(4, 1).unwrap();
        assert_eq!(cycle.neighbors(0), vec![1, 3]);
    }

    #[test]
    fn degree_is_2l() {
        for (n, l) in [(5, 2), (8, 3), (16, 7), (9, 4)] {
            let net = RegularNetwork::new(n, l).unwrap();
            for j in 0..n {
                assert_eq!(net.neighbors(j).len(), 2 * l);
            }
        }
    }

    #[test]
    fn cycle_spectrum_n4() {
        let net = RegularNetwork::new(4, 1).unwrap();
        let sp = net.spectrum(1.0).unwrap();
        let expect = [0.0, 2.0, 4.0, 2.0];
        for (got, want) in sp.laplacian_rates.iter().zip(expect) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-14);
        }
    }

    #[test]
    fn sine_sum_n8_l3_k1() {
        // sin^2(pi/8) + sin^2(pi/4) + sin^2(3pi/8) = 1.5
        let net = RegularNetwork::new(8, 3).unwrap();
        assert_abs_diff_eq!(net.sin2_sum(1), 1.5, epsilon = 1e-14);
    }

    #[test]
    fn uniform_mode_is_conserved() {
        for (n, l) in [(3, 1), (8, 3), (17, 5), (64, 31)] {
            let net = RegularNetwork::new(n, l).unwrap();
            let sp = net.spectrum(1.0).unwrap();
            assert_abs_diff_eq!(sp.laplacian_rates[0], 0.0, epsilon = 1e-12);
            assert_abs_diff_eq!(sp.sin2_sums[0], 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn bloch_residuals() {
        assert!(RegularNetwork::new(16, 2).unwrap().verify_spectrum() < 1e-12);
        assert!(RegularNetwork::new(4, 1).unwrap().verify_spectrum() < 1e-14);
        assert!(RegularNetwork::new(8, 3).unwrap().verify_spectrum() < 1e-12);
    }

    #[test]
    fn sum_sq_matches_loop() {
        for l in 1..=20 {
            let net = RegularNetwork::new(64, l).unwrap();
            let loop_sum: f64 = (1..=l).map(|m| (m * m) as f64).sum();
            assert_eq!(net.sum_sq(), loop_sum);
        }
    }

    proptest! {
        // lambda_k = 4 s_k, reflection symmetry, non-negativity, bounds on s_k.
        #[test]
        fn spectral_identities(n in 3usize..64, seed in 0usize..1000) {
            let l_max = (n - 1) / 2;
            let l = 1 + seed % l_max;
            let net = RegularNetwork::new(n, l).unwrap();
            let sp = net.spectrum(0.25).unwrap();
            for k in 0..n {
                prop_assert!(sp.laplacian_rates[k] >= -1e-12);
                prop_assert!((sp.laplacian_rates[k] - 4.0 * sp.sin2_sums[k]).abs() < 1e-12);
                prop_assert!(sp.sin2_sums[k] >= 0.0 && sp.sin2_sums[k] <= l as f64 + 1e-12);
                let refl = (n - k) % n;
                prop_assert!((sp.laplacian_rates[k] - sp.laplacian_rates[refl]).abs() < 1e-11);
                prop_assert!((sp.sin2_sums[k] - sp.sin2_sums[refl]).abs() < 1e-12);
            }
        }
    }
}
