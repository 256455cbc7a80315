//! Coherent (unitary) and classical (relaxational) transition probabilities
//! via direct spectral sums.

use num_complex::Complex64 as C64;

use crate::network::RegularNetwork;

/// Probability per node, together with the starting node the walk was
/// launched from.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityDist {
    pub values: Vec<f64>,
    pub origin: usize,
}

impl ProbabilityDist {
    pub fn delta(n: usize, origin: usize) -> Self {
        let mut values = vec![0.0; n];
        values[origin] = 1.0;
        Self { values, origin }
    }

    pub fn uniform(n: usize) -> Self {
        Self { values: vec![1.0 / n as f64; n], origin: 0 }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }

    /// True when the values sum to 1 within `tol` and no entry is below
    /// `-tol`. Closed-form distributions at large decoherence may dip
    /// marginally negative at intermediate times; callers decide whether
    /// that matters.
    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.total() - 1.0).abs() < tol && self.values.iter().all(|&v| v > -tol)
    }
}

/// Transition amplitude `alpha_{k,j}(t) = (1/n) sum_m exp(-i t eps_m) exp(-i (k - j) theta_m)`,
/// with the uniform Hamiltonian diagonal dropped (global phase).
pub fn transition_amplitude(
    net: &RegularNetwork,
    g: f64,
    t: f64,
    j: usize,
    k: usize,
) -> C64 {
    let n = net.n();
    let sp = net.spectrum(g).expect("valid g");
    let d = k as f64 - j as f64;
    let sum: C64 = (0..n)
        .map(|m| C64::new(0.0, -(t * sp.hop_freqs[m] + d * sp.thetas[m])).exp())
        .sum();
    sum / n as f64
}

/// Coherent node distribution `|alpha_{k,origin}(t)|^2`.
pub fn quantum_distribution(
    net: &RegularNetwork,
    g: f64,
    t: f64,
    origin: usize,
) -> ProbabilityDist {
    let n = net.n();
    let values = (0..n)
        .map(|k| transition_amplitude(net, g, t, origin, k).norm_sqr())
        .collect();
    ProbabilityDist { values, origin }
}

/// Classical node distribution
/// `(1/n) sum_m exp(-t lambda_m) cos((k - origin) theta_m)`.
///
/// `lambda_m >= 0` are the Laplacian relaxation rates, so every nonzero mode
/// decays and the distribution converges to uniform.
pub fn classical_distribution(
    net: &RegularNetwork,
    t: f64,
    origin: usize,
) -> ProbabilityDist {
    let n = net.n();
    let sp = net.spectrum(1.0).expect("g = 1 valid");
    let values = (0..n)
        .map(|k| {
            let d = k as f64 - origin as f64;
            (0..n)
                .map(|m| (-t * sp.laplacian_rates[m]).exp() * (d * sp.thetas[m]).cos())
                .sum::<f64>()
                / n as f64
        })
        .collect();
    ProbabilityDist { values, origin }
}
