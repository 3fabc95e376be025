//! Inputs shared by the benchmarks.

use dichotomy_core::logistic_orbit;

/// `n` samples of the fully chaotic logistic map.
pub fn chaotic_series(n: usize) -> Vec<f64> {
    logistic_orbit(4.0, 0.3141, 1000, n)
        .expect("valid logistic orbit")
        .values()
        .to_vec()
}
