//! Shared fixtures for the benchmarks.

use nhqa_core::{ChainParams, IntegratorConfig};
use num_complex::Complex64;

/// J = 0.5, g = 10, τ = 1000, N = 1024 at the given δ.
pub fn baseline(delta: f64) -> ChainParams {
    ChainParams { delta, ..Default::default() }
}

pub fn small_chain(n: usize, delta: f64, tau: f64) -> ChainParams {
    ChainParams { n, delta, tau, ..Default::default() }
}

pub fn default_config() -> IntegratorConfig {
    IntegratorConfig::default()
}

/// (order, argument) pairs spanning the series, continuation and
/// large-argument regimes of D_a(z).
pub fn weber_points() -> Vec<(&'static str, Complex64, Complex64)> {
    let i = Complex64::i();
    vec![
        ("small z", -i * 2.0, Complex64::from_polar(1.5, 0.8)),
        ("medium z", -i * 12.0 - 1.0, Complex64::from_polar(9.0, 2.2)),
        ("large z", -i * 5.0, Complex64::from_polar(60.0, 0.785)),
        ("large order", i * 100.0, Complex64::from_polar(20.0, 0.785)),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_are_valid() {
        baseline(0.5).validate().unwrap();
        small_chain(8, 0.25, 50.0).validate().unwrap();
        default_config().validate().unwrap();
        for (_, a, z) in weber_points() {
            nhqa_core::weber::pcf(a, z).unwrap();
        }
    }
}
