//! Shared fixtures for the benchmarks.

use dnls_core::spectral::{random_state, SpectralProfile};
use dnls_core::{MuMode, SimConfig, SpectralState};

/// Seeded power-law state with `sigma = 1`, amplitude `0.1`.
pub fn fixture(n_max: usize) -> SpectralState {
    random_state(&SpectralProfile { sigma: 1.0, amplitude: 0.1, seed: 42 }, n_max).expect("valid profile")
}

/// A one-step configuration at the fixture's resolution.
pub fn step_config(u0: &SpectralState, dt: f64) -> SimConfig {
    SimConfig::new(u0.n_max(), dt, dt, MuMode::from_initial(u0))
}
