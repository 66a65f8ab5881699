//! Pseudospectral laboratory for the derivative nonlinear Schrödinger
//! equation on the torus.

pub mod error;
pub mod evolution;
mod fft;
pub mod gauge;
pub mod harness;
pub mod invariants;
pub mod multiplier;
pub mod nonlinearity;
pub mod spectral;

pub use error::{DnlsError, Result};
pub use evolution::{Provenance, Scheme, SimConfig, Trajectory};
pub use gauge::{GaugePhase, GaugeResult};
pub use fft::{product_grid_size, smooth_size};
pub use invariants::{ConservedTriple, GrowthReport};
pub use multiplier::{BoundCase, DmvtReport, FrequencyQuad, ScanReport, Thresholds};
pub use nonlinearity::{MuMode, ResonanceClass, Term};
pub use spectral::{Band, GridFunction, NormSpec, SpectralProfile, SpectralState};
