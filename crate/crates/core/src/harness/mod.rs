//! Experiment drivers, fitting and artifact output.

pub mod conservation;
pub mod convergence;
pub mod csv;
pub mod fit;
pub mod svg;
pub mod tail;
pub mod xsb;

pub use conservation::{conservation_experiment, diagnose, relative_drifts, ConservationRow, Diagnostics};
pub use convergence::{convergence_experiment, ConvergenceLevel, ConvergenceReport, ConvergenceSetup};
pub use csv::{conserve_csv, converge_csv, simulate_csv, tail_csv, Cell, CsvRecord};
pub use fit::{fit_loglog_slope, LogLogFit};
pub use tail::{tail_experiment, TailEnvelope, TailReport, TailRow, TailSetup};
pub use xsb::xsb_norm_estimate;
