//! Per-frame diagnostics along one run.

use crate::error::Result;
use crate::evolution::{evolve, SimConfig, Trajectory};
use crate::invariants::conserved;
use crate::nonlinearity::mu;
use crate::spectral::{norm, project, Band, NormSpec, SpectralState};

#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostics {
    pub s: f64,
    pub s1: f64,
    pub p: f64,
    /// `||P_{>=N} u||_{H^s}` is reported for each listed `N`.
    pub tail_ns: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConservationRow {
    pub t: f64,
    pub mass: f64,
    pub energy: f64,
    pub momentum: f64,
    pub hs_norm: f64,
    pub fl_norm: f64,
    pub tails: Vec<f64>,
}

/// Diagnostics of every frame. Energy uses `mu` of the first frame.
pub fn diagnose(traj: &Trajectory, diag: &Diagnostics) -> Result<Vec<ConservationRow>> {
    let mu0 = mu(&traj.frames[0]);
    traj.frames.iter().map(|f| row(f, mu0, diag)).collect()
}

fn row(state: &SpectralState, mu0: f64, diag: &Diagnostics) -> Result<ConservationRow> {
    let c = conserved(state, mu0);
    let tails = diag
        .tail_ns
        .iter()
        .map(|&n| norm(&project(state, Band::Ge(n)), NormSpec::Sobolev { s: diag.s }))
        .collect::<Result<Vec<_>>>()?;
    Ok(ConservationRow {
        t: state.time(),
        mass: c.mass,
        energy: c.energy,
        momentum: c.momentum,
        hs_norm: norm(state, NormSpec::Sobolev { s: diag.s })?,
        fl_norm: norm(state, NormSpec::FourierLebesgue { s: diag.s1, p: diag.p })?,
        tails,
    })
}

pub fn conservation_experiment(u0: &SpectralState, cfg: &SimConfig, diag: &Diagnostics) -> Result<Vec<ConservationRow>> {
    diagnose(&evolve(u0, cfg)?, diag)
}

/// Largest `|q(t) - q(0)| / |q(0)|` of mass, energy and momentum; a zero
/// initial value is compared absolutely.
pub fn relative_drifts(rows: &[ConservationRow]) -> [f64; 3] {
    let first = &rows[0];
    let rel = |a: f64, b: f64| if b == 0.0 { a.abs() } else { (a - b).abs() / b.abs() };
    let mut out = [0.0f64; 3];
    for r in rows {
        out[0] = out[0].max(rel(r.mass, first.mass));
        out[1] = out[1].max(rel(r.energy, first.energy));
        out[2] = out[2].max(rel(r.momentum, first.momentum));
    }
    out
}
