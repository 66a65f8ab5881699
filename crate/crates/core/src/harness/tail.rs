//! High-frequency tails along a resolved run, against the data tail.

use crate::error::{DnlsError, Result};
use crate::evolution::{evolve, SimConfig};
use crate::nonlinearity::MuMode;
use crate::spectral::{mass, norm, project, random_state, Band, NormSpec, SpectralProfile, SpectralState};

/// Largest admissible `||u0||_{L^2}`.
pub const SMALL_MASS_LIMIT: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub struct TailSetup {
    pub profile: SpectralProfile,
    pub s: f64,
    pub ns: Vec<usize>,
    /// Resolution of the run.
    pub n_max: usize,
    pub t_end: f64,
    pub dt: f64,
    pub record_stride: usize,
    pub c_grid: Vec<f64>,
    /// Restricts the data to `|xi| <= band_limit`.
    pub band_limit: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TailRow {
    pub n: usize,
    /// `sup_t ||P_{>=N} u(t)||_{H^s}` over recorded frames.
    pub sup_tail_hs: f64,
    /// `||P_{>=CN} u0||_{H^s}` for each `C` of the grid.
    pub data_tails: Vec<f64>,
}

/// Smallest grid constant `C` with `sup_tail(N) <= C data_tail(CN) + C N^{-eps}`
/// for every row and some `eps > 0`. `epsilon` is the largest such exponent,
/// capped at 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailEnvelope {
    pub c: f64,
    pub epsilon: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TailReport {
    pub rows: Vec<TailRow>,
    pub c_grid: Vec<f64>,
    pub envelope: Option<TailEnvelope>,
    pub initial_l2: f64,
}

impl TailReport {
    /// Data tail column matching the fitted `C`, or `C = 1` without an envelope.
    pub fn data_tail_column(&self) -> Vec<f64> {
        let target = self.envelope.map_or(1.0, |e| e.c);
        let k = self
            .c_grid
            .iter()
            .position(|&c| c == target)
            .unwrap_or(0);
        self.rows.iter().map(|r| r.data_tails.get(k).copied().unwrap_or(0.0)).collect()
    }

    pub fn is_monotone(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].sup_tail_hs <= w[0].sup_tail_hs)
    }
}

fn tail_norm(state: &SpectralState, from: usize, s: f64) -> Result<f64> {
    norm(&project(state, Band::Ge(from)), NormSpec::Sobolev { s })
}

/// `eps(C) = min(1, min_N ln(C / e_N) / ln N)` over rows with positive excess
/// `e_N = sup_tail - C data_tail`; `None` if some excess reaches `C`.
pub fn envelope_exponent(rows: &[TailRow], k: usize, c: f64) -> Option<f64> {
    let mut eps = 1.0f64;
    for row in rows {
        let excess = row.sup_tail_hs - c * row.data_tails[k];
        if excess <= 0.0 {
            continue;
        }
        if row.n < 2 || excess >= c {
            return None;
        }
        eps = eps.min((c / excess).ln() / (row.n as f64).ln());
    }
    (eps > 0.0).then_some(eps)
}

pub fn tail_experiment(setup: &TailSetup) -> Result<TailReport> {
    if setup.ns.windows(2).any(|w| w[0] >= w[1]) {
        return Err(DnlsError::Precondition(format!("Ns must increase: {:?}", setup.ns)));
    }
    if setup.c_grid.iter().any(|&c| !(c > 0.0)) {
        return Err(DnlsError::Precondition("C grid must be positive".into()));
    }
    let mut u0 = random_state(&setup.profile, setup.n_max)?;
    if let Some(b) = setup.band_limit {
        u0 = project(&u0, Band::Le(b));
    }
    let initial_l2 = mass(&u0).sqrt();
    if initial_l2 > SMALL_MASS_LIMIT {
        return Err(DnlsError::Precondition(format!(
            "||u0||_L2 = {initial_l2} exceeds {SMALL_MASS_LIMIT}"
        )));
    }
    let cfg = SimConfig::new(setup.n_max, setup.dt, setup.t_end, MuMode::from_initial(&u0))
        .with_stride(setup.record_stride);
    let traj = evolve(&u0, &cfg)?;

    let mut rows = Vec::with_capacity(setup.ns.len());
    for &n in &setup.ns {
        let mut sup = 0.0f64;
        for f in &traj.frames {
            sup = sup.max(tail_norm(f, n, setup.s)?);
        }
        let data_tails = setup
            .c_grid
            .iter()
            .map(|&c| tail_norm(&u0, (c * n as f64).ceil() as usize, setup.s))
            .collect::<Result<Vec<_>>>()?;
        rows.push(TailRow { n, sup_tail_hs: sup, data_tails });
    }

    let mut order: Vec<usize> = (0..setup.c_grid.len()).collect();
    order.sort_by(|&a, &b| setup.c_grid[a].total_cmp(&setup.c_grid[b]));
    let envelope = order.into_iter().find_map(|k| {
        let c = setup.c_grid[k];
        envelope_exponent(&rows, k, c).map(|epsilon| TailEnvelope { c, epsilon })
    });
    Ok(TailReport {
        rows,
        c_grid: setup.c_grid.clone(),
        envelope,
        initial_l2,
    })
}
