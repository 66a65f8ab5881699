//! Gauge transformation
//!
//! ```text
//! v(t, x) = exp(i G[u](t, x + 2 mu t) + i phi(mu) t) u(t, x + 2 mu t)
//! G[u](x) = (1/2 pi) int_0^{2 pi} int_theta^x (|u(y)|^2 - mu) dy dtheta
//! ```
//!
//! and the residual of `i v_t + v_xx = i (|v|^2 v)_x` along a trajectory.
//!
//! The constant phase rate `phi` is selectable. With `phi = mu^2` a solution
//! of the evolution equation maps to an exact solution of the simplified one;
//! `phi = mu^2 / 4` leaves the constant residual `(3/4) mu^2 v`.

use num_complex::Complex64;

use crate::error::{DnlsError, Result};
use crate::evolution::Trajectory;
use crate::fft::product_grid_size;
use crate::nonlinearity::{mu as mu_of, MuMode};
use crate::spectral::{analyze_raw, norm, synthesize_raw, GridFunction, NormSpec, SpectralState};

const MU_TOLERANCE: f64 = 1e-8;

/// Rate of the constant phase `phi(mu) t` in the transformation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GaugePhase {
    /// `phi = mu^2`.
    #[default]
    MuSquared,
    /// `phi = mu^2 / 4`.
    QuarterMuSquared,
}

impl GaugePhase {
    pub fn rate(&self, mu: f64) -> f64 {
        match self {
            GaugePhase::MuSquared => mu * mu,
            GaugePhase::QuarterMuSquared => 0.25 * mu * mu,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaugeResult {
    /// Transformed field, resolved up to `|xi| <= 3 n_max`.
    pub v_state: SpectralState,
    /// Samples of `G[u](t, x + 2 mu t) + phi t` on the analysis grid of at
    /// least `12 n_max + 1` points.
    pub phase_grid: GridFunction,
    /// L2 mass (coefficient norm) of `e^{iG} u` beyond `3 n_max` that the
    /// analysis discards.
    pub discarded_tail: f64,
}

fn check_mu(state: &SpectralState, mu: f64) -> Result<()> {
    let actual = mu_of(state);
    if !((mu - actual).abs() <= MU_TOLERANCE) {
        return Err(DnlsError::InconsistentMu { supplied: mu, actual });
    }
    Ok(())
}

/// Fourier coefficients of `G[u]` up to `|xi| <= 2 n_max`.
fn primitive_coeffs(state: &SpectralState, mu: f64) -> Vec<Complex64> {
    let n = state.n_max();
    let band = 2 * n;
    let m = product_grid_size(n, 3);
    let u = synthesize_raw(state.coeffs(), n, m);
    let density: Vec<Complex64> = u.iter().map(|v| Complex64::new(v.norm_sqr() - mu, 0.0)).collect();
    let f = analyze_raw(density, band);
    let b = band as i64;
    f.iter()
        .enumerate()
        .map(|(i, &fk)| {
            let xi = i as i64 - b;
            if xi == 0 {
                Complex64::new(0.0, 0.0)
            } else {
                fk / Complex64::new(0.0, xi as f64)
            }
        })
        .collect()
}

/// Samples of `G[u]` on the product grid of `6 n_max + 1` or more points.
pub fn gauge_primitive(state: &SpectralState, mu: f64) -> Result<GridFunction> {
    check_mu(state, mu)?;
    let n = state.n_max();
    let g = primitive_coeffs(state, mu);
    let m = product_grid_size(n, 5);
    let samples = synthesize_raw(&g, 2 * n, m)
        .into_iter()
        .map(|v| Complex64::new(v.re, 0.0))
        .collect();
    GridFunction::new(samples)
}

/// Transformation with the default phase rate `mu^2`.
pub fn gauge_forward(state: &SpectralState, mu: f64) -> Result<GaugeResult> {
    gauge_forward_with(state, mu, GaugePhase::default())
}

pub fn gauge_forward_with(state: &SpectralState, mu: f64, phase: GaugePhase) -> Result<GaugeResult> {
    check_mu(state, mu)?;
    let n = state.n_max();
    let t = state.time();
    let shift = 2.0 * mu * t;
    let constant = phase.rate(mu) * t;
    // twice the retained band, so the discarded tail is visible on the grid
    let m = product_grid_size(n, 11);

    let g = primitive_coeffs(state, mu);
    let g_grid = synthesize_raw(&g, 2 * n, m);
    let u = synthesize_raw(state.coeffs(), n, m);
    let w: Vec<Complex64> = g_grid
        .iter()
        .zip(&u)
        .map(|(gj, uj)| Complex64::from_polar(1.0, gj.re) * uj)
        .collect();
    let wide = 3 * n;
    let full_band = (m - 1) / 2;
    let all = analyze_raw(w, full_band);
    let cut = full_band - wide;
    let discarded_tail = all[..cut]
        .iter()
        .chain(&all[cut + 2 * wide + 1..])
        .map(|v| v.norm_sqr())
        .sum::<f64>()
        .sqrt();
    let wc = all[cut..cut + 2 * wide + 1].to_vec();

    let shift_modes = |coeffs: &[Complex64], band: usize, extra: f64| -> Vec<Complex64> {
        let b = band as i64;
        coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| Complex64::from_polar(1.0, (i as i64 - b) as f64 * shift + extra) * c)
            .collect()
    };
    let v = shift_modes(&wc, wide, constant);
    let g_shifted = shift_modes(&g, 2 * n, 0.0);
    let phase_samples = synthesize_raw(&g_shifted, 2 * n, m)
        .into_iter()
        .map(|p| Complex64::new(p.re + constant, 0.0))
        .collect();

    Ok(GaugeResult {
        v_state: SpectralState::from_parts(wide, v, t),
        phase_grid: GridFunction::new(phase_samples)?,
        discarded_tail,
    })
}

/// `|| i v_t + v_xx - i (|v|^2 v)_x ||_{H^0}` at every interior frame, with
/// `v_t` by centered differences and the spatial terms spectrally.
pub fn dnls_residual(traj: &Trajectory, mu_mode: MuMode) -> Result<Vec<f64>> {
    dnls_residual_with(traj, mu_mode, GaugePhase::default())
}

pub fn dnls_residual_with(traj: &Trajectory, mu_mode: MuMode, phase: GaugePhase) -> Result<Vec<f64>> {
    let frames = &traj.frames;
    if frames.len() < 3 {
        return Err(DnlsError::Precondition(format!(
            "residual needs at least 3 frames, got {}",
            frames.len()
        )));
    }
    let h = traj
        .uniform_spacing()
        .ok_or_else(|| DnlsError::Precondition("frames are not uniformly spaced".into()))?;
    let transformed: Vec<SpectralState> = frames
        .iter()
        .map(|f| gauge_forward_with(f, mu_mode.resolve(f), phase).map(|g| g.v_state))
        .collect::<Result<_>>()?;

    let i = Complex64::new(0.0, 1.0);
    let mut out = Vec::with_capacity(frames.len() - 2);
    for k in 1..frames.len() - 1 {
        let v = &transformed[k];
        let band = v.n_max();
        let grid = product_grid_size(band, 3);
        let vx = synthesize_raw(v.coeffs(), band, grid);
        let cubic = analyze_raw(vx.iter().map(|z| z * z.norm_sqr()).collect(), band);
        let (prev, next) = (transformed[k - 1].coeffs(), transformed[k + 1].coeffs());
        let b = band as i64;
        let r: Vec<Complex64> = v
            .coeffs()
            .iter()
            .enumerate()
            .map(|(j, &c)| {
                let xi = (j as i64 - b) as f64;
                let vt = (next[j] - prev[j]) / (2.0 * h);
                i * vt - xi * xi * c + xi * cubic[j]
            })
            .collect();
        out.push(norm(&SpectralState::from_parts(band, r, v.time()), NormSpec::Sobolev { s: 0.0 })?);
    }
    Ok(out)
}
