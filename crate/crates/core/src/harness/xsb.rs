//! Windowed discrete estimator of the `X^{s,b}` norm of a trajectory.
//!
//! Each mode is demodulated by the free phase `e^{i xi^2 t}`, multiplied by a
//! Hann window and transformed in time. On the lattice
//! `sigma_k = tau + xi^2 = 2 pi k / (K dt)` the estimate is
//!
//! ```text
//! ( sum_xi <xi>^{2s} sum_k <sigma_k>^{2b} |g_xi(sigma_k)|^2 dsigma )^{1/2}
//! g_xi(sigma) = (dt / sqrt(2 pi)) sum_n w_n e^{i xi^2 t_n} c_xi(t_n) e^{-i sigma t_n}
//! ```
//!
//! With `b = 0` this is exactly `(sum_n dt w_n^2 ||u(t_n)||_{H^s}^2)^{1/2}`.
//! It is a diagnostic and not the continuum norm.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{DnlsError, Result};
use crate::evolution::Trajectory;
use crate::fft::forward_in_place;
use crate::spectral::jbracket;

pub const MIN_FRAMES: usize = 8;

/// Symmetric Hann window of length `k`, positive at every sample.
pub fn hann_window(k: usize) -> Vec<f64> {
    (0..k)
        .map(|n| {
            let x = PI * (n as f64 + 0.5) / k as f64;
            x.sin().powi(2)
        })
        .collect()
}

pub fn xsb_norm_estimate(traj: &Trajectory, s: f64, b: f64) -> Result<f64> {
    let k = traj.frames.len();
    if k < MIN_FRAMES {
        return Err(DnlsError::Precondition(format!(
            "estimator needs at least {MIN_FRAMES} frames, got {k}"
        )));
    }
    let dt = traj
        .uniform_spacing()
        .ok_or_else(|| DnlsError::Precondition("frames are not uniformly spaced".into()))?;
    let n_max = traj.frames[0].n_max();
    if traj.frames.iter().any(|f| f.n_max() != n_max) {
        return Err(DnlsError::Precondition("frames disagree on n_max".into()));
    }
    let window = hann_window(k);
    let dsigma = 2.0 * PI / (k as f64 * dt);
    let sigma_weight: Vec<f64> = (0..k)
        .map(|j| {
            let signed = if j < k.div_ceil(2) { j as f64 } else { j as f64 - k as f64 };
            jbracket(signed * dsigma).powf(2.0 * b)
        })
        .collect();
    let amp = dt * dt / (2.0 * PI);

    let n = n_max as i64;
    let mut total = 0.0;
    let mut buf = vec![Complex64::new(0.0, 0.0); k];
    for xi in -n..=n {
        let q = (xi * xi) as f64;
        for (slot, (f, w)) in buf.iter_mut().zip(traj.frames.iter().zip(&window)) {
            *slot = *w * Complex64::from_polar(1.0, q * f.time()) * f.get(xi);
        }
        if buf.iter().all(|z| *z == Complex64::new(0.0, 0.0)) {
            continue;
        }
        forward_in_place(&mut buf);
        let row: f64 = buf
            .iter()
            .zip(&sigma_weight)
            .map(|(z, wt)| wt * z.norm_sqr())
            .sum();
        total += jbracket(xi as f64).powf(2.0 * s) * row * amp * dsigma;
    }
    Ok(total.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolution::{evolve, SimConfig};
    use crate::nonlinearity::MuMode;
    use crate::spectral::{norm, random_state, NormSpec, SpectralProfile, SpectralState};

    fn free_run() -> Trajectory {
        let u0 = random_state(&SpectralProfile { sigma: 1.0, amplitude: 1e-6, seed: 8 }, 6).unwrap();
        evolve(&u0, &SimConfig::new(6, 0.01, 0.63, MuMode::Constant(0.0))).unwrap()
    }

    #[test]
    fn b_zero_is_windowed_l2_hs() {
        let traj = free_run();
        let w = hann_window(traj.frames.len());
        let dt = traj.uniform_spacing().unwrap();
        let direct: f64 = traj
            .frames
            .iter()
            .zip(&w)
            .map(|(f, wn)| dt * wn * wn * norm(f, NormSpec::Sobolev { s: 0.4 }).unwrap().powi(2))
            .sum::<f64>()
            .sqrt();
        let est = xsb_norm_estimate(&traj, 0.4, 0.0).unwrap();
        assert!((est - direct).abs() <= 1e-12 * direct);
    }

    #[test]
    fn free_evolution_beats_scrambled_phases() {
        let traj = free_run();
        let mut scrambled = traj.clone();
        for (k, f) in scrambled.frames.iter_mut().enumerate() {
            *f = f.map_modes(|xi, c| c * Complex64::from_polar(1.0, 1.7 * (k as f64) * (xi as f64 + 0.3)));
        }
        let a = xsb_norm_estimate(&traj, 0.3, 0.6).unwrap();
        let b = xsb_norm_estimate(&scrambled, 0.3, 0.6).unwrap();
        assert!(a <= b, "{a} {b}");
    }

    #[test]
    fn zero_and_short_trajectories() {
        let z = SpectralState::zeros(3);
        let traj = evolve(&z, &SimConfig::new(3, 0.1, 1.0, MuMode::Constant(0.0))).unwrap();
        assert_eq!(xsb_norm_estimate(&traj, 0.5, 0.7).unwrap(), 0.0);
        let short = evolve(&z, &SimConfig::new(3, 0.1, 0.5, MuMode::Constant(0.0))).unwrap();
        assert!(xsb_norm_estimate(&short, 0.5, 0.7).is_err());
    }
}
