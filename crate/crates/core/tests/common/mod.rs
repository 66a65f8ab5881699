//! Independent reference computations for the integration tests. Nothing
//! here calls into the crate's FFT path: fields are synthesized by direct
//! trigonometric sums and coefficients recovered by a naive DFT.

#![allow(dead_code)]

use std::f64::consts::PI;

use dnls_core::spectral::{random_state, SpectralProfile};
use dnls_core::SpectralState;
use num_complex::Complex64;

pub fn seeded(seed: u64, n_max: usize, sigma: f64, amplitude: f64) -> SpectralState {
    random_state(&SpectralProfile { sigma, amplitude, seed }, n_max).unwrap()
}

/// `u(x_j)` and `u_x(x_j)` on `m` equispaced points.
pub fn sample(state: &SpectralState, m: usize) -> (Vec<Complex64>, Vec<Complex64>) {
    let mut u = vec![Complex64::new(0.0, 0.0); m];
    let mut ux = u.clone();
    for (j, (uj, uxj)) in u.iter_mut().zip(ux.iter_mut()).enumerate() {
        let x = 2.0 * PI * j as f64 / m as f64;
        for (xi, c) in state.modes() {
            let e = Complex64::from_polar(1.0, xi as f64 * x) * c;
            *uj += e;
            *uxj += Complex64::new(0.0, xi as f64) * e;
        }
    }
    (u, ux)
}

/// Coefficients `|xi| <= n_max` of grid data by a direct DFT.
pub fn coefficients(values: &[Complex64], n_max: usize) -> Vec<Complex64> {
    let m = values.len();
    let n = n_max as i64;
    (-n..=n)
        .map(|xi| {
            values
                .iter()
                .enumerate()
                .map(|(j, v)| v * Complex64::from_polar(1.0, -2.0 * PI * (xi * j as i64) as f64 / m as f64))
                .sum::<Complex64>()
                / m as f64
        })
        .collect()
}

/// Smallest grid on which a degree-5 product of band-`n` fields projects
/// onto `|xi| <= n` without aliasing.
pub fn exact_grid(n_max: usize) -> usize {
    6 * n_max + 2
}

/// `N1 = -i u^2 conj(u_x) + 2 (sum xi |c|^2) u`.
pub fn n1_oracle(state: &SpectralState) -> Vec<Complex64> {
    let n = state.n_max();
    let (u, ux) = sample(state, exact_grid(n));
    let g: Vec<Complex64> = u.iter().zip(&ux).map(|(a, b)| Complex64::new(0.0, -1.0) * a * a * b.conj()).collect();
    let flux: f64 = state.modes().map(|(xi, c)| xi as f64 * c.norm_sqr()).sum();
    coefficients(&g, n)
        .into_iter()
        .zip(state.coeffs())
        .map(|(a, c)| a + 2.0 * flux * c)
        .collect()
}

/// The full nonlinearity `-i u^2 conj(u_x) - 1/2 |u|^4 u + mu |u|^2 u - psi u`.
pub fn full_oracle(state: &SpectralState, mu: f64) -> Vec<Complex64> {
    let n = state.n_max();
    let m = exact_grid(n);
    let (u, ux) = sample(state, m);
    let quartic_mean = u.iter().map(|a| a.norm_sqr().powi(2)).sum::<f64>() / m as f64;
    let flux: f64 = state.modes().map(|(xi, c)| xi as f64 * c.norm_sqr()).sum();
    let psi = -2.0 * flux - 0.5 * quartic_mean;
    let g: Vec<Complex64> = u
        .iter()
        .zip(&ux)
        .map(|(a, b)| {
            let r = a.norm_sqr();
            Complex64::new(0.0, -1.0) * a * a * b.conj() - 0.5 * r * r * a + mu * r * a - psi * a
        })
        .collect();
    coefficients(&g, n)
}

/// `(du/dt)_xi = -i xi^2 c_xi - i N_xi` from [`full_oracle`].
pub fn rhs_oracle(state: &SpectralState, mu: f64) -> Vec<Complex64> {
    let nl = full_oracle(state, mu);
    state
        .modes()
        .zip(nl)
        .map(|((xi, c), nx)| Complex64::new(0.0, -1.0) * ((xi * xi) as f64 * c + nx))
        .collect()
}

pub fn max_abs(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// `sum <xi>^{2s} |c_xi|^2`.
pub fn hs_squared(state: &SpectralState, s: f64) -> f64 {
    state.modes().map(|(xi, c)| (1.0 + (xi * xi) as f64).powf(s) * c.norm_sqr()).sum()
}

/// Observed order `log2(e(h) / e(h/2))`.
pub fn order(coarse: f64, fine: f64) -> f64 {
    (coarse / fine).log2()
}
