//! Conserved functionals, the `H^s` growth identity and its symmetrized
//! four-linear form.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{DnlsError, Result};
use crate::fft::product_grid_size;
use crate::multiplier::FrequencyQuad;
use crate::nonlinearity::{decompose, quartic_mean, MuMode, DIRECT_SUM_MAX_NMAX};
use crate::spectral::{jbracket, synthesize_raw, SpectralState};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConservedTriple {
    pub mass: f64,
    pub energy: f64,
    pub momentum: f64,
}

/// Mass, energy and momentum
///
/// ```text
/// M = int |u|^2
/// E = int |u_x|^2 - 1/2 Im(|u|^2 u conj(u_x)) - mu/2 |u|^4
/// P = int Im(conj(u) u_x) + 1/2 |u|^4
/// ```
///
/// by trapezoid quadrature on a grid that integrates every quartic product
/// exactly.
pub fn conserved(state: &SpectralState, mu: f64) -> ConservedTriple {
    let n = state.n_max();
    let m = product_grid_size(n, 3);
    let dc: Vec<Complex64> = state
        .modes()
        .map(|(xi, v)| Complex64::new(0.0, xi as f64) * v)
        .collect();
    let u = synthesize_raw(state.coeffs(), n, m);
    let ux = synthesize_raw(&dc, n, m);
    let (mut mass, mut energy, mut momentum) = (0.0, 0.0, 0.0);
    for (&a, &ax) in u.iter().zip(&ux) {
        let r = a.norm_sqr();
        mass += r;
        energy += ax.norm_sqr() - 0.5 * (r * a * ax.conj()).im - 0.5 * mu * r * r;
        momentum += (a.conj() * ax).im + 0.5 * r * r;
    }
    let h = 2.0 * PI / m as f64;
    ConservedTriple {
        mass: mass * h,
        energy: energy * h,
        momentum: momentum * h,
    }
}

/// Contributions to `d/dt sum <xi>^{2s} |c_xi|^2` along `c' = -i xi^2 c - i N`.
///
/// Each part is `2 Im sum <xi>^{2s} conj(c_xi) T_xi` for the named piece `T`,
/// which is `-2 Re sum <xi>^{2s} c_xi conj(i T_xi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthReport {
    pub linear_part: f64,
    pub n12_part: f64,
    /// Contribution of `(1/4 pi) int |u|^4 * u` inside `N22`.
    pub n22_internal_part: f64,
    pub n11_part: f64,
    pub n2_part: f64,
    pub total: f64,
}

fn weights(state: &SpectralState, s: f64) -> Vec<f64> {
    state.modes().map(|(xi, _)| jbracket(xi as f64).powf(2.0 * s)).collect()
}

fn pairing(w: &[f64], c: &[Complex64], t: &[Complex64]) -> f64 {
    2.0 * w
        .iter()
        .zip(c)
        .zip(t)
        .map(|((&wk, ck), tk)| wk * (ck.conj() * tk).im)
        .sum::<f64>()
}

pub fn hs_growth_rate(state: &SpectralState, s: f64, mu_mode: MuMode) -> GrowthReport {
    let w = weights(state, s);
    let c = state.coeffs();
    let d = decompose(state, mu_mode);

    let lin: Vec<Complex64> = state.modes().map(|(xi, v)| (xi * xi) as f64 * v).collect();
    let half_quartic = 0.5 * quartic_mean(state);
    let internal: Vec<Complex64> = c.iter().map(|&v| half_quartic * v).collect();
    let n2: Vec<Complex64> = d
        .n21
        .coeffs()
        .iter()
        .zip(d.n22.coeffs())
        .map(|(a, b)| a + b)
        .collect();

    let linear_part = pairing(&w, c, &lin);
    let n12_part = pairing(&w, c, d.n12.coeffs());
    let n22_internal_part = pairing(&w, c, &internal);
    let n11_part = pairing(&w, c, d.n11.coeffs());
    let n2_part = pairing(&w, c, &n2);
    GrowthReport {
        linear_part,
        n12_part,
        n22_internal_part,
        n11_part,
        n2_part,
        total: linear_part + n11_part + n12_part + n2_part,
    }
}

/// `m4 = xi1 <xi3>^{2s} + xi2 <xi4>^{2s} + xi3 <xi1>^{2s} + xi4 <xi2>^{2s}`.
pub fn m4_kernel(quad: &FrequencyQuad, s: f64) -> Result<f64> {
    let x = quad.xi();
    if x.iter().sum::<i64>() != 0 {
        return Err(DnlsError::Precondition(format!("{x:?} is off the hyperplane")));
    }
    let w = |k: i64| jbracket(k as f64).powf(2.0 * s);
    let f = |k: i64| k as f64;
    Ok(f(x[0]) * w(x[2]) + f(x[1]) * w(x[3]) + f(x[2]) * w(x[0]) + f(x[3]) * w(x[1]))
}

/// `sum m4 c_{xi1} conj(c_{-xi2}) c_{xi3} conj(c_{-xi4})` over quads with
/// `xi12 xi14 != 0`, all inside the band.
pub fn symmetrized_form(state: &SpectralState, s: f64) -> Result<Complex64> {
    let n = state.n_max();
    if n > DIRECT_SUM_MAX_NMAX {
        return Err(DnlsError::ResourceGuard(format!(
            "direct quartic sum limited to n_max <= {DIRECT_SUM_MAX_NMAX}, got {n}"
        )));
    }
    let nn = n as i64;
    let w: Vec<f64> = (-nn..=nn).map(|k| jbracket(k as f64).powf(2.0 * s)).collect();
    let wt = |k: i64| w[(k + nn) as usize];
    let bar = |k: i64| state.get(-k).conj();
    let rows: Vec<Complex64> = (-nn..=nn)
        .into_par_iter()
        .map(|x1| {
            let c1 = state.get(x1);
            let mut acc = Complex64::new(0.0, 0.0);
            for x2 in -nn..=nn {
                if x1 + x2 == 0 {
                    continue;
                }
                let a = c1 * bar(x2);
                for x3 in -nn..=nn {
                    let x4 = -(x1 + x2 + x3);
                    if x4.abs() > nn || x1 + x4 == 0 {
                        continue;
                    }
                    let m4 = x1 as f64 * wt(x3) + x2 as f64 * wt(x4) + x3 as f64 * wt(x1) + x4 as f64 * wt(x2);
                    acc += m4 * a * state.get(x3) * bar(x4);
                }
            }
            acc
        })
        .collect();
    Ok(rows.into_iter().sum())
}

/// The scalar multiplying the symmetrized form, determined once by
/// [`fit_symmetrization_constant`] and frozen.
pub const SYMMETRIZATION_CONSTANT: Complex64 = Complex64 { re: 0.0, im: -0.5 };

/// `Re(c * symmetrized_form)` with the frozen constant.
pub fn symmetrized_growth(state: &SpectralState, s: f64) -> Result<f64> {
    Ok((SYMMETRIZATION_CONSTANT * symmetrized_form(state, s)?).re)
}

/// Complex least-squares constant `c` minimizing `sum |n11_k - c S_k|^2`
/// over a calibration set, with `S_k` the symmetrized form and `n11_k` the
/// direct `N11` growth contribution.
pub fn fit_symmetrization_constant(states: &[SpectralState], s: f64) -> Result<Complex64> {
    let mut num = Complex64::new(0.0, 0.0);
    let mut den = 0.0;
    for st in states {
        let form = symmetrized_form(st, s)?;
        let target = hs_growth_rate(st, s, MuMode::Instantaneous).n11_part;
        num += form.conj() * target;
        den += form.norm_sqr();
    }
    if den == 0.0 {
        return Err(DnlsError::Precondition("calibration set has no nonresonant content".into()));
    }
    Ok(num / den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{random_state, SpectralProfile};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn rand(seed: u64, n: usize) -> SpectralState {
        random_state(&SpectralProfile { sigma: 1.0, amplitude: 0.3, seed }, n).unwrap()
    }

    #[test]
    fn conserved_zero_and_plane_wave() {
        let z = conserved(&SpectralState::zeros(8), 0.0);
        assert_eq!((z.mass, z.energy, z.momentum), (0.0, 0.0, 0.0));
        for (xi0, a) in [(1i64, 0.1), (-3, 0.7), (0, 1.2)] {
            let st = SpectralState::plane_wave(8, xi0, c(0.0, a)).unwrap();
            let a2 = a * a;
            let x = xi0 as f64;
            let got = conserved(&st, a2);
            let tp = 2.0 * PI;
            assert!((got.mass - tp * a2).abs() < 1e-14);
            assert!((got.energy - tp * (x * x * a2 + 0.5 * x * a2 * a2 - 0.5 * a2 * a2 * a2)).abs() < 1e-13);
            assert!((got.momentum - tp * (x * a2 + 0.5 * a2 * a2)).abs() < 1e-13);
        }
    }

    #[test]
    fn conserved_matches_fine_quadrature() {
        let st = rand(3, 12);
        let mu = crate::nonlinearity::mu(&st);
        let got = conserved(&st, mu);
        // oversampled physical-space quadrature as oracle
        let m = 997;
        let mut e = 0.0;
        let mut p = 0.0;
        for j in 0..m {
            let x = 2.0 * PI * j as f64 / m as f64;
            let (mut u, mut ux) = (c(0.0, 0.0), c(0.0, 0.0));
            for (xi, cx) in st.modes() {
                let ph = Complex64::from_polar(1.0, xi as f64 * x);
                u += cx * ph;
                ux += c(0.0, xi as f64) * cx * ph;
            }
            let r = u.norm_sqr();
            e += ux.norm_sqr() - 0.5 * (r * u * ux.conj()).im - 0.5 * mu * r * r;
            p += (u.conj() * ux).im + 0.5 * r * r;
        }
        let h = 2.0 * PI / m as f64;
        assert!((got.energy - e * h).abs() <= 1e-11 * got.energy.abs());
        assert!((got.momentum - p * h).abs() <= 1e-11 * got.momentum.abs().max(1e-3));
    }

    #[test]
    fn growth_plane_wave_vanishes() {
        let st = SpectralState::plane_wave(6, 2, c(0.4, 0.1)).unwrap();
        let g = hs_growth_rate(&st, 0.45, MuMode::Instantaneous);
        for v in [g.linear_part, g.n12_part, g.n22_internal_part, g.n11_part, g.n2_part, g.total] {
            assert!(v.abs() < 1e-14, "{g:?}");
        }
    }

    #[test]
    fn growth_vanishing_parts_and_total() {
        for seed in 0..5 {
            let st = rand(seed, 16);
            let scale: f64 = st.coeffs().iter().map(|v| v.norm_sqr()).sum::<f64>().powi(2) * 256.0;
            let g = hs_growth_rate(&st, 0.3, MuMode::Instantaneous);
            assert!(g.linear_part.abs() <= 1e-13 * scale);
            assert!(g.n12_part.abs() <= 1e-13 * scale);
            assert!(g.n22_internal_part.abs() <= 1e-13 * scale);
            assert!((g.total - g.n11_part - g.n2_part).abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn m4_examples() {
        let q = |x| FrequencyQuad::new(x).unwrap();
        assert_eq!(m4_kernel(&q([1, -1, 1, -1]), 0.3).unwrap(), 0.0);
        for s in [0.0, 0.3, 0.45, 1.0] {
            let v = m4_kernel(&q([2, -1, 0, -1]), s).unwrap();
            assert!((v - (2.0 - 2.0 * 2f64.powf(s))).abs() < 1e-14);
        }
        let base = m4_kernel(&q([5, -3, 7, -9]), 0.4).unwrap();
        for swapped in [[7, -3, 5, -9], [5, -9, 7, -3]] {
            assert!((base - m4_kernel(&q(swapped), 0.4).unwrap()).abs() <= 1e-14 * base.abs());
        }
    }

    #[test]
    fn symmetrized_plane_wave_is_zero() {
        let st = SpectralState::plane_wave(4, 1, c(0.5, 0.0)).unwrap();
        assert_eq!(symmetrized_growth(&st, 0.3).unwrap(), 0.0);
        assert!(symmetrized_growth(&SpectralState::zeros(65), 0.3).is_err());
    }

    #[test]
    fn symmetrized_two_modes() {
        let st = SpectralState::from_modes(3, &[(1, c(0.3, 0.2)), (2, c(-0.1, 0.4))]).unwrap();
        for s in [0.3, 0.45] {
            let direct = hs_growth_rate(&st, s, MuMode::Instantaneous).n11_part;
            let sym = symmetrized_growth(&st, s).unwrap();
            assert!((direct - sym).abs() <= 1e-12 * (1.0 + direct.abs()), "{direct} {sym}");
        }
    }

    #[test]
    fn frozen_constant_agrees_with_fit() {
        let cal: Vec<SpectralState> = (100..110).map(|k| rand(k, 6)).collect();
        let fitted = fit_symmetrization_constant(&cal, 0.45).unwrap();
        assert!((fitted - SYMMETRIZATION_CONSTANT).norm() < 1e-10, "{fitted}");
    }
}
