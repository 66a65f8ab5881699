//! Fourier-coefficient states on the torus `R / 2 pi Z`.
//!
//! Convention used throughout the crate: `u(x) = sum_xi c_xi e^{i xi x}`, with
//! no `1/sqrt(2 pi)` factors. Coefficients are stored for `xi in [-n_max, n_max]`
//! at index `xi + n_max`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{DnlsError, Result};
use crate::fft;

/// `<x> = (1 + x^2)^{1/2}`.
#[inline]
pub fn jbracket(x: f64) -> f64 {
    (1.0 + x * x).sqrt()
}

/// Complex Fourier coefficients of `u(t, .)` at one time instant.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralState {
    n_max: usize,
    coeffs: Vec<Complex64>,
    time: f64,
}

impl SpectralState {
    pub fn new(n_max: usize, coeffs: Vec<Complex64>, time: f64) -> Result<Self> {
        if coeffs.len() != 2 * n_max + 1 {
            return Err(DnlsError::Precondition(format!(
                "coefficient array has length {}, expected {}",
                coeffs.len(),
                2 * n_max + 1
            )));
        }
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(DnlsError::Precondition("non-finite coefficient".into()));
        }
        if !time.is_finite() {
            return Err(DnlsError::Precondition("non-finite time".into()));
        }
        Ok(Self { n_max, coeffs, time })
    }

    /// Builds a state without the finiteness scan. Used on hot paths whose
    /// inputs are already validated.
    pub(crate) fn from_parts(n_max: usize, coeffs: Vec<Complex64>, time: f64) -> Self {
        debug_assert_eq!(coeffs.len(), 2 * n_max + 1);
        Self { n_max, coeffs, time }
    }

    pub fn zeros(n_max: usize) -> Self {
        Self::from_parts(n_max, vec![Complex64::new(0.0, 0.0); 2 * n_max + 1], 0.0)
    }

    /// `A e^{i xi0 x}`.
    pub fn plane_wave(n_max: usize, xi0: i64, amplitude: Complex64) -> Result<Self> {
        let mut s = Self::zeros(n_max);
        s.set(xi0, amplitude)?;
        Ok(s)
    }

    /// Builds a state from `(xi, c_xi)` pairs; unlisted modes are zero.
    pub fn from_modes(n_max: usize, modes: &[(i64, Complex64)]) -> Result<Self> {
        let mut s = Self::zeros(n_max);
        for &(xi, c) in modes {
            s.set(xi, c)?;
        }
        Ok(s)
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn with_time(mut self, time: f64) -> Self {
        self.time = time;
        self
    }

    #[inline]
    pub fn index(&self, xi: i64) -> Option<usize> {
        let n = self.n_max as i64;
        (xi.abs() <= n).then(|| (xi + n) as usize)
    }

    /// Coefficient `c_xi`, zero outside the stored band.
    #[inline]
    pub fn get(&self, xi: i64) -> Complex64 {
        self.index(xi)
            .map(|i| self.coeffs[i])
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn set(&mut self, xi: i64, value: Complex64) -> Result<()> {
        let i = self.index(xi).ok_or_else(|| {
            DnlsError::CutoffViolation(format!("mode {xi} outside |xi| <= {}", self.n_max))
        })?;
        if !value.re.is_finite() || !value.im.is_finite() {
            return Err(DnlsError::Precondition("non-finite coefficient".into()));
        }
        self.coeffs[i] = value;
        Ok(())
    }

    /// Iterator over `(xi, c_xi)`.
    pub fn modes(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let n = self.n_max as i64;
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(i, &c)| (i as i64 - n, c))
    }

    /// Same field, stored with a different cutoff (zero padding or truncation).
    pub fn resized(&self, n_max: usize) -> Self {
        let mut out = Self::zeros(n_max).with_time(self.time);
        let m = n_max.min(self.n_max) as i64;
        for xi in -m..=m {
            let i = out.index(xi).unwrap();
            out.coeffs[i] = self.get(xi);
        }
        out
    }

    /// Largest `|xi|` carrying a nonzero coefficient, `None` for the zero state.
    pub fn support_radius(&self) -> Option<usize> {
        self.modes()
            .filter(|(_, c)| *c != Complex64::new(0.0, 0.0))
            .map(|(xi, _)| xi.unsigned_abs() as usize)
            .max()
    }

    /// `max_xi |c_xi - d_xi|` over the union of both bands.
    pub fn max_abs_diff(&self, other: &SpectralState) -> f64 {
        let n = self.n_max.max(other.n_max) as i64;
        (-n..=n)
            .map(|xi| (self.get(xi) - other.get(xi)).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Coefficient-wise linear combination `self + alpha * other` on `self`'s band.
    pub fn axpy(&self, alpha: Complex64, other: &SpectralState) -> SpectralState {
        let coeffs = self
            .modes()
            .map(|(xi, c)| c + alpha * other.get(xi))
            .collect();
        Self::from_parts(self.n_max, coeffs, self.time)
    }

    pub fn scaled(&self, alpha: Complex64) -> SpectralState {
        let coeffs = self.coeffs.iter().map(|&c| alpha * c).collect();
        Self::from_parts(self.n_max, coeffs, self.time)
    }

    /// Applies `c_xi <- f(xi) c_xi`.
    pub fn map_modes(&self, f: impl Fn(i64, Complex64) -> Complex64) -> SpectralState {
        let coeffs = self.modes().map(|(xi, c)| f(xi, c)).collect();
        Self::from_parts(self.n_max, coeffs, self.time)
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }
}

/// Samples of a field at `x_j = 2 pi j / M`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    samples: Vec<Complex64>,
}

impl GridFunction {
    pub fn new(samples: Vec<Complex64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(DnlsError::Precondition("empty grid".into()));
        }
        if samples.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(DnlsError::Precondition("non-finite sample".into()));
        }
        Ok(Self { samples })
    }

    pub(crate) fn from_samples(samples: Vec<Complex64>) -> Self {
        Self { samples }
    }

    pub fn grid_size(&self) -> usize {
        self.samples.len()
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    /// Grid points `x_j`.
    pub fn points(&self) -> impl Iterator<Item = f64> {
        let m = self.samples.len();
        (0..m).map(move |j| 2.0 * PI * j as f64 / m as f64)
    }

    /// Trapezoid rule for `int_0^{2 pi} f dx`, exact for trigonometric
    /// polynomials of degree `< M`.
    pub fn integrate(&self) -> Complex64 {
        let m = self.samples.len() as f64;
        self.samples.iter().sum::<Complex64>() * (2.0 * PI / m)
    }
}

/// Sobolev or Fourier-Lebesgue norm selector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NormSpec {
    Sobolev { s: f64 },
    /// `p` may be `f64::INFINITY`.
    FourierLebesgue { s: f64, p: f64 },
}

/// Fourier band for [`project`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Band {
    /// `|xi| <= N`
    Le(usize),
    /// `|xi| >= N`
    Ge(usize),
    /// `|xi| > N`
    Gt(usize),
}

impl Band {
    #[inline]
    pub fn contains(&self, xi: i64) -> bool {
        let a = xi.unsigned_abs() as usize;
        match *self {
            Band::Le(n) => a <= n,
            Band::Ge(n) => a >= n,
            Band::Gt(n) => a > n,
        }
    }
}

/// Power-law random data: `|c_xi| = amplitude <xi>^{-sigma}` with seeded phases.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralProfile {
    pub sigma: f64,
    pub amplitude: f64,
    pub seed: u64,
}

/// Evaluates the state on `grid_size` equispaced points (zero-padded inverse
/// transform).
pub fn synthesize(state: &SpectralState, grid_size: usize) -> Result<GridFunction> {
    if grid_size < 2 * state.n_max + 1 {
        return Err(DnlsError::CutoffViolation(format!(
            "grid of {grid_size} points cannot hold modes |xi| <= {}",
            state.n_max
        )));
    }
    Ok(GridFunction::from_samples(synthesize_raw(
        state.coeffs(),
        state.n_max,
        grid_size,
    )))
}

pub(crate) fn synthesize_raw(coeffs: &[Complex64], n_max: usize, m: usize) -> Vec<Complex64> {
    let mut buf = vec![Complex64::new(0.0, 0.0); m];
    let n = n_max as i64;
    for (i, &c) in coeffs.iter().enumerate() {
        let xi = i as i64 - n;
        buf[xi.rem_euclid(m as i64) as usize] = c;
    }
    fft::inverse_in_place(&mut buf);
    buf
}

/// Discrete Fourier coefficients `c_xi = (1/M) sum_j f_j e^{-i xi x_j}` for
/// `|xi| <= n_max`.
pub fn analyze(grid: &GridFunction, n_max: usize) -> Result<SpectralState> {
    if grid.grid_size() < 2 * n_max + 1 {
        return Err(DnlsError::CutoffViolation(format!(
            "grid of {} points cannot resolve modes |xi| <= {n_max}",
            grid.grid_size()
        )));
    }
    Ok(SpectralState::from_parts(
        n_max,
        analyze_raw(grid.samples().to_vec(), n_max),
        0.0,
    ))
}

pub(crate) fn analyze_raw(mut buf: Vec<Complex64>, n_max: usize) -> Vec<Complex64> {
    let m = buf.len();
    fft::forward_in_place(&mut buf);
    let scale = 1.0 / m as f64;
    let n = n_max as i64;
    (-n..=n)
        .map(|xi| buf[xi.rem_euclid(m as i64) as usize] * scale)
        .collect()
}

pub fn norm(state: &SpectralState, spec: NormSpec) -> Result<f64> {
    match spec {
        NormSpec::Sobolev { s } => Ok(state
            .modes()
            .map(|(xi, c)| jbracket(xi as f64).powf(2.0 * s) * c.norm_sqr())
            .sum::<f64>()
            .sqrt()),
        NormSpec::FourierLebesgue { s, p } => {
            if p.is_nan() || p < 1.0 {
                return Err(DnlsError::Domain(format!("Fourier-Lebesgue exponent p = {p} < 1")));
            }
            if p.is_infinite() {
                Ok(state
                    .modes()
                    .map(|(xi, c)| jbracket(xi as f64).powf(s) * c.norm())
                    .fold(0.0, f64::max))
            } else {
                Ok(state
                    .modes()
                    .map(|(xi, c)| (jbracket(xi as f64).powf(s) * c.norm()).powf(p))
                    .sum::<f64>()
                    .powf(1.0 / p))
            }
        }
    }
}

/// Zeroes every coefficient outside `band`.
pub fn project(state: &SpectralState, band: Band) -> SpectralState {
    state.map_modes(|xi, c| if band.contains(xi) { c } else { Complex64::new(0.0, 0.0) })
}

/// `c_xi <- i xi c_xi`.
pub fn derivative(state: &SpectralState) -> SpectralState {
    state.map_modes(|xi, c| Complex64::new(0.0, xi as f64) * c)
}

/// `M = int_0^{2 pi} |u|^2 dx = 2 pi sum |c_xi|^2`.
pub fn mass(state: &SpectralState) -> f64 {
    2.0 * PI * state.coeffs().iter().map(|c| c.norm_sqr()).sum::<f64>()
}

/// Seeded power-law state.
///
/// Phases come from ChaCha8 (`rand_chacha`) seeded with `seed_from_u64`; one
/// `u64` is drawn per mode in increasing `xi`, mapped to `[0, 1)` through its
/// top 53 bits and scaled by `2 pi`. Magnitudes and trigonometric functions
/// use the portable `libm` routines so the output does not depend on the
/// platform math library.
pub fn random_state(profile: &SpectralProfile, n_max: usize) -> Result<SpectralState> {
    if n_max < 1 {
        return Err(DnlsError::Precondition("random_state needs n_max >= 1".into()));
    }
    if !profile.sigma.is_finite() || !profile.amplitude.is_finite() || profile.amplitude < 0.0 {
        return Err(DnlsError::Domain("profile needs finite sigma and amplitude >= 0".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(profile.seed);
    let n = n_max as i64;
    let coeffs = (-n..=n)
        .map(|xi| {
            let u = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
            let phase = 2.0 * PI * u;
            let x = xi as f64;
            let mag = profile.amplitude * libm::pow(libm::sqrt(1.0 + x * x), -profile.sigma);
            Complex64::new(mag * libm::cos(phase), mag * libm::sin(phase))
        })
        .collect();
    Ok(SpectralState::from_parts(n_max, coeffs, 0.0))
}
