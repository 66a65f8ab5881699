//! The DNLS nonlinearity
//!
//! ```text
//! N[u] = -i u^2 d_x conj(u) - 1/2 |u|^4 u + mu |u|^2 u - psi[u] u
//! ```
//!
//! and its splitting `N = N11 + N12 + N21 + N22`:
//!
//! * `N1  = -i u^2 d_x conj(u) - ((1/2 pi) int 2 Im(u d_x conj u)) u`
//! * `N12` is the resonant part of `N1`; in coefficients `(N12)_xi = xi |c_xi|^2 c_xi`
//! * `N11 = N1 - N12`, the sum over `(xi1 - xi)(xi3 - xi) != 0`
//! * `N21 = mu |u|^2 u`
//! * `N22 = -1/2 |u|^4 u + ((1/4 pi) int |u|^4) u`
//!
//! Products are evaluated on a grid of at least `6 n_max + 1` points, so every
//! retained coefficient is alias-free.

use num_complex::Complex64;

use crate::error::{DnlsError, Result};
use crate::fft::product_grid_size;
use crate::spectral::{analyze_raw, synthesize_raw, Band, SpectralState};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Which piece of the nonlinearity to return from [`term`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Term {
    N1,
    N11,
    N12,
    N21,
    N22,
    N2,
    Full,
}

impl Term {
    pub const ALL: [Term; 7] = [
        Term::N1,
        Term::N11,
        Term::N12,
        Term::N21,
        Term::N22,
        Term::N2,
        Term::Full,
    ];
}

/// How the coefficient `mu` of `|u|^2 u` is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MuMode {
    /// A fixed value, normally `mass(u0) / 2 pi`.
    Constant(f64),
    /// `mu[u](t)` recomputed from the current state.
    Instantaneous,
}

impl MuMode {
    /// The constant mode pinned to the mean mass of `u0`.
    pub fn from_initial(u0: &SpectralState) -> Self {
        MuMode::Constant(mu(u0))
    }

    pub fn resolve(&self, state: &SpectralState) -> f64 {
        match *self {
            MuMode::Constant(m) => m,
            MuMode::Instantaneous => mu(state),
        }
    }
}

/// Classification of a cubic interaction `xi1 + xi2 + xi3 = xi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ResonanceClass {
    Nonresonant,
    /// `xi3 = xi`, `xi1 + xi2 = 0`
    ResPair13,
    /// `xi1 = xi`, `xi2 + xi3 = 0`
    ResPair11,
    /// `xi1 = xi3 = -xi2 = xi`
    Overlap,
}

/// `mu[u] = (1/2 pi) int |u|^2 = sum |c_xi|^2`.
pub fn mu(state: &SpectralState) -> f64 {
    state.coeffs().iter().map(|c| c.norm_sqr()).sum()
}

/// `sum_xi xi |c_xi|^2`; the mean of `Im(conj(u) d_x u)`.
pub(crate) fn momentum_density_mean(state: &SpectralState) -> f64 {
    state
        .modes()
        .map(|(xi, c)| xi as f64 * c.norm_sqr())
        .sum()
}

/// Mean of `|u|^4` over the torus, exact on a grid of `>= 4 n_max + 1` points.
pub(crate) fn quartic_mean(state: &SpectralState) -> f64 {
    let m = product_grid_size(state.n_max(), 3);
    let u = synthesize_raw(state.coeffs(), state.n_max(), m);
    u.iter().map(|v| v.norm_sqr() * v.norm_sqr()).sum::<f64>() / m as f64
}

/// `psi[u] = (1/2 pi) int (2 Im(u d_x conj u) - 1/2 |u|^4)`.
pub fn psi(state: &SpectralState) -> f64 {
    -2.0 * momentum_density_mean(state) - 0.5 * quartic_mean(state)
}

/// All four pieces of the splitting, evaluated with one set of transforms.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub n11: SpectralState,
    pub n12: SpectralState,
    pub n21: SpectralState,
    pub n22: SpectralState,
}

impl Decomposition {
    pub fn select(&self, sel: Term) -> SpectralState {
        let one = Complex64::new(1.0, 0.0);
        match sel {
            Term::N11 => self.n11.clone(),
            Term::N12 => self.n12.clone(),
            Term::N21 => self.n21.clone(),
            Term::N22 => self.n22.clone(),
            Term::N1 => self.n11.axpy(one, &self.n12),
            Term::N2 => self.n21.axpy(one, &self.n22),
            Term::Full => self
                .n11
                .axpy(one, &self.n12)
                .axpy(one, &self.n21)
                .axpy(one, &self.n22),
        }
    }

    /// `sum_kl N_kl` written directly into a coefficient vector.
    fn full_coeffs(&self) -> Vec<Complex64> {
        self.n11
            .coeffs()
            .iter()
            .zip(self.n12.coeffs())
            .zip(self.n21.coeffs())
            .zip(self.n22.coeffs())
            .map(|(((a, b), c), d)| a + b + c + d)
            .collect()
    }
}

/// Evaluates `N11, N12, N21, N22` at the state's cutoff.
pub fn decompose(state: &SpectralState, mu_mode: MuMode) -> Decomposition {
    let n = state.n_max();
    let t = state.time();
    let m = product_grid_size(n, 5);
    let c = state.coeffs();

    let dc: Vec<Complex64> = state
        .modes()
        .map(|(xi, v)| Complex64::new(0.0, xi as f64) * v)
        .collect();
    let u = synthesize_raw(c, n, m);
    let ux = synthesize_raw(&dc, n, m);

    let mut deriv_cubic = Vec::with_capacity(m);
    let mut cubic = Vec::with_capacity(m);
    let mut quintic = Vec::with_capacity(m);
    let mut quartic_sum = 0.0;
    for (&uj, &uxj) in u.iter().zip(&ux) {
        let a = uj.norm_sqr();
        deriv_cubic.push(uj * uj * uxj.conj());
        cubic.push(uj * a);
        quintic.push(uj * (a * a));
        quartic_sum += a * a;
    }
    let quartic_mean = quartic_sum / m as f64;

    let deriv_cubic = analyze_raw(deriv_cubic, n);
    let cubic = analyze_raw(cubic, n);
    let quintic = analyze_raw(quintic, n);

    // (1/2 pi) int 2 Im(u d_x conj u) = -2 sum xi |c_xi|^2
    let flux = -2.0 * momentum_density_mean(state);
    let mu_val = mu_mode.resolve(state);
    let half_quartic = 0.5 * quartic_mean;
    let minus_i = Complex64::new(0.0, -1.0);

    let nn = n as i64;
    let mut n11 = Vec::with_capacity(c.len());
    let mut n12 = Vec::with_capacity(c.len());
    let mut n21 = Vec::with_capacity(c.len());
    let mut n22 = Vec::with_capacity(c.len());
    for (i, &ci) in c.iter().enumerate() {
        let xi = (i as i64 - nn) as f64;
        let n1 = minus_i * deriv_cubic[i] - flux * ci;
        let res = xi * ci.norm_sqr() * ci;
        n11.push(n1 - res);
        n12.push(res);
        n21.push(mu_val * cubic[i]);
        n22.push(-0.5 * quintic[i] + half_quartic * ci);
    }
    Decomposition {
        n11: SpectralState::from_parts(n, n11, t),
        n12: SpectralState::from_parts(n, n12, t),
        n21: SpectralState::from_parts(n, n21, t),
        n22: SpectralState::from_parts(n, n22, t),
    }
}

/// The selected piece of the nonlinearity at the state's time stamp.
pub fn term(state: &SpectralState, sel: Term, mu_mode: MuMode) -> SpectralState {
    decompose(state, mu_mode).select(sel)
}

/// `du/dt = i u_xx - i N[u]`, i.e. `(du/dt)_xi = -i xi^2 c_xi - i N_xi`.
pub fn rhs_full(state: &SpectralState, mu_mode: MuMode) -> SpectralState {
    let full = decompose(state, mu_mode).full_coeffs();
    assemble_rhs(state, full, None)
}

/// Galerkin-truncated right-hand side: the nonlinearity is projected onto
/// `|xi| <= n_trunc` before it enters the equation.
pub fn rhs_truncated(state: &SpectralState, n_trunc: usize, mu_mode: MuMode) -> Result<SpectralState> {
    check_support(state, n_trunc)?;
    let full = decompose(state, mu_mode).full_coeffs();
    Ok(assemble_rhs(state, full, Some(n_trunc)))
}

/// The nonlinear part `-i P N[u]` only (no dispersion).
pub(crate) fn nonlinear_rate(state: &SpectralState, mu_mode: MuMode, trunc: Option<usize>) -> Vec<Complex64> {
    let mut full = decompose(state, mu_mode).full_coeffs();
    let nn = state.n_max() as i64;
    for (i, v) in full.iter_mut().enumerate() {
        let xi = i as i64 - nn;
        if trunc.is_some_and(|t| !Band::Le(t).contains(xi)) {
            *v = ZERO;
        } else {
            *v *= Complex64::new(0.0, -1.0);
        }
    }
    full
}

fn assemble_rhs(state: &SpectralState, nonlinear: Vec<Complex64>, trunc: Option<usize>) -> SpectralState {
    let nn = state.n_max() as i64;
    let coeffs = nonlinear
        .into_iter()
        .zip(state.coeffs())
        .enumerate()
        .map(|(i, (nl, &c))| {
            let xi = i as i64 - nn;
            let nl = if trunc.is_some_and(|t| !Band::Le(t).contains(xi)) { ZERO } else { nl };
            Complex64::new(0.0, -1.0) * ((xi * xi) as f64 * c + nl)
        })
        .collect();
    SpectralState::from_parts(state.n_max(), coeffs, state.time())
}

pub(crate) fn check_support(state: &SpectralState, n_trunc: usize) -> Result<()> {
    match state.support_radius() {
        Some(r) if r > n_trunc => Err(DnlsError::Precondition(format!(
            "state has energy at |xi| = {r}, outside the truncation band |xi| <= {n_trunc}"
        ))),
        _ => Ok(()),
    }
}

/// Largest cutoff accepted by the `O(n_max^3)` direct sums.
pub const DIRECT_SUM_MAX_NMAX: usize = 64;

/// `N11` by direct triple summation over `xi1 + xi2 + xi3 = xi`,
/// `(xi1 - xi)(xi3 - xi) != 0`, of `xi2 c_{xi1} conj(c_{-xi2}) c_{xi3}`.
pub fn n11_direct_oracle(state: &SpectralState) -> Result<SpectralState> {
    let n = state.n_max();
    if n > DIRECT_SUM_MAX_NMAX {
        return Err(DnlsError::ResourceGuard(format!(
            "direct N11 sum limited to n_max <= {DIRECT_SUM_MAX_NMAX}, got {n}"
        )));
    }
    let nn = n as i64;
    let coeffs = (-nn..=nn)
        .map(|xi| {
            let mut acc = ZERO;
            for x1 in -nn..=nn {
                if x1 == xi {
                    continue;
                }
                for x2 in -nn..=nn {
                    let x3 = xi - x1 - x2;
                    if x3.abs() > nn || x3 == xi {
                        continue;
                    }
                    acc += x2 as f64 * state.get(x1) * state.get(-x2).conj() * state.get(x3);
                }
            }
            acc
        })
        .collect();
    Ok(SpectralState::from_parts(n, coeffs, state.time()))
}

/// Resonance class of the interaction `xi1 + xi2 + xi3 = xi`.
pub fn resonance_classify(xi1: i64, xi2: i64, xi3: i64, xi: i64) -> Result<ResonanceClass> {
    if xi1 + xi2 + xi3 != xi {
        return Err(DnlsError::Precondition(format!(
            "{xi1} + {xi2} + {xi3} != {xi}"
        )));
    }
    let class = if xi1 == xi && xi3 == xi && xi2 == -xi {
        ResonanceClass::Overlap
    } else if xi3 == xi && xi1 + xi2 == 0 {
        ResonanceClass::ResPair13
    } else if xi1 == xi && xi2 + xi3 == 0 {
        ResonanceClass::ResPair11
    } else {
        ResonanceClass::Nonresonant
    };
    Ok(class)
}
