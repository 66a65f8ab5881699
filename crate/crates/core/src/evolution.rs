//! Integrating-factor RK4 time stepping of the full and Galerkin-truncated
//! systems, and the interaction-picture change of variables.

use num_complex::Complex64;

use crate::error::{DnlsError, Result};
use crate::multiplier::FrequencyQuad;
use crate::nonlinearity::{check_support, mu, nonlinear_rate, MuMode};
use crate::spectral::SpectralState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scheme {
    /// Classical RK4 in the interaction picture; the dispersion
    /// `e^{-i xi^2 dt}` is applied exactly.
    #[default]
    Ifrk4,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub n_max: usize,
    pub dt: f64,
    pub t_end: f64,
    pub record_stride: usize,
    pub mu_mode: MuMode,
    /// Galerkin cutoff `N`; `None` evolves the full right-hand side at `n_max`.
    pub truncation: Option<usize>,
    pub scheme: Scheme,
}

impl SimConfig {
    pub fn new(n_max: usize, dt: f64, t_end: f64, mu_mode: MuMode) -> Self {
        Self {
            n_max,
            dt,
            t_end,
            record_stride: 1,
            mu_mode,
            truncation: None,
            scheme: Scheme::Ifrk4,
        }
    }

    pub fn with_stride(mut self, record_stride: usize) -> Self {
        self.record_stride = record_stride;
        self
    }

    pub fn with_truncation(mut self, n: usize) -> Self {
        self.truncation = Some(n);
        self
    }

    /// `min(1e-3, 0.1 / (n_max (1 + mu) + 1))`.
    pub fn default_dt(n_max: usize, mu: f64) -> f64 {
        (0.1 / (n_max as f64 * (1.0 + mu) + 1.0)).min(1e-3)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(DnlsError::Precondition(format!("dt = {} must be positive", self.dt)));
        }
        if !(self.t_end >= 0.0) || !self.t_end.is_finite() {
            return Err(DnlsError::Precondition(format!("t_end = {} must be >= 0", self.t_end)));
        }
        if self.t_end > 0.0 && self.dt > self.t_end {
            return Err(DnlsError::Precondition(format!(
                "dt = {} exceeds t_end = {}",
                self.dt, self.t_end
            )));
        }
        if self.record_stride == 0 {
            return Err(DnlsError::Precondition("record_stride must be >= 1".into()));
        }
        if let Some(n) = self.truncation {
            if n > self.n_max {
                return Err(DnlsError::Precondition(format!(
                    "truncation {n} exceeds n_max {}",
                    self.n_max
                )));
            }
        }
        Ok(())
    }
}

/// Where the initial data came from.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Provenance {
    pub seed: Option<u64>,
    pub descriptor: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub frames: Vec<SpectralState>,
    pub config: SimConfig,
    pub provenance: Provenance,
}

impl Trajectory {
    /// Wraps precomputed frames; used for synthetic trajectories in
    /// diagnostics.
    pub fn from_frames(frames: Vec<SpectralState>, config: SimConfig) -> Self {
        Self {
            frames,
            config,
            provenance: Provenance::default(),
        }
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = provenance;
        self
    }

    pub fn times(&self) -> Vec<f64> {
        self.frames.iter().map(|f| f.time()).collect()
    }

    pub fn last(&self) -> &SpectralState {
        self.frames.last().expect("trajectory has at least one frame")
    }

    /// Common frame spacing if the frames are equispaced (relative tolerance
    /// `1e-9`), `None` otherwise.
    pub fn uniform_spacing(&self) -> Option<f64> {
        if self.frames.len() < 2 {
            return None;
        }
        let t = self.times();
        let h = t[1] - t[0];
        if !(h > 0.0) {
            return None;
        }
        t.windows(2)
            .all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h)
            .then_some(h)
    }
}

struct Phases {
    half: Vec<Complex64>,
    full: Vec<Complex64>,
}

impl Phases {
    fn new(n_max: usize, h: f64) -> Self {
        let n = n_max as i64;
        let phase = |tau: f64| -> Vec<Complex64> {
            (-n..=n)
                .map(|xi| Complex64::from_polar(1.0, -((xi * xi) as f64) * tau))
                .collect()
        };
        Self {
            half: phase(0.5 * h),
            full: phase(h),
        }
    }
}

fn ifrk4_step(
    state: &SpectralState,
    h: f64,
    phases: &Phases,
    mu_mode: MuMode,
    trunc: Option<usize>,
    t_new: f64,
) -> Result<SpectralState> {
    let n = state.n_max();
    let u = state.coeffs();
    let eval = |v: Vec<Complex64>| -> Vec<Complex64> {
        nonlinear_rate(&SpectralState::from_parts(n, v, 0.0), mu_mode, trunc)
    };
    let (eh, ef) = (&phases.half, &phases.full);

    let k1 = nonlinear_rate(state, mu_mode, trunc);
    let a: Vec<Complex64> = (0..u.len()).map(|i| eh[i] * (u[i] + 0.5 * h * k1[i])).collect();
    let k2 = eval(a);
    let b: Vec<Complex64> = (0..u.len()).map(|i| eh[i] * u[i] + 0.5 * h * k2[i]).collect();
    let k3 = eval(b);
    let c: Vec<Complex64> = (0..u.len()).map(|i| ef[i] * u[i] + h * eh[i] * k3[i]).collect();
    let k4 = eval(c);

    let out: Vec<Complex64> = (0..u.len())
        .map(|i| ef[i] * u[i] + (h / 6.0) * (ef[i] * k1[i] + 2.0 * eh[i] * (k2[i] + k3[i]) + k4[i]))
        .collect();
    if out.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(DnlsError::Divergence { time: t_new });
    }
    Ok(SpectralState::from_parts(n, out, t_new))
}

/// One IFRK4 step of size `dt` using `cfg`'s `mu_mode` and truncation.
pub fn step(state: &SpectralState, dt: f64, cfg: &SimConfig) -> Result<SpectralState> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(DnlsError::Precondition(format!("dt = {dt} must be positive")));
    }
    let phases = Phases::new(state.n_max(), dt);
    ifrk4_step(state, dt, &phases, cfg.mu_mode, cfg.truncation, state.time() + dt)
}

/// Integrates from `u0` to `cfg.t_end`, recording every `record_stride`
/// steps. The final step is shortened to land on `t_end`, and the final
/// state is always recorded.
pub fn evolve(u0: &SpectralState, cfg: &SimConfig) -> Result<Trajectory> {
    cfg.validate()?;
    if u0.n_max() != cfg.n_max {
        return Err(DnlsError::Precondition(format!(
            "initial data has n_max {}, config expects {}",
            u0.n_max(),
            cfg.n_max
        )));
    }
    if let Some(n) = cfg.truncation {
        check_support(u0, n)?;
    }
    let t0 = u0.time();
    let mut frames = vec![u0.clone()];
    if cfg.t_end == 0.0 {
        return Ok(Trajectory::from_frames(frames, cfg.clone()));
    }

    let ratio = cfg.t_end / cfg.dt;
    let n_full = (ratio + 1e-9).floor() as usize;
    let mut rem = cfg.t_end - n_full as f64 * cfg.dt;
    if rem <= 1e-9 * cfg.dt {
        rem = 0.0;
    }

    let phases = Phases::new(cfg.n_max, cfg.dt);
    let mut state = u0.clone();
    for k in 1..=n_full {
        let t_new = if k == n_full && rem == 0.0 {
            t0 + cfg.t_end
        } else {
            t0 + k as f64 * cfg.dt
        };
        state = ifrk4_step(&state, cfg.dt, &phases, cfg.mu_mode, cfg.truncation, t_new)?;
        if k % cfg.record_stride == 0 || (k == n_full && rem == 0.0) {
            frames.push(state.clone());
        }
    }
    if rem > 0.0 {
        let tail = Phases::new(cfg.n_max, rem);
        state = ifrk4_step(&state, rem, &tail, cfg.mu_mode, cfg.truncation, t0 + cfg.t_end)?;
        frames.push(state);
    }
    Ok(Trajectory::from_frames(frames, cfg.clone()))
}

/// `w = e^{-i t d_x^2} u`, i.e. `w_xi = e^{i xi^2 t} c_xi`, at the state's
/// own time. Free solutions map to constants.
pub fn to_interaction(state: &SpectralState) -> SpectralState {
    let t = state.time();
    state.map_modes(|xi, c| Complex64::from_polar(1.0, (xi * xi) as f64 * t) * c)
}

/// Inverse of [`to_interaction`].
pub fn from_interaction(w: &SpectralState) -> SpectralState {
    let t = w.time();
    w.map_modes(|xi, c| Complex64::from_polar(1.0, -((xi * xi) as f64) * t) * c)
}

/// `|P_u - e^{-2 i xi12 xi14 t} P_w|` where `P_v = v(xi1) vbar(xi2) v(xi3) vbar(xi4)`
/// with `vbar(xi) = conj(v_{-xi})`.
///
/// The phase follows from `xi1^2 - xi2^2 + xi3^2 - xi4^2 = 2 xi12 xi14` on the
/// hyperplane; since `xi34 = -xi12` it equals `e^{+2 i xi14 xi34 t}`.
pub fn quad_phase_check(state: &SpectralState, quad: FrequencyQuad) -> Result<f64> {
    let [x1, x2, x3, x4] = quad.xi();
    let n = state.n_max() as i64;
    if quad.xi().iter().any(|x| x.abs() > n) {
        return Err(DnlsError::CutoffViolation(format!(
            "quad {quad:?} leaves |xi| <= {n}"
        )));
    }
    let w = to_interaction(state);
    let product = |v: &SpectralState| v.get(x1) * v.get(-x2).conj() * v.get(x3) * v.get(-x4).conj();
    let phase_arg = -2.0 * ((x1 + x2) * (x1 + x4)) as f64 * state.time();
    let lhs = product(state);
    let rhs = Complex64::from_polar(1.0, phase_arg) * product(&w);
    Ok((lhs - rhs).norm())
}

/// Relative mass drift `|M(t) - M(0)| / M(0)` over the recorded frames.
pub fn max_relative_mass_drift(traj: &Trajectory) -> f64 {
    let m0 = mu(&traj.frames[0]);
    if m0 == 0.0 {
        return 0.0;
    }
    traj.frames
        .iter()
        .map(|f| (mu(f) - m0).abs() / m0)
        .fold(0.0, f64::max)
}
