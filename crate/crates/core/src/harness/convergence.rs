//! Truncated runs `u^N` against a high-resolution reference.

use rayon::prelude::*;

use crate::error::{DnlsError, Result};
use crate::evolution::{evolve, SimConfig, Trajectory};
use crate::nonlinearity::MuMode;
use crate::spectral::{norm, project, random_state, Band, NormSpec, SpectralProfile, SpectralState};

use super::fit::fit_loglog_slope;

/// Errors at or below this level count as integrator noise.
pub const NOISE_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceSetup {
    pub profile: SpectralProfile,
    /// Regularity of the data scale.
    pub s: f64,
    /// Regularity in which the error is measured, `s_prime < s`.
    pub s_prime: f64,
    pub s1: f64,
    pub s1_prime: f64,
    pub p: f64,
    pub levels: Vec<usize>,
    pub n_ref: usize,
    pub t_end: f64,
    pub dt: f64,
    pub record_stride: usize,
    /// Restricts the data to `|xi| <= band_limit` before any run.
    pub band_limit: Option<usize>,
}

impl ConvergenceSetup {
    /// Excess decay `delta = sigma - s - 1/2` of the data profile.
    pub fn delta(&self) -> f64 {
        self.profile.sigma - self.s - 0.5
    }

    pub fn predicted_exponent(&self) -> f64 {
        let d = self.delta();
        (self.s_prime - self.s - d).max(self.s1_prime - self.s1 - d)
    }

    fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(DnlsError::Precondition(m));
        if !(self.s_prime < self.s) {
            return fail(format!("need s' < s, got s' = {}, s = {}", self.s_prime, self.s));
        }
        if !(self.s1_prime < self.s1) {
            return fail(format!("need s1' < s1, got s1' = {}, s1 = {}", self.s1_prime, self.s1));
        }
        if !(self.p > 2.0 && self.p < 4.0) {
            return fail(format!("need 2 < p < 4, got {}", self.p));
        }
        if self.levels.is_empty() || self.levels.windows(2).any(|w| w[0] >= w[1]) {
            return fail(format!("levels must be nonempty and strictly increasing: {:?}", self.levels));
        }
        let top = *self.levels.last().unwrap();
        if self.levels[0] == 0 || 4 * top > self.n_ref {
            return fail(format!("levels must lie in 1..=N_ref/4 = {}", self.n_ref / 4));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceLevel {
    pub n: usize,
    pub err_hs: f64,
    pub err_fl: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub levels: Vec<ConvergenceLevel>,
    /// `None` when the run is degenerate.
    pub fitted_slope: Option<f64>,
    pub fit_r2: Option<f64>,
    pub predicted_exponent: f64,
    /// Every error sits at the noise floor, so no rate can be fitted.
    pub degenerate: bool,
    /// `err_hs` of the `N_ref / 2` run against the reference.
    pub reference_floor: f64,
    /// `||P_{>N} u0||_{H^{s'}}` per level.
    pub data_tails: Vec<f64>,
    pub config: ConvergenceSetup,
}

fn run(u0: &SpectralState, n: usize, setup: &ConvergenceSetup) -> Result<Trajectory> {
    let data = u0.resized(n);
    let cfg = SimConfig::new(n, setup.dt, setup.t_end, MuMode::from_initial(&data))
        .with_stride(setup.record_stride)
        .with_truncation(n);
    evolve(&data, &cfg)
}

fn frame_errors(reference: &Trajectory, run: &Trajectory, setup: &ConvergenceSetup) -> Result<(f64, f64)> {
    if reference.frames.len() != run.frames.len() {
        return Err(DnlsError::Precondition("reference and level record different frame counts".into()));
    }
    let n_ref = reference.config.n_max;
    let (mut hs, mut fl) = (0.0f64, 0.0f64);
    for (r, u) in reference.frames.iter().zip(&run.frames) {
        let diff = r.axpy((-1.0).into(), &u.resized(n_ref));
        hs = hs.max(norm(&diff, NormSpec::Sobolev { s: setup.s_prime })?);
        fl = fl.max(norm(&diff, NormSpec::FourierLebesgue { s: setup.s1_prime, p: setup.p })?);
    }
    Ok((hs, fl))
}

pub fn convergence_experiment(setup: &ConvergenceSetup) -> Result<ConvergenceReport> {
    setup.validate()?;
    let mut u0 = random_state(&setup.profile, setup.n_ref)?;
    if let Some(b) = setup.band_limit {
        u0 = project(&u0, Band::Le(b));
    }

    let mut sizes = vec![setup.n_ref, setup.n_ref / 2];
    sizes.extend(&setup.levels);
    let runs: Vec<Trajectory> = sizes
        .par_iter()
        .map(|&n| run(&u0, n, setup))
        .collect::<Result<_>>()?;
    let reference = &runs[0];

    let (reference_floor, _) = frame_errors(reference, &runs[1], setup)?;
    let mut levels = Vec::with_capacity(setup.levels.len());
    let mut data_tails = Vec::with_capacity(setup.levels.len());
    for (&n, traj) in setup.levels.iter().zip(&runs[2..]) {
        let (err_hs, err_fl) = frame_errors(reference, traj, setup)?;
        levels.push(ConvergenceLevel { n, err_hs, err_fl });
        data_tails.push(norm(&project(&u0, Band::Gt(n)), NormSpec::Sobolev { s: setup.s_prime })?);
    }

    let degenerate = levels.iter().all(|l| l.err_hs <= NOISE_FLOOR);
    let (fitted_slope, fit_r2) = if degenerate || levels.len() < 2 {
        (None, None)
    } else {
        let pts: Vec<(f64, f64)> = levels.iter().map(|l| (l.n as f64, l.err_hs)).collect();
        let fit = fit_loglog_slope(&pts)?;
        (Some(fit.slope), Some(fit.r2))
    };

    Ok(ConvergenceReport {
        levels,
        fitted_slope,
        fit_r2,
        predicted_exponent: setup.predicted_exponent(),
        degenerate,
        reference_floor,
        data_tails,
        config: setup.clone(),
    })
}
