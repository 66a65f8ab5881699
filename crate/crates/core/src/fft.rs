//! Thin wrapper over `rustfft` with a per-thread planner cache.
//!
//! All transforms are unnormalized; callers apply the `1/M` factor.

use std::cell::RefCell;

use num_complex::Complex64;
use rustfft::FftPlanner;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// In-place `x_j <- sum_k x_k e^{+2 pi i jk/M}`.
pub(crate) fn inverse_in_place(buf: &mut [Complex64]) {
    if buf.len() <= 1 {
        return;
    }
    let fft = PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(buf.len()));
    fft.process(buf);
}

/// In-place `X_k <- sum_j x_j e^{-2 pi i jk/M}`.
pub(crate) fn forward_in_place(buf: &mut [Complex64]) {
    if buf.len() <= 1 {
        return;
    }
    let fft = PLANNER.with(|p| p.borrow_mut().plan_fft_forward(buf.len()));
    fft.process(buf);
}

/// Smallest 5-smooth integer `>= n`.
pub fn smooth_size(n: usize) -> usize {
    let mut m = n.max(1);
    loop {
        let mut r = m;
        for p in [2, 3, 5] {
            while r % p == 0 {
                r /= p;
            }
        }
        if r == 1 {
            return m;
        }
        m += 1;
    }
}

/// Grid size that evaluates a degree-`degree` polynomial nonlinearity of a
/// state with cutoff `n_max` without aliasing into `|xi| <= n_max`.
pub fn product_grid_size(n_max: usize, degree: usize) -> usize {
    smooth_size((degree + 1) * n_max + 1)
}
