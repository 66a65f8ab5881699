//! Acceptance suite. Every criterion prints one `criterion N: PASS|FAIL`
//! line with the measured quantities, then asserts.
//!
//! Run with `cargo test -p dnls-core --test acceptance -- --nocapture` to
//! see the lines of passing criteria too.

mod common;

use std::time::{Duration, Instant};

use dnls_core::evolution::{evolve, SimConfig};
use dnls_core::gauge::dnls_residual;
use dnls_core::harness::{
    conservation_experiment, convergence_experiment, relative_drifts, tail_experiment, ConvergenceSetup,
    Diagnostics, TailSetup,
};
use dnls_core::invariants::{fit_symmetrization_constant, hs_growth_rate, symmetrized_form};
use dnls_core::multiplier::{bound_ratio_scan, dispersive_identity_check, dmvt_ratio_scan, factorization_check};
use dnls_core::nonlinearity::{decompose, mu, n11_direct_oracle, term};
use dnls_core::spectral::{project, Band};
use dnls_core::{BoundCase, FrequencyQuad, MuMode, SpectralProfile, SpectralState, Term};
use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use common::*;

fn report(n: u32, ok: bool, detail: String) {
    println!("criterion {n}: {} {detail}", if ok { "PASS" } else { "FAIL" });
}

/// `coarse / fine` lies within `target` +-20%.
fn ratio_near(coarse: f64, fine: f64, target: f64) -> bool {
    let r = coarse / fine;
    (r - target).abs() <= 0.2 * target
}

#[test]
fn criterion_01_plane_wave() {
    let start = Instant::now();
    let a: f64 = 0.1;
    let omega = 1.0 + a * a + a.powi(4);
    let u0 = SpectralState::plane_wave(32, 1, Complex64::new(a, 0.0)).unwrap();
    let error = |dt: f64| {
        let tr = evolve(&u0, &SimConfig::new(32, dt, 1.0, MuMode::from_initial(&u0))).unwrap();
        let last = tr.last();
        let exact = SpectralState::plane_wave(32, 1, Complex64::from_polar(a, -omega * last.time())).unwrap();
        last.max_abs_diff(&exact) / a
    };
    let e1 = error(1e-3);
    let e2 = error(5e-4);
    let elapsed = start.elapsed();
    let ok = e1 <= 1e-9 && ratio_near(e1, e2, 16.0) && elapsed < Duration::from_secs(5);
    report(
        1,
        ok,
        format!("rel_err(dt=1e-3)={e1:.3e} rel_err(dt=5e-4)={e2:.3e} ratio={:.3} time={elapsed:.2?}", e1 / e2),
    );
    assert!(ok);
}

#[test]
fn criterion_02_decomposition() {
    let start = Instant::now();
    let (mut worst_n1, mut worst_full, mut worst_direct) = (0.0f64, 0.0f64, 0.0f64);
    for seed in 0..100u64 {
        let n = [8, 16, 24, 32][(seed % 4) as usize];
        let u = seeded(seed, n, 1.0, 0.5);
        let d = decompose(&u, MuMode::Instantaneous);

        let n1 = n1_oracle(&u);
        let got_n1 = d.select(Term::N11).axpy(Complex64::new(1.0, 0.0), &d.select(Term::N12));
        worst_n1 = worst_n1.max(max_diff(got_n1.coeffs(), &n1) / max_abs(&n1));

        let full = full_oracle(&u, mu(&u));
        let sum: Vec<Complex64> = (0..u.coeffs().len())
            .map(|i| d.n11.coeffs()[i] + d.n12.coeffs()[i] + d.n21.coeffs()[i] + d.n22.coeffs()[i])
            .collect();
        worst_full = worst_full.max(max_diff(&sum, &full) / max_abs(&full));

        let direct = n11_direct_oracle(&u).unwrap();
        let fft = term(&u, Term::N11, MuMode::Instantaneous);
        worst_direct = worst_direct.max(fft.max_abs_diff(&direct) / direct.max_abs());
    }
    let elapsed = start.elapsed();
    let ok = worst_n1 <= 1e-12 && worst_full <= 1e-12 && worst_direct <= 1e-11 && elapsed < Duration::from_secs(30);
    report(
        2,
        ok,
        format!("n1={worst_n1:.2e} full={worst_full:.2e} n11_direct={worst_direct:.2e} time={elapsed:.2?}"),
    );
    assert!(ok);
}

#[test]
fn criterion_03_integer_identities() {
    let mut checked = 0u64;
    let mut failures = 0u64;
    let mut check = |x1: i64, x2: i64, x3: i64, taus: [f64; 4]| {
        if !factorization_check(x1, x2, x3) {
            failures += 1;
        }
        let x4 = -(x1 + x2 + x3);
        let quad = FrequencyQuad::new([x1, x2, x3, x4]).unwrap();
        if !dispersive_identity_check(&quad, taus).unwrap() {
            failures += 1;
        }
        checked += 1;
    };
    for x1 in -50..=50 {
        for x2 in -50..=50 {
            for x3 in -50..=50 {
                let t = (x1 - x3) as f64 * 0.25;
                check(x1, x2, x3, [t, -t, 0.5 * t, -0.5 * t]);
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let draw = |r: &mut ChaCha8Rng| (r.next_u64() % 201) as i64 - 100;
    for _ in 0..100_000 {
        let (x1, x2, x3) = (draw(&mut rng), draw(&mut rng), draw(&mut rng));
        let a = (rng.next_u64() % 1000) as f64 / 8.0 - 60.0;
        let b = (rng.next_u64() % 1000) as f64 / 8.0 - 60.0;
        check(x1, x2, x3, [a, b, -a, -b]);
    }
    let ok = failures == 0;
    report(3, ok, format!("tuples={checked} failures={failures}"));
    assert!(ok);
}

#[test]
fn criterion_04_conservation() {
    let u0 = project(&seeded(9, 32, 2.0, 0.2), Band::Le(8));
    let diag = Diagnostics { s: 0.5, s1: 0.3, p: 3.0, tail_ns: vec![] };
    let drifts = |dt: f64| {
        let cfg = SimConfig::new(32, dt, 1.0, MuMode::from_initial(&u0)).with_stride(1);
        relative_drifts(&conservation_experiment(&u0, &cfg, &diag).unwrap())
    };
    let [m, e, p] = drifts(1e-3);
    let coarse = drifts(2e-2);
    let fine = drifts(1e-2);
    let energy_order = ratio_near(coarse[1], fine[1], 16.0);
    let momentum_order = ratio_near(coarse[2], fine[2], 16.0);
    let ok = m <= 1e-10 && e <= 1e-8 && p <= 1e-8 && energy_order && momentum_order;
    report(
        4,
        ok,
        format!(
            "dt=1e-3 drift M={m:.2e} E={e:.2e} P={p:.2e}; halving 2e-2 -> 1e-2 ratio E={:.2} P={:.2}",
            coarse[1] / fine[1],
            coarse[2] / fine[2]
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_05_growth_identity() {
    let mut worst = 0.0f64;
    let mut states: Vec<SpectralState> = (0..12u64).map(|seed| seeded(seed, 16, 1.0, 0.4)).collect();
    states.push(SpectralState::plane_wave(16, 3, Complex64::new(0.2, 0.5)).unwrap());
    for u in &states {
        let full = full_oracle(u, mu(u));
        for s in [0.0, 0.3, 0.45, 1.0] {
            let scale: f64 = 2.0
                * u.modes()
                    .zip(&full)
                    .map(|((xi, c), nx)| (1.0 + (xi * xi) as f64).powf(s) * c.norm() * ((xi * xi) as f64 * c.norm() + nx.norm()))
                    .sum::<f64>();
            let g = hs_growth_rate(u, s, MuMode::Instantaneous);
            for v in [g.linear_part, g.n12_part, g.n22_internal_part] {
                worst = worst.max(v.abs() / scale);
            }
        }
    }

    let u0 = project(&seeded(3, 32, 2.0, 0.2), Band::Le(8));
    let s = 0.45;
    let center = 0.08;
    let fd_error = |h: f64| {
        let k = (center / h).round() as usize;
        let cfg = SimConfig::new(32, h / 8.0, center + h, MuMode::from_initial(&u0)).with_stride(8);
        let tr = evolve(&u0, &cfg).unwrap();
        let f = &tr.frames;
        let fd = (hs_squared(&f[k + 1], s) - hs_squared(&f[k - 1], s)) / (2.0 * h);
        (fd - hs_growth_rate(&f[k], s, cfg.mu_mode).total).abs()
    };
    let (e1, e2) = (fd_error(0.01), fd_error(0.005));
    let ok = worst <= 1e-13 && ratio_near(e1, e2, 4.0);
    report(
        5,
        ok,
        format!("vanishing/scale={worst:.2e} fd_err(h=0.01)={e1:.3e} fd_err(h=0.005)={e2:.3e} ratio={:.3}", e1 / e2),
    );
    assert!(ok);
}

#[test]
fn criterion_06_symmetrization() {
    let calibration: Vec<SpectralState> = (0..100u64).map(|seed| seeded(seed, 8, 1.0, 0.3)).collect();
    let validation: Vec<SpectralState> = (5000..5100u64).map(|seed| seeded(seed, 8, 1.0, 0.3)).collect();
    let c = fit_symmetrization_constant(&calibration, 0.3).unwrap();
    let mut worst = 0.0f64;
    for s in [0.3, 0.45] {
        for u in &validation {
            let direct = hs_growth_rate(u, s, MuMode::Instantaneous).n11_part;
            let via_form = (c * symmetrized_form(u, s).unwrap()).re;
            worst = worst.max((via_form - direct).abs() / direct.abs());
        }
    }
    let ok = worst <= 1e-10;
    report(6, ok, format!("c={c:.12} worst_rel={worst:.2e} over 2x100 validation states"));
    assert!(ok);
}

#[test]
fn criterion_07_multiplier_stability() {
    let start = Instant::now();
    let mut ok = true;
    let mut detail = Vec::new();
    for s in [0.30, 0.45] {
        let small = bound_ratio_scan(32, s).unwrap();
        let large = bound_ratio_scan(128, s).unwrap();
        for case in BoundCase::BOUNDED {
            let (a, b) = (small.case(case).max_ratio, large.case(case).max_ratio);
            let stable = a.is_finite() && b.is_finite() && a > 0.0 && b / a <= 2.0 && a / b <= 2.0;
            ok &= stable;
            detail.push(format!("s={s} {}: {a:.4}->{b:.4}", case.label()));
        }
        let d1 = dmvt_ratio_scan(s, 512).unwrap().max_ratio;
        let d2 = dmvt_ratio_scan(s, 1024).unwrap().max_ratio;
        ok &= d1.is_finite() && d2.is_finite() && d1 > 0.0 && d2 / d1 <= 2.0 && d1 / d2 <= 2.0;
        detail.push(format!("s={s} dmvt: {d1:.4}->{d2:.4}"));
    }
    let elapsed = start.elapsed();
    ok &= elapsed < Duration::from_secs(300);
    report(7, ok, format!("{} time={elapsed:.2?}", detail.join("; ")));
    assert!(ok);
}

#[test]
fn criterion_08_approximation_rate() {
    let start = Instant::now();
    let (s, delta, p) = (0.6, 0.05, 3.0);
    let sigma = s + 0.5 + delta;
    let s1 = sigma - 1.0 / p - delta;
    let setup = ConvergenceSetup {
        profile: SpectralProfile { sigma, amplitude: 0.1, seed: 1 },
        s,
        s_prime: 0.45,
        s1,
        s1_prime: s1 - 0.15,
        p,
        levels: vec![32, 64, 128, 256],
        n_ref: 1024,
        t_end: 0.1,
        dt: 1e-3,
        record_stride: 10,
        band_limit: None,
    };
    let rep = convergence_experiment(&setup).unwrap();
    let elapsed = start.elapsed();
    let slope = rep.fitted_slope.unwrap_or(f64::NAN);
    let r2 = rep.fit_r2.unwrap_or(f64::NAN);
    let ok = (slope - (-0.2)).abs() <= 0.3 && r2 >= 0.9 && elapsed < Duration::from_secs(600);
    report(
        8,
        ok,
        format!(
            "slope={slope:.4} r2={r2:.4} predicted={:.3} floor={:.3e} time={elapsed:.2?}",
            rep.predicted_exponent, rep.reference_floor
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_09_tail_envelope() {
    let start = Instant::now();
    let setup = TailSetup {
        profile: SpectralProfile { sigma: 1.0, amplitude: 0.1, seed: 1 },
        s: 0.45,
        ns: vec![64, 128, 256, 512],
        n_max: 1024,
        t_end: 0.5,
        dt: 1e-3,
        record_stride: 50,
        c_grid: vec![0.25, 0.5, 1.0, 2.0, 4.0],
        band_limit: None,
    };
    let rep = tail_experiment(&setup).unwrap();
    let elapsed = start.elapsed();
    let envelope_ok = rep.envelope.is_some_and(|e| e.c.is_finite() && e.epsilon > 0.0);
    let ok = rep.initial_l2 <= 0.5 && envelope_ok && rep.is_monotone() && elapsed < Duration::from_secs(600);
    let sup: Vec<String> = rep.rows.iter().map(|r| format!("{}:{:.4e}", r.n, r.sup_tail_hs)).collect();
    report(
        9,
        ok,
        format!("l2={:.4} envelope={:?} sup_tail=[{}] time={elapsed:.2?}", rep.initial_l2, rep.envelope, sup.join(" ")),
    );
    assert!(ok);
}

#[test]
fn criterion_10_gauge_equivalence() {
    let u0 = project(&seeded(4, 16, 1.0, 0.1), Band::Le(3));
    let residual = |dt: f64| {
        let cfg = SimConfig::new(16, dt, 0.01, MuMode::from_initial(&u0));
        let tr = evolve(&u0, &cfg).unwrap();
        dnls_residual(&tr, cfg.mu_mode).unwrap().into_iter().fold(0.0, f64::max)
    };
    let r: Vec<f64> = [1e-3, 5e-4, 2.5e-4].into_iter().map(residual).collect();
    let ok = ratio_near(r[0], r[1], 4.0) && ratio_near(r[1], r[2], 4.0) && r[2] <= 1e-6;
    report(
        10,
        ok,
        format!("residual dt=1e-3:{:.3e} 5e-4:{:.3e} 2.5e-4:{:.3e} ratios {:.3} {:.3}", r[0], r[1], r[2], r[0] / r[1], r[1] / r[2]),
    );
    assert!(ok);
}
