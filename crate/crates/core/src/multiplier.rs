//! Four-frequency multipliers on the hyperplane `xi1 + xi2 + xi3 + xi4 = 0`,
//! their case-wise bounds, the double mean value inequality, and the exact
//! integer identities behind the resonance analysis.
//!
//! The asymptotic relations `<<`, `>>`, `<~`, `>~` are resolved with a fixed
//! factor (default 8): `a << b` iff `factor * a <= b` and `a <~ b` iff
//! `a <= factor * b`.

use rayon::prelude::*;

use crate::error::{DnlsError, Result};
use crate::invariants::m4_kernel;
use crate::spectral::jbracket;

/// Integer frequencies `(xi1, xi2, xi3, xi4)` summing to zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FrequencyQuad([i64; 4]);

impl FrequencyQuad {
    pub fn new(xi: [i64; 4]) -> Result<Self> {
        let sum = xi.iter().try_fold(0i64, |acc, &x| acc.checked_add(x));
        match sum {
            Some(0) => Ok(Self(xi)),
            Some(s) => Err(DnlsError::Precondition(format!("{xi:?} sums to {s}, not 0"))),
            None => Err(DnlsError::Domain(format!("{xi:?} overflows"))),
        }
    }

    /// Completes `(xi1, xi2, xi3)` with `xi4 = -(xi1 + xi2 + xi3)`.
    pub fn complete(xi1: i64, xi2: i64, xi3: i64) -> Self {
        Self([xi1, xi2, xi3, -(xi1 + xi2 + xi3)])
    }

    pub fn xi(&self) -> [i64; 4] {
        self.0
    }

    /// `xi_j + xi_k` with one-based indices, as in `xi14`.
    pub fn pair(&self, j: usize, k: usize) -> i64 {
        self.0[j - 1] + self.0[k - 1]
    }

    /// Magnitudes sorted in decreasing order: `[N(1), N(2), N(3), N(4)]`.
    pub fn sorted_magnitudes(&self) -> [i64; 4] {
        let mut m = self.0.map(i64::abs);
        m.sort_unstable_by(|a, b| b.cmp(a));
        m
    }

    pub fn is_resonant(&self) -> bool {
        self.pair(1, 4) * self.pair(3, 4) == 0
    }
}

/// Threshold factor for the asymptotic comparisons.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    pub factor: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self { factor: 8.0 }
    }
}

impl Thresholds {
    /// `a << b`
    #[inline]
    pub fn much_less(&self, a: f64, b: f64) -> bool {
        self.factor * a <= b
    }

    /// `a <~ b`
    #[inline]
    pub fn lesssim(&self, a: f64, b: f64) -> bool {
        a <= self.factor * b
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoundCase {
    CaseI,
    CaseII,
    CaseIII,
    Excluded,
}

impl BoundCase {
    pub const BOUNDED: [BoundCase; 3] = [BoundCase::CaseI, BoundCase::CaseII, BoundCase::CaseIII];

    pub fn label(&self) -> &'static str {
        match self {
            BoundCase::CaseI => "case_i",
            BoundCase::CaseII => "case_ii",
            BoundCase::CaseIII => "case_iii",
            BoundCase::Excluded => "excluded",
        }
    }
}

fn require_nonresonant(quad: &FrequencyQuad) -> Result<()> {
    if quad.is_resonant() {
        Err(DnlsError::Domain(format!(
            "{quad:?} has xi14 * xi34 = 0"
        )))
    } else {
        Ok(())
    }
}

/// Which of the three case hypotheses hold, `[i, ii, iii]`. The hypotheses
/// are not mutually exclusive.
pub fn case_hypotheses(quad: &FrequencyQuad, thr: Thresholds) -> Result<[bool; 3]> {
    require_nonresonant(quad)?;
    Ok(hypotheses_unchecked(quad, thr))
}

fn hypotheses_unchecked(quad: &FrequencyQuad, thr: Thresholds) -> [bool; 3] {
    let [x1, x2, x3, x4] = quad.xi().map(i64::abs);
    let m = quad.sorted_magnitudes();
    let n1 = m[0] as f64;
    let n3 = m[2] as f64;
    let a = quad.pair(1, 4).abs() as f64;
    let b = quad.pair(3, 4).abs() as f64;
    let (lo, hi) = (a.min(b), a.max(b));

    let case_i = thr.lesssim(n1, lo) || thr.much_less(hi, n1);
    let case_ii = thr.lesssim(n1, hi) && thr.much_less(lo, n1);
    let odd_top = x1.max(x3) == m[0] && x1.min(x3) == m[1] && x2.max(x4) == m[2] && x2.min(x4) == m[3];
    let even_top = x2.max(x4) == m[0] && x2.min(x4) == m[1] && x1.max(x3) == m[2] && x1.min(x3) == m[3];
    let case_iii = (odd_top || even_top) && thr.much_less(n3, n1);
    [case_i, case_ii, case_iii]
}

/// Case of a nonresonant quad with the default threshold, first match in the
/// order i, ii, iii.
pub fn classify_case(quad: &FrequencyQuad) -> Result<BoundCase> {
    classify_case_with(quad, Thresholds::default())
}

pub fn classify_case_with(quad: &FrequencyQuad, thr: Thresholds) -> Result<BoundCase> {
    let h = case_hypotheses(quad, thr)?;
    Ok(BoundCase::BOUNDED
        .into_iter()
        .zip(h)
        .find_map(|(c, holds)| holds.then_some(c))
        .unwrap_or(BoundCase::Excluded))
}

/// `M4 = m4 / (xi14 xi34)` on nonresonant quads.
pub fn big_m4(quad: &FrequencyQuad, s: f64) -> Result<f64> {
    require_nonresonant(quad)?;
    let den = (quad.pair(1, 4) * quad.pair(3, 4)) as f64;
    Ok(m4_kernel(quad, s)? / den)
}

/// The right-hand side of the case bound for `quad`.
pub fn case_bound(case: BoundCase, quad: &FrequencyQuad, s: f64) -> Option<f64> {
    let m = quad.sorted_magnitudes();
    let (n1, n3) = (jbracket(m[0] as f64), jbracket(m[2] as f64));
    match case {
        BoundCase::CaseI => Some(n1.powf(2.0 * s - 1.0)),
        BoundCase::CaseII => Some(n3.powf(2.0 * s - 1.0)),
        BoundCase::CaseIII => Some(n3 * n1.powf(2.0 * s - 2.0)),
        BoundCase::Excluded => None,
    }
}

/// Supremum of `|M4| / bound` over the quads satisfying one case hypothesis.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseStats {
    pub case: BoundCase,
    pub max_ratio: f64,
    pub argmax: Option<FrequencyQuad>,
    pub count: u64,
}

impl CaseStats {
    fn empty(case: BoundCase) -> Self {
        Self { case, max_ratio: 0.0, argmax: None, count: 0 }
    }

    fn offer(&mut self, ratio: f64, quad: FrequencyQuad) {
        self.count += 1;
        let better = match self.argmax {
            None => true,
            Some(q) => ratio > self.max_ratio || (ratio == self.max_ratio && quad < q),
        };
        if better {
            self.max_ratio = ratio;
            self.argmax = Some(quad);
        }
    }

    fn merge(&mut self, other: &CaseStats) {
        let count = self.count + other.count;
        if let Some(q) = other.argmax {
            self.offer(other.max_ratio, q);
        }
        self.count = count;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanReport {
    pub radius: i64,
    pub s: f64,
    pub threshold: f64,
    /// One entry per bounded case, in the order i, ii, iii.
    pub cases: Vec<CaseStats>,
    /// Nonresonant quads satisfying no hypothesis.
    pub excluded: u64,
    /// All nonresonant quads enumerated.
    pub total: u64,
}

impl ScanReport {
    pub fn case(&self, case: BoundCase) -> &CaseStats {
        self.cases.iter().find(|c| c.case == case).expect("bounded case")
    }
}

pub const MAX_SCAN_RADIUS: i64 = 256;

/// Enumerates every nonresonant quad with `|xi_j| <= radius` and records,
/// for each case hypothesis that holds, `|M4|` over the case bound.
pub fn bound_ratio_scan(radius: i64, s: f64) -> Result<ScanReport> {
    bound_ratio_scan_with(radius, s, Thresholds::default())
}

pub fn bound_ratio_scan_with(radius: i64, s: f64, thr: Thresholds) -> Result<ScanReport> {
    if radius < 1 || radius > MAX_SCAN_RADIUS {
        return Err(DnlsError::ResourceGuard(format!(
            "scan radius must lie in 1..={MAX_SCAN_RADIUS}, got {radius}"
        )));
    }
    let r = radius as usize;
    let weight: Vec<f64> = (0..=r).map(|k| jbracket(k as f64).powf(2.0 * s)).collect();
    let bound_low: Vec<f64> = (0..=r).map(|k| jbracket(k as f64).powf(2.0 * s - 1.0)).collect();
    let bound_iii: Vec<f64> = (0..=r).map(|k| jbracket(k as f64).powf(2.0 * s - 2.0)).collect();
    let w = |x: i64| weight[x.unsigned_abs() as usize];

    let partials: Vec<(Vec<CaseStats>, u64, u64)> = (-radius..=radius)
        .into_par_iter()
        .map(|x1| {
            let mut stats: Vec<CaseStats> = BoundCase::BOUNDED.iter().map(|&c| CaseStats::empty(c)).collect();
            let (mut excluded, mut total) = (0u64, 0u64);
            for x2 in -radius..=radius {
                for x3 in -radius..=radius {
                    let x4 = -(x1 + x2 + x3);
                    if x4.abs() > radius {
                        continue;
                    }
                    let q = FrequencyQuad([x1, x2, x3, x4]);
                    let den = (x1 + x4) * (x3 + x4);
                    if den == 0 {
                        continue;
                    }
                    total += 1;
                    let m4 = x1 as f64 * w(x3) + x2 as f64 * w(x4) + x3 as f64 * w(x1) + x4 as f64 * w(x2);
                    let big = (m4 / den as f64).abs();
                    let h = hypotheses_unchecked(&q, thr);
                    if !h.iter().any(|&b| b) {
                        excluded += 1;
                        continue;
                    }
                    let m = q.sorted_magnitudes();
                    let (n1, n3) = (m[0] as usize, m[2] as usize);
                    let bounds = [
                        bound_low[n1],
                        bound_low[n3],
                        jbracket(n3 as f64) * bound_iii[n1],
                    ];
                    for k in 0..3 {
                        if h[k] {
                            stats[k].offer(big / bounds[k], q);
                        }
                    }
                }
            }
            (stats, excluded, total)
        })
        .collect();

    let mut cases: Vec<CaseStats> = BoundCase::BOUNDED.iter().map(|&c| CaseStats::empty(c)).collect();
    let (mut excluded, mut total) = (0, 0);
    for (stats, e, t) in &partials {
        for (acc, st) in cases.iter_mut().zip(stats) {
            acc.merge(st);
        }
        excluded += e;
        total += t;
    }
    Ok(ScanReport {
        radius,
        s,
        threshold: thr.factor,
        cases,
        excluded,
        total,
    })
}

/// `f(x) = x <x>^{2s}`.
#[inline]
pub fn dmvt_profile(x: f64, s: f64) -> f64 {
    x * (1.0 + x * x).powf(s)
}

/// `f''(x) = 2 s x (1 + x^2)^{s - 2} (3 + (2 s + 1) x^2)`.
#[inline]
pub fn dmvt_profile_second_derivative(x: f64, s: f64) -> f64 {
    2.0 * s * x * (1.0 + x * x).powf(s - 2.0) * (3.0 + (2.0 * s + 1.0) * x * x)
}

/// Ratio `|f(xi+eta+lambda) - f(xi+eta) - f(xi+lambda) + f(xi)| / (|f''(xi)| |eta| |lambda|)`.
pub fn dmvt_ratio(xi: i64, eta: i64, lambda: i64, s: f64) -> f64 {
    let f = |k: i64| dmvt_profile(k as f64, s);
    let num = f(xi + eta + lambda) - f(xi + eta) - f(xi + lambda) + f(xi);
    num.abs() / (dmvt_profile_second_derivative(xi as f64, s).abs() * (eta * lambda).abs() as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DmvtReport {
    pub xi_max: i64,
    pub s: f64,
    pub max_ratio: f64,
    /// `(xi, eta, lambda)` attaining the maximum (lexicographically smallest on ties).
    pub argmax: Option<(i64, i64, i64)>,
    pub count: u64,
}

pub const MAX_DMVT_XI: i64 = 10_000;

/// Scans `8 <= |xi| <= xi_max`, `0 < |eta|, |lambda| <= |xi| / 8`.
pub fn dmvt_ratio_scan(s: f64, xi_max: i64) -> Result<DmvtReport> {
    if xi_max < 8 || xi_max > MAX_DMVT_XI {
        return Err(DnlsError::ResourceGuard(format!(
            "xi_max must lie in 8..={MAX_DMVT_XI}, got {xi_max}"
        )));
    }
    let reach = xi_max + 2 * (xi_max / 8) + 1;
    let table: Vec<f64> = (-reach..=reach).map(|k| dmvt_profile(k as f64, s)).collect();
    let f = |k: i64| table[(k + reach) as usize];

    let partials: Vec<(f64, Option<(i64, i64, i64)>, u64)> = (-xi_max..=xi_max)
        .into_par_iter()
        .filter(|xi| xi.abs() >= 8)
        .map(|xi| {
            let k = xi.abs() / 8;
            let curv = dmvt_profile_second_derivative(xi as f64, s).abs();
            let (mut best, mut arg, mut count) = (0.0f64, None, 0u64);
            for eta in -k..=k {
                if eta == 0 {
                    continue;
                }
                for lambda in -k..=k {
                    if lambda == 0 {
                        continue;
                    }
                    let num = f(xi + eta + lambda) - f(xi + eta) - f(xi + lambda) + f(xi);
                    let ratio = num.abs() / (curv * (eta * lambda).abs() as f64);
                    count += 1;
                    if arg.is_none() || ratio > best {
                        best = ratio;
                        arg = Some((xi, eta, lambda));
                    }
                }
            }
            (best, arg, count)
        })
        .collect();

    let mut report = DmvtReport { xi_max, s, max_ratio: 0.0, argmax: None, count: 0 };
    for (best, arg, count) in partials {
        report.count += count;
        if let Some(a) = arg {
            let better = match report.argmax {
                None => true,
                Some(b) => best > report.max_ratio || (best == report.max_ratio && a < b),
            };
            if better {
                report.max_ratio = best;
                report.argmax = Some(a);
            }
        }
    }
    Ok(report)
}

/// Checks `sum_j (tau_j + (-1)^{j-1} xi_j^2) = 2 xi12 xi14` for `sum tau = 0`.
/// The frequency part is compared exactly in integer arithmetic.
pub fn dispersive_identity_check(quad: &FrequencyQuad, taus: [f64; 4]) -> Result<bool> {
    let tau_sum: f64 = taus.iter().sum();
    let tau_scale: f64 = taus.iter().map(|t| t.abs()).sum();
    if !tau_sum.is_finite() || tau_sum.abs() > 1e-12 * (1.0 + tau_scale) {
        return Err(DnlsError::Precondition(format!(
            "modulations sum to {tau_sum}, not 0"
        )));
    }
    let x = quad.xi().map(i128::from);
    let lhs = x[0] * x[0] - x[1] * x[1] + x[2] * x[2] - x[3] * x[3];
    let rhs = 2 * (x[0] + x[1]) * (x[0] + x[3]);
    let float_lhs: f64 = (0..4)
        .map(|j| taus[j] + if j % 2 == 0 { 1.0 } else { -1.0 } * (x[j] * x[j]) as f64)
        .sum();
    let float_ok = (float_lhs - rhs as f64).abs() <= 1e-9 * (1.0 + tau_scale + lhs.unsigned_abs() as f64);
    Ok(lhs == rhs && float_ok)
}

/// Checks `xi1^2 - xi2^2 + xi3^2 - xi^2 = -2 (xi1 - xi)(xi3 - xi)` with
/// `xi = xi1 + xi2 + xi3`, exactly.
pub fn factorization_check(xi1: i64, xi2: i64, xi3: i64) -> bool {
    let (a, b, c) = (i128::from(xi1), i128::from(xi2), i128::from(xi3));
    let xi = a + b + c;
    a * a - b * b + c * c - xi * xi == -2 * (a - xi) * (c - xi)
}
