//! Norms, the Haraux functional, a-priori bound checks and decay fits.
//!
//! Slack constants are project-wide: 2% on the `H∞` bound, `10⁻³` relative
//! on Haraux monotonicity, 5% on interpolated `H_p` envelopes.

use alloc::vec::Vec;

use crate::state::{derivative, SmoothState, Trace, WaveState};
use crate::Error;

pub const LINF_SLACK: f64 = 0.02;
pub const HARAUX_REL_SLACK: f64 = 1e-3;
pub const HARAUX_ABS_SLACK: f64 = 1e-10;
pub const ENVELOPE_SLACK: f64 = 0.05;
/// `H∞` bound constant on the solution map.
pub const LINF_OPERATOR_BOUND: f64 = 2.0;

fn check_exponent(p: f64) -> Result<(), Error> {
    if p >= 2.0 {
        Ok(())
    } else {
        Err(Error::InvalidExponent(p))
    }
}

/// `(∫₀¹ |f|^p)^{1/p}` by the trapezoid rule, grid maximum for `p = ∞`.
pub fn lp_norm(f: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        return f.iter().fold(0.0, |m, v| m.max(libm::fabs(*v)));
    }
    let n = f.len() - 1;
    let h = 1.0 / n as f64;
    let pow = |v: f64| {
        let a = libm::fabs(v);
        if p == 2.0 {
            a * a
        } else {
            libm::pow(a, p)
        }
    };
    let inner: f64 = f[1..n].iter().map(|v| pow(*v)).sum::<f64>() + 0.5 * (pow(f[0]) + pow(f[n]));
    libm::pow(inner * h, 1.0 / p)
}

/// `‖z_x‖_p + ‖z_t‖_p`.
pub fn hp_norm(state: &WaveState, p: f64) -> Result<f64, Error> {
    check_exponent(p)?;
    Ok(lp_norm(&state.zx(), p) + lp_norm(&state.zt, p))
}

/// `‖z_xx‖_p + ‖z_tx‖_p`.
pub fn dp_norm(state: &SmoothState, p: f64) -> Result<f64, Error> {
    check_exponent(p)?;
    Ok(lp_norm(&state.zxx, p) + lp_norm(&state.ztx, p))
}

/// `∫₀¹ F(z_t + z_x) + F(z_t − z_x) dx` for an even convex `F`.
pub fn haraux_functional(state: &WaveState, f: impl Fn(f64) -> f64) -> f64 {
    let zx = state.zx();
    let n = state.n();
    let h = state.h();
    let point = |j: usize| f(state.zt[j] + zx[j]) + f(state.zt[j] - zx[j]);
    let inner: f64 = (1..n).map(point).sum::<f64>() + 0.5 * (point(0) + point(n));
    inner * h
}

/// `s ↦ max(|s| − bound, 0)²`.
pub fn pos_square(bound: f64) -> impl Fn(f64) -> f64 + Copy {
    move |s: f64| {
        let e = libm::fabs(s) - bound;
        if e > 0.0 {
            e * e
        } else {
            0.0
        }
    }
}

/// The even convex weights shipped for the Haraux functional.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum HarauxWeight {
    Square,
    Quartic,
    PosSquare { bound: f64 },
}

impl HarauxWeight {
    pub fn eval(&self, s: f64) -> f64 {
        match *self {
            HarauxWeight::Square => s * s,
            HarauxWeight::Quartic => (s * s) * (s * s),
            HarauxWeight::PosSquare { bound } => pos_square(bound)(s),
        }
    }
}

/// `2·max(‖z₀′‖∞, ‖z₁‖∞)` for the initial state.
pub fn linf_bound(initial: &WaveState) -> f64 {
    LINF_OPERATOR_BOUND * lp_norm(&derivative(&initial.z), f64::INFINITY).max(lp_norm(&initial.zt, f64::INFINITY))
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NormHistory {
    pub p: f64,
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

pub fn norm_history(trace: &Trace, p: f64) -> Result<NormHistory, Error> {
    check_exponent(p)?;
    let values = trace.states.iter().map(|s| hp_norm(s, p)).collect::<Result<Vec<_>, _>>()?;
    Ok(NormHistory { p, times: trace.times.clone(), values })
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LinfBoundReport {
    pub bound: f64,
    pub slack: f64,
    pub max_norm: f64,
    /// `(t, ‖(z,z_t)(t)‖_{H∞})` above `bound·(1 + slack)`.
    pub violations: Vec<(f64, f64)>,
}

impl LinfBoundReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks `‖(z,z_t)‖_{H∞} ≤ 2·max(‖z₀′‖∞, ‖z₁‖∞)` along the trace.
pub fn check_linf_bound(trace: &Trace) -> LinfBoundReport {
    let bound = trace.initial().map(linf_bound).unwrap_or(0.0);
    let limit = bound * (1.0 + LINF_SLACK);
    let mut max_norm: f64 = 0.0;
    let mut violations = Vec::new();
    for (t, s) in trace.times.iter().zip(&trace.states) {
        let norm = lp_norm(&s.zx(), f64::INFINITY) + lp_norm(&s.zt, f64::INFINITY);
        max_norm = max_norm.max(norm);
        if norm > limit {
            violations.push((*t, norm));
        }
    }
    LinfBoundReport { bound, slack: LINF_SLACK, max_norm, violations }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HarauxReport {
    pub values: Vec<f64>,
    pub slack: f64,
    pub max_value: f64,
    /// `(t, φ(t), φ(t_prev))` where `φ` grew by more than the slack.
    pub violations: Vec<(f64, f64, f64)>,
}

impl HarauxReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks that the Haraux functional never grows by more than
/// `10⁻³·φ(0) + 10⁻¹⁰` between consecutive samples.
pub fn check_haraux_monotone(trace: &Trace, f: impl Fn(f64) -> f64) -> HarauxReport {
    let values: Vec<f64> = trace.states.iter().map(|s| haraux_functional(s, &f)).collect();
    let phi0 = values.first().copied().unwrap_or(0.0);
    let slack = HARAUX_REL_SLACK * phi0 + HARAUX_ABS_SLACK;
    let violations = values
        .windows(2)
        .zip(&trace.times[1..])
        .filter(|(w, _)| w[1] > w[0] + slack)
        .map(|(w, t)| (*t, w[1], w[0]))
        .collect();
    let max_value = values.iter().fold(0.0, |m: f64, v| m.max(*v));
    HarauxReport { values, slack, max_value, violations }
}

/// Exponential envelope `‖·‖(t) ≤ K·e^{−βt}·‖·‖(0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DecayFit {
    /// Smallest constant making the envelope dominate the whole history.
    pub k: f64,
    pub beta: f64,
    pub fit_window: (f64, f64),
    /// Largest deviation of `ln value` from the fitted line on the window.
    pub residual: f64,
    /// Amplitude `e^c` of the regression line `ln value ≈ c − βt`.
    pub intercept: f64,
}

/// Least-squares fit of `ln value` against `t` on `[w·T, T]`.
pub fn fit_decay(history: &NormHistory, window_fraction: f64) -> Result<DecayFit, Error> {
    if !(0.0..1.0).contains(&window_fraction) {
        return Err(Error::InvalidArgument("window_fraction must lie in [0, 1)"));
    }
    let (times, values) = (&history.times, &history.values);
    if times.len() < 2 || times.len() != values.len() {
        return Err(Error::InvalidArgument("history needs at least two matching samples"));
    }
    let v0 = values[0];
    let t_end = *times.last().unwrap_or(&0.0);
    let t_lo = window_fraction * t_end;
    let window: Vec<(f64, f64)> = times
        .iter()
        .zip(values)
        .filter(|(t, _)| **t >= t_lo)
        .map(|(t, v)| (*t, *v))
        .collect();
    if !(v0 > 0.0) || window.len() < 2 || window.iter().any(|&(_, v)| !(v > 1e-14 * v0)) {
        return Err(Error::DegenerateFit);
    }
    let n = window.len() as f64;
    let mean_t = window.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_l = window.iter().map(|p| libm::log(p.1)).sum::<f64>() / n;
    let (mut stt, mut stl) = (0.0, 0.0);
    for &(t, v) in &window {
        stt += (t - mean_t) * (t - mean_t);
        stl += (t - mean_t) * (libm::log(v) - mean_l);
    }
    let slope = stl / stt;
    let c = mean_l - slope * mean_t;
    let beta = -slope;
    let residual = window
        .iter()
        .map(|&(t, v)| libm::fabs(libm::log(v) - (c + slope * t)))
        .fold(0.0, f64::max);
    let k = times
        .iter()
        .zip(values)
        .map(|(t, v)| v / (v0 * libm::exp(-beta * t)))
        .fold(0.0, f64::max);
    Ok(DecayFit { k, beta, fit_window: (t_lo, t_end), residual, intercept: libm::exp(c) })
}

/// `K∞·(K₂/K∞)^{2/p}·e^{−2βt/p}`: the bound obtained by interpolating an
/// `L²` envelope `K₂e^{−βt}` with an `L∞` operator bound `K∞`.
pub fn interpolated_envelope(k2: f64, k_inf: f64, beta: f64, p: f64, t: f64) -> f64 {
    let theta = 2.0 / p;
    k_inf * libm::pow(k2 / k_inf, theta) * libm::exp(-beta * theta * t)
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RieszThorinReport {
    pub p: f64,
    pub k2: f64,
    pub k_inf: f64,
    pub beta: f64,
    pub slack: f64,
    /// Largest `‖·‖_{H_p}(t) / (envelope(t)·‖·‖_{H_p}(0))`.
    pub max_ratio: f64,
    /// `(t, ‖(z,z_t)(t)‖_{H_p}, envelope·‖(z₀,z₁)‖_{H_p})`.
    pub violations: Vec<(f64, f64, f64)>,
}

impl RieszThorinReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks the interpolated `H_p` envelope along the trace using `(K, β)`
/// fitted on the `p = 2` history and the `H∞` operator bound `fit_inf_k`.
pub fn riesz_thorin_check(
    trace: &Trace,
    fit2: &DecayFit,
    fit_inf_k: f64,
    p: f64,
) -> Result<RieszThorinReport, Error> {
    if !(p > 2.0 && p.is_finite()) {
        return Err(Error::InvalidExponent(p));
    }
    let history = norm_history(trace, p)?;
    let v0 = history.values.first().copied().unwrap_or(0.0);
    let mut max_ratio: f64 = 0.0;
    let mut violations = Vec::new();
    for (t, v) in history.times.iter().zip(&history.values) {
        let env = interpolated_envelope(fit2.k, fit_inf_k, fit2.beta, p, *t) * v0;
        if *v > env * (1.0 + ENVELOPE_SLACK) {
            violations.push((*t, *v, env));
        }
        if env > 0.0 {
            max_ratio = max_ratio.max(v / env);
        }
    }
    Ok(RieszThorinReport {
        p,
        k2: fit2.k,
        k_inf: fit_inf_k,
        beta: fit2.beta,
        slack: ENVELOPE_SLACK,
        max_ratio,
        violations,
    })
}
