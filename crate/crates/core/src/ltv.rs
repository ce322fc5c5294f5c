//! Lyapunov certificates for `v' = (A − d(t)·B·Bᵀ)v` with `d(t) ∈ [d0, d1]`.
//!
//! `P` solves `A_{d0}ᵀP + P·A_{d0} = −C·I` for the frozen system
//! `A_{d0} = A − d0·B·Bᵀ`, the gain is `M = 2(d1 − d0)‖P‖/(d0‖B‖)`, and
//! `V(v) = ⟨Pv, v⟩ + M‖v‖²` yields
//! `‖v(t)‖² ≤ ((‖P‖+M)/M)·exp(−Ct/(‖P‖+M))·‖v0‖²`.

use alloc::vec::Vec;
use core::f64::consts::PI;

pub use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::Error;

/// Tolerance on the largest eigenvalue of `(A + Aᵀ)/2`.
pub const DISSIPATIVITY_TOL: f64 = 1e-10;
pub const RESIDUAL_TOL: f64 = 1e-8;
pub const ENVELOPE_SLACK: f64 = 0.01;
/// Per-step allowance on the growth of `V`, relative to `V(v0)`.
pub const V_STEP_SLACK: f64 = 1e-8;
const SECTOR_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct LtvSystem {
    a: DMatrix<f64>,
    b: DMatrix<f64>,
    d0: f64,
    d1: f64,
}

fn spectral_abscissa(m: &DMatrix<f64>) -> f64 {
    m.complex_eigenvalues().iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max)
}

fn sym_extreme_eigs(m: &DMatrix<f64>) -> (f64, f64) {
    let s = (m + m.transpose()) * 0.5;
    let e = s.symmetric_eigenvalues();
    (e.min(), e.max())
}

/// Largest singular value.
pub fn operator_norm(m: &DMatrix<f64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.singular_values().max()
}

impl LtvSystem {
    pub fn new(a: DMatrix<f64>, b: DMatrix<f64>, d0: f64, d1: f64) -> Result<Self, Error> {
        if !a.is_square() || a.nrows() == 0 {
            return Err(Error::InvalidArgument("A must be a nonempty square matrix"));
        }
        if b.nrows() != a.nrows() {
            return Err(Error::GridMismatch { expected: a.nrows(), got: b.nrows() });
        }
        if a.iter().chain(b.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("A and B must be finite"));
        }
        if !(d0 > 0.0 && d0 <= d1 && d1.is_finite()) {
            return Err(Error::InvalidSector { d0, d1 });
        }
        let (_, max_eig) = sym_extreme_eigs(&a);
        if max_eig > DISSIPATIVITY_TOL {
            return Err(Error::NotDissipative { max_eig });
        }
        let sys = Self { a, b, d0, d1 };
        let abscissa = spectral_abscissa(&sys.frozen(d0));
        if !(abscissa < 0.0) {
            return Err(Error::NotHurwitz { abscissa });
        }
        Ok(sys)
    }

    pub fn dim(&self) -> usize {
        self.a.nrows()
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn b(&self) -> &DMatrix<f64> {
        &self.b
    }

    pub fn d0(&self) -> f64 {
        self.d0
    }

    pub fn d1(&self) -> f64 {
        self.d1
    }

    /// `A − d·B·Bᵀ`.
    pub fn frozen(&self, d: f64) -> DMatrix<f64> {
        &self.a - (&self.b * self.b.transpose()) * d
    }
}

/// Modal truncation of the wave operator with constant `a ≡ a0`.
///
/// Mode `k` has coordinates `(kπ·ẑ_k, ż_k)`, giving the skew block
/// `[[0, kπ], [−kπ, 0]]`; `B` is `√a0` on every velocity coordinate.
pub fn wave_modal_system(n_modes: usize, a0: f64, d0: f64, d1: f64) -> Result<LtvSystem, Error> {
    if n_modes == 0 {
        return Err(Error::InvalidArgument("n_modes must be at least 1"));
    }
    if !(a0 > 0.0 && a0.is_finite()) {
        return Err(Error::InvalidArgument("a0 must be positive"));
    }
    let dim = 2 * n_modes;
    let mut a = DMatrix::zeros(dim, dim);
    let mut b = DMatrix::zeros(dim, n_modes);
    for k in 0..n_modes {
        let w = (k + 1) as f64 * PI;
        a[(2 * k, 2 * k + 1)] = w;
        a[(2 * k + 1, 2 * k)] = -w;
        b[(2 * k + 1, k)] = libm::sqrt(a0);
    }
    LtvSystem::new(a, b, d0, d1)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub p: DMatrix<f64>,
    pub c: f64,
    pub m: f64,
    pub p_norm: f64,
    pub b_norm: f64,
    pub envelope_prefactor: f64,
    pub envelope_rate: f64,
    /// `λ_max(A_{d0}ᵀP + P·A_{d0} + C·I)`.
    pub residual: f64,
}

impl Certificate {
    /// `⟨Pv, v⟩ + M‖v‖²`.
    pub fn lyapunov_value(&self, v: &DVector<f64>) -> f64 {
        v.dot(&(&self.p * v)) + self.m * v.norm_squared()
    }

    /// Bound on `‖v(t)‖²/‖v0‖²`.
    pub fn envelope(&self, t: f64) -> f64 {
        self.envelope_prefactor * libm::exp(-self.envelope_rate * t)
    }
}

/// Solves `A_{d0}ᵀP + P·A_{d0} = −C·I` over the upper triangle of `P`.
pub fn solve_lyapunov(sys: &LtvSystem, c: f64) -> Result<Certificate, Error> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidArgument("C must be positive"));
    }
    let ad = sys.frozen(sys.d0);
    let n = sys.dim();
    let abscissa = spectral_abscissa(&ad);
    if !(abscissa < 0.0) {
        return Err(Error::NotHurwitz { abscissa });
    }
    let idx = |i: usize, j: usize| {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        i * n - i * (i + 1) / 2 + j
    };
    let unknowns = n * (n + 1) / 2;
    let mut lhs = DMatrix::zeros(unknowns, unknowns);
    let mut rhs = DVector::zeros(unknowns);
    // row (i, j): Σ_k A_ki P_kj + P_ik A_kj
    for i in 0..n {
        for j in i..n {
            let row = idx(i, j);
            for k in 0..n {
                lhs[(row, idx(k, j))] += ad[(k, i)];
                lhs[(row, idx(i, k))] += ad[(k, j)];
            }
            if i == j {
                rhs[row] = -c;
            }
        }
    }
    let sol = lhs.lu().solve(&rhs).ok_or(Error::Singular)?;
    let p = DMatrix::from_fn(n, n, |i, j| sol[idx(i, j)]);
    let (min_eig, p_norm) = sym_extreme_eigs(&p);
    if !(min_eig > 0.0) {
        return Err(Error::NotPositiveDefinite { min_eig });
    }
    let lyap = ad.transpose() * &p + &p * &ad + DMatrix::identity(n, n) * c;
    let (_, residual) = sym_extreme_eigs(&lyap);
    let b_norm = operator_norm(&sys.b);
    let m = 2.0 * (sys.d1 - sys.d0) * p_norm / (sys.d0 * b_norm);
    let (envelope_prefactor, envelope_rate) = if m > 0.0 {
        ((p_norm + m) / m, c / (p_norm + m))
    } else {
        // d1 = d0: V = ⟨Pv,v⟩ alone certifies ‖v‖² ≤ cond(P)·e^{−Ct/‖P‖}‖v0‖²
        (p_norm / min_eig, c / p_norm)
    };
    Ok(Certificate { p, c, m, p_norm, b_norm, envelope_prefactor, envelope_rate, residual })
}

/// A damping coefficient `t ↦ d(t)`.
#[derive(Debug, Clone, PartialEq)]
pub enum DSignal {
    Constant(f64),
    /// `mid + amp·sin(ωt + phase)`.
    Sinusoidal { mid: f64, amp: f64, omega: f64, phase: f64 },
    /// `values[⌊t/interval⌋]`, last value held.
    Piecewise { interval: f64, values: Vec<f64> },
}

/// Generator families for Monte Carlo trials.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum SignalKind {
    Constant,
    Sinusoidal,
    PiecewiseRandom,
    BangBang,
    RandomBangBang,
}

impl DSignal {
    pub fn sinusoidal(d0: f64, d1: f64, omega: f64, phase: f64) -> Self {
        DSignal::Sinusoidal { mid: 0.5 * (d0 + d1), amp: 0.5 * (d1 - d0), omega, phase }
    }

    /// Alternates `d1, d0, d1, …` every `interval`.
    pub fn bang_bang(d0: f64, d1: f64, interval: f64, horizon: f64) -> Self {
        let count = Self::pieces(interval, horizon);
        let values = (0..count).map(|k| if k % 2 == 0 { d1 } else { d0 }).collect();
        DSignal::Piecewise { interval, values }
    }

    /// Uniform values in `[d0, d1]`, redrawn every `interval`.
    pub fn piecewise_random(d0: f64, d1: f64, interval: f64, horizon: f64, rng: &mut impl Rng) -> Self {
        let count = Self::pieces(interval, horizon);
        let values = (0..count).map(|_| d0 + (d1 - d0) * rng.random::<f64>()).collect();
        DSignal::Piecewise { interval, values }
    }

    /// `d0` or `d1` at random, redrawn every `interval`.
    pub fn random_bang_bang(d0: f64, d1: f64, interval: f64, horizon: f64, rng: &mut impl Rng) -> Self {
        let count = Self::pieces(interval, horizon);
        let values = (0..count).map(|_| if rng.random::<bool>() { d1 } else { d0 }).collect();
        DSignal::Piecewise { interval, values }
    }

    fn pieces(interval: f64, horizon: f64) -> usize {
        (libm::ceil(horizon / interval) as usize).max(1) + 1
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            DSignal::Constant(d) => *d,
            DSignal::Sinusoidal { mid, amp, omega, phase } => mid + amp * libm::sin(omega * t + phase),
            DSignal::Piecewise { interval, values } => {
                let k = libm::floor(t / interval).max(0.0) as usize;
                values[k.min(values.len() - 1)]
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DVector<f64>>,
}

/// Classical RK4 with `d` sampled at the stage times.
pub fn simulate_ltv(
    sys: &LtvSystem,
    d: impl Fn(f64) -> f64,
    v0: &DVector<f64>,
    horizon: f64,
    dt: f64,
) -> Result<Trajectory, Error> {
    if v0.len() != sys.dim() {
        return Err(Error::GridMismatch { expected: sys.dim(), got: v0.len() });
    }
    if !(dt > 0.0 && horizon >= 0.0) {
        return Err(Error::InvalidArgument("dt must be positive and horizon nonnegative"));
    }
    let steps = libm::round(horizon / dt) as usize;
    let bbt = &sys.b * sys.b.transpose();
    let sample = |t: f64| {
        let value = d(t);
        let tol = SECTOR_TOL * sys.d1;
        if value >= sys.d0 - tol && value <= sys.d1 + tol {
            Ok(value)
        } else {
            Err(Error::SignalOutOfSector { t, value, d0: sys.d0, d1: sys.d1 })
        }
    };
    let rhs = |dv: f64, v: &DVector<f64>| &sys.a * v - (&bbt * v) * dv;
    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    let mut v = v0.clone();
    times.push(0.0);
    states.push(v.clone());
    for k in 0..steps {
        let t = k as f64 * dt;
        let (da, db, dc) = (sample(t)?, sample(t + 0.5 * dt)?, sample(t + dt)?);
        let k1 = rhs(da, &v);
        let k2 = rhs(db, &(&v + &k1 * (0.5 * dt)));
        let k3 = rhs(db, &(&v + &k2 * (0.5 * dt)));
        let k4 = rhs(dc, &(&v + &k3 * dt));
        v += (k1 + (k2 + k3) * 2.0 + k4) * (dt / 6.0);
        times.push((k + 1) as f64 * dt);
        states.push(v.clone());
    }
    Ok(Trajectory { times, states })
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DecayReport {
    /// Largest `‖v(t)‖² / (envelope(t)·‖v0‖²)`.
    pub max_envelope_ratio: f64,
    /// `(t, ‖v‖², envelope·‖v0‖²)` beyond the 1% slack.
    pub envelope_violations: Vec<(f64, f64, f64)>,
    /// `(t, V(t), V(t_prev))` where `V` grew by more than the step slack.
    pub v_violations: Vec<(f64, f64, f64)>,
    /// `−ln(‖v(T)‖²/‖v0‖²)/T`.
    pub observed_rate: f64,
}

impl DecayReport {
    pub fn passed(&self) -> bool {
        self.envelope_violations.is_empty() && self.v_violations.is_empty()
    }
}

pub fn verify_decay(traj: &Trajectory, cert: &Certificate) -> DecayReport {
    let mut report = DecayReport {
        max_envelope_ratio: 0.0,
        envelope_violations: Vec::new(),
        v_violations: Vec::new(),
        observed_rate: f64::INFINITY,
    };
    let Some(v0) = traj.states.first() else {
        return report;
    };
    let n0 = v0.norm_squared();
    let v_slack = V_STEP_SLACK * cert.lyapunov_value(v0);
    let mut prev_v: Option<f64> = None;
    for (t, v) in traj.times.iter().zip(&traj.states) {
        let sq = v.norm_squared();
        let env = cert.envelope(*t) * n0;
        if sq > env * (1.0 + ENVELOPE_SLACK) {
            report.envelope_violations.push((*t, sq, env));
        }
        if env > 0.0 {
            report.max_envelope_ratio = report.max_envelope_ratio.max(sq / env);
        }
        let val = cert.lyapunov_value(v);
        if let Some(pv) = prev_v {
            if val > pv + v_slack {
                report.v_violations.push((*t, val, pv));
            }
        }
        prev_v = Some(val);
    }
    let t_end = *traj.times.last().unwrap_or(&0.0);
    let n_end = traj.states.last().map(|v| v.norm_squared()).unwrap_or(0.0);
    if n0 > 0.0 && n_end > 0.0 && t_end > 0.0 {
        report.observed_rate = -libm::log(n_end / n0) / t_end;
    }
    report
}

/// Deterministic inputs for trial `index`: a unit initial vector and a signal.
pub fn trial_inputs(
    sys: &LtvSystem,
    kind: SignalKind,
    interval: f64,
    horizon: f64,
    seed: u64,
    index: u64,
) -> (DVector<f64>, DSignal) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let mut v0 = DVector::from_fn(sys.dim(), |_, _| rng.random_range(-1.0..1.0));
    let norm = v0.norm();
    if norm > 0.0 {
        v0 /= norm;
    } else {
        v0[0] = 1.0;
    }
    let (d0, d1) = (sys.d0, sys.d1);
    let signal = match kind {
        SignalKind::Constant => DSignal::Constant(rng.random_range(d0..=d1)),
        SignalKind::Sinusoidal => {
            DSignal::sinusoidal(d0, d1, rng.random_range(0.5..20.0), rng.random_range(0.0..2.0 * PI))
        }
        SignalKind::PiecewiseRandom => DSignal::piecewise_random(d0, d1, interval, horizon, &mut rng),
        SignalKind::BangBang => DSignal::bang_bang(d0, d1, interval, horizon),
        SignalKind::RandomBangBang => DSignal::random_bang_bang(d0, d1, interval, horizon, &mut rng),
    };
    (v0, signal)
}
