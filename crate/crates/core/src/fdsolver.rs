//! Explicit three-level central scheme for `z_tt = z_xx − G(a, z_t)`.
//!
//! The damping sees the lagged velocity `(zⁿ − zⁿ⁻¹)/dt`, which keeps the
//! update explicit at the price of a first-order error in the damping term.

use alloc::vec;
use alloc::vec::Vec;

use crate::damping::{DampingForm, DampingSpec};
use crate::extension::GridFunction;
use crate::state::{derivative, Trace, WaveState};
use crate::Error;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct FdConfig {
    pub nx: usize,
    /// `dt ≤ cfl·h`.
    pub cfl: f64,
    pub horizon: f64,
    pub damping_form: DampingForm,
    /// Spacing of emitted states; `dt` is shrunk so it divides this.
    pub output_dt: f64,
}

impl Default for FdConfig {
    fn default() -> Self {
        Self {
            nx: 512,
            cfl: 0.9,
            horizon: 1.0,
            damping_form: DampingForm::SqrtA,
            output_dt: 1.0 / 64.0,
        }
    }
}

impl FdConfig {
    /// `(dt, steps between emitted states)`.
    pub fn time_step(&self) -> (f64, usize) {
        let h = 1.0 / self.nx as f64;
        let per_output = libm::ceil(self.output_dt / (self.cfl * h) - 1e-12).max(1.0);
        (self.output_dt / per_output, per_output as usize)
    }
}

/// Runs the scheme and returns states every `output_dt` (and at the horizon).
pub fn solve_fd(
    z0: &GridFunction,
    z1: &GridFunction,
    a: &GridFunction,
    spec: &DampingSpec,
    cfg: &FdConfig,
) -> Result<Trace, Error> {
    if !(cfg.cfl > 0.0 && cfg.cfl <= 1.0) {
        return Err(Error::InvalidArgument("cfl must lie in (0, 1]"));
    }
    if cfg.nx < 3 || !(cfg.horizon > 0.0) || !(cfg.output_dt > 0.0) {
        return Err(Error::InvalidArgument("nx ≥ 3, positive horizon and output_dt required"));
    }
    let n = cfg.nx;
    let h = 1.0 / n as f64;
    let (dt, stride) = cfg.time_step();
    let total = libm::round(cfg.horizon / dt) as usize;
    let form = cfg.damping_form;

    let a = a.resample(n);
    let a = a.values();
    let mut z0 = z0.resample(n).into_values();
    let mut v0 = z1.resample(n).into_values();
    for v in [&mut z0, &mut v0] {
        let scale = v.iter().fold(1.0, |m: f64, x| m.max(libm::fabs(*x)));
        if libm::fabs(v[0]) > 1e-12 * scale || libm::fabs(v[n]) > 1e-12 * scale {
            return Err(Error::BoundaryData);
        }
        v[0] = 0.0;
        v[n] = 0.0;
    }

    let bound = 2.0 * sup(&derivative(&z0)).max(sup(&v0));
    let limit = 10.0 * bound + 1e-12;
    let r = dt * dt / (h * h);

    let mut prev = z0.clone();
    let mut cur = vec![0.0; n + 1];
    for j in 1..n {
        let lap = (z0[j + 1] - 2.0 * z0[j] + z0[j - 1]) / (h * h);
        cur[j] = z0[j] + dt * v0[j] + 0.5 * dt * dt * (lap - form.term(spec, a[j], v0[j]));
    }

    let mut trace = Trace::default();
    trace.push(0.0, WaveState { z: z0, zt: v0 });
    let mut next = vec![0.0; n + 1];
    // `cur` holds step `step`
    for step in 1..=total {
        for j in 1..n {
            let v = (cur[j] - prev[j]) / dt;
            next[j] = 2.0 * cur[j] - prev[j] + r * (cur[j + 1] - 2.0 * cur[j] + cur[j - 1])
                - dt * dt * form.term(spec, a[j], v);
        }
        if step % stride == 0 || step == total {
            let zt: Vec<f64> = next.iter().zip(&prev).map(|(a, b)| (a - b) / (2.0 * dt)).collect();
            let state = WaveState { z: cur.clone(), zt };
            let t = step as f64 * dt;
            let norm = sup(&state.zx()) + sup(&state.zt);
            if !(norm <= limit) {
                return Err(Error::Instability { t, norm, limit });
            }
            trace.push(t, state);
        }
        core::mem::swap(&mut prev, &mut cur);
        core::mem::swap(&mut cur, &mut next);
    }
    Ok(trace)
}

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(libm::fabs(*x)))
}
