//! Sampled wave states and time traces.

use alloc::vec::Vec;

use crate::extension::GridFunction;
use crate::Error;

/// `(z, z_t)` sampled at `x_j = j/n`, `j = 0..=n`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct WaveState {
    pub z: Vec<f64>,
    pub zt: Vec<f64>,
}

impl WaveState {
    pub fn new(z: Vec<f64>, zt: Vec<f64>) -> Result<Self, Error> {
        if z.len() != zt.len() || z.len() < 3 {
            return Err(Error::GridMismatch { expected: z.len(), got: zt.len() });
        }
        Ok(Self { z, zt })
    }

    pub fn from_grid(z: &GridFunction, zt: &GridFunction) -> Result<Self, Error> {
        Self::new(z.values().to_vec(), zt.values().to_vec())
    }

    pub fn zeros(n: usize) -> Self {
        Self { z: alloc::vec![0.0; n + 1], zt: alloc::vec![0.0; n + 1] }
    }

    /// Number of intervals.
    pub fn n(&self) -> usize {
        self.z.len() - 1
    }

    pub fn h(&self) -> f64 {
        1.0 / self.n() as f64
    }

    /// `z_x` by centered differences, second-order one-sided at the ends.
    pub fn zx(&self) -> Vec<f64> {
        derivative(&self.z)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            z: self.z.iter().map(|v| v * factor).collect(),
            zt: self.zt.iter().map(|v| v * factor).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.z.iter().chain(self.zt.iter()).all(|v| *v == 0.0)
    }
}

/// Second derivatives `(z_xx, z_tx)` of a state.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothState {
    pub zxx: Vec<f64>,
    pub ztx: Vec<f64>,
}

impl SmoothState {
    pub fn from_state(state: &WaveState) -> Self {
        Self { zxx: second_derivative(&state.z), ztx: derivative(&state.zt) }
    }

    pub fn n(&self) -> usize {
        self.zxx.len() - 1
    }
}

/// Differentiates uniform samples on `[0, 1]`.
pub fn derivative(f: &[f64]) -> Vec<f64> {
    let n = f.len() - 1;
    let inv = n as f64;
    let mut d = alloc::vec![0.0; n + 1];
    if n == 1 {
        d[0] = (f[1] - f[0]) * inv;
        d[1] = d[0];
        return d;
    }
    for j in 1..n {
        d[j] = 0.5 * (f[j + 1] - f[j - 1]) * inv;
    }
    d[0] = 0.5 * (-3.0 * f[0] + 4.0 * f[1] - f[2]) * inv;
    d[n] = 0.5 * (3.0 * f[n] - 4.0 * f[n - 1] + f[n - 2]) * inv;
    d
}

/// Second derivative of uniform samples on `[0, 1]`.
pub fn second_derivative(f: &[f64]) -> Vec<f64> {
    let n = f.len() - 1;
    let inv2 = (n * n) as f64;
    let mut d = alloc::vec![0.0; n + 1];
    if n < 3 {
        return d;
    }
    for j in 1..n {
        d[j] = (f[j + 1] - 2.0 * f[j] + f[j - 1]) * inv2;
    }
    d[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) * inv2;
    d[n] = (2.0 * f[n] - 5.0 * f[n - 1] + 4.0 * f[n - 2] - f[n - 3]) * inv2;
    d
}

/// Time-indexed sequence of states.
#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Trace {
    pub times: Vec<f64>,
    pub states: Vec<WaveState>,
}

impl Trace {
    pub fn push(&mut self, t: f64, state: WaveState) {
        self.times.push(t);
        self.states.push(state);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn initial(&self) -> Option<&WaveState> {
        self.states.first()
    }

    /// State whose time is within `tol` of `t`.
    pub fn state_at(&self, t: f64, tol: f64) -> Option<&WaveState> {
        self.times
            .iter()
            .position(|&s| libm::fabs(s - t) <= tol)
            .map(|k| &self.states[k])
    }

    /// Keeps every `stride`-th state and always the last one.
    pub fn thinned(&self, stride: usize) -> Trace {
        let stride = stride.max(1);
        let mut out = Trace::default();
        let last = self.len().saturating_sub(1);
        for (k, (t, s)) in self.times.iter().zip(&self.states).enumerate() {
            if k % stride == 0 || k == last {
                out.push(*t, s.clone());
            }
        }
        out
    }
}
