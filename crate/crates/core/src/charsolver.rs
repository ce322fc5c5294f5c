//! D'Alembert representation with a damping source, solved by Picard
//! iteration on the velocity over successive time slabs.
//!
//! The time step equals the grid spacing, so every characteristic
//! `x ± (t − s)` through a node passes through nodes at every sample time.
//! Line integrals along characteristics are then accumulated with the
//! trapezoid rule in `O(1)` per node and step, and no interpolation enters
//! the fixed-point map.
//!
//! For a velocity field `y` odd and 2-periodic in space the map is
//!
//! ```text
//! φ(y)(t,x) = ½(z̃₀′(x+t) − z̃₀′(x−t)) + ½(z̃₁(x+t) + z̃₁(x−t))
//!           − ½∫₀ᵗ [g(s, x+(t−s)) + g(s, x−(t−s))] ds,
//! g(s,w)    = √ã(w)·σ(√ã(w)·y(s,w)),
//! ```
//!
//! and the displacement is rebuilt from the converged source `h̃ = −g`
//! through the full D'Alembert formula.

use alloc::vec;
use alloc::vec::Vec;

use crate::damping::{DampingForm, DampingSpec};
use crate::extension::{fold_index, GridFunction, Parity, PeriodicView};
use crate::state::{Trace, WaveState};
use crate::Error;

/// Samples used when estimating the local Lipschitz constant of `σ`.
const LIPSCHITZ_SAMPLES: usize = 4096;
/// Halvings of a non-contracting slab before giving up.
const MAX_HALVINGS: usize = 10;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct SlabConfig {
    /// Longest admissible slab.
    pub t_slab: f64,
    /// Target value of `C(y₀,K)·T`; must lie in `(0, 1)`.
    pub contraction_budget: f64,
    pub tol_fixed_point: f64,
    pub max_picard_iters: usize,
    pub nx: usize,
    /// Emitted states per slab of length `t_slab`.
    pub nt_per_slab: usize,
    pub damping_form: DampingForm,
}

impl Default for SlabConfig {
    fn default() -> Self {
        Self {
            t_slab: 1.0,
            contraction_budget: 0.5,
            tol_fixed_point: 1e-10,
            max_picard_iters: 200,
            nx: 512,
            nt_per_slab: 64,
            damping_form: DampingForm::SqrtA,
        }
    }
}

impl SlabConfig {
    pub fn validate(&self) -> Result<(), Error> {
        if !(self.contraction_budget > 0.0 && self.contraction_budget < 1.0) {
            return Err(Error::InvalidArgument("contraction_budget must lie in (0, 1)"));
        }
        if !(self.t_slab > 0.0) || !(self.tol_fixed_point > 0.0) {
            return Err(Error::InvalidArgument("t_slab and tol_fixed_point must be positive"));
        }
        if self.nx < 4 || self.nt_per_slab == 0 || self.max_picard_iters == 0 {
            return Err(Error::InvalidArgument("nx ≥ 4, nt_per_slab ≥ 1, max_picard_iters ≥ 1"));
        }
        Ok(())
    }

    /// Internal steps between emitted states.
    pub fn emit_stride(&self) -> usize {
        let steps = libm::round(self.t_slab * self.nx as f64) as usize;
        (steps / self.nt_per_slab).max(1)
    }
}

/// Per-slab record of the fixed-point iteration.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SlabReport {
    pub t_start: f64,
    pub length: f64,
    pub steps: usize,
    pub iterations: usize,
    /// Largest observed `‖y_{n+1} − y_n‖ / ‖y_n − y_{n−1}‖`.
    pub contraction_ratio: f64,
    /// The a-priori bound `C(y₀,K)·T` used to size the slab.
    pub contraction_bound: f64,
    pub halvings: usize,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CharSolution {
    pub trace: Trace,
    pub slabs: Vec<SlabReport>,
}

impl CharSolution {
    pub fn picard_iterations(&self) -> Vec<usize> {
        self.slabs.iter().map(|s| s.iterations).collect()
    }

    pub fn contraction_ratios(&self) -> Vec<f64> {
        self.slabs.iter().map(|s| s.contraction_ratio).collect()
    }
}

/// Velocity samples `y(t_k, x_j)` on a slab, `k = 0..=steps`, `j = 0..=nx`.
#[derive(Debug, Clone, PartialEq)]
pub struct SlabField {
    nx: usize,
    steps: usize,
    values: Vec<f64>,
}

impl SlabField {
    pub fn constant_in_time(v: &[f64], steps: usize) -> Self {
        let mut values = Vec::with_capacity(v.len() * (steps + 1));
        for _ in 0..=steps {
            values.extend_from_slice(v);
        }
        Self { nx: v.len() - 1, steps, values }
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn row(&self, k: usize) -> &[f64] {
        let w = self.nx + 1;
        &self.values[k * w..(k + 1) * w]
    }

    pub fn at(&self, k: usize, j: usize) -> f64 {
        self.values[k * (self.nx + 1) + j]
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(libm::fabs(*v)))
    }

    pub fn sup_distance(&self, other: &SlabField) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max(libm::fabs(a - b)))
    }
}

/// Incoming data of a slab: displacement, slope and velocity at `t_start`
/// plus the damping profile, all on the same nodes.
#[derive(Debug, Clone)]
pub struct SlabData {
    z: GridFunction,
    zx: GridFunction,
    zt: GridFunction,
    a: GridFunction,
    /// `∫₀^{x_j} z_t` by the trapezoid rule.
    zt_integral: GridFunction,
}

impl SlabData {
    /// Builds slab data; the slope `z_x` is taken from centered differences
    /// of the odd extension of `z`.
    pub fn from_state(state: &WaveState, a: &GridFunction) -> Result<Self, Error> {
        let n = state.n();
        let z = pinned(&state.z)?;
        let zt = pinned(&state.zt)?;
        let zx = {
            let view = PeriodicView::odd(&z);
            let inv = 0.5 * n as f64;
            GridFunction::new(
                (0..=n as i64)
                    .map(|j| (view.at_node(j + 1) - view.at_node(j - 1)) * inv)
                    .collect(),
            )?
        };
        Ok(Self::with_slope(z, zx, zt, a.resample(n)))
    }

    fn with_slope(z: GridFunction, zx: GridFunction, zt: GridFunction, a: GridFunction) -> Self {
        let zt_integral = prefix_trapezoid(zt.values(), zt.h());
        Self { z, zx, zt, a, zt_integral }
    }

    pub fn nx(&self) -> usize {
        self.z.n()
    }

    fn a_inf(&self) -> f64 {
        self.a.values().iter().fold(0.0, |m, v| m.max(*v))
    }
}

fn pinned(v: &[f64]) -> Result<GridFunction, Error> {
    let n = v.len() - 1;
    let scale = v.iter().fold(1.0, |m: f64, x| m.max(libm::fabs(*x)));
    if libm::fabs(v[0]) > 1e-12 * scale || libm::fabs(v[n]) > 1e-12 * scale {
        return Err(Error::BoundaryData);
    }
    let mut g = GridFunction::new(v.to_vec())?;
    g.pin_boundary();
    Ok(g)
}

fn prefix_trapezoid(f: &[f64], h: f64) -> GridFunction {
    let mut out = Vec::with_capacity(f.len());
    let mut acc = 0.0;
    out.push(0.0);
    for w in f.windows(2) {
        acc += 0.5 * h * (w[0] + w[1]);
        out.push(acc);
    }
    GridFunction::new(out).expect("at least two nodes")
}

/// Values of a base-node row at every node index in `[lo, hi]`, read
/// through the odd or even 2-periodic extension.
struct ExtendedRow {
    lo: i64,
    values: Vec<f64>,
}

impl ExtendedRow {
    fn new(base: &[f64], parity: Parity, lo: i64, hi: i64) -> Self {
        let mut row = Self { lo, values: Vec::with_capacity((hi - lo + 1) as usize) };
        row.fill(base, parity, lo, hi);
        row
    }

    fn fill(&mut self, base: &[f64], parity: Parity, lo: i64, hi: i64) {
        let n = base.len() - 1;
        self.lo = lo;
        self.values.clear();
        self.values.extend((lo..=hi).map(|i| {
            let (j, sign) = fold_index(i, n);
            match parity {
                Parity::Odd => sign * base[j],
                Parity::Even => base[j],
            }
        }));
    }

    #[inline]
    fn at(&self, i: i64) -> f64 {
        self.values[(i - self.lo) as usize]
    }
}

/// Extensions of the incoming data over every node index a slab touches.
struct ExtendedData {
    z: ExtendedRow,
    zx: ExtendedRow,
    zt: ExtendedRow,
    zt_integral: ExtendedRow,
}

impl ExtendedData {
    fn new(data: &SlabData, steps: usize) -> Self {
        let (lo, hi) = (-(steps as i64), (data.nx() + steps) as i64);
        Self {
            z: ExtendedRow::new(data.z.values(), Parity::Odd, lo, hi),
            zx: ExtendedRow::new(data.zx.values(), Parity::Even, lo, hi),
            zt: ExtendedRow::new(data.zt.values(), Parity::Odd, lo, hi),
            zt_integral: ExtendedRow::new(data.zt_integral.values(), Parity::Even, lo, hi),
        }
    }

    /// Free-wave velocity `½(z̃₀′(x+t) − z̃₀′(x−t)) + ½(z̃₁(x+t) + z̃₁(x−t))`.
    #[inline]
    fn free_velocity(&self, k: i64, j: i64) -> f64 {
        0.5 * (self.zx.at(j + k) - self.zx.at(j - k)) + 0.5 * (self.zt.at(j + k) + self.zt.at(j - k))
    }

    #[inline]
    fn free_slope(&self, k: i64, j: i64) -> f64 {
        0.5 * (self.zx.at(j + k) + self.zx.at(j - k)) + 0.5 * (self.zt.at(j + k) - self.zt.at(j - k))
    }

    #[inline]
    fn free_displacement(&self, k: i64, j: i64) -> f64 {
        0.5 * (self.z.at(j + k) + self.z.at(j - k))
            + 0.5 * (self.zt_integral.at(j + k) - self.zt_integral.at(j - k))
    }
}

/// Running trapezoid integrals along the two families of characteristics.
///
/// `plus[m]` holds `∫₀^{t_k} f(s, c − s) ds` on the line `c = m·h`;
/// `minus[m]` holds `∫₀^{t_k} f(s, c + s) ds` on the line `c = m·h`.
struct DiagonalAccumulator {
    nx: i64,
    steps: i64,
    plus: Vec<f64>,
    minus: Vec<f64>,
}

impl DiagonalAccumulator {
    fn new(nx: usize, steps: usize) -> Self {
        let len = nx + steps + 1;
        Self { nx: nx as i64, steps: steps as i64, plus: vec![0.0; len], minus: vec![0.0; len] }
    }

    /// Advances from step `k − 1` to `k` given the integrand rows at both
    /// steps, extended over `[-steps, nx + steps]`.
    #[inline]
    fn advance(&mut self, k: i64, dt: f64, prev: &ExtendedRow, cur: &ExtendedRow) {
        let half = 0.5 * dt;
        // plus: m ∈ [k, nx + steps], nodes m − k + 1 and m − k
        let lo = k as usize;
        let hi = (self.nx + self.steps) as usize;
        let p = &prev.values[(1 - prev.lo) as usize..];
        let c = &cur.values[(-cur.lo) as usize..];
        for (m, acc) in self.plus[lo..=hi].iter_mut().enumerate() {
            *acc += half * (p[m] + c[m]);
        }
        // minus: m ∈ [-steps, nx - k], nodes m + k − 1 and m + k
        let len = (self.nx - k + self.steps + 1) as usize;
        let p = &prev.values[(-self.steps + k - 1 - prev.lo) as usize..];
        let c = &cur.values[(-self.steps + k - cur.lo) as usize..];
        for (m, acc) in self.minus[..len].iter_mut().enumerate() {
            *acc += half * (p[m] + c[m]);
        }
    }

    #[inline]
    fn plus(&self, m: i64) -> f64 {
        self.plus[m as usize]
    }

    #[inline]
    fn minus(&self, m: i64) -> f64 {
        self.minus[(m + self.steps) as usize]
    }
}

/// Damping term `g(t_k, x_j)` on base nodes.
#[inline]
fn damping_row(y: &[f64], a: &[f64], spec: &DampingSpec, form: DampingForm, out: &mut Vec<f64>) {
    out.clear();
    out.extend(y.iter().zip(a).map(|(&v, &aj)| form.term(spec, aj, v)));
}

/// One application of the fixed-point map to `y`.
pub fn picard_step(y: &SlabField, data: &SlabData, spec: &DampingSpec, form: DampingForm) -> SlabField {
    let nx = y.nx;
    let steps = y.steps;
    let (lo, hi) = (-(steps as i64), (nx + steps) as i64);
    let dt = 1.0 / nx as f64;
    let ext = ExtendedData::new(data, steps);
    let a = data.a.values();
    let mut g = Vec::with_capacity(nx + 1);
    damping_row(y.row(0), a, spec, form, &mut g);
    let mut prev = ExtendedRow::new(&g, Parity::Odd, lo, hi);
    let mut cur = ExtendedRow::new(&g, Parity::Odd, lo, hi);
    let mut acc = DiagonalAccumulator::new(nx, steps);
    let mut out = Vec::with_capacity(y.values.len());
    out.extend_from_slice(data.zt.values());
    for k in 1..=steps as i64 {
        damping_row(y.row(k as usize), a, spec, form, &mut g);
        cur.fill(&g, Parity::Odd, lo, hi);
        acc.advance(k, dt, &prev, &cur);
        for j in 0..=nx as i64 {
            let source = 0.5 * (acc.plus(j + k) + acc.minus(j - k));
            out.push(ext.free_velocity(k, j) - source);
        }
        let row = out.len() - (nx + 1);
        out[row] = 0.0;
        out[row + nx] = 0.0;
        core::mem::swap(&mut prev, &mut cur);
    }
    SlabField { nx, steps, values: out }
}

/// Rebuilds `(z, z_x, z_t)` on a slab from a converged velocity field and
/// hands every step to `emit`.
fn reconstruct(
    y: &SlabField,
    data: &SlabData,
    spec: &DampingSpec,
    form: DampingForm,
    mut emit: impl FnMut(usize, &[f64], &[f64], &[f64]),
) {
    let nx = y.nx;
    let steps = y.steps;
    let (lo, hi) = (-(steps as i64), (nx + steps) as i64);
    let h = 1.0 / nx as f64;
    let ext = ExtendedData::new(data, steps);
    let a = data.a.values();

    let mut g = Vec::with_capacity(nx + 1);
    let mut prim = Vec::with_capacity(nx + 1);
    // spatial primitive of the source h̃ = −g, even and 2-periodic
    let primitive = |g: &[f64], prim: &mut Vec<f64>| {
        prim.clear();
        let mut acc = 0.0;
        prim.push(0.0);
        for w in g.windows(2) {
            acc -= 0.5 * h * (w[0] + w[1]);
            prim.push(acc);
        }
    };
    damping_row(y.row(0), a, spec, form, &mut g);
    primitive(&g, &mut prim);
    let mut g_prev = ExtendedRow::new(&g, Parity::Odd, lo, hi);
    let mut g_cur = ExtendedRow::new(&g, Parity::Odd, lo, hi);
    let mut p_prev = ExtendedRow::new(&prim, Parity::Even, lo, hi);
    let mut p_cur = ExtendedRow::new(&prim, Parity::Even, lo, hi);

    let mut vel = DiagonalAccumulator::new(nx, steps);
    let mut disp = DiagonalAccumulator::new(nx, steps);
    let mut z = vec![0.0; nx + 1];
    let mut zx = vec![0.0; nx + 1];

    emit(0, data.z.values(), data.zx.values(), y.row(0));
    for k in 1..=steps as i64 {
        damping_row(y.row(k as usize), a, spec, form, &mut g);
        primitive(&g, &mut prim);
        g_cur.fill(&g, Parity::Odd, lo, hi);
        p_cur.fill(&prim, Parity::Even, lo, hi);
        vel.advance(k, h, &g_prev, &g_cur);
        disp.advance(k, h, &p_prev, &p_cur);
        for j in 0..=nx as i64 {
            let ju = j as usize;
            z[ju] = ext.free_displacement(k, j) + 0.5 * (disp.plus(j + k) - disp.minus(j - k));
            zx[ju] = ext.free_slope(k, j) - 0.5 * (vel.plus(j + k) - vel.minus(j - k));
        }
        z[0] = 0.0;
        z[nx] = 0.0;
        emit(k as usize, &z, &zx, y.row(k as usize));
        core::mem::swap(&mut g_prev, &mut g_cur);
        core::mem::swap(&mut p_prev, &mut p_cur);
    }
}

/// Result of the fixed-point iteration on one slab.
#[derive(Debug, Clone)]
pub struct SlabIteration {
    pub velocity: SlabField,
    pub iterations: usize,
    pub contraction_ratio: f64,
}

/// Iterates `y_{n+1} = φ(y_n)` from the incoming velocity held constant in
/// time until successive iterates differ by less than the tolerance.
pub fn iterate_slab(
    data: &SlabData,
    steps: usize,
    cfg: &SlabConfig,
    spec: &DampingSpec,
    t_start: f64,
) -> Result<SlabIteration, Error> {
    let form = cfg.damping_form;
    let y0 = SlabField::constant_in_time(data.zt.values(), steps);
    let mut current = picard_step(&y0, data, spec, form);
    let mut diff = current.sup_distance(&y0);
    let mut iterations = 1;
    let mut ratio: f64 = 0.0;
    let damping_free = spec.is_zero() || data.a_inf() == 0.0;
    while !damping_free && diff >= cfg.tol_fixed_point {
        if iterations >= cfg.max_picard_iters {
            return Err(Error::MaxIters { t_start, iterations, residual: diff });
        }
        let next = picard_step(&current, data, spec, form);
        iterations += 1;
        let next_diff = next.sup_distance(&current);
        let r = next_diff / diff;
        ratio = ratio.max(r);
        if r >= 1.0 {
            return Err(Error::NonContraction { t_start, ratio: r });
        }
        current = next;
        diff = next_diff;
    }
    Ok(SlabIteration { velocity: current, iterations, contraction_ratio: ratio })
}

/// Solves one slab of length `cfg.t_slab` from `state_in`, returning the
/// states at every emitted step (stride [`SlabConfig::emit_stride`]) and the
/// iteration record.
pub fn solve_slab(
    state_in: &WaveState,
    cfg: &SlabConfig,
    spec: &DampingSpec,
    a: &GridFunction,
) -> Result<(Vec<(f64, WaveState)>, SlabReport), Error> {
    cfg.validate()?;
    let data = SlabData::from_state(state_in, a)?;
    let nx = data.nx();
    let steps = (libm::round(cfg.t_slab * nx as f64) as usize).max(1);
    let it = iterate_slab(&data, steps, cfg, spec, 0.0)?;
    let stride = cfg.emit_stride();
    let h = 1.0 / nx as f64;
    let mut out = Vec::new();
    reconstruct(&it.velocity, &data, spec, cfg.damping_form, |k, z, _zx, zt| {
        if k % stride == 0 || k == steps {
            out.push((k as f64 * h, WaveState { z: z.to_vec(), zt: zt.to_vec() }));
        }
    });
    let report = SlabReport {
        t_start: 0.0,
        length: steps as f64 * h,
        steps,
        iterations: it.iterations,
        contraction_ratio: it.contraction_ratio,
        contraction_bound: f64::NAN,
        halvings: 0,
    };
    Ok((out, report))
}

/// Free-wave D'Alembert solution at `(t, x)` from the odd extensions of
/// `z0` and `z1`; the `z1` line integral uses the trapezoid rule at the
/// grid resolution of `z1`.
pub fn dalembert_free(z0: &GridFunction, z1: &GridFunction, t: f64, x: f64) -> f64 {
    let e0 = PeriodicView::odd(z0);
    let e1 = PeriodicView::odd(z1);
    let mut value = 0.5 * (e0.eval(x + t) + e0.eval(x - t));
    if t > 0.0 {
        let intervals = libm::ceil(2.0 * t * z1.n() as f64).max(1.0) as usize;
        let ds = 2.0 * t / intervals as f64;
        let lo = x - t;
        let mut sum = 0.5 * (e1.eval(lo) + e1.eval(x + t));
        for i in 1..intervals {
            sum += e1.eval(lo + ds * i as f64);
        }
        value += 0.5 * sum * ds;
    }
    value
}

/// Marches slabs from `(z0, z1)` up to `horizon`.
///
/// Each slab length is `min(t_slab, budget / C(y₀,K))` where `y₀` is the
/// incoming velocity, `K = 2(‖φ(y₀)‖ + ‖y₀‖)` and `C = a∞·Lip(σ)` on the
/// argument range reached inside the ball `B_K(y₀)`. A slab that fails to
/// contract is halved, at most ten times.
pub fn solve(
    z0: &GridFunction,
    z1: &GridFunction,
    a: &GridFunction,
    spec: &DampingSpec,
    horizon: f64,
    cfg: &SlabConfig,
) -> Result<CharSolution, Error> {
    cfg.validate()?;
    if !(horizon > 0.0) {
        return Err(Error::InvalidArgument("horizon must be positive"));
    }
    let nx = cfg.nx;
    let h = 1.0 / nx as f64;
    let initial = WaveState::new(
        pinned(z0.resample(nx).values())?.into_values(),
        pinned(z1.resample(nx).values())?.into_values(),
    )?;
    let mut data = SlabData::from_state(&initial, a)?;
    let a_inf = data.a_inf();
    let total_steps = (libm::round(horizon * nx as f64) as usize).max(1);
    let max_steps = (libm::round(cfg.t_slab * nx as f64) as usize).max(1);
    let stride = cfg.emit_stride();

    let mut trace = Trace::default();
    trace.push(0.0, initial);
    let mut slabs = Vec::new();
    let mut done = 0usize;

    while done < total_steps {
        let t_start = done as f64 * h;
        let trial = max_steps.min(total_steps - done);
        let (mut steps, bound_rate) = slab_length(&data, trial, cfg, spec, a_inf);
        let mut halvings = 0;
        let it = loop {
            match iterate_slab(&data, steps, cfg, spec, t_start) {
                Ok(it) => break it,
                Err(Error::NonContraction { .. }) if halvings < MAX_HALVINGS && steps > 1 => {
                    steps /= 2;
                    halvings += 1;
                }
                Err(Error::NonContraction { .. }) => return Err(Error::SlabUnderflow { t_start }),
                Err(e) => return Err(e),
            }
        };

        let mut end = None;
        reconstruct(&it.velocity, &data, spec, cfg.damping_form, |k, z, zx, zt| {
            if k == 0 {
                return;
            }
            let global = done + k;
            if global.is_multiple_of(stride) || global == total_steps {
                trace.push(global as f64 * h, WaveState { z: z.to_vec(), zt: zt.to_vec() });
            }
            if k == steps {
                end = Some((z.to_vec(), zx.to_vec(), zt.to_vec()));
            }
        });
        let (z, zx, zt) = end.expect("slab has at least one step");
        slabs.push(SlabReport {
            t_start,
            length: steps as f64 * h,
            steps,
            iterations: it.iterations,
            contraction_ratio: it.contraction_ratio,
            contraction_bound: bound_rate * steps as f64 * h,
            halvings,
        });
        data = SlabData::with_slope(
            GridFunction::new(z)?,
            GridFunction::new(zx)?,
            GridFunction::new(zt)?,
            data.a.clone(),
        );
        done += steps;
    }
    Ok(CharSolution { trace, slabs })
}

/// Picks the number of steps of the next slab; returns it with `C(y₀,K)`.
fn slab_length(
    data: &SlabData,
    trial_steps: usize,
    cfg: &SlabConfig,
    spec: &DampingSpec,
    a_inf: f64,
) -> (usize, f64) {
    let y0 = SlabField::constant_in_time(data.zt.values(), trial_steps);
    let y0_norm = y0.sup_norm();
    let phi_norm = picard_step(&y0, data, spec, cfg.damping_form).sup_norm();
    let k_radius = 2.0 * (phi_norm + y0_norm);
    let arg = cfg.damping_form.argument_radius(a_inf, y0_norm + k_radius);
    let lip = if arg > 0.0 { spec.local_lipschitz(arg, LIPSCHITZ_SAMPLES) } else { spec.slope_at_zero.abs() };
    let rate = cfg.damping_form.term_lipschitz(a_inf, lip);
    if rate <= 0.0 {
        return (trial_steps, rate);
    }
    let t_max = cfg.contraction_budget / rate;
    let steps = (libm::floor(t_max * data.nx() as f64) as usize).clamp(1, trial_steps);
    (steps, rate)
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    fn sine(n: usize) -> GridFunction {
        GridFunction::from_fn(n, |x| libm::sin(PI * x))
    }

    #[test]
    fn dalembert_free_examples() {
        let z0 = sine(512);
        let z1 = GridFunction::zeros(512);
        for &(t, x) in &[(0.3, 0.2), (1.1, 0.75), (2.0, 0.5), (0.0, 0.4)] {
            let exact = libm::sin(PI * x) * libm::cos(PI * t);
            assert!((dalembert_free(&z0, &z1, t, x) - exact).abs() < 1e-5);
        }
        assert_eq!(dalembert_free(&z1, &z1, 0.7, 0.3), 0.0);
        assert_eq!(dalembert_free(&z0, &z1, 0.0, 0.25), z0.interpolate(0.25));
    }

    #[test]
    fn dalembert_free_with_velocity() {
        // z0 = 0, z1 = sin(πx) → z = sin(πx) sin(πt)/π
        let z0 = GridFunction::zeros(1024);
        let z1 = sine(1024);
        for &(t, x) in &[(0.4, 0.3), (1.7, 0.9)] {
            let exact = libm::sin(PI * x) * libm::sin(PI * t) / PI;
            assert!((dalembert_free(&z0, &z1, t, x) - exact).abs() < 1e-5);
        }
    }

    fn slab_data(n: usize, a: f64, zt: impl Fn(f64) -> f64) -> SlabData {
        let state = WaveState::from_grid(&sine(n), &GridFunction::from_fn(n, |x| {
            let v = zt(x);
            if x == 0.0 || x == 1.0 { 0.0 } else { v }
        }))
        .unwrap();
        SlabData::from_state(&state, &GridFunction::from_fn(n, |_| a)).unwrap()
    }

    #[test]
    fn zero_profile_gives_free_velocity() {
        let n = 256;
        let data = slab_data(n, 0.0, |x| libm::sin(2.0 * PI * x));
        let y = SlabField::constant_in_time(&vec![0.7; n + 1], 64);
        let phi = picard_step(&y, &data, &DampingSpec::saturation(), DampingForm::SqrtA);
        // free wave: z = sin(πx)cos(πt) + sin(2πx) sin(2πt)/(2π)
        for k in [0usize, 17, 64] {
            let t = k as f64 / n as f64;
            for j in (0..=n).step_by(16) {
                let x = j as f64 / n as f64;
                let exact = -PI * libm::sin(PI * x) * libm::sin(PI * t)
                    + libm::sin(2.0 * PI * x) * libm::cos(2.0 * PI * t);
                assert!((phi.at(k, j) - exact).abs() < 1e-4, "k={k} j={j}");
            }
        }
    }

    #[test]
    fn zero_velocity_guess_has_no_damping_contribution() {
        let n = 128;
        let data = slab_data(n, 1.0, |_| 0.0);
        let zero = SlabField::constant_in_time(&vec![0.0; n + 1], 32);
        let damped = picard_step(&zero, &data, &DampingSpec::linear_gain(1.0), DampingForm::SqrtA);
        let free = picard_step(&zero, &data, &DampingSpec::linear_gain(0.0), DampingForm::SqrtA);
        assert_eq!(damped, free);
    }

    #[test]
    fn composite_source_matches_oddly_extended_source() {
        // even ã with odd σ: √ã·σ(√ã·y) is odd, so the explicit form agrees
        // with extending the composite source h = −√a·σ(√a·y) oddly
        let n = 64;
        let a = GridFunction::from_fn(n, |x| 0.5 + x * x);
        let y = GridFunction::from_fn(n, |x| libm::sin(3.0 * PI * x));
        let spec = DampingSpec::saturation();
        let ea = PeriodicView::even(&a);
        let ey = PeriodicView::odd(&y);
        let h = GridFunction::from_fn(n, |x| {
            let r = libm::sqrt(a.interpolate(x));
            r * spec.eval(r * y.interpolate(x))
        });
        let eh = PeriodicView::odd(&h);
        for i in -300i64..300 {
            let explicit = DampingForm::SqrtA.term(&spec, ea.at_node(i), ey.at_node(i));
            assert!((explicit - eh.at_node(i)).abs() < 1e-15);
        }
    }

    #[test]
    fn linear_gain_zero_converges_in_one_iteration() {
        let n = 128;
        let data = slab_data(n, 1.0, |x| libm::sin(PI * x));
        let cfg = SlabConfig { nx: n, ..SlabConfig::default() };
        let it = iterate_slab(&data, 64, &cfg, &DampingSpec::linear_gain(0.0), 0.0).unwrap();
        assert_eq!(it.iterations, 1);
    }

    #[test]
    fn saturation_slab_contracts() {
        let n = 256;
        let z0 = sine(n);
        let z1 = GridFunction::zeros(n);
        let state = WaveState::from_grid(&z0, &z1).unwrap();
        let a = GridFunction::from_fn(n, |_| 1.0);
        // C = a∞·Lip(sat) = 1, so T = ½ gives C·T = ½
        let cfg = SlabConfig { nx: n, t_slab: 0.5, ..SlabConfig::default() };
        let (states, report) = solve_slab(&state, &cfg, &DampingSpec::saturation(), &a).unwrap();
        assert!(report.contraction_ratio <= 0.5);
        let bound = libm::ceil(libm::log(cfg.tol_fixed_point) / libm::log(0.5)) as usize + 1;
        assert!(report.iterations <= bound);
        // the outgoing state stays within the doubled incoming H∞ radius
        let r_in = 2.0 * PI;
        for (_, s) in &states {
            let zx = s.zx();
            let norm = zx.iter().fold(0.0, |m: f64, v| m.max(v.abs()))
                + s.zt.iter().fold(0.0, |m: f64, v| m.max(v.abs()));
            assert!(norm <= 2.0 * r_in * 1.02);
        }
    }

    #[test]
    fn successive_iterates_contract_by_slab_factor() {
        let n = 128;
        let data = slab_data(n, 1.0, |_| 0.0);
        let spec = DampingSpec::linear_gain(1.0);
        let steps = 32; // T = 0.25, C = 1
        let mut y = SlabField::constant_in_time(data.zt.values(), steps);
        let mut prev = f64::NAN;
        for _ in 0..6 {
            let next = picard_step(&y, &data, &spec, DampingForm::SqrtA);
            let d = next.sup_distance(&y);
            if prev.is_finite() && prev > 1e-13 {
                assert!(d <= 0.25 * prev + 1e-15, "{d} vs {prev}");
            }
            prev = d;
            y = next;
        }
    }

    #[test]
    fn free_wave_march_matches_closed_form() {
        let n = 512;
        let cfg = SlabConfig { nx: n, ..SlabConfig::default() };
        let sol = solve(
            &sine(n),
            &GridFunction::zeros(n),
            &GridFunction::from_fn(n, |_| 1.0),
            &DampingSpec::linear_gain(0.0),
            2.0,
            &cfg,
        )
        .unwrap();
        let mut err: f64 = 0.0;
        for (t, s) in sol.trace.times.iter().zip(&sol.trace.states) {
            for (j, z) in s.z.iter().enumerate() {
                let x = j as f64 / n as f64;
                err = err.max((z - libm::sin(PI * x) * libm::cos(PI * t)).abs());
            }
        }
        assert!(err <= 5e-3, "{err}");
        assert!(sol.picard_iterations().iter().all(|&i| i == 1));
        assert!((sol.trace.times.last().unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn zero_data_stays_zero() {
        let n = 64;
        let z = GridFunction::zeros(n);
        let cfg = SlabConfig { nx: n, ..SlabConfig::default() };
        let sol = solve(&z, &z, &GridFunction::from_fn(n, |_| 1.0), &DampingSpec::saturation(), 3.0, &cfg)
            .unwrap();
        assert!(sol.trace.states.iter().all(WaveState::is_zero));
    }

    #[test]
    fn boundary_values_are_pinned() {
        let n = 128;
        let cfg = SlabConfig { nx: n, ..SlabConfig::default() };
        let sol = solve(
            &sine(n),
            &GridFunction::from_fn(n, |x| x * (1.0 - x)),
            &GridFunction::from_fn(n, |x| if (0.3..0.6).contains(&x) { 2.0 } else { 0.0 }),
            &DampingSpec::saturation(),
            4.0,
            &cfg,
        )
        .unwrap();
        for s in &sol.trace.states {
            assert!(s.z[0].abs() <= 1e-12 && s.z[n].abs() <= 1e-12);
            assert!(s.zt[0].abs() <= 1e-12 && s.zt[n].abs() <= 1e-12);
        }
    }

    #[test]
    fn rejects_nonvanishing_boundary_data() {
        let n = 32;
        let z0 = GridFunction::from_fn(n, |_| 1.0);
        let cfg = SlabConfig { nx: n, ..SlabConfig::default() };
        let err = solve(&z0, &GridFunction::zeros(n), &z0, &DampingSpec::saturation(), 1.0, &cfg)
            .unwrap_err();
        assert_eq!(err, Error::BoundaryData);
    }

    #[test]
    fn rejects_budget_of_one() {
        let cfg = SlabConfig { contraction_budget: 1.0, ..SlabConfig::default() };
        assert!(cfg.validate().is_err());
    }
}
