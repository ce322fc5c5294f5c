//! The five experiment pipelines behind the CLI subcommands.

use std::time::Instant;

use dampwave_core::charsolver::{self, SlabReport};
use dampwave_core::damping::{self, SectorBounds, SECTOR_SAMPLES};
use dampwave_core::diagnostics::{
    self, check_haraux_monotone, check_linf_bound, fit_decay, linf_bound, lp_norm,
    norm_history, riesz_thorin_check, LINF_OPERATOR_BOUND,
};
use dampwave_core::fdsolver::solve_fd;
use dampwave_core::ltv::{self, LtvSystem};
use dampwave_core::{DampingForm, DampingSpec, GridFunction, Trace, WaveState};
use rayon::prelude::*;

use crate::config::{
    matrix_from_rows, CheckKind, LtvConfig, LtvSystemConfig, RunConfig, SolverConfig, SolverKind,
    WeightChoice,
};
use crate::result::*;
use crate::LabError;

/// Relative level below which the `pos_square` functional counts as zero.
pub const VANISH_REL: f64 = 1e-6;

#[derive(Debug, Clone, Default)]
pub struct Options {
    /// Simulate dampings that fail validation.
    pub force: bool,
    pub seed: Option<u64>,
}

/// A two-or-more column table written to `series/` and `plots/`.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

impl Series {
    pub fn xy(name: String, xs: &[f64], ys: &[f64]) -> Self {
        Series {
            name,
            columns: vec!["t", "value"],
            rows: xs.iter().zip(ys).map(|(x, y)| vec![*x, *y]).collect(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub result: RunResult,
    pub series: Vec<Series>,
    /// Tables written to the run directory itself.
    pub tables: Vec<Series>,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.result.passed {
            0
        } else {
            1
        }
    }
}

/// Grid data and damping for one resolution.
#[derive(Debug, Clone)]
pub struct Problem {
    pub z0: GridFunction,
    pub z1: GridFunction,
    pub a: GridFunction,
    pub spec: DampingSpec,
    pub form: DampingForm,
}

impl Problem {
    pub fn build(cfg: &RunConfig, nx: usize) -> Result<Self, LabError> {
        let (z0, z1) = cfg.problem.initial_data(nx)?;
        Ok(Problem {
            z0,
            z1,
            a: cfg.problem.profile(nx)?,
            spec: cfg.problem.damping.to_spec()?,
            form: cfg.problem.damping_form,
        })
    }

    pub fn initial(&self) -> WaveState {
        WaveState { z: self.z0.values().to_vec(), zt: self.z1.values().to_vec() }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let scale = |g: &GridFunction| GridFunction::from_fn(g.n(), |x| factor * g.interpolate(x));
        Problem { z0: scale(&self.z0), z1: scale(&self.z1), ..self.clone() }
    }

    /// Largest argument passed to `σ` along trajectories bounded by the `H∞` estimate.
    pub fn argument_radius(&self) -> f64 {
        self.form.argument_radius(self.a.sup_norm(), linf_bound(&self.initial()))
    }
}

fn provenance(seed: u64, start: Instant) -> Provenance {
    Provenance {
        seed,
        version: env!("CARGO_PKG_VERSION").to_string(),
        wall_time_s: start.elapsed().as_secs_f64(),
    }
}

fn empty_result(command: &str, cfg: &RunConfig, seed: u64) -> RunResult {
    RunResult {
        command: command.to_string(),
        passed: true,
        config: cfg.clone(),
        provenance: Provenance { seed, version: String::new(), wall_time_s: 0.0 },
        damping_validation: None,
        runs: Vec::new(),
        comparison: None,
        certificate: None,
        sweep: None,
    }
}

/// Runs one solver; the characteristic solver also returns its slab log.
pub fn run_solver(
    which: SolverName,
    problem: &Problem,
    solver: &SolverConfig,
) -> Result<(Trace, Option<Vec<SlabReport>>), LabError> {
    match which {
        SolverName::Characteristics => {
            let cfg = solver.slab_config(problem.form)?;
            let sol = charsolver::solve(&problem.z0, &problem.z1, &problem.a, &problem.spec, solver.horizon, &cfg)
                .map_err(LabError::Solver)?;
            Ok((sol.trace, Some(sol.slabs)))
        }
        SolverName::Fd => {
            let cfg = solver.fd_config(problem.form)?;
            let trace =
                solve_fd(&problem.z0, &problem.z1, &problem.a, &problem.spec, &cfg).map_err(LabError::Solver)?;
            Ok((trace, None))
        }
    }
}

fn solvers_for(kind: SolverKind) -> Vec<SolverName> {
    match kind {
        SolverKind::Characteristics => vec![SolverName::Characteristics],
        SolverKind::Fd => vec![SolverName::Fd],
        SolverKind::Both => vec![SolverName::Characteristics, SolverName::Fd],
    }
}

/// `½(‖z_x‖₂² + ‖z_t‖₂²)`.
pub fn energy(state: &WaveState) -> f64 {
    let (a, b) = (lp_norm(&state.zx(), 2.0), lp_norm(&state.zt, 2.0));
    0.5 * (a * a + b * b)
}

pub fn picard_check(slabs: &[SlabReport], budget: f64, tol: f64) -> PicardCheck {
    let ratio_limit = budget + 0.1;
    let iteration_limit = (-tol.log2()).ceil() as usize + 1;
    let max_ratio = slabs.iter().map(|s| s.contraction_ratio).fold(0.0, f64::max);
    let max_iterations = slabs.iter().map(|s| s.iterations).max().unwrap_or(0);
    PicardCheck {
        ratio_limit,
        iteration_limit,
        max_ratio,
        max_iterations,
        slabs: slabs.to_vec(),
        passed: max_ratio <= ratio_limit && max_iterations <= iteration_limit,
    }
}

/// Runs the requested diagnostics on one trace.
pub fn diagnose(
    cfg: &RunConfig,
    which: SolverName,
    trace: &Trace,
    slabs: Option<&[SlabReport]>,
) -> Result<(Vec<History>, Checks), LabError> {
    let diag = &cfg.diagnostics;
    let mut histories = Vec::new();
    for p in &diag.p {
        let h = norm_history(trace, p.0).map_err(|e| LabError::Config(e.to_string()))?;
        histories.push(History { p: *p, times: h.times, values: h.values });
    }
    let initial = trace.initial().cloned().unwrap_or_else(|| WaveState::zeros(cfg.solver.nx));
    let mut checks = Checks::default();
    if diag.wants(CheckKind::LinfBound) {
        checks.linf_bound = Some(check_linf_bound(trace));
    }
    if diag.wants(CheckKind::Haraux) {
        let bound = linf_bound(&initial);
        let limit = VANISH_REL * energy(&initial);
        let list = diag
            .haraux_weights
            .iter()
            .map(|choice| {
                let weight = choice.weight(bound);
                let report = check_haraux_monotone(trace, |s| weight.eval(s));
                let vanish_limit = (*choice == WeightChoice::PosSquare).then_some(limit);
                let passed = report.passed() && vanish_limit.is_none_or(|l| report.max_value <= l);
                HarauxCheck { weight, report, vanish_limit, passed }
            })
            .collect();
        checks.haraux = Some(list);
    }
    let wants_fit = diag.wants(CheckKind::DecayFit) || diag.wants(CheckKind::RieszThorin);
    let fit = if wants_fit {
        let h2 = norm_history(trace, 2.0).map_err(|e| LabError::Config(e.to_string()))?;
        Some(fit_decay(&h2, diag.window_fraction))
    } else {
        None
    };
    if diag.wants(CheckKind::DecayFit) {
        let check = match &fit {
            Some(Ok(f)) => DecayFitCheck { fit: Some(*f), error: None, passed: true },
            Some(Err(e)) => DecayFitCheck { fit: None, error: Some(e.to_string()), passed: false },
            None => unreachable!("fit computed when requested"),
        };
        checks.decay_fit = Some(check);
    }
    if diag.wants(CheckKind::RieszThorin) {
        let check = match &fit {
            Some(Ok(f)) => {
                let reports = diag
                    .riesz_thorin_p
                    .iter()
                    .map(|p| riesz_thorin_check(trace, f, LINF_OPERATOR_BOUND, p.0))
                    .collect::<Result<Vec<_>, _>>();
                match reports {
                    Ok(reports) => {
                        let passed = reports.iter().all(|r| r.passed());
                        RieszThorinCheck { reports, error: None, passed }
                    }
                    Err(e) => RieszThorinCheck { reports: Vec::new(), error: Some(e.to_string()), passed: false },
                }
            }
            Some(Err(e)) => RieszThorinCheck {
                reports: Vec::new(),
                error: Some(format!("no p = 2 fit: {e}")),
                passed: false,
            },
            None => unreachable!("fit computed when requested"),
        };
        checks.riesz_thorin = Some(check);
    }
    if diag.wants(CheckKind::Picard) && which == SolverName::Characteristics {
        let c = &cfg.solver.characteristics;
        checks.picard = Some(picard_check(slabs.unwrap_or(&[]), c.contraction_budget, c.tol_fixed_point));
    }
    Ok((histories, checks))
}

fn run_series(run: &SolverRun, trace: &Trace) -> Vec<Series> {
    let tag = run.solver.label();
    let mut out: Vec<Series> = run
        .histories
        .iter()
        .map(|h| Series::xy(format!("{tag}_hp_{}", h.p.label()), &h.times, &h.values))
        .collect();
    if let Some(list) = &run.checks.haraux {
        for (c, choice) in list.iter().zip(haraux_labels(&run.checks)) {
            out.push(Series::xy(format!("{tag}_haraux_{choice}"), &trace.times, &c.report.values));
        }
    }
    if let Some(last) = trace.states.last() {
        let n = last.n();
        out.push(Series {
            name: format!("{tag}_final_state"),
            columns: vec!["x", "z", "zt"],
            rows: (0..=n).map(|j| vec![j as f64 / n as f64, last.z[j], last.zt[j]]).collect(),
        });
    }
    out
}

fn haraux_labels(checks: &Checks) -> Vec<&'static str> {
    use dampwave_core::diagnostics::HarauxWeight::*;
    checks
        .haraux
        .iter()
        .flatten()
        .map(|c| match c.weight {
            Square => "square",
            Quartic => "quartic",
            PosSquare { .. } => "pos_square",
        })
        .collect()
}

/// Validates the damping before a simulation; violations need `--force`.
/// The undamped reference `σ ≡ 0` is always accepted.
fn guard_damping(problem: &Problem, cfg: &RunConfig, opts: &Options) -> Result<damping::ValidationReport, LabError> {
    let radius = cfg.validation.radius.unwrap_or_else(|| problem.argument_radius().max(1.0));
    let report = damping::validate_damping(&problem.spec, radius, cfg.validation.samples)
        .map_err(|e| LabError::Config(e.to_string()))?;
    if !report.all_pass() && !opts.force && !problem.spec.is_zero() {
        return Err(LabError::Config(
            "damping violates the defining conditions; pass --force to simulate anyway".into(),
        ));
    }
    Ok(report)
}

pub fn simulate(cfg: &RunConfig, opts: &Options) -> Result<Outcome, LabError> {
    let start = Instant::now();
    let seed = opts.seed.unwrap_or(cfg.seed);
    let problem = Problem::build(cfg, cfg.solver.nx)?;
    let validation = guard_damping(&problem, cfg, opts)?;
    let which = solvers_for(cfg.solver.kind);
    let outputs: Vec<_> = which
        .par_iter()
        .map(|w| -> Result<_, LabError> {
            let t0 = Instant::now();
            let (trace, slabs) = run_solver(*w, &problem, &cfg.solver)?;
            let (histories, checks) = diagnose(cfg, *w, &trace, slabs.as_deref())?;
            let kept = (cfg.diagnostics.trace_stride > 0).then(|| trace.thinned(cfg.diagnostics.trace_stride));
            let run = SolverRun {
                solver: *w,
                wall_time_s: t0.elapsed().as_secs_f64(),
                trace: kept,
                final_time: trace.times.last().copied().unwrap_or(0.0),
                histories,
                checks,
            };
            let series = run_series(&run, &trace);
            Ok((run, series))
        })
        .collect::<Result<_, _>>()?;
    let mut result = empty_result("simulate", cfg, seed);
    result.damping_validation = Some(validation);
    let mut series = Vec::new();
    for (run, s) in outputs {
        result.runs.push(run);
        series.extend(s);
    }
    result.passed = result.runs.iter().all(|r| r.checks.passed());
    result.provenance = provenance(seed, start);
    Ok(Outcome { result, series, tables: Vec::new() })
}

pub fn validate(cfg: &RunConfig, opts: &Options) -> Result<Outcome, LabError> {
    let start = Instant::now();
    let seed = opts.seed.unwrap_or(cfg.seed);
    let problem = Problem::build(cfg, cfg.solver.nx)?;
    let radius = cfg.validation.radius.unwrap_or_else(|| problem.argument_radius().max(1.0));
    let report = damping::validate_damping(&problem.spec, radius, cfg.validation.samples)
        .map_err(|e| LabError::Config(e.to_string()))?;
    let mut result = empty_result("validate-damping", cfg, seed);
    result.passed = report.all_pass();
    let series = vec![Series {
        name: "sign_violations".into(),
        columns: vec!["s", "sigma"],
        rows: report.sign_violation_samples.iter().map(|(s, v)| vec![*s, *v]).collect(),
    }];
    result.damping_validation = Some(report);
    result.provenance = provenance(seed, start);
    Ok(Outcome { result, series, tables: Vec::new() })
}

/// `(∫(Δz)² + (Δz_t)²)^{1/2}` and `max(|Δz|, |Δz_t|)` on a shared grid.
pub fn state_distance(a: &WaveState, b: &WaveState) -> (f64, f64) {
    let dz: Vec<f64> = a.z.iter().zip(&b.z).map(|(x, y)| x - y).collect();
    let dzt: Vec<f64> = a.zt.iter().zip(&b.zt).map(|(x, y)| x - y).collect();
    let (l2z, l2t) = (lp_norm(&dz, 2.0), lp_norm(&dzt, 2.0));
    let linf = lp_norm(&dz, f64::INFINITY).max(lp_norm(&dzt, f64::INFINITY));
    ((l2z * l2z + l2t * l2t).sqrt(), linf)
}

/// Distances at the times both traces share.
pub fn trace_distances(a: &Trace, b: &Trace) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let (mut times, mut l2, mut linf) = (Vec::new(), Vec::new(), Vec::new());
    for (t, s) in a.times.iter().zip(&a.states) {
        if let Some(o) = b.state_at(*t, 1e-9) {
            let (d2, di) = state_distance(s, o);
            times.push(*t);
            l2.push(d2);
            linf.push(di);
        }
    }
    (times, l2, linf)
}

pub fn compare(cfg: &RunConfig, opts: &Options) -> Result<Outcome, LabError> {
    let start = Instant::now();
    let seed = opts.seed.unwrap_or(cfg.seed);
    let base = cfg.solver.nx;
    let mut grids = cfg.compare.nx_ladder.clone();
    if !grids.contains(&base) {
        grids.push(base);
    }
    grids.sort_unstable();
    grids.dedup();
    Problem::build(cfg, base).and_then(|p| guard_damping(&p, cfg, opts))?;
    let runs: Vec<(usize, Trace, Trace)> = grids
        .par_iter()
        .map(|&nx| -> Result<_, LabError> {
            let problem = Problem::build(cfg, nx)?;
            let solver = cfg.solver.with_nx(nx);
            let (c, f) = rayon::join(
                || run_solver(SolverName::Characteristics, &problem, &solver),
                || run_solver(SolverName::Fd, &problem, &solver),
            );
            Ok((nx, c?.0, f?.0))
        })
        .collect::<Result<_, _>>()?;
    let t_compare = cfg.solver.horizon;
    let mut convergence: Vec<ConvergenceRow> = Vec::new();
    let mut history = None;
    for (nx, c, f) in &runs {
        if *nx == base {
            history = Some(trace_distances(c, f));
        }
        if cfg.compare.nx_ladder.contains(nx) {
            let (l2, linf) = match (c.states.last(), f.state_at(t_compare, 1e-9)) {
                (Some(a), Some(b)) => state_distance(a, b),
                _ => (f64::NAN, f64::NAN),
            };
            let ratio = convergence.last().map(|prev| prev.l2_distance / l2).filter(|r| r.is_finite());
            convergence.push(ConvergenceRow { nx: *nx, l2_distance: l2, linf_distance: linf, ratio });
        }
    }
    let (times, l2, linf) = history.expect("base grid is always run");
    let passed = cfg.compare.max_distance.is_none_or(|m| linf.last().is_some_and(|d| *d <= m));
    let series = vec![
        Series::xy("distance_l2".into(), &times, &l2),
        Series::xy("distance_linf".into(), &times, &linf),
    ];
    let tables = vec![Series {
        name: "convergence".into(),
        columns: vec!["nx", "l2_distance", "linf_distance"],
        rows: convergence.iter().map(|r| vec![r.nx as f64, r.l2_distance, r.linf_distance]).collect(),
    }];
    let mut result = empty_result("compare-solvers", cfg, seed);
    result.comparison = Some(Comparison {
        nx: base,
        times,
        l2,
        linf,
        t_compare,
        convergence,
        max_distance: cfg.compare.max_distance,
        passed,
    });
    result.passed = passed;
    result.provenance = provenance(seed, start);
    Ok(Outcome { result, series, tables })
}

fn hypothesis(e: dampwave_core::Error) -> LabError {
    use dampwave_core::Error::*;
    match e {
        NotHurwitz { .. }
        | NotDissipative { .. }
        | InvalidSector { .. }
        | NonPositiveSector { .. }
        | NotPositiveDefinite { .. }
        | Singular => LabError::Hypothesis(e),
        other => LabError::Config(other.to_string()),
    }
}

/// Builds the LTV system, with sector bounds from the damping when not given.
pub fn build_ltv(cfg: &RunConfig, ltv_cfg: &LtvConfig) -> Result<(LtvSystem, Option<SectorBounds>), LabError> {
    let (d0, d1, sector) = match (ltv_cfg.d0, ltv_cfg.d1) {
        (Some(d0), Some(d1)) => (d0, d1, None),
        (None, None) => {
            let problem = Problem::build(cfg, cfg.solver.nx)?;
            let a_inf = match ltv_cfg.system {
                LtvSystemConfig::WaveModal { a0, .. } => a0,
                LtvSystemConfig::Matrix { .. } => problem.a.sup_norm(),
            };
            let radius = ltv_cfg.sector_radius.unwrap_or_else(|| linf_bound(&problem.initial()));
            let s = damping::sector_bounds(&problem.spec, radius, a_inf, SECTOR_SAMPLES).map_err(hypothesis)?;
            (s.d0, s.d1, Some(s))
        }
        _ => return Err(LabError::Config("give both ltv.d0 and ltv.d1, or neither".into())),
    };
    let sys = match &ltv_cfg.system {
        LtvSystemConfig::WaveModal { n_modes, a0 } => ltv::wave_modal_system(*n_modes, *a0, d0, d1),
        LtvSystemConfig::Matrix { a, b } => LtvSystem::new(matrix_from_rows(a)?, matrix_from_rows(b)?, d0, d1),
    }
    .map_err(hypothesis)?;
    Ok((sys, sector))
}

pub fn ltv_verify(cfg: &RunConfig, opts: &Options) -> Result<Outcome, LabError> {
    let start = Instant::now();
    let seed = opts.seed.unwrap_or(cfg.seed);
    let lc = cfg.ltv.as_ref().ok_or_else(|| LabError::Config("config has no [ltv] block".into()))?;
    let (sys, sector) = build_ltv(cfg, lc)?;
    let cert = ltv::solve_lyapunov(&sys, lc.c).map_err(hypothesis)?;
    let trials: Vec<(TrialSummary, Option<ltv::Trajectory>)> = (0..lc.trials as u64)
        .into_par_iter()
        .map(|i| -> Result<_, LabError> {
            let (v0, signal) = ltv::trial_inputs(&sys, lc.signal, lc.switch_interval, lc.horizon, seed, i);
            let traj = ltv::simulate_ltv(&sys, |t| signal.eval(t), &v0, lc.horizon, lc.dt)
                .map_err(LabError::Solver)?;
            let rep = ltv::verify_decay(&traj, &cert);
            let summary = TrialSummary {
                index: i,
                max_envelope_ratio: rep.max_envelope_ratio,
                envelope_violations: rep.envelope_violations.len(),
                v_violations: rep.v_violations.len(),
                observed_rate: rep.observed_rate.is_finite().then_some(rep.observed_rate),
            };
            Ok((summary, (i == 0).then_some(traj)))
        })
        .collect::<Result<_, _>>()?;
    let mut series = Vec::new();
    if let Some(traj) = trials.first().and_then(|t| t.1.as_ref()) {
        let stride = lc.record_stride.max(1);
        let n0 = traj.states[0].norm_squared();
        let rows: Vec<Vec<f64>> = traj
            .times
            .iter()
            .zip(&traj.states)
            .step_by(stride)
            .map(|(t, v)| vec![*t, v.norm_squared(), cert.envelope(*t) * n0, cert.lyapunov_value(v)])
            .collect();
        series.push(Series { name: "ltv_trial0".into(), columns: vec!["t", "norm_sq", "envelope", "lyapunov"], rows });
    }
    let trials: Vec<TrialSummary> = trials.into_iter().map(|t| t.0).collect();
    let passed = trials.iter().all(|t| t.envelope_violations == 0 && t.v_violations == 0);
    let n = sys.dim();
    let mut result = empty_result("ltv-verify", cfg, seed);
    result.certificate = Some(CertificateBlock {
        dim: n,
        d0: sys.d0(),
        d1: sys.d1(),
        sector,
        c: cert.c,
        p: (0..n).map(|i| (0..n).map(|j| cert.p[(i, j)]).collect()).collect(),
        m: cert.m,
        p_norm: cert.p_norm,
        b_norm: cert.b_norm,
        envelope_prefactor: cert.envelope_prefactor,
        envelope_rate: cert.envelope_rate,
        residual: cert.residual,
        signal: lc.signal,
        seed,
        trials,
        passed,
    });
    result.passed = passed;
    result.provenance = provenance(seed, start);
    Ok(Outcome { result, series, tables: Vec::new() })
}

pub fn decay_sweep(cfg: &RunConfig, opts: &Options) -> Result<Outcome, LabError> {
    let start = Instant::now();
    let seed = opts.seed.unwrap_or(cfg.seed);
    let sweep = cfg.sweep.as_ref().ok_or_else(|| LabError::Config("config has no [sweep] block".into()))?;
    let base = Problem::build(cfg, cfg.solver.nx)?;
    guard_damping(&base, cfg, opts)?;
    let norm0 = diagnostics::hp_norm(&base.initial(), f64::INFINITY).map_err(|e| LabError::Config(e.to_string()))?;
    if !(norm0 > 0.0) {
        return Err(LabError::Config("sweep needs nonzero initial data".into()));
    }
    let which = match cfg.solver.kind {
        SolverKind::Fd => SolverName::Fd,
        _ => SolverName::Characteristics,
    };
    let rows: Vec<Vec<SweepRow>> = sweep
        .r
        .par_iter()
        .map(|&r| -> Result<_, LabError> {
            let problem = base.scaled(r / norm0);
            let (trace, _) = run_solver(which, &problem, &cfg.solver)?;
            sweep
                .p
                .iter()
                .map(|p| {
                    let h = norm_history(&trace, p.0).map_err(|e| LabError::Config(e.to_string()))?;
                    Ok(match fit_decay(&h, cfg.diagnostics.window_fraction) {
                        Ok(f) => SweepRow {
                            r,
                            p: *p,
                            k: Some(f.k),
                            beta: Some(f.beta),
                            residual: Some(f.residual),
                            error: None,
                        },
                        Err(e) => SweepRow { r, p: *p, k: None, beta: None, residual: None, error: Some(e.to_string()) },
                    })
                })
                .collect()
        })
        .collect::<Result<_, _>>()?;
    let rows: Vec<SweepRow> = rows.into_iter().flatten().collect();
    let nan = f64::NAN;
    let tables = vec![Series {
        name: "sweep".into(),
        columns: vec!["R", "p", "K", "beta", "residual"],
        rows: rows
            .iter()
            .map(|r| vec![r.r, r.p.0, r.k.unwrap_or(nan), r.beta.unwrap_or(nan), r.residual.unwrap_or(nan)])
            .collect(),
    }];
    let mut result = empty_result("decay-sweep", cfg, seed);
    result.passed = rows.iter().all(|r| r.error.is_none());
    result.sweep = Some(rows);
    result.provenance = provenance(seed, start);
    Ok(Outcome { result, series: Vec::new(), tables })
}
