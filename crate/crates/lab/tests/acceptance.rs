//! Acceptance suite: one pass/fail line per criterion, nonzero exit on failure.
//!
//! Oracles are closed forms (free wave, modal eigenvalues, hand-solved
//! scalar Lyapunov equation) or properties of the runs themselves.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use dampwave::pipeline::{self, state_distance, Options, Problem};
use dampwave::result::{SolverName, SolverRun};
use dampwave::RunConfig;
use dampwave_core::damping::{validate_damping, DampingSpec};
use dampwave_core::diagnostics::{fit_decay, norm_history};
use dampwave_core::ltv::{solve_lyapunov, DMatrix, LtvSystem};
use rayon::prelude::*;

struct Verdict {
    id: u32,
    name: &'static str,
    passed: bool,
    detail: String,
}

fn cfg(text: &str) -> RunConfig {
    RunConfig::from_toml(text).unwrap_or_else(|e| panic!("acceptance config: {e}\n{text}"))
}

fn free_wave() -> Verdict {
    let start = Instant::now();
    let c = cfg(r#"
        [problem]
        z0 = "sin(pi*x)"
        damping = { kind = "linear_gain", slope = 0.0 }
        [solver]
        horizon = 2.0
        nx = 512
    "#);
    let problem = Problem::build(&c, 512).unwrap();
    let mut errs = [0.0f64; 2];
    for (k, which) in [SolverName::Fd, SolverName::Characteristics].into_iter().enumerate() {
        let (trace, _) = pipeline::run_solver(which, &problem, &c.solver).unwrap();
        for (t, s) in trace.times.iter().zip(&trace.states) {
            for (j, z) in s.z.iter().enumerate() {
                let x = j as f64 / 512.0;
                errs[k] = errs[k].max((z - (PI * x).sin() * (PI * t).cos()).abs());
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    Verdict {
        id: 1,
        name: "free-wave exactness",
        passed: errs[0] <= 1e-2 && errs[1] <= 5e-3 && secs < 5.0,
        detail: format!("fd L∞ {:.2e} (≤ 1e-2), characteristics L∞ {:.2e} (≤ 5e-3), {secs:.2} s (< 5 s)", errs[0], errs[1]),
    }
}

/// Twelve sine configurations plus two with nonzero velocity, horizon 20.
fn suite_configs() -> Vec<(String, RunConfig)> {
    let mut out = Vec::new();
    let dampings = [("saturation", r#"{ kind = "saturation" }"#), ("linear", r#"{ kind = "linear_gain", slope = 1.0 }"#)];
    let profiles = [("a=1", "1"), ("bump", "\"2*exp(-((x-0.5)/0.2)^2)\"")];
    for (dn, d) in dampings {
        for (an, a) in profiles {
            for r in [0.5, 1.0, 2.0] {
                let text = format!(
                    "[problem]\nz0 = \"{r}/pi*sin(pi*x)\"\nz1 = 0\na = {a}\ndamping = {d}\n[solver]\nkind = \"both\"\nhorizon = 20.0\n[diagnostics]\np = [2, 3, 4, 8, \"inf\"]\n"
                );
                out.push((format!("{dn} {an} R={r}"), cfg(&text)));
            }
        }
    }
    for (dn, d) in dampings {
        let text = format!(
            "[problem]\nz0 = \"0.5/pi*sin(pi*x)\"\nz1 = \"0.75*sin(pi*x) - 0.25*sin(2*pi*x)\"\na = \"2*exp(-((x-0.5)/0.2)^2)\"\ndamping = {d}\n[solver]\nkind = \"both\"\nhorizon = 20.0\n[diagnostics]\np = [2, 3, 4, 8, \"inf\"]\n"
        );
        out.push((format!("{dn} bump mixed"), cfg(&text)));
    }
    out
}

fn suite_checks(runs: &[(String, Vec<SolverRun>)]) -> Vec<Verdict> {
    let mut linf = (true, 0.0f64, Vec::new());
    let mut haraux = (true, 0.0f64, 0.0f64, Vec::new());
    let mut rt = (true, 0.0f64, Vec::new());
    let mut picard = (true, 0.0f64, 0usize, 0usize);
    for (name, list) in runs {
        for run in list {
            let tag = format!("{name} [{}]", run.solver.label());
            let c = &run.checks;
            let l = c.linf_bound.as_ref().expect("linf check requested");
            linf.1 = linf.1.max(l.max_norm / l.bound);
            if !l.passed() {
                linf.0 = false;
                linf.2.push(tag.clone());
            }
            for h in c.haraux.as_ref().expect("haraux check requested") {
                match h.vanish_limit {
                    Some(limit) => haraux.2 = haraux.2.max(h.report.max_value / limit),
                    None => {
                        let growth = h.report.values.windows(2).map(|w| w[1] - w[0]).fold(f64::MIN, f64::max);
                        haraux.1 = haraux.1.max(growth / h.report.values[0]);
                    }
                }
                if !h.passed {
                    haraux.0 = false;
                    haraux.3.push(format!("{tag} {:?}", h.weight));
                }
            }
            let r = c.riesz_thorin.as_ref().expect("riesz-thorin check requested");
            for rep in &r.reports {
                rt.1 = rt.1.max(rep.max_ratio);
            }
            if !r.passed || r.reports.len() != 3 {
                rt.0 = false;
                rt.2.push(format!("{tag} {:?}", r.error));
            }
            if let Some(p) = &c.picard {
                picard.0 &= p.passed;
                picard.1 = picard.1.max(p.max_ratio);
                picard.2 = picard.2.max(p.max_iterations);
                picard.3 += p.slabs.len();
            }
        }
    }
    let n = runs.len();
    vec![
        Verdict {
            id: 2,
            name: "H∞ a-priori bound",
            passed: linf.0 && n >= 10,
            detail: format!("{n} configs × 2 solvers, max ‖·‖_H∞ / bound = {:.4} (≤ 1.02) {:?}", linf.1, linf.2),
        },
        Verdict {
            id: 3,
            name: "Haraux monotonicity",
            passed: haraux.0,
            detail: format!(
                "largest relative step growth {:.2e} (≤ 1e-3), pos_square max / (1e-6·E0) = {:.2e} (≤ 1) {:?}",
                haraux.1, haraux.2, haraux.3
            ),
        },
        Verdict {
            id: 5,
            name: "interpolated H_p envelope",
            passed: rt.0,
            detail: format!("p ∈ {{3, 4, 8}} on all runs, max ‖·‖_Hp / envelope = {:.4} (≤ 1.05) {:?}", rt.1, rt.2),
        },
        Verdict {
            id: 6,
            name: "Picard contraction",
            passed: picard.0 && picard.3 > 0,
            detail: format!(
                "{} slabs, max ratio {:.3} (≤ 0.6), max iterations {} (≤ 35)",
                picard.3, picard.1, picard.2
            ),
        },
    ]
}

fn linear_rate() -> Verdict {
    let start = Instant::now();
    let c = cfg(r#"
        [problem]
        z0 = "sin(pi*x)"
        damping = { kind = "linear_gain", slope = 1.0 }
        [solver]
        horizon = 20.0
    "#);
    let problem = Problem::build(&c, 512).unwrap();
    let (trace, _) = pipeline::run_solver(SolverName::Characteristics, &problem, &c.solver).unwrap();
    let fit = fit_decay(&norm_history(&trace, 2.0).unwrap(), 0.25).unwrap();
    let secs = start.elapsed().as_secs_f64();
    Verdict {
        id: 4,
        name: "linear decay rate",
        passed: (fit.beta - 0.5).abs() <= 0.05 && secs < 30.0,
        detail: format!("β = {:.4} (0.5 ± 10%), K = {:.3}, {secs:.2} s (< 30 s)", fit.beta, fit.k),
    }
}

fn cross_validation() -> Verdict {
    let c = cfg(r#"
        [problem]
        z0 = "sin(pi*x)"
        damping = { kind = "saturation" }
        [solver]
        horizon = 5.0
    "#);
    let dists: Vec<f64> = [512usize, 1024, 2048]
        .par_iter()
        .map(|&nx| {
            let problem = Problem::build(&c, nx).unwrap();
            let solver = c.solver.with_nx(nx);
            let (a, _) = pipeline::run_solver(SolverName::Characteristics, &problem, &solver).unwrap();
            let (b, _) = pipeline::run_solver(SolverName::Fd, &problem, &solver).unwrap();
            state_distance(a.state_at(5.0, 1e-9).unwrap(), b.state_at(5.0, 1e-9).unwrap()).0
        })
        .collect();
    let ratios = [dists[0] / dists[1], dists[1] / dists[2]];
    Verdict {
        id: 7,
        name: "solver cross-validation",
        passed: ratios.iter().all(|r| (1.4..=2.6).contains(r)),
        detail: format!(
            "L² distance at t = 5: {:.3e}, {:.3e}, {:.3e}; ratios {:.3}, {:.3} (2 ± 30%)",
            dists[0], dists[1], dists[2], ratios[0], ratios[1]
        ),
    }
}

fn certificate() -> Verdict {
    let sys = LtvSystem::new(DMatrix::zeros(1, 1), DMatrix::from_element(1, 1, 1.0), 1.0, 2.0).unwrap();
    let cert = solve_lyapunov(&sys, 1.0).unwrap();
    let exact = (cert.p[(0, 0)] - 0.5).abs() <= 1e-12
        && (cert.m - 1.0).abs() <= 1e-12
        && (cert.envelope_rate - 2.0 / 3.0).abs() <= 1e-12;

    let start = Instant::now();
    let c = cfg(r#"
        seed = 2024
        [ltv]
        system = { kind = "wave_modal", n_modes = 5, a0 = 1.0 }
        d0 = 0.5
        d1 = 1.0
        trials = 100
        horizon = 30.0
        dt = 1e-3
        signal = "random_bang_bang"
        switch_interval = 0.1
    "#);
    let out = pipeline::ltv_verify(&c, &Options::default()).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let block = out.result.certificate.expect("certificate block");
    let env: usize = block.trials.iter().map(|t| t.envelope_violations).sum();
    let v: usize = block.trials.iter().map(|t| t.v_violations).sum();
    let worst = block.trials.iter().map(|t| t.max_envelope_ratio).fold(0.0, f64::max);
    Verdict {
        id: 8,
        name: "LTV certificate",
        passed: exact && block.trials.len() == 100 && env == 0 && v == 0 && secs < 10.0,
        detail: format!(
            "scalar P = {}, M = {}, rate = {} (exact: {exact}); modal(5): {} trials, {env} envelope / {v} V violations, max ratio {worst:.3}, {secs:.2} s (< 10 s)",
            cert.p[(0, 0)], cert.m, cert.envelope_rate, block.trials.len()
        ),
    }
}

fn validator() -> Verdict {
    let bad = validate_damping(&DampingSpec::sat_composite(0.25, 1.0 / 30.0, 10.0), 2.0 * PI, 100_000).unwrap();
    let near_zero = bad.sign_violation_samples.iter().filter(|(s, _)| *s > 0.0 && *s < 0.2).count();
    let good = validate_damping(&DampingSpec::saturation(), 2.0 * PI, 100_000).unwrap();
    Verdict {
        id: 9,
        name: "damping validator",
        passed: !bad.sign_condition_holds && near_zero >= 1 && good.all_pass(),
        detail: format!(
            "nonmonotone example: {} sign violations, {near_zero} in (0, 0.2); saturation passes all: {}",
            bad.sign_violation_samples.len(),
            good.all_pass()
        ),
    }
}

fn main() -> ExitCode {
    let mut verdicts = vec![free_wave(), linear_rate(), certificate(), validator()];
    let opts = Options::default();
    let runs: Vec<(String, Vec<SolverRun>)> = suite_configs()
        .into_par_iter()
        .map(|(name, c)| {
            let out = pipeline::simulate(&c, &opts).unwrap_or_else(|e| panic!("{name}: {e}"));
            (name, out.result.runs)
        })
        .collect();
    verdicts.extend(suite_checks(&runs));
    verdicts.push(cross_validation());
    verdicts.sort_by_key(|v| v.id);
    let mut failed = 0;
    for v in &verdicts {
        let tag = if v.passed { "PASS" } else { "FAIL" };
        println!("[{tag}] criterion {} {}: {}", v.id, v.name, v.detail);
        failed += usize::from(!v.passed);
    }
    println!("acceptance: {} passed, {failed} failed", verdicts.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
