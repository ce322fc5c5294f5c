//! TOML run configuration.

use std::fmt;
use std::path::{Path, PathBuf};

use dampwave_core::charsolver::SlabConfig;
use dampwave_core::diagnostics::HarauxWeight;
use dampwave_core::fdsolver::FdConfig;
use dampwave_core::ltv::SignalKind;
use dampwave_core::{DampingForm, DampingSpec, GridFunction};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::LabError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub problem: ProblemConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub diagnostics: DiagnosticsConfig,
    #[serde(default)]
    pub validation: ValidationConfig,
    #[serde(default)]
    pub compare: CompareConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ltv: Option<LtvConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub seed: u64,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, LabError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| LabError::Config(e.to_string()))?;
        cfg.check()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, LabError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| LabError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// Parses every expression and checks grid consistency.
    pub fn check(&self) -> Result<(), LabError> {
        self.problem.damping.to_spec()?;
        let n = self.solver.nx;
        self.problem.initial_data(n)?;
        self.problem.profile(n)?;
        self.solver.slab_config(self.problem.damping_form)?;
        self.solver.fd_config(self.problem.damping_form)?;
        if self.diagnostics.p.is_empty() {
            return Err(LabError::Config("diagnostics.p must not be empty".into()));
        }
        for p in self.diagnostics.p.iter().chain(&self.diagnostics.riesz_thorin_p) {
            if !(p.0 >= 2.0) {
                return Err(LabError::Config(format!("p = {} outside [2, inf]", p.0)));
            }
        }
        if let Some(sweep) = &self.sweep {
            if sweep.r.iter().any(|r| !(*r > 0.0)) || sweep.r.is_empty() {
                return Err(LabError::Config("sweep.r must list positive radii".into()));
            }
        }
        if let Some(ltv) = &self.ltv {
            if ltv.trials == 0 || !(ltv.dt > 0.0) || !(ltv.horizon > 0.0) || !(ltv.switch_interval > 0.0) {
                return Err(LabError::Config("ltv needs trials ≥ 1 and positive dt, horizon, switch_interval".into()));
            }
            if let LtvSystemConfig::Matrix { a, b } = &ltv.system {
                matrix_from_rows(a)?;
                matrix_from_rows(b)?;
            }
        }
        if self.compare.nx_ladder.iter().any(|n| *n < 4) {
            return Err(LabError::Config("compare.nx_ladder entries must be ≥ 4".into()));
        }
        Ok(())
    }
}

/// A function of `x ∈ [0, 1]`: an expression, a constant or node samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Field {
    Constant(f64),
    Expr(String),
    Table(Vec<f64>),
}

impl Field {
    pub fn expr(s: &str) -> Self {
        Field::Expr(s.to_string())
    }

    pub fn sample(&self, n: usize) -> Result<GridFunction, LabError> {
        let grid = match self {
            Field::Constant(c) => GridFunction::from_fn(n, |_| *c),
            Field::Expr(s) => {
                let expr: meval::Expr = s.parse().map_err(|e| LabError::Config(format!("expression `{s}`: {e}")))?;
                let f = expr.bind("x").map_err(|e| LabError::Config(format!("expression `{s}`: {e}")))?;
                GridFunction::from_fn(n, f)
            }
            Field::Table(v) => GridFunction::new(v.clone())
                .map_err(|e| LabError::Config(format!("sample table: {e}")))?
                .resample(n),
        };
        if grid.values().iter().any(|v| !v.is_finite()) {
            return Err(LabError::Config(format!("{self} is not finite on [0, 1]")));
        }
        Ok(grid)
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Constant(c) => write!(f, "{c}"),
            Field::Expr(s) => write!(f, "`{s}`"),
            Field::Table(v) => write!(f, "table of {} samples", v.len()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DampingConfig {
    LinearGain {
        #[serde(default = "one")]
        slope: f64,
    },
    Saturation,
    SatComposite { c_a: f64, c_b: f64, omega: f64 },
    TabulatedOdd { points: Vec<(f64, f64)> },
}

fn one() -> f64 {
    1.0
}

impl DampingConfig {
    pub fn to_spec(&self) -> Result<DampingSpec, LabError> {
        Ok(match self {
            DampingConfig::LinearGain { slope } => DampingSpec::linear_gain(*slope),
            DampingConfig::Saturation => DampingSpec::saturation(),
            DampingConfig::SatComposite { c_a, c_b, omega } => DampingSpec::sat_composite(*c_a, *c_b, *omega),
            DampingConfig::TabulatedOdd { points } => {
                DampingSpec::tabulated(points.clone()).map_err(|e| LabError::Config(e.to_string()))?
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProblemConfig {
    pub z0: Field,
    pub z1: Field,
    pub a: Field,
    pub damping: DampingConfig,
    pub damping_form: DampingForm,
}

impl Default for ProblemConfig {
    fn default() -> Self {
        Self {
            z0: Field::expr("sin(pi*x)"),
            z1: Field::Constant(0.0),
            a: Field::Constant(1.0),
            damping: DampingConfig::Saturation,
            damping_form: DampingForm::SqrtA,
        }
    }
}

impl ProblemConfig {
    /// `(z0, z1)` on `n` cells, checked to vanish at both ends.
    pub fn initial_data(&self, n: usize) -> Result<(GridFunction, GridFunction), LabError> {
        let mut z0 = self.z0.sample(n)?;
        let mut z1 = self.z1.sample(n)?;
        for (name, g) in [("z0", &z0), ("z1", &z1)] {
            let v = g.values();
            let scale = g.sup_norm().max(1.0);
            if v[0].abs() > 1e-12 * scale || v[n].abs() > 1e-12 * scale {
                return Err(LabError::Config(format!("{name} must vanish at x = 0 and x = 1")));
            }
        }
        z0.pin_boundary();
        z1.pin_boundary();
        Ok((z0, z1))
    }

    pub fn profile(&self, n: usize) -> Result<GridFunction, LabError> {
        let a = self.a.sample(n)?;
        if a.values().iter().any(|v| *v < 0.0) {
            return Err(LabError::Config("damping profile a must be nonnegative".into()));
        }
        Ok(a)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverKind {
    Characteristics,
    Fd,
    Both,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CharParams {
    pub t_slab: f64,
    pub contraction_budget: f64,
    pub tol_fixed_point: f64,
    pub max_picard_iters: usize,
}

impl Default for CharParams {
    fn default() -> Self {
        let d = SlabConfig::default();
        Self {
            t_slab: d.t_slab,
            contraction_budget: d.contraction_budget,
            tol_fixed_point: d.tol_fixed_point,
            max_picard_iters: d.max_picard_iters,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FdParams {
    pub cfl: f64,
}

impl Default for FdParams {
    fn default() -> Self {
        Self { cfl: FdConfig::default().cfl }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub kind: SolverKind,
    pub horizon: f64,
    /// Cells of the shared grid.
    pub nx: usize,
    /// Spacing of emitted states; `output_dt·nx` must be an integer.
    pub output_dt: f64,
    pub characteristics: CharParams,
    pub fd: FdParams,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            kind: SolverKind::Characteristics,
            horizon: 2.0,
            nx: 512,
            output_dt: 1.0 / 64.0,
            characteristics: CharParams::default(),
            fd: FdParams::default(),
        }
    }
}

impl SolverConfig {
    pub fn with_nx(&self, nx: usize) -> Self {
        Self { nx, ..self.clone() }
    }

    fn output_steps(&self) -> Result<usize, LabError> {
        let steps = self.output_dt * self.nx as f64;
        let rounded = steps.round();
        if !(rounded >= 1.0) || (steps - rounded).abs() > 1e-9 {
            return Err(LabError::Config(format!(
                "solver.output_dt·nx = {steps} must be a positive integer"
            )));
        }
        Ok(rounded as usize)
    }

    pub fn slab_config(&self, form: DampingForm) -> Result<SlabConfig, LabError> {
        if !(self.horizon > 0.0) {
            return Err(LabError::Config("solver.horizon must be positive".into()));
        }
        let stride = self.output_steps()?;
        let c = &self.characteristics;
        let slab_steps = (c.t_slab * self.nx as f64).round() as usize;
        if !slab_steps.is_multiple_of(stride) || slab_steps == 0 {
            return Err(LabError::Config(
                "characteristics.t_slab must be a multiple of solver.output_dt".into(),
            ));
        }
        let cfg = SlabConfig {
            t_slab: c.t_slab,
            contraction_budget: c.contraction_budget,
            tol_fixed_point: c.tol_fixed_point,
            max_picard_iters: c.max_picard_iters,
            nx: self.nx,
            nt_per_slab: slab_steps / stride,
            damping_form: form,
        };
        cfg.validate().map_err(|e| LabError::Config(e.to_string()))?;
        Ok(cfg)
    }

    pub fn fd_config(&self, form: DampingForm) -> Result<FdConfig, LabError> {
        self.output_steps()?;
        if !(self.fd.cfl > 0.0 && self.fd.cfl <= 1.0) {
            return Err(LabError::Config("fd.cfl must lie in (0, 1]".into()));
        }
        Ok(FdConfig {
            nx: self.nx,
            cfl: self.fd.cfl,
            horizon: self.horizon,
            damping_form: form,
            output_dt: self.output_dt,
        })
    }
}

/// An exponent in `[2, ∞]`; `∞` is written `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PValue(pub f64);

impl PValue {
    pub const INF: PValue = PValue(f64::INFINITY);

    pub fn label(&self) -> String {
        if self.0.is_infinite() {
            "inf".into()
        } else {
            format!("{}", self.0)
        }
    }
}

impl Serialize for PValue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for PValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Int(i64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(PValue(v)),
            Raw::Int(v) => Ok(PValue(v as f64)),
            Raw::Str(s) if matches!(s.as_str(), "inf" | "infinity" | "∞") => Ok(PValue::INF),
            Raw::Str(s) => Err(serde::de::Error::custom(format!("bad exponent `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    LinfBound,
    Haraux,
    DecayFit,
    RieszThorin,
    Picard,
}

/// Haraux weights; `pos_square` takes its bound from the initial data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightChoice {
    Square,
    Quartic,
    PosSquare,
}

impl WeightChoice {
    pub fn weight(self, bound: f64) -> HarauxWeight {
        match self {
            WeightChoice::Square => HarauxWeight::Square,
            WeightChoice::Quartic => HarauxWeight::Quartic,
            WeightChoice::PosSquare => HarauxWeight::PosSquare { bound },
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            WeightChoice::Square => "square",
            WeightChoice::Quartic => "quartic",
            WeightChoice::PosSquare => "pos_square",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DiagnosticsConfig {
    /// Exponents of the exported norm histories.
    pub p: Vec<PValue>,
    pub checks: Vec<CheckKind>,
    pub haraux_weights: Vec<WeightChoice>,
    pub riesz_thorin_p: Vec<PValue>,
    pub window_fraction: f64,
    /// Keep every `trace_stride`-th state in the JSON result; 0 omits the trace.
    pub trace_stride: usize,
}

impl Default for DiagnosticsConfig {
    fn default() -> Self {
        Self {
            p: vec![PValue(2.0), PValue::INF],
            checks: vec![
                CheckKind::LinfBound,
                CheckKind::Haraux,
                CheckKind::DecayFit,
                CheckKind::RieszThorin,
                CheckKind::Picard,
            ],
            haraux_weights: vec![WeightChoice::Square, WeightChoice::Quartic, WeightChoice::PosSquare],
            riesz_thorin_p: vec![PValue(3.0), PValue(4.0), PValue(8.0)],
            window_fraction: 0.25,
            trace_stride: 0,
        }
    }
}

impl DiagnosticsConfig {
    pub fn wants(&self, check: CheckKind) -> bool {
        self.checks.contains(&check)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ValidationConfig {
    /// Half-width of the sampled interval; derived from the initial data when absent.
    pub radius: Option<f64>,
    pub samples: usize,
}

impl Default for ValidationConfig {
    fn default() -> Self {
        Self { radius: None, samples: 100_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CompareConfig {
    pub nx_ladder: Vec<usize>,
    /// Fail when the final `L∞` distance at the base grid exceeds this.
    pub max_distance: Option<f64>,
}

impl Default for CompareConfig {
    fn default() -> Self {
        Self { nx_ladder: vec![512, 1024, 2048], max_distance: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum LtvSystemConfig {
    WaveModal {
        n_modes: usize,
        #[serde(default = "one")]
        a0: f64,
    },
    /// Row-major `A` and `B`.
    Matrix { a: Vec<Vec<f64>>, b: Vec<Vec<f64>> },
}

pub fn matrix_from_rows(rows: &[Vec<f64>]) -> Result<dampwave_core::ltv::DMatrix<f64>, LabError> {
    let nrows = rows.len();
    let ncols = rows.first().map(Vec::len).unwrap_or(0);
    if nrows == 0 || ncols == 0 || rows.iter().any(|r| r.len() != ncols) {
        return Err(LabError::Config("matrices must be nonempty with rows of equal length".into()));
    }
    Ok(dampwave_core::ltv::DMatrix::from_fn(nrows, ncols, |i, j| rows[i][j]))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LtvConfig {
    pub system: LtvSystemConfig,
    /// Sector bounds; when absent they come from the problem's damping.
    #[serde(default)]
    pub d0: Option<f64>,
    #[serde(default)]
    pub d1: Option<f64>,
    /// Amplitude `R` for the sector scan; derived from the initial data when absent.
    #[serde(default)]
    pub sector_radius: Option<f64>,
    #[serde(default = "one")]
    pub c: f64,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default = "default_ltv_horizon")]
    pub horizon: f64,
    #[serde(default = "default_ltv_dt")]
    pub dt: f64,
    #[serde(default = "default_signal")]
    pub signal: SignalKind,
    #[serde(default = "default_switch")]
    pub switch_interval: f64,
    /// Samples kept when exporting the first trial.
    #[serde(default = "default_record_stride")]
    pub record_stride: usize,
}

fn default_trials() -> usize {
    100
}
fn default_ltv_horizon() -> f64 {
    30.0
}
fn default_ltv_dt() -> f64 {
    1e-3
}
fn default_signal() -> SignalKind {
    SignalKind::RandomBangBang
}
fn default_switch() -> f64 {
    0.1
}
fn default_record_stride() -> usize {
    100
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// Initial data is rescaled so that `‖(z0, z1)‖_{H∞} = R`.
    pub r: Vec<f64>,
    #[serde(default = "default_sweep_p")]
    pub p: Vec<PValue>,
}

fn default_sweep_p() -> Vec<PValue> {
    vec![PValue(2.0)]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
    Dat,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub formats: Vec<Format>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: PathBuf::from("out"), formats: vec![Format::Json, Format::Csv, Format::Dat] }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_uses_defaults() {
        let cfg = RunConfig::from_toml("").unwrap();
        assert_eq!(cfg.solver.nx, 512);
        assert_eq!(cfg.diagnostics.p, vec![PValue(2.0), PValue::INF]);
    }

    #[test]
    fn parses_full_problem() {
        let cfg = RunConfig::from_toml(
            r#"
            seed = 4
            [problem]
            z0 = "0.5*sin(pi*x)/pi"
            z1 = [0.0, 0.25, 0.0]
            a = "1 + 0.5*exp(-((x-0.5)/0.1)^2)"
            damping = { kind = "linear_gain", slope = 2.0 }
            damping_form = "a_inside"
            [diagnostics]
            p = [2, 4, "inf"]
            "#,
        )
        .unwrap();
        assert_eq!(cfg.diagnostics.p, vec![PValue(2.0), PValue(4.0), PValue::INF]);
        assert_eq!(cfg.problem.damping_form, DampingForm::AInside);
        let (_, z1) = cfg.problem.initial_data(4).unwrap();
        assert_eq!(z1.values(), &[0.0, 0.125, 0.25, 0.125, 0.0]);
    }

    #[test]
    fn rejects_bad_inputs() {
        let bad = [
            "[problem]\nz0 = \"sin(pi*y)\"",
            "[problem]\nz0 = \"x\"",
            "[problem]\na = \"x - 0.5\"",
            "[problem]\ndamping = { kind = \"tabulated_odd\", points = [[0.0, 0.1], [1.0, 1.0]] }",
            "[diagnostics]\np = [1.5]",
            "[solver]\noutput_dt = 0.003",
            "[solver]\nbogus = 1",
        ];
        for text in bad {
            assert!(matches!(RunConfig::from_toml(text), Err(LabError::Config(_))), "{text}");
        }
    }

    #[test]
    fn slab_config_matches_output_spacing() {
        let s = SolverConfig { nx: 1024, ..SolverConfig::default() };
        let c = s.slab_config(DampingForm::SqrtA).unwrap();
        assert_eq!(c.emit_stride(), 16);
    }
}
