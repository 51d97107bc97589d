//! JSON-configured batch experiments: validation, dispatch and report
//! persistence (`report.json`, `table.csv`, `manifest.json`).

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use num_complex::Complex;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::analytic::{self, BoundaryModulus, PowerMode};
use crate::engine::{self, CertificateProblem, DecayConfig, Regime, Smoothness, SolverConfig, Support};
use crate::fourier::{FourierSeries, SpaceIndex};
use crate::geometry::{self, ArcUnion, CantorSpec, CarlesonConfig, LogGrid};
use crate::Error;

pub const REPORT_FILE: &str = "report.json";
pub const TABLE_FILE: &str = "table.csv";
pub const MANIFEST_FILE: &str = "manifest.json";

/// Default Cantor depth when a set preset omits it.
pub const DEFAULT_DEPTH: usize = 10;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("numerical failure: {message}")]
    Numerical { message: String, manifest: Option<Box<RunManifest>> },
    #[error("i/o failure: {0}")]
    Io(String),
}

impl RunError {
    /// Process exit code: 2 for configuration errors, 3 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            _ => 3,
        }
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Io(e.to_string())
    }
}

fn config_err(e: impl std::fmt::Display) -> RunError {
    RunError::Config(e.to_string())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Norms,
    Cantor,
    Carleson,
    Outer,
    Douglas,
    Szego,
    Certify,
    Decay,
    KelRatio,
    Classify,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    experiment: ExperimentKind,
    #[serde(default = "empty_object")]
    parameters: Value,
    #[serde(default)]
    output_dir: Option<PathBuf>,
}

fn empty_object() -> Value {
    json!({})
}

/// Closed subset of the circle named in a config.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "snake_case", deny_unknown_fields)]
pub enum SetSpec {
    MiddleThirds {
        #[serde(default = "default_depth")]
        depth: usize,
    },
    NonCarlesonN2 {
        #[serde(default = "default_depth")]
        depth: usize,
    },
    CustomGaps { gaps: Vec<f64> },
    Arcs { arcs: Vec<[f64; 2]> },
}

fn default_depth() -> usize {
    DEFAULT_DEPTH
}

impl SetSpec {
    fn cantor(&self) -> Option<CantorSpec<f64>> {
        match self {
            SetSpec::MiddleThirds { depth } => Some(CantorSpec::middle_thirds(*depth)),
            SetSpec::NonCarlesonN2 { depth } => Some(CantorSpec::non_carleson(*depth)),
            SetSpec::CustomGaps { gaps } => Some(CantorSpec::custom(gaps.clone())),
            SetSpec::Arcs { .. } => None,
        }
    }

    fn validate(&self) -> Result<(), RunError> {
        match self {
            SetSpec::Arcs { arcs } => {
                if arcs.is_empty() {
                    return Err(config_err("arc list is empty"));
                }
                ArcUnion::new(arcs.iter().map(|a| (a[0], a[1]))).map_err(config_err)?;
            }
            _ => {
                let spec = self.cantor().unwrap();
                if spec.depth > 24 {
                    return Err(config_err(format!("depth {} exceeds the supported 24", spec.depth)));
                }
                spec.validate().map_err(config_err)?;
            }
        }
        Ok(())
    }

    pub fn build(&self) -> crate::Result<ArcUnion<f64>> {
        match self {
            SetSpec::Arcs { arcs } => ArcUnion::new(arcs.iter().map(|a| (a[0], a[1]))),
            _ => geometry::cantor_build(&self.cantor().unwrap()),
        }
    }
}

/// Target function named in a config.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "snake_case", deny_unknown_fields)]
pub enum FunctionSpec {
    /// `h_k` truncated so that its `A¹` tail is below `tail_tol`.
    #[serde(rename = "h_k")]
    HK {
        k: u32,
        #[serde(default = "default_tail_tol")]
        tail_tol: f64,
    },
    #[serde(rename = "z_minus_1")]
    ZMinus1,
    /// `exp(−d(·,E)^{−γ})` transformed from a `grid`-point sampling.
    SmoothVanishing {
        set: SetSpec,
        #[serde(default = "one")]
        gamma: f64,
        #[serde(default = "default_grid")]
        grid: usize,
    },
    Custom { coeffs: FourierSeries<f64> },
}

fn default_tail_tol() -> f64 {
    1e-14
}

fn one() -> f64 {
    1.0
}

fn default_grid() -> usize {
    1 << 14
}

impl FunctionSpec {
    fn validate(&self) -> Result<(), RunError> {
        match self {
            FunctionSpec::HK { k, tail_tol } => {
                if *k == 0 || !(*tail_tol > 0.0 && *tail_tol < 1.0) {
                    return Err(config_err("h_k needs k ≥ 1 and 0 < tail_tol < 1"));
                }
            }
            FunctionSpec::SmoothVanishing { set, gamma, grid } => {
                set.validate()?;
                positive("gamma", *gamma)?;
                pow2("grid", *grid)?;
            }
            FunctionSpec::Custom { coeffs } => {
                if coeffs.is_zero() {
                    return Err(config_err("custom function has no coefficients"));
                }
            }
            FunctionSpec::ZMinus1 => {}
        }
        Ok(())
    }

    pub fn build(&self) -> crate::Result<FourierSeries<f64>> {
        Ok(match self {
            FunctionSpec::HK { k, tail_tol } => analytic::h_k(*k, analytic::h_k_degree_for_tail(*k, *tail_tol))?.series,
            FunctionSpec::ZMinus1 => {
                FourierSeries::from_coeffs([(0, Complex::new(-1.0, 0.0)), (1, Complex::new(1.0, 0.0))])
            }
            FunctionSpec::SmoothVanishing { set, gamma, grid } => {
                analytic::smooth_vanishing_function(&set.build()?, *gamma, *grid)?.series
            }
            FunctionSpec::Custom { coeffs } => coeffs.clone(),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceSpec {
    pub p: f64,
    #[serde(default)]
    pub beta: f64,
}

impl SpaceSpec {
    fn build(&self) -> Result<SpaceIndex<f64>, RunError> {
        SpaceIndex::new(self.p, self.beta).map_err(config_err)
    }
}

/// `ε` schedule: an explicit list or `"start:stop:xR"` (geometric, ratio R).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EpsSchedule {
    List(Vec<f64>),
    Range(String),
}

impl EpsSchedule {
    pub fn values(&self) -> Result<Vec<f64>, RunError> {
        let v = match self {
            EpsSchedule::List(v) => v.clone(),
            EpsSchedule::Range(s) => parse_eps_range(s)?,
        };
        if v.is_empty() || v.iter().any(|e| !(*e > 0.0)) {
            return Err(config_err("ε values must be positive"));
        }
        if v.windows(2).any(|w| !(w[1] < w[0])) {
            return Err(config_err("ε schedule must be strictly decreasing"));
        }
        Ok(v)
    }
}

/// Parses `start:stop:xR`, e.g. `1e-1:1e-6:x10`.
pub fn parse_eps_range(s: &str) -> Result<Vec<f64>, RunError> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = || config_err(format!("cannot parse ε range {s:?}; expected start:stop:xR"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let start: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let stop: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let ratio: f64 = parts[2].trim().strip_prefix('x').ok_or_else(bad)?.parse().map_err(|_| bad())?;
    if !(start > 0.0 && stop > 0.0 && stop < start && ratio > 1.0) {
        return Err(bad());
    }
    let steps = ((start / stop).ln() / ratio.ln()).round() as i32;
    Ok((0..=steps).map(|k| start / ratio.powi(k)).collect())
}

fn positive(name: &str, v: f64) -> Result<(), RunError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(config_err(format!("{name} must be positive, got {v}")))
    }
}

fn pow2(name: &str, v: usize) -> Result<(), RunError> {
    if v >= 4 && v.is_power_of_two() && v <= 1 << 22 {
        Ok(())
    } else {
        Err(config_err(format!("{name} must be a power of two in [4, 2^22], got {v}")))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormsParams {
    pub function: FunctionSpec,
    pub spaces: Vec<SpaceSpec>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CantorParams {
    pub set: SetSpec,
    #[serde(default = "default_log_grid")]
    pub covering: LogGrid,
}

fn default_log_grid() -> LogGrid {
    LogGrid::new(1e-5, 0.5, 30)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CarlesonParams {
    pub set: SetSpec,
    #[serde(default = "default_quadrature")]
    pub quadrature_size: usize,
    #[serde(default)]
    pub config: CarlesonConfig,
}

fn default_quadrature() -> usize {
    16
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModulusSpec {
    /// `e^{−M̄_ε}(d^γ + ε)^{−1/2}` or `(d^γ + ε)^{1/2}`.
    Power {
        set: SetSpec,
        mode: PowerMode,
        #[serde(default = "one")]
        gamma: f64,
        eps: f64,
    },
    /// Chordal distance to the set, floored before taking logarithms.
    Distance { set: SetSpec },
    /// Explicit positive samples on the grid.
    Samples { values: Vec<f64> },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OuterParams {
    pub modulus: ModulusSpec,
    #[serde(default = "default_grid")]
    pub grid: usize,
    /// Enforced bound on negative-frequency leakage; `null` only reports it.
    #[serde(default)]
    pub leakage_tol: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DouglasParams {
    pub function: FunctionSpec,
    pub alpha: f64,
    #[serde(default = "default_douglas_grid")]
    pub grid: usize,
    #[serde(default)]
    pub exclusion: Option<f64>,
}

fn default_douglas_grid() -> usize {
    1 << 10
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SzegoParams {
    pub function: FunctionSpec,
    pub space: SpaceSpec,
    pub degrees: Vec<usize>,
    #[serde(default = "default_szego_grid")]
    pub grid: usize,
}

fn default_szego_grid() -> usize {
    1 << 14
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertifyParams {
    pub function: FunctionSpec,
    /// Degree `N_f` at which the target is truncated.
    #[serde(default)]
    pub truncation: Option<usize>,
    pub space: SpaceSpec,
    #[serde(default = "default_support")]
    pub support: Support,
    pub degree_budget: usize,
    pub epsilon_target: f64,
    #[serde(default)]
    pub solver: SolverConfig,
}

fn default_support() -> Support {
    Support::AllIntegers
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecayParams {
    pub set: SetSpec,
    #[serde(default = "one")]
    pub gamma: f64,
    pub space: SpaceSpec,
    pub eps: EpsSchedule,
    #[serde(default = "default_grid")]
    pub grid: usize,
    /// Defaults to `exp(−d(·,E)^{−γ})` on the same grid.
    #[serde(default)]
    pub function: Option<FunctionSpec>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KelParams {
    pub set: SetSpec,
    #[serde(default = "one")]
    pub gamma: f64,
    pub delta_prime: f64,
    pub eps: EpsSchedule,
    #[serde(default = "default_kel_grid")]
    pub grid: usize,
}

fn default_kel_grid() -> usize {
    1 << 11
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassifyParams {
    pub dim_estimate: f64,
    pub space: SpaceSpec,
    #[serde(default = "default_smoothness")]
    pub smoothness: Smoothness,
    #[serde(default)]
    pub log_nonintegrable: bool,
    #[serde(default)]
    pub log_dist_nonintegrable: bool,
}

fn default_smoothness() -> Smoothness {
    Smoothness::CInfty
}

#[derive(Clone, Debug)]
pub enum Parameters {
    Norms(NormsParams),
    Cantor(CantorParams),
    Carleson(CarlesonParams),
    Outer(OuterParams),
    Douglas(DouglasParams),
    Szego(SzegoParams),
    Certify(CertifyParams),
    Decay(DecayParams),
    KelRatio(KelParams),
    Classify(ClassifyParams),
}

/// A validated experiment configuration.
#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub parameters: Parameters,
    pub output_dir: Option<PathBuf>,
    /// The configuration as read, echoed into the manifest.
    pub echo: Value,
}

impl ExperimentConfig {
    pub fn from_json_str(text: &str) -> Result<Self, RunError> {
        let value: Value = serde_json::from_str(text).map_err(config_err)?;
        Self::from_value(value)
    }

    pub fn from_path(path: &Path) -> Result<Self, RunError> {
        let text = fs::read_to_string(path).map_err(|e| config_err(format!("{}: {e}", path.display())))?;
        Self::from_json_str(&text)
    }

    pub fn from_value(value: Value) -> Result<Self, RunError> {
        let raw: RawConfig = serde_json::from_value(value.clone()).map_err(config_err)?;
        fn parse<P: serde::de::DeserializeOwned>(v: Value) -> Result<P, RunError> {
            serde_json::from_value(v).map_err(config_err)
        }
        let p = raw.parameters;
        let parameters = match raw.experiment {
            ExperimentKind::Norms => Parameters::Norms(parse(p)?),
            ExperimentKind::Cantor => Parameters::Cantor(parse(p)?),
            ExperimentKind::Carleson => Parameters::Carleson(parse(p)?),
            ExperimentKind::Outer => Parameters::Outer(parse(p)?),
            ExperimentKind::Douglas => Parameters::Douglas(parse(p)?),
            ExperimentKind::Szego => Parameters::Szego(parse(p)?),
            ExperimentKind::Certify => Parameters::Certify(parse(p)?),
            ExperimentKind::Decay => Parameters::Decay(parse(p)?),
            ExperimentKind::KelRatio => Parameters::KelRatio(parse(p)?),
            ExperimentKind::Classify => Parameters::Classify(parse(p)?),
        };
        let config = Self {
            experiment: raw.experiment,
            parameters,
            output_dir: raw.output_dir,
            echo: value,
        };
        config.validate()?;
        Ok(config)
    }

    /// Checks every numeric parameter against the preconditions of the
    /// dispatched operation.
    pub fn validate(&self) -> Result<(), RunError> {
        match &self.parameters {
            Parameters::Norms(p) => {
                p.function.validate()?;
                if p.spaces.is_empty() {
                    return Err(config_err("no spaces given"));
                }
                for s in &p.spaces {
                    s.build()?;
                }
            }
            Parameters::Cantor(p) => {
                p.set.validate()?;
                let g = &p.covering;
                if !(g.t_min > 0.0 && g.t_max > g.t_min && g.count >= 2) {
                    return Err(config_err("covering grid needs 0 < t_min < t_max and count ≥ 2"));
                }
            }
            Parameters::Carleson(p) => {
                p.set.validate()?;
                if p.quadrature_size < 2 {
                    return Err(config_err("quadrature_size must be at least 2"));
                }
            }
            Parameters::Outer(p) => {
                pow2("grid", p.grid)?;
                if let Some(t) = p.leakage_tol {
                    positive("leakage_tol", t)?;
                }
                match &p.modulus {
                    ModulusSpec::Power { set, gamma, eps, .. } => {
                        set.validate()?;
                        positive("gamma", *gamma)?;
                        positive("eps", *eps)?;
                    }
                    ModulusSpec::Distance { set } => set.validate()?,
                    ModulusSpec::Samples { values } => {
                        if values.len() != p.grid {
                            return Err(config_err("sample count must equal grid"));
                        }
                        if values.iter().any(|v| !(*v > 0.0)) {
                            return Err(config_err("samples must be positive"));
                        }
                    }
                }
            }
            Parameters::Douglas(p) => {
                p.function.validate()?;
                pow2("grid", p.grid)?;
                if !(p.alpha > 0.0 && p.alpha < 1.0) {
                    return Err(config_err("alpha must lie in (0, 1)"));
                }
                if let Some(x) = p.exclusion {
                    positive("exclusion", x)?;
                }
            }
            Parameters::Szego(p) => {
                p.function.validate()?;
                p.space.build()?;
                pow2("grid", p.grid)?;
                if p.degrees.is_empty() {
                    return Err(config_err("no degrees given"));
                }
                if p.space.p <= 1.0 {
                    return Err(config_err("shift infima need p > 1"));
                }
            }
            Parameters::Certify(p) => {
                p.function.validate()?;
                let space = p.space.build()?;
                positive("epsilon_target", p.epsilon_target)?;
                if p.space.p <= 1.0 {
                    return Err(config_err("certificates need p > 1"));
                }
                if space.beta_q() > 1.0 {
                    return Err(config_err("βq > 1: the space has no cyclic vectors"));
                }
            }
            Parameters::Decay(p) => {
                p.set.validate()?;
                positive("gamma", p.gamma)?;
                p.space.build()?;
                p.eps.values()?;
                pow2("grid", p.grid)?;
                if let Some(f) = &p.function {
                    f.validate()?;
                }
            }
            Parameters::KelRatio(p) => {
                p.set.validate()?;
                positive("gamma", p.gamma)?;
                p.eps.values()?;
                pow2("grid", p.grid)?;
                if !(p.delta_prime > 0.5) {
                    return Err(config_err("delta_prime must exceed 1/2"));
                }
                if 2.0 * p.delta_prime - p.gamma - 1.0 < 0.0 {
                    return Err(config_err("need 2·delta_prime − gamma − 1 ≥ 0"));
                }
            }
            Parameters::Classify(p) => {
                p.space.build()?;
                if !(p.space.p > 1.0 && p.space.p <= 2.0) {
                    return Err(config_err("classification needs 1 < p ≤ 2"));
                }
                if !(0.0..=1.0).contains(&p.dim_estimate) {
                    return Err(config_err("dim_estimate must lie in [0, 1]"));
                }
            }
        }
        Ok(())
    }
}

/// Plot-ready table with fixed columns per experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(headers: &[&str]) -> Self {
        Self {
            headers: headers.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    fn write(&self, path: &Path) -> Result<(), RunError> {
        let mut w = csv::Writer::from_path(path).map_err(|e| RunError::Io(e.to_string()))?;
        w.write_record(&self.headers).map_err(|e| RunError::Io(e.to_string()))?;
        for r in &self.rows {
            w.write_record(r).map_err(|e| RunError::Io(e.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }
}

fn num(x: f64) -> String {
    format!("{x}")
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct RunManifest {
    pub config: Value,
    pub artifact_version: String,
    pub wall_clock_seconds: f64,
    pub tolerances: Value,
    pub outputs: Vec<String>,
    pub status: String,
    #[serde(default)]
    pub error: Option<String>,
}

fn tolerances() -> Value {
    let s = SolverConfig::default();
    let d = DecayConfig::default();
    json!({
        "drop_tolerance": crate::fourier::DROP_TOLERANCE,
        "modulus_floor": analytic::MODULUS_FLOOR,
        "leakage_tolerance": analytic::LEAKAGE_TOLERANCE,
        "douglas_weight_rel_tol": analytic::DOUGLAS_WEIGHT_TOL,
        "irls": s,
        "decay": d,
    })
}

/// Runs the experiment and writes its outputs into `output_dir` (or the
/// directory named in the config).
pub fn run(config: &ExperimentConfig, output_dir: Option<&Path>) -> Result<RunManifest, RunError> {
    let dir = output_dir
        .map(Path::to_path_buf)
        .or_else(|| config.output_dir.clone())
        .ok_or_else(|| config_err("no output directory given"))?;
    let start = Instant::now();
    let outcome = dispatch(&config.parameters);
    fs::create_dir_all(&dir)?;
    let mut manifest = RunManifest {
        config: config.echo.clone(),
        artifact_version: env!("CARGO_PKG_VERSION").to_string(),
        wall_clock_seconds: 0.0,
        tolerances: tolerances(),
        outputs: Vec::new(),
        status: "ok".into(),
        error: None,
    };
    match outcome {
        Ok((report, table)) => {
            fs::write(dir.join(REPORT_FILE), serde_json::to_string_pretty(&report).map_err(|e| RunError::Io(e.to_string()))?)?;
            table.write(&dir.join(TABLE_FILE))?;
            manifest.outputs = vec![REPORT_FILE.into(), TABLE_FILE.into(), MANIFEST_FILE.into()];
            manifest.wall_clock_seconds = start.elapsed().as_secs_f64();
            write_manifest(&dir, &manifest)?;
            Ok(manifest)
        }
        Err(e) => {
            manifest.status = "failed".into();
            manifest.error = Some(e.to_string());
            manifest.outputs = vec![MANIFEST_FILE.into()];
            manifest.wall_clock_seconds = start.elapsed().as_secs_f64();
            write_manifest(&dir, &manifest)?;
            Err(RunError::Numerical {
                message: e.to_string(),
                manifest: Some(Box::new(manifest)),
            })
        }
    }
}

fn write_manifest(dir: &Path, m: &RunManifest) -> Result<(), RunError> {
    let text = serde_json::to_string_pretty(m).map_err(|e| RunError::Io(e.to_string()))?;
    fs::write(dir.join(MANIFEST_FILE), text)?;
    Ok(())
}

type Outcome = crate::Result<(Value, Table)>;

fn to_value<S: Serialize>(s: &S) -> Value {
    serde_json::to_value(s).expect("report types serialize")
}

fn dispatch(params: &Parameters) -> Outcome {
    match params {
        Parameters::Norms(p) => run_norms(p),
        Parameters::Cantor(p) => run_cantor(p),
        Parameters::Carleson(p) => run_carleson(p),
        Parameters::Outer(p) => run_outer(p),
        Parameters::Douglas(p) => run_douglas(p),
        Parameters::Szego(p) => run_szego(p),
        Parameters::Certify(p) => run_certify(p),
        Parameters::Decay(p) => run_decay(p),
        Parameters::KelRatio(p) => run_kel(p),
        Parameters::Classify(p) => run_classify(p),
    }
}

fn run_norms(p: &NormsParams) -> Outcome {
    let f = p.function.build()?;
    let one_minus = &FourierSeries::one() - &f;
    let mut table = Table::new(&["p", "beta", "norm", "norm_pow", "dist_to_one", "dist_to_one_pow"]);
    let mut rows = Vec::new();
    for s in &p.spaces {
        let space = SpaceIndex::new(s.p, s.beta)?;
        let n = f.norm(&space);
        let d = one_minus.norm(&space);
        table.push(vec![num(s.p), num(s.beta), num(n), num(n.powf(s.p)), num(d), num(d.powf(s.p))]);
        rows.push(json!({"space": space, "norm": n, "dist_to_one": d}));
    }
    let report = json!({
        "function": p.function,
        "support_len": f.support_len(),
        "degree": f.degree(),
        "rows": rows,
    });
    Ok((report, table))
}

fn run_cantor(p: &CantorParams) -> Outcome {
    let set = p.set.build()?;
    let profile = geometry::covering_profile(&set, &p.covering)?;
    let dimension = geometry::box_dimension_estimate(&set, &p.covering).ok();
    let mut table = Table::new(&["t", "covering_number", "tube_measure", "lower", "upper", "sandwich_ok"]);
    for s in &profile.samples {
        let lower = s.t * s.covering_number as f64;
        let upper = 4.0 * lower;
        let ok = s.tube_measure >= lower * (1.0 - 1e-12) && s.tube_measure <= upper * (1.0 + 1e-12);
        table.push(vec![num(s.t), s.covering_number.to_string(), num(s.tube_measure), num(lower), num(upper), ok.to_string()]);
    }
    let report = json!({
        "set": p.set,
        "arcs": set.len(),
        "measure": set.total_measure(),
        "smallest_arc": set.smallest_arc(),
        "box_dimension": dimension,
        "sandwich_violations": profile.sandwich_violations().len(),
        "covering": p.covering,
    });
    Ok((report, table))
}

fn run_carleson(p: &CarlesonParams) -> Outcome {
    let set = p.set.build()?;
    let r = geometry::carleson_test(&set, p.quadrature_size, &p.config)?;
    let profile = match p.set.cantor() {
        Some(spec) => Some(geometry::interval_sum_profile(&spec)?),
        None => None,
    };
    let mut table = Table::new(&["level", "dyadic_sum", "interval_sum_at_depth"]);
    for (i, s) in r.dyadic_sums.iter().enumerate() {
        let prof = profile.as_ref().and_then(|v| v.get(i)).map(|x| num(*x)).unwrap_or_default();
        table.push(vec![(i + 1).to_string(), num(*s), prof]);
    }
    let report = json!({
        "set": p.set,
        "config": p.config,
        "report": r,
        "interval_sum_profile": profile,
    });
    Ok((report, table))
}

fn run_outer(p: &OuterParams) -> Outcome {
    let g = p.grid;
    let (outer, extra) = match &p.modulus {
        ModulusSpec::Power { set, mode, gamma, eps } => {
            let e = set.build()?;
            let po = analytic::outer_power_modulus(&e, *gamma, *eps, *mode, g, p.leakage_tol)?;
            let extra = json!({"m_eps_grid": po.m_eps_grid, "normalizer": po.normalizer});
            (po.outer, extra)
        }
        ModulusSpec::Distance { set } => {
            let e = set.build()?;
            let m = BoundaryModulus::floored(e.distances_on_grid(g))?;
            (analytic::outer_from_modulus_with(&m, p.leakage_tol)?, json!({"floor": analytic::MODULUS_FLOOR}))
        }
        ModulusSpec::Samples { values } => {
            let m = BoundaryModulus::new(values.clone())?;
            (analytic::outer_from_modulus_with(&m, p.leakage_tol)?, Value::Null)
        }
    };
    let mut table = Table::new(&["theta", "modulus", "re", "im"]);
    let step = std::f64::consts::TAU / g as f64;
    for (j, b) in outer.boundary.iter().enumerate() {
        table.push(vec![num(step * j as f64), num(b.norm()), num(b.re), num(b.im)]);
    }
    let report = json!({"modulus": p.modulus, "outer": outer, "details": extra});
    Ok((report, table))
}

fn run_douglas(p: &DouglasParams) -> Outcome {
    let f = p.function.build()?;
    let samples = crate::fourier::eval_on_grid(&f, p.grid)?;
    let exclusion = p.exclusion.unwrap_or(10.0 / p.grid as f64);
    let r = analytic::douglas_seminorm(&samples, p.alpha, exclusion)?;
    let mut table = Table::new(&["alpha", "coefficient_value", "quadrature_value", "band_correction", "relative_gap"]);
    table.push(vec![num(r.alpha), num(r.coefficient_value), num(r.quadrature_value), num(r.band_correction), num(r.relative_gap)]);
    Ok((json!({"function": p.function, "grid": p.grid, "report": r}), table))
}

fn run_szego(p: &SzegoParams) -> Outcome {
    let f = p.function.build()?;
    let space = SpaceIndex::new(p.space.p, p.space.beta)?;
    let bound = engine::szego_bound(&f, p.grid)?;
    let mut table = Table::new(&["degree", "shift_infimum", "shift_infimum_sq", "szego_bound", "converged"]);
    let mut rows = Vec::new();
    for &d in &p.degrees {
        let s = engine::forward_shift_infimum(&f, &space, d)?;
        table.push(vec![d.to_string(), num(s.value), num(s.value * s.value), num(bound), s.converged.to_string()]);
        rows.push(json!({"degree": d, "value": s.value, "converged": s.converged, "trace": s.trace}));
    }
    Ok((json!({"function": p.function, "space": space, "grid": p.grid, "szego_bound": bound, "rows": rows}), table))
}

fn run_certify(p: &CertifyParams) -> Outcome {
    let full = p.function.build()?;
    let space = SpaceIndex::new(p.space.p, p.space.beta)?;
    let f = match p.truncation {
        Some(n) => full.truncate(n),
        None => full.clone(),
    };
    let tail = (&full - &f).norm(&space);
    let mut problem = CertificateProblem::new(f.clone(), space, p.degree_budget, p.epsilon_target)?;
    problem.support = p.support;
    problem.truncation_tail = tail;
    let r = engine::certify_cyclic_with(&problem, &p.solver)?;
    let (bic, shift) = r.reevaluate(&f, &space);
    let mut table = Table::new(&["degree", "bicyclic_norm", "shift_norm", "bicyclic_converged", "shift_converged"]);
    for s in &r.solver_trace {
        table.push(vec![
            s.degree.to_string(),
            num(s.bicyclic_norm),
            num(s.shift_norm),
            s.bicyclic_converged.to_string(),
            s.shift_converged.to_string(),
        ]);
    }
    let report = json!({
        "function": p.function,
        "space": space,
        "support": p.support,
        "degree_budget": p.degree_budget,
        "epsilon_target": p.epsilon_target,
        "truncation": p.truncation,
        "truncation_tail": tail,
        "verdict": r.verdict,
        "achieved_bicyclic_norm": r.achieved_bicyclic_norm,
        "achieved_shift_norm": r.achieved_shift_norm,
        "reevaluated": [bic, shift],
        "degrees_used": r.degrees_used,
        "szego_lower_bound": r.szego_lower_bound,
        "solver": p.solver,
        "solver_trace": r.solver_trace,
        "p": r.p,
        "q": r.q,
    });
    Ok((report, table))
}

fn run_decay(p: &DecayParams) -> Outcome {
    let set = p.set.build()?;
    let space = SpaceIndex::new(p.space.p, p.space.beta)?;
    let eps = p.eps.values().map_err(|e| Error::InvalidInput(e.to_string()))?;
    let f = match &p.function {
        Some(spec) => spec.build()?,
        None => analytic::smooth_vanishing_function(&set, p.gamma, p.grid)?.series,
    };
    let cfg = DecayConfig {
        grid: p.grid,
        ..DecayConfig::default()
    };
    let r = engine::p_epsilon_decay(&f, &set, p.gamma, &space, &eps, &cfg)?;
    let mut table = Table::new(&["eps", "M_eps", "normalizer", "norm", "ratio", "leakage"]);
    for c in &r.schedule {
        table.push(vec![num(c.eps), num(c.m_eps), num(c.normalizer), num(c.norm), num(c.ratio), num(c.leakage)]);
    }
    let report = json!({
        "set": p.set,
        "gamma": p.gamma,
        "space": space,
        "grid": p.grid,
        "report": r,
    });
    Ok((report, table))
}

fn run_kel(p: &KelParams) -> Outcome {
    let set = p.set.build()?;
    let eps = p.eps.values().map_err(|e| Error::InvalidInput(e.to_string()))?;
    let r = engine::lemma_kel_ratio(&set, p.gamma, p.delta_prime, &eps, p.grid)?;
    let mut table = Table::new(&["eps", "lhs", "M_eps", "ratio"]);
    for c in &r {
        table.push(vec![num(c.eps), num(c.lhs), num(c.m_eps), num(c.ratio)]);
    }
    let report = json!({
        "set": p.set,
        "gamma": p.gamma,
        "delta_prime": p.delta_prime,
        "grid": p.grid,
        "ratios": r,
    });
    Ok((report, table))
}

fn run_classify(p: &ClassifyParams) -> Outcome {
    let space = SpaceIndex::new(p.space.p, p.space.beta)?;
    let verdict: Regime = engine::classify_regime(p.dim_estimate, &space, p.smoothness, p.log_nonintegrable, p.log_dist_nonintegrable)?;
    let q = space.q();
    let mut table = Table::new(&["dim_estimate", "p", "beta", "beta_q", "sufficient_threshold", "necessary_threshold", "verdict"]);
    let verdict_name = to_value(&verdict).as_str().unwrap_or_default().to_string();
    table.push(vec![
        num(p.dim_estimate),
        num(p.space.p),
        num(p.space.beta),
        num(space.beta_q()),
        num(2.0 * (1.0 - space.beta_q()) / q),
        num(1.0 - space.beta_q()),
        verdict_name,
    ]);
    let report = json!({
        "dim_estimate": p.dim_estimate,
        "space": space,
        "smoothness": p.smoothness,
        "log_nonintegrable": p.log_nonintegrable,
        "log_dist_nonintegrable": p.log_dist_nonintegrable,
        "verdict": verdict,
    });
    Ok((report, table))
}

/// One entry of the preset catalogue.
#[derive(Clone, Debug, Serialize)]
pub struct Preset {
    pub name: &'static str,
    pub kind: &'static str,
    pub parameters: &'static str,
    pub description: &'static str,
    /// A configuration using the preset; it validates as is.
    pub example: Value,
}

pub fn list_presets() -> Vec<Preset> {
    vec![
        Preset {
            name: geometry::PRESET_MIDDLE_THIRDS,
            kind: "set",
            parameters: "depth: levels of gap removal (default 10)",
            description: "middle-thirds Cantor set on the circle; level-n gaps 2π/3^n; Carleson",
            example: json!({"experiment": "cantor", "parameters": {"set": {"preset": "middle_thirds", "depth": 8}}}),
        },
        Preset {
            name: geometry::PRESET_NON_CARLESON,
            kind: "set",
            parameters: "depth: levels of gap removal (default 10)",
            description: "Cantor set with level-n gaps c·2^{-n}/n², c fixed so that all gaps remove 2π(1 − 2^{-depth}); not Carleson",
            example: json!({"experiment": "carleson", "parameters": {"set": {"preset": "non_carleson_n2", "depth": 12}}}),
        },
        Preset {
            name: "h_k",
            kind: "function",
            parameters: "k ≥ 1; tail_tol: A¹ bound on the discarded tail (default 1e-14)",
            description: "h_k(z) = (z−1)/(z−1−1/k); ‖1−h_k‖^p_{A^p} = 1/((k+1)^p − k^p)",
            example: json!({"experiment": "norms", "parameters": {"function": {"preset": "h_k", "k": 5}, "spaces": [{"p": 2.0}]}}),
        },
        Preset {
            name: "smooth_vanishing",
            kind: "function",
            parameters: "set: set preset; gamma > 0 (default 1); grid: power of two (default 16384)",
            description: "exp(−d(ζ,E)^{−γ}), a C^∞ function vanishing exactly on E",
            example: json!({"experiment": "douglas", "parameters": {
                "function": {"preset": "smooth_vanishing", "set": {"preset": "middle_thirds", "depth": 4}, "grid": 1024},
                "alpha": 0.3, "grid": 1024}}),
        },
        Preset {
            name: "z_minus_1",
            kind: "function",
            parameters: "none",
            description: "z − 1, a single zero on the circle",
            example: json!({"experiment": "szego", "parameters": {"function": {"preset": "z_minus_1"}, "space": {"p": 2.0}, "degrees": [10, 20]}}),
        },
        Preset {
            name: "eps_geometric",
            kind: "schedule",
            parameters: "\"start:stop:xR\", e.g. \"1e-1:1e-6:x10\", or an explicit decreasing list",
            description: "geometric ε schedule for decay and kel_ratio sweeps",
            example: json!({"experiment": "kel_ratio", "parameters": {
                "set": {"preset": "non_carleson_n2", "depth": 8}, "delta_prime": 1.2, "eps": "1e-1:1e-2:x10", "grid": 1024}}),
        },
    ]
}

/// Parameters accepted by the flag form of `lab run`.
#[derive(Clone, Debug, Default)]
pub struct FlagArgs {
    pub experiment: Option<String>,
    pub preset: Option<String>,
    pub depth: Option<usize>,
    pub gamma: Option<f64>,
    pub p: Option<f64>,
    pub beta: Option<f64>,
    pub eps: Option<String>,
    pub grid: Option<usize>,
    pub delta_prime: Option<f64>,
}

/// Builds a configuration from command-line flags; supported for the
/// set-driven experiments.
pub fn config_from_flags(a: &FlagArgs) -> Result<ExperimentConfig, RunError> {
    let experiment = a.experiment.as_deref().ok_or_else(|| config_err("--experiment is required without a config file"))?;
    let preset = a.preset.clone().unwrap_or_else(|| geometry::PRESET_NON_CARLESON.into());
    let mut set = json!({"preset": preset});
    if let Some(d) = a.depth {
        set["depth"] = json!(d);
    }
    let space = json!({"p": a.p.unwrap_or(1.5), "beta": a.beta.unwrap_or(0.0)});
    let mut params = match experiment {
        "decay" => json!({"set": set, "space": space, "eps": a.eps.clone().unwrap_or_else(|| "1e-1:1e-6:x10".into())}),
        "kel_ratio" => json!({
            "set": set,
            "delta_prime": a.delta_prime.unwrap_or(1.2),
            "eps": a.eps.clone().unwrap_or_else(|| "1e-1:1e-4:x10".into()),
        }),
        "cantor" | "carleson" => json!({"set": set}),
        other => return Err(config_err(format!("experiment {other:?} needs a config file"))),
    };
    if let Some(g) = a.gamma {
        if matches!(experiment, "decay" | "kel_ratio") {
            params["gamma"] = json!(g);
        }
    }
    if let Some(g) = a.grid {
        if matches!(experiment, "decay" | "kel_ratio") {
            params["grid"] = json!(g);
        }
    }
    ExperimentConfig::from_value(json!({"experiment": experiment, "parameters": params}))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eps_range_parsing() {
        let v = parse_eps_range("1e-1:1e-6:x10").unwrap();
        assert_eq!(v.len(), 6);
        assert!((v[5] - 1e-6).abs() < 1e-18);
        assert!(parse_eps_range("1e-1:1e-6").is_err());
        assert!(parse_eps_range("1e-6:1e-1:x10").is_err());
        assert!(EpsSchedule::List(vec![0.1, 0.2]).values().is_err());
    }

    #[test]
    fn unknown_fields_rejected() {
        let bad = r#"{"experiment":"classify","parameters":{"dim_estimate":0.5,"space":{"p":1.5},"colour":1}}"#;
        assert!(matches!(ExperimentConfig::from_json_str(bad), Err(RunError::Config(_))));
        let bad = r#"{"experiment":"classify","parameters":{"dim_estimate":0.5,"space":{"p":1.5}},"extra":true}"#;
        assert!(ExperimentConfig::from_json_str(bad).is_err());
        let bad = r#"{"experiment":"telepathy"}"#;
        assert!(ExperimentConfig::from_json_str(bad).is_err());
    }

    #[test]
    fn negative_gamma_is_a_config_error() {
        let bad = r#"{"experiment":"decay","parameters":{"set":{"preset":"middle_thirds"},"gamma":-1,"space":{"p":1.5},"eps":[0.1]}}"#;
        let e = ExperimentConfig::from_json_str(bad).unwrap_err();
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn preset_examples_validate() {
        for p in list_presets() {
            ExperimentConfig::from_value(p.example.clone()).unwrap_or_else(|e| panic!("{}: {e}", p.name));
        }
        let names: Vec<_> = list_presets().iter().map(|p| p.name).collect();
        assert!(names.contains(&"non_carleson_n2") && names.contains(&"middle_thirds"));
    }

    #[test]
    fn flags_build_decay_config() {
        let a = FlagArgs {
            experiment: Some("decay".into()),
            preset: Some("non_carleson_n2".into()),
            gamma: Some(1.0),
            p: Some(1.5),
            beta: Some(0.0),
            eps: Some("1e-1:1e-6:x10".into()),
            grid: Some(16384),
            ..Default::default()
        };
        let c = config_from_flags(&a).unwrap();
        assert_eq!(c.experiment, ExperimentKind::Decay);
        let bad = FlagArgs {
            gamma: Some(-1.0),
            ..a
        };
        assert_eq!(config_from_flags(&bad).unwrap_err().exit_code(), 2);
    }
}
