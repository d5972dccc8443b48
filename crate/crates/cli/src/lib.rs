//! Config-driven front end for the `perispec` solvers and studies.
//!
//! A run is described by one JSON [`RunConfig`]. [`execute`] performs it and
//! returns the bytes to write; [`main_entry`] adds argument parsing, output
//! and the exit-code contract (0 success, 2 validation error, 3 numerical
//! failure).

use std::path::{Path, PathBuf};

use clap::Parser;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use perispec::fields::{load_field, make_decay_field, FieldDocument, FieldError, SpectralField};
use perispec::multipliers::{eigenvalues_exact, multiplier_matrix, Material, MultiplierError};
use perispec::solvers::{evolve_forced, evolve_homogeneous, solve_equilibrium, OperatorSelector, SolutionDocument, SolverError};
use perispec::studies::{
    asymptotic_validation, local_limit_sweep, regularity_study, temporal_consistency_check, AsymptoticConfig,
    DataConfig, OutputFormat, ProblemKind, RegularityConfig, StudyError, StudyTable, SweepConfig, SweepKind,
    SweepTarget, TemporalConfig,
};

/// Environment variable selecting the worker-thread count.
pub const THREADS_ENV: &str = "PERISPEC_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Multiplier,
    Eigenvalues,
    SolveEquilibrium,
    SolveWave,
    SolveForced,
    Asymptotics,
    Sweep,
    Regularity,
    TemporalCheck,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorKind {
    #[default]
    Peridynamic,
    Navier,
}

/// Sweep definition for the `sweep` command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub target: SweepTarget,
    pub kind: SweepKind,
    #[serde(default)]
    pub exponents: Option<Vec<u32>>,
    #[serde(default)]
    pub epsilon: Option<f64>,
}

/// Input field files; absent fields are generated from the indices and seed.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputPaths {
    #[serde(default)]
    pub b: Option<PathBuf>,
    #[serde(default)]
    pub f: Option<PathBuf>,
    #[serde(default)]
    pub g: Option<PathBuf>,
}

/// One run. Unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    #[serde(default)]
    pub material: Option<Material<f64>>,
    #[serde(default)]
    pub operator: OperatorKind,
    /// Frequency for `multiplier` and `eigenvalues`.
    #[serde(default)]
    pub k: Option<Vec<f64>>,
    #[serde(default, rename = "K")]
    pub cutoff: Option<usize>,
    #[serde(default)]
    pub s: Option<f64>,
    #[serde(default)]
    pub s1: Option<f64>,
    #[serde(default)]
    pub s2: Option<f64>,
    #[serde(default, rename = "S")]
    pub forcing_index: Option<f64>,
    #[serde(default)]
    pub t: Option<f64>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub sweep: Option<SweepSpec>,
    #[serde(default)]
    pub radii: Option<Vec<f64>>,
    #[serde(default)]
    pub problem: Option<ProblemKind>,
    #[serde(default)]
    pub steps: Option<Vec<f64>>,
    #[serde(default)]
    pub input: InputPaths,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub format: Option<OutputFormat>,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Multiplier(#[from] MultiplierError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Study(#[from] StudyError),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    /// Machine-readable code for the stderr line.
    pub fn code(&self) -> &'static str {
        match self {
            Self::Config(_) => "config",
            Self::Field(_) => "field",
            Self::Io(_) => "io",
            Self::Multiplier(e) | Self::Solver(SolverError::Multiplier(e)) | Self::Study(StudyError::Multiplier(e))
            | Self::Study(StudyError::Solver(SolverError::Multiplier(e))) => multiplier_code(e),
            Self::Solver(e) | Self::Study(StudyError::Solver(e)) => solver_code(e),
            Self::Study(StudyError::Field(_)) => "field",
            Self::Study(StudyError::InvalidConfig(_)) => "config",
            Self::Study(_) => "study",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.code() {
            "precision_loss" | "quadrature" | "numerical" | "study" => 3,
            _ => 2,
        }
    }
}

fn multiplier_code(e: &MultiplierError) -> &'static str {
    match e {
        MultiplierError::InvalidMaterial(_) => "material",
        MultiplierError::DimensionMismatch { .. } | MultiplierError::Domain { .. } => "input",
        MultiplierError::PrecisionLoss { .. } | MultiplierError::OutsideEnvelope(_) => "precision_loss",
        MultiplierError::Quadrature(_) => "quadrature",
        MultiplierError::Consistency { .. } | MultiplierError::Specfun(_) => "numerical",
    }
}

fn solver_code(e: &SolverError) -> &'static str {
    match e {
        SolverError::Multiplier(m) => multiplier_code(m),
        SolverError::Field(_) => "field",
        SolverError::NonzeroMeanForcing { .. } => "nonzero_mean_forcing",
        SolverError::NotNegative { .. } => "material",
        _ => "input",
    }
}

fn parse_config(text: &str) -> Result<RunConfig, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Config(format!("run config: {e}")))
}

pub fn load_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    parse_config(&text)
}

fn need<T: Clone>(value: &Option<T>, key: &str, command: Command) -> Result<T, CliError> {
    value.clone().ok_or_else(|| CliError::Config(format!("{command:?} requires `{key}`")))
}

impl RunConfig {
    fn material(&self) -> Result<Material<f64>, CliError> {
        need(&self.material, "material", self.command)
    }

    fn operator(&self) -> Result<OperatorSelector<f64>, CliError> {
        let m = self.material()?;
        Ok(match self.operator {
            OperatorKind::Peridynamic => OperatorSelector::Peridynamic(m),
            OperatorKind::Navier => OperatorSelector::Navier { n: m.n(), mu: m.mu(), lambda_star: m.lambda_star() },
        })
    }

    fn data(&self) -> DataConfig {
        DataConfig {
            s: self.forcing_index.or(self.s).unwrap_or(0.0),
            s1: self.s1.unwrap_or(0.0),
            s2: self.s2.unwrap_or(0.0),
            seed: self.seed.unwrap_or(0),
        }
    }

    /// A field from `path`, or the synthetic field with index `s` and `seed`.
    fn field(&self, path: &Option<PathBuf>, s: f64, seed: u64) -> Result<SpectralField<f64>, CliError> {
        if let Some(p) = path {
            let f = load_field(p)?;
            let n = self.material()?.n();
            if f.n() != n {
                return Err(CliError::Field(FieldError::DimensionMismatch { expected: n, got: f.n() }));
            }
            return Ok(f);
        }
        let cutoff = need(&self.cutoff, "K", self.command)?;
        Ok(make_decay_field(self.material()?.n(), cutoff, s, seed))
    }

    fn time(&self) -> Result<f64, CliError> {
        let t = need(&self.t, "t", self.command)?;
        if !(t >= 0.0 && t.is_finite()) {
            return Err(CliError::Config(format!("t must be nonnegative, got {t}")));
        }
        Ok(t)
    }

    fn frequency(&self) -> Result<Vec<f64>, CliError> {
        need(&self.k, "k", self.command)
    }
}

/// Output of a run before it is written.
#[derive(Debug, Clone, PartialEq)]
pub enum Artifact {
    Table(StudyTable),
    Json(serde_json::Value),
    Solution(SolutionDocument),
}

impl Artifact {
    /// Bytes in the requested format; solutions and records are always JSON.
    pub fn render(&self, format: OutputFormat) -> Vec<u8> {
        match self {
            Self::Table(t) => t.emit(format),
            Self::Json(v) => pretty(v),
            Self::Solution(s) => pretty(s),
        }
    }
}

fn pretty<T: Serialize>(v: &T) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s.into_bytes()
}

fn solution(config: &RunConfig, field: &SpectralField<f64>, t: Option<f64>) -> Result<Artifact, CliError> {
    let problem = match config.command {
        Command::SolveEquilibrium => "equilibrium",
        Command::SolveWave => "homogeneous",
        _ => "forced",
    };
    Ok(Artifact::Solution(SolutionDocument {
        operator: config.operator()?,
        problem: problem.to_string(),
        t,
        field: FieldDocument::from(field),
    }))
}

/// Performs the run described by `config`.
pub fn execute(config: &RunConfig) -> Result<Artifact, CliError> {
    let data = config.data();
    match config.command {
        Command::Multiplier => {
            let m = config.material()?;
            let nu = config.frequency()?;
            let mm = multiplier_matrix(&m, &nu)?;
            let value = serde_json::json!({
                "k": nu,
                "lambda1": mm.lambda1,
                "lambda2": mm.lambda2,
                "matrix": mm.dense(),
            });
            Ok(Artifact::Json(value))
        }
        Command::Eigenvalues => {
            let m = config.material()?;
            let nu = config.frequency()?;
            let e = eigenvalues_exact(&m, &nu)?;
            Ok(Artifact::Json(serde_json::json!({
                "k": nu,
                "lambda1": e.lambda1,
                "lambda2": e.lambda2,
                "source": e.source,
            })))
        }
        Command::SolveEquilibrium => {
            let b = config.field(&config.input.b, data.s, data.seed)?;
            let u = solve_equilibrium(&config.operator()?, &b)?;
            solution(config, &u, None)
        }
        Command::SolveWave => {
            let t = config.time()?;
            let f = config.field(&config.input.f, data.s1, data.seed)?;
            let g = config.field(&config.input.g, data.s2, data.seed.wrapping_add(1))?;
            let u = evolve_homogeneous(&config.operator()?, &f, &g, t)?;
            solution(config, &u, Some(t))
        }
        Command::SolveForced => {
            let t = config.time()?;
            let b = config.field(&config.input.b, data.s, data.seed)?;
            let u = evolve_forced(&config.operator()?, &b, t)?;
            solution(config, &u, Some(t))
        }
        Command::Asymptotics => {
            let radii = need(&config.radii, "radii", config.command)?;
            Ok(Artifact::Table(asymptotic_validation(&AsymptoticConfig { material: config.material()?, radii })?))
        }
        Command::Sweep => {
            let spec = need(&config.sweep, "sweep", config.command)?;
            let sweep = SweepConfig {
                target: spec.target,
                sweep: spec.kind,
                material: config.material()?,
                exponents: spec.exponents,
                cutoff: need(&config.cutoff, "K", config.command)?,
                k: config.k.as_ref().map(|k| k.iter().map(|x| x.round() as i64).collect()),
                data,
                t: config.t.unwrap_or(1.0),
                epsilon: spec.epsilon.unwrap_or(0.5),
            };
            Ok(Artifact::Table(local_limit_sweep(&sweep)?))
        }
        Command::Regularity => {
            let study = RegularityConfig {
                problem: need(&config.problem, "problem", config.command)?,
                material: config.material()?,
                cutoff: need(&config.cutoff, "K", config.command)?,
                data,
            };
            Ok(Artifact::Table(regularity_study(&study)?.table))
        }
        Command::TemporalCheck => {
            let check = TemporalConfig {
                problem: need(&config.problem, "problem", config.command)?,
                operator: config.operator()?,
                cutoff: need(&config.cutoff, "K", config.command)?,
                data,
                t: config.time()?,
                steps: config.steps.clone().unwrap_or_else(|| vec![1e-2, 5e-3, 2.5e-3]),
            };
            Ok(Artifact::Table(temporal_consistency_check(&check)?))
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "perispec", version, about = "Spectral peridynamics solver and verification studies")]
pub struct Args {
    /// Run configuration (JSON).
    pub config: PathBuf,
    /// Output path; overrides the config. Defaults to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Table format; overrides the config.
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
    /// Seed for synthetic data; overrides the config.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for OutputFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => OutputFormat::Csv,
            FormatArg::Json => OutputFormat::Json,
        }
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .map_err(|_| CliError::Config(format!("{THREADS_ENV} must be a positive integer, got {value:?}")))?;
    if threads == 0 {
        return Err(CliError::Config(format!("{THREADS_ENV} must be positive")));
    }
    // A pool configured earlier in the process is kept.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    Ok(())
}

/// Loads, applies overrides, executes and writes. Returns the artifact bytes.
pub fn run(args: &Args) -> Result<Vec<u8>, CliError> {
    configure_threads()?;
    let mut config = load_config(&args.config)?;
    if let Some(seed) = args.seed {
        config.seed = Some(seed);
    }
    if let Some(f) = args.format {
        config.format = Some(f.into());
    }
    if let Some(out) = &args.out {
        config.output = Some(out.clone());
    }
    let artifact = execute(&config)?;
    let bytes = artifact.render(config.format.unwrap_or(OutputFormat::Csv));
    if let Some(path) = &config.output {
        std::fs::write(path, &bytes).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    }
    Ok(bytes)
}

/// Entry point used by the binary; returns the process exit code.
pub fn main_entry() -> i32 {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(&args) {
        Ok(bytes) => {
            if args.out.is_none() {
                use std::io::Write;
                let mut out = std::io::stdout().lock();
                if out.write_all(&bytes).and_then(|_| out.flush()).is_err() {
                    return 2;
                }
            }
            0
        }
        Err(e) => {
            let message = e.to_string().replace('\n', " ");
            eprintln!("error[{}]: {message}", e.code());
            e.exit_code()
        }
    }
}
