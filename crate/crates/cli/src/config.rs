//! Command-line and config-file options resolved into a [`RunConfig`].
//!
//! A config file holds `key = value` lines whose keys are the long flag names
//! (`n-max = 100`). Blank lines and `#` comments are ignored. Flags given on
//! the command line take precedence over the file.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use gramheight::family::PadRule;
use gramheight::{ScalarMode, Tolerance};
use serde::Serialize;

use crate::error::{CliError, CliResult};

/// Environment variable that sets the directory for relative `--output` paths.
pub const OUTPUT_DIR_ENV: &str = "GRAMHEIGHT_OUTPUT_DIR";

#[derive(Debug, Parser)]
#[command(name = "gramheight", version, about = "Gram-determinant ratios of growing vector truncations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: CommandKind,
    #[command(flatten)]
    pub options: Options,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    /// Γ(f_0..f_m) / Γ(without f_s) for n = m+1 ..= n-max
    Ratio,
    /// det(I + γ(f_0..f_m)) / det(I + γ(without f_s)) for n = 1 ..= n-max
    ShiftedRatio,
    /// Cofactor table, minimizer norm and its envelope at sampled n
    Bounds,
    /// Squared distance of f_s from the span of the other vectors at n = n-max
    Distance,
    /// det(diag(lambda) + C) by direct elimination and by subset expansion
    Charpoly,
    /// Seeded randomized identity checks in exact arithmetic
    Verify,
    /// Heuristic search for square-summable combinations of the rows
    Probe,
}

impl CommandKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CommandKind::Ratio => "ratio",
            CommandKind::ShiftedRatio => "shifted-ratio",
            CommandKind::Bounds => "bounds",
            CommandKind::Distance => "distance",
            CommandKind::Charpoly => "charpoly",
            CommandKind::Verify => "verify",
            CommandKind::Probe => "probe",
        }
    }

    fn needs_family(self) -> bool {
        !matches!(self, CommandKind::Charpoly | CommandKind::Verify)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyKind {
    /// f_rk = k^r
    Monomial,
    /// f_rk = ln(k+1)^r (float mode only)
    LogPower,
    /// Finite table read from --csv
    Csv,
    /// Table from --csv continued by --pad
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Exact,
    Float,
}

impl From<Mode> for ScalarMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Exact => ScalarMode::Exact,
            Mode::Float => ScalarMode::Float,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Pad {
    Zero,
    Monomial,
    LogPower,
}

impl From<Pad> for PadRule {
    fn from(p: Pad) -> Self {
        match p {
            Pad::Zero => PadRule::Zero,
            Pad::Monomial => PadRule::Monomial,
            Pad::LogPower => PadRule::LogPower,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    Json,
}

/// Every option is global so it may follow the subcommand.
#[derive(Debug, Clone, Default, Args)]
pub struct Options {
    /// key=value file supplying defaults for any flag below
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Vector family
    #[arg(long, global = true, value_enum)]
    pub family: Option<FamilyKind>,
    /// Index of the last vector, the family is f_0..f_m
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub m: Option<i64>,
    /// Table for csv and custom families, one row per vector
    #[arg(long, global = true, value_name = "FILE")]
    pub csv: Option<PathBuf>,
    /// Continuation rule for custom families [default: zero]
    #[arg(long, global = true, value_enum)]
    pub pad: Option<Pad>,
    /// Largest truncation length
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub n_max: Option<i64>,
    /// Vector omitted from the denominator [default: 0]
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub drop: Option<i64>,
    /// Scalar backend [default: exact]
    #[arg(long, global = true, value_enum)]
    pub mode: Option<Mode>,
    /// Relative tolerance for float comparisons [default: 1e-9]
    #[arg(long, global = true)]
    pub rel_tol: Option<f64>,
    /// Absolute tolerance for float comparisons [default: 1e-12]
    #[arg(long, global = true)]
    pub abs_tol: Option<f64>,
    /// Output file; stdout when absent
    #[arg(long, global = true, value_name = "FILE")]
    pub output: Option<PathBuf>,
    /// Output format [default: json]
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Seed for randomized commands [default: 0]
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// verify: largest vector count / matrix order [default: 8]
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub max_order: Option<i64>,
    /// verify: instances per identity suite [default: 200]
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub cases: Option<i64>,
    /// Recompute determinants from scratch every this many steps, 0 = never [default: 64]
    #[arg(long, global = true)]
    pub reanchor: Option<usize>,
    /// probe: random coefficient directions [default: 8]
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub samples: Option<i64>,
    /// bounds: sample every k-th n instead of powers of two
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub sample_every: Option<i64>,
    /// charpoly: square matrix C as a CSV table
    #[arg(long, global = true, value_name = "FILE")]
    pub matrix: Option<PathBuf>,
    /// charpoly: comma-separated diagonal weights
    #[arg(long, global = true, value_delimiter = ',', allow_negative_numbers = true)]
    pub lambda: Option<Vec<String>>,
    /// charpoly: vector a for the quadratic form ((diag(lambda) + C)^-1 a, a)
    #[arg(long, global = true, value_delimiter = ',', allow_negative_numbers = true)]
    pub vector: Option<Vec<String>>,
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> CliResult<T>
where
    T::Err: std::fmt::Display,
{
    value
        .parse()
        .map_err(|e| CliError::InvalidValue(format!("config key {key}: {value:?}: {e}")))
}

fn parse_enum<T: ValueEnum>(key: &str, value: &str) -> CliResult<T> {
    T::from_str(value, false).map_err(|e| CliError::InvalidValue(format!("config key {key}: {e}")))
}

fn parse_list(value: &str) -> Vec<String> {
    value.split(',').map(|s| s.trim().to_string()).collect()
}

impl Options {
    /// Fills unset fields from a config file's text. `path` is used in error
    /// messages and to resolve relative file paths in the file.
    pub fn merge_config_text(&mut self, text: &str, path: &Path) -> CliResult<()> {
        let base = path.parent().unwrap_or(Path::new(""));
        let rel = |v: &str| base.join(v);
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::InvalidValue(format!(
                    "{} line {}: expected key = value",
                    path.display(),
                    i + 1
                )));
            };
            let (key, value) = (key.trim(), value.trim());
            macro_rules! fill {
                ($field:ident, $v:expr) => {
                    if self.$field.is_none() {
                        self.$field = Some($v);
                    }
                };
            }
            match key {
                "family" => fill!(family, parse_enum(key, value)?),
                "m" => fill!(m, parse_value(key, value)?),
                "csv" => fill!(csv, rel(value)),
                "pad" => fill!(pad, parse_enum(key, value)?),
                "n-max" => fill!(n_max, parse_value(key, value)?),
                "drop" => fill!(drop, parse_value(key, value)?),
                "mode" => fill!(mode, parse_enum(key, value)?),
                "rel-tol" => fill!(rel_tol, parse_value(key, value)?),
                "abs-tol" => fill!(abs_tol, parse_value(key, value)?),
                "output" => fill!(output, PathBuf::from(value)),
                "format" => fill!(format, parse_enum(key, value)?),
                "seed" => fill!(seed, parse_value(key, value)?),
                "max-order" => fill!(max_order, parse_value(key, value)?),
                "cases" => fill!(cases, parse_value(key, value)?),
                "reanchor" => fill!(reanchor, parse_value(key, value)?),
                "samples" => fill!(samples, parse_value(key, value)?),
                "sample-every" => fill!(sample_every, parse_value(key, value)?),
                "matrix" => fill!(matrix, rel(value)),
                "lambda" => fill!(lambda, parse_list(value)),
                "vector" => fill!(vector, parse_list(value)),
                _ => {
                    return Err(CliError::UnknownConfigKey {
                        key: key.to_string(),
                        path: path.to_path_buf(),
                        line: i + 1,
                    })
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilySpec {
    pub kind: FamilyKind,
    pub m: Option<usize>,
    pub csv: Option<PathBuf>,
    pub pad: Option<Pad>,
}

/// Validated settings for one run. Serialized into the output metadata, so it
/// holds nothing that varies between otherwise identical runs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: CommandKind,
    pub family: Option<FamilySpec>,
    pub n_max: Option<usize>,
    pub drop: usize,
    pub mode: Mode,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub format: Format,
    pub seed: u64,
    pub max_order: usize,
    pub cases: usize,
    pub reanchor: usize,
    pub samples: usize,
    pub sample_every: Option<usize>,
    pub matrix: Option<PathBuf>,
    pub lambda: Option<Vec<String>>,
    pub vector: Option<Vec<String>>,
    #[serde(skip)]
    pub output: Option<PathBuf>,
}

impl RunConfig {
    pub fn tolerance(&self) -> Tolerance {
        Tolerance::new(self.rel_tol, self.abs_tol)
    }
}

fn positive(name: &str, v: Option<i64>) -> CliResult<Option<usize>> {
    match v {
        None => Ok(None),
        Some(x) if x > 0 => Ok(Some(x as usize)),
        Some(x) => Err(CliError::InvalidValue(format!("--{name} must be positive, got {x}"))),
    }
}

fn non_negative(name: &str, v: Option<i64>) -> CliResult<Option<usize>> {
    match v {
        None => Ok(None),
        Some(x) if x >= 0 => Ok(Some(x as usize)),
        Some(x) => Err(CliError::InvalidValue(format!("--{name} must be non-negative, got {x}"))),
    }
}

/// Parses `args` (including the program name) and a config file, if named.
pub fn parse_config<I, T>(args: I) -> CliResult<RunConfig>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| CliError::Usage(e.to_string()))?;
    resolve(cli)
}

/// Applies the config file, defaults and validation.
pub fn resolve(cli: Cli) -> CliResult<RunConfig> {
    let mut o = cli.options;
    if let Some(path) = o.config.clone() {
        let text = std::fs::read_to_string(&path).map_err(|source| CliError::Io {
            context: "cannot read config file",
            path: path.clone(),
            source,
        })?;
        o.merge_config_text(&text, &path)?;
    }
    let command = cli.command;

    let m = non_negative("m", o.m)?;
    let n_max = positive("n-max", o.n_max)?;
    let drop = non_negative("drop", o.drop)?.unwrap_or(0);
    let family = match o.family {
        None if command.needs_family() => {
            return Err(CliError::MissingFamily(format!(
                "{} needs --family (monomial, log-power, csv or custom)",
                command.as_str()
            )))
        }
        None => None,
        Some(kind) => {
            match kind {
                FamilyKind::Monomial | FamilyKind::LogPower if m.is_none() => {
                    return Err(CliError::MissingFamily(format!(
                        "--family {} needs --m",
                        kind.to_possible_value().unwrap().get_name()
                    )))
                }
                FamilyKind::Csv | FamilyKind::Custom if o.csv.is_none() => {
                    return Err(CliError::MissingFamily(format!(
                        "--family {} needs --csv",
                        kind.to_possible_value().unwrap().get_name()
                    )))
                }
                _ => {}
            }
            Some(FamilySpec {
                kind,
                m,
                csv: o.csv.clone(),
                pad: match kind {
                    FamilyKind::Custom => Some(o.pad.unwrap_or(Pad::Zero)),
                    _ => o.pad,
                },
            })
        }
    };
    if matches!(
        command,
        CommandKind::Ratio
            | CommandKind::ShiftedRatio
            | CommandKind::Bounds
            | CommandKind::Distance
            | CommandKind::Probe
    ) && n_max.is_none()
    {
        return Err(CliError::InvalidValue(format!("{} needs --n-max", command.as_str())));
    }
    let rel_tol = o.rel_tol.unwrap_or(Tolerance::default().rel);
    let abs_tol = o.abs_tol.unwrap_or(Tolerance::default().abs);
    if !(rel_tol >= 0.0 && abs_tol >= 0.0 && rel_tol.is_finite() && abs_tol.is_finite()) {
        return Err(CliError::InvalidValue("tolerances must be finite and non-negative".into()));
    }
    let mode = match command {
        CommandKind::Verify => {
            if o.mode == Some(Mode::Float) {
                return Err(CliError::InvalidValue("verify runs in exact mode only".into()));
            }
            Mode::Exact
        }
        _ => o.mode.unwrap_or(Mode::Exact),
    };
    if command == CommandKind::Charpoly && (o.matrix.is_none() || o.lambda.is_none()) {
        return Err(CliError::InvalidValue("charpoly needs --matrix and --lambda".into()));
    }
    let output = o.output.map(|p| match std::env::var_os(OUTPUT_DIR_ENV) {
        Some(dir) if p.is_relative() => PathBuf::from(dir).join(p),
        _ => p,
    });
    Ok(RunConfig {
        command,
        family,
        n_max,
        drop,
        mode,
        rel_tol,
        abs_tol,
        format: o.format.unwrap_or(Format::Json),
        seed: o.seed.unwrap_or(0),
        max_order: positive("max-order", o.max_order)?.unwrap_or(8),
        cases: positive("cases", o.cases)?.unwrap_or(200),
        reanchor: o.reanchor.unwrap_or(64),
        samples: positive("samples", o.samples)?.unwrap_or(8),
        sample_every: positive("sample-every", o.sample_every)?,
        matrix: o.matrix,
        lambda: o.lambda,
        vector: o.vector,
        output,
    })
}
