//! Output artifacts: a versioned envelope around every report, plus the
//! error type that decides exit codes.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{Map, Value};
use triplepass_core::actions::InstanceDescriptor;

use crate::args::{Format, OutputArgs};

pub const TOOL: &str = "triplepass";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// What was asked for. Embedded verbatim in every artifact; the output path
/// and worker count are deliberately left out so they cannot perturb bytes.
#[derive(Clone, Debug, Serialize)]
pub struct ExperimentConfig {
    pub command: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub instance: Option<InstanceDescriptor>,
    pub seed: u64,
    pub cap: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sessions: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lab_view: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prior: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub transcript: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_generators: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rational: Option<bool>,
}

impl ExperimentConfig {
    pub fn new(command: &'static str, out: &OutputArgs) -> Self {
        ExperimentConfig {
            command,
            instance: None,
            seed: out.seed,
            cap: out.cap,
            sessions: None,
            lab_view: None,
            prior: None,
            transcript: None,
            p: None,
            max_generators: None,
            rational: None,
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(triplepass_core::Error),
    Io(PathBuf, std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(triplepass_core::Error::CapExceeded { .. }) => 3,
            _ => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => f.write_str(m),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(path, e) => write!(f, "{}: {e}", path.display()),
        }
    }
}

impl From<triplepass_core::Error> for CliError {
    fn from(e: triplepass_core::Error) -> Self {
        CliError::Core(e)
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub fn read_file(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::Io(path.to_path_buf(), e))
}

/// A finished command: the JSON artifact, its other renderings, and the
/// exit code the command earned.
pub struct Outcome {
    pub artifact: Value,
    pub human: String,
    pub csv: Option<String>,
    pub code: u8,
}

/// `{schema, tool, version, seed, config, ...body}` in that key order.
pub fn envelope(schema: &str, config: &ExperimentConfig, body: Value) -> Value {
    let mut map = Map::new();
    map.insert("schema".into(), Value::from(schema));
    map.insert("tool".into(), Value::from(TOOL));
    map.insert("version".into(), Value::from(VERSION));
    map.insert("seed".into(), Value::from(config.seed));
    map.insert(
        "config".into(),
        serde_json::to_value(config).expect("serializable config"),
    );
    match body {
        Value::Object(fields) => map.extend(fields),
        other => {
            map.insert("report".into(), other);
        }
    }
    Value::Object(map)
}

pub fn emit(outcome: &Outcome, out: &OutputArgs, default: Format) -> CliResult<()> {
    let text = match out.format.unwrap_or(default) {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&outcome.artifact).expect("serializable artifact");
            s.push('\n');
            s
        }
        Format::Human => outcome.human.clone(),
        Format::Csv => outcome
            .csv
            .clone()
            .ok_or_else(|| CliError::Usage("csv output is only available for `run`".into()))?,
    };
    match &out.out {
        Some(path) => fs::write(path, text).map_err(|e| CliError::Io(path.clone(), e)),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(PathBuf::from("<stdout>"), e)),
    }
}
