//! Global options, merged from an optional JSON config file and command-line flags.

use std::path::{Path, PathBuf};

use edgelim::vertex_model::Engine;
use edgelim::Tolerances;
use serde::Deserialize;

use crate::CliError;

/// Everything a config file may set. Flags win on conflict.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub engine: Option<Engine>,
    pub group: Option<String>,
    pub dict: Option<String>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub csv: Option<PathBuf>,
    pub tol: Option<Tolerances>,
}

#[derive(Debug, Clone)]
pub struct Options {
    pub engine: Engine,
    pub group: String,
    pub dict: Option<String>,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub csv: Option<PathBuf>,
    pub tol: Tolerances,
    pub verbose: bool,
}

pub struct Flags<'a> {
    pub config: Option<&'a Path>,
    pub engine: Option<Engine>,
    pub group: Option<String>,
    pub dict: Option<String>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub csv: Option<PathBuf>,
    pub tol: &'a [String],
    pub verbose: bool,
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

/// Applies `key=value` overrides to a tolerance record through its serialized form.
fn override_tolerances(base: Tolerances, overrides: &[String]) -> Result<Tolerances, CliError> {
    let mut value = serde_json::to_value(base).expect("tolerances serialize");
    let map = value.as_object_mut().expect("tolerances are a record");
    for item in overrides {
        let (key, raw) = item
            .split_once('=')
            .ok_or_else(|| CliError::Parse(format!("--tol {item:?}: expected KEY=VALUE")))?;
        if !map.contains_key(key) {
            let known: Vec<&str> = map.keys().map(String::as_str).collect();
            return Err(CliError::Parse(format!("--tol {key:?}: unknown tolerance, expected one of {known:?}")));
        }
        let number: f64 = raw
            .parse()
            .map_err(|_| CliError::Parse(format!("--tol {key}: {raw:?} is not a number")))?;
        if !(number.is_finite() && number >= 0.0) {
            return Err(CliError::Parse(format!("--tol {key}: must be finite and nonnegative")));
        }
        map.insert(key.to_owned(), serde_json::json!(number));
    }
    Ok(serde_json::from_value(value).expect("same shape as before"))
}

pub fn resolve(flags: Flags<'_>) -> Result<Options, CliError> {
    let config: ConfigFile = match flags.config {
        Some(path) => read_json(path)?,
        None => ConfigFile::default(),
    };
    Ok(Options {
        engine: flags.engine.or(config.engine).unwrap_or_default(),
        group: flags.group.or(config.group).unwrap_or_else(|| "permutations".into()),
        dict: flags.dict.or(config.dict),
        seed: flags.seed.or(config.seed).unwrap_or(0),
        out: flags.out.or(config.out),
        csv: flags.csv.or(config.csv),
        tol: override_tolerances(config.tol.unwrap_or_default(), flags.tol)?,
        verbose: flags.verbose,
    })
}
