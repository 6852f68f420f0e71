//! Flag and config-file merging: flags override the config file, which
//! overrides built-in defaults.

use std::collections::BTreeMap;
use std::path::Path;

use crate::args::Common;
use crate::error::{input, CliError, CliResult};

const KNOWN_KEYS: &[&str] = &[
    "design",
    "n",
    "loss",
    "h",
    "out",
    "format",
    "jobs",
    "estimator",
    "counts",
    "batch",
    "state",
    "estimator-a",
    "estimator-b",
    "axis",
    "radii",
    "ratio",
    "angles",
    "h-grid",
    "prior",
    "prior-file",
];

#[derive(Debug, Default)]
pub struct Settings {
    values: BTreeMap<String, String>,
}

impl Settings {
    /// Merges the config file named by `common.config` with the given flags.
    pub fn load(common: &Common, extra: Vec<(&str, Option<String>)>) -> CliResult<Self> {
        let mut settings = match &common.config {
            Some(path) => Self::from_file(path)?,
            None => Self::default(),
        };
        let flags = [
            ("design", common.design.clone()),
            ("n", common.n.clone()),
            ("loss", common.loss.clone()),
            ("h", common.h.clone()),
            ("out", common.out.clone()),
            ("format", common.format.clone()),
            ("jobs", common.jobs.clone()),
        ];
        for (key, value) in flags.into_iter().chain(extra) {
            if let Some(v) = value {
                settings.values.insert(key.to_string(), v);
            }
        }
        Ok(settings)
    }

    fn from_file(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read config {}: {e}", path.display())))?;
        let table: toml::Table = toml::from_str(&text).map_err(|e| {
            CliError::Input(format!("config {} is not valid TOML: {e}", path.display()))
        })?;
        let mut values = BTreeMap::new();
        for (key, value) in table {
            let key = key.replace('_', "-");
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return input(format!("unknown config key '{key}'"));
            }
            values.insert(key.clone(), flatten(&key, &value)?);
        }
        Ok(Self { values })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn flag(&self, key: &str) -> CliResult<bool> {
        match self.get(key) {
            None => Ok(false),
            Some("true") => Ok(true),
            Some("false") => Ok(false),
            Some(other) => input(format!("{key} must be true or false, got '{other}'")),
        }
    }
}

fn flatten(key: &str, value: &toml::Value) -> CliResult<String> {
    use toml::Value as V;
    Ok(match value {
        V::String(s) => s.clone(),
        V::Integer(i) => i.to_string(),
        V::Float(f) => format!("{f:?}"),
        V::Boolean(b) => b.to_string(),
        V::Array(items) => items
            .iter()
            .map(|v| flatten(key, v))
            .collect::<CliResult<Vec<_>>>()?
            .join(","),
        V::Datetime(_) | V::Table(_) => {
            return input(format!("config key '{key}' must be a plain value"))
        }
    })
}
