//! Plain-text key=value run configuration.
//!
//! Every command resolves its parameters in three layers: built-in defaults,
//! then a `--config` file, then explicit flags (flags win). The resolved set
//! is echoed to `config_echo.txt` in the output directory; feeding that file
//! back through `--config` reproduces the run bit-exactly.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::CliError;

#[derive(Debug, Default, Clone)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn load(path: Option<&PathBuf>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = fs::read_to_string(path).map_err(|e| {
            CliError::validation(format!("cannot read config {}: {e}", path.display()))
        })?;
        let mut values = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::validation(format!(
                    "{}:{}: expected key=value, got '{line}'",
                    path.display(),
                    i + 1
                )));
            };
            values.insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(Self { values })
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError>
    where
        T::Err: Display,
    {
        match self.values.get(key) {
            None => Ok(None),
            Some(raw) => raw.parse::<T>().map(Some).map_err(|e| {
                CliError::validation(format!("config key '{key}': bad value '{raw}': {e}"))
            }),
        }
    }
}

/// Collects the effective parameter set for the echo file.
#[derive(Debug, Default, Clone)]
pub struct ConfigEcho {
    values: BTreeMap<String, String>,
}

impl ConfigEcho {
    pub fn new(command: &str) -> Self {
        let mut values = BTreeMap::new();
        values.insert("command".to_string(), command.to_string());
        values.insert(
            "engine_version".to_string(),
            env!("CARGO_PKG_VERSION").to_string(),
        );
        Self { values }
    }

    pub fn set(&mut self, key: &str, value: impl Display) {
        self.values.insert(key.to_string(), value.to_string());
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.values {
            out.push_str(&format!("{k}={v}\n"));
        }
        out
    }

    pub fn write(&self, out_dir: &Path) -> Result<PathBuf, CliError> {
        let path = out_dir.join("config_echo.txt");
        fs::write(&path, self.render())
            .map_err(|e| CliError::runtime(format!("writing {}: {e}", path.display())))?;
        Ok(path)
    }
}

/// Flag-over-config-over-default resolution for one parameter.
pub fn resolve<T: FromStr + Clone>(
    flag: Option<T>,
    config: &ConfigFile,
    key: &str,
    default: T,
) -> Result<T, CliError>
where
    T::Err: Display,
{
    if let Some(v) = flag {
        return Ok(v);
    }
    Ok(config.get::<T>(key)?.unwrap_or(default))
}
