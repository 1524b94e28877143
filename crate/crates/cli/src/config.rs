//! Flat `key = value` configuration files merged under command-line flags.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use crate::error::CliError;

/// Effective settings for one subcommand: flag, then file, then default.
#[derive(Debug, Default)]
pub struct Settings {
    file: BTreeMap<String, String>,
    used: BTreeSet<String>,
    echo: Vec<(String, String)>,
}

fn normalize(key: &str) -> String {
    key.trim().replace('-', "_")
}

pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut out = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Validation(format!("config line {}: expected key = value", lineno + 1)))?;
        let key = normalize(key);
        if key.is_empty() {
            return Err(CliError::Validation(format!("config line {}: empty key", lineno + 1)));
        }
        if out.insert(key.clone(), value.trim().to_string()).is_some() {
            return Err(CliError::Validation(format!("config key '{key}' given twice")));
        }
    }
    Ok(out)
}

impl Settings {
    pub fn new(subcommand: &str, config: Option<&Path>) -> Result<Self, CliError> {
        let file = match config {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| CliError::Validation(format!("cannot read config {}: {e}", p.display())))?;
                parse_config_text(&text)?
            }
            None => BTreeMap::new(),
        };
        let mut s = Settings { file, ..Default::default() };
        s.echo.push(("subcommand".into(), subcommand.into()));
        Ok(s)
    }

    fn lookup<T>(&mut self, key: &str, flag: Option<T>) -> Result<Option<T>, CliError>
    where
        T: FromStr,
        T::Err: Display,
    {
        self.used.insert(key.to_string());
        if flag.is_some() {
            return Ok(flag);
        }
        match self.file.get(key) {
            Some(v) => v
                .parse::<T>()
                .map(Some)
                .map_err(|e| CliError::Validation(format!("config key '{key}': invalid value '{v}': {e}"))),
            None => Ok(None),
        }
    }

    /// Value with a default; recorded in the config echo.
    pub fn get<T>(&mut self, key: &str, flag: Option<T>, default: T) -> Result<T, CliError>
    where
        T: FromStr + Display,
        T::Err: Display,
    {
        let v = self.lookup(key, flag)?.unwrap_or(default);
        self.echo.push((key.into(), v.to_string()));
        Ok(v)
    }

    /// Value that must come from a flag or the file.
    pub fn require<T>(&mut self, key: &str, flag: Option<T>) -> Result<T, CliError>
    where
        T: FromStr + Display,
        T::Err: Display,
    {
        let v = self
            .lookup(key, flag)?
            .ok_or_else(|| CliError::Validation(format!("missing required option --{}", key.replace('_', "-"))))?;
        self.echo.push((key.into(), v.to_string()));
        Ok(v)
    }

    /// Optional value without a default; echoed only when present.
    pub fn optional<T>(&mut self, key: &str, flag: Option<T>) -> Result<Option<T>, CliError>
    where
        T: FromStr + Display,
        T::Err: Display,
    {
        let v = self.lookup(key, flag)?;
        if let Some(x) = &v {
            self.echo.push((key.into(), x.to_string()));
        }
        Ok(v)
    }

    /// Rejects file keys the subcommand never asked for and returns the echo.
    pub fn finish(self) -> Result<Vec<(String, String)>, CliError> {
        if let Some(k) = self.file.keys().find(|k| !self.used.contains(*k)) {
            return Err(CliError::Validation(format!("unknown config key '{k}'")));
        }
        Ok(self.echo)
    }
}
