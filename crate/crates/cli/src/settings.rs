//! Merged configuration: config file entries overlaid by command-line flags.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use warpgeom::catalog::parse_config;
use warpgeom::expr::Bindings;

use crate::error::CliError;

/// Keys every command accepts.
pub const COMMON: [&str; 8] = ["preset", "f", "interval", "n", "region", "format", "output", "param.*"];

/// Preset-file keys that carry no run configuration.
fn ignored(key: &str) -> bool {
    key == "name" || key == "description" || key.starts_with("expected.") || key.starts_with("provenance.")
}

fn allowed(key: &str, keys: &[&str]) -> bool {
    keys.iter().any(|k| match k.strip_suffix('*') {
        Some(prefix) => key.starts_with(prefix) && key.len() > prefix.len(),
        None => *k == key,
    })
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings {
    map: BTreeMap<String, String>,
}

impl Settings {
    /// Reads the optional config file, then applies `flags`; flags win.
    pub fn load(config: Option<&Path>, flags: Vec<(String, String)>, keys: &[&str]) -> Result<Self, CliError> {
        let mut map = BTreeMap::new();
        if let Some(path) = config {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::input(format!("cannot read config {}: {e}", path.display())))?;
            let entries =
                parse_config(&text).map_err(|e| CliError::input(format!("config {}: {e}", path.display())))?;
            for e in entries {
                if ignored(&e.key) {
                    continue;
                }
                if !allowed(&e.key, keys) {
                    return Err(CliError::input(format!(
                        "config {}: line {}: unknown key `{}`",
                        path.display(),
                        e.line,
                        e.key
                    )));
                }
                map.insert(e.key, e.value);
            }
        }
        for (k, v) in flags {
            map.insert(k, v);
        }
        Ok(Settings { map })
    }

    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, &'a str)>) -> Self {
        Settings {
            map: pairs.into_iter().map(|(k, v)| (k.to_string(), v.to_string())).collect(),
        }
    }

    /// Empty values count as absent.
    pub fn get(&self, key: &str) -> Option<&str> {
        self.map.get(key).map(String::as_str).filter(|v| !v.is_empty())
    }

    pub fn parse<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError>
    where
        T::Err: std::fmt::Display,
    {
        self.get(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|e| CliError::input(format!("invalid value `{v}` for `{key}`: {e}")))
            })
            .transpose()
    }

    pub fn flag(&self, key: &str) -> Result<bool, CliError> {
        match self.get(key) {
            None | Some("false") => Ok(false),
            Some("true") => Ok(true),
            Some(v) => Err(CliError::input(format!("invalid value `{v}` for `{key}`: expected true or false"))),
        }
    }

    /// `param.<name>` entries.
    pub fn params(&self) -> Result<Bindings, CliError> {
        let mut b = Bindings::new();
        for (k, v) in &self.map {
            if let Some(name) = k.strip_prefix("param.") {
                let x = v
                    .parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .ok_or_else(|| CliError::input(format!("parameter `{name}` must be a finite number, got `{v}`")))?;
                b.insert(name.to_string(), x);
            }
        }
        Ok(b)
    }

    pub fn echo(&self) -> BTreeMap<String, String> {
        self.map.clone()
    }
}

/// Splits a `--param name=value` flag into its settings key and value.
pub fn param_flag(s: &str) -> Result<(String, String), CliError> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| CliError::input(format!("--param expects name=value, got `{s}`")))?;
    let k = k.trim();
    if k.is_empty() || !k.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
        return Err(CliError::input(format!("bad parameter name `{k}`")));
    }
    Ok((format!("param.{k}"), v.trim().to_string()))
}
