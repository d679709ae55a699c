//! Experiment configs: TOML files layered over defaults.
//!
//! A config is resolved from three layers, later ones winning: the
//! experiment's defaults, an optional TOML file, then `--set key.path=value`
//! overrides and named flags. Tables merge key by key, except that a table
//! carrying a `family`, `model` or `rule` tag replaces the default outright so a
//! different variant can be chosen. Keys that do not exist in the resolved
//! config are rejected.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use sha2::{Digest, Sha256};
use toml::{Table, Value};

use crate::error::{CliError, Result};

const TAG_KEYS: [&str; 3] = ["family", "model", "rule"];

/// An experiment's parameter tree.
pub trait Experiment: Serialize + DeserializeOwned + Default {
    /// Checks ranges serde cannot express.
    fn validate(&self) -> Result<()> {
        Ok(())
    }

    /// Seed recorded in provenance, if the experiment is random.
    fn seed(&self) -> Option<u64>;
}

/// Overrides gathered from the command line, applied in order.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    entries: Vec<(String, Value)>,
}

impl Overrides {
    /// Parses `key.path=value`. The value is read as a TOML literal, and as a
    /// bare string when it is not one.
    pub fn push_assignment(&mut self, s: &str) -> Result<()> {
        let (key, raw) = s
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("--set expects key=value, got `{s}`")))?;
        let key = key.trim();
        if key.is_empty() || key.split('.').any(str::is_empty) {
            return Err(CliError::Usage(format!("bad key `{key}` in --set")));
        }
        self.entries.push((key.to_string(), parse_literal(raw.trim())));
        Ok(())
    }

    pub fn push(&mut self, key: &str, value: impl Into<Value>) {
        self.entries.push((key.to_string(), value.into()));
    }

    pub fn push_opt<V: Into<Value>>(&mut self, key: &str, value: Option<V>) {
        if let Some(v) = value {
            self.push(key, v);
        }
    }

    pub fn extend(&mut self, other: Overrides) {
        self.entries.extend(other.entries);
    }
}

fn parse_literal(raw: &str) -> Value {
    format!("v = {raw}")
        .parse::<Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| Value::String(raw.to_string()))
}

/// Loads and resolves a config, returning it with its canonical TOML text.
pub fn resolve<T: Experiment>(file: Option<&Path>, overrides: &Overrides) -> Result<Resolved<T>> {
    let mut overlay = match file {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
            text.parse::<Table>()
                .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?
        }
        None => Table::new(),
    };
    for (key, value) in &overrides.entries {
        set_path(&mut overlay, key, value.clone())?;
    }
    let mut merged = Table::try_from(T::default()).map_err(CliError::usage)?;
    merge(&mut merged, &overlay);
    let config: T = Value::Table(merged)
        .try_into()
        .map_err(|e: toml::de::Error| CliError::Usage(format!("invalid config: {}", e.message())))?;
    let resolved = Table::try_from(&config).map_err(CliError::usage)?;
    check_known("", &overlay, &resolved)?;
    config.validate()?;
    Resolved::new(config)
}

pub struct Resolved<T> {
    pub config: T,
    pub text: String,
    pub hash: String,
}

impl<T: Experiment> Resolved<T> {
    pub fn new(config: T) -> Result<Self> {
        let text = toml::to_string(&config).map_err(CliError::usage)?;
        let hash = sha256_hex(text.as_bytes());
        Ok(Resolved { config, text, hash })
    }
}

fn set_path(table: &mut Table, key: &str, value: Value) -> Result<()> {
    let mut parts = key.split('.').peekable();
    let mut cur = table;
    while let Some(part) = parts.next() {
        if parts.peek().is_none() {
            cur.insert(part.to_string(), value);
            return Ok(());
        }
        let next = cur
            .entry(part.to_string())
            .or_insert_with(|| Value::Table(Table::new()));
        cur = next
            .as_table_mut()
            .ok_or_else(|| CliError::Usage(format!("`{part}` in `{key}` is not a table")))?;
    }
    unreachable!("split yields at least one part")
}

fn merge(base: &mut Table, overlay: &Table) {
    for (k, v) in overlay {
        match (base.get_mut(k), v) {
            (Some(Value::Table(b)), Value::Table(o)) if !TAG_KEYS.iter().any(|t| o.contains_key(*t)) => {
                merge(b, o)
            }
            _ => {
                base.insert(k.clone(), v.clone());
            }
        }
    }
}

fn check_known(prefix: &str, overlay: &Table, resolved: &Table) -> Result<()> {
    for (k, v) in overlay {
        let path = if prefix.is_empty() {
            k.clone()
        } else {
            format!("{prefix}.{k}")
        };
        match (resolved.get(k), v) {
            (None, Value::Table(t)) if t.is_empty() => {}
            (None, _) => return Err(CliError::Usage(format!("unknown config key `{path}`"))),
            (Some(Value::Table(r)), Value::Table(o)) => check_known(&path, o, r)?,
            _ => {}
        }
    }
    Ok(())
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// An integer flag as a TOML value; TOML integers are signed 64-bit.
pub fn int<T: TryInto<i64> + Copy + std::fmt::Display>(x: T) -> Result<Value> {
    x.try_into()
        .map(Value::Integer)
        .map_err(|_| CliError::Usage(format!("{x} does not fit in a 64-bit signed integer")))
}
