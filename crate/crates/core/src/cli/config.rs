//! Command configuration: defaults, a JSON file merged on top, then
//! `path.to.field=value` overrides.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};

/// Recursively copy the fields of `patch` into `base`.
pub fn merge(base: &mut Value, patch: Value) {
    match (base, patch) {
        (Value::Object(b), Value::Object(p)) => {
            for (k, v) in p {
                match b.get_mut(&k) {
                    Some(slot) => merge(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}

/// Parse `key.path=value`; the value is read as JSON and falls back to a
/// plain string.
pub fn parse_override(arg: &str) -> Result<(Vec<String>, Value)> {
    let (path, raw) = arg
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("override '{arg}' is not of the form path=value")))?;
    let keys: Vec<String> = path.split('.').map(str::to_string).collect();
    if keys.iter().any(String::is_empty) {
        return Err(Error::Config(format!("override path '{path}' has an empty segment")));
    }
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    Ok((keys, value))
}

fn set_path(root: &mut Value, keys: &[String], value: Value) -> Result<()> {
    let mut node = root;
    for (depth, key) in keys.iter().enumerate() {
        let obj = node
            .as_object_mut()
            .ok_or_else(|| Error::Config(format!("'{}' is not an object", keys[..depth].join("."))))?;
        if depth + 1 == keys.len() {
            obj.insert(key.clone(), value);
            return Ok(());
        }
        node = obj.entry(key.clone()).or_insert_with(|| Value::Object(Default::default()));
    }
    Ok(())
}

fn get_path<'v>(root: &'v Value, keys: &[String]) -> Option<&'v Value> {
    keys.iter().try_fold(root, |node, k| node.get(k))
}

/// Defaults of `T`, overlaid with the file at `path` and the overrides.
/// Every override must name a field that survives parsing. A `config.json`
/// written by a previous run is accepted as the file.
pub fn load<T>(path: Option<&Path>, overrides: &[String]) -> Result<T>
where
    T: Default + Serialize + DeserializeOwned,
{
    let mut value = serde_json::to_value(T::default())?;
    if let Some(path) = path {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut file: Value =
            serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        if file.get("command").is_some() {
            if let Some(params) = file.get_mut("params") {
                file = params.take();
            }
        }
        merge(&mut value, file);
    }
    let parsed: Vec<(Vec<String>, Value)> = overrides.iter().map(|s| parse_override(s)).collect::<Result<_>>()?;
    for (keys, v) in &parsed {
        set_path(&mut value, keys, v.clone())?;
    }
    let config: T = serde_json::from_value(value).map_err(|e| Error::Config(e.to_string()))?;
    let round = serde_json::to_value(&config)?;
    for (keys, _) in &parsed {
        if get_path(&round, keys).is_none() {
            return Err(Error::Config(format!("unknown configuration field '{}'", keys.join("."))));
        }
    }
    Ok(config)
}
