//! `key = value` run files for `simulate`. Keys are the flag names.

use std::collections::BTreeMap;

pub const SIMULATE_KEYS: [&str; 11] = [
    "alpha", "beta", "stat", "pairs", "overlap", "efficiency", "seed", "a", "a-prime", "b", "b-prime",
];

pub fn parse(text: &str, allowed: &[&str]) -> Result<BTreeMap<String, String>, String> {
    let mut out = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("line {}: expected key = value", lineno + 1))?;
        let key = key.trim();
        if !allowed.contains(&key) {
            return Err(format!("line {}: unknown key `{key}`", lineno + 1));
        }
        if out.insert(key.to_string(), value.trim().to_string()).is_some() {
            return Err(format!("line {}: duplicate key `{key}`", lineno + 1));
        }
    }
    Ok(out)
}
