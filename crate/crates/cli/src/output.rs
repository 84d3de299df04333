//! Run manifests and the files each subcommand writes.

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Both,
}

impl Format {
    pub fn csv(self) -> bool {
        matches!(self, Format::Csv | Format::Both)
    }

    pub fn json(self) -> bool {
        matches!(self, Format::Json | Format::Both)
    }
}

/// Echo of the invocation written at the top of every output file.
/// `parameters` are flag names and values; passing them back to the same
/// subcommand reproduces the file.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RunManifest {
    pub subcommand: String,
    pub parameters: BTreeMap<String, String>,
    pub tool_version: String,
    pub seed: u64,
}

impl RunManifest {
    pub fn new(subcommand: &str, seed: u64) -> Self {
        Self {
            subcommand: subcommand.to_string(),
            parameters: BTreeMap::new(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
        }
    }

    pub fn param(mut self, key: &str, value: impl ToString) -> Self {
        self.parameters.insert(key.to_string(), value.to_string());
        self
    }
}

pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: Vec<&'static str>) -> Self {
        Self { header, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

/// Outputs of one run: a CSV table and a JSON payload sharing a file stem.
pub struct Report {
    pub stem: &'static str,
    pub manifest: RunManifest,
    pub table: Table,
    pub payload: Value,
}

impl Report {
    pub fn csv(&self) -> String {
        let manifest = serde_json::to_string(&self.manifest).expect("manifest serializes");
        let mut out = format!("# manifest: {manifest}\n");
        out.push_str(&self.table.header.join(","));
        out.push('\n');
        for row in &self.table.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    pub fn json(&self) -> String {
        let mut object = serde_json::Map::new();
        object.insert("manifest".into(), serde_json::to_value(&self.manifest).expect("manifest serializes"));
        match &self.payload {
            Value::Object(fields) => object.extend(fields.clone()),
            other => {
                object.insert("result".into(), other.clone());
            }
        }
        let mut text = serde_json::to_string_pretty(&Value::Object(object)).expect("json serializes");
        text.push('\n');
        text
    }

    /// Writes `<stem>.csv` and/or `<stem>.json` into `dir`.
    pub fn write(&self, dir: &Path, format: Format, csv_name: Option<&str>, json_name: Option<&str>) -> io::Result<()> {
        fs::create_dir_all(dir)?;
        if format.csv() {
            let name = csv_name.map_or_else(|| format!("{}.csv", self.stem), str::to_string);
            fs::write(dir.join(name), self.csv())?;
        }
        if format.json() {
            let name = json_name.map_or_else(|| format!("{}.json", self.stem), str::to_string);
            fs::write(dir.join(name), self.json())?;
        }
        Ok(())
    }
}

/// Shortest round-trip decimal form.
pub fn num(x: f64) -> String {
    format!("{x}")
}
