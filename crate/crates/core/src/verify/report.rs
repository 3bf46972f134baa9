//! Experiment reports: config echo, tables and verdicts, as JSON or CSV.

use std::io::Write;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha1::{Digest, Sha1};

use crate::Result;

/// Git blob hash (`sha1("blob <len>\0" ++ bytes)`) of the canonical JSON
/// form of `config`.
pub fn config_hash<T: Serialize>(config: &T) -> Result<String> {
    let canonical = serde_json::to_string(&serde_json::to_value(config)?)?;
    let mut hasher = Sha1::new();
    hasher.update(format!("blob {}\0", canonical.len()).as_bytes());
    hasher.update(canonical.as_bytes());
    Ok(hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self {
            name: name.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// CSV with a header row; floats use 17 significant digits.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> Result<()> {
        writeln!(out, "{}", self.columns.join(","))?;
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(format_cell).collect();
            writeln!(out, "{}", cells.join(","))?;
        }
        Ok(())
    }
}

/// `{:.16e}` for floats, plain text otherwise.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn format_cell(v: &Value) -> String {
    match v {
        Value::Number(n) if n.is_f64() => format_float(n.as_f64().expect("f64 number")),
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        Value::Bool(b) => b.to_string(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub check: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub name: String,
    pub seed: u64,
    pub config_hash: String,
    pub config: Value,
    pub tables: Vec<Table>,
    pub verdicts: Vec<Verdict>,
}

impl Report {
    pub fn new<T: Serialize>(name: &str, seed: u64, config: &T) -> Result<Self> {
        Ok(Self {
            name: name.to_string(),
            seed,
            config_hash: config_hash(config)?,
            config: serde_json::to_value(config)?,
            tables: Vec::new(),
            verdicts: Vec::new(),
        })
    }

    pub fn verdict(&mut self, check: &str, passed: bool, detail: String) {
        self.verdicts.push(Verdict {
            check: check.to_string(),
            passed,
            detail,
        });
    }

    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// One `#`-prefixed echo line (seed, hash, config) followed by every
    /// table, separated by blank lines.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> Result<()> {
        writeln!(
            out,
            "# {} seed={} config_hash={} config={}",
            self.name,
            self.seed,
            self.config_hash,
            serde_json::to_string(&self.config)?
        )?;
        for (i, table) in self.tables.iter().enumerate() {
            if i > 0 {
                writeln!(out)?;
            }
            table.write_csv(out)?;
        }
        for v in &self.verdicts {
            writeln!(out, "# verdict {} {} {}", v.check, if v.passed { "pass" } else { "fail" }, v.detail)?;
        }
        Ok(())
    }
}
