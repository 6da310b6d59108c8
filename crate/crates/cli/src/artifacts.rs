//! Output files. Every JSON artifact carries `schema` and the resolved
//! `config`; CSV files start with `# schema` and `# config` comment lines.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use serde::Serialize;
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::error::CliError;

pub const SCHEMA: &str = "ncusp-artifact/1";

pub struct OutDir {
    dir: PathBuf,
    config: Value,
}

impl OutDir {
    pub fn create(config: &RunConfig) -> Result<OutDir, CliError> {
        let dir = config.output.clone();
        fs::create_dir_all(&dir).map_err(|source| CliError::Io {
            path: dir.clone(),
            source,
        })?;
        let config = serde_json::to_value(config).map_err(|e| CliError::Config(e.to_string()))?;
        Ok(OutDir { dir, config })
    }

    fn write(&self, name: &str, text: &str) -> Result<PathBuf, CliError> {
        let path = self.dir.join(name);
        fs::write(&path, text).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?;
        log::info!("wrote {}", path.display());
        Ok(path)
    }

    /// `{"schema", "config", ...body}`; `body` must serialize to an object.
    pub fn json(&self, name: &str, body: &impl Serialize) -> Result<PathBuf, CliError> {
        let mut doc = json!({ "schema": SCHEMA, "config": self.config });
        let Value::Object(fields) = serde_json::to_value(body).map_err(|e| CliError::Config(e.to_string()))? else {
            return Err(CliError::Config(format!("{name}: artifact body is not an object")));
        };
        doc.as_object_mut().expect("object literal").extend(fields);
        let mut text = serde_json::to_string_pretty(&doc).map_err(|e| CliError::Config(e.to_string()))?;
        text.push('\n');
        self.write(name, &text)
    }

    pub fn csv(&self, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<PathBuf, CliError> {
        let mut text = self.comment_lines("# ");
        text.push_str(&header.join(","));
        text.push('\n');
        for row in rows {
            text.push_str(&row.join(","));
            text.push('\n');
        }
        self.write(name, &text)
    }

    /// Writes `body` after its first line, inserting the comment lines.
    pub fn text_after_header(&self, name: &str, body: &str) -> Result<PathBuf, CliError> {
        let (first, rest) = body.split_once('\n').unwrap_or((body, ""));
        let text = format!("{first}\n{}{rest}", self.comment_lines("# "));
        self.write(name, &text)
    }

    fn comment_lines(&self, prefix: &str) -> String {
        let mut s = String::new();
        writeln!(s, "{prefix}schema {SCHEMA}").unwrap();
        writeln!(s, "{prefix}config {}", self.config).unwrap();
        s
    }
}

/// Shortest representation that reads back to the same `f64`.
pub fn num(v: f64) -> String {
    format!("{v:?}")
}
