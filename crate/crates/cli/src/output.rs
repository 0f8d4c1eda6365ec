//! Result rows and run directories.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::Value;

/// Version of `results.json`, `chain.json` and `expectations.json`.
pub const SCHEMA_VERSION: u32 = 1;

/// Version of the trace CSV column layout.
pub const TRACE_SCHEMA_VERSION: u32 = 1;

/// How `value` is compared against `target`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "amount", rename_all = "snake_case")]
pub enum Tolerance {
    /// `|value - target| <= amount`.
    Absolute(f64),
    /// `|value - target| <= amount * |target|`.
    Relative(f64),
    /// Exact rational equality or an exact inequality.
    Exact,
    /// `value <= amount`.
    AtMost(f64),
    /// `value >= amount`.
    AtLeast(f64),
}

impl Tolerance {
    pub fn check(&self, value: f64, target: f64) -> bool {
        match *self {
            Tolerance::Absolute(a) => (value - target).abs() <= a,
            Tolerance::Relative(r) => (value - target).abs() <= r * target.abs(),
            Tolerance::Exact => value == target,
            Tolerance::AtMost(a) => value <= a,
            Tolerance::AtLeast(a) => value >= a,
        }
    }
}

/// One measured quantity of an experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRow {
    pub experiment: String,
    pub command: String,
    pub suite: Option<String>,
    pub parameters: Value,
    pub metric: String,
    pub value: Value,
    pub target: Option<Value>,
    pub tolerance: Option<Tolerance>,
    pub pass: bool,
    pub wall_time_s: f64,
}

/// A row before the experiment-level fields are stamped on.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub metric: String,
    pub parameters: Value,
    pub value: Value,
    pub target: Option<Value>,
    pub tolerance: Option<Tolerance>,
    pub pass: bool,
}

impl Row {
    /// A reported quantity without a pass criterion.
    pub fn info(metric: impl Into<String>, parameters: Value, value: impl Into<Value>) -> Self {
        Self {
            metric: metric.into(),
            parameters,
            value: value.into(),
            target: None,
            tolerance: None,
            pass: true,
        }
    }

    /// A float compared with `tolerance`.
    pub fn checked(
        metric: impl Into<String>,
        parameters: Value,
        value: f64,
        target: f64,
        tolerance: Tolerance,
    ) -> Self {
        Self {
            metric: metric.into(),
            parameters,
            value: value.into(),
            target: Some(target.into()),
            tolerance: Some(tolerance),
            pass: value.is_finite() && tolerance.check(value, target),
        }
    }

    /// An exact claim whose truth was decided by the caller.
    pub fn exact(
        metric: impl Into<String>,
        parameters: Value,
        value: impl Into<Value>,
        target: impl Into<Value>,
        pass: bool,
    ) -> Self {
        Self {
            metric: metric.into(),
            parameters,
            value: value.into(),
            target: Some(target.into()),
            tolerance: Some(Tolerance::Exact),
            pass,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ResultsFile<'a> {
    pub schema_version: u32,
    pub trace_schema_version: u32,
    pub experiment: &'a str,
    pub command: String,
    pub seed: u64,
    pub pair: Value,
    pub files: Vec<String>,
    pub all_pass: bool,
    pub rows: &'a [ResultRow],
}

/// Creates `root/<id>-run-NNN` with the next unused `NNN`.
///
/// Earlier run directories are never reused, so reruns do not touch
/// previous outputs.
pub fn create_run_dir(root: &Path, id: &str) -> Result<PathBuf> {
    fs::create_dir_all(root).with_context(|| format!("creating {}", root.display()))?;
    let prefix = format!("{id}-run-");
    let mut next = 1u32;
    for entry in fs::read_dir(root)? {
        let name = entry?.file_name();
        if let Some(k) = name
            .to_str()
            .and_then(|n| n.strip_prefix(&prefix))
            .and_then(|k| k.parse::<u32>().ok())
        {
            next = next.max(k + 1);
        }
    }
    loop {
        let dir = root.join(format!("{prefix}{next:03}"));
        match fs::create_dir(&dir) {
            Ok(()) => return Ok(dir),
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => next += 1,
            Err(e) => return Err(e).with_context(|| format!("creating {}", dir.display())),
        }
    }
}

/// Writes pretty JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}
