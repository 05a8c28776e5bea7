//! Named pass/fail checks, artifacts and the run manifest.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};

use crate::config::RunConfig;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    /// `key=value` summary printed before the verdict.
    pub detail: String,
    /// Tolerance after scaling; `None` for exact or logical checks.
    pub tolerance: Option<f64>,
    pub pass: bool,
}

impl Check {
    pub fn line(&self) -> String {
        format!("{} {}", self.detail, if self.pass { "PASS" } else { "FAIL" })
    }
}

/// Checks and artifacts of one command.
#[derive(Debug, Clone)]
pub struct Report {
    tol_scale: f64,
    pub checks: Vec<Check>,
    pub artifacts: Vec<PathBuf>,
}

impl Report {
    pub fn new(tol_scale: f64) -> Self {
        Self {
            tol_scale,
            checks: Vec::new(),
            artifacts: Vec::new(),
        }
    }

    /// A check without a numeric tolerance.
    pub fn holds(&mut self, name: impl Into<String>, detail: impl Into<String>, pass: bool) -> &Check {
        self.push(name.into(), detail.into(), None, pass)
    }

    /// `|error| <= tolerance · tol_scale`.
    pub fn within(&mut self, name: impl Into<String>, detail: impl Into<String>, error: f64, tolerance: f64) -> &Check {
        let tol = tolerance * self.tol_scale;
        let detail = format!("{} tol={tol}", detail.into());
        self.push(name.into(), detail, Some(tol), error.abs() <= tol)
    }

    fn push(&mut self, name: String, detail: String, tolerance: Option<f64>, pass: bool) -> &Check {
        self.checks.push(Check {
            name,
            detail,
            tolerance,
            pass,
        });
        self.checks.last().expect("just pushed")
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn absorb(&mut self, other: Report) {
        self.checks.extend(other.checks);
        self.artifacts.extend(other.artifacts);
    }

    pub fn print(&self) {
        for c in &self.checks {
            println!("{}", c.line());
        }
    }

    /// Writes `manifest.txt` into `dir` and returns its path.
    pub fn write_manifest(&mut self, dir: &Path, command: &str, config: &RunConfig, started: SystemTime) -> Result<PathBuf> {
        let secs = |t: SystemTime| t.duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        let mut text = String::new();
        writeln!(text, "command={command}")?;
        for (k, v) in config.echo() {
            writeln!(text, "config.{k}={v}")?;
        }
        writeln!(text, "started={}", secs(started))?;
        writeln!(text, "finished={}", secs(SystemTime::now()))?;
        for c in &self.checks {
            writeln!(text, "check.{}={}", c.name, if c.pass { "PASS" } else { "FAIL" })?;
            writeln!(text, "check.{}.detail={}", c.name, c.detail)?;
            if let Some(t) = c.tolerance {
                writeln!(text, "check.{}.tolerance={t}", c.name)?;
            }
        }
        for (i, a) in self.artifacts.iter().enumerate() {
            writeln!(text, "artifact.{i}={}", a.display())?;
        }
        writeln!(text, "result={}", if self.all_pass() { "PASS" } else { "FAIL" })?;
        let path = dir.join("manifest.txt");
        std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }
}
