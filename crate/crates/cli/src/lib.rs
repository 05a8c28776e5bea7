//! Command-line experiments on top of `fuss-spectra-core`.
//!
//! Check lines go to stdout as `<detail> PASS|FAIL`; tables go to `--out`
//! (or stdout when no directory is given) and a `manifest.txt` records the
//! configuration, every check with its tolerance and the artifacts.

pub mod commands;
pub mod config;
pub mod output;
pub mod report;
