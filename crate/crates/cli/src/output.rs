//! CSV and SVG emission.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};

/// A CSV table held in memory; floats use Rust's shortest round-trip
/// decimal form, so identical inputs give identical bytes.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: String,
    pub rows: Vec<String>,
}

impl Table {
    pub fn new(header: &str) -> Self {
        Self {
            header: header.to_string(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, fields: &[&dyn std::fmt::Display]) {
        let mut row = String::new();
        for (i, f) in fields.iter().enumerate() {
            if i > 0 {
                row.push(',');
            }
            write!(row, "{f}").expect("writing to a String");
        }
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let mut s = String::with_capacity(self.rows.len() * 24 + self.header.len() + 1);
        s.push_str(&self.header);
        s.push('\n');
        for r in &self.rows {
            s.push_str(r);
            s.push('\n');
        }
        s
    }
}

pub fn write_text(dir: &Path, name: &str, text: &str) -> Result<PathBuf> {
    let path = dir.join(name);
    std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

/// Writes the table under `dir` if given, otherwise prints it.
pub fn emit(dir: Option<&Path>, name: &str, table: &Table, artifacts: &mut Vec<PathBuf>) -> Result<()> {
    match dir {
        Some(dir) => artifacts.push(write_text(dir, name, &table.render())?),
        None => print!("{}", table.render()),
    }
    Ok(())
}

/// Line plot of `(x, y)` with a dashed vertical marker at `marker`.
pub fn line_plot_svg(title: &str, points: &[(f64, f64)], marker: f64, marker_label: &str) -> String {
    let (width, height, margin) = (640.0, 400.0, 50.0);
    let x_max = points.iter().map(|p| p.0).fold(marker, f64::max) * 1.05;
    // Clip the singular spike at 0 so the body of the curve stays visible.
    let mut ys: Vec<f64> = points.iter().map(|p| p.1).filter(|y| y.is_finite()).collect();
    ys.sort_by(f64::total_cmp);
    let y_max = ys.get(ys.len() * 9 / 10).copied().unwrap_or(1.0).max(1e-12) * 1.5;
    let sx = |x: f64| margin + x / x_max * (width - 2.0 * margin);
    let sy = |y: f64| height - margin - y.min(y_max) / y_max * (height - 2.0 * margin);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="24" font-family="sans-serif" font-size="16" text-anchor="middle">{title}</text>"#,
        width / 2.0
    );
    let (x0, y0) = (sx(0.0), sy(0.0));
    let _ = writeln!(
        s,
        r#"<line x1="{x0}" y1="{y0}" x2="{}" y2="{y0}" stroke="black"/><line x1="{x0}" y1="{y0}" x2="{x0}" y2="{margin}" stroke="black"/>"#,
        width - margin
    );
    let path: Vec<String> = points
        .iter()
        .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
        .collect();
    let _ = writeln!(
        s,
        r#"<polyline fill="none" stroke="steelblue" stroke-width="1.5" points="{}"/>"#,
        path.join(" ")
    );
    let mx = sx(marker);
    let _ = writeln!(
        s,
        r#"<line x1="{mx}" y1="{y0}" x2="{mx}" y2="{margin}" stroke="firebrick" stroke-dasharray="6,4"/>"#
    );
    let _ = writeln!(
        s,
        r#"<text x="{mx}" y="{}" font-family="sans-serif" font-size="12" fill="firebrick" text-anchor="end">{marker_label}</text>"#,
        margin - 6.0
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12" text-anchor="end">{x_max:.3}</text>"#,
        width - margin,
        height - margin + 16.0
    );
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_renders_plain_decimals() {
        let mut t = Table::new("a,b");
        t.push(&[&1, &0.0000001]);
        assert_eq!(t.render(), "a,b\n1,0.0000001\n");
    }

    #[test]
    fn svg_marks_the_edge() {
        let svg = line_plot_svg("d", &[(0.0, 1.0), (6.75, 0.0)], 6.75, "edge = 6.75");
        assert!(svg.starts_with("<svg") && svg.contains("edge = 6.75") && svg.ends_with("</svg>\n"));
    }
}
