//! Command outcomes and the single artifact writer.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::Value;

/// Version of every JSON summary layout.
pub const SCHEMA_VERSION: u32 = 1;

/// Everything a command produced. Nothing touches the disk until [`Outcome::write`].
#[derive(Debug)]
pub struct Outcome {
    pub command: &'static str,
    /// Human-readable report, one check per line.
    pub lines: Vec<String>,
    pub summary: Value,
    /// File name and contents, written in order.
    pub artifacts: Vec<(String, String)>,
    pub pass: bool,
}

impl Outcome {
    pub fn new(command: &'static str) -> Self {
        Self { command, lines: Vec::new(), summary: Value::Null, artifacts: Vec::new(), pass: true }
    }

    /// Record a check: one line with its verdict, and a failure if `ok` is false.
    pub fn check(&mut self, ok: bool, line: impl Into<String>) {
        self.pass &= ok;
        self.lines.push(format!("{} {}", if ok { "ok  " } else { "FAIL" }, line.into()));
    }

    pub fn note(&mut self, line: impl Into<String>) {
        self.lines.push(format!("     {}", line.into()));
    }

    pub fn artifact(&mut self, name: impl Into<String>, contents: String) {
        self.artifacts.push((name.into(), contents));
    }

    /// Wrap `body` with the schema version, command name and verdict.
    pub fn set_summary<T: Serialize>(&mut self, body: &T) -> Result<()> {
        let mut v = serde_json::to_value(body)?;
        if let Value::Object(map) = &mut v {
            map.insert("schema_version".into(), SCHEMA_VERSION.into());
            map.insert("command".into(), self.command.into());
            map.insert("pass".into(), self.pass.into());
        }
        self.summary = v;
        Ok(())
    }

    /// Create `dir` and write every artifact into it.
    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        for (name, contents) in &self.artifacts {
            let path = dir.join(name);
            std::fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
        }
        Ok(())
    }
}

/// CSV text from a header and rows of already formatted fields.
pub fn csv(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

/// Fixed scientific format used in every CSV, so reruns compare byte for byte.
pub fn num(x: f64) -> String {
    format!("{x:.12e}")
}

/// One curve of a gnuplot script: a CSV file, its x and y columns,
/// and an optional `(column, value)` string filter selecting rows.
pub struct Curve {
    pub file: String,
    pub x: usize,
    pub y: usize,
    pub filter: Option<(usize, String)>,
    pub title: String,
}

/// Self-contained gnuplot script drawing `curves` into `png`.
pub fn gnuplot_script(png: &str, xlabel: &str, ylabel: &str, logscale: &str, curves: &[Curve]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# gnuplot script; run from this directory: gnuplot {}", png.replace(".png", ".gp"));
    let _ = writeln!(s, "set terminal pngcairo size 900,650");
    let _ = writeln!(s, "set output '{png}'");
    let _ = writeln!(s, "set datafile separator ','");
    if !logscale.is_empty() {
        let _ = writeln!(s, "set logscale {logscale}");
    }
    let _ = writeln!(s, "set xlabel '{xlabel}'\nset ylabel '{ylabel}'\nset key top left\nset grid");
    let parts: Vec<String> = curves
        .iter()
        .map(|c| {
            let y = match &c.filter {
                Some((col, val)) => format!("(strcol({col}) eq \"{val}\" ? ${} : 1/0)", c.y),
                None => format!("{}", c.y),
            };
            format!("'{}' every ::1 using {}:{} with linespoints title '{}'", c.file, c.x, y, c.title)
        })
        .collect();
    let _ = writeln!(s, "plot {}", parts.join(", \\\n     "));
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checks_accumulate_verdict() {
        let mut o = Outcome::new("demo");
        o.check(true, "a");
        assert!(o.pass);
        o.check(false, "b");
        o.check(true, "c");
        assert!(!o.pass);
        assert!(o.lines[1].starts_with("FAIL"));
        o.set_summary(&serde_json::json!({"x": 1})).unwrap();
        assert_eq!(o.summary["schema_version"], 1);
        assert_eq!(o.summary["pass"], false);
    }

    #[test]
    fn csv_and_script_text() {
        let t = csv(&["a", "b"], [vec![num(1.0), num(0.5)], vec!["x,y".into(), "z".into()]]).unwrap();
        assert_eq!(t, "a,b\n1.000000000000e0,5.000000000000e-1\n\"x,y\",z\n");
        let g = gnuplot_script(
            "r.png",
            "delta",
            "error",
            "xy",
            &[Curve { file: "r.csv".into(), x: 2, y: 3, filter: Some((5, "all".into())), title: "k=0".into() }],
        );
        assert!(g.contains("set logscale xy"));
        assert!(g.contains("'r.csv' every ::1 using 2:(strcol(5) eq \"all\" ? $3 : 1/0)"));
    }
}
