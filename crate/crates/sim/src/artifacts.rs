//! Output files, assembled in memory and written together once a run has
//! finished, so a failed run leaves nothing behind.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::Result;

/// Files produced by one command. Every file starts with a comment line
/// naming the command, the config hash and the master seed.
#[derive(Debug, Clone)]
pub struct Artifacts {
    stamp: String,
    files: Vec<(String, Vec<u8>)>,
}

impl Artifacts {
    pub fn new(command: &str, config_hash: &str, seed: u64) -> Self {
        Artifacts {
            stamp: format!("afmtj {command} config={config_hash} seed={seed}"),
            files: Vec::new(),
        }
    }

    pub fn stamp(&self) -> &str {
        &self.stamp
    }

    /// Add a CSV file: comment line, header row, then `rows`.
    pub fn csv<S: AsRef<str>>(
        &mut self,
        name: &str,
        header: &[&str],
        rows: &[Vec<S>],
    ) -> Result<()> {
        let mut out = format!("# {}\n", self.stamp).into_bytes();
        {
            let mut w = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .from_writer(&mut out);
            w.write_record(header)?;
            for r in rows {
                w.write_record(r.iter().map(|s| s.as_ref()))?;
            }
            w.flush()?;
        }
        self.files.push((name.to_string(), out));
        Ok(())
    }

    pub fn summary(&mut self, name: &str, summary: &Summary) {
        let text = format!("# {}\n{}", self.stamp, summary.text);
        self.files.push((name.to_string(), text.into_bytes()));
    }

    /// Add a file whose first line is already a stamp comment.
    pub fn raw(&mut self, name: &str, body: String) {
        self.files.push((name.to_string(), body.into_bytes()));
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.files.iter().map(|(n, _)| n.as_str())
    }

    pub fn get(&self, name: &str) -> Option<&[u8]> {
        self.files
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, b)| b.as_slice())
    }

    /// Write every file into `dir`, creating it if needed.
    pub fn write_to(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let mut written = Vec::with_capacity(self.files.len());
        for (name, bytes) in &self.files {
            let path = dir.join(name);
            std::fs::write(&path, bytes)?;
            written.push(path);
        }
        Ok(written)
    }
}

/// Run summary as flat `key = value` lines, in insertion order. Keys may
/// be dotted; the result parses as TOML.
#[derive(Debug, Clone, Default)]
pub struct Summary {
    text: String,
}

impl Summary {
    pub fn new() -> Self {
        Summary::default()
    }

    pub fn num(&mut self, key: &str, v: f64) -> &mut Self {
        let _ = writeln!(self.text, "{key} = {}", toml_float(v));
        self
    }

    pub fn int(&mut self, key: &str, v: u64) -> &mut Self {
        let _ = writeln!(self.text, "{key} = {v}");
        self
    }

    pub fn flag(&mut self, key: &str, v: bool) -> &mut Self {
        let _ = writeln!(self.text, "{key} = {v}");
        self
    }

    pub fn text(&mut self, key: &str, v: &str) -> &mut Self {
        let _ = writeln!(self.text, "{key} = {}", toml::Value::String(v.to_string()));
        self
    }

    pub fn comment(&mut self, line: &str) -> &mut Self {
        let _ = writeln!(self.text, "# {line}");
        self
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }
}

fn toml_float(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        let s = format!("{v:?}");
        if s.contains(['.', 'e', 'E']) {
            s
        } else {
            format!("{s}.0")
        }
    }
}

/// Fixed-decimal cell.
pub fn fixed(v: f64, decimals: usize) -> String {
    format!("{v:.decimals$}")
}

/// Shortest round-trip representation.
pub fn exact(v: f64) -> String {
    format!("{v:?}")
}

/// Shortest representation of `v` rounded to `digits` significant digits,
/// which drops the noise of unit conversions.
pub fn significant(v: f64, digits: usize) -> String {
    if !v.is_finite() || v == 0.0 {
        return exact(v);
    }
    let r: f64 = format!("{:.*e}", digits.saturating_sub(1), v)
        .parse()
        .unwrap_or(v);
    exact(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_has_stamp_header_and_lf() {
        let mut a = Artifacts::new("demo", "abcd", 7);
        a.csv(
            "t.csv",
            &["V", "x"],
            &[vec!["0.5", "1"], vec!["0.6", "NoSwitch"]],
        )
        .unwrap();
        let text = std::str::from_utf8(a.get("t.csv").unwrap()).unwrap();
        assert_eq!(
            text,
            "# afmtj demo config=abcd seed=7\nV,x\n0.5,1\n0.6,NoSwitch\n"
        );
    }

    #[test]
    fn significant_digits_strip_conversion_noise() {
        assert_eq!(significant(0.0505 * 1e-15 * 1e15, 10), "0.0505");
        assert_eq!(significant(0.8000000000000002, 10), "0.8");
        assert_eq!(significant(123456.0, 3), "123000.0");
        assert_eq!(significant(0.0, 3), "0.0");
    }

    #[test]
    fn summary_parses_as_toml() {
        let mut s = Summary::new();
        s.num("a.b", 3.0)
            .num("c", 1e-7)
            .int("n", 4)
            .flag("ok", true)
            .text("why", "say \"hi\"");
        s.num("inf", f64::INFINITY);
        let t: toml::Table = s.as_str().parse().unwrap();
        assert_eq!(t["a"]["b"].as_float(), Some(3.0));
        assert_eq!(t["c"].as_float(), Some(1e-7));
        assert_eq!(t["why"].as_str(), Some("say \"hi\""));
    }

    #[test]
    fn nothing_is_written_until_asked() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("o");
        let mut a = Artifacts::new("x", "h", 1);
        a.raw("f.txt", "# stamp\n".into());
        assert!(!out.exists());
        a.write_to(&out).unwrap();
        assert!(out.join("f.txt").exists());
    }
}
