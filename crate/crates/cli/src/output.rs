use std::fs;
use std::path::PathBuf;

use effbench_core::Result;
use serde::Serialize;

pub struct Output {
    pub json: bool,
    plot_data: Option<PathBuf>,
}

impl Output {
    pub fn new(json: bool, plot_data: Option<PathBuf>) -> Self {
        Self { json, plot_data }
    }

    /// Prints `value` as pretty JSON or `table()` depending on the mode.
    pub fn emit<T: Serialize>(&self, value: &T, table: impl FnOnce() -> String) -> Result<()> {
        if self.json {
            println!("{}", serde_json::to_string_pretty(value)?);
        } else {
            print!("{}", table());
        }
        Ok(())
    }

    pub fn plot(&self, header: &str, rows: impl IntoIterator<Item = String>) -> Result<()> {
        if let Some(path) = &self.plot_data {
            let mut text = format!("{header}\n");
            for r in rows {
                text.push_str(&r);
                text.push('\n');
            }
            fs::write(path, text)?;
        }
        Ok(())
    }
}

/// Left-aligned plain-text table.
pub fn render(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut width: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for r in rows {
        for (w, c) in width.iter_mut().zip(r) {
            *w = (*w).max(c.len());
        }
    }
    let line = |cells: Vec<&str>| -> String {
        let parts: Vec<String> = cells.iter().zip(&width).map(|(c, w)| format!("{c:<w$}")).collect();
        format!("{}\n", parts.join("  ").trim_end())
    };
    let mut out = line(header.to_vec());
    for r in rows {
        out.push_str(&line(r.iter().map(String::as_str).collect()));
    }
    out
}

pub fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_string(), |x| format!("{x:.4}"))
}

/// Default directory for written artifacts.
pub fn default_out_dir() -> PathBuf {
    std::env::var_os("EFFBENCH_OUT").map_or_else(|| PathBuf::from("."), PathBuf::from)
}
