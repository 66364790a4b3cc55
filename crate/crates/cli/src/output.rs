use std::fmt::Write as _;
use std::io::Write as _;

use num_complex::Complex64;

use crate::error::{CliError, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// CSV table with `#` metadata lines ahead of the header.
pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(command: &str, config_hash: &str, metadata: &[(&str, String)], header: &[&str]) -> Self {
        let mut text = format!("# biwave {VERSION}\n# command {command}\n# config_sha256 {config_hash}\n");
        for (k, v) in metadata {
            let _ = writeln!(text, "# {k} {v}");
        }
        text.push_str(&header.join(","));
        text.push('\n');
        Self { text }
    }

    pub fn row(&mut self, reals: &[f64], complexes: &[Complex64], tail: &[f64]) {
        let mut fields: Vec<String> = reals.iter().map(|v| num(*v)).collect();
        for z in complexes {
            fields.push(num(z.re));
            fields.push(num(z.im));
        }
        fields.extend(tail.iter().map(|v| num(*v)));
        self.text.push_str(&fields.join(","));
        self.text.push('\n');
    }

    pub fn into_string(self) -> String {
        self.text
    }
}

pub fn num(v: f64) -> String {
    // no "-0" in the output
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{v:.16e}")
}

/// Writes to `path`, or to stdout when no path is configured.
pub fn emit(path: Option<&str>, contents: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, contents).map_err(|source| CliError::Io {
            path: p.to_string(),
            source,
        }),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(contents.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|source| CliError::Io {
                    path: "<stdout>".into(),
                    source,
                })
        }
    }
}
