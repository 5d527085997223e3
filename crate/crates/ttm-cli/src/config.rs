//! Flat `key = value` job files. Command-line flags override file values;
//! the effective configuration is echoed into every output's meta sidecar
//! so a run can be reproduced from the sidecar alone.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{bail, Context, Result};
use num_complex::Complex64;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Flat {
    pub entries: BTreeMap<String, String>,
}

impl Flat {
    pub fn parse(text: &str) -> Result<Flat> {
        let mut entries = BTreeMap::new();
        for (ln, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                bail!("config line {}: expected `key = value`", ln + 1);
            };
            entries.insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(Flat { entries })
    }

    pub fn load(path: &Path) -> Result<Flat> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        Self::parse(&text)
    }

    pub fn serialize(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.entries {
            out.push_str(&format!("{k} = {v}\n"));
        }
        out
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|s| s.as_str())
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        self.entries.insert(key.to_string(), value.into());
    }
}

/// Parses complex numbers written `a+bi` (also `a`, `bi`, `i`, `-i`,
/// exponent forms like `1e-3+2e-4i`).
pub fn parse_complex(text: &str) -> Result<Complex64> {
    let s: String = text.chars().filter(|ch| !ch.is_whitespace()).collect();
    if s.is_empty() {
        bail!("empty complex literal");
    }
    let imag_part = |t: &str| -> Result<f64> {
        match t {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => t.parse::<f64>().map_err(|e| anyhow::anyhow!("bad imaginary part {t:?}: {e}")),
        }
    };
    if let Some(body) = s.strip_suffix('i') {
        // Find the sign splitting real and imaginary parts: a '+'/'-' that
        // is not leading and not an exponent sign.
        let bytes = body.as_bytes();
        let mut split = None;
        for i in (1..bytes.len()).rev() {
            let ch = bytes[i] as char;
            if (ch == '+' || ch == '-') && !matches!(bytes[i - 1] as char, 'e' | 'E') {
                split = Some(i);
                break;
            }
        }
        match split {
            Some(i) => {
                let re: f64 = body[..i]
                    .parse()
                    .map_err(|e| anyhow::anyhow!("bad real part {:?}: {e}", &body[..i]))?;
                Ok(Complex64::new(re, imag_part(&body[i..])?))
            }
            None => Ok(Complex64::new(0.0, imag_part(body)?)),
        }
    } else {
        let re: f64 = s.parse().map_err(|e| anyhow::anyhow!("bad real value {s:?}: {e}"))?;
        Ok(Complex64::new(re, 0.0))
    }
}

pub fn format_complex(z: Complex64) -> String {
    if z.im >= 0.0 {
        format!("{}+{}i", z.re, z.im)
    } else {
        format!("{}{}i", z.re, z.im)
    }
}
