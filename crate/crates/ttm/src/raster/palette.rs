use crate::error::{Error, Result};

pub const PALETTE_LEN: usize = 256;

/// 256-entry RGB lookup with a fixed sentinel color for undefined pixels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Palette {
    pub colors: Vec<(u8, u8, u8)>,
    pub sentinel: (u8, u8, u8),
}

impl Default for Palette {
    /// Smooth cyclic default palette; purely deterministic.
    fn default() -> Palette {
        let colors = (0..PALETTE_LEN)
            .map(|i| {
                let t = i as f64 / PALETTE_LEN as f64 * std::f64::consts::TAU;
                let ch = |phase: f64| {
                    (127.5 + 127.5 * (t + phase).sin()).round().clamp(0.0, 255.0) as u8
                };
                (ch(0.0), ch(2.1), ch(4.2))
            })
            .collect();
        Palette { colors, sentinel: (96, 96, 96) }
    }
}

impl Palette {
    /// Parses the text format: 256 lines of "r g b".
    pub fn parse(text: &str) -> Result<Palette> {
        let mut colors = Vec::with_capacity(PALETTE_LEN);
        for (ln, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 3 {
                return Err(Error::ConfigParse(format!(
                    "palette line {}: expected 3 components",
                    ln + 1
                )));
            }
            let mut rgb = [0u8; 3];
            for (slot, part) in rgb.iter_mut().zip(&parts) {
                *slot = part.parse::<u8>().map_err(|e| {
                    Error::ConfigParse(format!("palette line {}: {}", ln + 1, e))
                })?;
            }
            colors.push((rgb[0], rgb[1], rgb[2]));
        }
        if colors.len() != PALETTE_LEN {
            return Err(Error::ConfigParse(format!(
                "palette must have {} entries, got {}",
                PALETTE_LEN,
                colors.len()
            )));
        }
        Ok(Palette { colors, sentinel: (96, 96, 96) })
    }

    pub fn serialize(&self) -> String {
        let mut out = String::new();
        for (r, g, b) in &self.colors {
            out.push_str(&format!("{r} {g} {b}\n"));
        }
        out
    }

    pub fn color(&self, value: u32) -> (u8, u8, u8) {
        self.colors[value as usize % self.colors.len()]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let p = Palette::default();
        let q = Palette::parse(&p.serialize()).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn wrong_length_rejected() {
        assert!(Palette::parse("1 2 3\n").is_err());
    }

    #[test]
    fn modular_lookup() {
        let p = Palette::default();
        assert_eq!(p.color(3), p.color(3 + 256));
    }
}
