use num_complex::Complex64;

use std::f64::consts::PI;

/// The map parameter `c` together with its derived quantities.
///
/// Canonical form has `beta >= 0`; inputs with negative imaginary part are
/// replaced by their conjugate (the two maps are conjugate via reflection
/// about the imaginary axis) and `was_conjugated` records that this happened.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Parameter {
    pub c: Complex64,
    pub alpha: f64,
    pub beta: f64,
    pub r: f64,
    /// arg(c), normalized to [0, 2*pi); canonical parameters have theta in [0, pi].
    pub theta: f64,
    pub was_conjugated: bool,
}

impl Parameter {
    /// Builds the canonical parameter for a raw `c`, conjugating if `Im(c) < 0`.
    pub fn canonicalize(c_raw: Complex64) -> Parameter {
        let was_conjugated = c_raw.im < 0.0;
        let c = if was_conjugated { c_raw.conj() } else { c_raw };
        let mut theta = c.im.atan2(c.re);
        if theta < 0.0 {
            theta += 2.0 * PI;
        }
        Parameter {
            c,
            alpha: c.re,
            beta: c.im,
            r: c.norm(),
            theta,
            was_conjugated,
        }
    }

    pub fn is_real(&self) -> bool {
        self.beta == 0.0
    }
}
