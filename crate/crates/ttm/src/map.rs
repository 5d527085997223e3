//! The twisted tent map itself: one scaling-and-fold step, its symmetry
//! maps, fixed points, and the certified escape radius.
//!
//! The folding line FL is the canonical `Im(z) = -1`; the pre-folding line
//! PFL is its preimage `FL / c` and acts as an axis of symmetry.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::param::Parameter;

/// Result of one map application.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FoldResult {
    pub value: Complex64,
    /// True iff the reflect branch fired, i.e. `Im(c*z) < -1`.
    pub folded: bool,
}

/// Outcome of iterating until the orbit leaves a disk or the budget runs out.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EscapeOutcome {
    Escaped { iteration: u32 },
    Survived { final_point: Complex64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EscapeVerdict {
    pub outcome: EscapeOutcome,
    pub radius_used: f64,
}

impl EscapeVerdict {
    pub fn escaped(&self) -> bool {
        matches!(self.outcome, EscapeOutcome::Escaped { .. })
    }
}

/// Reflection about the folding line `Im(z) = -1`: an involution fixing FL.
pub fn reflect_fl(z: Complex64) -> Complex64 {
    z.conj() - Complex64::new(0.0, 2.0)
}

/// One application of the twisted tent map with an explicit raw parameter.
///
/// The linear branch fires when `Im(c*z) >= -1`; on FL both branches agree.
pub fn apply_c(c: Complex64, z: Complex64) -> FoldResult {
    let w = c * z;
    if w.im >= -1.0 {
        FoldResult { value: w, folded: false }
    } else {
        FoldResult { value: reflect_fl(w), folded: true }
    }
}

impl Parameter {
    /// One map step.
    pub fn apply(&self, z: Complex64) -> FoldResult {
        apply_c(self.c, z)
    }

    /// n-fold composition; `apply_n(z, 0)` is the identity.
    pub fn apply_n(&self, z: Complex64, n: u32) -> Complex64 {
        let mut w = z;
        for _ in 0..n {
            w = self.apply(w).value;
        }
        w
    }

    /// True iff `z` lies in the pre-upper half plane, where the map acts by
    /// plain multiplication.
    pub fn in_pre_upper(&self, z: Complex64) -> bool {
        (self.c * z).im >= -1.0
    }

    /// Reflection about the pre-folding line: `(conj(c*z) - 2i) / c`.
    /// Points symmetric about PFL share an image.
    pub fn reflect_pfl(&self, z: Complex64) -> Complex64 {
        (reflect_fl(self.c * z)) / self.c
    }

    /// The unique point FL intersect PFL, `(alpha - 1)/beta - i`.
    pub fn gamma0(&self) -> Result<Complex64> {
        if self.beta == 0.0 {
            return Err(Error::DegenerateReal);
        }
        Ok(Complex64::new((self.alpha - 1.0) / self.beta, -1.0))
    }

    /// `gamma_k = gamma_0 / c^k`.
    pub fn gamma_k(&self, k: i32) -> Result<Complex64> {
        Ok(self.gamma0()? / self.c.powi(k))
    }

    /// The non-zero fixed point `2i(1 - conj(c)) / (|c|^2 - 1)`.
    pub fn ell0(&self) -> Result<Complex64> {
        if (self.r - 1.0).abs() < 1e-15 {
            return Err(Error::UnitModulus);
        }
        let num = Complex64::new(0.0, 2.0) * (Complex64::new(1.0, 0.0) - self.c.conj());
        Ok(num / (self.r * self.r - 1.0))
    }

    /// A radius `R` with the guarantee that `|z| > R` implies `|f(z)| > |z|`
    /// and the orbit modulus grows monotonically thereafter.
    ///
    /// `R = 1.1 * max(2/(r-1), |ell_0|, |gamma_0/c|, 2)`; the 1.1 margin
    /// absorbs rounding. No c-independent constant exists because the
    /// diameter of K blows up as `r -> 1`.
    pub fn escape_radius(&self) -> Result<f64> {
        if self.r <= 1.0 {
            return Err(Error::NotExpanding);
        }
        let mut m = (2.0 / (self.r - 1.0)).max(2.0);
        m = m.max(self.ell0()?.norm());
        if self.beta > 0.0 {
            m = m.max((self.gamma0()? / self.c).norm());
        }
        Ok(1.1 * m)
    }

    /// Iterates until `|f^n(z)| > radius` (reporting the smallest such n) or
    /// the iteration budget is exhausted.
    pub fn iterate_until_escape(
        &self,
        z: Complex64,
        max_iter: u32,
        radius: f64,
    ) -> EscapeVerdict {
        let mut w = z;
        for n in 0..=max_iter {
            if w.norm() > radius {
                return EscapeVerdict {
                    outcome: EscapeOutcome::Escaped { iteration: n },
                    radius_used: radius,
                };
            }
            if n < max_iter {
                w = self.apply(w).value;
            }
        }
        EscapeVerdict {
            outcome: EscapeOutcome::Survived { final_point: w },
            radius_used: radius,
        }
    }
}
