use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// The parameter is real (beta = 0), so FL and PFL are parallel and
    /// gamma_0 and the spiral mirror are undefined.
    #[error("parameter is real (beta = 0): construction undefined")]
    DegenerateReal,
    /// |c| = 1: the non-zero fixed point formula degenerates.
    #[error("parameter has unit modulus: ell_0 undefined")]
    UnitModulus,
    /// |c| <= 1: no certified escape radius exists.
    #[error("parameter is not expanding (|c| <= 1): no escape radius")]
    NotExpanding,
    /// The rotation angle does not match the requested j/k.
    #[error("theta does not equal 2*pi*{j}/{k} (or its conjugate)")]
    BadRotation { j: u32, k: u32 },
    /// A spiral chain did not cover the vertex indices an operation needs.
    #[error("spiral chain missing index {0}")]
    InsufficientChain(i64),
    /// An orbit sample had no usable points.
    #[error("orbit sample is empty or escaped")]
    EmptySample,
    /// Every candidate sample escaped before the itinerary length was reached.
    #[error("no samples survived the requested iteration count")]
    NoSurvivors,
    /// The entropy fit window has fewer than 3 usable points.
    #[error("entropy fit window is degenerate ({0} points)")]
    DegenerateWindow(usize),
    #[error("i/o failure: {0}")]
    IoFailure(#[from] std::io::Error),
    #[error("config parse error: {0}")]
    ConfigParse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
