use alloc::string::String;
use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A caller-supplied argument is out of its allowed range.
    InvalidArgument(String),
    /// The mesh topology or orientation is not a conforming CCW tessellation.
    InvalidMesh {
        cell: Option<usize>,
        reason: String,
    },
    /// A cell with zero (or non-finite) area.
    DegenerateCell {
        cell: usize,
        area: f64,
    },
    /// Two cell centroids coincide across a face.
    DegenerateFace {
        face: usize,
    },
    /// A 2×2 tensor whose determinant is below the singularity threshold.
    SingularTensor {
        det: f64,
        scale: f64,
    },
    /// The dyadic sum of a cell stencil is not invertible.
    SingularStencil {
        cell: usize,
        det: f64,
        scale: f64,
    },
    /// The implicit fixed-point iteration produced a non-finite gradient.
    Divergence {
        iteration: usize,
        cell: usize,
    },
    /// A scheme combination that the framework cannot build.
    UnsupportedScheme(String),
    UnknownScheme(String),
    UnknownField(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::InvalidMesh { cell: Some(c), reason } => write!(f, "invalid mesh at cell {c}: {reason}"),
            Error::InvalidMesh { cell: None, reason } => write!(f, "invalid mesh: {reason}"),
            Error::DegenerateCell { cell, area } => {
                write!(f, "degenerate geometry: cell {cell} has area {area:e}")
            }
            Error::DegenerateFace { face } => {
                write!(f, "degenerate geometry: coincident centroids across face {face}")
            }
            Error::SingularTensor { det, scale } => {
                write!(f, "singular tensor: det {det:e} vs scale {scale:e}")
            }
            Error::SingularStencil { cell, det, scale } => {
                write!(f, "singular stencil at cell {cell}: det {det:e} vs scale {scale:e}")
            }
            Error::Divergence { iteration, cell } => {
                write!(f, "implicit iteration diverged at iteration {iteration} (cell {cell})")
            }
            Error::UnsupportedScheme(msg) => write!(f, "unsupported scheme: {msg}"),
            Error::UnknownScheme(id) => write!(
                f,
                "unknown scheme id `{id}` (valid: gg:mean, gg:idw, gg:skew, mgg, mgg:alpha=<v>, ulsq, wlsq:q=<v>, \
                 flsq, flsq:alpha=<v>, tg, tg:w=<v>, flex:<base>:alpha=<v|ndotr>:<two-step|implicit>)"
            ),
            Error::UnknownField(id) => {
                write!(f, "unknown field id `{id}` (valid: linear:c0,c1,c2, quadratic, trig, exp)")
            }
        }
    }
}

impl core::error::Error for Error {}
