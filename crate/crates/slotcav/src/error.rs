//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    // Geometry / mesh
    #[error("invalid specification: {0}")]
    InvalidSpec(String),
    #[error("geometry too large: rods and slot do not fit inside the {0} x {1} m domain")]
    GeometryTooLarge(f64, f64),
    #[error("invalid bridge: height {height} m exceeds rod height {rod_height} m")]
    InvalidBridge { height: f64, rod_height: f64 },
    #[error("slot spans only {cells} mesh cells; at least {required} required")]
    SlotUnderResolved { cells: usize, required: usize },

    // Mode solving
    #[error("no guided mode: no eigenvalue above the cladding light line (n_clad = {n_clad})")]
    NoGuidedMode { n_clad: f64 },
    #[error("eigensolver did not converge within {iterations} iterations (best residual {residual:.3e})")]
    NotConverged { iterations: usize, residual: f64 },
    #[error("no quasi-TE mode: no guided mode is Ex-dominant")]
    NoQuasiTeMode,
    #[error("zero field: mode carries no power or energy")]
    ZeroField,

    // QED post-processing
    #[error("leaky mode: boundary energy fraction {fraction:.3e} exceeds threshold {threshold:.3e}")]
    LeakyMode { fraction: f64, threshold: f64 },
    #[error("point ({0}, {1}) lies outside the computational domain")]
    PointOutsideDomain(f64, f64),

    // Slab oracle
    #[error("mode {mode_index} is below cutoff (only {guided} guided)")]
    ModeCutoff { mode_index: usize, guided: usize },

    // Emitters
    #[error("unknown emitter {0:?}")]
    UnknownEmitter(String),
    #[error("emitter {name:?} is missing required parameter {parameter:?}; supply it in the emitter config")]
    MissingEmitterParameter { name: String, parameter: &'static str },

    // DBR / Fabry-Perot
    #[error("mirror reflectivity must lie in [0, 1); got {0}")]
    InvalidReflectivity(f64),
    #[error("no resonance found in the scanned band [{0:.4e}, {1:.4e}] m")]
    NoResonanceFound(f64, f64),

    // Sweeps
    #[error("all sweep cells failed; no guided quasi-TE mode anywhere on the grid")]
    AllCellsFailed,
    #[error("sweep journal does not match this sweep (expected config hash {expected}, found {found})")]
    JournalMismatch { expected: u64, found: u64 },

    // Config / IO
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code for the CLI: 2 for config/validation problems,
    /// 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidSpec(_)
            | Error::GeometryTooLarge(..)
            | Error::InvalidBridge { .. }
            | Error::SlotUnderResolved { .. }
            | Error::UnknownEmitter(_)
            | Error::MissingEmitterParameter { .. }
            | Error::InvalidReflectivity(_)
            | Error::Config(_)
            | Error::Io(_)
            | Error::Json(_) => 2,
            _ => 3,
        }
    }
}
