use thiserror::Error;

/// Errors surfaced by the library. The CLI maps these onto exit codes:
/// configuration problems exit 2, numerical failures exit 3, I/O exits 4.
#[derive(Debug, Error)]
pub enum Error {
    #[error("multiplier symbol is not finite at rho = {rho}")]
    SymbolNotFinite { rho: f64 },

    #[error("fields live on different grids ({0})")]
    GridMismatch(&'static str),

    #[error("{what} out of range: {value}")]
    OutOfRange { what: &'static str, value: String },

    #[error("non-finite field values at t = {t}")]
    NonFinite { t: f64 },

    #[error("t = {t} is not a stored sample instant")]
    NotSampled { t: f64 },

    #[error("trajectory holds no samples")]
    EmptyTrajectory,

    #[error("need at least {need} checkpoints, got {got}")]
    TooFewCheckpoints { need: usize, got: usize },

    #[error("pair (q, r) = ({q}, {r}) is not {m}-wave admissible")]
    NotAdmissible { q: f64, r: f64, m: f64 },

    #[error("oscillatory quadrature panel budget exceeded (needed {0} panels)")]
    PanelBudget(usize),

    #[error("field is identically zero")]
    ZeroField,

    #[error("weighted potential is nonzero but the energy denominator vanishes")]
    InconsistentBudget,

    #[error("invalid config: {0}")]
    Config(String),

    #[error("bad trajectory file: {0}")]
    TrajectoryFile(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
