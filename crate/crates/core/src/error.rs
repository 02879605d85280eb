use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("amplitude vector has length {got}, grid expects {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("state has zero or non-finite norm")]
    ZeroState,

    #[error("invalid energy window: {0}")]
    InvalidWindow(String),

    #[error("energy window lies {distance} from the critical set, margin is {margin}")]
    WindowTouchesThreshold { distance: f64, margin: f64 },

    #[error("R_f is singular at x = 0")]
    RfSingular,

    #[error("quadrature did not reach tolerance {tol:e} (estimate {estimate:e})")]
    Quadrature { tol: f64, estimate: f64 },

    #[error("invalid localisation function: {0}")]
    InvalidLocalisation(String),

    #[error("invalid potential: {0}")]
    InvalidPotential(String),

    #[error("invalid dispersion: {0}")]
    InvalidDispersion(String),

    #[error("split-step evolution requires omega(p) = p^2 when V != 0")]
    UnsupportedDispersion,

    #[error("invalid time step: {0}")]
    InvalidTimeStep(String),

    #[error("energy {energy} is not admissible: {reason}")]
    InadmissibleEnergy { energy: f64, reason: String },

    #[error("transfer matrix accumulation overflowed at E = {0}")]
    TransferOverflow(f64),

    #[error("state violates the threshold margin: mass {mass:e} within |omega'(p)| < {margin}")]
    ThresholdMargin { mass: f64, margin: f64 },

    #[error("wave-operator limit not converged: Cauchy residual {residual:e} > {tol:e}")]
    MollerNotConverged { residual: f64, tol: f64 },

    #[error("boundary mass {mass:e} exceeds {limit:e} at t = {time}")]
    BoundaryMass { mass: f64, limit: f64, time: f64 },

    #[error("sojourn integrand did not decay below tail threshold before t_max = {t_max}")]
    SojournDivergence { t_max: f64 },

    #[error("Wigner-Smith matrix not Hermitian at E = {energy}: residual {residual:e}")]
    WignerSmithCoarse { energy: f64, residual: f64 },

    #[error("extrapolation needs at least {needed} r-values, got {got}")]
    TooFewRadii { needed: usize, got: usize },

    #[error("invalid scan parameters: {0}")]
    InvalidScan(String),

    #[error("operation requires omega(p) = p^2")]
    RequiresQuadratic,

    #[error("configuration error")]
    Config(#[from] crate::config::ConfigError),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
