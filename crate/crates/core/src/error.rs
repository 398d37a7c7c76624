use thiserror::Error;

/// Errors raised across the toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("non-positive density {0}")]
    NonPositiveDensity(f64),

    /// The Bernoulli relation has no positive density (cavitation).
    #[error("vacuum: Bernoulli power argument {argument} is not positive")]
    Vacuum { argument: f64 },

    #[error("no sonic threshold: critical-speed radicand {radicand} is not positive")]
    NoSonicThreshold { radicand: f64 },

    #[error("no incident shock: rho1 = {rho1} must exceed rho0 = {rho0}")]
    NoIncidentShock { rho0: f64, rho1: f64 },

    #[error("degenerate wedge angle {0} rad")]
    DegenerateAngle(f64),

    #[error("shock normal undefined: state (2) velocity coincides with state (1)")]
    SingularNormal,

    #[error("no state (2) exists at wedge angle {theta_w} rad")]
    NoRoot { theta_w: f64 },

    #[error("no critical density: u1 < c1 for every rho1 up to {searched_to}")]
    NoCriticalDensity { searched_to: f64 },

    #[error("bracket failure: {0}")]
    Bracket(String),

    #[error("weak-state classification changes sign {crossings} times on (theta_d, pi/2)")]
    NonMonotoneClassification { crossings: usize },

    #[error("no intersection: {0}")]
    NoIntersection(String),

    #[error("initial shock guess infeasible: {0}")]
    GuessInfeasible(String),

    #[error("inner solve diverged: residual {residual:e} after {iterations} iterations")]
    InnerDiverged { residual: f64, iterations: usize },

    #[error("vacuum encountered during the solve at ({xi}, {eta})")]
    VacuumEncountered { xi: f64, eta: f64 },

    #[error("shock sensitivity degenerate at node {node}")]
    SensitivityDegenerate { node: usize },

    #[error("singular linear system at pivot {0}")]
    SingularMatrix(usize),

    #[error("io: {0}")]
    Io(String),

    #[error("parse: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
