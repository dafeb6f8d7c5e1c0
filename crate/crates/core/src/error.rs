use thiserror::Error;

use crate::optimizer::MinimizeOutcome;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate point at ({u}, {v}): EG - F^2 = {det:e}")]
    DegeneratePoint { u: f64, v: f64, det: f64 },

    #[error("parameter ({u}, {v}) lies outside the active subdomain")]
    OutsideDomain { u: f64, v: f64 },

    #[error("closed-form curvature disagrees with the fundamental forms: {0}")]
    ClosedFormMismatch(String),

    #[error("infeasible profile: {0}")]
    InfeasibleProfile(String),

    #[error("invalid surface spec: {}", .0.join("; "))]
    InvalidSpec(Vec<String>),

    #[error("gluing conflict: {}", .0.join("; "))]
    GluingConflict(Vec<String>),

    #[error("bump support too large: {0}")]
    SupportTooLarge(String),

    #[error("quadrature did not converge: {0}")]
    NoConvergence(String),

    #[error("total Gauss curvature gives non-integer genus {value}")]
    NonIntegerGenus { value: f64 },

    #[error("surface leaves the closed unit ball (max |p| = {max_radius})")]
    NotInBall { max_radius: f64 },

    #[error("sphere criterion contradicted: {0}")]
    ContradictionDetected(String),

    #[error("mesh is not watertight: {boundary_edges} boundary edges, {nonmanifold_edges} non-manifold edges")]
    NotWatertight {
        boundary_edges: usize,
        nonmanifold_edges: usize,
    },

    #[error("degenerate triangle {index} after welding")]
    DegenerateTriangle { index: usize },

    #[error("triangulation of planar region failed: {0}")]
    Triangulation(String),

    #[error("decay fit needs strictly positive energies")]
    NonPositiveEnergy,

    #[error("fit needs at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },

    #[error("evaluation budget exhausted; best excess {:.6}", .0.excess)]
    BudgetExhausted(Box<MinimizeOutcome>),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
