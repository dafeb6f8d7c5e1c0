//! Parameter sweeps, decay fits and the search for near-optimal constructions.

mod divergence;
mod fit;
mod minimize;
mod simplex;
mod sweep;

pub use divergence::{
    helfrich_divergence_demo, two_sphere_surface, DivergenceOptions, DivergenceRow, DivergenceTable,
};
pub use fit::{fit_decay, fit_line, FitResult};
pub use minimize::{
    bump_threshold, minimize_excess, tuned_spec, MinimizeOptions, MinimizeOutcome,
    TUNED_NECK_LENGTH, TUNED_THETA_ETA, TUNED_T_MARGIN,
};
pub use simplex::{nelder_mead, Eval, SimplexOptions, SimplexRun};
pub use sweep::{sweep, SweepGrid, SweepRow, SweepTable};
