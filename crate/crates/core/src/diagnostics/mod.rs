//! Checks of the inequalities satisfied by surfaces in the unit ball, mass
//! profiles of the induced measures, and triangle meshes.

mod checks;
mod measure;
mod mesh;

pub use checks::{
    mueller_roeger_check, sphere_criterion_check, MuellerRoegerReport, SphereCriterionReport,
};
pub use measure::{
    convergence_distance, li_yau_at, li_yau_density_check, mass_profile, nearest_surface_point,
    random_surface_points, ConvergenceReport, LiYauReport, LiYauRow, MassProfile, SurfacePoint,
    BALL_TOL, CONVERGENCE_RADII,
};
pub use mesh::{euler_genus, is_connected, triangulate, TriMesh};
