//! Flattened spheres, flattened catenoids, and the multi-sheeted surfaces of
//! arbitrary genus glued from them.

mod bump;
mod catenoid;
mod genus;
mod profiles;
mod rescale;
mod sphere;

pub use bump::{south_pole_bump, BumpSpec};
pub use catenoid::flattened_catenoid;
pub(crate) use genus::{build_stack, StackNeck};
pub use genus::{
    genus_surface, GenusSurfaceSpec, Violation, ViolationKind, DEFAULT_ALPHA, SPEC_VERSION,
};
pub use profiles::{
    mollifier, smoothstep, smoothstep_integral, CatenoidProfile, FlatSphereHeight, SouthCapProfile,
    TransitionProfile, DELTA_MAX,
};
pub use rescale::rescale_to_area;
pub use sphere::{
    flattened_sphere, flattened_sphere_hessian, round_sphere, unit_sphere, SOUTH_CAP_ANGLE,
};

/// Builds a transition profile after checking its constraints.
pub fn make_transition_profile(delta: f64) -> crate::Result<TransitionProfile> {
    TransitionProfile::new(delta)
}
