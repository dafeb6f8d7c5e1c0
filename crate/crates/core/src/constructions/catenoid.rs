use std::sync::Arc;

use super::profiles::CatenoidProfile;
use crate::surface::{
    AnnulusChart, AssemblyMeta, Cosh, Orientation, ParamPatch, PatchKind, PatchRole, Rect,
    RevolutionChart, Similarity, SurfaceAssembly, TWO_PI,
};
use crate::{Error, Result, Vec3};

/// A catenoidal neck scaled by `eta` and centred at `center`. In its own
/// coordinates it is the catenoid over `|t| <= R + 1` capped by the planes
/// `z = +-(R + 1/2)`, which extend out to radius `outer / eta`.
#[derive(Clone, Debug)]
pub(crate) struct Neck {
    pub index: usize,
    pub profile: CatenoidProfile,
    pub eta: f64,
    pub center: Vec3,
    pub outer: f64,
    pub orientation: Orientation,
}

impl Neck {
    pub fn patches(&self) -> Vec<ParamPatch> {
        let r = self.profile.r;
        let t1 = r + 1.0;
        let place = Similarity::new(self.eta, self.center);
        let o = self.orientation;
        let chart = RevolutionChart {
            f: Arc::new(Cosh),
            g: Arc::new(self.profile),
            catenary: true,
        };
        let mut out = vec![ParamPatch::new(
            Arc::new(chart),
            Rect::new(-t1, t1, 0.0, TWO_PI),
            PatchKind::Revolution,
        )
        .with_orientation(o)
        .with_placement(place)
        .with_role(PatchRole::Neck { neck: self.index })];
        let s0 = t1.cosh();
        let s1 = self.outer / self.eta;
        if s1 > s0 {
            for (upper, o) in [(true, o), (false, o.flip())] {
                let h = if upper {
                    self.profile.plateau()
                } else {
                    -self.profile.plateau()
                };
                out.push(
                    ParamPatch::new(
                        Arc::new(AnnulusChart { height: h }),
                        Rect::new(s0, s1, 0.0, TWO_PI),
                        PatchKind::PlaneAnnulus,
                    )
                    .with_orientation(o)
                    .with_placement(place)
                    .with_role(PatchRole::NeckAnnulus {
                        neck: self.index,
                        upper,
                    }),
                );
            }
        }
        out
    }
}

/// The flattened catenoid with neck length `R`, continued by horizontal
/// annuli out to `outer_radius`. With `outer_radius <= cosh(R + 1)` only the
/// revolution patch is produced.
pub fn flattened_catenoid(r: f64, outer_radius: f64) -> Result<SurfaceAssembly> {
    let profile = CatenoidProfile::new(r)?;
    if !outer_radius.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "outer radius {outer_radius}"
        )));
    }
    let neck = Neck {
        index: 0,
        profile,
        eta: 1.0,
        center: Vec3::zeros(),
        outer: outer_radius,
        orientation: Orientation::Positive,
    };
    Ok(SurfaceAssembly::new(
        neck.patches(),
        AssemblyMeta {
            genus: None,
            sheets: 0,
            ball_radius: None,
        },
    ))
}
