use std::f64::consts::{FRAC_PI_4, PI};
use std::sync::Arc;

use super::profiles::{FlatSphereHeight, SouthCapProfile, TransitionProfile};
use crate::surface::{
    AssemblyMeta, Disc, Mask, Orientation, ParamPatch, PatchKind, PatchRole, PlanarRegion,
    PlaneChart, RadialGraphChart, Rect, Similarity, SphereChart, SurfaceAssembly, TWO_PI,
};
use crate::{Error, Result};

/// Polar angle at which the bottom graph patch of the innermost sheet meets
/// the spherical band.
pub const SOUTH_CAP_ANGLE: f64 = FRAC_PI_4;

/// One flattened sphere of a construction.
#[derive(Clone, Debug)]
pub(crate) struct Sheet {
    pub index: usize,
    pub delta: f64,
    pub placement: Similarity,
    pub orientation: Orientation,
    /// Holes in world xy coordinates; the sheet's axis must be the z-axis
    /// after placement.
    pub holes: Vec<Disc>,
    pub south_cap: bool,
}

impl Sheet {
    pub fn patches(&self) -> Result<Vec<ParamPatch>> {
        let d = self.delta;
        let prof = TransitionProfile::new(d)?;
        let o = self.orientation;
        let k = self.index;
        let lam = self.placement.scale;
        let off = self.placement.offset();
        let theta0 = (4.0 * d).asin();
        let theta1 = if self.south_cap {
            PI - SOUTH_CAP_ANGLE
        } else {
            PI
        };
        let mut out = vec![
            ParamPatch::new(
                Arc::new(SphereChart),
                Rect::new(theta0, theta1, 0.0, TWO_PI),
                PatchKind::SphereCap,
            )
            .with_role(PatchRole::Band { sheet: k }),
            ParamPatch::new(
                Arc::new(RadialGraphChart::new(Arc::new(FlatSphereHeight {
                    r: prof,
                }))),
                Rect::new(2.0 * d, 4.0 * d, 0.0, TWO_PI),
                PatchKind::Graph,
            )
            .with_role(PatchRole::Transition { sheet: k }),
        ];
        let holes = self
            .holes
            .iter()
            .map(|h| {
                Disc::new(
                    [(h.center[0] - off.x) / lam, (h.center[1] - off.y) / lam],
                    h.radius / lam,
                )
            })
            .collect();
        out.push(
            ParamPatch::new(
                Arc::new(PlaneChart {
                    height: FlatSphereHeight::plateau(d),
                }),
                Rect::new(-2.0 * d, 2.0 * d, -2.0 * d, 2.0 * d),
                PatchKind::Graph,
            )
            .with_mask(Mask::Planar(PlanarRegion {
                outer: Disc::new([0.0, 0.0], 2.0 * d),
                holes,
            }))
            .with_role(PatchRole::Flat { sheet: k }),
        );
        for p in &mut out {
            p.orientation = o;
        }
        if self.south_cap {
            out.push(south_cap_patch(SouthCapProfile::ROUND, k).with_orientation(o.flip()));
        }
        Ok(out
            .into_iter()
            .map(|p| p.with_placement(self.placement))
            .collect())
    }
}

pub(crate) fn south_cap_patch(profile: SouthCapProfile, sheet: usize) -> ParamPatch {
    ParamPatch::new(
        Arc::new(RadialGraphChart::new(Arc::new(profile))),
        Rect::new(0.0, SOUTH_CAP_ANGLE.sin(), 0.0, TWO_PI),
        PatchKind::Graph,
    )
    .with_role(PatchRole::SouthCap { sheet })
}

/// The unit sphere flattened near its north pole: a horizontal disc at height
/// `sqrt(1 - 9 delta^2)` over `|x| <= 2 delta`, round outside `|x| < 4 delta`,
/// convex throughout. Oriented by the outward normal.
pub fn flattened_sphere(delta: f64) -> Result<SurfaceAssembly> {
    TransitionProfile::new(delta)?;
    check_convexity(delta)?;
    let sheet = Sheet {
        index: 0,
        delta,
        placement: Similarity::IDENTITY,
        orientation: Orientation::Positive,
        holes: Vec::new(),
        south_cap: true,
    };
    Ok(SurfaceAssembly::new(
        sheet.patches()?,
        AssemblyMeta {
            genus: Some(0),
            sheets: 1,
            ball_radius: Some(1.0),
        },
    ))
}

/// Eigenvalues of the Hessian of the flattened-sphere height at `(x, y)`,
/// from the Cartesian second derivatives.
pub fn flattened_sphere_hessian(delta: f64, x: f64, y: f64) -> [f64; 2] {
    let chart = RadialGraphChart::new(Arc::new(FlatSphereHeight {
        r: TransitionProfile { delta },
    }));
    let [_, _, fxx, fxy, fyy] = chart.cartesian_derivatives(x, y);
    let m = 0.5 * (fxx + fyy);
    let r = (0.25 * (fxx - fyy).powi(2) + fxy * fxy).sqrt();
    [m - r, m + r]
}

fn check_convexity(delta: f64) -> Result<()> {
    let n = 40;
    for i in 1..=n {
        for j in 0..n {
            let s = 4.0 * delta * i as f64 / n as f64;
            let a = TWO_PI * (j as f64 + 0.37) / n as f64;
            let ev = flattened_sphere_hessian(delta, s * a.cos(), s * a.sin());
            if ev[1] > 1e-10 {
                return Err(Error::InfeasibleProfile(format!(
                    "height is not concave at |x| = {s}: eigenvalue {}",
                    ev[1]
                )));
            }
        }
    }
    Ok(())
}

/// The round unit sphere as a single patch, with multiplicity `theta`.
pub fn unit_sphere(theta: u32) -> SurfaceAssembly {
    let p = ParamPatch::new(
        Arc::new(SphereChart),
        Rect::new(0.0, PI, 0.0, TWO_PI),
        PatchKind::SphereCap,
    );
    SurfaceAssembly::new(
        vec![p],
        AssemblyMeta {
            genus: Some(0),
            sheets: 1,
            ball_radius: Some(1.0),
        },
    )
    .with_multiplicity(theta)
}

/// A round sphere of the given radius and centre.
pub fn round_sphere(radius: f64, center: crate::Vec3) -> SurfaceAssembly {
    let mut s = unit_sphere(1).transformed(&Similarity::new(radius, center));
    s.refresh_ball();
    s
}
