use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::profiles::SouthCapProfile;
use super::sphere::SOUTH_CAP_ANGLE;
use crate::surface::{PatchRole, RadialGraphChart, SurfaceAssembly};
use crate::{Error, Result};

/// Inward bump `t * mollifier(x / (alpha sqrt t))` at the south pole of the
/// innermost sheet.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BumpSpec {
    pub t: f64,
    pub alpha: f64,
}

impl BumpSpec {
    /// Radius of the bump's support in world units.
    pub fn support(&self) -> f64 {
        self.alpha * self.t.sqrt()
    }
}

/// Replaces the round south cap of the innermost sheet by the bumped graph.
/// The bump is defined in world units relative to the current placement of
/// that sheet, and any earlier bump is discarded.
pub fn south_pole_bump(asm: &SurfaceAssembly, bump: &BumpSpec) -> Result<SurfaceAssembly> {
    if !(bump.t >= 0.0 && bump.alpha > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "bump t = {}, alpha = {}",
            bump.t, bump.alpha
        )));
    }
    let idx = asm
        .patches
        .iter()
        .enumerate()
        .filter_map(|(i, p)| match p.role {
            PatchRole::SouthCap { sheet } => Some((sheet, i)),
            _ => None,
        })
        .max()
        .map(|(_, i)| i)
        .ok_or_else(|| Error::InvalidArgument("assembly has no south cap patch".into()))?;
    let mut out = asm.clone();
    let patch = &mut out.patches[idx];
    let sigma = patch.placement.scale;
    let cap = sigma * SOUTH_CAP_ANGLE.sin();
    let profile = if bump.t == 0.0 {
        SouthCapProfile::ROUND
    } else {
        if !(bump.support() < cap) {
            return Err(Error::SupportTooLarge(format!(
                "alpha sqrt(t) = {} but the cap has radius {cap}",
                bump.support()
            )));
        }
        SouthCapProfile {
            amp: bump.t / sigma,
            width: bump.support() / sigma,
        }
    };
    patch.chart = Arc::new(RadialGraphChart::new(Arc::new(profile)));
    out.meta.ball_radius = None;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{flattened_sphere, genus_surface, unit_sphere, GenusSurfaceSpec};
    use crate::energy::{energy_report, HelfrichParams};

    #[test]
    fn support_radius() {
        assert!(
            (BumpSpec {
                t: 0.04,
                alpha: 0.5
            }
            .support()
                - 0.1)
                .abs()
                < 1e-15
        );
    }

    #[test]
    fn needs_a_south_cap() {
        assert!(matches!(
            south_pole_bump(
                &unit_sphere(1),
                &BumpSpec {
                    t: 0.01,
                    alpha: 0.5
                }
            ),
            Err(Error::InvalidArgument(_))
        ));
        let base = flattened_sphere(0.1).unwrap();
        assert!(matches!(
            south_pole_bump(&base, &BumpSpec { t: 1.0, alpha: 1.0 }),
            Err(Error::SupportTooLarge(_))
        ));
        assert!(south_pole_bump(
            &base,
            &BumpSpec {
                t: -1.0,
                alpha: 1.0
            }
        )
        .is_err());
    }

    #[test]
    fn bump_goes_on_innermost_sheet() {
        let base = genus_surface(&GenusSurfaceSpec::new(3, 0, 0.1, 3.0, 0.5)).unwrap();
        let b = south_pole_bump(
            &base,
            &BumpSpec {
                t: 0.01,
                alpha: 0.5,
            },
        )
        .unwrap();
        let changed: Vec<_> = base
            .patches
            .iter()
            .zip(&b.patches)
            .filter(|(p, q)| !std::sync::Arc::ptr_eq(&p.chart, &q.chart))
            .collect();
        assert_eq!(changed.len(), 1);
        assert!(matches!(
            changed[0].0.role,
            PatchRole::SouthCap { sheet: 2 }
        ));
        assert!(b.meta.ball_radius.is_none());
    }

    #[test]
    fn bump_adds_area_keeps_topology() {
        let base = flattened_sphere(0.1).unwrap();
        let b = south_pole_bump(
            &base,
            &BumpSpec {
                t: 0.02,
                alpha: 0.5,
            },
        )
        .unwrap();
        let (r0, r1) = (
            energy_report(&base, HelfrichParams::default(), 1e-10).unwrap(),
            energy_report(&b, HelfrichParams::default(), 1e-10).unwrap(),
        );
        assert!(r1.area > r0.area && r1.willmore > r0.willmore);
        assert!((r1.total_gauss - r0.total_gauss).abs() < 1e-8);
    }
}
