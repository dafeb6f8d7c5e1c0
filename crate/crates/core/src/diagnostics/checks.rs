use serde::{Deserialize, Serialize};

use crate::energy::{energy_report, genus_from_gauss, HelfrichParams};
use crate::surface::SurfaceAssembly;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MuellerRoegerReport {
    pub willmore: f64,
    pub area: f64,
    pub margin: f64,
    pub error: f64,
    pub holds: bool,
}

/// Checks `W(M) >= area(M)` for a surface in the closed unit ball.
pub fn mueller_roeger_check(asm: &SurfaceAssembly, tol: f64) -> Result<MuellerRoegerReport> {
    asm.require_unit_ball()?;
    let r = energy_report(asm, HelfrichParams::default(), tol)?;
    let error = r.errors.willmore + r.errors.area;
    let margin = r.willmore - r.area;
    Ok(MuellerRoegerReport {
        willmore: r.willmore,
        area: r.area,
        margin,
        error,
        holds: margin >= -error - 1e-9,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SphereCriterionReport {
    pub energy: f64,
    pub threshold: f64,
    pub certified: bool,
    pub genus: Option<i64>,
}

/// With `chi_K < 0` and `H_0 = 0`, a closed surface in the unit ball whose
/// Helfrich energy is at most `4 chi_H area` must be a sphere. When the bound
/// holds the genus is confirmed from Gauss-Bonnet.
pub fn sphere_criterion_check(
    asm: &SurfaceAssembly,
    params: HelfrichParams,
    tol: f64,
) -> Result<SphereCriterionReport> {
    if !(params.chi_k < 0.0 && params.h0 == 0.0 && params.chi_h > 0.0) {
        return Err(Error::InvalidArgument(
            "sphere criterion needs chi_H > 0, chi_K < 0 and H_0 = 0".into(),
        ));
    }
    asm.require_unit_ball()?;
    let r = energy_report(asm, params, tol)?;
    let threshold = 4.0 * params.chi_h * r.area;
    let certified = r.helfrich <= threshold + r.errors.helfrich;
    let mut genus = None;
    if certified {
        let g = genus_from_gauss(asm, tol)?;
        if g != 0 {
            return Err(Error::ContradictionDetected(format!(
                "energy {} <= {threshold} but Gauss-Bonnet gives genus {g}",
                r.helfrich
            )));
        }
        genus = Some(g);
    }
    Ok(SphereCriterionReport {
        energy: r.helfrich,
        threshold,
        certified,
        genus,
    })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::constructions::{flattened_sphere, round_sphere, unit_sphere};
    use crate::Vec3;

    #[test]
    fn sphere_is_the_equality_case() {
        let r = mueller_roeger_check(&unit_sphere(1), 1e-10).unwrap();
        assert!(r.holds && r.margin.abs() < 1e-9);
        let f = mueller_roeger_check(&flattened_sphere(0.05).unwrap(), 1e-10).unwrap();
        assert!(f.holds && f.margin > 0.0);
    }

    #[test]
    fn needs_the_unit_ball() {
        let big = round_sphere(1.5, Vec3::zeros());
        assert!(matches!(
            mueller_roeger_check(&big, 1e-9),
            Err(Error::NotInBall { .. })
        ));
    }

    #[test]
    fn sphere_criterion() {
        let p = HelfrichParams {
            chi_h: 0.25,
            chi_k: -1.0,
            h0: 0.0,
        };
        let s = sphere_criterion_check(&unit_sphere(1), p, 1e-10).unwrap();
        assert!(s.certified && s.genus == Some(0));
        assert!((s.energy - s.threshold + 4.0 * PI).abs() < 1e-8);
        for bad in [
            HelfrichParams { chi_k: 1.0, ..p },
            HelfrichParams { h0: 0.5, ..p },
            HelfrichParams { chi_h: 0.0, ..p },
        ] {
            assert!(matches!(
                sphere_criterion_check(&unit_sphere(1), bad, 1e-9),
                Err(Error::InvalidArgument(_))
            ));
        }
    }
}
