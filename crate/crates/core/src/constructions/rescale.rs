use crate::energy::{integrate, Integrand};
use crate::surface::{Similarity, SurfaceAssembly};
use crate::{Error, Result, Vec3};

/// Scales about the origin so that the quadrature area equals `target`.
/// Ball containment is re-established by sampling afterwards.
pub fn rescale_to_area(
    asm: &SurfaceAssembly,
    target: f64,
    tol: f64,
) -> Result<(SurfaceAssembly, f64)> {
    if !(target > 0.0) {
        return Err(Error::InvalidArgument(format!("target area {target}")));
    }
    let area = integrate(asm, Integrand::Area, tol)?.value;
    let lam = (target / area).sqrt();
    let mut out = asm.transformed(&Similarity::new(lam, Vec3::zeros()));
    out.refresh_ball();
    Ok((out, lam))
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::constructions::{flattened_sphere, genus_surface, GenusSurfaceSpec};
    use crate::energy::{energy_report, HelfrichParams};

    #[test]
    fn hits_target_area() {
        let asm = genus_surface(&GenusSurfaceSpec::new(2, 1, 0.1, 3.0, 0.5)).unwrap();
        let (out, lam) = rescale_to_area(&asm, 8.0 * PI, 1e-10).unwrap();
        let (a, b) = (
            energy_report(&asm, HelfrichParams::default(), 1e-10).unwrap(),
            energy_report(&out, HelfrichParams::default(), 1e-10).unwrap(),
        );
        assert!((b.area - 8.0 * PI).abs() < 1e-8);
        assert!((b.area - lam * lam * a.area).abs() < 1e-8);
        assert!((b.willmore - a.willmore).abs() < 1e-8);
        // without a bump the inner sheet is too small to reach 8 pi inside the ball
        assert!(lam > 1.0 && out.meta.ball_radius.is_none());
        let (half, _) = rescale_to_area(&asm, 0.5 * a.area, 1e-10).unwrap();
        assert_eq!(half.meta.ball_radius, Some(1.0));
    }

    #[test]
    fn rejects_bad_target() {
        assert!(rescale_to_area(&flattened_sphere(0.1).unwrap(), 0.0, 1e-9).is_err());
    }
}
