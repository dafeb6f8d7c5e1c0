use std::f64::consts::PI;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::energy::{integrate_in_ball, integrate_patch, Ball};
use crate::surface::SurfaceAssembly;
use crate::{Error, Result, Vec3};

/// Radii used for the distance to a multiplicity-`m` unit sphere. They avoid
/// `r = 1`, where the sphere's mass profile jumps.
pub const CONVERGENCE_RADII: [f64; 20] = [
    0.25, 0.5, 0.75, 0.9, 0.95, 0.97, 0.98, 0.99, 0.995, 0.998, 0.999, 0.9995, 0.9998, 0.9999,
    1.0001, 1.001, 1.01, 1.1, 1.5, 2.0,
];

/// Tolerance of the ball integrals used by the diagnostics.
pub const BALL_TOL: f64 = 1e-7;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MassProfile {
    pub center: [f64; 3],
    pub radii: Vec<f64>,
    pub masses: Vec<f64>,
    pub errors: Vec<f64>,
}

#[derive(Serialize)]
struct MassRow {
    radius: f64,
    mass: f64,
    error: f64,
}

impl MassProfile {
    /// True when masses never decrease by more than their error estimates.
    pub fn is_monotone(&self) -> bool {
        (1..self.masses.len()).all(|i| {
            self.radii[i] < self.radii[i - 1]
                || self.masses[i]
                    >= self.masses[i - 1] - self.errors[i] - self.errors[i - 1] - 1e-12
        })
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(w);
        for i in 0..self.radii.len() {
            wr.serialize(MassRow {
                radius: self.radii[i],
                mass: self.masses[i],
                error: self.errors[i],
            })?;
        }
        wr.flush()?;
        Ok(())
    }
}

/// The measure `theta dA` of the balls `B_r(center)`.
pub fn mass_profile(
    asm: &SurfaceAssembly,
    center: Vec3,
    radii: &[f64],
    tol: f64,
) -> Result<MassProfile> {
    let mut masses = Vec::with_capacity(radii.len());
    let mut errors = Vec::with_capacity(radii.len());
    for &r in radii {
        if !(r > 0.0) {
            return Err(Error::InvalidArgument(format!("ball radius {r}")));
        }
        let e = integrate_in_ball(asm, Ball { center, radius: r }, tol)?;
        masses.push(e.value.area);
        errors.push(e.error.area);
    }
    Ok(MassProfile {
        center: center.into(),
        radii: radii.to_vec(),
        masses,
        errors,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub distance: f64,
    pub worst_radius: f64,
    pub profile: MassProfile,
}

/// `sup_j |mu(B_rj(0)) - m sigma(B_rj(0))|` over [`CONVERGENCE_RADII`], where
/// `sigma` is the area measure of the unit sphere.
pub fn convergence_distance(asm: &SurfaceAssembly, m: u32, tol: f64) -> Result<ConvergenceReport> {
    let profile = mass_profile(asm, Vec3::zeros(), &CONVERGENCE_RADII, tol)?;
    let mut distance = 0.0;
    let mut worst_radius = CONVERGENCE_RADII[0];
    for (r, mass) in profile.radii.iter().zip(&profile.masses) {
        let sphere = if *r > 1.0 { 4.0 * PI * m as f64 } else { 0.0 };
        let d = (mass - sphere).abs();
        if d > distance {
            distance = d;
            worst_radius = *r;
        }
    }
    Ok(ConvergenceReport {
        distance,
        worst_radius,
        profile,
    })
}

/// A point given by its patch and parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurfacePoint {
    pub patch: usize,
    pub u: f64,
    pub v: f64,
}

impl SurfacePoint {
    pub fn position(&self, asm: &SurfaceAssembly) -> Vec3 {
        asm.patches[self.patch].point(self.u, self.v)
    }
}

/// `n` points drawn with a seeded generator: a patch with probability
/// proportional to its area, then uniform parameters in its active subdomain.
pub fn random_surface_points(
    asm: &SurfaceAssembly,
    n: usize,
    seed: u64,
) -> Result<Vec<SurfacePoint>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let areas: Vec<f64> = asm
        .patches
        .iter()
        .map(|p| integrate_patch(p, 1e-6).map(|e| e.value.area))
        .collect::<Result<_>>()?;
    let total: f64 = areas.iter().sum();
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let mut pick = rng.gen::<f64>() * total;
        let mut idx = areas.len() - 1;
        for (i, a) in areas.iter().enumerate() {
            if pick < *a {
                idx = i;
                break;
            }
            pick -= a;
        }
        let p = &asm.patches[idx];
        let d = p.domain;
        for _ in 0..1000 {
            let u = d.u0 + rng.gen::<f64>() * d.width();
            let v = d.v0 + rng.gen::<f64>() * d.height();
            if p.contains(u, v) {
                out.push(SurfacePoint { patch: idx, u, v });
                break;
            }
        }
    }
    Ok(out)
}

/// The sample point of the assembly closest to `x`.
pub fn nearest_surface_point(asm: &SurfaceAssembly, x: Vec3) -> SurfacePoint {
    let mut best = (
        f64::INFINITY,
        SurfacePoint {
            patch: 0,
            u: 0.0,
            v: 0.0,
        },
    );
    for (i, p) in asm.patches.iter().enumerate() {
        for (u, v) in p.samples(128) {
            let d = (p.point(u, v) - x).norm();
            if d < best.0 {
                best = (d, SurfacePoint { patch: i, u, v });
            }
        }
    }
    best.1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LiYauRow {
    pub r: f64,
    pub mass_ratio: f64,
    pub willmore_term: f64,
    pub rhs: f64,
    pub error: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LiYauReport {
    pub center: [f64; 3],
    pub density_radius: f64,
    pub density: f64,
    pub density_error: f64,
    pub rows: Vec<LiYauRow>,
    pub holds: bool,
}

/// Checks `Theta^2(x) <= mu(B_r(x)) / (pi r^2) + W(M in B_r(x)) / (4 pi)` for
/// each radius. The density is estimated by the mass ratio at a quarter of the
/// smallest radius.
pub fn li_yau_at(asm: &SurfaceAssembly, x: Vec3, radii: &[f64], tol: f64) -> Result<LiYauReport> {
    let rmin = radii.iter().copied().fold(f64::INFINITY, f64::min);
    if !(rmin > 0.0) {
        return Err(Error::InvalidArgument(
            "Li-Yau check needs positive radii".into(),
        ));
    }
    let s = 0.25 * rmin;
    let ds = integrate_in_ball(
        asm,
        Ball {
            center: x,
            radius: s,
        },
        tol,
    )?;
    let density = ds.value.area / (PI * s * s);
    let density_error = ds.error.area / (PI * s * s);
    let mut rows = Vec::with_capacity(radii.len());
    for &r in radii {
        let e = integrate_in_ball(
            asm,
            Ball {
                center: x,
                radius: r,
            },
            tol,
        )?;
        let mass_ratio = e.value.area / (PI * r * r);
        let willmore_term = 0.25 * e.value.h2 / (4.0 * PI);
        let error = e.error.area / (PI * r * r) + 0.25 * e.error.h2 / (4.0 * PI) + density_error;
        let rhs = mass_ratio + willmore_term;
        rows.push(LiYauRow {
            r,
            mass_ratio,
            willmore_term,
            rhs,
            error,
            holds: density <= rhs + error + 1e-9,
        });
    }
    let holds = rows.iter().all(|r| r.holds);
    Ok(LiYauReport {
        center: x.into(),
        density_radius: s,
        density,
        density_error,
        rows,
        holds,
    })
}

/// [`li_yau_at`] after moving `center` to the nearest sample point.
pub fn li_yau_density_check(
    asm: &SurfaceAssembly,
    center: Vec3,
    radii: &[f64],
    tol: f64,
) -> Result<LiYauReport> {
    let p = nearest_surface_point(asm, center).position(asm);
    li_yau_at(asm, p, radii, tol)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::constructions::{flattened_sphere, unit_sphere};
    use crate::surface::{
        AssemblyMeta, Disc, Mask, ParamPatch, PatchKind, PlanarRegion, PlaneChart, Rect,
    };

    fn flat_disc(radius: f64) -> SurfaceAssembly {
        let reg = PlanarRegion {
            outer: Disc::new([0.0, 0.0], radius),
            holes: vec![],
        };
        let p = ParamPatch::new(
            Arc::new(PlaneChart { height: 0.0 }),
            Rect::new(-radius, radius, -radius, radius),
            PatchKind::Graph,
        )
        .with_mask(Mask::Planar(reg));
        SurfaceAssembly::new(vec![p], AssemblyMeta::default())
    }

    #[test]
    fn sphere_mass_profile_is_archimedean() {
        let radii = [0.1, 0.5, 1.0, 1.5, 1.99, 2.5];
        let p = mass_profile(&unit_sphere(1), Vec3::new(0.0, 0.0, 1.0), &radii, 1e-10).unwrap();
        for (r, m) in radii.iter().zip(&p.masses) {
            let exact = PI * r.min(2.0).powi(2);
            assert!((m - exact).abs() < 1e-8, "r {r}: {m} vs {exact}");
        }
        assert!(p.is_monotone());
        assert!(mass_profile(&unit_sphere(1), Vec3::zeros(), &[0.0], 1e-9).is_err());
    }

    #[test]
    fn mass_profile_csv() {
        let p = mass_profile(&unit_sphere(1), Vec3::zeros(), &[0.5, 1.5], 1e-9).unwrap();
        let mut buf = Vec::new();
        p.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "radius,mass,error");
        assert!(lines[1].starts_with("0.5,0.0,") && lines[2].starts_with("1.5,12.566370614359"));
    }

    #[test]
    fn distance_of_the_sphere_itself() {
        let d = convergence_distance(&unit_sphere(2), 2, BALL_TOL).unwrap();
        assert!(d.distance < 1e-6);
        assert!(
            convergence_distance(&unit_sphere(1), 2, BALL_TOL)
                .unwrap()
                .distance
                > 4.0 * PI - 1e-6
        );
    }

    #[test]
    fn distance_of_a_flat_disc() {
        // area 8 pi; the worst radius is the first one above 1
        let r = 8f64.sqrt();
        let d = convergence_distance(&flat_disc(r), 2, 1e-9).unwrap();
        let exact = 8.0 * PI - PI * 1.0001f64.powi(2);
        let err = d.profile.errors[14];
        assert!(
            (d.distance - exact).abs() <= err.min(1e-5 * exact),
            "{} vs {exact} (+- {err})",
            d.distance
        );
        assert_eq!(d.worst_radius, 1.0001);
    }

    #[test]
    fn seeded_points_are_reproducible() {
        let asm = flattened_sphere(0.1).unwrap();
        let a = random_surface_points(&asm, 30, 5).unwrap();
        assert_eq!(a, random_surface_points(&asm, 30, 5).unwrap());
        assert_ne!(a, random_surface_points(&asm, 30, 6).unwrap());
        assert!(a.iter().all(|p| asm.patches[p.patch].contains(p.u, p.v)));
        let s = random_surface_points(&unit_sphere(1), 50, 1).unwrap();
        assert!(s
            .iter()
            .all(|p| (p.position(&unit_sphere(1)).norm() - 1.0).abs() < 1e-14));
    }

    #[test]
    fn li_yau_on_the_sphere() {
        let x = Vec3::new(0.6, 0.0, 0.8);
        let r = li_yau_at(&unit_sphere(1), x, &[0.2, 0.5, 1.0], 1e-10).unwrap();
        assert!(r.holds);
        assert!(
            (r.density - 1.0).abs() <= r.density_error.min(1e-5),
            "{r:?}"
        );
        for row in &r.rows {
            assert!((row.mass_ratio - 1.0).abs() <= row.error.min(1e-5));
            assert!((row.willmore_term - row.r * row.r / 4.0).abs() <= row.error.min(1e-5));
        }
        assert!(li_yau_at(&unit_sphere(1), x, &[-1.0], 1e-9).is_err());
    }

    #[test]
    fn nearest_point_snaps_to_surface() {
        let p = nearest_surface_point(&unit_sphere(1), Vec3::new(0.0, 0.0, 3.0))
            .position(&unit_sphere(1));
        assert!((p - Vec3::new(0.0, 0.0, 1.0)).norm() < 1e-12);
        let r =
            li_yau_density_check(&unit_sphere(2), Vec3::new(0.0, 0.0, 1.1), &[0.3], 1e-9).unwrap();
        assert!((r.density - 2.0).abs() < 1e-6);
    }
}
