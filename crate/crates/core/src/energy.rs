//! Area, Willmore, Helfrich and total curvature integrals of assemblies.

use std::f64::consts::PI;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::quadrature::{
    integrate_1d, integrate_2d, rect_disc_area, rect_halfplane_area, rect_vs_disc, Coverage,
    Estimate, Options1d, Options2d, Region2d,
};
use crate::surface::{Densities, Mask, ParamPatch, PlanarRegion, Rect, SurfaceAssembly};
use crate::{Error, Result, Vec3};

/// Default absolute tolerance for energy integrals.
pub const DEFAULT_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HelfrichParams {
    pub chi_h: f64,
    pub chi_k: f64,
    pub h0: f64,
}

impl Default for HelfrichParams {
    /// The choice under which the Helfrich energy equals the Willmore energy.
    fn default() -> Self {
        HelfrichParams {
            chi_h: 0.25,
            chi_k: 0.0,
            h0: 0.0,
        }
    }
}

impl HelfrichParams {
    pub fn energy(&self, d: &Densities) -> f64 {
        self.chi_h * (d.h2 - 2.0 * self.h0 * d.h + self.h0 * self.h0 * d.area) + self.chi_k * d.k
    }

    pub fn energy_error(&self, e: &Densities) -> f64 {
        self.chi_h.abs() * (e.h2 + 2.0 * self.h0.abs() * e.h + self.h0 * self.h0 * e.area)
            + self.chi_k.abs() * e.k
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyErrors {
    pub area: f64,
    pub willmore: f64,
    pub helfrich: f64,
    pub total_gauss: f64,
    pub total_sff: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub area: f64,
    pub mean_curvature: f64,
    pub willmore: f64,
    pub helfrich: f64,
    pub total_gauss: f64,
    pub total_sff: f64,
    pub errors: EnergyErrors,
    pub multiplicity: u32,
    pub params: HelfrichParams,
}

/// One CSV line of an [`EnergyReport`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyRow {
    pub area: f64,
    pub mean_curvature: f64,
    pub willmore: f64,
    pub helfrich: f64,
    pub total_gauss: f64,
    pub total_sff: f64,
    pub err_area: f64,
    pub err_willmore: f64,
    pub err_helfrich: f64,
    pub err_total_gauss: f64,
    pub err_total_sff: f64,
    pub multiplicity: u32,
    pub chi_h: f64,
    pub chi_k: f64,
    pub h0: f64,
}

impl EnergyReport {
    pub fn from_estimate(est: &Estimate, theta: u32, params: HelfrichParams) -> Self {
        let (v, e) = (est.value, est.error);
        EnergyReport {
            area: v.area,
            mean_curvature: v.h,
            willmore: 0.25 * v.h2,
            helfrich: params.energy(&v),
            total_gauss: v.k,
            total_sff: v.sff,
            errors: EnergyErrors {
                area: e.area,
                willmore: 0.25 * e.h2,
                helfrich: params.energy_error(&e),
                total_gauss: e.k,
                total_sff: e.sff,
            },
            multiplicity: theta,
            params,
        }
    }

    pub fn row(&self) -> EnergyRow {
        EnergyRow {
            area: self.area,
            mean_curvature: self.mean_curvature,
            willmore: self.willmore,
            helfrich: self.helfrich,
            total_gauss: self.total_gauss,
            total_sff: self.total_sff,
            err_area: self.errors.area,
            err_willmore: self.errors.willmore,
            err_helfrich: self.errors.helfrich,
            err_total_gauss: self.errors.total_gauss,
            err_total_sff: self.errors.total_sff,
            multiplicity: self.multiplicity,
            chi_h: self.params.chi_h,
            chi_k: self.params.chi_k,
            h0: self.params.h0,
        }
    }

    /// Willmore energy minus area; non-negative inside the unit ball.
    pub fn ball_margin(&self) -> f64 {
        self.willmore - self.area
    }
}

pub fn write_csv<W: Write>(w: W, reports: &[EnergyReport]) -> Result<()> {
    let mut wr = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w);
    for r in reports {
        wr.serialize(r.row())?;
    }
    wr.flush()?;
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Integrand {
    Area,
    MeanCurvature,
    Willmore,
    Gauss,
    SecondFundamentalForm,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scalar {
    pub value: f64,
    pub error: f64,
}

/// A closed ball in space.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ball {
    pub center: Vec3,
    pub radius: f64,
}

fn planar_coverage(cell: &Rect, r: &PlanarRegion) -> Coverage {
    match rect_vs_disc(cell, &r.outer) {
        Coverage::Outside => return Coverage::Outside,
        Coverage::Inside => {}
        Coverage::Partial => return Coverage::Partial,
    }
    let mut all_clear = true;
    for h in &r.holes {
        match rect_vs_disc(cell, h) {
            Coverage::Inside => return Coverage::Outside,
            Coverage::Partial => all_clear = false,
            Coverage::Outside => {}
        }
    }
    if all_clear {
        Coverage::Inside
    } else {
        Coverage::Partial
    }
}

/// A patch's active subdomain, optionally cut down to the preimage of a ball.
pub(crate) struct PatchRegion<'a> {
    pub patch: &'a ParamPatch,
    pub ball: Option<Ball>,
}

impl PatchRegion<'_> {
    /// Distance from the ball centre to the image of the cell centre, and a
    /// bound on how far the image of the cell strays from it.
    fn spatial(&self, cell: &Rect, b: &Ball) -> (f64, f64) {
        let (u, v) = cell.center();
        let j = self.patch.jet(u, v);
        let (hu, hv) = (0.5 * cell.width(), 0.5 * cell.height());
        let reach = j.pu.norm() * hu
            + j.pv.norm() * hv
            + 0.5
                * (j.puu.norm() * hu * hu + 2.0 * j.puv.norm() * hu * hv + j.pvv.norm() * hv * hv);
        ((j.p - b.center).norm(), 1.25 * reach)
    }

    fn ball_coverage(&self, cell: &Rect) -> Coverage {
        let Some(b) = self.ball else {
            return Coverage::Inside;
        };
        let (d, e) = self.spatial(cell, &b);
        if d + e < b.radius {
            Coverage::Inside
        } else if d - e > b.radius {
            Coverage::Outside
        } else {
            Coverage::Partial
        }
    }
}

impl Region2d for PatchRegion<'_> {
    fn classify(&self, cell: &Rect) -> Coverage {
        let planar = match &self.patch.mask {
            Mask::Full => Coverage::Inside,
            Mask::Planar(r) => planar_coverage(cell, r),
        };
        if planar == Coverage::Outside {
            return Coverage::Outside;
        }
        match (planar, self.ball_coverage(cell)) {
            (_, Coverage::Outside) => Coverage::Outside,
            (Coverage::Inside, Coverage::Inside) => Coverage::Inside,
            _ => Coverage::Partial,
        }
    }

    fn clipped_area(&self, cell: &Rect) -> Option<f64> {
        if self.ball_coverage(cell) != Coverage::Inside {
            return None;
        }
        Some(match &self.patch.mask {
            Mask::Full => cell.area(),
            Mask::Planar(r) => {
                rect_disc_area(cell, &r.outer)
                    - r.holes.iter().map(|h| rect_disc_area(cell, h)).sum::<f64>()
            }
        })
    }

    fn contains(&self, u: f64, v: f64) -> bool {
        self.patch.contains(u, v)
            && self.ball.map_or(true, |b| {
                (self.patch.point(u, v) - b.center).norm() <= b.radius
            })
    }

    fn resolved(&self, cell: &Rect) -> bool {
        match self.ball {
            Some(b) => self.spatial(cell, &b).1 < b.radius / 64.0,
            None => true,
        }
    }

    /// Linearises `|p - c| - r` across the cell from its corner values and
    /// clips the cell by the resulting half-plane.
    fn leaf_area(&self, cell: &Rect) -> Option<f64> {
        let b = self.ball?;
        if let Mask::Planar(r) = &self.patch.mask {
            if planar_coverage(cell, r) != Coverage::Inside {
                return None;
            }
        }
        let phi = |u: f64, v: f64| (self.patch.point(u, v) - b.center).norm() - b.radius;
        let (f00, f10) = (phi(cell.u0, cell.v0), phi(cell.u1, cell.v0));
        let (f01, f11) = (phi(cell.u0, cell.v1), phi(cell.u1, cell.v1));
        let (uc, vc) = cell.center();
        let a = phi(uc, vc);
        let du = 0.5 * ((f10 + f11) - (f00 + f01)) / cell.width();
        let dv = 0.5 * ((f01 + f11) - (f00 + f10)) / cell.height();
        Some(rect_halfplane_area(cell, a, du, dv))
    }
}

/// Integrates one patch. Azimuthal charts without a mask reduce to a line
/// integral in `u`; everything else uses the tensor rule.
pub fn integrate_patch(patch: &ParamPatch, tol: f64) -> Result<Estimate> {
    let d = patch.domain;
    if patch.chart.azimuthal() && patch.mask == Mask::Full {
        let span = d.height();
        integrate_1d(
            |u| Ok(patch.line_densities(u)? * span),
            d.u0,
            d.u1,
            &patch.chart.breakpoints(),
            &Options1d { tol, max_depth: 40 },
        )
    } else {
        integrate_2d(
            |u, v| patch.densities(u, v),
            d,
            &PatchRegion { patch, ball: None },
            &Options2d { tol, max_depth: 12 },
        )
    }
}

/// Parameter intervals of an axisymmetric patch on which its meridian lies in
/// a ball centred on the same axis.
fn axial_intervals(patch: &ParamPatch, ball: &Ball) -> Vec<(f64, f64)> {
    let d = patch.domain;
    let v = d.v0;
    let phi = |u: f64| (patch.point(u, v) - ball.center).norm() - ball.radius;
    let mut grid: Vec<f64> = (0..=512)
        .map(|i| d.u0 + d.width() * i as f64 / 512.0)
        .collect();
    grid.extend(
        patch
            .chart
            .breakpoints()
            .into_iter()
            .filter(|&b| b > d.u0 && b < d.u1),
    );
    grid.sort_by(f64::total_cmp);
    let mut cuts = vec![d.u0];
    for w in grid.windows(2) {
        let (mut a, mut b) = (w[0], w[1]);
        let (fa, fb) = (phi(a), phi(b));
        if (fa <= 0.0) == (fb <= 0.0) {
            continue;
        }
        for _ in 0..100 {
            let m = 0.5 * (a + b);
            if (phi(m) <= 0.0) == (fa <= 0.0) {
                a = m;
            } else {
                b = m;
            }
        }
        cuts.push(0.5 * (a + b));
    }
    cuts.push(d.u1);
    cuts.windows(2)
        .filter(|w| w[1] > w[0] && phi(0.5 * (w[0] + w[1])) <= 0.0)
        .map(|w| (w[0], w[1]))
        .collect()
}

/// Integrates the part of a patch whose image lies in `ball`. Axisymmetric
/// patches sharing their axis with the ball reduce to line integrals over the
/// parameter intervals inside the ball.
pub fn integrate_patch_in_ball(patch: &ParamPatch, ball: Ball, tol: f64) -> Result<Estimate> {
    let off = patch.placement.offset();
    let on_axis = off.x == 0.0 && off.y == 0.0 && ball.center.x == 0.0 && ball.center.y == 0.0;
    if on_axis && patch.chart.azimuthal() && patch.mask == Mask::Full {
        let span = patch.domain.height();
        let pieces = axial_intervals(patch, &ball);
        let total: f64 = pieces.iter().map(|(a, b)| b - a).sum();
        let mut acc = Estimate::default();
        for (a, b) in pieces {
            acc = acc
                + integrate_1d(
                    |u| Ok(patch.line_densities(u)? * span),
                    a,
                    b,
                    &patch.chart.breakpoints(),
                    &Options1d {
                        tol: tol * (b - a) / total,
                        max_depth: 40,
                    },
                )?;
        }
        return Ok(acc);
    }
    integrate_2d(
        |u, v| patch.densities(u, v),
        patch.domain,
        &PatchRegion {
            patch,
            ball: Some(ball),
        },
        &Options2d { tol, max_depth: 14 },
    )
}

fn sum_patches<F>(asm: &SurfaceAssembly, f: F) -> Result<Estimate>
where
    F: Fn(&ParamPatch) -> Result<Estimate> + Sync,
{
    let parts: Vec<Result<Estimate>> = asm.patches.par_iter().map(&f).collect();
    let mut total = Estimate::default();
    for p in parts {
        total = total + p?;
    }
    let theta = asm.multiplicity as f64;
    Ok(Estimate {
        value: total.value * theta,
        error: total.error * theta,
    })
}

/// All five integrals at once, multiplicity applied. The absolute tolerance
/// is shared out evenly between patches.
pub fn integrate_all(asm: &SurfaceAssembly, tol: f64) -> Result<Estimate> {
    let per = tol / asm.patches.len().max(1) as f64;
    sum_patches(asm, |p| integrate_patch(p, per))
}

pub fn integrate_in_ball(asm: &SurfaceAssembly, ball: Ball, tol: f64) -> Result<Estimate> {
    let per = tol / asm.patches.len().max(1) as f64;
    sum_patches(asm, |p| integrate_patch_in_ball(p, ball, per))
}

pub fn integrate(asm: &SurfaceAssembly, which: Integrand, tol: f64) -> Result<Scalar> {
    let est = integrate_all(asm, tol)?;
    let pick = |d: Densities| match which {
        Integrand::Area => d.area,
        Integrand::MeanCurvature => d.h,
        Integrand::Willmore => 0.25 * d.h2,
        Integrand::Gauss => d.k,
        Integrand::SecondFundamentalForm => d.sff,
    };
    Ok(Scalar {
        value: pick(est.value),
        error: pick(est.error),
    })
}

pub fn energy_report(
    asm: &SurfaceAssembly,
    params: HelfrichParams,
    tol: f64,
) -> Result<EnergyReport> {
    Ok(EnergyReport::from_estimate(
        &integrate_all(asm, tol)?,
        asm.multiplicity,
        params,
    ))
}

pub fn helfrich(asm: &SurfaceAssembly, params: HelfrichParams, tol: f64) -> Result<Scalar> {
    let r = energy_report(asm, params, tol)?;
    Ok(Scalar {
        value: r.helfrich,
        error: r.errors.helfrich,
    })
}

/// Genus from Gauss-Bonnet, `1 - (integral of K) / (4 pi theta)`, rounded.
pub fn genus_from_gauss(asm: &SurfaceAssembly, tol: f64) -> Result<i64> {
    let k = integrate(asm, Integrand::Gauss, tol)?;
    let g = 1.0 - k.value / (4.0 * PI * asm.multiplicity as f64);
    let rounded = g.round();
    if (g - rounded).abs() > 0.1 {
        return Err(Error::NonIntegerGenus { value: g });
    }
    Ok(rounded as i64)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::constructions::{round_sphere, unit_sphere};
    use crate::surface::{torus_chart, AssemblyMeta, PatchKind, Rect, SphereChart, TWO_PI};
    use proptest::prelude::*;

    fn torus(c: f64, a: f64) -> SurfaceAssembly {
        let p = ParamPatch::new(
            Arc::new(torus_chart(c, a)),
            Rect::new(0.0, TWO_PI, 0.0, TWO_PI),
            PatchKind::Generic,
        );
        SurfaceAssembly::new(
            vec![p],
            AssemblyMeta {
                genus: Some(1),
                sheets: 1,
                ball_radius: None,
            },
        )
    }

    #[test]
    fn torus_energies() {
        for (c, a) in [(2f64.sqrt(), 1.0), (3.0, 1.0), (2.0, 0.3)] {
            let r = energy_report(&torus(c, a), HelfrichParams::default(), 1e-10).unwrap();
            let w = PI * PI * c * c / (a * (c * c - a * a).sqrt());
            assert!((r.area - 4.0 * PI * PI * c * a).abs() < 1e-8);
            assert!((r.willmore - w).abs() < 1e-7, "{} vs {w}", r.willmore);
            assert!(r.total_gauss.abs() < 1e-8);
            assert!((r.total_sff - (4.0 * r.willmore - 2.0 * r.total_gauss)).abs() < 1e-7);
        }
        assert_eq!(genus_from_gauss(&torus(3.0, 1.0), 1e-9).unwrap(), 1);
    }

    #[test]
    fn open_hemisphere_has_no_genus() {
        let p = ParamPatch::new(
            Arc::new(SphereChart),
            Rect::new(0.0, 0.5 * PI, 0.0, TWO_PI),
            PatchKind::SphereCap,
        );
        let asm = SurfaceAssembly::new(vec![p], AssemblyMeta::default());
        assert!(matches!(
            genus_from_gauss(&asm, 1e-9),
            Err(Error::NonIntegerGenus { .. })
        ));
    }

    #[test]
    fn multiplicity_scales_everything() {
        let (a, b) = (
            energy_report(&unit_sphere(1), HelfrichParams::default(), 1e-9).unwrap(),
            energy_report(&unit_sphere(3), HelfrichParams::default(), 1e-9).unwrap(),
        );
        assert!(
            (b.willmore - 3.0 * a.willmore).abs() < 1e-12 && (b.area - 3.0 * a.area).abs() < 1e-12
        );
        assert_eq!(b.multiplicity, 3);
    }

    #[test]
    fn helfrich_of_round_spheres() {
        // radius s: integral of H is -8 pi s, of H^2 is 16 pi, area 4 pi s^2
        let p = HelfrichParams {
            chi_h: 0.7,
            chi_k: -0.4,
            h0: 1.5,
        };
        for s in [0.3, 1.0] {
            let r = energy_report(&round_sphere(s, Vec3::new(0.1, 0.0, 0.0)), p, 1e-10).unwrap();
            let exact = 0.7 * (16.0 * PI + 2.0 * 1.5 * 8.0 * PI * s + 1.5 * 1.5 * 4.0 * PI * s * s)
                - 0.4 * 4.0 * PI;
            assert!(
                (r.helfrich - exact).abs() < 1e-8,
                "{} vs {exact}",
                r.helfrich
            );
        }
    }

    #[test]
    fn csv_header_and_row() {
        let r = energy_report(&unit_sphere(2), HelfrichParams::default(), 1e-9).unwrap();
        let mut buf = Vec::new();
        write_csv(&mut buf, &[r, r]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[0].starts_with("area,mean_curvature,willmore,helfrich,total_gauss"));
        assert!(lines[1].ends_with(",2,0.25,0.0,0.0"), "{}", lines[1]);
    }

    #[test]
    fn ball_containing_everything() {
        let asm = torus(2.0, 0.5);
        let all = integrate_all(&asm, 1e-9).unwrap().value;
        let ball = integrate_in_ball(
            &asm,
            Ball {
                center: Vec3::zeros(),
                radius: 3.0,
            },
            1e-9,
        )
        .unwrap()
        .value;
        assert!((all - ball).max_abs() < 1e-8);
        let none = integrate_in_ball(
            &asm,
            Ball {
                center: Vec3::zeros(),
                radius: 1.0,
            },
            1e-9,
        )
        .unwrap()
        .value;
        assert_eq!(none.max_abs(), 0.0);
    }

    #[test]
    fn axial_and_planar_paths_agree() {
        // the shifted copy has no axial symmetry about the ball centre
        let b = Ball {
            center: Vec3::new(0.0, 0.0, 1.0),
            radius: 0.8,
        };
        let on = integrate_in_ball(&unit_sphere(1), b, 1e-9).unwrap().value;
        let shift = Vec3::new(0.3, 0.0, 0.0);
        let off = integrate_in_ball(
            &round_sphere(1.0, shift),
            Ball {
                center: b.center + shift,
                ..b
            },
            1e-9,
        )
        .unwrap()
        .value;
        assert!(
            (on.area - off.area).abs() < 1e-4 * on.area,
            "{} vs {}",
            on.area,
            off.area
        );
        assert!((on.h2 - off.h2).abs() < 1e-4 * on.h2);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn sphere_cap_area(theta in 0.0f64..PI, phi in 0.0f64..TWO_PI, r in 0.05f64..1.9) {
            // a ball of radius r about a point of the unit sphere cuts out area pi r^2
            let c = Vec3::new(theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos());
            let e = integrate_in_ball(&unit_sphere(1), Ball { center: c, radius: r }, 1e-9).unwrap();
            let exact = PI * r * r;
            prop_assert!((e.value.area - exact).abs() <= 1e-4 * exact + e.error.area, "{} vs {exact}", e.value.area);
            prop_assert!((e.value.h2 - 4.0 * e.value.area).abs() <= 1e-9 + 4.0 * e.error.area);
        }

        #[test]
        fn willmore_scale_invariant(s in 0.05f64..3.0) {
            let r = energy_report(&round_sphere(s, Vec3::new(1.0, 2.0, -1.0)), HelfrichParams::default(), 1e-10).unwrap();
            prop_assert!((r.willmore - 4.0 * PI).abs() < 1e-9);
            prop_assert!((r.area - 4.0 * PI * s * s).abs() < 1e-9 * (1.0 + s * s));
        }
    }
}
