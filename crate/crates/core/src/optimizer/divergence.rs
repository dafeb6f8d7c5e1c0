use serde::{Deserialize, Serialize};

use super::fit::{fit_line, FitResult};
use crate::constructions::{
    build_stack, CatenoidProfile, FlatSphereHeight, GenusSurfaceSpec, StackNeck,
};
use crate::energy::{energy_report, HelfrichParams};
use crate::surface::{AssemblyMeta, Similarity, SurfaceAssembly, TWO_PI};
use crate::{Error, Result, Vec3};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DivergenceOptions {
    pub delta: f64,
    pub neck_length: f64,
    pub theta_eta: f64,
    /// Scale of the inner sphere.
    pub inner_scale: f64,
    pub tol: f64,
}

impl Default for DivergenceOptions {
    fn default() -> Self {
        DivergenceOptions {
            delta: 0.1,
            neck_length: 3.0,
            theta_eta: 0.5,
            inner_scale: 0.5,
            tol: 1e-8,
        }
    }
}

/// A flattened unit sphere with a flattened sphere of scale `inner_scale`
/// inside it, the two flat tops facing each other, joined by `g + 1` necks.
pub fn two_sphere_surface(g: u32, opts: &DivergenceOptions) -> Result<SurfaceAssembly> {
    let (d, r, s) = (opts.delta, opts.neck_length, opts.inner_scale);
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "inner scale {s} outside (0, 1)"
        )));
    }
    let profile = CatenoidProfile::new(r)?;
    let rho = s * GenusSurfaceSpec::default_rho(d, g);
    let eta = opts.theta_eta * GenusSurfaceSpec::eta_bound(d, r, rho);
    let h = FlatSphereHeight::plateau(d);
    let gap = (2.0 * r + 1.0) * eta;
    let sheets = [
        Similarity::IDENTITY,
        Similarity::new(s, Vec3::new(0.0, 0.0, h * (1.0 - s) - gap)),
    ];
    let n = g + 1;
    let necks: Vec<StackNeck> = (0..n)
        .map(|i| {
            let a = TWO_PI * i as f64 / n as f64;
            let c = [0.25 * s * d * a.cos(), 0.25 * s * d * a.sin()];
            StackNeck {
                upper: 0,
                center: c,
                eta,
                rho,
            }
        })
        .collect();
    let patches = build_stack(d, profile, &sheets, &necks)?;
    let mut asm = SurfaceAssembly::new(
        patches,
        AssemblyMeta {
            genus: Some(g),
            sheets: 2,
            ball_radius: None,
        },
    );
    asm.refresh_ball();
    Ok(asm)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DivergenceRow {
    pub genus: u32,
    pub necks: u32,
    pub energy: f64,
    pub willmore: f64,
    pub total_gauss: f64,
    pub area: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DivergenceTable {
    pub params: HelfrichParams,
    pub rows: Vec<DivergenceRow>,
    /// Least-squares line of energy against genus.
    pub fit: FitResult,
}

impl DivergenceTable {
    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(w);
        for r in &self.rows {
            wr.serialize(r)?;
        }
        wr.flush()?;
        Ok(())
    }
}

/// Helfrich energies of the two-sphere surfaces of each genus. With
/// `chi_K > 0` the energy falls by about `4 pi chi_K` per handle, since the
/// Willmore part stays bounded.
pub fn helfrich_divergence_demo(
    params: HelfrichParams,
    genera: &[u32],
    opts: &DivergenceOptions,
) -> Result<DivergenceTable> {
    if !(params.chi_k >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "chi_K = {} must be non-negative",
            params.chi_k
        )));
    }
    let mut rows = Vec::with_capacity(genera.len());
    for &g in genera {
        let asm = two_sphere_surface(g, opts)?;
        let r = energy_report(&asm, params, opts.tol)?;
        rows.push(DivergenceRow {
            genus: g,
            necks: g + 1,
            energy: r.helfrich,
            willmore: r.willmore,
            total_gauss: r.total_gauss,
            area: r.area,
        });
    }
    let xs: Vec<f64> = rows.iter().map(|r| r.genus as f64).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.energy).collect();
    let fit = fit_line(&xs, &ys)?;
    Ok(DivergenceTable { params, rows, fit })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::diagnostics::{euler_genus, triangulate};

    #[test]
    fn two_spheres_with_handles() {
        for g in [0, 1, 3] {
            let asm = two_sphere_surface(g, &DivergenceOptions::default()).unwrap();
            let mesh = triangulate(&asm, 32).unwrap();
            assert!(mesh.is_connected());
            assert_eq!(euler_genus(&mesh).unwrap(), g as i64);
            asm.require_unit_ball().unwrap();
        }
    }

    #[test]
    fn rejects_bad_options() {
        let o = DivergenceOptions {
            inner_scale: 1.2,
            ..Default::default()
        };
        assert!(two_sphere_surface(1, &o).is_err());
        let p = HelfrichParams {
            chi_h: 0.25,
            chi_k: -1.0,
            h0: 0.0,
        };
        assert!(helfrich_divergence_demo(p, &[1, 2], &DivergenceOptions::default()).is_err());
    }

    #[test]
    fn gauss_term_drives_the_slope() {
        let p = HelfrichParams {
            chi_h: 0.0,
            chi_k: 1.0,
            h0: 0.0,
        };
        let t = helfrich_divergence_demo(p, &[0, 1, 2], &DivergenceOptions::default()).unwrap();
        for r in &t.rows {
            assert!((r.energy - 4.0 * PI * (1.0 - r.genus as f64)).abs() < 1e-6);
            assert_eq!(r.necks, r.genus + 1);
        }
        assert!((t.fit.slope + 4.0 * PI).abs() < 1e-6 && t.fit.residual < 1e-6);
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        assert!(String::from_utf8(buf)
            .unwrap()
            .starts_with("genus,necks,energy,willmore,total_gauss,area\n"));
    }
}
