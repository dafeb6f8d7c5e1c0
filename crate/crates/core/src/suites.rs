//! Named batteries of numerical checks with machine-readable reports.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constructions::{
    flattened_catenoid, flattened_sphere, flattened_sphere_hessian, genus_surface,
    make_transition_profile, rescale_to_area, round_sphere, south_pole_bump, unit_sphere, BumpSpec,
    CatenoidProfile, FlatSphereHeight, GenusSurfaceSpec, DEFAULT_ALPHA,
};
use crate::diagnostics::{
    convergence_distance, li_yau_at, li_yau_density_check, mueller_roeger_check,
    random_surface_points, sphere_criterion_check, triangulate, BALL_TOL,
};
use crate::energy::{energy_report, genus_from_gauss, EnergyReport, HelfrichParams};
use crate::optimizer::{
    fit_decay, fit_line, helfrich_divergence_demo, tuned_spec, DivergenceOptions,
};
use crate::surface::{
    curvature_at, fundamental_forms, verify_derivatives, Profile1D, Similarity, SurfaceAssembly,
};
use crate::{Error, Result, Vec3};

const TOL: f64 = 1e-9;
pub const LI_YAU_RADII: [f64; 3] = [0.1, 0.3, 0.6];
pub const LI_YAU_POINTS: usize = 20;
pub const MESH_RESOLUTION: usize = 48;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Profiles,
    Curvature,
    GaussBonnet,
    MuellerRoeger,
    LiYau,
    Convergence,
    Decay,
    Divergence,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::Profiles,
        Suite::Curvature,
        Suite::GaussBonnet,
        Suite::MuellerRoeger,
        Suite::LiYau,
        Suite::Convergence,
        Suite::Decay,
        Suite::Divergence,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Profiles => "profiles",
            Suite::Curvature => "curvature",
            Suite::GaussBonnet => "gauss-bonnet",
            Suite::MuellerRoeger => "mueller-roeger",
            Suite::LiYau => "li-yau",
            Suite::Convergence => "convergence",
            Suite::Decay => "decay",
            Suite::Divergence => "divergence",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown suite {s:?}")))
    }
}

/// How `value` is compared with `expected`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// `|value - expected| <= tolerance`
    Close,
    /// `value <= expected + tolerance`
    AtMost,
    /// `value >= expected - tolerance`
    AtLeast,
    /// `value == expected` for integers or flags
    Equal,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub relation: Relation,
    pub value: f64,
    pub expected: f64,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "String::is_empty", default)]
    pub detail: String,
}

impl Check {
    pub fn new(
        name: impl Into<String>,
        relation: Relation,
        value: f64,
        expected: f64,
        tolerance: f64,
    ) -> Self {
        let passed = match relation {
            Relation::Close => (value - expected).abs() <= tolerance,
            Relation::AtMost => value <= expected + tolerance,
            Relation::AtLeast => value >= expected - tolerance,
            Relation::Equal => value == expected,
        };
        Check {
            name: name.into(),
            passed,
            relation,
            value,
            expected,
            tolerance,
            detail: String::new(),
        }
    }

    pub fn close(name: impl Into<String>, value: f64, expected: f64, tolerance: f64) -> Self {
        Check::new(name, Relation::Close, value, expected, tolerance)
    }

    pub fn at_most(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Check::new(name, Relation::AtMost, value, bound, 0.0)
    }

    pub fn at_least(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Check::new(name, Relation::AtLeast, value, bound, 0.0)
    }

    pub fn flag(name: impl Into<String>, ok: bool) -> Self {
        Check::new(name, Relation::Equal, ok as u8 as f64, 1.0, 0.0)
    }

    pub fn equal(name: impl Into<String>, value: i64, expected: i64) -> Self {
        Check::new(name, Relation::Equal, value as f64, expected as f64, 0.0)
    }

    pub fn detail(mut self, d: impl Into<String>) -> Self {
        self.detail = d.into();
        self
    }

    /// A check that fails because the computation behind it failed.
    pub fn failed(name: impl Into<String>, err: &Error) -> Self {
        Check {
            name: name.into(),
            passed: false,
            relation: Relation::Equal,
            value: 0.0,
            expected: 1.0,
            tolerance: 0.0,
            detail: err.to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }
}

/// Runs a suite. Computations that fail are reported as failed checks rather
/// than aborting the suite.
pub fn run_suite(suite: Suite, seed: u64) -> SuiteReport {
    let mut out = Vec::new();
    let mut c = Collector { out: &mut out };
    match suite {
        Suite::Profiles => profiles(&mut c),
        Suite::Curvature => curvature(&mut c),
        Suite::GaussBonnet => gauss_bonnet(&mut c),
        Suite::MuellerRoeger => mueller_roeger(&mut c),
        Suite::LiYau => li_yau(&mut c, seed),
        Suite::Convergence => convergence(&mut c),
        Suite::Decay => decay(&mut c),
        Suite::Divergence => divergence(&mut c),
    }
    let passed = out.iter().all(|c| c.passed);
    SuiteReport {
        suite,
        seed,
        passed,
        checks: out,
    }
}

struct Collector<'a> {
    out: &'a mut Vec<Check>,
}

impl Collector<'_> {
    fn push(&mut self, c: Check) {
        self.out.push(c);
    }

    /// Runs `f`, recording a failed check named `name` if it errors.
    fn guard(&mut self, name: &str, f: impl FnOnce(&mut Self) -> Result<()>) {
        if let Err(e) = f(self) {
            self.out.push(Check::failed(name, &e));
        }
    }
}

/// Genus surface with the parameters used across the suites.
pub fn default_spec(m: u32, g: u32) -> GenusSurfaceSpec {
    GenusSurfaceSpec::new(m, g, 0.1, 3.0, 0.5)
}

/// Tuned `m`-sheeted genus-`g` construction at flattening `delta`, rescaled
/// to area `4 pi m`.
pub fn tuned_surface(m: u32, g: u32, delta: f64) -> Result<SurfaceAssembly> {
    let spec = tuned_spec(m, g, delta)?;
    let asm = genus_surface(&spec)?;
    Ok(rescale_to_area(&asm, 4.0 * PI * m as f64, TOL)?.0)
}

fn report(asm: &SurfaceAssembly, params: HelfrichParams) -> Result<EnergyReport> {
    energy_report(asm, params, TOL)
}

fn profiles(c: &mut Collector) {
    for delta in [0.1, 0.05, 0.02] {
        c.guard(&format!("transition[{delta}]"), |c| {
            let p = make_transition_profile(delta)?;
            c.push(Check::close(
                format!("transition[{delta}].r(delta)"),
                p.eval(delta)[0],
                3.0 * delta,
                1e-15,
            ));
            c.push(Check::close(
                format!("transition[{delta}].r(0.5)"),
                p.eval(0.5)[0],
                0.5,
                1e-15,
            ));
            let (mut lo1, mut hi1, mut lo2, mut hi2) = (
                f64::INFINITY,
                f64::NEG_INFINITY,
                f64::INFINITY,
                f64::NEG_INFINITY,
            );
            for i in 0..=1000 {
                let [_, r1, r2] = p.eval(2.0 * delta + 2.0 * delta * i as f64 / 1000.0);
                lo1 = lo1.min(r1);
                hi1 = hi1.max(r1);
                lo2 = lo2.min(r2);
                hi2 = hi2.max(r2);
            }
            c.push(Check::at_least(
                format!("transition[{delta}].min_r1"),
                lo1,
                0.0,
            ));
            c.push(Check::at_most(
                format!("transition[{delta}].max_r1"),
                hi1,
                1.0,
            ));
            c.push(Check::at_least(
                format!("transition[{delta}].min_r2"),
                lo2,
                0.0,
            ));
            c.push(Check::at_most(
                format!("transition[{delta}].max_r2"),
                hi2,
                4.0 / delta,
            ));
            let mut worst = f64::NEG_INFINITY;
            for i in 0..=60 {
                for j in 0..=60 {
                    let (x, y) = (
                        4.0 * delta * (i as f64 / 30.0 - 1.0),
                        4.0 * delta * (j as f64 / 30.0 - 1.0),
                    );
                    if x.hypot(y) <= 4.0 * delta {
                        worst = worst.max(flattened_sphere_hessian(delta, x, y)[1]);
                    }
                }
            }
            c.push(Check::at_most(
                format!("flattened_sphere[{delta}].max_hessian_eigenvalue"),
                worst,
                1e-10,
            ));
            let top = FlatSphereHeight { r: p }.eval(delta)[0];
            c.push(Check::close(
                format!("flattened_sphere[{delta}].plateau"),
                top,
                FlatSphereHeight::plateau(delta),
                1e-15,
            ));
            let asm = flattened_sphere(delta)?;
            c.push(Check::at_most(
                format!("flattened_sphere[{delta}].max_radius"),
                asm.max_sampled_radius(),
                1.0 + 1e-9,
            ));
            Ok(())
        });
    }
    c.push(Check::flag(
        "transition[0.3].rejected",
        make_transition_profile(0.3).is_err(),
    ));
    for r in [1.0, 3.0, 5.0] {
        c.guard(&format!("catenoid_profile[{r}]"), |c| {
            let p = CatenoidProfile::new(r)?;
            let (mut identity, mut plateau, mut odd) = (0.0f64, 0.0f64, 0.0f64);
            let (mut lo1, mut hi1, mut lo2, mut hi2) = (
                f64::INFINITY,
                f64::NEG_INFINITY,
                f64::INFINITY,
                f64::NEG_INFINITY,
            );
            for i in 0..=1000 {
                let t = (r + 2.0) * i as f64 / 1000.0;
                let [g, g1, g2] = p.eval(t);
                odd = odd.max((g + p.eval(-t)[0]).abs());
                if t <= r {
                    identity = identity.max((g - t).abs());
                } else if t >= r + 1.0 {
                    plateau = plateau.max((g - r - 0.5).abs());
                }
                if t < r + 1.0 {
                    lo1 = lo1.min(g1);
                }
                hi1 = hi1.max(g1);
                lo2 = lo2.min(g2);
                hi2 = hi2.max(g2);
            }
            c.push(Check::at_most(
                format!("catenoid_profile[{r}].identity_error"),
                identity,
                0.0,
            ));
            c.push(Check::at_most(
                format!("catenoid_profile[{r}].plateau_error"),
                plateau,
                1e-15,
            ));
            c.push(Check::at_most(
                format!("catenoid_profile[{r}].odd_error"),
                odd,
                0.0,
            ));
            c.push(
                Check::new(
                    format!("catenoid_profile[{r}].min_g1"),
                    Relation::AtLeast,
                    lo1,
                    0.0,
                    0.0,
                )
                .detail("g' > 0 on |t| < R + 1"),
            );
            c.push(Check::at_most(
                format!("catenoid_profile[{r}].max_g1"),
                hi1,
                1.0,
            ));
            c.push(Check::at_least(
                format!("catenoid_profile[{r}].min_g2"),
                lo2,
                -4.0,
            ));
            c.push(Check::at_most(
                format!("catenoid_profile[{r}].max_g2"),
                hi2,
                0.0,
            ));
            Ok(())
        });
    }
}

fn curvature(c: &mut Collector) {
    c.guard("sphere", |c| {
        let s = unit_sphere(1);
        let p = &s.patches[0];
        let ff = fundamental_forms(p, PI / 2.0, 0.3)?;
        c.push(Check::close("sphere.equator.E", ff.e, 1.0, 1e-15));
        c.push(Check::close("sphere.equator.F", ff.f, 0.0, 1e-15));
        c.push(Check::close("sphere.equator.G", ff.g, 1.0, 1e-15));
        let k = curvature_at(p, 1.1, 2.0)?;
        c.push(Check::close("sphere.abs_H", k.h.abs(), 2.0, 1e-12));
        c.push(Check::close("sphere.K", k.k, 1.0, 1e-12));
        c.push(Check::close(
            "sphere.flipped_H",
            curvature_at(&p.flipped(), 1.1, 2.0)?.h,
            -k.h,
            1e-12,
        ));
        let d = verify_derivatives(p, 100)?;
        c.push(Check::at_most(
            "sphere.derivative_deviation",
            d.max_first.max(d.max_second),
            d.tolerance,
        ));
        Ok(())
    });
    c.guard("catenoid", |c| {
        let cat = flattened_catenoid(3.0, 0.0)?;
        let p = &cat.patches[0];
        let ff = fundamental_forms(p, 0.0, 0.7)?;
        c.push(Check::close("catenoid.neck.E", ff.e, 1.0, 1e-15));
        c.push(Check::close("catenoid.neck.F", ff.f, 0.0, 1e-15));
        c.push(Check::close("catenoid.neck.G", ff.g, 1.0, 1e-15));
        let (mut h, mut k) = (0.0f64, 0.0f64);
        for i in 0..=60 {
            let t = -3.0 + 6.0 * i as f64 / 60.0;
            let cp = curvature_at(p, t, 1.3)?;
            h = h.max(cp.h.abs());
            k = k.max((cp.k + t.cosh().powi(-4)).abs() * t.cosh().powi(4));
        }
        c.push(Check::at_most("catenoid.max_abs_H", h, 1e-12));
        c.push(Check::at_most("catenoid.K_relative_error", k, 1e-12));
        Ok(())
    });
    let fixtures: Vec<(&str, Result<SurfaceAssembly>)> = vec![
        ("flattened_sphere[0.1]", flattened_sphere(0.1)),
        ("catenoid[3]", flattened_catenoid(3.0, 60.0)),
        ("genus[2,1]", genus_surface(&default_spec(2, 1))),
        (
            "bumped[2,1]",
            genus_surface(&default_spec(2, 1)).and_then(|a| {
                south_pole_bump(
                    &a,
                    &BumpSpec {
                        t: 0.04,
                        alpha: DEFAULT_ALPHA,
                    },
                )
            }),
        ),
    ];
    for (name, asm) in fixtures {
        c.guard(name, |c| {
            let asm = asm?;
            let (mut deriv, mut am_gm, mut flip, mut scale) =
                (0.0f64, f64::INFINITY, 0.0f64, 0.0f64);
            for p in &asm.patches {
                let d = verify_derivatives(p, 50)?;
                deriv = deriv.max(d.max_first.max(d.max_second) / d.tolerance);
                let q = p.flipped();
                for lam in [0.5, 2.0] {
                    let s = p.transformed(&Similarity::new(lam, Vec3::new(0.1, -0.2, 0.3)));
                    for (u, v) in p.interior_samples(6) {
                        let (a, b) = (curvature_at(p, u, v)?, curvature_at(&s, u, v)?);
                        let rel = ((b.h * lam - a.h).abs() + (b.k * lam * lam - a.k).abs())
                            / (1.0 + a.h.abs() + a.k.abs())
                            + (b.da / (lam * lam) - a.da).abs() / a.da;
                        scale = scale.max(rel);
                    }
                }
                for (u, v) in p.interior_samples(8) {
                    let a = curvature_at(p, u, v)?;
                    let b = curvature_at(&q, u, v)?;
                    am_gm = am_gm.min(a.h * a.h - 4.0 * a.k);
                    flip = flip.max((a.h + b.h).abs() + (a.k - b.k).abs() + (a.da - b.da).abs());
                }
            }
            c.push(Check::at_most(
                format!("{name}.derivative_deviation_over_tolerance"),
                deriv,
                1.0,
            ));
            c.push(Check::at_least(
                format!("{name}.min_H2_minus_4K"),
                am_gm,
                -1e-9,
            ));
            c.push(Check::at_most(format!("{name}.flip_error"), flip, 1e-9));
            c.push(Check::at_most(format!("{name}.scaling_error"), scale, 1e-9));
            Ok(())
        });
    }
}

fn gauss_bonnet(c: &mut Collector) {
    for m in [2, 3] {
        for g in 0..=3 {
            let name = format!("genus[{m},{g}]");
            c.guard(&name, |c| {
                let asm = genus_surface(&default_spec(m, g))?;
                let r = report(&asm, HelfrichParams::default())?;
                let expected = 4.0 * PI * (1.0 - g as f64);
                c.push(Check::close(
                    format!("{name}.total_gauss"),
                    r.total_gauss,
                    expected,
                    1e-2,
                ));
                c.push(Check::equal(
                    format!("{name}.gauss_genus"),
                    genus_from_gauss(&asm, TOL)?,
                    g as i64,
                ));
                let mesh = triangulate(&asm, MESH_RESOLUTION)?;
                c.push(Check::equal(
                    format!("{name}.mesh_genus"),
                    crate::diagnostics::euler_genus(&mesh)?,
                    g as i64,
                ));
                c.push(Check::flag(
                    format!("{name}.mesh_connected"),
                    mesh.is_connected(),
                ));
                c.push(Check::close(
                    format!("{name}.sff_identity"),
                    r.total_sff,
                    4.0 * r.willmore - 2.0 * r.total_gauss,
                    1e-6,
                ));
                Ok(())
            });
        }
    }
    for r in [2.0, 5.0] {
        let name = format!("catenoid[{r}]");
        c.guard(&name, |c| {
            let rep = report(&flattened_catenoid(r, 0.0)?, HelfrichParams::default())?;
            c.push(Check::close(
                format!("{name}.total_gauss"),
                rep.total_gauss,
                -4.0 * PI,
                1e-3,
            ));
            Ok(())
        });
    }
    for delta in [0.1, 0.05] {
        let name = format!("flattened_sphere[{delta}]");
        c.guard(&name, |c| {
            let asm = flattened_sphere(delta)?;
            let rep = report(&asm, HelfrichParams::default())?;
            c.push(Check::close(
                format!("{name}.total_gauss"),
                rep.total_gauss,
                4.0 * PI,
                1e-6,
            ));
            let mesh = triangulate(&asm, MESH_RESOLUTION)?;
            c.push(Check::equal(
                format!("{name}.euler_characteristic"),
                mesh.euler_characteristic(),
                2,
            ));
            Ok(())
        });
    }
}

/// Fixtures inside the closed unit ball.
pub fn in_ball_fixtures() -> Vec<(String, Result<SurfaceAssembly>)> {
    let mut v: Vec<(String, Result<SurfaceAssembly>)> = vec![
        ("unit_sphere".into(), Ok(unit_sphere(1))),
        ("sphere[theta=2]".into(), Ok(unit_sphere(2))),
        ("sphere[theta=3]".into(), Ok(unit_sphere(3))),
        (
            "sphere[r=0.5,off]".into(),
            Ok(round_sphere(0.5, Vec3::new(0.2, -0.1, 0.3))),
        ),
    ];
    for delta in [0.1, 0.05, 0.02] {
        v.push((
            format!("flattened_sphere[{delta}]"),
            flattened_sphere(delta),
        ));
    }
    v.push((
        "flattened_sphere[0.1,scale=0.5]".into(),
        flattened_sphere(0.1).map(|a| {
            let mut s = a.transformed(&Similarity::new(0.5, Vec3::zeros()));
            s.refresh_ball();
            s
        }),
    ));
    v.push(("genus[2,1]".into(), genus_surface(&default_spec(2, 1))));
    v.push(("genus[3,2]".into(), genus_surface(&default_spec(3, 2))));
    for delta in [0.1, 0.05, 0.02] {
        v.push((format!("tuned[2,0,{delta}]"), tuned_surface(2, 0, delta)));
    }
    v.push(("tuned[2,1,0.05]".into(), tuned_surface(2, 1, 0.05)));
    v
}

fn mueller_roeger(c: &mut Collector) {
    let fixtures = in_ball_fixtures();
    c.push(Check::at_least(
        "fixture_count",
        fixtures.len() as f64,
        10.0,
    ));
    let mut tuned = Vec::new();
    for (name, asm) in fixtures {
        c.guard(&name, |c| {
            let asm = asm?;
            let r = mueller_roeger_check(&asm, TOL)?;
            c.push(Check::at_least(
                format!("{name}.margin"),
                r.margin,
                -r.error - 1e-9,
            ));
            if name == "unit_sphere" {
                c.push(Check::close("unit_sphere.equality", r.margin, 0.0, 1e-5));
            }
            if name == "flattened_sphere[0.1,scale=0.5]" {
                let w = report(&flattened_sphere(0.1)?, HelfrichParams::default())?;
                c.push(Check::close(
                    format!("{name}.willmore_unchanged"),
                    r.willmore,
                    w.willmore,
                    1e-9,
                ));
                c.push(Check::close(
                    format!("{name}.area_quartered"),
                    r.area,
                    0.25 * w.area,
                    1e-9,
                ));
            }
            if name.starts_with("tuned[2,0,") {
                tuned.push(r.margin);
            }
            Ok(())
        });
    }
    if let Some(last) = tuned.last() {
        c.push(Check::at_most("tuned[2,0].final_margin", *last, 0.5));
        let dec = tuned.windows(2).all(|w| w[1] < w[0]);
        c.push(Check::flag("tuned[2,0].margin_decreasing", dec).detail(format!("{tuned:?}")));
    }
    let params = HelfrichParams {
        chi_h: 0.25,
        chi_k: -1.0,
        h0: 0.0,
    };
    c.guard("sphere_criterion", |c| {
        let s = sphere_criterion_check(&unit_sphere(1), params, TOL)?;
        c.push(Check::close(
            "sphere_criterion.unit_sphere.gap",
            s.energy - s.threshold,
            -4.0 * PI,
            1e-6,
        ));
        c.push(Check::flag(
            "sphere_criterion.unit_sphere.certified",
            s.certified,
        ));
        let f = sphere_criterion_check(&flattened_sphere(0.05)?, params, TOL)?;
        c.push(Check::flag(
            "sphere_criterion.flattened_sphere[0.05].consistent",
            !f.certified || f.genus == Some(0),
        ));
        for (m, g) in [(2, 1), (2, 2), (3, 1)] {
            let s = sphere_criterion_check(&genus_surface(&default_spec(m, g))?, params, TOL)?;
            c.push(Check::flag(
                format!("sphere_criterion.genus[{m},{g}].not_certified"),
                !s.certified,
            ));
        }
        Ok(())
    });
}

/// Fixtures for the density inequality.
pub fn li_yau_fixtures() -> Vec<(String, Result<SurfaceAssembly>)> {
    vec![
        ("unit_sphere".into(), Ok(unit_sphere(1))),
        ("sphere[theta=2]".into(), Ok(unit_sphere(2))),
        ("flattened_sphere[0.1]".into(), flattened_sphere(0.1)),
        ("genus[2,1]".into(), genus_surface(&default_spec(2, 1))),
        ("tuned[2,0,0.05]".into(), tuned_surface(2, 0, 0.05)),
    ]
}

fn li_yau(c: &mut Collector, seed: u64) {
    for (k, (name, asm)) in li_yau_fixtures().into_iter().enumerate() {
        c.guard(&name, |c| {
            let asm = asm?;
            let pts = random_surface_points(&asm, LI_YAU_POINTS, seed.wrapping_add(k as u64))?;
            let reports: Vec<_> = pts
                .par_iter()
                .map(|p| li_yau_at(&asm, p.position(&asm), &LI_YAU_RADII, BALL_TOL))
                .collect::<Result<_>>()?;
            let mut slack = f64::INFINITY;
            let mut failures = 0;
            for r in &reports {
                for row in &r.rows {
                    slack = slack.min(row.rhs + row.error - r.density);
                    failures += !row.holds as usize;
                }
            }
            c.push(
                Check::at_least(format!("{name}.min_slack"), slack, -1e-9).detail(format!(
                    "{failures} of {} rows fail",
                    reports.len() * LI_YAU_RADII.len()
                )),
            );
            if name == "sphere[theta=2]" {
                let worst = reports
                    .iter()
                    .map(|r| (r.density - 2.0).abs())
                    .fold(0.0, f64::max);
                c.push(Check::at_most(
                    "sphere[theta=2].density_deviation",
                    worst,
                    1e-3,
                ));
            }
            Ok(())
        });
    }
    for delta in [0.1, 0.05, 0.02] {
        let name = format!("tuned[2,0,{delta}].north_pole");
        c.guard(&name, |c| {
            let asm = tuned_surface(2, 0, delta)?;
            let r = li_yau_density_check(&asm, Vec3::new(0.0, 0.0, 1.0), &LI_YAU_RADII, BALL_TOL)?;
            let rhs = r.rows.iter().map(|x| x.rhs).fold(f64::INFINITY, f64::min);
            c.push(Check::flag(format!("{name}.holds"), r.holds));
            c.push(Check::at_least(format!("{name}.min_rhs"), rhs, 2.0 - 1e-3));
            Ok(())
        });
    }
}

fn convergence(c: &mut Collector) {
    c.guard("sphere[theta=2]", |c| {
        let d = convergence_distance(&unit_sphere(2), 2, BALL_TOL)?;
        c.push(Check::close(
            "sphere[theta=2].distance",
            d.distance,
            0.0,
            1e-6,
        ));
        Ok(())
    });
    let mut dist = Vec::new();
    for delta in [0.1, 0.05, 0.02] {
        c.guard(&format!("tuned[2,0,{delta}]"), |c| {
            let d = convergence_distance(&tuned_surface(2, 0, delta)?, 2, BALL_TOL)?;
            c.push(
                Check::at_least(format!("tuned[2,0,{delta}].distance"), d.distance, 0.0)
                    .detail(format!("worst radius {}", d.worst_radius)),
            );
            dist.push(d.distance);
            Ok(())
        });
    }
    if dist.len() == 3 {
        c.push(
            Check::flag(
                "tuned[2,0].strictly_decreasing",
                dist.windows(2).all(|w| w[1] < w[0]),
            )
            .detail(format!("{dist:?}")),
        );
        c.push(Check::at_most("tuned[2,0].final_distance", dist[2], 0.5));
    }
}

fn decay(c: &mut Collector) {
    c.guard("catenoid_decay", |c| {
        let rs = [2.0, 3.0, 4.0, 5.0];
        let ws: Vec<f64> = rs
            .iter()
            .map(|&r| Ok(report(&flattened_catenoid(r, 0.0)?, HelfrichParams::default())?.willmore))
            .collect::<Result<_>>()?;
        let fit = fit_decay(&rs, &ws)?;
        c.push(Check::close("catenoid_decay.slope", fit.slope, -2.1, 0.3));
        c.push(Check::at_most("catenoid_decay.residual", fit.residual, 0.1));
        let ratio = ws[3] / ws[1] / (-4.0f64).exp();
        c.push(Check::close(
            "catenoid_decay.ratio_5_3_over_exp_minus_4",
            ratio.ln().abs(),
            0.0,
            2f64.ln(),
        ));
        Ok(())
    });
    c.guard("bump", |c| {
        let base = genus_surface(&default_spec(2, 1))?;
        let r0 = energy_report(&base, HelfrichParams::default(), 1e-11)?;
        let ts = [0.02, 0.04, 0.08];
        let mut da = Vec::new();
        let mut dw = Vec::new();
        for &t in &ts {
            let b = south_pole_bump(
                &base,
                &BumpSpec {
                    t,
                    alpha: DEFAULT_ALPHA,
                },
            )?;
            let r = energy_report(&b, HelfrichParams::default(), 1e-11)?;
            da.push(r.area - r0.area);
            dw.push(r.willmore - r0.willmore);
        }
        let z = south_pole_bump(
            &base,
            &BumpSpec {
                t: 0.0,
                alpha: DEFAULT_ALPHA,
            },
        )?;
        let rz = energy_report(&z, HelfrichParams::default(), 1e-11)?;
        c.push(Check::flag("bump.zero_amplitude_identical", rz == r0));
        c.push(Check::at_least(
            "bump.min_area_gain",
            da.iter().copied().fold(f64::INFINITY, f64::min),
            0.0,
        ));
        let x: Vec<f64> = ts.iter().map(|t| t.ln()).collect();
        let y: Vec<f64> = da.iter().map(|a| a.ln()).collect();
        let fit = fit_line(&x, &y)?;
        c.push(Check::close("bump.area_exponent", fit.slope, 2.0, 0.3));
        let ratios: Vec<f64> = dw.iter().zip(&ts).map(|(w, t)| w / t).collect();
        let spread = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max) / ratios[0];
        c.push(
            Check::at_most("bump.willmore_over_t_growth", spread, 1.5)
                .detail(format!("{ratios:?}")),
        );
        Ok(())
    });
}

fn divergence(c: &mut Collector) {
    let opts = DivergenceOptions::default();
    c.guard("divergence[chi_K=1]", |c| {
        let t = helfrich_divergence_demo(
            HelfrichParams {
                chi_h: 0.25,
                chi_k: 1.0,
                h0: 0.0,
            },
            &[1, 2, 4, 8],
            &opts,
        )?;
        let dec = t.rows.windows(2).all(|w| w[1].energy < w[0].energy);
        c.push(Check::flag("divergence[chi_K=1].strictly_decreasing", dec));
        c.push(Check::close(
            "divergence[chi_K=1].slope",
            t.fit.slope,
            -4.0 * PI,
            0.2 * 4.0 * PI,
        ));
        Ok(())
    });
    c.guard("divergence[chi_K=0]", |c| {
        let t = helfrich_divergence_demo(
            HelfrichParams {
                chi_h: 0.25,
                chi_k: 0.0,
                h0: 0.0,
            },
            &[1, 2, 4, 8],
            &opts,
        )?;
        c.push(Check::close(
            "divergence[chi_K=0].slope",
            t.fit.slope,
            0.0,
            0.1 * 4.0 * PI,
        ));
        Ok(())
    });
    let params = HelfrichParams {
        chi_h: 0.25,
        chi_k: -1.0,
        h0: 0.0,
    };
    for m in [2, 3] {
        c.guard(&format!("helfrich.sphere[theta={m}]"), |c| {
            let r = report(&unit_sphere(m), params)?;
            let exact = 4.0 * PI * m as f64 * (4.0 * params.chi_h - params.chi_k.abs());
            c.push(Check::close(
                format!("helfrich.sphere[theta={m}]"),
                r.helfrich,
                exact,
                1e-6,
            ));
            Ok(())
        });
    }
    c.guard("helfrich.tuned[2,0]", |c| {
        let r = report(&tuned_surface(2, 0, 0.02)?, params)?;
        let limit = 4.0 * PI * 2.0 * (4.0 * params.chi_h - params.chi_k.abs());
        c.push(Check::at_least(
            "helfrich.tuned[2,0,0.02].gap",
            r.helfrich - limit,
            1.0,
        ));
        c.push(Check::close(
            "helfrich.tuned[2,0,0.02].gap_vs_4pi",
            r.helfrich - limit,
            4.0 * PI,
            0.5,
        ));
        Ok(())
    });
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
            assert_eq!(
                serde_json::to_string(&s).unwrap(),
                format!("\"{}\"", s.name())
            );
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn relations() {
        assert!(Check::close("a", 1.0, 1.05, 0.1).passed);
        assert!(!Check::close("a", 1.0, 1.2, 0.1).passed);
        assert!(Check::at_most("a", 1.0, 1.0).passed);
        assert!(!Check::at_least("a", 0.5, 1.0).passed);
        assert!(!Check::flag("a", false).passed);
        assert!(Check::close("a", f64::NAN, 0.0, 1.0).passed == false);
    }

    #[test]
    fn profiles_suite_passes() {
        let r = run_suite(Suite::Profiles, 0);
        assert!(r.all_passed(), "{:#?}", r.failures().collect::<Vec<_>>());
    }
}
