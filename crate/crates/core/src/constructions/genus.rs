use serde::{Deserialize, Serialize};

use super::bump::{south_pole_bump, BumpSpec};
use super::catenoid::Neck;
use super::profiles::{CatenoidProfile, FlatSphereHeight, DELTA_MAX};
use super::sphere::{Sheet, SOUTH_CAP_ANGLE};
use crate::surface::{
    AssemblyMeta, Disc, Orientation, ParamPatch, Similarity, SurfaceAssembly, TWO_PI,
};
use crate::{Error, Result, Vec3};

pub const SPEC_VERSION: u32 = 1;

/// Parameters of an `m`-sheeted genus-`g` sphere-catenoid surface.
///
/// `centers` are the `g + 1` neck positions between the outermost two sheets.
/// Further sheets are joined by one neck each, alternating between the origin
/// and `centers[0]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenusSurfaceSpec {
    pub spec_version: u32,
    pub m: u32,
    pub g: u32,
    pub delta: f64,
    #[serde(rename = "R")]
    pub neck_length: f64,
    pub eta: f64,
    pub rho: f64,
    pub centers: Vec<[f64; 2]>,
    pub t: f64,
    pub alpha: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    Parameter,
    Gluing,
    Support,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub constraint: String,
}

pub const DEFAULT_ALPHA: f64 = 0.5;

fn push(v: &mut Vec<Violation>, kind: ViolationKind, constraint: String) {
    v.push(Violation { kind, constraint });
}

impl GenusSurfaceSpec {
    /// Neck radius bound giving disjoint discs on the default ring layout,
    /// including the disc at the origin used by deeper sheets.
    pub fn default_rho(delta: f64, g: u32) -> f64 {
        delta / (4.0 * (g as f64 + 3.0))
    }

    /// `g + 1` points evenly spaced on the circle of radius `delta / 4`.
    pub fn default_centers(delta: f64, g: u32) -> Vec<[f64; 2]> {
        let n = g + 1;
        (0..n)
            .map(|i| {
                let a = TWO_PI * i as f64 / n as f64;
                [0.25 * delta * a.cos(), 0.25 * delta * a.sin()]
            })
            .collect()
    }

    /// Upper bound on the neck scale: the neck must fit its cylinder and
    /// `eta R < delta^3`.
    pub fn eta_bound(delta: f64, r: f64, rho: f64) -> f64 {
        (rho / (r + 1.0).cosh()).min(delta.powi(3) / r)
    }

    /// Default layout with `eta = theta_eta * eta_bound` and no bump.
    pub fn new(m: u32, g: u32, delta: f64, r: f64, theta_eta: f64) -> Self {
        let rho = Self::default_rho(delta, g);
        GenusSurfaceSpec {
            spec_version: SPEC_VERSION,
            m,
            g,
            delta,
            neck_length: r,
            eta: theta_eta * Self::eta_bound(delta, r, rho),
            rho,
            centers: Self::default_centers(delta, g),
            t: 0.0,
            alpha: DEFAULT_ALPHA,
        }
    }

    pub fn with_bump(mut self, t: f64, alpha: f64) -> Self {
        self.t = t;
        self.alpha = alpha;
        self
    }

    /// Height of the flat top of the outermost sheet.
    pub fn plateau(&self) -> f64 {
        FlatSphereHeight::plateau(self.delta)
    }

    /// Scale ratio between consecutive sheets.
    pub fn ratio(&self) -> f64 {
        let h = self.plateau();
        (h - (2.0 * self.neck_length + 1.0) * self.eta) / h
    }

    /// Scale of the innermost sheet.
    pub fn inner_scale(&self) -> f64 {
        self.ratio().powi(self.m as i32 - 1)
    }

    pub fn neck_count(&self) -> u32 {
        self.m + self.g - 1
    }

    pub fn violations(&self) -> Vec<Violation> {
        let mut v = Vec::new();
        use ViolationKind::*;
        let (d, r, eta, rho) = (self.delta, self.neck_length, self.eta, self.rho);
        if self.spec_version != SPEC_VERSION {
            push(
                &mut v,
                Parameter,
                format!("spec_version {} != {SPEC_VERSION}", self.spec_version),
            );
        }
        if self.m < 2 {
            push(&mut v, Parameter, format!("m = {} < 2", self.m));
        }
        if !(d > 0.0 && d < DELTA_MAX) {
            push(
                &mut v,
                Parameter,
                format!("delta = {d} outside (0, {DELTA_MAX})"),
            );
        }
        if !(r >= 1.0 && r.is_finite()) {
            push(&mut v, Parameter, format!("R = {r} < 1"));
        }
        if !(eta > 0.0) {
            push(&mut v, Parameter, format!("eta = {eta} must be positive"));
        }
        if !(rho > 0.0 && rho < 0.5 * d) {
            push(
                &mut v,
                Parameter,
                format!("rho = {rho} outside (0, delta/2)"),
            );
        }
        if self.centers.len() != self.g as usize + 1 {
            push(
                &mut v,
                Parameter,
                format!(
                    "{} neck centres given, g + 1 = {} needed",
                    self.centers.len(),
                    self.g + 1
                ),
            );
        }
        if !(eta * r < d.powi(3)) {
            push(
                &mut v,
                Parameter,
                format!("eta R = {:e} >= delta^3 = {:e}", eta * r, d.powi(3)),
            );
        }
        if !(self.t >= 0.0 && self.t.is_finite()) {
            push(
                &mut v,
                Parameter,
                format!("bump height t = {} must be >= 0", self.t),
            );
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            push(
                &mut v,
                Parameter,
                format!("bump width alpha = {} must be positive", self.alpha),
            );
        }
        if !v.is_empty() {
            return v;
        }
        let ratio = self.ratio();
        if !(ratio > 0.0 && ratio < 1.0) {
            push(
                &mut v,
                Parameter,
                format!("sheet ratio r = {ratio} outside (0, 1)"),
            );
        }
        if !(eta * (r + 1.0).cosh() < rho) {
            push(
                &mut v,
                Gluing,
                format!(
                    "neck radius eta cosh(R+1) = {:e} >= rho = {rho:e}",
                    eta * (r + 1.0).cosh()
                ),
            );
        }
        let mut discs: Vec<[f64; 2]> = self.centers.clone();
        if self.m >= 3 {
            discs.push([0.0, 0.0]);
        }
        for (i, c) in self.centers.iter().enumerate() {
            if !(c[0].hypot(c[1]) + rho < 0.5 * d) {
                push(
                    &mut v,
                    Gluing,
                    format!("disc {i} around ({}, {}) leaves D_(delta/2)", c[0], c[1]),
                );
            }
        }
        for i in 0..discs.len() {
            for j in i + 1..discs.len() {
                let dist = (discs[i][0] - discs[j][0]).hypot(discs[i][1] - discs[j][1]);
                if !(dist > 2.0 * rho) {
                    push(
                        &mut v,
                        Gluing,
                        format!("neck discs {i} and {j} overlap (distance {dist:e})"),
                    );
                }
            }
        }
        let inner = self.inner_scale();
        if self.t > 0.0 {
            let support = self.alpha * self.t.sqrt();
            if !(support < inner * SOUTH_CAP_ANGLE.sin()) {
                push(
                    &mut v,
                    Support,
                    format!(
                        "bump support {support} exceeds the south cap radius {}",
                        inner * SOUTH_CAP_ANGLE.sin()
                    ),
                );
            }
            if !(self.t <= 0.5 * inner) {
                push(
                    &mut v,
                    Support,
                    format!(
                        "bump height t = {} exceeds half the inner radius {inner}",
                        self.t
                    ),
                );
            }
        }
        v
    }

    /// Errors with every violated constraint; parameter problems are reported
    /// before gluing and bump problems.
    pub fn check(&self) -> Result<()> {
        let v = self.violations();
        let of = |k| {
            v.iter()
                .filter(|x| x.kind == k)
                .map(|x| x.constraint.clone())
                .collect::<Vec<_>>()
        };
        let (p, g, s) = (
            of(ViolationKind::Parameter),
            of(ViolationKind::Gluing),
            of(ViolationKind::Support),
        );
        if !p.is_empty() {
            Err(Error::InvalidSpec(p))
        } else if !g.is_empty() {
            Err(Error::GluingConflict(g))
        } else if !s.is_empty() {
            Err(Error::SupportTooLarge(s.join("; ")))
        } else {
            Ok(())
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// A neck joining sheet `upper` to sheet `upper + 1`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct StackNeck {
    pub upper: usize,
    pub center: [f64; 2],
    pub eta: f64,
    pub rho: f64,
}

/// Nested flattened sheets joined by necks. Sheet `k` is oriented by
/// `(-1)^k`, so sheet 0 carries the outward normal; the last sheet gets the
/// south cap patch.
pub(crate) fn build_stack(
    delta: f64,
    profile: CatenoidProfile,
    sheets: &[Similarity],
    necks: &[StackNeck],
) -> Result<Vec<ParamPatch>> {
    let h = FlatSphereHeight::plateau(delta);
    let top = |k: usize| sheets[k].scale * h + sheets[k].offset[2];
    let sign = |k: usize| {
        if k % 2 == 0 {
            Orientation::Positive
        } else {
            Orientation::Negative
        }
    };
    let mut holes: Vec<Vec<Disc>> = vec![Vec::new(); sheets.len()];
    let mut patches = Vec::new();
    for (i, n) in necks.iter().enumerate() {
        let (z0, z1) = (top(n.upper), top(n.upper + 1));
        let gap = (2.0 * profile.r + 1.0) * n.eta;
        if ((z0 - z1) - gap).abs() > 1e-9 * gap.max(1e-300) + 1e-15 {
            return Err(Error::GluingConflict(vec![format!(
                "neck {i}: sheet gap {:e} differs from neck height {gap:e}",
                z0 - z1
            )]));
        }
        let neck = Neck {
            index: i,
            profile,
            eta: n.eta,
            center: Vec3::new(n.center[0], n.center[1], 0.5 * (z0 + z1)),
            outer: n.rho,
            orientation: sign(n.upper),
        };
        holes[n.upper].push(Disc::new(n.center, n.rho));
        holes[n.upper + 1].push(Disc::new(n.center, n.rho));
        patches.extend(neck.patches());
    }
    let mut out = Vec::new();
    for (k, pl) in sheets.iter().enumerate() {
        let sheet = Sheet {
            index: k,
            delta,
            placement: *pl,
            orientation: sign(k),
            holes: std::mem::take(&mut holes[k]),
            south_cap: k + 1 == sheets.len(),
        };
        out.extend(sheet.patches()?);
    }
    out.extend(patches);
    Ok(out)
}

/// The `m`-sheeted genus-`g` surface described by `spec`: concentric
/// flattened spheres with scales `r^k`, `g + 1` necks between the outer two
/// sheets and one neck between each further pair, followed by the south pole
/// bump when `t > 0`.
pub fn genus_surface(spec: &GenusSurfaceSpec) -> Result<SurfaceAssembly> {
    spec.check()?;
    let profile = CatenoidProfile::new(spec.neck_length)?;
    let ratio = spec.ratio();
    let m = spec.m as usize;
    let sheets: Vec<Similarity> = (0..m)
        .map(|k| Similarity::new(ratio.powi(k as i32), Vec3::zeros()))
        .collect();
    let mut necks: Vec<StackNeck> = spec
        .centers
        .iter()
        .map(|&c| StackNeck {
            upper: 0,
            center: c,
            eta: spec.eta,
            rho: spec.rho,
        })
        .collect();
    for k in 1..m - 1 {
        let s = ratio.powi(k as i32);
        let center = if k % 2 == 1 {
            [0.0, 0.0]
        } else {
            spec.centers[0]
        };
        necks.push(StackNeck {
            upper: k,
            center,
            eta: spec.eta * s,
            rho: spec.rho * s,
        });
    }
    let patches = build_stack(spec.delta, profile, &sheets, &necks)?;
    let mut asm = SurfaceAssembly::new(
        patches,
        AssemblyMeta {
            genus: Some(spec.g),
            sheets: spec.m,
            ball_radius: None,
        },
    );
    if spec.t > 0.0 {
        asm = south_pole_bump(
            &asm,
            &BumpSpec {
                t: spec.t,
                alpha: spec.alpha,
            },
        )?;
    }
    asm.refresh_ball();
    Ok(asm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostics::{euler_genus, triangulate};
    use proptest::prelude::*;

    #[test]
    fn wide_band_rejected_with_report() {
        let s = GenusSurfaceSpec::new(2, 0, 0.3, 3.0, 0.5);
        match s.check() {
            Err(Error::InvalidSpec(v)) => assert!(v.iter().any(|c| c.starts_with("delta = 0.3"))),
            other => panic!("{other:?}"),
        }
        assert!(genus_surface(&s).is_err());
    }

    #[test]
    fn every_bad_parameter_is_listed() {
        let mut s = GenusSurfaceSpec::new(1, 2, 0.1, 0.5, 0.5);
        s.centers.pop();
        s.alpha = 0.0;
        let Err(Error::InvalidSpec(v)) = s.check() else {
            panic!()
        };
        assert_eq!(v.len(), 4, "{v:?}");
    }

    #[test]
    fn overlapping_necks_conflict() {
        let mut s = GenusSurfaceSpec::new(2, 1, 0.1, 3.0, 0.5);
        s.centers[1] = [s.centers[0][0] - s.rho, 0.0];
        assert!(matches!(s.check(), Err(Error::GluingConflict(_))));
        let mut s = GenusSurfaceSpec::new(2, 0, 0.1, 3.0, 0.5);
        s.eta = 2.0 * s.rho / 4f64.cosh();
        s.eta = s.eta.min(0.99 * s.delta.powi(3) / s.neck_length);
        assert!(
            matches!(s.check(), Err(Error::GluingConflict(_))),
            "{:?}",
            s.violations()
        );
    }

    #[test]
    fn origin_neck_disjoint_from_ring() {
        for g in 0..6 {
            let s = GenusSurfaceSpec::new(4, g, 0.1, 3.0, 0.5);
            assert!(s.check().is_ok(), "g = {g}: {:?}", s.violations());
        }
    }

    #[test]
    fn oversized_bump_rejected() {
        let s = GenusSurfaceSpec::new(2, 0, 0.1, 3.0, 0.5).with_bump(4.0, 0.5);
        assert!(matches!(s.check(), Err(Error::SupportTooLarge(_))));
    }

    #[test]
    fn neck_counts() {
        assert_eq!(GenusSurfaceSpec::new(2, 3, 0.1, 3.0, 0.5).neck_count(), 4);
        assert_eq!(GenusSurfaceSpec::new(3, 2, 0.1, 3.0, 0.5).neck_count(), 4);
        let asm = genus_surface(&GenusSurfaceSpec::new(3, 2, 0.1, 3.0, 0.5)).unwrap();
        let necks = asm
            .patches
            .iter()
            .filter(|p| matches!(p.role, crate::surface::PatchRole::Neck { .. }))
            .count();
        assert_eq!(necks, 4);
    }

    #[test]
    fn sheets_nest_inside_unit_ball() {
        let s = GenusSurfaceSpec::new(3, 1, 0.05, 4.0, 0.5);
        let r = s.ratio();
        assert!(r > 0.0 && r < 1.0);
        assert!((s.inner_scale() - r * r).abs() < 1e-15);
        let asm = genus_surface(&s).unwrap();
        assert!(asm.max_sampled_radius() <= 1.0 + 1e-12);
        asm.require_unit_ball().unwrap();
    }

    #[test]
    fn four_sheets_two_handles() {
        let asm = genus_surface(&GenusSurfaceSpec::new(4, 2, 0.1, 3.0, 0.5)).unwrap();
        let mesh = triangulate(&asm, 32).unwrap();
        mesh.check_watertight().unwrap();
        assert!(mesh.is_connected());
        assert_eq!(euler_genus(&mesh).unwrap(), 2);
    }

    #[test]
    fn unknown_json_key_rejected() {
        let mut v: serde_json::Value = serde_json::from_str(
            &GenusSurfaceSpec::new(2, 0, 0.1, 3.0, 0.5)
                .to_json()
                .unwrap(),
        )
        .unwrap();
        v["extra"] = 1.into();
        assert!(GenusSurfaceSpec::from_json(&v.to_string()).is_err());
    }

    proptest! {
        #[test]
        fn json_round_trip(m in 2u32..6, g in 0u32..6, delta in 0.005f64..0.149, r in 1.0f64..12.0,
                           theta in 1e-6f64..1.0, t in 0.0f64..0.1, alpha in 0.05f64..2.0) {
            let s = GenusSurfaceSpec::new(m, g, delta, r, theta).with_bump(t, alpha);
            prop_assert_eq!(GenusSurfaceSpec::from_json(&s.to_json().unwrap()).unwrap(), s);
        }

        #[test]
        fn default_layout_feasible(m in 2u32..5, g in 0u32..5, delta in 0.01f64..0.149, r in 1.0f64..8.0, theta in 1e-4f64..0.999) {
            let s = GenusSurfaceSpec::new(m, g, delta, r, theta);
            prop_assert!(s.check().is_ok(), "{:?}", s.violations());
            prop_assert!(s.eta * r < delta.powi(3));
            prop_assert!(s.eta * (r + 1.0).cosh() < s.rho);
        }
    }
}
