//! Parametric patches, their placement in space, and assemblies of patches.

mod chart;
mod curvature;
mod profile;
mod verify;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use chart::{
    graph_curvatures, torus_chart, AnnulusChart, Chart, ClosedForm, FnChart, Jet, PlaneChart,
    RadialGraphChart, RevolutionChart, SphereChart, TWO_PI,
};
pub(crate) use curvature::curvature_unchecked;
pub use curvature::{curvature_at, fundamental_forms, CurvaturePoint, Densities, FundamentalForms};
pub use profile::{Affine, Cosh, LowerHemisphere, Profile1D};
pub use verify::{verify_derivatives, DerivativeReport};

use crate::{Error, Result, Vec3};

/// `p -> scale * p + offset`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Similarity {
    pub scale: f64,
    pub offset: [f64; 3],
}

impl Similarity {
    pub const IDENTITY: Similarity = Similarity {
        scale: 1.0,
        offset: [0.0; 3],
    };

    pub fn new(scale: f64, offset: Vec3) -> Self {
        Similarity {
            scale,
            offset: offset.into(),
        }
    }

    pub fn offset(&self) -> Vec3 {
        Vec3::from(self.offset)
    }

    pub fn apply(&self, p: Vec3) -> Vec3 {
        p * self.scale + self.offset()
    }

    /// `outer` applied after `self`.
    pub fn then(&self, outer: &Similarity) -> Similarity {
        Similarity::new(outer.scale * self.scale, outer.apply(self.offset()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub u0: f64,
    pub u1: f64,
    pub v0: f64,
    pub v1: f64,
}

impl Rect {
    pub fn new(u0: f64, u1: f64, v0: f64, v1: f64) -> Self {
        Rect { u0, u1, v0, v1 }
    }

    pub fn width(&self) -> f64 {
        self.u1 - self.u0
    }

    pub fn height(&self) -> f64 {
        self.v1 - self.v0
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn diameter(&self) -> f64 {
        self.width().hypot(self.height())
    }

    pub fn center(&self) -> (f64, f64) {
        (0.5 * (self.u0 + self.u1), 0.5 * (self.v0 + self.v1))
    }

    pub fn contains(&self, u: f64, v: f64) -> bool {
        u >= self.u0 && u <= self.u1 && v >= self.v0 && v <= self.v1
    }

    pub fn quarters(&self) -> [Rect; 4] {
        let (um, vm) = self.center();
        [
            Rect::new(self.u0, um, self.v0, vm),
            Rect::new(um, self.u1, self.v0, vm),
            Rect::new(self.u0, um, vm, self.v1),
            Rect::new(um, self.u1, vm, self.v1),
        ]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Disc {
    pub center: [f64; 2],
    pub radius: f64,
}

impl Disc {
    pub fn new(center: [f64; 2], radius: f64) -> Self {
        Disc { center, radius }
    }

    pub fn contains(&self, u: f64, v: f64) -> bool {
        (u - self.center[0]).hypot(v - self.center[1]) <= self.radius
    }
}

/// A disc with disjoint closed discs removed from its interior.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanarRegion {
    pub outer: Disc,
    pub holes: Vec<Disc>,
}

impl PlanarRegion {
    pub fn contains(&self, u: f64, v: f64) -> bool {
        self.outer.contains(u, v)
            && !self
                .holes
                .iter()
                .any(|h| (u - h.center[0]).hypot(v - h.center[1]) < h.radius)
    }

    pub fn area(&self) -> f64 {
        let d = |r: f64| std::f64::consts::PI * r * r;
        d(self.outer.radius) - self.holes.iter().map(|h| d(h.radius)).sum::<f64>()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Mask {
    Full,
    Planar(PlanarRegion),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Orientation {
    Positive,
    Negative,
}

impl Orientation {
    pub fn sign(self) -> f64 {
        match self {
            Orientation::Positive => 1.0,
            Orientation::Negative => -1.0,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Orientation::Positive => Orientation::Negative,
            Orientation::Negative => Orientation::Positive,
        }
    }

    pub fn from_sign(s: f64) -> Self {
        if s < 0.0 {
            Orientation::Negative
        } else {
            Orientation::Positive
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PatchKind {
    Graph,
    Revolution,
    SphereCap,
    PlaneAnnulus,
    Generic,
}

/// What a patch is within a construction; used for meshing and for locating
/// the patch a perturbation replaces.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PatchRole {
    Band { sheet: usize },
    Transition { sheet: usize },
    Flat { sheet: usize },
    SouthCap { sheet: usize },
    Neck { neck: usize },
    NeckAnnulus { neck: usize, upper: bool },
    Fixture,
}

impl PatchRole {
    pub fn is_neck(&self) -> bool {
        matches!(self, PatchRole::Neck { .. } | PatchRole::NeckAnnulus { .. })
    }
}

#[derive(Clone, Debug)]
pub struct ParamPatch {
    pub domain: Rect,
    pub chart: Arc<dyn Chart>,
    pub mask: Mask,
    pub orientation: Orientation,
    pub kind: PatchKind,
    pub placement: Similarity,
    pub role: PatchRole,
}

impl ParamPatch {
    pub fn new(chart: Arc<dyn Chart>, domain: Rect, kind: PatchKind) -> Self {
        ParamPatch {
            domain,
            chart,
            mask: Mask::Full,
            orientation: Orientation::Positive,
            kind,
            placement: Similarity::IDENTITY,
            role: PatchRole::Fixture,
        }
    }

    pub fn with_mask(mut self, mask: Mask) -> Self {
        self.mask = mask;
        self
    }

    pub fn with_orientation(mut self, o: Orientation) -> Self {
        self.orientation = o;
        self
    }

    pub fn with_placement(mut self, p: Similarity) -> Self {
        self.placement = p;
        self
    }

    pub fn with_role(mut self, role: PatchRole) -> Self {
        self.role = role;
        self
    }

    pub fn flipped(&self) -> Self {
        let mut p = self.clone();
        p.orientation = p.orientation.flip();
        p
    }

    /// The same patch with `outer` applied after its placement.
    pub fn transformed(&self, outer: &Similarity) -> Self {
        let mut p = self.clone();
        p.placement = p.placement.then(outer);
        p
    }

    pub fn contains(&self, u: f64, v: f64) -> bool {
        self.domain.contains(u, v)
            && match &self.mask {
                Mask::Full => true,
                Mask::Planar(r) => r.contains(u, v),
            }
    }

    pub fn jet(&self, u: f64, v: f64) -> Jet {
        self.chart
            .jet(u, v)
            .scaled(self.placement.scale, self.placement.offset())
    }

    pub fn point(&self, u: f64, v: f64) -> Vec3 {
        self.placement.apply(self.chart.jet(u, v).p)
    }

    /// Densities per unit parameter area at `(u, v)`.
    pub fn densities(&self, u: f64, v: f64) -> Result<Densities> {
        Ok(curvature_unchecked(self, u, v)?.densities())
    }

    /// Densities per unit `u` and unit azimuth for azimuthal charts.
    pub fn line_densities(&self, u: f64) -> Result<Densities> {
        match self.chart.line_densities(u) {
            Some(d) => {
                let lam = self.placement.scale;
                Ok(Densities {
                    area: d.area * lam * lam,
                    h: d.h * lam * self.orientation.sign(),
                    ..d
                })
            }
            None => self.densities(u, 0.5 * (self.domain.v0 + self.domain.v1)),
        }
    }

    /// Midpoints of an `n` by `n` grid that lie in the active subdomain. They
    /// avoid the domain boundary and so the coordinate poles.
    pub fn interior_samples(&self, n: usize) -> Vec<(f64, f64)> {
        let d = self.domain;
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let u = d.u0 + d.width() * (i as f64 + 0.5) / n as f64;
                let v = d.v0 + d.height() * (j as f64 + 0.5) / n as f64;
                if self.contains(u, v) {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// Grid samples of the active subdomain plus points on the mask circles.
    pub fn samples(&self, n: usize) -> Vec<(f64, f64)> {
        let d = self.domain;
        let mut out = Vec::with_capacity((n + 1) * (n + 1));
        for i in 0..=n {
            for j in 0..=n {
                let u = d.u0 + d.width() * i as f64 / n as f64;
                let v = d.v0 + d.height() * j as f64 / n as f64;
                if self.contains(u, v) {
                    out.push((u, v));
                }
            }
        }
        if let Mask::Planar(r) = &self.mask {
            for disc in std::iter::once(&r.outer).chain(&r.holes) {
                for j in 0..4 * n {
                    let a = TWO_PI * j as f64 / (4 * n) as f64;
                    let (u, v) = (
                        disc.center[0] + disc.radius * a.cos(),
                        disc.center[1] + disc.radius * a.sin(),
                    );
                    if d.contains(u, v) {
                        out.push((u, v));
                    }
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AssemblyMeta {
    pub genus: Option<u32>,
    pub sheets: u32,
    /// Radius of a closed ball about the origin that contains the surface, if
    /// one has been established.
    pub ball_radius: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct SurfaceAssembly {
    pub patches: Vec<ParamPatch>,
    pub multiplicity: u32,
    pub meta: AssemblyMeta,
}

impl SurfaceAssembly {
    pub fn new(patches: Vec<ParamPatch>, meta: AssemblyMeta) -> Self {
        SurfaceAssembly {
            patches,
            multiplicity: 1,
            meta,
        }
    }

    pub fn with_multiplicity(mut self, theta: u32) -> Self {
        self.multiplicity = theta;
        self
    }

    pub fn transformed(&self, outer: &Similarity) -> Self {
        SurfaceAssembly {
            patches: self.patches.iter().map(|p| p.transformed(outer)).collect(),
            multiplicity: self.multiplicity,
            meta: AssemblyMeta {
                ball_radius: None,
                ..self.meta.clone()
            },
        }
    }

    pub fn flipped(&self) -> Self {
        SurfaceAssembly {
            patches: self.patches.iter().map(ParamPatch::flipped).collect(),
            ..self.clone()
        }
    }

    /// Largest `|p|` over a sampling grid of every patch, boundaries included.
    pub fn max_sampled_radius(&self) -> f64 {
        self.patches
            .iter()
            .flat_map(|p| {
                p.samples(48)
                    .into_iter()
                    .map(move |(u, v)| p.point(u, v).norm())
            })
            .fold(0.0, f64::max)
    }

    /// Sets the ball radius to 1 when sampling confirms containment in the
    /// closed unit ball.
    pub fn refresh_ball(&mut self) {
        self.meta.ball_radius = (self.max_sampled_radius() <= 1.0 + 1e-9).then_some(1.0);
    }

    pub fn require_unit_ball(&self) -> Result<()> {
        let r = self.max_sampled_radius();
        if r <= 1.0 + 1e-9 {
            Ok(())
        } else {
            Err(Error::NotInBall { max_radius: r })
        }
    }

    /// Geometric diameter estimate from patch samples.
    pub fn diameter(&self) -> f64 {
        let pts: Vec<Vec3> = self
            .patches
            .iter()
            .flat_map(|p| p.samples(8).into_iter().map(move |(u, v)| p.point(u, v)))
            .collect();
        let mut lo = Vec3::repeat(f64::INFINITY);
        let mut hi = Vec3::repeat(f64::NEG_INFINITY);
        for p in &pts {
            lo = lo.inf(p);
            hi = hi.sup(p);
        }
        (hi - lo).norm()
    }
}
