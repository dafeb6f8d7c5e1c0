use std::f64::consts::PI;
use std::fmt::Debug;
use std::sync::Arc;

use super::curvature::Densities;
use super::profile::Profile1D;
use crate::Vec3;

/// Position and derivatives up to order two of a chart at one parameter.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet {
    pub p: Vec3,
    pub pu: Vec3,
    pub pv: Vec3,
    pub puu: Vec3,
    pub puv: Vec3,
    pub pvv: Vec3,
}

impl Jet {
    pub fn scaled(&self, scale: f64, offset: Vec3) -> Jet {
        Jet {
            p: self.p * scale + offset,
            pu: self.pu * scale,
            pv: self.pv * scale,
            puu: self.puu * scale,
            puv: self.puv * scale,
            pvv: self.pvv * scale,
        }
    }
}

/// Mean and Gauss curvature from an explicit formula, measured against the raw
/// normal `pu x pv` in chart coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClosedForm {
    pub h: f64,
    pub k: f64,
}

pub trait Chart: Send + Sync + Debug {
    fn jet(&self, u: f64, v: f64) -> Jet;

    fn closed_form(&self, _u: f64, _v: f64) -> Option<ClosedForm> {
        None
    }

    /// True when `v` is an azimuth about the z-axis and nothing but the
    /// position depends on it.
    fn azimuthal(&self) -> bool {
        false
    }

    /// Densities per unit `u` and unit azimuth, raw normal, chart coordinates.
    /// Only meaningful for azimuthal charts that have an explicit integrand.
    fn line_densities(&self, _u: f64) -> Option<Densities> {
        None
    }

    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }
}

/// The unit sphere in polar angle `u` and azimuth `v`.
#[derive(Clone, Copy, Debug, Default)]
pub struct SphereChart;

impl Chart for SphereChart {
    fn jet(&self, th: f64, ph: f64) -> Jet {
        let (st, ct) = th.sin_cos();
        let (sp, cp) = ph.sin_cos();
        let p = Vec3::new(st * cp, st * sp, ct);
        Jet {
            p,
            pu: Vec3::new(ct * cp, ct * sp, -st),
            pv: Vec3::new(-st * sp, st * cp, 0.0),
            puu: -p,
            puv: Vec3::new(-ct * sp, ct * cp, 0.0),
            pvv: Vec3::new(-st * cp, -st * sp, 0.0),
        }
    }

    fn closed_form(&self, _u: f64, _v: f64) -> Option<ClosedForm> {
        Some(ClosedForm { h: -2.0, k: 1.0 })
    }

    fn azimuthal(&self) -> bool {
        true
    }
}

/// `(s cos v, s sin v, F(s))`, a rotationally symmetric graph in polar coordinates.
#[derive(Clone, Debug)]
pub struct RadialGraphChart {
    pub profile: Arc<dyn Profile1D>,
}

impl RadialGraphChart {
    pub fn new(profile: Arc<dyn Profile1D>) -> Self {
        Self { profile }
    }

    /// Cartesian partials `(f_x, f_y, f_xx, f_xy, f_yy)` of the graph function.
    pub fn cartesian_derivatives(&self, x: f64, y: f64) -> [f64; 5] {
        let s = x.hypot(y);
        let [_, d1, d2] = self.profile.eval(s);
        let (s2, s3) = (s * s, s * s * s);
        [
            d1 * x / s,
            d1 * y / s,
            d2 * x * x / s2 + d1 * (1.0 / s - x * x / s3),
            d2 * x * y / s2 - d1 * x * y / s3,
            d2 * y * y / s2 + d1 * (1.0 / s - y * y / s3),
        ]
    }
}

/// Mean and Gauss curvature of `z = f(x, y)` for the upward normal.
pub fn graph_curvatures(d: [f64; 5]) -> ClosedForm {
    let [fx, fy, fxx, fxy, fyy] = d;
    let w = 1.0 + fx * fx + fy * fy;
    ClosedForm {
        h: ((1.0 + fy * fy) * fxx - 2.0 * fx * fy * fxy + (1.0 + fx * fx) * fyy) / w.powf(1.5),
        k: (fxx * fyy - fxy * fxy) / (w * w),
    }
}

impl Chart for RadialGraphChart {
    fn jet(&self, s: f64, ph: f64) -> Jet {
        let [f, d1, d2] = self.profile.eval(s);
        let (sp, cp) = ph.sin_cos();
        Jet {
            p: Vec3::new(s * cp, s * sp, f),
            pu: Vec3::new(cp, sp, d1),
            pv: Vec3::new(-s * sp, s * cp, 0.0),
            puu: Vec3::new(0.0, 0.0, d2),
            puv: Vec3::new(-sp, cp, 0.0),
            pvv: Vec3::new(-s * cp, -s * sp, 0.0),
        }
    }

    fn closed_form(&self, s: f64, ph: f64) -> Option<ClosedForm> {
        if s < 1e-12 {
            return None;
        }
        let (sp, cp) = ph.sin_cos();
        Some(graph_curvatures(self.cartesian_derivatives(s * cp, s * sp)))
    }

    fn azimuthal(&self) -> bool {
        true
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.profile.breakpoints()
    }
}

/// The horizontal plane `z = height` in Cartesian coordinates.
#[derive(Clone, Copy, Debug)]
pub struct PlaneChart {
    pub height: f64,
}

impl Chart for PlaneChart {
    fn jet(&self, x: f64, y: f64) -> Jet {
        Jet {
            p: Vec3::new(x, y, self.height),
            pu: Vec3::x(),
            pv: Vec3::y(),
            puu: Vec3::zeros(),
            puv: Vec3::zeros(),
            pvv: Vec3::zeros(),
        }
    }

    fn closed_form(&self, _u: f64, _v: f64) -> Option<ClosedForm> {
        Some(ClosedForm { h: 0.0, k: 0.0 })
    }
}

/// The horizontal plane `z = height` in polar coordinates.
#[derive(Clone, Copy, Debug)]
pub struct AnnulusChart {
    pub height: f64,
}

impl Chart for AnnulusChart {
    fn jet(&self, s: f64, ph: f64) -> Jet {
        let (sp, cp) = ph.sin_cos();
        Jet {
            p: Vec3::new(s * cp, s * sp, self.height),
            pu: Vec3::new(cp, sp, 0.0),
            pv: Vec3::new(-s * sp, s * cp, 0.0),
            puu: Vec3::zeros(),
            puv: Vec3::new(-sp, cp, 0.0),
            pvv: Vec3::new(-s * cp, -s * sp, 0.0),
        }
    }

    fn closed_form(&self, _u: f64, _v: f64) -> Option<ClosedForm> {
        Some(ClosedForm { h: 0.0, k: 0.0 })
    }

    fn azimuthal(&self) -> bool {
        true
    }
}

/// Surface of revolution `(f(t) cos v, f(t) sin v, g(t))`.
///
/// With `catenary` set the meridian radius must be `cosh`, and the Willmore
/// integrand uses the numerator simplified by `cosh^2 - sinh^2 = 1`.
#[derive(Clone, Debug)]
pub struct RevolutionChart {
    pub f: Arc<dyn Profile1D>,
    pub g: Arc<dyn Profile1D>,
    pub catenary: bool,
}

impl RevolutionChart {
    /// Mean curvature for the normal `(-f g' cos v, -f g' sin v, f f') / (f |(f', g')|)`,
    /// with the sign convention in which the unit sphere has `H = -2` for the
    /// inward normal.
    pub fn meridian_mean_curvature(f: [f64; 3], g: [f64; 3]) -> f64 {
        let [f0, f1, f2] = f;
        let [_, g1, g2] = g;
        let q = f1 * f1 + g1 * g1;
        (f0 * f2 * g1 - f0 * f1 * g2 - g1 * f1 * f1 - g1 * g1 * g1) / (f0 * q.powf(1.5))
    }

    pub fn meridian_gauss_curvature(f: [f64; 3], g: [f64; 3]) -> f64 {
        let [f0, f1, f2] = f;
        let [_, g1, g2] = g;
        let q = f1 * f1 + g1 * g1;
        (-g1 * g1 * f2 + f1 * g1 * g2) / (f0 * q * q)
    }
}

impl Chart for RevolutionChart {
    fn jet(&self, t: f64, ph: f64) -> Jet {
        let [f0, f1, f2] = self.f.eval(t);
        let [g0, g1, g2] = self.g.eval(t);
        let (sp, cp) = ph.sin_cos();
        Jet {
            p: Vec3::new(f0 * cp, f0 * sp, g0),
            pu: Vec3::new(f1 * cp, f1 * sp, g1),
            pv: Vec3::new(-f0 * sp, f0 * cp, 0.0),
            puu: Vec3::new(f2 * cp, f2 * sp, g2),
            puv: Vec3::new(-f1 * sp, f1 * cp, 0.0),
            pvv: Vec3::new(-f0 * cp, -f0 * sp, 0.0),
        }
    }

    fn closed_form(&self, t: f64, _v: f64) -> Option<ClosedForm> {
        let f = self.f.eval(t);
        let g = self.g.eval(t);
        Some(ClosedForm {
            h: -Self::meridian_mean_curvature(f, g),
            k: Self::meridian_gauss_curvature(f, g),
        })
    }

    fn azimuthal(&self) -> bool {
        true
    }

    fn line_densities(&self, t: f64) -> Option<Densities> {
        let [f0, f1, f2] = self.f.eval(t);
        let [_, g1, g2] = self.g.eval(t);
        let q = f1 * f1 + g1 * g1;
        let num = if self.catenary {
            g1 * (1.0 - g1 * g1) - f0 * f1 * g2
        } else {
            f0 * f2 * g1 - f0 * f1 * g2 - g1 * f1 * f1 - g1 * g1 * g1
        };
        let kappa_parallel = g1 / (f0 * q.sqrt());
        let kappa_meridian = (f1 * g2 - f2 * g1) / q.powf(1.5);
        let da = f0 * q.sqrt();
        Some(Densities {
            area: da,
            h: -num / q,
            h2: num * num / (f0 * q.powf(2.5)),
            k: (-g1 * g1 * f2 + f1 * g1 * g2) / q.powf(1.5),
            sff: (kappa_parallel * kappa_parallel + kappa_meridian * kappa_meridian) * da,
        })
    }

    fn breakpoints(&self) -> Vec<f64> {
        let mut b = self.f.breakpoints();
        b.extend(self.g.breakpoints());
        b
    }
}

type JetFn = dyn Fn(f64, f64) -> Jet + Send + Sync;

/// A chart given by an arbitrary closure.
#[derive(Clone)]
pub struct FnChart {
    pub name: &'static str,
    pub jet: Arc<JetFn>,
}

impl Debug for FnChart {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "FnChart({})", self.name)
    }
}

impl Chart for FnChart {
    fn jet(&self, u: f64, v: f64) -> Jet {
        (self.jet)(u, v)
    }
}

/// A torus with tube radius `a` around a circle of radius `c` in the xy-plane.
pub fn torus_chart(c: f64, a: f64) -> FnChart {
    FnChart {
        name: "torus",
        jet: Arc::new(move |u, v| {
            let (su, cu) = u.sin_cos();
            let (sv, cv) = v.sin_cos();
            let w = c + a * cu;
            Jet {
                p: Vec3::new(w * cv, w * sv, a * su),
                pu: Vec3::new(-a * su * cv, -a * su * sv, a * cu),
                pv: Vec3::new(-w * sv, w * cv, 0.0),
                puu: Vec3::new(-a * cu * cv, -a * cu * sv, -a * su),
                puv: Vec3::new(a * su * sv, -a * su * cv, 0.0),
                pvv: Vec3::new(-w * cv, -w * sv, 0.0),
            }
        }),
    }
}

pub const TWO_PI: f64 = 2.0 * PI;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{
        curvature_at, verify_derivatives, Affine, Cosh, LowerHemisphere, ParamPatch, PatchKind,
        Rect,
    };
    use proptest::prelude::*;

    fn catenoid(catenary: bool) -> ParamPatch {
        let chart = RevolutionChart {
            f: Arc::new(Cosh),
            g: Arc::new(Affine { a: 0.0, b: 1.0 }),
            catenary,
        };
        ParamPatch::new(
            Arc::new(chart),
            Rect::new(-2.0, 2.0, 0.0, TWO_PI),
            PatchKind::Revolution,
        )
    }

    fn hemisphere() -> ParamPatch {
        ParamPatch::new(
            Arc::new(RadialGraphChart::new(Arc::new(LowerHemisphere))),
            Rect::new(0.0, 0.9, 0.0, TWO_PI),
            PatchKind::Graph,
        )
    }

    #[test]
    fn paraboloid_apex() {
        let c = graph_curvatures([0.0, 0.0, 1.0, 0.0, 1.0]);
        assert_eq!((c.h, c.k), (2.0, 1.0));
        let saddle = graph_curvatures([0.0, 0.0, 1.0, 0.0, -1.0]);
        assert_eq!((saddle.h, saddle.k), (0.0, -1.0));
    }

    #[test]
    fn charts_match_finite_differences() {
        for p in [
            catenoid(true),
            hemisphere(),
            ParamPatch::new(
                Arc::new(torus_chart(2.0, 0.5)),
                Rect::new(0.0, TWO_PI, 0.0, TWO_PI),
                PatchKind::Generic,
            ),
        ] {
            let r = verify_derivatives(&p, 6).unwrap();
            assert!(r.passed, "{:?}: {r:?}", p.chart);
        }
    }

    proptest! {
        #[test]
        fn catenoid_is_minimal(t in -2.0f64..2.0, v in 0.0f64..TWO_PI) {
            let cp = curvature_at(&catenoid(false), t, v).unwrap();
            prop_assert!(cp.h.abs() < 1e-12);
            prop_assert!((cp.k + t.cosh().powi(-4)).abs() < 1e-12);
        }

        #[test]
        fn line_densities_match_pointwise(t in -2.0f64..2.0, v in 0.0f64..TWO_PI, s in 0.01f64..0.9, cat in any::<bool>()) {
            for (p, u) in [(catenoid(cat), t), (hemisphere(), s)] {
                let line = p.line_densities(u).unwrap().to_array();
                let point = p.densities(u, v).unwrap().to_array();
                for (a, b) in line.iter().zip(point) {
                    prop_assert!((a - b).abs() < 1e-9 * (1.0 + b.abs()), "{:?} vs {:?}", line, point);
                }
            }
        }

        #[test]
        fn hemisphere_graph_is_round(s in 0.01f64..0.9, v in 0.0f64..TWO_PI) {
            let cp = curvature_at(&hemisphere(), s, v).unwrap();
            prop_assert!((cp.h.abs() - 2.0).abs() < 1e-10 && (cp.k - 1.0).abs() < 1e-10);
        }
    }
}
