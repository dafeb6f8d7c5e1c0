//! Adaptive Gauss-Legendre quadrature of vector-valued densities on intervals
//! and rectangles, with optional clipping against regions.

mod clip;

pub use clip::{rect_disc_area, rect_halfplane_area, rect_vs_disc, Coverage};

use crate::surface::{Densities, Rect};
use crate::{Error, Result};

/// Seven-point Gauss-Legendre rule on `[-1, 1]`.
pub const GL7_NODES: [f64; 7] = [
    -0.949_107_912_342_758_5,
    -0.741_531_185_599_394_4,
    -0.405_845_151_377_397_2,
    0.0,
    0.405_845_151_377_397_2,
    0.741_531_185_599_394_4,
    0.949_107_912_342_758_5,
];
pub const GL7_WEIGHTS: [f64; 7] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
    0.381_830_050_505_118_9,
    0.279_705_391_489_276_7,
    0.129_484_966_168_869_7,
];

/// A value with an estimate of its absolute error.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Estimate {
    pub value: Densities,
    pub error: Densities,
}

impl std::ops::Add for Estimate {
    type Output = Estimate;
    fn add(self, o: Estimate) -> Estimate {
        Estimate {
            value: self.value + o.value,
            error: self.error + o.error,
        }
    }
}

impl std::iter::Sum for Estimate {
    fn sum<I: Iterator<Item = Estimate>>(iter: I) -> Estimate {
        iter.fold(Estimate::default(), |a, b| a + b)
    }
}

/// Relative floor below which differences are treated as rounding noise.
const NOISE: f64 = 1e-13;

fn gl_1d<F>(f: &F, a: f64, b: f64) -> Result<Densities>
where
    F: Fn(f64) -> Result<Densities>,
{
    let (m, h) = (0.5 * (a + b), 0.5 * (b - a));
    let mut acc = Densities::ZERO;
    for (x, w) in GL7_NODES.iter().zip(GL7_WEIGHTS) {
        acc += f(m + h * x)? * (w * h);
    }
    Ok(acc)
}

pub struct Options1d {
    pub tol: f64,
    pub max_depth: usize,
}

impl Default for Options1d {
    fn default() -> Self {
        Options1d {
            tol: 1e-9,
            max_depth: 40,
        }
    }
}

/// Integrates `f` over `[a, b]`, splitting first at the given breakpoints.
/// Each interval is bisected until two refinement levels agree to within its
/// share of `tol` in every component.
pub fn integrate_1d<F>(
    f: F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    opts: &Options1d,
) -> Result<Estimate>
where
    F: Fn(f64) -> Result<Densities>,
{
    let mut cuts = vec![a];
    let mut inner: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|&x| x > a && x < b)
        .collect();
    inner.sort_by(f64::total_cmp);
    cuts.extend(inner);
    cuts.push(b);
    let total = b - a;
    let mut out = Estimate::default();
    for w in cuts.windows(2) {
        if w[1] <= w[0] {
            continue;
        }
        let tol = opts.tol * (w[1] - w[0]) / total;
        let whole = gl_1d(&f, w[0], w[1])?;
        out = out + refine_1d(&f, w[0], w[1], whole, tol, 0, opts.max_depth)?;
    }
    Ok(out)
}

fn refine_1d<F>(
    f: &F,
    a: f64,
    b: f64,
    whole: Densities,
    tol: f64,
    depth: usize,
    max_depth: usize,
) -> Result<Estimate>
where
    F: Fn(f64) -> Result<Densities>,
{
    let m = 0.5 * (a + b);
    let left = gl_1d(f, a, m)?;
    let right = gl_1d(f, m, b)?;
    let fine = left + right;
    let diff = (fine - whole).abs();
    if !fine.is_finite() {
        return Err(Error::NoConvergence(format!(
            "non-finite integrand on [{a}, {b}]"
        )));
    }
    if diff.max_abs() <= tol.max(NOISE * fine.max_abs()) {
        return Ok(Estimate {
            value: fine,
            error: diff,
        });
    }
    if depth >= max_depth {
        return Err(Error::NoConvergence(format!(
            "interval [{a}, {b}] still has error {:.3e} > {tol:.3e} at depth {depth}",
            diff.max_abs()
        )));
    }
    let l = refine_1d(f, a, m, left, 0.5 * tol, depth + 1, max_depth)?;
    let r = refine_1d(f, m, b, right, 0.5 * tol, depth + 1, max_depth)?;
    Ok(l + r)
}

/// How a rectangle of parameter space meets the set being integrated over.
pub trait Region2d {
    fn classify(&self, cell: &Rect) -> Coverage;

    /// Exact area of the intersection, when the region can provide it.
    fn clipped_area(&self, cell: &Rect) -> Option<f64>;

    fn contains(&self, u: f64, v: f64) -> bool;

    /// True once a partially covered cell is fine enough to integrate with a
    /// pointwise indicator.
    fn resolved(&self, cell: &Rect) -> bool;

    /// Approximate covered area of a resolved cell, if the region can do
    /// better than sampling an indicator.
    fn leaf_area(&self, _cell: &Rect) -> Option<f64> {
        None
    }
}

/// The whole rectangle.
pub struct Everything;

impl Region2d for Everything {
    fn classify(&self, _: &Rect) -> Coverage {
        Coverage::Inside
    }
    fn clipped_area(&self, c: &Rect) -> Option<f64> {
        Some(c.area())
    }
    fn contains(&self, _: f64, _: f64) -> bool {
        true
    }
    fn resolved(&self, _: &Rect) -> bool {
        true
    }
}

pub struct Options2d {
    pub tol: f64,
    pub max_depth: usize,
}

impl Default for Options2d {
    fn default() -> Self {
        Options2d {
            tol: 1e-9,
            max_depth: 12,
        }
    }
}

struct Samples {
    mean: Densities,
    min: Densities,
    max: Densities,
    inside: Densities,
    outside: Densities,
}

fn sample_cell<F>(f: &F, c: &Rect, region: Option<&dyn Region2d>) -> Result<Samples>
where
    F: Fn(f64, f64) -> Result<Densities>,
{
    let (um, vm) = c.center();
    let (hu, hv) = (0.5 * c.width(), 0.5 * c.height());
    let mut s = Samples {
        mean: Densities::ZERO,
        min: Densities::ZERO.map(|_| f64::INFINITY),
        max: Densities::ZERO.map(|_| f64::NEG_INFINITY),
        inside: Densities::ZERO,
        outside: Densities::ZERO,
    };
    for (x, wx) in GL7_NODES.iter().zip(GL7_WEIGHTS) {
        for (y, wy) in GL7_NODES.iter().zip(GL7_WEIGHTS) {
            let (u, v) = (um + hu * x, vm + hv * y);
            let d = f(u, v)?;
            let w = 0.25 * wx * wy;
            s.mean += d * w;
            s.min = s.min.zip(d, f64::min);
            s.max = s.max.zip(d, f64::max);
            if region.map_or(true, |r| r.contains(u, v)) {
                s.inside += d * (w * c.area());
            } else {
                s.outside += d * (w * c.area());
            }
        }
    }
    Ok(s)
}

const GL5_NODES: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683_1,
    0.0,
    0.538_469_310_105_683_1,
    0.906_179_845_938_664,
];
const GL5_WEIGHTS: [f64; 5] = [
    0.236_926_885_056_189_1,
    0.478_628_670_499_366_5,
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_5,
    0.236_926_885_056_189_1,
];

fn gl5_mean<F>(f: &F, c: &Rect) -> Result<Densities>
where
    F: Fn(f64, f64) -> Result<Densities>,
{
    let (um, vm) = c.center();
    let (hu, hv) = (0.5 * c.width(), 0.5 * c.height());
    let mut mean = Densities::ZERO;
    for (x, wx) in GL5_NODES.iter().zip(GL5_WEIGHTS) {
        for (y, wy) in GL5_NODES.iter().zip(GL5_WEIGHTS) {
            mean += f(um + hu * x, vm + hv * y)? * (0.25 * wx * wy);
        }
    }
    Ok(mean)
}

/// Integrates `f` over `domain` intersected with `region`.
///
/// Cells inside the region are refined by comparing a cell against its four
/// quarters. Partially covered cells use the exact clipped area times the
/// cell mean when the region supplies one, and a pointwise indicator once the
/// region reports them resolved otherwise.
pub fn integrate_2d<F>(
    f: F,
    domain: Rect,
    region: &dyn Region2d,
    opts: &Options2d,
) -> Result<Estimate>
where
    F: Fn(f64, f64) -> Result<Densities>,
{
    let cx = Cx {
        f: &f,
        region,
        root_area: domain.area(),
        opts,
    };
    cx.cell(domain, 0)
}

struct Cx<'a, F> {
    f: &'a F,
    region: &'a dyn Region2d,
    root_area: f64,
    opts: &'a Options2d,
}

impl<F> Cx<'_, F>
where
    F: Fn(f64, f64) -> Result<Densities>,
{
    fn tol(&self, c: &Rect) -> f64 {
        self.opts.tol * c.area() / self.root_area
    }

    fn cell(&self, c: Rect, depth: usize) -> Result<Estimate> {
        match self.region.classify(&c) {
            Coverage::Outside => Ok(Estimate::default()),
            Coverage::Inside => {
                let whole = sample_cell(self.f, &c, None)?.mean * c.area();
                let coarse = gl5_mean(self.f, &c)? * c.area();
                let diff = (whole - coarse).abs();
                if whole.is_finite()
                    && diff.max_abs() <= 1e-3 * self.tol(&c).max(NOISE * whole.max_abs())
                {
                    return Ok(Estimate {
                        value: whole,
                        error: diff,
                    });
                }
                self.smooth(c, whole, depth)
            }
            Coverage::Partial => self.partial(c, depth),
        }
    }

    fn partial(&self, c: Rect, depth: usize) -> Result<Estimate> {
        if let Some(area) = self.region.clipped_area(&c) {
            let s = sample_cell(self.f, &c, None)?;
            let err = (s.max - s.min) * area;
            if err.max_abs() <= self.tol(&c).max(NOISE * (s.mean * area).max_abs())
                || depth >= self.opts.max_depth
            {
                return Ok(Estimate {
                    value: s.mean * area,
                    error: err,
                });
            }
        } else if self.region.resolved(&c) || depth >= 2 * self.opts.max_depth {
            let s = sample_cell(self.f, &c, Some(self.region))?;
            if let Some(area) = self.region.leaf_area(&c) {
                let value = s.mean * area;
                return Ok(Estimate {
                    value,
                    error: (value - s.inside).abs(),
                });
            }
            let amb = s.inside.abs().zip(s.outside.abs(), f64::min);
            return Ok(Estimate {
                value: s.inside,
                error: amb,
            });
        }
        let mut acc = Estimate::default();
        for q in c.quarters() {
            acc = acc + self.cell(q, depth + 1)?;
        }
        Ok(acc)
    }

    fn smooth(&self, c: Rect, whole: Densities, depth: usize) -> Result<Estimate> {
        let quarters = c.quarters();
        let mut parts = [Densities::ZERO; 4];
        for (p, q) in parts.iter_mut().zip(&quarters) {
            *p = sample_cell(self.f, q, None)?.mean * q.area();
        }
        let fine = parts.iter().fold(Densities::ZERO, |a, b| a + *b);
        if !fine.is_finite() {
            return Err(Error::NoConvergence(format!(
                "non-finite integrand on {c:?}"
            )));
        }
        let diff = (fine - whole).abs();
        if diff.max_abs() <= self.tol(&c).max(NOISE * fine.max_abs()) {
            return Ok(Estimate {
                value: fine,
                error: diff,
            });
        }
        if depth >= self.opts.max_depth {
            return Err(Error::NoConvergence(format!(
                "cell {c:?} still has error {:.3e} at depth {depth}",
                diff.max_abs()
            )));
        }
        let mut acc = Estimate::default();
        for (q, w) in quarters.into_iter().zip(parts) {
            acc = acc + self.smooth(q, w, depth + 1)?;
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::Disc;

    fn scalar(x: f64) -> Densities {
        Densities {
            area: x,
            ..Densities::ZERO
        }
    }

    #[test]
    fn weights_sum_to_two() {
        let s: f64 = GL7_WEIGHTS.iter().sum();
        assert!((s - 2.0).abs() < 1e-15);
    }

    #[test]
    fn exact_for_degree_thirteen() {
        let e = integrate_1d(
            |x| Ok(scalar(x.powi(13) + x.powi(12))),
            0.0,
            1.0,
            &[],
            &Options1d::default(),
        )
        .unwrap();
        assert!((e.value.area - (1.0 / 14.0 + 1.0 / 13.0)).abs() < 1e-15);
    }

    #[test]
    fn adaptive_1d_handles_kinks() {
        let e = integrate_1d(
            |x| Ok(scalar((x - 0.3).abs())),
            0.0,
            1.0,
            &[0.3],
            &Options1d::default(),
        )
        .unwrap();
        assert!((e.value.area - (0.045 + 0.245)).abs() < 1e-14);
        let e = integrate_1d(
            |x| Ok(scalar(x.sqrt())),
            0.0,
            1.0,
            &[],
            &Options1d {
                tol: 1e-10,
                max_depth: 60,
            },
        )
        .unwrap();
        assert!((e.value.area - 2.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn smooth_2d() {
        let e = integrate_2d(
            |u, v| Ok(scalar((u * v).exp())),
            Rect::new(0.0, 1.0, 0.0, 2.0),
            &Everything,
            &Options2d::default(),
        )
        .unwrap();
        // sum_k 2^(k+1) / ((k+1)^2 k!)
        let mut exact = 0.0;
        let mut fact = 1.0;
        for k in 0..40 {
            if k > 0 {
                fact *= k as f64;
            }
            exact += 2f64.powi(k + 1) / (((k + 1) * (k + 1)) as f64 * fact);
        }
        assert!(
            (e.value.area - exact).abs() < 1e-9,
            "{} vs {exact}",
            e.value.area
        );
    }

    struct DiscRegion(Disc);

    impl Region2d for DiscRegion {
        fn classify(&self, c: &Rect) -> Coverage {
            rect_vs_disc(c, &self.0)
        }
        fn clipped_area(&self, c: &Rect) -> Option<f64> {
            Some(rect_disc_area(c, &self.0))
        }
        fn contains(&self, u: f64, v: f64) -> bool {
            self.0.contains(u, v)
        }
        fn resolved(&self, _: &Rect) -> bool {
            false
        }
    }

    #[test]
    fn clipped_disc_moment() {
        // second moment of the unit disc: pi / 4 for x^2
        let e = integrate_2d(
            |u, _| Ok(scalar(u * u)),
            Rect::new(-1.0, 1.0, -1.0, 1.0),
            &DiscRegion(Disc::new([0.0, 0.0], 1.0)),
            &Options2d {
                tol: 1e-7,
                max_depth: 10,
            },
        )
        .unwrap();
        assert!(
            (e.value.area - std::f64::consts::FRAC_PI_4).abs() < 1e-4,
            "{}",
            e.value.area
        );
    }
}
