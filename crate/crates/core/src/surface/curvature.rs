use std::ops::{Add, AddAssign, Mul, Sub};

use serde::{Deserialize, Serialize};

use super::chart::Jet;
use super::ParamPatch;
use crate::{Error, Result};

/// Integrand values per unit parameter area: `dA` and `H dA`, `H^2 dA`,
/// `K dA`, `|A|^2 dA`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Densities {
    pub area: f64,
    pub h: f64,
    pub h2: f64,
    pub k: f64,
    pub sff: f64,
}

impl Densities {
    pub const ZERO: Densities = Densities {
        area: 0.0,
        h: 0.0,
        h2: 0.0,
        k: 0.0,
        sff: 0.0,
    };

    pub fn to_array(self) -> [f64; 5] {
        [self.area, self.h, self.h2, self.k, self.sff]
    }

    pub fn from_array(a: [f64; 5]) -> Self {
        Densities {
            area: a[0],
            h: a[1],
            h2: a[2],
            k: a[3],
            sff: a[4],
        }
    }

    pub fn map(self, f: impl Fn(f64) -> f64) -> Self {
        Self::from_array(self.to_array().map(f))
    }

    pub fn zip(self, o: Self, f: impl Fn(f64, f64) -> f64) -> Self {
        let (a, b) = (self.to_array(), o.to_array());
        Self::from_array(std::array::from_fn(|i| f(a[i], b[i])))
    }

    pub fn abs(self) -> Self {
        self.map(f64::abs)
    }

    pub fn max_abs(self) -> f64 {
        self.to_array().iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn is_finite(self) -> bool {
        self.to_array().iter().all(|x| x.is_finite())
    }
}

impl Add for Densities {
    type Output = Densities;
    fn add(self, o: Densities) -> Densities {
        self.zip(o, |a, b| a + b)
    }
}

impl AddAssign for Densities {
    fn add_assign(&mut self, o: Densities) {
        *self = *self + o;
    }
}

impl Sub for Densities {
    type Output = Densities;
    fn sub(self, o: Densities) -> Densities {
        self.zip(o, |a, b| a - b)
    }
}

impl Mul<f64> for Densities {
    type Output = Densities;
    fn mul(self, s: f64) -> Densities {
        self.map(|a| a * s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FundamentalForms {
    pub e: f64,
    pub f: f64,
    pub g: f64,
    pub l: f64,
    pub m: f64,
    pub n: f64,
}

impl FundamentalForms {
    pub fn det(&self) -> f64 {
        self.e * self.g - self.f * self.f
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvaturePoint {
    pub h: f64,
    pub k: f64,
    pub da: f64,
    /// Squared norm of the second fundamental form, computed as the trace of
    /// the squared shape operator.
    pub sff: f64,
}

impl CurvaturePoint {
    pub fn densities(&self) -> Densities {
        Densities {
            area: self.da,
            h: self.h * self.da,
            h2: self.h * self.h * self.da,
            k: self.k * self.da,
            sff: self.sff * self.da,
        }
    }
}

pub(crate) fn forms_from_jet(j: &Jet, sign: f64, u: f64, v: f64) -> Result<FundamentalForms> {
    let e = j.pu.dot(&j.pu);
    let f = j.pu.dot(&j.pv);
    let g = j.pv.dot(&j.pv);
    let det = e * g - f * f;
    if !(det > 0.0) || !det.is_finite() {
        return Err(Error::DegeneratePoint { u, v, det });
    }
    let raw = j.pu.cross(&j.pv);
    let nrm = raw.norm();
    if !(nrm > 0.0) {
        return Err(Error::DegeneratePoint { u, v, det });
    }
    let n = raw * (sign / nrm);
    Ok(FundamentalForms {
        e,
        f,
        g,
        l: j.puu.dot(&n),
        m: j.puv.dot(&n),
        n: j.pvv.dot(&n),
    })
}

pub(crate) fn curvature_from_forms(ff: &FundamentalForms) -> CurvaturePoint {
    let det = ff.det();
    let h = (ff.g * ff.l - 2.0 * ff.f * ff.m + ff.e * ff.n) / det;
    let k = (ff.l * ff.n - ff.m * ff.m) / det;
    // shape operator S = I^{-1} II
    let s11 = (ff.g * ff.l - ff.f * ff.m) / det;
    let s12 = (ff.g * ff.m - ff.f * ff.n) / det;
    let s21 = (ff.e * ff.m - ff.f * ff.l) / det;
    let s22 = (ff.e * ff.n - ff.f * ff.m) / det;
    CurvaturePoint {
        h,
        k,
        da: det.sqrt(),
        sff: s11 * s11 + 2.0 * s12 * s21 + s22 * s22,
    }
}

/// First and second fundamental forms of the placed patch, with the second
/// form taken against the oriented unit normal.
pub fn fundamental_forms(patch: &ParamPatch, u: f64, v: f64) -> Result<FundamentalForms> {
    if !patch.contains(u, v) {
        return Err(Error::OutsideDomain { u, v });
    }
    forms_from_jet(&patch.jet(u, v), patch.orientation.sign(), u, v)
}

/// Curvature at a parameter point. Where the chart has an explicit formula the
/// result is checked against it to `1e-8` relative.
pub fn curvature_at(patch: &ParamPatch, u: f64, v: f64) -> Result<CurvaturePoint> {
    let ff = fundamental_forms(patch, u, v)?;
    let cp = curvature_from_forms(&ff);
    if let Some(cf) = patch.chart.closed_form(u, v) {
        let lam = patch.placement.scale;
        let h = patch.orientation.sign() * cf.h / lam;
        let k = cf.k / (lam * lam);
        let scale = cp.h.abs().max(cp.k.abs().sqrt()).max(1.0 / lam);
        let dh = (cp.h - h).abs();
        let dk = (cp.k - k).abs();
        if dh > 1e-8 * scale || dk > 1e-8 * scale * scale {
            return Err(Error::ClosedFormMismatch(format!(
                "at ({u}, {v}): H {} vs {h}, K {} vs {k}",
                cp.h, cp.k
            )));
        }
    }
    Ok(cp)
}

pub(crate) fn curvature_unchecked(patch: &ParamPatch, u: f64, v: f64) -> Result<CurvaturePoint> {
    let ff = forms_from_jet(&patch.jet(u, v), patch.orientation.sign(), u, v)?;
    Ok(curvature_from_forms(&ff))
}
