use serde::{Deserialize, Serialize};

use crate::surface::Profile1D;
use crate::{Error, Result};

/// Largest admissible flattening parameter, keeping `4 delta < 1` with margin.
pub const DELTA_MAX: f64 = 0.15;

/// `10u^3 - 15u^4 + 6u^5` and its first two derivatives, clamped to `[0, 1]`.
pub fn smoothstep(u: f64) -> [f64; 3] {
    if u <= 0.0 {
        return [0.0; 3];
    }
    if u >= 1.0 {
        return [1.0, 0.0, 0.0];
    }
    let u2 = u * u;
    [
        u2 * u * (10.0 - 15.0 * u + 6.0 * u2),
        30.0 * u2 * (1.0 - u) * (1.0 - u),
        60.0 * u * (1.0 - u) * (1.0 - 2.0 * u),
    ]
}

/// Antiderivative of [`smoothstep`] vanishing at 0; equals `1/2` at 1.
pub fn smoothstep_integral(u: f64) -> f64 {
    let u = u.clamp(0.0, 1.0);
    let u4 = u * u * u * u;
    u4 * (2.5 - 3.0 * u + u * u)
}

/// Radius profile that is `3 delta` on `[0, 2 delta]`, the identity from
/// `4 delta` on, and has slope rising monotonically from 0 to 1 in between.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransitionProfile {
    pub delta: f64,
}

impl TransitionProfile {
    pub fn new(delta: f64) -> Result<Self> {
        let p = TransitionProfile { delta };
        p.check()?;
        Ok(p)
    }

    /// Samples the profile densely and confirms the clamps and the bounds
    /// `0 <= r' <= 1`, `0 <= r'' <= 4 / delta`.
    pub fn check(&self) -> Result<()> {
        let d = self.delta;
        if !(d > 0.0 && d < DELTA_MAX) {
            return Err(Error::InfeasibleProfile(format!(
                "delta = {d} outside (0, {DELTA_MAX})"
            )));
        }
        let n = 1000;
        for i in 0..=n {
            let s = 2.0 * d + 2.0 * d * i as f64 / n as f64;
            let [_, r1, r2] = self.eval(s);
            if !(-1e-15..=1.0 + 1e-15).contains(&r1) {
                return Err(Error::InfeasibleProfile(format!("r'({s}) = {r1}")));
            }
            if !(-1e-12..=4.0 / d).contains(&r2) {
                return Err(Error::InfeasibleProfile(format!("r''({s}) = {r2}")));
            }
        }
        for i in 0..=20 {
            let s = 2.0 * d * i as f64 / 20.0;
            if self.eval(s)[0] != 3.0 * d {
                return Err(Error::InfeasibleProfile(format!("r({s}) != 3 delta")));
            }
            let s = 4.0 * d + i as f64 * 0.05;
            if self.eval(s)[0] != s {
                return Err(Error::InfeasibleProfile(format!("r({s}) != {s}")));
            }
        }
        Ok(())
    }
}

impl Profile1D for TransitionProfile {
    fn eval(&self, s: f64) -> [f64; 3] {
        let d = self.delta;
        if s <= 2.0 * d {
            return [3.0 * d, 0.0, 0.0];
        }
        if s >= 4.0 * d {
            return [s, 1.0, 0.0];
        }
        let u = (s - 2.0 * d) / (2.0 * d);
        let [st, st1, _] = smoothstep(u);
        [
            3.0 * d + 2.0 * d * smoothstep_integral(u),
            st,
            st1 / (2.0 * d),
        ]
    }

    fn breakpoints(&self) -> Vec<f64> {
        vec![2.0 * self.delta, 4.0 * self.delta]
    }
}

/// Height `sqrt(1 - r(s)^2)` of the flattened sphere over the disc of radius `s`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlatSphereHeight {
    pub r: TransitionProfile,
}

impl FlatSphereHeight {
    /// Height of the flat top, `sqrt(1 - 9 delta^2)`.
    pub fn plateau(delta: f64) -> f64 {
        (1.0 - 9.0 * delta * delta).sqrt()
    }
}

impl Profile1D for FlatSphereHeight {
    fn eval(&self, s: f64) -> [f64; 3] {
        let [r, r1, r2] = self.r.eval(s);
        let q = 1.0 - r * r;
        let w = q.sqrt();
        let f1 = -r / w;
        let f2 = -1.0 / (q * w);
        [w, f1 * r1, f2 * r1 * r1 + f1 * r2]
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.r.breakpoints()
    }
}

/// Axial height of the flattened catenoid: the identity on `[-R, R]`,
/// constant `+-(R + 1/2)` beyond `R + 1`, odd, with `g'` falling monotonically
/// from 1 to 0 through a quintic blend.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CatenoidProfile {
    pub r: f64,
}

impl CatenoidProfile {
    pub fn new(r: f64) -> Result<Self> {
        if !(r >= 1.0 && r.is_finite()) {
            return Err(Error::InfeasibleProfile(format!(
                "neck length R = {r} must be >= 1"
            )));
        }
        Ok(CatenoidProfile { r })
    }

    /// Half height of the neck cylinder, `R + 1/2`.
    pub fn plateau(&self) -> f64 {
        self.r + 0.5
    }
}

impl Profile1D for CatenoidProfile {
    fn eval(&self, t: f64) -> [f64; 3] {
        let a = t.abs();
        let sg = if t < 0.0 { -1.0 } else { 1.0 };
        if a <= self.r {
            return [t, 1.0, 0.0];
        }
        if a >= self.r + 1.0 {
            return [sg * (self.r + 0.5), 0.0, 0.0];
        }
        let u = a - self.r;
        let [st, st1, _] = smoothstep(u);
        [
            sg * (self.r + u - smoothstep_integral(u)),
            1.0 - st,
            -sg * st1,
        ]
    }

    fn breakpoints(&self) -> Vec<f64> {
        vec![-self.r, self.r]
    }
}

/// The standard mollifier `exp(-1 / (1 - x^2))` on `|x| < 1`, zero outside.
pub fn mollifier(x: f64) -> [f64; 3] {
    let q = 1.0 - x * x;
    if q <= 0.0 {
        return [0.0; 3];
    }
    let h = (-1.0 / q).exp();
    let p1 = -2.0 * x / (q * q);
    let p2 = -2.0 / (q * q) - 8.0 * x * x / (q * q * q);
    [h, h * p1, h * (p1 * p1 + p2)]
}

/// Lower cap of the unit sphere as a graph `z = -sqrt(1 - s^2)`, optionally
/// lifted by `amp * mollifier(s / width)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SouthCapProfile {
    pub amp: f64,
    pub width: f64,
}

impl SouthCapProfile {
    pub const ROUND: SouthCapProfile = SouthCapProfile {
        amp: 0.0,
        width: 1.0,
    };

    pub fn is_round(&self) -> bool {
        self.amp == 0.0
    }
}

impl Profile1D for SouthCapProfile {
    fn eval(&self, s: f64) -> [f64; 3] {
        let q = 1.0 - s * s;
        let w = q.sqrt();
        let mut f = [-w, s / w, 1.0 / (q * w)];
        if self.amp != 0.0 {
            let [h, h1, h2] = mollifier(s / self.width);
            f[0] += self.amp * h;
            f[1] += self.amp * h1 / self.width;
            f[2] += self.amp * h2 / (self.width * self.width);
        }
        f
    }

    fn breakpoints(&self) -> Vec<f64> {
        if self.is_round() {
            Vec::new()
        } else {
            vec![self.width]
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd(p: &dyn Profile1D, x: f64) -> [f64; 2] {
        let h = 1e-6;
        let a = p.eval(x - h);
        let b = p.eval(x + h);
        [(b[0] - a[0]) / (2.0 * h), (b[1] - a[1]) / (2.0 * h)]
    }

    #[test]
    fn transition_clamps_and_bounds() {
        for d in [0.1, 0.05, 0.02, 0.01] {
            let p = TransitionProfile::new(d).unwrap();
            assert_eq!(p.eval(0.0)[0], 3.0 * d);
            assert_eq!(p.eval(4.0 * d)[0], 4.0 * d);
            assert!((p.eval(4.0 * d - 1e-12)[0] - 4.0 * d).abs() < 1e-11);
        }
        let p = TransitionProfile::new(0.1).unwrap();
        let max2 = (0..=1000)
            .map(|i| p.eval(0.2 + 0.2 * i as f64 / 1000.0)[2])
            .fold(0.0, f64::max);
        assert!(max2 <= 40.0);
        assert!(TransitionProfile::new(0.3).is_err());
    }

    #[test]
    fn profile_derivatives_match_differences() {
        let profiles: Vec<Box<dyn Profile1D>> = vec![
            Box::new(TransitionProfile { delta: 0.1 }),
            Box::new(FlatSphereHeight {
                r: TransitionProfile { delta: 0.1 },
            }),
            Box::new(CatenoidProfile { r: 3.0 }),
            Box::new(SouthCapProfile {
                amp: 0.04,
                width: 0.1,
            }),
        ];
        let xs = [0.23, 0.29, 0.33, 0.38, -3.4, 3.7, 0.05];
        for p in &profiles {
            for &x in &xs {
                if p.eval(x)[0].is_nan() {
                    continue;
                }
                let [d1, d2] = fd(p.as_ref(), x);
                let e = p.eval(x);
                assert!(
                    (d1 - e[1]).abs() < 1e-6 * (1.0 + e[1].abs()),
                    "{p:?} at {x}"
                );
                assert!(
                    (d2 - e[2]).abs() < 1e-4 * (1.0 + e[2].abs()),
                    "{p:?} at {x}"
                );
            }
        }
    }

    #[test]
    fn catenoid_height_is_odd_with_plateaus() {
        let g = CatenoidProfile::new(3.0).unwrap();
        for t in [0.3, 2.9, 3.2, 3.6, 3.99, 4.0, 5.0] {
            assert_eq!(g.eval(-t)[0], -g.eval(t)[0]);
            assert_eq!(g.eval(-t)[1], g.eval(t)[1]);
        }
        assert_eq!(g.eval(4.0)[0], 3.5);
        assert_eq!(g.eval(2.5)[0], 2.5);
        assert!(CatenoidProfile::new(0.5).is_err());
    }

    #[test]
    fn plateau_height() {
        assert!((FlatSphereHeight::plateau(0.05) - 0.977_5_f64.sqrt()).abs() < 1e-15);
        let f = FlatSphereHeight {
            r: TransitionProfile { delta: 0.05 },
        };
        assert_eq!(f.eval(0.07)[0], FlatSphereHeight::plateau(0.05));
    }

    #[test]
    fn mollifier_is_flat_at_support_edge() {
        let [h, h1, h2] = mollifier(0.999);
        assert!(h < 1e-200 && h1.abs() < 1e-190 && h2.abs() < 1e-180);
        assert!((mollifier(0.0)[0] - (-1f64).exp()).abs() < 1e-16);
    }
}
