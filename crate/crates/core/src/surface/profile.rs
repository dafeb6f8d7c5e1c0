use std::fmt::Debug;

/// A scalar function of one variable with its first two derivatives.
pub trait Profile1D: Send + Sync + Debug {
    /// Returns `[f(x), f'(x), f''(x)]`.
    fn eval(&self, x: f64) -> [f64; 3];

    /// Points where the profile switches between pieces.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Cosh;

impl Profile1D for Cosh {
    fn eval(&self, x: f64) -> [f64; 3] {
        let c = x.cosh();
        [c, x.sinh(), c]
    }
}

/// `x -> a + b x`.
#[derive(Clone, Copy, Debug)]
pub struct Affine {
    pub a: f64,
    pub b: f64,
}

impl Profile1D for Affine {
    fn eval(&self, x: f64) -> [f64; 3] {
        [self.a + self.b * x, self.b, 0.0]
    }
}

/// Height of the round unit sphere's lower hemisphere as a graph over |x| < 1.
#[derive(Clone, Copy, Debug, Default)]
pub struct LowerHemisphere;

impl Profile1D for LowerHemisphere {
    fn eval(&self, s: f64) -> [f64; 3] {
        let q = 1.0 - s * s;
        let w = q.sqrt();
        [-w, s / w, 1.0 / (q * w)]
    }
}
