use serde::{Deserialize, Serialize};

use super::{Mask, ParamPatch};
use crate::{Result, Vec3};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DerivativeReport {
    pub samples: usize,
    pub max_first: f64,
    pub max_second: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// Compares analytic chart derivatives with centred differences at `n x n`
/// interior sample points, using the step `1e-5` times the domain diameter
/// and one Richardson step against half of it.
/// Deviations are relative to the size of the derivatives at that point.
pub fn verify_derivatives(patch: &ParamPatch, n: usize) -> Result<DerivativeReport> {
    let d = patch.domain;
    let h = 1e-5 * d.diameter();
    let inset = 1e-8_f64.max(2.0 * h);
    let mut max_first = 0.0_f64;
    let mut max_second = 0.0_f64;
    let mut count = 0;
    for i in 0..n {
        for j in 0..n {
            let u = d.u0 + inset + (d.width() - 2.0 * inset) * (i as f64 + 0.5) / n as f64;
            let v = d.v0 + inset + (d.height() - 2.0 * inset) * (j as f64 + 0.5) / n as f64;
            if let Mask::Planar(_) = patch.mask {
                if !patch.contains(u, v) {
                    continue;
                }
            }
            let jet = patch.jet(u, v);
            let diff = |h: f64| {
                let (ju0, ju1) = (patch.jet(u - h, v), patch.jet(u + h, v));
                let (jv0, jv1) = (patch.jet(u, v - h), patch.jet(u, v + h));
                let c = 0.5 / h;
                [
                    (ju1.p - ju0.p) * c,
                    (jv1.p - jv0.p) * c,
                    (ju1.pu - ju0.pu) * c,
                    (jv1.pu - jv0.pu) * c,
                    (ju1.pv - ju0.pv) * c,
                    (jv1.pv - jv0.pv) * c,
                ]
            };
            let (coarse, fine) = (diff(h), diff(0.5 * h));
            let fd: [Vec3; 6] = std::array::from_fn(|k| (fine[k] * 4.0 - coarse[k]) / 3.0);
            let s1 = jet.pu.norm().max(jet.pv.norm()).max(f64::MIN_POSITIVE);
            let s2 = jet
                .puu
                .norm()
                .max(jet.puv.norm())
                .max(jet.pvv.norm())
                .max(s1);
            let first = [fd[0] - jet.pu, fd[1] - jet.pv];
            let second = [
                fd[2] - jet.puu,
                fd[3] - jet.puv,
                fd[4] - jet.puv,
                fd[5] - jet.pvv,
            ];
            for e in first {
                max_first = max_first.max(e.norm() / s1);
            }
            for e in second {
                max_second = max_second.max(e.norm() / s2);
            }
            count += 1;
        }
    }
    let tolerance = 1e-6;
    Ok(DerivativeReport {
        samples: count,
        max_first,
        max_second,
        tolerance,
        passed: count > 0 && max_first < tolerance && max_second < tolerance,
    })
}
