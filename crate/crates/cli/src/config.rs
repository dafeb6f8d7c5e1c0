use std::fs;
use std::path::{Path, PathBuf};

use helfrich_core::constructions::{GenusSurfaceSpec, DEFAULT_ALPHA, SPEC_VERSION};
use helfrich_core::energy::HelfrichParams;
use helfrich_core::{Error, Result};
use serde::{Deserialize, Serialize};

/// Parameters shared by all commands, read from an optional JSON file and
/// overridden field by field from flags. A saved `spec.json` is a valid
/// config file.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub spec_version: Option<u32>,
    pub m: Option<u32>,
    pub g: Option<u32>,
    pub delta: Option<f64>,
    #[serde(rename = "R")]
    pub neck_length: Option<f64>,
    pub eta: Option<f64>,
    pub theta_eta: Option<f64>,
    pub rho: Option<f64>,
    pub centers: Option<Vec<[f64; 2]>>,
    pub t: Option<f64>,
    pub alpha: Option<f64>,

    pub out: Option<PathBuf>,
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    pub resolution: Option<usize>,

    pub chi_h: Option<f64>,
    pub chi_k: Option<f64>,
    pub h0: Option<f64>,
    pub fixture: Option<String>,
    pub theta: Option<u32>,
    pub format: Option<String>,

    pub eps: Option<f64>,
    pub budget: Option<usize>,
    pub restarts: Option<usize>,
    pub genus: Option<Vec<u32>>,
    pub deltas: Option<Vec<f64>>,
    pub neck_lengths: Option<Vec<f64>>,
    pub theta_etas: Option<Vec<f64>>,
    pub ts: Option<Vec<f64>>,
}

macro_rules! overlay {
    ($hi:expr, $lo:expr, $($f:ident),*) => {
        RunConfig { $($f: $hi.$f.or($lo.$f),)* }
    };
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    /// `self` (from flags) over `file`. Changing the neck geometry on the
    /// command line discards an absolute `eta` from the file.
    pub fn over(self, mut file: RunConfig) -> RunConfig {
        let geometry = self.theta_eta.is_some()
            || self.rho.is_some()
            || self.delta.is_some()
            || self.neck_length.is_some();
        if geometry && self.eta.is_none() {
            file.eta = None;
        }
        overlay!(
            self,
            file,
            spec_version,
            m,
            g,
            delta,
            neck_length,
            eta,
            theta_eta,
            rho,
            centers,
            t,
            alpha,
            out,
            tol,
            seed,
            resolution,
            chi_h,
            chi_k,
            h0,
            fixture,
            theta,
            format,
            eps,
            budget,
            restarts,
            genus,
            deltas,
            neck_lengths,
            theta_etas,
            ts
        )
    }

    pub fn params(&self) -> HelfrichParams {
        let d = HelfrichParams::default();
        HelfrichParams {
            chi_h: self.chi_h.unwrap_or(d.chi_h),
            chi_k: self.chi_k.unwrap_or(d.chi_k),
            h0: self.h0.unwrap_or(d.h0),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    /// Construction parameters with defaults `m = 2`, `g = 0`, `delta = 0.1`,
    /// `R = 3` and `eta` at half its bound.
    pub fn spec(&self) -> Result<GenusSurfaceSpec> {
        if let Some(v) = self.spec_version {
            if v != SPEC_VERSION {
                return Err(Error::InvalidSpec(vec![format!(
                    "spec_version {v} is not {SPEC_VERSION}"
                )]));
            }
        }
        let (m, g) = (self.m.unwrap_or(2), self.g.unwrap_or(0));
        let (delta, r) = (self.delta.unwrap_or(0.1), self.neck_length.unwrap_or(3.0));
        let theta = self.theta_eta.unwrap_or(0.5);
        let mut s = GenusSurfaceSpec::new(m, g, delta, r, theta);
        if let Some(rho) = self.rho {
            s.rho = rho;
            s.eta = theta * GenusSurfaceSpec::eta_bound(delta, r, rho);
        }
        if let Some(c) = &self.centers {
            s.centers = c.clone();
        }
        if let Some(eta) = self.eta {
            s.eta = eta;
        }
        s = s.with_bump(self.t.unwrap_or(0.0), self.alpha.unwrap_or(DEFAULT_ALPHA));
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let file = RunConfig {
            m: Some(3),
            g: Some(1),
            delta: Some(0.05),
            ..Default::default()
        };
        let flags = RunConfig {
            g: Some(2),
            ..Default::default()
        };
        let c = flags.over(file);
        assert_eq!((c.m, c.g, c.delta), (Some(3), Some(2), Some(0.05)));
    }

    #[test]
    fn spec_file_is_a_config() {
        let spec = GenusSurfaceSpec::new(2, 1, 0.05, 4.0, 0.3).with_bump(0.01, 0.7);
        let c: RunConfig = serde_json::from_str(&spec.to_json().unwrap()).unwrap();
        assert_eq!(c.spec().unwrap(), spec);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(serde_json::from_str::<RunConfig>(r#"{"m": 2, "colour": "red"}"#).is_err());
    }

    #[test]
    fn flag_fraction_replaces_file_eta() {
        let file = RunConfig {
            eta: Some(1e-9),
            ..Default::default()
        };
        let flags = RunConfig {
            theta_eta: Some(0.25),
            ..Default::default()
        };
        let s = flags.over(file).spec().unwrap();
        let b = GenusSurfaceSpec::eta_bound(s.delta, s.neck_length, s.rho);
        assert!((s.eta - 0.25 * b).abs() < 1e-18);
    }

    #[test]
    fn version_checked() {
        let c = RunConfig {
            spec_version: Some(7),
            ..Default::default()
        };
        assert!(matches!(c.spec(), Err(Error::InvalidSpec(_))));
    }
}
