use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual of the fitted line.
    pub residual: f64,
}

impl FitResult {
    pub fn predict(&self, x: f64) -> f64 {
        self.intercept + self.slope * x
    }
}

/// Least-squares line through `(x, y)`.
pub fn fit_line(x: &[f64], y: &[f64]) -> Result<FitResult> {
    let n = x.len().min(y.len());
    if n < 2 {
        return Err(Error::TooFewPoints { needed: 2, got: n });
    }
    let nf = n as f64;
    let mx = x[..n].iter().sum::<f64>() / nf;
    let my = y[..n].iter().sum::<f64>() / nf;
    let sxx: f64 = x[..n].iter().map(|a| (a - mx) * (a - mx)).sum();
    let sxy: f64 = x[..n]
        .iter()
        .zip(&y[..n])
        .map(|(a, b)| (a - mx) * (b - my))
        .sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument("fit abscissae are all equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = x[..n]
        .iter()
        .zip(&y[..n])
        .map(|(a, b)| (b - intercept - slope * a).powi(2))
        .sum();
    Ok(FitResult {
        slope,
        intercept,
        residual: (ss / nf).sqrt(),
    })
}

/// Fits `log W = intercept + slope R`.
pub fn fit_decay(rs: &[f64], ws: &[f64]) -> Result<FitResult> {
    if rs.len() != ws.len() {
        return Err(Error::InvalidArgument(format!(
            "{} lengths but {} energies",
            rs.len(),
            ws.len()
        )));
    }
    if rs.len() < 3 {
        return Err(Error::TooFewPoints {
            needed: 3,
            got: rs.len(),
        });
    }
    if ws.iter().any(|w| !(*w > 0.0)) {
        return Err(Error::NonPositiveEnergy);
    }
    let logs: Vec<f64> = ws.iter().map(|w| w.ln()).collect();
    fit_line(rs, &logs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_exponential() {
        let rs = [1.0, 2.0, 3.0, 4.0];
        let ws: Vec<f64> = rs.iter().map(|r: &f64| 5.0 * (-2.0 * r).exp()).collect();
        let f = fit_decay(&rs, &ws).unwrap();
        assert!((f.slope + 2.0).abs() < 1e-12);
        assert!((f.intercept - 5f64.ln()).abs() < 1e-12);
        assert!(f.residual < 1e-12);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            fit_decay(&[1.0, 2.0, 3.0], &[1.0, 0.0, 1.0]),
            Err(Error::NonPositiveEnergy)
        ));
        assert!(matches!(
            fit_decay(&[1.0, 2.0], &[1.0, 1.0]),
            Err(Error::TooFewPoints { .. })
        ));
    }
}
