use std::f64::consts::PI;
use std::io::{Read, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constructions::{genus_surface, GenusSurfaceSpec, DEFAULT_ALPHA, SPEC_VERSION};
use crate::energy::{energy_report, HelfrichParams};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepGrid {
    pub deltas: Vec<f64>,
    pub neck_lengths: Vec<f64>,
    /// Neck scales as fractions of their upper bound.
    pub theta_etas: Vec<f64>,
    pub ts: Vec<f64>,
    pub alpha: f64,
}

impl Default for SweepGrid {
    fn default() -> Self {
        SweepGrid {
            deltas: vec![0.1, 0.05],
            neck_lengths: vec![2.0, 3.0, 4.0],
            theta_etas: vec![0.5],
            ts: vec![0.0],
            alpha: DEFAULT_ALPHA,
        }
    }
}

/// One grid point. Energy columns are empty for infeasible points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub m: u32,
    pub g: u32,
    pub delta: f64,
    #[serde(rename = "R")]
    pub neck_length: f64,
    pub eta: f64,
    pub rho: f64,
    pub t: f64,
    pub alpha: f64,
    /// Neck centres as `x y` pairs separated by `;`.
    pub centers: String,
    pub feasible: bool,
    pub area: Option<f64>,
    pub willmore: Option<f64>,
    pub total_gauss: Option<f64>,
    pub total_sff: Option<f64>,
    pub excess: Option<f64>,
    pub err_willmore: Option<f64>,
}

impl SweepRow {
    pub fn spec(&self) -> Result<GenusSurfaceSpec> {
        let centers = self
            .centers
            .split(';')
            .filter(|s| !s.trim().is_empty())
            .map(|pair| {
                let v: Vec<f64> = pair
                    .split_whitespace()
                    .map(|x| {
                        x.parse()
                            .map_err(|_| Error::InvalidArgument(format!("bad centre {pair:?}")))
                    })
                    .collect::<Result<_>>()?;
                match v[..] {
                    [x, y] => Ok([x, y]),
                    _ => Err(Error::InvalidArgument(format!("bad centre {pair:?}"))),
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(GenusSurfaceSpec {
            spec_version: SPEC_VERSION,
            m: self.m,
            g: self.g,
            delta: self.delta,
            neck_length: self.neck_length,
            eta: self.eta,
            rho: self.rho,
            centers,
            t: self.t,
            alpha: self.alpha,
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(w);
        for r in &self.rows {
            wr.serialize(r)?;
        }
        wr.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rd = csv::Reader::from_reader(r);
        let rows = rd
            .deserialize()
            .collect::<std::result::Result<Vec<SweepRow>, _>>()?;
        Ok(SweepTable { rows })
    }

    /// Feasible row with the smallest excess.
    pub fn best(&self) -> Option<&SweepRow> {
        self.rows
            .iter()
            .filter(|r| r.excess.is_some())
            .min_by(|a, b| a.excess.unwrap().total_cmp(&b.excess.unwrap()))
    }
}

fn evaluate(spec: GenusSurfaceSpec, tol: f64) -> Result<SweepRow> {
    let centers = spec
        .centers
        .iter()
        .map(|c| format!("{} {}", c[0], c[1]))
        .collect::<Vec<_>>()
        .join(";");
    let mut row = SweepRow {
        m: spec.m,
        g: spec.g,
        delta: spec.delta,
        neck_length: spec.neck_length,
        eta: spec.eta,
        rho: spec.rho,
        t: spec.t,
        alpha: spec.alpha,
        centers,
        feasible: spec.violations().is_empty(),
        area: None,
        willmore: None,
        total_gauss: None,
        total_sff: None,
        excess: None,
        err_willmore: None,
    };
    if row.feasible {
        let r = energy_report(&genus_surface(&spec)?, HelfrichParams::default(), tol)?;
        row.area = Some(r.area);
        row.willmore = Some(r.willmore);
        row.total_gauss = Some(r.total_gauss);
        row.total_sff = Some(r.total_sff);
        row.excess = Some(r.willmore - 4.0 * PI * spec.m as f64);
        row.err_willmore = Some(r.errors.willmore);
    }
    Ok(row)
}

/// Evaluates every grid point in parallel; row order follows the grid with
/// `t` varying fastest, then `theta_eta`, `R`, `delta`.
pub fn sweep(m: u32, g: u32, grid: &SweepGrid, tol: f64) -> Result<SweepTable> {
    let mut specs = Vec::new();
    for &d in &grid.deltas {
        for &r in &grid.neck_lengths {
            for &th in &grid.theta_etas {
                for &t in &grid.ts {
                    specs.push(GenusSurfaceSpec::new(m, g, d, r, th).with_bump(t, grid.alpha));
                }
            }
        }
    }
    let rows: Vec<Result<SweepRow>> = specs.into_par_iter().map(|s| evaluate(s, tol)).collect();
    Ok(SweepTable {
        rows: rows.into_iter().collect::<Result<_>>()?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> SweepGrid {
        SweepGrid {
            deltas: vec![0.1, 0.2],
            neck_lengths: vec![3.0],
            theta_etas: vec![0.5],
            ts: vec![0.0, 0.01],
            alpha: 0.5,
        }
    }

    #[test]
    fn rows_follow_grid_order() {
        let t = sweep(2, 1, &grid(), 1e-8).unwrap();
        let keys: Vec<(f64, f64)> = t.rows.iter().map(|r| (r.delta, r.t)).collect();
        assert_eq!(keys, [(0.1, 0.0), (0.1, 0.01), (0.2, 0.0), (0.2, 0.01)]);
        assert!(t.rows[0].feasible && !t.rows[2].feasible);
        assert!(t.rows[2].willmore.is_none() && t.rows[2].excess.is_none());
        let k = t.rows[0].total_gauss.unwrap();
        assert!(k.abs() < 1e-6);
        assert_eq!(t.best().unwrap().t, 0.0);
    }

    #[test]
    fn csv_round_trip() {
        let t = sweep(3, 2, &grid(), 1e-8).unwrap();
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("m,g,delta,R,eta,rho,t,alpha,centers,feasible,area,willmore"));
        assert!(text.lines().nth(3).unwrap().ends_with(",false,,,,,,"));
        assert_eq!(SweepTable::read_csv(&buf[..]).unwrap(), t);
    }

    #[test]
    fn row_rebuilds_its_spec() {
        let t = sweep(
            2,
            3,
            &SweepGrid {
                deltas: vec![0.05],
                neck_lengths: vec![4.0],
                theta_etas: vec![0.3],
                ts: vec![0.0],
                alpha: 0.5,
            },
            1e-8,
        )
        .unwrap();
        assert_eq!(
            t.rows[0].spec().unwrap(),
            GenusSurfaceSpec::new(2, 3, 0.05, 4.0, 0.3)
        );
        let mut bad = t.rows[0].clone();
        bad.centers = "1 2 3".into();
        assert!(bad.spec().is_err());
    }
}
