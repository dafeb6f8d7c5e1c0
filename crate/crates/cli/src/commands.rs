use std::f64::consts::PI;
use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use helfrich_core::constructions::{
    flattened_catenoid, flattened_sphere, genus_surface, rescale_to_area, unit_sphere,
    DEFAULT_ALPHA,
};
use helfrich_core::diagnostics::{
    convergence_distance, euler_genus, mueller_roeger_check, triangulate, MuellerRoegerReport,
    BALL_TOL,
};
use helfrich_core::energy::{
    energy_report, genus_from_gauss, write_csv, EnergyReport, DEFAULT_TOL,
};
use helfrich_core::optimizer::{
    helfrich_divergence_demo, minimize_excess, sweep as run_sweep, tuned_spec, DivergenceOptions,
    MinimizeOptions, MinimizeOutcome, SweepGrid,
};
use helfrich_core::suites::{run_suite, Suite, MESH_RESOLUTION};
use helfrich_core::surface::SurfaceAssembly;
use helfrich_core::{Error, Result};
use serde::Serialize;

use crate::config::RunConfig;
use crate::CliError;

/// Prints `body` and, when an output directory is configured, also writes it
/// to `name` there.
fn emit(c: &RunConfig, name: &str, body: &str) -> Result<()> {
    if let Some(dir) = &c.out {
        write_file(dir, name, body.as_bytes())?;
    }
    let mut out = io::stdout().lock();
    out.write_all(body.as_bytes())?;
    out.flush()?;
    Ok(())
}

fn write_file(dir: &Path, name: &str, bytes: &[u8]) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    fs::write(&path, bytes)?;
    Ok(path)
}

fn json<T: Serialize>(v: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

#[derive(Serialize)]
struct Generated {
    spec: PathBuf,
    mesh: PathBuf,
    vertices: usize,
    triangles: usize,
    euler_genus: i64,
    connected: bool,
}

pub fn generate(c: &RunConfig) -> std::result::Result<(), CliError> {
    let spec = c.spec()?;
    spec.check()?;
    let asm = genus_surface(&spec)?;
    let mesh = triangulate(&asm, c.resolution.unwrap_or(MESH_RESOLUTION))?;
    mesh.check_watertight()?;
    let genus = euler_genus(&mesh)?;
    if genus != spec.g as i64 {
        return Err(Error::ContradictionDetected(format!(
            "mesh genus {genus} but spec genus {}",
            spec.g
        ))
        .into());
    }
    let dir = c.out.clone().unwrap_or_else(|| PathBuf::from("."));
    let spec_path = write_file(&dir, "spec.json", spec.to_json()?.as_bytes())?;
    let mesh_path = dir.join("mesh.obj");
    let mut w = BufWriter::new(fs::File::create(&mesh_path)?);
    mesh.write_obj(&mut w)?;
    w.flush()?;
    let summary = Generated {
        spec: spec_path,
        mesh: mesh_path,
        vertices: mesh.vertices.len(),
        triangles: mesh.triangles.len(),
        euler_genus: genus,
        connected: mesh.is_connected(),
    };
    print!("{}", json(&summary)?);
    Ok(())
}

#[derive(Serialize)]
struct EnergyOutput {
    fixture: String,
    report: EnergyReport,
    genus_from_gauss: Option<i64>,
    mueller_roeger: Option<MuellerRoegerReport>,
}

/// The named fixture and whether it is a closed surface.
fn fixture(c: &RunConfig) -> Result<(String, SurfaceAssembly, bool)> {
    let name = c.fixture.clone().unwrap_or_else(|| "genus".into());
    let theta = c.theta.unwrap_or(1);
    if theta == 0 {
        return Err(Error::InvalidArgument(
            "multiplicity must be positive".into(),
        ));
    }
    let delta = c.delta.unwrap_or(0.1);
    let asm = match name.as_str() {
        "genus" => {
            let spec = c.spec()?;
            spec.check()?;
            genus_surface(&spec)?
        }
        "unit-sphere" => unit_sphere(theta),
        "flattened-sphere" => flattened_sphere(delta)?.with_multiplicity(theta),
        "catenoid" => {
            return Ok((
                name,
                flattened_catenoid(c.neck_length.unwrap_or(3.0), 0.0)?,
                false,
            ))
        }
        "tuned" => {
            tuned(
                c.m.unwrap_or(2),
                c.g.unwrap_or(0),
                delta,
                c.tol.unwrap_or(DEFAULT_TOL),
            )?
            .1
        }
        other => return Err(Error::InvalidArgument(format!("unknown fixture {other:?}"))),
    };
    Ok((name, asm, true))
}

/// Tuned construction rescaled to area `4 pi m`, with its bump amplitude.
fn tuned(m: u32, g: u32, delta: f64, tol: f64) -> Result<(f64, SurfaceAssembly)> {
    let spec = tuned_spec(m, g, delta)?;
    let asm = genus_surface(&spec)?;
    Ok((spec.t, rescale_to_area(&asm, 4.0 * PI * m as f64, tol)?.0))
}

pub fn energy(c: &RunConfig) -> std::result::Result<(), CliError> {
    let tol = c.tol.unwrap_or(DEFAULT_TOL);
    let (name, asm, closed) = fixture(c)?;
    let report = energy_report(&asm, c.params(), tol)?;
    match c.format.as_deref().unwrap_or("json") {
        "json" => {
            let genus = if closed {
                Some(genus_from_gauss(&asm, tol)?)
            } else {
                None
            };
            let mr = if asm.meta.ball_radius.is_some() {
                Some(mueller_roeger_check(&asm, tol)?)
            } else {
                None
            };
            let out = EnergyOutput {
                fixture: name,
                report,
                genus_from_gauss: genus,
                mueller_roeger: mr,
            };
            emit(c, "energy.json", &json(&out)?)?;
        }
        "csv" => {
            let mut buf = Vec::new();
            write_csv(&mut buf, &[report])?;
            emit(c, "energy.csv", &String::from_utf8_lossy(&buf))?;
        }
        other => return Err(Error::InvalidArgument(format!("unknown format {other:?}")).into()),
    }
    Ok(())
}

pub fn verify(suite: &str, c: &RunConfig) -> std::result::Result<(), CliError> {
    let suite: Suite = suite.parse()?;
    let report = run_suite(suite, c.seed());
    emit(c, &format!("verify-{suite}.json"), &report.to_json()?)?;
    let failed = report.failures().count();
    if failed > 0 {
        return Err(CliError::Verification(format!(
            "{failed} of {} checks failed in {suite}",
            report.checks.len()
        )));
    }
    Ok(())
}

pub fn sweep(c: &RunConfig) -> std::result::Result<(), CliError> {
    let d = SweepGrid::default();
    let grid = SweepGrid {
        deltas: c.deltas.clone().unwrap_or(d.deltas),
        neck_lengths: c.neck_lengths.clone().unwrap_or(d.neck_lengths),
        theta_etas: c.theta_etas.clone().unwrap_or(d.theta_etas),
        ts: c.ts.clone().unwrap_or(d.ts),
        alpha: c.alpha.unwrap_or(d.alpha),
    };
    let table = run_sweep(
        c.m.unwrap_or(2),
        c.g.unwrap_or(0),
        &grid,
        c.tol.unwrap_or(DEFAULT_TOL),
    )?;
    let mut buf = Vec::new();
    table.write_csv(&mut buf)?;
    emit(c, "sweep.csv", &String::from_utf8_lossy(&buf))?;
    Ok(())
}

pub fn minimize(c: &RunConfig) -> std::result::Result<(), CliError> {
    let d = MinimizeOptions::default();
    let opts = MinimizeOptions {
        seed: c.seed(),
        tol: c.tol.unwrap_or(d.tol),
        fixed_delta: c.delta,
        alpha: c.alpha.unwrap_or(DEFAULT_ALPHA),
        restarts: c.restarts.unwrap_or(d.restarts),
    };
    let eps = c.eps.unwrap_or(0.5);
    let budget = c.budget.unwrap_or(200);
    let write = |o: &MinimizeOutcome| -> Result<()> {
        if let Some(dir) = &c.out {
            write_file(dir, "best_spec.json", o.spec.to_json()?.as_bytes())?;
        }
        emit(c, "minimize.json", &json(o)?)
    };
    match minimize_excess(c.m.unwrap_or(2), c.g.unwrap_or(0), eps, budget, &opts) {
        Ok(o) => {
            write(&o)?;
            Ok(())
        }
        Err(Error::BudgetExhausted(o)) => {
            write(&o)?;
            Err(Error::BudgetExhausted(o).into())
        }
        Err(e) => Err(e.into()),
    }
}

pub fn demo_divergence(c: &RunConfig) -> std::result::Result<(), CliError> {
    let mut params = c.params();
    if c.chi_k.is_none() {
        params.chi_k = 1.0;
    }
    let opts = DivergenceOptions {
        tol: c.tol.unwrap_or(DivergenceOptions::default().tol),
        ..Default::default()
    };
    let genera = c.genus.clone().unwrap_or_else(|| vec![1, 2, 4, 8]);
    let table = helfrich_divergence_demo(params, &genera, &opts)?;
    if let Some(dir) = &c.out {
        write_file(dir, "divergence.json", json(&table)?.as_bytes())?;
    }
    let mut buf = Vec::new();
    table.write_csv(&mut buf)?;
    emit(c, "divergence.csv", &String::from_utf8_lossy(&buf))?;
    eprintln!(
        "slope {:.6} per handle (residual {:.3e})",
        table.fit.slope, table.fit.residual
    );
    Ok(())
}

#[derive(Serialize)]
struct ProfileRow {
    delta: f64,
    t: f64,
    willmore: f64,
    excess: f64,
    convergence_distance: f64,
    worst_radius: f64,
}

pub fn profile(c: &RunConfig) -> std::result::Result<(), CliError> {
    let (m, g) = (c.m.unwrap_or(2), c.g.unwrap_or(0));
    let tol = c.tol.unwrap_or(DEFAULT_TOL);
    let deltas = c.deltas.clone().unwrap_or_else(|| vec![0.1, 0.05, 0.02]);
    let mut buf = Vec::new();
    {
        let mut wr = csv_writer(&mut buf);
        for d in deltas {
            let (t, asm) = tuned(m, g, d, tol)?;
            let r = energy_report(&asm, Default::default(), tol)?;
            let cd = convergence_distance(&asm, m, BALL_TOL)?;
            wr.serialize(ProfileRow {
                delta: d,
                t,
                willmore: r.willmore,
                excess: r.willmore - 4.0 * PI * m as f64,
                convergence_distance: cd.distance,
                worst_radius: cd.worst_radius,
            })?;
        }
        wr.flush()?;
    }
    emit(c, "profile.csv", &String::from_utf8_lossy(&buf))?;
    Ok(())
}

fn csv_writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w)
}
