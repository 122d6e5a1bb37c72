//! `tdlhf scf` and `tdlhf run`: one-dimensional TD-LHF from a JSON config.
//!
//! Files written to the output directory:
//!
//! * `scf_report.json`: ground-state diagnostics, the config and the code version;
//! * `ground_state.csv`: `x_au, v0_au, v_h_au, v_x_au, density_au`;
//! * `trajectory.csv` (run only): `t_au, dipole_au, norm, energy_au`;
//! * `density_snapshots.bin`, `vx_snapshots.bin` (run only, when requested):
//!   binary frames in the layout of [`tdlhf_core::grid::write_snapshot`].

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use num_complex::Complex64;
use serde_json::json;
use tdlhf_core::grid::{density, run_config, run_scf, write_snapshot, Grid1D, GroundState, OutputKind, RunConfig, ScfReport};

use crate::error::{CliError, CliResult};
use crate::output::{with_output, Format, Table, CODE_VERSION};

pub fn load_config(path: &Path) -> CliResult<RunConfig> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    Ok(RunConfig::from_json(&text)?)
}

fn config_metadata(cfg: &RunConfig) -> CliResult<String> {
    serde_json::to_string(cfg).map_err(|e| CliError::Args(e.to_string()))
}

fn ground_state_table(grid: &Grid1D, cfg: &RunConfig, gs: &GroundState) -> CliResult<Table> {
    let v0 = cfg.v0.evaluate(grid);
    let n = density(&gs.orbitals);
    let mut t = Table::new("tdlhf scf", &["x_au", "v0_au", "v_h_au", "v_x_au", "density_au"])
        .meta("config", config_metadata(cfg)?);
    for i in 0..grid.n_points {
        t.rows.push(vec![grid.x(i), v0[i], gs.v_h[i], gs.v_x[i], n[i]]);
    }
    Ok(t)
}

fn write_report(dir: &Path, cfg: &RunConfig, report: &ScfReport) -> CliResult<()> {
    let doc = json!({
        "code_version": format!("tdlhf {CODE_VERSION}"),
        "config": cfg,
        "report": report,
    });
    with_output(Some(&dir.join("scf_report.json")), |out| {
        serde_json::to_writer_pretty(&mut *out, &doc)?;
        writeln!(out)
    })?;
    Ok(())
}

fn ensure_dir(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))
}

/// Ground state only; returns the diagnostics.
pub fn scf(config: &Path, dir: &Path, format: Format) -> CliResult<ScfReport> {
    let cfg = load_config(config)?;
    ensure_dir(dir)?;
    let (grid, gs, report) = run_scf(&cfg)?;
    write_report(dir, &cfg, &report)?;
    ground_state_table(&grid, &cfg, &gs)?.emit(Some(&dir.join(file_name("ground_state", format))), format)?;
    Ok(report)
}

fn file_name(stem: &str, format: Format) -> String {
    match format {
        Format::Csv => format!("{stem}.csv"),
        Format::Json => format!("{stem}.json"),
    }
}

/// Ground state, then propagation; returns the trajectory table.
pub fn run(config: &Path, dir: &Path, format: Format) -> CliResult<Table> {
    let cfg = load_config(config)?;
    ensure_dir(dir)?;
    let out = run_config(&cfg)?;
    write_report(dir, &cfg, &out.scf)?;
    ground_state_table(&out.grid, &cfg, &out.ground_state)?
        .emit(Some(&dir.join(file_name("ground_state", format))), format)?;

    let mut traj = Table::new("tdlhf run", &["t_au", "dipole_au", "norm", "energy_au"])
        .meta("config", config_metadata(&cfg)?)
        .meta("units", "atomic units; dipole = integral of x n(x)");
    traj.rows = out.rows.iter().map(|r| vec![r.t, r.dipole, r.norm, r.energy]).collect();
    traj.emit(Some(&dir.join(file_name("trajectory", format))), format)?;

    for kind in &cfg.outputs {
        let (name, pick): (&str, fn(&tdlhf_core::grid::Snapshot) -> &Vec<f64>) = match kind {
            OutputKind::Dipole => continue,
            OutputKind::DensitySnapshots => ("density_snapshots.bin", |s| &s.density),
            OutputKind::VxSnapshots => ("vx_snapshots.bin", |s| &s.v_x),
        };
        let path = dir.join(name);
        let mut w = BufWriter::new(File::create(&path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?);
        for s in &out.snapshots {
            let field: Vec<Complex64> = pick(s).iter().map(|&v| Complex64::new(v, 0.0)).collect();
            write_snapshot(&mut w, &out.grid, s.time, &[field])?;
        }
        w.flush()?;
    }
    Ok(traj)
}
