//! JSON run configuration, trajectory rows and binary snapshots.
//!
//! Snapshot files are a sequence of frames, each laid out little-endian as
//!
//! ```text
//! magic      8 bytes  "TDLHFSNP"
//! version    u32      1
//! n_points   u64
//! x_min      f64
//! x_max      f64
//! n_fields   u64
//! time       f64
//! data       n_fields * n_points * (re f64, im f64), field-major
//! ```
//!
//! Real fields (density, `v_x`) are stored with zero imaginary parts.

use std::io::{self, Read, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::propagate::{propagate, PropagateOptions, Scheme, Snapshot};
use super::scf::{scf_ground_state, GroundState, ScfOptions};
use super::vx::{kernel_residual, GaugeRule};
use super::{Envelope, ExternalField, Grid1D, Interaction};
use crate::error::{Error, Result};

const MAGIC: &[u8; 8] = b"TDLHFSNP";
const VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub x_min: f64,
    pub x_max: f64,
    pub n_points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InteractionConfig {
    pub softening: f64,
    pub scale: f64,
}

impl Default for InteractionConfig {
    fn default() -> Self {
        Self { softening: 1.0, scale: 1.0 }
    }
}

fn one() -> f64 {
    1.0
}

/// Static confining potential.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialShape {
    /// `-depth / sqrt((x - center)^2 + softening^2)`.
    SoftWell {
        depth: f64,
        #[serde(default = "one")]
        softening: f64,
        #[serde(default)]
        center: f64,
    },
    /// `omega^2 (x - center)^2 / 2`.
    Harmonic {
        omega: f64,
        #[serde(default)]
        center: f64,
    },
    /// Two soft wells at `±separation/2`.
    DoubleWell {
        depth: f64,
        separation: f64,
        #[serde(default = "one")]
        softening: f64,
    },
}

impl PotentialShape {
    pub fn evaluate(&self, grid: &Grid1D) -> Vec<f64> {
        let soft = |x: f64, c: f64, a: f64| 1.0 / ((x - c).powi(2) + a * a).sqrt();
        (0..grid.n_points)
            .map(|i| {
                let x = grid.x(i);
                match *self {
                    PotentialShape::SoftWell { depth, softening, center } => -depth * soft(x, center, softening),
                    PotentialShape::Harmonic { omega, center } => 0.5 * omega * omega * (x - center).powi(2),
                    PotentialShape::DoubleWell { depth, separation, softening } => {
                        -depth * (soft(x, -0.5 * separation, softening) + soft(x, 0.5 * separation, softening))
                    }
                }
            })
            .collect()
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            PotentialShape::SoftWell { depth, softening, center } => {
                depth.is_finite() && softening > 0.0 && center.is_finite()
            }
            PotentialShape::Harmonic { omega, center } => omega.is_finite() && center.is_finite(),
            PotentialShape::DoubleWell { depth, separation, softening } => {
                depth.is_finite() && separation.is_finite() && softening > 0.0
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("bad v0 parameters: {self:?}")))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveConfig {
    #[serde(rename = "E0", alias = "e0", default)]
    pub e0: f64,
    #[serde(default)]
    pub omega: f64,
    #[serde(default = "kick")]
    pub envelope: Envelope,
}

fn kick() -> Envelope {
    Envelope::Kick
}

impl Default for DriveConfig {
    fn default() -> Self {
        Self { e0: 0.0, omega: 0.0, envelope: Envelope::Kick }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputKind {
    Dipole,
    DensitySnapshots,
    VxSnapshots,
}

fn default_dt() -> f64 {
    0.01
}

fn default_outputs() -> Vec<OutputKind> {
    vec![OutputKind::Dipole]
}

/// One TD-LHF run as read from JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub grid: GridConfig,
    #[serde(default)]
    pub interaction: InteractionConfig,
    pub electrons: usize,
    pub v0: PotentialShape,
    #[serde(default)]
    pub drive: DriveConfig,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default)]
    pub n_steps: usize,
    #[serde(default)]
    pub scheme: Scheme,
    #[serde(default = "default_outputs")]
    pub outputs: Vec<OutputKind>,
    #[serde(default)]
    pub snapshot_stride: usize,
    #[serde(default)]
    pub gauge: GaugeRule,
    #[serde(default)]
    pub scf: ScfOptions,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.grid()?;
        self.interaction()?;
        self.v0.validate()?;
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::Config(format!("dt must be positive, got {}", self.dt)));
        }
        if self.electrons == 0 || (self.electrons > 1 && self.electrons % 2 == 1) {
            return Err(Error::Config(format!("electrons must be 1 or even, got {}", self.electrons)));
        }
        let snapshots = self.outputs.iter().any(|o| *o != OutputKind::Dipole);
        if snapshots && self.snapshot_stride == 0 {
            return Err(Error::Config("snapshot outputs need snapshot_stride > 0".into()));
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<Grid1D> {
        Grid1D::new(self.grid.x_min, self.grid.x_max, self.grid.n_points).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn interaction(&self) -> Result<Interaction> {
        if !self.interaction.scale.is_finite() {
            return Err(Error::Config("interaction scale must be finite".into()));
        }
        Ok(Interaction::new(self.interaction.softening)
            .map_err(|e| Error::Config(e.to_string()))?
            .scaled(self.interaction.scale))
    }

    pub fn field(&self, grid: &Grid1D) -> ExternalField {
        ExternalField {
            v0: self.v0.evaluate(grid),
            e0: self.drive.e0,
            omega: self.drive.omega,
            envelope: self.drive.envelope,
        }
    }

    pub fn propagate_options(&self) -> PropagateOptions {
        let snapshots = self.outputs.iter().any(|o| *o != OutputKind::Dipole);
        PropagateOptions {
            dt: self.dt,
            n_steps: self.n_steps,
            scheme: self.scheme,
            gauge: self.gauge,
            snapshot_stride: if snapshots { self.snapshot_stride } else { 0 },
            ..PropagateOptions::default()
        }
    }
}

/// Diagnostics of a converged ground state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScfReport {
    pub electrons: usize,
    pub iterations: usize,
    pub energy: f64,
    pub eigenvalues: Vec<f64>,
    pub residual_history: Vec<f64>,
    pub orthonormality_error: f64,
    /// Dense residual of the exchange equation for the final `v_x`.
    pub kernel_residual: f64,
    /// `max |v_x + v_H|`, reported for one electron.
    pub vx_plus_vh_max_abs: Option<f64>,
    /// Spread of `v_x + v_H/2` over the inner 90% of the grid, reported for two electrons.
    pub vx_plus_half_vh_spread: Option<f64>,
}

impl ScfReport {
    pub fn new(grid: &Grid1D, w: &Interaction, electrons: usize, gs: &GroundState) -> Self {
        let sum = |f: f64| -> Vec<f64> { gs.v_x.iter().zip(&gs.v_h).map(|(x, h)| x + f * h).collect() };
        let vx_plus_vh_max_abs =
            (electrons == 1).then(|| sum(1.0).iter().fold(0.0f64, |m, v| m.max(v.abs())));
        let vx_plus_half_vh_spread = (electrons == 2).then(|| {
            let s = sum(0.5);
            let edge = grid.n_points / 20;
            let inner = &s[edge..grid.n_points - edge];
            let hi = inner.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let lo = inner.iter().copied().fold(f64::INFINITY, f64::min);
            hi - lo
        });
        Self {
            electrons,
            iterations: gs.iterations,
            energy: gs.energy,
            eigenvalues: gs.eigenvalues.clone(),
            residual_history: gs.residual_history.clone(),
            orthonormality_error: gs.orbitals.orthonormality_error(grid),
            kernel_residual: kernel_residual(grid, &gs.orbitals, w, &gs.v_x),
            vx_plus_vh_max_abs,
            vx_plus_half_vh_spread,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRow {
    pub t: f64,
    pub dipole: f64,
    pub norm: f64,
    pub energy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunOutput {
    pub grid: Grid1D,
    pub scf: ScfReport,
    pub ground_state: GroundState,
    pub rows: Vec<TrajectoryRow>,
    pub snapshots: Vec<Snapshot>,
}

/// Ground state only.
pub fn run_scf(cfg: &RunConfig) -> Result<(Grid1D, GroundState, ScfReport)> {
    cfg.validate()?;
    let grid = cfg.grid()?;
    let w = cfg.interaction()?;
    let v0 = cfg.v0.evaluate(&grid);
    let opts = ScfOptions { gauge: cfg.gauge, ..cfg.scf };
    let gs = scf_ground_state(&grid, &w, &v0, cfg.electrons, &opts)?;
    let report = ScfReport::new(&grid, &w, cfg.electrons, &gs);
    Ok((grid, gs, report))
}

/// Ground state followed by propagation.
pub fn run_config(cfg: &RunConfig) -> Result<RunOutput> {
    let (grid, gs, scf) = run_scf(cfg)?;
    let w = cfg.interaction()?;
    let traj = propagate(&grid, &gs.orbitals, &cfg.field(&grid), &w, &cfg.propagate_options())?;
    let rows = (0..traj.times.len())
        .map(|i| TrajectoryRow { t: traj.times[i], dipole: traj.dipole[i], norm: traj.norm[i], energy: traj.energy[i] })
        .collect();
    Ok(RunOutput { grid, scf, ground_state: gs, rows, snapshots: traj.snapshots })
}

/// One decoded snapshot frame.
#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotFrame {
    pub n_points: usize,
    pub x_min: f64,
    pub x_max: f64,
    pub time: f64,
    pub fields: Vec<Vec<Complex64>>,
}

/// Append one frame.
pub fn write_snapshot<W: Write>(out: &mut W, grid: &Grid1D, time: f64, fields: &[Vec<Complex64>]) -> io::Result<()> {
    if fields.iter().any(|f| f.len() != grid.n_points) {
        return Err(io::Error::new(io::ErrorKind::InvalidInput, "field length does not match the grid"));
    }
    out.write_all(MAGIC)?;
    out.write_all(&VERSION.to_le_bytes())?;
    out.write_all(&(grid.n_points as u64).to_le_bytes())?;
    out.write_all(&grid.x_min.to_le_bytes())?;
    out.write_all(&grid.x_max.to_le_bytes())?;
    out.write_all(&(fields.len() as u64).to_le_bytes())?;
    out.write_all(&time.to_le_bytes())?;
    let mut buf = Vec::with_capacity(fields.len() * grid.n_points * 16);
    for f in fields {
        for v in f {
            buf.extend_from_slice(&v.re.to_le_bytes());
            buf.extend_from_slice(&v.im.to_le_bytes());
        }
    }
    out.write_all(&buf)
}

fn bad(msg: &str) -> io::Error {
    io::Error::new(io::ErrorKind::InvalidData, msg.to_string())
}

/// Read every frame until end of input.
pub fn read_snapshots<R: Read>(mut input: R) -> io::Result<Vec<SnapshotFrame>> {
    let mut bytes = Vec::new();
    input.read_to_end(&mut bytes)?;
    let mut pos = 0usize;
    let mut take = |n: usize| -> io::Result<&[u8]> {
        let s = bytes.get(pos..pos + n).ok_or_else(|| bad("truncated snapshot"))?;
        pos += n;
        Ok(s)
    };
    let mut frames = Vec::new();
    loop {
        let magic = match take(8) {
            Ok(m) => m,
            Err(_) => break,
        };
        if magic != MAGIC {
            return Err(bad("bad snapshot magic"));
        }
        let u32_at = |s: &[u8]| u32::from_le_bytes(s.try_into().unwrap());
        let u64_at = |s: &[u8]| u64::from_le_bytes(s.try_into().unwrap());
        let f64_at = |s: &[u8]| f64::from_le_bytes(s.try_into().unwrap());
        if u32_at(take(4)?) != VERSION {
            return Err(bad("unsupported snapshot version"));
        }
        let n_points = u64_at(take(8)?) as usize;
        let x_min = f64_at(take(8)?);
        let x_max = f64_at(take(8)?);
        let n_fields = u64_at(take(8)?) as usize;
        let time = f64_at(take(8)?);
        let len = n_fields.checked_mul(n_points).and_then(|v| v.checked_mul(16)).ok_or_else(|| bad("oversized frame"))?;
        let data = take(len)?;
        let fields = data
            .chunks_exact(16 * n_points.max(1))
            .take(n_fields)
            .map(|f| f.chunks_exact(16).map(|c| Complex64::new(f64_at(&c[..8]), f64_at(&c[8..]))).collect())
            .collect();
        frames.push(SnapshotFrame { n_points, x_min, x_max, time, fields });
    }
    Ok(frames)
}
