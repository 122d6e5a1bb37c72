//! Real-time propagation.
//!
//! Each step rebuilds `v_eff = v_ext(t) + v_H + v_x` from the current
//! orbitals. `cn` is Crank-Nicolson with one predictor-corrector pass for the
//! orbital-dependent part; `euler` is the explicit first-order step
//! `psi + dt dpsi/dt`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::scf::{energy, kinetic_apply};
use super::vx::{hartree_potential, solve_vx_with, GaugeRule};
use super::{density, Envelope, ExternalField, Grid1D, Interaction, OrbitalSet};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    #[default]
    Cn,
    Euler,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropagateOptions {
    pub dt: f64,
    pub n_steps: usize,
    pub scheme: Scheme,
    pub gauge: GaugeRule,
    /// Allowed per-step change of any orbital norm; `None` picks 1e-10 for
    /// `cn` and 1e-4 for `euler`.
    pub norm_tol: Option<f64>,
    /// Constant added to `v_x` at every rebuild.
    pub vx_shift: f64,
    /// Keep density and `v_x` every this many steps (0 keeps none).
    pub snapshot_stride: usize,
    /// Width of a `cos^(1/8)` absorbing mask at each wall; disables the norm check.
    pub absorber_width: Option<f64>,
}

impl Default for PropagateOptions {
    fn default() -> Self {
        Self {
            dt: 0.01,
            n_steps: 1000,
            scheme: Scheme::Cn,
            gauge: GaugeRule::Asymptotic,
            norm_tol: None,
            vx_shift: 0.0,
            snapshot_stride: 0,
            absorber_width: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub time: f64,
    pub density: Vec<f64>,
    pub v_x: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub dipole: Vec<f64>,
    /// `∫ n dx`.
    pub norm: Vec<f64>,
    pub energy: Vec<f64>,
    pub max_norm_change: f64,
    pub snapshots: Vec<Snapshot>,
    pub final_state: OrbitalSet,
}

/// `d = ∫ x n(x) dx`.
pub fn dipole(grid: &Grid1D, n: &[f64]) -> f64 {
    n.iter().enumerate().map(|(i, v)| grid.x(i) * v).sum::<f64>() * grid.dx
}

pub fn dipole_trace(traj: &Trajectory) -> Vec<(f64, f64)> {
    traj.times.iter().copied().zip(traj.dipole.iter().copied()).collect()
}

/// `Im ∫ (d(t) - d(0)) exp(i omega t - damping t) dt` by the trapezoid rule
/// on the stored samples.
pub fn absorption_spectrum(times: &[f64], dipole: &[f64], damping: f64, omegas: &[f64]) -> Vec<(f64, f64)> {
    let d0 = dipole.first().copied().unwrap_or(0.0);
    omegas
        .iter()
        .map(|&w| {
            let mut s = Complex64::new(0.0, 0.0);
            for k in 1..times.len() {
                let h = times[k] - times[k - 1];
                let f = |j: usize| Complex64::from_polar((-damping * times[j]).exp(), w * times[j]) * (dipole[j] - d0);
                s += (f(k - 1) + f(k)) * (0.5 * h);
            }
            (w, s.im)
        })
        .collect()
}

/// Multiply every orbital by `exp(i E0 x)`.
pub fn apply_kick(grid: &Grid1D, orbs: &mut OrbitalSet, e0: f64) {
    for psi in &mut orbs.orbitals {
        for (i, p) in psi.iter_mut().enumerate() {
            *p *= Complex64::from_polar(1.0, e0 * grid.x(i));
        }
    }
}

/// One Crank-Nicolson step under the fixed potential `v`.
///
/// The spatial mean of `v` is applied as the exact phase `exp(-i vbar dt)`,
/// so adding a constant to `v` changes only a global phase.
pub fn cn_step(grid: &Grid1D, orbitals: &mut [Vec<Complex64>], v: &[f64], dt: f64) {
    let n = v.len();
    let vbar = v.iter().sum::<f64>() / n as f64;
    let tau = Complex64::new(0.0, 0.5 * dt);
    let t = 0.5 / (grid.dx * grid.dx);
    let off = tau * (-t);
    let diag: Vec<Complex64> = v.iter().map(|&vi| 1.0 + tau * (2.0 * t + vi - vbar)).collect();
    // Forward elimination coefficients for (1 + i tau H), shared by all orbitals.
    let mut cp = vec![Complex64::new(0.0, 0.0); n];
    let mut denom = vec![Complex64::new(0.0, 0.0); n];
    denom[0] = diag[0];
    cp[0] = off / denom[0];
    for i in 1..n {
        denom[i] = diag[i] - off * cp[i - 1];
        cp[i] = off / denom[i];
    }
    let phase = Complex64::from_polar(1.0, -vbar * dt);
    let explicit_diag: Vec<Complex64> = v.iter().map(|&vi| 1.0 - tau * (2.0 * t + vi - vbar)).collect();
    for psi in orbitals.iter_mut() {
        let mut rhs: Vec<Complex64> = (0..n)
            .map(|i| {
                let left = if i > 0 { psi[i - 1] } else { Complex64::new(0.0, 0.0) };
                let right = if i + 1 < n { psi[i + 1] } else { Complex64::new(0.0, 0.0) };
                explicit_diag[i] * psi[i] - off * (left + right)
            })
            .collect();
        rhs[0] /= denom[0];
        for i in 1..n {
            rhs[i] = (rhs[i] - off * rhs[i - 1]) / denom[i];
        }
        for i in (0..n - 1).rev() {
            let next = rhs[i + 1];
            rhs[i] -= cp[i] * next;
        }
        for (p, r) in psi.iter_mut().zip(rhs) {
            *p = r * phase;
        }
    }
}

fn euler_step(grid: &Grid1D, orbitals: &mut [Vec<Complex64>], v: &[f64], dt: f64) {
    for psi in orbitals.iter_mut() {
        let tpsi = kinetic_apply(grid, psi);
        for i in 0..psi.len() {
            let hpsi = tpsi[i] + v[i] * psi[i];
            psi[i] += Complex64::new(0.0, -dt) * hpsi;
        }
    }
}

/// Orbital-dependent potential `v_H + v_x + shift` and the `v_x` part.
pub(crate) struct InteractionPotential<'a> {
    pub grid: &'a Grid1D,
    pub w: &'a Interaction,
    pub wmat: DMatrix<f64>,
    pub gauge: GaugeRule,
    pub shift: f64,
}

impl InteractionPotential<'_> {
    pub fn evaluate(&self, orbs: &OrbitalSet) -> Result<(Vec<f64>, Vec<f64>)> {
        let n = density(orbs);
        let vh = hartree_potential(self.grid, &n, self.w);
        let vx: Vec<f64> = solve_vx_with(self.grid, orbs, &self.wmat, self.w, self.gauge)?
            .v_x
            .into_iter()
            .map(|v| v + self.shift)
            .collect();
        let total = vh.iter().zip(&vx).map(|(a, b)| a + b).collect();
        Ok((total, vx))
    }
}

fn mask(grid: &Grid1D, width: f64) -> Vec<f64> {
    (0..grid.n_points)
        .map(|i| {
            let x = grid.x(i);
            let depth = (grid.x_min + width - x).max(x - (grid.x_max - width)).max(0.0);
            if depth <= 0.0 {
                1.0
            } else {
                (0.5 * std::f64::consts::PI * depth / width).cos().abs().powf(0.125)
            }
        })
        .collect()
}

fn norms(grid: &Grid1D, orbs: &OrbitalSet) -> Vec<f64> {
    orbs.orbitals.iter().map(|p| grid.inner(p, p).re).collect()
}

/// Propagate `state` from `t = state.time` for `n_steps` steps of `dt`.
///
/// A kick envelope is applied to the orbitals before the first step.
pub fn propagate(
    grid: &Grid1D,
    state: &OrbitalSet,
    field: &ExternalField,
    w: &Interaction,
    opts: &PropagateOptions,
) -> Result<Trajectory> {
    let pot = InteractionPotential { grid, w, wmat: w.matrix(grid), gauge: opts.gauge, shift: opts.vx_shift };
    run(grid, state, field, opts, w, |orbs| pot.evaluate(orbs))
}

/// Shared stepping loop; `interaction` returns `(v_H + v_x, v_x)`.
pub(crate) fn run<F>(
    grid: &Grid1D,
    state: &OrbitalSet,
    field: &ExternalField,
    opts: &PropagateOptions,
    w: &Interaction,
    interaction: F,
) -> Result<Trajectory>
where
    F: Fn(&OrbitalSet) -> Result<(Vec<f64>, Vec<f64>)>,
{
    if !(opts.dt > 0.0) || !opts.dt.is_finite() {
        return Err(Error::InvalidArgument(format!("dt must be positive, got {}", opts.dt)));
    }
    if field.v0.len() != grid.n_points {
        return Err(Error::InvalidArgument("v0 length does not match the grid".into()));
    }
    state.shared_occupation()?;
    let norm_tol = opts.norm_tol.unwrap_or(match opts.scheme {
        Scheme::Cn => 1e-10,
        Scheme::Euler => 1e-4,
    });
    let absorber = opts.absorber_width.map(|wd| mask(grid, wd));

    let mut orbs = state.clone();
    if field.envelope == Envelope::Kick && field.e0 != 0.0 {
        apply_kick(grid, &mut orbs, field.e0);
    }
    let dt = opts.dt;
    let t0 = orbs.time;
    let mut traj = Trajectory {
        times: Vec::with_capacity(opts.n_steps + 1),
        dipole: Vec::with_capacity(opts.n_steps + 1),
        norm: Vec::with_capacity(opts.n_steps + 1),
        energy: Vec::with_capacity(opts.n_steps + 1),
        max_norm_change: 0.0,
        snapshots: Vec::new(),
        final_state: orbs.clone(),
    };
    let mut current = interaction(&orbs)?;
    let observe = |traj: &mut Trajectory, orbs: &OrbitalSet, vx: &[f64], step: usize| -> Result<()> {
        let n = density(orbs);
        traj.times.push(orbs.time);
        traj.dipole.push(dipole(grid, &n));
        traj.norm.push(grid.integrate(&n));
        traj.energy.push(energy(grid, orbs, &field.potential(grid, orbs.time), w)?);
        if opts.snapshot_stride > 0 && step.is_multiple_of(opts.snapshot_stride) {
            traj.snapshots.push(Snapshot { time: orbs.time, density: n, v_x: vx.to_vec() });
        }
        Ok(())
    };
    observe(&mut traj, &orbs, &current.1, 0)?;

    for step in 1..=opts.n_steps {
        let t = t0 + (step - 1) as f64 * dt;
        let before = norms(grid, &orbs);
        match opts.scheme {
            Scheme::Cn => {
                let v_ext = field.potential(grid, t + 0.5 * dt);
                let predictor: Vec<f64> = v_ext.iter().zip(&current.0).map(|(a, b)| a + b).collect();
                let mut trial = orbs.clone();
                cn_step(grid, &mut trial.orbitals, &predictor, dt);
                trial.time = t + dt;
                let (v_trial, _) = interaction(&trial)?;
                let corrector: Vec<f64> = v_ext
                    .iter()
                    .zip(&current.0)
                    .zip(&v_trial)
                    .map(|((e, a), b)| e + 0.5 * (a + b))
                    .collect();
                cn_step(grid, &mut orbs.orbitals, &corrector, dt);
            }
            Scheme::Euler => {
                let v_ext = field.potential(grid, t);
                let v: Vec<f64> = v_ext.iter().zip(&current.0).map(|(a, b)| a + b).collect();
                euler_step(grid, &mut orbs.orbitals, &v, dt);
            }
        }
        orbs.time = t0 + step as f64 * dt;
        if let Some(m) = &absorber {
            for psi in &mut orbs.orbitals {
                for (p, f) in psi.iter_mut().zip(m) {
                    *p *= *f;
                }
            }
        } else {
            let after = norms(grid, &orbs);
            let drift = before.iter().zip(&after).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            traj.max_norm_change = traj.max_norm_change.max(drift);
            if !(drift <= norm_tol) {
                return Err(Error::NormDrift { step, drift, tol: norm_tol });
            }
        }
        current = interaction(&orbs)?;
        observe(&mut traj, &orbs, &current.1, step)?;
    }
    traj.final_state = orbs;
    Ok(traj)
}
