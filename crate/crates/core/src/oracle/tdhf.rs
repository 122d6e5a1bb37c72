//! Time-dependent Hartree-Fock for one doubly occupied orbital.
//!
//! With a single spatial orbital the Fock exchange operator is the local
//! potential `-v_H/2`, so the Fock operator is `h + v_H/2`. The propagation
//! reuses the production Crank-Nicolson stepper.

use crate::error::{Error, Result};
use crate::grid::propagate::{run, PropagateOptions};
use crate::grid::scf::lowest_states;
use crate::grid::{density, hartree_potential, ExternalField, Grid1D, Interaction, OrbitalSet};

#[derive(Debug, Clone, PartialEq)]
pub struct HfGroundState {
    pub orbitals: OrbitalSet,
    pub eigenvalue: f64,
    /// `2<h> + (1/4) ∫ v_H n`.
    pub energy: f64,
    pub iterations: usize,
}

/// Restricted HF ground state of two electrons.
pub fn hf_n2_ground_state(
    grid: &Grid1D,
    w: &Interaction,
    v0: &[f64],
    mix: f64,
    tol: f64,
    max_iter: usize,
) -> Result<HfGroundState> {
    let mut v_half = vec![0.0; grid.n_points];
    let mut residual = f64::INFINITY;
    let mut history = Vec::new();
    for iteration in 1..=max_iter {
        let fock: Vec<f64> = v0.iter().zip(&v_half).map(|(a, b)| a + b).collect();
        let (states, values) = lowest_states(grid, &fock, 1);
        let orbs = OrbitalSet::new(states, vec![2], 0.0)?;
        let n = density(&orbs);
        let vh = hartree_potential(grid, &n, w);
        residual = vh.iter().zip(&v_half).fold(0.0f64, |m, (h, v)| m.max((0.5 * h - v).abs()));
        history.push(residual);
        if residual < tol {
            // eps = <h> + (1/2)<v_H>, so 2<h> = 2 eps - ∫ v_H n / 2.
            let vh_n = grid.integrate(&n.iter().zip(&vh).map(|(a, b)| a * b).collect::<Vec<_>>());
            let energy = 2.0 * values[0] - 0.5 * vh_n + 0.25 * vh_n;
            return Ok(HfGroundState { orbitals: orbs, eigenvalue: values[0], energy, iterations: iteration });
        }
        for (v, h) in v_half.iter_mut().zip(&vh) {
            *v = (1.0 - mix) * *v + mix * 0.5 * h;
        }
    }
    Err(Error::ScfNotConverged { iterations: max_iter, residual, history })
}

/// Dipole trace `(t, d(t))` of the TDHF evolution of `state`.
pub fn tdhf_n2(
    grid: &Grid1D,
    w: &Interaction,
    state: &OrbitalSet,
    field: &ExternalField,
    dt: f64,
    n_steps: usize,
) -> Result<Vec<(f64, f64)>> {
    if state.len() != 1 || state.occupations != [2] {
        return Err(Error::InvalidArgument("TDHF oracle needs one doubly occupied orbital".into()));
    }
    let opts = PropagateOptions { dt, n_steps, ..PropagateOptions::default() };
    let traj = run(grid, state, field, &opts, w, |orbs| {
        let vh = hartree_potential(grid, &density(orbs), w);
        let vx: Vec<f64> = vh.iter().map(|h| -0.5 * h).collect();
        Ok((vh.iter().map(|h| 0.5 * h).collect(), vx))
    })?;
    Ok(traj.times.into_iter().zip(traj.dipole).collect())
}
