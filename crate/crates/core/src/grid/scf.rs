//! Static self-consistent ground state.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::vx::{hartree_potential, solve_vx_with, GaugeRule};
use super::{density, Grid1D, Interaction, OrbitalSet};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScfOptions {
    /// Fraction of the new potential mixed in per iteration, in `(0, 1]`.
    pub mix: f64,
    /// Convergence threshold on `max |v_out - v_in|`.
    pub tol: f64,
    pub max_iter: usize,
    pub gauge: GaugeRule,
}

impl Default for ScfOptions {
    fn default() -> Self {
        Self { mix: 0.5, tol: 1e-10, max_iter: 300, gauge: GaugeRule::Asymptotic }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundState {
    pub orbitals: OrbitalSet,
    pub v_h: Vec<f64>,
    pub v_x: Vec<f64>,
    pub eigenvalues: Vec<f64>,
    pub energy: f64,
    pub iterations: usize,
    pub residual_history: Vec<f64>,
}

/// `-(1/2) psi''` with the three-point stencil and zero beyond the ends.
pub fn kinetic_apply(grid: &Grid1D, psi: &[Complex64]) -> Vec<Complex64> {
    let n = psi.len();
    let c = -0.5 / (grid.dx * grid.dx);
    (0..n)
        .map(|i| {
            let left = if i > 0 { psi[i - 1] } else { Complex64::new(0.0, 0.0) };
            let right = if i + 1 < n { psi[i + 1] } else { Complex64::new(0.0, 0.0) };
            (left + right - 2.0 * psi[i]) * c
        })
        .collect()
}

/// Number of eigenvalues of the symmetric tridiagonal matrix below `x`.
fn sturm_count(diag: &[f64], off: f64, x: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0;
    for (i, d) in diag.iter().enumerate() {
        q = if i == 0 { d - x } else { d - x - off * off / q };
        if q == 0.0 {
            q = -f64::EPSILON * (d.abs() + off.abs()).max(f64::MIN_POSITIVE);
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Solve `(T - lambda) y = b` for the tridiagonal `T`, nudging zero pivots.
fn shifted_solve(diag: &[f64], off: f64, lambda: f64, b: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let tiny = f64::EPSILON * (diag.iter().fold(0.0f64, |m, d| m.max(d.abs())) + off.abs());
    let mut cp = vec![0.0; n];
    let mut y = vec![0.0; n];
    let mut den = diag[0] - lambda;
    for i in 0..n {
        if i > 0 {
            den = diag[i] - lambda - off * cp[i - 1];
        }
        if den.abs() < tiny {
            den = tiny;
        }
        cp[i] = off / den;
        y[i] = (b[i] - if i > 0 { off * y[i - 1] } else { 0.0 }) / den;
    }
    for i in (0..n - 1).rev() {
        y[i] -= cp[i] * y[i + 1];
    }
    y
}

/// Lowest `count` eigenpairs of `T + v`, normalized on the grid with the
/// largest component positive.
///
/// `T + v` is tridiagonal: eigenvalues come from Sturm-sequence bisection,
/// vectors from inverse iteration followed by Gram-Schmidt.
pub(crate) fn lowest_states(grid: &Grid1D, v: &[f64], count: usize) -> (Vec<Vec<Complex64>>, Vec<f64>) {
    let n = grid.n_points;
    let t = 0.5 / (grid.dx * grid.dx);
    let diag: Vec<f64> = v.iter().map(|vi| 2.0 * t + vi).collect();
    let off = -t;
    let lo0 = diag.iter().fold(f64::INFINITY, |m, &d| m.min(d)) - 2.0 * t;
    let hi0 = diag.iter().fold(f64::NEG_INFINITY, |m, &d| m.max(d)) + 2.0 * t;
    let scale = 1.0 / grid.dx.sqrt();
    let mut states: Vec<Vec<f64>> = Vec::with_capacity(count);
    let mut values = Vec::with_capacity(count);
    for k in 0..count.min(n) {
        let (mut lo, mut hi) = (lo0, hi0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if sturm_count(&diag, off, mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let lambda = 0.5 * (lo + hi);
        let mut y: Vec<f64> = (0..n).map(|i| 1.0 + 0.37 * ((i * 7919) % 101) as f64 / 101.0).collect();
        for _ in 0..3 {
            y = shifted_solve(&diag, off, lambda, &y);
            let norm = y.iter().map(|a| a * a).sum::<f64>().sqrt();
            y.iter_mut().for_each(|a| *a /= norm);
        }
        for prev in &states {
            let ov: f64 = prev.iter().zip(&y).map(|(a, b)| a * b).sum();
            y.iter_mut().zip(prev).for_each(|(a, p)| *a -= ov * p);
        }
        let norm = y.iter().map(|a| a * a).sum::<f64>().sqrt();
        y.iter_mut().for_each(|a| *a /= norm);
        states.push(y);
        values.push(lambda);
    }
    let states = states
        .into_iter()
        .map(|y| {
            let peak = y.iter().copied().fold(0.0f64, |m, x| if x.abs() > m.abs() { x } else { m });
            let sign = if peak < 0.0 { -scale } else { scale };
            y.into_iter().map(|x| Complex64::new(x * sign, 0.0)).collect()
        })
        .collect();
    (states, values)
}

/// Hartree-Fock form of the total energy,
/// `Σ occ <T + v_ext> + (1/2) ∫∫ n n w - (occ/2) Σ_ab ∫∫ |gamma|^2 w`.
pub fn energy(grid: &Grid1D, orbs: &OrbitalSet, v_ext: &[f64], w: &Interaction) -> Result<f64> {
    let occ = orbs.shared_occupation()?;
    let mut one_body = 0.0;
    for psi in &orbs.orbitals {
        let tpsi = kinetic_apply(grid, psi);
        for i in 0..psi.len() {
            one_body += (psi[i].conj() * (tpsi[i] + v_ext[i] * psi[i])).re;
        }
    }
    one_body *= occ * grid.dx;
    let n = density(orbs);
    let vh = hartree_potential(grid, &n, w);
    let e_h = 0.5 * grid.dx * n.iter().zip(&vh).map(|(a, b)| a * b).sum::<f64>();
    let m = orbs.len();
    let npt = grid.n_points;
    let row = w.row(grid);
    let mut e_x = 0.0;
    for a in 0..m {
        for b in 0..m {
            let pa = &orbs.orbitals[a];
            let pb = &orbs.orbitals[b];
            let pair: Vec<Complex64> = (0..npt).map(|i| pa[i].conj() * pb[i]).collect();
            for i in 0..npt {
                let mut conv = Complex64::new(0.0, 0.0);
                for j in 0..npt {
                    conv += row[i.abs_diff(j)] * pair[j];
                }
                e_x += (pair[i].conj() * conv).re;
            }
        }
    }
    e_x *= -0.5 * occ * grid.dx * grid.dx;
    Ok(one_body + e_h + e_x)
}

/// Self-consistent TD-LHF ground state for `N = 1` or even `N`.
pub fn scf_ground_state(
    grid: &Grid1D,
    w: &Interaction,
    v0: &[f64],
    electrons: usize,
    opts: &ScfOptions,
) -> Result<GroundState> {
    if !(opts.mix > 0.0 && opts.mix <= 1.0) {
        return Err(Error::InvalidArgument(format!("mix must lie in (0, 1], got {}", opts.mix)));
    }
    if v0.len() != grid.n_points {
        return Err(Error::InvalidArgument("v0 length does not match the grid".into()));
    }
    let occupations = OrbitalSet::occupations_for(electrons)?;
    let count = occupations.len();
    if count > grid.n_points / 2 {
        return Err(Error::InvalidArgument("too many electrons for the grid".into()));
    }
    let wmat = w.matrix(grid);
    let mut v_in = vec![0.0; grid.n_points];
    let mut history = Vec::new();
    for iteration in 1..=opts.max_iter {
        let total: Vec<f64> = v0.iter().zip(&v_in).map(|(a, b)| a + b).collect();
        let (states, values) = lowest_states(grid, &total, count);
        let orbs = OrbitalSet::new(states, occupations.clone(), 0.0)?;
        let n = density(&orbs);
        let v_h = hartree_potential(grid, &n, w);
        let v_x = solve_vx_with(grid, &orbs, &wmat, w, opts.gauge)?.v_x;
        let residual = v_h
            .iter()
            .zip(&v_x)
            .zip(&v_in)
            .fold(0.0f64, |m, ((h, x), i)| m.max((h + x - i).abs()));
        history.push(residual);
        if residual < opts.tol {
            let energy = energy(grid, &orbs, v0, w)?;
            return Ok(GroundState {
                orbitals: orbs,
                v_h,
                v_x,
                eigenvalues: values,
                energy,
                iterations: iteration,
                residual_history: history,
            });
        }
        for ((vi, h), x) in v_in.iter_mut().zip(&v_h).zip(&v_x) {
            *vi = (1.0 - opts.mix) * *vi + opts.mix * (h + x);
        }
    }
    Err(Error::ScfNotConverged {
        iterations: opts.max_iter,
        residual: *history.last().unwrap_or(&f64::NAN),
        history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn soft_well(grid: &Grid1D, depth: f64) -> Vec<f64> {
        (0..grid.n_points).map(|i| -depth / (grid.x(i).powi(2) + 1.0).sqrt()).collect()
    }

    #[test]
    fn kinetic_of_box_state() {
        let g = Grid1D::new(0.0, 1.0, 101).unwrap();
        let zero = vec![0.0; g.n_points];
        let (s, e) = lowest_states(&g, &zero, 1);
        // Box of length 1 + 2 dx with walls one step beyond the ends.
        let l = 1.0 + 2.0 * g.dx;
        let exact = (2.0 - 2.0 * (std::f64::consts::PI * g.dx / l).cos()) / (2.0 * g.dx * g.dx);
        assert!((e[0] - exact).abs() < 1e-10);
        assert!((g.inner(&s[0], &s[0]).re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tridiagonal_states_match_dense_eigensolver() {
        let g = Grid1D::new(-6.0, 6.0, 61).unwrap();
        let v: Vec<f64> = (0..61).map(|i| -3.0 / (g.x(i).powi(2) + 0.5).sqrt() + 0.1 * g.x(i)).collect();
        let t = 0.5 / (g.dx * g.dx);
        let h = nalgebra::DMatrix::from_fn(61, 61, |i, j| match i.abs_diff(j) {
            0 => 2.0 * t + v[i],
            1 => -t,
            _ => 0.0,
        });
        let mut dense: Vec<f64> = h.clone().symmetric_eigenvalues().iter().copied().collect();
        dense.sort_by(f64::total_cmp);
        let (s, e) = lowest_states(&g, &v, 5);
        for k in 0..5 {
            assert!((e[k] - dense[k]).abs() < 1e-10 * dense[k].abs().max(1.0));
            let psi = nalgebra::DVector::from_iterator(61, s[k].iter().map(|c| c.re));
            let r = &h * &psi - &psi * e[k];
            assert!(r.norm() < 1e-8 * psi.norm());
        }
        let orbs = OrbitalSet::new(s, vec![2; 5], 0.0).unwrap();
        assert!(orbs.orthonormality_error(&g) < 1e-12);
    }

    #[test]
    fn one_electron_is_self_interaction_free() {
        let g = Grid1D::new(-15.0, 15.0, 241).unwrap();
        let w = Interaction::default();
        let v0 = soft_well(&g, 1.0);
        let gs = scf_ground_state(&g, &w, &v0, 1, &ScfOptions::default()).unwrap();
        let worst = gs.v_h.iter().zip(&gs.v_x).fold(0.0f64, |m, (h, x)| m.max((h + x).abs()));
        assert!(worst < 1e-8, "{worst}");
        assert!(gs.orbitals.orthonormality_error(&g) < 1e-10);
        // Energy equals the noninteracting one.
        let (_, e0) = lowest_states(&g, &v0, 1);
        assert!((gs.energy - e0[0]).abs() < 1e-9);
    }

    #[test]
    fn four_electrons_converge() {
        let g = Grid1D::new(-15.0, 15.0, 181).unwrap();
        let w = Interaction::default();
        let v0 = soft_well(&g, 4.0);
        let gs = scf_ground_state(&g, &w, &v0, 4, &ScfOptions::default()).unwrap();
        assert!(gs.orbitals.orthonormality_error(&g) < 1e-10);
        assert!(gs.iterations > 1);
        assert!(gs.residual_history.last().unwrap() < &1e-10);
    }

    #[test]
    fn rejects_bad_input() {
        let g = Grid1D::new(-5.0, 5.0, 41).unwrap();
        let v0 = vec![0.0; 41];
        let w = Interaction::default();
        assert!(scf_ground_state(&g, &w, &v0, 3, &ScfOptions::default()).is_err());
        let bad = ScfOptions { mix: 0.0, ..ScfOptions::default() };
        assert!(scf_ground_state(&g, &w, &v0, 2, &bad).is_err());
        let tight = ScfOptions { max_iter: 1, tol: 0.0, ..ScfOptions::default() };
        assert!(matches!(scf_ground_state(&g, &w, &v0, 2, &tight), Err(Error::ScfNotConverged { .. })));
    }
}
