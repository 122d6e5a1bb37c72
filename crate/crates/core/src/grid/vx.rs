//! The exchange integral equation on the grid.
//!
//! Per spin channel, with `gamma(x, x1) = Σ phi_a(x) phi_a*(x1)`:
//!
//! ```text
//! n(x) v(x) - ∫ v(x1) |gamma(x, x1)|^2 dx1
//!     = -∫ w(x, x1) |gamma(x, x1)|^2 dx1 + ∫∫ w(x1, x2) gamma(x, x1) gamma(x1, x2) gamma(x2, x) dx1 dx2
//! ```
//!
//! The kernel is separable, `|gamma(x, x1)|^2 = Σ_ab u_ab(x) u_ab*(x1)` with
//! `u_ab = phi_a phi_b*`, so `v = (b + Σ u_ab c_ab) / n` and the unknowns
//! reduce to the `n_orb^2` projections `c_ab = <u_ab | v>`. Constants are an
//! exact null direction and the gauge rule picks the additive constant.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{density, Grid1D, Interaction, OrbitalSet};
use crate::error::{Error, Result};

/// Rows with `n < DENSITY_FLOOR * max(n)` are not solved for.
pub const DENSITY_FLOOR: f64 = 1e-12;
const NULL_TOL: f64 = 1e-10;
const EDGE_FRACTION: f64 = 0.05;

/// How the additive constant of `v_x` is fixed.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GaugeRule {
    /// `v_x = -v_H / N` on average over the outer 5% of the box.
    #[default]
    Asymptotic,
    /// `v_x = 0` on average over the outer 5% of the box.
    BoundaryZero,
    /// No shift: the constant left by the deflated solve; floored points
    /// continue the edge value.
    Free,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VxSolution {
    pub v_x: Vec<f64>,
    /// `max |M v - b| / max |b|` over the solved rows.
    pub residual: f64,
    pub null_dimension: usize,
    /// Points below the density floor, set by the gauge rule.
    pub floored_points: usize,
}

/// `v_H(x) = ∫ w(x, x') n(x') dx'`.
pub fn hartree_potential(grid: &Grid1D, n: &[f64], w: &Interaction) -> Vec<f64> {
    let row = w.row(grid);
    (0..grid.n_points)
        .map(|i| {
            let mut s = 0.0;
            for (j, nj) in n.iter().enumerate() {
                s += row[i.abs_diff(j)] * nj;
            }
            s * grid.dx
        })
        .collect()
}

/// `|gamma(x_i, x_j)|^2 dx` for one spin channel; its rows sum to `n_sigma`.
pub fn exchange_kernel_matrix(grid: &Grid1D, orbs: &OrbitalSet) -> DMatrix<f64> {
    let n = grid.n_points;
    DMatrix::from_fn(n, n, |i, j| {
        let g: Complex64 = orbs.orbitals.iter().map(|p| p[i] * p[j].conj()).sum();
        g.norm_sqr() * grid.dx
    })
}

struct Pieces {
    n_sigma: Vec<f64>,
    /// `u_ab(x)`, flattened `a * n_orb + b`.
    u: Vec<Vec<Complex64>>,
    rhs: Vec<f64>,
}

fn pieces(grid: &Grid1D, orbs: &OrbitalSet, wmat: &DMatrix<f64>) -> Pieces {
    let npt = grid.n_points;
    let m = orbs.len();
    let phi = &orbs.orbitals;
    let n_sigma: Vec<f64> = (0..npt).map(|i| phi.iter().map(|p| p[i].norm_sqr()).sum()).collect();
    let mut u = Vec::with_capacity(m * m);
    for a in 0..m {
        for b in 0..m {
            u.push((0..npt).map(|i| phi[a][i] * phi[b][i].conj()).collect::<Vec<_>>());
        }
    }
    // W_ab(x) = ∫ w(x, x1) phi_a*(x1) phi_b(x1) dx1 = (w * conj(u_ab))(x)
    let mut pair = Vec::with_capacity(m * m);
    for uab in &u {
        let src = DVector::from_iterator(npt, uab.iter().map(|v| v.conj()));
        let re = wmat * src.map(|v| v.re);
        let im = wmat * src.map(|v| v.im);
        pair.push((0..npt).map(|i| Complex64::new(re[i], im[i]) * grid.dx).collect::<Vec<_>>());
    }
    // K_ac = Σ_b ∫ phi_a* phi_b W_bc
    let mut k = vec![Complex64::new(0.0, 0.0); m * m];
    for a in 0..m {
        for c in 0..m {
            let mut s = Complex64::new(0.0, 0.0);
            for b in 0..m {
                let w_bc = &pair[b * m + c];
                for i in 0..npt {
                    s += phi[a][i].conj() * phi[b][i] * w_bc[i];
                }
            }
            k[a * m + c] = s * grid.dx;
        }
    }
    let rhs = (0..npt)
        .map(|i| {
            let mut s = Complex64::new(0.0, 0.0);
            for ab in 0..m * m {
                s += u[ab][i] * (k[ab] - pair[ab][i]);
            }
            s.re
        })
        .collect();
    Pieces { n_sigma, u, rhs }
}

fn edge_indices(npt: usize, retained: &[bool]) -> Vec<usize> {
    let width = ((EDGE_FRACTION * npt as f64).ceil() as usize).max(1);
    let mut idx: Vec<usize> = (0..npt)
        .filter(|&i| (i < width || i >= npt - width) && retained[i])
        .collect();
    if idx.is_empty() {
        // Nothing retained near the walls: use the outermost retained points.
        let first = retained.iter().position(|&r| r);
        let last = retained.iter().rposition(|&r| r);
        idx.extend(first);
        idx.extend(last.filter(|l| Some(*l) != first));
    }
    idx
}

/// Solve the exchange equation for the orbitals' spin channel.
pub fn solve_vx(grid: &Grid1D, orbs: &OrbitalSet, w: &Interaction, gauge: GaugeRule) -> Result<VxSolution> {
    solve_vx_with(grid, orbs, &w.matrix(grid), w, gauge)
}

pub(crate) fn solve_vx_with(
    grid: &Grid1D,
    orbs: &OrbitalSet,
    wmat: &DMatrix<f64>,
    w: &Interaction,
    gauge: GaugeRule,
) -> Result<VxSolution> {
    orbs.shared_occupation()?;
    let npt = grid.n_points;
    if orbs.orbitals.iter().any(|p| p.len() != npt) {
        return Err(Error::InvalidArgument("orbital length does not match the grid".into()));
    }
    let m = orbs.len();
    let Pieces { n_sigma, u, rhs } = pieces(grid, orbs, wmat);
    let n_max = n_sigma.iter().fold(0.0f64, |a, &b| a.max(b));
    if !(n_max > 0.0) {
        return Err(Error::DensityFloor("density vanishes everywhere".into()));
    }
    let retained: Vec<bool> = n_sigma.iter().map(|&n| n >= DENSITY_FLOOR * n_max).collect();

    let dim = m * m;
    let mut g = DMatrix::<Complex64>::identity(dim, dim);
    let mut s = DVector::<Complex64>::zeros(dim);
    for i in (0..npt).filter(|&i| retained[i]) {
        let inv = grid.dx / n_sigma[i];
        for p in 0..dim {
            let up = u[p][i].conj() * inv;
            s[p] += up * rhs[i];
            for q in 0..dim {
                g[(p, q)] -= up * u[q][i];
            }
        }
    }
    let singular = g.clone().singular_values();
    let sigma_max = singular.max().max(1.0);
    let null_dimension = singular.iter().filter(|&&v| v < NULL_TOL * sigma_max).count();
    if null_dimension > 1 {
        return Err(Error::SingularSystem(null_dimension));
    }
    // Constants map to c_ab = δ_ab; deflating that direction leaves a regular system.
    let mut deflated = g;
    let weight = Complex64::new(1.0 / m as f64, 0.0);
    for a in 0..m {
        for b in 0..m {
            deflated[(a * m + a, b * m + b)] += weight;
        }
    }
    let c = deflated
        .lu()
        .solve(&s)
        .ok_or(Error::SingularSystem(null_dimension.max(1)))?;

    let mut v = vec![0.0; npt];
    for i in (0..npt).filter(|&i| retained[i]) {
        let mut acc = Complex64::new(rhs[i], 0.0);
        for p in 0..dim {
            acc += u[p][i] * c[p];
        }
        v[i] = acc.re / n_sigma[i];
    }

    let target: Vec<f64> = match gauge {
        GaugeRule::Asymptotic => {
            let n_total = density(orbs);
            let vh = hartree_potential(grid, &n_total, w);
            let electrons = orbs.electron_count() as f64;
            vh.iter().map(|h| -h / electrons).collect()
        }
        GaugeRule::BoundaryZero => vec![0.0; npt],
        GaugeRule::Free => {
            let edges = edge_indices(npt, &retained);
            vec![edges.iter().map(|&i| v[i]).sum::<f64>() / edges.len() as f64; npt]
        }
    };
    if gauge != GaugeRule::Free {
        let edges = edge_indices(npt, &retained);
        let shift = edges.iter().map(|&i| target[i] - v[i]).sum::<f64>() / edges.len() as f64;
        for i in (0..npt).filter(|&i| retained[i]) {
            v[i] += shift;
        }
    }
    let mut floored_points = 0;
    for i in (0..npt).filter(|&i| !retained[i]) {
        v[i] = target[i];
        floored_points += 1;
    }

    let residual = projected_residual(grid, &n_sigma, &u, &rhs, &v, &retained);
    Ok(VxSolution { v_x: v, residual, null_dimension, floored_points })
}

/// `max |n v - Σ u <u|v> - b| / max |b|` over retained rows.
fn projected_residual(
    grid: &Grid1D,
    n_sigma: &[f64],
    u: &[Vec<Complex64>],
    rhs: &[f64],
    v: &[f64],
    retained: &[bool],
) -> f64 {
    let proj: Vec<Complex64> = u
        .iter()
        .map(|up| {
            let mut s = Complex64::new(0.0, 0.0);
            for i in (0..v.len()).filter(|&i| retained[i]) {
                s += up[i].conj() * v[i];
            }
            s * grid.dx
        })
        .collect();
    let scale = rhs.iter().fold(0.0f64, |a, b| a.max(b.abs())).max(f64::MIN_POSITIVE);
    let mut worst = 0.0f64;
    for i in (0..n_sigma.len()).filter(|&i| retained[i]) {
        let mut lhs = Complex64::new(n_sigma[i] * v[i], 0.0);
        for (up, c) in u.iter().zip(&proj) {
            lhs -= up[i] * c;
        }
        worst = worst.max((lhs.re - rhs[i]).abs());
    }
    worst / scale
}

/// Relative residual of a candidate `v` in the exchange equation, evaluated
/// with the dense kernel.
pub fn kernel_residual(grid: &Grid1D, orbs: &OrbitalSet, w: &Interaction, v: &[f64]) -> f64 {
    let wmat = w.matrix(grid);
    let Pieces { n_sigma, rhs, .. } = pieces(grid, orbs, &wmat);
    let kernel = exchange_kernel_matrix(grid, orbs);
    let vv = DVector::from_column_slice(v);
    let kv = &kernel * vv;
    let scale = rhs.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    let n_max = n_sigma.iter().fold(0.0f64, |a, &b| a.max(b));
    let mut worst = 0.0f64;
    for i in 0..grid.n_points {
        if n_sigma[i] >= DENSITY_FLOOR * n_max {
            worst = worst.max((n_sigma[i] * v[i] - kv[i] - rhs[i]).abs());
        }
    }
    worst / scale
}
