//! Real-space, real-time TD-LHF for a few electrons in one dimension.
//!
//! Electrons interact through the soft-Coulomb kernel
//! `w(x, x') = 1/sqrt((x - x')^2 + a^2)`. Either all orbitals are doubly
//! occupied (closed shell) or there is a single electron. In both cases the
//! exchange equation is solved per spin channel, where the orbitals are
//! orthonormal and `∫ |gamma(x, x1)|^2 dx1 = n_sigma(x)`.

mod config;
pub(crate) mod propagate;
pub(crate) mod scf;
mod vx;

pub use config::{
    read_snapshots, run_config, run_scf, write_snapshot, DriveConfig, GridConfig, InteractionConfig, OutputKind,
    PotentialShape, RunConfig, RunOutput, ScfReport, SnapshotFrame, TrajectoryRow,
};
pub use propagate::{
    absorption_spectrum, apply_kick, cn_step, dipole, dipole_trace, propagate, PropagateOptions, Scheme, Snapshot, Trajectory,
};
pub use scf::{energy, kinetic_apply, scf_ground_state, GroundState, ScfOptions};
pub use vx::{exchange_kernel_matrix, hartree_potential, kernel_residual, solve_vx, GaugeRule, VxSolution};

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform grid including both end points; the wavefunction vanishes one
/// step beyond each end.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    pub x_min: f64,
    pub x_max: f64,
    pub n_points: usize,
    pub dx: f64,
}

impl Grid1D {
    pub fn new(x_min: f64, x_max: f64, n_points: usize) -> Result<Self> {
        if n_points < 16 {
            return Err(Error::InvalidArgument(format!("grid needs at least 16 points, got {n_points}")));
        }
        if !(x_max > x_min) || !x_min.is_finite() || !x_max.is_finite() {
            return Err(Error::InvalidArgument(format!("grid needs x_min < x_max, got [{x_min}, {x_max}]")));
        }
        Ok(Self { x_min, x_max, n_points, dx: (x_max - x_min) / (n_points - 1) as f64 })
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.x(i)).collect()
    }

    pub fn integrate(&self, f: &[f64]) -> f64 {
        f.iter().sum::<f64>() * self.dx
    }

    pub fn inner(&self, a: &[Complex64], b: &[Complex64]) -> Complex64 {
        a.iter().zip(b).map(|(u, v)| u.conj() * v).sum::<Complex64>() * self.dx
    }
}

/// Occupied orbitals sharing one occupation number.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitalSet {
    pub orbitals: Vec<Vec<Complex64>>,
    pub occupations: Vec<u8>,
    pub time: f64,
}

impl OrbitalSet {
    pub fn new(orbitals: Vec<Vec<Complex64>>, occupations: Vec<u8>, time: f64) -> Result<Self> {
        let set = Self { orbitals, occupations, time };
        set.shared_occupation()?;
        Ok(set)
    }

    /// Occupation per orbital from the electron count: one singly occupied
    /// orbital for `N = 1`, otherwise `N/2` doubly occupied ones.
    pub fn occupations_for(electrons: usize) -> Result<Vec<u8>> {
        match electrons {
            1 => Ok(vec![1]),
            n if n >= 2 && n % 2 == 0 => Ok(vec![2; n / 2]),
            n => Err(Error::InvalidArgument(format!("need N = 1 or even N, got {n}"))),
        }
    }

    pub fn electron_count(&self) -> usize {
        self.occupations.iter().map(|&o| o as usize).sum()
    }

    pub fn len(&self) -> usize {
        self.orbitals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.orbitals.is_empty()
    }

    /// The common occupation number (1 or 2).
    pub fn shared_occupation(&self) -> Result<f64> {
        let first = *self
            .occupations
            .first()
            .ok_or_else(|| Error::InvalidArgument("orbital set is empty".into()))?;
        if self.occupations.len() != self.orbitals.len() {
            return Err(Error::InvalidArgument("one occupation per orbital required".into()));
        }
        if !matches!(first, 1 | 2) || self.occupations.iter().any(|&o| o != first) {
            return Err(Error::InvalidArgument(format!(
                "occupations must all be 2, or a single 1; got {:?}",
                self.occupations
            )));
        }
        if first == 1 && self.orbitals.len() != 1 {
            return Err(Error::InvalidArgument("open shells beyond one electron are not supported".into()));
        }
        Ok(first as f64)
    }

    /// Largest deviation of the overlap matrix from the identity.
    pub fn orthonormality_error(&self, grid: &Grid1D) -> f64 {
        let mut worst = 0.0f64;
        for (a, pa) in self.orbitals.iter().enumerate() {
            for (b, pb) in self.orbitals.iter().enumerate() {
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((grid.inner(pa, pb) - target).norm());
            }
        }
        worst
    }
}

/// `n(x) = Σ occ |psi(x)|^2`.
pub fn density(orbs: &OrbitalSet) -> Vec<f64> {
    let n = orbs.orbitals.first().map_or(0, Vec::len);
    let mut out = vec![0.0; n];
    for (psi, &occ) in orbs.orbitals.iter().zip(&orbs.occupations) {
        for (o, p) in out.iter_mut().zip(psi) {
            *o += occ as f64 * p.norm_sqr();
        }
    }
    out
}

/// One-body density matrix `rho(x, x') = Σ occ psi(x) psi*(x')`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    pub rho: DMatrix<Complex64>,
}

impl DensityMatrix {
    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.rho.nrows()).map(|i| self.rho[(i, i)].re).collect()
    }

    pub fn hermiticity_error(&self) -> f64 {
        (&self.rho - self.rho.adjoint()).iter().fold(0.0f64, |m, v| m.max(v.norm()))
    }
}

pub fn density_matrix(orbs: &OrbitalSet) -> DensityMatrix {
    let n = orbs.orbitals.first().map_or(0, Vec::len);
    let mut rho = DMatrix::<Complex64>::zeros(n, n);
    for (psi, &occ) in orbs.orbitals.iter().zip(&orbs.occupations) {
        for i in 0..n {
            let left = psi[i] * occ as f64;
            for j in 0..n {
                rho[(i, j)] += left * psi[j].conj();
            }
        }
    }
    DensityMatrix { rho }
}

/// Soft-Coulomb electron-electron interaction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interaction {
    pub softening: f64,
    /// Overall strength; 1 is the physical value.
    #[serde(default = "unit_scale")]
    pub scale: f64,
}

fn unit_scale() -> f64 {
    1.0
}

impl Default for Interaction {
    fn default() -> Self {
        Self { softening: 1.0, scale: 1.0 }
    }
}

impl Interaction {
    pub fn new(softening: f64) -> Result<Self> {
        if !(softening > 0.0) || !softening.is_finite() {
            return Err(Error::InvalidArgument(format!("softening must be positive, got {softening}")));
        }
        Ok(Self { softening, scale: 1.0 })
    }

    pub fn scaled(self, scale: f64) -> Self {
        Self { scale, ..self }
    }

    pub fn w(&self, d: f64) -> f64 {
        self.scale / (d * d + self.softening * self.softening).sqrt()
    }

    /// `w(k dx)` for `k = 0..n_points`; the grid kernel is Toeplitz in this row.
    pub fn row(&self, grid: &Grid1D) -> Vec<f64> {
        (0..grid.n_points).map(|k| self.w(k as f64 * grid.dx)).collect()
    }

    /// `w(x_i, x_j)` on the grid.
    pub fn matrix(&self, grid: &Grid1D) -> DMatrix<f64> {
        DMatrix::from_fn(grid.n_points, grid.n_points, |i, j| self.w((i as f64 - j as f64) * grid.dx))
    }
}

/// Time profile of the dipole drive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum Envelope {
    /// Impulse at `t = 0`: every orbital is multiplied by `exp(i E0 x)`.
    Kick,
    /// `E0 sin(omega t)`.
    Cw,
    /// `E0 sin^2(pi t / duration) sin(omega t)` for `0 <= t <= duration`.
    Sin2 { duration: f64 },
    /// `E0 exp(-(t - center)^2 / (2 width^2)) sin(omega t)`.
    Gaussian { center: f64, width: f64 },
}

/// Static confinement plus a dipole drive switched on at `t = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExternalField {
    pub v0: Vec<f64>,
    pub e0: f64,
    pub omega: f64,
    pub envelope: Envelope,
}

impl ExternalField {
    pub fn static_only(v0: Vec<f64>) -> Self {
        Self { v0, e0: 0.0, omega: 0.0, envelope: Envelope::Cw }
    }

    /// Electric field strength at time `t`; the kick is not a field.
    pub fn field(&self, t: f64) -> f64 {
        if t < 0.0 || self.e0 == 0.0 {
            return 0.0;
        }
        let carrier = (self.omega * t).sin();
        match self.envelope {
            Envelope::Kick => 0.0,
            Envelope::Cw => self.e0 * carrier,
            Envelope::Sin2 { duration } => {
                if t > duration {
                    0.0
                } else {
                    self.e0 * (PI * t / duration).sin().powi(2) * carrier
                }
            }
            Envelope::Gaussian { center, width } => {
                let s = (t - center) / width;
                self.e0 * (-0.5 * s * s).exp() * carrier
            }
        }
    }

    /// `v0(x) + E(t) x`.
    pub fn potential(&self, grid: &Grid1D, t: f64) -> Vec<f64> {
        let e = self.field(t);
        self.v0.iter().enumerate().map(|(i, v)| v + e * grid.x(i)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Grid1D {
        Grid1D::new(-10.0, 10.0, 201).unwrap()
    }

    fn gaussian(grid: &Grid1D, c: f64, s: f64) -> Vec<Complex64> {
        let raw: Vec<Complex64> = (0..grid.n_points)
            .map(|i| Complex64::new((-(grid.x(i) - c).powi(2) / (2.0 * s * s)).exp(), 0.0))
            .collect();
        let norm = grid.inner(&raw, &raw).re.sqrt();
        raw.into_iter().map(|v| v / norm).collect()
    }

    #[test]
    fn grid_validation() {
        assert!(Grid1D::new(0.0, 1.0, 8).is_err());
        assert!(Grid1D::new(1.0, 0.0, 32).is_err());
        let g = Grid1D::new(-1.0, 1.0, 21).unwrap();
        assert!((g.dx - 0.1).abs() < 1e-15);
    }

    #[test]
    fn doubly_occupied_density_integrates_to_two() {
        let g = grid();
        let orbs = OrbitalSet::new(vec![gaussian(&g, 0.0, 1.3)], vec![2], 0.0).unwrap();
        assert!((g.integrate(&density(&orbs)) - 2.0).abs() < 1e-10);
    }

    #[test]
    fn two_singly_occupied_rejected() {
        let g = grid();
        let orbs = OrbitalSet::new(vec![gaussian(&g, -3.0, 1.0), gaussian(&g, 3.0, 1.0)], vec![1, 1], 0.0);
        assert!(orbs.is_err());
        assert!(OrbitalSet::occupations_for(3).is_err());
        assert_eq!(OrbitalSet::occupations_for(4).unwrap(), vec![2, 2]);
    }

    #[test]
    fn density_matrix_properties() {
        let g = grid();
        // Orthonormalize two gaussians.
        let a = gaussian(&g, -1.0, 1.0);
        let b0: Vec<Complex64> = gaussian(&g, 1.5, 0.8)
            .into_iter()
            .enumerate()
            .map(|(i, v)| v * Complex64::from_polar(1.0, 0.3 * g.x(i)))
            .collect();
        let ov = g.inner(&a, &b0);
        let b1: Vec<Complex64> = b0.iter().zip(&a).map(|(b, a)| b - ov * a).collect();
        let nb = g.inner(&b1, &b1).re.sqrt();
        let b: Vec<Complex64> = b1.iter().map(|v| v / nb).collect();
        let orbs = OrbitalSet::new(vec![a, b], vec![2, 2], 0.0).unwrap();
        assert!(orbs.orthonormality_error(&g) < 1e-12);
        let dm = density_matrix(&orbs);
        assert!(dm.hermiticity_error() < 1e-15);
        let n = density(&orbs);
        for (d, v) in dm.diagonal().iter().zip(&n) {
            assert!((d - v).abs() < 1e-14);
        }
        // rho/2 is a projector under the grid inner product.
        let p = dm.rho.map(|v| v * 0.5);
        let pp = &p * &p * Complex64::new(g.dx, 0.0);
        assert!((&pp - &p).iter().all(|v| v.norm() < 1e-8));
    }

    #[test]
    fn interaction_bounds() {
        let g = grid();
        let w = Interaction::new(1.0).unwrap();
        let m = w.matrix(&g);
        assert!((&m - m.transpose()).iter().all(|v| *v == 0.0));
        assert!(m.iter().all(|&v| v > 0.0 && v <= 1.0));
        assert!(Interaction::new(0.0).is_err());
    }

    #[test]
    fn drive_is_off_before_zero() {
        let f = ExternalField {
            v0: vec![0.0; 4],
            e0: 0.1,
            omega: 1.0,
            envelope: Envelope::Gaussian { center: 0.0, width: 1.0 },
        };
        assert_eq!(f.field(-0.5), 0.0);
        assert!(f.field(0.5) != 0.0);
        let s = ExternalField { envelope: Envelope::Sin2 { duration: 2.0 }, ..f.clone() };
        assert_eq!(s.field(2.5), 0.0);
        assert_eq!(ExternalField { envelope: Envelope::Kick, ..f }.field(1.0), 0.0);
    }
}
