//! Slow reference evaluators on fixed deterministic meshes.
//!
//! None of these use the closed forms or the spectral reduction of
//! [`crate::special`] and [`crate::response`]; they integrate the defining
//! expressions directly. The 3D integrals over Fermi spheres use rays from
//! the singular point `k`: in spherical coordinates centred there the
//! `1/|k - k1|^2` factor cancels the Jacobian, so each direction contributes
//! the length of its chord through the occupied region.

pub mod tdhf;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::heg::HegParams;
use crate::quadrature::{gauss_legendre, QuadSpec};
use crate::special::{b_of_qk, c_of_k, n0_minus_a, BArgs};

/// Mesh sizes for the reference integrals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleSpec {
    pub radial_nodes: usize,
    pub angular_nodes: usize,
    /// Box half-width in units of `k_F`.
    pub cutoff_over_kf: f64,
    /// Broadening of the discrete Lindhard sum, in units of `eps_F`.
    pub eta_over_epsf: f64,
}

impl Default for OracleSpec {
    fn default() -> Self {
        Self {
            radial_nodes: 4000,
            angular_nodes: 400,
            cutoff_over_kf: 3.0,
            eta_over_epsf: 1e-2,
        }
    }
}

impl OracleSpec {
    pub fn validate(&self) -> Result<()> {
        if self.radial_nodes < 8 || self.angular_nodes < 8 {
            return Err(Error::InvalidArgument("oracle node counts must be at least 8".into()));
        }
        if !(self.cutoff_over_kf >= 3.0) {
            return Err(Error::InvalidArgument("oracle cutoff must be at least 3 k_F".into()));
        }
        if !(self.eta_over_epsf > 0.0) {
            return Err(Error::InvalidArgument("oracle eta must be positive".into()));
        }
        Ok(())
    }
}

fn midpoints(a: f64, b: f64, n: usize) -> impl Iterator<Item = (f64, f64)> {
    let h = (b - a) / n as f64;
    (0..n).map(move |i| (a + (i as f64 + 0.5) * h, h))
}

/// `A(q)` as a midpoint sum over `(|k|, cos theta)` of `f(k) f(k+q)`.
pub fn a_oracle(params: &HegParams, q: f64, spec: &OracleSpec) -> Result<f64> {
    spec.validate()?;
    let kf = params.k_f;
    let mut total = 0.0;
    for (k, hk) in midpoints(0.0, kf, spec.radial_nodes) {
        let mut inner = 0.0;
        for (mu, hmu) in midpoints(-1.0, 1.0, spec.radial_nodes) {
            let kq2 = k * k + 2.0 * k * q * mu + q * q;
            if kq2 < kf * kf {
                inner += hmu;
            }
        }
        total += k * k * inner * hk;
    }
    Ok(2.0 * PI * total * 2.0 / (8.0 * PI * PI * PI))
}

/// Parameter range `s >= 0` on the ray `p + s n` inside a sphere of radius `r`
/// centred at `c`.
fn ray_in_sphere(p: [f64; 3], n: [f64; 3], c: [f64; 3], r: f64) -> Option<(f64, f64)> {
    let d = [p[0] - c[0], p[1] - c[1], p[2] - c[2]];
    let b = d[0] * n[0] + d[1] * n[1] + d[2] * n[2];
    let cc = d[0] * d[0] + d[1] * d[1] + d[2] * d[2] - r * r;
    let disc = b * b - cc;
    if disc <= 0.0 {
        return None;
    }
    let sq = disc.sqrt();
    let hi = -b + sq;
    if hi <= 0.0 {
        return None;
    }
    Some(((-b - sq).max(0.0), hi))
}

/// Sum over a Gauss-Legendre (cos theta) x uniform (phi) direction grid of a
/// chord length; returns `∫ dOmega L(n)`.
fn solid_angle_sum<F: Fn([f64; 3]) -> f64>(n_theta: usize, n_phi: usize, chord: F) -> f64 {
    let (x, w) = gauss_legendre(n_theta);
    let dphi = 2.0 * PI / n_phi as f64;
    let mut total = 0.0;
    for (&ct, &wt) in x.iter().zip(&w) {
        let st = (1.0 - ct * ct).max(0.0).sqrt();
        let mut ring = 0.0;
        for j in 0..n_phi {
            let phi = (j as f64 + 0.5) * dphi;
            ring += chord([st * phi.cos(), st * phi.sin(), ct]);
        }
        total += wt * ring * dphi;
    }
    total
}

/// `C(k)` from chord lengths of rays leaving `k` through the Fermi sphere.
pub fn c_oracle(params: &HegParams, k: f64, spec: &OracleSpec) -> Result<f64> {
    spec.validate()?;
    let kf = params.k_f;
    let p = [0.0, 0.0, k];
    let chord = |ct: f64| {
        let n = [(1.0 - ct * ct).max(0.0).sqrt(), 0.0, ct];
        ray_in_sphere(p, n, [0.0; 3], kf).map_or(0.0, |(a, b)| b - a)
    };
    // Axial symmetry: one azimuth suffices.
    let omega = if k <= kf {
        solid_angle_sum(spec.angular_nodes, 1, |n| chord(n[2]))
    } else {
        // Only the tangent cone around -z is hit; cos theta = -(mu_c + (1 - mu_c) s^2)
        // smooths the square-root edge of the chord length.
        let mu_c = (1.0 - (kf / k).powi(2)).sqrt();
        let (x, w) = gauss_legendre(spec.angular_nodes);
        let sum: f64 = x
            .iter()
            .zip(&w)
            .map(|(&xi, &wi)| {
                let s = 0.5 * (xi + 1.0);
                chord(-(mu_c + (1.0 - mu_c) * s * s)) * 2.0 * (1.0 - mu_c) * s * 0.5 * wi
            })
            .sum();
        2.0 * PI * sum
    };
    Ok(omega * 2.0 / (8.0 * PI * PI * PI))
}

/// `B(q, k)` from chord lengths through the lens `|k1| < k_F`, `|k1 + q| < k_F`.
pub fn b_oracle(params: &HegParams, q: f64, k: f64, y: f64, spec: &OracleSpec) -> Result<f64> {
    spec.validate()?;
    BArgs::new(q, k, y)?;
    let kf = params.k_f;
    let sy = (1.0 - y * y).max(0.0).sqrt();
    let p = [k * sy, 0.0, k * y];
    let shifted = [0.0, 0.0, -q];
    let omega = solid_angle_sum(spec.angular_nodes, 2 * spec.angular_nodes, |n| {
        match (ray_in_sphere(p, n, [0.0; 3], kf), ray_in_sphere(p, n, shifted, kf)) {
            (Some((a1, b1)), Some((a2, b2))) => (b1.min(b2) - a1.max(a2)).max(0.0),
            _ => 0.0,
        }
    });
    Ok(omega * 2.0 / (8.0 * PI * PI * PI))
}

/// Mesh for [`ratio_oracle`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioMesh {
    pub k_nodes: usize,
    pub y_nodes: usize,
}

impl Default for RatioMesh {
    fn default() -> Self {
        Self { k_nodes: 4000, y_nodes: 2000 }
    }
}

/// `dv_x/dv_s` as a midpoint sum over `(|k|, y)` of the unreduced integrand
/// `[f(k) B - f(k+q)(f(k) - 1) C(k)] [1/(omega - Delta + i eta) - 1/(omega + Delta + i eta)]`.
pub fn ratio_oracle(
    params: &HegParams,
    q: f64,
    omega: f64,
    eta: f64,
    mesh: RatioMesh,
    quad: &QuadSpec,
) -> Result<Complex64> {
    if mesh.k_nodes < 8 || mesh.y_nodes < 8 {
        return Err(Error::InvalidArgument("oracle node counts must be at least 8".into()));
    }
    if !(q > 0.0) || !(eta > 0.0) {
        return Err(Error::InvalidArgument("ratio oracle needs q > 0 and eta > 0".into()));
    }
    let kf = params.k_f;
    let z = Complex64::new(omega, eta);
    let resonance = |delta: f64| 1.0 / (z - delta) - 1.0 / (z + delta);
    // kF is a cell boundary so f(k) is constant on every cell.
    let inner_cells = ((mesh.k_nodes as f64 * kf / (kf + q)).round() as usize).clamp(1, mesh.k_nodes - 1);
    let cells = midpoints(0.0, kf, inner_cells).chain(midpoints(kf, kf + q, mesh.k_nodes - inner_cells));
    let mut total = Complex64::new(0.0, 0.0);
    for (k, hk) in cells {
        let mut row = Complex64::new(0.0, 0.0);
        if k < kf {
            for (y, hy) in midpoints(-1.0, 1.0, mesh.y_nodes) {
                let b = b_of_qk(params, BArgs { q, k, y }, quad)?;
                let delta = k * q * y + 0.5 * q * q;
                row += b * resonance(delta) * hy;
            }
        } else {
            // f(k+q) = 1 for y < y_star; the cell holding y_star is split.
            let y_star = (kf * kf - k * k - q * q) / (2.0 * k * q);
            let c = c_of_k(params, k);
            for (y, hy) in midpoints(-1.0, 1.0, mesh.y_nodes) {
                let (y0, y1) = (y - 0.5 * hy, y + 0.5 * hy);
                let top = y1.min(y_star);
                if top <= y0 {
                    continue;
                }
                let ym = 0.5 * (y0 + top);
                let delta = k * q * ym + 0.5 * q * q;
                row += c * resonance(delta) * (top - y0);
            }
        }
        total += row * (k * k * hk);
    }
    Ok(total * (2.0 * PI) / (2.0 * PI * PI) / n0_minus_a(params, q))
}

/// Lindhard function as a discrete sum over a cylindrical `(k_z, k_perp)`
/// mesh with `q` along `z`.
pub fn chi_s_ksum(params: &HegParams, q: f64, omega: f64, spec: &OracleSpec) -> Result<Complex64> {
    spec.validate()?;
    let kf = params.k_f;
    let eta = spec.eta_over_epsf * params.eps_f;
    let z = Complex64::new(omega, eta);
    let cut = spec.cutoff_over_kf * kf;
    let mut total = Complex64::new(0.0, 0.0);
    for (kz, hz) in midpoints(-cut, cut, spec.radial_nodes) {
        let mut occ_diff = 0.0;
        for (kp, hp) in midpoints(0.0, kf, spec.angular_nodes) {
            let k2 = kz * kz + kp * kp;
            let kq2 = (kz + q) * (kz + q) + kp * kp;
            let f1 = if k2 < kf * kf { 1.0 } else { 0.0 };
            let f2 = if kq2 < kf * kf { 1.0 } else { 0.0 };
            occ_diff += (f1 - f2) * kp * hp;
        }
        if occ_diff == 0.0 {
            continue;
        }
        let delta = kz * q + 0.5 * q * q;
        total += occ_diff * hz / (z - delta);
    }
    Ok(total * (2.0 * PI) * 2.0 / (8.0 * PI * PI * PI))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::{a_of_q, b_of_qk};

    fn params() -> HegParams {
        HegParams::from_rs(2.0).unwrap()
    }

    fn small() -> OracleSpec {
        OracleSpec { radial_nodes: 400, angular_nodes: 96, ..OracleSpec::default() }
    }

    #[test]
    fn a_at_zero_is_density() {
        let p = params();
        let v = a_oracle(&p, 0.0, &small()).unwrap();
        assert!((v / p.n0 - 1.0).abs() < 1e-3);
        let q = 0.7 * p.k_f;
        assert!((a_oracle(&p, q, &small()).unwrap() / a_of_q(&p, q) - 1.0).abs() < 1e-2);
    }

    #[test]
    fn c_at_origin() {
        let p = params();
        let v = c_oracle(&p, 0.0, &small()).unwrap();
        assert!((v / (p.k_f / (PI * PI)) - 1.0).abs() < 1e-12);
        let k = 0.6 * p.k_f;
        assert!((c_oracle(&p, k, &small()).unwrap() / c_of_k(&p, k) - 1.0).abs() < 1e-4);
    }

    #[test]
    fn b_small_q_matches_c_oracle() {
        let p = params();
        let k = 0.4 * p.k_f;
        let b = b_oracle(&p, 1e-6 * p.k_f, k, 0.3, &small()).unwrap();
        let c = c_oracle(&p, k, &small()).unwrap();
        assert!((b / c - 1.0).abs() < 1e-4);
    }

    #[test]
    fn b_oracle_matches_shell_quadrature() {
        let p = HegParams::from_rs(2.0).unwrap();
        let kf = p.k_f;
        let (q, k, y) = (0.5 * kf, 0.8 * kf, 0.3);
        let fast = b_of_qk(&p, BArgs::new(q, k, y).unwrap(), &QuadSpec::default()).unwrap();
        let slow = b_oracle(&p, q, k, y, &OracleSpec { angular_nodes: 200, ..small() }).unwrap();
        assert!((slow / fast - 1.0).abs() < 1e-4, "{slow} vs {fast}");
    }

    #[test]
    fn spec_validation() {
        assert!(OracleSpec { radial_nodes: 4, ..small() }.validate().is_err());
        assert!(OracleSpec { cutoff_over_kf: 2.0, ..small() }.validate().is_err());
    }
}
