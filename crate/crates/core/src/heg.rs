//! Homogeneous electron gas parameters in Hartree atomic units.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Gas constants derived from the Wigner-Seitz radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HegParams {
    pub r_s: f64,
    pub k_f: f64,
    pub n0: f64,
    pub omega_pl: f64,
    pub eps_f: f64,
}

impl HegParams {
    pub fn from_rs(r_s: f64) -> Result<Self> {
        if !(r_s > 0.0) || !r_s.is_finite() {
            return Err(Error::InvalidArgument(format!("r_s must be positive and finite, got {r_s}")));
        }
        let k_f = (9.0 * PI / 4.0).cbrt() / r_s;
        let n0 = 3.0 / (4.0 * PI * r_s.powi(3));
        Ok(Self {
            r_s,
            k_f,
            n0,
            omega_pl: (4.0 * PI * n0).sqrt(),
            eps_f: 0.5 * k_f * k_f,
        })
    }

    /// Zero-temperature occupation of a plane wave; the Fermi sphere is closed.
    pub fn occupation(&self, k: f64) -> Result<u8> {
        if !(k >= 0.0) {
            return Err(Error::InvalidArgument(format!("wave vector magnitude must be >= 0, got {k}")));
        }
        Ok(u8::from(k <= self.k_f))
    }

    /// Edges `(omega_minus, omega_plus)` of the particle-hole continuum at `q`.
    pub fn ph_continuum_bounds(&self, q: f64) -> Result<(f64, f64)> {
        if !(q > 0.0) || !q.is_finite() {
            return Err(Error::InvalidArgument(format!("q must be positive, got {q}")));
        }
        let half = 0.5 * q * q;
        Ok(((half - q * self.k_f).max(0.0), half + q * self.k_f))
    }

    /// Unit of the shear-modulus table, `2 omega_pl n0`.
    pub fn shear_unit(&self) -> f64 {
        2.0 * self.omega_pl * self.n0
    }
}
