//! Electron-gas sweeps: kernel, dielectric function, static kernel, shear modulus.
//!
//! Inputs are in reduced units (`q / k_F`, `omega / eps_F`, `eta / eps_F`);
//! payload columns are in atomic units unless the name says otherwise.

use clap::ValueEnum;
use rayon::prelude::*;
use tdlhf_core::oracle::{chi_s_ksum, ratio_oracle, OracleSpec, RatioMesh};
use tdlhf_core::response::{chi_s, dielectric, f_x_static, mu_x, RatioTable};
use tdlhf_core::{HegParams, QuadSpec};

use crate::error::{CliError, CliResult};
use crate::output::Table;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Quantity {
    Fx,
    Eps,
    Chi,
}

impl Quantity {
    fn name(self) -> &'static str {
        match self {
            Quantity::Fx => "fx",
            Quantity::Eps => "eps",
            Quantity::Chi => "chi",
        }
    }

    fn columns(self) -> &'static [&'static str] {
        match self {
            Quantity::Fx => &["omega_over_epsF", "re_fx_au", "im_fx_au"],
            Quantity::Eps => &["omega_over_epsF", "re_eps", "im_eps", "re_eps_lindhard", "im_eps_lindhard"],
            Quantity::Chi => &["omega_over_epsF", "re_chi_au", "im_chi_au"],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRequest {
    pub r_s: f64,
    pub q_over_kf: f64,
    pub omega_min: f64,
    pub omega_max: f64,
    pub omega_count: usize,
    pub eta_over_epsf: f64,
    pub quantity: Quantity,
    pub rel_tol: f64,
    /// Evaluate with the brute-force Riemann and k-sum oracles.
    pub oracle: bool,
    /// Include the exchange kernel in `eps`; without it both dielectric
    /// columns are the Lindhard one.
    pub kernel: bool,
}

impl SweepRequest {
    pub fn new(quantity: Quantity, r_s: f64, q_over_kf: f64) -> Self {
        Self {
            r_s,
            q_over_kf,
            omega_min: 0.0,
            omega_max: 3.0,
            omega_count: 300,
            eta_over_epsf: 1e-3,
            quantity,
            rel_tol: QuadSpec::default().rel_tol,
            oracle: false,
            kernel: true,
        }
    }

    pub fn validate(&self) -> CliResult<()> {
        let bad = |m: String| Err(CliError::Args(m));
        if !(self.r_s > 0.0) || !self.r_s.is_finite() {
            return bad(format!("--rs must be positive, got {}", self.r_s));
        }
        if !(self.q_over_kf > 0.0) || !self.q_over_kf.is_finite() {
            return bad(format!("--q must be positive, got {}", self.q_over_kf));
        }
        if self.omega_count < 2 {
            return bad(format!("--omega-count must be at least 2, got {}", self.omega_count));
        }
        if !(self.omega_min < self.omega_max) || !self.omega_min.is_finite() || !self.omega_max.is_finite() {
            return bad(format!("need --omega-min < --omega-max, got {} and {}", self.omega_min, self.omega_max));
        }
        if !(self.eta_over_epsf > 0.0) || !self.eta_over_epsf.is_finite() {
            return bad(format!("--eta must be positive, got {}", self.eta_over_epsf));
        }
        if !(self.rel_tol > 0.0 && self.rel_tol < 1.0) {
            return bad(format!("--tol must lie in (0, 1), got {}", self.rel_tol));
        }
        Ok(())
    }

    /// Evenly spaced frequencies in units of `eps_F`, both ends included.
    pub fn omegas(&self) -> Vec<f64> {
        let n = self.omega_count - 1;
        (0..=n)
            .map(|i| self.omega_min + (self.omega_max - self.omega_min) * i as f64 / n as f64)
            .collect()
    }

    pub fn command_line(&self) -> String {
        let mut s = format!(
            "tdlhf {} --rs {} --q {} --omega-min {} --omega-max {} --omega-count {} --eta {} --tol {}",
            self.quantity.name(),
            self.r_s,
            self.q_over_kf,
            self.omega_min,
            self.omega_max,
            self.omega_count,
            self.eta_over_epsf,
            self.rel_tol
        );
        if self.oracle {
            s.push_str(" --oracle");
        }
        if !self.kernel {
            s.push_str(" --no-kernel");
        }
        s
    }
}

/// One frequency: `(chi_s, f_x)` in atomic units.
type Point = (num_complex::Complex64, num_complex::Complex64);

fn evaluate(req: &SweepRequest, p: &HegParams, quad: &QuadSpec) -> CliResult<Vec<Point>> {
    let q = req.q_over_kf * p.k_f;
    let eta = req.eta_over_epsf * p.eps_f;
    let omegas: Vec<f64> = req.omegas().into_iter().map(|w| w * p.eps_f).collect();
    let zero = num_complex::Complex64::new(0.0, 0.0);
    let needs_kernel = match req.quantity {
        Quantity::Fx => true,
        Quantity::Eps => req.kernel,
        Quantity::Chi => false,
    };
    let points: Vec<tdlhf_core::Result<Point>> = if req.oracle {
        let spec = OracleSpec { eta_over_epsf: req.eta_over_epsf, ..OracleSpec::default() };
        omegas
            .par_iter()
            .map(|&w| {
                let chi = chi_s_ksum(p, q, w, &spec)?;
                let fx = if needs_kernel { ratio_oracle(p, q, w, eta, RatioMesh::default(), quad)? / chi } else { zero };
                Ok((chi, fx))
            })
            .collect()
    } else if needs_kernel {
        let table = RatioTable::build(p, q, quad)?;
        omegas
            .par_iter()
            .map(|&w| table.sample(p, w, eta, quad).map(|s| (s.chi_s, s.f_x)))
            .collect()
    } else {
        omegas.par_iter().map(|&w| Ok((chi_s(p, q, w, eta)?, zero))).collect()
    };
    points.into_iter().map(|r| r.map_err(CliError::from)).collect()
}

/// `fx`, `eps` or `chi` over a frequency range at fixed `q`.
pub fn sweep(req: &SweepRequest) -> CliResult<Table> {
    req.validate()?;
    let p = HegParams::from_rs(req.r_s)?;
    let quad = QuadSpec::default().with_rel_tol(req.rel_tol);
    let q = req.q_over_kf * p.k_f;
    let points = evaluate(req, &p, &quad)?;
    let mut table = Table::new(req.quantity.name(), req.quantity.columns())
        .meta("r_s", req.r_s)
        .meta("q_over_kF", req.q_over_kf)
        .meta("eta_over_epsF", req.eta_over_epsf)
        .meta("omega_min_over_epsF", req.omega_min)
        .meta("omega_max_over_epsF", req.omega_max)
        .meta("omega_count", req.omega_count)
        .meta("rel_tol", quad.rel_tol)
        .meta("abs_tol", quad.abs_tol)
        .meta("evaluator", if req.oracle { "oracle" } else { "tabulated spectral weight" })
        .meta("kernel", req.kernel)
        .meta("k_F_au", p.k_f)
        .meta("eps_F_au", p.eps_f)
        .meta("units", "omega in eps_F; chi in bohr^-3 hartree^-1; f_x in hartree bohr^3; eps dimensionless")
        .meta("regenerate", req.command_line());
    let coulomb = 4.0 * std::f64::consts::PI / (q * q);
    for (w, (chi, fx)) in req.omegas().into_iter().zip(points) {
        let row = match req.quantity {
            Quantity::Fx => vec![w, fx.re, fx.im],
            Quantity::Chi => vec![w, chi.re, chi.im],
            Quantity::Eps => {
                let eps = dielectric(q, chi, fx).value().ok_or_else(|| {
                    CliError::Numerical(format!("dielectric function has a pole at omega = {w} eps_F"))
                })?;
                let lindhard = 1.0 - coulomb * chi;
                vec![w, eps.re, eps.im, lindhard.re, lindhard.im]
            }
        };
        table.rows.push(row);
    }
    Ok(table)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StaticRequest {
    pub r_s: f64,
    pub q_min: f64,
    pub q_max: f64,
    pub q_count: usize,
    pub spacing: Spacing,
    pub rel_tol: f64,
}

impl StaticRequest {
    pub fn qs(&self) -> Vec<f64> {
        let n = self.q_count - 1;
        (0..=n)
            .map(|i| {
                let t = i as f64 / n as f64;
                match self.spacing {
                    Spacing::Linear => self.q_min + (self.q_max - self.q_min) * t,
                    Spacing::Log => self.q_min * (self.q_max / self.q_min).powf(t),
                }
            })
            .collect()
    }
}

/// Static kernel `f_x(q, 0)` with its large-`q` asymptote `-2 pi / q^2`.
pub fn static_fx(req: &StaticRequest) -> CliResult<Table> {
    if !(req.r_s > 0.0) || req.q_count < 2 || !(req.q_min > 0.0) || !(req.q_min < req.q_max) || !req.q_max.is_finite() {
        return Err(CliError::Args(format!(
            "need --rs > 0, --q-count >= 2 and 0 < --q-min < --q-max, got {req:?}"
        )));
    }
    if !(req.rel_tol > 0.0 && req.rel_tol < 1.0) {
        return Err(CliError::Args(format!("--tol must lie in (0, 1), got {}", req.rel_tol)));
    }
    let p = HegParams::from_rs(req.r_s)?;
    let quad = QuadSpec::default().with_rel_tol(req.rel_tol);
    let qs = req.qs();
    let values: Vec<tdlhf_core::Result<f64>> = qs.par_iter().map(|&x| f_x_static(&p, x * p.k_f, &quad)).collect();
    let spacing = match req.spacing {
        Spacing::Linear => "linear",
        Spacing::Log => "log",
    };
    let mut table = Table::new("static-fx", &["q_over_kF", "fx_au", "asymptote_au"])
        .meta("r_s", req.r_s)
        .meta("q_min_over_kF", req.q_min)
        .meta("q_max_over_kF", req.q_max)
        .meta("q_count", req.q_count)
        .meta("spacing", spacing)
        .meta("rel_tol", quad.rel_tol)
        .meta("abs_tol", quad.abs_tol)
        .meta("k_F_au", p.k_f)
        .meta("units", "q in k_F; f_x and asymptote -2 pi / q^2 in hartree bohr^3")
        .meta(
            "regenerate",
            format!(
                "tdlhf static-fx --rs {} --q-min {} --q-max {} --q-count {} --spacing {spacing} --tol {}",
                req.r_s, req.q_min, req.q_max, req.q_count, req.rel_tol
            ),
        );
    for (x, v) in qs.into_iter().zip(values) {
        let q = x * p.k_f;
        table.rows.push(vec![x, v?, -2.0 * std::f64::consts::PI / (q * q)]);
    }
    Ok(table)
}

/// Exchange shear modulus for each `r_s`.
pub fn mux(rs: &[f64]) -> CliResult<Table> {
    if rs.is_empty() {
        return Err(CliError::Args("--rs needs at least one value".into()));
    }
    let list: Vec<String> = rs.iter().map(f64::to_string).collect();
    let mut table = Table::new("mux", &["r_s", "mu_au", "mu_over_2wpln"])
        .meta("units", "mu in hartree bohr^-3 and in units of 2 omega_pl n0")
        .meta("regenerate", format!("tdlhf mux --rs {}", list.join(",")));
    for &r in rs {
        let m = mu_x(&HegParams::from_rs(r)?);
        table.rows.push(vec![r, m.mu_au, m.mu_in_2wpln]);
    }
    Ok(table)
}
