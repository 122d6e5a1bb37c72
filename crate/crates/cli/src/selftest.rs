//! Acceptance checks 1-8, each reproducible from the command line.
//!
//! Reports contain values and verdicts only, never timings, so two runs with
//! the same level produce identical bytes.

use std::f64::consts::PI;
use std::fmt::Write as _;

use clap::ValueEnum;
use num_complex::Complex64;
use tdlhf_core::grid::{
    propagate, scf_ground_state, Envelope, ExternalField, Grid1D, Interaction, PropagateOptions, ScfOptions,
};
use tdlhf_core::oracle::tdhf::{hf_n2_ground_state, tdhf_n2};
use tdlhf_core::oracle::{a_oracle, b_oracle, c_oracle, chi_s_ksum, OracleSpec};
use tdlhf_core::quadrature::integrate_1d;
use tdlhf_core::response::{
    chi_s, f_x, f_x_static, fx_limit_omega0_q0, fx_limit_q0_finite_omega, mu_x, mu_x_coefficient,
    ratio_eta_extrapolated, static_limit_numerator, Q_MIN_OVER_KF,
};
use tdlhf_core::special::{a_of_q, b_of_qk, c_of_k, BArgs};
use tdlhf_core::{HegParams, QuadSpec};

use crate::sweep::{sweep, Quantity, SweepRequest};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Level {
    Fast,
    Full,
}

impl Level {
    fn name(self) -> &'static str {
        match self {
            Level::Fast => "fast",
            Level::Full => "full",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub label: String,
    pub detail: String,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionReport {
    pub id: u8,
    pub title: &'static str,
    pub checks: Vec<Check>,
}

impl CriterionReport {
    pub fn passed(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.passed)
    }
}

pub const CRITERIA: [(u8, &str); 8] = [
    (1, "exchange shear modulus table"),
    (2, "shear modulus r_s^-4 coefficient"),
    (3, "long-wavelength and large-q limits of f_x"),
    (4, "closed forms A, B, C against brute-force integrals"),
    (5, "Im f_x vanishes outside the particle-hole continuum"),
    (6, "Lindhard function checks"),
    (7, "kernel and dielectric sweeps at q = 0.5 k_F"),
    (8, "one-dimensional TD-LHF"),
];

/// Collects checks; an evaluation error becomes a failed check.
struct Checks(Vec<Check>);

impl Checks {
    fn bound(&mut self, label: impl Into<String>, value: f64, bound: f64) {
        let passed = value.is_finite() && value <= bound;
        self.0.push(Check { label: label.into(), detail: format!("{value:.6e} <= {bound:e}"), passed });
    }

    fn above(&mut self, label: impl Into<String>, value: f64, bound: f64) {
        let passed = value.is_finite() && value > bound;
        self.0.push(Check { label: label.into(), detail: format!("{value:.6e} > {bound:e}"), passed });
    }

    fn truth(&mut self, label: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.0.push(Check { label: label.into(), detail: detail.into(), passed });
    }

    fn attempt<T>(&mut self, label: &str, r: Result<T, impl std::fmt::Display>) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.truth(label, false, format!("error: {e}"));
                None
            }
        }
    }
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn params(rs: f64) -> HegParams {
    HegParams::from_rs(rs).expect("positive r_s")
}

const TABLE_I: [f64; 5] = [0.01102, 0.01559, 0.01909, 0.02204, 0.02464];

fn shear_table(c: &mut Checks) {
    for (i, expected) in TABLE_I.iter().enumerate() {
        let rs = (i + 1) as f64;
        let m = mu_x(&params(rs));
        c.bound(format!("r_s = {rs}: |mu / 2 w_pl n0 - {expected}|"), (m.mu_in_2wpln - expected).abs(), 5e-5);
    }
}

fn shear_coefficient(c: &mut Checks) {
    let coef = mu_x_coefficient();
    for rs in [0.5, 1.0, 2.0, 3.0, 4.0, 5.0, 10.0] {
        let m = mu_x(&params(rs));
        c.bound(format!("r_s = {rs}: mu r_s^4 vs coefficient"), rel(m.mu_au * rs.powi(4), coef), 1e-12);
    }
    c.bound("|coefficient - 0.0091|", (coef - 0.0091).abs(), 5e-5);
}

fn limits(c: &mut Checks) {
    let quad = QuadSpec::default();
    for rs in [2.0, 5.0] {
        let p = params(rs);
        let q = Q_MIN_OVER_KF * p.k_f;
        let w = 0.5 * p.eps_f;
        let dynamic = ratio_eta_extrapolated(&p, q, w, &quad)
            .and_then(|r| Ok(r / chi_s(&p, q, w, 0.0)?));
        if let Some(fx) = c.attempt("dynamic limit", dynamic) {
            c.bound(format!("r_s = {rs}: f_x(1e-3 k_F, 0.5 eps_F) vs -3 pi / 4 k_F^2"), rel(fx.re, fx_limit_q0_finite_omega(&p)), 1e-2);
        }
        if let Some(fx) = c.attempt("static limit", f_x_static(&p, q, &quad)) {
            c.bound(format!("r_s = {rs}: f_x(1e-3 k_F, 0) vs -pi / k_F^2"), rel(fx, fx_limit_omega0_q0(&p)), 1e-2);
        }
        let big = 10.0 * p.k_f;
        if let Some(fx) = c.attempt("large q", f_x_static(&p, big, &quad)) {
            c.bound(format!("r_s = {rs}: f_x(10 k_F, 0) q^2 / (-2 pi) vs 1"), (fx * big * big / (-2.0 * PI) - 1.0).abs(), 2e-2);
        }
    }
    if let Some(lim) = c.attempt("static numerator", static_limit_numerator(&params(5.0), &quad)) {
        c.truth(
            "static numerator to five significant digits",
            (lim.numerator - PI).abs() < 5e-5,
            format!("{:.10} (extrapolation residual {:.3e})", lim.numerator, lim.residual),
        );
    }
}

const A_PANEL: [f64; 8] = [0.05, 0.3, 0.6, 0.9, 1.2, 1.5, 1.8, 1.95];
const C_PANEL: [f64; 8] = [0.0, 0.25, 0.5, 0.9, 1.1, 1.5, 2.0, 3.0];
const B_Q: [f64; 5] = [0.2, 0.6, 1.0, 1.4, 1.8];
const B_K: [f64; 5] = [0.1, 0.3, 0.5, 0.7, 0.9];
const B_Y: [f64; 3] = [-0.7, 0.0, 0.7];

fn closed_forms(c: &mut Checks, level: Level) {
    let p = params(2.0);
    let spec = OracleSpec::default();
    for x in A_PANEL {
        if let Some(o) = c.attempt("A oracle", a_oracle(&p, x * p.k_f, &spec)) {
            c.bound(format!("A(q = {x} k_F)"), rel(a_of_q(&p, x * p.k_f), o), 1e-3);
        }
    }
    for x in C_PANEL {
        if let Some(o) = c.attempt("C oracle", c_oracle(&p, x * p.k_f, &spec)) {
            c.bound(format!("C(k = {x} k_F)"), rel(c_of_k(&p, x * p.k_f), o), 1e-3);
        }
    }
    let b_spec = OracleSpec { angular_nodes: 200, ..spec };
    let quad = QuadSpec::default();
    let (qs, ks, ys): (&[f64], &[f64], &[f64]) = match level {
        Level::Full => (&B_Q, &B_K, &B_Y),
        Level::Fast => (&B_Q, &[0.5], &[0.0]),
    };
    for &qx in qs {
        for &kx in ks {
            for &y in ys {
                let (q, k) = (qx * p.k_f, kx * p.k_f);
                let fast = BArgs::new(q, k, y).and_then(|a| b_of_qk(&p, a, &quad));
                let slow = b_oracle(&p, q, k, y, &b_spec);
                if let (Some(f), Some(s)) = (c.attempt("B closed form", fast), c.attempt("B oracle", slow)) {
                    c.bound(format!("B(q = {qx} k_F, k = {kx} k_F, y = {y})"), rel(f, s), 1e-3);
                }
            }
        }
    }
}

fn support(c: &mut Checks) {
    let quad = QuadSpec::default();
    for rs in [2.0, 5.0] {
        let p = params(rs);
        let eta = 1e-6 * p.eps_f;
        for qx in [0.5, 1.5] {
            let q = qx * p.k_f;
            let Some((lo, hi)) = c.attempt("continuum", p.ph_continuum_bounds(q)) else { continue };
            let mut outside = vec![("above", 1.05 * hi)];
            if lo > 0.0 {
                outside.push(("below", 0.95 * lo));
            }
            for (side, w) in outside {
                if let Some(fx) = c.attempt("f_x", f_x(&p, q, w, eta, &quad)) {
                    c.bound(format!("r_s = {rs}, q = {qx} k_F, 5% {side}: |Im f_x| / |Re f_x|"), fx.im.abs() / fx.re.abs(), 1e-6);
                }
            }
            if let Some(fx) = c.attempt("f_x", f_x(&p, q, 0.5 * (lo + hi), eta, &quad)) {
                c.above(format!("r_s = {rs}, q = {qx} k_F, mid-continuum: |Im f_x| / |Re f_x|"), fx.im.abs() / fx.re.abs(), 1e-3);
            }
        }
    }
}

fn lindhard(c: &mut Checks, level: Level) {
    let p = params(2.0);
    let target = -p.k_f / (PI * PI);
    if let Some(v) = c.attempt("chi_s", chi_s(&p, Q_MIN_OVER_KF * p.k_f, 0.0, 0.0)) {
        c.bound("chi_s(1e-3 k_F, 0) vs -k_F / pi^2", rel(v.re, target), 1e-4);
    }
    let quad = QuadSpec::default().with_rel_tol(1e-10);
    for qx in [0.5, 1.5] {
        let q = qx * p.k_f;
        let Some((lo, hi)) = c.attempt("continuum", p.ph_continuum_bounds(q)) else { continue };
        let top = 1.2 * hi;
        let weight = |w: f64| w * chi_s(&p, q, w, 0.0).map(|v| v.im).unwrap_or(f64::NAN);
        let mut total = 0.0;
        let mut edges = vec![0.0];
        if lo > 0.0 {
            edges.push(lo);
        }
        edges.extend([hi, top]);
        for e in edges.windows(2) {
            if let Some(r) = c.attempt("f-sum quadrature", integrate_1d(weight, e[0], e[1], &quad)) {
                total += r.value;
            }
        }
        c.bound(format!("f-sum rule at q = {qx} k_F"), rel(total, -0.5 * PI * p.n0 * q * q), 1e-2);
    }
    if level == Level::Full {
        let spec = OracleSpec { radial_nodes: 20000, angular_nodes: 2000, ..OracleSpec::default() };
        let eta = spec.eta_over_epsf * p.eps_f;
        for (qx, wx) in [(0.5, 0.8), (1.5, 2.0), (0.5, 0.0)] {
            let (q, w) = (qx * p.k_f, wx * p.eps_f);
            let exact = chi_s(&p, q, w, eta);
            let sum = chi_s_ksum(&p, q, w, &spec);
            if let (Some(e), Some(s)) = (c.attempt("chi_s", exact), c.attempt("k-sum", sum)) {
                c.bound(format!("k-sum at (q, w) = ({qx} k_F, {wx} eps_F)"), (s - e).norm() / e.norm(), 1e-3);
            }
        }
    }
}

fn sweeps(c: &mut Checks, level: Level) {
    let count = match level {
        Level::Full => 300,
        Level::Fast => 31,
    };
    for rs in [2.0, 5.0] {
        let p = params(rs);
        let hi = p.ph_continuum_bounds(0.5 * p.k_f).map(|b| b.1 / p.eps_f).unwrap_or(f64::NAN);
        let req = SweepRequest { omega_count: count, ..SweepRequest::new(Quantity::Fx, rs, 0.5) };
        if let Some(t) = c.attempt("fx sweep", sweep(&req)) {
            let finite = t.rows.iter().all(|r| r.iter().all(|v| v.is_finite()));
            c.truth(format!("fx r_s = {rs}: {count} finite rows"), finite && t.rows.len() == count, format!("{} rows", t.rows.len()));
            let kf2 = p.k_f * p.k_f;
            let negative = t.rows.iter().all(|r| r[1] < 0.0);
            let scale_ok = t.rows.iter().all(|r| (Complex64::new(r[1], r[2]) * kf2).norm() < 10.0);
            c.truth(format!("fx r_s = {rs}: Re f_x < 0 and |f_x| k_F^2 < 10"), negative && scale_ok, "");
            let inside = t.rows.iter().filter(|r| r[0] > 0.0 && r[0] < 0.9 * hi).all(|r| r[2].abs() > 1e-2 * r[1].abs());
            let beyond = t.rows.iter().filter(|r| r[0] > 1.1 * hi).all(|r| r[2].abs() < 1e-3 * r[1].abs());
            c.truth(format!("fx r_s = {rs}: Im f_x inside vs beyond the continuum"), inside && beyond, "");
        }
        let req = SweepRequest { omega_count: count, ..SweepRequest::new(Quantity::Eps, rs, 0.5) };
        if let Some(t) = c.attempt("eps sweep", sweep(&req)) {
            let finite = t.rows.iter().all(|r| r.iter().all(|v| v.is_finite()));
            c.truth(format!("eps r_s = {rs}: {count} finite rows"), finite && t.rows.len() == count, format!("{} rows", t.rows.len()));
            let differs = t.rows.iter().filter(|r| r[0] > 0.0 && r[0] < hi).any(|r| (r[2] - r[4]).abs() > 1e-3 * r[4].abs());
            c.truth(format!("eps r_s = {rs}: kernel changes Im eps in the continuum"), differs, "");
        }
    }
}

fn soft_well(grid: &Grid1D, depth: f64) -> Vec<f64> {
    (0..grid.n_points).map(|i| -depth / (grid.x(i).powi(2) + 1.0).sqrt()).collect()
}

fn max_abs(v: impl Iterator<Item = f64>) -> f64 {
    v.fold(0.0f64, |m, x| m.max(x.abs()))
}

fn grid_suite(c: &mut Checks, level: Level) {
    let g = Grid1D::new(-20.0, 20.0, 400).expect("valid grid");
    let w = Interaction::default();
    let opts = ScfOptions::default();
    if let Some(gs) = c.attempt("N = 1 SCF", scf_ground_state(&g, &w, &soft_well(&g, 1.0), 1, &opts)) {
        c.bound("N = 1: max |v_H + v_x|", max_abs(gs.v_h.iter().zip(&gs.v_x).map(|(h, x)| h + x)), 1e-8);
    }
    let v0 = soft_well(&g, 2.0);
    let Some(gs) = c.attempt("N = 2 SCF", scf_ground_state(&g, &w, &v0, 2, &opts)) else { return };
    let d: Vec<f64> = gs.v_x.iter().zip(&gs.v_h).map(|(x, h)| x + 0.5 * h).collect();
    let inner = &d[20..380];
    let mean = inner.iter().sum::<f64>() / inner.len() as f64;
    c.bound("N = 2: interior deviation of v_x + v_H / 2 from a constant", max_abs(inner.iter().map(|v| v - mean)), 1e-6);

    let n_steps = match level {
        Level::Full => 1000,
        Level::Fast => 200,
    };
    let field = ExternalField { v0: v0.clone(), e0: 0.01, omega: 0.0, envelope: Envelope::Kick };
    let prop = PropagateOptions { dt: 0.01, n_steps, ..PropagateOptions::default() };
    let Some(lhf) = c.attempt("TD-LHF propagation", propagate(&g, &gs.orbitals, &field, &w, &prop)) else { return };
    let hf = hf_n2_ground_state(&g, &w, &v0, 0.5, 1e-11, 500).and_then(|h| tdhf_n2(&g, &w, &h.orbitals, &field, 0.01, n_steps));
    if let Some(hf) = c.attempt("TDHF oracle", hf) {
        let scale = max_abs(hf.iter().map(|(_, d)| d - hf[0].1));
        let worst = max_abs(lhf.dipole.iter().zip(&hf).map(|(a, (_, b))| a - b));
        c.bound(format!("N = 2 kicked dipole vs TDHF over {} a.u.", n_steps as f64 * 0.01), worst / scale, 1e-4);
    }
    c.bound("norm drift per step", lhf.max_norm_change, 1e-10);
    for shift in [-1.0, 7.5] {
        let shifted = PropagateOptions { vx_shift: shift, ..prop.clone() };
        if let Some(b) = c.attempt("shifted propagation", propagate(&g, &gs.orbitals, &field, &w, &shifted)) {
            c.bound(
                format!("dipole change under v_x + {shift}"),
                max_abs(lhf.dipole.iter().zip(&b.dipole).map(|(x, y)| x - y)),
                1e-10,
            );
        }
    }
}

/// Runs one criterion.
pub fn criterion(id: u8, level: Level) -> CriterionReport {
    let title = CRITERIA.iter().find(|(i, _)| *i == id).map(|(_, t)| *t).unwrap_or("unknown criterion");
    let mut c = Checks(Vec::new());
    match id {
        1 => shear_table(&mut c),
        2 => shear_coefficient(&mut c),
        3 => limits(&mut c),
        4 => closed_forms(&mut c, level),
        5 => support(&mut c),
        6 => lindhard(&mut c, level),
        7 => sweeps(&mut c, level),
        8 => grid_suite(&mut c, level),
        _ => {}
    }
    CriterionReport { id, title, checks: c.0 }
}

pub fn render_header(level: Level) -> String {
    format!("tdlhf {} selftest, level {}\n", crate::output::CODE_VERSION, level.name())
}

pub fn render(report: &CriterionReport) -> String {
    let mut s = String::new();
    let verdict = if report.passed() { "PASS" } else { "FAIL" };
    let _ = writeln!(s, "criterion {} {verdict}: {}", report.id, report.title);
    for ch in &report.checks {
        let mark = if ch.passed { "ok" } else { "FAIL" };
        if ch.detail.is_empty() {
            let _ = writeln!(s, "    [{mark}] {}", ch.label);
        } else {
            let _ = writeln!(s, "    [{mark}] {}: {}", ch.label, ch.detail);
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cheap_criteria_pass() {
        for id in [1, 2] {
            let r = criterion(id, Level::Fast);
            assert!(r.passed(), "{}", render(&r));
        }
    }

    #[test]
    fn unknown_criterion_fails() {
        assert!(!criterion(42, Level::Fast).passed());
    }

    #[test]
    fn errors_become_failed_checks() {
        let mut c = Checks(Vec::new());
        assert!(c.attempt::<f64>("x", Err("boom")).is_none());
        c.bound("nan", f64::NAN, 1.0);
        assert!(c.0.iter().all(|ch| !ch.passed));
        assert_eq!(c.0[0].detail, "error: boom");
    }
}
