//! Linear response of the electron gas to the TD-LHF exchange potential.
//!
//! Both the Lindhard function and the ratio `dv_x/dv_s` are written as
//! spectral transforms over the particle-hole excitation energy
//! `Delta = eps_{k+q} - eps_k > 0`:
//!
//! ```text
//! F(q, z) = ∫ S(Delta) [1/(z - Delta) - 1/(z + Delta)] dDelta,   z = omega + i eta
//! ```
//!
//! For the Lindhard function `S` is piecewise polynomial and the transform is
//! done in closed form. For the exchange ratio the `k -> -k-q` symmetry of `B`
//! removes the doubly occupied region, and what is left is the set `|k| < k_F
//! < |k+q|` with the weight `B(q, k) - C(|k+q|)`. Changing variables from
//! `(k, y)` to `(k, Delta)` gives
//!
//! ```text
//! S_r(Delta) = 1/(pi q (n0 - A)) ∫ k [C(k) - C(sqrt(k^2 + 2 Delta)) - D(q, k, y)] dk
//! ```
//!
//! over `k` in the part of region I on the `Delta` surface. The imaginary part
//! of both functions is `-pi S(omega)` in the `eta -> 0` limit, so it vanishes
//! identically outside the continuum.

use std::cell::RefCell;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::heg::HegParams;
use crate::quadrature::{extrapolate_eta, integrate_pieces, QuadResult, QuadSpec};
use crate::special::{c_of_k, d_of_qk, n0_minus_a, BArgs};

/// Below this fraction of `k_F` the ratio is not evaluated.
pub const Q_MIN_OVER_KF: f64 = 1e-3;

/// `|chi_s|` below which `f_x` is reported as undefined.
const CHI_FLOOR: f64 = 1e-300;

/// `|1 + chi_s f_x|` below which the dielectric function is reported as a pole.
const POLE_FLOOR: f64 = 1e-14;

/// One evaluated point of the response functions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexResponseSample {
    pub q: f64,
    pub omega: f64,
    /// Broadening used, in a.u.; zero means the `+i0` limit.
    pub eta: f64,
    pub chi_s: Complex64,
    pub ratio: Complex64,
    pub f_x: Complex64,
    pub epsilon: Complex64,
}

/// The dielectric function, or a zero of its screening denominator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum DielectricValue {
    Regular(Complex64),
    Pole { denominator: Complex64 },
}

impl DielectricValue {
    pub fn value(&self) -> Option<Complex64> {
        match self {
            DielectricValue::Regular(v) => Some(*v),
            DielectricValue::Pole { .. } => None,
        }
    }
}

/// Exchange shear modulus.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MuX {
    pub mu_au: f64,
    pub mu_in_2wpln: f64,
}

/// Evaluated `-f_x k_F^2` in the static `q -> 0` limit with its Richardson
/// error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StaticLimit {
    pub numerator: f64,
    pub residual: f64,
    pub samples: [(f64, f64); 3],
}

fn check_q(q: f64) -> Result<()> {
    if !(q > 0.0) || !q.is_finite() {
        return Err(Error::InvalidArgument(format!("q must be positive, got {q}")));
    }
    Ok(())
}

fn check_freq(omega: f64, eta: f64) -> Result<()> {
    if !omega.is_finite() || !(eta >= 0.0) || !eta.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "need finite omega and eta >= 0, got omega={omega}, eta={eta}"
        )));
    }
    Ok(())
}

/// Particle-hole window at one `q`.
#[derive(Debug, Clone, Copy)]
struct Window {
    q: f64,
    kf: f64,
    lo: f64,
    hi: f64,
}

impl Window {
    fn new(params: &HegParams, q: f64) -> Self {
        let kf = params.k_f;
        let half = 0.5 * q * q;
        Self { q, kf, lo: (half - q * kf).max(0.0), hi: half + q * kf }
    }

    /// Smallest `|k|` in region I on the surface of excitation energy `delta`.
    fn k_lo(&self, delta: f64) -> f64 {
        let cos_bound = (delta - 0.5 * self.q * self.q).abs() / self.q;
        let pauli = (self.kf * self.kf - 2.0 * delta).max(0.0).sqrt();
        cos_bound.max(pauli)
    }

    /// Energies where `S` has kinks.
    fn breakpoints(&self) -> Vec<f64> {
        let (q, kf) = (self.q, self.kf);
        [q * kf - 0.5 * q * q, 0.5 * q * q, 0.5 * kf * kf]
            .into_iter()
            .filter(|&d| d > self.lo && d < self.hi)
            .collect()
    }
}

/// Lindhard spectral weight: `-Im chi_s(q, omega + i0) / pi`.
pub fn lindhard_weight(params: &HegParams, q: f64, delta: f64) -> f64 {
    let w = Window::new(params, q);
    if !(delta > w.lo && delta < w.hi) {
        return 0.0;
    }
    let k = w.k_lo(delta);
    ((w.kf * w.kf - k * k) / (4.0 * PI * PI * q)).max(0.0)
}

/// `∫_a^b p(x) / (z - x) dx` for a polynomial with coefficients in ascending
/// order.
fn poly_over_pole(coeffs: &[f64], a: f64, b: f64, z: Complex64) -> Complex64 {
    // p(x) = p(z) + (x - z) r(x), with r by synthetic division.
    let n = coeffs.len();
    let mut r = vec![Complex64::new(0.0, 0.0); n.saturating_sub(1)];
    let mut acc = Complex64::new(0.0, 0.0);
    for i in (0..n).rev() {
        acc = acc * z + coeffs[i];
        if i > 0 {
            r[i - 1] = acc;
        }
    }
    let pz = acc;
    // ∫ r(x) dx with r in powers of x
    let mut poly_part = Complex64::new(0.0, 0.0);
    for (j, rj) in r.iter().enumerate() {
        let p = (j + 1) as i32;
        poly_part += rj * ((b.powi(p) - a.powi(p)) / p as f64);
    }
    let log_part = if pz == Complex64::new(0.0, 0.0) {
        Complex64::new(0.0, 0.0)
    } else {
        pz * ((z - a).ln() - (z - b).ln())
    };
    log_part - poly_part
}

/// Lindhard weight as polynomial pieces `(a, b, coeffs)`.
fn lindhard_pieces(params: &HegParams, q: f64) -> Vec<(f64, f64, [f64; 3])> {
    let w = Window::new(params, q);
    let kf2 = w.kf * w.kf;
    let norm = 1.0 / (4.0 * PI * PI * q);
    let mut edges = vec![w.lo];
    edges.extend(w.breakpoints());
    edges.push(w.hi);
    edges.sort_by(f64::total_cmp);
    edges.dedup();
    let mut pieces = Vec::new();
    for e in edges.windows(2) {
        let (a, b) = (e[0], e[1]);
        let mid = 0.5 * (a + b);
        let cos_bound = (mid - 0.5 * q * q).abs() / q;
        let pauli2 = kf2 - 2.0 * mid;
        let coeffs = if pauli2 > cos_bound * cos_bound {
            // k_F^2 - (k_F^2 - 2 Delta)
            [0.0, 2.0 * norm, 0.0]
        } else {
            // k_F^2 - (Delta - q^2/2)^2 / q^2
            let h = 0.5 * q * q;
            [
                norm * (kf2 - h * h / (q * q)),
                norm * (2.0 * h / (q * q)),
                -norm / (q * q),
            ]
        };
        pieces.push((a, b, coeffs));
    }
    pieces
}

/// Lindhard function `chi_s(q, omega + i eta)` in closed form.
///
/// `eta = 0` gives the `+i0` limit.
pub fn chi_s(params: &HegParams, q: f64, omega: f64, eta: f64) -> Result<Complex64> {
    check_q(q)?;
    check_freq(omega, eta)?;
    if omega < 0.0 {
        return Ok(chi_s(params, q, -omega, eta)?.conj());
    }
    let z = Complex64::new(omega, eta);
    let mut total = Complex64::new(0.0, 0.0);
    for (a, b, c) in lindhard_pieces(params, q) {
        // 1/(z + x) = -1/((-z) - x)
        total += poly_over_pole(&c, a, b, z) + poly_over_pole(&c, a, b, -z);
    }
    Ok(total)
}

/// `∫ S(x) [1/(z - x) - 1/(z + x)] dx` over `[a, b]`, `a >= 0`, `omega >= 0`.
fn spectral_transform<F>(
    s: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    omega: f64,
    eta: f64,
    spec: &QuadSpec,
) -> Result<QuadResult<Complex64>>
where
    F: Fn(f64) -> Result<f64>,
{
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let eval = |x: f64| match s(x) {
        Ok(v) => v,
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            0.0
        }
    };
    let z = Complex64::new(omega, eta);
    let inside = omega > a && omega < b;
    let s0 = if inside { s(omega)? } else { 0.0 };
    let integrand = |x: f64| {
        let sv = eval(x);
        let resonant = if inside {
            let d = z - x;
            if d == Complex64::new(0.0, 0.0) {
                Complex64::new(0.0, 0.0)
            } else {
                (sv - s0) / d
            }
        } else {
            sv / (z - x)
        };
        resonant - sv / (z + x)
    };
    let mut nodes = breaks.to_vec();
    if inside {
        nodes.push(omega);
    }
    let mut r = integrate_pieces(integrand, a, b, &nodes, spec, true)?;
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    if inside {
        r.value += s0 * ((z - a).ln() - (z - b).ln());
    }
    Ok(r)
}

/// Spectral weight of the exchange ratio at excitation energy `delta`.
pub fn ratio_weight(params: &HegParams, q: f64, delta: f64, quad: &QuadSpec) -> Result<f64> {
    check_small_q(params, q)?;
    let w = Window::new(params, q);
    ratio_weight_in(params, &w, delta, quad)
}

fn ratio_weight_in(params: &HegParams, w: &Window, delta: f64, quad: &QuadSpec) -> Result<f64> {
    if !(delta > w.lo && delta < w.hi) {
        return Ok(0.0);
    }
    let (q, kf) = (w.q, w.kf);
    let k_lo = w.k_lo(delta);
    if k_lo >= kf {
        return Ok(0.0);
    }
    let inner = quad.tightened(0.1);
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let integrand = |k: f64| {
        let y = ((delta - 0.5 * q * q) / (k * q)).clamp(-1.0, 1.0);
        let kq = (k * k + 2.0 * delta).sqrt();
        let d = match d_of_qk(params, BArgs { q, k, y }, &inner) {
            Ok(v) => v,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                0.0
            }
        };
        k * (c_of_k(params, k) - c_of_k(params, kq) - d)
    };
    let pauli = kf * kf - 2.0 * delta;
    let mut breaks = vec![(kf - q).abs()];
    if pauli > 0.0 {
        breaks.push(pauli.sqrt());
    }
    let r = integrate_pieces(integrand, k_lo, kf, &breaks, quad, true)?;
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    if !r.converged {
        return Err(Error::NotConverged {
            context: format!("ratio weight at Delta = {delta:e}"),
            value: r.value,
            err_estimate: r.err_estimate,
        });
    }
    Ok(r.value / (PI * q * n0_minus_a(params, q)))
}

fn check_small_q(params: &HegParams, q: f64) -> Result<()> {
    check_q(q)?;
    let q_min = Q_MIN_OVER_KF * params.k_f;
    if q < q_min * (1.0 - 1e-12) {
        return Err(Error::SmallQ { q, q_min });
    }
    Ok(())
}

/// `dv_x / dv_s` at `(q, omega + i eta)` with quadrature diagnostics.
pub fn ratio_vx_vs_detailed(
    params: &HegParams,
    q: f64,
    omega: f64,
    eta: f64,
    quad: &QuadSpec,
) -> Result<QuadResult<Complex64>> {
    check_small_q(params, q)?;
    check_freq(omega, eta)?;
    quad.validate()?;
    if omega < 0.0 {
        return Ok(ratio_vx_vs_detailed(params, q, -omega, eta, quad)?.map(|v| v.conj()));
    }
    let w = Window::new(params, q);
    let s = |delta: f64| ratio_weight_in(params, &w, delta, quad);
    spectral_transform(s, w.lo, w.hi, &w.breakpoints(), omega, eta, quad)
}

/// `dv_x / dv_s` at `(q, omega + i eta)`; `eta = 0` is the `+i0` limit.
pub fn ratio_vx_vs(params: &HegParams, q: f64, omega: f64, eta: f64, quad: &QuadSpec) -> Result<Complex64> {
    let r = ratio_vx_vs_detailed(params, q, omega, eta, quad)?;
    if !r.converged {
        return Err(Error::NotConverged {
            context: format!("ratio at q = {q:e}, omega = {omega:e}"),
            value: r.value.norm(),
            err_estimate: r.err_estimate,
        });
    }
    Ok(r.value)
}

/// `dv_x / dv_s` from finite broadenings `eta_ladder` (in units of `eps_F`),
/// extrapolated to `eta = 0`.
pub fn ratio_eta_extrapolated(params: &HegParams, q: f64, omega: f64, quad: &QuadSpec) -> Result<Complex64> {
    let samples = quad
        .eta_ladder
        .iter()
        .map(|&e| {
            let eta = e * params.eps_f;
            ratio_vx_vs(params, q, omega, eta, quad).map(|v| (eta, v))
        })
        .collect::<Result<Vec<_>>>()?;
    let order = samples.len().saturating_sub(1).min(2);
    Ok(extrapolate_eta(&samples, order)?.value)
}

fn divide(ratio: Complex64, chi: Complex64) -> Result<Complex64> {
    if chi.norm() < CHI_FLOOR {
        return Err(Error::DivisionByZero(chi.norm()));
    }
    Ok(ratio / chi)
}

/// Exchange kernel `f_x = (dv_x/dv_s) / chi_s`.
pub fn f_x(params: &HegParams, q: f64, omega: f64, eta: f64, quad: &QuadSpec) -> Result<Complex64> {
    let ratio = ratio_vx_vs(params, q, omega, eta, quad)?;
    divide(ratio, chi_s(params, q, omega, eta)?)
}

/// `1 - (4 pi/q^2) chi_s / (1 + chi_s f_x)`.
pub fn dielectric(q: f64, chi_s: Complex64, f_x: Complex64) -> DielectricValue {
    let denominator = 1.0 + chi_s * f_x;
    if denominator.norm() < POLE_FLOOR {
        return DielectricValue::Pole { denominator };
    }
    DielectricValue::Regular(1.0 - 4.0 * PI / (q * q) * chi_s / denominator)
}

/// Dielectric function with the exchange kernel included.
pub fn epsilon(params: &HegParams, q: f64, omega: f64, eta: f64, quad: &QuadSpec) -> Result<DielectricValue> {
    Ok(sample(params, q, omega, eta, quad)?.dielectric())
}

/// Evaluate all response functions at one point.
pub fn sample(params: &HegParams, q: f64, omega: f64, eta: f64, quad: &QuadSpec) -> Result<ComplexResponseSample> {
    let chi = chi_s(params, q, omega, eta)?;
    let ratio = ratio_vx_vs(params, q, omega, eta, quad)?;
    assemble(q, omega, eta, chi, ratio)
}

impl ComplexResponseSample {
    pub fn dielectric(&self) -> DielectricValue {
        dielectric(self.q, self.chi_s, self.f_x)
    }

    /// Lindhard dielectric function at the same point.
    pub fn epsilon_lindhard(&self) -> Complex64 {
        1.0 - 4.0 * PI / (self.q * self.q) * self.chi_s
    }
}

const CHEB_DEGREE: usize = 16;
const TABLE_MAX_DEPTH: usize = 24;

/// Chebyshev interpolant of degree 16 on `[a, b]`, stored as values at the
/// Chebyshev-Lobatto points.
#[derive(Debug, Clone)]
struct ChebPiece {
    a: f64,
    b: f64,
    values: [f64; CHEB_DEGREE + 1],
}

fn lobatto(j: usize) -> f64 {
    (PI * j as f64 / CHEB_DEGREE as f64).cos()
}

impl ChebPiece {
    fn sample<F: FnMut(f64) -> Result<f64>>(a: f64, b: f64, f: &mut F) -> Result<Self> {
        let mut values = [0.0; CHEB_DEGREE + 1];
        for (j, v) in values.iter_mut().enumerate() {
            let x = 0.5 * (a + b) + 0.5 * (b - a) * lobatto(j);
            *v = f(x)?;
        }
        Ok(Self { a, b, values })
    }

    /// Magnitude of the two highest Chebyshev coefficients.
    fn tail(&self) -> f64 {
        let n = CHEB_DEGREE;
        let coeff = |m: usize| {
            let mut c = 0.0;
            for (j, v) in self.values.iter().enumerate() {
                let w = if j == 0 || j == n { 0.5 } else { 1.0 };
                c += w * v * (PI * (m * j) as f64 / n as f64).cos();
            }
            c * 2.0 / n as f64
        };
        coeff(n - 1).abs() + 0.5 * coeff(n).abs()
    }

    fn eval(&self, x: f64) -> f64 {
        let t = (2.0 * x - self.a - self.b) / (self.b - self.a);
        let mut num = 0.0;
        let mut den = 0.0;
        for (j, v) in self.values.iter().enumerate() {
            let d = t - lobatto(j);
            if d == 0.0 {
                return *v;
            }
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            let w = if j == 0 || j == CHEB_DEGREE { 0.5 * sign } else { sign } / d;
            num += w * v;
            den += w;
        }
        num / den
    }
}

/// Tabulated exchange-ratio weight at one `q`, for sweeps over `omega`.
///
/// Built once by adaptive bisection until the Chebyshev tail on every piece
/// is below `rel_tol` times the largest weight; read-only afterwards.
#[derive(Debug, Clone)]
pub struct RatioTable {
    q: f64,
    lo: f64,
    hi: f64,
    kinks: Vec<f64>,
    pieces: Vec<ChebPiece>,
}

impl RatioTable {
    pub fn build(params: &HegParams, q: f64, quad: &QuadSpec) -> Result<Self> {
        check_small_q(params, q)?;
        quad.validate()?;
        let w = Window::new(params, q);
        let kinks = w.breakpoints();
        let mut edges = vec![w.lo];
        edges.extend(kinks.iter().copied());
        edges.push(w.hi);
        let mut eval = |d: f64| ratio_weight_in(params, &w, d, quad);
        let mut stack: Vec<(ChebPiece, usize)> = Vec::new();
        for e in edges.windows(2) {
            stack.push((ChebPiece::sample(e[0], e[1], &mut eval)?, 0));
        }
        let scale = stack
            .iter()
            .flat_map(|(p, _)| p.values.iter())
            .fold(0.0f64, |m, v| m.max(v.abs()));
        let tol = quad.rel_tol * scale + quad.abs_tol;
        let mut pieces = Vec::new();
        // Depth-first, left to right, so the pieces come out sorted.
        stack.reverse();
        while let Some((piece, depth)) = stack.pop() {
            if piece.tail() <= tol || depth >= TABLE_MAX_DEPTH {
                pieces.push(piece);
                continue;
            }
            let mid = 0.5 * (piece.a + piece.b);
            let right = ChebPiece::sample(mid, piece.b, &mut eval)?;
            let left = ChebPiece::sample(piece.a, mid, &mut eval)?;
            stack.push((right, depth + 1));
            stack.push((left, depth + 1));
        }
        Ok(Self { q, lo: w.lo, hi: w.hi, kinks, pieces })
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn piece_count(&self) -> usize {
        self.pieces.len()
    }

    /// Interpolated weight; zero outside the continuum.
    pub fn weight(&self, delta: f64) -> f64 {
        if !(delta > self.lo && delta < self.hi) {
            return 0.0;
        }
        let i = self.pieces.partition_point(|p| p.b < delta).min(self.pieces.len() - 1);
        self.pieces[i].eval(delta)
    }

    /// `dv_x / dv_s` from the tabulated weight.
    pub fn ratio(&self, omega: f64, eta: f64, quad: &QuadSpec) -> Result<Complex64> {
        check_freq(omega, eta)?;
        if omega < 0.0 {
            return Ok(self.ratio(-omega, eta, quad)?.conj());
        }
        let r = spectral_transform(|d| Ok(self.weight(d)), self.lo, self.hi, &self.kinks, omega, eta, quad)?;
        if !r.converged {
            return Err(Error::NotConverged {
                context: format!("tabulated ratio at omega = {omega:e}"),
                value: r.value.norm(),
                err_estimate: r.err_estimate,
            });
        }
        Ok(r.value)
    }

    /// All response functions at one frequency.
    pub fn sample(&self, params: &HegParams, omega: f64, eta: f64, quad: &QuadSpec) -> Result<ComplexResponseSample> {
        let chi = chi_s(params, self.q, omega, eta)?;
        let ratio = self.ratio(omega, eta, quad)?;
        assemble(self.q, omega, eta, chi, ratio)
    }
}

fn assemble(q: f64, omega: f64, eta: f64, chi: Complex64, ratio: Complex64) -> Result<ComplexResponseSample> {
    let fx = divide(ratio, chi)?;
    let eps = match dielectric(q, chi, fx) {
        DielectricValue::Regular(v) => v,
        DielectricValue::Pole { .. } => Complex64::new(f64::INFINITY, 0.0),
    };
    Ok(ComplexResponseSample {
        q,
        omega,
        eta,
        chi_s: chi,
        ratio,
        f_x: fx,
        epsilon: eps,
    })
}

/// Static exchange kernel, with the `omega = 0` resonances folded into a
/// principal-value integral.
pub fn f_x_static(params: &HegParams, q: f64, quad: &QuadSpec) -> Result<f64> {
    let ratio = ratio_vx_vs(params, q, 0.0, 0.0, quad)?;
    let chi = chi_s(params, q, 0.0, 0.0)?;
    Ok(divide(ratio, chi)?.re)
}

/// `lim_{q->0} f_x(q, omega)` at fixed `omega != 0`: `-3 pi / (4 k_F^2)`.
pub fn fx_limit_q0_finite_omega(params: &HegParams) -> f64 {
    -3.0 * PI / (4.0 * params.k_f * params.k_f)
}

/// `lim_{q->0} f_x(q, 0)`: `-pi / k_F^2`.
pub fn fx_limit_omega0_q0(params: &HegParams) -> f64 {
    -PI / (params.k_f * params.k_f)
}

/// Numerical `-k_F^2 lim_{q->0} f_x(q, 0)`, Richardson-extrapolated from
/// `q = {4, 2, 1} q_min`.
pub fn static_limit_numerator(params: &HegParams, quad: &QuadSpec) -> Result<StaticLimit> {
    let kf2 = params.k_f * params.k_f;
    let q_min = Q_MIN_OVER_KF * params.k_f;
    let mut samples = [(0.0, 0.0); 3];
    for (slot, m) in samples.iter_mut().zip([4.0, 2.0, 1.0]) {
        let q = m * q_min;
        *slot = (q, -kf2 * f_x_static(params, q, quad)?);
    }
    let pts: Vec<(f64, Complex64)> = samples.iter().map(|&(q, v)| (q, Complex64::new(v, 0.0))).collect();
    let ex = extrapolate_eta(&pts, 2)?;
    let lower = extrapolate_eta(&pts[1..], 1)?;
    Ok(StaticLimit {
        numerator: ex.value.re,
        residual: (ex.value.re - lower.value.re).abs().max(ex.residual),
        samples,
    })
}

/// Exchange shear modulus `(3/4) n0^2 [f_x(q->0, omega) - f_x(q->0, 0)]`.
pub fn mu_x(params: &HegParams) -> MuX {
    let jump = fx_limit_q0_finite_omega(params) - fx_limit_omega0_q0(params);
    let mu_au = 0.75 * params.n0 * params.n0 * jump;
    MuX {
        mu_au,
        mu_in_2wpln: mu_au / params.shear_unit(),
    }
}

/// `3 (3/2)^{2/3} / (64 pi^{5/3})`, the coefficient of `r_s^-4` in `mu_x`.
pub fn mu_x_coefficient() -> f64 {
    3.0 * 1.5f64.powf(2.0 / 3.0) / (64.0 * PI.powf(5.0 / 3.0))
}
