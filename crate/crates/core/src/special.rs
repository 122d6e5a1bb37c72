//! Fermi-sphere integrals entering the linearized exchange equation.
//!
//! With `f` the zero-temperature occupation and all integrals over 3D wave
//! vectors,
//!
//! ```text
//! A(q)    = 2/(2pi)^3 ∫ f(k1) f(k1+q) dk1
//! B(q, k) = 2/(2pi)^3 ∫ f(k1) f(k1+q) / |k - k1|^2 dk1
//! C(k)    = 2/(2pi)^3 ∫ f(k1) / |k - k1|^2 dk1
//! ```
//!
//! `A` and `C` have closed forms. `B` is the Coulomb-like potential of the lens
//! where two Fermi spheres overlap; it reduces to one radial quadrature over
//! spherical shells `k1`, each shell contributing a polar cap whose angular
//! integral is the function `P`. The complement of the lens inside the first
//! sphere (a crescent of thickness ~q) gives `D = C - B`, which the response
//! code needs directly because `B - C` is O(q) at small q.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::heg::HegParams;
use crate::quadrature::{integrate_pieces, QuadResult, QuadSpec};

/// `2/(2pi)^3`.
pub(crate) const SPHERE_PREFACTOR: f64 = 1.0 / (4.0 * PI * PI * PI);
/// `2/(2pi)^2`.
const SHELL_PREFACTOR: f64 = 1.0 / (2.0 * PI * PI);

const H_SMALL_K: f64 = 1e-4;
const H_NEAR_P: f64 = 1e-6;
const H_LARGE_K: f64 = 3.0;
const X_CLAMP: f64 = 1e-12;

/// Arguments of `B`: magnitudes of q and k, and the cosine between them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BArgs {
    pub q: f64,
    pub k: f64,
    pub y: f64,
}

impl BArgs {
    pub fn new(q: f64, k: f64, y: f64) -> Result<Self> {
        let args = Self { q, k, y };
        args.validate()?;
        Ok(args)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.q >= 0.0) || !(self.k >= 0.0) || !(self.y.abs() <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "B arguments need q >= 0, k >= 0, |y| <= 1; got {self:?}"
            )));
        }
        Ok(())
    }
}

/// Closed form `A(q) = Θ(2k_F - q)(2k_F - q)^2(4k_F + q) / (48 pi^2)`.
pub fn a_of_q(params: &HegParams, q: f64) -> f64 {
    let kf = params.k_f;
    if q >= 2.0 * kf {
        return 0.0;
    }
    let d = 2.0 * kf - q;
    d * d * (4.0 * kf + q) / (48.0 * PI * PI)
}

/// `n0 - A(q)`, evaluated without cancellation: `q (12 k_F^2 - q^2) / (48 pi^2)`.
pub fn n0_minus_a(params: &HegParams, q: f64) -> f64 {
    let kf = params.k_f;
    if q >= 2.0 * kf {
        return params.n0;
    }
    q * (12.0 * kf * kf - q * q) / (48.0 * PI * PI)
}

/// `H(k, p) = (pi/k) [(p^2 - k^2) log|(p+k)/(p-k)| + 2kp]`, the integral of
/// `1/|k - k1|^2` over a ball of radius `p`.
///
/// Series are used for `k < 1e-4 p` and `k > 3p`, and the factored form in
/// `k - p` for `|k - p| < 1e-6 p`.
pub fn h_func(k: f64, p: f64) -> f64 {
    debug_assert!(k >= 0.0 && p > 0.0);
    if k < H_SMALL_K * p {
        let r2 = (k / p) * (k / p);
        return 4.0 * PI * p * (1.0 - r2 / 3.0 - r2 * r2 / 15.0);
    }
    if k > H_LARGE_K * p {
        // 4 pi k Σ_{j>=1} r^{2j+1} / (4j^2 - 1), r = p/k
        let r = p / k;
        let r2 = r * r;
        let mut term = r * r2;
        let mut sum = 0.0;
        for j in 1..200 {
            let jf = j as f64;
            let add = term / (4.0 * jf * jf - 1.0);
            sum += add;
            if add < 1e-18 * sum {
                break;
            }
            term *= r2;
        }
        return 4.0 * PI * k * sum;
    }
    let delta = k - p;
    if delta.abs() < H_NEAR_P * p {
        if delta == 0.0 {
            return 2.0 * PI * p;
        }
        let log_term = (2.0 * p + delta).ln() - delta.abs().ln();
        return PI / k * (2.0 * k * p - delta * (2.0 * p + delta) * log_term);
    }
    let atanh = if k < p { (k / p).atanh() } else { (p / k).atanh() };
    PI / k * ((p * p - k * k) * 2.0 * atanh + 2.0 * k * p)
}

/// `C(k) = 2/(2pi)^3 H(k, k_F)`.
pub fn c_of_k(params: &HegParams, k: f64) -> f64 {
    SPHERE_PREFACTOR * h_func(k, params.k_f)
}

/// Natural log of the polar-cap ratio behind `P`.
///
/// For the shell `|k1|`, the cap `cos(theta1) in [-1, x]` measured from q and
/// a point `k` at cosine `y` to q, returns `log Q` with
/// `P = k1/(2k) log Q`. Written with `b = 2 k k1`, `e = (k - k1)^2`,
/// `R = b^2 (x-y)^2 + 2be(1-xy) + e^2` and `t = b(y-x) + ey`, the cap ratio
/// is `(2b+e)(1+y)/(sqrt R + t)` or, equivalently,
/// `(sqrt R - t)/((1-y) e)`; the branch without cancellation is taken.
fn log_cap(k: f64, k1: f64, x: f64, y: f64) -> f64 {
    let b = 2.0 * k * k1;
    let e = (k - k1) * (k - k1);
    let xy = x - y;
    if b < 0.5 * e {
        // Q - 1 without cancellation, then log1p.
        let ratio = b / e;
        let u = 2.0 * ratio * (1.0 - x * y) + ratio * ratio * xy * xy;
        let sqrt1u = (1.0 + u).sqrt();
        let sr = e * sqrt1u;
        let t = b * (y - x) + e * y;
        let grow = (2.0 * b * (1.0 - x * y) + b * ratio * xy * xy) / (1.0 + sqrt1u);
        let qm1 = if t >= 0.0 {
            (b * (2.0 + x + y) - grow) / (sr + t)
        } else {
            (grow + b * xy) / ((1.0 - y) * e)
        };
        return qm1.ln_1p();
    }
    let r = b * b * xy * xy + 2.0 * b * e * (1.0 - x * y) + e * e;
    let sr = r.sqrt();
    let t = b * (y - x) + e * y;
    if t >= 0.0 {
        ((2.0 * b + e) * (1.0 + y) / (sr + t)).ln()
    } else {
        ((sr - t) / ((1.0 - y) * e)).ln()
    }
}

fn cap_weight(k: f64, k1: f64, x: f64, y: f64) -> f64 {
    if k == 0.0 {
        return 1.0 + x;
    }
    k1 / (2.0 * k) * log_cap(k, k1, x, y)
}

/// The shell function `P(k, k1, x, y)` (cap `[-1, x]`).
///
/// `x` within `1e-12` outside `[-1, 1]` is clamped; anything further out is a
/// domain error, as is a non-positive log argument.
pub fn p_func(k: f64, k1: f64, x: f64, y: f64) -> Result<f64> {
    if !(k > 0.0) || !(k1 > 0.0) || !(y.abs() <= 1.0) {
        return Err(Error::Domain(format!("need k > 0, k1 > 0, |y| <= 1; got k={k}, k1={k1}, y={y}")));
    }
    let x = clamp_x(x)?;
    let v = cap_weight(k, k1, x, y);
    if v.is_nan() || v == f64::NEG_INFINITY {
        return Err(Error::Domain(format!("log argument non-positive at k={k}, k1={k1}, x={x}, y={y}")));
    }
    Ok(v)
}

fn clamp_x(x: f64) -> Result<f64> {
    if x.abs() <= 1.0 {
        Ok(x)
    } else if x.abs() <= 1.0 + X_CLAMP {
        Ok(x.signum())
    } else {
        Err(Error::Domain(format!("cap cosine x = {x} outside [-1, 1]")))
    }
}

/// Cosine bounding the part of shell `k1` inside the sphere shifted by -q.
fn shell_cosine(params: &HegParams, q: f64, k1: f64) -> f64 {
    let kf = params.k_f;
    (kf * kf - k1 * k1 - q * q) / (2.0 * k1 * q)
}

fn shell_integral(
    params: &HegParams,
    args: &BArgs,
    complement: bool,
    quad: &QuadSpec,
) -> Result<QuadResult<f64>> {
    let kf = params.k_f;
    let (q, k, y) = (args.q, args.k, args.y);
    let lo = (kf - q).abs();
    if !(lo < kf) || q == 0.0 {
        return Ok(QuadResult {
            value: 0.0,
            err_estimate: 0.0,
            subdivisions_used: 0,
            converged: true,
        });
    }
    let bad_x = std::cell::Cell::new(None::<f64>);
    let integrand = |k1: f64| {
        let raw = shell_cosine(params, q, k1);
        let x = match clamp_x(raw) {
            Ok(x) => x,
            Err(_) => {
                bad_x.set(Some(raw));
                raw.clamp(-1.0, 1.0)
            }
        };
        if complement {
            cap_weight(k, k1, -x, -y)
        } else {
            cap_weight(k, k1, x, y)
        }
    };
    let r = integrate_pieces(integrand, lo, kf, &[k], quad, true)?;
    if let Some(x) = bad_x.get() {
        return Err(Error::Domain(format!("cap cosine x = {x} outside [-1, 1]")));
    }
    Ok(r.map(|v| SHELL_PREFACTOR * v))
}

fn require_converged(r: QuadResult<f64>, context: &str) -> Result<f64> {
    if r.converged {
        Ok(r.value)
    } else {
        Err(Error::NotConverged {
            context: context.to_string(),
            value: r.value,
            err_estimate: r.err_estimate,
        })
    }
}

/// `B(q, k)` with full quadrature diagnostics.
pub fn b_of_qk_detailed(params: &HegParams, args: BArgs, quad: &QuadSpec) -> Result<QuadResult<f64>> {
    args.validate()?;
    let kf = params.k_f;
    if args.q >= 2.0 * kf {
        return Ok(QuadResult {
            value: 0.0,
            err_estimate: 0.0,
            subdivisions_used: 0,
            converged: true,
        });
    }
    let ball = if args.q < kf {
        SPHERE_PREFACTOR * h_func(args.k, kf - args.q)
    } else {
        0.0
    };
    let spec = quad.clone().with_abs_tol(quad.abs_tol.max(quad.rel_tol * ball));
    let shells = shell_integral(params, &args, false, &spec)?;
    Ok(shells.map(|v| v + ball))
}

/// `B(q, k)`: ball of radius `k_F - q` in closed form plus the shell
/// quadrature over `k1 in [|k_F - q|, k_F]`.
pub fn b_of_qk(params: &HegParams, args: BArgs, quad: &QuadSpec) -> Result<f64> {
    require_converged(b_of_qk_detailed(params, args, quad)?, "B(q, k)")
}

/// `D(q, k) = C(k) - B(q, k)`: the same integral over the occupied states
/// whose partner `k1 + q` is empty.
pub fn d_of_qk(params: &HegParams, args: BArgs, quad: &QuadSpec) -> Result<f64> {
    args.validate()?;
    let kf = params.k_f;
    if args.q >= 2.0 * kf {
        return Ok(c_of_k(params, args.k));
    }
    let ball = if args.q > kf {
        SPHERE_PREFACTOR * h_func(args.k, args.q - kf)
    } else {
        0.0
    };
    let shells = shell_integral(params, &args, true, quad)?;
    Ok(ball + require_converged(shells, "D(q, k)")?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn params(rs: f64) -> HegParams {
        HegParams::from_rs(rs).unwrap()
    }

    fn tight() -> QuadSpec {
        QuadSpec::default().with_rel_tol(1e-11).with_abs_tol(1e-16)
    }

    #[test]
    fn a_examples() {
        let p = params(2.0);
        assert!((a_of_q(&p, 0.0) - p.n0).abs() < 1e-15 * p.n0);
        assert_eq!(a_of_q(&p, 2.0 * p.k_f), 0.0);
        assert_eq!(a_of_q(&p, 3.0 * p.k_f), 0.0);
        let below = a_of_q(&p, 2.0 * p.k_f * (1.0 - 1e-9));
        assert!((0.0..1e-15).contains(&below));
    }

    #[test]
    fn n0_minus_a_identity() {
        let p = params(3.0);
        for i in 0..=40 {
            let q = 2.0 * p.k_f * i as f64 / 40.0;
            let lhs = p.n0 - a_of_q(&p, q);
            assert!((lhs - n0_minus_a(&p, q)).abs() < 1e-15, "q = {q}");
        }
    }

    #[test]
    fn a_monotone() {
        let p = params(1.0);
        let mut last = f64::INFINITY;
        for i in 0..=100 {
            let v = a_of_q(&p, 0.03 * i as f64 * p.k_f);
            assert!(v >= 0.0 && v <= last);
            last = v;
        }
    }

    #[test]
    fn h_limits() {
        let p = 1.7;
        assert!((h_func(1e-6 * p, p) / (4.0 * PI * p) - 1.0).abs() < 1e-8);
        assert_eq!(h_func(0.0, p), 4.0 * PI * p);
        for s in [1.0 + 1e-7, 1.0 - 1e-7] {
            assert!((h_func(s * p, p) / (2.0 * PI * p) - 1.0).abs() < 1e-5);
        }
        assert_eq!(h_func(p, p), 2.0 * PI * p);
        let big = h_func(10.0 * p, p) / (4.0 * PI * p.powi(3) / (3.0 * 100.0 * p * p));
        assert!((big - 1.0).abs() < 0.01);
        let bigger = h_func(100.0 * p, p) / (4.0 * PI * p.powi(3) / (3.0 * 1e4 * p * p));
        assert!((bigger - 1.0).abs() < (big - 1.0).abs());
    }

    fn h_closed(k: f64, p: f64) -> f64 {
        PI / k * ((p * p - k * k) * ((p + k) / (p - k)).abs().ln() + 2.0 * k * p)
    }

    #[test]
    fn h_branch_continuity() {
        let p = 0.9;
        // Closed form with atanh at the small-k switch.
        let k = H_SMALL_K * p;
        let atanh_form = PI / k * ((p * p - k * k) * 2.0 * (k / p).atanh() + 2.0 * k * p);
        assert!((h_func(k * (1.0 - 1e-12), p) / atanh_form - 1.0).abs() < 1e-9);
        // Near k = p, the naive log form is still accurate at the threshold.
        for s in [1.0 - H_NEAR_P, 1.0 + H_NEAR_P] {
            let k = p + 0.999 * (s - 1.0) * p;
            let inside = h_func(k, p);
            let naive = h_closed(k, p);
            assert!((inside / naive - 1.0).abs() < 1e-9);
        }
        // Large-k series versus closed form at the switch.
        let k = H_LARGE_K * p;
        assert!((h_func(k * (1.0 + 1e-12), p) / h_closed(k, p) - 1.0).abs() < 1e-9);
        assert!((h_func(k * (1.0 - 1e-12), p) / h_closed(k, p) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn c_examples() {
        let p = params(2.0);
        assert!((c_of_k(&p, 0.0) - p.k_f / (PI * PI)).abs() < 1e-15);
        let k = 1e4 * p.k_f;
        assert!((c_of_k(&p, k) * k * k / p.n0 - 1.0).abs() < 1e-7);
        let mut last = f64::INFINITY;
        for i in 0..200 {
            let c = c_of_k(&p, 0.02 * i as f64 * p.k_f);
            assert!(c > 0.0 && c < last);
            last = c;
        }
    }

    #[test]
    fn p_full_cap_is_shell_integral() {
        // x = 1 covers the whole shell: P = (k1/k) log|(k+k1)/(k-k1)|
        for &(k, k1, y) in &[(0.7f64, 0.4f64, 0.3), (0.2, 0.9, -0.8), (1.3, 1.1, 0.99)] {
            let full = k1 / k * ((k + k1) / (k - k1)).abs().ln();
            assert!((p_func(k, k1, 1.0, y).unwrap() - full).abs() < 1e-13);
            // and the empty cap gives zero
            assert!(p_func(k, k1, -1.0, y).unwrap().abs() < 1e-13);
        }
    }

    #[test]
    fn p_at_y_minus_one_is_finite() {
        let k = 0.8;
        let k1 = 0.5;
        let v = p_func(k, k1, 0.2, -1.0).unwrap();
        assert!(v.is_finite() && v > 0.0);
    }

    #[test]
    fn p_domain_errors() {
        assert!(p_func(0.5, 0.5, 1.0 + 1e-13, 0.2).is_ok());
        assert!(matches!(p_func(0.5, 0.4, 1.0 + 1e-9, 0.2), Err(Error::Domain(_))));
        assert!(p_func(0.0, 0.4, 0.1, 0.2).is_err());
        assert!(p_func(0.5, 0.4, 0.1, 1.2).is_err());
    }

    /// The literal first-log form `sqrt(R) + 2kk1x - y(k^2 + k1^2)`.
    fn literal_p(k: f64, k1: f64, x: f64, y: f64) -> (f64, f64) {
        let rad = k.powi(4) + 4.0 * k * k * k1 * k1 * x * x
            + 2.0 * k * k1 * (k * k1 * (2.0 * y * y - 1.0) - 2.0 * x * y * (k * k + k1 * k1))
            + k1.powi(4);
        let arg = rad.max(0.0).sqrt() + 2.0 * k * k1 * x - y * (k * k + k1 * k1);
        let p = k1 / (2.0 * k) * (arg.ln() - ((1.0 - y) * (k - k1) * (k - k1)).ln());
        (arg, p)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]
        #[test]
        fn p_first_log_argument_positive(
            k in 0.05f64..3.0, k1 in 0.05f64..3.0, x in -1.0f64..1.0, y in -0.999f64..0.999
        ) {
            prop_assume!((k - k1).abs() > 1e-3);
            let (arg, literal) = literal_p(k, k1, x, y);
            let scale = (k * k + k1 * k1) * 1e-12;
            prop_assert!(arg > -scale);
            let stable = p_func(k, k1, x, y).unwrap();
            // Where the literal argument is well above roundoff both forms agree.
            if arg > 1e-6 * (k * k + k1 * k1) {
                prop_assert!((stable - literal).abs() < 1e-7 * (1.0 + literal.abs()),
                    "stable {} literal {}", stable, literal);
            }
        }
    }

    #[test]
    fn b_vanishes_beyond_two_kf() {
        let p = params(2.0);
        let q = 2.0 * p.k_f;
        assert_eq!(b_of_qk(&p, BArgs::new(q, 0.5 * p.k_f, 0.1).unwrap(), &tight()).unwrap(), 0.0);
        // between k_F and 2 k_F only the shell term is present
        let v = b_of_qk(&p, BArgs::new(1.5 * p.k_f, 0.3 * p.k_f, 0.1).unwrap(), &tight()).unwrap();
        assert!(v > 0.0);
    }

    #[test]
    fn b_small_q_reduces_to_c() {
        let p = params(2.0);
        let q = 1e-6 * p.k_f;
        for &k in &[0.0f64, 0.3, 0.95, 1.0, 1.05, 2.5] {
            for &y in &[-1.0, -0.4, 0.2, 1.0] {
                let kk = k * p.k_f;
                let b = b_of_qk(&p, BArgs::new(q, kk, y).unwrap(), &tight()).unwrap();
                let c = c_of_k(&p, kk);
                assert!((b / c - 1.0).abs() < 1e-4, "k={k} y={y}: {b} vs {c}");
            }
        }
    }

    #[test]
    fn b_plus_d_is_c() {
        let p = params(1.0);
        let kf = p.k_f;
        for &q in &[0.01, 0.5, 1.0, 1.4, 1.99] {
            for &k in &[0.1, 0.7, 1.2] {
                for &y in &[-0.9, 0.0, 0.6] {
                    let args = BArgs::new(q * kf, k * kf, y).unwrap();
                    let b = b_of_qk(&p, args, &tight()).unwrap();
                    let d = d_of_qk(&p, args, &tight()).unwrap();
                    let c = c_of_k(&p, k * kf);
                    assert!(((b + d) / c - 1.0).abs() < 1e-9, "q={q} k={k} y={y}");
                }
            }
        }
    }

    #[test]
    fn b_rejects_bad_args() {
        assert!(BArgs::new(0.1, 0.2, 1.5).is_err());
        assert!(BArgs::new(-0.1, 0.2, 0.5).is_err());
    }
}
