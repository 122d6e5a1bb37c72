//! Numerical integration engine shared by the electron-gas pipeline.
//!
//! Everything here is built on the 21-point Gauss-Kronrod pair, which is an
//! open rule: no node ever lands on an interval endpoint. Integrable endpoint
//! singularities (logarithms in particular) are therefore admissible, and the
//! clustered variant additionally grades the nodes toward both endpoints with
//! a polynomial sigmoid substitution so that `x log x`-type behaviour converges
//! in a handful of panels.
//!
//! Node placement is deterministic; identical inputs give bit-identical output.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadError {
    #[error("invalid integration interval [{a}, {b}]")]
    InvalidInterval { a: f64, b: f64 },
    #[error("integrand is not finite at x = {x}")]
    NonFinite { x: f64 },
    #[error("invalid quadrature spec: {0}")]
    InvalidSpec(String),
    #[error("extrapolation ladder is ill-conditioned: {0}")]
    IllConditioned(String),
}

/// Scalar types the integrators accept as integrand values.
pub trait QuadValue:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> + Send + Sync
{
    fn zero() -> Self;
    fn norm(&self) -> f64;
    fn is_finite(&self) -> bool;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn norm(&self) -> f64 {
        self.abs()
    }
    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn norm(&self) -> f64 {
        Complex64::norm(*self)
    }
    fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

/// Tolerances and limits for every quadrature in the crate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    /// Half-width of the symmetric window used by [`principal_value`];
    /// zero means "as wide as the interval allows".
    pub pv_window: f64,
    /// Broadenings for eta -> 0 extrapolation, in units of the Fermi energy,
    /// strictly decreasing.
    pub eta_ladder: Vec<f64>,
}

impl Default for QuadSpec {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            abs_tol: 1e-14,
            max_subdivisions: 400,
            pv_window: 0.0,
            eta_ladder: vec![1e-2, 5e-3, 2.5e-3],
        }
    }
}

impl QuadSpec {
    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_abs_tol(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }

    /// Same limits, tolerances scaled by `factor` (used for inner integrals of
    /// nested quadratures).
    pub fn tightened(&self, factor: f64) -> Self {
        Self {
            rel_tol: self.rel_tol * factor,
            abs_tol: self.abs_tol * factor,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<(), QuadError> {
        if !(self.rel_tol > 0.0) || !self.rel_tol.is_finite() {
            return Err(QuadError::InvalidSpec("rel_tol must be positive".into()));
        }
        if !(self.abs_tol >= 0.0) || !self.abs_tol.is_finite() {
            return Err(QuadError::InvalidSpec("abs_tol must be non-negative".into()));
        }
        if self.max_subdivisions < 1 {
            return Err(QuadError::InvalidSpec("max_subdivisions must be >= 1".into()));
        }
        if !(self.pv_window >= 0.0) {
            return Err(QuadError::InvalidSpec("pv_window must be non-negative".into()));
        }
        if self.eta_ladder.iter().any(|&e| !(e > 0.0) || !e.is_finite())
            || self.eta_ladder.windows(2).any(|w| w[1] >= w[0])
        {
            return Err(QuadError::InvalidSpec(
                "eta_ladder must be positive and strictly decreasing".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult<T> {
    pub value: T,
    pub err_estimate: f64,
    pub subdivisions_used: usize,
    pub converged: bool,
}

impl<T: QuadValue> QuadResult<T> {
    fn zero() -> Self {
        Self {
            value: T::zero(),
            err_estimate: 0.0,
            subdivisions_used: 0,
            converged: true,
        }
    }

    fn accumulate(&mut self, other: QuadResult<T>) {
        self.value = self.value + other.value;
        self.err_estimate += other.err_estimate;
        self.subdivisions_used += other.subdivisions_used;
        self.converged &= other.converged;
    }

    pub fn map<U, G: FnOnce(T) -> U>(self, g: G) -> QuadResult<U> {
        QuadResult {
            value: g(self.value),
            err_estimate: self.err_estimate,
            subdivisions_used: self.subdivisions_used,
            converged: self.converged,
        }
    }
}

// Kronrod abscissae on [0, 1); odd indices are the 10-point Gauss nodes.
const XGK: [f64; 11] = [
    0.995_657_163_025_808_1,
    0.973_906_528_517_171_7,
    0.930_157_491_355_708_2,
    0.865_063_366_688_984_5,
    0.780_817_726_586_416_9,
    0.679_409_568_299_024_4,
    0.562_757_134_668_604_7,
    0.433_395_394_129_247_2,
    0.294_392_862_701_460_2,
    0.148_874_338_981_631_22,
    0.000000000000000000000000000000000,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_14,
    0.149_451_349_150_580_6,
    0.219_086_362_515_982_04,
    0.269_266_719_309_996_35,
    0.295_524_224_714_752_87,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874,
    0.032_558_162_307_964_725,
    0.054_755_896_574_351_995,
    0.075_039_674_810_919_96,
    0.093_125_454_583_697_6,
    0.109_387_158_802_297_64,
    0.123_491_976_262_065_84,
    0.134_709_217_311_473_34,
    0.142_775_938_577_060_09,
    0.147_739_104_901_338_49,
    0.149_445_554_002_916_9,
];

#[derive(Debug, Clone, Copy)]
struct Segment<T> {
    a: f64,
    b: f64,
    value: T,
    err: f64,
}

impl<T> PartialEq for Segment<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl<T> Eq for Segment<T> {}
impl<T> PartialOrd for Segment<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T> Ord for Segment<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err
            .total_cmp(&other.err)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

fn rescale_error(err: f64, resabs: f64, resasc: f64) -> f64 {
    let mut err = err.abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    err
}

fn gk21<T: QuadValue, F: Fn(f64) -> T>(f: &F, a: f64, b: f64) -> Result<Segment<T>, QuadError> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut fv1 = [T::zero(); 10];
    let mut fv2 = [T::zero(); 10];

    let fc = f(center);
    if !fc.is_finite() {
        return Err(QuadError::NonFinite { x: center });
    }
    let mut resk = fc * WGK[10];
    let mut resg = T::zero();
    let mut resabs = fc.norm() * WGK[10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let (x1, x2) = (center - dx, center + dx);
        let f1 = f(x1);
        let f2 = f(x2);
        if !f1.is_finite() {
            return Err(QuadError::NonFinite { x: x1 });
        }
        if !f2.is_finite() {
            return Err(QuadError::NonFinite { x: x2 });
        }
        fv1[j] = f1;
        fv2[j] = f2;
        resk = resk + (f1 + f2) * WGK[j];
        resabs += (f1.norm() + f2.norm()) * WGK[j];
        if j % 2 == 1 {
            resg = resg + (f1 + f2) * WG[j / 2];
        }
    }
    let mean = resk * 0.5;
    let mut resasc = (fc - mean).norm() * WGK[10];
    for j in 0..10 {
        resasc += ((fv1[j] - mean).norm() + (fv2[j] - mean).norm()) * WGK[j];
    }
    let scale = half.abs();
    let err = rescale_error((resk - resg).norm() * scale, resabs * scale, resasc * scale);
    Ok(Segment {
        a,
        b,
        value: resk * half,
        err,
    })
}

fn check_interval(a: f64, b: f64) -> Result<(), QuadError> {
    if !a.is_finite() || !b.is_finite() || a > b {
        return Err(QuadError::InvalidInterval { a, b });
    }
    Ok(())
}

/// Globally adaptive Gauss-Kronrod integration of `f` over `[a, b]`.
///
/// The interval with the largest error estimate is bisected until the total
/// estimate drops below `max(abs_tol, rel_tol * |value|)` or the subdivision
/// budget runs out. Running out is not an error: the best estimate comes back
/// with `converged == false`.
pub fn integrate_1d<T, F>(f: F, a: f64, b: f64, spec: &QuadSpec) -> Result<QuadResult<T>, QuadError>
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    check_interval(a, b)?;
    if a == b {
        return Ok(QuadResult::zero());
    }

    let mut heap = BinaryHeap::new();
    let mut frozen: Vec<Segment<T>> = Vec::new();
    let first = gk21(&f, a, b)?;
    let mut total = first.value;
    let mut total_err = first.err;
    heap.push(first);
    let mut splits = 0usize;

    let converged = loop {
        let tol = spec.abs_tol.max(spec.rel_tol * total.norm());
        if total_err <= tol {
            break true;
        }
        if splits >= spec.max_subdivisions {
            break false;
        }
        let Some(worst) = heap.pop() else {
            break false;
        };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b || (worst.b - worst.a) < 8.0 * f64::EPSILON * mid.abs() {
            frozen.push(worst);
            continue;
        }
        let left = gk21(&f, worst.a, mid)?;
        let right = gk21(&f, mid, worst.b)?;
        total = total - worst.value + left.value + right.value;
        total_err += left.err + right.err - worst.err;
        heap.push(left);
        heap.push(right);
        splits += 1;
    };

    // Re-sum in interval order so the result does not depend on heap layout.
    let mut segments: Vec<Segment<T>> = heap.into_vec();
    segments.extend(frozen);
    segments.sort_by(|s, t| s.a.total_cmp(&t.a));
    let mut value = T::zero();
    let mut err = 0.0;
    for s in &segments {
        value = value + s.value;
        err += s.err;
    }
    let tol = spec.abs_tol.max(spec.rel_tol * value.norm());
    Ok(QuadResult {
        value,
        err_estimate: err,
        subdivisions_used: splits,
        converged: converged || err <= tol,
    })
}

/// Sigmoid map of [0, 1] onto itself with vanishing first and second
/// derivatives at both ends.
fn sigmoid(u: f64) -> (f64, f64) {
    let v = 1.0 - u;
    let (u3, v3) = (u * u * u, v * v * v);
    let den = u3 + v3;
    let phi = u3 / den;
    let dphi = 3.0 * u * u * v * v / (den * den);
    (phi, dphi)
}

/// As [`integrate_1d`], with nodes graded toward both endpoints.
///
/// Intended for integrands with integrable endpoint singularities such as
/// `log(x - a)` or `(x - a) log(x - a)`.
pub fn integrate_1d_clustered<T, F>(
    f: F,
    a: f64,
    b: f64,
    spec: &QuadSpec,
) -> Result<QuadResult<T>, QuadError>
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    check_interval(a, b)?;
    if a == b {
        return Ok(QuadResult::zero());
    }
    let len = b - a;
    let g = |u: f64| {
        let (phi, dphi) = sigmoid(u);
        let x = if u <= 0.5 {
            a + len * phi
        } else {
            b - len * sigmoid(1.0 - u).0
        };
        let w = len * dphi;
        if x <= a || x >= b || w == 0.0 {
            T::zero()
        } else {
            f(x) * w
        }
    };
    integrate_1d(g, 0.0, 1.0, spec)
}

/// Integrates over `[a, b]` split at the given interior breakpoints.
///
/// Breakpoints outside `(a, b)` are ignored; each piece is integrated with the
/// clustered rule when `clustered` is set.
pub fn integrate_pieces<T, F>(
    f: F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    spec: &QuadSpec,
    clustered: bool,
) -> Result<QuadResult<T>, QuadError>
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    check_interval(a, b)?;
    let mut nodes: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|&p| p > a && p < b && p.is_finite())
        .collect();
    nodes.sort_by(f64::total_cmp);
    nodes.dedup();
    let mut edges = Vec::with_capacity(nodes.len() + 2);
    edges.push(a);
    edges.extend(nodes);
    edges.push(b);

    let pieces = (edges.len() - 1) as f64;
    let piece_spec = spec.clone().with_abs_tol(spec.abs_tol / pieces);
    let mut out = QuadResult::zero();
    for w in edges.windows(2) {
        let r = if clustered {
            integrate_1d_clustered(&f, w[0], w[1], &piece_spec)?
        } else {
            integrate_1d(&f, w[0], w[1], &piece_spec)?
        };
        out.accumulate(r);
    }
    let tol = spec.abs_tol.max(spec.rel_tol * out.value.norm());
    out.converged = out.converged || out.err_estimate <= tol;
    Ok(out)
}

/// A curve splitting the rectangle of [`integrate_2d_split`].
pub enum SplitCurve<'a> {
    /// Vertical line `x = c`.
    X(f64),
    /// Graph `y = c(x)`; only the part inside the rectangle matters.
    Y(Box<dyn Fn(f64) -> f64 + Sync + 'a>),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x: (f64, f64),
    pub y: (f64, f64),
}

/// Iterated integral of `f(x, y)` over a rectangle cut into cells by
/// `split_curves`; each cell is integrated separately so the integrand only
/// needs to be smooth inside cells.
pub fn integrate_2d_split<T, F>(
    f: F,
    domain: Rect,
    split_curves: &[SplitCurve<'_>],
    spec: &QuadSpec,
) -> Result<QuadResult<T>, QuadError>
where
    T: QuadValue,
    F: Fn(f64, f64) -> T,
{
    check_interval(domain.x.0, domain.x.1)?;
    check_interval(domain.y.0, domain.y.1)?;
    let x_breaks: Vec<f64> = split_curves
        .iter()
        .filter_map(|c| match c {
            SplitCurve::X(x) => Some(*x),
            SplitCurve::Y(_) => None,
        })
        .collect();
    let inner_spec = spec.tightened(0.1);
    let failure = std::cell::RefCell::new(None::<QuadError>);
    let inner_ok = std::cell::Cell::new(true);

    let outer = |x: f64| -> T {
        let y_breaks: Vec<f64> = split_curves
            .iter()
            .filter_map(|c| match c {
                SplitCurve::Y(g) => Some(g(x)),
                SplitCurve::X(_) => None,
            })
            .collect();
        match integrate_pieces(|y| f(x, y), domain.y.0, domain.y.1, &y_breaks, &inner_spec, true) {
            Ok(r) => {
                if !r.converged {
                    inner_ok.set(false);
                }
                r.value
            }
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                T::zero()
            }
        }
    };
    let mut res = integrate_pieces(outer, domain.x.0, domain.x.1, &x_breaks, spec, true)?;
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    res.converged &= inner_ok.get();
    Ok(res)
}

/// Cauchy principal value of `∫_a^b g(x) / (x - x0) dx` for `a < x0 < b`.
///
/// A symmetric window `[x0 - h, x0 + h]` is folded onto itself so the pole
/// cancels exactly, `∫_0^h [g(x0 + t) - g(x0 - t)] / t dt`; the remainder of
/// the interval is regular.
pub fn principal_value<F>(g: F, x0: f64, a: f64, b: f64, spec: &QuadSpec) -> Result<QuadResult<f64>, QuadError>
where
    F: Fn(f64) -> f64,
{
    check_interval(a, b)?;
    if !(x0 > a && x0 < b) {
        return Err(QuadError::InvalidInterval { a, b });
    }
    let room = (x0 - a).min(b - x0);
    let h = if spec.pv_window > 0.0 {
        spec.pv_window.min(room)
    } else {
        room
    };
    let folded = integrate_1d_clustered(|t: f64| (g(x0 + t) - g(x0 - t)) / t, 0.0, h, spec)?;
    let mut out = folded;
    if x0 - h > a {
        out.accumulate(integrate_1d_clustered(|x: f64| g(x) / (x - x0), a, x0 - h, spec)?);
    }
    if x0 + h < b {
        out.accumulate(integrate_1d_clustered(|x: f64| g(x) / (x - x0), x0 + h, b, spec)?);
    }
    Ok(out)
}

/// `∫_a^b g(x) / (x0 - x + i eta) dx` for real `g` and `eta >= 0`.
///
/// `eta == 0` is the `eta -> 0+` limit: principal value plus `-i pi g(x0)`.
/// When `x0` lies inside the interval the value `g(x0)` is subtracted and the
/// resonant part integrated in closed form, so small broadenings need no
/// special resolution by the adaptive rule.
pub fn resonant_integral<F>(
    g: F,
    x0: f64,
    eta: f64,
    a: f64,
    b: f64,
    spec: &QuadSpec,
) -> Result<QuadResult<Complex64>, QuadError>
where
    F: Fn(f64) -> f64,
{
    check_interval(a, b)?;
    if !(eta >= 0.0) {
        return Err(QuadError::InvalidSpec("eta must be non-negative".into()));
    }
    let z = Complex64::new(x0, eta);
    if x0 > a && x0 < b {
        let g0 = g(x0);
        let sub = |x: f64| {
            let d = x0 - x;
            if d == 0.0 && eta == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(g(x) - g0, 0.0) / Complex64::new(d, eta)
            }
        };
        let mut r = integrate_pieces(sub, a, b, &[x0], spec, true)?;
        let log_term = (z - a).ln() - (z - b).ln();
        r.value += log_term * g0;
        Ok(r)
    } else {
        integrate_1d_clustered(|x: f64| Complex64::new(g(x), 0.0) / (z - x), a, b, spec)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extrapolated {
    pub value: Complex64,
    /// Difference between the requested-order extrapolant and the one of
    /// order one lower; zero for order 0.
    pub residual: f64,
}

/// Richardson (polynomial) extrapolation of `(eta, value)` samples to eta = 0.
///
/// Uses the `order + 1` samples with the smallest eta and Neville's scheme.
pub fn extrapolate_eta(values: &[(f64, Complex64)], order: usize) -> Result<Extrapolated, QuadError> {
    if values.len() < 2 || values.len() < order + 1 {
        return Err(QuadError::IllConditioned(format!(
            "{} samples cannot support order {order}",
            values.len()
        )));
    }
    let mut pts: Vec<(f64, Complex64)> = values.to_vec();
    pts.sort_by(|p, q| p.0.total_cmp(&q.0));
    pts.truncate(order + 1);
    for w in pts.windows(2) {
        if !(w[1].0 > w[0].0) {
            return Err(QuadError::IllConditioned("repeated eta values".into()));
        }
    }
    if pts.iter().any(|p| !(p.0 > 0.0)) {
        return Err(QuadError::IllConditioned("eta values must be positive".into()));
    }
    let spread = pts.last().unwrap().0 / pts[0].0;
    if spread < 1.0 + 1e-6 {
        return Err(QuadError::IllConditioned("eta values nearly coincide".into()));
    }

    // Neville tableau evaluated at eta = 0.
    let n = pts.len();
    let mut table: Vec<Complex64> = pts.iter().map(|p| p.1).collect();
    let mut prev_order_value = table[0];
    for m in 1..n {
        for i in 0..n - m {
            let (xi, xj) = (pts[i].0, pts[i + m].0);
            table[i] = (table[i + 1] * xi - table[i] * xj) / (xi - xj);
        }
        if m == n - 2 {
            prev_order_value = table[0];
        }
    }
    let value = table[0];
    let residual = if order == 0 {
        0.0
    } else if n == 2 {
        (value - pts[0].1).norm()
    } else {
        (value - prev_order_value).norm()
    };
    Ok(Extrapolated { value, residual })
}

/// Gauss-Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p1 = z;
                p0 = 1.0;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> QuadSpec {
        QuadSpec::default().with_rel_tol(1e-12).with_abs_tol(1e-15)
    }

    #[test]
    fn constant_integrand() {
        let r = integrate_1d(|_| 1.0, 0.0, 1.0, &spec()).unwrap();
        assert!((r.value - 1.0).abs() < 1e-14);
        assert!(r.converged);
    }

    #[test]
    fn endpoint_log() {
        let r = integrate_1d(|x: f64| x.ln(), 0.0, 1.0, &spec()).unwrap();
        assert!((r.value + 1.0).abs() < 1e-9, "{}", r.value);
        let r = integrate_1d_clustered(|x: f64| x.ln(), 0.0, 1.0, &spec()).unwrap();
        assert!((r.value + 1.0).abs() < 1e-12, "{}", r.value);
        assert!(r.converged);
    }

    #[test]
    fn clustered_needs_fewer_splits_for_log() {
        let plain = integrate_1d(|x: f64| x.ln() * (1.0 - x).ln(), 0.0, 1.0, &spec()).unwrap();
        let clus = integrate_1d_clustered(|x: f64| x.ln() * (1.0 - x).ln(), 0.0, 1.0, &spec()).unwrap();
        let exact = 2.0 - std::f64::consts::PI.powi(2) / 6.0;
        assert!((clus.value - exact).abs() < 1e-12);
        assert!(clus.subdivisions_used < plain.subdivisions_used);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let tight = QuadSpec {
            max_subdivisions: 1,
            ..spec()
        };
        let r = integrate_1d(|x: f64| (50.0 * x).sin() / x.sqrt(), 0.0, 3.0, &tight).unwrap();
        assert!(!r.converged);
    }

    #[test]
    fn bad_interval_and_nan() {
        assert!(integrate_1d(|_| 1.0, 1.0, 0.0, &spec()).is_err());
        assert!(matches!(
            integrate_1d(|_| f64::NAN, 0.0, 1.0, &spec()),
            Err(QuadError::NonFinite { .. })
        ));
        assert_eq!(integrate_1d(|_| 1.0, 2.0, 2.0, &spec()).unwrap().value, 0.0);
    }

    #[test]
    fn complex_integrand() {
        let r = integrate_1d(|x: f64| Complex64::new(x.cos(), x.sin()), 0.0, 1.0, &spec()).unwrap();
        let exact = Complex64::new(1.0_f64.sin(), 1.0 - 1.0_f64.cos());
        assert!((r.value - exact).norm() < 1e-14);
    }

    #[test]
    fn pieces_with_step() {
        let r = integrate_pieces(|x: f64| if x < 0.3 { 1.0 } else { 2.0 }, 0.0, 1.0, &[0.3], &spec(), false).unwrap();
        assert!((r.value - 1.7).abs() < 1e-14);
    }

    #[test]
    fn split_2d_unit_square() {
        let r = integrate_2d_split(|_, _| 1.0, Rect { x: (0.0, 1.0), y: (0.0, 1.0) }, &[SplitCurve::X(0.5)], &spec())
            .unwrap();
        assert!((r.value - 1.0).abs() < 1e-13);
    }

    #[test]
    fn split_2d_step_along_line() {
        // f = step(x - 0.6) * (1 + y^2) split at x = 0.6
        let f = |x: f64, y: f64| if x > 0.6 { 1.0 + y * y } else { 0.0 };
        let r = integrate_2d_split(f, Rect { x: (0.0, 1.0), y: (0.0, 1.0) }, &[SplitCurve::X(0.6)], &spec()).unwrap();
        assert!((r.value - 0.4 * (4.0 / 3.0)).abs() < 1e-12);
    }

    #[test]
    fn split_2d_curved_cell() {
        // indicator of y < x^2 on the unit square: area 1/3
        let f = |x: f64, y: f64| if y < x * x { 1.0 } else { 0.0 };
        let curves = [SplitCurve::Y(Box::new(|x: f64| x * x))];
        let r = integrate_2d_split(f, Rect { x: (0.0, 1.0), y: (0.0, 1.0) }, &curves, &spec()).unwrap();
        assert!((r.value - 1.0 / 3.0).abs() < 1e-11, "{}", r.value);
    }

    #[test]
    fn pv_examples() {
        let r = principal_value(|_| 1.0, 0.0, -1.0, 1.0, &spec()).unwrap();
        assert!(r.value.abs() < 1e-12);
        let r = principal_value(|_| 1.0, 1.0, 0.0, 2.0, &spec()).unwrap();
        assert!(r.value.abs() < 1e-12);
        let r = principal_value(|x| x, 1.0, 0.0, 2.0, &spec()).unwrap();
        assert!((r.value - 2.0).abs() < 1e-10);
        // asymmetric interval with a narrow window: PV ∫_0^3 dx/(x-1) = ln 2
        let narrow = QuadSpec { pv_window: 0.1, ..spec() };
        let r = principal_value(|_| 1.0, 1.0, 0.0, 3.0, &narrow).unwrap();
        assert!((r.value - 2f64.ln()).abs() < 1e-11);
    }

    #[test]
    fn resonant_matches_pv_and_delta() {
        // g = x on [0, 2], x0 = 1: ∫ x/(1 - x + i0) = -PV∫ x/(x-1) - i pi g(1)
        let r = resonant_integral(|x| x, 1.0, 0.0, 0.0, 2.0, &spec()).unwrap();
        assert!((r.value.re + 2.0).abs() < 1e-10);
        assert!((r.value.im + std::f64::consts::PI).abs() < 1e-12);
        // finite eta against direct integration
        let eta = 0.05;
        let direct = integrate_pieces(
            |x: f64| Complex64::new(x * x, 0.0) / Complex64::new(0.7 - x, eta),
            0.0,
            2.0,
            &[0.7],
            &spec(),
            false,
        )
        .unwrap();
        let r = resonant_integral(|x| x * x, 0.7, eta, 0.0, 2.0, &spec()).unwrap();
        assert!((r.value - direct.value).norm() < 1e-10);
    }

    #[test]
    fn extrapolation_exact_for_polynomials() {
        let lin: Vec<_> = [0.4, 0.2, 0.1]
            .iter()
            .map(|&e| (e, Complex64::new(3.0 - 2.0 * e, 1.0 + e)))
            .collect();
        let r = extrapolate_eta(&lin, 1).unwrap();
        assert!((r.value - Complex64::new(3.0, 1.0)).norm() < 1e-13);
        let quad: Vec<_> = [0.4, 0.2, 0.1]
            .iter()
            .map(|&e| (e, Complex64::new(1.0 + e + 5.0 * e * e, -e * e)))
            .collect();
        let r = extrapolate_eta(&quad, 2).unwrap();
        assert!((r.value - Complex64::new(1.0, 0.0)).norm() < 1e-13);
        assert!(extrapolate_eta(&quad[..1], 0).is_err());
        assert!(extrapolate_eta(&[(0.1, quad[0].1), (0.1, quad[1].1)], 1).is_err());
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(7);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(12)).sum();
        assert!((s - 2.0 / 13.0).abs() < 1e-14);
        let (x, w) = gauss_legendre(200);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.cos()).sum();
        assert!((s - 2.0 * 1f64.sin()).abs() < 1e-13);
    }

    struct Case {
        f: fn(f64) -> f64,
        a: f64,
        b: f64,
        exact: f64,
    }

    fn catalog() -> Vec<Case> {
        use std::f64::consts::PI;
        vec![
            Case { f: |x| x.exp(), a: 0.0, b: 1.0, exact: 1f64.exp() - 1.0 },
            Case { f: |x| x.ln(), a: 0.0, b: 1.0, exact: -1.0 },
            Case { f: |x| 1.0 / x.sqrt(), a: 0.0, b: 1.0, exact: 2.0 },
            Case { f: |x| 1.0 / (1.0 + x * x), a: -5.0, b: 5.0, exact: 2.0 * 5f64.atan() },
            Case { f: |x| (10.0 * x).sin(), a: 0.0, b: PI, exact: 0.0 },
            Case { f: |x| x * x.ln(), a: 0.0, b: 2.0, exact: 2.0 * 2f64.ln() - 1.0 },
            Case { f: |x| (x - 0.3).abs(), a: 0.0, b: 1.0, exact: 0.045 + 0.245 },
            Case { f: |x| 1.0 / (1e-2 + (x - 0.5).powi(2)), a: 0.0, b: 1.0, exact: 20.0 * 5f64.atan() },
            Case { f: |x| x.powf(0.25), a: 0.0, b: 1.0, exact: 0.8 },
            Case { f: |x| (x * x).cos() * (1.0 - x).ln(), a: 0.0, b: 1.0, exact: -0.784428954538760 },
        ]
    }

    #[test]
    fn error_estimates_are_conservative() {
        let mut honest = 0;
        let mut total = 0;
        for tol in [1e-4, 1e-6, 1e-8] {
            for c in catalog() {
                let s = QuadSpec::default().with_rel_tol(tol).with_abs_tol(tol * 1e-3);
                let r = integrate_1d(c.f, c.a, c.b, &s).unwrap();
                let true_err = (r.value - c.exact).abs();
                total += 1;
                if r.err_estimate >= true_err {
                    honest += 1;
                }
            }
        }
        assert!(honest as f64 >= 0.95 * total as f64, "{honest}/{total}");
    }

    #[test]
    fn refinement_does_not_increase_error() {
        for c in catalog() {
            let mut last = f64::INFINITY;
            for tol in [1e-4, 5e-5, 2.5e-5, 1.25e-5] {
                let s = QuadSpec::default().with_rel_tol(tol).with_abs_tol(0.0);
                let r = integrate_1d(c.f, c.a, c.b, &s).unwrap();
                let e = (r.value - c.exact).abs();
                assert!(e <= last.max(1e-13), "regression at tol {tol}: {e} > {last}");
                last = e;
            }
        }
    }
}
