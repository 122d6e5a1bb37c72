use tdlhf_core::oracle::{a_oracle, b_oracle, c_oracle, chi_s_ksum, ratio_oracle, OracleSpec, RatioMesh};
use tdlhf_core::response::{chi_s, ratio_vx_vs, RatioTable};
use tdlhf_core::special::{a_of_q, b_of_qk, c_of_k, BArgs};
use tdlhf_core::{HegParams, QuadSpec};

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

pub const A_PANEL: [f64; 8] = [0.05, 0.3, 0.6, 0.9, 1.2, 1.5, 1.8, 1.95];
pub const C_PANEL: [f64; 8] = [0.0, 0.25, 0.5, 0.9, 1.1, 1.5, 2.0, 3.0];
pub const B_Q: [f64; 5] = [0.2, 0.6, 1.0, 1.4, 1.8];
pub const B_K: [f64; 5] = [0.1, 0.3, 0.5, 0.7, 0.9];
pub const B_Y: [f64; 3] = [-0.7, 0.0, 0.7];

#[test]
fn a_matches_oracle_panel() {
    let p = HegParams::from_rs(2.0).unwrap();
    for x in A_PANEL {
        let q = x * p.k_f;
        let o = a_oracle(&p, q, &OracleSpec::default()).unwrap();
        assert!(rel(a_of_q(&p, q), o) < 1e-3, "q/kF = {x}");
    }
}

#[test]
fn c_matches_oracle_panel() {
    let p = HegParams::from_rs(2.0).unwrap();
    for x in C_PANEL {
        let k = x * p.k_f;
        let o = c_oracle(&p, k, &OracleSpec::default()).unwrap();
        assert!(rel(c_of_k(&p, k), o) < 1e-3, "k/kF = {x}");
    }
}

#[test]
fn b_matches_oracle_lattice() {
    let p = HegParams::from_rs(2.0).unwrap();
    let spec = OracleSpec { angular_nodes: 200, ..OracleSpec::default() };
    let quad = QuadSpec::default();
    for qx in B_Q {
        for kx in B_K {
            for y in B_Y {
                let (q, k) = (qx * p.k_f, kx * p.k_f);
                let fast = b_of_qk(&p, BArgs::new(q, k, y).unwrap(), &quad).unwrap();
                let slow = b_oracle(&p, q, k, y, &spec).unwrap();
                assert!(rel(fast, slow) < 1e-3, "q/kF = {qx}, k/kF = {kx}, y = {y}: {fast} vs {slow}");
            }
        }
    }
}

/// Largest error over `n..n + 8` nodes; midpoint sums of step functions
/// converge with an oscillating error, so the envelope is what shrinks.
fn envelope(n: usize, err: impl Fn(usize) -> f64) -> f64 {
    (n..n + 8).map(err).fold(0.0, f64::max)
}

#[test]
fn oracles_converge_under_refinement() {
    let p = HegParams::from_rs(2.0).unwrap();
    let q = 0.6 * p.k_f;
    let a = a_of_q(&p, q);
    let a_err = |n| rel(a_oracle(&p, q, &OracleSpec { radial_nodes: n, ..OracleSpec::default() }).unwrap(), a);
    let (e1, e2, e3) = (envelope(25, a_err), envelope(100, a_err), envelope(400, a_err));
    assert!((e1 / e2).log(4.0) >= 1.0 && (e2 / e3).log(4.0) >= 1.0, "{e1} {e2} {e3}");

    let (k, y) = (0.5 * p.k_f, 0.3);
    let b = b_of_qk(&p, BArgs::new(q, k, y).unwrap(), &QuadSpec::default().with_rel_tol(1e-10)).unwrap();
    let b_err = |n| rel(b_oracle(&p, q, k, y, &OracleSpec { angular_nodes: n, ..OracleSpec::default() }).unwrap(), b);
    let (f1, f2, f3) = (envelope(8, b_err), envelope(32, b_err), envelope(128, b_err));
    assert!((f1 / f2).log(4.0) >= 1.0 && (f2 / f3).log(4.0) >= 1.0, "{f1} {f2} {f3}");
}

#[test]
fn lindhard_matches_k_sum() {
    let p = HegParams::from_rs(2.0).unwrap();
    let spec = OracleSpec { radial_nodes: 20000, angular_nodes: 2000, ..OracleSpec::default() };
    let eta = spec.eta_over_epsf * p.eps_f;
    for (qx, wx) in [(0.5, 0.8), (1.5, 2.0), (0.5, 0.0)] {
        let (q, w) = (qx * p.k_f, wx * p.eps_f);
        let exact = chi_s(&p, q, w, eta).unwrap();
        let sum = chi_s_ksum(&p, q, w, &spec).unwrap();
        assert!((sum - exact).norm() / exact.norm() < 1e-3, "({qx}, {wx})");
    }
}

#[test]
fn ratio_matches_riemann_oracle() {
    let p = HegParams::from_rs(5.0).unwrap();
    let (q, w, eta) = (0.5 * p.k_f, 0.8 * p.eps_f, 1e-3 * p.eps_f);
    let quad = QuadSpec::default();
    let fast = ratio_vx_vs(&p, q, w, eta, &quad).unwrap();
    let slow = ratio_oracle(&p, q, w, eta, RatioMesh::default(), &quad.clone().with_rel_tol(1e-6)).unwrap();
    assert!((fast - slow).norm() / slow.norm() < 1e-3);
}

#[test]
fn ratio_two_path_panel() {
    // Coarser mesh and broader eta than the single-point check keep the 3x3
    // panel affordable; the Riemann sum is second order in the mesh.
    let p = HegParams::from_rs(2.0).unwrap();
    let quad = QuadSpec::default();
    let oracle_quad = quad.clone().with_rel_tol(1e-6);
    let mesh = RatioMesh { k_nodes: 1200, y_nodes: 600 };
    let eta = 2e-2 * p.eps_f;
    for qx in [0.5, 1.0, 1.5] {
        let q = qx * p.k_f;
        let table = RatioTable::build(&p, q, &quad).unwrap();
        for wx in [0.4, 1.2, 2.5] {
            let w = wx * p.eps_f;
            let fast = table.ratio(w, eta, &quad).unwrap();
            let slow = ratio_oracle(&p, q, w, eta, mesh, &oracle_quad).unwrap();
            let chi = chi_s(&p, q, w, eta).unwrap();
            let (fx_fast, fx_slow) = (fast / chi, slow / chi);
            assert!((fx_fast - fx_slow).norm() / fx_slow.norm() < 1e-3, "q/kF = {qx}, w/epsF = {wx}");
        }
    }
}
