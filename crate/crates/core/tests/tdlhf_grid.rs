use num_complex::Complex64;
use tdlhf_core::grid::{
    absorption_spectrum, density, hartree_potential, propagate, scf_ground_state, solve_vx, Envelope, ExternalField,
    GaugeRule, Grid1D, Interaction, OrbitalSet, PropagateOptions, Scheme, ScfOptions,
};
use tdlhf_core::oracle::tdhf::{hf_n2_ground_state, tdhf_n2};

fn soft_well(grid: &Grid1D, depth: f64) -> Vec<f64> {
    (0..grid.n_points).map(|i| -depth / (grid.x(i).powi(2) + 1.0).sqrt()).collect()
}

fn two_electron_setup() -> (Grid1D, Interaction, Vec<f64>) {
    let g = Grid1D::new(-20.0, 20.0, 400).unwrap();
    let v0 = soft_well(&g, 2.0);
    (g, Interaction::default(), v0)
}

fn max_abs(v: impl Iterator<Item = f64>) -> f64 {
    v.fold(0.0f64, |m, x| m.max(x.abs()))
}

#[test]
fn one_electron_exchange_cancels_hartree() {
    let g = Grid1D::new(-20.0, 20.0, 400).unwrap();
    let w = Interaction::default();
    let gs = scf_ground_state(&g, &w, &soft_well(&g, 1.0), 1, &ScfOptions::default()).unwrap();
    assert!(max_abs(gs.v_h.iter().zip(&gs.v_x).map(|(h, x)| h + x)) <= 1e-8);
}

#[test]
fn two_electron_exchange_is_half_hartree() {
    let (g, w, v0) = two_electron_setup();
    let gs = scf_ground_state(&g, &w, &v0, 2, &ScfOptions::default()).unwrap();
    let d: Vec<f64> = gs.v_x.iter().zip(&gs.v_h).map(|(x, h)| x + 0.5 * h).collect();
    let inner = &d[20..380];
    let mean = inner.iter().sum::<f64>() / inner.len() as f64;
    assert!(max_abs(inner.iter().map(|v| v - mean)) <= 1e-6);
    assert!(gs.orbitals.orthonormality_error(&g) < 1e-10);
}

#[test]
fn two_electron_energy_matches_hartree_fock() {
    let (g, w, v0) = two_electron_setup();
    let lhf = scf_ground_state(&g, &w, &v0, 2, &ScfOptions::default()).unwrap();
    let hf = hf_n2_ground_state(&g, &w, &v0, 0.5, 1e-11, 500).unwrap();
    assert!(((lhf.energy - hf.energy) / hf.energy).abs() < 1e-6, "{} vs {}", lhf.energy, hf.energy);
}

#[test]
fn static_potential_is_the_localized_hf_one() {
    // Four electrons: the time-independent solve from the ground-state orbitals
    // reproduces the self-consistent exchange potential.
    let g = Grid1D::new(-15.0, 15.0, 181).unwrap();
    let w = Interaction::default();
    let gs = scf_ground_state(&g, &w, &soft_well(&g, 4.0), 4, &ScfOptions::default()).unwrap();
    let again = solve_vx(&g, &gs.orbitals, &w, GaugeRule::Asymptotic).unwrap();
    assert!(max_abs(again.v_x.iter().zip(&gs.v_x).map(|(a, b)| a - b)) < 1e-9);
    assert!(again.residual < 1e-10);
}

fn kicked(v0: Vec<f64>) -> ExternalField {
    ExternalField { v0, e0: 0.01, omega: 0.0, envelope: Envelope::Kick }
}

#[test]
fn kicked_dipole_matches_tdhf() {
    let (g, w, v0) = two_electron_setup();
    let gs = scf_ground_state(&g, &w, &v0, 2, &ScfOptions::default()).unwrap();
    let field = kicked(v0.clone());
    let opts = PropagateOptions { dt: 0.01, n_steps: 1000, ..PropagateOptions::default() };
    let lhf = propagate(&g, &gs.orbitals, &field, &w, &opts).unwrap();
    let hf0 = hf_n2_ground_state(&g, &w, &v0, 0.5, 1e-11, 500).unwrap();
    let hf = tdhf_n2(&g, &w, &hf0.orbitals, &field, 0.01, 1000).unwrap();
    let scale = max_abs(hf.iter().map(|(_, d)| d - hf[0].1));
    let worst = max_abs(lhf.dipole.iter().zip(&hf).map(|(a, (_, b))| a - b));
    assert!(scale > 1e-3);
    assert!(worst / scale < 1e-4, "{}", worst / scale);
    assert!(lhf.max_norm_change < 1e-10);

    // Peaks of the kick spectra coincide.
    let omegas: Vec<f64> = (1..400).map(|k| k as f64 * 0.005).collect();
    let peak = |t: &[f64], d: &[f64]| {
        absorption_spectrum(t, d, 0.1, &omegas)
            .into_iter()
            .fold((0.0, 0.0f64), |m, (w, s)| if s.abs() > m.1 { (w, s.abs()) } else { m })
            .0
    };
    let (ht, hd): (Vec<f64>, Vec<f64>) = hf.into_iter().unzip();
    assert!((peak(&lhf.times, &lhf.dipole) - peak(&ht, &hd)).abs() <= 0.005);
}

#[test]
fn dipole_ignores_constant_exchange_shift() {
    let g = Grid1D::new(-15.0, 15.0, 200).unwrap();
    let w = Interaction::default();
    let v0 = soft_well(&g, 4.0);
    let gs = scf_ground_state(&g, &w, &v0, 4, &ScfOptions::default()).unwrap();
    let base = PropagateOptions { n_steps: 300, ..PropagateOptions::default() };
    let a = propagate(&g, &gs.orbitals, &kicked(v0.clone()), &w, &base).unwrap();
    for shift in [-1.0, 0.25, 7.5] {
        let b = propagate(&g, &gs.orbitals, &kicked(v0.clone()), &w, &PropagateOptions { vx_shift: shift, ..base.clone() })
            .unwrap();
        assert!(max_abs(a.dipole.iter().zip(&b.dipole).map(|(x, y)| x - y)) < 1e-10);
    }
    // The boundary-zero gauge is a constant shift of the asymptotic one.
    let c = propagate(&g, &gs.orbitals, &kicked(v0), &w, &PropagateOptions { gauge: GaugeRule::BoundaryZero, ..base })
        .unwrap();
    assert!(max_abs(a.dipole.iter().zip(&c.dipole).map(|(x, y)| x - y)) < 1e-8);
}

#[test]
fn static_run_keeps_potential() {
    let g = Grid1D::new(-15.0, 15.0, 181).unwrap();
    let w = Interaction::default();
    let v0 = soft_well(&g, 4.0);
    let gs = scf_ground_state(&g, &w, &v0, 4, &ScfOptions::default()).unwrap();
    let opts = PropagateOptions { dt: 0.05, n_steps: 200, ..PropagateOptions::default() };
    let traj = propagate(&g, &gs.orbitals, &ExternalField::static_only(v0), &w, &opts).unwrap();
    let later = solve_vx(&g, &traj.final_state, &w, GaugeRule::Asymptotic).unwrap();
    assert!(max_abs(later.v_x.iter().zip(&gs.v_x).map(|(a, b)| a - b)) < 1e-8);
    for (psi0, psi) in gs.orbitals.orbitals.iter().zip(&traj.final_state.orbitals) {
        assert!((g.inner(psi0, psi).norm() - 1.0).abs() < 1e-8);
    }
    assert!(traj.norm.iter().all(|n| (n - 4.0).abs() < 1e-9));
}

#[test]
fn euler_converges_toward_crank_nicolson() {
    let g = Grid1D::new(-10.0, 10.0, 101).unwrap();
    let w = Interaction::default();
    let v0 = soft_well(&g, 2.0);
    let gs = scf_ground_state(&g, &w, &v0, 2, &ScfOptions::default()).unwrap();
    let field = kicked(v0);
    let t_end = 0.5;
    let run = |scheme, dt: f64| {
        let n_steps = (t_end / dt).round() as usize;
        let opts = PropagateOptions { dt, n_steps, scheme, norm_tol: Some(1e-2), ..PropagateOptions::default() };
        *propagate(&g, &gs.orbitals, &field, &w, &opts).unwrap().dipole.last().unwrap()
    };
    let reference = run(Scheme::Cn, 1e-4);
    let e1 = (run(Scheme::Euler, 4e-4) - reference).abs();
    let e2 = (run(Scheme::Euler, 2e-4) - reference).abs();
    let order = (e1 / e2).log2();
    // The pair estimate approaches 1 from below as dt shrinks.
    assert!(order >= 0.99, "observed order {order}");
}

#[test]
fn strong_drive_conserves_charge() {
    let (g, w, v0) = two_electron_setup();
    let gs = scf_ground_state(&g, &w, &v0, 2, &ScfOptions::default()).unwrap();
    let field = ExternalField { v0, e0: 0.05, omega: 0.4, envelope: Envelope::Sin2 { duration: 5.0 } };
    let traj = propagate(&g, &gs.orbitals, &field, &w, &PropagateOptions { n_steps: 500, ..Default::default() }).unwrap();
    assert!(traj.norm.iter().all(|n| (n - 2.0).abs() < 1e-9));
    assert!(traj.max_norm_change < 1e-10);
}

#[test]
fn hartree_of_narrow_peak() {
    let g = Grid1D::new(-10.0, 10.0, 201).unwrap();
    let mut n = vec![0.0; g.n_points];
    n[120] = 2.0 / g.dx;
    let vh = hartree_potential(&g, &n, &Interaction::default());
    for i in 0..g.n_points {
        let d = g.x(i) - g.x(120);
        assert!((vh[i] - 2.0 / (d * d + 1.0).sqrt()).abs() < 1e-12);
    }
    let orbs = OrbitalSet::new(vec![vec![Complex64::new(0.0, 0.0); 201]], vec![2], 0.0).unwrap();
    assert!(density(&orbs).iter().all(|v| *v == 0.0));
}

#[test]
fn every_gauge_converges_to_the_same_ground_state() {
    let (g, w, v0) = two_electron_setup();
    let energies: Vec<f64> = [GaugeRule::Asymptotic, GaugeRule::BoundaryZero, GaugeRule::Free]
        .into_iter()
        .map(|gauge| scf_ground_state(&g, &w, &v0, 2, &ScfOptions { gauge, ..ScfOptions::default() }).unwrap().energy)
        .collect();
    assert!(energies.iter().all(|e| ((e - energies[0]) / energies[0]).abs() < 1e-10), "{energies:?}");
}
