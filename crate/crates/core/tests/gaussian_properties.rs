#![allow(clippy::needless_range_loop)]

mod common;

use common::*;
use opo_cv::criteria::{
    classify, eof, log_negativity, max_log_negativity, separability, symmetric_state,
};
use opo_cv::gaussian::symplecticity_defect;
use opo_cv::linalg::{max_abs4, max_abs_diff4, symmetric_eigenvalues4};
use opo_cv::CovarianceMatrix;
use opo_cv::{LossModel, Mode, ModeBasis, PassiveTransform};
use rand::Rng;

const STATES: usize = 1000;

#[test]
fn basis_change_is_an_involution() {
    let mut rng = rng(1);
    for _ in 0..STATES {
        let (g, _) = random_physical_state(&mut rng);
        let back = g.change_basis_pm().change_basis_pm();
        assert_eq!(back.basis(), g.basis());
        let scale = max_abs4(g.entries());
        assert!(max_abs_diff4(back.entries(), g.entries()) <= 1e-12 * scale);
    }
}

#[test]
fn spectrum_recovers_construction() {
    let mut rng = rng(2);
    for _ in 0..STATES {
        let (g, (lo, hi)) = random_physical_state(&mut rng);
        let (a, b) = g.symplectic_eigenvalues();
        assert!(
            rel_diff(a, lo) < 1e-9 && rel_diff(b, hi) < 1e-9,
            "{a} {b} vs {lo} {hi}"
        );
        assert!(g.is_physical_within(1e-9).physical);
    }
}

#[test]
fn invariants_survive_passive_maps() {
    let mut rng = rng(3);
    for _ in 0..STATES {
        let (g, _) = random_physical_state(&mut rng);
        let det = g.det();
        let (lo, hi) = g.symplectic_eigenvalues();
        let t = random_passive(&mut rng);
        assert!(symplecticity_defect(&t.symplectic_matrix()) < 1e-10);
        for h in [g.apply(&t).unwrap(), g.change_basis_pm()] {
            assert!(rel_diff(h.det(), det) < 1e-9, "det {} vs {det}", h.det());
            let (a, b) = h.symplectic_eigenvalues();
            assert!(rel_diff(a, lo) < 1e-9 && rel_diff(b, hi) < 1e-9);
        }
    }
}

#[test]
fn every_named_transform_is_symplectic() {
    let mut rng = rng(4);
    for _ in 0..200 {
        let a: f64 = rng.gen_range(-10.0..10.0);
        for t in [
            PassiveTransform::BeamsplitterPm,
            PassiveTransform::PhaseShift {
                mode: Mode::A,
                angle: a,
            },
            PassiveTransform::PhaseShift {
                mode: Mode::B,
                angle: a,
            },
            PassiveTransform::PolarizationRotation(a),
            PassiveTransform::HalfWave(a),
            PassiveTransform::QuarterWave(a),
            random_passive(&mut rng),
        ] {
            assert!(symplecticity_defect(&t.symplectic_matrix()) < 1e-10);
        }
    }
}

#[test]
fn losses_keep_states_physical() {
    let mut rng = rng(5);
    for _ in 0..STATES {
        let (g, _) = random_physical_state(&mut rng);
        let loss = LossModel::new(rng.gen_range(0.0..=1.0), rng.gen_range(0.0..=1.0)).unwrap();
        let lossy = g.with_losses(&loss);
        assert!(lossy.is_physical_within(1e-9).physical);
        // Loss on A1 and A2 separately is a local channel: E_N cannot grow.
        let si = g.in_basis(ModeBasis::SignalIdler);
        let before = log_negativity(&si).unwrap().e_n;
        let after = log_negativity(&si.with_losses(&loss)).unwrap().e_n;
        assert!(after <= before + 1e-9);
    }
}

#[test]
fn log_negativity_matches_spectral_oracle() {
    // ξ is the smallest symplectic eigenvalue of the partial transpose
    // (P_B → -P_B); the oracle computes it from the spectrum of iJΓ̃.
    let mut rng = rng(6);
    for _ in 0..STATES {
        let (g, _) = random_physical_state(&mut rng);
        let si = g.in_basis(ModeBasis::SignalIdler);
        let mut pt = *si.entries();
        for k in 0..3 {
            pt[k][3] = -pt[k][3];
            pt[3][k] = -pt[3][k];
        }
        let oracle = opo_cv::linalg::symplectic_eigenvalues4(&pt).unwrap().0;
        let xi = log_negativity(&g).unwrap().xi;
        assert!(rel_diff(xi, oracle) < 1e-7, "{xi} vs {oracle}");
    }
}

#[test]
fn log_negativity_invariant_under_basis_and_global_rotation() {
    let mut rng = rng(7);
    for _ in 0..STATES {
        let (g, _) = random_physical_state(&mut rng);
        let e = log_negativity(&g).unwrap();
        let phi = rng.gen_range(0.0..std::f64::consts::TAU);
        let global = PassiveTransform::Composite(vec![
            PassiveTransform::PhaseShift {
                mode: Mode::A,
                angle: phi,
            },
            PassiveTransform::PhaseShift {
                mode: Mode::B,
                angle: phi,
            },
        ]);
        let rotated = g.in_basis(ModeBasis::SignalIdler).apply(&global).unwrap();
        for h in [g.change_basis_pm(), rotated] {
            let f = log_negativity(&h).unwrap();
            assert!((f.e_n - e.e_n).abs() < 1e-9);
            assert!(rel_diff(f.xi, e.xi) < 1e-9);
        }
    }
}

#[test]
fn passive_bound_dominates() {
    let mut rng = rng(8);
    for _ in 0..STATES {
        let (g, _) = random_physical_state(&mut rng);
        let bound = max_log_negativity(&g);
        assert!(bound.e_n_max + 1e-6 >= log_negativity(&g).unwrap().e_n);
        let moved = g.apply(&random_passive(&mut rng)).unwrap();
        assert!((max_log_negativity(&moved).e_n_max - bound.e_n_max).abs() < 1e-9);
        let ev = symmetric_eigenvalues4(g.entries());
        assert_eq!(bound.lambda1, ev[0]);
    }
}

#[test]
fn epr_implies_inseparable_on_standard_form() {
    let mut rng = rng(9);
    let mut epr = 0;
    for _ in 0..STATES {
        let g = random_standard_form(&mut rng, false);
        let r = classify(&g).unwrap();
        assert!(r.standard_form);
        if r.epr_product < 1.0 {
            epr += 1;
            assert!(r.xi < 1.0, "V = {} but ξ = {}", r.epr_product, r.xi);
        }
        assert!(r.hierarchy_consistent);
    }
    assert!(epr > 50, "only {epr} EPR-correlated samples");
}

#[test]
fn inseparable_implies_duan_on_symmetric_standard_form() {
    // Symmetric under both mode and quadrature exchange: Γ13 = -Γ24 ≥ 0.
    let mut rng = rng(10);
    for _ in 0..STATES {
        let f: f64 = rng.gen_range(1.0..50.0);
        let gem = rng.gen_range(f - (f * f - 1.0).sqrt() + 1e-9..f);
        let g = symmetric_state(f, gem, gem).unwrap();
        assert!(g.is_physical_within(1e-9).physical);
        let xi = log_negativity(&g).unwrap().xi;
        let i = separability(&g).value;
        if xi < 1.0 - 1e-12 {
            assert!(i < 1.0, "ξ = {xi} but I = {i}");
        }
    }
}

#[test]
fn eof_strictly_decreasing() {
    let mut prev = f64::INFINITY;
    for k in 1..1000 {
        let i = k as f64 / 1000.0;
        let e = eof(i).unwrap();
        assert!(e < prev && e > 0.0, "eof({i}) = {e}");
        prev = e;
    }
    assert_eq!(eof(1.0).unwrap(), 0.0);
    assert_eq!(eof(1.7).unwrap(), 0.0);
    assert!(eof(1.0 - 1e-6).unwrap() < 1e-4);
}

#[test]
fn vacuum_is_separable_in_both_bases() {
    for basis in [ModeBasis::SignalIdler, ModeBasis::PlusMinus] {
        let r = classify(&CovarianceMatrix::vacuum(basis)).unwrap();
        assert_eq!(r.log_negativity, 0.0);
        assert!((r.xi - 1.0).abs() < 1e-12);
        assert!((r.separability - 1.0).abs() < 1e-12);
        assert_eq!(r.eof_ebits, 0.0);
    }
}
