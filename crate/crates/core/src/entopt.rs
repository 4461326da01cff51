//! Entanglement extraction by passive polarisation optics.
//!
//! The self-phase-locked OPO produces uncorrelated `A±` modes whose squeezed
//! quadratures are not orthogonal. A phase shift of `A-` relative to `A+`
//! restores orthogonality and lifts `E_N` to the passive maximum.

use crate::criteria::{log_negativity, max_log_negativity};
use crate::error::Result;
use crate::gaussian::{CovarianceMatrix, Mode, ModeBasis, PassiveTransform};
use crate::linalg::symmetric_eigen2;
use crate::scalar::Scalar;
use crate::search::golden_section_max;

/// Grid resolution of the first pass over `[0, π)`.
pub const GRID_POINTS: usize = 721;
/// Width of the final golden-section bracket.
pub const PHASE_TOL: f64 = 1e-6;
/// Tolerance used when breaking ties toward the smallest angle.
pub const TIE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationOutcome<T> {
    pub best_phase: T,
    pub e_n_before: T,
    pub e_n_after: T,
    pub e_n_max: T,
    pub transform: PassiveTransform<T>,
    /// `(φ, raw E_N)` for every objective evaluation, grid first.
    pub trace: Vec<(T, T)>,
    /// Optimised state, `A±` basis.
    pub state_plus_minus: CovarianceMatrix<T>,
    /// Optimised state, `A1/A2` basis.
    pub state_signal_idler: CovarianceMatrix<T>,
}

impl<T: Scalar> OptimizationOutcome<T> {
    /// Shortfall from the passive bound; zero when a single relative phase
    /// reaches `E_N^max`.
    pub fn residual_gap(&self) -> T {
        (self.e_n_max - self.e_n_after).max(T::zero())
    }
}

fn phase_on_minus<T: Scalar>(phi: T) -> PassiveTransform<T> {
    PassiveTransform::PhaseShift {
        mode: Mode::B,
        angle: phi,
    }
}

/// Unclamped `-log₂ ξ` after shifting `A-` by `phi`.
pub fn log_negativity_after_phase<T: Scalar>(pm: &CovarianceMatrix<T>, phi: T) -> Result<T> {
    let shifted = pm.apply(&phase_on_minus(phi))?;
    Ok(log_negativity(&shifted)?.raw())
}

/// Maximises `E_N` over the `A-` phase: 721-point grid on `[0, π)`, then
/// golden-section refinement around the best grid point.
pub fn optimize_nonlocal_phase<T: Scalar>(
    g: &CovarianceMatrix<T>,
) -> Result<OptimizationOutcome<T>> {
    let pm = g.in_basis(ModeBasis::PlusMinus);
    let e_n_before = log_negativity(&pm)?.e_n;
    let e_n_max = max_log_negativity(&pm).e_n_max;

    let step = T::PI() / T::lit(GRID_POINTS as f64);
    let mut trace = Vec::with_capacity(GRID_POINTS + 64);
    for k in 0..GRID_POINTS {
        let phi = step * T::lit(k as f64);
        trace.push((phi, log_negativity_after_phase(&pm, phi)?));
    }
    let top = trace
        .iter()
        .map(|&(_, e)| e)
        .fold(T::neg_infinity(), T::max);
    let tie = T::tol(TIE_TOL);
    let k_best = trace.iter().position(|&(_, e)| e >= top - tie).unwrap_or(0);
    let (mut best_phase, mut best_value) = trace[k_best];

    // E_N is π-periodic in φ, so the bracket may run below zero.
    let center = best_phase;
    let mut failure = None;
    let (phi_ref, e_ref) = golden_section_max(
        |phi| match log_negativity_after_phase(&pm, phi) {
            Ok(e) => {
                trace.push((phi, e));
                e
            }
            Err(err) => {
                failure.get_or_insert(err);
                T::neg_infinity()
            }
        },
        center - step,
        center + step,
        T::lit(PHASE_TOL),
    );
    if let Some(err) = failure {
        return Err(err);
    }
    if e_ref > best_value + tie {
        best_phase = wrap_half_turn(phi_ref);
        best_value = e_ref;
    }

    let transform = phase_on_minus(best_phase);
    let state_plus_minus = pm.apply(&transform)?;
    let state_signal_idler = state_plus_minus.in_basis(ModeBasis::SignalIdler);
    Ok(OptimizationOutcome {
        best_phase,
        e_n_before,
        e_n_after: best_value.max(T::zero()),
        e_n_max,
        transform,
        trace,
        state_plus_minus,
        state_signal_idler,
    })
}

fn wrap_half_turn<T: Scalar>(mut phi: T) -> T {
    while phi < T::zero() {
        phi = phi + T::PI();
    }
    while phi >= T::PI() {
        phi = phi - T::PI();
    }
    phi
}

/// Phase on `A-` that diagonalises its 2×2 block with the squeezed
/// variance on `X`. Zero when the block is already diagonal.
pub fn diagonalizing_phase<T: Scalar>(g: &CovarianceMatrix<T>) -> T {
    let pm = g.in_basis(ModeBasis::PlusMinus);
    let b = pm.gamma_b();
    let scale = b[0][0].abs().max(b[1][1].abs()).max(T::one());
    if b[0][1].abs() <= T::tol(1e-12) * scale {
        return T::zero();
    }
    // Γ_B = R(θ) diag(λ_lo, λ_hi) R(θ)ᵀ and a phase shift φ acts as R(-φ).
    let (_, _, theta) = symmetric_eigen2(&b);
    theta
}

/// Half-wave plate at `alpha_half` followed by a quarter-wave plate at
/// `alpha_quarter`, both oriented relative to the crystal (signal/idler)
/// axes. The result is returned in the input's basis.
pub fn apply_waveplate_sequence<T: Scalar>(
    g: &CovarianceMatrix<T>,
    alpha_half: T,
    alpha_quarter: T,
) -> Result<CovarianceMatrix<T>> {
    let plates = PassiveTransform::Composite(vec![
        PassiveTransform::HalfWave(alpha_half),
        PassiveTransform::QuarterWave(alpha_quarter),
    ]);
    let out = g.in_basis(ModeBasis::SignalIdler).apply(&plates)?;
    Ok(out.in_basis(g.basis()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::opo::{below_threshold_covariance, OpoParams};

    fn pm_fixture() -> CovarianceMatrix<f64> {
        CovarianceMatrix::new(
            [
                [361.0, 0.0, 0.0, 0.0],
                [0.0, 0.00277, 0.0, 0.0],
                [0.0, 0.0, 1.383, -0.256],
                [0.0, 0.0, -0.256, 0.770],
            ],
            ModeBasis::PlusMinus,
        )
        .unwrap()
    }

    #[test]
    fn fixture_reaches_bound() {
        let out = optimize_nonlocal_phase(&pm_fixture()).unwrap();
        assert!((out.e_n_before - 4.06).abs() < 0.01);
        assert!((out.e_n_after - 4.53).abs() < 0.01);
        assert!((out.e_n_after - out.e_n_max).abs() < 1e-6);
        assert!(out.trace.len() > GRID_POINTS);
        let b = out.state_plus_minus.gamma_b();
        assert!(b[0][1].abs() < 1e-3);
    }

    #[test]
    fn standard_form_needs_no_phase() {
        let g = below_threshold_covariance(&OpoParams::new(0.8f64, 0.2, 0.9).unwrap()).unwrap();
        let out = optimize_nonlocal_phase(&g).unwrap();
        assert_eq!(out.best_phase, 0.0);
        assert!((out.e_n_after - out.e_n_before).abs() < 1e-12);
    }

    #[test]
    fn diagonalizing_phase_fixture() {
        let g = pm_fixture();
        let phi = diagonalizing_phase(&g);
        let out = g.apply(&phase_on_minus(phi)).unwrap();
        let b = out.gamma_b();
        assert!(b[0][1].abs() < 1e-9);
        assert!(b[0][0] < b[1][1]);
        assert!((b[0][0] - 0.677).abs() < 1e-2 && (b[1][1] - 1.476).abs() < 1e-2);
        let opt = optimize_nonlocal_phase(&g).unwrap();
        let e_diag = log_negativity(&out).unwrap().e_n;
        assert!((e_diag - opt.e_n_after).abs() < 1e-6);
    }

    #[test]
    fn diagonal_block_gives_zero() {
        let g = below_threshold_covariance(&OpoParams::new(0.5f64, 0.0, 1.0).unwrap()).unwrap();
        assert_eq!(diagonalizing_phase(&g), 0.0);
    }

    #[test]
    fn aligned_plates_keep_negativity() {
        let g = pm_fixture();
        let before = log_negativity(&g).unwrap().e_n;
        for (h, q) in [
            (0.0, 0.0),
            (std::f64::consts::FRAC_PI_2, 0.0),
            (0.0, std::f64::consts::FRAC_PI_2),
        ] {
            let out = apply_waveplate_sequence(&g, h, q).unwrap();
            assert_eq!(out.basis(), ModeBasis::PlusMinus);
            assert!((log_negativity(&out).unwrap().e_n - before).abs() < 1e-9);
            assert!((out.det() - g.det()).abs() < 1e-9);
        }
    }

    #[test]
    fn residual_gap_is_zero_on_fixture() {
        let out = optimize_nonlocal_phase(&pm_fixture()).unwrap();
        assert!(out.residual_gap() < 1e-6);
    }
}
