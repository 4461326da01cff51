//! Covariance matrices of a type-II OPO below threshold.
//!
//! In the `A±` basis the ideal OPO emits two independent squeezed vacua:
//! `A+` squeezed on `P`, `A-` squeezed on `X`, with
//! `V_sq = 1 - 4σ/((1+σ)² + Ω²)` and `V_anti = 1 + 4σ/((1-σ)² + Ω²)`.
//! At `Ω = 0` these form a minimum-uncertainty pair.

use crate::error::{Error, Result};
use crate::gaussian::{CovarianceMatrix, LossModel, ModeBasis, INPUT_PHYSICALITY_TOL};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpoParams<T> {
    /// Pump amplitude over threshold, `0 ≤ σ < 1`.
    pub sigma: T,
    /// Analysis frequency over cavity bandwidth.
    pub omega: T,
    /// Overall detection efficiency.
    pub eta: T,
}

impl<T: Scalar> OpoParams<T> {
    pub fn new(sigma: T, omega: T, eta: T) -> Result<Self> {
        if !(sigma >= T::zero() && sigma < T::one()) {
            return Err(Error::OutOfRange(format!(
                "sigma = {sigma} must lie in [0, 1)"
            )));
        }
        if !(omega >= T::zero() && omega.is_finite()) {
            return Err(Error::OutOfRange(format!("omega = {omega} must be ≥ 0")));
        }
        if !(eta >= T::zero() && eta <= T::one()) {
            return Err(Error::OutOfRange(format!("eta = {eta} must lie in [0, 1]")));
        }
        Ok(Self { sigma, omega, eta })
    }

    pub fn squeezed_variance(&self) -> T {
        squeezed_variance(self.sigma, self.omega)
    }

    pub fn antisqueezed_variance(&self) -> T {
        antisqueezed_variance(self.sigma, self.omega)
    }
}

pub fn squeezed_variance<T: Scalar>(sigma: T, omega: T) -> T {
    let four = T::lit(4.0);
    T::one() - four * sigma / ((T::one() + sigma).powi(2) + omega * omega)
}

pub fn antisqueezed_variance<T: Scalar>(sigma: T, omega: T) -> T {
    let four = T::lit(4.0);
    T::one() + four * sigma / ((T::one() - sigma).powi(2) + omega * omega)
}

/// Ideal below-threshold state in the `A±` basis, then symmetric losses `η`.
pub fn below_threshold_covariance<T: Scalar>(p: &OpoParams<T>) -> Result<CovarianceMatrix<T>> {
    let (sq, anti) = (p.squeezed_variance(), p.antisqueezed_variance());
    let z = T::zero();
    let ideal = CovarianceMatrix::from_blocks(
        [[anti, z], [z, sq]],
        [[sq, z], [z, anti]],
        [[z, z], [z, z]],
        ModeBasis::PlusMinus,
    )?;
    Ok(ideal.with_losses(&LossModel::symmetric(p.eta)?))
}

/// Self-phase-locked OPO, parametrised by the tilt `θ` of the `A-` noise
/// ellipse and its principal variances `v₁ ≤ v₂`. `v₁v₂` may undershoot 1
/// by [`INPUT_PHYSICALITY_TOL`] to admit rounded reference values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoupledStateParams<T> {
    pub base: OpoParams<T>,
    pub tilt: T,
    pub v_minus: (T, T),
}

impl<T: Scalar> CoupledStateParams<T> {
    pub fn new(base: OpoParams<T>, tilt: T, v_minus: (T, T)) -> Result<Self> {
        let (v1, v2) = v_minus;
        if !(v1 > T::zero() && v1 <= v2) {
            return Err(Error::OutOfRange(format!(
                "A- variances must satisfy 0 < v1 ≤ v2, got ({v1}, {v2})"
            )));
        }
        if v1 * v2 < T::one() - T::tol(INPUT_PHYSICALITY_TOL) {
            return Err(Error::UnphysicalBlock((v1 * v2).as_f64()));
        }
        Ok(Self {
            base,
            tilt,
            v_minus,
        })
    }

    /// The uncoupled limit: zero tilt, `(V_sq, V_anti)`.
    pub fn uncoupled(base: OpoParams<T>) -> Self {
        Self {
            base,
            tilt: T::zero(),
            v_minus: (base.squeezed_variance(), base.antisqueezed_variance()),
        }
    }
}

/// `A+` block as below threshold, `A-` block `R(θ) diag(v₁, v₂) R(θ)ᵀ`,
/// no `A+`/`A-` correlations; losses `η` applied last.
pub fn coupled_covariance<T: Scalar>(p: &CoupledStateParams<T>) -> Result<CovarianceMatrix<T>> {
    let (v1, v2) = p.v_minus;
    if v1 * v2 < T::one() - T::tol(INPUT_PHYSICALITY_TOL) {
        return Err(Error::UnphysicalBlock((v1 * v2).as_f64()));
    }
    let (sq, anti) = (p.base.squeezed_variance(), p.base.antisqueezed_variance());
    let (s, c) = p.tilt.sin_cos();
    let off = c * s * (v1 - v2);
    let z = T::zero();
    let ideal = CovarianceMatrix::from_blocks(
        [[anti, z], [z, sq]],
        [
            [c * c * v1 + s * s * v2, off],
            [off, s * s * v1 + c * c * v2],
        ],
        [[z, z], [z, z]],
        ModeBasis::PlusMinus,
    )?;
    Ok(ideal.with_losses(&LossModel::symmetric(p.base.eta)?))
}

/// Toy intensity-difference noise spectrum `S(ω) = 1 - η/(1 + ω²)` in
/// shot-noise units.
pub fn twin_difference_spectrum<T: Scalar>(omega: T, eta: T) -> Result<T> {
    if !(omega >= T::zero()) {
        return Err(Error::OutOfRange(format!("omega = {omega} must be ≥ 0")));
    }
    if !(eta >= T::zero() && eta <= T::one()) {
        return Err(Error::OutOfRange(format!("eta = {eta} must lie in [0, 1]")));
    }
    if omega.is_infinite() {
        return Ok(T::one());
    }
    Ok(T::one() - eta / (T::one() + omega * omega))
}
