//! Correlation and entanglement criteria for signal/idler pairs.
//!
//! Everything here is about the `A1|A2` bipartition. Matrices tagged
//! [`ModeBasis::PlusMinus`] are converted first, so every result is
//! independent of which basis the caller stored the state in.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gaussian::{symplectic_pair, CovarianceMatrix, ModeBasis};
use crate::linalg::det2;
use crate::scalar::Scalar;

/// Relative tolerance for the standard-form and balance flags.
pub const FORM_TOL: f64 = 1e-9;

/// Noise `F` of each beam (shot-noise units) and their normalised
/// correlation coefficient `C12`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationStats<T> {
    pub fano: T,
    pub c12: T,
}

impl<T: Scalar> CorrelationStats<T> {
    pub fn new(fano: T, c12: T) -> Result<Self> {
        if !(fano > T::zero()) {
            return Err(Error::BadStats(format!("F must be positive, got {fano}")));
        }
        if !(c12.abs() <= T::one()) {
            return Err(Error::BadStats(format!("|C12| must be ≤ 1, got {c12}")));
        }
        Ok(Self { fano, c12 })
    }
}

/// `G = F(1 - |C12|)`
pub fn gemellity_from_stats<T: Scalar>(s: &CorrelationStats<T>) -> T {
    s.fano * (T::one() - s.c12.abs())
}

/// `V = F(1 - C12²)`
pub fn conditional_variance<T: Scalar>(s: &CorrelationStats<T>) -> T {
    s.fano * (T::one() - s.c12 * s.c12)
}

/// Conditional variance written through the gemellity: `V = 2G - G²/F`.
pub fn conditional_variance_from_gemellity<T: Scalar>(gemellity: T, fano: T) -> T {
    T::lit(2.0) * gemellity - gemellity * gemellity / fano
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quadrature {
    /// `½⟨(δX1 - δX2)²⟩`
    XDifference,
    /// `½⟨(δP1 + δP2)²⟩`
    PSum,
}

pub fn gemellity_from_covariance<T: Scalar>(g: &CovarianceMatrix<T>, q: Quadrature) -> T {
    let g = g.in_basis(ModeBasis::SignalIdler);
    let half = T::lit(0.5);
    match q {
        Quadrature::XDifference => (g.get(0, 0) + g.get(2, 2) - T::lit(2.0) * g.get(0, 2)) * half,
        Quadrature::PSum => (g.get(1, 1) + g.get(3, 3) + T::lit(2.0) * g.get(1, 3)) * half,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Separability<T> {
    pub value: T,
    /// The separability bound is necessary and sufficient only for states
    /// in standard form.
    pub standard_form: bool,
}

/// `𝓘 = ½(G_X + G_P)`
pub fn separability<T: Scalar>(g: &CovarianceMatrix<T>) -> Separability<T> {
    let si = g.in_basis(ModeBasis::SignalIdler);
    let value = (gemellity_from_covariance(&si, Quadrature::XDifference)
        + gemellity_from_covariance(&si, Quadrature::PSum))
        * T::lit(0.5);
    Separability {
        value,
        standard_form: si.is_standard_form(FORM_TOL),
    }
}

/// Entanglement of formation in ebits, `c₊log₂c₊ - c₋log₂c₋` with
/// `c± = (𝓘^{-1/2} ± 𝓘^{1/2})²/4`; zero for `𝓘 ≥ 1`.
pub fn eof<T: Scalar>(separability: T) -> Result<T> {
    if !(separability > T::zero()) {
        return Err(Error::NonPositiveSeparability(separability.as_f64()));
    }
    if separability >= T::one() {
        return Ok(T::zero());
    }
    let (root, inv_root) = (separability.sqrt(), separability.sqrt().recip());
    let quarter = T::lit(0.25);
    let c_plus = (inv_root + root).powi(2) * quarter;
    let c_minus = (inv_root - root).powi(2) * quarter;
    let x_log_x = |c: T| {
        if c > T::zero() {
            c * c.log2()
        } else {
            T::zero()
        }
    };
    Ok(x_log_x(c_plus) - x_log_x(c_minus))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EprProduct<T> {
    pub v_x: T,
    pub v_p: T,
    pub product: T,
}

/// `𝓥 = V_{X1|X2} · V_{P1|P2}` with `V_{X1|X2} = Γ11 - Γ13²/Γ33`.
pub fn epr_product<T: Scalar>(g: &CovarianceMatrix<T>) -> Result<EprProduct<T>> {
    let g = g.in_basis(ModeBasis::SignalIdler);
    for k in [2, 3] {
        if !(g.get(k, k) > T::zero()) {
            return Err(Error::DegenerateVariance(g.get(k, k).as_f64()));
        }
    }
    let v_x = g.get(0, 0) - g.get(0, 2).powi(2) / g.get(2, 2);
    let v_p = g.get(1, 1) - g.get(1, 3).powi(2) / g.get(3, 3);
    Ok(EprProduct {
        v_x,
        v_p,
        product: v_x * v_p,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogNegativity<T> {
    /// `max(0, -log₂ ξ)`
    pub e_n: T,
    /// Smallest symplectic eigenvalue of the partial transpose.
    pub xi: T,
}

impl<T: Scalar> LogNegativity<T> {
    pub fn raw(&self) -> T {
        -self.xi.log2()
    }
}

/// `ξ² = ½(D - √(D² - 4 det Γ))`, `D = det γ_A + det γ_B - 2 det σ_AB`.
pub fn log_negativity<T: Scalar>(g: &CovarianceMatrix<T>) -> Result<LogNegativity<T>> {
    let g = g.in_basis(ModeBasis::SignalIdler);
    let d = det2(&g.gamma_a()) + det2(&g.gamma_b()) - T::lit(2.0) * det2(&g.sigma_ab());
    let det = g.det();
    let disc = d * d - T::lit(4.0) * det;
    if disc < -T::tol(1e-9) * (d * d).max(T::one()) {
        return Err(Error::NumericalFailure(format!(
            "D² - 4 det Γ = {disc} is negative"
        )));
    }
    let (xi_sq, _) = symplectic_pair(d, det);
    if !(xi_sq > T::zero()) {
        return Err(Error::NumericalFailure(format!(
            "ξ² = {xi_sq} is not positive"
        )));
    }
    let xi = xi_sq.sqrt();
    Ok(LogNegativity {
        e_n: (-xi.log2()).max(T::zero()),
        xi,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MaxLogNegativity<T> {
    /// `max(0, raw)`
    pub e_n_max: T,
    /// `-log₂(λ₁λ₂)/2`
    pub raw: T,
    pub lambda1: T,
    pub lambda2: T,
}

/// Largest `E_N` reachable by passive operations, from the two smallest
/// ordinary eigenvalues of `Γ`. Basis independent: passive maps are
/// orthogonal.
pub fn max_log_negativity<T: Scalar>(g: &CovarianceMatrix<T>) -> MaxLogNegativity<T> {
    let ev = g.eigenvalues();
    let raw = -(ev[0] * ev[1]).log2() * T::lit(0.5);
    MaxLogNegativity {
        e_n_max: raw.max(T::zero()),
        raw,
        lambda1: ev[0],
        lambda2: ev[1],
    }
}

pub fn variance_to_db<T: Scalar>(variance: T) -> Result<T> {
    if !(variance > T::zero()) {
        return Err(Error::NonPositiveVariance(variance.as_f64()));
    }
    Ok(T::lit(10.0) * variance.log10())
}

pub fn db_to_variance<T: Scalar>(db: T) -> T {
    T::lit(10.0).powf(db / T::lit(10.0))
}

/// Symmetric standard-form state with noise `F` on every quadrature and the
/// given X-difference / P-sum gemellities: `Γ13 = F - G_X`, `Γ24 = G_P - F`.
pub fn symmetric_state<T: Scalar>(fano: T, g_x: T, g_p: T) -> Result<CovarianceMatrix<T>> {
    let (f, z) = (fano, T::zero());
    CovarianceMatrix::new(
        [
            [f, z, f - g_x, z],
            [z, f, z, g_p - f],
            [f - g_x, z, f, z],
            [z, g_p - f, z, f],
        ],
        ModeBasis::SignalIdler,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriteriaFlags {
    pub nonclassical_correlation: bool,
    pub qnd_correlated: bool,
    pub inseparable: bool,
    pub epr_correlated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriteriaReport<T> {
    pub gemellity_x: T,
    pub antigemellity_p: T,
    pub conditional_variance_x: T,
    pub conditional_variance_p: T,
    pub separability: T,
    pub eof_ebits: T,
    pub epr_product: T,
    pub log_negativity: T,
    pub xi: T,
    pub max_log_negativity: T,
    pub lambda1: T,
    pub lambda2: T,
    pub standard_form: bool,
    pub balanced: bool,
    /// `epr_correlated ⇒ inseparable` held.
    pub hierarchy_consistent: bool,
    pub flags: CriteriaFlags,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ClassifyOptions<T> {
    /// Measured beam noise `F`. When set, conditional variances come from
    /// `2G - G²/F` per quadrature instead of from the matrix entries.
    pub fano: Option<T>,
}

pub fn classify<T: Scalar>(g: &CovarianceMatrix<T>) -> Result<CriteriaReport<T>> {
    classify_with(g, ClassifyOptions::default())
}

pub fn classify_with<T: Scalar>(
    g: &CovarianceMatrix<T>,
    opts: ClassifyOptions<T>,
) -> Result<CriteriaReport<T>> {
    let si = g.in_basis(ModeBasis::SignalIdler);
    let g_x = gemellity_from_covariance(&si, Quadrature::XDifference);
    let g_p = gemellity_from_covariance(&si, Quadrature::PSum);
    let sep = separability(&si);
    let (v_x, v_p) = match opts.fano {
        Some(f) => (
            conditional_variance_from_gemellity(g_x, f),
            conditional_variance_from_gemellity(g_p, f),
        ),
        None => {
            let e = epr_product(&si)?;
            (e.v_x, e.v_p)
        }
    };
    let ln = log_negativity(&si)?;
    let mx = max_log_negativity(&si);
    let eof_ebits = if sep.value > T::zero() {
        eof(sep.value)?
    } else {
        T::zero()
    };
    let epr = v_x * v_p;
    let flags = CriteriaFlags {
        nonclassical_correlation: g_x.min(g_p) < T::one(),
        qnd_correlated: v_x.min(v_p) < T::one(),
        inseparable: ln.xi < T::one(),
        epr_correlated: epr < T::one(),
    };
    let scale = si
        .entries()
        .iter()
        .flatten()
        .fold(T::one(), |m, x| m.max(x.abs()));
    let t = T::tol(FORM_TOL) * scale;
    let balanced =
        (si.get(0, 0) - si.get(2, 2)).abs() <= t && (si.get(1, 1) - si.get(3, 3)).abs() <= t;
    Ok(CriteriaReport {
        gemellity_x: g_x,
        antigemellity_p: g_p,
        conditional_variance_x: v_x,
        conditional_variance_p: v_p,
        separability: sep.value,
        eof_ebits,
        epr_product: epr,
        log_negativity: ln.e_n,
        xi: ln.xi,
        max_log_negativity: mx.e_n_max,
        lambda1: mx.lambda1,
        lambda2: mx.lambda2,
        standard_form: sep.standard_form,
        balanced,
        hierarchy_consistent: !flags.epr_correlated || flags.inseparable,
        flags,
    })
}
