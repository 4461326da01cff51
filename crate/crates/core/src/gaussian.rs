//! Two-mode Gaussian states as 4×4 covariance matrices.
//!
//! Quadratures are stored in the order `(X_A, P_A, X_B, P_B)` and are
//! normalised so that the vacuum covariance matrix is the identity. `A` and
//! `B` are the signal/idler modes `A1`/`A2` or the ±45° superpositions
//! `A+ = (A1 + A2)/√2`, `A- = (A1 - A2)/√2`, depending on the basis tag.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    self, block, congruence4, det2, det4, identity4, max_abs4, max_abs_diff4, symplectic_form,
    transpose4, Mat2, Mat4,
};
use crate::scalar::Scalar;

/// Relative tolerance of the symmetry check in [`CovarianceMatrix::new`].
pub const SYMMETRY_TOL: f64 = 1e-12;
/// Slack on `S J Sᵀ = J`.
pub const SYMPLECTIC_TOL: f64 = 1e-10;
/// Uncertainty-principle slack for states this crate generates or transforms.
pub const STRICT_PHYSICALITY_TOL: f64 = 1e-9;
/// Uncertainty-principle slack for user-supplied matrices. Reference
/// covariance matrices are rounded to three significant figures, which puts
/// minimum-uncertainty states a few 1e-4 below the bound.
pub const INPUT_PHYSICALITY_TOL: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeBasis {
    /// Orthogonally polarised signal and idler, `A1`/`A2`.
    SignalIdler,
    /// The ±45° rotated modes `A+`/`A-`.
    PlusMinus,
}

impl ModeBasis {
    pub fn other(self) -> Self {
        match self {
            ModeBasis::SignalIdler => ModeBasis::PlusMinus,
            ModeBasis::PlusMinus => ModeBasis::SignalIdler,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ModeBasis::SignalIdler => "signal_idler",
            ModeBasis::PlusMinus => "plus_minus",
        }
    }
}

/// First (`A`) or second (`B`) mode of whatever basis a matrix is in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    A,
    B,
}

impl Mode {
    fn offset(self) -> usize {
        match self {
            Mode::A => 0,
            Mode::B => 2,
        }
    }
}

/// Result of the uncertainty-principle check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Physicality<T> {
    pub physical: bool,
    pub min_symplectic_eigenvalue: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix<T> {
    entries: Mat4<T>,
    basis: ModeBasis,
}

impl<T: Scalar> CovarianceMatrix<T> {
    /// Validates symmetry (relative to the largest entry) and stores the
    /// averaged matrix.
    pub fn new(entries: Mat4<T>, basis: ModeBasis) -> Result<Self> {
        if entries.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::NumericalFailure(
                "non-finite covariance entry".into(),
            ));
        }
        let scale = max_abs4(&entries).max(T::one());
        let tol = T::tol(SYMMETRY_TOL) * scale;
        for i in 0..4 {
            for j in i + 1..4 {
                let dev = (entries[i][j] - entries[j][i]).abs();
                if dev > tol {
                    return Err(Error::NonSymmetric {
                        i,
                        j,
                        deviation: dev.as_f64(),
                    });
                }
            }
        }
        Ok(Self::symmetrized(entries, basis))
    }

    /// Accepts a row-major nested representation and checks the shape.
    pub fn from_rows(rows: &[Vec<T>], basis: ModeBasis) -> Result<Self> {
        let cols = rows.iter().map(Vec::len).find(|&n| n != 4).unwrap_or(4);
        if rows.len() != 4 || cols != 4 {
            let cols = if rows.len() == 4 {
                cols
            } else {
                rows.first().map_or(0, Vec::len)
            };
            return Err(Error::BadShape {
                rows: rows.len(),
                cols,
            });
        }
        let mut m = [[T::zero(); 4]; 4];
        for (i, row) in rows.iter().enumerate() {
            m[i].copy_from_slice(row);
        }
        Self::new(m, basis)
    }

    pub fn vacuum(basis: ModeBasis) -> Self {
        Self {
            entries: identity4(),
            basis,
        }
    }

    /// Assembles `[[γ_A, σ_AB], [σ_ABᵀ, γ_B]]`.
    pub fn from_blocks(
        gamma_a: Mat2<T>,
        gamma_b: Mat2<T>,
        sigma_ab: Mat2<T>,
        basis: ModeBasis,
    ) -> Result<Self> {
        let mut m = [[T::zero(); 4]; 4];
        for r in 0..2 {
            for c in 0..2 {
                m[r][c] = gamma_a[r][c];
                m[r + 2][c + 2] = gamma_b[r][c];
                m[r][c + 2] = sigma_ab[r][c];
                m[c + 2][r] = sigma_ab[r][c];
            }
        }
        Self::new(m, basis)
    }

    fn symmetrized(m: Mat4<T>, basis: ModeBasis) -> Self {
        let mut entries = m;
        let half = T::lit(0.5);
        for i in 0..4 {
            for j in i + 1..4 {
                let avg = (m[i][j] + m[j][i]) * half;
                entries[i][j] = avg;
                entries[j][i] = avg;
            }
        }
        Self { entries, basis }
    }

    pub fn entries(&self) -> &Mat4<T> {
        &self.entries
    }

    pub fn basis(&self) -> ModeBasis {
        self.basis
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.entries[i][j]
    }

    pub fn gamma_a(&self) -> Mat2<T> {
        block(&self.entries, 0, 0)
    }

    pub fn gamma_b(&self) -> Mat2<T> {
        block(&self.entries, 1, 1)
    }

    pub fn sigma_ab(&self) -> Mat2<T> {
        block(&self.entries, 0, 1)
    }

    pub fn det(&self) -> T {
        det4(&self.entries)
    }

    /// Ordinary eigenvalues, ascending.
    pub fn eigenvalues(&self) -> [T; 4] {
        linalg::symmetric_eigenvalues4(&self.entries)
    }

    /// Symplectic eigenvalues `(ν₋, ν₊)` with `ν₋ ≤ ν₊`.
    ///
    /// Computed spectrally for positive-definite matrices; otherwise from the
    /// two-mode invariants `Δ = det γ_A + det γ_B + 2 det σ_AB` and `det Γ`
    /// (which may give NaN for badly unphysical input).
    pub fn symplectic_eigenvalues(&self) -> (T, T) {
        if let Some(pair) = linalg::symplectic_eigenvalues4(&self.entries) {
            return pair;
        }
        let delta =
            det2(&self.gamma_a()) + det2(&self.gamma_b()) + T::lit(2.0) * det2(&self.sigma_ab());
        let (lo, hi) = symplectic_pair(delta, self.det());
        (lo.sqrt(), hi.sqrt())
    }

    /// Uncertainty check at [`INPUT_PHYSICALITY_TOL`].
    pub fn is_physical(&self) -> Physicality<T> {
        self.is_physical_within(INPUT_PHYSICALITY_TOL)
    }

    /// Physical iff both symplectic eigenvalues are `≥ 1 - tol` (and `Γ`
    /// is positive definite, which the symplectic test alone does not see
    /// when `det Γ` and `Δ` happen to be positive).
    pub fn is_physical_within(&self, tol: f64) -> Physicality<T> {
        let (nu_minus, _) = self.symplectic_eigenvalues();
        let positive = self.eigenvalues()[0] > T::zero();
        let physical = positive && nu_minus.is_finite() && nu_minus >= T::one() - T::tol(tol);
        Physicality {
            physical,
            min_symplectic_eigenvalue: if positive { nu_minus } else { T::zero() },
        }
    }

    /// Switches between `A1/A2` and `A±`. The 50/50 mixing matrix is its own
    /// inverse, so applying this twice is the identity.
    pub fn change_basis_pm(&self) -> Self {
        let s = beamsplitter_pm::<T>();
        Self::symmetrized(congruence4(&s, &self.entries), self.basis.other())
    }

    pub fn in_basis(&self, target: ModeBasis) -> Self {
        if self.basis == target {
            self.clone()
        } else {
            self.change_basis_pm()
        }
    }

    /// `Γ' = S Γ Sᵀ` with the transform acting on modes `A`, `B` of the
    /// current basis.
    pub fn apply(&self, transform: &PassiveTransform<T>) -> Result<Self> {
        let s = transform.symplectic_matrix();
        let defect = symplecticity_defect(&s);
        if !(defect <= T::tol(SYMPLECTIC_TOL)) {
            return Err(Error::InvalidTransform {
                deviation: defect.as_f64(),
            });
        }
        Ok(Self::symmetrized(
            congruence4(&s, &self.entries),
            self.basis,
        ))
    }

    /// Beamsplitter-with-vacuum loss on each mode: `γ → ηγ + (1-η)𝟙`,
    /// `σ_AB → √(η_A η_B) σ_AB`.
    pub fn with_losses(&self, loss: &LossModel<T>) -> Self {
        let etas = [loss.eta_a, loss.eta_a, loss.eta_b, loss.eta_b];
        let mut m = self.entries;
        for i in 0..4 {
            for j in 0..4 {
                m[i][j] = m[i][j] * (etas[i] * etas[j]).sqrt();
            }
            m[i][i] = m[i][i] + (T::one() - etas[i]);
        }
        Self::symmetrized(m, self.basis)
    }

    /// Standard form I: `γ_A = n𝟙`, `γ_B = m𝟙`, `σ_AB = diag(c₁, c₂)`,
    /// within `tol` relative to the largest entry.
    pub fn is_standard_form(&self, tol: f64) -> bool {
        let e = &self.entries;
        let t = T::tol(tol) * max_abs4(e).max(T::one());
        let zero_pairs = [(0, 1), (2, 3), (0, 3), (1, 2)];
        zero_pairs.iter().all(|&(i, j)| e[i][j].abs() <= t)
            && (e[0][0] - e[1][1]).abs() <= t
            && (e[2][2] - e[3][3]).abs() <= t
    }

    pub fn cast<U: Scalar>(&self) -> CovarianceMatrix<U> {
        let mut m = [[U::zero(); 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                m[i][j] = U::lit(self.entries[i][j].as_f64());
            }
        }
        CovarianceMatrix {
            entries: m,
            basis: self.basis,
        }
    }
}

/// Roots `(x₋, x₊)` of `x² - Δx + det = 0`, with the small root taken as
/// `det / x₊` to avoid cancellation. A slightly negative discriminant from
/// rounding is clamped to zero; a clearly negative one yields NaN.
pub(crate) fn symplectic_pair<T: Scalar>(delta: T, det: T) -> (T, T) {
    let two = T::lit(2.0);
    let mut disc = delta * delta - T::lit(4.0) * det;
    let slack = T::tol(1e-9) * (delta * delta).max(T::one());
    if disc < T::zero() && disc > -slack {
        disc = T::zero();
    }
    let hi = (delta + disc.sqrt()) / two;
    let lo = if hi > T::zero() {
        det / hi
    } else {
        (delta - disc.sqrt()) / two
    };
    (lo, hi)
}

/// Passive (energy-preserving) linear-optics operations on the two modes.
///
/// Every variant except [`PassiveTransform::Matrix`] is the quadrature lift of
/// a 2×2 unitary acting on the mode amplitudes, hence orthogonal and
/// symplectic by construction.
#[derive(Debug, Clone, PartialEq)]
pub enum PassiveTransform<T> {
    /// 50/50 mixing `A± = (A1 ± A2)/√2`.
    BeamsplitterPm,
    /// `X → cos φ X + sin φ P`, `P → -sin φ X + cos φ P` on one mode.
    PhaseShift { mode: Mode, angle: T },
    /// Rotation of the polarisation basis by `α`.
    PolarizationRotation(T),
    /// Half-wave plate with its fast axis at `α`.
    HalfWave(T),
    /// Quarter-wave plate with its fast axis at `α`.
    QuarterWave(T),
    /// Applied left to right: the first element acts first.
    Composite(Vec<PassiveTransform<T>>),
    /// Arbitrary user-supplied quadrature map; validated on use.
    Matrix(Mat4<T>),
}

impl<T: Scalar> PassiveTransform<T> {
    pub fn symplectic_matrix(&self) -> Mat4<T> {
        let z = T::zero();
        match self {
            PassiveTransform::BeamsplitterPm => beamsplitter_pm(),
            PassiveTransform::PhaseShift { mode, angle } => {
                let (s, c) = angle.sin_cos();
                let mut m = identity4();
                let o = mode.offset();
                m[o][o] = c;
                m[o][o + 1] = s;
                m[o + 1][o] = -s;
                m[o + 1][o + 1] = c;
                m
            }
            PassiveTransform::PolarizationRotation(alpha) => {
                let (s, c) = alpha.sin_cos();
                lift_unitary(&[[c, -s], [s, c]], &[[z, z], [z, z]])
            }
            PassiveTransform::HalfWave(alpha) => {
                let (s, c) = (T::lit(2.0) * *alpha).sin_cos();
                lift_unitary(&[[c, s], [s, -c]], &[[z, z], [z, z]])
            }
            PassiveTransform::QuarterWave(alpha) => {
                // R(α) diag(1, i) R(-α)
                let (s, c) = alpha.sin_cos();
                let re = [[c * c, c * s], [c * s, s * s]];
                let im = [[s * s, -c * s], [-c * s, c * c]];
                lift_unitary(&re, &im)
            }
            PassiveTransform::Composite(parts) => parts.iter().fold(identity4(), |acc, t| {
                linalg::mul4(&t.symplectic_matrix(), &acc)
            }),
            PassiveTransform::Matrix(m) => *m,
        }
    }
}

/// `max |S J Sᵀ - J|`.
pub fn symplecticity_defect<T: Scalar>(s: &Mat4<T>) -> T {
    let j = symplectic_form::<T>();
    let sjst = linalg::mul4(&linalg::mul4(s, &j), &transpose4(s));
    max_abs_diff4(&sjst, &j)
}

fn beamsplitter_pm<T: Scalar>() -> Mat4<T> {
    let r = T::FRAC_1_SQRT_2();
    let z = T::zero();
    [[r, z, r, z], [z, r, z, r], [r, z, -r, z], [z, r, z, -r]]
}

/// Quadrature representation of the amplitude map `a_j → Σ_k U_jk a_k`
/// with `U = re + i·im`: each entry becomes the block `[[re, -im], [im, re]]`.
fn lift_unitary<T: Scalar>(re: &Mat2<T>, im: &Mat2<T>) -> Mat4<T> {
    let mut m = [[T::zero(); 4]; 4];
    for j in 0..2 {
        for k in 0..2 {
            m[2 * j][2 * k] = re[j][k];
            m[2 * j][2 * k + 1] = -im[j][k];
            m[2 * j + 1][2 * k] = im[j][k];
            m[2 * j + 1][2 * k + 1] = re[j][k];
        }
    }
    m
}

/// Per-mode transmission efficiencies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossModel<T> {
    pub eta_a: T,
    pub eta_b: T,
}

impl<T: Scalar> LossModel<T> {
    pub fn new(eta_a: T, eta_b: T) -> Result<Self> {
        for eta in [eta_a, eta_b] {
            if !(eta >= T::zero() && eta <= T::one()) {
                return Err(Error::BadEfficiency(eta.as_f64()));
            }
        }
        Ok(Self { eta_a, eta_b })
    }

    pub fn symmetric(eta: T) -> Result<Self> {
        Self::new(eta, eta)
    }
}
