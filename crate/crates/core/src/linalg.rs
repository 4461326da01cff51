//! Fixed-size 2×2 / 4×4 real matrix helpers.

use crate::scalar::Scalar;

pub type Mat2<T> = [[T; 2]; 2];
pub type Mat4<T> = [[T; 4]; 4];

pub fn identity4<T: Scalar>() -> Mat4<T> {
    let mut m = [[T::zero(); 4]; 4];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = T::one();
    }
    m
}

pub fn mul4<T: Scalar>(a: &Mat4<T>, b: &Mat4<T>) -> Mat4<T> {
    let mut out = [[T::zero(); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = (0..4).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

pub fn transpose4<T: Scalar>(a: &Mat4<T>) -> Mat4<T> {
    let mut out = [[T::zero(); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[j][i] = a[i][j];
        }
    }
    out
}

/// `s · m · sᵀ`
pub fn congruence4<T: Scalar>(s: &Mat4<T>, m: &Mat4<T>) -> Mat4<T> {
    mul4(&mul4(s, m), &transpose4(s))
}

pub fn max_abs_diff4<T: Scalar>(a: &Mat4<T>, b: &Mat4<T>) -> T {
    let mut worst = T::zero();
    for i in 0..4 {
        for j in 0..4 {
            worst = worst.max((a[i][j] - b[i][j]).abs());
        }
    }
    worst
}

pub fn max_abs4<T: Scalar>(a: &Mat4<T>) -> T {
    a.iter()
        .flat_map(|r| r.iter())
        .fold(T::zero(), |acc, &x| acc.max(x.abs()))
}

#[inline]
pub fn det2<T: Scalar>(m: &Mat2<T>) -> T {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn det4<T: Scalar>(m: &Mat4<T>) -> T {
    let mut a = *m;
    let mut det = T::one();
    for col in 0..4 {
        let pivot = (col..4)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())
            .unwrap();
        if a[pivot][col] == T::zero() {
            return T::zero();
        }
        if pivot != col {
            a.swap(pivot, col);
            det = -det;
        }
        det = det * a[col][col];
        for row in col + 1..4 {
            let f = a[row][col] / a[col][col];
            for k in col..4 {
                a[row][k] = a[row][k] - f * a[col][k];
            }
        }
    }
    det
}

/// Two-mode symplectic form `J = j ⊕ j`, `j = [[0, 1], [-1, 0]]`.
pub fn symplectic_form<T: Scalar>() -> Mat4<T> {
    let (o, z) = (T::one(), T::zero());
    [[z, o, z, z], [-o, z, z, z], [z, z, z, o], [z, z, -o, z]]
}

/// 2×2 block `(r, c)` of a 4×4 matrix, `r, c ∈ {0, 1}`.
pub fn block<T: Scalar>(m: &Mat4<T>, r: usize, c: usize) -> Mat2<T> {
    [
        [m[2 * r][2 * c], m[2 * r][2 * c + 1]],
        [m[2 * r + 1][2 * c], m[2 * r + 1][2 * c + 1]],
    ]
}

/// Eigenvalues of a real symmetric 4×4 matrix, ascending.
pub fn symmetric_eigenvalues4<T: Scalar>(m: &Mat4<T>) -> [T; 4] {
    symmetric_eigen4(m).0
}

/// Cyclic Jacobi eigen-decomposition of a real symmetric 4×4 matrix.
/// Returns eigenvalues ascending and the matching eigenvectors as columns.
pub fn symmetric_eigen4<T: Scalar>(m: &Mat4<T>) -> ([T; 4], Mat4<T>) {
    let mut a = *m;
    let mut v = identity4::<T>();
    let scale = max_abs4(&a).max(T::min_positive_value());
    for _sweep in 0..64 {
        let mut off = T::zero();
        for i in 0..4 {
            for j in i + 1..4 {
                off = off + a[i][j] * a[i][j];
            }
        }
        if off.sqrt() <= T::epsilon() * scale * T::lit(1e-3) {
            break;
        }
        for p in 0..4 {
            for q in p + 1..4 {
                if a[p][q] == T::zero() {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (T::lit(2.0) * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..4 {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..4 {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let (vkp, vkq) = (row[p], row[q]);
                    row[p] = c * vkp - s * vkq;
                    row[q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order = [0usize, 1, 2, 3];
    order.sort_by(|&i, &j| a[i][i].partial_cmp(&a[j][j]).unwrap());
    let mut values = [T::zero(); 4];
    let mut vectors = [[T::zero(); 4]; 4];
    for (col, &k) in order.iter().enumerate() {
        values[col] = a[k][k];
        for row in 0..4 {
            vectors[row][col] = v[row][k];
        }
    }
    (values, vectors)
}

/// Symplectic eigenvalues `(ν₋, ν₊)` of a positive-definite 4×4 matrix:
/// `-(Γ^{1/2} J Γ^{1/2})²` is symmetric with spectrum `{ν₋², ν₋², ν₊², ν₊²}`.
/// Returns `None` if `m` is not positive definite.
pub fn symplectic_eigenvalues4<T: Scalar>(m: &Mat4<T>) -> Option<(T, T)> {
    let (values, vectors) = symmetric_eigen4(m);
    if !(values[0] > T::zero()) {
        return None;
    }
    let mut root = [[T::zero(); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            root[i][j] = (0..4)
                .map(|k| vectors[i][k] * values[k].sqrt() * vectors[j][k])
                .sum();
        }
    }
    let inner = mul4(&mul4(&root, &symplectic_form()), &root);
    let mut k = mul4(&transpose4(&inner), &inner);
    // Exact symmetry keeps the Jacobi sweep honest.
    for i in 0..4 {
        for j in i + 1..4 {
            let avg = (k[i][j] + k[j][i]) / T::lit(2.0);
            k[i][j] = avg;
            k[j][i] = avg;
        }
    }
    let sq = symmetric_eigenvalues4(&k);
    let half = T::lit(0.5);
    Some((
        ((sq[0] + sq[1]) * half).max(T::zero()).sqrt(),
        ((sq[2] + sq[3]) * half).max(T::zero()).sqrt(),
    ))
}

/// Eigen-decomposition of a symmetric 2×2 block: `(λ_min, λ_max, θ)` where
/// `(cos θ, sin θ)` is the eigenvector of `λ_min` and `θ ∈ [0, π)`.
pub fn symmetric_eigen2<T: Scalar>(m: &Mat2<T>) -> (T, T, T) {
    let (a, b, d) = (m[0][0], m[0][1], m[1][1]);
    let half_trace = (a + d) / T::lit(2.0);
    let radius = (((a - d) / T::lit(2.0)).powi(2) + b * b).sqrt();
    // Major-axis angle is atan2(2b, a - d)/2; the minor axis sits π/2 away.
    let major = T::lit(0.5) * (T::lit(2.0) * b).atan2(a - d);
    let mut theta = major + T::FRAC_PI_2();
    while theta >= T::PI() {
        theta = theta - T::PI();
    }
    while theta < T::zero() {
        theta = theta + T::PI();
    }
    (half_trace - radius, half_trace + radius, theta)
}
