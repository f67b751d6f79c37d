//! Dense complex matrix helpers built on `faer`.
//!
//! Everything in this crate works with `faer::Mat<Complex64>`; this module adds
//! the checked entry points (finite input, square shapes, conditioning) that the
//! scattering and spectral code relies on.

use faer::linalg::solvers::{DenseSolveCore, Solve};
use faer::{Mat, MatRef};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type ComplexMatrix = Mat<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn ensure_finite(a: MatRef<'_, Complex64>) -> Result<()> {
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            let z = a[(i, j)];
            if !(z.re.is_finite() && z.im.is_finite()) {
                return Err(Error::NonFinite);
            }
        }
    }
    Ok(())
}

pub fn ensure_square(a: MatRef<'_, Complex64>) -> Result<usize> {
    if a.nrows() != a.ncols() {
        return Err(Error::Dimension(format!(
            "expected a square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    if a.nrows() == 0 {
        return Err(Error::Dimension("empty matrix".into()));
    }
    Ok(a.nrows())
}

/// Validated constructor from row-major entries.
pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<ComplexMatrix> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    if nrows == 0 || ncols == 0 {
        return Err(Error::Dimension("matrix must be at least 1x1".into()));
    }
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(Error::Dimension("ragged rows".into()));
    }
    let m = Mat::from_fn(nrows, ncols, |i, j| rows[i][j]);
    ensure_finite(m.as_ref())?;
    Ok(m)
}

pub fn identity(n: usize) -> ComplexMatrix {
    Mat::identity(n, n)
}

pub fn diag(values: &[Complex64]) -> ComplexMatrix {
    let n = values.len();
    Mat::from_fn(n, n, |i, j| if i == j { values[i] } else { ZERO })
}

pub fn scale(a: MatRef<'_, Complex64>, s: Complex64) -> ComplexMatrix {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)] * s)
}

pub fn transpose(a: MatRef<'_, Complex64>) -> ComplexMatrix {
    Mat::from_fn(a.ncols(), a.nrows(), |i, j| a[(j, i)])
}

pub fn conj(a: MatRef<'_, Complex64>) -> ComplexMatrix {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)].conj())
}

pub fn adjoint(a: MatRef<'_, Complex64>) -> ComplexMatrix {
    Mat::from_fn(a.ncols(), a.nrows(), |i, j| a[(j, i)].conj())
}

/// Frobenius norm.
pub fn frobenius(a: MatRef<'_, Complex64>) -> f64 {
    a.norm_l2()
}

/// Frobenius norm of `a - 1`.
pub fn identity_defect(a: MatRef<'_, Complex64>) -> f64 {
    let mut acc = 0.0;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            let d = if i == j { a[(i, j)] - ONE } else { a[(i, j)] };
            acc += d.norm_sqr();
        }
    }
    acc.sqrt()
}

pub fn diff_norm(a: MatRef<'_, Complex64>, b: MatRef<'_, Complex64>) -> f64 {
    let mut acc = 0.0;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            acc += (a[(i, j)] - b[(i, j)]).norm_sqr();
        }
    }
    acc.sqrt()
}

/// Maximum absolute column sum.
pub fn norm_one(a: MatRef<'_, Complex64>) -> f64 {
    (0..a.ncols())
        .map(|j| (0..a.nrows()).map(|i| a[(i, j)].norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn trace(a: MatRef<'_, Complex64>) -> Complex64 {
    (0..a.nrows().min(a.ncols())).map(|i| a[(i, i)]).sum()
}

/// Whether every column of `a` is finite and `a` equals its adjoint to `tol`
/// (relative to the Frobenius norm).
pub fn is_hermitian(a: MatRef<'_, Complex64>, tol: f64) -> bool {
    if a.nrows() != a.ncols() {
        return false;
    }
    let adj = adjoint(a);
    diff_norm(a, adj.as_ref()) <= tol * frobenius(a).max(f64::MIN_POSITIVE)
}

/// Inverse together with the reciprocal 1-norm condition number.
#[derive(Debug, Clone)]
pub struct CheckedInverse {
    pub inverse: ComplexMatrix,
    pub rcond: f64,
}

/// Inverts `a` through a partially pivoted LU factorization and reports the
/// reciprocal condition `1 / (|a|_1 |a^-1|_1)`. A non-finite inverse is
/// reported as `rcond = 0`.
pub fn inverse_with_rcond(a: MatRef<'_, Complex64>) -> Result<CheckedInverse> {
    ensure_square(a)?;
    let inverse = a.partial_piv_lu().inverse();
    let finite = ensure_finite(inverse.as_ref()).is_ok();
    let rcond = if finite {
        let denom = norm_one(a) * norm_one(inverse.as_ref());
        if denom > 0.0 && denom.is_finite() {
            1.0 / denom
        } else {
            0.0
        }
    } else {
        0.0
    };
    Ok(CheckedInverse { inverse, rcond })
}

/// Solves `a x = b`.
pub fn solve(a: MatRef<'_, Complex64>, b: MatRef<'_, Complex64>) -> Result<ComplexMatrix> {
    ensure_square(a)?;
    if b.nrows() != a.nrows() {
        return Err(Error::Dimension("right-hand side rows".into()));
    }
    let x = a.partial_piv_lu().solve(b);
    ensure_finite(x.as_ref())?;
    Ok(x)
}

/// Determinant held as `exp(log_abs) * phase`, so that large matrices do not
/// overflow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogDet {
    pub log_abs: f64,
    /// Unit-modulus phase factor (zero when the matrix is exactly singular).
    pub phase: Complex64,
}

impl LogDet {
    pub fn value(&self) -> Complex64 {
        self.phase * self.log_abs.exp()
    }

    pub fn is_singular(&self) -> bool {
        self.log_abs == f64::NEG_INFINITY
    }
}

/// Log-scaled determinant from the LU pivots.
pub fn log_det(a: MatRef<'_, Complex64>) -> Result<LogDet> {
    let n = ensure_square(a)?;
    let lu = a.partial_piv_lu();
    let u = lu.U();
    let mut log_abs = 0.0;
    let mut phase = ONE;
    for i in 0..n {
        let p = u[(i, i)];
        let r = p.norm();
        if r == 0.0 {
            return Ok(LogDet {
                log_abs: f64::NEG_INFINITY,
                phase: ZERO,
            });
        }
        log_abs += r.ln();
        phase *= p / r;
    }
    let (fwd, _) = lu.P().arrays();
    if permutation_is_odd(fwd) {
        phase = -phase;
    }
    Ok(LogDet { log_abs, phase })
}

fn permutation_is_odd(perm: &[usize]) -> bool {
    let mut seen = vec![false; perm.len()];
    let mut transpositions = 0usize;
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0usize;
        let mut k = start;
        while !seen[k] {
            seen[k] = true;
            k = perm[k];
            len += 1;
        }
        transpositions += len - 1;
    }
    transpositions % 2 == 1
}

/// `log |det a| - sum_j log |a_j|` with `a_j` the columns of `a`.
///
/// By Hadamard's inequality this is `<= 0`; it is `-inf` for singular
/// matrices and near zero for well-conditioned ones, which makes it a
/// scale-free measure of how close `a` is to singular.
pub fn log_hadamard_ratio(a: MatRef<'_, Complex64>) -> Result<f64> {
    let det = log_det(a)?;
    let cols: f64 = (0..a.ncols())
        .map(|j| {
            let s: f64 = (0..a.nrows()).map(|i| a[(i, j)].norm_sqr()).sum();
            0.5 * s.ln()
        })
        .sum();
    Ok(det.log_abs - cols)
}

/// Eigenvalues of a general complex matrix.
pub fn eig_general(a: MatRef<'_, Complex64>) -> Result<Vec<Complex64>> {
    ensure_square(a)?;
    ensure_finite(a)?;
    a.eigenvalues().map_err(|_| Error::NoConvergence)
}

/// Eigenvalues and right eigenvectors (as columns) of a general complex matrix.
pub fn eig_with_vectors(a: MatRef<'_, Complex64>) -> Result<(Vec<Complex64>, ComplexMatrix)> {
    ensure_square(a)?;
    ensure_finite(a)?;
    let evd = a.eigen().map_err(|_| Error::NoConvergence)?;
    let s = evd.S();
    let values = (0..a.nrows()).map(|i| s[i]).collect();
    Ok((values, evd.U().to_owned()))
}

/// Eigenvalues of a real nonsymmetric matrix; complex eigenvalues come out in
/// exactly conjugate pairs.
pub fn eig_real(a: MatRef<'_, f64>) -> Result<Vec<Complex64>> {
    if a.nrows() != a.ncols() || a.nrows() == 0 {
        return Err(Error::Dimension("expected a non-empty square matrix".into()));
    }
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            if !a[(i, j)].is_finite() {
                return Err(Error::NonFinite);
            }
        }
    }
    a.eigenvalues().map_err(|_| Error::NoConvergence)
}

/// Ascending eigenvalues of a hermitian matrix (only the lower triangle is read).
pub fn hermitian_eigenvalues(a: MatRef<'_, Complex64>) -> Result<Vec<f64>> {
    ensure_square(a)?;
    ensure_finite(a)?;
    a.self_adjoint_eigenvalues(faer::Side::Lower)
        .map_err(|_| Error::NoConvergence)
}

pub fn mat_vec(a: MatRef<'_, Complex64>, x: &[Complex64]) -> Vec<Complex64> {
    (0..a.nrows())
        .map(|i| (0..a.ncols()).map(|j| a[(i, j)] * x[j]).sum())
        .collect()
}

pub fn vec_norm(x: &[Complex64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Assembles `[[a, b], [c, d]]`.
pub fn block2(
    a: MatRef<'_, Complex64>,
    b: MatRef<'_, Complex64>,
    c: MatRef<'_, Complex64>,
    d: MatRef<'_, Complex64>,
) -> Result<ComplexMatrix> {
    if a.nrows() != b.nrows()
        || c.nrows() != d.nrows()
        || a.ncols() != c.ncols()
        || b.ncols() != d.ncols()
    {
        return Err(Error::Dimension("inconsistent block shapes".into()));
    }
    let (n0, m0) = (a.nrows(), a.ncols());
    Ok(Mat::from_fn(n0 + c.nrows(), m0 + b.ncols(), |i, j| {
        match (i < n0, j < m0) {
            (true, true) => a[(i, j)],
            (true, false) => b[(i, j - m0)],
            (false, true) => c[(i - n0, j)],
            (false, false) => d[(i - n0, j - m0)],
        }
    }))
}

/// Copies the block of `a` starting at `(row, col)` with the given shape.
pub fn sub(a: MatRef<'_, Complex64>, row: usize, col: usize, nrows: usize, ncols: usize) -> ComplexMatrix {
    Mat::from_fn(nrows, ncols, |i, j| a[(row + i, col + j)])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sorted(mut v: Vec<Complex64>) -> Vec<Complex64> {
        v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        v
    }

    #[test]
    fn diagonal_eigenvalues() {
        let a = diag(&[c(1.0, 0.0), c(0.0, 2.0)]);
        let ev = sorted(eig_general(a.as_ref()).unwrap());
        assert!((ev[0] - c(0.0, 2.0)).norm() < 1e-14);
        assert!((ev[1] - c(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn pauli_x_eigenvalues() {
        let a = from_rows(&[vec![ZERO, ONE], vec![ONE, ZERO]]).unwrap();
        let ev = sorted(eig_general(a.as_ref()).unwrap());
        assert!((ev[0] + ONE).norm() < 1e-14);
        assert!((ev[1] - ONE).norm() < 1e-14);
    }

    #[test]
    fn rejects_non_finite_and_non_square() {
        assert!(matches!(
            from_rows(&[vec![c(f64::NAN, 0.0)]]),
            Err(Error::NonFinite)
        ));
        let rect = Mat::<Complex64>::zeros(2, 3);
        assert!(matches!(eig_general(rect.as_ref()), Err(Error::Dimension(_))));
        let mut bad = identity(2);
        bad[(0, 1)] = c(f64::INFINITY, 0.0);
        assert!(matches!(eig_general(bad.as_ref()), Err(Error::NonFinite)));
    }

    #[test]
    fn log_det_matches_direct_determinant() {
        let a = from_rows(&[
            vec![c(0.0, 0.0), c(2.0, 1.0), c(0.5, 0.0)],
            vec![c(1.0, -1.0), c(0.0, 0.0), c(0.0, 3.0)],
            vec![c(0.2, 0.0), c(1.0, 0.0), c(-1.0, 0.0)],
        ])
        .unwrap();
        // cofactor expansion along the first row
        let m = |i: usize, j: usize| a[(i, j)];
        let direct = m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1))
            - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0))
            + m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
        let ld = log_det(a.as_ref()).unwrap();
        assert!((ld.value() - direct).norm() < 1e-13 * direct.norm());
    }

    #[test]
    fn log_det_of_singular_matrix() {
        let a = from_rows(&[vec![ONE, ONE], vec![ONE, ONE]]).unwrap();
        let ld = log_det(a.as_ref()).unwrap();
        assert!(ld.is_singular() || ld.log_abs < -30.0);
    }

    #[test]
    fn rcond_flags_near_singular() {
        let a = from_rows(&[vec![ONE, ONE], vec![ONE, c(1.0 + 1e-15, 0.0)]]).unwrap();
        let inv = inverse_with_rcond(a.as_ref()).unwrap();
        assert!(inv.rcond < 1e-13);
        let good = identity(3);
        assert!((inverse_with_rcond(good.as_ref()).unwrap().rcond - 1.0).abs() < 1e-15);
    }

    #[test]
    fn eigenvectors_satisfy_eigen_equation() {
        let a = from_rows(&[
            vec![c(1.0, 0.5), c(2.0, 0.0), c(0.0, 1.0)],
            vec![c(0.0, 0.0), c(-1.0, 0.0), c(1.0, 1.0)],
            vec![c(3.0, 0.0), c(0.0, -2.0), c(0.5, 0.0)],
        ])
        .unwrap();
        let (vals, vecs) = eig_with_vectors(a.as_ref()).unwrap();
        for (k, lambda) in vals.iter().enumerate() {
            let v: Vec<Complex64> = (0..3).map(|i| vecs[(i, k)]).collect();
            let av = mat_vec(a.as_ref(), &v);
            let res: f64 = av
                .iter()
                .zip(&v)
                .map(|(x, y)| (x - lambda * y).norm_sqr())
                .sum::<f64>()
                .sqrt();
            assert!(res < 1e-13 * frobenius(a.as_ref()) * vec_norm(&v));
        }
    }

    #[test]
    fn permutation_parity() {
        assert!(!permutation_is_odd(&[0, 1, 2]));
        assert!(permutation_is_odd(&[1, 0, 2]));
        assert!(!permutation_is_odd(&[1, 2, 0]));
    }
}
