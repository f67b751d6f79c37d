//! Block scattering matrices and their symmetry algebra.
//!
//! A scattering matrix maps incoming to outgoing amplitudes,
//! `a_out = S a_in`, with channels grouped into a left and a right set. With
//! the left channels listed first, the full matrix reads
//!
//! ```text
//!     S = | r   t' |      r  : left  -> left   (n_left  x n_left)
//!         | t   r' |      t  : left  -> right  (n_right x n_left)
//!                         t' : right -> left   (n_left  x n_right)
//!                         r' : right -> right  (n_right x n_right)
//! ```
//!
//! Transposition `S^T` is taken on this full matrix, so it maps
//! `(r, t, t', r') -> (r^T, t'^T, t^T, r'^T)`.

use faer::MatRef;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::dense::{self, ComplexMatrix, I};

/// Reciprocal condition below which an inverse is treated as singular.
pub const RCOND_MIN: f64 = 1e-13;

#[derive(Debug, Clone)]
pub struct ScatteringMatrix {
    r: ComplexMatrix,
    t: ComplexMatrix,
    t_prime: ComplexMatrix,
    r_prime: ComplexMatrix,
    omega: Complex64,
}

impl ScatteringMatrix {
    pub fn new(
        r: ComplexMatrix,
        t: ComplexMatrix,
        t_prime: ComplexMatrix,
        r_prime: ComplexMatrix,
        omega: Complex64,
    ) -> Result<Self> {
        let nl = r.nrows();
        let nr = r_prime.nrows();
        let shapes_ok = r.ncols() == nl
            && r_prime.ncols() == nr
            && t.nrows() == nr
            && t.ncols() == nl
            && t_prime.nrows() == nl
            && t_prime.ncols() == nr;
        if !shapes_ok || nl + nr == 0 {
            return Err(Error::Dimension(format!(
                "blocks r {}x{}, t {}x{}, t' {}x{}, r' {}x{}",
                r.nrows(),
                r.ncols(),
                t.nrows(),
                t.ncols(),
                t_prime.nrows(),
                t_prime.ncols(),
                r_prime.nrows(),
                r_prime.ncols()
            )));
        }
        for m in [&r, &t, &t_prime, &r_prime] {
            dense::ensure_finite(m.as_ref())?;
        }
        if !(omega.re.is_finite() && omega.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self {
            r,
            t,
            t_prime,
            r_prime,
            omega,
        })
    }

    /// Splits a full `(n_left + n_right)`-square matrix into blocks.
    pub fn from_full(s: MatRef<'_, Complex64>, n_left: usize, omega: Complex64) -> Result<Self> {
        let n = dense::ensure_square(s)?;
        if n_left > n {
            return Err(Error::Dimension(format!("n_left {n_left} exceeds size {n}")));
        }
        let nr = n - n_left;
        Self::new(
            dense::sub(s, 0, 0, n_left, n_left),
            dense::sub(s, n_left, 0, nr, n_left),
            dense::sub(s, 0, n_left, n_left, nr),
            dense::sub(s, n_left, n_left, nr, nr),
            omega,
        )
    }

    /// Single-sided matrix (only reflection `r`), as for a closed resonator
    /// seen from its one opening.
    pub fn reflection_only(r: ComplexMatrix, omega: Complex64) -> Result<Self> {
        let n = r.nrows();
        Self::new(
            r,
            ComplexMatrix::zeros(0, n),
            ComplexMatrix::zeros(n, 0),
            ComplexMatrix::zeros(0, 0),
            omega,
        )
    }

    pub fn n_left(&self) -> usize {
        self.r.nrows()
    }

    pub fn n_right(&self) -> usize {
        self.r_prime.nrows()
    }

    pub fn dim(&self) -> usize {
        self.n_left() + self.n_right()
    }

    pub fn r(&self) -> &ComplexMatrix {
        &self.r
    }

    pub fn t(&self) -> &ComplexMatrix {
        &self.t
    }

    pub fn t_prime(&self) -> &ComplexMatrix {
        &self.t_prime
    }

    pub fn r_prime(&self) -> &ComplexMatrix {
        &self.r_prime
    }

    pub fn omega(&self) -> Complex64 {
        self.omega
    }

    pub fn with_omega(mut self, omega: Complex64) -> Self {
        self.omega = omega;
        self
    }

    pub fn full(&self) -> ComplexMatrix {
        dense::block2(
            self.r.as_ref(),
            self.t_prime.as_ref(),
            self.t.as_ref(),
            self.r_prime.as_ref(),
        )
        .expect("block shapes are validated on construction")
    }

    pub fn frobenius(&self) -> f64 {
        [&self.r, &self.t, &self.t_prime, &self.r_prime]
            .iter()
            .map(|m| m.norm_l2().powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// `|S^dagger S - 1|_F`.
    pub fn unitarity_defect(&self) -> f64 {
        let s = self.full();
        let ss = &dense::adjoint(s.as_ref()) * &s;
        dense::identity_defect(ss.as_ref())
    }

    fn map_blocks(&self, f: impl Fn(MatRef<'_, Complex64>) -> ComplexMatrix) -> Self {
        Self {
            r: f(self.r.as_ref()),
            t: f(self.t.as_ref()),
            t_prime: f(self.t_prime.as_ref()),
            r_prime: f(self.r_prime.as_ref()),
            omega: self.omega,
        }
    }

    fn require_symmetric_channels(&self) -> Result<usize> {
        if self.n_left() != self.n_right() {
            return Err(Error::Domain(format!(
                "parity needs equal channel counts, got {} and {}",
                self.n_left(),
                self.n_right()
            )));
        }
        Ok(self.n_left())
    }
}

/// Semitransparent interface of transparency `T`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterfaceSpec {
    transparency: f64,
}

impl InterfaceSpec {
    pub fn new(transparency: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&transparency) {
            return Err(Error::Domain(format!(
                "transparency {transparency} not in [0, 1]"
            )));
        }
        Ok(Self { transparency })
    }

    pub fn transparency(&self) -> f64 {
        self.transparency
    }

    pub fn reflectance(&self) -> f64 {
        1.0 - self.transparency
    }

    /// `alpha = sqrt(sqrt(R) + i sqrt(T))`, a unit-modulus number.
    pub fn alpha(&self) -> Complex64 {
        Complex64::new(self.reflectance().sqrt(), self.transparency.sqrt()).sqrt()
    }

    /// `r = r' = -sqrt(1 - T)`, `t = t' = i sqrt(T)` on every channel.
    pub fn scattering_matrix(&self, n_channels: usize, omega: Complex64) -> Result<ScatteringMatrix> {
        if n_channels == 0 {
            return Err(Error::Dimension("interface needs at least one channel".into()));
        }
        let refl = Complex64::new(-self.reflectance().sqrt(), 0.0);
        let trans = I * self.transparency.sqrt();
        let eye = dense::identity(n_channels);
        ScatteringMatrix::new(
            dense::scale(eye.as_ref(), refl),
            dense::scale(eye.as_ref(), trans),
            dense::scale(eye.as_ref(), trans),
            dense::scale(eye.as_ref(), refl),
            omega,
        )
    }
}

/// Interface scattering matrix for transparency `transparency`.
pub fn s_interface(transparency: f64, n_channels: usize, omega: Complex64) -> Result<ScatteringMatrix> {
    InterfaceSpec::new(transparency)?.scattering_matrix(n_channels, omega)
}

fn checked_inverse(a: MatRef<'_, Complex64>, omega: Complex64) -> Result<ComplexMatrix> {
    let inv = dense::inverse_with_rcond(a)?;
    if inv.rcond < RCOND_MIN {
        return Err(Error::OnResonance {
            omega,
            rcond: inv.rcond,
        });
    }
    Ok(inv.inverse)
}

fn same_frequency(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() <= 1e-12 * (1.0 + a.norm().max(b.norm()))
}

/// Series composition `S_a o S_b`: the right channels of `a` are fed into the
/// left channels of `b`, with multiple reflections between them summed.
pub fn compose(a: &ScatteringMatrix, b: &ScatteringMatrix) -> Result<ScatteringMatrix> {
    if a.n_right() != b.n_left() {
        return Err(Error::Dimension(format!(
            "cannot chain {} right channels into {} left channels",
            a.n_right(),
            b.n_left()
        )));
    }
    if !same_frequency(a.omega, b.omega) {
        return Err(Error::Contract(format!(
            "composition at different frequencies {} and {}",
            a.omega, b.omega
        )));
    }
    let omega = a.omega;
    let n = a.n_right();
    let eye = dense::identity(n);
    // (1 - r_b r'_a)^-1 and (1 - r'_a r_b)^-1
    let loop_left = &eye - &b.r * &a.r_prime;
    let loop_right = &eye - &a.r_prime * &b.r;
    let inv_left = checked_inverse(loop_left.as_ref(), omega)?;
    let inv_right = checked_inverse(loop_right.as_ref(), omega)?;

    let r = &a.r + &a.t_prime * &inv_left * &b.r * &a.t;
    let t_prime = &a.t_prime * &inv_left * &b.t_prime;
    let t = &b.t * &inv_right * &a.t;
    let r_prime = &b.r_prime + &b.t * &inv_right * &a.r_prime * &b.t_prime;
    ScatteringMatrix::new(r, t, t_prime, r_prime, omega)
}

/// `P[S] = sigma_x S sigma_x`: `(r, t, t', r') -> (r', t', t, r)`.
pub fn apply_parity(s: &ScatteringMatrix) -> Result<ScatteringMatrix> {
    s.require_symmetric_channels()?;
    Ok(ScatteringMatrix {
        r: s.r_prime.clone(),
        t: s.t_prime.clone(),
        t_prime: s.t.clone(),
        r_prime: s.r.clone(),
        omega: s.omega,
    })
}

/// `T[S](omega) = {S^-1(omega*)}*`. The argument must be `S` evaluated at
/// `omega*`; the result is tagged with `omega`.
pub fn apply_t(s_at_omega_star: &ScatteringMatrix) -> Result<ScatteringMatrix> {
    let omega = s_at_omega_star.omega.conj();
    let inv = invert_full(s_at_omega_star)?;
    let s = ScatteringMatrix::from_full(inv.as_ref(), s_at_omega_star.n_left(), omega)?;
    Ok(s.map_blocks(dense::conj))
}

/// `T'[S] = S^T` on the full matrix.
pub fn apply_tprime(s: &ScatteringMatrix) -> ScatteringMatrix {
    ScatteringMatrix {
        r: dense::transpose(s.r.as_ref()),
        t: dense::transpose(s.t_prime.as_ref()),
        t_prime: dense::transpose(s.t.as_ref()),
        r_prime: dense::transpose(s.r_prime.as_ref()),
        omega: s.omega,
    }
}

/// `PT[S](omega) = sigma_x {S^-1(omega*)}* sigma_x`.
pub fn apply_pt(s_at_omega_star: &ScatteringMatrix) -> Result<ScatteringMatrix> {
    apply_parity(&apply_t(s_at_omega_star)?)
}

/// `PTT'[S](omega) = sigma_x {S^-1(omega*)}^dagger sigma_x`.
pub fn apply_ptt(s_at_omega_star: &ScatteringMatrix) -> Result<ScatteringMatrix> {
    s_at_omega_star.require_symmetric_channels()?;
    let omega = s_at_omega_star.omega.conj();
    let inv = invert_full(s_at_omega_star)?;
    let adj = dense::adjoint(inv.as_ref());
    apply_parity(&ScatteringMatrix::from_full(
        adj.as_ref(),
        s_at_omega_star.n_left(),
        omega,
    )?)
}

fn invert_full(s: &ScatteringMatrix) -> Result<ComplexMatrix> {
    let full = s.full();
    let inv = dense::inverse_with_rcond(full.as_ref())?;
    if inv.rcond < RCOND_MIN {
        return Err(Error::Singular {
            omega: s.omega,
            what: "scattering matrix (evaluation at a zero of S)",
        });
    }
    Ok(inv.inverse)
}

/// Frobenius defect, absolute and relative to `|S|_F`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Defect {
    pub absolute: f64,
    pub relative: f64,
}

impl Defect {
    fn new(absolute: f64, reference: f64) -> Self {
        Self {
            absolute,
            relative: absolute / reference.max(f64::MIN_POSITIVE),
        }
    }
}

/// Defect of a PT- or PTT'-type constraint `sigma_x X(omega*) sigma_x S(omega) = 1`
/// with `X = S*` or `X = S^dagger`.
///
/// `blocks` holds the residual norms of the four block identities, in order:
/// the two off-diagonal identities (left-to-right, right-to-left) followed by
/// the two diagonal ones (right block, left block).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymmetryDefect {
    pub total: Defect,
    pub blocks: [f64; 4],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SymmetryVariant {
    Pt,
    Ptt,
}

fn swap_halves(a: MatRef<'_, Complex64>, n: usize) -> ComplexMatrix {
    let size = a.nrows();
    let p = |i: usize| if i < n { i + n } else { i - n };
    debug_assert_eq!(size, 2 * n);
    ComplexMatrix::from_fn(size, size, |i, j| a[(p(i), p(j))])
}

fn constraint_defect(
    s_at_omega: &ScatteringMatrix,
    s_at_omega_star: &ScatteringMatrix,
    variant: SymmetryVariant,
) -> Result<SymmetryDefect> {
    let n = s_at_omega.require_symmetric_channels()?;
    if s_at_omega_star.n_left() != n || s_at_omega_star.n_right() != n {
        return Err(Error::Dimension("S(omega) and S(omega*) differ in shape".into()));
    }
    let star = s_at_omega_star.full();
    let x = match variant {
        SymmetryVariant::Pt => dense::conj(star.as_ref()),
        SymmetryVariant::Ptt => dense::adjoint(star.as_ref()),
    };
    let lhs = swap_halves(x.as_ref(), n);
    let product = &lhs * &s_at_omega.full();
    let total = dense::identity_defect(product.as_ref());
    let p = product.as_ref();
    let block = |row: usize, col: usize| {
        let b = dense::sub(p, row * n, col * n, n, n);
        if row == col {
            dense::identity_defect(b.as_ref())
        } else {
            b.norm_l2()
        }
    };
    Ok(SymmetryDefect {
        total: Defect::new(total, s_at_omega.frobenius()),
        blocks: [block(1, 0), block(0, 1), block(1, 1), block(0, 0)],
    })
}

/// `|sigma_x S*(omega*) sigma_x S(omega) - 1|_F`; zero for PT-symmetric systems.
pub fn pt_defect(
    s_at_omega: &ScatteringMatrix,
    s_at_omega_star: &ScatteringMatrix,
) -> Result<SymmetryDefect> {
    constraint_defect(s_at_omega, s_at_omega_star, SymmetryVariant::Pt)
}

/// `|sigma_x S^dagger(omega*) sigma_x S(omega) - 1|_F`; zero for PTT'-symmetric systems.
pub fn ptt_defect(
    s_at_omega: &ScatteringMatrix,
    s_at_omega_star: &ScatteringMatrix,
) -> Result<SymmetryDefect> {
    constraint_defect(s_at_omega, s_at_omega_star, SymmetryVariant::Ptt)
}

/// `|S - S^T|_F`.
pub fn tprime_defect(s: &ScatteringMatrix) -> Defect {
    let full = s.full();
    let t = dense::transpose(full.as_ref());
    Defect::new(dense::diff_norm(full.as_ref(), t.as_ref()), s.frobenius())
}

/// Generalized flux conservation at real frequency:
/// `|sigma_x - S* sigma_x S|_F` (PT) or `|sigma_x - S^dagger sigma_x S|_F` (PTT').
pub fn flux_defect(s: &ScatteringMatrix, variant: SymmetryVariant) -> Result<Defect> {
    let omega = s.omega;
    if omega.im.abs() > 1e-12 * (1.0 + omega.re.abs()) {
        return Err(Error::Domain(format!(
            "flux conservation only holds at real frequency, got {omega}"
        )));
    }
    let n = s.require_symmetric_channels()?;
    let full = s.full();
    let x = match variant {
        SymmetryVariant::Pt => dense::conj(full.as_ref()),
        SymmetryVariant::Ptt => dense::adjoint(full.as_ref()),
    };
    let sigma_s = swap_rows(full.as_ref(), n);
    let rhs = &x * &sigma_s;
    let sigma = swap_rows(dense::identity(2 * n).as_ref(), n);
    Ok(Defect::new(
        dense::diff_norm(sigma.as_ref(), rhs.as_ref()),
        s.frobenius(),
    ))
}

fn swap_rows(a: MatRef<'_, Complex64>, n: usize) -> ComplexMatrix {
    let p = |i: usize| if i < n { i + n } else { i - n };
    ComplexMatrix::from_fn(a.nrows(), a.ncols(), |i, j| a[(p(i), j)])
}

/// Perfect transmission `r = r' = 0`, `t = t' = 1` on `n` channels.
pub fn transparent(n: usize, omega: Complex64) -> Result<ScatteringMatrix> {
    let eye = dense::identity(n);
    let zero = ComplexMatrix::zeros(n, n);
    ScatteringMatrix::new(zero.clone(), eye.clone(), eye, zero, omega)
}

/// Scalar multiple of the identity on `n_left = n_right = n` channels, used
/// for sanity checks of the symmetry operations.
pub fn scalar(c: Complex64, n: usize, omega: Complex64) -> Result<ScatteringMatrix> {
    let full = dense::scale(dense::identity(2 * n).as_ref(), c);
    ScatteringMatrix::from_full(full.as_ref(), n, omega)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn real_omega() -> Complex64 {
        c(0.3, 0.0)
    }

    /// Generic 2x2 unitary: an SU(2) rotation times a global phase.
    fn unitary_scalar_s(theta: f64, phi: f64, chi: f64, psi: f64, omega: Complex64) -> ScatteringMatrix {
        let (s, co) = theta.sin_cos();
        let e = |x: f64| Complex64::from_polar(1.0, x);
        let r = e(phi) * co;
        let tp = e(chi) * s;
        let u = ComplexMatrix::from_fn(2, 2, |i, j| match (i, j) {
            (0, 0) => r,
            (0, 1) => tp,
            (1, 0) => -(tp.conj()) * e(psi),
            _ => r.conj() * e(psi),
        });
        ScatteringMatrix::from_full(u.as_ref(), 1, omega).unwrap()
    }

    #[test]
    fn interface_limits() {
        let w = real_omega();
        let s0 = s_interface(0.0, 2, w).unwrap();
        let full = s0.full();
        let minus_one = dense::scale(dense::identity(4).as_ref(), c(-1.0, 0.0));
        assert!(dense::diff_norm(full.as_ref(), minus_one.as_ref()) < 1e-15);

        let s1 = s_interface(1.0, 2, w).unwrap();
        assert!(s1.r().norm_l2() < 1e-15 && s1.r_prime().norm_l2() < 1e-15);
        let ieye = dense::scale(dense::identity(2).as_ref(), I);
        assert!(dense::diff_norm(s1.t().as_ref(), ieye.as_ref()) < 1e-15);
        assert!(dense::diff_norm(s1.t_prime().as_ref(), ieye.as_ref()) < 1e-15);
    }

    #[test]
    fn interface_half_transparent() {
        let s = s_interface(0.5, 3, real_omega()).unwrap();
        let h = 0.5f64.sqrt();
        assert!((s.r()[(0, 0)] - c(-h, 0.0)).norm() < 1e-16);
        assert!((s.t()[(1, 1)] - c(0.0, h)).norm() < 1e-16);
        assert!(s.unitarity_defect() < 1e-15);
    }

    #[test]
    fn interface_rejects_bad_transparency() {
        assert!(matches!(InterfaceSpec::new(1.5), Err(Error::Domain(_))));
        assert!(matches!(InterfaceSpec::new(-0.1), Err(Error::Domain(_))));
    }

    #[test]
    fn alpha_has_unit_modulus() {
        for t in [0.0, 0.1, 0.5, 0.9, 1.0] {
            let a = InterfaceSpec::new(t).unwrap().alpha();
            assert!((a.norm() - 1.0).abs() < 1e-15);
            let a2 = a * a;
            assert!((a2 - c((1.0 - t).sqrt(), t.sqrt())).norm() < 1e-15);
        }
    }

    #[test]
    fn compose_with_transparent_is_identity() {
        let w = real_omega();
        let a = unitary_scalar_s(0.4, 0.2, 1.1, -0.7, w);
        let b = transparent(1, w).unwrap();
        let ab = compose(&a, &b).unwrap();
        assert!(dense::diff_norm(ab.full().as_ref(), a.full().as_ref()) < 1e-15);
    }

    #[test]
    fn compose_checks_shapes_and_frequency() {
        let a = s_interface(0.5, 2, real_omega()).unwrap();
        let b = s_interface(0.5, 3, real_omega()).unwrap();
        assert!(matches!(compose(&a, &b), Err(Error::Dimension(_))));
        let c2 = s_interface(0.5, 2, c(0.4, 0.0)).unwrap();
        assert!(matches!(compose(&a, &c2), Err(Error::Contract(_))));
    }

    #[test]
    fn compose_detects_resonance() {
        // two perfect mirrors with r_b r'_a = 1 trap a standing wave
        let w = real_omega();
        let mirror = ScatteringMatrix::from_full(
            ComplexMatrix::from_fn(2, 2, |i, j| if i == j { c(1.0, 0.0) } else { c(0.0, 0.0) }).as_ref(),
            1,
            w,
        )
        .unwrap();
        assert!(matches!(compose(&mirror, &mirror), Err(Error::OnResonance { .. })));
    }

    #[test]
    fn parity_swaps_blocks_and_is_an_involution() {
        let w = real_omega();
        let s = unitary_scalar_s(0.3, 0.5, -0.2, 0.9, w);
        let p = apply_parity(&s).unwrap();
        assert_eq!(p.r()[(0, 0)], s.r_prime()[(0, 0)]);
        assert_eq!(p.r_prime()[(0, 0)], s.r()[(0, 0)]);
        assert_eq!(p.t()[(0, 0)], s.t_prime()[(0, 0)]);
        let pp = apply_parity(&p).unwrap();
        for (x, y) in pp.full().col_as_slice(0).iter().zip(s.full().col_as_slice(0)) {
            assert_eq!(x, y);
        }
        let iface = s_interface(0.3, 2, w).unwrap();
        let pi = apply_parity(&iface).unwrap();
        assert!(dense::diff_norm(pi.full().as_ref(), iface.full().as_ref()) == 0.0);
    }

    #[test]
    fn parity_needs_balanced_channels() {
        let s = ScatteringMatrix::from_full(dense::identity(3).as_ref(), 1, real_omega()).unwrap();
        assert!(matches!(apply_parity(&s), Err(Error::Domain(_))));
    }

    #[test]
    fn time_reversal_of_unitary_is_transpose() {
        let w = real_omega();
        let s = unitary_scalar_s(0.7, 0.1, 0.4, 1.3, w);
        let ts = apply_t(&s).unwrap();
        let st = apply_tprime(&s);
        assert!(dense::diff_norm(ts.full().as_ref(), st.full().as_ref()) < 1e-14);
        let tts = apply_t(&ts).unwrap();
        assert!(dense::diff_norm(tts.full().as_ref(), s.full().as_ref()) < 1e-12);
    }

    #[test]
    fn time_reversal_of_scalar() {
        let z = c(0.5, -2.0);
        let s = scalar(z, 2, c(0.1, -0.2)).unwrap();
        let ts = apply_t(&s).unwrap();
        assert!((ts.r()[(0, 0)] - (c(1.0, 0.0) / z).conj()).norm() < 1e-15);
        assert!((ts.omega() - c(0.1, 0.2)).norm() < 1e-15);
        let zero = scalar(c(0.0, 0.0), 1, real_omega()).unwrap();
        assert!(matches!(apply_t(&zero), Err(Error::Singular { .. })));
    }

    #[test]
    fn interface_satisfies_all_constraints() {
        for t in [0.0, 0.25, 0.5, 1.0] {
            let s = s_interface(t, 2, real_omega()).unwrap();
            assert!(pt_defect(&s, &s).unwrap().total.absolute < 1e-15);
            assert!(ptt_defect(&s, &s).unwrap().total.absolute < 1e-15);
            assert_eq!(tprime_defect(&s).absolute, 0.0);
            assert!(flux_defect(&s, SymmetryVariant::Pt).unwrap().absolute < 1e-12);
            assert!(flux_defect(&s, SymmetryVariant::Ptt).unwrap().absolute < 1e-12);
        }
    }

    #[test]
    fn amplification_breaks_flux() {
        let s = s_interface(0.4, 1, real_omega()).unwrap();
        let doubled = ScatteringMatrix::from_full(
            dense::scale(s.full().as_ref(), c(2.0, 0.0)).as_ref(),
            1,
            real_omega(),
        )
        .unwrap();
        assert!(flux_defect(&doubled, SymmetryVariant::Pt).unwrap().absolute > 1.0);
        assert!(flux_defect(&doubled, SymmetryVariant::Ptt).unwrap().absolute > 1.0);
    }

    #[test]
    fn flux_requires_real_frequency() {
        let s = s_interface(0.4, 1, c(0.2, 0.1)).unwrap();
        assert!(matches!(flux_defect(&s, SymmetryVariant::Pt), Err(Error::Domain(_))));
    }

    #[test]
    fn generic_matrix_violates_pt() {
        let m = ComplexMatrix::from_fn(2, 2, |i, j| c(1.0 + i as f64, 0.3 * j as f64 - 0.1));
        let s = ScatteringMatrix::from_full(m.as_ref(), 1, real_omega()).unwrap();
        assert!(pt_defect(&s, &s).unwrap().total.absolute > 0.5);
    }
}
