//! Stroboscopic quantum maps of the coupled resonators.
//!
//! One period of the evolution is
//!
//! ```text
//!     F_map = sqrt(C) diag(e^-mu F, e^mu F') sqrt(C)
//!     sqrt(C) = | a P + Q    -i b P  |      alpha = a + i b = sqrt(sqrt(R) + i sqrt(T))
//!               | -i b P     a P + Q |
//! ```
//!
//! with `F' = F^T` for PT symmetry and `F' = F` for PTT' symmetry, and `P`
//! the projector onto the `N` interface modes (the first `N` basis states).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::dense::{self, ComplexMatrix, I, ONE, ZERO};
use crate::scattering::InterfaceSpec;
use crate::spectra::stats;

/// Tolerance on `|F^dagger F - 1|_F / M` accepted by [`build_map`].
pub const UNITARITY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MapClass {
    Pt,
    PttPrime,
}

#[derive(Debug, Clone)]
pub struct QuantumMap {
    f: ComplexMatrix,
    n: usize,
    interface: InterfaceSpec,
    mu: f64,
    tau: f64,
    class: MapClass,
    matrix: ComplexMatrix,
}

/// Builds the map from a unitary `M x M` internal evolution `F`.
pub fn build_map(
    f: &ComplexMatrix,
    n: usize,
    transparency: f64,
    mu: f64,
    tau: f64,
    class: MapClass,
) -> Result<QuantumMap> {
    let m = dense::ensure_square(f.as_ref())?;
    dense::ensure_finite(f.as_ref())?;
    if n > m {
        return Err(Error::Domain(format!("N = {n} exceeds M = {m}")));
    }
    let interface = InterfaceSpec::new(transparency)?;
    if !(mu.is_finite() && mu >= 0.0) {
        return Err(Error::Domain(format!("rate mu = {mu} must be finite and >= 0")));
    }
    if !(tau.is_finite() && tau > 0.0) {
        return Err(Error::Domain(format!("period tau = {tau} must be > 0")));
    }
    let ff = &dense::adjoint(f.as_ref()) * f;
    let defect = dense::identity_defect(ff.as_ref());
    if defect > UNITARITY_TOL * m as f64 {
        return Err(Error::Contract(format!(
            "internal evolution is not unitary (defect {defect:.3e})"
        )));
    }

    let alpha = interface.alpha();
    let root_c = ComplexMatrix::from_fn(2 * m, 2 * m, |i, j| {
        let (bi, ii) = (i / m, i % m);
        let (bj, jj) = (j / m, j % m);
        if ii != jj {
            return ZERO;
        }
        let on_interface = ii < n;
        match (bi == bj, on_interface) {
            (true, true) => Complex64::new(alpha.re, 0.0),
            (true, false) => ONE,
            (false, true) => -I * alpha.im,
            (false, false) => ZERO,
        }
    });
    let right = match class {
        MapClass::Pt => dense::transpose(f.as_ref()),
        MapClass::PttPrime => f.clone(),
    };
    let (loss, gain) = ((-mu).exp(), mu.exp());
    let d = ComplexMatrix::from_fn(2 * m, 2 * m, |i, j| match (i / m, j / m) {
        (0, 0) => f[(i, j)] * loss,
        (1, 1) => right[(i - m, j - m)] * gain,
        _ => ZERO,
    });
    let matrix = &root_c * &d * &root_c;
    Ok(QuantumMap {
        f: f.clone(),
        n,
        interface,
        mu,
        tau,
        class,
        matrix,
    })
}

impl QuantumMap {
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn internal(&self) -> &ComplexMatrix {
        &self.f
    }

    pub fn m(&self) -> usize {
        self.f.nrows()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn transparency(&self) -> f64 {
        self.interface.transparency()
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn class(&self) -> MapClass {
        self.class
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MapSpectrum {
    pub eigenvalues: Vec<Complex64>,
    /// `omega_n = (i / tau) log lambda_n` on the principal branch, so that
    /// `Re omega` lies in `[-pi, pi) / tau`.
    pub quasienergies: Vec<Complex64>,
    /// `partner[n]` is the index matched to `1 / lambda_n*`.
    pub partner: Vec<usize>,
    /// Largest `|lambda_partner - 1 / lambda_n*|` over the matching.
    pub pairing_residual: f64,
}

impl MapSpectrum {
    pub fn max_modulus(&self) -> f64 {
        self.eigenvalues.iter().map(|l| l.norm()).fold(0.0, f64::max)
    }

    /// `sum_n ln |lambda_n|`, zero when gain and loss balance.
    pub fn log_modulus_sum(&self) -> f64 {
        let mut logs: Vec<f64> = self.eigenvalues.iter().map(|l| l.norm().ln()).collect();
        logs.sort_by(f64::total_cmp);
        stats::pairwise_sum(&logs)
    }
}

pub fn quasienergy(lambda: Complex64, tau: f64) -> Complex64 {
    Complex64::new(-lambda.arg(), lambda.norm().ln()) / tau
}

/// Eigenvalues and the self-inversive pairing `lambda -> 1 / lambda*`.
///
/// Pairing uses greedy minimal-distance matching between the spectrum and its
/// inverted conjugate, done in `lambda`-space so the log branch cut plays no role.
pub fn map_spectrum(map: &QuantumMap) -> Result<MapSpectrum> {
    let eigenvalues = dense::eig_general(map.matrix.as_ref())?;
    let targets: Vec<Complex64> = eigenvalues.iter().map(|l| ONE / l.conj()).collect();
    let (partner, pairing_residual) = stats::greedy_matching(&targets, &eigenvalues);
    let quasienergies = eigenvalues.iter().map(|&l| quasienergy(l, map.tau)).collect();
    Ok(MapSpectrum {
        eigenvalues,
        quasienergies,
        partner,
        pairing_residual,
    })
}

/// State after repeated application of the map, held as a unit vector times
/// `exp(log_norm)` so that long amplifying runs cannot overflow.
#[derive(Debug, Clone)]
pub struct Evolution {
    pub direction: Vec<Complex64>,
    pub log_norm: f64,
    /// `ln |psi_j|` for `j = 0..=k`.
    pub trace: Vec<f64>,
}

impl Evolution {
    /// `psi_k` itself; may overflow when `log_norm` is large.
    pub fn state(&self) -> Vec<Complex64> {
        let s = self.log_norm.exp();
        self.direction.iter().map(|z| z * s).collect()
    }

    /// Average growth rate `(ln |psi_k| - ln |psi_0|) / k`.
    pub fn growth_rate(&self) -> f64 {
        let k = self.trace.len() - 1;
        if k == 0 {
            return 0.0;
        }
        (self.trace[k] - self.trace[0]) / k as f64
    }
}

/// `F_map^k psi_0` by repeated application, renormalizing every step.
pub fn evolve(map: &QuantumMap, psi0: &[Complex64], steps: usize) -> Result<Evolution> {
    let dim = map.matrix.nrows();
    if psi0.len() != dim {
        return Err(Error::Dimension(format!(
            "state of length {} for a {dim}-dimensional map",
            psi0.len()
        )));
    }
    let norm0 = dense::vec_norm(psi0);
    if !(norm0.is_finite() && norm0 > 0.0) {
        return Err(Error::Domain("initial state must be finite and non-zero".into()));
    }
    let mut log_norm = norm0.ln();
    let mut direction: Vec<Complex64> = psi0.iter().map(|z| z / norm0).collect();
    let mut trace = Vec::with_capacity(steps + 1);
    trace.push(log_norm);
    for _ in 0..steps {
        let next = dense::mat_vec(map.matrix.as_ref(), &direction);
        let n = dense::vec_norm(&next);
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::NonFinite);
        }
        log_norm += n.ln();
        direction = next.into_iter().map(|z| z / n).collect();
        trace.push(log_norm);
    }
    Ok(Evolution {
        direction,
        log_norm,
        trace,
    })
}

/// `|sigma_x [F_map^-1]* sigma_x - F_map|_F` (PT) or the same with the
/// adjoint (PTT').
pub fn map_pt_defect(map: &QuantumMap) -> Result<f64> {
    symmetry_defect_of(&map.matrix, map.class)
}

/// Defect of the symmetry identity of `class` for an arbitrary `2M x 2M` matrix.
pub fn symmetry_defect_of(matrix: &ComplexMatrix, class: MapClass) -> Result<f64> {
    let dim = dense::ensure_square(matrix.as_ref())?;
    if dim % 2 != 0 {
        return Err(Error::Dimension(format!("map dimension {dim} is odd")));
    }
    let m = dim / 2;
    let inv = dense::inverse_with_rcond(matrix.as_ref())?;
    if inv.rcond == 0.0 {
        return Err(Error::Singular {
            omega: ZERO,
            what: "quantum map",
        });
    }
    let x = match class {
        MapClass::Pt => dense::conj(inv.inverse.as_ref()),
        MapClass::PttPrime => dense::adjoint(inv.inverse.as_ref()),
    };
    let p = |i: usize| if i < m { i + m } else { i - m };
    let swapped = ComplexMatrix::from_fn(dim, dim, |i, j| x[(p(i), p(j))]);
    Ok(dense::diff_norm(swapped.as_ref(), matrix.as_ref()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ensemble::{sample_haar_unitary, EnsembleClass, EnsembleSpec};

    fn haar(class: EnsembleClass, m: usize, seed: u64) -> ComplexMatrix {
        sample_haar_unitary(&EnsembleSpec::new(class, m, seed, 0)).unwrap()
    }

    #[test]
    fn rejects_non_unitary_and_bad_parameters() {
        let f = dense::scale(dense::identity(3).as_ref(), Complex64::new(1.1, 0.0));
        assert!(matches!(build_map(&f, 1, 0.5, 0.1, 1.0, MapClass::Pt), Err(Error::Contract(_))));
        let f = dense::identity(3);
        assert!(build_map(&f, 4, 0.5, 0.1, 1.0, MapClass::Pt).is_err());
        assert!(build_map(&f, 1, 1.5, 0.1, 1.0, MapClass::Pt).is_err());
        assert!(build_map(&f, 1, 0.5, -0.1, 1.0, MapClass::Pt).is_err());
        assert!(build_map(&f, 1, 0.5, 0.1, 0.0, MapClass::Pt).is_err());
    }

    #[test]
    fn hermitian_limit_is_unitary() {
        let f = haar(EnsembleClass::Unitary, 12, 1);
        let map = build_map(&f, 3, 0.4, 0.0, 1.0, MapClass::Pt).unwrap();
        let ff = &dense::adjoint(map.matrix().as_ref()) * map.matrix();
        assert!(dense::identity_defect(ff.as_ref()) < 1e-10);
        let spec = map_spectrum(&map).unwrap();
        assert!(spec.eigenvalues.iter().all(|l| (l.norm() - 1.0).abs() < 1e-10));
    }

    #[test]
    fn opaque_interface_decouples() {
        let f = haar(EnsembleClass::Unitary, 6, 2);
        let mu = 0.3;
        let map = build_map(&f, 2, 0.0, mu, 1.0, MapClass::Pt).unwrap();
        let off = dense::sub(map.matrix().as_ref(), 0, 6, 6, 6);
        assert_eq!(off.norm_l2(), 0.0);
        let spec = map_spectrum(&map).unwrap();
        let shrunk = spec.eigenvalues.iter().filter(|l| (l.norm() - (-mu).exp()).abs() < 1e-12).count();
        let grown = spec.eigenvalues.iter().filter(|l| (l.norm() - mu.exp()).abs() < 1e-12).count();
        assert_eq!((shrunk, grown), (6, 6));
    }

    #[test]
    fn symmetry_identity_holds_and_discriminates() {
        let f = haar(EnsembleClass::Unitary, 8, 3);
        let pt = build_map(&f, 2, 0.5, 0.4, 1.0, MapClass::Pt).unwrap();
        assert!(map_pt_defect(&pt).unwrap() < 1e-10);
        let ptt = build_map(&f, 2, 0.5, 0.4, 1.0, MapClass::PttPrime).unwrap();
        assert!(map_pt_defect(&ptt).unwrap() < 1e-10);
        assert!(symmetry_defect_of(ptt.matrix(), MapClass::Pt).unwrap() > 0.1);

        let mut perturbed = pt.matrix().clone();
        perturbed[(0, 0)] += Complex64::new(0.1, 0.0);
        assert!(symmetry_defect_of(&perturbed, MapClass::Pt).unwrap() >= 0.1);
    }

    #[test]
    fn symmetric_internal_evolution_merges_the_classes() {
        let f = haar(EnsembleClass::SymmetricUnitary, 7, 4);
        let pt = build_map(&f, 3, 0.3, 0.2, 1.0, MapClass::Pt).unwrap();
        let ptt = build_map(&f, 3, 0.3, 0.2, 1.0, MapClass::PttPrime).unwrap();
        assert!(dense::diff_norm(pt.matrix().as_ref(), ptt.matrix().as_ref()) < 1e-12);
    }

    #[test]
    fn determinant_and_self_inversive_spectrum() {
        let f = haar(EnsembleClass::SymmetricUnitary, 64, 5);
        let map = build_map(&f, 8, 0.5, 0.1, 1.0, MapClass::Pt).unwrap();
        let spec = map_spectrum(&map).unwrap();
        assert_eq!(spec.eigenvalues.len(), 128);
        assert!(spec.pairing_residual < 1e-8);
        assert!(spec.log_modulus_sum().abs() < 1e-8);
        let det_map = dense::log_det(map.matrix().as_ref()).unwrap().value();
        let det_f = dense::log_det(f.as_ref()).unwrap().value();
        assert!((det_map - det_f * det_f).norm() < 1e-10);
        for (n, &p) in spec.partner.iter().enumerate() {
            assert_eq!(spec.partner[p], n);
        }
    }

    #[test]
    fn quasienergies_come_in_conjugate_pairs() {
        let f = haar(EnsembleClass::Unitary, 10, 6);
        let map = build_map(&f, 4, 0.9, 0.5, 2.0, MapClass::Pt).unwrap();
        let spec = map_spectrum(&map).unwrap();
        let period = 2.0 * std::f64::consts::PI / map.tau();
        for (n, &p) in spec.partner.iter().enumerate() {
            let (w, wp) = (spec.quasienergies[n], spec.quasienergies[p]);
            let dre = (w.re - wp.re).abs();
            let wrapped = dre.min(period - dre);
            assert!(wrapped < 1e-8 && (w.im + wp.im).abs() < 1e-8);
            assert!(w.re.abs() <= period / 2.0);
        }
    }

    #[test]
    fn evolution_zero_steps_and_unitary_norm() {
        let f = haar(EnsembleClass::Unitary, 5, 7);
        let map = build_map(&f, 2, 0.5, 0.0, 1.0, MapClass::Pt).unwrap();
        let psi0: Vec<Complex64> = (0..10).map(|k| Complex64::new(k as f64, 1.0)).collect();
        let e = evolve(&map, &psi0, 0).unwrap();
        for (a, b) in e.state().iter().zip(&psi0) {
            assert!((a - b).norm() < 1e-14);
        }
        let e = evolve(&map, &psi0, 1000).unwrap();
        let n0 = dense::vec_norm(&psi0);
        assert!((e.log_norm.exp() - n0).abs() < 1e-9 * n0);
        assert!(evolve(&map, &[ZERO; 10], 3).is_err());
        assert!(evolve(&map, &psi0[..4], 3).is_err());
    }

    #[test]
    fn growth_rate_matches_leading_eigenvalue() {
        let f = haar(EnsembleClass::Unitary, 16, 8);
        let map = build_map(&f, 4, 0.5, 0.3, 1.0, MapClass::Pt).unwrap();
        let lead = map_spectrum(&map).unwrap().max_modulus().ln();
        let psi0: Vec<Complex64> = (0..32).map(|k| Complex64::new((k as f64).sin(), (k as f64).cos())).collect();
        let rate = evolve(&map, &psi0, 1000).unwrap().growth_rate();
        assert!((rate - lead).abs() < 0.02 * lead.abs());
    }
}
