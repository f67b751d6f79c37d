//! Random-matrix samplers.
//!
//! Every sample is a pure function of `(class, dim, seed, sample_index)`: the
//! seed selects a ChaCha20 key and the sample index selects the stream, so
//! samples can be drawn in any order or in parallel.

use faer::Mat;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::dense::{self, ComplexMatrix, ZERO};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnsembleClass {
    /// GOE: real symmetric Gaussian matrices.
    RealSymmetric,
    /// GUE: complex hermitian Gaussian matrices.
    ComplexHermitian,
    /// COE: symmetric unitary matrices `U U^T`.
    SymmetricUnitary,
    /// CUE: Haar-distributed unitary matrices.
    Unitary,
}

impl EnsembleClass {
    pub fn label(self) -> &'static str {
        match self {
            Self::RealSymmetric => "GOE",
            Self::ComplexHermitian => "GUE",
            Self::SymmetricUnitary => "COE",
            Self::Unitary => "CUE",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub class: EnsembleClass,
    pub dim: usize,
    pub seed: u64,
    pub sample_index: u64,
}

impl EnsembleSpec {
    pub fn new(class: EnsembleClass, dim: usize, seed: u64, sample_index: u64) -> Self {
        Self {
            class,
            dim,
            seed,
            sample_index,
        }
    }

    /// The generator behind this sample.
    pub fn rng(&self) -> ChaCha20Rng {
        let mut rng = ChaCha20Rng::seed_from_u64(self.seed);
        rng.set_stream(self.sample_index);
        rng
    }

    fn check_dim(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::Domain("ensemble dimension must be >= 1".into()));
        }
        Ok(())
    }
}

fn normal(rng: &mut ChaCha20Rng) -> f64 {
    StandardNormal.sample(rng)
}

/// Gaussian hermitian sample with unit off-diagonal variance.
///
/// GOE: `H_ij ~ N(0, 1)` for `i < j`, `H_ii ~ N(0, 2)`.
/// GUE: `E|H_ij|^2 = 1` with independent real and imaginary parts, `H_ii ~ N(0, 1)`.
/// Either way the spectrum fills the semicircle of radius `2 sqrt(M)`.
pub fn sample_gaussian_hermitian(spec: &EnsembleSpec) -> Result<ComplexMatrix> {
    spec.check_dim()?;
    let n = spec.dim;
    let mut rng = spec.rng();
    let mut h = Mat::<Complex64>::zeros(n, n);
    match spec.class {
        EnsembleClass::RealSymmetric => {
            for i in 0..n {
                h[(i, i)] = Complex64::new(std::f64::consts::SQRT_2 * normal(&mut rng), 0.0);
                for j in (i + 1)..n {
                    let x = Complex64::new(normal(&mut rng), 0.0);
                    h[(i, j)] = x;
                    h[(j, i)] = x;
                }
            }
        }
        EnsembleClass::ComplexHermitian => {
            let s = std::f64::consts::FRAC_1_SQRT_2;
            for i in 0..n {
                h[(i, i)] = Complex64::new(normal(&mut rng), 0.0);
                for j in (i + 1)..n {
                    let z = Complex64::new(s * normal(&mut rng), s * normal(&mut rng));
                    h[(i, j)] = z;
                    h[(j, i)] = z.conj();
                }
            }
        }
        other => {
            return Err(Error::Contract(format!(
                "{} is not a Gaussian ensemble",
                other.label()
            )))
        }
    }
    Ok(h)
}

/// Haar unitary (CUE) or `U U^T` with Haar `U` (COE).
///
/// The CUE sample is the QR factor of a complex Ginibre matrix with the
/// phases of `diag(R)` moved into `Q`.
pub fn sample_haar_unitary(spec: &EnsembleSpec) -> Result<ComplexMatrix> {
    spec.check_dim()?;
    if !matches!(
        spec.class,
        EnsembleClass::Unitary | EnsembleClass::SymmetricUnitary
    ) {
        return Err(Error::Contract(format!(
            "{} is not a circular ensemble",
            spec.class.label()
        )));
    }
    let n = spec.dim;
    let mut rng = spec.rng();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let z = Mat::<Complex64>::from_fn(n, n, |_, _| ZERO);
    let mut z = z;
    for j in 0..n {
        for i in 0..n {
            z[(i, j)] = Complex64::new(s * normal(&mut rng), s * normal(&mut rng));
        }
    }
    let qr = z.qr();
    let q = qr.compute_Q();
    let r = qr.R();
    let phases: Vec<Complex64> = (0..n)
        .map(|i| {
            let d = r[(i, i)];
            let a = d.norm();
            if a > 0.0 {
                d / a
            } else {
                Complex64::new(1.0, 0.0)
            }
        })
        .collect();
    let u = Mat::from_fn(n, n, |i, j| q[(i, j)] * phases[j]);
    match spec.class {
        EnsembleClass::Unitary => Ok(u),
        _ => {
            let ut = dense::transpose(u.as_ref());
            Ok(&u * &ut)
        }
    }
}

/// Mean level spacing of a hermitian matrix, measured over the central window
/// holding `window_fraction` of all levels.
pub fn mean_level_spacing(h: &ComplexMatrix, window_fraction: f64) -> Result<f64> {
    if !dense::is_hermitian(h.as_ref(), 1e-12) {
        return Err(Error::Contract("mean_level_spacing needs a hermitian matrix".into()));
    }
    let levels = dense::hermitian_eigenvalues(h.as_ref())?;
    spacing_of_levels(&levels, window_fraction)
}

/// As [`mean_level_spacing`] for an ascending list of levels.
pub fn spacing_of_levels(levels: &[f64], window_fraction: f64) -> Result<f64> {
    if !(window_fraction > 0.0 && window_fraction <= 1.0) {
        return Err(Error::Domain(format!(
            "window fraction {window_fraction} not in (0, 1]"
        )));
    }
    let n = levels.len();
    let k = ((window_fraction * n as f64).round() as usize).min(n);
    if k < 2 {
        return Err(Error::TooFewLevels);
    }
    let start = (n - k) / 2;
    let lo = levels[start];
    let hi = levels[start + k - 1];
    Ok((hi - lo) / (k - 1) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::dense::{adjoint, diff_norm, identity_defect, transpose};

    #[test]
    fn one_by_one_goe_is_a_real_scalar() {
        let h = sample_gaussian_hermitian(&EnsembleSpec::new(
            EnsembleClass::RealSymmetric,
            1,
            3,
            0,
        ))
        .unwrap();
        assert_eq!(h.nrows(), 1);
        assert_eq!(h[(0, 0)].im, 0.0);
        assert!(h[(0, 0)].re != 0.0);
    }

    #[test]
    fn samples_are_deterministic_and_stream_dependent() {
        let spec = EnsembleSpec::new(EnsembleClass::ComplexHermitian, 12, 42, 7);
        let a = sample_gaussian_hermitian(&spec).unwrap();
        let b = sample_gaussian_hermitian(&spec).unwrap();
        for j in 0..12 {
            for i in 0..12 {
                assert_eq!(a[(i, j)].re.to_bits(), b[(i, j)].re.to_bits());
                assert_eq!(a[(i, j)].im.to_bits(), b[(i, j)].im.to_bits());
            }
        }
        let c = sample_gaussian_hermitian(&EnsembleSpec { sample_index: 8, ..spec }).unwrap();
        assert!(diff_norm(a.as_ref(), c.as_ref()) > 1.0);
    }

    #[test]
    fn class_mismatch_is_a_contract_error() {
        let spec = EnsembleSpec::new(EnsembleClass::Unitary, 4, 1, 0);
        assert!(matches!(sample_gaussian_hermitian(&spec), Err(Error::Contract(_))));
        let spec = EnsembleSpec::new(EnsembleClass::RealSymmetric, 4, 1, 0);
        assert!(matches!(sample_haar_unitary(&spec), Err(Error::Contract(_))));
    }

    #[test]
    fn haar_samples_are_unitary_and_coe_is_symmetric() {
        for &class in &[EnsembleClass::Unitary, EnsembleClass::SymmetricUnitary] {
            for m in [1usize, 5, 40] {
                let f = sample_haar_unitary(&EnsembleSpec::new(class, m, 9, 2)).unwrap();
                let ff = &adjoint(f.as_ref()) * &f;
                assert!(identity_defect(ff.as_ref()) <= 1e-12 * m as f64);
                if class == EnsembleClass::SymmetricUnitary {
                    let ft = transpose(f.as_ref());
                    assert!(diff_norm(f.as_ref(), ft.as_ref()) <= 1e-12 * m as f64);
                }
            }
        }
    }

    #[test]
    fn spacing_of_equidistant_levels() {
        let h = dense::diag(&[0.0, 1.0, 2.0, 3.0].map(|x| Complex64::new(x, 0.0)));
        assert!((mean_level_spacing(&h, 1.0).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn spacing_rejects_tiny_windows_and_bad_fractions() {
        let levels = [0.0, 1.0, 2.0, 3.0];
        assert!(matches!(spacing_of_levels(&levels, 0.1), Err(Error::TooFewLevels)));
        assert!(matches!(spacing_of_levels(&levels, 0.0), Err(Error::Domain(_))));
        assert!(matches!(spacing_of_levels(&levels, 1.5), Err(Error::Domain(_))));
    }
}
