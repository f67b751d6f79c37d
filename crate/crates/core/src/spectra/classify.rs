//! Sorting a spectrum into real eigenvalues and complex-conjugate pairs.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::stats::greedy_matching;
use crate::error::{Error, Result};

/// Tolerances in units of the mean level spacing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// `|Im omega| <= eps_real * Delta` counts as real.
    pub eps_real: f64,
    /// Matched pairs further apart than `delta_pair * Delta` are rejected.
    pub delta_pair: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            eps_real: 1e-7,
            delta_pair: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectrumClassification {
    pub eigenvalues: Vec<Complex64>,
    /// `(n, m)` with `Im omega_n > 0` and `omega_m ~ omega_n*`.
    pub pairs: Vec<(usize, usize)>,
    pub reals: Vec<usize>,
    pub unpaired: Vec<usize>,
    pub fraction_complex: f64,
    /// Largest `|omega_m - omega_n*|` over accepted pairs, absolute.
    pub pairing_residual: f64,
}

impl SpectrumClassification {
    /// Index of the partner of each eigenvalue (`None` for reals and unpaired).
    pub fn partners(&self) -> Vec<Option<usize>> {
        let mut p = vec![None; self.eigenvalues.len()];
        for &(a, b) in &self.pairs {
            p[a] = Some(b);
            p[b] = Some(a);
        }
        p
    }
}

/// Greedy minimal-distance matching between the upper-half-plane eigenvalues
/// and the conjugates of the lower-half-plane ones.
pub fn classify_spectrum(eigs: &[Complex64], delta: f64, tol: Tolerances) -> Result<SpectrumClassification> {
    if !(tol.eps_real > 0.0 && tol.delta_pair > 0.0) {
        return Err(Error::Domain("classification tolerances must be > 0".into()));
    }
    if !(delta.is_finite() && delta > 0.0) {
        return Err(Error::Domain(format!("level spacing {delta} must be > 0")));
    }
    let cut = tol.eps_real * delta;
    let upper: Vec<usize> = (0..eigs.len()).filter(|&k| eigs[k].im > cut).collect();
    let lower: Vec<usize> = (0..eigs.len()).filter(|&k| eigs[k].im < -cut).collect();
    let reals: Vec<usize> = (0..eigs.len()).filter(|&k| eigs[k].im.abs() <= cut).collect();

    let a: Vec<Complex64> = upper.iter().map(|&k| eigs[k]).collect();
    let b: Vec<Complex64> = lower.iter().map(|&k| eigs[k].conj()).collect();
    let (assign, _) = greedy_matching(&a, &b);

    let mut pairs = Vec::new();
    let mut unpaired = Vec::new();
    let mut matched_lower = vec![false; lower.len()];
    let mut residual = 0.0f64;
    for (i, &j) in assign.iter().enumerate() {
        if j == usize::MAX {
            unpaired.push(upper[i]);
            continue;
        }
        let d = (a[i] - b[j]).norm();
        if d <= tol.delta_pair * delta {
            pairs.push((upper[i], lower[j]));
            matched_lower[j] = true;
            residual = residual.max(d);
        } else {
            unpaired.push(upper[i]);
        }
    }
    unpaired.extend((0..lower.len()).filter(|&j| !matched_lower[j]).map(|j| lower[j]));
    unpaired.sort_unstable();

    let fraction_complex = if eigs.is_empty() {
        0.0
    } else {
        2.0 * pairs.len() as f64 / eigs.len() as f64
    };
    Ok(SpectrumClassification {
        eigenvalues: eigs.to_vec(),
        pairs,
        reals,
        unpaired,
        fraction_complex,
        pairing_residual: residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn one_pair_one_real() {
        let cl = classify_spectrum(&[c(1.0, 2.0), c(1.0, -2.0), c(3.0, 0.0)], 1.0, Tolerances::default()).unwrap();
        assert_eq!(cl.pairs, vec![(0, 1)]);
        assert_eq!(cl.reals, vec![2]);
        assert!(cl.unpaired.is_empty());
        assert!((cl.fraction_complex - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(cl.partners(), vec![Some(1), Some(0), None]);
    }

    #[test]
    fn real_spectrum_has_no_complex_fraction() {
        let eigs: Vec<Complex64> = (0..10).map(|k| c(k as f64, 1e-12)).collect();
        let cl = classify_spectrum(&eigs, 1.0, Tolerances::default()).unwrap();
        assert_eq!(cl.fraction_complex, 0.0);
        assert_eq!(cl.reals.len(), 10);
    }

    #[test]
    fn unmatched_eigenvalues_are_flagged() {
        let cl = classify_spectrum(&[c(0.0, 1.0), c(0.5, -1.0), c(2.0, 1.0)], 1.0, Tolerances::default()).unwrap();
        assert!(cl.pairs.is_empty());
        assert_eq!(cl.unpaired, vec![0, 1, 2]);
        let every: usize = cl.pairs.len() * 2 + cl.reals.len() + cl.unpaired.len();
        assert_eq!(every, 3);
    }

    #[test]
    fn rejects_bad_tolerances() {
        let bad = Tolerances {
            eps_real: 0.0,
            delta_pair: 1e-6,
        };
        assert!(classify_spectrum(&[], 1.0, bad).is_err());
        assert!(classify_spectrum(&[], 0.0, Tolerances::default()).is_err());
    }
}
