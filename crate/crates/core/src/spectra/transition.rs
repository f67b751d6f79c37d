//! Random-matrix experiments on the real-to-complex transition.
//!
//! Every sample draws a resonator Hamiltonian from the Gaussian ensemble of
//! its symmetry class, measures its level spacing `Delta`, and diagonalizes the
//! closed effective Hamiltonian over a grid of gain/loss rates. Only
//! eigenvalues whose real part lies in the central half of the resonator band
//! (between the 25th and 75th percentile of its levels) are counted.
//!
//! Samples are independent and run in parallel; per-sample results are
//! collected in index order and reduced with pairwise summation, so the
//! output does not depend on the thread count.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::classify::{classify_spectrum, Tolerances};
use super::stats::{self, first_crossing, histogram, ks_distance, mean_and_stderr, quantile_sorted};
use crate::error::{Error, Result};
use crate::linalg::dense;
use crate::resonator::{self, build_effective_hamiltonian, ResonatorModel, SymmetryClass};
use crate::scattering::SymmetryVariant;

/// Mesoscopic scales of a resonator with `N` channels of transparency `T`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaleReport {
    pub delta: f64,
    /// `E_T = N T Delta`.
    pub thouless_energy: f64,
    /// `g = N T`.
    pub conductance: f64,
    /// `mu_0 = sqrt(N) Delta / 2 pi`.
    pub mu0: f64,
    /// `t_H = 1 / Delta`.
    pub heisenberg_time: f64,
    /// `t_dwell = 1 / E_T`.
    pub dwell_time: f64,
    /// `N sqrt(T) Delta / 2 pi`, the onset for weakly coupled T'-symmetric resonators.
    pub weak_coupling_scale: f64,
    /// `sqrt(N T) Delta / 2 pi`, the crossover without T' symmetry.
    pub broken_tprime_scale: f64,
}

impl ScaleReport {
    pub fn new(delta: f64, n: usize, transparency: f64) -> Result<Self> {
        if !(delta.is_finite() && delta > 0.0 && n > 0 && transparency > 0.0 && transparency <= 1.0) {
            return Err(Error::Domain("scales need Delta > 0, N >= 1 and 0 < T <= 1".into()));
        }
        let nf = n as f64;
        let two_pi = 2.0 * std::f64::consts::PI;
        let conductance = nf * transparency;
        let thouless_energy = conductance * delta;
        Ok(Self {
            delta,
            thouless_energy,
            conductance,
            mu0: nf.sqrt() * delta / two_pi,
            heisenberg_time: 1.0 / delta,
            dwell_time: 1.0 / thouless_energy,
            weak_coupling_scale: nf * transparency.sqrt() * delta / two_pi,
            broken_tprime_scale: conductance.sqrt() * delta / two_pi,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionConfig {
    pub class: SymmetryClass,
    pub m: usize,
    pub n: usize,
    pub transparency: f64,
    /// Gain/loss rates in units of each sample's `mu_0`.
    pub mu_over_mu0: Vec<f64>,
    pub samples: usize,
    pub seed: u64,
    pub tolerances: Tolerances,
    /// Bins of the `|Im omega| / mu` histogram on `[0, 1]`.
    pub bins: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TransitionPoint {
    pub mu_over_mu0: f64,
    /// Sample mean of the absolute rate `mu`.
    pub mu_mean: f64,
    pub frac_complex_mean: f64,
    pub frac_complex_stderr: f64,
    /// Sample mean of the largest `Im omega` among central eigenvalues.
    pub max_im_mean: f64,
    /// Pooled `|Im omega| / mu` density on `[0, 1]` (empty at `mu = 0`).
    pub histogram: Vec<f64>,
    /// Eigenvalues the classifier could not pair, summed over samples.
    pub unpaired: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TransitionScan {
    pub config: TransitionConfig,
    pub points: Vec<TransitionPoint>,
    /// Interpolated rate where the mean complex fraction reaches 1/2.
    pub mu_half_over_mu0: Option<f64>,
    /// Scales at the sample-mean level spacing.
    pub scales: ScaleReport,
}

impl TransitionScan {
    pub fn mu_half(&self) -> Option<f64> {
        self.mu_half_over_mu0.map(|x| x * self.scales.mu0)
    }
}

struct SampleAtMu {
    mu: f64,
    fraction: f64,
    max_im: f64,
    unpaired: usize,
    imbalance: Vec<f64>,
}

struct Sample {
    delta: f64,
    points: Vec<SampleAtMu>,
}

/// Eigenvalues of the closed effective Hamiltonian of `model` at rate `mu`.
fn spectrum_at(model: &ResonatorModel, gamma: &[f64], mu: f64) -> Result<Vec<Complex64>> {
    match model.class().variant() {
        SymmetryVariant::Pt => dense::eig_real(resonator::pt_real_form(model.h(), gamma, mu).as_ref()),
        SymmetryVariant::Ptt => build_effective_hamiltonian(&model.with_mu(mu)?)?.eigenvalues(),
    }
}

/// Levels of `H` and the central band `[q25, q75]`.
fn central_band(model: &ResonatorModel) -> Result<(f64, f64)> {
    let levels = dense::hermitian_eigenvalues(model.h().as_ref())?;
    Ok((quantile_sorted(&levels, 0.25), quantile_sorted(&levels, 0.75)))
}

fn run_sample(
    class: SymmetryClass,
    m: usize,
    n: usize,
    transparency: f64,
    seed: u64,
    index: u64,
    rates: impl Fn(&ResonatorModel) -> Result<Vec<f64>>,
    tol: Tolerances,
) -> Result<Sample> {
    let model = ResonatorModel::sample(class, m, n, transparency, 0.0, seed, index)?;
    let gamma = model.coupling().gamma_diagonal(m);
    let (lo, hi) = central_band(&model)?;
    let delta = model.delta();
    let mut points = Vec::new();
    for mu in rates(&model)? {
        let eigs = spectrum_at(&model, &gamma, mu)?;
        let central: Vec<Complex64> = eigs.into_iter().filter(|z| z.re >= lo && z.re <= hi).collect();
        let cl = classify_spectrum(&central, delta, tol)?;
        let max_im = central.iter().map(|z| z.im).fold(f64::NEG_INFINITY, f64::max);
        let imbalance = if mu > 0.0 {
            central.iter().map(|z| z.im.abs() / mu).collect()
        } else {
            Vec::new()
        };
        points.push(SampleAtMu {
            mu,
            fraction: cl.fraction_complex,
            max_im: if max_im.is_finite() { max_im } else { 0.0 },
            unpaired: cl.unpaired.len(),
            imbalance,
        });
    }
    Ok(Sample { delta, points })
}

fn validate(m: usize, n: usize, transparency: f64, samples: usize) -> Result<()> {
    if n == 0 || n > m {
        return Err(Error::Domain(format!("need 1 <= N <= M, got N = {n}, M = {m}")));
    }
    if !(transparency > 0.0 && transparency <= 1.0) {
        return Err(Error::Domain(format!("transparency {transparency} not in (0, 1]")));
    }
    if samples == 0 {
        return Err(Error::Domain("need at least one sample".into()));
    }
    Ok(())
}

/// Ensemble statistics of the complex fraction over a grid of rates.
pub fn transition_scan(cfg: &TransitionConfig) -> Result<TransitionScan> {
    validate(cfg.m, cfg.n, cfg.transparency, cfg.samples)?;
    if cfg.mu_over_mu0.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
        return Err(Error::Domain("rates must be finite and >= 0".into()));
    }
    let sqrt_n = (cfg.n as f64).sqrt();
    let samples: Vec<Sample> = (0..cfg.samples as u64)
        .into_par_iter()
        .map(|i| {
            run_sample(
                cfg.class,
                cfg.m,
                cfg.n,
                cfg.transparency,
                cfg.seed,
                i,
                |model| {
                    let mu0 = sqrt_n * model.delta() / (2.0 * std::f64::consts::PI);
                    Ok(cfg.mu_over_mu0.iter().map(|x| x * mu0).collect())
                },
                cfg.tolerances,
            )
        })
        .collect::<Result<_>>()?;

    let points = (0..cfg.mu_over_mu0.len())
        .map(|k| {
            let column = |f: fn(&SampleAtMu) -> f64| -> Vec<f64> { samples.iter().map(|s| f(&s.points[k])).collect() };
            let (frac_mean, frac_err) = mean_and_stderr(&column(|p| p.fraction));
            let pooled: Vec<f64> = samples.iter().flat_map(|s| s.points[k].imbalance.iter().copied()).collect();
            TransitionPoint {
                mu_over_mu0: cfg.mu_over_mu0[k],
                mu_mean: mean_and_stderr(&column(|p| p.mu)).0,
                frac_complex_mean: frac_mean,
                frac_complex_stderr: frac_err,
                max_im_mean: mean_and_stderr(&column(|p| p.max_im)).0,
                histogram: if pooled.is_empty() {
                    Vec::new()
                } else {
                    histogram(&pooled, 0.0, 1.0, cfg.bins)
                },
                unpaired: samples.iter().map(|s| s.points[k].unpaired).sum(),
            }
        })
        .collect::<Vec<_>>();

    let xs: Vec<f64> = points.iter().map(|p| p.mu_over_mu0).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.frac_complex_mean).collect();
    let deltas: Vec<f64> = samples.iter().map(|s| s.delta).collect();
    let delta_mean = stats::pairwise_sum(&deltas) / deltas.len() as f64;
    Ok(TransitionScan {
        config: cfg.clone(),
        points,
        mu_half_over_mu0: first_crossing(&xs, &ys, 0.5),
        scales: ScaleReport::new(delta_mean, cfg.n, cfg.transparency)?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImbalanceConfig {
    pub class: SymmetryClass,
    /// `(M, N)` for every system size compared.
    pub sizes: Vec<(usize, usize)>,
    pub transparency: f64,
    /// Rate in units of each sample's Thouless energy `N T Delta`.
    pub mu_over_et: f64,
    pub samples: usize,
    pub seed: u64,
    pub bins: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ImbalanceReport {
    pub config: ImbalanceConfig,
    /// Pooled `|Im omega| / mu` of central eigenvalues, per size.
    pub values: Vec<Vec<f64>>,
    /// Normalized histograms on `[0, 1]`, per size.
    pub histograms: Vec<Vec<f64>>,
    /// KS distance between successive sizes.
    pub ks_successive: Vec<f64>,
}

impl ImbalanceReport {
    /// Fraction of pooled values above `x`, per size.
    pub fn fraction_above(&self, x: f64) -> Vec<f64> {
        self.values
            .iter()
            .map(|v| v.iter().filter(|&&y| y > x).count() as f64 / v.len().max(1) as f64)
            .collect()
    }
}

/// Distribution of `|Im omega| / mu` at fixed `mu / E_T` for several sizes.
pub fn imbalance_distribution(cfg: &ImbalanceConfig) -> Result<ImbalanceReport> {
    if !(cfg.mu_over_et.is_finite() && cfg.mu_over_et > 0.0) {
        return Err(Error::Domain("rate must be > 0".into()));
    }
    let mut values = Vec::with_capacity(cfg.sizes.len());
    for &(m, n) in &cfg.sizes {
        validate(m, n, cfg.transparency, cfg.samples)?;
        let et_per_delta = n as f64 * cfg.transparency;
        let samples: Vec<Sample> = (0..cfg.samples as u64)
            .into_par_iter()
            .map(|i| {
                run_sample(
                    cfg.class,
                    m,
                    n,
                    cfg.transparency,
                    cfg.seed,
                    i,
                    |model| Ok(vec![cfg.mu_over_et * et_per_delta * model.delta()]),
                    Tolerances::default(),
                )
            })
            .collect::<Result<_>>()?;
        values.push(samples.into_iter().flat_map(|s| s.points[0].imbalance.clone()).collect::<Vec<f64>>());
    }
    let histograms = values.iter().map(|v| histogram(v, 0.0, 1.0, cfg.bins)).collect();
    let ks_successive = values.windows(2).map(|w| ks_distance(&w[0], &w[1])).collect();
    Ok(ImbalanceReport {
        config: cfg.clone(),
        values,
        histograms,
        ks_successive,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config(class: SymmetryClass) -> TransitionConfig {
        TransitionConfig {
            class,
            m: 24,
            n: 3,
            transparency: 1.0,
            mu_over_mu0: vec![0.0, 0.5, 1.0, 2.0, 4.0, 8.0],
            samples: 6,
            seed: 5,
            tolerances: Tolerances::default(),
            bins: 10,
        }
    }

    #[test]
    fn scale_report_relations() {
        let s = ScaleReport::new(0.5, 10, 0.4).unwrap();
        assert!((s.thouless_energy / s.delta - s.conductance).abs() < 1e-14);
        assert!((s.dwell_time * s.thouless_energy - 1.0).abs() < 1e-14);
        assert!((s.mu0 - 10f64.sqrt() * 0.5 / (2.0 * std::f64::consts::PI)).abs() < 1e-15);
        assert!(ScaleReport::new(0.0, 10, 0.4).is_err());
    }

    #[test]
    fn scan_starts_real_and_turns_complex() {
        for class in [SymmetryClass::PtWithTprime, SymmetryClass::PttPrime] {
            let scan = transition_scan(&small_config(class)).unwrap();
            assert_eq!(scan.points[0].frac_complex_mean, 0.0);
            assert!(scan.points[0].histogram.is_empty());
            assert!(scan.points.last().unwrap().frac_complex_mean > 0.5);
            assert!(scan.mu_half_over_mu0.is_some());
            assert!(scan.points.iter().all(|p| p.unpaired == 0));
            let area: f64 = scan.points[3].histogram.iter().sum::<f64>() / 10.0;
            assert!((area - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn scan_is_independent_of_thread_count() {
        let cfg = small_config(SymmetryClass::PtBrokenTprime);
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let three = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let a = one.install(|| transition_scan(&cfg)).unwrap();
        let b = three.install(|| transition_scan(&cfg)).unwrap();
        for (p, q) in a.points.iter().zip(&b.points) {
            assert_eq!(p.frac_complex_mean.to_bits(), q.frac_complex_mean.to_bits());
            assert_eq!(p.max_im_mean.to_bits(), q.max_im_mean.to_bits());
        }
    }

    #[test]
    fn imbalance_is_bounded_by_the_rate() {
        let cfg = ImbalanceConfig {
            class: SymmetryClass::PtWithTprime,
            sizes: vec![(20, 2), (40, 4)],
            transparency: 1.0,
            mu_over_et: 1.0,
            samples: 3,
            seed: 1,
            bins: 20,
        };
        let rep = imbalance_distribution(&cfg).unwrap();
        assert_eq!(rep.ks_successive.len(), 1);
        for v in &rep.values {
            assert!(v.iter().all(|&x| x <= 1.0 + 1e-9));
        }
    }
}
