//! Complex roots of matrix-valued functions: poles and zeros of the open
//! coupled system, and the laser threshold.
//!
//! Roots of `det A(omega)` are found by Newton iteration on `log det A`, using
//! `d/domega log det A = tr(A^-1 A')` with a central-difference `A'`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::dense::{self, ComplexMatrix};
use crate::resonator::{self, ResonatorModel};

/// Rectangle `[re_min, re_max] x [im_min, im_max]` of the complex plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Region {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Region {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Result<Self> {
        let ok = [re_min, re_max, im_min, im_max].iter().all(|x| x.is_finite())
            && re_min <= re_max
            && im_min <= im_max;
        if !ok {
            return Err(Error::Domain("region bounds must be finite and ordered".into()));
        }
        Ok(Self {
            re_min,
            re_max,
            im_min,
            im_max,
        })
    }

    pub fn contains(&self, z: Complex64) -> bool {
        z.re >= self.re_min && z.re <= self.re_max && z.im >= self.im_min && z.im <= self.im_max
    }

    pub fn is_empty(&self) -> bool {
        self.re_min == self.re_max || self.im_min == self.im_max
    }

    /// Smallest region holding `points`, widened by `margin` on every side.
    pub fn around(points: &[Complex64], margin: f64) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Domain("cannot bound an empty point set".into()));
        }
        let f = |g: fn(f64, f64) -> f64, init: f64, part: fn(&Complex64) -> f64| {
            points.iter().map(part).fold(init, g)
        };
        Self::new(
            f(f64::min, f64::INFINITY, |z| z.re) - margin,
            f(f64::max, f64::NEG_INFINITY, |z| z.re) + margin,
            f(f64::min, f64::INFINITY, |z| z.im) - margin,
            f(f64::max, f64::NEG_INFINITY, |z| z.im) + margin,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RootOptions {
    /// Frequency scale, normally the mean level spacing.
    pub scale: f64,
    /// Finite-difference step, in units of `scale`.
    pub step: f64,
    pub max_iterations: usize,
    /// Newton steps shorter than this (units of `scale`) count as converged.
    pub convergence: f64,
    /// Roots closer than this (units of `scale`) are merged.
    pub dedup: f64,
    /// Accepted roots must have a `log10` residual (see [`Root`]) below this.
    pub verify_log10: f64,
    /// Grid seeds per `scale` along each axis.
    pub seed_density: f64,
}

impl RootOptions {
    pub fn new(scale: f64) -> Self {
        Self {
            scale,
            step: 1e-6,
            max_iterations: 50,
            convergence: 1e-11,
            dedup: 1e-8,
            verify_log10: -6.0,
            seed_density: 4.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Root {
    pub omega: Complex64,
    /// `log10(|det A| / prod_j max(|a_j|, 1))` at the root, `a_j` the columns.
    pub log10_residual: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct RootReport {
    pub roots: Vec<Root>,
    /// Seeds whose iteration failed to converge or left the region.
    pub discarded_seeds: Vec<Complex64>,
}

impl RootReport {
    pub fn omegas(&self) -> Vec<Complex64> {
        self.roots.iter().map(|r| r.omega).collect()
    }
}

/// Seeds on a regular grid covering `region` with `density` points per `scale`.
pub fn grid_seeds(region: &Region, scale: f64, density: f64) -> Vec<Complex64> {
    if region.is_empty() || !(scale > 0.0 && density > 0.0) {
        return Vec::new();
    }
    let h = scale / density;
    let nx = ((region.re_max - region.re_min) / h).ceil().max(1.0) as usize;
    let ny = ((region.im_max - region.im_min) / h).ceil().max(1.0) as usize;
    let (dx, dy) = (
        (region.re_max - region.re_min) / nx as f64,
        (region.im_max - region.im_min) / ny as f64,
    );
    let mut seeds = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            seeds.push(Complex64::new(
                region.re_min + (i as f64 + 0.5) * dx,
                region.im_min + (j as f64 + 0.5) * dy,
            ));
        }
    }
    seeds
}

enum Outcome {
    Root(Root),
    Discard,
}

fn newton<F>(eval: &F, seed: Complex64, region: &Region, opts: &RootOptions) -> Outcome
where
    F: Fn(Complex64) -> Result<ComplexMatrix>,
{
    let h = opts.step * opts.scale;
    let mut w = seed;
    for it in 1..=opts.max_iterations {
        let Ok(a) = eval(w) else {
            return Outcome::Discard;
        };
        let Ok(inv) = dense::inverse_with_rcond(a.as_ref()) else {
            return Outcome::Discard;
        };
        if inv.rcond == 0.0 {
            return accept(eval, w, it, opts);
        }
        let (Ok(ap), Ok(am)) = (eval(w + h), eval(w - h)) else {
            return Outcome::Discard;
        };
        let deriv = dense::scale((&ap - &am).as_ref(), Complex64::new(0.5 / h, 0.0));
        let log_derivative = dense::trace((&inv.inverse * &deriv).as_ref());
        if !(log_derivative.norm() > 0.0 && log_derivative.norm().is_finite()) {
            return Outcome::Discard;
        }
        let step = Complex64::new(1.0, 0.0) / log_derivative;
        w -= step;
        if !region.contains(w) {
            return Outcome::Discard;
        }
        if step.norm() < opts.convergence * opts.scale {
            return accept(eval, w, it, opts);
        }
    }
    Outcome::Discard
}

fn accept<F>(eval: &F, w: Complex64, iterations: usize, opts: &RootOptions) -> Outcome
where
    F: Fn(Complex64) -> Result<ComplexMatrix>,
{
    let Ok(a) = eval(w) else {
        return Outcome::Discard;
    };
    let Ok(det) = dense::log_det(a.as_ref()) else {
        return Outcome::Discard;
    };
    // columns are only scaled down, never up, so a tiny matrix does not pass
    let cols: f64 = (0..a.ncols())
        .map(|j| dense::vec_norm(a.col_as_slice(j)).max(1.0).ln())
        .sum();
    let log10_residual = (det.log_abs - cols) / std::f64::consts::LN_10;
    if log10_residual <= opts.verify_log10 {
        Outcome::Root(Root {
            omega: w,
            log10_residual,
            iterations,
        })
    } else {
        Outcome::Discard
    }
}

/// Newton search for roots of `det eval(omega)` in `region` from every seed.
/// Converged roots are deduplicated and returned sorted by real part.
pub fn newton_roots<F>(eval: F, region: &Region, seeds: &[Complex64], opts: &RootOptions) -> RootReport
where
    F: Fn(Complex64) -> Result<ComplexMatrix>,
{
    let mut report = RootReport::default();
    for &seed in seeds {
        if !region.contains(seed) {
            continue;
        }
        match newton(&eval, seed, region, opts) {
            Outcome::Root(r) => {
                let dup = report
                    .roots
                    .iter()
                    .any(|q| (q.omega - r.omega).norm() < opts.dedup * opts.scale);
                if !dup {
                    report.roots.push(r);
                }
            }
            Outcome::Discard => report.discarded_seeds.push(seed),
        }
    }
    report
        .roots
        .sort_by(|a, b| a.omega.re.total_cmp(&b.omega.re).then(a.omega.im.total_cmp(&b.omega.im)));
    report
}

fn seeds_for(eigs: Vec<Complex64>, region: &Region, opts: &RootOptions) -> Vec<Complex64> {
    let mut seeds: Vec<Complex64> = eigs.into_iter().filter(|z| region.contains(*z)).collect();
    seeds.extend(grid_seeds(region, opts.scale, opts.seed_density));
    seeds
}

/// Poles of the coupled system: roots of `det[S_T (r'_L (+) r_R) - 1]`.
///
/// Seeds are the eigenvalues of the effective Hamiltonian including lead
/// leakage, followed by a regular grid.
pub fn find_poles(model: &ResonatorModel, region: &Region, opts: &RootOptions) -> Result<RootReport> {
    let h = resonator::open_effective_hamiltonian(model, 1.0)?;
    let seeds = seeds_for(dense::eig_general(h.as_ref())?, region, opts);
    Ok(newton_roots(
        |w| resonator::quantization_matrix(model, w),
        region,
        &seeds,
        opts,
    ))
}

/// Zeros of the open system's scattering matrix: roots of `det S(omega)`.
pub fn find_zeros(model: &ResonatorModel, region: &Region, opts: &RootOptions) -> Result<RootReport> {
    if model.n_out() == 0 {
        return Err(Error::Domain("zeros of S need outer leads".into()));
    }
    let h = resonator::open_effective_hamiltonian(model, -1.0)?;
    let seeds = seeds_for(dense::eig_general(h.as_ref())?, region, opts);
    Ok(newton_roots(
        |w| resonator::open_scattering_matrix(model, w).map(|s| s.full()),
        region,
        &seeds,
        opts,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Threshold {
    pub parameter: f64,
    /// Pole closest to the real axis at threshold.
    pub pole: Complex64,
    /// Zero nearest to that pole; the two coincide at a lasing threshold.
    pub zero: Complex64,
}

/// Parameter at which the uppermost pole crosses `Im omega = im_tol`.
///
/// `poles(p)` and `zeros(p)` return the pole and zero sets at parameter `p`.
/// The crossing is located by bisection to `param_tol`.
pub fn laser_threshold<P, Z>(
    poles: P,
    zeros: Z,
    lo: f64,
    hi: f64,
    param_tol: f64,
    im_tol: f64,
) -> Result<Threshold>
where
    P: Fn(f64) -> Result<Vec<Complex64>>,
    Z: Fn(f64) -> Result<Vec<Complex64>>,
{
    if !(lo.is_finite() && hi.is_finite() && lo < hi && param_tol > 0.0) {
        return Err(Error::Domain("threshold search needs lo < hi and a positive tolerance".into()));
    }
    let top = |p: f64| -> Result<f64> {
        Ok(poles(p)?.iter().map(|z| z.im).fold(f64::NEG_INFINITY, f64::max))
    };
    let lasing = |p: f64| -> Result<bool> { Ok(top(p)? > im_tol) };
    let (l0, l1) = (lasing(lo)?, lasing(hi)?);
    if l0 == l1 {
        return Err(Error::NoThreshold { lo, hi });
    }
    let (mut a, mut b) = (lo, hi);
    while b - a > param_tol {
        let mid = 0.5 * (a + b);
        if lasing(mid)? == l0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    let p = 0.5 * (a + b);
    let pole = poles(p)?
        .into_iter()
        .max_by(|x, y| x.im.total_cmp(&y.im))
        .ok_or(Error::NoThreshold { lo, hi })?;
    let zero = zeros(p)?
        .into_iter()
        .min_by(|x, y| (x - pole).norm().total_cmp(&(y - pole).norm()))
        .unwrap_or(pole.conj());
    Ok(Threshold {
        parameter: p,
        pole,
        zero,
    })
}

/// Threshold in the gain/loss rate `mu` of a model, from the eigenvalues of
/// its effective Hamiltonian with lead leakage.
pub fn gain_threshold(model: &ResonatorModel, lo: f64, hi: f64, im_tol: f64) -> Result<Threshold> {
    let at = |sign: f64| {
        move |mu: f64| -> Result<Vec<Complex64>> {
            let h = resonator::open_effective_hamiltonian(&model.with_mu(mu)?, sign)?;
            dense::eig_general(h.as_ref())
        }
    };
    laser_threshold(at(1.0), at(-1.0), lo, hi, 1e-6 * model.delta(), im_tol)
}
