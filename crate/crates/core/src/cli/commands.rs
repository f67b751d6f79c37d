//! The five subcommands. Each returns the text of its report; writing it out
//! is left to the caller.

use num_complex::Complex64;
use serde::Serialize;

use super::config::ExperimentConfig;
use super::manifest::{RunManifest, SampleSeed, CSV_MANIFEST_PREFIX};
use super::Failure;
use crate::linalg::{dense, sample_gaussian_hermitian, sample_haar_unitary, EnsembleSpec};
use crate::qmap::{self, build_map, evolve, map_spectrum};
use crate::resonator::{
    build_effective_hamiltonian, s_resonator, ResonatorModel, Side, SymmetryClass,
};
use crate::scattering::{self, compose, flux_defect, tprime_defect, SymmetryVariant};
use crate::spectra::stats::{greedy_matching, pairwise_sum};
use crate::spectra::{
    classify_spectrum, find_poles, find_zeros, gain_threshold, transition_scan, Region, Root,
    RootOptions, TransitionConfig,
};
use crate::Error;

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Output of a command: the main report and an optional secondary CSV.
pub struct Output {
    pub report: String,
    pub trace: Option<String>,
    /// Names of failed invariant checks (only `verify` fills this).
    pub failed: Vec<String>,
}

impl Output {
    fn report(report: String) -> Self {
        Self {
            report,
            trace: None,
            failed: Vec::new(),
        }
    }
}

#[derive(Serialize)]
struct Point {
    re: f64,
    im: f64,
}

impl From<Complex64> for Point {
    fn from(z: Complex64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

fn mu0(n: usize, delta: f64) -> f64 {
    (n as f64).sqrt() * delta / TWO_PI
}

/// The resonator pair described by `[model]`, at its configured rate.
pub fn build_model(cfg: &ExperimentConfig) -> Result<ResonatorModel, Error> {
    let mc = &cfg.model;
    let base = match mc.delta {
        None => ResonatorModel::sample(mc.class, mc.m, mc.n, mc.transparency, 0.0, cfg.seed, mc.sample_index)?,
        Some(delta) => {
            let spec = EnsembleSpec::new(mc.class.ensemble(), mc.m, cfg.seed, mc.sample_index);
            let h = sample_gaussian_hermitian(&spec)?;
            ResonatorModel::new(h, 0.0, delta, mc.class, mc.n, mc.transparency)?
        }
    };
    let mu = mc.mu.unwrap_or(mc.mu_over_mu0 * mu0(mc.n, base.delta()));
    base.with_mu(mu)
}

fn sorted_by_re(mut z: Vec<Complex64>) -> Vec<Complex64> {
    z.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    z
}

#[derive(Serialize)]
struct SpectrumEntry {
    re: f64,
    im: f64,
    class: &'static str,
    partner_index: Option<usize>,
}

#[derive(Serialize)]
struct SpectrumReport<'a> {
    format: u32,
    manifest: &'a RunManifest,
    delta: f64,
    mu: f64,
    mu0: f64,
    fraction_complex: f64,
    pairing_residual: f64,
    unpaired: usize,
    eigenvalues: Vec<SpectrumEntry>,
}

pub fn spectrum(manifest: &mut RunManifest) -> Result<Output, Failure> {
    let cfg = manifest.config.clone();
    manifest.samples = vec![SampleSeed {
        seed: cfg.seed,
        stream: cfg.model.sample_index,
    }];
    let model = build_model(&cfg)?;
    let eigs = sorted_by_re(build_effective_hamiltonian(&model)?.eigenvalues()?);
    let cl = classify_spectrum(&eigs, model.delta(), cfg.tolerances)?;
    let partners = cl.partners();
    let mut class = vec!["real"; eigs.len()];
    for &(a, b) in &cl.pairs {
        class[a] = "complex";
        class[b] = "complex";
    }
    for &k in &cl.unpaired {
        class[k] = "unpaired";
    }
    let eigenvalues = eigs
        .iter()
        .enumerate()
        .map(|(k, z)| SpectrumEntry {
            re: z.re,
            im: z.im,
            class: class[k],
            partner_index: partners[k],
        })
        .collect();
    Ok(Output::report(to_json(&SpectrumReport {
        format: manifest.format,
        manifest,
        delta: model.delta(),
        mu: model.mu(),
        mu0: mu0(model.n(), model.delta()),
        fraction_complex: cl.fraction_complex,
        pairing_residual: cl.pairing_residual,
        unpaired: cl.unpaired.len(),
        eigenvalues,
    })))
}

pub fn scan(manifest: &mut RunManifest) -> Result<Output, Failure> {
    let cfg = manifest.config.clone();
    manifest.samples = (0..cfg.scan.samples as u64)
        .map(|stream| SampleSeed { seed: cfg.seed, stream })
        .collect();
    let tc = TransitionConfig {
        class: cfg.model.class,
        m: cfg.model.m,
        n: cfg.model.n,
        transparency: cfg.model.transparency,
        mu_over_mu0: cfg.scan.mu_over_mu0.clone(),
        samples: cfg.scan.samples,
        seed: cfg.seed,
        tolerances: cfg.tolerances,
        bins: cfg.scan.bins,
    };
    eprintln!(
        "scan: class {} M={} N={} T={} over {} rates x {} samples",
        tc.class.label(),
        tc.m,
        tc.n,
        tc.transparency,
        tc.mu_over_mu0.len(),
        tc.samples
    );
    let result = transition_scan(&tc)?;
    eprintln!("scan: done");

    let e = |x: f64| format!("{x:.16e}");
    let mut out = String::from(
        "mu,mu_over_mu0,frac_complex_mean,frac_complex_stderr,max_im_mean,samples,M,N,T,class,seed\n",
    );
    for p in &result.points {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            e(p.mu_mean),
            e(p.mu_over_mu0),
            e(p.frac_complex_mean),
            e(p.frac_complex_stderr),
            e(p.max_im_mean),
            tc.samples,
            tc.m,
            tc.n,
            e(tc.transparency),
            tc.class.label(),
            tc.seed
        ));
    }
    let opt = |x: Option<f64>| x.map_or("none".to_string(), e);
    out.push_str(&format!("# mu_half_over_mu0: {}\n", opt(result.mu_half_over_mu0)));
    out.push_str(&format!("# mu_half: {}\n", opt(result.mu_half())));
    let unpaired: usize = result.points.iter().map(|p| p.unpaired).sum();
    out.push_str(&format!("# unpaired: {unpaired}\n"));
    out.push_str(&format!(
        "# scales: {}\n",
        serde_json::to_string(&result.scales).expect("scales serialize")
    ));
    for p in &result.points {
        let h: Vec<String> = p.histogram.iter().map(|&v| e(v)).collect();
        out.push_str(&format!("# histogram {}: {}\n", e(p.mu_over_mu0), h.join(" ")));
    }
    out.push_str(CSV_MANIFEST_PREFIX);
    out.push_str(&manifest.to_json());
    out.push('\n');
    Ok(Output::report(out))
}

#[derive(Serialize)]
struct RootEntry {
    re: f64,
    im: f64,
    log10_residual: f64,
    iterations: usize,
}

impl From<&Root> for RootEntry {
    fn from(r: &Root) -> Self {
        Self {
            re: r.omega.re,
            im: r.omega.im,
            log10_residual: r.log10_residual,
            iterations: r.iterations,
        }
    }
}

#[derive(Serialize)]
struct ThresholdEntry {
    found: bool,
    mu: Option<f64>,
    mu_over_mu0: Option<f64>,
    pole: Option<Point>,
    zero: Option<Point>,
    reason: Option<String>,
}

#[derive(Serialize)]
struct PolesReport<'a> {
    format: u32,
    manifest: &'a RunManifest,
    delta: f64,
    mu: f64,
    leads: usize,
    region: Region,
    poles: Vec<RootEntry>,
    zeros: Vec<RootEntry>,
    discarded_pole_seeds: usize,
    discarded_zero_seeds: usize,
    threshold: Option<ThresholdEntry>,
}

pub fn poles(manifest: &mut RunManifest) -> Result<Output, Failure> {
    let cfg = manifest.config.clone();
    manifest.samples = vec![SampleSeed {
        seed: cfg.seed,
        stream: cfg.model.sample_index,
    }];
    let leads = cfg.poles.leads.unwrap_or(cfg.model.n);
    let model = build_model(&cfg)?.with_open_leads(leads)?;
    let delta = model.delta();
    let region = match cfg.poles.region {
        Some(r) => Region::new(r.re_min, r.re_max, r.im_min, r.im_max)?,
        None => {
            let mut pts = Vec::new();
            for sign in [1.0, -1.0] {
                let h = crate::resonator::open_effective_hamiltonian(&model, sign)?;
                pts.extend(dense::eig_general(h.as_ref())?);
            }
            Region::around(&pts, delta)?
        }
    };
    let opts = RootOptions::new(delta);
    eprintln!("poles: searching [{}, {}] x [{}, {}]", region.re_min, region.re_max, region.im_min, region.im_max);
    let p = find_poles(&model, &region, &opts)?;
    let z = find_zeros(&model, &region, &opts)?;
    let sort = |mut v: Vec<Root>| {
        v.sort_by(|a, b| a.omega.re.total_cmp(&b.omega.re).then(a.omega.im.total_cmp(&b.omega.im)));
        v.iter().map(RootEntry::from).collect::<Vec<_>>()
    };
    let threshold = match cfg.poles.threshold {
        None => None,
        Some(th) => {
            let scale = mu0(model.n(), delta);
            Some(match gain_threshold(&model, th.lo_over_mu0 * scale, th.hi_over_mu0 * scale, 0.0) {
                Ok(t) => ThresholdEntry {
                    found: true,
                    mu: Some(t.parameter),
                    mu_over_mu0: Some(t.parameter / scale),
                    pole: Some(t.pole.into()),
                    zero: Some(t.zero.into()),
                    reason: None,
                },
                Err(e @ Error::NoThreshold { .. }) => ThresholdEntry {
                    found: false,
                    mu: None,
                    mu_over_mu0: None,
                    pole: None,
                    zero: None,
                    reason: Some(e.to_string()),
                },
                Err(e) => return Err(e.into()),
            })
        }
    };
    Ok(Output::report(to_json(&PolesReport {
        format: manifest.format,
        manifest,
        delta,
        mu: model.mu(),
        leads,
        region,
        discarded_pole_seeds: p.discarded_seeds.len(),
        discarded_zero_seeds: z.discarded_seeds.len(),
        poles: sort(p.roots),
        zeros: sort(z.roots),
        threshold,
    })))
}

#[derive(Serialize)]
struct MapEntry {
    re: f64,
    im: f64,
    modulus: f64,
    quasienergy: Point,
    partner_index: usize,
}

#[derive(Serialize)]
struct MapReport<'a> {
    format: u32,
    manifest: &'a RunManifest,
    pairing_residual: f64,
    log_modulus_sum: f64,
    max_modulus: f64,
    symmetry_defect: f64,
    growth_rate: f64,
    steps: usize,
    eigenvalues: Vec<MapEntry>,
}

pub fn map(manifest: &mut RunManifest) -> Result<Output, Failure> {
    let cfg = manifest.config.clone();
    let mc = &cfg.map;
    manifest.samples = vec![SampleSeed {
        seed: cfg.seed,
        stream: mc.sample_index,
    }];
    let f = sample_haar_unitary(&EnsembleSpec::new(mc.ensemble, mc.m, cfg.seed, mc.sample_index))?;
    let map = build_map(&f, mc.n, mc.transparency, mc.mu, mc.tau, mc.class)?;
    let spec = map_spectrum(&map)?;
    let dim = 2 * mc.m;
    let psi0 = vec![Complex64::new(1.0 / (dim as f64).sqrt(), 0.0); dim];
    eprintln!("map: evolving {} steps", mc.steps);
    let ev = evolve(&map, &psi0, mc.steps)?;
    let eigenvalues = (0..spec.eigenvalues.len())
        .map(|k| {
            let l = spec.eigenvalues[k];
            MapEntry {
                re: l.re,
                im: l.im,
                modulus: l.norm(),
                quasienergy: spec.quasienergies[k].into(),
                partner_index: spec.partner[k],
            }
        })
        .collect();
    let report = to_json(&MapReport {
        format: manifest.format,
        manifest,
        pairing_residual: spec.pairing_residual,
        log_modulus_sum: spec.log_modulus_sum(),
        max_modulus: spec.max_modulus(),
        symmetry_defect: qmap::map_pt_defect(&map)?,
        growth_rate: ev.growth_rate(),
        steps: mc.steps,
        eigenvalues,
    });
    let mut trace = String::from("step,log_norm\n");
    for (k, v) in ev.trace.iter().enumerate() {
        trace.push_str(&format!("{k},{v:.16e}\n"));
    }
    Ok(Output {
        report,
        trace: Some(trace),
        failed: Vec::new(),
    })
}

#[derive(Serialize, Clone)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Default)]
struct Worst(Vec<(String, f64, f64)>);

impl Worst {
    /// Keeps the largest value seen under `name`.
    fn record(&mut self, name: &str, value: f64, tolerance: f64) {
        let value = if value.is_nan() { f64::INFINITY } else { value };
        match self.0.iter_mut().find(|(n, _, _)| n == name) {
            Some(entry) => entry.1 = entry.1.max(value),
            None => self.0.push((name.to_string(), value, tolerance)),
        }
    }

    fn checks(self) -> Vec<Check> {
        self.0
            .into_iter()
            .map(|(name, value, tolerance)| Check {
                passed: value <= tolerance,
                name,
                value,
                tolerance,
            })
            .collect()
    }
}

#[derive(Serialize)]
struct VerifyReport<'a> {
    format: u32,
    manifest: &'a RunManifest,
    passed: bool,
    checks: Vec<Check>,
}

/// Relative size of the gain/loss imbalance injected by `--break-symmetry`.
const BREAK_FRACTION: f64 = 0.1;

fn open_s(model: &ResonatorModel, right: &ResonatorModel, omega: Complex64) -> Result<scattering::ScatteringMatrix, Error> {
    let sl = s_resonator(model, omega, Side::Left)?;
    let st = model.coupling().interface().scattering_matrix(model.n(), omega)?;
    let sr = s_resonator(right, omega, Side::Right)?;
    compose(&compose(&sl, &st)?, &sr)
}

fn verify_instance(cfg: &ExperimentConfig, class: SymmetryClass, index: u64, out: &mut Worst) -> Result<(), Error> {
    let mc = &cfg.model;
    let broken = cfg.verify.break_symmetry;
    let mut local = cfg.clone();
    local.model.class = class;
    local.model.sample_index = index;
    let model = build_model(&local)?;
    let delta = model.delta();
    let n = mc.n as f64;
    let label = class.label();

    // Spectral pairing of the closed system. The broken variant gives the
    // right resonator extra gain.
    let extra = if broken { BREAK_FRACTION * delta } else { 0.0 };
    let spectrum = |model: &ResonatorModel| -> Result<Vec<Complex64>, Error> {
        let heff = build_effective_hamiltonian(model)?;
        if extra == 0.0 {
            return heff.eigenvalues();
        }
        let mut h = heff.matrix().clone();
        let m = model.m();
        for k in m..2 * m {
            h[(k, k)] += Complex64::new(0.0, extra);
        }
        dense::eig_general(h.as_ref())
    };
    let cl = classify_spectrum(&spectrum(&model)?, delta, cfg.tolerances)?;
    out.record(&format!("{label}/unpaired-eigenvalues"), cl.unpaired.len() as f64, 0.0);
    out.record(&format!("{label}/pairing-residual"), cl.pairing_residual / delta, 1e-9);
    let herm = spectrum(&model.with_mu(0.0)?)?;
    let max_im = herm.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    out.record(&format!("{label}/hermitian-limit"), max_im / delta, 1e-10);

    // Scattering matrix of the open system at real and complex frequencies.
    let open = model.with_open_leads(mc.n)?;
    let right = if broken {
        open.with_mu(open.mu() * (1.0 + BREAK_FRACTION) + extra)?
    } else {
        open.clone()
    };
    let levels = dense::hermitian_eigenvalues(open.h().as_ref())?;
    let (lo, hi) = (levels[levels.len() / 4], levels[3 * levels.len() / 4]);
    let count = cfg.verify.frequencies.max(1);
    for j in 0..count {
        let x = lo + (hi - lo) * (j as f64 + 0.5) / count as f64;
        let w = Complex64::new(x, 0.3 * delta);
        let s = open_s(&open, &right, w)?;
        let s_star = open_s(&open, &right, w.conj())?;
        let variant = class.variant();
        let d = match variant {
            SymmetryVariant::Pt => scattering::pt_defect(&s, &s_star)?,
            SymmetryVariant::Ptt => scattering::ptt_defect(&s, &s_star)?,
        };
        out.record(&format!("{label}/s-matrix-symmetry"), d.total.absolute, 1e-9 * n);
        let s_real = open_s(&open, &right, Complex64::new(x, 0.0))?;
        out.record(&format!("{label}/flux-conservation"), flux_defect(&s_real, variant)?.absolute, 1e-9 * n);
        if class == SymmetryClass::PtWithTprime {
            out.record(&format!("{label}/reciprocity"), tprime_defect(&s_real).absolute, 1e-10 * n);
        }
    }
    Ok(())
}

fn verify_map(cfg: &ExperimentConfig, index: u64, out: &mut Worst) -> Result<(), Error> {
    let mc = &cfg.map;
    let f = sample_haar_unitary(&EnsembleSpec::new(mc.ensemble, mc.m, cfg.seed, index))?;
    let map = build_map(&f, mc.n, mc.transparency, mc.mu, mc.tau, mc.class)?;
    // The broken variant adds a small uniform gain to the assembled map.
    let matrix = if cfg.verify.break_symmetry {
        dense::scale(map.matrix().as_ref(), Complex64::new(1.0 + BREAK_FRACTION / mc.m as f64, 0.0))
    } else {
        map.matrix().clone()
    };
    let eigs = dense::eig_general(matrix.as_ref())?;
    let inverted: Vec<Complex64> = eigs.iter().map(|l| l.conj().inv()).collect();
    out.record("map/self-inversive-residual", greedy_matching(&inverted, &eigs).1, 1e-8);
    let mut logs: Vec<f64> = eigs.iter().map(|l| l.norm().ln()).collect();
    logs.sort_by(f64::total_cmp);
    out.record("map/log-modulus-sum", pairwise_sum(&logs).abs(), 1e-8);
    let det_map = dense::log_det(matrix.as_ref())?.value();
    let det_f = dense::log_det(f.as_ref())?.value();
    out.record("map/determinant", (det_map - det_f * det_f).norm(), 1e-10);
    let unitary = build_map(&f, mc.n, mc.transparency, 0.0, mc.tau, mc.class)?;
    let gram = dense::adjoint(unitary.matrix().as_ref()) * unitary.matrix();
    out.record("map/unitary-limit", dense::identity_defect(gram.as_ref()), 1e-10 * mc.m as f64);
    Ok(())
}

pub fn verify(manifest: &mut RunManifest) -> Result<Output, Failure> {
    let cfg = manifest.config.clone();
    let samples = cfg.verify.samples as u64;
    manifest.samples = (0..samples).map(|stream| SampleSeed { seed: cfg.seed, stream }).collect();
    let mut worst = Worst::default();
    for class in [SymmetryClass::PtWithTprime, SymmetryClass::PtBrokenTprime, SymmetryClass::PttPrime] {
        eprintln!("verify: class {}", class.label());
        for i in 0..samples {
            verify_instance(&cfg, class, i, &mut worst)?;
        }
    }
    eprintln!("verify: quantum map");
    for i in 0..samples {
        verify_map(&cfg, i, &mut worst)?;
    }
    let checks = worst.checks();
    let failed: Vec<String> = checks.iter().filter(|c| !c.passed).map(|c| c.name.clone()).collect();
    let report = to_json(&VerifyReport {
        format: manifest.format,
        manifest,
        passed: failed.is_empty(),
        checks,
    });
    Ok(Output {
        report,
        trace: None,
        failed,
    })
}
