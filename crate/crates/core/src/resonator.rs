//! Hamiltonian-backed resonator models.
//!
//! Each resonator is an `M`-level hermitian Hamiltonian `H` with a uniform
//! loss (left) or gain (right) rate `mu`. The two resonators face each other
//! through `N` interface channels attached to the first `N` basis modes.
//! Optional outer leads on the far side of each resonator make the coupled
//! system open. By default they attach to the modes after the interface ones.
//!
//! The left resonator absorbs: its resolvent is `(omega + i mu - H + i V^T V)^-1`,
//! so its poles sit at `H - i mu - i V^T V`. The right resonator is its
//! PT (or PTT') image, with poles at `H* + i mu - i V^T V` (or `H + i mu - ...`).

use faer::Mat;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::dense::{self, ComplexMatrix, I, ONE};
use crate::linalg::ensemble::{
    sample_gaussian_hermitian, spacing_of_levels, EnsembleClass, EnsembleSpec,
};
use crate::scattering::{self, InterfaceSpec, ScatteringMatrix, SymmetryVariant, RCOND_MIN};

/// Fraction of central levels used when a model measures its own level spacing.
pub const SPACING_WINDOW: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SymmetryClass {
    /// PT symmetry with a real symmetric `H` (T' intact). GOE statistics.
    PtWithTprime,
    /// PT symmetry with complex hermitian `H` (T' broken). GUE statistics.
    PtBrokenTprime,
    /// PTT' symmetry: the right resonator holds `H` itself rather than `H*`.
    PttPrime,
}

impl SymmetryClass {
    pub fn variant(self) -> SymmetryVariant {
        match self {
            Self::PtWithTprime | Self::PtBrokenTprime => SymmetryVariant::Pt,
            Self::PttPrime => SymmetryVariant::Ptt,
        }
    }

    /// Gaussian ensemble the resonator Hamiltonian is drawn from.
    pub fn ensemble(self) -> EnsembleClass {
        match self {
            Self::PtWithTprime => EnsembleClass::RealSymmetric,
            Self::PtBrokenTprime | Self::PttPrime => EnsembleClass::ComplexHermitian,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::PtWithTprime => "pt-with-tprime",
            Self::PtBrokenTprime => "pt-broken-tprime",
            Self::PttPrime => "ptt-prime",
        }
    }
}

/// `gamma = [sqrt(T) / (1 + sqrt(1 - T))] * Delta M / pi`.
pub fn gamma_of_t(transparency: f64, delta: f64, m: usize) -> Result<f64> {
    InterfaceSpec::new(transparency)?;
    Ok(transparency.sqrt() / (1.0 + (1.0 - transparency).sqrt()) * open_channel_value(delta, m))
}

/// Coupling `v = Delta M / pi` of a fully open channel.
pub fn open_channel_value(delta: f64, m: usize) -> f64 {
    delta * m as f64 / std::f64::consts::PI
}

/// Coupling of a resonator to a set of channels, one per mode with `v_m > 0`.
///
/// The coupling matrix `V` has rows `sqrt(v_m) e_m^T`, so `V^T V = diag(v_m)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeadCoupling {
    values: Vec<f64>,
}

impl LeadCoupling {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::Domain("lead couplings must be finite and >= 0".into()));
        }
        Ok(Self { values })
    }

    /// `count` channels of strength `v` on modes `first..first + count` of an
    /// `m`-level resonator.
    pub fn on_modes(m: usize, first: usize, count: usize, v: f64) -> Result<Self> {
        if first + count > m {
            return Err(Error::Dimension(format!(
                "modes {first}..{} exceed resonator size {m}",
                first + count
            )));
        }
        let mut values = vec![0.0; m];
        values[first..first + count].iter_mut().for_each(|x| *x = v);
        Self::new(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn modes(&self) -> Vec<usize> {
        (0..self.values.len()).filter(|&i| self.values[i] > 0.0).collect()
    }

    pub fn n_channels(&self) -> usize {
        self.modes().len()
    }

    /// `V`, one row per open channel.
    pub fn matrix(&self) -> Mat<f64> {
        let modes = self.modes();
        Mat::from_fn(modes.len(), self.values.len(), |k, j| {
            if j == modes[k] {
                self.values[j].sqrt()
            } else {
                0.0
            }
        })
    }
}

/// Interface between the two resonators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingSpec {
    n: usize,
    interface: InterfaceSpec,
    v: f64,
    gamma: Vec<f64>,
}

impl CouplingSpec {
    /// `n` channels of transparency `T`, each fully coupled (`v = Delta M / pi`)
    /// to one of the first `n` resonator modes.
    pub fn new(m: usize, n: usize, transparency: f64, delta: f64) -> Result<Self> {
        if n == 0 || n > m {
            return Err(Error::Domain(format!("need 1 <= N <= M, got N = {n}, M = {m}")));
        }
        if !(delta.is_finite() && delta > 0.0) {
            return Err(Error::Domain(format!("level spacing {delta} must be > 0")));
        }
        let gamma = gamma_of_t(transparency, delta, m)?;
        Ok(Self {
            n,
            interface: InterfaceSpec::new(transparency)?,
            v: open_channel_value(delta, m),
            gamma: vec![gamma; n],
        })
    }

    /// Explicit interface couplings, for effective Hamiltonians only. Rejects
    /// negative entries since `Gamma` must be positive semi-definite.
    pub fn from_gammas(gamma: Vec<f64>, transparency: f64, v: f64) -> Result<Self> {
        if gamma.is_empty() {
            return Err(Error::Domain("need at least one interface channel".into()));
        }
        if gamma.iter().any(|g| !g.is_finite() || *g < 0.0) {
            return Err(Error::Domain(
                "interface coupling Gamma is not positive semi-definite".into(),
            ));
        }
        Ok(Self {
            n: gamma.len(),
            interface: InterfaceSpec::new(transparency)?,
            v,
            gamma,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn interface(&self) -> InterfaceSpec {
        self.interface
    }

    pub fn transparency(&self) -> f64 {
        self.interface.transparency()
    }

    /// Coupling `v` of each interface channel to its resonator mode.
    pub fn v(&self) -> f64 {
        self.v
    }

    pub fn gamma(&self) -> &[f64] {
        &self.gamma
    }

    /// Diagonal of `Gamma` on an `m`-level resonator.
    pub fn gamma_diagonal(&self, m: usize) -> Vec<f64> {
        let mut d = vec![0.0; m];
        d[..self.n].copy_from_slice(&self.gamma);
        d
    }

    fn lead(&self, m: usize) -> Result<LeadCoupling> {
        LeadCoupling::on_modes(m, 0, self.n, self.v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone)]
pub struct ResonatorModel {
    h: ComplexMatrix,
    mu: f64,
    delta: f64,
    class: SymmetryClass,
    coupling: CouplingSpec,
    leads: Option<LeadCoupling>,
}

impl ResonatorModel {
    /// Closed model with `n` interface channels of transparency `T`.
    pub fn new(
        h: ComplexMatrix,
        mu: f64,
        delta: f64,
        class: SymmetryClass,
        n: usize,
        transparency: f64,
    ) -> Result<Self> {
        let m = dense::ensure_square(h.as_ref())?;
        dense::ensure_finite(h.as_ref())?;
        let coupling = CouplingSpec::new(m, n, transparency, delta)?;
        Self::with_coupling(h, mu, delta, class, coupling)
    }

    pub fn with_coupling(
        h: ComplexMatrix,
        mu: f64,
        delta: f64,
        class: SymmetryClass,
        coupling: CouplingSpec,
    ) -> Result<Self> {
        let m = dense::ensure_square(h.as_ref())?;
        dense::ensure_finite(h.as_ref())?;
        let tol = 1e-12 * (1.0 + h.norm_l2());
        if !dense::is_hermitian(h.as_ref(), tol) {
            return Err(Error::Contract("resonator Hamiltonian must be hermitian".into()));
        }
        if class == SymmetryClass::PtWithTprime && (0..m).any(|j| (0..m).any(|i| h[(i, j)].im.abs() > tol)) {
            return Err(Error::Contract(
                "class pt-with-tprime needs a real symmetric Hamiltonian".into(),
            ));
        }
        if !(mu.is_finite() && mu >= 0.0) {
            return Err(Error::Domain(format!("rate mu = {mu} must be finite and >= 0")));
        }
        if !(delta.is_finite() && delta > 0.0) {
            return Err(Error::Domain(format!("level spacing {delta} must be > 0")));
        }
        if coupling.n() > m {
            return Err(Error::Dimension(format!("{} channels on {m} modes", coupling.n())));
        }
        Ok(Self {
            h,
            mu,
            delta,
            class,
            coupling,
            leads: None,
        })
    }

    /// Draws `H` from the ensemble matching `class` and measures its level
    /// spacing over the central [`SPACING_WINDOW`] of the spectrum.
    pub fn sample(
        class: SymmetryClass,
        m: usize,
        n: usize,
        transparency: f64,
        mu: f64,
        seed: u64,
        sample_index: u64,
    ) -> Result<Self> {
        let spec = EnsembleSpec::new(class.ensemble(), m, seed, sample_index);
        let h = sample_gaussian_hermitian(&spec)?;
        let levels = dense::hermitian_eigenvalues(h.as_ref())?;
        let window = SPACING_WINDOW.max(2.0 / m as f64).min(1.0);
        let delta = spacing_of_levels(&levels, window)?;
        Self::new(h, mu, delta, class, n, transparency)
    }

    /// Attaches outer leads. A mode may carry both a lead and an interface
    /// channel; its leakage then simply adds to the interface coupling.
    pub fn with_leads(mut self, leads: LeadCoupling) -> Result<Self> {
        if leads.values().len() != self.m() {
            return Err(Error::Dimension(format!(
                "lead couplings for {} modes on a {}-level resonator",
                leads.values().len(),
                self.m()
            )));
        }
        self.leads = Some(leads);
        Ok(self)
    }

    /// Attaches `n_out` fully open leads on the modes after the interface.
    pub fn with_open_leads(self, n_out: usize) -> Result<Self> {
        let m = self.m();
        let v = open_channel_value(self.delta, m);
        let leads = LeadCoupling::on_modes(m, self.coupling.n(), n_out, v)?;
        self.with_leads(leads)
    }

    pub fn with_mu(&self, mu: f64) -> Result<Self> {
        if !(mu.is_finite() && mu >= 0.0) {
            return Err(Error::Domain(format!("rate mu = {mu} must be finite and >= 0")));
        }
        Ok(Self { mu, ..self.clone() })
    }

    pub fn h(&self) -> &ComplexMatrix {
        &self.h
    }

    pub fn m(&self) -> usize {
        self.h.nrows()
    }

    pub fn n(&self) -> usize {
        self.coupling.n()
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn class(&self) -> SymmetryClass {
        self.class
    }

    pub fn coupling(&self) -> &CouplingSpec {
        &self.coupling
    }

    pub fn leads(&self) -> Option<&LeadCoupling> {
        self.leads.as_ref()
    }

    pub fn n_out(&self) -> usize {
        self.leads.as_ref().map_or(0, LeadCoupling::n_channels)
    }

    /// Hamiltonian of the right resonator: `H*` for PT classes, `H` for PTT'.
    fn h_right(&self) -> ComplexMatrix {
        match self.class.variant() {
            SymmetryVariant::Pt => dense::conj(self.h.as_ref()),
            SymmetryVariant::Ptt => self.h.clone(),
        }
    }

    /// `V^T V` of the outer leads as a diagonal.
    pub fn leakage_diagonal(&self) -> Vec<f64> {
        self.leads
            .as_ref()
            .map_or_else(|| vec![0.0; self.m()], |l| l.values().to_vec())
    }

    /// Coupling matrix with rows ordered as the channels of the resonator's
    /// scattering matrix: outer leads then interface on the left, interface
    /// then outer leads on the right.
    fn channel_matrix(&self, side: Side) -> Result<Mat<f64>> {
        let m = self.m();
        let interface = self.coupling.lead(m)?.matrix();
        let outer = self
            .leads
            .as_ref()
            .map_or_else(|| Mat::<f64>::zeros(0, m), LeadCoupling::matrix);
        let (first, second) = match side {
            Side::Left => (&outer, &interface),
            Side::Right => (&interface, &outer),
        };
        let rows = first.nrows() + second.nrows();
        Ok(Mat::from_fn(rows, m, |i, j| {
            if i < first.nrows() {
                first[(i, j)]
            } else {
                second[(i - first.nrows(), j)]
            }
        }))
    }
}

/// `S = 1 - 2i V (omega + i sigma mu - H_side + i V^T V)^-1 V^T` with
/// `sigma = +1` (left, absorbing) or `-1` (right, amplifying).
///
/// Left channels come first in the returned matrix: for the left resonator
/// those are the outer leads, for the right resonator the interface.
pub fn s_resonator(model: &ResonatorModel, omega: Complex64, side: Side) -> Result<ScatteringMatrix> {
    let m = model.m();
    let v = model.channel_matrix(side)?;
    let (h, sigma) = match side {
        Side::Left => (model.h.clone(), 1.0),
        Side::Right => (model.h_right(), -1.0),
    };
    let vtv = &v.transpose() * &v;
    let shift = omega + I * sigma * model.mu;
    let k = ComplexMatrix::from_fn(m, m, |i, j| {
        let d = if i == j { shift } else { Complex64::new(0.0, 0.0) };
        d - h[(i, j)] + I * vtv[(i, j)]
    });
    let inv = dense::inverse_with_rcond(k.as_ref())?;
    // Condition relative to the scale of the problem, not of `k` alone: a
    // small resolvent matrix is singular whenever `k` itself is tiny.
    let scale = dense::norm_one(k.as_ref())
        .max(omega.norm() + dense::norm_one(h.as_ref()) + model.mu + vtv.norm_max());
    let rcond = if inv.rcond > 0.0 {
        1.0 / (scale * dense::norm_one(inv.inverse.as_ref()))
    } else {
        0.0
    };
    if rcond < RCOND_MIN {
        return Err(Error::OnResonance { omega, rcond });
    }
    let vc = ComplexMatrix::from_fn(v.nrows(), m, |i, j| Complex64::new(v[(i, j)], 0.0));
    let vct = dense::transpose(vc.as_ref());
    let g = &vc * &inv.inverse * &vct;
    let rows = v.nrows();
    let s = ComplexMatrix::from_fn(rows, rows, |i, j| {
        let d = if i == j { ONE } else { Complex64::new(0.0, 0.0) };
        d - 2.0 * I * g[(i, j)]
    });
    let n_left = match side {
        Side::Left => model.n_out(),
        Side::Right => model.n(),
    };
    ScatteringMatrix::from_full(s.as_ref(), n_left, omega)
}

/// `S_T (r'_L (+) r_R) - 1`. Its determinant vanishes at eigenfrequencies of
/// the coupled system (closed) or at its poles (with outer leads).
pub fn quantization_matrix(model: &ResonatorModel, omega: Complex64) -> Result<ComplexMatrix> {
    let n = model.n();
    let s_l = s_resonator(model, omega, Side::Left)?;
    let s_r = s_resonator(model, omega, Side::Right)?;
    let s_t = model.coupling.interface.scattering_matrix(n, omega)?.full();
    let zero = ComplexMatrix::zeros(n, n);
    let loaded = dense::block2(s_l.r_prime().as_ref(), zero.as_ref(), zero.as_ref(), s_r.r().as_ref())?;
    let mut a = &s_t * &loaded;
    for i in 0..2 * n {
        a[(i, i)] -= ONE;
    }
    Ok(a)
}

/// `det[S_T (r'_L (+) r_R) - 1]`, log-scaled.
pub fn closed_quantization_defect(model: &ResonatorModel, omega: Complex64) -> Result<dense::LogDet> {
    dense::log_det(quantization_matrix(model, omega)?.as_ref())
}

/// Scattering matrix of the open coupled system, `S_L o S_T o S_R`, between
/// the outer leads.
pub fn open_scattering_matrix(model: &ResonatorModel, omega: Complex64) -> Result<ScatteringMatrix> {
    if model.n_out() == 0 {
        return Err(Error::Domain("open scattering matrix needs outer leads".into()));
    }
    let s_l = s_resonator(model, omega, Side::Left)?;
    let s_t = model.coupling.interface.scattering_matrix(model.n(), omega)?;
    let s_r = s_resonator(model, omega, Side::Right)?;
    scattering::compose(&scattering::compose(&s_l, &s_t)?, &s_r)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Basis {
    LeftRight,
    Parity,
}

#[derive(Debug, Clone)]
pub struct EffectiveHamiltonian {
    matrix: ComplexMatrix,
    class: SymmetryClass,
    basis: Basis,
    /// Real matrix similar to `matrix`, available for closed PT classes.
    real_form: Option<Mat<f64>>,
}

impl EffectiveHamiltonian {
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn class(&self) -> SymmetryClass {
        self.class
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Eigenfrequencies. PT classes are diagonalized through their real form,
    /// which returns conjugate pairs exactly.
    pub fn eigenvalues(&self) -> Result<Vec<Complex64>> {
        match &self.real_form {
            Some(k) => dense::eig_real(k.as_ref()),
            None => dense::eig_general(self.matrix.as_ref()),
        }
    }

    /// `|sigma_x H* sigma_x - H|_F` (PT) or `|sigma_x H^dagger sigma_x - H|_F`
    /// (PTT') in the left-right basis.
    pub fn symmetry_defect(&self) -> Result<f64> {
        if self.basis != Basis::LeftRight {
            return Err(Error::Domain("symmetry identity is stated in the left-right basis".into()));
        }
        let m = self.dim() / 2;
        let x = match self.class.variant() {
            SymmetryVariant::Pt => dense::conj(self.matrix.as_ref()),
            SymmetryVariant::Ptt => dense::adjoint(self.matrix.as_ref()),
        };
        let p = |i: usize| if i < m { i + m } else { i - m };
        let swapped = ComplexMatrix::from_fn(2 * m, 2 * m, |i, j| x[(p(i), p(j))]);
        Ok(dense::diff_norm(swapped.as_ref(), self.matrix.as_ref()))
    }
}

/// Real `2M x 2M` matrix similar to `[[A, Gamma], [Gamma, A*]]` with
/// `A = H - i mu`:
///
/// ```text
///     K = | Re A + Gamma   -Im A        |
///         | Im A            Re A - Gamma |
/// ```
pub fn pt_real_form(h: &ComplexMatrix, gamma: &[f64], mu: f64) -> Mat<f64> {
    let m = h.nrows();
    Mat::from_fn(2 * m, 2 * m, |i, j| {
        let (bi, ii) = (i / m, i % m);
        let (bj, jj) = (j / m, j % m);
        let a = h[(ii, jj)] - if ii == jj { I * mu } else { Complex64::new(0.0, 0.0) };
        let g = if ii == jj { gamma[ii] } else { 0.0 };
        match (bi, bj) {
            (0, 0) => a.re + g,
            (0, 1) => -a.im,
            (1, 0) => a.im,
            _ => a.re - g,
        }
    })
}

fn assemble(
    left: &ComplexMatrix,
    right: &ComplexMatrix,
    gamma: &[f64],
    left_shift: Complex64,
    right_shift: Complex64,
) -> ComplexMatrix {
    let m = left.nrows();
    ComplexMatrix::from_fn(2 * m, 2 * m, |i, j| {
        let (bi, ii) = (i / m, i % m);
        let (bj, jj) = (j / m, j % m);
        let diag = ii == jj;
        match (bi, bj) {
            (0, 0) => left[(ii, jj)] + if diag { left_shift } else { Complex64::new(0.0, 0.0) },
            (1, 1) => right[(ii, jj)] + if diag { right_shift } else { Complex64::new(0.0, 0.0) },
            _ if diag => Complex64::new(gamma[ii], 0.0),
            _ => Complex64::new(0.0, 0.0),
        }
    })
}

/// Effective Hamiltonian of the closed coupled system:
/// `[[H - i mu, Gamma], [Gamma, H* + i mu]]` (PT) or
/// `[[H - i mu, Gamma], [Gamma, H + i mu]]` (PTT').
pub fn build_effective_hamiltonian(model: &ResonatorModel) -> Result<EffectiveHamiltonian> {
    let gamma = model.coupling.gamma_diagonal(model.m());
    let mu = Complex64::new(0.0, model.mu);
    let matrix = assemble(&model.h, &model.h_right(), &gamma, -mu, mu);
    let real_form = match model.class.variant() {
        SymmetryVariant::Pt => Some(pt_real_form(&model.h, &gamma, model.mu)),
        SymmetryVariant::Ptt => None,
    };
    Ok(EffectiveHamiltonian {
        matrix,
        class: model.class,
        basis: Basis::LeftRight,
        real_form,
    })
}

/// Closed effective Hamiltonian shifted by `-i sign Lambda` on both blocks,
/// where `Lambda = V_out^T V_out`. `sign = +1` gives the poles of the open
/// system, `sign = -1` its zeros.
pub fn open_effective_hamiltonian(model: &ResonatorModel, sign: f64) -> Result<ComplexMatrix> {
    let closed = build_effective_hamiltonian(model)?;
    let lambda = model.leakage_diagonal();
    let m = model.m();
    let mut h = closed.matrix;
    for k in 0..2 * m {
        h[(k, k)] -= I * sign * lambda[k % m];
    }
    Ok(h)
}

/// Rotation to the parity-even/odd basis, `O^T H O` with
/// `O = (1/sqrt 2) [[1, -1], [1, 1]]`, giving `[[H + Gamma, i mu], [i mu, H - Gamma]]`.
pub fn to_parity_basis(heff: &EffectiveHamiltonian) -> Result<EffectiveHamiltonian> {
    if heff.class == SymmetryClass::PtBrokenTprime {
        return Err(Error::Domain(
            "parity basis needs H = H*; use pt-with-tprime or ptt-prime".into(),
        ));
    }
    if heff.basis == Basis::Parity {
        return Ok(heff.clone());
    }
    let m = heff.dim() / 2;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let o = ComplexMatrix::from_fn(2 * m, 2 * m, |i, j| {
        if i % m != j % m {
            return Complex64::new(0.0, 0.0);
        }
        let sign = if i < m && j >= m { -1.0 } else { 1.0 };
        Complex64::new(sign * s, 0.0)
    });
    let ot = dense::transpose(o.as_ref());
    let matrix = &ot * &heff.matrix * &o;
    Ok(EffectiveHamiltonian {
        matrix,
        class: heff.class,
        basis: Basis::Parity,
        real_form: None,
    })
}
