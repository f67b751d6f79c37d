//! Series composition checked against an independent transfer-matrix product,
//! plus associativity and closure of the symmetry classes under composition.

use num_complex::Complex64;
use proptest::prelude::*;
use ptscatter::linalg::{dense, sample_haar_unitary, ComplexMatrix, EnsembleClass, EnsembleSpec};
use ptscatter::resonator::{ResonatorModel, SymmetryClass};
use ptscatter::scattering::{self, compose, ScatteringMatrix};
use ptscatter::resonator;

fn random_unitary_s(n: usize, seed: u64, index: u64, omega: Complex64) -> ScatteringMatrix {
    let u = sample_haar_unitary(&EnsembleSpec::new(EnsembleClass::Unitary, 2 * n, seed, index)).unwrap();
    ScatteringMatrix::from_full(u.as_ref(), n, omega).unwrap()
}

/// A generic (non-unitary) scatterer: a unitary with its blocks rescaled.
fn random_lossy_s(n: usize, seed: u64, index: u64, omega: Complex64) -> ScatteringMatrix {
    let u = sample_haar_unitary(&EnsembleSpec::new(EnsembleClass::Unitary, 2 * n, seed, index)).unwrap();
    let g = ComplexMatrix::from_fn(2 * n, 2 * n, |i, j| {
        let w = if (i < n) == (j < n) { 0.6 } else { 1.1 };
        u[(i, j)] * w
    });
    ScatteringMatrix::from_full(g.as_ref(), n, omega).unwrap()
}

fn inv(a: &ComplexMatrix) -> ComplexMatrix {
    dense::inverse_with_rcond(a.as_ref()).unwrap().inverse
}

/// Transfer matrix mapping `(in_L, out_L)` to `(out_R, in_R)`.
fn transfer(s: &ScatteringMatrix) -> ComplexMatrix {
    let tpi = inv(s.t_prime());
    let a = s.t() - s.r_prime() * &tpi * s.r();
    let b = s.r_prime() * &tpi;
    let c = -(&tpi * s.r());
    dense::block2(a.as_ref(), b.as_ref(), c.as_ref(), tpi.as_ref()).unwrap()
}

fn from_transfer(m: &ComplexMatrix, n: usize, omega: Complex64) -> ScatteringMatrix {
    let blk = |r, c| dense::sub(m.as_ref(), r, c, n, n);
    let (a, b, c, d) = (blk(0, 0), blk(0, n), blk(n, 0), blk(n, n));
    let di = inv(&d);
    let r = -(&di * &c);
    let r_prime = &b * &di;
    let t = &a - &b * &di * &c;
    ScatteringMatrix::new(r, t, di, r_prime, omega).unwrap()
}

fn distance(a: &ScatteringMatrix, b: &ScatteringMatrix) -> f64 {
    dense::diff_norm(a.full().as_ref(), b.full().as_ref())
}

#[test]
fn composition_matches_transfer_matrix_product() {
    let omega = Complex64::new(0.3, 0.0);
    for n in 1..=4 {
        for k in 0..10u64 {
            let a = random_lossy_s(n, 11, 2 * k, omega);
            let b = random_lossy_s(n, 11, 2 * k + 1, omega);
            let direct = compose(&a, &b).unwrap();
            let oracle = from_transfer(&(transfer(&b) * transfer(&a)), n, omega);
            let d = distance(&direct, &oracle);
            assert!(d < 1e-10 * (1.0 + direct.frobenius()), "n = {n}, k = {k}: {d:e}");
        }
    }
}

#[test]
fn unitary_scatterers_compose_to_unitary() {
    let omega = Complex64::new(-1.0, 0.0);
    for k in 0..10u64 {
        let a = random_unitary_s(3, 4, 2 * k, omega);
        let b = random_unitary_s(3, 4, 2 * k + 1, omega);
        assert!(compose(&a, &b).unwrap().unitarity_defect() < 1e-12);
    }
}

#[test]
fn transparent_element_is_neutral() {
    let omega = Complex64::new(0.0, 0.2);
    let a = random_lossy_s(3, 8, 0, omega);
    let id = scattering::transparent(3, omega).unwrap();
    assert!(distance(&compose(&a, &id).unwrap(), &a) < 1e-13);
    assert!(distance(&compose(&id, &a).unwrap(), &a) < 1e-13);
}

/// Open resonator pairs satisfy their class's generalized unitarity after
/// the three-element composition, at real and complex frequency.
#[test]
fn symmetry_survives_composition() {
    for class in [SymmetryClass::PtWithTprime, SymmetryClass::PtBrokenTprime, SymmetryClass::PttPrime] {
        for k in 0..3u64 {
            let model = ResonatorModel::sample(class, 16, 3, 0.6, 0.0, 21, k).unwrap();
            let mu = 0.8 * model.delta();
            let model = model.with_mu(mu).unwrap().with_open_leads(2).unwrap();
            let w = Complex64::new(0.1, 0.4 * model.delta());
            let s = resonator::open_scattering_matrix(&model, w).unwrap();
            let s_star = resonator::open_scattering_matrix(&model, w.conj()).unwrap();
            let d = match class.variant() {
                scattering::SymmetryVariant::Pt => scattering::pt_defect(&s, &s_star).unwrap(),
                scattering::SymmetryVariant::Ptt => scattering::ptt_defect(&s, &s_star).unwrap(),
            };
            assert!(d.total.absolute < 1e-9, "{class:?}: {:e}", d.total.absolute);
            let real = resonator::open_scattering_matrix(&model, Complex64::new(0.1, 0.0)).unwrap();
            let flux = scattering::flux_defect(&real, class.variant()).unwrap();
            assert!(flux.absolute < 1e-9, "{class:?}: {:e}", flux.absolute);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn composition_is_associative(n in 1usize..5, seed in any::<u64>(), re in -2.0f64..2.0, im in 0.0f64..0.5) {
        let omega = Complex64::new(re, im);
        let a = random_lossy_s(n, seed, 0, omega);
        let b = random_lossy_s(n, seed, 1, omega);
        let c = random_unitary_s(n, seed, 2, omega);
        let left = compose(&compose(&a, &b).unwrap(), &c).unwrap();
        let right = compose(&a, &compose(&b, &c).unwrap()).unwrap();
        let d = distance(&left, &right);
        prop_assert!(d < 1e-9 * (1.0 + left.frobenius()), "defect {:e}", d);
    }

    #[test]
    fn parity_is_an_involution(n in 1usize..5, seed in any::<u64>()) {
        let s = random_lossy_s(n, seed, 0, Complex64::new(0.5, 0.0));
        let back = scattering::apply_parity(&scattering::apply_parity(&s).unwrap()).unwrap();
        prop_assert!(distance(&s, &back) == 0.0);
    }
}
