//! Self-inversiveness of the quantum map checked without an eigensolver:
//! the characteristic polynomial from the Faddeev-LeVerrier recursion must
//! satisfy `a_k = a_0 conj(a_{2M-k})` when the spectrum is closed under
//! `lambda -> 1 / lambda*`.

use num_complex::Complex64;
use ptscatter::linalg::{dense, sample_haar_unitary, ComplexMatrix, EnsembleClass, EnsembleSpec};
use ptscatter::qmap::{build_map, map_spectrum, MapClass};

/// Coefficients `a_0..=a_n` of `det(x - A) = sum_k a_k x^k`, `a_n = 1`.
fn faddeev_leverrier(a: &ComplexMatrix) -> Vec<Complex64> {
    let n = a.nrows();
    let mut coeffs = vec![Complex64::new(0.0, 0.0); n + 1];
    coeffs[n] = Complex64::new(1.0, 0.0);
    let mut m = ComplexMatrix::zeros(n, n);
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{n-k+1} I, c_{n-k} = -tr(A M_k) / k
        let mut next = a * &m;
        for i in 0..n {
            next[(i, i)] += coeffs[n - k + 1];
        }
        m = next;
        let am = a * &m;
        coeffs[n - k] = -dense::trace(am.as_ref()) / k as f64;
    }
    coeffs
}

fn poly_at(coeffs: &[Complex64], x: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * x + c)
}

fn maps(m: usize) -> Vec<(MapClass, ComplexMatrix)> {
    let mut out = Vec::new();
    for (k, (class, ens)) in [
        (MapClass::Pt, EnsembleClass::SymmetricUnitary),
        (MapClass::Pt, EnsembleClass::Unitary),
        (MapClass::PttPrime, EnsembleClass::Unitary),
    ]
    .into_iter()
    .enumerate()
    {
        for s in 0..4u64 {
            let f = sample_haar_unitary(&EnsembleSpec::new(ens, m, 31, 10 * k as u64 + s)).unwrap();
            let map = build_map(&f, 2, 0.7, 0.15 + 0.1 * s as f64, 1.0, class).unwrap();
            out.push((class, map.matrix().clone()));
        }
    }
    out
}

#[test]
fn characteristic_polynomial_is_self_inversive() {
    for (class, f) in maps(3) {
        let a = faddeev_leverrier(&f);
        let n = a.len() - 1;
        assert!((a[0].norm() - 1.0).abs() < 1e-10, "{class:?}: |det| = {}", a[0].norm());
        for k in 0..=n {
            let d = (a[k] - a[0] * a[n - k].conj()).norm();
            assert!(d < 1e-10, "{class:?}: coefficient {k} off by {d:e}");
        }
    }
}

/// Every inverted conjugate `1 / lambda*` is itself a root of the
/// characteristic polynomial built independently of the eigensolver.
#[test]
fn inverted_conjugates_are_roots() {
    for (class, f) in maps(3) {
        let a = faddeev_leverrier(&f);
        for l in dense::eig_general(f.as_ref()).unwrap() {
            let x = l.conj().inv();
            let scale: f64 = a.iter().enumerate().map(|(k, c)| c.norm() * x.norm().powi(k as i32)).sum();
            let p = poly_at(&a, x);
            assert!(p.norm() < 1e-10 * scale, "{class:?}: p(1/lambda*) = {p}");
            let shifted = &f - dense::scale(dense::identity(f.nrows()).as_ref(), x);
            let det = dense::log_det(shifted.as_ref()).unwrap();
            assert!(det.log_abs < -20.0, "{class:?}: ln|det| = {}", det.log_abs);
        }
    }
}

#[test]
fn spectrum_pairing_agrees_with_polynomial() {
    for (class, f) in maps(3) {
        let a = faddeev_leverrier(&f);
        let n = a.len() - 1;
        let eigs = dense::eig_general(f.as_ref()).unwrap();
        let prod = eigs.iter().fold(Complex64::new(1.0, 0.0), |p, l| p * l);
        // a_0 = (-1)^n prod(lambda), n even
        assert!((prod - a[0]).norm() < 1e-10, "{class:?}");
        assert_eq!(n % 2, 0);
    }
    let f = sample_haar_unitary(&EnsembleSpec::new(EnsembleClass::SymmetricUnitary, 3, 9, 0)).unwrap();
    let map = build_map(&f, 2, 0.4, 0.3, 1.0, MapClass::Pt).unwrap();
    assert!(map_spectrum(&map).unwrap().pairing_residual < 1e-12);
}
