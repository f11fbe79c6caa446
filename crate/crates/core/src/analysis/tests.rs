use num_complex::Complex64;
use proptest::prelude::*;

use super::*;
use crate::circulant::{gamma, gamma_inverse};
use crate::cubic::Dims;
use crate::dense::DenseMatrix;
use crate::products::power;
use crate::random;
use crate::scalar::{Modular, Real};

/// Roots of a monic ascending-coefficient polynomial by Durand–Kerner.
fn poly_roots(c: &[f64]) -> Vec<Complex64> {
    let n = c.len() - 1;
    let eval = |z: Complex64| c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &k| acc * z + k);
    let seed = Complex64::new(0.4, 0.9);
    let mut z: Vec<Complex64> = (0..n).map(|k| seed.powu(k as u32)).collect();
    for _ in 0..2000 {
        for i in 0..n {
            let denom = (0..n).filter(|&j| j != i).fold(Complex64::new(1.0, 0.0), |acc, j| acc * (z[i] - z[j]));
            let step = eval(z[i]) / denom;
            z[i] -= step;
        }
    }
    z
}

/// Greedy matching distance between two multisets of complex numbers.
fn multiset_dist(a: &[Complex64], b: &[Complex64]) -> f64 {
    let mut used = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for x in a {
        let (j, d) = b
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, y)| (j, (x - y).norm()))
            .min_by(|p, q| p.1.total_cmp(&q.1))
            .unwrap();
        used[j] = true;
        worst = worst.max(d);
    }
    worst
}

fn dense_poly(c: &[f64], m: &DenseMatrix) -> DenseMatrix {
    let n = m.rows();
    let mut acc = DenseMatrix::zeros(Real, n, n);
    for &k in c.iter().rev() {
        acc = acc.matmul(m).unwrap().add(&DenseMatrix::identity(Real, n).scale(k)).unwrap();
    }
    acc
}

#[test]
fn named_coefficients() {
    let exp = named_series("exp", None, 5).unwrap();
    assert_eq!(exp.constant, 1.0);
    assert_eq!(exp.coeffs, vec![1.0, 0.5, 1.0 / 6.0, 1.0 / 24.0, 1.0 / 120.0]);
    assert!(exp.radius.is_infinite());
    let log = named_series("log1p", None, 4).unwrap();
    assert_eq!(log.constant, 0.0);
    assert_eq!(log.coeffs, vec![1.0, -0.5, 1.0 / 3.0, -0.25]);
    assert_eq!(log.radius, 1.0);
    let b1 = named_series("binomial", Some(1.0), 10).unwrap();
    assert_eq!((b1.constant, b1.coeffs.clone(), b1.truncated), (1.0, vec![1.0], false));
    let sin = named_series("sin", None, 5).unwrap();
    assert_eq!(sin.coeffs, vec![1.0, 0.0, -1.0 / 6.0, 0.0, 1.0 / 120.0]);
    let cos = named_series("cos", None, 4).unwrap();
    assert_eq!(cos.coeffs, vec![0.0, -0.5, 0.0, 1.0 / 24.0]);
    assert!(named_series("tan", None, 4).is_err());
    assert!(named_series("binomial", None, 4).is_err());
    for x in [-0.5, 0.3, 0.9] {
        let f = named_series("cosh", None, 60).unwrap();
        assert!((f.eval_scalar(x) - f64::cosh(x)).abs() < 1e-15);
        let f = named_series("log1p", None, 400).unwrap();
        assert!((f.eval_scalar(x) - f64::ln_1p(x)).abs() < 1e-12);
    }
}

#[test]
fn series_json_radius() {
    let f = named_series("exp", None, 3).unwrap();
    let s = serde_json::to_string(&f).unwrap();
    assert!(s.contains("\"radius\":\"inf\""), "{s}");
    assert_eq!(serde_json::from_str::<PowerSeries>(&s).unwrap(), f);
    let g: PowerSeries = serde_json::from_str(r#"{"constant":0,"coeffs":[1,2],"radius":0.5}"#).unwrap();
    assert_eq!(g.radius, 0.5);
    assert!(!g.truncated);
    assert!(serde_json::from_str::<PowerSeries>(r#"{"constant":0,"coeffs":[],"radius":-1}"#).is_err());
}

#[test]
fn poly_trivial_cases() {
    let mut rng = random::rng(3);
    let a = random::real_cubic_unit(&mut rng, Dims { m: 2, n: 2, s: 3 });
    assert_eq!(poly_eval(&[0.0, 1.0], &a, ProductKind::TProduct).unwrap(), a);
    let id = CubicMatrix::identity_t(Real, 2, 2);
    assert!(poly_eval(&[-1.0, 0.0, 1.0], &id, ProductKind::TProduct).unwrap().is_zero());
    let rect = CubicMatrix::zeros(Real, Dims { m: 2, n: 3, s: 2 });
    assert!(poly_eval(&[1.0, 1.0], &rect, ProductKind::TStp).is_err());
    assert!(poly_eval(&[0.0, 1.0, 1.0], &rect, ProductKind::TStp).is_ok());
}

#[test]
fn char_poly_small() {
    assert_eq!(char_poly(&DenseMatrix::identity(Real, 2)).unwrap(), vec![1.0, -2.0, 1.0]);
    let swap = DenseMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
    assert_eq!(char_poly(&swap).unwrap(), vec![-1.0, 0.0, 1.0]);
}

#[test]
fn char_poly_roots_match_qr() {
    let mut rng = random::rng(5);
    for _ in 0..20 {
        let m = random::real_dense(&mut rng, 4, 4);
        let roots = poly_roots(&char_poly(&m).unwrap());
        let qr = eigenvalues(&m).unwrap();
        assert!(multiset_dist(&qr, &roots) <= 1e-7, "{qr:?} vs {roots:?}");
    }
}

#[test]
fn t_eigen_trivial() {
    let id = CubicMatrix::identity_t(Real, 2, 3);
    let r = t_eigen(&id).unwrap();
    assert_eq!(r.eigenvalues.len(), 6);
    assert!(r.eigenvalues.iter().all(|l| (l - 1.0).norm() < 1e-14));
    assert!(r.eigenvectors.iter().all(Option::is_some));
    assert_eq!(*r.charpoly.last().unwrap(), 1.0);
    let z = t_eigen(&CubicMatrix::zeros(Real, Dims { m: 2, n: 2, s: 2 })).unwrap();
    assert!(z.eigenvalues.iter().all(|l| l.norm() == 0.0));
    assert!(t_eigen(&CubicMatrix::zeros(Real, Dims { m: 2, n: 3, s: 2 })).is_err());
}

#[test]
fn t_eigen_random_matches_root_solve() {
    let mut rng = random::rng(6);
    for _ in 0..30 {
        let a = random::real_cubic_unit(&mut rng, Dims { m: 2, n: 2, s: 2 });
        let r = t_eigen(&a).unwrap();
        let g = gamma(&a);
        let roots = poly_roots(&char_poly(&g).unwrap());
        assert!(multiset_dist(&r.eigenvalues, &roots) <= 1e-7);
        for (lam, v) in r.eigenvalues.iter().zip(&r.eigenvectors) {
            if let Some(v) = v {
                let gv = g.matmul(&v.unfold()).unwrap();
                let res = gv.sub(&v.unfold().scale(lam.re)).unwrap().frobenius_norm();
                assert!(res <= 1e-8 * g.frobenius_norm());
                // t-eigenvector equation (A − λI) ⋆ x = 0
                let shifted = a.sub(&CubicMatrix::identity_t(Real, 2, 2).scale(lam.re)).unwrap();
                let tx = ProductKind::TProduct.apply(&shifted, v).unwrap();
                assert!(tx.frobenius_norm() <= 1e-8 * g.frobenius_norm());
            } else {
                assert!(lam.im.abs() > 1e-10);
            }
        }
    }
}

#[test]
fn cayley_hamilton_trivial() {
    assert!(cayley_hamilton_residual(&CubicMatrix::identity_t(Real, 2, 2)).unwrap() <= 1e-12);
    assert_eq!(cayley_hamilton_residual(&CubicMatrix::zeros(Real, Dims { m: 2, n: 2, s: 2 })).unwrap(), 0.0);
    let mut rng = random::rng(9);
    for _ in 0..50 {
        let a = random::real_cubic(&mut rng, Dims { m: 3, n: 3, s: 2 }, 1.0);
        assert!(cayley_hamilton_residual(&a).unwrap() <= 1e-8);
    }
}

#[test]
fn exp_of_zero_is_identity() {
    let exp = named_series("exp", None, 128).unwrap();
    let z = CubicMatrix::zeros(Real, Dims { m: 3, n: 3, s: 2 });
    for kind in ProductKind::ALL {
        let e = analytic_eval(&exp, &z, kind, &TruncationPolicy::default()).unwrap();
        assert_eq!(e, kind.identity(Real, 3, 2));
    }
}

#[test]
fn radius_and_convergence_errors() {
    let log = named_series("log1p", None, 128).unwrap();
    let big = CubicMatrix::identity_t(Real, 2, 2).scale(2.0);
    assert!(matches!(
        analytic_eval(&log, &big, ProductKind::TProduct, &TruncationPolicy::default()),
        Err(Error::Radius { .. })
    ));
    let exp = named_series("exp", None, 5).unwrap();
    let a = CubicMatrix::identity_t(Real, 2, 2);
    match analytic_eval(&exp, &a, ProductKind::TProduct, &TruncationPolicy::default()) {
        Err(e @ Error::Convergence { .. }) => assert!(e.is_numeric()),
        other => panic!("expected convergence error, got {other:?}"),
    }
    let exp = named_series("exp", None, 128).unwrap();
    let capped = TruncationPolicy { atol: 1e-14, max_terms: 3 };
    assert!(matches!(analytic_eval(&exp, &a, ProductKind::TProduct, &capped), Err(Error::Convergence { .. })));
}

#[test]
fn nonsquare_analytic_is_extended() {
    let sin = named_series("sin", None, 128).unwrap();
    let cos = named_series("cos", None, 128).unwrap();
    let a = CubicMatrix::from_fn(Real, Dims { m: 2, n: 3, s: 2 }, |i, j, k| 0.1 * (i + j + k) as f64);
    let p = TruncationPolicy::default();
    assert!(analytic_eval(&sin, &a, ProductKind::TStp, &p).is_ok());
    let c = analytic_eval_extended(&cos, &a, ProductKind::TStp, &p).unwrap();
    assert_eq!(c.r, 1.0);
    assert!(analytic_eval(&cos, &a, ProductKind::TStp, &p).is_err());
}

#[test]
fn modular_polynomial_only() {
    let z = Modular::new(12).unwrap();
    let a = CubicMatrix::from_fn(z, Dims { m: 2, n: 3, s: 2 }, |i, j, k| (i + 2 * j + 5 * k) as u64 % 12);
    let sq = PowerSeries::polynomial(0.0, vec![0.0, 1.0]);
    let got = analytic_eval(&sq, &a, ProductKind::TStp, &TruncationPolicy::default()).unwrap();
    assert_eq!(got, power(&a, 2, ProductKind::TStp).unwrap());
    let exp = named_series("exp", None, 10).unwrap();
    assert!(matches!(
        analytic_eval(&exp, &a, ProductKind::TStp, &TruncationPolicy::default()),
        Err(Error::Unsupported(_))
    ));
}

/// `sin(M)`, `cos(M)` from `exp([[0, −M], [M, 0]]) = [[cos M, −sin M], [sin M, cos M]]`.
fn dense_sin_cos(m: &DenseMatrix) -> (DenseMatrix, DenseMatrix) {
    let n = m.rows();
    let mut big = DenseMatrix::zeros(Real, 2 * n, 2 * n);
    big.set_block(0, n, &m.neg());
    big.set_block(n, 0, m);
    let e = big.expm().unwrap();
    (e.block(n, 0, n, n).unwrap(), e.block(0, 0, n, n).unwrap())
}

#[test]
fn gamma_naturality_sin_cos() {
    let mut rng = random::rng(12);
    let p = TruncationPolicy::default();
    let sin = named_series("sin", None, 128).unwrap();
    let cos = named_series("cos", None, 128).unwrap();
    for _ in 0..20 {
        let a = random::real_cubic(&mut rng, Dims { m: 2, n: 2, s: 3 }, 1.0);
        let (ds, dc) = dense_sin_cos(&gamma(&a));
        let s = gamma(&analytic_eval(&sin, &a, ProductKind::TProduct, &p).unwrap());
        let c = gamma(&analytic_eval(&cos, &a, ProductKind::TProduct, &p).unwrap());
        assert!(s.max_abs_diff(&ds) <= 1e-12 * (1.0 + ds.frobenius_norm()));
        assert!(c.max_abs_diff(&dc) <= 1e-12 * (1.0 + dc.frobenius_norm()));
    }
}

#[test]
fn truncation_monotone() {
    let mut rng = random::rng(13);
    let exp = named_series("exp", None, 128).unwrap();
    for _ in 0..10 {
        let a = random::real_cubic(&mut rng, Dims { m: 2, n: 2, s: 2 }, 1.0);
        let want = gamma(&a).expm().unwrap();
        let mut prev = f64::INFINITY;
        for terms in 1..30 {
            let got = gamma(&partial_sum(&exp, &a, ProductKind::TProduct, terms).unwrap());
            let res = got.max_abs_diff(&want);
            // once at round-off level the residual may wobble by an ulp or two
            assert!(res <= prev + 4.0 * f64::EPSILON * want.frobenius_norm(), "terms={terms}: {res} > {prev}");
            prev = prev.min(res);
        }
    }
}

fn arb_small(dims: Dims) -> impl Strategy<Value = CubicMatrix> {
    prop::collection::vec(-1.0f64..1.0, dims.len()).prop_map(move |v| {
        let a = CubicMatrix::new(Real, dims, v).unwrap();
        let n = a.frobenius_norm();
        if n > 1.0 { a.scale(1.0 / n) } else { a }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn gamma_of_poly_is_poly_of_gamma(a in arb_small(Dims { m: 2, n: 2, s: 3 }), c in prop::collection::vec(-2.0f64..2.0, 1..6)) {
        let lhs = gamma(&poly_eval(&c, &a, ProductKind::TProduct).unwrap());
        let rhs = dense_poly(&c, &gamma(&a));
        prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-11 * (1.0 + rhs.frobenius_norm()));
    }

    #[test]
    fn exp_naturality_and_group_law(a in arb_small(Dims { m: 2, n: 2, s: 2 })) {
        let p = TruncationPolicy::default();
        let exp = named_series("exp", None, 128).unwrap();
        let e = analytic_eval(&exp, &a, ProductKind::TProduct, &p).unwrap();
        let want = gamma(&a).expm().unwrap();
        prop_assert!(gamma(&e).max_abs_diff(&want) <= 1e-9 * want.frobenius_norm());
        prop_assert_eq!(gamma_inverse(&want, a.dims(), true).is_ok(), true);
        let em = analytic_eval(&exp, &a.neg(), ProductKind::TProduct, &p).unwrap();
        let prod = ProductKind::TProduct.apply(&e, &em).unwrap();
        prop_assert!(prod.sub(&CubicMatrix::identity_t(Real, 2, 2)).unwrap().frobenius_norm() <= 1e-8);
    }

    #[test]
    fn pythagorean(a in arb_small(Dims { m: 2, n: 2, s: 2 })) {
        let p = TruncationPolicy::default();
        let s = analytic_eval(&named_series("sin", None, 128).unwrap(), &a, ProductKind::TProduct, &p).unwrap();
        let c = analytic_eval(&named_series("cos", None, 128).unwrap(), &a, ProductKind::TProduct, &p).unwrap();
        let sum = power(&s, 2, ProductKind::TProduct).unwrap().add(&power(&c, 2, ProductKind::TProduct).unwrap()).unwrap();
        prop_assert!(sum.sub(&CubicMatrix::identity_t(Real, 2, 2)).unwrap().frobenius_norm() <= 1e-8);
    }
}
