use approx::assert_relative_eq;
use pseudoanalytic::algebra::{Binumber, Signature};
use pseudoanalytic::antigradient::Path;
use pseudoanalytic::bers::*;
use pseudoanalytic::error::Error;
use pseudoanalytic::fields::{BiField, Domain, Point};
use pseudoanalytic::quadrature::QuadratureCfg;
use std::sync::Arc;

fn quad() -> Arc<Domain<f64>> {
    Arc::new(Domain::quadrant(20.0))
}

fn y2() -> BiField<f64> {
    BiField::real_from_gradient(Signature::Elliptic, quad(), |p| (p.y * p.y, 0.0, 2.0 * p.y))
}

fn unit_pair() -> GeneratingPair<f64> {
    let sig = Signature::Elliptic;
    GeneratingPair::new(
        BiField::constant(sig, quad(), Binumber::one(sig)),
        BiField::constant(sig, quad(), Binumber::unit(sig)),
    )
    .unwrap()
}

#[test]
fn coefficients_of_y_squared_pair() {
    let pair = GeneratingPair::from_generator(&y2());
    let c = pair.char_coeffs(Point::new(0.4, 2.5)).unwrap();
    assert!(c.a.norm() < 1e-15);
    assert_relative_eq!(c.b.im, 1.0 / 2.5, epsilon = 1e-15);
    assert!(c.b.re.abs() < 1e-15);
}

#[test]
fn adjoint_examples() {
    let pair = GeneratingPair::from_generator(&y2());
    let p = Point::new(1.0, 3.0);
    let (fs, gs) = pair.adjoint_at(p);
    assert!((fs - Binumber::elliptic(0.0, -9.0)).norm() < 1e-13);
    assert!((gs - Binumber::elliptic(1.0 / 9.0, 0.0)).norm() < 1e-15);
    let (fs, gs) = unit_pair().adjoint_at(p);
    assert!((fs - Binumber::elliptic(0.0, -1.0)).norm() < 1e-15);
    assert!((gs - Binumber::elliptic(1.0, 0.0)).norm() < 1e-15);
    let back = pair.adjoint().unwrap().adjoint().unwrap();
    assert!((back.f.value(p) - pair.f.value(p)).norm() < 1e-12);
    assert!((back.g.value(p) - pair.g.value(p)).norm() < 1e-12);
}

#[test]
fn degenerate_pair_is_rejected() {
    let f = y2();
    assert!(matches!(GeneratingPair::new(f.clone(), f.scale(2.0)), Err(Error::DegeneratePair { .. })));
    let bad = GeneratingPair::new_unchecked(f.clone(), f);
    assert!(matches!(bad.char_coeffs(Point::new(1.0, 1.0)), Err(Error::DegeneratePair { .. })));
}

#[test]
fn derivative_of_generators_vanishes() {
    let pair = GeneratingPair::from_generator(&y2());
    let p = Point::new(0.8, 1.7);
    assert!(fg_derivative(&pair, &pair.f, p).unwrap().norm() < 1e-13);
    assert!(fg_derivative(&pair, &pair.g, p).unwrap().norm() < 1e-13);
    let z = BiField::identity(Signature::Elliptic, quad());
    let d = fg_derivative(&unit_pair(), &z.mul(&z), p).unwrap();
    assert!((d - p.to_binumber(Signature::Elliptic).scale(2.0)).norm() < 1e-13);
}

#[test]
fn zero_order_powers() {
    let pair = GeneratingPair::from_generator(&y2());
    let z0 = Point::new(1.0, 2.0);
    let z = formal_power_zero(&pair, Binumber::elliptic(1.0, 0.0), z0).unwrap();
    let p = Point::new(3.0, 1.5);
    assert_relative_eq!(z.eval(p).re, (1.5f64 / 2.0).powi(2), epsilon = 1e-15);
    let zi = formal_power_zero(&pair, Binumber::elliptic(0.0, 1.0), z0).unwrap();
    assert_relative_eq!(zi.eval(p).im, (2.0f64 / 1.5).powi(2), epsilon = 1e-14);
    let c = formal_power_zero(&unit_pair(), Binumber::elliptic(3.0, 4.0), z0).unwrap();
    assert_eq!(c.eval(p), Binumber::elliptic(3.0, 4.0));
}

#[test]
fn analytic_integral_and_antiderivative() {
    let pair = unit_pair();
    let z = BiField::identity(Signature::Elliptic, quad());
    let (z0, z1) = (Point::new(0.5, 0.5), Point::new(2.0, 1.5));
    let path = Path::axis_aligned(z0, z1, QuadratureCfg::default());
    let v = fg_integral(&pair, &z, &path).unwrap();
    let exact = (z1.to_binumber(Signature::Elliptic).powi(2).unwrap()
        - z0.to_binumber(Signature::Elliptic).powi(2).unwrap())
    .scale(0.5);
    assert!((v - exact).norm() < 1e-12);
}

#[test]
fn first_power_of_y_squared() {
    let seq = GeneratingSequence::periodic(vec![GeneratingPair::from_generator(&y2())]);
    let (x0, y0) = (1.0f64, 2.0f64);
    let z1 =
        formal_power(&seq, 1, Binumber::elliptic(1.0, 0.0), Point::new(x0, y0), 0, &IntegrationCfg::default()).unwrap();
    for p in [Point::new(0.6f64, 2.7), Point::new(2.9, 0.7)] {
        let (x, y) = (p.x, p.y);
        let exact =
            Binumber::elliptic((x - x0) * (y / y0).powi(2), (y.powi(5) - y0.powi(5)) / (5.0 * (y0 * y).powi(2)));
        assert!((z1.eval(p) - exact).norm() < 1e-10 * (1.0 + exact.norm()));
    }
    let d = descend(seq.pair(0).unwrap(), &z1).unwrap();
    let z0 = formal_power_zero(seq.pair(1).unwrap(), Binumber::elliptic(1.0, 0.0), Point::new(x0, y0)).unwrap();
    let p = Point::new(1.3, 1.9);
    assert!((d.eval(p) - z0.eval(p)).norm() < 1e-7);
    assert!(z1.asymptotic_ratio_error(Point::new(x0 + 1e-3, y0)).unwrap() < 0.05);
}

#[test]
fn grid_cache_is_consistent() {
    let seq = GeneratingSequence::periodic(vec![GeneratingPair::from_generator(&y2())]);
    let z = formal_power(&seq, 1, Binumber::elliptic(0.0, 1.0), Point::new(1.0, 2.0), 0, &IntegrationCfg::default())
        .unwrap();
    let grid = pseudoanalytic::fields::BoundingBox::new(0.5, 3.0, 0.5, 3.0).grid(7, 5);
    let a = z.eval_grid(&grid);
    let b = z.eval_grid(&grid);
    assert!(Arc::ptr_eq(&a, &b));
    assert_eq!(a[12], z.eval(grid[12]));
}

#[test]
fn sequence_indexing() {
    let seq = GeneratingSequence::new(vec![unit_pair()]);
    assert!(seq.pair(0).is_ok());
    assert!(matches!(seq.pair(1), Err(Error::SequenceExhausted(1))));
    assert!(matches!(seq.pair(-1), Err(Error::SequenceExhausted(-1))));
    let per = GeneratingSequence::periodic(vec![unit_pair()]);
    assert!(per.pair(-7).is_ok());
}

#[test]
fn fit_recovers_basis_member() {
    let seq = GeneratingSequence::periodic(vec![unit_pair()]);
    let z0 = Point::new(1.0, 1.0);
    let cfg = IntegrationCfg::default();
    let mut basis = Vec::new();
    for n in 0..3 {
        for a in [Binumber::elliptic(1.0, 0.0), Binumber::elliptic(0.0, 1.0)] {
            basis.push(formal_power(&seq, n, a, z0, 0, &cfg).unwrap());
        }
    }
    let target = basis[4].value.clone();
    let samples = pseudoanalytic::fields::BoundingBox::new(0.5, 2.0, 0.5, 2.0).grid(4, 4);
    let fit = formal_polynomial_fit(&basis, &target, &samples).unwrap();
    assert!(fit.residual < 1e-9);
    for (k, c) in fit.coefficients.iter().enumerate() {
        assert_relative_eq!(*c, if k == 4 { 1.0 } else { 0.0 }, epsilon = 1e-8);
    }
    let dup = vec![basis[0].clone(), basis[0].clone()];
    assert!(matches!(formal_polynomial_fit(&dup, &target, &samples), Err(Error::Fit(_))));
}
