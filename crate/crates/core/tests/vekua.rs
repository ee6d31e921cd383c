use approx::assert_relative_eq;
use pseudoanalytic::algebra::{Binumber, Signature};
use pseudoanalytic::error::Error;
use pseudoanalytic::fields::{make_context, BoundingBox, Domain};
use pseudoanalytic::fields::{BiField, Point, SchrodingerContext};
use pseudoanalytic::vekua::*;
use std::sync::Arc;

fn quad() -> Arc<Domain<f64>> {
    Arc::new(Domain::quadrant(20.0))
}

fn y2_ctx() -> SchrodingerContext<f64> {
    make_context(BiField::real_from_gradient(Signature::Elliptic, quad(), |p| (p.y * p.y, 0.0, 2.0 * p.y))).unwrap()
}

fn unit_ctx(sig: Signature, dom: Arc<Domain<f64>>) -> SchrodingerContext<f64> {
    make_context(BiField::constant(sig, dom, Binumber::one(sig))).unwrap()
}

#[test]
fn coefficient_of_y_squared() {
    let eq = MainVekua::new(y2_ctx());
    let c = eq.coefficient(Point::new(0.3, 2.0));
    assert_relative_eq!(c.re, 0.0);
    assert_relative_eq!(c.im, 0.5);
}

#[test]
fn residual_examples() {
    let ctx = y2_ctx();
    let eq = MainVekua::new(ctx.clone());
    assert!(vekua_residual(&eq, &ctx.f, Point::new(1.0, 1.0)).unwrap() < 1e-14);
    let z = BiField::identity(Signature::Elliptic, quad());
    assert_relative_eq!(vekua_residual(&eq, &z, Point::new(1.0, 1.0)).unwrap(), 2f64.sqrt(), epsilon = 1e-14);
    assert!(matches!(vekua_residual(&eq, &z, Point::new(-1.0, 1.0)), Err(Error::Domain { .. })));
}

#[test]
fn harmonic_conjugate() {
    let dom = Arc::new(Domain::rectangle(BoundingBox::new(-3.0, 3.0, -3.0, 3.0)));
    let ctx = unit_ctx(Signature::Elliptic, dom.clone());
    let w1 = BiField::real_from_gradient(Signature::Elliptic, dom, |p| (p.x * p.x - p.y * p.y, 2.0 * p.x, -2.0 * p.y));
    let w2 = conjugate_imag(&ctx, &w1, Point::new(0.0, 0.0)).unwrap();
    for p in [Point::new(1.0, 2.0), Point::new(-2.5, 0.3)] {
        assert_relative_eq!(w2.value(p).re, 2.0 * p.x * p.y, epsilon = 1e-10);
    }
    let back = conjugate_real(&ctx, &w2, Point::new(0.0, 0.0)).unwrap();
    let p = Point::new(1.5, -0.5);
    assert_relative_eq!(back.value(p).re, p.x * p.x - p.y * p.y, epsilon = 1e-9);
}

#[test]
fn y_squared_conjugate() {
    let ctx = y2_ctx();
    let (x0, y0) = (1.0f64, 2.0f64);
    let w1 = BiField::real_from_gradient(Signature::Elliptic, quad(), move |p| {
        let r = (p.y / y0).powi(2);
        ((p.x - x0) * r, r, 2.0 * (p.x - x0) * p.y / (y0 * y0))
    });
    let w2 = conjugate_imag(&ctx, &w1, Point::new(x0, y0)).unwrap();
    let eq = MainVekua::new(ctx);
    let w = BiField::compose(&w1, &w2);
    for p in [Point::new(0.7f64, 1.1), Point::new(2.5, 2.9)] {
        let exact = (p.y.powi(5) - y0.powi(5)) / (5.0 * (y0 * p.y).powi(2));
        assert_relative_eq!(w2.value(p).re, exact, epsilon = 1e-10);
        assert!(vekua_residual(&eq, &w, p).unwrap() < 1e-8);
    }
}

#[test]
fn hyperbolic_conjugate_of_xt() {
    let sig = Signature::Hyperbolic;
    let dom = Arc::new(Domain::rectangle(BoundingBox::new(-2.0, 2.0, -2.0, 2.0)));
    let ctx = unit_ctx(sig, dom.clone());
    let w1 = BiField::real_from_gradient(sig, dom, |p| (p.x * p.y, p.y, p.x));
    let z0 = Point::new(0.5, -0.25);
    let w2 = conjugate_imag(&ctx, &w1, z0).unwrap();
    let p = Point::new(-1.1, 1.7);
    assert_relative_eq!(w2.value(p).re, (p.x * p.x + p.y * p.y - z0.x * z0.x - z0.y * z0.y) / 2.0, epsilon = 1e-10);
}

#[test]
fn non_solution_is_not_conservative() {
    let ctx = y2_ctx();
    let w1 = BiField::real_from_gradient(Signature::Elliptic, quad(), |p| (p.x * p.x, 2.0 * p.x, 0.0));
    assert!(matches!(conjugate_imag(&ctx, &w1, Point::new(1.0, 1.0)), Err(Error::NotConservative { .. })));
}

#[test]
fn factorization_holds_for_arbitrary_phi() {
    let ctx = y2_ctx();
    let phi = BiField::real_from_gradient(Signature::Elliptic, quad(), |p| {
        let (x, y) = (p.x, p.y);
        (x * x * y - 3.0 * y.powi(3) + x, 2.0 * x * y + 1.0, x * x - 9.0 * y * y)
    });
    assert!(factorization_residual(&ctx, &phi, Point::new(1.2, 0.9)).unwrap() < 1e-7);
    assert!(factorization_residual(&ctx, &ctx.f, Point::new(1.2, 0.9)).unwrap() < 1e-7);
}

#[test]
fn b_operator() {
    let ctx = y2_ctx();
    let p = Point::new(1.0, 3.0);
    let one = BiField::constant(Signature::Elliptic, quad(), Binumber::elliptic(1.0, 0.0));
    let i = BiField::constant(Signature::Elliptic, quad(), Binumber::elliptic(0.0, 1.0));
    assert_relative_eq!(apply_b(&one, &ctx.f, BDirection::Forward).value(p).re, 9.0);
    assert_relative_eq!(apply_b(&i, &ctx.f, BDirection::Forward).value(p).im, 1.0 / 9.0);
    let z = BiField::identity(Signature::Elliptic, quad());
    let rt = apply_b(&apply_b(&z, &ctx.f, BDirection::Forward), &ctx.f, BDirection::Inverse);
    assert!((rt.value(p) - z.value(p)).norm() < 1e-14);
}

#[test]
fn p_analytic_and_relation() {
    let ctx = y2_ctx();
    let unit = PAnalyticSystem { p: BiField::constant(Signature::Elliptic, quad(), Binumber::elliptic(1.0, 0.0)) };
    let z = BiField::identity(Signature::Elliptic, quad());
    let p = Point::new(0.4, 1.7);
    assert!(p_analytic_residual(&unit, &z, p).unwrap() < 1e-15);
    let y4 = PAnalyticSystem::from_generator(&ctx.f);
    assert!(p_analytic_residual(&y4, &z, p).unwrap() > 0.1);
    let omega = z.mul(&z).add(&z.conj());
    assert!(relation_check(&ctx.f, &omega, p).unwrap() < 1e-12);
}
