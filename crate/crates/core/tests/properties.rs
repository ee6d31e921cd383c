use std::sync::Arc;

use proptest::prelude::*;
use pseudoanalytic::bers::{formal_power, higher_derivative, GeneratingPair, IntegrationCfg};
use pseudoanalytic::contexts::Builtin;
use pseudoanalytic::fields::{wirtinger, BiField, Domain, Jet, Point, Wirtinger};
use pseudoanalytic::oracles::{self, Unit};
use pseudoanalytic::transplant::{cauchy_kernel, TransplantConfig};
use pseudoanalytic::vekua::{factorization_residual, vekua_residual, MainVekua};
use pseudoanalytic::{Binumber, Signature};

fn sig_strategy() -> impl Strategy<Value = Signature> {
    prop_oneof![Just(Signature::Elliptic), Just(Signature::Hyperbolic)]
}

/// Real quadratic `c0 + c1 x + c2 y + c3 x² + c4 xy + c5 y²` with its gradient.
fn quadratic(c: [f64; 6]) -> impl Fn(Point<f64>) -> (f64, f64, f64) + Send + Sync + 'static {
    move |p| {
        let v = c[0] + c[1] * p.x + c[2] * p.y + c[3] * p.x * p.x + c[4] * p.x * p.y + c[5] * p.y * p.y;
        let vx = c[1] + 2.0 * c[3] * p.x + c[4] * p.y;
        let vy = c[2] + c[4] * p.x + 2.0 * c[5] * p.y;
        (v, vx, vy)
    }
}

fn coeffs() -> impl Strategy<Value = [f64; 6]> {
    prop::array::uniform6(-3.0..3.0f64)
}

fn f_y2_power(n: u32, a: Binumber<f64>, z0: Point<f64>) -> pseudoanalytic::FormalPower64 {
    let seq = Builtin::FY2.known_sequence::<f64>().unwrap();
    formal_power(&seq, n, a, z0, 0, &IntegrationCfg::default()).unwrap()
}

#[test]
fn zeroth_derivative_is_the_field() {
    let seq = Builtin::FY2.known_sequence::<f64>().unwrap();
    let w = f_y2_power(1, Binumber::elliptic(0.0, 1.0), Point::new(1.0, 2.0)).value;
    let d = higher_derivative(&seq, &w, 0).unwrap();
    let p = Point::new(1.7, 0.9);
    assert_eq!(d.value(p), w.value(p));
}

#[test]
fn derivatives_of_the_generators_vanish() {
    let seq = Builtin::FY2.known_sequence::<f64>().unwrap();
    let f = Builtin::FY2.generator::<f64>();
    for m in 1..=2 {
        let d = higher_derivative(&seq, &f, m).unwrap();
        for p in [Point::new(0.7, 1.3), Point::new(2.0, 2.5)] {
            assert!(d.value(p).norm() < 1e-6, "m = {m}: {:?}", d.value(p));
        }
    }
}

#[test]
fn second_derivative_of_a_second_power() {
    // d² Z^(2)(a) = 2·Z_2^(0)(a), and the y² sequence has period one.
    let z0 = Point::new(1.0, 2.0);
    let seq = Builtin::FY2.known_sequence::<f64>().unwrap();
    for a in [Unit::One, Unit::I] {
        let w = f_y2_power(2, a.value(), z0).value;
        let d = higher_derivative(&seq, &w, 2).unwrap();
        for p in [Point::new(1.4, 1.8), Point::new(0.8, 2.6), Point::new(2.2, 1.1)] {
            let exact = oracles::z_f(0, a, z0, p).unwrap().scale(2.0);
            let err = (d.value(p) - exact).norm() / exact.norm();
            assert!(err < 1e-4, "{a:?} at {p:?}: {err:e}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn finite_differences_match_exact_wirtinger_derivatives(sig in sig_strategy(), c in coeffs(),
                                                            x in -0.8..0.8f64, y in -0.8..0.8f64) {
        let dom = Arc::new(Domain::rectangle(pseudoanalytic::fields::BoundingBox::new(-1.0, 1.0, -1.0, 1.0)));
        let exact = BiField::real_from_gradient(sig, dom, quadratic(c));
        let fd = exact.to_finite_difference(None);
        let p = Point::new(x, y);
        for which in [Wirtinger::Dz, Wirtinger::Dzbar] {
            let e = wirtinger(&exact, which, p).unwrap();
            let d = wirtinger(&fd, which, p).unwrap();
            prop_assert!((e - d).norm() <= 1e-7 * (1.0 + e.norm()), "{which:?}: {e:?} vs {d:?}");
        }
    }

    #[test]
    fn factorization_holds_for_any_real_field(c in coeffs(), x in 0.5..3.0f64, y in 0.5..3.0f64) {
        let ctx = Builtin::FY2.context::<f64>().unwrap();
        let phi = BiField::real_from_gradient(Signature::Elliptic, ctx.domain().clone(), quadratic(c));
        let scale = 1.0 + c.iter().map(|v| v.abs()).sum::<f64>();
        let r = factorization_residual(&ctx, &phi, Point::new(x, y)).unwrap();
        prop_assert!(r <= 1e-7 * scale, "{r:e}");
    }

    #[test]
    fn unit_kernel_is_the_pole_for_any_coefficient(re in -2.0..2.0f64, im in -2.0..2.0f64,
                                                   x0 in -0.5..0.5f64, y0 in -0.5..0.5f64) {
        prop_assume!(re.hypot(im) > 1e-3);
        let a = Binumber::elliptic(re, im);
        let z0 = Point::new(x0, y0);
        let cfg = TransplantConfig::for_kernel(Point::new(0.9, -0.9), 0.05);
        let k = cauchy_kernel(&Builtin::Unit.context().unwrap(), a, z0, &cfg).unwrap();
        for p in [Point::new(0.8, 0.8), Point::new(-0.7, 0.2), Point::new(0.1, -0.75)] {
            let d = p.to_binumber(Signature::Elliptic) - z0.to_binumber(Signature::Elliptic);
            let h = (d * k.eval(p)).norm() / a.norm();
            prop_assert!((h - 1.0).abs() < 1e-12, "H = {h}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn formal_powers_are_real_linear_in_the_coefficient(re in -2.0..2.0f64, im in -2.0..2.0f64,
                                                        x in 0.6..2.8f64, y in 0.6..2.8f64) {
        let z0 = Point::new(1.0, 2.0);
        let p = Point::new(x, y);
        let a = Binumber::elliptic(re, im);
        let z = f_y2_power(1, a, z0).eval(p);
        let exact = oracles::z_f(1, Unit::One, z0, p).unwrap().scale(re)
            + oracles::z_f(1, Unit::I, z0, p).unwrap().scale(im);
        prop_assert!((z - exact).norm() <= 1e-9 * (1.0 + exact.norm()), "{z:?} vs {exact:?}");
    }

    #[test]
    fn generator_pairs_solve_their_equation(c in 0.5..3.0f64, x in 0.6..2.8f64, y in 0.6..2.8f64) {
        // (f, u/f) with f = c·y²: a = 0 and the pair generates the same equation for every c.
        let ctx = Builtin::FY2.context::<f64>().unwrap();
        let f = ctx.f.scale(c);
        let pair = GeneratingPair::from_generator(&f);
        let eq = MainVekua::new(ctx);
        let p = Point::new(x, y);
        prop_assert!(vekua_residual(&eq, &pair.f, p).unwrap() < 1e-12);
        prop_assert!(vekua_residual(&eq, &pair.g, p).unwrap() < 1e-12);
        let exact = Jet::from_real(Signature::Elliptic, c * y * y, 0.0, 2.0 * c * y);
        prop_assert!((pair.f.jet(p).value - exact.value).norm() < 1e-12);
    }
}
