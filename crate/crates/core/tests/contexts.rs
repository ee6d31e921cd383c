use pseudoanalytic::contexts::*;
use pseudoanalytic::fields::make_context;
use pseudoanalytic::fields::{Point, Potential};

#[test]
fn names_round_trip() {
    for b in Builtin::ALL {
        assert_eq!(b.name().parse::<Builtin>().unwrap(), b);
    }
    assert!("g_x2".parse::<Builtin>().is_err());
}

#[test]
fn shared_potentials() {
    let f = Builtin::FY2.context::<f64>().unwrap();
    let g = Builtin::G1xy3.context::<f64>().unwrap();
    let h = Builtin::GXy.context::<f64>().unwrap();
    for p in [Point::new(0.5, 0.7), Point::new(2.0, 3.0)] {
        let q = 2.0 / (p.y * p.y);
        assert!((f.q.value(p).re - q).abs() < 1e-7 * q);
        assert!((g.q.value(p).re - q).abs() < 1e-7 * q);
        assert!(h.q.value(p).re.abs() < 1e-7);
        assert!(h.residual(&h.f, Potential::Q, p).unwrap() < 1e-6);
    }
}

#[test]
fn hyperbolic_potentials() {
    for (f, q) in [
        (hyperbolic::cosh_x::<f64>(), 1.0),
        (hyperbolic::exp_x(), 1.0),
        (hyperbolic::exp_x_plus_t(), 0.0),
        (hyperbolic::two_plus_xt(), 0.0),
    ] {
        let ctx = make_context(f).unwrap();
        let v = ctx.q.value(Point::new(0.3, -0.4)).re;
        assert!((v - q).abs() < 1e-6, "{v} vs {q}");
    }
}
