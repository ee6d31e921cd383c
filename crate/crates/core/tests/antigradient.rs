use approx::assert_relative_eq;
use pseudoanalytic::algebra::{Binumber, Signature};
use pseudoanalytic::antigradient::*;
use pseudoanalytic::error::Error;
use pseudoanalytic::fields::{wirtinger, BoundingBox, Wirtinger};
use pseudoanalytic::fields::{BiField, Domain, Jet, Point};
use pseudoanalytic::quadrature::QuadratureCfg;
use std::sync::Arc;

fn rect() -> Arc<Domain<f64>> {
    Arc::new(Domain::rectangle(BoundingBox::new(-4.0, 4.0, -4.0, 4.0)))
}

fn constant(sig: Signature, re: f64, im: f64) -> BiField<f64> {
    BiField::constant(sig, rect(), Binumber::new(re, im, sig))
}

#[test]
fn constant_integrands() {
    let (z0, z) = (Point::new(0.5, -1.0), Point::new(2.0, 3.0));
    let path = Path::axis_aligned(z0, z, QuadratureCfg::default());
    let i = constant(Signature::Elliptic, 0.0, 1.0);
    assert_relative_eq!(abar(&i, z0, z, &path, 0.0).unwrap(), 2.0 * (z.y - z0.y), epsilon = 1e-12);
    let one = constant(Signature::Elliptic, 1.0, 0.0);
    assert_relative_eq!(abar(&one, z0, z, &path, 0.0).unwrap(), 2.0 * (z.x - z0.x), epsilon = 1e-12);
    let j = constant(Signature::Hyperbolic, 0.0, 1.0);
    assert_relative_eq!(abar_h(&j, z0, z, &path, 0.0).unwrap(), -2.0 * (z.y - z0.y), epsilon = 1e-12);
    let one_h = constant(Signature::Hyperbolic, 1.0, 0.0);
    assert_relative_eq!(abar_h(&one_h, z0, z, &path, 0.0).unwrap(), 2.0 * (z.x - z0.x), epsilon = 1e-12);
    assert_eq!(compatibility_residual(&i, z), 0.0);
}

#[test]
fn wave_conjugate_integrand() {
    let sig = Signature::Hyperbolic;
    let phi = BiField::analytic(sig, rect(), move |p| {
        Jet::from_partials(
            Binumber::new(-0.5 * p.x, 0.5 * p.y, sig),
            Binumber::real(-0.5, sig),
            Binumber::new(0.0, 0.5, sig),
        )
    });
    let (z0, z) = (Point::new(0.3, 0.7), Point::new(-1.2, 2.5));
    assert!(compatibility_residual(&phi, z) < 1e-14);
    let path = Path::axis_aligned(z0, z, QuadratureCfg::default());
    let v = abar_h(&phi, z0, z, &path, 0.0).unwrap();
    let exact = -(z.x * z.x - z0.x * z0.x + z.y * z.y - z0.y * z0.y) / 2.0;
    assert_relative_eq!(v, exact, epsilon = 1e-12);
}

#[test]
fn incompatible_integrand_is_rejected() {
    let sig = Signature::Elliptic;
    let phi = BiField::analytic(sig, rect(), move |p| {
        Jet::from_partials(Binumber::new(p.y, 0.0, sig), Binumber::zero(sig), Binumber::real(1.0, sig))
    });
    let (z0, z) = (Point::new(0.0, 0.0), Point::new(1.0, 1.0));
    let path = Path::axis_aligned(z0, z, QuadratureCfg::default());
    assert!(matches!(abar(&phi, z0, z, &path, 0.0), Err(Error::NotConservative { .. })));
    assert!(matches!(abar_h(&phi, z0, z, &path, 0.0), Err(Error::SignatureMismatch(_))));
}

#[test]
fn field_reconstructs_its_integrand() {
    let sig = Signature::Elliptic;
    // Φ = ∂_z̄ φ for φ = x³y − y²
    let phi = BiField::real_from_gradient(sig, rect(), |p| {
        (p.x.powi(3) * p.y - p.y * p.y, 3.0 * p.x * p.x * p.y, p.x.powi(3) - 2.0 * p.y)
    });
    let dz = phi.map(|j| Jet::constant(j.dzbar)).to_finite_difference(None);
    let a = antigradient_field(&dz, AntigradientCfg::new(Point::new(0.0, 0.0))).unwrap();
    let p = Point::new(1.3, -0.4);
    assert_relative_eq!(a.value(p).re, phi.value(p).re, epsilon = 1e-11);
    let fd = a.to_finite_difference(None);
    let d = wirtinger(&fd, Wirtinger::Dzbar, p).unwrap();
    assert!((d - dz.value(p)).norm() < 1e-7);
}

#[test]
fn detour_avoids_pole() {
    let dom = Domain::quadrant(10.0).with_puncture(Point::new(1.0, 5.0));
    let policy = PathPolicy::AvoidPunctures { clearance: 0.05 };
    let quad = QuadratureCfg::default();
    let path = policy.route(&dom, Point::new(0.0, 0.0), Point::new(2.0, 5.01), quad);
    assert!(path.validate(&dom, policy.clearance(&dom, Point::new(0.0, 0.0), Point::new(2.0, 5.01))).is_ok());
    assert_eq!(path.vertices.len(), 4);
    let straight = PathPolicy::AxisAligned.route(&dom, Point::new(0.0, 0.0), Point::new(2.0, 5.01), quad);
    assert!(matches!(straight.validate(&dom, 0.02), Err(Error::PathThroughPole { .. })));
}
