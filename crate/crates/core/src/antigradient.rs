//! The antigradient operators `Ā` (elliptic) and `Ā_h` (hyperbolic).
//!
//! For a field `Φ = Φ₁ + uΦ₂` whose components satisfy the compatibility
//! condition, both operators are the single formula
//!
//! ```text
//! Ā[Φ](z) = 2 ∫_Γ (Φ₁ dx − σ Φ₂ dy) + c
//! ```
//!
//! taken along a polyline `Γ` from the base point to `z`. The result is a real
//! function with `∂_z̄ Ā = Φ` and `∂_z Ā = Φ̄`, which is what
//! [`antigradient_field`] stores as its jet.

use std::sync::Arc;

use crate::algebra::{Binumber, Signature};
use crate::error::{Error, Result};
use crate::fields::{domain_err, BiField, Domain, Jet, Point};
use crate::quadrature::{first_panel, refine, QuadratureCfg, Quantity};
use crate::scalar::{half, lit, two, Scalar};

/// Polyline with its quadrature configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct Path<T> {
    pub vertices: Vec<Point<T>>,
    pub quad: QuadratureCfg<T>,
}

impl<T: Scalar> Path<T> {
    pub fn polyline(vertices: Vec<Point<T>>, quad: QuadratureCfg<T>) -> Self {
        Path { vertices, quad }
    }

    /// Two legs: vertical along the starting abscissa, then horizontal at the
    /// target ordinate.
    pub fn axis_aligned(from: Point<T>, to: Point<T>, quad: QuadratureCfg<T>) -> Self {
        Path { vertices: vec![from, Point::new(from.x, to.y), to], quad }
    }

    pub fn start(&self) -> Point<T> {
        self.vertices[0]
    }

    pub fn end(&self) -> Point<T> {
        *self.vertices.last().expect("path has vertices")
    }

    fn segments(&self) -> impl Iterator<Item = (Point<T>, Point<T>)> + '_ {
        self.vertices.windows(2).map(|w| (w[0], w[1])).filter(|(a, b)| a != b)
    }

    /// Checks that every vertex and segment stays in the closed domain and keeps
    /// `clearance` from every puncture.
    pub fn validate(&self, domain: &Domain<T>, clearance: T) -> Result<()> {
        if self.vertices.is_empty() {
            return Err(Error::Config("path has no vertices".into()));
        }
        self.quad.validate()?;
        for &v in &self.vertices {
            if !domain.contains_closed(v) {
                return Err(domain_err(v));
            }
        }
        for (a, b) in self.segments() {
            for k in 1..8 {
                let t = lit::<T>(k as f64 / 8.0);
                let p = Point::new(a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t);
                if !domain.contains_closed(p) {
                    return Err(domain_err(p));
                }
            }
            for &pole in &domain.excluded_points {
                if segment_distance(a, b, pole) < clearance {
                    let (x, y) = pole.as_f64();
                    return Err(Error::PathThroughPole { x, y, clearance: clearance.to_f64_lossy() });
                }
            }
        }
        Ok(())
    }

    /// `∫ g(p, dx, dy)` along the path, where `(dx, dy)` is the segment
    /// displacement so that `g` is integrated against `t ∈ [0, 1]`.
    pub fn integrate<Q, G>(&self, g: G) -> Result<Q>
    where
        Q: Quantity<T>,
        G: Fn(Point<T>, T, T) -> Q,
    {
        let segments: Vec<_> = self.segments().collect();
        let firsts: Vec<(Q, T)> = segments
            .iter()
            .map(|&(a, b)| {
                let (dx, dy) = (b.x - a.x, b.y - a.y);
                let seg = |t: T| g(Point::new(a.x + dx * t, a.y + dy * t), dx, dy);
                first_panel(&self.quad, &seg, T::zero(), T::one())
            })
            .collect();
        let scale = firsts.iter().fold(T::zero(), |s, f| s + f.1);
        let mut acc: Option<Q> = None;
        for (&(a, b), first) in segments.iter().zip(firsts) {
            let (dx, dy) = (b.x - a.x, b.y - a.y);
            let seg = |t: T| g(Point::new(a.x + dx * t, a.y + dy * t), dx, dy);
            let v = refine(&self.quad, &seg, T::zero(), T::one(), first, Some(scale))?;
            acc = Some(match acc {
                Some(s) => s.plus(v),
                None => v,
            });
        }
        // A path that never leaves its start integrates to zero.
        Ok(acc.unwrap_or_else(|| g(self.start(), T::zero(), T::zero()).times(T::zero())))
    }

    /// Interior sample points of every segment.
    pub fn samples(&self, per_segment: usize) -> Vec<Point<T>> {
        let mut out = Vec::new();
        for (a, b) in self.segments() {
            for k in 0..per_segment {
                let t = lit::<T>((k as f64 + 0.5) / per_segment as f64);
                out.push(Point::new(a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t));
            }
        }
        out
    }
}

fn segment_distance<T: Scalar>(a: Point<T>, b: Point<T>, p: Point<T>) -> T {
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    let len2 = dx * dx + dy * dy;
    if len2 == T::zero() {
        return a.dist(p);
    }
    let t = (((p.x - a.x) * dx + (p.y - a.y) * dy) / len2).max(T::zero()).min(T::one());
    Point::new(a.x + dx * t, a.y + dy * t).dist(p)
}

/// How a path from the base point to the evaluation point is chosen.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum PathPolicy<T> {
    /// Vertical leg, then horizontal.
    #[default]
    AxisAligned,
    /// Fixed intermediate waypoints between base and target.
    Polyline(Vec<Point<T>>),
    /// Axis-aligned, but detours around any puncture closer than `clearance`.
    ///
    /// The detour crosses the puncture's ordinate on the side of the base point,
    /// at height `max(clearance, 2|z − pole|)` capped at `4·clearance`, so the
    /// branch cut is the ray from the pole pointing away from the base abscissa.
    /// The cap keeps the detour inside domains whose boundary lies a few
    /// clearances from the pole.
    AvoidPunctures { clearance: T },
}

impl<T: Scalar> PathPolicy<T> {
    pub fn route(&self, domain: &Domain<T>, from: Point<T>, to: Point<T>, quad: QuadratureCfg<T>) -> Path<T> {
        match self {
            PathPolicy::AxisAligned => Path::axis_aligned(from, to, quad),
            PathPolicy::Polyline(w) => {
                let mut v = Vec::with_capacity(w.len() + 2);
                v.push(from);
                v.extend_from_slice(w);
                v.push(to);
                Path::polyline(v, quad)
            }
            PathPolicy::AvoidPunctures { clearance } => {
                let mut path = Path::axis_aligned(from, to, quad);
                for &pole in &domain.excluded_points {
                    let near = (*clearance).min(to.dist(pole) * lit(0.5));
                    let hit = path.segments().any(|(a, b)| segment_distance(a, b, pole) < near);
                    if hit {
                        path = detour(from, to, pole, *clearance, quad);
                    }
                }
                path
            }
        }
    }

    /// Clearance enforced by [`Path::validate`] for a path routed from `from`
    /// to `to`; it shrinks for endpoints that are themselves close to a puncture.
    pub fn clearance(&self, domain: &Domain<T>, from: Point<T>, to: Point<T>) -> T {
        match self {
            PathPolicy::AvoidPunctures { clearance } => domain
                .excluded_points
                .iter()
                .map(|&pole| from.dist(pole).min(to.dist(pole)) * half())
                .fold(*clearance * lit(0.25), T::min),
            _ => T::zero(),
        }
    }
}

fn detour<T: Scalar>(from: Point<T>, to: Point<T>, pole: Point<T>, clearance: T, quad: QuadratureCfg<T>) -> Path<T> {
    let s = if to.y >= pole.y { T::one() } else { -T::one() };
    let h = clearance.max((two::<T>() * to.dist(pole)).min(lit::<T>(4.0) * clearance));
    let yc = pole.y + s * h;
    Path::polyline(vec![from, Point::new(from.x, yc), Point::new(to.x, yc), to], quad)
}

/// Components `(Φ₁, Φ₂)` of `Φ` and the compatibility residual
/// `|∂yΦ₁ + σ ∂xΦ₂|` (elliptic `|∂yΦ₁ − ∂xΦ₂|`, hyperbolic `|∂tΦ₁ + ∂xΦ₂|`).
pub fn compatibility_residual<T: Scalar>(phi: &BiField<T>, at: Point<T>) -> T {
    let (px, py) = phi.partials(at);
    (py.re + phi.sig().sigma::<T>() * px.im).abs()
}

fn compatibility_scale<T: Scalar>(phi: &BiField<T>, at: Point<T>) -> T {
    let (px, py) = phi.partials(at);
    px.norm() + py.norm()
}

/// Relative tolerance used when probing compatibility. The derivatives behind
/// the probe come from finite differences for most integrands.
pub const COMPATIBILITY_TOL: f64 = 1e-5;

/// Fails with `NotConservative` at the first probe where the compatibility
/// residual exceeds `COMPATIBILITY_TOL` relative to the size of `∇Φ`.
pub fn check_compatibility<T: Scalar>(phi: &BiField<T>, points: &[Point<T>]) -> Result<()> {
    for &p in points {
        let r = compatibility_residual(phi, p);
        let scale = T::one() + compatibility_scale(phi, p);
        if !(r <= lit::<T>(COMPATIBILITY_TOL) * scale) {
            let (x, y) = p.as_f64();
            return Err(Error::NotConservative { x, y, residual: r.to_f64_lossy() });
        }
    }
    Ok(())
}

/// `2 ∫_Γ (Φ₁ dx − σ Φ₂ dy)` without any check.
pub fn antigradient_integral<T: Scalar>(phi: &BiField<T>, path: &Path<T>) -> Result<T> {
    let ms = -phi.sig().sigma::<T>();
    let v: T = path.integrate(|p, dx, dy| {
        let w = phi.value(p);
        w.re * dx + ms * w.im * dy
    })?;
    Ok(two::<T>() * v)
}

fn checked<T: Scalar>(phi: &BiField<T>, z0: Point<T>, z: Point<T>, path: &Path<T>, c: T) -> Result<T> {
    if path.start() != z0 || path.end() != z {
        return Err(Error::Config("path endpoints do not match the integration limits".into()));
    }
    path.validate(phi.domain(), T::zero())?;
    check_compatibility(phi, &path.samples(4))?;
    Ok(antigradient_integral(phi, path)? + c)
}

/// Elliptic `Ā[Φ](z) = 2∫(Φ₁dx + Φ₂dy) + c` along `path` from `z0` to `z`.
pub fn abar<T: Scalar>(phi: &BiField<T>, z0: Point<T>, z: Point<T>, path: &Path<T>, c: T) -> Result<T> {
    if phi.sig() != Signature::Elliptic {
        return Err(Error::SignatureMismatch("abar expects an elliptic field".into()));
    }
    checked(phi, z0, z, path, c)
}

/// Hyperbolic `Ā_h[Φ](x,t) = 2∫(Φ₁dx − Φ₂dt) + c` along `path` from `z0` to `z`.
pub fn abar_h<T: Scalar>(phi: &BiField<T>, z0: Point<T>, z: Point<T>, path: &Path<T>, c: T) -> Result<T> {
    if phi.sig() != Signature::Hyperbolic {
        return Err(Error::SignatureMismatch("abar_h expects a hyperbolic field".into()));
    }
    checked(phi, z0, z, path, c)
}

/// Options for turning `Φ` into a field `z ↦ Ā[Φ](z)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AntigradientCfg<T> {
    pub base: Point<T>,
    pub policy: PathPolicy<T>,
    pub quad: QuadratureCfg<T>,
    pub c: T,
}

impl<T: Scalar> AntigradientCfg<T> {
    pub fn new(base: Point<T>) -> Self {
        AntigradientCfg { base, policy: PathPolicy::AxisAligned, quad: QuadratureCfg::default(), c: T::zero() }
    }

    pub fn with_policy(mut self, policy: PathPolicy<T>) -> Self {
        self.policy = policy;
        self
    }

    pub fn with_quad(mut self, quad: QuadratureCfg<T>) -> Self {
        self.quad = quad;
        self
    }

    pub fn with_constant(mut self, c: T) -> Self {
        self.c = c;
        self
    }
}

/// Real field `z ↦ Ā[Φ](z)` with exact jet `(Ā, Φ̄, Φ)`.
///
/// Compatibility is probed once on the domain's sample grid; evaluation points
/// where the routed path is invalid or quadrature fails evaluate to NaN.
pub fn antigradient_field<T: Scalar>(phi: &BiField<T>, cfg: AntigradientCfg<T>) -> Result<BiField<T>> {
    let domain = phi.domain().clone();
    if !domain.contains_closed(cfg.base) {
        return Err(domain_err(cfg.base));
    }
    cfg.quad.validate()?;
    let clearance = domain.bounding_box.scale() * lit(0.02);
    let probes: Vec<_> = domain.sample_points(6, clearance);
    check_compatibility(phi, &probes)?;
    Ok(antigradient_field_unchecked(phi, cfg, domain))
}

pub(crate) fn antigradient_field_unchecked<T: Scalar>(
    phi: &BiField<T>,
    cfg: AntigradientCfg<T>,
    domain: Arc<Domain<T>>,
) -> BiField<T> {
    let sig = phi.sig();
    let phi = phi.clone();
    let dom = domain.clone();
    BiField::analytic(sig, domain, move |z| {
        let path = cfg.policy.route(&dom, cfg.base, z, cfg.quad);
        let value = match path.validate(&dom, cfg.policy.clearance(&dom, cfg.base, z)) {
            Ok(()) => antigradient_integral(&phi, &path).map(|v| v + cfg.c).unwrap_or_else(|_| T::nan()),
            Err(_) => T::nan(),
        };
        let p = phi.value(z);
        Jet::new(Binumber::real(value, sig), p.conj(), p)
    })
}
