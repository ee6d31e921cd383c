//! Binumber-valued fields on planar domains and their Wirtinger derivatives.
//!
//! A field evaluates to a [`Jet`]: the value together with `∂_z` and `∂_z̄`.
//! Fields built from closed forms or from path integrals carry exact jets
//! ([`DerivMode::Analytic`]); black-box fields get theirs from central
//! differences with one Richardson step ([`DerivMode::FiniteDifference`]).
//!
//! With `u` the imaginary unit and `σ = u²`:
//!
//! ```text
//! ∂_z  = ½(∂x + σu ∂y)      elliptic: ½(∂x − i∂y)   hyperbolic: ½(∂x + j∂t)
//! ∂_z̄ = ½(∂x − σu ∂y)      elliptic: ½(∂x + i∂y)   hyperbolic: ½(∂x − j∂t)
//! 4 ∂_z ∂_z̄ = ∂xx − σ ∂yy   (Δ or □)
//! ```

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use crate::algebra::{Binumber, Signature};
use crate::error::{Error, Result};
use crate::scalar::{half, lit, two, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point<T> {
    pub x: T,
    pub y: T,
}

impl<T: Scalar> Point<T> {
    pub fn new(x: T, y: T) -> Self {
        Point { x, y }
    }

    pub fn dist(self, other: Self) -> T {
        (self.x - other.x).hypot(self.y - other.y)
    }

    /// The point as a number `x + y·u`.
    pub fn to_binumber(self, sig: Signature) -> Binumber<T> {
        Binumber::new(self.x, self.y, sig)
    }

    pub fn offset(self, dx: T, dy: T) -> Self {
        Point::new(self.x + dx, self.y + dy)
    }

    pub(crate) fn as_f64(self) -> (f64, f64) {
        (self.x.to_f64_lossy(), self.y.to_f64_lossy())
    }
}

pub(crate) fn domain_err<T: Scalar>(p: Point<T>) -> Error {
    let (x, y) = p.as_f64();
    Error::Domain { x, y }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundingBox<T> {
    pub x_min: T,
    pub x_max: T,
    pub y_min: T,
    pub y_max: T,
}

impl<T: Scalar> BoundingBox<T> {
    pub fn new(x_min: T, x_max: T, y_min: T, y_max: T) -> Self {
        BoundingBox { x_min, x_max, y_min, y_max }
    }

    pub fn contains(&self, p: Point<T>) -> bool {
        p.x >= self.x_min && p.x <= self.x_max && p.y >= self.y_min && p.y <= self.y_max
    }

    pub fn contains_box(&self, other: &BoundingBox<T>) -> bool {
        other.x_min >= self.x_min && other.x_max <= self.x_max && other.y_min >= self.y_min && other.y_max <= self.y_max
    }

    pub fn scale(&self) -> T {
        (self.x_max - self.x_min).hypot(self.y_max - self.y_min)
    }

    /// Row-major `nx × ny` grid including the box edges.
    pub fn grid(&self, nx: usize, ny: usize) -> Vec<Point<T>> {
        let step = |lo: T, hi: T, n: usize, k: usize| {
            if n <= 1 {
                half::<T>() * (lo + hi)
            } else {
                lo + (hi - lo) * lit::<T>(k as f64) / lit::<T>((n - 1) as f64)
            }
        };
        let mut pts = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            let y = step(self.y_min, self.y_max, ny, j);
            for i in 0..nx {
                pts.push(Point::new(step(self.x_min, self.x_max, nx, i), y));
            }
        }
        pts
    }
}

type Predicate<T> = Arc<dyn Fn(Point<T>) -> bool + Send + Sync>;

/// Planar domain: an open-set membership test, its closure (used for path
/// vertices on the boundary), a bounding box and explicit punctures.
///
/// Simple connectivity is a caller contract.
#[derive(Clone)]
pub struct Domain<T> {
    interior: Predicate<T>,
    closure: Predicate<T>,
    pub bounding_box: BoundingBox<T>,
    pub excluded_points: Vec<Point<T>>,
    pub label: String,
}

impl<T: fmt::Debug> fmt::Debug for Domain<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Domain")
            .field("label", &self.label)
            .field("bounding_box", &self.bounding_box)
            .field("excluded_points", &self.excluded_points)
            .finish()
    }
}

impl<T: Scalar> Domain<T> {
    pub fn new(
        label: impl Into<String>,
        bounding_box: BoundingBox<T>,
        interior: impl Fn(Point<T>) -> bool + Send + Sync + 'static,
    ) -> Self {
        let interior: Predicate<T> = Arc::new(interior);
        Domain { closure: interior.clone(), interior, bounding_box, excluded_points: Vec::new(), label: label.into() }
    }

    pub fn with_closure(mut self, closure: impl Fn(Point<T>) -> bool + Send + Sync + 'static) -> Self {
        self.closure = Arc::new(closure);
        self
    }

    /// The whole bounding box.
    pub fn rectangle(bounding_box: BoundingBox<T>) -> Self {
        Domain::new("rectangle", bounding_box, |_| true)
    }

    /// `{x > 0, y > 0}` clipped to `[0, extent]²`, with the closed quadrant as closure.
    pub fn quadrant(extent: T) -> Self {
        Domain::new("quadrant", BoundingBox::new(T::zero(), extent, T::zero(), extent), |p: Point<T>| {
            p.x > T::zero() && p.y > T::zero()
        })
        .with_closure(|p: Point<T>| p.x >= T::zero() && p.y >= T::zero())
    }

    pub fn with_puncture(mut self, p: Point<T>) -> Self {
        self.excluded_points.push(p);
        self
    }

    pub fn contains(&self, p: Point<T>) -> bool {
        self.bounding_box.contains(p) && (self.interior)(p) && !self.excluded_points.contains(&p)
    }

    pub fn contains_closed(&self, p: Point<T>) -> bool {
        self.bounding_box.contains(p) && (self.closure)(p)
    }

    pub fn nearest_puncture(&self, p: Point<T>) -> Option<(Point<T>, T)> {
        self.excluded_points
            .iter()
            .map(|q| (*q, q.dist(p)))
            .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal))
    }

    /// `n × n` cell-centred probe points of the bounding box that lie inside the
    /// domain and at least `clearance` away from every puncture.
    pub fn sample_points(&self, n: usize, clearance: T) -> Vec<Point<T>> {
        let b = &self.bounding_box;
        let nn = lit::<T>(n as f64);
        let mut pts = Vec::new();
        for j in 0..n {
            for i in 0..n {
                let fx = (lit::<T>(i as f64) + half()) / nn;
                let fy = (lit::<T>(j as f64) + half()) / nn;
                let p = Point::new(b.x_min + (b.x_max - b.x_min) * fx, b.y_min + (b.y_max - b.y_min) * fy);
                let clear = self.nearest_puncture(p).is_none_or(|(_, d)| d >= clearance);
                if clear && self.contains(p) {
                    pts.push(p);
                }
            }
        }
        pts
    }

    /// Copy sharing the predicates, restricted to a smaller bounding box.
    pub fn restricted(&self, bounding_box: BoundingBox<T>) -> Self {
        let mut d = self.clone();
        d.bounding_box = bounding_box;
        d
    }
}

/// Value of a field together with its Wirtinger derivatives at one point.
#[derive(Clone, Copy, PartialEq)]
pub struct Jet<T> {
    pub value: Binumber<T>,
    pub dz: Binumber<T>,
    pub dzbar: Binumber<T>,
}

impl<T: fmt::Debug> fmt::Debug for Jet<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Jet").field("value", &self.value).field("dz", &self.dz).field("dzbar", &self.dzbar).finish()
    }
}

impl<T: Scalar> Jet<T> {
    pub fn new(value: Binumber<T>, dz: Binumber<T>, dzbar: Binumber<T>) -> Self {
        Jet { value, dz, dzbar }
    }

    pub fn constant(value: Binumber<T>) -> Self {
        let z = Binumber::zero(value.sig);
        Jet { value, dz: z, dzbar: z }
    }

    /// Jet of a real function from its value and partial derivatives.
    pub fn from_real(sig: Signature, v: T, vx: T, vy: T) -> Self {
        Self::from_partials(Binumber::real(v, sig), Binumber::real(vx, sig), Binumber::real(vy, sig))
    }

    pub fn from_partials(value: Binumber<T>, dx: Binumber<T>, dy: Binumber<T>) -> Self {
        let sig = value.sig;
        let su = Binumber::unit(sig).scale(sig.sigma::<T>());
        Jet { value, dz: (dx + su * dy).scale(half()), dzbar: (dx - su * dy).scale(half()) }
    }

    pub fn sig(&self) -> Signature {
        self.value.sig
    }

    /// `(∂x W, ∂y W)`.
    pub fn partials(&self) -> (Binumber<T>, Binumber<T>) {
        let u = Binumber::unit(self.sig());
        (self.dz + self.dzbar, u * (self.dz - self.dzbar))
    }

    pub fn conj(self) -> Self {
        Jet { value: self.value.conj(), dz: self.dzbar.conj(), dzbar: self.dz.conj() }
    }

    pub fn scale(self, k: T) -> Self {
        Jet { value: self.value.scale(k), dz: self.dz.scale(k), dzbar: self.dzbar.scale(k) }
    }

    /// Multiplication by a constant number.
    pub fn times(self, c: Binumber<T>) -> Self {
        Jet { value: self.value * c, dz: self.dz * c, dzbar: self.dzbar * c }
    }

    /// Reciprocal; non-finite on the null-cone.
    pub fn recip(self) -> Self {
        let inv = Binumber::one(self.sig()) / self.value;
        let minus_inv2 = -(inv * inv);
        Jet { value: inv, dz: self.dz * minus_inv2, dzbar: self.dzbar * minus_inv2 }
    }

    /// `P⁺W = ½(W + W̄)`, the real part as a real-valued jet.
    pub fn real_part(self) -> Self {
        (self + self.conj()).scale(half())
    }

    /// Imaginary part as a real-valued jet: `σu·P⁻W`.
    pub fn imag_part(self) -> Self {
        let sig = self.sig();
        let su = Binumber::unit(sig).scale(sig.sigma::<T>());
        (self - self.conj()).scale(half()).times(su)
    }
}

impl<T: Scalar> Add for Jet<T> {
    type Output = Self;
    fn add(self, r: Self) -> Self {
        Jet { value: self.value + r.value, dz: self.dz + r.dz, dzbar: self.dzbar + r.dzbar }
    }
}

impl<T: Scalar> Sub for Jet<T> {
    type Output = Self;
    fn sub(self, r: Self) -> Self {
        Jet { value: self.value - r.value, dz: self.dz - r.dz, dzbar: self.dzbar - r.dzbar }
    }
}

impl<T: Scalar> Neg for Jet<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Jet { value: -self.value, dz: -self.dz, dzbar: -self.dzbar }
    }
}

/// Product rule; both units commute so it holds for either signature.
impl<T: Scalar> Mul for Jet<T> {
    type Output = Self;
    fn mul(self, r: Self) -> Self {
        Jet {
            value: self.value * r.value,
            dz: self.dz * r.value + self.value * r.dz,
            dzbar: self.dzbar * r.value + self.value * r.dzbar,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DerivMode<T> {
    Analytic,
    /// Central differences with one Richardson step. `h: None` uses
    /// `1e−5·(1 + |coordinate|)`.
    FiniteDifference {
        h: Option<T>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Wirtinger {
    Dz,
    Dzbar,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SecondOrder {
    Laplacian,
    Box,
}

impl SecondOrder {
    /// `Δ` for elliptic, `□` for hyperbolic.
    pub fn for_signature(sig: Signature) -> Self {
        match sig {
            Signature::Elliptic => SecondOrder::Laplacian,
            Signature::Hyperbolic => SecondOrder::Box,
        }
    }
}

type JetFn<T> = Arc<dyn Fn(Point<T>) -> Jet<T> + Send + Sync>;

/// A smooth map from a planar domain to binumbers. Immutable and cheap to clone.
#[derive(Clone)]
pub struct BiField<T> {
    func: JetFn<T>,
    mode: DerivMode<T>,
    sig: Signature,
    domain: Arc<Domain<T>>,
}

impl<T: fmt::Debug> fmt::Debug for BiField<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BiField")
            .field("mode", &self.mode)
            .field("sig", &self.sig)
            .field("domain", &self.domain)
            .finish()
    }
}

pub(crate) fn default_step<T: Scalar>(c: T) -> T {
    lit::<T>(1e-5) * (T::one() + c.abs())
}

impl<T: Scalar> BiField<T> {
    /// Field with exact derivatives supplied by `jet`.
    pub fn analytic(
        sig: Signature,
        domain: Arc<Domain<T>>,
        jet: impl Fn(Point<T>) -> Jet<T> + Send + Sync + 'static,
    ) -> Self {
        BiField { func: Arc::new(jet), mode: DerivMode::Analytic, sig, domain }
    }

    /// Black-box field; derivatives come from finite differences.
    pub fn finite_difference(
        sig: Signature,
        domain: Arc<Domain<T>>,
        value: impl Fn(Point<T>) -> Binumber<T> + Send + Sync + 'static,
        h: Option<T>,
    ) -> Self {
        BiField {
            func: Arc::new(move |p| Jet::constant(value(p))),
            mode: DerivMode::FiniteDifference { h },
            sig,
            domain,
        }
    }

    /// Real field from `p ↦ (φ, φx, φy)`.
    pub fn real_from_gradient(
        sig: Signature,
        domain: Arc<Domain<T>>,
        f: impl Fn(Point<T>) -> (T, T, T) + Send + Sync + 'static,
    ) -> Self {
        Self::analytic(sig, domain, move |p| {
            let (v, vx, vy) = f(p);
            Jet::from_real(sig, v, vx, vy)
        })
    }

    pub fn constant(sig: Signature, domain: Arc<Domain<T>>, c: Binumber<T>) -> Self {
        Self::analytic(sig, domain, move |_| Jet::constant(c))
    }

    /// `z = x + y·u`.
    pub fn identity(sig: Signature, domain: Arc<Domain<T>>) -> Self {
        Self::analytic(sig, domain, move |p| Jet::new(p.to_binumber(sig), Binumber::one(sig), Binumber::zero(sig)))
    }

    pub fn sig(&self) -> Signature {
        self.sig
    }

    pub fn mode(&self) -> DerivMode<T> {
        self.mode
    }

    pub fn domain(&self) -> &Arc<Domain<T>> {
        &self.domain
    }

    pub fn with_domain(mut self, domain: Arc<Domain<T>>) -> Self {
        self.domain = domain;
        self
    }

    /// Same values, derivatives recomputed by finite differences.
    pub fn to_finite_difference(&self, h: Option<T>) -> Self {
        BiField {
            func: self.func.clone(),
            mode: DerivMode::FiniteDifference { h },
            sig: self.sig,
            domain: self.domain.clone(),
        }
    }

    #[inline]
    pub fn value(&self, p: Point<T>) -> Binumber<T> {
        (self.func)(p).value
    }

    /// Jet without domain checks.
    pub fn jet(&self, p: Point<T>) -> Jet<T> {
        match self.mode {
            DerivMode::Analytic => (self.func)(p),
            DerivMode::FiniteDifference { h } => self.fd_jet(p, h),
        }
    }

    /// Jet with the domain and stencil checks of [`wirtinger`].
    pub fn try_jet(&self, p: Point<T>) -> Result<Jet<T>> {
        if !self.domain.contains(p) {
            return Err(domain_err(p));
        }
        if let DerivMode::FiniteDifference { h } = self.mode {
            let reach = two::<T>() * step_for(h, p);
            if let Some((_, d)) = self.domain.nearest_puncture(p) {
                if d <= reach {
                    let (x, y) = p.as_f64();
                    return Err(Error::Stencil { x, y });
                }
            }
        }
        Ok(self.jet(p))
    }

    fn fd_jet(&self, p: Point<T>, h: Option<T>) -> Jet<T> {
        let value = self.value(p);
        let hx = h.unwrap_or_else(|| default_step(p.x));
        let hy = h.unwrap_or_else(|| default_step(p.y));
        let dx = richardson_bi(
            |s| (self.value(p.offset(s, T::zero())) - self.value(p.offset(-s, T::zero()))).scale(half::<T>() / s),
            hx,
        );
        let dy = richardson_bi(
            |s| (self.value(p.offset(T::zero(), s)) - self.value(p.offset(T::zero(), -s))).scale(half::<T>() / s),
            hy,
        );
        Jet::from_partials(value, dx, dy)
    }

    /// `(∂x W, ∂y W)` at `p`.
    pub fn partials(&self, p: Point<T>) -> (Binumber<T>, Binumber<T>) {
        self.jet(p).partials()
    }

    /// Pointwise map over jets; the result is analytic whenever the jets are.
    pub fn map(&self, f: impl Fn(Jet<T>) -> Jet<T> + Send + Sync + 'static) -> Self {
        let a = self.clone();
        Self::analytic(self.sig, self.domain.clone(), move |p| f(a.jet(p)))
    }

    pub fn zip(&self, other: &Self, f: impl Fn(Jet<T>, Jet<T>) -> Jet<T> + Send + Sync + 'static) -> Self {
        let (a, b) = (self.clone(), other.clone());
        Self::analytic(self.sig, self.domain.clone(), move |p| f(a.jet(p), b.jet(p)))
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a * b)
    }

    pub fn scale(&self, k: T) -> Self {
        self.map(move |j| j.scale(k))
    }

    pub fn times(&self, c: Binumber<T>) -> Self {
        self.map(move |j| j.times(c))
    }

    pub fn conj(&self) -> Self {
        self.map(Jet::conj)
    }

    pub fn recip(&self) -> Self {
        self.map(Jet::recip)
    }

    /// `P⁺W`.
    pub fn real_part(&self) -> Self {
        self.map(Jet::real_part)
    }

    pub fn imag_part(&self) -> Self {
        self.map(Jet::imag_part)
    }

    /// `W1 + u·W2` from two real fields.
    pub fn compose(w1: &Self, w2: &Self) -> Self {
        let u = Binumber::unit(w1.sig);
        w1.zip(w2, move |a, b| a + b.times(u))
    }
}

fn step_for<T: Scalar>(h: Option<T>, p: Point<T>) -> T {
    h.unwrap_or_else(|| default_step(p.x.abs().max(p.y.abs())))
}

/// One Richardson step on a second-order-accurate difference quotient.
fn richardson<T: Scalar>(d: impl Fn(T) -> T, h: T) -> T {
    let coarse = d(h);
    let fine = d(h * half::<T>());
    (lit::<T>(4.0) * fine - coarse) / lit::<T>(3.0)
}

fn richardson_bi<T: Scalar>(d: impl Fn(T) -> Binumber<T>, h: T) -> Binumber<T> {
    let coarse = d(h);
    let fine = d(h * half::<T>());
    (fine.scale(lit(4.0)) - coarse).scale(T::one() / lit::<T>(3.0))
}

/// `∂_z` or `∂_z̄` of `field` at `at`.
pub fn wirtinger<T: Scalar>(field: &BiField<T>, which: Wirtinger, at: Point<T>) -> Result<Binumber<T>> {
    let j = field.try_jet(at)?;
    Ok(match which {
        Wirtinger::Dz => j.dz,
        Wirtinger::Dzbar => j.dzbar,
    })
}

/// `Δφ = φxx + φyy` or `□φ = φxx − φyy` of the real part of `field`.
///
/// Analytic fields difference their exact gradient; finite-difference fields
/// use the five-point stencil with a step 100× the first-derivative step.
pub fn second_order<T: Scalar>(field: &BiField<T>, which: SecondOrder, at: Point<T>) -> Result<T> {
    if !field.domain.contains(at) {
        return Err(domain_err(at));
    }
    let (xx, yy) = match field.mode {
        DerivMode::Analytic => {
            let hx = default_step(at.x);
            let hy = default_step(at.y);
            let zero = T::zero();
            let xx = richardson(
                |s| {
                    (field.partials(at.offset(s, zero)).0.re - field.partials(at.offset(-s, zero)).0.re) * half::<T>()
                        / s
                },
                hx,
            );
            let yy = richardson(
                |s| {
                    (field.partials(at.offset(zero, s)).1.re - field.partials(at.offset(zero, -s)).1.re) * half::<T>()
                        / s
                },
                hy,
            );
            (xx, yy)
        }
        DerivMode::FiniteDifference { h } => {
            let hundred = lit::<T>(100.0);
            let hx = h.map_or_else(|| hundred * default_step(at.x), |h| hundred * h);
            let hy = h.map_or_else(|| hundred * default_step(at.y), |h| hundred * h);
            if let Some((_, d)) = field.domain.nearest_puncture(at) {
                if d <= two::<T>() * hx.max(hy) {
                    let (x, y) = at.as_f64();
                    return Err(Error::Stencil { x, y });
                }
            }
            let c = field.value(at).re;
            let zero = T::zero();
            let xx = richardson(
                |s| {
                    (field.value(at.offset(s, zero)).re - two::<T>() * c + field.value(at.offset(-s, zero)).re)
                        / (s * s)
                },
                hx,
            );
            let yy = richardson(
                |s| {
                    (field.value(at.offset(zero, s)).re - two::<T>() * c + field.value(at.offset(zero, -s)).re)
                        / (s * s)
                },
                hy,
            );
            (xx, yy)
        }
    };
    Ok(match which {
        SecondOrder::Laplacian => xx + yy,
        SecondOrder::Box => xx - yy,
    })
}

/// `f` together with the potentials `q = Lf/f` and `q₁` of the equation solved
/// by imaginary parts (`L = Δ` elliptic, `□` hyperbolic).
#[derive(Clone)]
pub struct SchrodingerContext<T> {
    pub f: BiField<T>,
    pub q: BiField<T>,
    pub q1: BiField<T>,
}

/// Which potential a residual is measured against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Potential {
    Q,
    Q1,
}

const PROBE_GRID: usize = 20;

impl<T: fmt::Debug> fmt::Debug for SchrodingerContext<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SchrodingerContext").field("f", &self.f).finish_non_exhaustive()
    }
}

impl<T: Scalar> SchrodingerContext<T> {
    pub fn sig(&self) -> Signature {
        self.f.sig()
    }

    pub fn domain(&self) -> &Arc<Domain<T>> {
        self.f.domain()
    }

    pub fn potential(&self, which: Potential) -> &BiField<T> {
        match which {
            Potential::Q => &self.q,
            Potential::Q1 => &self.q1,
        }
    }

    /// `|Lφ − Vφ|` at `at`, with `V` the selected potential.
    pub fn residual(&self, phi: &BiField<T>, which: Potential, at: Point<T>) -> Result<T> {
        let op = SecondOrder::for_signature(self.sig());
        let l = second_order(phi, op, at)?;
        let v = self.potential(which).value(at).re;
        Ok((l - v * phi.value(at).re).abs())
    }

    /// Same as [`SchrodingerContext::residual`] scaled by the size of the terms.
    pub fn relative_residual(&self, phi: &BiField<T>, which: Potential, at: Point<T>) -> Result<T> {
        let op = SecondOrder::for_signature(self.sig());
        let l = second_order(phi, op, at)?;
        let vphi = self.potential(which).value(at).re * phi.value(at).re;
        Ok((l - vphi).abs() / (T::one() + l.abs().max(vphi.abs())))
    }
}

/// Builds the Schrödinger (elliptic) or Klein-Gordon (hyperbolic) context of `f`.
///
/// `f` must be real and positive on the probe grid of its domain.
pub fn make_context<T: Scalar>(f: BiField<T>) -> Result<SchrodingerContext<T>> {
    let sig = f.sig();
    let domain = f.domain().clone();
    let clearance = domain.bounding_box.scale() * lit(1e-3);
    for p in domain.sample_points(PROBE_GRID, clearance) {
        let v = f.value(p);
        let tol = lit::<T>(1e-12) * (T::one() + v.re.abs());
        if v.im.abs() > tol || !(v.re > T::zero()) {
            let (x, y) = p.as_f64();
            return Err(Error::Positivity { x, y });
        }
    }
    let op = SecondOrder::for_signature(sig);
    let fq = f.clone();
    let q = BiField::finite_difference(
        sig,
        domain.clone(),
        move |p| {
            let l = second_order(&fq, op, p).unwrap_or_else(|_| T::nan());
            Binumber::real(l / fq.value(p).re, sig)
        },
        None,
    );
    let (fq1, qq) = (f.clone(), q.clone());
    let q1 = BiField::finite_difference(
        sig,
        domain,
        move |p| {
            let j = fq1.jet(p);
            let fv = j.value.re;
            let v = -qq.value(p).re + lit::<T>(8.0) * j.dz.modulus_sq() / (fv * fv);
            Binumber::real(v, sig)
        },
        None,
    );
    Ok(SchrodingerContext { f, q, q1 })
}
