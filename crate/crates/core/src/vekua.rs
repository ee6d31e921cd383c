//! Main Vekua equations `W_z̄ = (f_z̄/f) W̄` and the constructions around them.

use crate::algebra::{Binumber, Signature};
use crate::antigradient::{antigradient_field, AntigradientCfg};
use crate::error::{Error, Result};
use crate::fields::{domain_err, second_order, BiField, Jet, Point, SchrodingerContext, SecondOrder};
use crate::scalar::{lit, Scalar};

/// The equation `W_z̄ = (f_z̄/f) W̄` attached to a context.
#[derive(Clone, Debug)]
pub struct MainVekua<T> {
    pub ctx: SchrodingerContext<T>,
    /// `f_z̄ / f`.
    pub coeff: BiField<T>,
}

impl<T: Scalar> MainVekua<T> {
    pub fn new(ctx: SchrodingerContext<T>) -> Self {
        let coeff = ctx.f.map(|j| Jet::constant(j.dzbar / j.value));
        MainVekua { ctx, coeff }
    }

    pub fn sig(&self) -> Signature {
        self.ctx.sig()
    }

    pub fn coefficient(&self, at: Point<T>) -> Binumber<T> {
        let j = self.ctx.f.jet(at);
        j.dzbar / j.value
    }
}

/// `|W_z̄ − (f_z̄/f) W̄|`, measured with the Euclidean norm of the components.
pub fn vekua_residual<T: Scalar>(eq: &MainVekua<T>, w: &BiField<T>, at: Point<T>) -> Result<T> {
    if w.sig() != eq.sig() {
        return Err(Error::SignatureMismatch("field and equation have different signatures".into()));
    }
    if !eq.ctx.domain().contains(at) {
        return Err(domain_err(at));
    }
    let j = w.try_jet(at)?;
    Ok((j.dzbar - eq.coefficient(at) * j.value.conj()).norm())
}

/// Residual relative to the size of the two sides.
pub fn vekua_relative_residual<T: Scalar>(eq: &MainVekua<T>, w: &BiField<T>, at: Point<T>) -> Result<T> {
    let j = w.try_jet(at)?;
    let rhs = eq.coefficient(at) * j.value.conj();
    Ok((j.dzbar - rhs).norm() / (T::one() + j.dzbar.norm().max(rhs.norm())))
}

fn require_real<T: Scalar>(w: &BiField<T>, probes: &[Point<T>]) -> Result<()> {
    for &p in probes {
        let v = w.value(p);
        if v.im.abs() > lit::<T>(1e-10) * (T::one() + v.re.abs()) {
            return Err(Error::Config("conjugate construction expects a real field".into()));
        }
    }
    Ok(())
}

fn check_signatures<T: Scalar>(ctx: &SchrodingerContext<T>, w: &BiField<T>) -> Result<()> {
    if ctx.sig() != w.sig() {
        return Err(Error::SignatureMismatch("field and context have different signatures".into()));
    }
    Ok(())
}

fn probes<T: Scalar>(ctx: &SchrodingerContext<T>) -> Vec<Point<T>> {
    let dom = ctx.domain();
    dom.sample_points(5, dom.bounding_box.scale() * lit(0.02))
}

/// Imaginary part `W₂` of a solution whose real part is `W₁`:
///
/// ```text
/// W₂ = −σ f⁻¹ Ā[u f² ∂_z̄(f⁻¹ W₁)] = −σ f⁻¹ Ā[u (f ∂_z̄W₁ − f_z̄ W₁)]
/// ```
///
/// integrated from `z0`, so `W₂(z0) = 0`.
pub fn conjugate_imag<T: Scalar>(ctx: &SchrodingerContext<T>, w1: &BiField<T>, z0: Point<T>) -> Result<BiField<T>> {
    conjugate_imag_with(ctx, w1, AntigradientCfg::new(z0))
}

pub fn conjugate_imag_with<T: Scalar>(
    ctx: &SchrodingerContext<T>,
    w1: &BiField<T>,
    cfg: AntigradientCfg<T>,
) -> Result<BiField<T>> {
    check_signatures(ctx, w1)?;
    require_real(w1, &probes(ctx))?;
    let sig = ctx.sig();
    let u = Binumber::unit(sig);
    let (f, w) = (ctx.f.clone(), w1.clone());
    let phi = BiField::finite_difference(
        sig,
        ctx.domain().clone(),
        move |p| {
            let (jf, jw) = (f.jet(p), w.jet(p));
            u * (jf.value * jw.dzbar - jf.dzbar * jw.value)
        },
        None,
    );
    let a = antigradient_field(&phi, cfg)?;
    let k = -sig.sigma::<T>();
    Ok(ctx.f.recip().mul(&a).scale(k).with_domain(w1.domain().clone()))
}

/// Real part `W₁` of a solution whose imaginary part is `W₂`:
///
/// ```text
/// W₁ = −f Ā[u f⁻² ∂_z̄(f W₂)]
/// ```
pub fn conjugate_real<T: Scalar>(ctx: &SchrodingerContext<T>, w2: &BiField<T>, z0: Point<T>) -> Result<BiField<T>> {
    conjugate_real_with(ctx, w2, AntigradientCfg::new(z0))
}

pub fn conjugate_real_with<T: Scalar>(
    ctx: &SchrodingerContext<T>,
    w2: &BiField<T>,
    cfg: AntigradientCfg<T>,
) -> Result<BiField<T>> {
    check_signatures(ctx, w2)?;
    require_real(w2, &probes(ctx))?;
    let sig = ctx.sig();
    let u = Binumber::unit(sig);
    let (f, w) = (ctx.f.clone(), w2.clone());
    let phi = BiField::finite_difference(
        sig,
        ctx.domain().clone(),
        move |p| {
            let (jf, jw) = (f.jet(p), w.jet(p));
            let fv = jf.value;
            u * (jf.dzbar * jw.value + fv * jw.dzbar) / (fv * fv)
        },
        None,
    );
    let a = antigradient_field(&phi, cfg)?;
    Ok(ctx.f.mul(&a).scale(-T::one()).with_domain(w2.domain().clone()))
}

/// Deviation from both factorizations of `¼(L − q)φ` for a real `φ`:
///
/// ```text
/// (∂_z̄ + (f_z/f)C)(∂_z − (f_z/f)C)φ   and   (∂_z + (f_z̄/f)C)(∂_z̄ − (f_z̄/f)C)φ
/// ```
///
/// Returns the larger of the two deviations.
pub fn factorization_residual<T: Scalar>(ctx: &SchrodingerContext<T>, phi: &BiField<T>, at: Point<T>) -> Result<T> {
    check_signatures(ctx, phi)?;
    if !ctx.domain().contains(at) {
        return Err(domain_err(at));
    }
    let sig = ctx.sig();
    let op = SecondOrder::for_signature(sig);
    let lhs = (second_order(phi, op, at)? - ctx.q.value(at).re * phi.value(at).re) * lit::<T>(0.25);
    let lhs = Binumber::real(lhs, sig);

    let inner = |use_dz: bool| {
        let (f, ph) = (ctx.f.clone(), phi.clone());
        BiField::finite_difference(
            sig,
            ctx.domain().clone(),
            move |p| {
                let (jf, jp) = (f.jet(p), ph.jet(p));
                if use_dz {
                    jp.dz - jf.dz / jf.value * jp.value.conj()
                } else {
                    jp.dzbar - jf.dzbar / jf.value * jp.value.conj()
                }
            },
            None,
        )
    };
    let jf = ctx.f.jet(at);
    let first = {
        let psi = inner(true).jet(at);
        psi.dzbar + jf.dz / jf.value * psi.value.conj()
    };
    let second = {
        let psi = inner(false).jet(at);
        psi.dz + jf.dzbar / jf.value * psi.value.conj()
    };
    Ok((first - lhs).norm().max((second - lhs).norm()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BDirection {
    Forward,
    Inverse,
}

/// `B = f P⁺ + f⁻¹ P⁻` and `B⁻¹ = f⁻¹ P⁺ + f P⁻`.
pub fn apply_b<T: Scalar>(omega: &BiField<T>, f: &BiField<T>, direction: BDirection) -> BiField<T> {
    let f = f.clone();
    let om = omega.clone();
    BiField::analytic(omega.sig(), omega.domain().clone(), move |p| {
        let jf = f.jet(p);
        let jo = om.jet(p);
        let (plus, minus) = (jo.real_part(), (jo - jo.conj()).scale(lit(0.5)));
        match direction {
            BDirection::Forward => jf * plus + jf.recip() * minus,
            BDirection::Inverse => jf.recip() * plus + jf * minus,
        }
    })
    .with_mode_of(omega)
}

impl<T: Scalar> BiField<T> {
    /// Keeps finite-difference derivatives when `other` only has those.
    fn with_mode_of(self, other: &BiField<T>) -> Self {
        match other.mode() {
            crate::fields::DerivMode::Analytic => self,
            crate::fields::DerivMode::FiniteDifference { h } => self.to_finite_difference(h),
        }
    }
}

/// The system `φx = ψy/p`, `φy = −ψx/p`.
#[derive(Clone, Debug)]
pub struct PAnalyticSystem<T> {
    pub p: BiField<T>,
}

impl<T: Scalar> PAnalyticSystem<T> {
    /// `p = f²`.
    pub fn from_generator(f: &BiField<T>) -> Self {
        PAnalyticSystem { p: f.mul(f) }
    }
}

/// `max(|φx − ψy/p|, |φy + ψx/p|)` for `ω = φ + iψ`.
pub fn p_analytic_residual<T: Scalar>(sys: &PAnalyticSystem<T>, omega: &BiField<T>, at: Point<T>) -> Result<T> {
    if omega.sig() != Signature::Elliptic {
        return Err(Error::SignatureMismatch("p-analytic systems are elliptic".into()));
    }
    let j = omega.try_jet(at)?;
    let (dx, dy) = j.partials();
    let p = sys.p.value(at).re;
    Ok((dx.re - dy.im / p).abs().max((dy.re + dx.im / p).abs()))
}

/// `|𝒱B[ω] − Π[ω]|` with `𝒱 = ∂_z̄ − (f_z̄/f)C` and `Π = f ∂_z̄P⁺ + f⁻¹ ∂_z̄P⁻`.
pub fn relation_check<T: Scalar>(f: &BiField<T>, omega: &BiField<T>, at: Point<T>) -> Result<T> {
    let b = apply_b(omega, f, BDirection::Forward);
    let jb = b.try_jet(at)?;
    let jf = f.jet(at);
    let v = jb.dzbar - jf.dzbar / jf.value * jb.value.conj();
    let jo = omega.try_jet(at)?;
    let plus = jo.real_part();
    let minus = (jo - jo.conj()).scale(lit(0.5));
    let pi = jf.value * plus.dzbar + minus.dzbar / jf.value;
    Ok((v - pi).norm())
}

/// Real and imaginary parts of `W` as separate real fields.
pub fn split<T: Scalar>(w: &BiField<T>) -> (BiField<T>, BiField<T>) {
    (w.real_part(), w.imag_part())
}
