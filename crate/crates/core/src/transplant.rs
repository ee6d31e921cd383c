//! The transplant operator between main Vekua equations whose generators solve
//! the same Schrödinger (or Klein-Gordon) equation:
//!
//! ```text
//! T_{f,g}[W] = P⁺W + u·W₂,   W₂ = −σ g⁻¹ Ā[u g² ∂_z̄(g⁻¹ P⁺W)]
//! ```
//!
//! and the Cauchy kernels obtained by transplanting `a/(z − z0)`.

use std::sync::Arc;

use crate::algebra::{Binumber, Signature};
use crate::antigradient::{AntigradientCfg, PathPolicy};
use crate::bers::{
    descend, formal_power, formal_power_zero_at, successor_from_powers, FormalPower, GeneratingPair,
    GeneratingSequence, IntegrationCfg,
};
use crate::error::{Error, Result};
use crate::fields::{domain_err, make_context, BiField, Domain, Jet, Point, SchrodingerContext};
use crate::quadrature::QuadratureCfg;
use crate::scalar::{lit, Scalar};
use crate::vekua::conjugate_imag_with;

/// How the free real constant of `Ā` is fixed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConstantPolicy<T> {
    /// `c = 0`: the imaginary part vanishes at the base point.
    Zero,
    /// The imaginary part takes `value` at `point`.
    PinAt(Point<T>, T),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransplantConfig<T> {
    /// Origin of the integrals. Positive powers default to their center;
    /// negative powers need it set explicitly.
    pub base_point: Option<Point<T>>,
    pub path_policy: PathPolicy<T>,
    pub constant_policy: ConstantPolicy<T>,
    pub quad: QuadratureCfg<T>,
}

impl<T: Scalar> Default for TransplantConfig<T> {
    fn default() -> Self {
        TransplantConfig {
            base_point: None,
            path_policy: PathPolicy::AxisAligned,
            constant_policy: ConstantPolicy::Zero,
            quad: QuadratureCfg::default(),
        }
    }
}

impl<T: Scalar> TransplantConfig<T> {
    pub fn from_base(base: Point<T>) -> Self {
        TransplantConfig { base_point: Some(base), ..Self::default() }
    }

    /// Base point with detours around punctures, as used for kernels.
    pub fn for_kernel(base: Point<T>, clearance: T) -> Self {
        TransplantConfig {
            base_point: Some(base),
            path_policy: PathPolicy::AvoidPunctures { clearance },
            ..Self::default()
        }
    }

    pub fn with_quad(mut self, quad: QuadratureCfg<T>) -> Self {
        self.quad = quad;
        self
    }

    pub fn with_constant(mut self, policy: ConstantPolicy<T>) -> Self {
        self.constant_policy = policy;
        self
    }
}

const Q_MATCH_GRID: usize = 20;
const Q_MATCH_TOL: f64 = 1e-8;

/// Largest relative difference of the two potentials on the probe grid.
pub fn potential_mismatch<T: Scalar>(f_ctx: &SchrodingerContext<T>, g_ctx: &SchrodingerContext<T>) -> T {
    let dom = g_ctx.domain();
    let mut worst = T::zero();
    for p in dom.sample_points(Q_MATCH_GRID, dom.bounding_box.scale() * lit(0.01)) {
        if !f_ctx.domain().contains(p) {
            continue;
        }
        let (a, b) = (f_ctx.q.value(p).re, g_ctx.q.value(p).re);
        let d = (a - b).abs() / (T::one() + a.abs().max(b.abs()));
        if !(d <= worst) {
            worst = d;
        }
    }
    worst
}

fn check_contexts<T: Scalar>(f_ctx: &SchrodingerContext<T>, g_ctx: &SchrodingerContext<T>) -> Result<()> {
    if f_ctx.sig() != g_ctx.sig() {
        return Err(Error::SignatureMismatch("contexts have different signatures".into()));
    }
    let m = potential_mismatch(f_ctx, g_ctx);
    if !(m <= lit::<T>(Q_MATCH_TOL)) {
        return Err(Error::ContextMismatch(format!("potentials differ by {:e} (relative)", m.to_f64_lossy())));
    }
    Ok(())
}

/// `T_{f,g}[W]` with integrals from `base`, on `domain`.
fn transplant_from<T: Scalar>(
    g_ctx: &SchrodingerContext<T>,
    w: &BiField<T>,
    base: Point<T>,
    cfg: &TransplantConfig<T>,
    domain: Arc<Domain<T>>,
) -> Result<BiField<T>> {
    let w1 = w.real_part().with_domain(domain.clone());
    let g_ctx =
        SchrodingerContext { f: g_ctx.f.clone().with_domain(domain.clone()), q: g_ctx.q.clone(), q1: g_ctx.q1.clone() };
    let acfg = AntigradientCfg::new(base).with_policy(cfg.path_policy.clone()).with_quad(cfg.quad);
    let mut w2 = conjugate_imag_with(&g_ctx, &w1, acfg)?;
    if let ConstantPolicy::PinAt(p, value) = cfg.constant_policy {
        if !domain.contains(p) {
            return Err(domain_err(p));
        }
        let shift = (value - w2.value(p).re) * g_ctx.f.value(p).re;
        w2 = w2.add(&g_ctx.f.recip().scale(shift));
    }
    Ok(BiField::compose(&w1, &w2).with_domain(domain))
}

/// `T_{f,g}[W]`: a solution of the `g` equation with the same real part as `W`.
pub fn transplant<T: Scalar>(
    f_ctx: &SchrodingerContext<T>,
    g_ctx: &SchrodingerContext<T>,
    w: &BiField<T>,
    cfg: &TransplantConfig<T>,
) -> Result<BiField<T>> {
    check_contexts(f_ctx, g_ctx)?;
    let base = cfg.base_point.ok_or_else(|| Error::Config("transplant needs a base point".into()))?;
    transplant_from(g_ctx, w, base, cfg, g_ctx.domain().clone())
}

/// Order-0 powers come straight from `(g, u/g)`; positive orders are
/// transplanted with integrals from the center.
pub fn transplant_formal_power<T: Scalar>(
    f_ctx: &SchrodingerContext<T>,
    g_ctx: &SchrodingerContext<T>,
    zf: &FormalPower<T>,
    cfg: &TransplantConfig<T>,
) -> Result<FormalPower<T>> {
    if zf.order < 0 {
        return transplant_negative_power(f_ctx, g_ctx, zf, cfg);
    }
    check_contexts(f_ctx, g_ctx)?;
    if zf.order == 0 {
        let pair = GeneratingPair::from_generator(&g_ctx.f);
        return formal_power_zero_at(&pair, zf.coeff, zf.center, zf.pair_index);
    }
    let base = cfg.base_point.unwrap_or(zf.center);
    let value = transplant_from(g_ctx, &zf.value, base, cfg, g_ctx.domain().clone())?;
    Ok(FormalPower::new(zf.order, zf.center, zf.coeff, value, zf.pair_index))
}

/// Transplants a negative power; the domain gains a puncture at its center and
/// every path is routed by `cfg.path_policy` from `cfg.base_point`.
pub fn transplant_negative_power<T: Scalar>(
    f_ctx: &SchrodingerContext<T>,
    g_ctx: &SchrodingerContext<T>,
    zf: &FormalPower<T>,
    cfg: &TransplantConfig<T>,
) -> Result<FormalPower<T>> {
    if zf.order >= 0 {
        return Err(Error::Config("expected a negative-order power".into()));
    }
    check_contexts(f_ctx, g_ctx)?;
    let base = cfg.base_point.ok_or_else(|| Error::Config("negative powers need an explicit base point".into()))?;
    let mut dom = (**g_ctx.domain()).clone();
    if !dom.excluded_points.contains(&zf.center) {
        dom = dom.with_puncture(zf.center);
    }
    let domain = Arc::new(dom);
    if base == zf.center {
        return Err(Error::PathThroughPole { x: base.x.to_f64_lossy(), y: base.y.to_f64_lossy(), clearance: 0.0 });
    }
    let value = transplant_from(g_ctx, &zf.value, base, cfg, domain)?;
    Ok(FormalPower::new(zf.order, zf.center, zf.coeff, value, zf.pair_index))
}

/// `a / (z − z0)` with exact jet, on `domain` punctured at `z0`.
pub fn simple_pole<T: Scalar>(sig: Signature, domain: &Domain<T>, a: Binumber<T>, z0: Point<T>) -> FormalPower<T> {
    let dom = Arc::new(domain.clone().with_puncture(z0));
    let c = z0.to_binumber(sig);
    let value = BiField::analytic(sig, dom, move |p| {
        let inv = Binumber::one(sig) / (p.to_binumber(sig) - c);
        Jet::new(a * inv, -(a * inv * inv), Binumber::zero(sig))
    });
    FormalPower::new(-1, z0, a, value, 0)
}

/// `Z_g^(−1)(a, z0; ·)` by transplanting `a/(z − z0)` from the companion `f ≡ 1`,
/// which requires `g` itself to solve the free equation (`q = 0`).
///
/// A constant `g` leaves `W_z̄ = 0`, whose kernel is the pole itself.
pub fn cauchy_kernel<T: Scalar>(
    g_ctx: &SchrodingerContext<T>,
    a: Binumber<T>,
    z0: Point<T>,
    cfg: &TransplantConfig<T>,
) -> Result<FormalPower<T>> {
    let sig = g_ctx.sig();
    let dom = g_ctx.domain().clone();
    if !dom.contains(z0) {
        return Err(domain_err(z0));
    }
    let unit = make_context(BiField::constant(sig, dom.clone(), Binumber::one(sig)))?;
    check_contexts(&unit, g_ctx).map_err(|e| match e {
        Error::ContextMismatch(m) => Error::ContextMismatch(format!("no companion f ≡ 1: {m}")),
        other => other,
    })?;
    let pole = simple_pole(sig, &dom, a, z0);
    if is_constant(&g_ctx.f) {
        return Ok(pole);
    }
    transplant_negative_power(&unit, g_ctx, &pole, cfg)
}

fn is_constant<T: Scalar>(f: &BiField<T>) -> bool {
    let probes = f.domain().sample_points(5, T::zero());
    let Some(first) = probes.first() else { return false };
    let c = f.value(*first);
    probes.iter().all(|p| {
        let j = f.jet(*p);
        j.value == c && j.dz == Binumber::zero(c.sig) && j.dzbar == Binumber::zero(c.sig)
    })
}

/// `Z^(−2), …, Z^(−count−1)` from `Z^(−1)` by
/// `Z_{m+1}^(−n−1) = (−1/n) d_{(F_m,G_m)} Z_m^(−n)`.
pub fn negative_power_ladder<T: Scalar>(
    seq: &GeneratingSequence<T>,
    zm1: &FormalPower<T>,
    count: usize,
) -> Result<Vec<FormalPower<T>>> {
    if zm1.order != -1 {
        return Err(Error::Config("the ladder starts from an order −1 power".into()));
    }
    if seq.period.is_none() {
        return Err(Error::SequenceExhausted(zm1.pair_index - 1));
    }
    let mut out = Vec::with_capacity(count);
    let mut cur = zm1.clone();
    for _ in 0..count {
        cur = descend(seq.pair(cur.pair_index)?, &cur)?;
        out.push(cur.clone());
    }
    Ok(out)
}

/// The first `count + 1` pairs of a generating sequence for the `g` equation,
/// starting from `(g, u/g)`.
///
/// Pair `k + 1` is the successor of pair `k` computed from `Z_k^(1)(1)` and
/// `Z_k^(1)(u)`, which descend from the transplanted powers `Z_g^(k+1)`.
pub fn sequence_via_transplant<T: Scalar>(
    f_ctx: &SchrodingerContext<T>,
    g_ctx: &SchrodingerContext<T>,
    f_seq: &GeneratingSequence<T>,
    z0: Point<T>,
    count: usize,
    cfg: &TransplantConfig<T>,
    icfg: &IntegrationCfg<T>,
) -> Result<GeneratingSequence<T>> {
    check_contexts(f_ctx, g_ctx)?;
    let sig = g_ctx.sig();
    let mut pairs = vec![GeneratingPair::from_generator(&g_ctx.f)];
    for k in 0..count {
        let first = |a: Binumber<T>| -> Result<FormalPower<T>> {
            let zf = formal_power(f_seq, k as u32 + 1, a, z0, 0, icfg)?;
            let mut z = transplant_formal_power(f_ctx, g_ctx, &zf, cfg)?;
            for pair in &pairs[..k] {
                z = descend(pair, &z)?;
            }
            Ok(z)
        };
        let (one, unit) = (first(Binumber::one(sig))?, first(Binumber::unit(sig))?);
        let next = successor_from_powers(&pairs[k], &one, &unit)?;
        pairs.push(next);
    }
    Ok(GeneratingSequence::new(pairs))
}
