//! Bers calculus: generating pairs, `(F,G)`-derivatives and integrals,
//! formal powers and generating sequences.
//!
//! With `D = FḠ − F̄G` the characteristic coefficients of a pair are
//!
//! ```text
//! a = −(F̄ G_z̄ − F_z̄ Ḡ)/D    b = (F G_z̄ − F_z̄ G)/D
//! A = −(F̄ G_z  − F_z  Ḡ)/D    B = (F G_z  − F_z  G)/D
//! ```
//!
//! and the adjoint pair is `F* = −2F̄/D`, `G* = 2Ḡ/D`.

use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, RwLock};

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::algebra::{Binumber, Signature};
use crate::antigradient::{Path, PathPolicy};
use crate::error::{Error, Result};
use crate::fields::{BiField, Domain, Jet, Point};
use crate::quadrature::QuadratureCfg;
use crate::scalar::{half, lit, two, Scalar};

const PROBE_GRID: usize = 5;

/// Two solutions `(F, G)` with `Im(F̄G) > 0`.
#[derive(Clone, Debug)]
pub struct GeneratingPair<T> {
    pub f: BiField<T>,
    pub g: BiField<T>,
}

/// `(a, b, A, B)` at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharCoeffs<T> {
    pub a: Binumber<T>,
    pub b: Binumber<T>,
    pub big_a: Binumber<T>,
    pub big_b: Binumber<T>,
}

fn im_fbar_g<T: Scalar>(f: Binumber<T>, g: Binumber<T>) -> T {
    (f.conj() * g).im
}

fn degenerate<T: Scalar>(p: Point<T>) -> Error {
    let (x, y) = p.as_f64();
    Error::DegeneratePair { x, y }
}

fn probe_points<T: Scalar>(domain: &Domain<T>) -> Vec<Point<T>> {
    domain.sample_points(PROBE_GRID, domain.bounding_box.scale() * lit(0.02))
}

impl<T: Scalar> GeneratingPair<T> {
    /// Checks `Im(F̄G) > 0` on the probe grid of `F`'s domain.
    pub fn new(f: BiField<T>, g: BiField<T>) -> Result<Self> {
        if f.sig() != g.sig() {
            return Err(Error::SignatureMismatch("generating pair components differ in signature".into()));
        }
        for p in probe_points(f.domain()) {
            if !(im_fbar_g(f.value(p), g.value(p)) > T::zero()) {
                return Err(degenerate(p));
            }
        }
        Ok(GeneratingPair { f, g })
    }

    pub fn new_unchecked(f: BiField<T>, g: BiField<T>) -> Self {
        GeneratingPair { f, g }
    }

    /// `(f, u/f)` for a real positive `f`.
    pub fn from_generator(f: &BiField<T>) -> Self {
        let u = Binumber::unit(f.sig());
        GeneratingPair { f: f.clone(), g: f.recip().times(u) }
    }

    pub fn sig(&self) -> Signature {
        self.f.sig()
    }

    pub fn domain(&self) -> &Arc<Domain<T>> {
        self.f.domain()
    }

    fn denominator(&self, jf: &Jet<T>, jg: &Jet<T>, at: Point<T>) -> Result<Binumber<T>> {
        let s = im_fbar_g(jf.value, jg.value);
        let tol = lit::<T>(1e-14) * jf.value.norm() * jg.value.norm();
        if !(s.abs() > tol) {
            return Err(degenerate(at));
        }
        Ok(jf.value * jg.value.conj() - jf.value.conj() * jg.value)
    }

    pub fn char_coeffs(&self, at: Point<T>) -> Result<CharCoeffs<T>> {
        let (jf, jg) = (self.f.jet(at), self.g.jet(at));
        let d = self.denominator(&jf, &jg, at)?;
        let (f, g) = (jf.value, jg.value);
        let (fb, gb) = (f.conj(), g.conj());
        Ok(CharCoeffs {
            a: -(fb * jg.dzbar - jf.dzbar * gb) / d,
            b: (f * jg.dzbar - jf.dzbar * g) / d,
            big_a: -(fb * jg.dz - jf.dz * gb) / d,
            big_b: (f * jg.dz - jf.dz * g) / d,
        })
    }

    /// `(F*, G*)`; derivatives follow from those of `F` and `G`.
    pub fn adjoint(&self) -> Result<GeneratingPair<T>> {
        for p in probe_points(self.domain()) {
            let (jf, jg) = (self.f.jet(p), self.g.jet(p));
            self.denominator(&jf, &jg, p)?;
        }
        let d = self.f.zip(&self.g, |f, g| f * g.conj() - f.conj() * g);
        let dinv = d.recip();
        let fs = self.f.conj().mul(&dinv).scale(-two::<T>());
        let gs = self.g.conj().mul(&dinv).scale(two::<T>());
        Ok(GeneratingPair { f: fs, g: gs })
    }

    /// Values `(F*, G*)` at one point.
    pub fn adjoint_at(&self, at: Point<T>) -> (Binumber<T>, Binumber<T>) {
        let (f, g) = (self.f.value(at), self.g.value(at));
        let d = f * g.conj() - f.conj() * g;
        ((f.conj() / d).scale(-two::<T>()), (g.conj() / d).scale(two::<T>()))
    }

    /// Real `(λ, μ)` with `λF(z0) + μG(z0) = a`.
    pub fn decompose(&self, a: Binumber<T>, z0: Point<T>) -> Result<(T, T)> {
        let (f, g) = (self.f.value(z0), self.g.value(z0));
        let det = f.re * g.im - g.re * f.im;
        let scale = f.norm() * g.norm();
        if !(det.abs() > lit::<T>(1e-12) * scale) {
            return Err(degenerate(z0));
        }
        let lambda = (a.re * g.im - g.re * a.im) / det;
        let mu = (f.re * a.im - a.re * f.im) / det;
        Ok((lambda, mu))
    }
}

/// `W_z − A W − B W̄` at `at`.
pub fn fg_derivative<T: Scalar>(pair: &GeneratingPair<T>, w: &BiField<T>, at: Point<T>) -> Result<Binumber<T>> {
    let c = pair.char_coeffs(at)?;
    let j = w.try_jet(at)?;
    Ok(j.dz - c.big_a * j.value - c.big_b * j.value.conj())
}

/// `(F,G)`-derivative as a field (derivatives by finite differences).
pub fn fg_derivative_field<T: Scalar>(pair: &GeneratingPair<T>, w: &BiField<T>) -> BiField<T> {
    let (pair, w) = (pair.clone(), w.clone());
    let sig = w.sig();
    BiField::finite_difference(
        sig,
        w.domain().clone(),
        move |p| match pair.char_coeffs(p) {
            Ok(c) => {
                let j = w.jet(p);
                j.dz - c.big_a * j.value - c.big_b * j.value.conj()
            }
            Err(_) => Binumber::new(T::nan(), T::nan(), sig),
        },
        None,
    )
}

/// `F(z₁) Re∫ G* W dζ + G(z₁) Re∫ F* W dζ` along `path` ending at `z₁`.
pub fn fg_integral<T: Scalar>(pair: &GeneratingPair<T>, w: &BiField<T>, path: &Path<T>) -> Result<Binumber<T>> {
    path.validate(pair.domain(), T::zero())?;
    let sig = pair.sig();
    let (rg, rf) = fg_integral_parts(pair, w, path, sig)?;
    let z1 = path.end();
    Ok(pair.f.value(z1).scale(rg) + pair.g.value(z1).scale(rf))
}

fn fg_integral_parts<T: Scalar>(
    pair: &GeneratingPair<T>,
    w: &BiField<T>,
    path: &Path<T>,
    sig: Signature,
) -> Result<(T, T)> {
    let s = sig.sigma::<T>();
    path.integrate(|p, dx, dy| {
        let (fs, gs) = pair.adjoint_at(p);
        let v = w.value(p);
        let (hg, hf) = (gs * v, fs * v);
        (hg.re * dx + s * hg.im * dy, hf.re * dx + s * hf.im * dy)
    })
}

/// Paths and quadrature used when building fields by integration.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegrationCfg<T> {
    pub policy: PathPolicy<T>,
    pub quad: QuadratureCfg<T>,
}

impl<T: Scalar> Default for IntegrationCfg<T> {
    fn default() -> Self {
        IntegrationCfg { policy: PathPolicy::AxisAligned, quad: QuadratureCfg::default() }
    }
}

/// `z ↦ ∫_{z0}^{z} W d_{(F,G)}z` as a field with exact jets:
///
/// ```text
/// ∂_z̄ = F_z̄ R_G + G_z̄ R_F + ½(F·conj(G*W) + G·conj(F*W))
/// ∂_z  = F_z R_G + G_z R_F + W
/// ```
///
/// where `R_G = Re∫G*W dζ` and `R_F = Re∫F*W dζ`.
pub fn fg_integral_field<T: Scalar>(
    pair: &GeneratingPair<T>,
    w: &BiField<T>,
    z0: Point<T>,
    cfg: &IntegrationCfg<T>,
) -> BiField<T> {
    let sig = pair.sig();
    let (pair, w, cfg) = (pair.clone(), w.clone(), cfg.clone());
    let domain = pair.domain().clone();
    let dom = domain.clone();
    BiField::analytic(sig, domain, move |z| {
        let path = cfg.policy.route(&dom, z0, z, cfg.quad);
        let nan = T::nan();
        let (rg, rf) = match path.validate(&dom, cfg.policy.clearance(&dom, z0, z)) {
            Ok(()) => fg_integral_parts(&pair, &w, &path, sig).unwrap_or((nan, nan)),
            Err(_) => (nan, nan),
        };
        let (jf, jg) = (pair.f.jet(z), pair.g.jet(z));
        let (fs, gs) = pair.adjoint_at(z);
        let v = w.value(z);
        let value = jf.value.scale(rg) + jg.value.scale(rf);
        let dzbar = jf.dzbar.scale(rg)
            + jg.dzbar.scale(rf)
            + (jf.value * (gs * v).conj() + jg.value * (fs * v).conj()).scale(half());
        let dz = jf.dz.scale(rg) + jg.dz.scale(rf) + v;
        Jet::new(value, dz, dzbar)
    })
}

/// Positive formal power `Z_m^(n)(a, z0; ·)` (or negative, for `order < 0`).
#[derive(Clone)]
pub struct FormalPower<T> {
    pub order: i32,
    pub center: Point<T>,
    pub coeff: Binumber<T>,
    pub value: BiField<T>,
    pub pair_index: i64,
    cache: Arc<RwLock<HashMap<u64, Arc<Vec<Binumber<T>>>>>>,
}

impl<T: std::fmt::Debug> std::fmt::Debug for FormalPower<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FormalPower")
            .field("order", &self.order)
            .field("center", &self.center)
            .field("coeff", &self.coeff)
            .field("pair_index", &self.pair_index)
            .finish_non_exhaustive()
    }
}

fn grid_key<T: Scalar>(points: &[Point<T>]) -> u64 {
    let mut h = DefaultHasher::new();
    points.len().hash(&mut h);
    for p in points {
        p.x.to_f64_lossy().to_bits().hash(&mut h);
        p.y.to_f64_lossy().to_bits().hash(&mut h);
    }
    h.finish()
}

impl<T: Scalar> FormalPower<T> {
    pub fn new(order: i32, center: Point<T>, coeff: Binumber<T>, value: BiField<T>, pair_index: i64) -> Self {
        FormalPower { order, center, coeff, value, pair_index, cache: Arc::default() }
    }

    pub fn eval(&self, at: Point<T>) -> Binumber<T> {
        self.value.value(at)
    }

    /// Values on `points` in order, computed in parallel and memoized per grid.
    pub fn eval_grid(&self, points: &[Point<T>]) -> Arc<Vec<Binumber<T>>> {
        let key = grid_key(points);
        if let Some(v) = self.cache.read().expect("formal power cache poisoned").get(&key) {
            return v.clone();
        }
        let vals: Arc<Vec<_>> = Arc::new(points.par_iter().map(|p| self.value.value(*p)).collect());
        self.cache.write().expect("formal power cache poisoned").entry(key).or_insert(vals).clone()
    }

    /// `|Z(z) / (a (z − z0)^n) − 1|` at `z`.
    pub fn asymptotic_ratio_error(&self, z: Point<T>) -> Result<T> {
        let sig = self.value.sig();
        let dz = z.to_binumber(sig) - self.center.to_binumber(sig);
        let model = self.coeff * dz.powi(self.order)?;
        let ratio = self.value.value(z) / model;
        Ok((ratio - Binumber::one(sig)).norm())
    }
}

/// Indexed generating pairs, optionally periodic (then every integer index resolves).
#[derive(Clone, Debug)]
pub struct GeneratingSequence<T> {
    pub pairs: Vec<GeneratingPair<T>>,
    pub period: Option<usize>,
}

impl<T: Scalar> GeneratingSequence<T> {
    pub fn new(pairs: Vec<GeneratingPair<T>>) -> Self {
        GeneratingSequence { pairs, period: None }
    }

    /// Sequence repeating `pairs` with period `pairs.len()`.
    pub fn periodic(pairs: Vec<GeneratingPair<T>>) -> Self {
        let n = pairs.len();
        GeneratingSequence { pairs, period: Some(n) }
    }

    pub fn pair(&self, m: i64) -> Result<&GeneratingPair<T>> {
        match self.period {
            Some(p) if p > 0 => Ok(&self.pairs[m.rem_euclid(p as i64) as usize]),
            _ if m >= 0 && (m as usize) < self.pairs.len() => Ok(&self.pairs[m as usize]),
            _ => Err(Error::SequenceExhausted(m)),
        }
    }

    pub fn sig(&self) -> Signature {
        self.pairs[0].sig()
    }
}

/// `Z_m^(0)(a, z0; ·) = λF_m + μG_m` with `λF_m(z0) + μG_m(z0) = a`.
pub fn formal_power_zero<T: Scalar>(pair: &GeneratingPair<T>, a: Binumber<T>, z0: Point<T>) -> Result<FormalPower<T>> {
    formal_power_zero_at(pair, a, z0, 0)
}

pub fn formal_power_zero_at<T: Scalar>(
    pair: &GeneratingPair<T>,
    a: Binumber<T>,
    z0: Point<T>,
    m: i64,
) -> Result<FormalPower<T>> {
    let (lambda, mu) = pair.decompose(a, z0)?;
    let value = pair.f.scale(lambda).add(&pair.g.scale(mu));
    Ok(FormalPower::new(0, z0, a, value, m))
}

/// `Z_m^(n) = n ∫_{z0}^{z} Z_{m+1}^(n−1) d_{(F_m,G_m)}z` from `prev = Z_{m+1}^(n−1)`.
pub fn formal_power_next<T: Scalar>(seq: &GeneratingSequence<T>, prev: &FormalPower<T>) -> Result<FormalPower<T>> {
    formal_power_next_with(seq, prev, &IntegrationCfg::default())
}

pub fn formal_power_next_with<T: Scalar>(
    seq: &GeneratingSequence<T>,
    prev: &FormalPower<T>,
    cfg: &IntegrationCfg<T>,
) -> Result<FormalPower<T>> {
    if prev.order < 0 {
        return Err(Error::Config("recursion upward applies to non-negative orders".into()));
    }
    let m = prev.pair_index - 1;
    let pair = seq.pair(m)?;
    let n = prev.order + 1;
    let integrand = prev.value.scale(lit(n as f64));
    let value = fg_integral_field(pair, &integrand, prev.center, cfg);
    Ok(FormalPower::new(n, prev.center, prev.coeff, value, m))
}

/// `Z_m^(n)(a, z0; ·)` by the recursion, starting from `Z_{m+n}^(0)`.
pub fn formal_power<T: Scalar>(
    seq: &GeneratingSequence<T>,
    n: u32,
    a: Binumber<T>,
    z0: Point<T>,
    m: i64,
    cfg: &IntegrationCfg<T>,
) -> Result<FormalPower<T>> {
    let top = m + n as i64;
    let mut z = formal_power_zero_at(seq.pair(top)?, a, z0, top)?;
    for _ in 0..n {
        z = formal_power_next_with(seq, &z, cfg)?;
    }
    Ok(z)
}

/// `Z_{m+1}^(n−1) = (1/n) d_{(F_m,G_m)} Z_m^(n)` for `n ≥ 1`, and the negative
/// ladder `Z_{m+1}^(−n−1) = (−1/n) d_{(F_m,G_m)} Z_m^(−n)` for orders `−n ≤ −1`.
pub fn descend<T: Scalar>(pair: &GeneratingPair<T>, power: &FormalPower<T>) -> Result<FormalPower<T>> {
    let n = power.order;
    if n == 0 {
        return Err(Error::Config("the derivative of an order-zero power vanishes".into()));
    }
    let d = fg_derivative_field(pair, &power.value);
    // Both ladders divide by the current order and lower it by one.
    Ok(FormalPower::new(n - 1, power.center, power.coeff, d.scale(lit(1.0 / n as f64)), power.pair_index + 1))
}

/// Successor `(F', G') = (d Z¹(1), d Z¹(u))` with respect to `pair`.
pub fn successor_from_powers<T: Scalar>(
    pair: &GeneratingPair<T>,
    z1_one: &FormalPower<T>,
    z1_unit: &FormalPower<T>,
) -> Result<GeneratingPair<T>> {
    if z1_one.order != 1 || z1_unit.order != 1 {
        return Err(Error::Config("successor construction needs first-order powers".into()));
    }
    let f = fg_derivative_field(pair, &z1_one.value);
    let g = fg_derivative_field(pair, &z1_unit.value);
    for p in probe_points(pair.domain()) {
        let v = im_fbar_g(f.value(p), g.value(p));
        if !(v > T::zero()) {
            let (x, y) = p.as_f64();
            return Err(Error::NotGeneratingPair { x, y, value: v.to_f64_lossy() });
        }
    }
    Ok(GeneratingPair::new_unchecked(f, g))
}

/// `W^[m]`: `W^[0] = W`, `W^[k+1] = d_{(F_k,G_k)} W^[k]`.
pub fn higher_derivative<T: Scalar>(seq: &GeneratingSequence<T>, w: &BiField<T>, m: usize) -> Result<BiField<T>> {
    let mut out = w.clone();
    for k in 0..m {
        out = fg_derivative_field(seq.pair(k as i64)?, &out);
    }
    Ok(out)
}

/// Least-squares real coefficients of `target ≈ Σ c_k Z_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialFit<T> {
    pub coefficients: Vec<T>,
    /// Euclidean norm of the sample misfit.
    pub residual: T,
}

pub fn formal_polynomial_fit<T: Scalar>(
    powers: &[FormalPower<T>],
    target: &BiField<T>,
    samples: &[Point<T>],
) -> Result<PolynomialFit<T>> {
    let k = powers.len();
    if k == 0 || 2 * samples.len() < k {
        return Err(Error::Fit(format!("{} samples cannot determine {} coefficients", samples.len(), k)));
    }
    let rows = 2 * samples.len();
    let mut a = DMatrix::<f64>::zeros(rows, k);
    let mut b = DVector::<f64>::zeros(rows);
    for (i, &p) in samples.iter().enumerate() {
        for (j, z) in powers.iter().enumerate() {
            let v = z.eval(p);
            a[(2 * i, j)] = v.re.to_f64_lossy();
            a[(2 * i + 1, j)] = v.im.to_f64_lossy();
        }
        let t = target.value(p);
        b[2 * i] = t.re.to_f64_lossy();
        b[2 * i + 1] = t.im.to_f64_lossy();
    }
    if a.iter().chain(b.iter()).any(|v| !v.is_finite()) {
        return Err(Error::Fit("non-finite sample value".into()));
    }
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if !(smax > 0.0) || smin <= 1e-12 * smax {
        return Err(Error::Fit(format!("rank-deficient basis (condition {:e})", smax / smin)));
    }
    let x = svd.solve(&b, 1e-14 * smax).map_err(|e| Error::Fit(e.to_string()))?;
    let residual = (&a * &x - &b).norm();
    Ok(PolynomialFit { coefficients: x.iter().map(|v| lit(*v)).collect(), residual: lit(residual) })
}

/// Largest deviation of `F'/F` and `G'/G` from being real, relative to their size.
pub fn equivalence_defect<T: Scalar>(p: &GeneratingPair<T>, q: &GeneratingPair<T>, points: &[Point<T>]) -> T {
    let mut worst = T::zero();
    for &z in points {
        for (a, b) in [(q.f.value(z), p.f.value(z)), (q.g.value(z), p.g.value(z))] {
            let r = a / b;
            worst = worst.max(r.im.abs() / (T::one() + r.re.abs()));
        }
    }
    worst
}
