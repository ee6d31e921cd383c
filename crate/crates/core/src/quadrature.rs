//! One-dimensional quadrature used for path integrals.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use crate::algebra::Binumber;
use crate::error::{Error, Result};
use crate::scalar::{half, lit, Scalar};

/// Anything that can be summed and scaled while integrating.
pub trait Quantity<T>: Copy + Send + Sync {
    fn plus(self, other: Self) -> Self;
    fn times(self, k: T) -> Self;
    fn magnitude(&self) -> T;
}

macro_rules! real_quantity {
    ($($t:ty),*) => {$(
        impl Quantity<$t> for $t {
            fn plus(self, other: Self) -> Self {
                self + other
            }
            fn times(self, k: $t) -> Self {
                self * k
            }
            fn magnitude(&self) -> $t {
                self.abs()
            }
        }
    )*};
}

real_quantity!(f32, f64);

impl<T: Scalar> Quantity<T> for Binumber<T> {
    fn plus(self, other: Self) -> Self {
        self + other
    }
    fn times(self, k: T) -> Self {
        self.scale(k)
    }
    fn magnitude(&self) -> T {
        self.norm()
    }
}

impl<T: Scalar, A: Quantity<T>, B: Quantity<T>> Quantity<T> for (A, B) {
    fn plus(self, other: Self) -> Self {
        (self.0.plus(other.0), self.1.plus(other.1))
    }
    fn times(self, k: T) -> Self {
        (self.0.times(k), self.1.times(k))
    }
    fn magnitude(&self) -> T {
        self.0.magnitude() + self.1.magnitude()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadratureRule {
    /// Gauss-Legendre with the given number of nodes per panel, refined adaptively.
    GaussLegendre(usize),
    /// Fixed composite trapezoid with the given number of panels; no refinement.
    CompositeTrapezoid(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureCfg<T> {
    pub rule: QuadratureRule,
    /// A panel is accepted once its error estimate is below `rel_tol · ∫|f|` over it.
    pub rel_tol: T,
    /// Maximum bisection depth per path segment.
    pub max_subdiv: u32,
    /// Absolute error accepted per unit length, so that integrands which are
    /// rounding noise around zero still converge.
    pub abs_tol: T,
}

impl<T: Scalar> Default for QuadratureCfg<T> {
    fn default() -> Self {
        QuadratureCfg {
            rule: QuadratureRule::GaussLegendre(8),
            rel_tol: lit(1e-10),
            max_subdiv: 20,
            abs_tol: lit(1e-15),
        }
    }
}

impl<T: Scalar> QuadratureCfg<T> {
    pub fn gauss(order: usize) -> Self {
        QuadratureCfg { rule: QuadratureRule::GaussLegendre(order), ..Self::default() }
    }

    pub fn with_rel_tol(mut self, rel_tol: T) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        match self.rule {
            QuadratureRule::GaussLegendre(n) if n == 0 || n > 256 => {
                Err(Error::Config(format!("Gauss-Legendre order {n} outside 1..=256")))
            }
            QuadratureRule::CompositeTrapezoid(0) => {
                Err(Error::Config("trapezoid rule needs at least one panel".into()))
            }
            _ if !(self.rel_tol > T::zero()) => Err(Error::Config("quadrature tolerance must be positive".into())),
            _ if !(self.abs_tol >= T::zero()) => Err(Error::Config("absolute tolerance must be non-negative".into())),
            _ => Ok(()),
        }
    }
}

type Rule = Arc<(Vec<f64>, Vec<f64>)>;

/// Gauss-Legendre nodes and weights on `[-1, 1]`, by Newton iteration on `P_n`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 1 { x } else { p1 };
            let pm1 = if n == 1 { 1.0 } else { p0 };
            dp = nf * (x * p - pm1) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn cached_rule(n: usize) -> Rule {
    static CACHE: OnceLock<RwLock<HashMap<usize, Rule>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(r) = cache.read().expect("quadrature cache poisoned").get(&n) {
        return r.clone();
    }
    let rule = Arc::new(gauss_legendre(n));
    cache.write().expect("quadrature cache poisoned").insert(n, rule.clone());
    rule
}

/// `∫_a^b f(t) dt` under `cfg`.
pub fn integrate<T, Q, F>(cfg: &QuadratureCfg<T>, f: &F, a: T, b: T) -> Result<Q>
where
    T: Scalar,
    Q: Quantity<T>,
    F: Fn(T) -> Q,
{
    integrate_with_scale(cfg, f, a, b, None)
}

/// Rough `∫_a^b |f|` from a single panel, used to share one tolerance between
/// several intervals.
pub fn magnitude_estimate<T, Q, F>(cfg: &QuadratureCfg<T>, f: &F, a: T, b: T) -> T
where
    T: Scalar,
    Q: Quantity<T>,
    F: Fn(T) -> Q,
{
    first_panel(cfg, f, a, b).1
}

/// As [`integrate`], with the error budget `rel_tol · scale` spread over
/// `[a, b]` in proportion to length. Without `scale` the interval's own
/// `∫|f|` is used.
pub fn integrate_with_scale<T, Q, F>(cfg: &QuadratureCfg<T>, f: &F, a: T, b: T, scale: Option<T>) -> Result<Q>
where
    T: Scalar,
    Q: Quantity<T>,
    F: Fn(T) -> Q,
{
    let first = first_panel(cfg, f, a, b);
    refine(cfg, f, a, b, first, scale)
}

/// Single-panel value and `∫|f|` estimate that [`refine`] starts from.
pub(crate) fn first_panel<T, Q, F>(cfg: &QuadratureCfg<T>, f: &F, a: T, b: T) -> (Q, T)
where
    T: Scalar,
    Q: Quantity<T>,
    F: Fn(T) -> Q,
{
    let n = match cfg.rule {
        QuadratureRule::GaussLegendre(n) => n.max(1),
        QuadratureRule::CompositeTrapezoid(_) => 8,
    };
    panel(&cached_rule(n), f, a, b)
}

pub(crate) fn refine<T, Q, F>(cfg: &QuadratureCfg<T>, f: &F, a: T, b: T, first: (Q, T), scale: Option<T>) -> Result<Q>
where
    T: Scalar,
    Q: Quantity<T>,
    F: Fn(T) -> Q,
{
    match cfg.rule {
        QuadratureRule::GaussLegendre(n) => {
            let rule = cached_rule(n.max(1));
            let (whole, abs) = first;
            let width = (b - a).abs();
            let density = if width > T::zero() { scale.unwrap_or(abs).max(abs) / width } else { T::zero() };
            adaptive(&rule, f, a, b, whole, abs, density, cfg, 0)
        }
        QuadratureRule::CompositeTrapezoid(panels) => {
            let panels = panels.max(1);
            let h = (b - a) / lit::<T>(panels as f64);
            let mut acc = f(a).times(half());
            for k in 1..panels {
                acc = acc.plus(f(a + h * lit::<T>(k as f64)));
            }
            Ok(acc.plus(f(b).times(half())).times(h))
        }
    }
}

fn panel<T: Scalar, Q: Quantity<T>, F: Fn(T) -> Q>(rule: &Rule, f: &F, a: T, b: T) -> (Q, T) {
    let (nodes, weights) = (&rule.0, &rule.1);
    let mid = half::<T>() * (a + b);
    let rad = half::<T>() * (b - a);
    let mut acc: Option<Q> = None;
    let mut abs = T::zero();
    for (x, w) in nodes.iter().zip(weights) {
        let v = f(mid + rad * lit::<T>(*x));
        let w = lit::<T>(*w);
        abs += v.magnitude() * w;
        let term = v.times(w);
        acc = Some(match acc {
            Some(s) => s.plus(term),
            None => term,
        });
    }
    let sum = acc.expect("quadrature rule has at least one node");
    (sum.times(rad), abs * rad.abs())
}

#[allow(clippy::too_many_arguments)]
fn adaptive<T: Scalar, Q: Quantity<T>, F: Fn(T) -> Q>(
    rule: &Rule,
    f: &F,
    a: T,
    b: T,
    whole: Q,
    abs: T,
    density: T,
    cfg: &QuadratureCfg<T>,
    depth: u32,
) -> Result<Q> {
    let m = half::<T>() * (a + b);
    let (left, labs) = panel(rule, f, a, m);
    let (right, rabs) = panel(rule, f, m, b);
    let refined = left.plus(right);
    let err = refined.plus(whole.times(-T::one())).magnitude();
    let scale = abs.max(labs + rabs).max(density * (b - a).abs());
    let tol = cfg.rel_tol * scale + cfg.abs_tol * (b - a).abs() + T::min_positive_value();
    if !err.is_finite() {
        return Err(Error::Quadrature(format!("non-finite integrand on [{}, {}]", a.to_f64_lossy(), b.to_f64_lossy())));
    }
    if err <= tol || err <= lit::<T>(64.0) * T::epsilon() * scale {
        return Ok(refined);
    }
    if depth >= cfg.max_subdiv {
        return Err(Error::Quadrature(format!(
            "error estimate {:e} above tolerance {:e} after {} bisections",
            err.to_f64_lossy(),
            tol.to_f64_lossy(),
            depth
        )));
    }
    let l = adaptive(rule, f, a, m, left, labs, density, cfg, depth + 1)?;
    let r = adaptive(rule, f, m, b, right, rabs, density, cfg, depth + 1)?;
    Ok(l.plus(r))
}
