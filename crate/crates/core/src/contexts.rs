//! Named generators used by the examples, the CLI and the test suites.
//!
//! | name              | generator           | domain                 |
//! |-------------------|---------------------|------------------------|
//! | `f_y2`            | `y²`                | `0 < x, y < 20`        |
//! | `g_1xy3`          | `(1 + xy³)/y`       | `0 < x, y < 20`        |
//! | `g_xy`            | `xy`                | `0 < x, y < 20`        |
//! | `unit`            | `1`                 | `−20 < x, y < 20`      |
//! | `hyperbolic_unit` | `1` (split-complex) | `−20 < x, t < 20`      |
//!
//! `f_y2` and `g_1xy3` share `q = 2/y²`; `g_xy` and `unit` are harmonic.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::algebra::{Binumber, Signature};
use crate::bers::{GeneratingPair, GeneratingSequence};
use crate::error::{Error, Result};
use crate::fields::{make_context, BiField, BoundingBox, Domain, SchrodingerContext};
use crate::scalar::{lit, two, Scalar};

pub const QUADRANT_EXTENT: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Builtin {
    FY2,
    G1xy3,
    GXy,
    Unit,
    HyperbolicUnit,
}

impl Builtin {
    pub const ALL: [Builtin; 5] = [Builtin::FY2, Builtin::G1xy3, Builtin::GXy, Builtin::Unit, Builtin::HyperbolicUnit];

    pub fn name(self) -> &'static str {
        match self {
            Builtin::FY2 => "f_y2",
            Builtin::G1xy3 => "g_1xy3",
            Builtin::GXy => "g_xy",
            Builtin::Unit => "unit",
            Builtin::HyperbolicUnit => "hyperbolic_unit",
        }
    }

    pub fn sig(self) -> Signature {
        match self {
            Builtin::HyperbolicUnit => Signature::Hyperbolic,
            _ => Signature::Elliptic,
        }
    }

    pub fn domain<T: Scalar>(self) -> Domain<T> {
        let e = lit::<T>(QUADRANT_EXTENT);
        match self {
            Builtin::Unit | Builtin::HyperbolicUnit => Domain::rectangle(BoundingBox::new(-e, e, -e, e)),
            _ => Domain::quadrant(e),
        }
    }

    /// The generator on the builtin domain.
    pub fn generator<T: Scalar>(self) -> BiField<T> {
        self.generator_on(Arc::new(self.domain()))
    }

    pub fn generator_on<T: Scalar>(self, domain: Arc<Domain<T>>) -> BiField<T> {
        let sig = self.sig();
        match self {
            Builtin::FY2 => BiField::real_from_gradient(sig, domain, |p| (p.y * p.y, T::zero(), two::<T>() * p.y)),
            Builtin::G1xy3 => BiField::real_from_gradient(sig, domain, |p| {
                let (x, y) = (p.x, p.y);
                (y.recip() + x * y * y, y * y, two::<T>() * x * y - (y * y).recip())
            }),
            Builtin::GXy => BiField::real_from_gradient(sig, domain, |p| (p.x * p.y, p.y, p.x)),
            Builtin::Unit | Builtin::HyperbolicUnit => BiField::constant(sig, domain, Binumber::one(sig)),
        }
    }

    pub fn context<T: Scalar>(self) -> Result<SchrodingerContext<T>> {
        make_context(self.generator())
    }

    /// A generating sequence known in closed form: the period-1 sequence
    /// `(f, u/f)` for generators that depend on `y` only (or are constant).
    pub fn known_sequence<T: Scalar>(self) -> Option<GeneratingSequence<T>> {
        match self {
            Builtin::FY2 | Builtin::Unit | Builtin::HyperbolicUnit => {
                Some(GeneratingSequence::periodic(vec![GeneratingPair::from_generator(&self.generator())]))
            }
            Builtin::G1xy3 | Builtin::GXy => None,
        }
    }

    /// Builtin whose generator solves the same equation and has a known sequence.
    pub fn companion(self) -> Option<Builtin> {
        match self {
            Builtin::G1xy3 => Some(Builtin::FY2),
            Builtin::GXy => Some(Builtin::Unit),
            _ => None,
        }
    }
}

impl fmt::Display for Builtin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Builtin {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Builtin::ALL.into_iter().find(|b| b.name() == s).ok_or_else(|| Error::Config(format!("unknown context {s:?}")))
    }
}

/// Hyperbolic generators on `[−1, 1]²` used to exercise the split-complex
/// code paths: `cosh x` and `eˣ` share `q = 1`; `e^{x+t}` and `2 + xt` share `q = 0`.
pub mod hyperbolic {
    use super::*;

    pub fn domain<T: Scalar>() -> Arc<Domain<T>> {
        Arc::new(Domain::rectangle(BoundingBox::new(-T::one(), T::one(), -T::one(), T::one())))
    }

    pub fn cosh_x<T: Scalar>() -> BiField<T> {
        BiField::real_from_gradient(Signature::Hyperbolic, domain(), |p| (p.x.cosh(), p.x.sinh(), T::zero()))
    }

    pub fn exp_x<T: Scalar>() -> BiField<T> {
        BiField::real_from_gradient(Signature::Hyperbolic, domain(), |p| {
            let e = p.x.exp();
            (e, e, T::zero())
        })
    }

    pub fn exp_x_plus_t<T: Scalar>() -> BiField<T> {
        BiField::real_from_gradient(Signature::Hyperbolic, domain(), |p| {
            let e = (p.x + p.y).exp();
            (e, e, e)
        })
    }

    pub fn two_plus_xt<T: Scalar>() -> BiField<T> {
        BiField::real_from_gradient(Signature::Hyperbolic, domain(), |p| (two::<T>() + p.x * p.y, p.y, p.x))
    }

    pub fn unit<T: Scalar>() -> BiField<T> {
        BiField::constant(Signature::Hyperbolic, domain(), Binumber::one(Signature::Hyperbolic))
    }
}
