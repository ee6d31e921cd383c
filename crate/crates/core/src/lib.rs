//! Numerical pseudoanalytic function theory.
//!
//! Main Vekua equations `W_z̄ = (f_z̄/f) W̄` over the complex or the
//! split-complex numbers, their formal powers built by Bers' recursion, the
//! transplant operator between equations whose generators solve the same
//! Schrödinger equation, generating sequences and Cauchy kernels.
//!
//! Everything is generic over a real [`Scalar`]; the `*64` aliases fix `f64`.
//!
//! ```
//! use pseudoanalytic::contexts::Builtin;
//! use pseudoanalytic::bers::{formal_power, IntegrationCfg};
//! use pseudoanalytic::{Binumber64, Point};
//!
//! let seq = Builtin::FY2.known_sequence::<f64>().unwrap();
//! let z0 = Point::new(1.0, 2.0);
//! let z = formal_power(&seq, 1, Binumber64::elliptic(1.0, 0.0), z0, 0, &IntegrationCfg::default()).unwrap();
//! let v = z.eval(Point::new(2.0, 2.0));
//! assert!((v.re - 1.0).abs() < 1e-10 && v.im.abs() < 1e-10);
//! ```

pub mod algebra;
pub mod antigradient;
pub mod bers;
pub mod contexts;
pub mod error;
pub mod fields;
pub mod oracles;
pub mod quadrature;
pub mod scalar;
pub mod transplant;
pub mod vekua;

pub use algebra::{Binumber, Signature};
pub use error::{Error, Result};
pub use fields::{BiField, Domain, Jet, Point};
pub use scalar::Scalar;

pub type Binumber64 = Binumber<f64>;
pub type BiField64 = BiField<f64>;
pub type Point64 = Point<f64>;
pub type Domain64 = Domain<f64>;
pub type Jet64 = Jet<f64>;
pub type SchrodingerContext64 = fields::SchrodingerContext<f64>;
pub type GeneratingPair64 = bers::GeneratingPair<f64>;
pub type GeneratingSequence64 = bers::GeneratingSequence<f64>;
pub type FormalPower64 = bers::FormalPower<f64>;
pub type TransplantConfig64 = transplant::TransplantConfig<f64>;
