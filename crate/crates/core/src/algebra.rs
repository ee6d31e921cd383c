//! Elliptic complex and hyperbolic (split-complex) numbers under one representation.
//!
//! A [`Binumber`] is `re + im·u` where the unit satisfies `u² = σ`, with
//! `σ = −1` (the usual imaginary unit `i`) or `σ = +1` (the duplex unit `j`).
//! Every higher module is written once against this type and reads the
//! signature off its operands.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Square of the imaginary unit: `Elliptic` for `i² = −1`, `Hyperbolic` for `j² = +1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Signature {
    #[default]
    Elliptic,
    Hyperbolic,
}

impl Signature {
    /// Builds a signature from its integer value; only `−1` and `+1` are admitted.
    pub fn from_sigma(sigma: i32) -> Result<Self> {
        match sigma {
            -1 => Ok(Signature::Elliptic),
            1 => Ok(Signature::Hyperbolic),
            other => Err(Error::Config(format!("signature must be -1 or +1, got {other}"))),
        }
    }

    pub fn sigma_i32(self) -> i32 {
        match self {
            Signature::Elliptic => -1,
            Signature::Hyperbolic => 1,
        }
    }

    #[inline]
    pub fn sigma<T: Scalar>(self) -> T {
        match self {
            Signature::Elliptic => -T::one(),
            Signature::Hyperbolic => T::one(),
        }
    }

    pub fn unit_symbol(self) -> char {
        match self {
            Signature::Elliptic => 'i',
            Signature::Hyperbolic => 'j',
        }
    }
}

#[derive(Clone, Copy, PartialEq, Default)]
pub struct Binumber<T> {
    pub re: T,
    pub im: T,
    pub sig: Signature,
}

impl<T: Scalar> Binumber<T> {
    #[inline]
    pub fn new(re: T, im: T, sig: Signature) -> Self {
        Binumber { re, im, sig }
    }

    #[inline]
    pub fn elliptic(re: T, im: T) -> Self {
        Self::new(re, im, Signature::Elliptic)
    }

    #[inline]
    pub fn hyperbolic(re: T, im: T) -> Self {
        Self::new(re, im, Signature::Hyperbolic)
    }

    #[inline]
    pub fn real(re: T, sig: Signature) -> Self {
        Self::new(re, T::zero(), sig)
    }

    #[inline]
    pub fn zero(sig: Signature) -> Self {
        Self::new(T::zero(), T::zero(), sig)
    }

    #[inline]
    pub fn one(sig: Signature) -> Self {
        Self::new(T::one(), T::zero(), sig)
    }

    /// The imaginary unit `i` or `j`.
    #[inline]
    pub fn unit(sig: Signature) -> Self {
        Self::new(T::zero(), T::one(), sig)
    }

    #[inline]
    pub fn conj(self) -> Self {
        Self::new(self.re, -self.im, self.sig)
    }

    /// `w·conj(w) = re² − σ·im²`; may be negative in the hyperbolic case.
    #[inline]
    pub fn modulus_sq(self) -> T {
        self.re * self.re - self.sig.sigma::<T>() * self.im * self.im
    }

    /// Euclidean size of the component vector, used for residuals and tolerances.
    #[inline]
    pub fn norm(self) -> T {
        self.re.hypot(self.im)
    }

    /// `sqrt(|modulus_sq|)`.
    #[inline]
    pub fn modulus(self) -> T {
        self.modulus_sq().abs().sqrt()
    }

    #[inline]
    pub fn scale(self, k: T) -> Self {
        Self::new(self.re * k, self.im * k, self.sig)
    }

    pub fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    /// Relative null-cone test: `|modulus_sq| ≤ tol·(re² + im²)`.
    pub fn is_null_cone(self, tol: T) -> bool {
        let scale = self.re * self.re + self.im * self.im;
        self.modulus_sq().abs() <= tol * scale
    }

    pub fn inverse(self) -> Result<Self> {
        let m = self.modulus_sq();
        if m == T::zero() || !m.is_finite() {
            return Err(Error::NotInvertible { re: self.re.to_f64_lossy(), im: self.im.to_f64_lossy() });
        }
        Ok(self.conj().scale(m.recip()))
    }

    pub fn try_mul(self, other: Self) -> Result<Self> {
        if self.sig != other.sig {
            return Err(Error::SignatureMismatch(format!("{:?} * {:?}", self.sig, other.sig)));
        }
        Ok(self.mul_unchecked(other))
    }

    #[inline]
    fn mul_unchecked(self, b: Self) -> Self {
        let s = self.sig.sigma::<T>();
        Self::new(self.re * b.re + s * self.im * b.im, self.re * b.im + self.im * b.re, self.sig)
    }

    /// Integer power; negative exponents go through [`Binumber::inverse`].
    pub fn powi(self, n: i32) -> Result<Self> {
        let base = if n < 0 { self.inverse()? } else { self };
        let mut acc = Self::one(self.sig);
        for _ in 0..n.unsigned_abs() {
            acc *= base;
        }
        Ok(acc)
    }

    #[inline]
    fn check_sig(self, other: Self) {
        assert!(self.sig == other.sig, "binumber signature mismatch: {:?} vs {:?}", self.sig, other.sig);
    }
}

impl<T: fmt::Debug> fmt::Debug for Binumber<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?} {:+?}{})", self.re, self.im, self.sig.unit_symbol())
    }
}

impl<T: Scalar> fmt::Display for Binumber<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{:+}{}", self.re, self.im, self.sig.unit_symbol())
    }
}

impl<T: Scalar> Add for Binumber<T> {
    type Output = Self;
    #[inline]
    fn add(self, rhs: Self) -> Self {
        self.check_sig(rhs);
        Self::new(self.re + rhs.re, self.im + rhs.im, self.sig)
    }
}

impl<T: Scalar> Sub for Binumber<T> {
    type Output = Self;
    #[inline]
    fn sub(self, rhs: Self) -> Self {
        self.check_sig(rhs);
        Self::new(self.re - rhs.re, self.im - rhs.im, self.sig)
    }
}

impl<T: Scalar> Neg for Binumber<T> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self::new(-self.re, -self.im, self.sig)
    }
}

/// Panics on mixed signatures; use [`Binumber::try_mul`] for a checked product.
impl<T: Scalar> Mul for Binumber<T> {
    type Output = Self;
    #[inline]
    fn mul(self, rhs: Self) -> Self {
        self.check_sig(rhs);
        self.mul_unchecked(rhs)
    }
}

impl<T: Scalar> Mul<T> for Binumber<T> {
    type Output = Self;
    #[inline]
    fn mul(self, k: T) -> Self {
        self.scale(k)
    }
}

/// Unchecked quotient `a·conj(b)/|b|²`; null-cone divisors give non-finite components.
impl<T: Scalar> Div for Binumber<T> {
    type Output = Self;
    #[inline]
    fn div(self, rhs: Self) -> Self {
        self.check_sig(rhs);
        (self.mul_unchecked(rhs.conj())).scale(rhs.modulus_sq().recip())
    }
}

impl<T: Scalar> Div<T> for Binumber<T> {
    type Output = Self;
    #[inline]
    fn div(self, k: T) -> Self {
        Self::new(self.re / k, self.im / k, self.sig)
    }
}

impl<T: Scalar> AddAssign for Binumber<T> {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl<T: Scalar> SubAssign for Binumber<T> {
    fn sub_assign(&mut self, rhs: Self) {
        *self = *self - rhs;
    }
}

impl<T: Scalar> MulAssign for Binumber<T> {
    fn mul_assign(&mut self, rhs: Self) {
        *self = *self * rhs;
    }
}
