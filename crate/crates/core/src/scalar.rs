//! Coefficient fields shared by the spin and group algebras.
//!
//! Two implementations: `Complex64` for numerics and [`QComplex`] (complex
//! rationals) for identities that must hold exactly.

use std::collections::BTreeMap;
use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

/// Exact complex rational.
pub type QComplex = Complex<BigRational>;

/// Relative threshold below which float coefficients are dropped.
pub const FLOAT_PRUNE: f64 = 1e-14;

pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Send
    + Sync
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + 'static
{
    /// True when arithmetic is exact and only literal zeros are pruned.
    const EXACT: bool;

    fn conj(&self) -> Self;
    fn from_i64(v: i64) -> Self;
    /// Exact for the rational field since every finite double is dyadic.
    fn from_c64(z: Complex64) -> Self;
    fn to_c64(&self) -> Complex64;

    fn from_f64(v: f64) -> Self {
        Self::from_c64(Complex64::new(v, 0.0))
    }

    /// Approximate modulus, used only for pruning and reporting.
    fn modulus(&self) -> f64 {
        self.to_c64().norm()
    }

    fn add_assign_ref(&mut self, rhs: &Self) {
        let lhs = std::mem::replace(self, Self::zero());
        *self = lhs + rhs.clone();
    }

    fn mul_ref(&self, rhs: &Self) -> Self {
        self.clone() * rhs.clone()
    }
}

impl Scalar for Complex64 {
    const EXACT: bool = false;

    fn conj(&self) -> Self {
        Complex64::conj(self)
    }
    fn from_i64(v: i64) -> Self {
        Complex64::new(v as f64, 0.0)
    }
    fn from_c64(z: Complex64) -> Self {
        z
    }
    fn to_c64(&self) -> Complex64 {
        *self
    }
    fn add_assign_ref(&mut self, rhs: &Self) {
        *self += rhs;
    }
    fn mul_ref(&self, rhs: &Self) -> Self {
        self * rhs
    }
}

fn rat_from_f64(v: f64) -> BigRational {
    assert!(v.is_finite(), "non-finite coefficient {v}");
    BigRational::from_float(v).expect("finite float")
}

fn rat_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // Fall back for huge numerators/denominators.
        let n = r.numer().to_f64().unwrap_or(f64::NAN);
        let d = r.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

impl Scalar for QComplex {
    const EXACT: bool = true;

    fn conj(&self) -> Self {
        Complex::new(self.re.clone(), -self.im.clone())
    }
    fn from_i64(v: i64) -> Self {
        Complex::new(BigRational::from_integer(BigInt::from(v)), BigRational::zero())
    }
    fn from_c64(z: Complex64) -> Self {
        Complex::new(rat_from_f64(z.re), rat_from_f64(z.im))
    }
    fn to_c64(&self) -> Complex64 {
        Complex64::new(rat_to_f64(&self.re), rat_to_f64(&self.im))
    }
    fn modulus(&self) -> f64 {
        if self.is_zero() {
            0.0
        } else {
            self.to_c64().norm()
        }
    }
}

/// Exact rational scalar `num/den`.
pub fn qc(num: i64, den: i64) -> QComplex {
    Complex::new(
        BigRational::new(BigInt::from(num), BigInt::from(den)),
        BigRational::zero(),
    )
}

/// True when the rational complex number is a real integer.
pub fn q_is_integer(z: &QComplex) -> bool {
    z.im.is_zero() && z.re.is_integer()
}

/// Real part as an exact integer, if it is one.
pub fn q_to_i64(z: &QComplex) -> Option<i64> {
    if q_is_integer(z) {
        z.re.to_integer().to_i64()
    } else {
        None
    }
}

/// Drops zeros (exact) or relatively negligible terms (float).
pub(crate) fn prune<K: Ord, S: Scalar>(terms: &mut BTreeMap<K, S>) {
    if S::EXACT {
        terms.retain(|_, c| !c.is_zero());
    } else {
        let max = terms.values().map(|c| c.modulus()).fold(0.0, f64::max);
        let floor = FLOAT_PRUNE * max;
        terms.retain(|_, c| {
            let m = c.modulus();
            m > 0.0 && m >= floor
        });
    }
}
