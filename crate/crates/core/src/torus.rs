//! Exact elements of the circle group as rational turns.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Div, Mul};

use nalgebra::{ComplexField, RealField};
use num_complex::Complex;
use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::Error;

/// The unimodular number `exp(2πi · numerator / modulus)`.
///
/// Always stored in lowest terms with `0 <= numerator < modulus`, so two
/// exponents are equal exactly when the complex numbers they denote are.
/// The identity is `0/1`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "(u64, u64)", try_from = "(i64, u64)")]
pub struct TorusExponent {
    numerator: u64,
    modulus: u64,
}

impl TorusExponent {
    pub const ONE: TorusExponent = TorusExponent {
        numerator: 0,
        modulus: 1,
    };

    /// `exp(2πi k / modulus)` for any integer `k`.
    pub fn new(k: i64, modulus: u64) -> Result<Self, Error> {
        if modulus == 0 {
            return Err(Error::Input("torus exponent modulus must be positive".into()));
        }
        let m = modulus as i128;
        let k = (k as i128).rem_euclid(m) as u64;
        Ok(Self::reduced(k, modulus))
    }

    /// Root of unity with non-negative numerator; panics on a zero modulus.
    pub fn root(k: u64, modulus: u64) -> Self {
        assert!(modulus > 0, "zero modulus");
        Self::reduced(k % modulus, modulus)
    }

    fn reduced(k: u64, modulus: u64) -> Self {
        if k == 0 {
            return Self::ONE;
        }
        let g = k.gcd(&modulus);
        TorusExponent {
            numerator: k / g,
            modulus: modulus / g,
        }
    }

    pub fn numerator(self) -> u64 {
        self.numerator
    }

    /// Order of the root of unity (denominator in lowest terms).
    pub fn modulus(self) -> u64 {
        self.modulus
    }

    pub fn is_one(self) -> bool {
        self.numerator == 0
    }

    /// Complex conjugate, which is also the group inverse.
    pub fn conj(self) -> Self {
        Self::reduced((self.modulus - self.numerator) % self.modulus, self.modulus)
    }

    pub fn pow(self, e: i64) -> Self {
        let m = self.modulus as i128;
        let k = ((self.numerator as i128) * (e as i128)).rem_euclid(m) as u64;
        Self::reduced(k, self.modulus)
    }

    /// Numerator when expressed over `modulus`, if `modulus` is a multiple of
    /// this exponent's order.
    pub fn numerator_over(self, modulus: u64) -> Option<u64> {
        if modulus.is_multiple_of(self.modulus) {
            Some(self.numerator * (modulus / self.modulus))
        } else {
            None
        }
    }

    /// The numeric value `cos θ + i sin θ`; quarter turns are returned exactly.
    pub fn to_complex<R: RealField + Copy>(self) -> Complex<R> {
        let (k, m) = (self.numerator, self.modulus);
        if k == 0 {
            return Complex::new(R::one(), R::zero());
        }
        if 4 % m == 0 {
            return match 4 / m * k {
                1 => Complex::new(R::zero(), R::one()),
                2 => Complex::new(-R::one(), R::zero()),
                _ => Complex::new(R::zero(), -R::one()),
            };
        }
        let theta = R::two_pi() * from_u64::<R>(k) / from_u64::<R>(m);
        Complex::new(theta.cos(), theta.sin())
    }

    /// Recovers an exact root of unity of order dividing `modulus` from a
    /// numeric value within `tol`.
    pub fn snap<R: RealField + Copy>(z: Complex<R>, modulus: u64, tol: R) -> Option<Self> {
        let turns = z.im.atan2(z.re) / R::two_pi();
        let scaled = turns * from_u64::<R>(modulus);
        let k = scaled.round();
        let k = num_traits::ToPrimitive::to_i64(&nalgebra::try_convert::<R, f64>(k)?)?;
        let candidate = Self::new(k, modulus).ok()?;
        let diff = candidate.to_complex::<R>() - z;
        if diff.modulus() <= tol {
            Some(candidate)
        } else {
            None
        }
    }

    fn cmp_value(&self, other: &Self) -> Ordering {
        let lhs = self.numerator as u128 * other.modulus as u128;
        let rhs = other.numerator as u128 * self.modulus as u128;
        lhs.cmp(&rhs)
    }
}

pub(crate) fn from_u64<R: RealField + Copy>(v: u64) -> R {
    nalgebra::convert::<f64, R>(v as f64)
}

impl Default for TorusExponent {
    fn default() -> Self {
        Self::ONE
    }
}

/// Ordered by the turn fraction in `[0, 1)`.
impl Ord for TorusExponent {
    fn cmp(&self, other: &Self) -> Ordering {
        self.cmp_value(other)
    }
}

impl PartialOrd for TorusExponent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Mul for TorusExponent {
    type Output = TorusExponent;

    fn mul(self, rhs: Self) -> Self {
        let l = self.modulus.lcm(&rhs.modulus);
        let k = self.numerator * (l / self.modulus) + rhs.numerator * (l / rhs.modulus);
        Self::reduced(k % l, l)
    }
}

impl Div for TorusExponent {
    type Output = TorusExponent;

    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Self) -> Self {
        self * rhs.conj()
    }
}

impl std::iter::Product for TorusExponent {
    fn product<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::ONE, |a, b| a * b)
    }
}

impl From<TorusExponent> for (u64, u64) {
    fn from(t: TorusExponent) -> Self {
        (t.numerator, t.modulus)
    }
}

impl TryFrom<(i64, u64)> for TorusExponent {
    type Error = Error;

    fn try_from((k, m): (i64, u64)) -> Result<Self, Error> {
        Self::new(k, m)
    }
}

impl fmt::Debug for TorusExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e({}/{})", self.numerator, self.modulus)
    }
}

/// `1`, `-1`, `i`, `-i`, otherwise `e(k/M)` meaning `exp(2πi k/M)`.
impl fmt::Display for TorusExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.numerator, self.modulus) {
            (0, _) => f.write_str("1"),
            (1, 2) => f.write_str("-1"),
            (1, 4) => f.write_str("i"),
            (3, 4) => f.write_str("-i"),
            (k, m) => write!(f, "e({k}/{m})"),
        }
    }
}
