//! Scalar domains.
//!
//! All algebra in this crate is generic over a [`Ring`]: either binary64
//! reals ([`Real`]) or the integers modulo `m` ([`Modular`]). Modular values
//! are always stored as canonical representatives in `[0, m)`.

use std::fmt;

use crate::error::{Error, Result};

/// Runtime tag describing a scalar domain, used in serialization and reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScalarDomain {
    Real,
    Mod(u64),
}

impl fmt::Display for ScalarDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarDomain::Real => write!(f, "real"),
            ScalarDomain::Mod(m) => write!(f, "Z_{m}"),
        }
    }
}

/// A commutative ring with identity acting as the scalar type of matrices.
///
/// The ring value itself is a small context (the modulus for [`Modular`]);
/// elements are plain `Copy` values interpreted through it.
pub trait Ring: Copy + PartialEq + fmt::Debug + Send + Sync + 'static {
    type Elem: Copy + PartialEq + fmt::Debug + Send + Sync + 'static;

    fn domain(&self) -> ScalarDomain;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem;
    fn sub(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem;
    fn neg(&self, a: Self::Elem) -> Self::Elem;
    fn mul(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem;
    fn from_i64(&self, v: i64) -> Self::Elem;

    /// Converts a real coefficient into the ring when this is exact.
    fn from_f64_exact(&self, v: f64) -> Option<Self::Elem>;

    /// Checks an externally supplied element and returns its canonical form.
    fn admit(&self, v: Self::Elem) -> Result<Self::Elem>;

    fn to_f64(&self, v: Self::Elem) -> f64;

    /// Text form used in CSV and reports: shortest round-trip decimal for
    /// reals, the plain representative for residues.
    fn format_elem(&self, v: Self::Elem) -> String;

    /// Frobenius norm of a slice of entries, when the domain has one.
    fn norm(&self, data: &[Self::Elem]) -> Option<f64>;

    fn is_zero(&self, v: Self::Elem) -> bool {
        v == self.zero()
    }

    /// Whether arithmetic is exact (comparisons may use equality).
    fn is_exact(&self) -> bool;

    fn check_same(&self, other: &Self, op: &'static str) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::DomainMismatch {
                op,
                left: self.domain().to_string(),
                right: other.domain().to_string(),
            })
        }
    }
}

/// Binary64 real arithmetic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Real;

impl Ring for Real {
    type Elem = f64;

    fn domain(&self) -> ScalarDomain {
        ScalarDomain::Real
    }
    #[inline]
    fn zero(&self) -> f64 {
        0.0
    }
    #[inline]
    fn one(&self) -> f64 {
        1.0
    }
    #[inline]
    fn add(&self, a: f64, b: f64) -> f64 {
        a + b
    }
    #[inline]
    fn sub(&self, a: f64, b: f64) -> f64 {
        a - b
    }
    #[inline]
    fn neg(&self, a: f64) -> f64 {
        -a
    }
    #[inline]
    fn mul(&self, a: f64, b: f64) -> f64 {
        a * b
    }
    fn from_i64(&self, v: i64) -> f64 {
        v as f64
    }
    fn from_f64_exact(&self, v: f64) -> Option<f64> {
        v.is_finite().then_some(v)
    }
    fn admit(&self, v: f64) -> Result<f64> {
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::InvalidValue(format!("non-finite real entry {v}")))
        }
    }
    fn to_f64(&self, v: f64) -> f64 {
        v
    }
    fn format_elem(&self, v: f64) -> String {
        format!("{v}")
    }
    fn norm(&self, data: &[f64]) -> Option<f64> {
        Some(data.iter().map(|x| x * x).sum::<f64>().sqrt())
    }
    fn is_exact(&self) -> bool {
        false
    }
}

/// Integers modulo `m`, `m >= 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Modular {
    modulus: u64,
}

impl Modular {
    pub fn new(modulus: u64) -> Result<Self> {
        if modulus < 2 {
            return Err(Error::InvalidValue(format!(
                "modulus must be >= 2, got {modulus}"
            )));
        }
        Ok(Modular { modulus })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Canonical representative of an arbitrary signed integer.
    pub fn reduce(&self, v: i128) -> u64 {
        v.rem_euclid(self.modulus as i128) as u64
    }
}

impl Ring for Modular {
    type Elem = u64;

    fn domain(&self) -> ScalarDomain {
        ScalarDomain::Mod(self.modulus)
    }
    #[inline]
    fn zero(&self) -> u64 {
        0
    }
    #[inline]
    fn one(&self) -> u64 {
        1
    }
    #[inline]
    fn add(&self, a: u64, b: u64) -> u64 {
        ((a as u128 + b as u128) % self.modulus as u128) as u64
    }
    #[inline]
    fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            self.modulus - (b - a)
        }
    }
    #[inline]
    fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.modulus - a
        }
    }
    #[inline]
    fn mul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.modulus as u128) as u64
    }
    fn from_i64(&self, v: i64) -> u64 {
        self.reduce(v as i128)
    }
    fn from_f64_exact(&self, v: f64) -> Option<u64> {
        if v.is_finite() && v.fract() == 0.0 && v.abs() < 9.0e15 {
            Some(self.reduce(v as i128))
        } else {
            None
        }
    }
    fn admit(&self, v: u64) -> Result<u64> {
        Ok(v % self.modulus)
    }
    fn to_f64(&self, v: u64) -> f64 {
        v as f64
    }
    fn format_elem(&self, v: u64) -> String {
        v.to_string()
    }
    fn norm(&self, _data: &[u64]) -> Option<f64> {
        None
    }
    fn is_exact(&self) -> bool {
        true
    }
}
