//! Exact coefficients: rationals (with an `i64` fast path) and prime fields.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The coefficient field a value lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Domain {
    Rational,
    Prime(u64),
}

impl Domain {
    pub fn prime(p: u64) -> Result<Domain> {
        if p < 2 || p >= (1 << 62) || !is_prime(p) {
            return Err(Error::InvalidArgument(format!("{p} is not a supported prime modulus")));
        }
        Ok(Domain::Prime(p))
    }

    pub fn characteristic(self) -> u64 {
        match self {
            Domain::Rational => 0,
            Domain::Prime(p) => p,
        }
    }

    pub fn check_same(self, other: Domain) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::DomainMismatch {
                left: self,
                right: other,
            })
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Domain::Rational => write!(f, "Q"),
            Domain::Prime(p) => write!(f, "F_{p}"),
        }
    }
}

pub fn is_prime(n: u64) -> bool {
    crate::linalg::is_prime_u64(n)
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
enum Repr {
    // Invariant: integers that fit in i64 are always stored as Small.
    Small(i64),
    Big(BigRational),
    Mod { value: u64, modulus: u64 },
}

/// An exact field element.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Scalar(Repr);

impl Scalar {
    pub fn zero(domain: Domain) -> Scalar {
        Scalar::from_i64(0, domain)
    }

    pub fn one(domain: Domain) -> Scalar {
        Scalar::from_i64(1, domain)
    }

    pub fn from_i64(v: i64, domain: Domain) -> Scalar {
        match domain {
            Domain::Rational => Scalar(Repr::Small(v)),
            Domain::Prime(p) => Scalar(Repr::Mod {
                value: v.rem_euclid(p as i64) as u64,
                modulus: p,
            }),
        }
    }

    pub fn from_bigint(v: BigInt, domain: Domain) -> Scalar {
        match domain {
            Domain::Rational => Scalar::from_rational(BigRational::from_integer(v)),
            Domain::Prime(p) => {
                let m = BigInt::from(p);
                let r = v.mod_floor(&m);
                Scalar(Repr::Mod {
                    value: r.to_u64().expect("reduced residue fits u64"),
                    modulus: p,
                })
            }
        }
    }

    pub fn from_rational(r: BigRational) -> Scalar {
        if r.is_integer() {
            if let Some(v) = r.numer().to_i64() {
                return Scalar(Repr::Small(v));
            }
        }
        Scalar(Repr::Big(r))
    }

    /// Maps a rational into `domain`; fails when the denominator vanishes mod p.
    pub fn from_rational_in(r: &BigRational, domain: Domain) -> Result<Scalar> {
        match domain {
            Domain::Rational => Ok(Scalar::from_rational(r.clone())),
            Domain::Prime(_) => {
                let n = Scalar::from_bigint(r.numer().clone(), domain);
                let d = Scalar::from_bigint(r.denom().clone(), domain);
                let inv = d.inv().ok_or_else(|| {
                    Error::InvalidArgument(format!("denominator of {r} vanishes in {domain}"))
                })?;
                Ok(&n * &inv)
            }
        }
    }

    pub fn domain(&self) -> Domain {
        match &self.0 {
            Repr::Small(_) | Repr::Big(_) => Domain::Rational,
            Repr::Mod { modulus, .. } => Domain::Prime(*modulus),
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.0 {
            Repr::Small(v) => *v == 0,
            Repr::Big(r) => r.is_zero(),
            Repr::Mod { value, .. } => *value == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match &self.0 {
            Repr::Small(v) => *v == 1,
            Repr::Big(r) => r.is_one(),
            Repr::Mod { value, .. } => *value == 1,
        }
    }

    /// The value as a rational number; prime-field values map to their
    /// least non-negative representative.
    pub fn to_rational(&self) -> BigRational {
        match &self.0 {
            Repr::Small(v) => BigRational::from_integer(BigInt::from(*v)),
            Repr::Big(r) => r.clone(),
            Repr::Mod { value, .. } => BigRational::from_integer(BigInt::from(*value)),
        }
    }

    pub fn as_i64(&self) -> Option<i64> {
        match &self.0 {
            Repr::Small(v) => Some(*v),
            Repr::Big(_) => None,
            Repr::Mod { value, .. } => i64::try_from(*value).ok(),
        }
    }

    /// Residue modulo `p` of a rational value, if the denominator is a unit.
    pub fn residue_mod(&self, p: u64) -> Option<u64> {
        match &self.0 {
            Repr::Small(v) => Some(v.rem_euclid(p as i64) as u64),
            Repr::Big(r) => {
                let m = BigInt::from(p);
                let n = r.numer().mod_floor(&m).to_u64()?;
                let d = r.denom().mod_floor(&m).to_u64()?;
                let dinv = crate::linalg::modinv(d, p)?;
                Some(crate::linalg::mulmod(n, dinv, p))
            }
            Repr::Mod { value, modulus } => (*modulus == p).then_some(*value),
        }
    }

    pub fn inv(&self) -> Option<Scalar> {
        if self.is_zero() {
            return None;
        }
        Some(match &self.0 {
            Repr::Small(_) | Repr::Big(_) => Scalar::from_rational(self.to_rational().recip()),
            Repr::Mod { value, modulus } => Scalar(Repr::Mod {
                value: crate::linalg::modinv(*value, *modulus)?,
                modulus: *modulus,
            }),
        })
    }

    pub fn pow(&self, mut e: u32) -> Scalar {
        let mut base = self.clone();
        let mut acc = Scalar::one(self.domain());
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    pub fn try_add(&self, other: &Scalar) -> Result<Scalar> {
        self.domain().check_same(other.domain())?;
        Ok(self + other)
    }

    pub fn try_mul(&self, other: &Scalar) -> Result<Scalar> {
        self.domain().check_same(other.domain())?;
        Ok(self * other)
    }

    /// Parses `-3`, `7/2` (or a residue for prime domains).
    pub fn parse(s: &str, domain: Domain) -> Result<Scalar> {
        let s = s.trim();
        let bad = || Error::Parse {
            offset: 0,
            message: format!("bad coefficient `{s}`"),
        };
        let r = if let Some((n, d)) = s.split_once('/') {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            BigRational::new(n, d)
        } else {
            BigRational::from_integer(s.parse::<BigInt>().map_err(|_| bad())?)
        };
        Scalar::from_rational_in(&r, domain)
    }

    fn binop(
        &self,
        other: &Scalar,
        small: fn(i64, i64) -> Option<i64>,
        big: fn(&BigRational, &BigRational) -> BigRational,
        modular: fn(u64, u64, u64) -> u64,
    ) -> Scalar {
        match (&self.0, &other.0) {
            (Repr::Small(a), Repr::Small(b)) => match small(*a, *b) {
                Some(v) => Scalar(Repr::Small(v)),
                None => Scalar::from_rational(big(&self.to_rational(), &other.to_rational())),
            },
            (
                Repr::Mod { value: a, modulus: p },
                Repr::Mod {
                    value: b,
                    modulus: q,
                },
            ) => {
                assert_eq!(p, q, "scalar domain mismatch: F_{p} vs F_{q}");
                Scalar(Repr::Mod {
                    value: modular(*a, *b, *p),
                    modulus: *p,
                })
            }
            (Repr::Mod { .. }, _) | (_, Repr::Mod { .. }) => {
                panic!("scalar domain mismatch: {} vs {}", self.domain(), other.domain())
            }
            _ => Scalar::from_rational(big(&self.to_rational(), &other.to_rational())),
        }
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        self.binop(
            rhs,
            i64::checked_add,
            |a, b| a + b,
            |a, b, p| ((a as u128 + b as u128) % p as u128) as u64,
        )
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self.binop(
            rhs,
            i64::checked_sub,
            |a, b| a - b,
            |a, b, p| ((a as u128 + p as u128 - b as u128) % p as u128) as u64,
        )
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        self.binop(rhs, i64::checked_mul, |a, b| a * b, crate::linalg::mulmod)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match &self.0 {
            Repr::Small(v) => match v.checked_neg() {
                Some(n) => Scalar(Repr::Small(n)),
                None => Scalar::from_rational(-self.to_rational()),
            },
            Repr::Big(r) => Scalar::from_rational(-r),
            Repr::Mod { value, modulus } => Scalar(Repr::Mod {
                value: (modulus - value) % modulus,
                modulus: *modulus,
            }),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Small(v) => write!(f, "{v}"),
            Repr::Big(r) => {
                if r.is_integer() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            Repr::Mod { value, .. } => write!(f, "{value}"),
        }
    }
}

impl Serialize for Scalar {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Total order used only for canonical tie-breaking, not field structure.
impl Ord for Scalar {
    fn cmp(&self, other: &Self) -> Ordering {
        match (&self.0, &other.0) {
            (Repr::Small(a), Repr::Small(b)) => a.cmp(b),
            (Repr::Mod { value: a, modulus: p }, Repr::Mod { value: b, modulus: q }) => {
                (p, a).cmp(&(q, b))
            }
            (Repr::Mod { .. }, _) => Ordering::Greater,
            (_, Repr::Mod { .. }) => Ordering::Less,
            _ => self.to_rational().cmp(&other.to_rational()),
        }
    }
}

/// Sign of a rational scalar (prime-field values are treated as non-negative).
pub fn sign(s: &Scalar) -> i32 {
    let r = s.to_rational();
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_overflow_promotes() {
        let a = Scalar::from_i64(i64::MAX, Domain::Rational);
        let b = &a + &a;
        assert_eq!(b.to_string(), "18446744073709551614");
        let c = &b - &a;
        assert_eq!(c, a);
        assert!(matches!(c.0, Repr::Small(_)));
    }

    #[test]
    fn rational_parse_and_print() {
        let q = Scalar::parse("-6/4", Domain::Rational).unwrap();
        assert_eq!(q.to_string(), "-3/2");
        let two = Scalar::from_i64(2, Domain::Rational);
        assert_eq!((&q * &two).to_string(), "-3");
    }

    #[test]
    fn prime_field_arithmetic() {
        let d = Domain::prime(7).unwrap();
        let a = Scalar::from_i64(3, d);
        let inv = a.inv().unwrap();
        assert!((&a * &inv).is_one());
        assert_eq!(Scalar::parse("1/2", d).unwrap().to_string(), "4");
        assert!(Scalar::parse("1/7", d).is_err());
        assert_eq!((-&a).to_string(), "4");
    }

    #[test]
    fn mixed_domains_are_rejected() {
        let a = Scalar::one(Domain::Rational);
        let b = Scalar::one(Domain::prime(5).unwrap());
        assert!(matches!(a.try_add(&b), Err(Error::DomainMismatch { .. })));
        assert!(Domain::prime(9).is_err());
    }
}
