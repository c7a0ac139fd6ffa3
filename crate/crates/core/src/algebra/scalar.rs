//! Exact scalars: residues modulo a small prime, or reduced big rationals.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest prime accepted for a field domain. Residue products must fit in `u64`.
pub const MAX_FIELD_PRIME: u32 = 65_521;

/// The set a scalar lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Domain {
    Prime(u32),
    Rational,
}

impl Domain {
    /// A prime-field domain, validating primality.
    pub fn prime(p: u32) -> Result<Self> {
        if !is_prime(p as u64) || p > MAX_FIELD_PRIME {
            return Err(Error::NotPrime(p as u64));
        }
        Ok(Domain::Prime(p))
    }

    pub fn modulus(self) -> Option<u32> {
        match self {
            Domain::Prime(p) => Some(p),
            Domain::Rational => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Domain::Prime(_))
    }

    pub fn zero(self) -> Scalar {
        match self {
            Domain::Prime(p) => Scalar::Fp { p, value: 0 },
            Domain::Rational => Scalar::Q(BigRational::zero()),
        }
    }

    pub fn one(self) -> Scalar {
        match self {
            Domain::Prime(p) => Scalar::Fp { p, value: 1 },
            Domain::Rational => Scalar::Q(BigRational::one()),
        }
    }

    /// All field elements in ascending residue order.
    pub fn elements(self) -> Result<Vec<Scalar>> {
        match self {
            Domain::Prime(p) => Ok((0..p).map(|value| Scalar::Fp { p, value }).collect()),
            Domain::Rational => Err(Error::ClosureRequiresFiniteDomain),
        }
    }

    /// Parse a scalar literal (`7`, `-3`, `1/2`) into this domain.
    pub fn parse_scalar(self, text: &str) -> Result<Scalar> {
        let text = text.trim();
        match self {
            Domain::Prime(p) => {
                let n: i64 = text
                    .parse()
                    .map_err(|_| Error::parse(format!("bad residue literal `{text}`")))?;
                Ok(Scalar::fp(n, p))
            }
            Domain::Rational => {
                let (num, den) = match text.split_once('/') {
                    Some((n, d)) => (n, d),
                    None => (text, "1"),
                };
                let num: BigInt = num
                    .trim()
                    .parse()
                    .map_err(|_| Error::parse(format!("bad numerator in `{text}`")))?;
                let den: BigInt = den
                    .trim()
                    .parse()
                    .map_err(|_| Error::parse(format!("bad denominator in `{text}`")))?;
                Scalar::rational(num, den)
            }
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Domain::Prime(p) => write!(f, "F{p}"),
            Domain::Rational => f.write_str("Q"),
        }
    }
}

impl FromStr for Domain {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "Q" {
            return Ok(Domain::Rational);
        }
        let digits = s
            .strip_prefix('F')
            .or_else(|| s.strip_prefix("Fp"))
            .ok_or_else(|| Error::parse(format!("unknown domain `{s}`")))?;
        let p: u32 = digits
            .parse()
            .map_err(|_| Error::parse(format!("unknown domain `{s}`")))?;
        Domain::prime(p)
    }
}

/// Trial division; the primes used here are tiny.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// An exact scalar. Ordering is by domain, then residue (or rational value),
/// which gives the canonical lexicographic order used for group elements.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scalar {
    Fp { p: u32, value: u32 },
    Q(BigRational),
}

impl Scalar {
    /// Residue of `n` modulo `p`. `p` must already be known prime.
    pub fn fp(n: i64, p: u32) -> Self {
        Scalar::Fp {
            p,
            value: n.rem_euclid(p as i64) as u32,
        }
    }

    pub fn rational(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Result<Self> {
        let den = den.into();
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        // BigRational::new reduces and normalizes the denominator to be positive.
        Ok(Scalar::Q(BigRational::new(num.into(), den)))
    }

    pub fn domain(&self) -> Domain {
        match self {
            Scalar::Fp { p, .. } => Domain::Prime(*p),
            Scalar::Q(_) => Domain::Rational,
        }
    }

    /// The residue, for prime-field scalars.
    pub fn residue(&self) -> Option<u32> {
        match self {
            Scalar::Fp { value, .. } => Some(*value),
            Scalar::Q(_) => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Fp { value, .. } => *value == 0,
            Scalar::Q(q) => q.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Fp { value, .. } => *value == 1,
            Scalar::Q(q) => q.is_one(),
        }
    }

    fn same_domain(&self, other: &Scalar) -> Result<()> {
        if self.domain() == other.domain() {
            Ok(())
        } else {
            Err(Error::DomainMismatch(self.domain(), other.domain()))
        }
    }

    pub fn add(&self, other: &Scalar) -> Result<Scalar> {
        self.same_domain(other)?;
        Ok(match (self, other) {
            (Scalar::Fp { p, value: a }, Scalar::Fp { value: b, .. }) => Scalar::Fp {
                p: *p,
                value: ((*a as u64 + *b as u64) % *p as u64) as u32,
            },
            (Scalar::Q(a), Scalar::Q(b)) => Scalar::Q(a + b),
            _ => unreachable!(),
        })
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Fp { p, value } => Scalar::Fp {
                p: *p,
                value: (*p - *value) % *p,
            },
            Scalar::Q(a) => Scalar::Q(-a),
        }
    }

    pub fn sub(&self, other: &Scalar) -> Result<Scalar> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Scalar) -> Result<Scalar> {
        self.same_domain(other)?;
        Ok(match (self, other) {
            (Scalar::Fp { p, value: a }, Scalar::Fp { value: b, .. }) => Scalar::Fp {
                p: *p,
                value: ((*a as u64 * *b as u64) % *p as u64) as u32,
            },
            (Scalar::Q(a), Scalar::Q(b)) => Scalar::Q(a * b),
            _ => unreachable!(),
        })
    }

    pub fn inv(&self) -> Result<Scalar> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(match self {
            Scalar::Fp { p, value } => Scalar::Fp {
                p: *p,
                value: pow_mod(*value as u64, *p as u64 - 2, *p as u64) as u32,
            },
            Scalar::Q(a) => Scalar::Q(a.recip()),
        })
    }

    pub fn div(&self, other: &Scalar) -> Result<Scalar> {
        self.same_domain(other)?;
        self.mul(&other.inv()?)
    }

    /// Numerator and denominator bounds, for rational samplers.
    pub fn rational_parts(&self) -> Option<(&BigInt, &BigInt)> {
        match self {
            Scalar::Q(q) => Some((q.numer(), q.denom())),
            Scalar::Fp { .. } => None,
        }
    }

    pub fn is_negative(&self) -> bool {
        matches!(self, Scalar::Q(q) if q.is_negative())
    }
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % m;
        }
        base = base * base % m;
        exp >>= 1;
    }
    acc
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Fp { value, .. } => write!(f, "{value}"),
            Scalar::Q(q) => write!(f, "{q}"),
        }
    }
}

/// JSON form: prime-field residues are integers, rationals are `"n/d"` strings.
impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Scalar::Fp { value, .. } => serializer.serialize_u32(*value),
            Scalar::Q(q) => serializer.collect_str(q),
        }
    }
}

/// A scalar as read from JSON, before its domain is known.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RawScalar {
    Int(i64),
    Text(String),
}

impl RawScalar {
    pub fn resolve(&self, domain: Domain) -> Result<Scalar> {
        match (self, domain) {
            (RawScalar::Int(n), Domain::Prime(p)) => Ok(Scalar::fp(*n, p)),
            (RawScalar::Int(n), Domain::Rational) => Scalar::rational(*n, 1),
            (RawScalar::Text(t), d) => d.parse_scalar(t),
        }
    }
}

impl<'de> Deserialize<'de> for Domain {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = RawScalar::deserialize(deserializer)?;
        let parsed = match raw {
            RawScalar::Int(p) => u32::try_from(p)
                .map_err(|_| Error::NotPrime(p.unsigned_abs()))
                .and_then(Domain::prime),
            RawScalar::Text(t) => t.parse(),
        };
        parsed.map_err(serde::de::Error::custom)
    }
}

/// `"p": int | "Q"` in the interchange formats.
impl Serialize for Domain {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Domain::Prime(p) => serializer.serialize_u32(*p),
            Domain::Rational => serializer.serialize_str("Q"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn residues_reduce() {
        assert_eq!(Scalar::fp(-1, 5), Scalar::fp(4, 5));
        assert_eq!(Scalar::fp(12, 5).residue(), Some(2));
    }

    #[test]
    fn field_inverse_is_exact() {
        for p in [2u32, 3, 5, 7, 11] {
            for a in 1..p {
                let x = Scalar::fp(a as i64, p);
                assert!(x.mul(&x.inv().unwrap()).unwrap().is_one());
            }
        }
    }

    #[test]
    fn rationals_stay_reduced() {
        let a = Scalar::rational(6, -4).unwrap();
        let (n, d) = a.rational_parts().unwrap();
        assert_eq!((n.to_string(), d.to_string()), ("-3".into(), "2".into()));
        let b = a.mul(&Scalar::rational(2, 3).unwrap()).unwrap();
        assert_eq!(b.to_string(), "-1");
        assert!(Scalar::rational(1, 0).is_err());
    }

    #[test]
    fn rationals_do_not_overflow() {
        let mut x = Scalar::rational(i64::MAX, 1).unwrap();
        for _ in 0..4 {
            x = x.mul(&x).unwrap();
        }
        let (n, _) = x.rational_parts().unwrap();
        assert!(n.bits() > 1000);
    }

    #[test]
    fn mismatched_domains_are_rejected() {
        let a = Scalar::fp(1, 5);
        let b = Scalar::fp(1, 7);
        assert!(matches!(a.add(&b), Err(Error::DomainMismatch(..))));
        assert!(a.mul(&Domain::Rational.one()).is_err());
    }

    #[test]
    fn domain_literals() {
        assert_eq!("F5".parse::<Domain>().unwrap(), Domain::Prime(5));
        assert_eq!("Q".parse::<Domain>().unwrap(), Domain::Rational);
        assert!("F6".parse::<Domain>().is_err());
        assert_eq!(Domain::Rational.parse_scalar("4/-6").unwrap().to_string(), "-2/3");
        assert_eq!(Domain::Prime(7).parse_scalar("-1").unwrap().to_string(), "6");
    }

    #[test]
    fn primality() {
        let primes: Vec<u64> = (0..30).filter(|&n| is_prime(n)).collect();
        assert_eq!(primes, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
    }
}
