//! Exact scalars over the two supported ground fields: the rationals and
//! prime fields F_p with p < 2^31.
//!
//! Scalars are self-contained values; binary operations panic on a field
//! mismatch, which is an internal invariant violation rather than a user
//! error. No floating point appears anywhere.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{Error, Result};

/// The ground field: `Q` or `F_p` for a prime `p < 2^31`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FieldSpec {
    #[serde(rename = "Q")]
    Rationals,
    #[serde(rename = "Fp")]
    PrimeField(u32),
}

impl FieldSpec {
    pub fn prime_field(p: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::Validation(format!("{p} is not prime")));
        }
        Ok(FieldSpec::PrimeField(p))
    }

    pub fn zero(&self) -> Scalar {
        match self {
            FieldSpec::Rationals => Scalar::Q(BigRational::zero()),
            FieldSpec::PrimeField(p) => Scalar::Fp { v: 0, p: *p },
        }
    }

    pub fn one(&self) -> Scalar {
        match self {
            FieldSpec::Rationals => Scalar::Q(BigRational::one()),
            FieldSpec::PrimeField(p) => Scalar::Fp { v: 1, p: *p },
        }
    }

    pub fn from_i64(&self, n: i64) -> Scalar {
        match self {
            FieldSpec::Rationals => Scalar::Q(BigRational::from_integer(BigInt::from(n))),
            FieldSpec::PrimeField(p) => {
                let p64 = *p as i64;
                let v = n.rem_euclid(p64) as u64;
                Scalar::Fp { v, p: *p }
            }
        }
    }

    /// Parse a scalar from the textual forms used in algebra files:
    /// an integer, or `a/b` over the rationals.
    pub fn parse_scalar(&self, s: &str) -> Result<Scalar> {
        match self {
            FieldSpec::Rationals => {
                let r: BigRational = s
                    .parse::<BigRational>()
                    .map_err(|e| Error::Parse(format!("bad rational {s:?}: {e}")))?;
                Ok(Scalar::Q(r))
            }
            FieldSpec::PrimeField(_) => {
                let n: i64 = s
                    .parse()
                    .map_err(|e| Error::Parse(format!("bad integer {s:?}: {e}")))?;
                Ok(self.from_i64(n))
            }
        }
    }

    pub fn name(&self) -> String {
        match self {
            FieldSpec::Rationals => "Q".into(),
            FieldSpec::PrimeField(p) => format!("F{p}"),
        }
    }

    pub fn characteristic(&self) -> u32 {
        match self {
            FieldSpec::Rationals => 0,
            FieldSpec::PrimeField(p) => *p,
        }
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    if p % 2 == 0 {
        return p == 2;
    }
    let mut d = 3u64;
    let p64 = p as u64;
    while d * d <= p64 {
        if p64 % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// An exact scalar of one of the two fields.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Scalar {
    Q(BigRational),
    Fp { v: u64, p: u32 },
}

impl Scalar {
    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Q(r) => r.is_zero(),
            Scalar::Fp { v, .. } => *v == 0,
        }
    }

    pub fn field(&self) -> FieldSpec {
        match self {
            Scalar::Q(_) => FieldSpec::Rationals,
            Scalar::Fp { p, .. } => FieldSpec::PrimeField(*p),
        }
    }

    pub fn add(&self, other: &Scalar) -> Scalar {
        match (self, other) {
            (Scalar::Q(a), Scalar::Q(b)) => Scalar::Q(a + b),
            (Scalar::Fp { v: a, p }, Scalar::Fp { v: b, p: q }) => {
                assert_eq!(p, q, "field mismatch");
                Scalar::Fp { v: (a + b) % (*p as u64), p: *p }
            }
            _ => panic!("field mismatch"),
        }
    }

    pub fn sub(&self, other: &Scalar) -> Scalar {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Scalar) -> Scalar {
        match (self, other) {
            (Scalar::Q(a), Scalar::Q(b)) => Scalar::Q(a * b),
            (Scalar::Fp { v: a, p }, Scalar::Fp { v: b, p: q }) => {
                assert_eq!(p, q, "field mismatch");
                Scalar::Fp { v: (a * b) % (*p as u64), p: *p }
            }
            _ => panic!("field mismatch"),
        }
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Q(a) => Scalar::Q(-a),
            Scalar::Fp { v, p } => {
                let m = *p as u64;
                Scalar::Fp { v: (m - v % m) % m, p: *p }
            }
        }
    }

    /// Multiplicative inverse. Panics on zero.
    pub fn inv(&self) -> Scalar {
        match self {
            Scalar::Q(a) => {
                assert!(!a.is_zero(), "inverse of zero");
                Scalar::Q(a.recip())
            }
            Scalar::Fp { v, p } => {
                assert!(*v != 0, "inverse of zero");
                Scalar::Fp { v: mod_inv(*v, *p as u64), p: *p }
            }
        }
    }

    pub fn div(&self, other: &Scalar) -> Scalar {
        self.mul(&other.inv())
    }

    /// True when the scalar is the integer 1.
    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Q(r) => r.is_one(),
            Scalar::Fp { v, .. } => *v == 1,
        }
    }
}

fn mod_inv(a: u64, p: u64) -> u64 {
    // extended Euclid; p prime, a != 0 mod p
    let (mut t, mut new_t): (i128, i128) = (0, 1);
    let (mut r, mut new_r): (i128, i128) = (p as i128, (a % p) as i128);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    assert_eq!(r, 1, "not invertible");
    t.rem_euclid(p as i128) as u64
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Q(r) => {
                if r.denom().is_one() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            Scalar::Fp { v, .. } => write!(f, "{v}"),
        }
    }
}

/// Content normalization for rational rows: scale so all entries are
/// coprime integers with a positive leading coefficient. Used by the
/// fraction-free elimination path.
pub fn primitive_scale(values: &mut [Scalar]) {
    if values.is_empty() {
        return;
    }
    if let Scalar::Q(_) = values[0] {
        let mut denom_lcm = BigInt::one();
        for v in values.iter() {
            if let Scalar::Q(r) = v {
                denom_lcm = num_integer::lcm(denom_lcm, r.denom().clone());
            }
        }
        let mut numer_gcd = BigInt::zero();
        for v in values.iter() {
            if let Scalar::Q(r) = v {
                let scaled = r.numer() * (&denom_lcm / r.denom());
                numer_gcd = num_integer::gcd(numer_gcd, scaled);
            }
        }
        if numer_gcd.is_zero() {
            return;
        }
        let factor = BigRational::new(denom_lcm, numer_gcd);
        for v in values.iter_mut() {
            if let Scalar::Q(r) = v {
                *r *= &factor;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_validation() {
        assert!(FieldSpec::prime_field(2).is_ok());
        assert!(FieldSpec::prime_field(3).is_ok());
        assert!(FieldSpec::prime_field(2147483647).is_ok());
        assert!(FieldSpec::prime_field(1).is_err());
        assert!(FieldSpec::prime_field(4).is_err());
        assert!(FieldSpec::prime_field(91).is_err());
    }

    #[test]
    fn fp_arithmetic() {
        let f = FieldSpec::prime_field(7).unwrap();
        let a = f.from_i64(3);
        let b = f.from_i64(5);
        assert_eq!(a.add(&b), f.from_i64(1));
        assert_eq!(a.mul(&b), f.from_i64(1));
        assert_eq!(a.inv(), f.from_i64(5));
        assert_eq!(f.from_i64(-1), f.from_i64(6));
    }

    #[test]
    fn rational_parse() {
        let f = FieldSpec::Rationals;
        let x = f.parse_scalar("-3/6").unwrap();
        assert_eq!(x, Scalar::Q(BigRational::new(BigInt::from(-1), BigInt::from(2))));
        assert_eq!(x.to_string(), "-1/2");
    }
}
