//! Base-field scalars: exact rationals and prime-field residues.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// The coefficient domain of polynomial arithmetic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BaseField {
    Q,
    Fp(u64),
}

impl BaseField {
    pub fn characteristic(&self) -> u64 {
        match self {
            BaseField::Q => 0,
            BaseField::Fp(p) => *p,
        }
    }
}

/// A scalar of a base field. Residues are always reduced into `[0, p)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Scalar {
    Q(BigRational),
    Fp { p: u64, v: u64 },
}

fn fp_mul(p: u64, a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn fp_inv(p: u64, a: u64) -> Option<u64> {
    if a == 0 {
        return None;
    }
    // Extended Euclid on (a, p).
    let (mut r0, mut r1) = (a as i128, p as i128);
    let (mut s0, mut s1) = (1i128, 0i128);
    while r1 != 0 {
        let q = r0 / r1;
        let r = r0 - q * r1;
        r0 = r1;
        r1 = r;
        let s = s0 - q * s1;
        s0 = s1;
        s1 = s;
    }
    debug_assert_eq!(r0, 1, "modulus must be prime");
    let mut s = s0 % p as i128;
    if s < 0 {
        s += p as i128;
    }
    Some(s as u64)
}

impl Scalar {
    pub fn base(&self) -> BaseField {
        match self {
            Scalar::Q(_) => BaseField::Q,
            Scalar::Fp { p, .. } => BaseField::Fp(*p),
        }
    }

    pub fn zero(base: BaseField) -> Scalar {
        match base {
            BaseField::Q => Scalar::Q(BigRational::zero()),
            BaseField::Fp(p) => Scalar::Fp { p, v: 0 },
        }
    }

    pub fn one(base: BaseField) -> Scalar {
        match base {
            BaseField::Q => Scalar::Q(BigRational::one()),
            BaseField::Fp(p) => Scalar::Fp { p, v: 1 },
        }
    }

    pub fn from_int(base: BaseField, n: i64) -> Scalar {
        match base {
            BaseField::Q => Scalar::Q(BigRational::from_integer(BigInt::from(n))),
            BaseField::Fp(p) => {
                let m = n.rem_euclid(p as i64) as u64;
                Scalar::Fp { p, v: m }
            }
        }
    }

    pub fn from_bigint(base: BaseField, n: &BigInt) -> Scalar {
        match base {
            BaseField::Q => Scalar::Q(BigRational::from_integer(n.clone())),
            BaseField::Fp(p) => {
                let m = n.modpow(&BigInt::one(), &BigInt::from(p));
                let m = if m.is_negative() { m + BigInt::from(p) } else { m };
                let digits = m.to_u64_digits().1;
                Scalar::Fp { p, v: digits.first().copied().unwrap_or(0) }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Q(r) => r.is_zero(),
            Scalar::Fp { v, .. } => *v == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Q(r) => r.is_one(),
            Scalar::Fp { v, .. } => *v == 1,
        }
    }

    fn check(&self, other: &Scalar) {
        assert_eq!(self.base(), other.base(), "mixed base fields in scalar arithmetic");
    }

    pub fn add(&self, other: &Scalar) -> Scalar {
        self.check(other);
        match (self, other) {
            (Scalar::Q(a), Scalar::Q(b)) => Scalar::Q(a + b),
            (Scalar::Fp { p, v: a }, Scalar::Fp { v: b, .. }) => Scalar::Fp { p: *p, v: (a + b) % p },
            _ => unreachable!(),
        }
    }

    pub fn sub(&self, other: &Scalar) -> Scalar {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Q(a) => Scalar::Q(-a),
            Scalar::Fp { p, v } => Scalar::Fp { p: *p, v: if *v == 0 { 0 } else { p - v } },
        }
    }

    pub fn mul(&self, other: &Scalar) -> Scalar {
        self.check(other);
        match (self, other) {
            (Scalar::Q(a), Scalar::Q(b)) => Scalar::Q(a * b),
            (Scalar::Fp { p, v: a }, Scalar::Fp { v: b, .. }) => Scalar::Fp { p: *p, v: fp_mul(*p, *a, *b) },
            _ => unreachable!(),
        }
    }

    pub fn inv(&self) -> Option<Scalar> {
        match self {
            Scalar::Q(a) => {
                if a.is_zero() {
                    None
                } else {
                    Some(Scalar::Q(a.recip()))
                }
            }
            Scalar::Fp { p, v } => fp_inv(*p, *v).map(|v| Scalar::Fp { p: *p, v }),
        }
    }

    /// For display: `(is_negative, magnitude)`. Prime-field residues are
    /// never negative.
    pub fn sign_split(&self) -> (bool, Scalar) {
        match self {
            Scalar::Q(a) if a.is_negative() => (true, Scalar::Q(-a)),
            _ => (false, self.clone()),
        }
    }

    /// A "gcd" suitable for content extraction: over the rationals the
    /// positive generator of the fractional ideal (gcd of numerators over
    /// lcm of denominators), over a prime field just 1.
    pub fn content_gcd(&self, other: &Scalar) -> Scalar {
        match (self, other) {
            (Scalar::Q(a), Scalar::Q(b)) => {
                use num_integer::Integer;
                let n = a.numer().gcd(b.numer());
                let d = a.denom().lcm(b.denom());
                Scalar::Q(BigRational::new(n, d))
            }
            _ => Scalar::one(self.base()),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Q(r) => write!(f, "{}", r),
            Scalar::Fp { v, .. } => write!(f, "{}", v),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fp_inverse() {
        let two = Scalar::from_int(BaseField::Fp(5), 2);
        assert_eq!(two.inv().unwrap(), Scalar::from_int(BaseField::Fp(5), 3));
        assert!(Scalar::zero(BaseField::Fp(5)).inv().is_none());
    }

    #[test]
    fn q_arith() {
        let half = Scalar::Q(BigRational::new(BigInt::from(1), BigInt::from(2)));
        let third = Scalar::Q(BigRational::new(BigInt::from(1), BigInt::from(3)));
        let sum = half.add(&third);
        assert_eq!(sum, Scalar::Q(BigRational::new(BigInt::from(5), BigInt::from(6))));
    }

    #[test]
    fn content_gcd_rationals() {
        let a = Scalar::Q(BigRational::new(BigInt::from(4), BigInt::from(3)));
        let b = Scalar::Q(BigRational::new(BigInt::from(2), BigInt::from(9)));
        // gcd(4,2)/lcm(3,9) = 2/9
        assert_eq!(a.content_gcd(&b), Scalar::Q(BigRational::new(BigInt::from(2), BigInt::from(9))));
    }
}
