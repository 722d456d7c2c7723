//! Exact coefficient arithmetic for every domain the workbench touches:
//! rationals, prime fields GF(p), and multivariate rational-function fields
//! over either of those.
//!
//! Values are immutable and always kept in canonical form: rationals are
//! reduced with positive denominator, residues lie in `[0, p)`, and
//! function-field elements are reduced fractions with a monic denominator
//! under the fixed graded lexicographic monomial order. Equality is plain
//! structural equality of canonical forms.

mod parse;
mod poly;
mod scalar;

pub use parse::parse_field_value;
pub use poly::{Monomial, MultiPoly};
pub use scalar::{BaseField, Scalar};

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::Error;

/// A multivariate rational-function field: `base(vars...)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionField {
    pub base: BaseField,
    pub vars: Vec<String>,
}

impl FunctionField {
    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }
}

/// Runtime descriptor of a coefficient field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Field {
    Q,
    Fp(u64),
    Func(Arc<FunctionField>),
}

impl Field {
    /// Rational-function field over ℚ in the given variables.
    pub fn rational_functions<S: Into<String>>(vars: impl IntoIterator<Item = S>) -> Field {
        Field::Func(Arc::new(FunctionField {
            base: BaseField::Q,
            vars: vars.into_iter().map(Into::into).collect(),
        }))
    }

    /// Rational-function field over GF(p).
    pub fn rational_functions_mod<S: Into<String>>(p: u64, vars: impl IntoIterator<Item = S>) -> Field {
        Field::Func(Arc::new(FunctionField {
            base: BaseField::Fp(p),
            vars: vars.into_iter().map(Into::into).collect(),
        }))
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            Field::Q => 0,
            Field::Fp(p) => *p,
            Field::Func(ff) => ff.base.characteristic(),
        }
    }

    pub fn zero(&self) -> FieldValue {
        self.int(0)
    }

    pub fn one(&self) -> FieldValue {
        self.int(1)
    }

    pub fn int(&self, n: i64) -> FieldValue {
        match self {
            Field::Q => FieldValue::Rational(BigRational::from_integer(BigInt::from(n))),
            Field::Fp(p) => {
                let Scalar::Fp { v, .. } = Scalar::from_int(BaseField::Fp(*p), n) else {
                    unreachable!()
                };
                FieldValue::PrimeField { p: *p, value: v }
            }
            Field::Func(ff) => {
                let c = Scalar::from_int(ff.base, n);
                FieldValue::func(ff.clone(), MultiPoly::constant(ff.vars.len(), c), MultiPoly::one(ff.vars.len(), ff.base))
            }
        }
    }

    /// The fraction `n/d`; `d` must be invertible in the field.
    pub fn ratio(&self, n: i64, d: i64) -> FieldValue {
        let num = self.int(n);
        let den = self.int(d);
        num.div(&den).expect("denominator invertible in this field")
    }

    /// One half, the scalar needed by every symmetrization.
    pub fn half(&self) -> Result<FieldValue, Error> {
        if self.characteristic() == 2 {
            return Err(Error::CharacteristicTwo);
        }
        Ok(self.int(1).div(&self.int(2)).expect("2 invertible"))
    }

    /// The generator with the given name, for function fields.
    pub fn var(&self, name: &str) -> Result<FieldValue, Error> {
        match self {
            Field::Func(ff) => {
                let idx = ff
                    .var_index(name)
                    .ok_or_else(|| Error::UnboundVariable(name.to_string()))?;
                Ok(FieldValue::func(
                    ff.clone(),
                    MultiPoly::var(ff.vars.len(), ff.base, idx),
                    MultiPoly::one(ff.vars.len(), ff.base),
                ))
            }
            _ => Err(Error::UnboundVariable(name.to_string())),
        }
    }

    /// Parses the literal coefficient syntax: integers, `p/q`, and
    /// polynomial fractions such as `(4*a-2)/(t+1)`.
    pub fn parse(&self, text: &str) -> Result<FieldValue, Error> {
        parse_field_value(self, text)
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Q => write!(f, "Q"),
            Field::Fp(p) => write!(f, "GF({})", p),
            Field::Func(ff) => {
                match ff.base {
                    BaseField::Q => write!(f, "Q(")?,
                    BaseField::Fp(p) => write!(f, "GF({})(", p)?,
                }
                write!(f, "{})", ff.vars.join(","))
            }
        }
    }
}

/// A reduced fraction of multivariate polynomials.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatFunc {
    pub field: Arc<FunctionField>,
    pub num: MultiPoly,
    pub den: MultiPoly,
}

/// An element of one of the supported coefficient fields.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FieldValue {
    Rational(BigRational),
    PrimeField { p: u64, value: u64 },
    RatFunc(Box<RatFunc>),
}

impl FieldValue {
    pub fn field(&self) -> Field {
        match self {
            FieldValue::Rational(_) => Field::Q,
            FieldValue::PrimeField { p, .. } => Field::Fp(*p),
            FieldValue::RatFunc(rf) => Field::Func(rf.field.clone()),
        }
    }

    fn func(field: Arc<FunctionField>, num: MultiPoly, den: MultiPoly) -> FieldValue {
        FieldValue::RatFunc(Box::new(reduce(field, num, den)))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            FieldValue::Rational(r) => r.is_zero(),
            FieldValue::PrimeField { value, .. } => *value == 0,
            FieldValue::RatFunc(rf) => rf.num.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            FieldValue::Rational(r) => r.is_one(),
            FieldValue::PrimeField { value, .. } => *value == 1,
            FieldValue::RatFunc(rf) => rf.num.is_one() && rf.den.is_one(),
        }
    }

    fn check(&self, other: &FieldValue) -> Result<(), Error> {
        if self.field() != other.field() {
            return Err(Error::FieldMismatch {
                left: self.field().to_string(),
                right: other.field().to_string(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &FieldValue) -> FieldValue {
        self.try_add(other).expect("field mismatch in add")
    }

    pub fn try_add(&self, other: &FieldValue) -> Result<FieldValue, Error> {
        self.check(other)?;
        Ok(match (self, other) {
            (FieldValue::Rational(a), FieldValue::Rational(b)) => FieldValue::Rational(a + b),
            (FieldValue::PrimeField { p, value: a }, FieldValue::PrimeField { value: b, .. }) => {
                FieldValue::PrimeField { p: *p, value: (a + b) % p }
            }
            (FieldValue::RatFunc(a), FieldValue::RatFunc(b)) => {
                if a.den == b.den {
                    FieldValue::func(a.field.clone(), a.num.add(&b.num), a.den.clone())
                } else {
                    let num = a.num.mul(&b.den).add(&b.num.mul(&a.den));
                    let den = a.den.mul(&b.den);
                    FieldValue::func(a.field.clone(), num, den)
                }
            }
            _ => unreachable!(),
        })
    }

    pub fn sub(&self, other: &FieldValue) -> FieldValue {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> FieldValue {
        match self {
            FieldValue::Rational(a) => FieldValue::Rational(-a),
            FieldValue::PrimeField { p, value } => FieldValue::PrimeField {
                p: *p,
                value: if *value == 0 { 0 } else { p - value },
            },
            FieldValue::RatFunc(rf) => FieldValue::RatFunc(Box::new(RatFunc {
                field: rf.field.clone(),
                num: rf.num.neg(),
                den: rf.den.clone(),
            })),
        }
    }

    pub fn mul(&self, other: &FieldValue) -> FieldValue {
        self.try_mul(other).expect("field mismatch in mul")
    }

    pub fn try_mul(&self, other: &FieldValue) -> Result<FieldValue, Error> {
        self.check(other)?;
        Ok(match (self, other) {
            (FieldValue::Rational(a), FieldValue::Rational(b)) => FieldValue::Rational(a * b),
            (FieldValue::PrimeField { p, value: a }, FieldValue::PrimeField { value: b, .. }) => {
                FieldValue::PrimeField { p: *p, value: ((*a as u128 * *b as u128) % *p as u128) as u64 }
            }
            (FieldValue::RatFunc(a), FieldValue::RatFunc(b)) => {
                // Cross-reduce before multiplying to limit swell.
                let g1 = a.num.gcd(&b.den);
                let g2 = b.num.gcd(&a.den);
                let n1 = a.num.div_exact(&g1).expect("gcd divides");
                let d2 = b.den.div_exact(&g1).expect("gcd divides");
                let n2 = b.num.div_exact(&g2).expect("gcd divides");
                let d1 = a.den.div_exact(&g2).expect("gcd divides");
                FieldValue::func(a.field.clone(), n1.mul(&n2), d1.mul(&d2))
            }
            _ => unreachable!(),
        })
    }

    pub fn inv(&self) -> Result<FieldValue, Error> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(match self {
            FieldValue::Rational(a) => FieldValue::Rational(a.recip()),
            FieldValue::PrimeField { .. } => {
                let Scalar::Fp { p, v } = self.as_scalar().unwrap() else { unreachable!() };
                let inv = Scalar::Fp { p, v }.inv().ok_or(Error::DivisionByZero)?;
                let Scalar::Fp { v, .. } = inv else { unreachable!() };
                FieldValue::PrimeField { p, value: v }
            }
            FieldValue::RatFunc(rf) => FieldValue::func(rf.field.clone(), rf.den.clone(), rf.num.clone()),
        })
    }

    pub fn div(&self, other: &FieldValue) -> Result<FieldValue, Error> {
        self.check(other)?;
        if other.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.mul(&other.inv()?))
    }

    /// Multiply by a plain integer (available in every field).
    pub fn mul_int(&self, n: i64) -> FieldValue {
        self.mul(&self.field().int(n))
    }

    pub fn neg_if(&self, negate: bool) -> FieldValue {
        if negate {
            self.neg()
        } else {
            self.clone()
        }
    }

    fn as_scalar(&self) -> Option<Scalar> {
        match self {
            FieldValue::Rational(r) => Some(Scalar::Q(r.clone())),
            FieldValue::PrimeField { p, value } => Some(Scalar::Fp { p: *p, v: *value }),
            FieldValue::RatFunc(_) => None,
        }
    }

    fn from_scalar(s: Scalar) -> FieldValue {
        match s {
            Scalar::Q(r) => FieldValue::Rational(r),
            Scalar::Fp { p, v } => FieldValue::PrimeField { p, value: v },
        }
    }

    /// Evaluates a function-field element at a point of the base field.
    /// Scalars evaluate to themselves. Every variable must be bound and the
    /// denominator must not vanish at the point.
    pub fn evaluate(&self, bindings: &BTreeMap<String, FieldValue>) -> Result<FieldValue, Error> {
        let rf = match self {
            FieldValue::RatFunc(rf) => rf,
            _ => return Ok(self.clone()),
        };
        let mut point = Vec::with_capacity(rf.field.vars.len());
        for v in &rf.field.vars {
            let val = bindings
                .get(v)
                .ok_or_else(|| Error::UnboundVariable(v.clone()))?;
            let s = val
                .as_scalar()
                .ok_or_else(|| Error::UnboundVariable(format!("{} bound to a non-scalar", v)))?;
            if s.base() != rf.field.base {
                return Err(Error::FieldMismatch {
                    left: self.field().to_string(),
                    right: val.field().to_string(),
                });
            }
            point.push(s);
        }
        let den = rf.den.evaluate(&point);
        if den.is_zero() {
            return Err(Error::PoleAtPoint(self.to_string()));
        }
        let num = rf.num.evaluate(&point);
        Ok(FieldValue::from_scalar(num.mul(&den.inv().unwrap())))
    }

    /// Substitute one variable by another element of the same field.
    /// Used for constraint elimination in parametric maps.
    pub fn substitute(&self, var: &str, value: &FieldValue) -> Result<FieldValue, Error> {
        let rf = match self {
            FieldValue::RatFunc(rf) => rf,
            _ => return Ok(self.clone()),
        };
        self.check(value)?;
        let FieldValue::RatFunc(val) = value else { unreachable!() };
        let idx = rf
            .field
            .var_index(var)
            .ok_or_else(|| Error::UnboundVariable(var.to_string()))?;
        let (n1, d1) = rf.num.substitute(idx, &val.num, &val.den);
        let (n2, d2) = rf.den.substitute(idx, &val.num, &val.den);
        // self = (n1/d1) / (n2/d2)
        let num = n1.mul(&d2);
        let den = d1.mul(&n2);
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(FieldValue::func(rf.field.clone(), num, den))
    }

    /// Structural complexity used for pivot selection: prefers scalars, then
    /// low-degree sparse fractions.
    pub fn complexity(&self) -> (u32, usize) {
        match self {
            FieldValue::RatFunc(rf) => (
                rf.num.total_degree() + rf.den.total_degree(),
                rf.num.term_count() + rf.den.term_count(),
            ),
            _ => (0, 1),
        }
    }
}

/// Canonical form: divide out the gcd and scale the denominator monic.
fn reduce(field: Arc<FunctionField>, num: MultiPoly, den: MultiPoly) -> RatFunc {
    assert!(!den.is_zero(), "zero denominator in rational function");
    if num.is_zero() {
        let nv = num.nvars;
        let base = num.base;
        return RatFunc { field, num, den: MultiPoly::one(nv, base) };
    }
    let g = num.gcd(&den);
    let (mut num, mut den) = if g.is_one() {
        (num, den)
    } else {
        (
            num.div_exact(&g).expect("gcd divides numerator"),
            den.div_exact(&g).expect("gcd divides denominator"),
        )
    };
    // Monic denominator.
    let lc = den.leading().map(|(_, c)| c.clone()).unwrap();
    if !lc.is_one() {
        let inv = lc.inv().expect("nonzero leading coefficient");
        num = num.mul_scalar(&inv);
        den = den.mul_scalar(&inv);
    }
    RatFunc { field, num, den }
}

impl fmt::Display for FieldValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldValue::Rational(r) => write!(f, "{}", r),
            FieldValue::PrimeField { value, .. } => write!(f, "{}", value),
            FieldValue::RatFunc(rf) => {
                if rf.den.is_one() {
                    if rf.num.term_count() > 1 {
                        write!(f, "({})", rf.num.display(&rf.field.vars))
                    } else {
                        write!(f, "{}", rf.num.display(&rf.field.vars))
                    }
                } else {
                    write!(
                        f,
                        "({})/({})",
                        rf.num.display(&rf.field.vars),
                        rf.den.display(&rf.field.vars)
                    )
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_arith() {
        let f = Field::Q;
        let half = f.ratio(1, 2);
        let third = f.ratio(1, 3);
        assert_eq!(half.add(&third), f.ratio(5, 6));
    }

    #[test]
    fn gf5_inverse() {
        let f = Field::Fp(5);
        assert_eq!(f.int(2).inv().unwrap(), f.int(3));
    }

    #[test]
    fn ratfunc_cancellation() {
        // (a^2-1)/(a-1) = a+1
        let f = Field::rational_functions(["a"]);
        let a = f.var("a").unwrap();
        let num = a.mul(&a).sub(&f.one());
        let den = a.sub(&f.one());
        let q = num.div(&den).unwrap();
        assert_eq!(q, a.add(&f.one()));
    }

    #[test]
    fn field_mismatch_detected() {
        let q = Field::Q.int(1);
        let g = Field::Fp(5).int(1);
        assert!(q.try_add(&g).is_err());
    }

    #[test]
    fn evaluate_and_pole() {
        let f = Field::rational_functions(["a"]);
        let a = f.var("a").unwrap();
        let expr = a.mul_int(4).sub(&f.int(2)); // 4a-2
        let mut b = BTreeMap::new();
        b.insert("a".to_string(), Field::Q.ratio(1, 2));
        assert_eq!(expr.evaluate(&b).unwrap(), Field::Q.int(0));

        let pole = f.one().div(&a.sub(&Field::Q.ratio(1, 2).to_field(&f))).unwrap();
        assert!(matches!(pole.evaluate(&b), Err(Error::PoleAtPoint(_))));
    }

    #[test]
    fn substitute_variable() {
        // g4 := (1+g2*g3)/g1 inside g1*g4 - g2*g3 gives 1
        let f = Field::rational_functions(["g1", "g2", "g3", "g4"]);
        let (g1, g2, g3, g4) = (
            f.var("g1").unwrap(),
            f.var("g2").unwrap(),
            f.var("g3").unwrap(),
            f.var("g4").unwrap(),
        );
        let det = g1.mul(&g4).sub(&g2.mul(&g3));
        let expr = f.one().add(&g2.mul(&g3)).div(&g1).unwrap();
        let out = det.substitute("g4", &expr).unwrap();
        assert!(out.is_one());
    }

    #[test]
    fn canonical_idempotent() {
        let f = Field::rational_functions(["a", "b"]);
        let a = f.var("a").unwrap();
        let b = f.var("b").unwrap();
        let e = a.add(&b).mul(&a.sub(&b)).div(&a.add(&b)).unwrap();
        assert_eq!(e, a.sub(&b));
        // Display round trip through the parser.
        let back = f.parse(&e.to_string()).unwrap();
        assert_eq!(back, e);
    }
}

impl FieldValue {
    /// Embeds a rational constant into a function field over ℚ (tests and
    /// constructors use this when mixing literal constants with symbols).
    pub fn to_field(&self, field: &Field) -> FieldValue {
        match (self, field) {
            (FieldValue::Rational(r), Field::Func(ff)) if ff.base == BaseField::Q => FieldValue::func(
                ff.clone(),
                MultiPoly::constant(ff.vars.len(), Scalar::Q(r.clone())),
                MultiPoly::one(ff.vars.len(), ff.base),
            ),
            (FieldValue::PrimeField { p, value }, Field::Func(ff)) if ff.base == BaseField::Fp(*p) => {
                FieldValue::func(
                    ff.clone(),
                    MultiPoly::constant(ff.vars.len(), Scalar::Fp { p: *p, v: *value }),
                    MultiPoly::one(ff.vars.len(), ff.base),
                )
            }
            _ => {
                assert_eq!(self.field(), *field, "cannot embed {} into {}", self, field);
                self.clone()
            }
        }
    }
}
