//! Multivariate polynomials over an exact base field (`Scalar`).
//!
//! Polynomials are stored as sorted term maps keyed by monomials under a
//! graded lexicographic order. All arithmetic is exact; the reduced-fraction
//! layer on top of this module relies on [`MultiPoly::gcd`] staying correct,
//! so the GCD here is the classic primitive PRS (content/primitive-part
//! recursion on the lowest variable present).

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use super::scalar::{BaseField, Scalar};

/// Exponent vector of a single monomial. The length always equals the
/// variable count of the ambient polynomial ring.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u16>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, index: usize) -> Self {
        let mut e = vec![0; nvars];
        e[index] = 1;
        Monomial(e)
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    /// Exact monomial quotient, `None` when some exponent would go negative.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = Vec::with_capacity(self.0.len());
        for (a, b) in self.0.iter().zip(&other.0) {
            if a < b {
                return None;
            }
            out.push(a - b);
        }
        Some(Monomial(out))
    }

    pub fn degree_in(&self, var: usize) -> u16 {
        self.0[var]
    }
}

// Graded lexicographic: compare total degree first, then exponents from the
// first declared variable. This is the fixed monomial order used for all
// canonical forms.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A multivariate polynomial with exact coefficients.
///
/// Invariant: no stored coefficient is zero, and every coefficient lives in
/// `base`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiPoly {
    pub nvars: usize,
    pub base: BaseField,
    pub terms: BTreeMap<Monomial, Scalar>,
}

impl MultiPoly {
    pub fn zero(nvars: usize, base: BaseField) -> Self {
        MultiPoly {
            nvars,
            base,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Scalar) -> Self {
        let base = c.base();
        let mut p = Self::zero(nvars, base);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(nvars), c);
        }
        p
    }

    pub fn one(nvars: usize, base: BaseField) -> Self {
        Self::constant(nvars, Scalar::one(base))
    }

    pub fn var(nvars: usize, base: BaseField, index: usize) -> Self {
        let mut p = Self::zero(nvars, base);
        p.terms.insert(Monomial::var(nvars, index), Scalar::one(base));
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms.keys().next().unwrap().is_one())
    }

    /// The constant value of the polynomial when it is constant.
    pub fn as_constant(&self) -> Option<Scalar> {
        if self.terms.is_empty() {
            return Some(Scalar::zero(self.base));
        }
        if self.is_constant() {
            return self.terms.values().next().cloned();
        }
        None
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().map_or(false, |c| c.is_one())
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.total_degree()).max().unwrap_or(0)
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// Leading term under the graded lexicographic order.
    pub fn leading(&self) -> Option<(&Monomial, &Scalar)> {
        self.terms.iter().next_back()
    }

    fn insert_term(&mut self, m: Monomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get().add(&c);
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, other: &MultiPoly) -> MultiPoly {
        debug_assert_eq!(self.nvars, other.nvars);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.insert_term(m.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> MultiPoly {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = c.neg();
        }
        out
    }

    pub fn sub(&self, other: &MultiPoly) -> MultiPoly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &MultiPoly) -> MultiPoly {
        debug_assert_eq!(self.nvars, other.nvars);
        let mut out = MultiPoly::zero(self.nvars, self.base);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.insert_term(ma.mul(mb), ca.mul(cb));
            }
        }
        out
    }

    pub fn mul_scalar(&self, c: &Scalar) -> MultiPoly {
        if c.is_zero() {
            return MultiPoly::zero(self.nvars, self.base);
        }
        let mut out = self.clone();
        for v in out.terms.values_mut() {
            *v = v.mul(c);
        }
        out
    }

    pub fn mul_term(&self, m: &Monomial, c: &Scalar) -> MultiPoly {
        let mut out = MultiPoly::zero(self.nvars, self.base);
        if c.is_zero() {
            return out;
        }
        for (mm, cc) in &self.terms {
            out.terms.insert(mm.mul(m), cc.mul(c));
        }
        out
    }

    pub fn pow(&self, mut e: u32) -> MultiPoly {
        let mut acc = MultiPoly::one(self.nvars, self.base);
        let mut b = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&b);
            }
            e >>= 1;
            if e > 0 {
                b = b.mul(&b);
            }
        }
        acc
    }

    /// Exact multivariate division: returns `q` with `self = q * div`, or
    /// `None` when the division is not exact.
    pub fn div_exact(&self, div: &MultiPoly) -> Option<MultiPoly> {
        assert!(!div.is_zero(), "division by the zero polynomial");
        let mut rem = self.clone();
        let mut quo = MultiPoly::zero(self.nvars, self.base);
        let (dm, dc) = {
            let (m, c) = div.leading().unwrap();
            (m.clone(), c.clone())
        };
        let dc_inv = dc.inv().expect("nonzero leading coefficient");
        while !rem.is_zero() {
            let (rm, rc) = {
                let (m, c) = rem.leading().unwrap();
                (m.clone(), c.clone())
            };
            let qm = rm.div(&dm)?;
            let qc = rc.mul(&dc_inv);
            quo.insert_term(qm.clone(), qc.clone());
            rem = rem.sub(&div.mul_term(&qm, &qc));
        }
        Some(quo)
    }

    pub fn degree_in(&self, var: usize) -> u16 {
        self.terms.keys().map(|m| m.degree_in(var)).max().unwrap_or(0)
    }

    /// Lowest variable index that actually occurs.
    fn lowest_var(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        for m in self.terms.keys() {
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 && best.map_or(true, |b| i < b) {
                    best = Some(i);
                }
            }
        }
        best
    }

    /// Coefficients of `self` viewed as a univariate polynomial in `var`,
    /// indexed by the power of `var` (each entry has `var`-degree zero).
    fn coeffs_in(&self, var: usize) -> Vec<MultiPoly> {
        let d = self.degree_in(var) as usize;
        let mut out = vec![MultiPoly::zero(self.nvars, self.base); d + 1];
        for (m, c) in &self.terms {
            let k = m.degree_in(var) as usize;
            let mut m0 = m.clone();
            m0.0[var] = 0;
            out[k].insert_term(m0, c.clone());
        }
        out
    }

    /// Scales so the leading coefficient (grlex) is one.
    pub fn monic(&self) -> MultiPoly {
        match self.leading() {
            None => self.clone(),
            Some((_, c)) => {
                let inv = c.inv().expect("nonzero leading coefficient");
                self.mul_scalar(&inv)
            }
        }
    }

    /// GCD of all scalar coefficients, as a positive rational (or 1 over a
    /// prime field). Used to keep PRS intermediates primitive.
    fn scalar_content(&self) -> Scalar {
        let mut it = self.terms.values();
        let first = match it.next() {
            None => return Scalar::one(self.base),
            Some(c) => c.clone(),
        };
        let mut acc = first;
        for c in it {
            acc = acc.content_gcd(c);
        }
        acc
    }

    /// Multivariate GCD by primitive PRS on the lowest occurring variable.
    /// The result is normalized to be monic under grlex, so it is canonical.
    pub fn gcd(&self, other: &MultiPoly) -> MultiPoly {
        let g = self.gcd_raw(other);
        g.monic()
    }

    fn gcd_raw(&self, other: &MultiPoly) -> MultiPoly {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        if self.is_constant() || other.is_constant() {
            return MultiPoly::one(self.nvars, self.base);
        }
        let var = match self.lowest_var().into_iter().chain(other.lowest_var()).min() {
            Some(v) => v,
            None => return MultiPoly::one(self.nvars, self.base),
        };
        if self.degree_in(var) == 0 || other.degree_in(var) == 0 {
            // One side does not involve `var`: gcd divides the coefficient
            // content of the other side with respect to `var`.
            let (flat, tall) = if self.degree_in(var) == 0 {
                (self, other)
            } else {
                (other, self)
            };
            let cont = tall
                .coeffs_in(var)
                .iter()
                .fold(MultiPoly::zero(self.nvars, self.base), |acc, c| acc.gcd_raw(c));
            return flat.gcd_raw(&cont);
        }

        let (cont_a, pp_a) = self.content_and_primitive(var);
        let (cont_b, pp_b) = other.content_and_primitive(var);
        let cont_gcd = cont_a.gcd_raw(&cont_b);

        // Primitive PRS in `var`.
        let mut a = pp_a;
        let mut b = pp_b;
        if a.degree_in(var) < b.degree_in(var) {
            std::mem::swap(&mut a, &mut b);
        }
        loop {
            let r = a.pseudo_rem(&b, var);
            if r.is_zero() {
                break;
            }
            let (_, rp) = r.content_and_primitive(var);
            a = b;
            b = rp;
            if b.degree_in(var) == 0 {
                // Coprime in `var`; primitive parts contribute nothing more.
                return cont_gcd;
            }
        }
        let (_, bp) = b.content_and_primitive(var);
        cont_gcd.mul(&bp)
    }

    /// Content (gcd of `var`-coefficients) and primitive part w.r.t. `var`.
    fn content_and_primitive(&self, var: usize) -> (MultiPoly, MultiPoly) {
        let coeffs = self.coeffs_in(var);
        let mut cont = MultiPoly::zero(self.nvars, self.base);
        for c in &coeffs {
            cont = cont.gcd_raw(c);
        }
        // Keep scalar sizes down as well.
        let sc = cont.scalar_content();
        if !sc.is_one() {
            cont = cont.mul_scalar(&sc.inv().expect("nonzero content"));
        }
        if cont.is_zero() {
            return (MultiPoly::one(self.nvars, self.base), self.clone());
        }
        let pp = self.div_exact(&cont).expect("content divides");
        (cont, pp)
    }

    /// Pseudo-remainder of `self` by `div` in `var`:
    /// `lc(div)^(da-db+1) * self = q*div + r` with `deg_var r < deg_var div`.
    fn pseudo_rem(&self, div: &MultiPoly, var: usize) -> MultiPoly {
        let db = div.degree_in(var);
        assert!(db > 0);
        let div_coeffs = div.coeffs_in(var);
        let lc = div_coeffs[db as usize].clone();
        let mut r = self.clone();
        while !r.is_zero() && r.degree_in(var) >= db {
            let dr = r.degree_in(var);
            let r_coeffs = r.coeffs_in(var);
            let lr = r_coeffs[dr as usize].clone();
            // r := lc*r - lr * x^(dr-db) * div
            let mut shift = Monomial::one(self.nvars);
            shift.0[var] = dr - db;
            r = r.mul(&lc).sub(&div.mul(&lr).mul_term(&shift, &Scalar::one(self.base)));
            // Remove scalar content to slow coefficient growth.
            let sc = r.scalar_content();
            if !sc.is_one() && !r.is_zero() {
                r = r.mul_scalar(&sc.inv().expect("nonzero"));
            }
        }
        r
    }

    /// Full evaluation at a point of the base field.
    pub fn evaluate(&self, point: &[Scalar]) -> Scalar {
        assert_eq!(point.len(), self.nvars);
        let mut acc = Scalar::zero(self.base);
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.0.iter().enumerate() {
                for _ in 0..e {
                    t = t.mul(&point[i]);
                }
            }
            acc = acc.add(&t);
        }
        acc
    }

    /// Substitute a single variable by a polynomial fraction `num/den`,
    /// returning `(numerator, denominator)` of the substituted fraction.
    pub fn substitute(&self, var: usize, num: &MultiPoly, den: &MultiPoly) -> (MultiPoly, MultiPoly) {
        let d = self.degree_in(var) as u32;
        if d == 0 {
            return (self.clone(), MultiPoly::one(self.nvars, self.base));
        }
        let coeffs = self.coeffs_in(var);
        // f = sum c_k v^k -> sum c_k num^k den^(d-k) over den^d
        let mut acc = MultiPoly::zero(self.nvars, self.base);
        for (k, c) in coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let t = c.mul(&num.pow(k as u32)).mul(&den.pow(d - k as u32));
            acc = acc.add(&t);
        }
        (acc, den.pow(d))
    }

    pub fn display<'a>(&'a self, vars: &'a [String]) -> PolyDisplay<'a> {
        PolyDisplay { poly: self, vars }
    }
}

pub struct PolyDisplay<'a> {
    poly: &'a MultiPoly,
    vars: &'a [String],
}

impl fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return write!(f, "0");
        }
        // Print highest terms first.
        let mut first = true;
        for (m, c) in self.poly.terms.iter().rev() {
            let (neg, mag) = c.sign_split();
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let coeff_is_one = mag.is_one();
            if m.is_one() {
                write!(f, "{}", mag)?;
            } else {
                let mut wrote = false;
                if !coeff_is_one {
                    write!(f, "{}", mag)?;
                    wrote = true;
                }
                for (i, &e) in m.0.iter().enumerate() {
                    if e == 0 {
                        continue;
                    }
                    if wrote {
                        write!(f, "*")?;
                    }
                    write!(f, "{}", self.vars[i])?;
                    if e > 1 {
                        write!(f, "^{}", e)?;
                    }
                    wrote = true;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Scalar {
        Scalar::from_int(BaseField::Q, n)
    }

    fn x(i: usize) -> MultiPoly {
        MultiPoly::var(3, BaseField::Q, i)
    }

    #[test]
    fn grlex_order() {
        // x0^2 > x0*x1 > x1^2 > x0 > x1 > 1 in 2 vars? grlex: by degree then lex.
        let a = Monomial(vec![2, 0]);
        let b = Monomial(vec![1, 1]);
        let c = Monomial(vec![0, 2]);
        let d = Monomial(vec![1, 0]);
        assert!(a > b && b > c && c > d);
    }

    #[test]
    fn mul_and_div_exact() {
        let p = x(0).add(&x(1)); // a+b
        let q = x(0).sub(&x(1)); // a-b
        let prod = p.mul(&q); // a^2-b^2
        assert_eq!(prod.div_exact(&p).unwrap(), q);
        assert_eq!(prod.div_exact(&q).unwrap(), p);
        let bad = prod.add(&MultiPoly::one(3, BaseField::Q));
        assert!(bad.div_exact(&p).is_none());
    }

    #[test]
    fn gcd_simple() {
        // gcd(a^2-1, a-1) = a-1 (monic)
        let a = x(0);
        let one = MultiPoly::one(3, BaseField::Q);
        let p = a.mul(&a).sub(&one);
        let q = a.sub(&one);
        assert_eq!(p.gcd(&q), q);
    }

    #[test]
    fn gcd_multivariate() {
        // gcd((a+b)^2 (a-c), (a+b)(b+c)) = a+b
        let s = x(0).add(&x(1));
        let p = s.mul(&s).mul(&x(0).sub(&x(2)));
        let q = s.mul(&x(1).add(&x(2)));
        assert_eq!(p.gcd(&q), s);
    }

    #[test]
    fn gcd_coprime() {
        let p = x(0).mul(&x(1)).add(&MultiPoly::one(3, BaseField::Q));
        let q = x(0).add(&x(1));
        assert!(p.gcd(&q).is_one());
    }

    #[test]
    fn eval_point() {
        // (2a+b)(b+1) at a=1,b=2 -> 4*3=12
        let p = x(0).mul_scalar(&q(2)).add(&x(1));
        let r = x(1).add(&MultiPoly::one(3, BaseField::Q));
        let val = p.mul(&r).evaluate(&[q(1), q(2), q(0)]);
        assert_eq!(val, q(12));
    }

    #[test]
    fn gcd_over_gf5() {
        let b = BaseField::Fp(5);
        let a = MultiPoly::var(2, b, 0);
        let one = MultiPoly::one(2, b);
        let p = a.mul(&a).sub(&one); // a^2-1 = (a-1)(a+1)
        let q = a.sub(&one);
        assert_eq!(p.gcd(&q), q.monic());
    }
}
