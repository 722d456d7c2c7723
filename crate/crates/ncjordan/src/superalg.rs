//! The superalgebra abstraction: structure constants, graded multiplication,
//! multiplication operators and parity-homogeneous linear maps.
//!
//! Conventions, fixed once for the whole crate:
//! * maps act on the right: `x.apply(d)` is written `xd` on paper, and the
//!   matrix of a composition `d1 d2` ("first d1, then d2") is `M1 * M2`
//!   under the row-vector convention used here;
//! * `(y)R_x = y·x` and `(y)L_x = (-1)^{p(x)p(y)} x·y`;
//! * the supercommutator of maps of parities `p, q` is
//!   `[P,Q] = PQ - (-1)^{pq} QP`.

use std::fmt;

use crate::field::{Field, FieldValue};
use crate::linalg::Matrix;
use crate::Error;

/// Parity of a homogeneous object.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn flip(self) -> Parity {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }

    pub fn plus(self, other: Parity) -> Parity {
        if self == other {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    /// The Koszul sign picked up when objects of these parities transpose.
    pub fn koszul_negates(self, other: Parity) -> bool {
        self == Parity::Odd && other == Parity::Odd
    }

    pub fn as_u8(self) -> u8 {
        match self {
            Parity::Even => 0,
            Parity::Odd => 1,
        }
    }

    pub fn from_u8(v: u8) -> Parity {
        if v % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Parity::Even => write!(f, "even"),
            Parity::Odd => write!(f, "odd"),
        }
    }
}

/// Parity of a not-necessarily-homogeneous element. Zero counts as even.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElementParity {
    Homogeneous(Parity),
    Mixed,
}

/// A finite-dimensional superalgebra given by structure constants:
/// `b_i · b_j = Σ_k c[i][j][k] b_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct SuperAlgebra {
    field: Field,
    dim: usize,
    parity: Vec<Parity>,
    names: Vec<String>,
    table: Vec<FieldValue>, // (i*dim + j)*dim + k
}

impl SuperAlgebra {
    /// Builds an algebra after checking the parity grading of the tensor:
    /// `c[i][j][k] = 0` unless `p(k) = p(i) + p(j)`.
    pub fn new(
        field: Field,
        parity: Vec<Parity>,
        names: Vec<String>,
        table: Vec<FieldValue>,
    ) -> Result<SuperAlgebra, Error> {
        let dim = parity.len();
        if names.len() != dim {
            return Err(Error::InvalidAlgebra(format!(
                "{} basis names for dimension {}",
                names.len(),
                dim
            )));
        }
        if table.len() != dim * dim * dim {
            return Err(Error::InvalidAlgebra(format!(
                "structure tensor has {} entries, expected {}",
                table.len(),
                dim * dim * dim
            )));
        }
        for e in &table {
            if !e.is_zero() && e.field() != field {
                return Err(Error::FieldMismatch {
                    left: field.to_string(),
                    right: e.field().to_string(),
                });
            }
        }
        let alg = SuperAlgebra { field, dim, parity, names, table };
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    if !alg.c(i, j, k).is_zero()
                        && alg.parity[k] != alg.parity[i].plus(alg.parity[j])
                    {
                        return Err(Error::GradingViolation(i, j, k));
                    }
                }
            }
        }
        Ok(alg)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn parity(&self, i: usize) -> Parity {
        self.parity[i]
    }

    pub fn parities(&self) -> &[Parity] {
        &self.parity
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Structure constant `c[i][j][k]`.
    pub fn c(&self, i: usize, j: usize, k: usize) -> &FieldValue {
        &self.table[(i * self.dim + j) * self.dim + k]
    }

    pub fn table(&self) -> &[FieldValue] {
        &self.table
    }

    pub fn basis(&self, i: usize) -> Element {
        let mut coords = vec![self.field.zero(); self.dim];
        coords[i] = self.field.one();
        Element { coords }
    }

    pub fn zero_element(&self) -> Element {
        Element { coords: vec![self.field.zero(); self.dim] }
    }

    pub fn element(&self, coords: Vec<FieldValue>) -> Result<Element, Error> {
        if coords.len() != self.dim {
            return Err(Error::AlgebraMismatch);
        }
        Ok(Element { coords })
    }

    /// Element from (index, coefficient) pairs.
    pub fn combo(&self, parts: &[(usize, FieldValue)]) -> Element {
        let mut coords = vec![self.field.zero(); self.dim];
        for (i, c) in parts {
            coords[*i] = coords[*i].add(c);
        }
        Element { coords }
    }

    pub fn parity_of(&self, x: &Element) -> ElementParity {
        let mut seen: Option<Parity> = None;
        for (i, c) in x.coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            match seen {
                None => seen = Some(self.parity[i]),
                Some(p) if p == self.parity[i] => {}
                Some(_) => return ElementParity::Mixed,
            }
        }
        ElementParity::Homogeneous(seen.unwrap_or(Parity::Even))
    }

    /// Splits an element into its even and odd parts.
    pub fn homogeneous_parts(&self, x: &Element) -> (Element, Element) {
        let mut even = self.zero_element();
        let mut odd = self.zero_element();
        for (i, c) in x.coords.iter().enumerate() {
            match self.parity[i] {
                Parity::Even => even.coords[i] = c.clone(),
                Parity::Odd => odd.coords[i] = c.clone(),
            }
        }
        (even, odd)
    }

    /// Bilinear extension of the structure constants.
    pub fn multiply(&self, x: &Element, y: &Element) -> Result<Element, Error> {
        if x.coords.len() != self.dim || y.coords.len() != self.dim {
            return Err(Error::AlgebraMismatch);
        }
        let mut out = vec![self.field.zero(); self.dim];
        for (i, xi) in x.coords.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.coords.iter().enumerate() {
                if yj.is_zero() {
                    continue;
                }
                let xy = xi.mul(yj);
                for k in 0..self.dim {
                    let c = self.c(i, j, k);
                    if c.is_zero() {
                        continue;
                    }
                    out[k] = out[k].add(&xy.mul(c));
                }
            }
        }
        Ok(Element { coords: out })
    }

    fn mul(&self, x: &Element, y: &Element) -> Element {
        self.multiply(x, y).expect("elements of this algebra")
    }

    /// Left and right multiplication operators of a homogeneous element:
    /// `(y)R_x = y·x`, `(y)L_x = (-1)^{p(x)p(y)} x·y`. Both have parity
    /// `p(x)`.
    pub fn mult_operators(&self, x: &Element) -> Result<(LinearMap, LinearMap), Error> {
        let px = match self.parity_of(x) {
            ElementParity::Homogeneous(p) => p,
            ElementParity::Mixed => return Err(Error::NonHomogeneous),
        };
        let mut left = Matrix::zero(self.field.clone(), self.dim, self.dim);
        let mut right = Matrix::zero(self.field.clone(), self.dim, self.dim);
        for i in 0..self.dim {
            let b = self.basis(i);
            let rx = self.mul(&b, x);
            let lx = self.mul(x, &b);
            let negate = px.koszul_negates(self.parity[i]);
            for k in 0..self.dim {
                *right.at_mut(i, k) = rx.coords[k].clone();
                *left.at_mut(i, k) = lx.coords[k].neg_if(negate);
            }
        }
        Ok((
            LinearMap { parity: px, matrix: left },
            LinearMap { parity: px, matrix: right },
        ))
    }

    /// The supersymmetrized product `x • y = xy + (-1)^{p(x)p(y)} yx`,
    /// extended bilinearly over the homogeneous parts.
    pub fn sym_product(&self, x: &Element, y: &Element) -> Result<Element, Error> {
        self.signed_product(x, y, false)
    }

    /// The supercommutator `[x,y] = xy - (-1)^{p(x)p(y)} yx`, extended
    /// bilinearly over the homogeneous parts.
    pub fn super_commutator(&self, x: &Element, y: &Element) -> Result<Element, Error> {
        self.signed_product(x, y, true)
    }

    fn signed_product(&self, x: &Element, y: &Element, commutator: bool) -> Result<Element, Error> {
        if x.coords.len() != self.dim || y.coords.len() != self.dim {
            return Err(Error::AlgebraMismatch);
        }
        let (xe, xo) = self.homogeneous_parts(x);
        let (ye, yo) = self.homogeneous_parts(y);
        let mut out = self.zero_element();
        for (xp, xpart) in [(Parity::Even, &xe), (Parity::Odd, &xo)] {
            if xpart.is_zero() {
                continue;
            }
            for (yp, ypart) in [(Parity::Even, &ye), (Parity::Odd, &yo)] {
                if ypart.is_zero() {
                    continue;
                }
                let xy = self.mul(xpart, ypart);
                let yx = self.mul(ypart, xpart);
                let koszul = xp.koszul_negates(yp);
                // xy + (-1)^{xy} yx for the symmetric product,
                // xy - (-1)^{xy} yx for the commutator.
                let signed_yx = yx.scale_ref(&self.field.one().neg_if(koszul));
                let term = if commutator {
                    xy.sub_ref(&signed_yx)
                } else {
                    xy.add_ref(&signed_yx)
                };
                out = out.add_ref(&term);
            }
        }
        Ok(out)
    }

    /// Structure constants of the supercommutator bracket, packaged as an
    /// algebra on the same graded space.
    pub fn commutator_tensor(&self) -> SuperAlgebra {
        let mut table = Vec::with_capacity(self.dim * self.dim * self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                let koszul = self.parity[i].koszul_negates(self.parity[j]);
                for k in 0..self.dim {
                    let v = self.c(i, j, k).sub(&self.c(j, i, k).neg_if(koszul));
                    table.push(v);
                }
            }
        }
        SuperAlgebra {
            field: self.field.clone(),
            dim: self.dim,
            parity: self.parity.clone(),
            names: self.names.clone(),
            table,
        }
    }

    /// The Jordan symmetrization with the halved product
    /// `a ∘ b = ½(ab + (-1)^{p(a)p(b)} ba)`.
    ///
    /// Halving keeps idempotents idempotent, so symmetrizing any member of
    /// the K₃(α,β,γ) family lands exactly on the structure constants of the
    /// Jordan superalgebra K₃, and the original product is recovered as
    /// `ab = a∘b + ½[a,b]`.
    pub fn plus_algebra(&self) -> Result<SuperAlgebra, Error> {
        let half = self.field.half()?;
        let mut table = Vec::with_capacity(self.dim * self.dim * self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                let koszul = self.parity[i].koszul_negates(self.parity[j]);
                for k in 0..self.dim {
                    let v = self.c(i, j, k).add(&self.c(j, i, k).neg_if(koszul)).mul(&half);
                    table.push(v);
                }
            }
        }
        Ok(SuperAlgebra {
            field: self.field.clone(),
            dim: self.dim,
            parity: self.parity.clone(),
            names: self.names.clone(),
            table,
        })
    }

    /// Is the product supercommutative: `ab = (-1)^{p(a)p(b)} ba` on the
    /// tensor?
    pub fn is_supercommutative(&self) -> bool {
        for i in 0..self.dim {
            for j in 0..self.dim {
                let koszul = self.parity[i].koszul_negates(self.parity[j]);
                for k in 0..self.dim {
                    if *self.c(i, j, k) != self.c(j, i, k).neg_if(koszul) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Rebuilds an algebra with a modified structure tensor on the same
    /// graded space.
    pub fn with_table(&self, table: Vec<FieldValue>) -> Result<SuperAlgebra, Error> {
        SuperAlgebra::new(self.field.clone(), self.parity.clone(), self.names.clone(), table)
    }

    /// Pretty name of an element in this algebra's basis.
    pub fn format_element(&self, x: &Element) -> String {
        let mut parts = Vec::new();
        for (i, c) in x.coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if c.is_one() {
                parts.push(self.names[i].clone());
            } else {
                parts.push(format!("({})*{}", c, self.names[i]));
            }
        }
        if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join(" + ")
        }
    }
}

/// A coordinate vector in an algebra's basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Element {
    pub coords: Vec<FieldValue>,
}

impl Element {
    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    pub fn add_ref(&self, other: &Element) -> Element {
        Element {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn sub_ref(&self, other: &Element) -> Element {
        Element {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a.sub(b))
                .collect(),
        }
    }

    pub fn scale_ref(&self, c: &FieldValue) -> Element {
        Element { coords: self.coords.iter().map(|a| a.mul(c)).collect() }
    }

    pub fn neg_ref(&self) -> Element {
        Element { coords: self.coords.iter().map(|a| a.neg()).collect() }
    }
}

/// A parity-homogeneous linear map between graded spaces, acting on the
/// right of coordinate row vectors: row `i` holds the image of basis vector
/// `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearMap {
    pub parity: Parity,
    pub matrix: Matrix,
}

impl LinearMap {
    pub fn new(parity: Parity, matrix: Matrix) -> LinearMap {
        LinearMap { parity, matrix }
    }

    pub fn zero(field: Field, parity: Parity, dim: usize) -> LinearMap {
        LinearMap { parity, matrix: Matrix::zero(field, dim, dim) }
    }

    pub fn identity(field: Field, dim: usize) -> LinearMap {
        LinearMap { parity: Parity::Even, matrix: Matrix::identity(field, dim) }
    }

    /// Builds a map from the images of the source basis vectors.
    pub fn from_images(parity: Parity, field: Field, images: &[Element]) -> LinearMap {
        let rows = images.len();
        let cols = images.first().map_or(0, |e| e.coords.len());
        let mut m = Matrix::zero(field, rows, cols);
        for (i, img) in images.iter().enumerate() {
            for (k, c) in img.coords.iter().enumerate() {
                *m.at_mut(i, k) = c.clone();
            }
        }
        LinearMap { parity, matrix: m }
    }

    pub fn apply(&self, x: &Element) -> Element {
        Element { coords: self.matrix.apply_row(&x.coords) }
    }

    /// Image of the `i`-th source basis vector.
    pub fn image_of_basis(&self, i: usize) -> Element {
        Element { coords: self.matrix.row(i).to_vec() }
    }

    /// First `self`, then `other`.
    pub fn compose(&self, other: &LinearMap) -> LinearMap {
        LinearMap {
            parity: self.parity.plus(other.parity),
            matrix: self.matrix.mul(&other.matrix),
        }
    }

    pub fn add(&self, other: &LinearMap) -> LinearMap {
        assert_eq!(self.parity, other.parity, "adding maps of different parity");
        LinearMap { parity: self.parity, matrix: self.matrix.add(&other.matrix) }
    }

    pub fn sub(&self, other: &LinearMap) -> LinearMap {
        assert_eq!(self.parity, other.parity, "subtracting maps of different parity");
        LinearMap { parity: self.parity, matrix: self.matrix.sub(&other.matrix) }
    }

    pub fn scale(&self, c: &FieldValue) -> LinearMap {
        LinearMap { parity: self.parity, matrix: self.matrix.scale(c) }
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.is_zero()
    }

    /// Supercommutator `[P,Q] = PQ - (-1)^{p(P)p(Q)} QP`.
    pub fn supercommutator(&self, other: &LinearMap) -> LinearMap {
        let pq = self.matrix.mul(&other.matrix);
        let qp = other.matrix.mul(&self.matrix);
        let negate = self.parity.koszul_negates(other.parity);
        let m = if negate { pq.add(&qp) } else { pq.sub(&qp) };
        LinearMap { parity: self.parity.plus(other.parity), matrix: m }
    }

    /// Checks the parity block pattern: a parity-s map sends parity-r basis
    /// vectors into the parity-(r+s) subspace.
    pub fn respects_grading(&self, source: &[Parity], target: &[Parity]) -> bool {
        for i in 0..self.matrix.rows() {
            let want = source[i].plus(self.parity);
            for j in 0..self.matrix.cols() {
                if target[j] != want && !self.matrix.at(i, j).is_zero() {
                    return false;
                }
            }
        }
        true
    }

    /// Flattens the matrix row-major, for span computations on spaces of
    /// maps.
    pub fn flatten(&self) -> Vec<FieldValue> {
        let mut out = Vec::with_capacity(self.matrix.rows() * self.matrix.cols());
        for r in 0..self.matrix.rows() {
            out.extend(self.matrix.row(r).iter().cloned());
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    fn k3_sym() -> SuperAlgebra {
        let f = Field::rational_functions(["a", "b", "g"]);
        catalog::make_k3(
            &f.var("a").unwrap(),
            &f.var("b").unwrap(),
            &f.var("g").unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn grading_is_validated() {
        let f = Field::Q;
        // e odd but e*e = e violates grading.
        let mut table = vec![f.zero(); 1];
        table[0] = f.one();
        let err = SuperAlgebra::new(f, vec![Parity::Odd], vec!["e".into()], table);
        assert!(matches!(err, Err(Error::GradingViolation(0, 0, 0))));
    }

    #[test]
    fn k3_products_match_table() {
        let a = k3_sym();
        let f = a.field().clone();
        let (e, z, w) = (a.basis(0), a.basis(1), a.basis(2));
        // z·w = 2α e
        let zw = a.multiply(&z, &w).unwrap();
        let alpha = f.var("a").unwrap();
        assert_eq!(zw.coords[0], alpha.mul_int(2));
        // e·e = e
        let ee = a.multiply(&e, &e).unwrap();
        assert_eq!(ee, e);
    }

    #[test]
    fn mult_operator_signs() {
        let a = k3_sym();
        let f = a.field().clone();
        let e = a.basis(0);
        let (le, re) = a.mult_operators(&e).unwrap();
        let alpha = f.var("a").unwrap();
        let beta = f.var("b").unwrap();
        // (z)R_e = z·e = (1-α)z - βw
        assert_eq!(re.matrix.at(1, 1), &f.one().sub(&alpha));
        assert_eq!(re.matrix.at(1, 2), &beta.neg());
        // (z)L_e = +e·z = αz + βw
        assert_eq!(le.matrix.at(1, 1), &alpha);
        assert_eq!(le.matrix.at(1, 2), &beta);
    }

    #[test]
    fn sym_and_commutator_on_k3() {
        let a = k3_sym();
        let f = a.field().clone();
        let z = a.basis(1);
        let w = a.basis(2);
        let alpha = f.var("a").unwrap();
        // [z,w] = zw + wz = (4α-2) e
        let c = a.super_commutator(&z, &w).unwrap();
        assert_eq!(c.coords[0], alpha.mul_int(4).sub(&f.int(2)));
        // z • w = zw - wz = 2 e
        let s = a.sym_product(&z, &w).unwrap();
        assert_eq!(s.coords[0], f.int(2));
        // [e,e] = 0
        let e = a.basis(0);
        assert!(a.super_commutator(&e, &e).unwrap().is_zero());
    }

    #[test]
    fn plus_algebra_of_k3_is_k3_jordan() {
        let a = k3_sym();
        let plus = a.plus_algebra().unwrap();
        assert!(plus.is_supercommutative());
        let f = a.field().clone();
        // e∘e = e, z∘w = e, e∘z = ½z, z∘z = 0; independent of α, β, γ.
        assert!(plus.c(0, 0, 0).is_one());
        assert!(plus.c(1, 2, 0).is_one());
        assert_eq!(plus.c(0, 1, 1), &f.ratio(1, 2));
        assert!(plus.c(1, 1, 0).is_zero());
        // Exactly the tensor of K3(1/2, 0, 0) symmetrized (which is itself).
        let k3 = catalog::make_k3(
            &f.ratio(1, 2).to_field(&f),
            &f.zero(),
            &f.zero(),
        )
        .unwrap();
        assert_eq!(plus.table(), k3.plus_algebra().unwrap().table());
        assert_eq!(plus.table(), k3.table());
    }

    #[test]
    fn supercommutator_of_maps_obeys_parity() {
        let a = k3_sym();
        let z = a.basis(1);
        let (lz, rz) = a.mult_operators(&z).unwrap();
        assert_eq!(lz.parity, Parity::Odd);
        let b = lz.supercommutator(&rz);
        assert_eq!(b.parity, Parity::Even);
    }
}
