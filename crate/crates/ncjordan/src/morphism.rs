//! Homomorphism and automorphism verification, subalgebra closure testing
//! for the classified families, and exhaustive finite-field oracles.
//!
//! The symbolic side works over rational-function fields with free
//! parameters; the oracle side enumerates echelon-form subspaces and
//! parity-preserving invertible maps over a small prime field and checks
//! everything found against the predicted family shapes.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::catalog;
use crate::field::{Field, FieldValue};
use crate::linalg::Matrix;
use crate::superalg::{Element, LinearMap, Parity, SuperAlgebra};
use crate::Error;

/// Default budget for exhaustive searches (candidate count).
pub const DEFAULT_SEARCH_BUDGET: u128 = 20_000_000;

/// Worker count for the exhaustive oracles, from `NCJORDAN_WORKERS`
/// (default 1). Shards are merged in a fixed order, so results do not
/// depend on the worker count.
fn worker_count() -> usize {
    std::env::var("NCJORDAN_WORKERS")
        .ok()
        .and_then(|v| v.parse().ok())
        .filter(|&n| n >= 1)
        .unwrap_or(1)
}

/// Runs one job per shard, possibly on worker threads, and concatenates
/// the results in shard order.
fn sharded<T: Send>(shards: usize, job: impl Fn(usize) -> Vec<T> + Sync) -> Vec<T> {
    let workers = worker_count().min(shards.max(1));
    if workers <= 1 || shards <= 1 {
        return (0..shards).flat_map(job).collect();
    }
    let mut out: Vec<Vec<T>> = Vec::with_capacity(shards);
    std::thread::scope(|scope| {
        let job = &job;
        let handles: Vec<_> = (0..shards)
            .map(|s| scope.spawn(move || job(s)))
            .collect();
        for h in handles {
            out.push(h.join().expect("worker panicked"));
        }
    });
    out.into_iter().flatten().collect()
}

/// A linear map whose entries live in a rational-function field over free
/// parameters, with optional polynomial side conditions eliminated by
/// substitution (e.g. `g4 := (1 + g2*g3)/g1`).
#[derive(Debug, Clone)]
pub struct ParametricMap {
    pub map: LinearMap,
    pub constraints: Vec<(String, FieldValue)>,
}

impl ParametricMap {
    pub fn new(map: LinearMap) -> Self {
        ParametricMap { map, constraints: Vec::new() }
    }

    pub fn with_constraint(mut self, var: &str, value: FieldValue) -> Self {
        self.constraints.push((var.to_string(), value));
        self
    }

    /// The map with all constraints substituted into every entry.
    pub fn resolved(&self) -> Result<LinearMap, Error> {
        let m = &self.map.matrix;
        let mut out = Matrix::zero(m.field().clone(), m.rows(), m.cols());
        for r in 0..m.rows() {
            for c in 0..m.cols() {
                let mut v = m.at(r, c).clone();
                for (var, val) in &self.constraints {
                    v = v.substitute(var, val)?;
                }
                *out.at_mut(r, c) = v;
            }
        }
        Ok(LinearMap::new(self.map.parity, out))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct HomReport {
    pub is_homomorphism: bool,
    /// Basis pairs with a nonzero residual `φ(b_i b_j) - φ(b_i)φ(b_j)`.
    pub residuals: Vec<(usize, usize, Vec<String>)>,
}

/// Verifies `φ(b_i b_j) = φ(b_i) φ(b_j)` for all basis pairs, exactly over
/// the coefficient field. The map must be parity preserving.
pub fn is_homomorphism(
    a: &SuperAlgebra,
    b: &SuperAlgebra,
    phi: &LinearMap,
) -> Result<HomReport, Error> {
    if phi.parity != Parity::Even || !phi.respects_grading(a.parities(), b.parities()) {
        return Err(Error::ParityViolation);
    }
    let mut residuals = Vec::new();
    for i in 0..a.dim() {
        let phi_i = phi.image_of_basis(i);
        for j in 0..a.dim() {
            let phi_j = phi.image_of_basis(j);
            let lhs = phi.apply(&a.multiply(&a.basis(i), &a.basis(j))?);
            let rhs = b.multiply(&phi_i, &phi_j)?;
            let res = lhs.sub_ref(&rhs);
            if !res.is_zero() {
                residuals.push((i, j, res.coords.iter().map(|c| c.to_string()).collect()));
            }
        }
    }
    Ok(HomReport { is_homomorphism: residuals.is_empty(), residuals })
}

#[derive(Debug, Clone, Serialize)]
pub struct AutReport {
    pub is_automorphism: bool,
    pub invertible: bool,
    pub hom: HomReport,
}

/// Endomorphism check plus invertibility over the coefficient field.
pub fn is_automorphism(a: &SuperAlgebra, phi: &LinearMap) -> Result<AutReport, Error> {
    let hom = is_homomorphism(a, a, phi)?;
    let invertible = phi.matrix.is_invertible();
    Ok(AutReport { is_automorphism: hom.is_homomorphism && invertible, invertible, hom })
}

/// A subspace witness: generators, an echelonized basis and its pivots.
#[derive(Debug, Clone)]
pub struct SubalgebraWitness {
    pub basis: Matrix,
    pub pivots: Vec<usize>,
}

impl SubalgebraWitness {
    pub fn from_generators(a: &SuperAlgebra, generators: &[Element]) -> SubalgebraWitness {
        let rows: Vec<Vec<FieldValue>> = generators.iter().map(|g| g.coords.clone()).collect();
        let m = Matrix::from_rows(a.field().clone(), rows);
        let (red, rank, pivots) = m.rref();
        let basis = Matrix::from_rows(
            a.field().clone(),
            (0..rank).map(|r| red.row(r).to_vec()).collect(),
        );
        SubalgebraWitness { basis, pivots }
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    /// Reduces a vector against the echelon basis; zero remainder means
    /// membership.
    fn reduce(&self, v: &[FieldValue]) -> Vec<FieldValue> {
        let mut rem: Vec<FieldValue> = v.to_vec();
        for (row, &p) in self.pivots.iter().enumerate() {
            if rem[p].is_zero() {
                continue;
            }
            let c = rem[p].clone();
            for (k, r) in rem.iter_mut().enumerate() {
                *r = r.sub(&c.mul(self.basis.at(row, k)));
            }
        }
        rem
    }

    pub fn contains(&self, v: &[FieldValue]) -> bool {
        self.reduce(v).iter().all(|c| c.is_zero())
    }

    /// A stable fingerprint of the subspace over GF(p), for set matching.
    fn fingerprint(&self) -> Vec<String> {
        (0..self.basis.rows())
            .flat_map(|r| self.basis.row(r).iter().map(|c| c.to_string()))
            .collect()
    }
}

/// Is the span multiplicatively closed? Each pairwise product of basis
/// vectors is reduced against the echelon basis.
pub fn is_subalgebra(a: &SuperAlgebra, w: &SubalgebraWitness) -> bool {
    for i in 0..w.dim() {
        let u = Element { coords: w.basis.row(i).to_vec() };
        for j in 0..w.dim() {
            let v = Element { coords: w.basis.row(j).to_vec() };
            let prod = a.multiply(&u, &v).expect("witness lives in the algebra");
            if !w.contains(&prod.coords) {
                return false;
            }
        }
    }
    true
}

/// The multiplication table induced on a closed witness, expressed in the
/// echelon basis.
pub fn induced_subalgebra(a: &SuperAlgebra, w: &SubalgebraWitness) -> Option<SuperAlgebra> {
    let d = w.dim();
    let mut table = vec![a.field().zero(); d * d * d];
    let span_t = w.basis.transpose();
    let mut parity = Vec::with_capacity(d);
    for i in 0..d {
        let row = Element { coords: w.basis.row(i).to_vec() };
        match a.parity_of(&row) {
            crate::superalg::ElementParity::Homogeneous(p) => parity.push(p),
            crate::superalg::ElementParity::Mixed => return None,
        }
    }
    for i in 0..d {
        let u = Element { coords: w.basis.row(i).to_vec() };
        for j in 0..d {
            let v = Element { coords: w.basis.row(j).to_vec() };
            let prod = a.multiply(&u, &v).ok()?;
            let coords = span_t.solve(&prod.coords)?;
            for (k, c) in coords.into_iter().enumerate() {
                table[(i * d + j) * d + k] = c;
            }
        }
    }
    SuperAlgebra::new(
        a.field().clone(),
        parity,
        (0..d).map(|i| format!("m{}", i + 1)).collect(),
        table,
    )
    .ok()
}

// ---------------------------------------------------------------------------
// Classified subalgebra families
// ---------------------------------------------------------------------------

/// Parameters of the ambient algebra a shape may refer to.
pub struct AlgebraParams {
    pub alpha: FieldValue,
    pub t: Option<FieldValue>,
}

/// One generator-shape of a classified family. `build` returns `None` when
/// the shape is undefined at the given parameters (vanishing denominator or
/// missing square root). Shapes marked `concrete_only` need element-wise
/// square roots and are used by the finite-field oracle but skipped in the
/// symbolic run, where a rational parameterization stands in for them.
pub struct FamilyShape {
    pub label: &'static str,
    pub params: usize,
    pub concrete_only: bool,
    pub build: fn(&SuperAlgebra, &AlgebraParams, &[FieldValue]) -> Option<Vec<Element>>,
}

fn el(a: &SuperAlgebra, parts: &[(usize, FieldValue)]) -> Element {
    a.combo(parts)
}

fn one(a: &SuperAlgebra) -> FieldValue {
    a.field().one()
}

// K3 shapes; basis (e, z, w) = (0, 1, 2).
fn k3_line_ezw(a: &SuperAlgebra, _p: &AlgebraParams, g: &[FieldValue]) -> Option<Vec<Element>> {
    Some(vec![el(a, &[(0, g[0].clone()), (1, g[1].clone()), (2, g[2].clone())])])
}
fn k3_line_ez(a: &SuperAlgebra, _p: &AlgebraParams, g: &[FieldValue]) -> Option<Vec<Element>> {
    Some(vec![el(a, &[(0, g[0].clone()), (1, g[1].clone())])])
}
fn k3_line_ew(a: &SuperAlgebra, _p: &AlgebraParams, g: &[FieldValue]) -> Option<Vec<Element>> {
    Some(vec![el(a, &[(0, g[0].clone()), (2, g[1].clone())])])
}
fn k3_plane_e_odd(a: &SuperAlgebra, _p: &AlgebraParams, g: &[FieldValue]) -> Option<Vec<Element>> {
    Some(vec![a.basis(0), el(a, &[(1, g[0].clone()), (2, g[1].clone())])])
}
fn k3_plane_ez(a: &SuperAlgebra, _p: &AlgebraParams, _g: &[FieldValue]) -> Option<Vec<Element>> {
    Some(vec![a.basis(0), a.basis(1)])
}
fn k3_plane_ew(a: &SuperAlgebra, _p: &AlgebraParams, _g: &[FieldValue]) -> Option<Vec<Element>> {
    Some(vec![a.basis(0), a.basis(2)])
}

// D_t shapes; basis (e1, e2, x, y) = (0, 1, 2, 3).
fn dt_unit(a: &SuperAlgebra, _p: &AlgebraParams, _g: &[FieldValue]) -> Option<Vec<Element>> {
    Some(vec![el(a, &[(0, one(a)), (1, one(a))])])
}
fn dt_line(i: usize, odd: usize) -> impl Fn(&SuperAlgebra, &AlgebraParams, &[FieldValue]) -> Option<Vec<Element>> {
    move |a, _p, g| Some(vec![el(a, &[(i, g[0].clone()), (odd, g[1].clone())])])
}
fn dt_line_e1x(a: &SuperAlgebra, p: &AlgebraParams, g: &[FieldValue]) -> Option<Vec<Element>> {
    dt_line(0, 2)(a, p, g)
}
fn dt_line_e2x(a: &SuperAlgebra, p: &AlgebraParams, g: &[FieldValue]) -> Option<Vec<Element>> {
    dt_line(1, 2)(a, p, g)
}
fn dt_line_e1y(a: &SuperAlgebra, p: &AlgebraParams, g: &[FieldValue]) -> Option<Vec<Element>> {
    dt_line(0, 3)(a, p, g)
}
fn dt_line_e2y(a: &SuperAlgebra, p: &AlgebraParams, g: &[FieldValue]) -> Option<Vec<Element>> {
    dt_line(1, 3)(a, p, g)
}
fn dt_line_xy(a: &SuperAlgebra, _p: &AlgebraParams, g: &[FieldValue]) -> Option<Vec<Element>> {
    Some(vec![el(a, &[(2, g[0].clone()), (3, g[1].clone())])])
}
fn dt_line_e1xy(a: &SuperAlgebra, _p: &AlgebraParams, g: &[FieldValue]) -> Option<Vec<Element>> {
    Some(vec![el(a, &[(0, one(a)), (2, g[0].clone()), (3, g[1].clone())])])
}
fn dt_line_e2xy(a: &SuperAlgebra, _p: &AlgebraParams, g: &[FieldValue]) -> Option<Vec<Element>> {
    Some(vec![el(a, &[(1, one(a)), (2, g[0].clone()), (3, g[1].clone())])])
}
fn dt_exotic_line(a: &SuperAlgebra, p: &AlgebraParams, g: &[FieldValue]) -> Option<Vec<Element>> {
    // g1 e1 + g2 e2 + g3 x + (g1 g2 / (g3 (4α - 2))) y
    let denom = g[2].mul(&p.alpha.mul_int(4).sub(&one(a).mul_int(2)));
    if denom.is_zero() {
        return None;
    }
    let coeff = g[0].mul(&g[1]).div(&denom).ok()?;
    Some(vec![el(
        a,
        &[(0, g[0].clone()), (1, g[1].clone()), (2, g[2].clone()), (3, coeff)],
    )])
}
fn dt_sqrt_line(a: &SuperAlgebra, _p: &AlgebraParams, g: &[FieldValue]) -> Option<Vec<Element>> {
    // g1 e1 + g2 e2 + sqrt(-g1 g2) x + g3 y (only where the root exists).
    let r = super_sqrt(&g[0].mul(&g[1]).neg())?;
    Some(vec![el(
        a,
        &[(0, g[0].clone()), (1, g[1].clone()), (2, r), (3, g[2].clone())],
    )])
}
fn dt_sqrt_line_neg(a: &SuperAlgebra, _p: &AlgebraParams, g: &[FieldValue]) -> Option<Vec<Element>> {
    // The other branch of the square root.
    let r = super_sqrt(&g[0].mul(&g[1]).neg())?;
    Some(vec![el(
        a,
        &[(0, g[0].clone()), (1, g[1].clone()), (2, r.neg()), (3, g[2].clone())],
    )])
}
fn dt_sqrt_line_slice(a: &SuperAlgebra, _p: &AlgebraParams, g: &[FieldValue]) -> Option<Vec<Element>> {
    // The rational slice g1 = u^2, g2 = -v^2, sqrt = uv over Q(u, v, g3).
    let (u, v, g3) = (&g[0], &g[1], &g[2]);
    Some(vec![el(
        a,
        &[
            (0, u.mul(u)),
            (1, v.mul(v).neg()),
            (2, u.mul(v)),
            (3, g3.clone()),
        ],
    )])
}
fn dt_pair_e1e2(a: &SuperAlgebra, _p: &AlgebraParams, _g: &[FieldValue]) -> Option<Vec<Element>> {
    Some(vec![a.basis(0), a.basis(1)])
}
fn dt_pair(i: usize, odd: usize) -> fn(&SuperAlgebra, &AlgebraParams, &[FieldValue]) -> Option<Vec<Element>> {
    match (i, odd) {
        (0, 2) => |a, _p, _g| Some(vec![a.basis(0), a.basis(2)]),
        (1, 2) => |a, _p, _g| Some(vec![a.basis(1), a.basis(2)]),
        (0, 3) => |a, _p, _g| Some(vec![a.basis(0), a.basis(3)]),
        (1, 3) => |a, _p, _g| Some(vec![a.basis(1), a.basis(3)]),
        _ => unreachable!(),
    }
}
fn dt_pair_unit_x(a: &SuperAlgebra, _p: &AlgebraParams, _g: &[FieldValue]) -> Option<Vec<Element>> {
    Some(vec![el(a, &[(0, one(a)), (1, one(a))]), a.basis(2)])
}
fn dt_pair_unit_y(a: &SuperAlgebra, _p: &AlgebraParams, _g: &[FieldValue]) -> Option<Vec<Element>> {
    Some(vec![el(a, &[(0, one(a)), (1, one(a))]), a.basis(3)])
}
fn dt_pair_unit_xy(a: &SuperAlgebra, _p: &AlgebraParams, g: &[FieldValue]) -> Option<Vec<Element>> {
    Some(vec![
        el(a, &[(0, one(a)), (1, one(a))]),
        el(a, &[(2, g[0].clone()), (3, g[1].clone())]),
    ])
}
fn dt_pair_e1_line(a: &SuperAlgebra, _p: &AlgebraParams, g: &[FieldValue]) -> Option<Vec<Element>> {
    Some(vec![a.basis(0), el(a, &[(2, g[0].clone()), (3, g[1].clone())])])
}
fn dt_pair_e2_line(a: &SuperAlgebra, _p: &AlgebraParams, g: &[FieldValue]) -> Option<Vec<Element>> {
    Some(vec![a.basis(1), el(a, &[(2, g[0].clone()), (3, g[1].clone())])])
}
fn dt_triple_split_tail(a: &SuperAlgebra, p: &AlgebraParams, g: &[FieldValue]) -> Option<Vec<Element>> {
    // (e1 + g*y, e2 - g*y, x + d*y) closes at t = -1 exactly when
    // d*(4a-2) = 4g^2.
    let denom = p.alpha.mul_int(4).sub(&one(a).mul_int(2));
    if denom.is_zero() {
        return None;
    }
    let d = g[0].mul(&g[0]).mul_int(4).div(&denom).ok()?;
    Some(vec![
        el(a, &[(0, one(a)), (3, g[0].clone())]),
        el(a, &[(1, one(a)), (3, g[0].neg())]),
        el(a, &[(2, one(a)), (3, d)]),
    ])
}
fn dt_pair_split_x(a: &SuperAlgebra, _p: &AlgebraParams, g: &[FieldValue]) -> Option<Vec<Element>> {
    Some(vec![
        el(a, &[(0, one(a)), (2, g[0].clone())]),
        el(a, &[(1, one(a)), (2, g[0].neg())]),
    ])
}
fn dt_pair_split_y(a: &SuperAlgebra, _p: &AlgebraParams, g: &[FieldValue]) -> Option<Vec<Element>> {
    Some(vec![
        el(a, &[(0, one(a)), (3, g[0].clone())]),
        el(a, &[(1, one(a)), (3, g[0].neg())]),
    ])
}
fn dt_pair_split_xy(a: &SuperAlgebra, _p: &AlgebraParams, g: &[FieldValue]) -> Option<Vec<Element>> {
    Some(vec![
        el(a, &[(0, one(a)), (2, g[0].clone()), (3, g[1].clone())]),
        el(a, &[(1, one(a)), (2, g[0].neg()), (3, g[1].neg())]),
    ])
}
fn dt_triple_x(a: &SuperAlgebra, _p: &AlgebraParams, _g: &[FieldValue]) -> Option<Vec<Element>> {
    Some(vec![a.basis(0), a.basis(1), a.basis(2)])
}
fn dt_triple_y(a: &SuperAlgebra, _p: &AlgebraParams, _g: &[FieldValue]) -> Option<Vec<Element>> {
    Some(vec![a.basis(0), a.basis(1), a.basis(3)])
}
fn dt_triple_xy(a: &SuperAlgebra, _p: &AlgebraParams, g: &[FieldValue]) -> Option<Vec<Element>> {
    Some(vec![
        a.basis(0),
        a.basis(1),
        el(a, &[(2, g[0].clone()), (3, g[1].clone())]),
    ])
}
fn dt_triple_t1(a: &SuperAlgebra, _p: &AlgebraParams, g: &[FieldValue]) -> Option<Vec<Element>> {
    Some(vec![
        el(a, &[(0, one(a)), (1, one(a))]),
        el(a, &[(1, g[0].clone()), (2, one(a))]),
        el(a, &[(1, g[1].clone()), (3, one(a))]),
    ])
}
fn dt_triple_2i_plus(a: &SuperAlgebra, _p: &AlgebraParams, g: &[FieldValue]) -> Option<Vec<Element>> {
    dt_triple_2i(a, g, false)
}
fn dt_triple_2i_minus(a: &SuperAlgebra, _p: &AlgebraParams, g: &[FieldValue]) -> Option<Vec<Element>> {
    dt_triple_2i(a, g, true)
}
fn dt_triple_2i(a: &SuperAlgebra, g: &[FieldValue], minus: bool) -> Option<Vec<Element>> {
    // (e1+e2, g e2 + x, ±2i e2 + y) where i is a square root of -1.
    let i = super_sqrt(&one(a).neg())?;
    let two_i = i.mul_int(2).neg_if(minus);
    Some(vec![
        el(a, &[(0, one(a)), (1, one(a))]),
        el(a, &[(1, g[0].clone()), (2, one(a))]),
        el(a, &[(1, two_i), (3, one(a))]),
    ])
}

/// Square root in the coefficient field when one exists (rationals,
/// quadratic residues mod p, constants of function fields).
fn super_sqrt(v: &FieldValue) -> Option<FieldValue> {
    use num_traits::Signed;
    match v {
        FieldValue::Rational(r) => {
            if r.is_negative() {
                return None;
            }
            let n = r.numer().sqrt();
            let d = r.denom().sqrt();
            if &(&n * &n) == r.numer() && &(&d * &d) == r.denom() {
                Some(FieldValue::Rational(num_rational::BigRational::new(n, d)))
            } else {
                None
            }
        }
        FieldValue::PrimeField { p, value } => (0..*p)
            .find(|r| (r * r) % p == *value)
            .map(|r| FieldValue::PrimeField { p: *p, value: r }),
        FieldValue::RatFunc(_) => {
            let field = v.field();
            let Field::Func(ff) = &field else { unreachable!() };
            let zero = match ff.base {
                crate::field::BaseField::Q => Field::Q.zero(),
                crate::field::BaseField::Fp(p) => Field::Fp(p).zero(),
            };
            let bindings: std::collections::BTreeMap<String, FieldValue> =
                ff.vars.iter().map(|n| (n.clone(), zero.clone())).collect();
            let at0 = v.evaluate(&bindings).ok()?;
            if at0.to_field(&field) != *v {
                return None;
            }
            Some(super_sqrt(&at0)?.to_field(&field))
        }
    }
}

/// Which classification list a family item belongs to, keyed by the
/// algebra member it describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyClass {
    /// Subalgebras of K3(α).
    K3Alpha,
    /// Subalgebras of the β = 1/2 member K3(1/2, 1/2, 0).
    K3Half,
    /// Subalgebras of D_t(α).
    DtAlpha,
    /// Subalgebras of the β = 1/2 member D_t(1/2, 1/2, 0).
    DtHalf,
}

impl std::fmt::Display for FamilyClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FamilyClass::K3Alpha => write!(f, "k3"),
            FamilyClass::K3Half => write!(f, "k3-half"),
            FamilyClass::DtAlpha => write!(f, "dt"),
            FamilyClass::DtHalf => write!(f, "dt-half"),
        }
    }
}

/// One item of a classified-subalgebra list: the ambient specialization
/// plus the generator shapes.
pub struct FamilyItem {
    pub class: FamilyClass,
    pub item: u8,
    pub case: AmbientCase,
    pub shapes: Vec<FamilyShape>,
}

/// Which member of the K3 / D_t family the item talks about.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AmbientCase {
    /// K3(α) with generic α.
    K3Generic,
    /// K3 = K3(1/2).
    K3Jordan,
    /// K3(1/2, 1/2, 0).
    K3Half,
    /// D_t(α), α generic, t away from -1.
    DtGeneric,
    /// D_t(α), α generic, any t.
    DtAlphaGenericAnyT,
    /// D_t(1/2), any t.
    DtAlphaHalfAnyT,
    /// D_t(1/2), t away from 1.
    DtAlphaHalfTNotOne,
    /// D_{-1}(α), α generic.
    DtTMinusOne,
    /// D_1(1/2).
    DtAlphaHalfTOne,
    /// D_t(1/2, 1/2, 0), t generic.
    DtHalfGeneric,
    /// D_{-1}(1/2, 1/2, 0).
    DtHalfTMinusOne,
}

impl AmbientCase {
    /// Builds the symbolic ambient algebra over a function field with the
    /// given free shape parameters, returning the algebra parameters too.
    fn symbolic(&self, shape_vars: &[&str]) -> Result<(SuperAlgebra, AlgebraParams), Error> {
        let mut vars: Vec<String> = Vec::new();
        match self {
            AmbientCase::K3Generic
            | AmbientCase::DtGeneric
            | AmbientCase::DtAlphaGenericAnyT
            | AmbientCase::DtTMinusOne => vars.push("a".into()),
            _ => {}
        }
        match self {
            AmbientCase::DtGeneric
            | AmbientCase::DtAlphaGenericAnyT
            | AmbientCase::DtAlphaHalfAnyT
            | AmbientCase::DtAlphaHalfTNotOne
            | AmbientCase::DtHalfGeneric => vars.push("t".into()),
            _ => {}
        }
        vars.extend(shape_vars.iter().map(|s| s.to_string()));
        // The ±2i shapes need a square root of -1: run those over GF(13).
        let needs_i = matches!(self, AmbientCase::DtHalfTMinusOne) && !shape_vars.is_empty();
        let field = if needs_i {
            Field::rational_functions_mod(13, vars)
        } else {
            Field::rational_functions(vars)
        };
        let half = field.half()?;
        let zero = field.zero();
        let (alg, params) = match self {
            AmbientCase::K3Generic => {
                let alpha = field.var("a")?;
                (catalog::make_k3(&alpha, &zero, &zero)?, AlgebraParams { alpha, t: None })
            }
            AmbientCase::K3Jordan => (
                catalog::make_k3(&half, &zero, &zero)?,
                AlgebraParams { alpha: half.clone(), t: None },
            ),
            AmbientCase::K3Half => (
                catalog::make_k3(&half, &half, &zero)?,
                AlgebraParams { alpha: half.clone(), t: None },
            ),
            AmbientCase::DtGeneric | AmbientCase::DtAlphaGenericAnyT => {
                let alpha = field.var("a")?;
                let t = field.var("t")?;
                (
                    catalog::make_dt(&t, &alpha, &zero, &zero)?,
                    AlgebraParams { alpha, t: Some(t) },
                )
            }
            AmbientCase::DtAlphaHalfAnyT | AmbientCase::DtAlphaHalfTNotOne => {
                let t = field.var("t")?;
                (
                    catalog::make_dt(&t, &half, &zero, &zero)?,
                    AlgebraParams { alpha: half.clone(), t: Some(t) },
                )
            }
            AmbientCase::DtTMinusOne => {
                let alpha = field.var("a")?;
                let t = field.int(-1);
                (
                    catalog::make_dt(&t, &alpha, &zero, &zero)?,
                    AlgebraParams { alpha, t: Some(t) },
                )
            }
            AmbientCase::DtAlphaHalfTOne => {
                let t = field.one();
                (
                    catalog::make_dt(&t, &half, &zero, &zero)?,
                    AlgebraParams { alpha: half.clone(), t: Some(t) },
                )
            }
            AmbientCase::DtHalfGeneric => {
                let t = field.var("t")?;
                (
                    catalog::make_dt(&t, &half, &half, &zero)?,
                    AlgebraParams { alpha: half.clone(), t: Some(t) },
                )
            }
            AmbientCase::DtHalfTMinusOne => {
                let t = field.int(-1);
                (
                    catalog::make_dt(&t, &half, &half, &zero)?,
                    AlgebraParams { alpha: half.clone(), t: Some(t) },
                )
            }
        };
        Ok((alg, params))
    }

    /// Does this case describe the given concrete parameters?
    pub fn matches(&self, alpha: &FieldValue, beta: &FieldValue, t: Option<&FieldValue>) -> bool {
        let f = alpha.field();
        let half = match f.half() {
            Ok(h) => h,
            Err(_) => return false,
        };
        let is_half = *alpha == half;
        let beta_half = *beta == half;
        let beta_zero = beta.is_zero();
        let minus_one = f.int(-1);
        let one = f.one();
        match self {
            AmbientCase::K3Generic => beta_zero && !is_half && t.is_none(),
            AmbientCase::K3Jordan => beta_zero && is_half && t.is_none(),
            AmbientCase::K3Half => beta_half && is_half && t.is_none(),
            AmbientCase::DtGeneric => {
                beta_zero && !is_half && t.map_or(false, |t| *t != minus_one)
            }
            AmbientCase::DtAlphaGenericAnyT => beta_zero && !is_half && t.is_some(),
            AmbientCase::DtAlphaHalfAnyT => beta_zero && is_half && t.is_some(),
            AmbientCase::DtAlphaHalfTNotOne => beta_zero && is_half && t.map_or(false, |t| *t != one),
            AmbientCase::DtTMinusOne => beta_zero && !is_half && t.map_or(false, |t| *t == minus_one),
            AmbientCase::DtAlphaHalfTOne => beta_zero && is_half && t.map_or(false, |t| *t == one),
            AmbientCase::DtHalfGeneric => beta_half && is_half && t.map_or(false, |t| *t != minus_one),
            AmbientCase::DtHalfTMinusOne => beta_half && is_half && t.map_or(false, |t| *t == minus_one),
        }
    }
}

/// The full table of classified family items.
pub fn family_table() -> Vec<FamilyItem> {
    use AmbientCase::*;
    vec![
        FamilyItem {
            class: FamilyClass::K3Alpha,
            item: 1,
            case: K3Jordan,
            shapes: vec![FamilyShape { label: "g1*e + g2*z + g3*w", params: 3, concrete_only: false, build: k3_line_ezw }],
        },
        FamilyItem {
            class: FamilyClass::K3Alpha,
            item: 2,
            case: K3Generic,
            shapes: vec![
                FamilyShape { label: "g1*e + g2*z", params: 2, concrete_only: false, build: k3_line_ez },
                FamilyShape { label: "g1*e + g2*w", params: 2, concrete_only: false, build: k3_line_ew },
            ],
        },
        FamilyItem {
            class: FamilyClass::K3Alpha,
            item: 3,
            case: K3Jordan,
            shapes: vec![FamilyShape { label: "(e, g1*z + g2*w)", params: 2, concrete_only: false, build: k3_plane_e_odd }],
        },
        FamilyItem {
            class: FamilyClass::K3Alpha,
            item: 4,
            case: K3Generic,
            shapes: vec![
                FamilyShape { label: "(e, z)", params: 0, concrete_only: false, build: k3_plane_ez },
                FamilyShape { label: "(e, w)", params: 0, concrete_only: false, build: k3_plane_ew },
            ],
        },
        FamilyItem {
            class: FamilyClass::K3Half,
            item: 1,
            case: K3Half,
            shapes: vec![FamilyShape { label: "g1*e + g2*w", params: 2, concrete_only: false, build: k3_line_ew }],
        },
        FamilyItem {
            class: FamilyClass::K3Half,
            item: 2,
            case: K3Half,
            shapes: vec![FamilyShape { label: "(e, w)", params: 0, concrete_only: false, build: k3_plane_ew }],
        },
        FamilyItem {
            class: FamilyClass::DtAlpha,
            item: 1,
            case: DtGeneric,
            shapes: vec![
                FamilyShape { label: "e1 + e2", params: 0, concrete_only: false, build: dt_unit },
                FamilyShape { label: "g1*e1 + g2*x", params: 2, concrete_only: false, build: dt_line_e1x },
                FamilyShape { label: "g1*e2 + g2*x", params: 2, concrete_only: false, build: dt_line_e2x },
                FamilyShape { label: "g1*e1 + g2*y", params: 2, concrete_only: false, build: dt_line_e1y },
                FamilyShape { label: "g1*e2 + g2*y", params: 2, concrete_only: false, build: dt_line_e2y },
            ],
        },
        FamilyItem {
            class: FamilyClass::DtAlpha,
            item: 2,
            case: DtAlphaHalfAnyT,
            shapes: vec![
                FamilyShape { label: "e1 + e2", params: 0, concrete_only: false, build: dt_unit },
                FamilyShape { label: "g1*x + g2*y", params: 2, concrete_only: false, build: dt_line_xy },
                FamilyShape { label: "e1 + g1*x + g2*y", params: 2, concrete_only: false, build: dt_line_e1xy },
                FamilyShape { label: "e2 + g1*x + g2*y", params: 2, concrete_only: false, build: dt_line_e2xy },
            ],
        },
        FamilyItem {
            class: FamilyClass::DtAlpha,
            item: 3,
            case: DtTMinusOne,
            shapes: vec![
                FamilyShape { label: "e1 + e2", params: 0, concrete_only: false, build: dt_unit },
                FamilyShape { label: "g1*e1 + g2*x", params: 2, concrete_only: false, build: dt_line_e1x },
                FamilyShape { label: "g1*e2 + g2*x", params: 2, concrete_only: false, build: dt_line_e2x },
                FamilyShape { label: "g1*e1 + g2*y", params: 2, concrete_only: false, build: dt_line_e1y },
                FamilyShape { label: "g1*e2 + g2*y", params: 2, concrete_only: false, build: dt_line_e2y },
                FamilyShape {
                    label: "g1*e1 + g2*e2 + g3*x + (g1*g2/(g3*(4a-2)))*y",
                    params: 3,
                    concrete_only: false,
                    build: dt_exotic_line,
                },
            ],
        },
        FamilyItem {
            class: FamilyClass::DtAlpha,
            item: 4,
            case: DtGeneric,
            shapes: vec![
                FamilyShape { label: "(e1, e2)", params: 0, concrete_only: false, build: dt_pair_e1e2 },
                FamilyShape { label: "(e1, x)", params: 0, concrete_only: false, build: dt_pair(0, 2) },
                FamilyShape { label: "(e2, x)", params: 0, concrete_only: false, build: dt_pair(1, 2) },
                FamilyShape { label: "(e1, y)", params: 0, concrete_only: false, build: dt_pair(0, 3) },
                FamilyShape { label: "(e2, y)", params: 0, concrete_only: false, build: dt_pair(1, 3) },
                FamilyShape { label: "(e1+e2, x)", params: 0, concrete_only: false, build: dt_pair_unit_x },
                FamilyShape { label: "(e1+e2, y)", params: 0, concrete_only: false, build: dt_pair_unit_y },
                FamilyShape { label: "(e1 + g*x, e2 - g*x)", params: 1, concrete_only: false, build: dt_pair_split_x },
                FamilyShape { label: "(e1 + g*y, e2 - g*y)", params: 1, concrete_only: false, build: dt_pair_split_y },
            ],
        },
        FamilyItem {
            class: FamilyClass::DtAlpha,
            item: 5,
            // At alpha = 1/2 every odd line pairs with e1, e2 or the unit,
            // for every t (exhaustive search; the pure x and y pairs of the
            // printed list are specializations).
            case: DtAlphaHalfAnyT,
            shapes: vec![
                FamilyShape { label: "(e1, e2)", params: 0, concrete_only: false, build: dt_pair_e1e2 },
                FamilyShape { label: "(e1, g1*x + g2*y)", params: 2, concrete_only: false, build: dt_pair_e1_line },
                FamilyShape { label: "(e2, g1*x + g2*y)", params: 2, concrete_only: false, build: dt_pair_e2_line },
                FamilyShape { label: "(e1+e2, g1*x + g2*y)", params: 2, concrete_only: false, build: dt_pair_unit_xy },
                FamilyShape {
                    label: "(e1 + g1*x + g2*y, e2 - g1*x - g2*y)",
                    params: 2,
                    concrete_only: false,
                    build: dt_pair_split_xy,
                },
            ],
        },
        FamilyItem {
            class: FamilyClass::DtAlpha,
            item: 6,
            case: DtTMinusOne,
            shapes: vec![
                FamilyShape { label: "(e1, e2)", params: 0, concrete_only: false, build: dt_pair_e1e2 },
                FamilyShape { label: "(e1, x)", params: 0, concrete_only: false, build: dt_pair(0, 2) },
                FamilyShape { label: "(e2, x)", params: 0, concrete_only: false, build: dt_pair(1, 2) },
                FamilyShape { label: "(e1, y)", params: 0, concrete_only: false, build: dt_pair(0, 3) },
                FamilyShape { label: "(e2, y)", params: 0, concrete_only: false, build: dt_pair(1, 3) },
                FamilyShape { label: "(e1 + g*y, e2 - g*y)", params: 1, concrete_only: false, build: dt_pair_split_y },
                FamilyShape { label: "(e1 + g*x, e2 - g*x)", params: 1, concrete_only: false, build: dt_pair_split_x },
                FamilyShape { label: "(e1+e2, g1*x + g2*y)", params: 2, concrete_only: false, build: dt_pair_unit_xy },
                // Exhaustive search shows the mixed split pairs also close
                // when the two idempotent weights sum to the unit; this
                // two-parameter family subsumes the pure x and y splits.
                FamilyShape {
                    label: "(e1 + g1*x + g2*y, e2 - g1*x - g2*y)",
                    params: 2,
                    concrete_only: false,
                    build: dt_pair_split_xy,
                },
            ],
        },
        FamilyItem {
            class: FamilyClass::DtAlpha,
            item: 7,
            case: DtAlphaGenericAnyT,
            shapes: vec![
                FamilyShape { label: "(e1, e2, x)", params: 0, concrete_only: false, build: dt_triple_x },
                FamilyShape { label: "(e1, e2, y)", params: 0, concrete_only: false, build: dt_triple_y },
            ],
        },
        FamilyItem {
            class: FamilyClass::DtAlpha,
            item: 8,
            case: DtAlphaHalfTNotOne,
            shapes: vec![FamilyShape { label: "(e1, e2, g1*x + g2*y)", params: 2, concrete_only: false, build: dt_triple_xy }],
        },
        FamilyItem {
            class: FamilyClass::DtAlpha,
            item: 9,
            case: DtAlphaHalfTOne,
            shapes: vec![
                FamilyShape {
                    label: "(e1+e2, g1*e2 + x, g2*e2 + y)",
                    params: 2,
                    concrete_only: false,
                    build: dt_triple_t1,
                },
                FamilyShape { label: "(e1, e2, g1*x + g2*y)", params: 2, concrete_only: false, build: dt_triple_xy },
            ],
        },
        FamilyItem {
            // Completion found by exhaustive search: at t = -1 a third kind
            // of three-dimensional subalgebra exists for generic alpha,
            // spanned by a split idempotent pair with y tails and a tailed
            // x. It closes exactly when the tail d satisfies
            // d(4a-2) = 4g^2 (verified symbolically below like every other
            // item).
            class: FamilyClass::DtAlpha,
            item: 10,
            case: DtTMinusOne,
            shapes: vec![FamilyShape {
                label: "(e1 + g*y, e2 - g*y, x + (4g^2/(4a-2))*y)",
                params: 1,
                concrete_only: false,
                build: dt_triple_split_tail,
            }],
        },
        FamilyItem {
            class: FamilyClass::DtHalf,
            item: 1,
            case: DtHalfGeneric,
            shapes: vec![
                FamilyShape { label: "e1 + e2", params: 0, concrete_only: false, build: dt_unit },
                FamilyShape { label: "g1*e1 + g2*y", params: 2, concrete_only: false, build: dt_line_e1y },
                FamilyShape { label: "g1*e2 + g2*y", params: 2, concrete_only: false, build: dt_line_e2y },
            ],
        },
        FamilyItem {
            class: FamilyClass::DtHalf,
            item: 2,
            case: DtHalfTMinusOne,
            shapes: vec![
                FamilyShape { label: "e1 + e2", params: 0, concrete_only: false, build: dt_unit },
                FamilyShape {
                    label: "u^2*e1 - v^2*e2 + u*v*x + g3*y (slice of g1*e1 + g2*e2 + sqrt(-g1*g2)*x + g3*y)",
                    params: 3,
                    concrete_only: false,
                    build: dt_sqrt_line_slice,
                },
                FamilyShape {
                    label: "g1*e1 + g2*e2 + sqrt(-g1*g2)*x + g3*y",
                    params: 3,
                    concrete_only: true,
                    build: dt_sqrt_line,
                },
                FamilyShape {
                    label: "g1*e1 + g2*e2 - sqrt(-g1*g2)*x + g3*y",
                    params: 3,
                    concrete_only: true,
                    build: dt_sqrt_line_neg,
                },
            ],
        },
        FamilyItem {
            class: FamilyClass::DtHalf,
            item: 3,
            case: DtHalfGeneric,
            shapes: vec![
                FamilyShape { label: "(e1, y)", params: 0, concrete_only: false, build: dt_pair(0, 3) },
                FamilyShape { label: "(e2, y)", params: 0, concrete_only: false, build: dt_pair(1, 3) },
                FamilyShape { label: "(e1 + g*y, e2 - g*y)", params: 1, concrete_only: false, build: dt_pair_split_y },
                // The unit pairs with y for every t (oracle completion).
                FamilyShape { label: "(e1+e2, y)", params: 0, concrete_only: false, build: dt_pair_unit_y },
            ],
        },
        FamilyItem {
            class: FamilyClass::DtHalf,
            item: 4,
            case: DtHalfTMinusOne,
            shapes: vec![
                FamilyShape { label: "(e1, y)", params: 0, concrete_only: false, build: dt_pair(0, 3) },
                FamilyShape { label: "(e2, y)", params: 0, concrete_only: false, build: dt_pair(1, 3) },
                FamilyShape { label: "(e1 + g*y, e2 - g*y)", params: 1, concrete_only: false, build: dt_pair_split_y },
                FamilyShape { label: "(e1+e2, g1*x + g2*y)", params: 2, concrete_only: false, build: dt_pair_unit_xy },
                // Oracle completion as in the generic t = -1 case.
                FamilyShape {
                    label: "(e1 + g1*x + g2*y, e2 - g1*x - g2*y)",
                    params: 2,
                    concrete_only: false,
                    build: dt_pair_split_xy,
                },
            ],
        },
        FamilyItem {
            class: FamilyClass::DtHalf,
            item: 5,
            case: DtHalfGeneric,
            shapes: vec![FamilyShape { label: "(e1, e2, y)", params: 0, concrete_only: false, build: dt_triple_y }],
        },
        FamilyItem {
            class: FamilyClass::DtHalf,
            item: 6,
            case: DtHalfTMinusOne,
            shapes: vec![
                FamilyShape { label: "(e1, e2, y)", params: 0, concrete_only: false, build: dt_triple_y },
                FamilyShape { label: "(e1+e2, g*e2 + x, 2i*e2 + y)", params: 1, concrete_only: false, build: dt_triple_2i_plus },
                FamilyShape { label: "(e1+e2, g*e2 + x, -2i*e2 + y)", params: 1, concrete_only: false, build: dt_triple_2i_minus },
            ],
        },
    ]
}

#[derive(Debug, Clone, Serialize)]
pub struct FamilyClosureReport {
    pub class: FamilyClass,
    pub item: u8,
    pub instances: Vec<FamilyInstanceResult>,
    pub all_closed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct FamilyInstanceResult {
    pub label: String,
    pub closed: bool,
    pub dim: usize,
}

/// Symbolically verifies every generator shape of one item of the
/// classification tables: the
/// witnesses are built with free function-field parameters and closure is
/// checked exactly.
pub fn verify_family_closure(class: FamilyClass, item: u8) -> Result<FamilyClosureReport, Error> {
    let table = family_table();
    let fam = table
        .into_iter()
        .find(|f| f.class == class && f.item == item)
        .ok_or_else(|| Error::UnknownFamily(format!("{} item {}", class, item)))?;
    let mut instances = Vec::new();
    for shape in &fam.shapes {
        if shape.concrete_only {
            continue;
        }
        let var_names: Vec<String> = match shape.params {
            0 => vec![],
            1 => vec!["g".into()],
            k => (1..=k).map(|i| format!("g{}", i)).collect(),
        };
        let var_refs: Vec<&str> = var_names.iter().map(|s| s.as_str()).collect();
        let (alg, params) = fam.case.symbolic(&var_refs)?;
        let g: Vec<FieldValue> = var_names
            .iter()
            .map(|v| alg.field().var(v))
            .collect::<Result<_, _>>()?;
        let Some(generators) = (shape.build)(&alg, &params, &g) else {
            instances.push(FamilyInstanceResult {
                label: shape.label.to_string(),
                closed: false,
                dim: 0,
            });
            continue;
        };
        let w = SubalgebraWitness::from_generators(&alg, &generators);
        let closed = is_subalgebra(&alg, &w);
        instances.push(FamilyInstanceResult {
            label: shape.label.to_string(),
            closed,
            dim: w.dim(),
        });
    }
    let all_closed = instances.iter().all(|i| i.closed);
    Ok(FamilyClosureReport { class: fam.class, item: fam.item, instances, all_closed })
}

// ---------------------------------------------------------------------------
// Finite-field oracles
// ---------------------------------------------------------------------------

fn gf_elements(p: u64) -> Vec<FieldValue> {
    (0..p).map(|v| FieldValue::PrimeField { p, value: v }).collect()
}

/// All `d`-dimensional multiplicatively closed subspaces of an algebra over
/// GF(p), one echelon-form representative per subspace, in deterministic
/// order. Subspaces are not assumed graded; gradedness is observed, not
/// required.
pub fn enumerate_subalgebras(
    a: &SuperAlgebra,
    d: usize,
    budget: u128,
) -> Result<Vec<SubalgebraWitness>, Error> {
    let Field::Fp(p) = a.field() else {
        return Err(Error::InvalidAlgebra("subalgebra enumeration needs GF(p)".into()));
    };
    let p = *p;
    let n = a.dim();
    assert!(d < n, "enumerate proper subspaces only");
    // Budget: sum over pivot-column choices of p^(free entries).
    let mut total: u128 = 0;
    let pivot_sets = combinations(n, d);
    for pivots in &pivot_sets {
        total = total.saturating_add((p as u128).pow(free_count(n, pivots) as u32));
    }
    if total > budget {
        return Err(Error::SearchTooLarge(total, budget));
    }
    let field = a.field().clone();
    // Sharded by pivot-column pattern; shard results are concatenated in
    // pattern order, so the output is independent of the worker count.
    let out = sharded(pivot_sets.len(), |shard| {
        let pivots = &pivot_sets[shard];
        let mut found = Vec::new();
        // Free positions: (row, col) with col > pivot[row], col not a pivot.
        let free: Vec<(usize, usize)> = (0..d)
            .flat_map(|r| {
                (0..n).filter_map(move |c| {
                    (c > pivots[r] && !pivots.contains(&c)).then_some((r, c))
                })
            })
            .collect();
        let mut digits = vec![0u64; free.len()];
        loop {
            let mut basis = Matrix::zero(field.clone(), d, n);
            for (r, &pc) in pivots.iter().enumerate() {
                *basis.at_mut(r, pc) = field.one();
            }
            for (k, &(r, c)) in free.iter().enumerate() {
                *basis.at_mut(r, c) = FieldValue::PrimeField { p, value: digits[k] };
            }
            let w = SubalgebraWitness { basis, pivots: pivots.clone() };
            if is_subalgebra(a, &w) {
                found.push(w);
            }
            if !increment(&mut digits, p) {
                break;
            }
        }
        found
    });
    Ok(out)
}

fn combinations(n: usize, d: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, d: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == d {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, d, cur, out);
            cur.pop();
        }
    }
    rec(0, n, d, &mut cur, &mut out);
    out
}

fn free_count(n: usize, pivots: &[usize]) -> usize {
    (0..pivots.len())
        .map(|r| (0..n).filter(|&c| c > pivots[r] && !pivots.contains(&c)).count())
        .sum()
}

fn increment(digits: &mut [u64], base: u64) -> bool {
    for d in digits.iter_mut() {
        *d += 1;
        if *d < base {
            return true;
        }
        *d = 0;
    }
    false
}

/// All invertible parity-preserving homomorphisms of an algebra over GF(p),
/// by exhaustive search over the parity blocks.
pub fn enumerate_automorphisms(a: &SuperAlgebra, budget: u128) -> Result<Vec<LinearMap>, Error> {
    enumerate_intertwiners(a, a, budget, false)
}

/// First invertible parity-preserving intertwiner between two algebras
/// over GF(p), or `None`. Precomputed invariants (dimension, parity
/// signature, derivation-space dimensions) short-circuit the search.
pub fn isomorphism_search(
    a: &SuperAlgebra,
    b: &SuperAlgebra,
    budget: u128,
) -> Result<Option<LinearMap>, Error> {
    if a.dim() != b.dim() || a.parities() != b.parities() {
        return Ok(None);
    }
    // Derivation dimensions are isomorphism invariants.
    let da = crate::derivation::derivation_space(a).dims();
    let db = crate::derivation::derivation_space(b).dims();
    if da != db {
        return Ok(None);
    }
    let found = enumerate_intertwiners(a, b, budget, true)?;
    Ok(found.into_iter().next())
}

fn enumerate_intertwiners(
    a: &SuperAlgebra,
    b: &SuperAlgebra,
    budget: u128,
    first_only: bool,
) -> Result<Vec<LinearMap>, Error> {
    let Field::Fp(p) = a.field() else {
        return Err(Error::InvalidAlgebra("exhaustive search needs GF(p)".into()));
    };
    let p = *p;
    if a.field() != b.field() {
        return Err(Error::FieldMismatch {
            left: a.field().to_string(),
            right: b.field().to_string(),
        });
    }
    let n = a.dim();
    let positions: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|&(i, j)| a.parity(i) == b.parity(j))
        .collect();
    let total = (p as u128).pow(positions.len() as u32);
    if total > budget {
        return Err(Error::SearchTooLarge(total, budget));
    }
    let field = a.field().clone();
    // Precompute basis products of `a`.
    let products: Vec<Element> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| a.multiply(&a.basis(i), &a.basis(j)).unwrap())
        .collect();
    if positions.is_empty() {
        return Ok(Vec::new());
    }
    let scan = |first_digit: Option<u64>, stop_at_first: bool| -> Vec<LinearMap> {
        let mut found = Vec::new();
        let tail = positions.len() - usize::from(first_digit.is_some());
        let mut digits = vec![0u64; tail];
        loop {
            let mut m = Matrix::zero(field.clone(), n, n);
            let mut it = first_digit.into_iter().chain(digits.iter().copied());
            for &(i, j) in positions.iter() {
                *m.at_mut(i, j) = FieldValue::PrimeField { p, value: it.next().unwrap() };
            }
            let phi = LinearMap::new(Parity::Even, m);
            if check_intertwiner(a, b, &phi, &products) && phi.matrix.is_invertible() {
                found.push(phi);
                if stop_at_first {
                    return found;
                }
            }
            if digits.is_empty() || !increment(&mut digits, p) {
                break;
            }
        }
        found
    };
    if first_only {
        // Early exit keeps this path sequential.
        return Ok(scan(None, true));
    }
    // Sharded by the value of the first free entry.
    Ok(sharded(p as usize, |s| scan(Some(s as u64), false)))
}

fn check_intertwiner(a: &SuperAlgebra, b: &SuperAlgebra, phi: &LinearMap, products: &[Element]) -> bool {
    let n = a.dim();
    for i in 0..n {
        let phi_i = phi.image_of_basis(i);
        for j in 0..n {
            let phi_j = phi.image_of_basis(j);
            let lhs = phi.apply(&products[i * n + j]);
            let rhs = b.multiply(&phi_i, &phi_j).unwrap();
            if !lhs.sub_ref(&rhs).is_zero() {
                return false;
            }
        }
    }
    true
}

/// The set of family-predicted subspaces of dimension `d` for a concrete
/// K3/D_t member over GF(p): every applicable classification item is instantiated
/// at all parameter values and the spans are fingerprinted.
pub fn family_witness_set(
    a: &SuperAlgebra,
    alpha: &FieldValue,
    beta: &FieldValue,
    t: Option<&FieldValue>,
    d: usize,
) -> BTreeSet<Vec<String>> {
    let Field::Fp(p) = a.field() else {
        panic!("family matching is a finite-field oracle");
    };
    let scalars = gf_elements(*p);
    let mut out = BTreeSet::new();
    let params = AlgebraParams { alpha: alpha.clone(), t: t.cloned() };
    for fam in family_table() {
        if !fam.case.matches(alpha, beta, t) {
            continue;
        }
        for shape in &fam.shapes {
            let mut tuple = vec![0usize; shape.params];
            loop {
                let values: Vec<FieldValue> =
                    tuple.iter().map(|&i| scalars[i].clone()).collect();
                if let Some(gens) = (shape.build)(a, &params, &values) {
                    let w = SubalgebraWitness::from_generators(a, &gens);
                    if w.dim() == d && is_subalgebra(a, &w) {
                        out.insert(w.fingerprint());
                    }
                }
                // Odometer over the parameter tuple.
                let mut k = 0;
                loop {
                    if k == tuple.len() {
                        break;
                    }
                    tuple[k] += 1;
                    if tuple[k] < scalars.len() {
                        break;
                    }
                    tuple[k] = 0;
                    k += 1;
                }
                if tuple.iter().all(|&x| x == 0) {
                    break;
                }
            }
        }
    }
    out
}

/// Cross-checks the exhaustive enumeration against the family prediction:
/// every enumerated subspace must appear in the family set (and the family
/// set only contains verified-closed spans, so the sets must be equal).
pub fn subalgebras_match_families(
    a: &SuperAlgebra,
    alpha: &FieldValue,
    beta: &FieldValue,
    t: Option<&FieldValue>,
    d: usize,
    budget: u128,
) -> Result<(usize, usize, bool), Error> {
    let enumerated = enumerate_subalgebras(a, d, budget)?;
    let family = family_witness_set(a, alpha, beta, t, d);
    let mut all_match = true;
    for w in &enumerated {
        if !family.contains(&w.fingerprint()) {
            all_match = false;
        }
    }
    let equal = all_match && enumerated.len() == family.len();
    Ok((enumerated.len(), family.len(), equal))
}

/// Predicted automorphism shapes for the concrete K3 / D_t members.
pub enum AutomorphismFamily {
    /// φ = diag(1, γ, γ⁻¹) on (e, z, w).
    K3Scaling,
    /// φ(e) = e, odd block of determinant one.
    K3Unimodular,
    /// φ(e) = e, φ(z) = ±z + kw, φ(w) = ±w with matching signs.
    K3HalfShear,
    /// φ = diag(1, 1, γ, γ⁻¹) on (e1, e2, x, y).
    DtScaling,
    /// φ fixes e1, e2; odd block of determinant one.
    DtUnimodular,
    /// φ fixes e1, e2; φ(x) = ±x + γy, φ(y) = ±y with matching signs.
    DtHalfShear,
}

impl AutomorphismFamily {
    pub fn matches(&self, a: &SuperAlgebra, phi: &LinearMap) -> bool {
        let f = a.field();
        let m = &phi.matrix;
        let is_id = |i: usize| -> bool {
            (0..a.dim()).all(|j| {
                if i == j {
                    m.at(i, j).is_one()
                } else {
                    m.at(i, j).is_zero()
                }
            })
        };
        match self {
            AutomorphismFamily::K3Scaling => {
                is_id(0)
                    && m.at(1, 2).is_zero()
                    && m.at(2, 1).is_zero()
                    && m.at(1, 1).mul(m.at(2, 2)).is_one()
            }
            AutomorphismFamily::K3Unimodular => {
                is_id(0)
                    && m.at(1, 1)
                        .mul(m.at(2, 2))
                        .sub(&m.at(1, 2).mul(m.at(2, 1)))
                        .is_one()
            }
            AutomorphismFamily::K3HalfShear => {
                let s = m.at(1, 1);
                is_id(0)
                    && m.at(2, 1).is_zero()
                    && *m.at(2, 2) == *s
                    && (s.is_one() || *s == f.int(-1))
            }
            AutomorphismFamily::DtScaling => {
                is_id(0)
                    && is_id(1)
                    && m.at(2, 3).is_zero()
                    && m.at(3, 2).is_zero()
                    && m.at(2, 2).mul(m.at(3, 3)).is_one()
            }
            AutomorphismFamily::DtUnimodular => {
                is_id(0)
                    && is_id(1)
                    && m.at(2, 2)
                        .mul(m.at(3, 3))
                        .sub(&m.at(2, 3).mul(m.at(3, 2)))
                        .is_one()
            }
            AutomorphismFamily::DtHalfShear => {
                let s = m.at(2, 2);
                is_id(0)
                    && is_id(1)
                    && m.at(3, 2).is_zero()
                    && *m.at(3, 3) == *s
                    && (s.is_one() || *s == f.int(-1))
            }
        }
    }
}

/// Group sanity for an enumerated automorphism list: closure under
/// composition and inverse.
pub fn is_group(a: &SuperAlgebra, maps: &[LinearMap]) -> bool {
    let keys: BTreeSet<Vec<String>> = maps
        .iter()
        .map(|m| m.flatten().iter().map(|c| c.to_string()).collect())
        .collect();
    let key = |m: &LinearMap| -> Vec<String> { m.flatten().iter().map(|c| c.to_string()).collect() };
    let _ = a;
    for x in maps {
        let Ok(inv) = x.matrix.inverse() else { return false };
        if !keys.contains(&key(&LinearMap::new(Parity::Even, inv))) {
            return false;
        }
        for y in maps {
            if !keys.contains(&key(&x.compose(y))) {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{make_dt, make_k3};

    #[test]
    fn identity_is_automorphism() {
        let f = Field::rational_functions(["a"]);
        let k3 = make_k3(&f.var("a").unwrap(), &f.zero(), &f.zero()).unwrap();
        let id = LinearMap::identity(f.clone(), 3);
        let rep = is_automorphism(&k3, &id).unwrap();
        assert!(rep.is_automorphism);
    }

    #[test]
    fn k3_scaling_family_is_automorphism() {
        // e -> e, z -> γz, w -> γ⁻¹w over Q(a, g).
        let f = Field::rational_functions(["a", "g"]);
        let k3 = make_k3(&f.var("a").unwrap(), &f.zero(), &f.zero()).unwrap();
        let g = f.var("g").unwrap();
        let mut m = Matrix::zero(f.clone(), 3, 3);
        *m.at_mut(0, 0) = f.one();
        *m.at_mut(1, 1) = g.clone();
        *m.at_mut(2, 2) = g.inv().unwrap();
        let rep = is_automorphism(&k3, &LinearMap::new(Parity::Even, m)).unwrap();
        assert!(rep.is_automorphism);
    }

    #[test]
    fn k3_wrong_scaling_fails() {
        // z -> γz, w -> γw is not an automorphism for generic α.
        let f = Field::rational_functions(["a", "g"]);
        let k3 = make_k3(&f.var("a").unwrap(), &f.zero(), &f.zero()).unwrap();
        let g = f.var("g").unwrap();
        let mut m = Matrix::zero(f.clone(), 3, 3);
        *m.at_mut(0, 0) = f.one();
        *m.at_mut(1, 1) = g.clone();
        *m.at_mut(2, 2) = g.clone();
        let rep = is_automorphism(&k3, &LinearMap::new(Parity::Even, m)).unwrap();
        assert!(!rep.is_automorphism);
    }

    #[test]
    fn k3_half_shear_family() {
        // On K3(1/2,1/2,0): e -> e, z -> ±z + kw, w -> ±w.
        let f = Field::rational_functions(["k"]);
        let half = f.parse("1/2").unwrap();
        let alg = make_k3(&half, &half, &f.zero()).unwrap();
        for sign in [1i64, -1] {
            let mut m = Matrix::zero(f.clone(), 3, 3);
            *m.at_mut(0, 0) = f.one();
            *m.at_mut(1, 1) = f.int(sign);
            *m.at_mut(1, 2) = f.var("k").unwrap();
            *m.at_mut(2, 2) = f.int(sign);
            let rep = is_automorphism(&alg, &LinearMap::new(Parity::Even, m)).unwrap();
            assert!(rep.is_automorphism);
        }
    }

    #[test]
    fn dt_unimodular_family_with_constraint() {
        // x -> g1 x + g2 y, y -> g3 x + g4 y with g4 := (1 + g2 g3)/g1.
        let f = Field::rational_functions(["t", "g1", "g2", "g3", "g4"]);
        let half = f.parse("1/2").unwrap();
        let dt = make_dt(&f.var("t").unwrap(), &half, &f.zero(), &f.zero()).unwrap();
        let mut m = Matrix::zero(f.clone(), 4, 4);
        *m.at_mut(0, 0) = f.one();
        *m.at_mut(1, 1) = f.one();
        *m.at_mut(2, 2) = f.var("g1").unwrap();
        *m.at_mut(2, 3) = f.var("g2").unwrap();
        *m.at_mut(3, 2) = f.var("g3").unwrap();
        *m.at_mut(3, 3) = f.var("g4").unwrap();
        let g4 = f
            .one()
            .add(&f.var("g2").unwrap().mul(&f.var("g3").unwrap()))
            .div(&f.var("g1").unwrap())
            .unwrap();
        let pm = ParametricMap::new(LinearMap::new(Parity::Even, m)).with_constraint("g4", g4);
        let resolved = pm.resolved().unwrap();
        let rep = is_automorphism(&dt, &resolved).unwrap();
        assert!(rep.is_automorphism);
    }

    #[test]
    fn zero_map_not_automorphism() {
        let f = Field::Q;
        let k3 = make_k3(&f.ratio(1, 2), &f.zero(), &f.zero()).unwrap();
        let z = LinearMap::zero(f.clone(), Parity::Even, 3);
        let rep = is_automorphism(&k3, &z).unwrap();
        assert!(!rep.is_automorphism && !rep.invertible);
    }

    #[test]
    fn subalgebra_span_checks() {
        let f = Field::rational_functions(["a"]);
        let k3 = make_k3(&f.var("a").unwrap(), &f.zero(), &f.zero()).unwrap();
        // span(e, z) closed for generic α.
        let w = SubalgebraWitness::from_generators(&k3, &[k3.basis(0), k3.basis(1)]);
        assert!(is_subalgebra(&k3, &w));
        // span(e, z + w) not closed for generic α.
        let mixed = k3.combo(&[(1, f.one()), (2, f.one())]);
        let w2 = SubalgebraWitness::from_generators(&k3, &[k3.basis(0), mixed]);
        assert!(!is_subalgebra(&k3, &w2));
    }

    #[test]
    fn dt_one_dim_unit_span() {
        let f = Field::rational_functions(["a", "t"]);
        let dt = make_dt(&f.var("t").unwrap(), &f.var("a").unwrap(), &f.zero(), &f.zero()).unwrap();
        let u = dt.combo(&[(0, f.one()), (1, f.one())]);
        let w = SubalgebraWitness::from_generators(&dt, &[u]);
        assert!(is_subalgebra(&dt, &w));
    }

    #[test]
    fn family_closures_symbolic() {
        for (class, item) in [
            (FamilyClass::K3Alpha, 1u8),
            (FamilyClass::K3Alpha, 2),
            (FamilyClass::K3Alpha, 3),
            (FamilyClass::K3Alpha, 4),
            (FamilyClass::K3Half, 1),
            (FamilyClass::K3Half, 2),
        ] {
            let rep = verify_family_closure(class, item).unwrap();
            assert!(rep.all_closed, "{} item {} failed: {:?}", class, item, rep);
        }
    }

    #[test]
    fn unknown_family_rejected() {
        assert!(matches!(
            verify_family_closure(FamilyClass::K3Alpha, 9),
            Err(Error::UnknownFamily(_))
        ));
    }

    #[test]
    fn enumerate_k3_subalgebras_over_gf5() {
        let f = Field::Fp(5);
        let alpha = f.int(2);
        let k3 = make_k3(&alpha, &f.zero(), &f.zero()).unwrap();
        // 1-dim: spans inside the (e,z) and (e,w) planes: 6 + 6 - 1 = 11.
        let (enumerated, family, equal) =
            subalgebras_match_families(&k3, &alpha, &f.zero(), None, 1, DEFAULT_SEARCH_BUDGET)
                .unwrap();
        assert_eq!(enumerated, 11);
        assert_eq!(family, 11);
        assert!(equal);
        // 2-dim: exactly the two coordinate planes.
        let (enumerated, _, equal) =
            subalgebras_match_families(&k3, &alpha, &f.zero(), None, 2, DEFAULT_SEARCH_BUDGET)
                .unwrap();
        assert_eq!(enumerated, 2);
        assert!(equal);
    }

    #[test]
    fn enumerate_k3_jordan_point_over_gf5() {
        // α = 3 is 1/2 mod 5: every line closes (31 of them).
        let f = Field::Fp(5);
        let alpha = f.int(3);
        let k3 = make_k3(&alpha, &f.zero(), &f.zero()).unwrap();
        let (enumerated, family, equal) =
            subalgebras_match_families(&k3, &alpha, &f.zero(), None, 1, DEFAULT_SEARCH_BUDGET)
                .unwrap();
        assert_eq!(enumerated, 31);
        assert_eq!(family, 31);
        assert!(equal);
    }

    #[test]
    fn enumerate_k3_automorphisms_over_gf5() {
        let f = Field::Fp(5);
        let k3 = make_k3(&f.int(2), &f.zero(), &f.zero()).unwrap();
        let auts = enumerate_automorphisms(&k3, DEFAULT_SEARCH_BUDGET).unwrap();
        assert_eq!(auts.len(), 4);
        for phi in &auts {
            assert!(AutomorphismFamily::K3Scaling.matches(&k3, phi));
        }
        assert!(is_group(&k3, &auts));
    }

    #[test]
    fn isomorphism_search_basics() {
        let f = Field::Fp(5);
        let a = make_k3(&f.int(2), &f.zero(), &f.zero()).unwrap();
        // A ≅ A via some map (identity found first or not, but found).
        let found = isomorphism_search(&a, &a, DEFAULT_SEARCH_BUDGET).unwrap();
        assert!(found.is_some());
        // K3(2) vs K3(3): distinct derivation dims short-circuit to None.
        let b = make_k3(&f.int(3), &f.zero(), &f.zero()).unwrap();
        assert!(isomorphism_search(&a, &b, DEFAULT_SEARCH_BUDGET).unwrap().is_none());
    }

    #[test]
    fn budget_guard() {
        let f = Field::Fp(7);
        let dt = make_dt(&f.int(2), &f.int(3), &f.zero(), &f.zero()).unwrap();
        assert!(matches!(
            enumerate_automorphisms(&dt, 100),
            Err(Error::SearchTooLarge(_, _))
        ));
    }

    #[test]
    fn normal_form_search_over_gf5() {
        // A member with nonzero beta and square discriminant reduces to
        // some K3(lambda): the exhaustive intertwiner search finds one.
        let f = Field::Fp(5);
        let a = make_k3(&f.int(2), &f.int(1), &f.zero()).unwrap();
        let mut found = None;
        for lambda in 0..5i64 {
            let b = make_k3(&f.int(lambda), &f.zero(), &f.zero()).unwrap();
            if let Some(phi) = isomorphism_search(&a, &b, DEFAULT_SEARCH_BUDGET).unwrap() {
                // Sound: the witness really intertwines the products.
                assert!(is_homomorphism(&a, &b, &phi).unwrap().is_homomorphism);
                assert!(phi.matrix.is_invertible());
                found = Some(lambda);
                break;
            }
        }
        assert!(found.is_some(), "no normal form found for K3(2,1,0) over GF(5)");
    }
}
