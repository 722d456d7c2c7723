//! Constructors for the algebra families the workbench studies, from their
//! multiplication tables. Parameters may be numeric or symbolic: pass
//! values from a rational-function field to get the generic member of a
//! family.

use crate::field::{Field, FieldValue};
use crate::grassmann::{self, GrassmannElement};
use crate::identities;
use crate::linalg::Matrix;
use crate::superalg::{Parity, SuperAlgebra};
use crate::Error;

fn same_field(params: &[&FieldValue]) -> Result<Field, Error> {
    let field = params[0].field();
    for p in params {
        if p.field() != field {
            return Err(Error::FieldMismatch {
                left: field.to_string(),
                right: p.field().to_string(),
            });
        }
    }
    Ok(field)
}

/// The three-dimensional family K₃(α,β,γ) on the basis (e, z, w) with e
/// even and z, w odd.
pub fn make_k3(alpha: &FieldValue, beta: &FieldValue, gamma: &FieldValue) -> Result<SuperAlgebra, Error> {
    let field = same_field(&[alpha, beta, gamma])?;
    let one = field.one();
    let dim = 3;
    let mut table = vec![field.zero(); dim * dim * dim];
    let mut set = |i: usize, j: usize, k: usize, v: FieldValue| {
        table[(i * dim + j) * dim + k] = v;
    };
    let (a, b, g) = (alpha, beta, gamma);
    // Row e
    set(0, 0, 0, one.clone());
    set(0, 1, 1, a.clone());
    set(0, 1, 2, b.clone());
    set(0, 2, 1, g.clone());
    set(0, 2, 2, one.sub(a));
    // Row z
    set(1, 0, 1, one.sub(a));
    set(1, 0, 2, b.neg());
    set(1, 1, 0, b.mul_int(-2));
    set(1, 2, 0, a.mul_int(2));
    // Row w
    set(2, 0, 1, g.neg());
    set(2, 0, 2, a.clone());
    set(2, 1, 0, one.sub(a).mul_int(-2));
    set(2, 2, 0, g.mul_int(2));
    SuperAlgebra::new(
        field,
        vec![Parity::Even, Parity::Odd, Parity::Odd],
        vec!["e".into(), "z".into(), "w".into()],
        table,
    )
}

/// The four-dimensional family D_t(α,β,γ) on the basis (e₁, e₂, x, y) with
/// even idempotents e₁, e₂ and odd x, y. Specializations: t = -1 gives
/// M₁,₁(α,β,γ) and t = -2 the osp(1,2)-type member; t = 0 is the unital
/// hull of K₃(α,β,γ).
pub fn make_dt(
    t: &FieldValue,
    alpha: &FieldValue,
    beta: &FieldValue,
    gamma: &FieldValue,
) -> Result<SuperAlgebra, Error> {
    let field = same_field(&[t, alpha, beta, gamma])?;
    let one = field.one();
    let dim = 4;
    let mut table = vec![field.zero(); dim * dim * dim];
    let mut set = |i: usize, j: usize, k: usize, v: FieldValue| {
        table[(i * dim + j) * dim + k] = v;
    };
    let (a, b, g) = (alpha, beta, gamma);
    // Row e1
    set(0, 0, 0, one.clone());
    set(0, 2, 2, a.clone());
    set(0, 2, 3, b.clone());
    set(0, 3, 2, g.clone());
    set(0, 3, 3, one.sub(a));
    // Row e2
    set(1, 1, 1, one.clone());
    set(1, 2, 2, one.sub(a));
    set(1, 2, 3, b.neg());
    set(1, 3, 2, g.neg());
    set(1, 3, 3, a.clone());
    // Row x
    set(2, 0, 2, one.sub(a));
    set(2, 0, 3, b.neg());
    set(2, 1, 2, a.clone());
    set(2, 1, 3, b.clone());
    set(2, 2, 0, b.mul_int(-2));
    set(2, 2, 1, b.mul(t).mul_int(2));
    set(2, 3, 0, a.mul_int(2));
    set(2, 3, 1, one.sub(a).mul(t).mul_int(2));
    // Row y
    set(3, 0, 2, g.neg());
    set(3, 0, 3, a.clone());
    set(3, 1, 2, g.clone());
    set(3, 1, 3, one.sub(a));
    set(3, 2, 0, one.sub(a).mul_int(-2));
    set(3, 2, 1, a.mul(t).mul_int(-2));
    set(3, 3, 0, g.mul_int(2));
    set(3, 3, 1, g.mul(t).mul_int(-2));
    SuperAlgebra::new(
        field,
        vec![Parity::Even, Parity::Even, Parity::Odd, Parity::Odd],
        vec!["e1".into(), "e2".into(), "x".into(), "y".into()],
        table,
    )
}

/// Data for the form algebra U(V, f, ⋆) on 𝔽 ⊕ V.
pub struct UvfData {
    /// Parities of the V basis vectors.
    pub v_parity: Vec<Parity>,
    /// Gram matrix of the supersymmetric bilinear form on V.
    pub form: Matrix,
    /// Optional ⋆ tensor `star[(i*m + j)*m + k]` with `v_i ⋆ v_j = Σ_k star·v_k`;
    /// `None` means ⋆ = 0 and yields the form superalgebra J(V,f).
    pub star: Option<Vec<FieldValue>>,
}

/// Builds U(V, f, ⋆): `(α + x)(β + y) = (αβ + f(x,y)) + (αy + βx + x⋆y)`.
/// The unit is the field component.
pub fn make_uvf(data: &UvfData) -> Result<SuperAlgebra, Error> {
    let m = data.v_parity.len();
    let field = data.form.field().clone();
    assert_eq!(data.form.rows(), m);
    assert_eq!(data.form.cols(), m);
    // Supersymmetry: symmetric on V0, skew on V1, zero across parities.
    for i in 0..m {
        for j in 0..m {
            let fij = data.form.at(i, j);
            let fji = data.form.at(j, i);
            let ok = match (data.v_parity[i], data.v_parity[j]) {
                (Parity::Even, Parity::Even) => *fij == *fji,
                (Parity::Odd, Parity::Odd) => *fij == fji.neg(),
                _ => fij.is_zero(),
            };
            if !ok {
                return Err(Error::FormNotSupersymmetric);
            }
        }
    }
    if data.form.rank() < m {
        return Err(Error::FormDegenerate);
    }
    let zero_star;
    let star: &[FieldValue] = match &data.star {
        Some(s) => {
            assert_eq!(s.len(), m * m * m, "star tensor shape");
            s
        }
        None => {
            zero_star = vec![field.zero(); m * m * m];
            &zero_star
        }
    };
    let st = |i: usize, j: usize, k: usize| &star[(i * m + j) * m + k];
    // Superanticommutativity of ⋆.
    for i in 0..m {
        for j in 0..m {
            let koszul = data.v_parity[i].koszul_negates(data.v_parity[j]);
            for k in 0..m {
                if *st(i, j, k) != st(j, i, k).neg().neg_if(koszul) {
                    return Err(Error::StarNotAnticommutative);
                }
            }
        }
    }
    // Associativity of the form with ⋆: f(x⋆y, z) = f(x, y⋆z).
    for i in 0..m {
        for j in 0..m {
            for l in 0..m {
                let mut lhs = field.zero();
                let mut rhs = field.zero();
                for k in 0..m {
                    lhs = lhs.add(&st(i, j, k).mul(data.form.at(k, l)));
                    rhs = rhs.add(&st(j, l, k).mul(data.form.at(i, k)));
                }
                if lhs != rhs {
                    return Err(Error::StarNotCompatible);
                }
            }
        }
    }

    let dim = m + 1;
    let mut table = vec![field.zero(); dim * dim * dim];
    let mut set = |i: usize, j: usize, k: usize, v: FieldValue| {
        table[(i * dim + j) * dim + k] = v;
    };
    set(0, 0, 0, field.one());
    for i in 0..m {
        set(0, i + 1, i + 1, field.one());
        set(i + 1, 0, i + 1, field.one());
        for j in 0..m {
            set(i + 1, j + 1, 0, data.form.at(i, j).clone());
            for k in 0..m {
                set(i + 1, j + 1, k + 1, st(i, j, k).clone());
            }
        }
    }
    let mut parity = vec![Parity::Even];
    parity.extend(data.v_parity.iter().copied());
    let mut names = vec!["1".to_string()];
    names.extend((0..m).map(|i| format!("v{}", i + 1)));
    SuperAlgebra::new(field, parity, names, table)
}

/// A basis of all ⋆ tensors compatible with the given form: parity
/// additive, superanticommutative and form associative. Useful for
/// fabricating nonzero-⋆ members of the family.
pub fn star_solution_space(v_parity: &[Parity], form: &Matrix) -> Vec<Vec<FieldValue>> {
    let m = v_parity.len();
    let field = form.field().clone();
    // Unknowns restricted to the graded pattern.
    let unknowns: Vec<(usize, usize, usize)> = (0..m)
        .flat_map(|i| (0..m).flat_map(move |j| (0..m).map(move |k| (i, j, k))))
        .filter(|&(i, j, k)| v_parity[k] == v_parity[i].plus(v_parity[j]))
        .collect();
    let col = |i: usize, j: usize, k: usize| unknowns.iter().position(|&u| u == (i, j, k));
    let mut rows: Vec<Vec<FieldValue>> = Vec::new();
    let mut push_row = |entries: Vec<(usize, FieldValue)>| {
        let mut row = vec![field.zero(); unknowns.len()];
        let mut nonzero = false;
        for (c, v) in entries {
            if !v.is_zero() {
                nonzero = true;
            }
            row[c] = row[c].add(&v);
        }
        if nonzero {
            rows.push(row);
        }
    };
    // Superanticommutativity.
    for i in 0..m {
        for j in 0..m {
            let koszul = v_parity[i].koszul_negates(v_parity[j]);
            for k in 0..m {
                let (Some(c1), Some(c2)) = (col(i, j, k), col(j, i, k)) else { continue };
                push_row(vec![
                    (c1, field.one()),
                    (c2, field.one().neg_if(koszul)),
                ]);
            }
        }
    }
    // Form associativity.
    for i in 0..m {
        for j in 0..m {
            for l in 0..m {
                let mut entries = Vec::new();
                for k in 0..m {
                    if let Some(c) = col(i, j, k) {
                        entries.push((c, form.at(k, l).clone()));
                    }
                    if let Some(c) = col(j, l, k) {
                        entries.push((c, form.at(i, k).neg()));
                    }
                }
                push_row(entries);
            }
        }
    }
    let kernel = if rows.is_empty() {
        Matrix::zero(field.clone(), 1, unknowns.len()).kernel_basis()
    } else {
        Matrix::from_rows(field.clone(), rows).kernel_basis()
    };
    kernel
        .into_iter()
        .map(|v| {
            let mut full = vec![field.zero(); m * m * m];
            for (u, c) in unknowns.iter().zip(v) {
                full[(u.0 * m + u.1) * m + u.2] = c;
            }
            full
        })
        .collect()
}

/// The Grassmann superalgebra Γₙ as a structure-constant algebra on the
/// 2ⁿ monomial basis (masks in counting order).
pub fn make_grassmann_algebra(n: usize, field: &Field) -> Result<SuperAlgebra, Error> {
    let dim = 1usize << n;
    let mut table = vec![field.zero(); dim * dim * dim];
    let mut parity = Vec::with_capacity(dim);
    let mut names = Vec::with_capacity(dim);
    for mask in 0..dim as u32 {
        parity.push(Parity::from_u8((mask.count_ones() % 2) as u8));
        names.push(monomial_name(n, mask));
        let a = GrassmannElement::from_terms(n, field.clone(), [(mask, field.one())]);
        for other in 0..dim as u32 {
            let b = GrassmannElement::from_terms(n, field.clone(), [(other, field.one())]);
            let prod = a.mul(&b)?;
            for (t, c) in prod.terms() {
                table[(mask as usize * dim + other as usize) * dim + *t as usize] = c.clone();
            }
        }
    }
    SuperAlgebra::new(field.clone(), parity, names, table)
}

fn monomial_name(n: usize, mask: u32) -> String {
    if mask == 0 {
        return "1".to_string();
    }
    (0..n)
        .filter(|i| mask & (1 << i) != 0)
        .map(|i| format!("x{}", i + 1))
        .collect::<Vec<_>>()
        .join("^")
}

/// The Kantor double J(Γₙ) on Γₙ ⊕ Γ̄ₙ (A = 0).
pub fn make_j_gamma(n: usize, field: &Field) -> Result<SuperAlgebra, Error> {
    let zero = GrassmannElement::zero(n, field.clone());
    make_j_gamma_a(n, &zero)
}

/// The deformed double J(Γₙ, A) for an even A ∈ Γₙ.
///
/// Products, for homogeneous a, b ∈ Γₙ:
/// `a·b = ab`, `ā·b = (-1)^{p(b)} \overline{ab}`, `a·b̄ = \overline{ab}`,
/// `ā·b̄ = (-1)^{p(b)} ({a,b} + abA)`, with `{,}` the signed-partials
/// bracket. The grading places barred ODD monomials in the even part.
pub fn make_j_gamma_a(n: usize, a_elem: &GrassmannElement) -> Result<SuperAlgebra, Error> {
    if a_elem.parity() != Some(Parity::Even) {
        return Err(Error::AOdd);
    }
    let field = a_elem.field().clone();
    let half_dim = 1usize << n;
    let dim = grassmann::double_dim(n);
    let mut table = vec![field.zero(); dim * dim * dim];
    let mut parity = vec![Parity::Even; dim];
    let mut names = vec![String::new(); dim];
    for mask in 0..half_dim as u32 {
        let p = (mask.count_ones() % 2) as u8;
        parity[grassmann::unbarred_index(mask)] = Parity::from_u8(p);
        parity[grassmann::barred_index(n, mask)] = Parity::from_u8(p + 1);
        names[grassmann::unbarred_index(mask)] = monomial_name(n, mask);
        names[grassmann::barred_index(n, mask)] = format!("{}~", monomial_name(n, mask));
    }
    let mono = |m: u32| GrassmannElement::from_terms(n, field.clone(), [(m, field.one())]);
    let mut write = |i: usize, j: usize, e: &GrassmannElement, barred: bool| {
        for (t, c) in e.terms() {
            let k = if barred {
                grassmann::barred_index(n, *t)
            } else {
                grassmann::unbarred_index(*t)
            };
            table[(i * dim + j) * dim + k] = c.clone();
        }
    };
    for ma in 0..half_dim as u32 {
        let a = mono(ma);
        for mb in 0..half_dim as u32 {
            let b = mono(mb);
            let pb = (mb.count_ones() % 2) == 1;
            let ab = a.mul(&b)?;
            // a·b = ab
            write(grassmann::unbarred_index(ma), grassmann::unbarred_index(mb), &ab, false);
            // a·b̄ = \overline{ab}
            write(grassmann::unbarred_index(ma), grassmann::barred_index(n, mb), &ab, true);
            // ā·b = (-1)^{p(b)} \overline{ab}
            let signed_ab = ab.scale(&field.one().neg_if(pb));
            write(grassmann::barred_index(n, ma), grassmann::unbarred_index(mb), &signed_ab, true);
            // ā·b̄ = (-1)^{p(b)} ({a,b} + abA)
            let bracket = grassmann::poisson_grassmann(&a, &b)?;
            let deform = ab.mul(a_elem)?;
            let total = bracket.add(&deform).scale(&field.one().neg_if(pb));
            write(grassmann::barred_index(n, ma), grassmann::barred_index(n, mb), &total, false);
        }
    }
    SuperAlgebra::new(field, parity, names, table)
}

/// The bracket algebra Γₙ(𝒟) for a symmetric matrix of even elements
/// `a_ij = x_i d_j`: same underlying space as Γₙ with the product
/// `f∗g = f·g + [f,g]`, where the bracket extends `[x_i,x_j] = a_ij` by
/// `[f,g] = (-1)^{p(g)+1} Σ_{i,j} (f∂_i)(g∂_j) a_ij` on homogeneous f, g,
/// with the action-convention partial.
///
/// The extension is validated at construction: it must reproduce `a_ij` on
/// generator pairs, be superanticommutative, and satisfy the super-Leibniz
/// rule in its first argument. Failures surface as `BracketNotPoisson`.
pub fn make_gamma_nd(n: usize, a: &[Vec<GrassmannElement>]) -> Result<SuperAlgebra, Error> {
    assert_eq!(a.len(), n);
    for row in a {
        assert_eq!(row.len(), n);
    }
    let field = a[0][0].field().clone();
    for i in 0..n {
        for j in 0..n {
            if a[i][j].parity() != Some(Parity::Even) {
                return Err(Error::AOdd);
            }
            if a[i][j] != a[j][i] {
                return Err(Error::BracketNotPoisson(format!(
                    "a[{}][{}] != a[{}][{}]",
                    i, j, j, i
                )));
            }
        }
    }
    let dim = 1usize << n;
    let plain = make_grassmann_algebra(n, &field)?;
    let mono = |m: u32| GrassmannElement::from_terms(n, field.clone(), [(m, field.one())]);
    // Bracket tensor on monomials.
    let mut bracket_table = vec![field.zero(); dim * dim * dim];
    for mf in 0..dim as u32 {
        let f = mono(mf);
        for mg in 0..dim as u32 {
            let g = mono(mg);
            let pg = (mg.count_ones() % 2) == 1;
            let mut sum = GrassmannElement::zero(n, field.clone());
            for i in 0..n {
                let fi = f.partial_action(i + 1);
                if fi.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let gj = g.partial_action(j + 1);
                    if gj.is_zero() {
                        continue;
                    }
                    sum = sum.add(&fi.mul(&gj)?.mul(&a[i][j])?);
                }
            }
            let val = sum.scale(&field.one().neg_if(!pg));
            for (t, c) in val.terms() {
                bracket_table[(mf as usize * dim + mg as usize) * dim + *t as usize] = c.clone();
            }
        }
    }
    let bracket = plain.with_table(bracket_table).map_err(|e| match e {
        Error::GradingViolation(i, j, k) => Error::BracketNotPoisson(format!(
            "bracket violates the grading at ({},{},{})",
            i, j, k
        )),
        other => other,
    })?;
    // [x_i, x_j] must equal a_ij.
    for i in 0..n {
        for j in 0..n {
            let bi = 1usize << i;
            let bj = 1usize << j;
            for t in 0..dim {
                let want = a[i][j].coefficient(t as u32);
                if *bracket.c(bi, bj, t) != want {
                    return Err(Error::BracketNotPoisson(format!(
                        "extension does not reproduce a[{}][{}]",
                        i, j
                    )));
                }
            }
        }
    }
    let poisson = identities::check_poisson_bracket(&plain, &bracket);
    if !poisson.passed {
        return Err(Error::BracketNotPoisson(format!(
            "{} basis triples violate the Leibniz rule",
            poisson.failures.len()
        )));
    }
    // Product = plain + bracket.
    let mut table = Vec::with_capacity(dim * dim * dim);
    for i in 0..dim {
        for j in 0..dim {
            for k in 0..dim {
                table.push(plain.c(i, j, k).add(bracket.c(i, j, k)));
            }
        }
    }
    plain.with_table(table)
}

/// The identity matrix of even elements, the simplest bracket data for
/// [`make_gamma_nd`] (generator derivations are the signed partials).
pub fn identity_bracket_data(n: usize, field: &Field) -> Vec<Vec<GrassmannElement>> {
    let one = GrassmannElement::one(n, field.clone());
    let zero = GrassmannElement::zero(n, field.clone());
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { one.clone() } else { zero.clone() }).collect())
        .collect()
}

/// The three-generator bracket data `diag(1, 1, x₁x₂)`.
pub fn diag_x1x2_bracket_data(field: &Field) -> Vec<Vec<GrassmannElement>> {
    let one = GrassmannElement::one(3, field.clone());
    let zero = GrassmannElement::zero(3, field.clone());
    let x12 = GrassmannElement::monomial(3, field.clone(), &[1, 2]);
    vec![
        vec![one.clone(), zero.clone(), zero.clone()],
        vec![zero.clone(), one.clone(), zero.clone()],
        vec![zero.clone(), zero.clone(), x12],
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grassmann::{barred_index, unbarred_index};

    fn qf() -> Field {
        Field::Q
    }

    #[test]
    fn k3_table_spot_checks() {
        let f = Field::rational_functions(["a", "b", "g"]);
        let k3 = make_k3(&f.var("a").unwrap(), &f.var("b").unwrap(), &f.var("g").unwrap()).unwrap();
        let a = f.var("a").unwrap();
        // w·z = -2(1-α) e
        assert_eq!(*k3.c(2, 1, 0), f.one().sub(&a).mul_int(-2));
        // e·w = γz + (1-α)w
        assert_eq!(*k3.c(0, 2, 1), f.var("g").unwrap());
    }

    #[test]
    fn k3_half_specializations() {
        // K3(1/2,0,0): e·z = ½z, z·w = e, w·z = -e
        let f = qf();
        let k3 = make_k3(&f.ratio(1, 2), &f.zero(), &f.zero()).unwrap();
        assert_eq!(*k3.c(0, 1, 1), f.ratio(1, 2));
        assert!(k3.c(1, 2, 0).is_one());
        assert_eq!(*k3.c(2, 1, 0), f.int(-1));
        // K3(1/2,1/2,0): z·z = -e
        let k3h = make_k3(&f.ratio(1, 2), &f.ratio(1, 2), &f.zero()).unwrap();
        assert_eq!(*k3h.c(1, 1, 0), f.int(-1));
    }

    #[test]
    fn dt_table_spot_checks() {
        let f = Field::rational_functions(["t", "a", "b", "g"]);
        let dt = make_dt(
            &f.var("t").unwrap(),
            &f.var("a").unwrap(),
            &f.var("b").unwrap(),
            &f.var("g").unwrap(),
        )
        .unwrap();
        let (t, a) = (f.var("t").unwrap(), f.var("a").unwrap());
        // x·y = 2(αe1 + (1-α)te2)
        assert_eq!(*dt.c(2, 3, 0), a.mul_int(2));
        assert_eq!(*dt.c(2, 3, 1), f.one().sub(&a).mul(&t).mul_int(2));
        // y·x = -2((1-α)e1 + αte2)
        assert_eq!(*dt.c(3, 2, 0), f.one().sub(&a).mul_int(-2));
        assert_eq!(*dt.c(3, 2, 1), a.mul(&t).mul_int(-2));
    }

    #[test]
    fn dt_unit_element() {
        // e1+e2 is the unit of D_t(1/2, 0, 0).
        let f = Field::rational_functions(["t"]);
        let half = f.parse("1/2").unwrap();
        let dt = make_dt(&f.var("t").unwrap(), &half, &f.zero(), &f.zero()).unwrap();
        let unit = dt.combo(&[(0, f.one()), (1, f.one())]);
        for i in 0..4 {
            let b = dt.basis(i);
            assert_eq!(dt.multiply(&unit, &b).unwrap(), b);
            assert_eq!(dt.multiply(&b, &unit).unwrap(), b);
        }
    }

    #[test]
    fn d0_contains_k3() {
        // At t = 0 the span of (e1, x, y) multiplies exactly like K3's
        // (e, z, w).
        let f = Field::rational_functions(["a", "b", "g"]);
        let (a, b, g) = (f.var("a").unwrap(), f.var("b").unwrap(), f.var("g").unwrap());
        let d0 = make_dt(&f.zero(), &a, &b, &g).unwrap();
        let k3 = make_k3(&a, &b, &g).unwrap();
        let emb = [0usize, 2, 3]; // e->e1, z->x, w->y
        for i in 0..3 {
            for j in 0..3 {
                let prod = d0.multiply(&d0.basis(emb[i]), &d0.basis(emb[j])).unwrap();
                // Pull back along the embedding.
                assert!(prod.coords[1].is_zero(), "product leaves the K3 copy");
                for k in 0..3 {
                    assert_eq!(prod.coords[emb[k]], *k3.c(i, j, k));
                }
            }
        }
    }

    #[test]
    fn uvf_one_dimensional() {
        // V0 = span(u), f(u,u) = 1, star = 0: u·u = 1.
        let f = qf();
        let form = Matrix::from_rows(f.clone(), vec![vec![f.one()]]);
        let u = make_uvf(&UvfData { v_parity: vec![Parity::Even], form, star: None }).unwrap();
        let prod = u.multiply(&u.basis(1), &u.basis(1)).unwrap();
        assert!(prod.coords[0].is_one());
        // 1·v = v.
        assert_eq!(u.multiply(&u.basis(0), &u.basis(1)).unwrap(), u.basis(1));
    }

    #[test]
    fn uvf_validation_errors() {
        let f = qf();
        let skew = Matrix::from_rows(f.clone(), vec![vec![f.zero()]]);
        assert!(matches!(
            make_uvf(&UvfData { v_parity: vec![Parity::Even], form: skew, star: None }),
            Err(Error::FormDegenerate)
        ));
        let asym = Matrix::from_rows(
            f.clone(),
            vec![
                vec![f.zero(), f.one()],
                vec![f.one(), f.zero()],
            ],
        );
        assert!(matches!(
            make_uvf(&UvfData { v_parity: vec![Parity::Odd, Parity::Odd], form: asym, star: None }),
            Err(Error::FormNotSupersymmetric)
        ));
    }

    #[test]
    fn j_gamma_products() {
        let f = qf();
        let jg = make_j_gamma(1, &f).unwrap();
        // Basis: 1, x1, 1~, x1~ with parities even, odd, odd, even.
        assert_eq!(jg.parity(unbarred_index(0)), Parity::Even);
        assert_eq!(jg.parity(barred_index(1, 0)), Parity::Odd);
        assert_eq!(jg.parity(barred_index(1, 1)), Parity::Even);
        // x̄1 · x̄1 = 1 (bracket of x1 with itself is -1, sign (-1)^{p(x1)}).
        let xbar = jg.basis(barred_index(1, 1));
        let prod = jg.multiply(&xbar, &xbar).unwrap();
        assert!(prod.coords[unbarred_index(0)].is_one());
    }

    #[test]
    fn j_gamma_a_deformation() {
        let f = qf();
        let a = GrassmannElement::monomial(2, f.clone(), &[1, 2]);
        let jga = make_j_gamma_a(2, &a).unwrap();
        // 1̄·1̄ = {1,1} + 1·1·A = A = x1x2.
        let onebar = jga.basis(barred_index(2, 0));
        let prod = jga.multiply(&onebar, &onebar).unwrap();
        assert!(prod.coords[unbarred_index(0b11)].is_one());
        // A = 0 reduces to the plain double.
        let jg = make_j_gamma(2, &f).unwrap();
        let jga0 = make_j_gamma_a(2, &GrassmannElement::zero(2, f.clone())).unwrap();
        assert_eq!(jg.table(), jga0.table());
        // Odd A rejected.
        let odd = GrassmannElement::generator(2, f, 1);
        assert!(matches!(make_j_gamma_a(2, &odd), Err(Error::AOdd)));
    }

    #[test]
    fn j_gamma_plus_is_j_gamma() {
        let f = qf();
        let a = GrassmannElement::monomial(2, f.clone(), &[1, 2]);
        let jga = make_j_gamma_a(2, &a).unwrap();
        let jg = make_j_gamma(2, &f).unwrap();
        assert_eq!(jga.plus_algebra().unwrap().table(), jg.table());
    }

    #[test]
    fn gamma_nd_identity_matrix() {
        let f = qf();
        let n = 2;
        let one = GrassmannElement::one(n, f.clone());
        let zero = GrassmannElement::zero(n, f.clone());
        let a = vec![
            vec![one.clone(), zero.clone()],
            vec![zero.clone(), one.clone()],
        ];
        let g = make_gamma_nd(n, &a).unwrap();
        // x1 ∗ x1 = x1·x1 + [x1,x1] = 0 + 1.
        let x1 = g.basis(0b01);
        let sq = g.multiply(&x1, &x1).unwrap();
        assert!(sq.coords[0].is_one());
        // [f, 1] = 0: f ∗ 1 = f.
        let x12 = g.basis(0b11);
        assert_eq!(g.multiply(&x12, &g.basis(0)).unwrap(), x12);
        // symmetrization gives back the plain Grassmann product
        let plus = g.plus_algebra().unwrap();
        let plain = make_grassmann_algebra(n, &f).unwrap();
        assert_eq!(plus.table(), plain.table());
    }

    #[test]
    fn gamma_nd_example_data() {
        // n = 3, a = diag(1, 1, x1x2).
        let f = qf();
        let g = make_gamma_nd(3, &diag_x1x2_bracket_data(&f)).unwrap();
        // [x1, x2] = a12 = 0, so x1 ∗ x2 = x1x2.
        let p = g.multiply(&g.basis(0b001), &g.basis(0b010)).unwrap();
        assert!(p.coords[0b011].is_one());
        // x3 ∗ x3 = a33 = x1x2.
        let q = g.multiply(&g.basis(0b100), &g.basis(0b100)).unwrap();
        assert!(q.coords[0b011].is_one());
    }

    #[test]
    fn gamma_nd_rejects_asymmetric_data() {
        let f = qf();
        let one = GrassmannElement::one(2, f.clone());
        let zero = GrassmannElement::zero(2, f.clone());
        let x12 = GrassmannElement::monomial(2, f.clone(), &[1, 2]);
        let a = vec![
            vec![one.clone(), x12],
            vec![zero.clone(), one.clone()],
        ];
        assert!(matches!(make_gamma_nd(2, &a), Err(Error::BracketNotPoisson(_))));
    }

    #[test]
    fn star_space_yields_valid_products() {
        // V0 1-dim + V1 2-dim symplectic admits nonzero compatible stars.
        let f = qf();
        let form = Matrix::from_rows(
            f.clone(),
            vec![
                vec![f.one(), f.zero(), f.zero()],
                vec![f.zero(), f.zero(), f.one()],
                vec![f.zero(), f.int(-1), f.zero()],
            ],
        );
        let parities = vec![Parity::Even, Parity::Odd, Parity::Odd];
        let stars = star_solution_space(&parities, &form);
        assert!(!stars.is_empty());
        for star in &stars {
            let u = make_uvf(&UvfData {
                v_parity: parities.clone(),
                form: form.clone(),
                star: Some(star.clone()),
            })
            .unwrap();
            assert!(crate::identities::check_noncomm_jordan(&u).passed);
        }
    }
}
