//! Checkers for the defining operator identities.
//!
//! Every check runs over homogeneous basis tuples only; multilinearity of
//! the identities makes that complete. Signs come from basis parities.
//!
//! The flexible law is `[R_x, L_y] = [L_x, R_y]`; the noncommutative Jordan
//! law is the cyclic operator identity
//! `[R_{x•y}, L_z] + (-1)^{x(y+z)}[R_{y•z}, L_x] + (-1)^{z(x+y)}[R_{z•x}, L_y] = 0`
//! on top of flexibility. For supercommutative algebras the Jordan law is
//! checked in its operator form on right multiplications.

use serde::Serialize;

use crate::superalg::{Element, LinearMap, Parity, SuperAlgebra};
use crate::Error;

/// Outcome of one identity check.
#[derive(Debug, Clone, Serialize)]
pub struct IdentityReport {
    pub identity: String,
    pub passed: bool,
    /// Basis tuples where the identity fails, with a printed residual.
    pub failures: Vec<IdentityFailure>,
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentityFailure {
    pub indices: Vec<usize>,
    pub residual: Vec<Vec<String>>,
}

impl IdentityReport {
    fn new(identity: &str) -> Self {
        IdentityReport { identity: identity.into(), passed: true, failures: Vec::new() }
    }

    fn record(&mut self, indices: Vec<usize>, residual: &LinearMap) {
        self.passed = false;
        if self.failures.len() < 16 {
            let m = &residual.matrix;
            let rows = (0..m.rows())
                .map(|r| m.row(r).iter().map(|e| e.to_string()).collect())
                .collect();
            self.failures.push(IdentityFailure { indices, residual: rows });
        }
    }
}

/// Precomputed multiplication operators for each basis element.
struct OperatorTables {
    left: Vec<LinearMap>,
    right: Vec<LinearMap>,
}

impl OperatorTables {
    fn build(a: &SuperAlgebra) -> Self {
        let mut left = Vec::with_capacity(a.dim());
        let mut right = Vec::with_capacity(a.dim());
        for i in 0..a.dim() {
            let (l, r) = a.mult_operators(&a.basis(i)).expect("basis is homogeneous");
            left.push(l);
            right.push(r);
        }
        OperatorTables { left, right }
    }

    /// `R_u` for an arbitrary element by linearity.
    fn right_of(&self, a: &SuperAlgebra, u: &Element) -> LinearMap {
        let mut acc: Option<LinearMap> = None;
        for (i, c) in u.coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let term = self.right[i].scale(c);
            acc = Some(match acc {
                None => term,
                Some(m) => LinearMap {
                    parity: m.parity,
                    matrix: m.matrix.add(&term.matrix),
                },
            });
        }
        acc.unwrap_or_else(|| LinearMap::zero(a.field().clone(), Parity::Even, a.dim()))
    }
}

/// Verifies `[R_x, L_y] = [L_x, R_y]` on all homogeneous basis pairs.
pub fn check_flexible(a: &SuperAlgebra) -> IdentityReport {
    let t = OperatorTables::build(a);
    let mut report = IdentityReport::new("flexible");
    for x in 0..a.dim() {
        for y in 0..a.dim() {
            let lhs = t.right[x].supercommutator(&t.left[y]);
            let rhs = t.left[x].supercommutator(&t.right[y]);
            let residual = lhs.sub(&rhs);
            if !residual.is_zero() {
                report.record(vec![x, y], &residual);
            }
        }
    }
    report
}

/// Verifies the cyclic operator identity together with flexibility.
pub fn check_noncomm_jordan(a: &SuperAlgebra) -> IdentityReport {
    let flexible = check_flexible(a);
    let t = OperatorTables::build(a);
    // Supercommutators [R_k, L_l] for basis pairs; the cyclic terms are
    // linear combinations of these.
    let dim = a.dim();
    let mut rl = Vec::with_capacity(dim * dim);
    for k in 0..dim {
        for l in 0..dim {
            rl.push(t.right[k].supercommutator(&t.left[l]));
        }
    }
    let comm = |u: &Element, z: usize| -> LinearMap {
        // [R_u, L_z] = sum_k u_k [R_k, L_z]
        let mut acc = LinearMap::zero(a.field().clone(), Parity::Even, dim);
        for (k, c) in u.coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            acc = LinearMap { parity: acc.parity, matrix: acc.matrix.add(&rl[k * dim + z].scale(c).matrix) };
        }
        acc
    };
    let mut report = IdentityReport::new("noncommutative-jordan");
    report.passed = flexible.passed;
    report.failures = flexible.failures.clone();
    let one = a.field().one();
    for x in 0..dim {
        let px = a.parity(x);
        for y in 0..dim {
            let py = a.parity(y);
            let xy = a.sym_product(&a.basis(x), &a.basis(y)).unwrap();
            for z in 0..dim {
                let pz = a.parity(z);
                let yz = a.sym_product(&a.basis(y), &a.basis(z)).unwrap();
                let zx = a.sym_product(&a.basis(z), &a.basis(x)).unwrap();
                let s2 = one.neg_if(px == Parity::Odd && py.plus(pz) == Parity::Odd);
                let s3 = one.neg_if(pz == Parity::Odd && px.plus(py) == Parity::Odd);
                let term1 = comm(&xy, z);
                let term2 = comm(&yz, x).scale(&s2);
                let term3 = comm(&zx, y).scale(&s3);
                let sum = term1.matrix.add(&term2.matrix).add(&term3.matrix);
                if !sum.is_zero() {
                    report.record(
                        vec![x, y, z],
                        &LinearMap { parity: Parity::Even, matrix: sum },
                    );
                }
            }
        }
    }
    report
}

/// Verifies the Jordan superidentity on a supercommutative algebra, in the
/// operator form obtained by super-linearizing `[R_{x∘x}, R_x] = 0` through
/// the Grassmann envelope:
///
/// `R_{ab}R_c + (-1)^{a(b+c)} R_{bc}R_a + (-1)^{bc} R_{ac}R_b
///  = R_a R_{bc} + (-1)^{c(a+b)} R_c R_{ab} + (-1)^{ab} R_b R_{ac}`,
///
/// equivalently the cyclic supercommutator identity
/// `(-1)^{ac}[R_{ab}, R_c] + (-1)^{ba}[R_{bc}, R_a] + (-1)^{cb}[R_{ca}, R_b] = 0`.
pub fn check_jordan_super(a: &SuperAlgebra) -> Result<IdentityReport, Error> {
    if !a.is_supercommutative() {
        return Err(Error::NotSupercommutative);
    }
    let t = OperatorTables::build(a);
    let dim = a.dim();
    let one = a.field().one();
    let mut report = IdentityReport::new("jordan-super");
    for x in 0..dim {
        let px = a.parity(x);
        let bx = a.basis(x);
        for y in 0..dim {
            let py = a.parity(y);
            let by = a.basis(y);
            let xy = a.multiply(&bx, &by).unwrap();
            let r_xy = t.right_of(a, &xy).matrix;
            for z in 0..dim {
                let pz = a.parity(z);
                let bz = a.basis(z);
                let yz = a.multiply(&by, &bz).unwrap();
                let xz = a.multiply(&bx, &bz).unwrap();
                let r_yz = t.right_of(a, &yz).matrix;
                let r_xz = t.right_of(a, &xz).matrix;
                let s_a_bc = one.neg_if(px == Parity::Odd && py.plus(pz) == Parity::Odd);
                let s_c_ab = one.neg_if(pz == Parity::Odd && px.plus(py) == Parity::Odd);
                let s_bc = one.neg_if(py.koszul_negates(pz));
                let s_ab = one.neg_if(px.koszul_negates(py));

                let mut lhs = r_xy.mul(&t.right[z].matrix);
                lhs = lhs.add(&r_yz.mul(&t.right[x].matrix).scale(&s_a_bc));
                lhs = lhs.add(&r_xz.mul(&t.right[y].matrix).scale(&s_bc));
                let mut rhs = t.right[x].matrix.mul(&r_yz);
                rhs = rhs.add(&t.right[z].matrix.mul(&r_xy).scale(&s_c_ab));
                rhs = rhs.add(&t.right[y].matrix.mul(&r_xz).scale(&s_ab));

                let residual = lhs.sub(&rhs);
                if !residual.is_zero() {
                    report.record(vec![x, y, z], &LinearMap { parity: Parity::Even, matrix: residual });
                }
            }
        }
    }
    Ok(report)
}

/// Verifies that a bracket is a generic Poisson bracket on `p`:
/// `{a·b, c} = (-1)^{p(b)p(c)} {a,c}·b + a·{b,c}` on homogeneous basis
/// triples. Also reports whether the bracket is superanticommutative.
///
/// The bracket is handed over as a structure tensor on the same graded
/// space as `p`.
pub fn check_poisson_bracket(p: &SuperAlgebra, bracket: &SuperAlgebra) -> IdentityReport {
    assert_eq!(p.dim(), bracket.dim(), "bracket must live on the same space");
    let mut report = IdentityReport::new("generic-poisson-bracket");
    let one = p.field().one();
    for i in 0..p.dim() {
        let bi = p.basis(i);
        for j in 0..p.dim() {
            let bj = p.basis(j);
            let ab = p.multiply(&bi, &bj).unwrap();
            for k in 0..p.dim() {
                let bk = p.basis(k);
                let lhs = bracket.multiply(&ab, &bk).unwrap();
                let s = one.neg_if(p.parity(j).koszul_negates(p.parity(k)));
                let t1 = p
                    .multiply(&bracket.multiply(&bi, &bk).unwrap(), &bj)
                    .unwrap()
                    .scale_ref(&s);
                let t2 = p.multiply(&bi, &bracket.multiply(&bj, &bk).unwrap()).unwrap();
                let residual = lhs.sub_ref(&t1).sub_ref(&t2);
                if !residual.is_zero() {
                    let m = LinearMap::from_images(Parity::Even, p.field().clone(), &[residual]);
                    report.record(vec![i, j, k], &m);
                }
            }
        }
    }
    // Superanticommutativity: {x,y} = -(-1)^{p(x)p(y)} {y,x}.
    for i in 0..p.dim() {
        for j in 0..p.dim() {
            let koszul = p.parity(i).koszul_negates(p.parity(j));
            for k in 0..p.dim() {
                let want = bracket.c(j, i, k).neg().neg_if(koszul);
                if *bracket.c(i, j, k) != want {
                    let diff = bracket.c(i, j, k).sub(&want);
                    let m = LinearMap::from_images(
                        Parity::Even,
                        p.field().clone(),
                        &[Element { coords: vec![diff] }],
                    );
                    report.record(vec![i, j, k], &m);
                }
            }
        }
    }
    report
}

/// Rebuilds a product from a supercommutative algebra and a bracket:
/// `ab = a∘b + ½{a,b}`. With the halved symmetrization used throughout the
/// crate, `reconstruct(plus_algebra(A), commutator_tensor(A))` returns `A`
/// tensor for tensor.
pub fn reconstruct(p: &SuperAlgebra, bracket: &SuperAlgebra) -> Result<SuperAlgebra, Error> {
    assert_eq!(p.dim(), bracket.dim());
    let half = p.field().half()?;
    let dim = p.dim();
    let mut table = Vec::with_capacity(dim * dim * dim);
    for i in 0..dim {
        for j in 0..dim {
            for k in 0..dim {
                table.push(p.c(i, j, k).add(&bracket.c(i, j, k).mul(&half)));
            }
        }
    }
    p.with_table(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::field::Field;

    fn k3_generic() -> SuperAlgebra {
        let f = Field::rational_functions(["a", "b", "g"]);
        catalog::make_k3(
            &f.var("a").unwrap(),
            &f.var("b").unwrap(),
            &f.var("g").unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn k3_is_flexible_and_jordan() {
        let a = k3_generic();
        assert!(check_flexible(&a).passed);
        assert!(check_noncomm_jordan(&a).passed);
    }

    #[test]
    fn supercommutative_algebra_is_flexible() {
        let a = k3_generic().plus_algebra().unwrap();
        assert!(check_flexible(&a).passed);
    }

    #[test]
    fn non_flexible_algebra_detected() {
        // e·e=e, e·f=f, f·e=0, f·f=e (both even) is not flexible:
        // (f·e)·f = 0 but f·(e·f) = e.
        let q = Field::Q;
        let mut table = vec![q.zero(); 8];
        let idx = |i: usize, j: usize, k: usize| (i * 2 + j) * 2 + k;
        table[idx(0, 0, 0)] = q.one();
        table[idx(0, 1, 1)] = q.one();
        table[idx(1, 1, 0)] = q.one();
        let a = SuperAlgebra::new(
            q,
            vec![Parity::Even, Parity::Even],
            vec!["e".into(), "f".into()],
            table,
        )
        .unwrap();
        let rep = check_flexible(&a);
        assert!(!rep.passed);
        assert!(check_noncomm_jordan(&a).passed == false);
    }

    #[test]
    fn plus_of_k3_satisfies_jordan_super() {
        let a = k3_generic().plus_algebra().unwrap();
        assert!(check_jordan_super(&a).unwrap().passed);
    }

    #[test]
    fn jordan_super_requires_supercommutativity() {
        let f = Field::rational_functions(["a"]);
        let a = catalog::make_k3(&f.var("a").unwrap(), &f.zero(), &f.zero()).unwrap();
        assert!(matches!(check_jordan_super(&a), Err(Error::NotSupercommutative)));
    }

    #[test]
    fn commutator_is_poisson_bracket_on_plus() {
        let a = k3_generic();
        let plus = a.plus_algebra().unwrap();
        let bracket = a.commutator_tensor();
        let rep = check_poisson_bracket(&plus, &bracket);
        assert!(rep.passed, "failures: {:?}", rep.failures);
    }

    #[test]
    fn zero_bracket_is_poisson() {
        let a = k3_generic().plus_algebra().unwrap();
        let zero = a.with_table(vec![a.field().zero(); 27]).unwrap();
        assert!(check_poisson_bracket(&a, &zero).passed);
    }

    #[test]
    fn reconstruct_round_trip() {
        let a = k3_generic();
        let back = reconstruct(&a.plus_algebra().unwrap(), &a.commutator_tensor()).unwrap();
        assert_eq!(back.table(), a.table());
    }

    #[test]
    fn reconstruct_with_zero_bracket_is_identity() {
        let p = k3_generic().plus_algebra().unwrap();
        let zero = p.with_table(vec![p.field().zero(); 27]).unwrap();
        let r = reconstruct(&p, &zero).unwrap();
        assert_eq!(r.table(), p.table());
    }

    #[test]
    fn random_tensors_fail_the_cyclic_identity() {
        // Random graded structure constants over GF(5) are essentially
        // never noncommutative Jordan. Deterministic seed; two-dimensional
        // algebras with one even and one odd basis vector.
        let f = Field::Fp(5);
        let mut state = 0x00c0ffee_u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 33) % 5
        };
        let mut failures = 0;
        let total = 10;
        for _ in 0..total {
            let mut table = vec![f.zero(); 8];
            let idx = |i: usize, j: usize, k: usize| (i * 2 + j) * 2 + k;
            // Parities (even, odd): allowed entries are c[0][0][0], c[0][1][1],
            // c[1][0][1], c[1][1][0].
            for (i, j, k) in [(0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 0)] {
                table[idx(i, j, k)] = f.int(next() as i64);
            }
            let a = SuperAlgebra::new(
                f.clone(),
                vec![Parity::Even, Parity::Odd],
                vec!["u".into(), "v".into()],
                table,
            )
            .unwrap();
            if !check_noncomm_jordan(&a).passed {
                failures += 1;
            }
        }
        assert!(failures >= 8, "only {} of {} random tensors failed", failures, total);
    }

    #[test]
    fn product_splits_into_sym_and_commutator() {
        // multiply(x, y) = ½(x•y + [x,y]) coordinatewise on basis pairs.
        let a = k3_generic();
        let half = a.field().half().unwrap();
        for i in 0..a.dim() {
            for j in 0..a.dim() {
                let x = a.basis(i);
                let y = a.basis(j);
                let prod = a.multiply(&x, &y).unwrap();
                let sym = a.sym_product(&x, &y).unwrap();
                let comm = a.super_commutator(&x, &y).unwrap();
                let half_sum = sym.add_ref(&comm).scale_ref(&half);
                assert_eq!(prod, half_sum);
            }
        }
    }
}
