//! Randomized invariants: field axioms in all three coefficient domains,
//! canonical-form idempotence, the evaluation homomorphism, exact linear
//! algebra laws, and the Grassmann sign calculus.

use proptest::prelude::*;

use ncjordan::field::{Field, FieldValue};
use ncjordan::grassmann::{poisson_grassmann, GrassmannElement};
use ncjordan::linalg::Matrix;
use ncjordan::superalg::Parity;

fn rational() -> impl Strategy<Value = FieldValue> {
    (-40i64..40, 1i64..12).prop_map(|(n, d)| Field::Q.ratio(n, d))
}

fn gf5() -> impl Strategy<Value = FieldValue> {
    (0i64..5).prop_map(|v| Field::Fp(5).int(v))
}

/// Sparse random elements of Q(a, b): polynomial fractions built from the
/// generators, with denominators kept away from zero.
fn ratfunc() -> impl Strategy<Value = FieldValue> {
    let f = Field::rational_functions(["a", "b"]);
    (
        proptest::collection::vec((-6i64..6, 0u32..3, 0u32..2), 0..4),
        proptest::collection::vec((-6i64..6, 0u32..2, 0u32..2), 0..2),
    )
        .prop_map(move |(num, den)| {
            let a = f.var("a").unwrap();
            let b = f.var("b").unwrap();
            let term = |(c, i, j): (i64, u32, u32)| {
                let mut t = f.int(c);
                for _ in 0..i {
                    t = t.mul(&a);
                }
                for _ in 0..j {
                    t = t.mul(&b);
                }
                t
            };
            let n = num.into_iter().map(term).fold(f.zero(), |acc, t| acc.add(&t));
            let d = den
                .into_iter()
                .map(term)
                .fold(f.one(), |acc, t| acc.add(&t.mul(&a)));
            if d.is_zero() {
                n
            } else {
                n.div(&d).unwrap()
            }
        })
}

fn field_axioms(x: &FieldValue, y: &FieldValue, z: &FieldValue) {
    // Associativity and commutativity.
    assert_eq!(x.add(y).add(z), x.add(&y.add(z)));
    assert_eq!(x.mul(y).mul(z), x.mul(&y.mul(z)));
    assert_eq!(x.add(y), y.add(x));
    assert_eq!(x.mul(y), y.mul(x));
    // Distributivity.
    assert_eq!(x.mul(&y.add(z)), x.mul(y).add(&x.mul(z)));
    // Inverses.
    assert!(x.sub(x).is_zero());
    if !x.is_zero() {
        assert!(x.mul(&x.inv().unwrap()).is_one());
    }
}

proptest! {
    #[test]
    fn rational_field_axioms(x in rational(), y in rational(), z in rational()) {
        field_axioms(&x, &y, &z);
    }

    #[test]
    fn gf5_field_axioms(x in gf5(), y in gf5(), z in gf5()) {
        field_axioms(&x, &y, &z);
    }

    #[test]
    fn ratfunc_field_axioms(x in ratfunc(), y in ratfunc(), z in ratfunc()) {
        field_axioms(&x, &y, &z);
    }

    #[test]
    fn canonical_form_round_trips_through_text(x in ratfunc()) {
        // Equality is canonical-form identity, and printing is parseable.
        let f = Field::rational_functions(["a", "b"]);
        let back = f.parse(&x.to_string()).unwrap();
        prop_assert_eq!(back, x);
    }

    #[test]
    fn evaluation_is_a_homomorphism(x in ratfunc(), y in ratfunc(), pa in -7i64..7, pb in -7i64..7) {
        let mut b = std::collections::BTreeMap::new();
        b.insert("a".to_string(), Field::Q.int(pa));
        b.insert("b".to_string(), Field::Q.int(pb));
        let (ex, ey, exy, exy2) = (
            x.evaluate(&b),
            y.evaluate(&b),
            x.mul(&y).evaluate(&b),
            x.add(&y).evaluate(&b),
        );
        // Wherever all evaluations are defined they must agree.
        if let (Ok(ex), Ok(ey), Ok(exy)) = (&ex, &ey, &exy) {
            prop_assert_eq!(exy.clone(), ex.mul(ey));
        }
        if let (Ok(ex), Ok(ey), Ok(exy2)) = (&ex, &ey, &exy2) {
            prop_assert_eq!(exy2.clone(), ex.add(ey));
        }
    }

    #[test]
    fn rref_is_projection_and_rank_nullity_holds(
        entries in proptest::collection::vec(0i64..5, 12),
    ) {
        let f = Field::Fp(5);
        let m = Matrix::new(
            f.clone(),
            3,
            4,
            entries.into_iter().map(|v| f.int(v)).collect(),
        );
        let (r1, rank, _) = m.rref();
        let (r2, rank2, _) = r1.rref();
        prop_assert_eq!(&r1, &r2);
        prop_assert_eq!(rank, rank2);
        let kernel = m.kernel_basis();
        prop_assert_eq!(rank + kernel.len(), 4);
        for v in &kernel {
            // M v = 0 exactly.
            for row in 0..3 {
                let s = (0..4).fold(f.zero(), |acc, c| acc.add(&m.at(row, c).mul(&v[c])));
                prop_assert!(s.is_zero());
            }
        }
    }

    #[test]
    fn grassmann_product_laws(
        ta in proptest::collection::vec((0u32..16, -5i64..5), 0..4),
        tb in proptest::collection::vec((0u32..16, -5i64..5), 0..4),
        tc in proptest::collection::vec((0u32..16, -5i64..5), 0..4),
    ) {
        let f = Field::Q;
        let mk = |ts: Vec<(u32, i64)>| {
            GrassmannElement::from_terms(4, f.clone(), ts.into_iter().map(|(m, c)| (m, f.int(c))))
        };
        let a = mk(ta);
        let b = mk(tb);
        let c = mk(tc);
        // Associativity.
        prop_assert_eq!(
            a.mul(&b).unwrap().mul(&c).unwrap(),
            a.mul(&b.mul(&c).unwrap()).unwrap()
        );
        // Supercommutativity on homogeneous parts.
        let (ae, ao) = a.homogeneous_parts();
        let (be, bo) = b.homogeneous_parts();
        for (x, px) in [(&ae, Parity::Even), (&ao, Parity::Odd)] {
            for (y, py) in [(&be, Parity::Even), (&bo, Parity::Odd)] {
                let xy = x.mul(y).unwrap();
                let yx = y.mul(x).unwrap();
                let signed = if px == Parity::Odd && py == Parity::Odd { yx.neg() } else { yx };
                prop_assert_eq!(xy, signed);
            }
        }
    }
}

/// The signed-partials bracket satisfies the super-Leibniz rule in its
/// first argument on all monomial triples of Γ₃ and Γ₄.
#[test]
fn poisson_grassmann_satisfies_the_leibniz_rule() {
    for n in [3usize, 4] {
        let f = Field::Q;
        let mono =
            |m: u32| GrassmannElement::from_terms(n, f.clone(), [(m, f.one())]);
        for ma in 0..(1u32 << n) {
            let a = mono(ma);
            for mb in 0..(1u32 << n) {
                let b = mono(mb);
                let pb = Parity::from_u8((mb.count_ones() % 2) as u8);
                let ab = a.mul(&b).unwrap();
                for mc in 0..(1u32 << n) {
                    let c = mono(mc);
                    let pc = Parity::from_u8((mc.count_ones() % 2) as u8);
                    let lhs = poisson_grassmann(&ab, &c).unwrap();
                    let sign = pb == Parity::Odd && pc == Parity::Odd;
                    let t1 = poisson_grassmann(&a, &c)
                        .unwrap()
                        .mul(&b)
                        .unwrap()
                        .scale(&f.one().neg_if(sign));
                    let t2 = a.mul(&poisson_grassmann(&b, &c).unwrap()).unwrap();
                    assert!(lhs.sub(&t1.add(&t2)).is_zero());
                }
            }
        }
    }
}

/// Symbolic rank over Q(a) agrees with the rank after random rational
/// specialization (away from the degeneracy locus).
#[test]
fn symbolic_rank_matches_specializations() {
    let f = Field::rational_functions(["a"]);
    let a = f.var("a").unwrap();
    // A 3x3 matrix with generic rank 2 (the last row repeats the first).
    let rows = vec![
        vec![a.clone(), f.one(), f.zero()],
        vec![a.mul(&a), f.one(), f.zero()],
        vec![a.clone(), f.one(), f.zero()],
    ];
    let m = Matrix::from_rows(f, rows);
    assert_eq!(m.rank(), 2);
    for pt in [2i64, 3, 7] {
        let mut b = std::collections::BTreeMap::new();
        b.insert("a".to_string(), Field::Q.int(pt));
        assert_eq!(m.evaluate(&b).unwrap().rank(), 2);
    }
}
