//! The verification matrix: one entry per headline structural fact, each
//! checked exactly (no tolerances anywhere; every expected value is pinned
//! in this file). The `matrix` CLI verb prints this table; the acceptance
//! integration test asserts every row passes.

use crate::catalog::{self, UvfData};
use crate::derivation::{self, derivation_space, find_sl2_triple, is_derivation};
use crate::field::{Field, FieldValue};
use crate::grassmann::{
    cent_ann_inclusion_check, gras_der_solve, hn_from_potential, jgamma_a_d1_criterion,
    jgamma_derivation, parse_grassmann, DoubleDerivation, GrassmannElement, WnDerivation,
};
use crate::identities::{check_jordan_super, check_noncomm_jordan, check_poisson_bracket, reconstruct};
use crate::linalg::{in_row_space, Matrix};
use crate::morphism::{
    self, enumerate_automorphisms, is_automorphism, subalgebras_match_families,
    verify_family_closure, AutomorphismFamily, ParametricMap,
};
use crate::superalg::{LinearMap, Parity, SuperAlgebra};
use crate::Error;

#[derive(Debug, Clone, serde::Serialize)]
pub struct CriterionResult {
    pub id: &'static str,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn result(id: &'static str, name: &'static str, outcome: Result<String, String>) -> CriterionResult {
    match outcome {
        Ok(detail) => CriterionResult { id, name, passed: true, detail },
        Err(detail) => CriterionResult { id, name, passed: false, detail },
    }
}

macro_rules! ensure {
    ($cond:expr, $($msg:tt)*) => {
        if !$cond {
            return Err(format!($($msg)*));
        }
    };
}

fn err_str(e: Error) -> String {
    e.to_string()
}

/// Every algebra of the identity suite, with a label.
fn identity_suite() -> Result<Vec<(String, SuperAlgebra)>, String> {
    let mut out = Vec::new();
    let f3 = Field::rational_functions(["a", "b", "g"]);
    out.push((
        "K3(a,b,g) over Q(a,b,g)".to_string(),
        catalog::make_k3(
            &f3.var("a").unwrap(),
            &f3.var("b").unwrap(),
            &f3.var("g").unwrap(),
        )
        .map_err(err_str)?,
    ));
    let f4 = Field::rational_functions(["a", "b", "g", "t"]);
    out.push((
        "D_t(a,b,g) over Q(a,b,g,t)".to_string(),
        catalog::make_dt(
            &f4.var("t").unwrap(),
            &f4.var("a").unwrap(),
            &f4.var("b").unwrap(),
            &f4.var("g").unwrap(),
        )
        .map_err(err_str)?,
    ));
    // U(V, f, *) members with dim V up to 4.
    for (label, data) in uvf_instances().map_err(err_str)? {
        out.push((label, catalog::make_uvf(&data).map_err(err_str)?));
    }
    // Kantor doubles J(Γ_n, A), n ≤ 3, A ∈ {0, x1x2}.
    let q = Field::Q;
    for n in 1..=3usize {
        out.push((
            format!("J(Gamma_{})", n),
            catalog::make_j_gamma(n, &q).map_err(err_str)?,
        ));
        if n >= 2 {
            let a = GrassmannElement::monomial(n, q.clone(), &[1, 2]);
            out.push((
                format!("J(Gamma_{}, x1x2)", n),
                catalog::make_j_gamma_a(n, &a).map_err(err_str)?,
            ));
        }
    }
    // Bracket algebras Γ_n(D).
    for n in 2..=3usize {
        out.push((
            format!("Gamma_{}(D), identity data", n),
            catalog::make_gamma_nd(n, &catalog::identity_bracket_data(n, &q)).map_err(err_str)?,
        ));
    }
    out.push((
        "Gamma_3(D), diag(1,1,x1x2)".to_string(),
        catalog::make_gamma_nd(3, &catalog::diag_x1x2_bracket_data(&q)).map_err(err_str)?,
    ));
    Ok(out)
}

fn uvf_instances() -> Result<Vec<(String, UvfData)>, Error> {
    let f = Field::Q;
    let mut out = Vec::new();
    // dim V = 1, even.
    out.push((
        "U(V,f,0), dim V0 = 1".to_string(),
        UvfData {
            v_parity: vec![Parity::Even],
            form: Matrix::from_rows(f.clone(), vec![vec![f.one()]]),
            star: None,
        },
    ));
    // dim V1 = 2, symplectic.
    let sympl = Matrix::from_rows(
        f.clone(),
        vec![
            vec![f.zero(), f.one()],
            vec![f.int(-1), f.zero()],
        ],
    );
    out.push((
        "U(V,f,0), dim V1 = 2".to_string(),
        UvfData {
            v_parity: vec![Parity::Odd, Parity::Odd],
            form: sympl,
            star: None,
        },
    ));
    // dim V0 = 1, dim V1 = 2, with a nonzero compatible star.
    let mixed = Matrix::from_rows(
        f.clone(),
        vec![
            vec![f.one(), f.zero(), f.zero()],
            vec![f.zero(), f.zero(), f.one()],
            vec![f.zero(), f.int(-1), f.zero()],
        ],
    );
    let parities = vec![Parity::Even, Parity::Odd, Parity::Odd];
    let stars = catalog::star_solution_space(&parities, &mixed);
    let star = stars
        .into_iter()
        .find(|s| s.iter().any(|c| !c.is_zero()))
        .ok_or_else(|| Error::InvalidAlgebra("no nonzero star available".into()))?;
    out.push((
        "U(V,f,*), dim V = 3, nonzero star".to_string(),
        UvfData { v_parity: parities, form: mixed, star: Some(star) },
    ));
    // dim V0 = 2, dim V1 = 2.
    let four = Matrix::from_rows(
        f.clone(),
        vec![
            vec![f.one(), f.zero(), f.zero(), f.zero()],
            vec![f.zero(), f.one(), f.zero(), f.zero()],
            vec![f.zero(), f.zero(), f.zero(), f.one()],
            vec![f.zero(), f.zero(), f.int(-1), f.zero()],
        ],
    );
    out.push((
        "U(V,f,0), dim V0 = 2, dim V1 = 2".to_string(),
        UvfData {
            v_parity: vec![Parity::Even, Parity::Even, Parity::Odd, Parity::Odd],
            form: four,
            star: None,
        },
    ));
    Ok(out)
}

/// C1: flexibility and the cyclic operator identity hold on every catalog
/// member; the Jordan superidentity holds on every symmetrization.
pub fn c1_identity_suite() -> CriterionResult {
    result("C1", "defining identities on the catalog", (|| {
        let started = std::time::Instant::now();
        let suite = identity_suite()?;
        for (label, alg) in &suite {
            // The cyclic operator identity check includes flexibility.
            let ncj = check_noncomm_jordan(alg);
            ensure!(ncj.passed, "{}: flexibility or the cyclic operator identity failed", label);
            let plus = alg.plus_algebra().map_err(err_str)?;
            let jordan = check_jordan_super(&plus).map_err(err_str)?;
            ensure!(jordan.passed, "{}: Jordan superidentity failed on the plus algebra", label);
        }
        let secs = started.elapsed().as_secs_f64();
        ensure!(secs < 10.0, "identity suite took {:.1}s, budget is 10s", secs);
        Ok(format!("{} algebras verified in {:.2}s", suite.len(), secs))
    })())
}

/// C2: the product is recovered from the symmetrization and the
/// supercommutator bracket, tensor for tensor; the bracket is a generic
/// Poisson bracket on the plus algebra.
pub fn c2_reconstruction_round_trip() -> CriterionResult {
    result("C2", "product recovery from bracket and symmetrization", (|| {
        let suite = identity_suite()?;
        for (label, alg) in &suite {
            let plus = alg.plus_algebra().map_err(err_str)?;
            let bracket = alg.commutator_tensor();
            let poisson = check_poisson_bracket(&plus, &bracket);
            ensure!(poisson.passed, "{}: commutator is not a Poisson bracket on the plus algebra", label);
            let back = reconstruct(&plus, &bracket).map_err(err_str)?;
            ensure!(back.table() == alg.table(), "{}: reconstruction differs from the original tensor", label);
        }
        Ok(format!("{} algebras round-tripped exactly", suite.len()))
    })())
}

fn map_from_rows(f: &Field, parity: Parity, rows: Vec<Vec<FieldValue>>) -> LinearMap {
    LinearMap::new(parity, Matrix::from_rows(f.clone(), rows))
}

fn space_contains(basis: &[LinearMap], d: &LinearMap) -> bool {
    if basis.is_empty() {
        return d.is_zero();
    }
    let field = basis[0].matrix.field().clone();
    let rows: Vec<Vec<FieldValue>> = basis.iter().map(|b| b.flatten()).collect();
    in_row_space(&Matrix::from_rows(field, rows), &d.flatten())
}

/// C3: derivation dimensions of the three K3 cases, with the explicit
/// generator actions landing inside the computed spaces.
pub fn c3_k3_derivations() -> CriterionResult {
    result("C3", "K3 derivation spaces", (|| {
        let q = Field::Q;
        let k3 = catalog::make_k3(&q.ratio(1, 2), &q.zero(), &q.zero()).map_err(err_str)?;
        let ds = derivation_space(&k3);
        ensure!(ds.dims() == (3, 2), "K3: expected dims (3,2), got {:?}", ds.dims());
        // Even family: ed = 0, zd = g1 z + g2 w, wd = g3 z - g1 w.
        let z = |v: i64| q.int(v);
        let even_gens = [
            map_from_rows(&q, Parity::Even, vec![vec![z(0), z(0), z(0)], vec![z(0), z(1), z(0)], vec![z(0), z(0), z(-1)]]),
            map_from_rows(&q, Parity::Even, vec![vec![z(0), z(0), z(0)], vec![z(0), z(0), z(1)], vec![z(0), z(0), z(0)]]),
            map_from_rows(&q, Parity::Even, vec![vec![z(0), z(0), z(0)], vec![z(0), z(0), z(0)], vec![z(0), z(1), z(0)]]),
        ];
        for (i, d) in even_gens.iter().enumerate() {
            ensure!(is_derivation(&k3, d), "K3 even generator {} fails the Leibniz rule", i);
            ensure!(space_contains(&ds.even, d), "K3 even generator {} outside the computed space", i);
        }
        // Odd family: ed = g1 z + g2 w, zd = -2 g2 e, wd = 2 g1 e.
        let odd_gens = [
            map_from_rows(&q, Parity::Odd, vec![vec![z(0), z(1), z(0)], vec![z(0), z(0), z(0)], vec![z(2), z(0), z(0)]]),
            map_from_rows(&q, Parity::Odd, vec![vec![z(0), z(0), z(1)], vec![z(-2), z(0), z(0)], vec![z(0), z(0), z(0)]]),
        ];
        for (i, d) in odd_gens.iter().enumerate() {
            ensure!(is_derivation(&k3, d), "K3 odd generator {} fails the Leibniz rule", i);
            ensure!(space_contains(&ds.odd, d), "K3 odd generator {} outside the computed space", i);
        }
        // Generic α over Q(a): one even derivation zd = γz, wd = -γw.
        let fa = Field::rational_functions(["a"]);
        let generic = catalog::make_k3(&fa.var("a").unwrap(), &fa.zero(), &fa.zero()).map_err(err_str)?;
        let dsg = derivation_space(&generic);
        ensure!(dsg.dims() == (1, 0), "K3(a): expected dims (1,0), got {:?}", dsg.dims());
        let za = |v: i64| fa.int(v);
        let gen_a = map_from_rows(&fa, Parity::Even, vec![vec![za(0), za(0), za(0)], vec![za(0), za(1), za(0)], vec![za(0), za(0), za(-1)]]);
        ensure!(space_contains(&dsg.even, &gen_a), "K3(a): diagonal generator outside the space");
        // The beta = 1/2 member: one even derivation. The printed action
        // (ed = 0, zd = 0, wd = γw) is not in the sl2 family of the
        // symmetrization and fails the Leibniz rule on the pair (z, w); the
        // derivation space is spanned by ed = 0, zd = γw, wd = 0 instead
        // (the claimed variant is asserted absent as a regression guard).
        let half = catalog::make_k3(&q.ratio(1, 2), &q.ratio(1, 2), &q.zero()).map_err(err_str)?;
        let dsh = derivation_space(&half);
        ensure!(dsh.dims() == (1, 0), "K3 half member: expected dims (1,0), got {:?}", dsh.dims());
        let gen_h = map_from_rows(&q, Parity::Even, vec![vec![z(0), z(0), z(0)], vec![z(0), z(0), z(1)], vec![z(0), z(0), z(0)]]);
        ensure!(is_derivation(&half, &gen_h), "K3 half member: z-to-w generator fails the Leibniz rule");
        ensure!(space_contains(&dsh.even, &gen_h), "K3 half member: z-to-w generator outside the space");
        let misprint = map_from_rows(&q, Parity::Even, vec![vec![z(0), z(0), z(0)], vec![z(0), z(0), z(0)], vec![z(0), z(0), z(1)]]);
        ensure!(!is_derivation(&half, &misprint), "K3 half member: w-scaling unexpectedly became a derivation");
        // Generic-vs-special consistency at five rational points.
        for a_val in [2i64, 3, 5, -1, 7] {
            let s = catalog::make_k3(&q.int(a_val), &q.zero(), &q.zero()).map_err(err_str)?;
            ensure!(derivation_space(&s).dims() == (1, 0), "specialization a={} disagrees", a_val);
        }
        Ok("dims (3,2)/(1,0)/(1,0); all printed generators verified and contained".to_string())
    })())
}

/// C4: derivation dimensions of the three D_t cases with explicit
/// generators.
pub fn c4_dt_derivations() -> CriterionResult {
    result("C4", "D_t derivation spaces", (|| {
        let ft = Field::rational_functions(["t"]);
        let t = ft.var("t").unwrap();
        let half = ft.parse("1/2").unwrap();
        let dt = catalog::make_dt(&t, &half, &ft.zero(), &ft.zero()).map_err(err_str)?;
        let ds = derivation_space(&dt);
        ensure!(ds.dims() == (3, 2), "D_t: expected dims (3,2), got {:?}", ds.dims());
        let z = |v: i64| ft.int(v);
        // Even family: e_i d = 0, xd = g1 x + g2 y, yd = g3 x - g1 y.
        let even_gens = [
            map_from_rows(&ft, Parity::Even, vec![
                vec![z(0), z(0), z(0), z(0)],
                vec![z(0), z(0), z(0), z(0)],
                vec![z(0), z(0), z(1), z(0)],
                vec![z(0), z(0), z(0), z(-1)],
            ]),
            map_from_rows(&ft, Parity::Even, vec![
                vec![z(0), z(0), z(0), z(0)],
                vec![z(0), z(0), z(0), z(0)],
                vec![z(0), z(0), z(0), z(1)],
                vec![z(0), z(0), z(0), z(0)],
            ]),
            map_from_rows(&ft, Parity::Even, vec![
                vec![z(0), z(0), z(0), z(0)],
                vec![z(0), z(0), z(0), z(0)],
                vec![z(0), z(0), z(0), z(0)],
                vec![z(0), z(0), z(1), z(0)],
            ]),
        ];
        for (i, d) in even_gens.iter().enumerate() {
            ensure!(is_derivation(&dt, d), "D_t even generator {} fails", i);
            ensure!(space_contains(&ds.even, d), "D_t even generator {} outside the space", i);
        }
        // Odd family (the second displayed action is read on y):
        // e1 d = g1 x + g2 y, e2 d = -(g1 x + g2 y),
        // xd = -2 g2 (e1 - t e2), yd = 2 g1 (e1 - t e2).
        let odd1 = map_from_rows(&ft, Parity::Odd, vec![
            vec![z(0), z(0), z(1), z(0)],
            vec![z(0), z(0), z(-1), z(0)],
            vec![z(0), z(0), z(0), z(0)],
            vec![z(2), t.mul_int(-2), z(0), z(0)],
        ]);
        let odd2 = map_from_rows(&ft, Parity::Odd, vec![
            vec![z(0), z(0), z(0), z(1)],
            vec![z(0), z(0), z(0), z(-1)],
            vec![z(-2), t.mul_int(2), z(0), z(0)],
            vec![z(0), z(0), z(0), z(0)],
        ]);
        for (i, d) in [&odd1, &odd2].iter().enumerate() {
            ensure!(is_derivation(&dt, d), "D_t odd generator {} fails", i);
            ensure!(space_contains(&ds.odd, d), "D_t odd generator {} outside the space", i);
        }
        // Generic α over Q(a, t): dims (1, 0), generator xd = x, yd = -y.
        let fat = Field::rational_functions(["a", "t"]);
        let generic = catalog::make_dt(
            &fat.var("t").unwrap(),
            &fat.var("a").unwrap(),
            &fat.zero(),
            &fat.zero(),
        )
        .map_err(err_str)?;
        let dsg = derivation_space(&generic);
        ensure!(dsg.dims() == (1, 0), "D_t(a): expected (1,0), got {:?}", dsg.dims());
        let za = |v: i64| fat.int(v);
        let gen_a = map_from_rows(&fat, Parity::Even, vec![
            vec![za(0), za(0), za(0), za(0)],
            vec![za(0), za(0), za(0), za(0)],
            vec![za(0), za(0), za(1), za(0)],
            vec![za(0), za(0), za(0), za(-1)],
        ]);
        ensure!(space_contains(&dsg.even, &gen_a), "D_t(a): scaling generator outside the space");
        // The beta = 1/2 member over Q(t): dims (1, 0). As for the K3 half
        // member, the space is spanned by xd = γy, yd = 0 (the y-scaling
        // variant is not a derivation).
        let halfhalf = catalog::make_dt(&t, &half, &half, &ft.zero()).map_err(err_str)?;
        let dsh = derivation_space(&halfhalf);
        ensure!(dsh.dims() == (1, 0), "D_t half member: expected (1,0), got {:?}", dsh.dims());
        let gen_h = map_from_rows(&ft, Parity::Even, vec![
            vec![z(0), z(0), z(0), z(0)],
            vec![z(0), z(0), z(0), z(0)],
            vec![z(0), z(0), z(0), z(1)],
            vec![z(0), z(0), z(0), z(0)],
        ]);
        ensure!(is_derivation(&halfhalf, &gen_h), "D_t half member: x-to-y generator fails the Leibniz rule");
        ensure!(space_contains(&dsh.even, &gen_h), "D_t half member: x-to-y generator outside the space");
        Ok("dims (3,2)/(1,0)/(1,0); generators verified (odd actions read on y; half-member generator is the x-to-y map)".to_string())
    })())
}

/// C5: a standard sl2 triple exists in the even derivation parts, and the
/// five-dimensional derivation superalgebras close under the bracket.
pub fn c5_sl2_recognition() -> CriterionResult {
    result("C5", "sl2 recognition and bracket closure", (|| {
        let q = Field::Q;
        let k3 = catalog::make_k3(&q.ratio(1, 2), &q.zero(), &q.zero()).map_err(err_str)?;
        let ds = derivation_space(&k3);
        let triple = find_sl2_triple(&k3, &ds.even)
            .map_err(err_str)?
            .ok_or("no sl2 triple found in Der(K3) even part")?;
        ensure!(
            triple.h.supercommutator(&triple.e).matrix == triple.e.matrix.scale(&q.int(2)),
            "K3 triple: [h,e] != 2e"
        );
        let closure = derivation::closure_check(&k3, &ds);
        ensure!(closure.closed && closure.dim == 5, "Der(K3) closure failed");
        ensure!(closure.jacobi_ok, "Der(K3) Jacobi failed");

        // D_t at t = 3 over the rationals.
        let d3 = catalog::make_dt(&q.int(3), &q.ratio(1, 2), &q.zero(), &q.zero()).map_err(err_str)?;
        let ds3 = derivation_space(&d3);
        ensure!(ds3.dims() == (3, 2), "D_3: expected dims (3,2), got {:?}", ds3.dims());
        let triple3 = find_sl2_triple(&d3, &ds3.even)
            .map_err(err_str)?
            .ok_or("no sl2 triple found in Der(D_3) even part")?;
        ensure!(
            triple3.e.supercommutator(&triple3.f).matrix == triple3.h.matrix,
            "D_3 triple: [e,f] != h"
        );
        let closure3 = derivation::closure_check(&d3, &ds3);
        ensure!(closure3.closed && closure3.dim == 5 && closure3.jacobi_ok, "Der(D_3) closure failed");
        // And the symbolic D_t over Q(t).
        let ft = Field::rational_functions(["t"]);
        let dt = catalog::make_dt(
            &ft.var("t").unwrap(),
            &ft.parse("1/2").unwrap(),
            &ft.zero(),
            &ft.zero(),
        )
        .map_err(err_str)?;
        let dst = derivation_space(&dt);
        let closure_t = derivation::closure_check(&dt, &dst);
        ensure!(closure_t.closed && closure_t.dim == 5 && closure_t.jacobi_ok, "Der(D_t) closure failed");
        Ok("sl2 triples found; 5-dim derivation superalgebras close with Jacobi".to_string())
    })())
}

/// C6: the parametric automorphism families verify symbolically, and the
/// exhaustive GF(5) oracle finds nothing outside the family shapes.
pub fn c6_automorphism_families() -> CriterionResult {
    result("C6", "automorphism families, symbolic and oracle", (|| {
        // Scaling family on K3(a): e -> e, z -> g z, w -> g^{-1} w.
        let f = Field::rational_functions(["a", "g"]);
        let k3 = catalog::make_k3(&f.var("a").unwrap(), &f.zero(), &f.zero()).map_err(err_str)?;
        let g = f.var("g").unwrap();
        let mut m = Matrix::zero(f.clone(), 3, 3);
        *m.at_mut(0, 0) = f.one();
        *m.at_mut(1, 1) = g.clone();
        *m.at_mut(2, 2) = g.inv().map_err(err_str)?;
        ensure!(
            is_automorphism(&k3, &LinearMap::new(Parity::Even, m)).map_err(err_str)?.is_automorphism,
            "K3 scaling family failed"
        );
        // Unimodular family on K3 with the determinant-one substitution.
        let f2 = Field::rational_functions(["g1", "g2", "g3", "g4"]);
        let half = f2.parse("1/2").unwrap();
        let k3j = catalog::make_k3(&half, &f2.zero(), &f2.zero()).map_err(err_str)?;
        let mut m2 = Matrix::zero(f2.clone(), 3, 3);
        *m2.at_mut(0, 0) = f2.one();
        *m2.at_mut(1, 1) = f2.var("g1").unwrap();
        *m2.at_mut(1, 2) = f2.var("g2").unwrap();
        *m2.at_mut(2, 1) = f2.var("g3").unwrap();
        *m2.at_mut(2, 2) = f2.var("g4").unwrap();
        let det_constraint = f2
            .one()
            .add(&f2.var("g2").unwrap().mul(&f2.var("g3").unwrap()))
            .div(&f2.var("g1").unwrap())
            .map_err(err_str)?;
        let pm = ParametricMap::new(LinearMap::new(Parity::Even, m2)).with_constraint("g4", det_constraint.clone());
        ensure!(
            is_automorphism(&k3j, &pm.resolved().map_err(err_str)?).map_err(err_str)?.is_automorphism,
            "K3 unimodular family failed"
        );
        // Shear family on the half member: z -> ±z + kw, w -> ±w.
        let fk = Field::rational_functions(["k"]);
        let halfk = fk.parse("1/2").unwrap();
        let k3h = catalog::make_k3(&halfk, &halfk, &fk.zero()).map_err(err_str)?;
        for sign in [1i64, -1] {
            let mut m3 = Matrix::zero(fk.clone(), 3, 3);
            *m3.at_mut(0, 0) = fk.one();
            *m3.at_mut(1, 1) = fk.int(sign);
            *m3.at_mut(1, 2) = fk.var("k").unwrap();
            *m3.at_mut(2, 2) = fk.int(sign);
            ensure!(
                is_automorphism(&k3h, &LinearMap::new(Parity::Even, m3)).map_err(err_str)?.is_automorphism,
                "K3 half shear family failed at sign {}",
                sign
            );
        }
        // D_t scaling family.
        let fdt = Field::rational_functions(["a", "t", "g"]);
        let dt = catalog::make_dt(
            &fdt.var("t").unwrap(),
            &fdt.var("a").unwrap(),
            &fdt.zero(),
            &fdt.zero(),
        )
        .map_err(err_str)?;
        let gd = fdt.var("g").unwrap();
        let mut m4 = Matrix::zero(fdt.clone(), 4, 4);
        *m4.at_mut(0, 0) = fdt.one();
        *m4.at_mut(1, 1) = fdt.one();
        *m4.at_mut(2, 2) = gd.clone();
        *m4.at_mut(3, 3) = gd.inv().map_err(err_str)?;
        ensure!(
            is_automorphism(&dt, &LinearMap::new(Parity::Even, m4)).map_err(err_str)?.is_automorphism,
            "D_t scaling family failed"
        );
        // D_t unimodular family at alpha = 1/2 with the same substitution.
        let f5 = Field::rational_functions(["t", "g1", "g2", "g3", "g4"]);
        let half5 = f5.parse("1/2").unwrap();
        let dth = catalog::make_dt(&f5.var("t").unwrap(), &half5, &f5.zero(), &f5.zero()).map_err(err_str)?;
        let mut m5 = Matrix::zero(f5.clone(), 4, 4);
        *m5.at_mut(0, 0) = f5.one();
        *m5.at_mut(1, 1) = f5.one();
        *m5.at_mut(2, 2) = f5.var("g1").unwrap();
        *m5.at_mut(2, 3) = f5.var("g2").unwrap();
        *m5.at_mut(3, 2) = f5.var("g3").unwrap();
        *m5.at_mut(3, 3) = f5.var("g4").unwrap();
        let det5 = f5
            .one()
            .add(&f5.var("g2").unwrap().mul(&f5.var("g3").unwrap()))
            .div(&f5.var("g1").unwrap())
            .map_err(err_str)?;
        let pm5 = ParametricMap::new(LinearMap::new(Parity::Even, m5)).with_constraint("g4", det5);
        ensure!(
            is_automorphism(&dth, &pm5.resolved().map_err(err_str)?).map_err(err_str)?.is_automorphism,
            "D_t unimodular family failed"
        );
        // D_t half member: x -> ±x + γy, y -> ±y.
        let f6 = Field::rational_functions(["t", "g"]);
        let half6 = f6.parse("1/2").unwrap();
        let dthh = catalog::make_dt(&f6.var("t").unwrap(), &half6, &half6, &f6.zero()).map_err(err_str)?;
        for sign in [1i64, -1] {
            let mut m6 = Matrix::zero(f6.clone(), 4, 4);
            *m6.at_mut(0, 0) = f6.one();
            *m6.at_mut(1, 1) = f6.one();
            *m6.at_mut(2, 2) = f6.int(sign);
            *m6.at_mut(2, 3) = f6.var("g").unwrap();
            *m6.at_mut(3, 3) = f6.int(sign);
            ensure!(
                is_automorphism(&dthh, &LinearMap::new(Parity::Even, m6)).map_err(err_str)?.is_automorphism,
                "D_t half shear family failed at sign {}",
                sign
            );
        }

        // Exhaustive oracle over GF(5); counts pinned.
        let gf = Field::Fp(5);
        let budget = morphism::DEFAULT_SEARCH_BUDGET;
        let cases: Vec<(&str, SuperAlgebra, AutomorphismFamily, usize)> = vec![
            (
                "K3(2)/GF(5)",
                catalog::make_k3(&gf.int(2), &gf.zero(), &gf.zero()).map_err(err_str)?,
                AutomorphismFamily::K3Scaling,
                4,
            ),
            (
                "K3(3)/GF(5)",
                catalog::make_k3(&gf.int(3), &gf.zero(), &gf.zero()).map_err(err_str)?,
                AutomorphismFamily::K3Unimodular,
                120,
            ),
            (
                "K3(3,3,0)/GF(5)",
                catalog::make_k3(&gf.int(3), &gf.int(3), &gf.zero()).map_err(err_str)?,
                AutomorphismFamily::K3HalfShear,
                10,
            ),
            (
                "D_2(2)/GF(5)",
                catalog::make_dt(&gf.int(2), &gf.int(2), &gf.zero(), &gf.zero()).map_err(err_str)?,
                AutomorphismFamily::DtScaling,
                4,
            ),
        ];
        let mut counts = Vec::new();
        for (label, alg, family, expected) in &cases {
            let auts = enumerate_automorphisms(alg, budget).map_err(err_str)?;
            ensure!(
                auts.len() == *expected,
                "{}: expected {} automorphisms, oracle found {}",
                label,
                expected,
                auts.len()
            );
            for phi in &auts {
                ensure!(family.matches(alg, phi), "{}: automorphism outside the family shape", label);
            }
            ensure!(morphism::is_group(alg, &auts), "{}: enumerated set is not a group", label);
            counts.push(format!("{}:{}", label, auts.len()));
        }
        Ok(format!("six parametric families verified; oracle counts {}", counts.join(", ")))
    })())
}

/// C7: every classified subalgebra family closes symbolically, and the
/// exhaustive GF(p) enumerations produce exactly the family spans.
pub fn c7_subalgebra_families() -> CriterionResult {
    result("C7", "subalgebra families, symbolic and oracle", (|| {
        for item in morphism::family_table() {
            let rep = verify_family_closure(item.class, item.item).map_err(err_str)?;
            ensure!(
                rep.all_closed,
                "{} item {}: some family instance not closed: {:?}",
                item.class,
                item.item,
                rep.instances
            );
        }
        // Oracle: exhaustive enumerations match the family sets exactly.
        let gf5 = Field::Fp(5);
        let budget = morphism::DEFAULT_SEARCH_BUDGET;
        let mut lines = Vec::new();
        {
            // K3 members over GF(5).
            for (label, alpha, beta) in [
                ("K3(2)", gf5.int(2), gf5.zero()),
                ("K3(3)", gf5.int(3), gf5.zero()),
                ("K3(3,3,0)", gf5.int(3), gf5.int(3)),
            ] {
                let alg = catalog::make_k3(&alpha, &beta, &gf5.zero()).map_err(err_str)?;
                for d in 1..3 {
                    let (found, fam, equal) =
                        subalgebras_match_families(&alg, &alpha, &beta, None, d, budget).map_err(err_str)?;
                    ensure!(
                        equal,
                        "{} dim {}: oracle found {} spans, family predicts {}",
                        label,
                        d,
                        found,
                        fam
                    );
                    lines.push(format!("{} d{}={}", label, d, found));
                }
            }
        }
        {
            // D_t members over GF(5): generic alpha and t, both special t
            // values, the alpha = 1/2 line, and the half member.
            for (label, t, alpha, beta) in [
                ("D_2(2)", gf5.int(2), gf5.int(2), gf5.zero()),
                ("D_-1(2)", gf5.int(-1), gf5.int(2), gf5.zero()),
                ("D_2(3)", gf5.int(2), gf5.int(3), gf5.zero()),
                ("D_-1(3)", gf5.int(-1), gf5.int(3), gf5.zero()),
                ("D_1(3)", gf5.int(1), gf5.int(3), gf5.zero()),
                ("D_2(3,3,0)", gf5.int(2), gf5.int(3), gf5.int(3)),
            ] {
                let alg = catalog::make_dt(&t, &alpha, &beta, &gf5.zero()).map_err(err_str)?;
                for d in 1..4 {
                    let (found, fam, equal) =
                        subalgebras_match_families(&alg, &alpha, &beta, Some(&t), d, budget).map_err(err_str)?;
                    ensure!(
                        equal,
                        "{} dim {}: oracle found {} spans, family predicts {}",
                        label,
                        d,
                        found,
                        fam
                    );
                    lines.push(format!("{} d{}={}", label, d, found));
                }
            }
        }
        {
            // The square-root and ±2i items live over GF(13).
            let gf13 = Field::Fp(13);
            let half13 = gf13.parse("1/2").unwrap();
            let alg = catalog::make_dt(&gf13.int(-1), &half13, &half13, &gf13.zero()).map_err(err_str)?;
            for d in 1..4 {
                let (found, fam, equal) = subalgebras_match_families(
                    &alg,
                    &half13,
                    &half13,
                    Some(&gf13.int(-1)),
                    d,
                    budget,
                )
                .map_err(err_str)?;
                ensure!(
                    equal,
                    "D_-1 half member /GF(13) dim {}: oracle {} vs family {}",
                    d,
                    found,
                    fam
                );
                lines.push(format!("D_-1(1/2,1/2)/GF13 d{}={}", d, found));
            }
        }
        Ok(format!("all family items closed; oracle counts: {}", lines.join(", ")))
    })())
}

/// C8: the derivations of J(V,f) match the form-compatibility
/// characterization for four signatures, and for a nonzero ⋆ the
/// derivations of U(V,f,⋆) are exactly the compatible maps that also
/// differentiate ⋆.
pub fn c8_form_algebra_derivations() -> CriterionResult {
    result("C8", "form-algebra derivation characterizations", (|| {
        let f = Field::Q;
        let sym = |n: usize| Matrix::identity(f.clone(), n);
        let sympl = Matrix::from_rows(
            f.clone(),
            vec![vec![f.zero(), f.one()], vec![f.int(-1), f.zero()]],
        );
        // (dim V0, dim V1) = (1,0), (2,0), (0,2), (2,2) with expected dims.
        let cases: Vec<(Vec<Parity>, Matrix, (usize, usize))> = vec![
            (vec![Parity::Even], sym(1), (0, 0)),
            (vec![Parity::Even, Parity::Even], sym(2), (1, 0)),
            (vec![Parity::Odd, Parity::Odd], sympl.clone(), (3, 0)),
            (
                vec![Parity::Even, Parity::Even, Parity::Odd, Parity::Odd],
                {
                    let mut m = Matrix::zero(f.clone(), 4, 4);
                    *m.at_mut(0, 0) = f.one();
                    *m.at_mut(1, 1) = f.one();
                    *m.at_mut(2, 3) = f.one();
                    *m.at_mut(3, 2) = f.int(-1);
                    m
                },
                (4, 4),
            ),
        ];
        for (parities, form, expected) in &cases {
            let rep = derivation::lieosp_check(parities, form).map_err(err_str)?;
            ensure!(
                rep.spaces_agree,
                "signature {:?}: characterizations disagree ({:?} vs {:?})",
                parities,
                rep.derivation_dims,
                rep.form_dims
            );
            ensure!(rep.unit_killed && rep.v_preserved, "signature {:?}: unit/V checks failed", parities);
            ensure!(
                rep.derivation_dims == *expected,
                "signature {:?}: expected dims {:?}, got {:?}",
                parities,
                expected,
                rep.derivation_dims
            );
        }
        // Nonzero star instance.
        let instances = uvf_instances().map_err(err_str)?;
        let (label, star_data) = instances
            .into_iter()
            .find(|(_, d)| d.star.is_some())
            .ok_or("no nonzero star instance")?;
        let rep = derivation::uvfstar_der_check(&star_data).map_err(err_str)?;
        ensure!(rep.contained_in_lieosp, "{}: derivations leave the compatible-map space", label);
        ensure!(
            rep.equals_intersection,
            "{}: Der(U) != Lieosp ∩ Der(star), dims {:?} vs {:?}",
            label,
            rep.derivation_dims,
            rep.intersection_dims
        );
        Ok("four signatures agree; nonzero-star intersection property holds".to_string())
    })())
}

/// C9: lifts of Hamiltonian derivations and all barred-to-unbarred maps are
/// derivations of the double; the annihilation criterion matches the direct
/// test on the deformed double.
pub fn c9_double_derivations() -> CriterionResult {
    result("C9", "Kantor double derivation lifts", (|| {
        let q = Field::Q;
        for n in 1..=3usize {
            let double = catalog::make_j_gamma(n, &q).map_err(err_str)?;
            for mask in 0..(1u32 << n) {
                let pot = GrassmannElement::from_terms(n, q.clone(), [(mask, q.one())]);
                let d = hn_from_potential(&pot);
                let lift = jgamma_derivation(DoubleDerivation::FromGrassmann(&d), &q).map_err(err_str)?;
                ensure!(
                    is_derivation(&double, &lift),
                    "n={}: potential lift {:#b} fails the Leibniz rule",
                    n,
                    mask
                );
                let x = GrassmannElement::from_terms(n, q.clone(), [(mask, q.one())]);
                let d2 = jgamma_derivation(DoubleDerivation::BarredToUnbarred(&x), &q).map_err(err_str)?;
                ensure!(
                    is_derivation(&double, &d2),
                    "n={}: barred-to-unbarred lift {:#b} fails",
                    n,
                    mask
                );
            }
        }
        // Annihilation criterion on the deformed doubles, A in {0, x1x2}.
        for n in 2..=3usize {
            for a_elem in [
                GrassmannElement::zero(n, q.clone()),
                GrassmannElement::monomial(n, q.clone(), &[1, 2]),
            ] {
                for mask in 0..(1u32 << n) {
                    let pot = GrassmannElement::from_terms(n, q.clone(), [(mask, q.one())]);
                    let d = hn_from_potential(&pot);
                    // The call cross-checks criterion vs direct test and
                    // errors on disagreement.
                    let _ = jgamma_a_d1_criterion(&d, &a_elem).map_err(err_str)?;
                }
                // Every barred-to-unbarred map is a derivation of the
                // deformed double, for every A.
                let deformed = catalog::make_j_gamma_a(n, &a_elem).map_err(err_str)?;
                for mask in 0..(1u32 << n) {
                    let x = GrassmannElement::from_terms(n, q.clone(), [(mask, q.one())]);
                    let d2 = jgamma_derivation(DoubleDerivation::BarredToUnbarred(&x), &q).map_err(err_str)?;
                    ensure!(
                        is_derivation(&deformed, &d2),
                        "n={}: barred-to-unbarred map fails on the deformed double",
                        n
                    );
                }
            }
        }
        // Odd deformation data is rejected.
        let odd = GrassmannElement::generator(2, q.clone(), 1);
        ensure!(
            matches!(catalog::make_j_gamma_a(2, &odd), Err(Error::AOdd)),
            "odd deformation element was accepted"
        );
        Ok("all lifts verified for n ≤ 3; criterion agrees with the direct test".to_string())
    })())
}

/// C10: the bracket-compatibility solver reproduces the two worked
/// examples, and the commutant-annihilator space is contained in the
/// derivation space.
pub fn c10_bracket_algebra_derivations() -> CriterionResult {
    result("C10", "bracket-algebra derivation solver", (|| {
        let started = std::time::Instant::now();
        let q = Field::Q;
        // Identity data: solutions are exactly the Hamiltonian relation set
        // f_i ∂_j + f_j ∂_i = 0, cross-checked as spans for n = 2, 3.
        for n in 2..=3usize {
            let data = catalog::identity_bracket_data(n, &q);
            for s in [Parity::Even, Parity::Odd] {
                let sols = gras_der_solve(n, &data, s).map_err(err_str)?;
                for d in &sols {
                    ensure!(d.is_hamiltonian(), "n={} {}: solution violates the relation set", n, s);
                }
                // Independent count: solve the relation system directly.
                let ham = hamiltonian_space_dim(n, &q, s);
                ensure!(
                    sols.len() == ham,
                    "n={} {}: solver dim {} vs relation-set dim {}",
                    n,
                    s,
                    sols.len(),
                    ham
                );
            }
        }
        // The diag(1, 1, x1x2) example: the three generator families.
        let data = catalog::diag_x1x2_bracket_data(&q);
        let even = gras_der_solve(3, &data, Parity::Even).map_err(err_str)?;
        let odd = gras_der_solve(3, &data, Parity::Odd).map_err(err_str)?;
        // Family 1 (x1 d = γ x2, x2 d = -γ x1, x3 d = 0): an even map.
        let fam1 = WnDerivation::new(
            Parity::Even,
            vec![
                GrassmannElement::generator(3, q.clone(), 2),
                GrassmannElement::generator(3, q.clone(), 1).neg(),
                GrassmannElement::zero(3, q.clone()),
            ],
        )
        .map_err(err_str)?;
        // Family 2 (x3 d = γ, constant component): parity-reversing, hence
        // an odd map (its components are even), matching the generator
        // derivations which are themselves odd with even values.
        let fam2 = WnDerivation::new(
            Parity::Odd,
            vec![
                GrassmannElement::zero(3, q.clone()),
                GrassmannElement::zero(3, q.clone()),
                GrassmannElement::one(3, q.clone()),
            ],
        )
        .map_err(err_str)?;
        // Family 3 (x1 d = γ x2x3, x2 d = -γ x1x3, x3 d = 0): odd.
        let fam3 = WnDerivation::new(
            Parity::Odd,
            vec![
                GrassmannElement::monomial(3, q.clone(), &[2, 3]),
                GrassmannElement::monomial(3, q.clone(), &[1, 3]).neg(),
                GrassmannElement::zero(3, q.clone()),
            ],
        )
        .map_err(err_str)?;
        ensure!(even.len() == 1, "diag example: even solution dim {} != 1", even.len());
        ensure!(odd.len() == 2, "diag example: odd solution dim {} != 2", odd.len());
        ensure!(
            wn_in_span(&even, &fam1),
            "diag example: rotation family missing from the even solutions"
        );
        ensure!(
            wn_in_span(&odd, &fam2),
            "diag example: constant-component family missing from the odd solutions"
        );
        ensure!(
            wn_in_span(&odd, &fam3),
            "diag example: product family missing from the odd solutions"
        );
        // The two-parameter grouping (rotation + constant) and the
        // one-parameter grouping (product family) exhaust the space:
        // total dimension 3.
        ensure!(even.len() + odd.len() == 3, "diag example: total dimension != 3");

        // Commutant-annihilator inclusion on both datasets.
        for (label, data) in [
            ("identity data".to_string(), catalog::identity_bracket_data(3, &q)),
            ("diag(1,1,x1x2)".to_string(), catalog::diag_x1x2_bracket_data(&q)),
        ] {
            let rep = cent_ann_inclusion_check(3, &data).map_err(err_str)?;
            ensure!(rep.inclusion_holds, "{}: inclusion fails", label);
        }
        let secs = started.elapsed().as_secs_f64();
        ensure!(secs < 5.0, "solver suite took {:.1}s, budget is 5s", secs);
        Ok(format!(
            "relation sets and example dims reproduced (even 1 + odd 2, grouped 2+1) in {:.2}s",
            secs
        ))
    })())
}

fn hamiltonian_space_dim(n: usize, field: &Field, s: Parity) -> usize {
    // Solve f_i ∂_j + f_j ∂_i = 0 directly over monomial coefficients.
    let comp_parity = s.flip();
    let monomials: Vec<u32> = (0..(1u32 << n))
        .filter(|m| Parity::from_u8((m.count_ones() % 2) as u8) == comp_parity)
        .collect();
    let unknowns: Vec<(usize, u32)> = (0..n)
        .flat_map(|k| monomials.iter().map(move |m| (k, *m)))
        .collect();
    let mut rows = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let mut per_unknown: Vec<GrassmannElement> = Vec::with_capacity(unknowns.len());
            for &(k, mset) in &unknowns {
                let xs = GrassmannElement::from_terms(n, field.clone(), [(mset, field.one())]);
                let mut term = GrassmannElement::zero(n, field.clone());
                if k == i {
                    term = term.add(&xs.partial(j + 1));
                }
                if k == j {
                    term = term.add(&xs.partial(i + 1));
                }
                per_unknown.push(term);
            }
            for target in 0..(1u32 << n) {
                let row: Vec<FieldValue> = per_unknown.iter().map(|e| e.coefficient(target)).collect();
                if row.iter().any(|c| !c.is_zero()) {
                    rows.push(row);
                }
            }
        }
    }
    if rows.is_empty() {
        unknowns.len()
    } else {
        Matrix::from_rows(field.clone(), rows).kernel_basis().len()
    }
}

fn wn_in_span(basis: &[WnDerivation], d: &WnDerivation) -> bool {
    if basis.is_empty() {
        return d.is_zero();
    }
    let field = d.components[0].field().clone();
    let n = d.n;
    let coords = |w: &WnDerivation| -> Vec<FieldValue> {
        let mut out = Vec::new();
        for k in 0..n {
            for m in 0..(1u32 << n) {
                out.push(w.components[k].coefficient(m));
            }
        }
        out
    };
    let rows: Vec<Vec<FieldValue>> = basis.iter().map(coords).collect();
    in_row_space(&Matrix::from_rows(field, rows), &coords(d))
}

/// C11: the kernel dimension of the Leibniz system agrees with full brute
/// force over GF(5) on randomized two-dimensional algebras.
pub fn c11_oracle_consistency() -> CriterionResult {
    result("C11", "solver vs brute force on random algebras", (|| {
        let p = 5u64;
        let field = Field::Fp(p);
        let mut rng = SplitMix64::new(0x5eed_cafe_f00d_0001);
        let mut checked = 0usize;
        let parities = [
            vec![Parity::Even, Parity::Even],
            vec![Parity::Even, Parity::Odd],
            vec![Parity::Odd, Parity::Odd],
        ];
        let mut attempts = 0usize;
        while checked < 20 {
            attempts += 1;
            ensure!(attempts < 400, "could not draw 20 random graded algebras");
            let par = parities[(rng.next() % 3) as usize].clone();
            let dim = 2usize;
            let mut table = vec![field.zero(); 8];
            for i in 0..dim {
                for j in 0..dim {
                    for k in 0..dim {
                        if par[k] == par[i].plus(par[j]) {
                            table[(i * dim + j) * dim + k] =
                                FieldValue::PrimeField { p, value: rng.next() % p };
                        }
                    }
                }
            }
            let Ok(alg) = SuperAlgebra::new(
                field.clone(),
                par,
                vec!["u".into(), "v".into()],
                table,
            ) else {
                continue;
            };
            for s in [Parity::Even, Parity::Odd] {
                let (sys, unknowns) = derivation::derivation_system(&alg, s);
                let nullity = sys.kernel_basis().len();
                // Brute force over all parity-s maps.
                let mut count = 0u64;
                let mut digits = vec![0u64; unknowns.len()];
                loop {
                    let mut m = Matrix::zero(field.clone(), dim, dim);
                    for (k, &(i, j)) in unknowns.iter().enumerate() {
                        *m.at_mut(i, j) = FieldValue::PrimeField { p, value: digits[k] };
                    }
                    if is_derivation(&alg, &LinearMap::new(s, m)) {
                        count += 1;
                    }
                    if digits.is_empty() || !increment_digits(&mut digits, p) {
                        break;
                    }
                }
                let expected = (p as u64).pow(nullity as u32);
                ensure!(
                    count == expected,
                    "random algebra {}: {} solver nullity {} but brute force found {}",
                    checked,
                    s,
                    nullity,
                    count
                );
            }
            checked += 1;
        }
        Ok("20 random GF(5) algebras: kernel dimension matches brute force".to_string())
    })())
}

fn increment_digits(digits: &mut [u64], base: u64) -> bool {
    for d in digits.iter_mut() {
        *d += 1;
        if *d < base {
            return true;
        }
        *d = 0;
    }
    false
}

/// Deterministic 64-bit generator for the randomized consistency checks.
struct SplitMix64(u64);

impl SplitMix64 {
    fn new(seed: u64) -> Self {
        SplitMix64(seed)
    }

    fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }
}

/// Runs the whole matrix in order.
pub fn run_all() -> Vec<CriterionResult> {
    vec![
        c1_identity_suite(),
        c2_reconstruction_round_trip(),
        c3_k3_derivations(),
        c4_dt_derivations(),
        c5_sl2_recognition(),
        c6_automorphism_families(),
        c7_subalgebra_families(),
        c8_form_algebra_derivations(),
        c9_double_derivations(),
        c10_bracket_algebra_derivations(),
        c11_oracle_consistency(),
    ]
}

/// Parses Grassmann matrix data in the CLI `diag:...` syntax.
pub fn parse_bracket_data(
    n: usize,
    field: &Field,
    spec: &str,
) -> Result<Vec<Vec<GrassmannElement>>, Error> {
    if let Some(rest) = spec.strip_prefix("diag:") {
        let entries: Vec<&str> = rest.split(',').collect();
        if entries.len() != n {
            return Err(Error::Parse(format!("diagonal needs {} entries", n)));
        }
        let zero = GrassmannElement::zero(n, field.clone());
        let mut out = vec![vec![zero; n]; n];
        for (i, e) in entries.iter().enumerate() {
            out[i][i] = parse_grassmann(n, field, e)?;
        }
        Ok(out)
    } else if spec == "identity" {
        Ok(catalog::identity_bracket_data(n, field))
    } else {
        Err(Error::Parse(format!("unknown bracket data '{}'", spec)))
    }
}
