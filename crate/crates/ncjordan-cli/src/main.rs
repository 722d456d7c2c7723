//! Command-line front end: algebra construction, identity verification,
//! derivation/automorphism/subalgebra reports and the verification matrix.
//!
//! Exit codes: 0 = pass, 1 = an identity or check failed, 2 = malformed
//! input, 3 = search budget exceeded.

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use ncjordan::acceptance;
use ncjordan::catalog;
use ncjordan::derivation;
use ncjordan::field::Field;
use ncjordan::grassmann::{self, parse_grassmann};
use ncjordan::identities;
use ncjordan::json::{algebra_from_json, AlgebraJson, DerivationSpaceJson};
use ncjordan::morphism;
use ncjordan::superalg::SuperAlgebra;
use ncjordan::{Error, FieldValue};

#[derive(Parser)]
#[command(name = "ncjordan", about = "Exact workbench for noncommutative Jordan superalgebras", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<std::path::PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Check the defining identities of an algebra (flexibility, the cyclic
    /// operator identity, the Jordan superidentity on the symmetrization,
    /// the Poisson-bracket law for the commutator, and product recovery).
    Verify(AlgebraSelector),
    /// Compute the derivation superalgebra: dimensions, bases, closure.
    Derive(AlgebraSelector),
    /// Enumerate all automorphisms over a prime field.
    Aut(OracleArgs),
    /// Enumerate all multiplicatively closed subspaces of one dimension.
    Subalg(SubalgArgs),
    /// Search for an isomorphism between two algebras over a prime field.
    Isosearch(IsoArgs),
    /// Grassmann-side computations on bracket algebras.
    Grassmann(GrassmannArgs),
    /// Run the whole verification matrix and print one line per entry.
    Matrix,
}

#[derive(Args, Clone)]
struct AlgebraSelector {
    /// Catalog family: k3 | dt | uvf | jgamma | jgammaA | gammaND.
    family: Option<String>,
    /// Field: q, gfP (e.g. gf5), or ratfunc:v1,v2,...
    #[arg(long)]
    field: Option<String>,
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long)]
    beta: Option<String>,
    #[arg(long)]
    gamma: Option<String>,
    #[arg(long)]
    t: Option<String>,
    /// Generator count for the Grassmann-based families.
    #[arg(long)]
    n: Option<usize>,
    /// Even deformation element for jgammaA, e.g. "x1^x2".
    #[arg(long, name = "A")]
    a_elem: Option<String>,
    /// Bracket data for gammaND: identity | diag:f1,f2,...
    #[arg(long)]
    a: Option<String>,
    /// Custom algebra from a JSON spec file.
    #[arg(long)]
    json: Option<std::path::PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    selector: AlgebraSelector,
    /// Candidate budget for exhaustive searches.
    #[arg(long, default_value_t = morphism::DEFAULT_SEARCH_BUDGET)]
    budget: u128,
}

#[derive(Args)]
struct SubalgArgs {
    #[command(flatten)]
    selector: AlgebraSelector,
    /// Dimension of the subspaces to enumerate.
    #[arg(long)]
    dim: usize,
    #[arg(long, default_value_t = morphism::DEFAULT_SEARCH_BUDGET)]
    budget: u128,
}

#[derive(Args)]
struct IsoArgs {
    #[command(flatten)]
    selector: AlgebraSelector,
    /// JSON spec of the second algebra.
    #[arg(long)]
    json_b: Option<std::path::PathBuf>,
    /// Or a second catalog selector in compact form, e.g. "k3:2,0,0".
    #[arg(long)]
    b: Option<String>,
    #[arg(long, default_value_t = morphism::DEFAULT_SEARCH_BUDGET)]
    budget: u128,
}

#[derive(Args)]
struct GrassmannArgs {
    /// Subcommand: gras-der | cent-ann.
    verb: String,
    #[arg(long)]
    n: usize,
    /// Bracket data: identity | diag:f1,f2,...
    #[arg(long)]
    a: String,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((report, ok)) => {
            let text = serde_json::to_string_pretty(&report).expect("serializable");
            if let Some(path) = &cli.out {
                if let Err(e) = std::fs::write(path, text) {
                    eprintln!("cannot write report: {}", e);
                    return ExitCode::from(2);
                }
            } else {
                println!("{}", text);
            }
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            let code = match &e {
                Error::SearchTooLarge(_, _) => 3u8,
                _ => 2u8,
            };
            eprintln!("{}", json!({"error": e.to_string()}));
            ExitCode::from(code)
        }
    }
}

fn parse_field(spec: Option<&str>, selector: &AlgebraSelector) -> Result<Field, Error> {
    if let Some(spec) = spec {
        if spec == "q" {
            return Ok(Field::Q);
        }
        if let Some(p) = spec.strip_prefix("gf") {
            let p: u64 = p
                .parse()
                .map_err(|_| Error::Parse(format!("bad prime in '{}'", spec)))?;
            return Ok(Field::Fp(p));
        }
        if let Some(vars) = spec.strip_prefix("ratfunc:") {
            return Ok(Field::rational_functions(
                vars.split(',').map(|s| s.trim().to_string()).collect::<Vec<_>>(),
            ));
        }
        return Err(Error::Parse(format!("unknown field '{}'", spec)));
    }
    // No explicit field: collect variable names from symbolic parameters.
    let mut vars: Vec<String> = Vec::new();
    for p in [&selector.alpha, &selector.beta, &selector.gamma, &selector.t]
        .into_iter()
        .flatten()
    {
        if p.chars().next().is_some_and(|c| c.is_ascii_alphabetic())
            && !vars.contains(p)
        {
            vars.push(p.clone());
        }
    }
    if vars.is_empty() {
        Ok(Field::Q)
    } else {
        Ok(Field::rational_functions(vars))
    }
}

fn param(field: &Field, text: Option<&str>, default_zero: bool) -> Result<FieldValue, Error> {
    match text {
        Some(t) => field.parse(t),
        None => Ok(if default_zero { field.zero() } else { field.zero() }),
    }
}

fn build_algebra(selector: &AlgebraSelector) -> Result<SuperAlgebra, Error> {
    if let Some(path) = &selector.json {
        let text = std::fs::read_to_string(path)?;
        return algebra_from_json(&text);
    }
    let family = selector
        .family
        .as_deref()
        .ok_or_else(|| Error::Parse("missing family or --json".into()))?;
    let field = parse_field(selector.field.as_deref(), selector)?;
    match family {
        "k3" => {
            let alpha = param(&field, selector.alpha.as_deref(), true)?;
            let beta = param(&field, selector.beta.as_deref(), true)?;
            let gamma = param(&field, selector.gamma.as_deref(), true)?;
            catalog::make_k3(&alpha, &beta, &gamma)
        }
        "dt" => {
            let t = param(&field, selector.t.as_deref(), true)?;
            let alpha = param(&field, selector.alpha.as_deref(), true)?;
            let beta = param(&field, selector.beta.as_deref(), true)?;
            let gamma = param(&field, selector.gamma.as_deref(), true)?;
            catalog::make_dt(&t, &alpha, &beta, &gamma)
        }
        "jgamma" => {
            let n = selector.n.ok_or_else(|| Error::Parse("jgamma needs --n".into()))?;
            catalog::make_j_gamma(n, &field)
        }
        "jgammaA" => {
            let n = selector.n.ok_or_else(|| Error::Parse("jgammaA needs --n".into()))?;
            let text = selector
                .a_elem
                .as_deref()
                .ok_or_else(|| Error::Parse("jgammaA needs --A".into()))?;
            let a = parse_grassmann(n, &field, text)?;
            catalog::make_j_gamma_a(n, &a)
        }
        "gammaND" => {
            let n = selector.n.ok_or_else(|| Error::Parse("gammaND needs --n".into()))?;
            let spec = selector
                .a
                .as_deref()
                .ok_or_else(|| Error::Parse("gammaND needs --a".into()))?;
            let data = acceptance::parse_bracket_data(n, &field, spec)?;
            catalog::make_gamma_nd(n, &data)
        }
        "uvf" => Err(Error::Parse(
            "uvf members are described by a JSON spec; use --json".into(),
        )),
        other => Err(Error::Parse(format!("unknown family '{}'", other))),
    }
}

fn run(cli: &Cli) -> Result<(serde_json::Value, bool), Error> {
    match &cli.command {
        Command::Verify(sel) => {
            let alg = build_algebra(sel)?;
            let flexible = identities::check_flexible(&alg);
            let ncj = identities::check_noncomm_jordan(&alg);
            let plus = alg.plus_algebra()?;
            let jordan = identities::check_jordan_super(&plus)?;
            let bracket = alg.commutator_tensor();
            let poisson = identities::check_poisson_bracket(&plus, &bracket);
            let back = identities::reconstruct(&plus, &bracket)?;
            let round_trip = back.table() == alg.table();
            let ok = flexible.passed && ncj.passed && jordan.passed && poisson.passed && round_trip;
            let report = json!({
                "algebra": AlgebraJson::from_algebra(&alg),
                "flexible": flexible,
                "noncommutative_jordan": ncj,
                "jordan_super_on_plus": jordan,
                "poisson_bracket": poisson,
                "reconstruction_round_trip": round_trip,
                "pass": ok,
            });
            Ok((report, ok))
        }
        Command::Derive(sel) => {
            let alg = build_algebra(sel)?;
            let space = derivation::derivation_space(&alg);
            let closure = derivation::closure_check(&alg, &space);
            let report = json!({
                "algebra": AlgebraJson::from_algebra(&alg),
                "derivations": DerivationSpaceJson::from_space(&space),
                "closure": closure,
            });
            Ok((report, closure.closed))
        }
        Command::Aut(args) => {
            let alg = build_algebra(&args.selector)?;
            let auts = morphism::enumerate_automorphisms(&alg, args.budget)?;
            let group = morphism::is_group(&alg, &auts);
            let report = json!({
                "algebra": AlgebraJson::from_algebra(&alg),
                "count": auts.len(),
                "group_closed": group,
                "automorphisms": auts
                    .iter()
                    .map(|m| ncjordan::json::matrix_strings(&m.matrix))
                    .collect::<Vec<_>>(),
            });
            Ok((report, group))
        }
        Command::Subalg(args) => {
            let alg = build_algebra(&args.selector)?;
            let subs = morphism::enumerate_subalgebras(&alg, args.dim, args.budget)?;
            let report = json!({
                "algebra": AlgebraJson::from_algebra(&alg),
                "dim": args.dim,
                "count": subs.len(),
                "witnesses": subs
                    .iter()
                    .map(|w| ncjordan::json::matrix_strings(&w.basis))
                    .collect::<Vec<_>>(),
            });
            Ok((report, true))
        }
        Command::Isosearch(args) => {
            let a = build_algebra(&args.selector)?;
            let b = if let Some(path) = &args.json_b {
                algebra_from_json(&std::fs::read_to_string(path)?)?
            } else if let Some(compact) = &args.b {
                build_compact(compact, &args.selector)?
            } else {
                return Err(Error::Parse("isosearch needs --json-b or --b".into()));
            };
            let found = morphism::isomorphism_search(&a, &b, args.budget)?;
            let report = json!({
                "a": AlgebraJson::from_algebra(&a),
                "b": AlgebraJson::from_algebra(&b),
                "isomorphic": found.is_some(),
                "map": found.map(|m| ncjordan::json::matrix_strings(&m.matrix)),
            });
            Ok((report, true))
        }
        Command::Grassmann(args) => {
            let field = Field::Q;
            let data = acceptance::parse_bracket_data(args.n, &field, &args.a)?;
            match args.verb.as_str() {
                "gras-der" => {
                    let even = grassmann::gras_der_solve(args.n, &data, ncjordan::Parity::Even)?;
                    let odd = grassmann::gras_der_solve(args.n, &data, ncjordan::Parity::Odd)?;
                    let show = |sols: &[grassmann::WnDerivation]| -> Vec<Vec<String>> {
                        sols.iter()
                            .map(|d| d.components.iter().map(|c| c.to_string()).collect())
                            .collect()
                    };
                    let report = json!({
                        "n": args.n,
                        "even_dim": even.len(),
                        "odd_dim": odd.len(),
                        "even_basis": show(&even),
                        "odd_basis": show(&odd),
                    });
                    Ok((report, true))
                }
                "cent-ann" => {
                    let rep = grassmann::cent_ann_inclusion_check(args.n, &data)?;
                    let ok = rep.inclusion_holds;
                    Ok((serde_json::to_value(&rep)?, ok))
                }
                other => Err(Error::Parse(format!("unknown grassmann verb '{}'", other))),
            }
        }
        Command::Matrix => {
            let results = acceptance::run_all();
            let mut ok = true;
            for r in &results {
                println!(
                    "{:4} {:48} {}",
                    r.id,
                    r.name,
                    if r.passed { "pass" } else { "FAIL" }
                );
                if !r.passed {
                    ok = false;
                    println!("     {}", r.detail);
                }
            }
            let report = serde_json::to_value(&results)?;
            Ok((report, ok))
        }
    }
}

/// Compact selector "k3:a,b,g" or "dt:t,a,b,g" over a field taken from the
/// main selector.
fn build_compact(compact: &str, base: &AlgebraSelector) -> Result<SuperAlgebra, Error> {
    let (family, rest) = compact
        .split_once(':')
        .ok_or_else(|| Error::Parse("compact selector is family:params".into()))?;
    let field = parse_field(base.field.as_deref(), base)?;
    let parts: Vec<&str> = rest.split(',').collect();
    match family {
        "k3" => {
            if parts.len() != 3 {
                return Err(Error::Parse("k3 takes three parameters".into()));
            }
            catalog::make_k3(&field.parse(parts[0])?, &field.parse(parts[1])?, &field.parse(parts[2])?)
        }
        "dt" => {
            if parts.len() != 4 {
                return Err(Error::Parse("dt takes four parameters".into()));
            }
            catalog::make_dt(
                &field.parse(parts[0])?,
                &field.parse(parts[1])?,
                &field.parse(parts[2])?,
                &field.parse(parts[3])?,
            )
        }
        other => Err(Error::Parse(format!("unknown compact family '{}'", other))),
    }
}
