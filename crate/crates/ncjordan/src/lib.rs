//! An exact-arithmetic workbench for simple noncommutative Jordan
//! superalgebras.
//!
//! The crate builds the classical families K₃(α,β,γ), D_t(α,β,γ),
//! U(V,f,⋆), the Kantor doubles J(Γₙ,A) and the bracket algebras Γₙ(𝒟)
//! from their structure constants, verifies the defining superidentities
//! symbolically over rational-function fields, and reproduces the known
//! structural facts about their subalgebras, automorphisms and derivations
//! by exact linear algebra, cross-checked with exhaustive finite-field
//! searches.
//!
//! Everything is exact: coefficients live in ℚ, GF(p) or a multivariate
//! rational-function field ([`field`]), and there is no floating point
//! anywhere.

pub mod acceptance;
pub mod catalog;
pub mod derivation;
pub mod field;
pub mod grassmann;
pub mod identities;
pub mod json;
pub mod linalg;
pub mod morphism;
pub mod superalg;

use thiserror::Error as ThisError;

/// Everything that can go wrong across the workbench.
#[derive(Debug, ThisError)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("field mismatch: {left} vs {right}")]
    FieldMismatch { left: String, right: String },
    #[error("denominator vanishes at the binding point: {0}")]
    PoleAtPoint(String),
    #[error("unbound variable: {0}")]
    UnboundVariable(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("elements belong to different algebras")]
    AlgebraMismatch,
    #[error("element is not parity-homogeneous")]
    NonHomogeneous,
    #[error("the field has characteristic two")]
    CharacteristicTwo,
    #[error("the algebra is not supercommutative")]
    NotSupercommutative,
    #[error("structure constants violate the parity grading at ({0},{1},{2})")]
    GradingViolation(usize, usize, usize),
    #[error("invalid algebra data: {0}")]
    InvalidAlgebra(String),
    #[error("bilinear form is degenerate")]
    FormDegenerate,
    #[error("bilinear form is not supersymmetric")]
    FormNotSupersymmetric,
    #[error("star product is not compatible with the form")]
    StarNotCompatible,
    #[error("star product is not superanticommutative")]
    StarNotAnticommutative,
    #[error("the chosen Grassmann element must be even")]
    AOdd,
    #[error("bracket data does not define a Poisson bracket: {0}")]
    BracketNotPoisson(String),
    #[error("map is not a derivation")]
    NotDerivation,
    #[error("map does not respect the parity grading")]
    ParityViolation,
    #[error("expected a space of dimension {expected}, got {got}")]
    WrongDimension { expected: usize, got: usize },
    #[error("unknown subalgebra family: {0}")]
    UnknownFamily(String),
    #[error("search space of size {0} exceeds the budget of {1}")]
    SearchTooLarge(u128, u128),
    #[error("grassmann elements have different generator counts")]
    SizeMismatch,
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub use field::{Field, FieldValue};
pub use superalg::{Element, LinearMap, Parity, SuperAlgebra};
