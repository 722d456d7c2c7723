//! mdbook cannot run a book's code listings against a dependency, so the
//! guide's chapters are included here as doc comments and `cargo test --doc`
//! keeps every snippet compiling and passing. One module per chapter makes
//! a failing doctest easy to trace back to its markdown file.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/exact-coefficients.md")]
pub mod exact_coefficients {}

#[doc = include_str!("../../../book/src/linear-algebra.md")]
pub mod linear_algebra {}

#[doc = include_str!("../../../book/src/superalgebras.md")]
pub mod superalgebras {}

#[doc = include_str!("../../../book/src/identities.md")]
pub mod identities {}

#[doc = include_str!("../../../book/src/catalog.md")]
pub mod catalog {}

#[doc = include_str!("../../../book/src/derivations.md")]
pub mod derivations {}

#[doc = include_str!("../../../book/src/automorphisms-subalgebras.md")]
pub mod automorphisms_subalgebras {}

#[doc = include_str!("../../../book/src/grassmann.md")]
pub mod grassmann {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}

#[doc = include_str!("../../../book/src/verification-matrix.md")]
pub mod verification_matrix {}
