//! Translate first-order TPTP problems and E prover TSTP refutations into
//! Mizar-syntax articles.
pub mod fol;
pub mod tptp;
pub use fol::{Clause, Formula, Literal, Signature, Substitution, Symbol, SymbolKind, Term};
pub use tptp::{parse_derivation, parse_formula, parse_problem, serialize, AnnotatedFormula, Role, Source};
pub mod derivation;
pub mod obvious;
pub mod skolem;
pub mod expand;
pub mod mizar;
pub mod compress;
pub mod pipeline;
mod error;
pub use error::Error;
