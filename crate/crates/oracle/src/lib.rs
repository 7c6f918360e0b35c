//! Brute-force reference implementations for validating the engines of `desmod-core`.
//!
//! Nothing here reuses the engines' traversal, subset-construction or composition
//! code: products are rebuilt from module transition lists and every verdict is taken
//! from an explicit observer or pair graph with naive cycle tests.

pub mod commutation;
pub mod error;
pub mod explicit;
pub mod random;
pub mod tm_run;
pub mod verdicts;

pub use commutation::oracle_commutation;
pub use error::{OracleError, Result};
pub use explicit::{explicit_product, Explicit};
pub use tm_run::{encodes_accepting_run, run_string};
pub use verdicts::{
    explicit_observer, oracle_adiag, oracle_detectability, oracle_estimate, oracle_opacity, Answer,
    BoundedSemantics, DetectVariant, ObserverGraph,
};
