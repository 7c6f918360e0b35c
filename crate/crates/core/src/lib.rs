//! Modular discrete event systems: composition, state estimation and verification of
//! detectability, opacity and A-diagnosability, plus hardness-reduction generators.

pub mod automaton;
pub mod checkers;
pub mod compose;
pub mod error;
pub mod gadgets;
pub mod graph;
pub mod observation;
pub mod project;
pub mod system;

pub use automaton::{
    validate_des, Alphabet, Des, EventId, Nfa, NfaBuilder, StateId, ValidationReport,
};
pub use compose::{parallel_compose, validate_system, LazyProduct, DEFAULT_BUDGET};
pub use error::{Error, Result};
pub use system::{check_private_unobservable, CompositeState, ModularSystem, SecretSpec};
