//! Generators for the hardness constructions: the exponential counter and the Turing
//! machine reductions to weak detectability, opacity and A-diagnosability.

mod counter;
mod membership;
mod reduction;
mod tm;

pub use counter::{gen_counter, CounterParams};
pub use membership::FragmentMembership;
pub use reduction::{
    gen_adiag_reduction, gen_detectability_reduction, gen_opacity_reduction, Fragment,
    InventoryEntry, ReductionKind, ReductionOutput, BOX, DIAMOND, FAULT,
};
pub use tm::{Move, NeighborTable, Rule, Symbol, TmRun, TuringMachineSpec};
