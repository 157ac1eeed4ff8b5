//! Validation of planning models with an SMT solver.
//!
//! Models are written in the `.tsm` s-expression format ([`dsl`]), compiled
//! into SMT-LIB scripts that ask whether a valid final state exists or whether
//! a bounded plan reaches one ([`encoder`]), handed to an external solver
//! ([`solver`]), and checked against exhaustive search ([`oracle`]).

pub mod dsl;
pub mod encoder;
pub mod model;
pub mod oracle;
pub mod solver;
