//! Exact truth-set semantics for metric interval temporal logic.

pub mod time;
pub mod formula;
pub mod signal;
pub mod eval;
pub mod witness;
pub mod refuter;
