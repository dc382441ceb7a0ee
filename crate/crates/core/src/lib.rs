//! Exact algebra for the quintuplet invariant of closed 3-manifolds:
//! abelian groups, trivectors, graph groups, spin spaces, invariant
//! records, formal surgery and the Y-equivalence deciders.

pub mod arith;
pub mod cli;
pub mod decide;
pub mod error;
pub mod fgab;
pub mod invariants;
pub mod io;
pub mod sample;
pub mod snf;
pub mod spin;
pub mod surgery;
pub mod trivector;
pub mod verify;
pub mod ygraph;

pub use error::{Error, Result};
