//! Guaranteed lower bounds on the positive eigenvalues of symmetric
//! saddle-point matrices `K = [[A, B^T], [B, 0]]` whose leading block `A` is
//! only positive semidefinite, together with the dense oracle that certifies
//! them.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod error;
pub mod harness;
pub mod io;
pub mod linalg;
pub mod problems;

pub use bounds::{BoundKind, BoundReport, SaddleProblem, WeightMatrix};
pub use error::{Error, Result};
