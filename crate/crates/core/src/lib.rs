//! Log-domain permanents of random matrices with heavy-tailed positive
//! entries.
//!
//! The crate computes permanents exactly (enumeration, Ryser's formula,
//! a subset dynamic program), estimates them by sequential importance
//! sampling, certifies lower and upper bounds for matrices beyond exact
//! range, and runs the experiments that track `log perm A / (m log n)`
//! against `max(1, beta)` for Pareto-type entries.
//!
//! Every positive quantity is carried as a natural logarithm. Lattice
//! entries such as `exp(1.5^25)` have no linear-domain representation in
//! any binary float format.

pub mod asymstats;
pub mod certify;
pub mod error;
pub mod harness;
pub mod matrixgen;
pub mod numerics;
pub mod permcore;
pub mod randsrc;

pub use error::{Error, Result};
pub use matrixgen::{LogMatrix, SubmatrixSelector};
pub use numerics::{LogReal, SignedLogReal};
pub use permcore::{Engine, PermResult};
pub use randsrc::{DistSpec, SeedSpec};
