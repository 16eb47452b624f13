//! Exact-arithmetic tools for polynomial identities: free algebra arithmetic,
//! symmetric group algebras, Capelli T-ideal membership, Young diagram
//! combinatorics, evaluation in finite-dimensional algebras and sparse-identity
//! rewriting.

pub mod delta;
pub mod error;
pub mod evalalg;
pub mod freealg;
pub mod linalg;
pub mod report;
pub mod scalar;
pub mod sparsered;
pub mod symgroup;
pub mod tideal;
pub mod young;

pub use error::{Error, Result};
pub use scalar::{Domain, Scalar};
