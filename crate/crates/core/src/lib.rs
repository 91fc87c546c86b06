//! Attenuated ray transforms of arbitrary order, their transport identities
//! and angular moments.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::too_many_arguments)]

pub mod art;
pub mod calculus;
pub mod cli;
pub mod error;
pub mod fields;
pub mod geometry;
pub mod moments;
pub mod report;
pub mod tensor;

pub use error::{ArtError, Result};

#[cfg(test)]
#[path = "../tests/common/oracle.rs"]
pub(crate) mod oracle;
