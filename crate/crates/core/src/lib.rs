//! Positive definite independent (PDI) kernels on product spaces.
//!
//! - [`cnd`]: conditionally negative definite kernels and their transforms
//! - [`special`]: Bernstein and completely monotone generators
//! - [`pdi`]: PDI kernel families, centering, lifts and slices
//! - [`certify`]: eigenvalue certification of PD, CND and PDI Grams
//! - [`independence`]: the dependence statistic and its permutation test
//! - [`cli`]: the `pdik` command line front end
//!
//! Runnable walkthroughs live in `examples/`.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::type_complexity)]

pub mod certify;
pub mod cli;
pub mod cnd;
pub mod error;
pub mod independence;
pub mod linalg;
pub mod pdi;
pub mod special;

pub use error::{Error, Result};
