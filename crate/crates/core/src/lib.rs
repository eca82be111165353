// Approximation coefficients are kept as published; `!(x > 0.0)` guards
// deliberately reject NaN.
#![allow(clippy::excessive_precision, clippy::neg_cmp_op_on_partial_ord)]

pub mod barrier;
pub mod error;
pub mod numkit;
pub mod roc;
pub mod testing;
pub mod weights;

pub use error::{Error, Result};
