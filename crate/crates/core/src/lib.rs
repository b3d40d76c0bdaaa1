#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod codespace;
pub mod config;
pub mod contractions;
pub mod error;
pub mod ifscore;
pub mod metricsets;
pub mod raster;
pub mod verifier;

pub use error::{Error, Result};
