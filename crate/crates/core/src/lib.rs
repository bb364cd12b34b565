// `!(x > 0.0)` is used on purpose: it rejects NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod coverage;
pub mod error;
pub mod montecarlo;
pub mod netmodel;
pub mod optimize;
pub mod quad;
pub mod shotprocess;
pub mod sweep;
pub mod validation;
pub mod vse;
