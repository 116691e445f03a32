// `!(x > 0.0)` guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod config;
mod dd;
pub mod error;
pub mod exec;
pub mod kpi;
pub mod optics;
pub mod photometry;
pub mod specfun;
pub mod stochastics;
pub mod sweep;
pub mod validation;

pub use config::LinkConfig;
pub use error::{Error, Result};
