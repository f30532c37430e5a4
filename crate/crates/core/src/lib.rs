// negated float comparisons throughout are deliberate NaN guards
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod asymptotics;
pub mod error;
pub mod experiments;
pub mod mittag_leffler;
pub mod path;
pub mod quadrature;
pub mod rng;
pub mod smallball;
pub mod stable;
pub mod stats;

pub use error::{Error, Result};
