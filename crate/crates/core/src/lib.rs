#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bidcurve;
pub mod error;
pub mod h2curve;
pub mod lp;
pub mod opf;
pub mod dataset;
pub mod scenario;
pub mod metrics;
pub mod sim;
pub mod rtsgmlc;
pub mod cli;
