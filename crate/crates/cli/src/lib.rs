#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bundled;
pub mod config;
pub mod error;
pub mod record;
pub mod runner;
