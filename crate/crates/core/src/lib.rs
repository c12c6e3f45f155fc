#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod detector;
pub mod error;
pub mod landauer;
pub mod linalg;
pub mod oracle;
pub mod quantum;
pub mod sts;
pub mod verify;
