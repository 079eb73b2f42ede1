#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod exprlang;
pub mod fields;
pub mod forms;
pub mod frames;
pub mod io;
pub mod jet;
pub mod quaternion;
pub mod sampling;
pub mod topology;
pub mod verify;

pub use error::{Error, Result};
