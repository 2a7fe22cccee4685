//! Query-complexity workbench for Boolean functions.
//!
//! Variable indices in the Rust API are zero-based (`0` is `x1`); every text
//! and JSON format uses the one-based `x1, x2, ...` naming.

pub mod boolfun;
pub mod certify;
pub mod error;
pub mod families;
pub mod mmbent;

pub use error::{Error, ParseError, Result};
pub mod ptrees;
pub mod qsim;
pub mod trees;

mod json;
mod search;
