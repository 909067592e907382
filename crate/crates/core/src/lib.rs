//! Kleene algebra with tests, abstract interpretation and local completeness
//! logic, all over finite models.

pub mod domain;
pub mod error;
pub mod logic;
pub mod model;
pub mod pointset;
pub mod semantics;
pub mod term;

pub use error::{Error, Result};
