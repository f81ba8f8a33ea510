//! Generalized semiring parsing for synchronous grammars.
//!
//! One abstract parsing algorithm ([`engine::parse`]) is parameterized by a
//! logic, a grammar evaluator, a semiring, a search strategy and a
//! termination condition. Swapping the logic and grammar turns it into a
//! multiparser, a translator, a hierarchical or word aligner, or the
//! expectation step of parameter estimation.

pub mod align;
pub mod corpus;
pub mod dspan;
pub mod engine;
pub mod error;
pub mod estimation;
pub mod evaluate;
pub mod grammar;
pub mod logic;
pub mod sample;
pub mod semiring;
pub mod translate;

pub use error::{Error, Result};
