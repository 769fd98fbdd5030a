//! Obligation verdicts for prioritized soft-constraint norms, and dispute-tree
//! explanations of how higher-level norms preempt lower-level ones as
//! situational knowledge grows.

pub mod cli;
pub mod dsa;
pub mod error;
pub mod explain;
pub mod hierarchy;
pub mod logic;
pub mod normfile;
pub mod render;
pub mod selfcheck;
pub mod semantics;

pub use error::{CapKind, Error, Result};
