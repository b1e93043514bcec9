//! Named-entity disambiguation engine. Resolves name mentions in text
//! against a knowledge base using either collective graph coherence or a
//! per-query entity topic model, and benchmarks both strategies.

pub mod cli;
pub mod deadline;
pub mod error;
pub mod graph;
pub mod harness;
pub mod index;
pub mod kb;
pub mod service;
pub mod textproc;
pub mod topic;

#[doc(hidden)]
pub mod testsupport;

pub use deadline::Deadline;
pub use error::{Error, Result};
