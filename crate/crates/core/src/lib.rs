//! Publication relatedness over hierarchical controlled vocabularies.
//!
//! The crate ingests a term vocabulary (with dotted tree numbers encoding the
//! hierarchy) and a corpus of indexed publications, and computes ten
//! relatedness measures between publication pairs: two co-occurrence cosines
//! and eight shortest-path distance aggregations over the term graph. A
//! benchmark harness evaluates any measure against graded relevance
//! judgements with a rank-based effect size and a seeded sampling classifier.

pub mod bench;
pub mod corpus;
pub mod error;
pub mod graph;
pub mod ic;
pub mod index;
pub mod measures;
pub mod stats;
pub mod vocab;

pub use error::{Error, Result};
