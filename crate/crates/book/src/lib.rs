//! Hosts the guide's chapters as doc comments so `cargo test --doc` runs
//! every fenced Rust block in `book/src`. mdbook renders the same files; a
//! failing snippet fails this crate's doc tests.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/getting-started.md")]
pub mod getting_started {}

#[doc = include_str!("../../../book/src/vocabulary.md")]
pub mod vocabulary {}

#[doc = include_str!("../../../book/src/information-content.md")]
pub mod information_content {}

#[doc = include_str!("../../../book/src/term-distance.md")]
pub mod term_distance {}

#[doc = include_str!("../../../book/src/measures.md")]
pub mod measures {}

#[doc = include_str!("../../../book/src/benchmarking.md")]
pub mod benchmarking {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}

#[doc = include_str!("../../../book/src/file-formats.md")]
pub mod file_formats {}
