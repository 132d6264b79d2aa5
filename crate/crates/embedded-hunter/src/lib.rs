//! Black-box minimization of high-dimensional functions with low effective
//! dimension, via hierarchical tree search over random Gaussian embeddings.
//!
//! The crate is organized bottom-up:
//!
//! - [`spaces`]: boxes, low/high points, and seeded RNG streams;
//! - [`embedding`]: Gaussian matrices as regenerable tags, and the clipped
//!   projection `clip(A·y)`;
//! - [`functions`]: scalable test functions with known optima;
//! - [`partition`]: the exact-rational K-ary partition tree;
//! - [`optimizers`]: the main optimizer and its comparators;
//! - [`theorychecks`]: Monte-Carlo checks of the embedding's guarantees;
//! - [`bench`]: the deterministic experiment harness, CSV output, and SVG
//!   plots.
//!
//! The guide in `book/` walks through each layer with runnable examples;
//! every code block there compiles and runs as a doc-test of this crate.

pub mod bench;
pub mod embedding;
pub mod functions;
pub mod optimizers;
pub mod partition;
pub mod spaces;
pub mod theorychecks;

// Compile and run the guide's code blocks as doc-tests so the book can
// never drift from the library.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/spaces-and-embeddings.md")]
    mod spaces_and_embeddings {}
    #[doc = include_str!("../../../book/src/test-functions.md")]
    mod test_functions {}
    #[doc = include_str!("../../../book/src/partition-tree.md")]
    mod partition_tree {}
    #[doc = include_str!("../../../book/src/optimizers.md")]
    mod optimizers {}
    #[doc = include_str!("../../../book/src/theory-checks.md")]
    mod theory_checks {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
}
