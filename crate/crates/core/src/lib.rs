//! Relational graphs of vision models.
//!
//! [`model_io`] reads weight archives and connectome edge lists, [`builders`]
//! turns layer weights into aggregation and affine graphs, [`graph`] holds the
//! graph types and measures, and [`analysis`] relates measures to accuracy
//! and to biological networks.

pub mod analysis;
pub mod builders;
pub mod graph;
pub mod model_io;
pub mod reference;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/intro.md")]
    mod intro {}
    #[doc = include_str!("../../../book/src/archive.md")]
    mod archive {}
    #[doc = include_str!("../../../book/src/graphs.md")]
    mod graphs {}
    #[doc = include_str!("../../../book/src/builders.md")]
    mod builders {}
    #[doc = include_str!("../../../book/src/canonical.md")]
    mod canonical {}
    #[doc = include_str!("../../../book/src/analysis.md")]
    mod analysis {}
    #[doc = include_str!("../../../book/src/connectomes.md")]
    mod connectomes {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
