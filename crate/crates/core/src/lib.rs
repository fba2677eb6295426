pub mod causality;
pub mod error;
pub mod harmonic;
pub mod ingest;
pub mod memory;
pub mod pipeline;
pub mod regress;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/overview.md")]
    mod overview {}
    #[doc = include_str!("../../../book/src/ingest.md")]
    mod ingest {}
    #[doc = include_str!("../../../book/src/harmonic.md")]
    mod harmonic {}
    #[doc = include_str!("../../../book/src/memory.md")]
    mod memory {}
    #[doc = include_str!("../../../book/src/causality.md")]
    mod causality {}
    #[doc = include_str!("../../../book/src/pipeline.md")]
    mod pipeline {}
}
