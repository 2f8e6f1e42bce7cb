//! Quasi-linear two-source extraction over `GF(2^s)`.

pub mod bitvec;
pub mod error;
pub mod extractor;
pub mod generator;
pub mod gf2x;
pub mod ntt;
pub mod params;

pub use bitvec::BitVector;
pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/fields.md")]
    mod fields {}
    #[doc = include_str!("../../../book/src/ntt.md")]
    mod ntt {}
    #[doc = include_str!("../../../book/src/generator.md")]
    mod generator {}
    #[doc = include_str!("../../../book/src/extractor.md")]
    mod extractor {}
    #[doc = include_str!("../../../book/src/parameters.md")]
    mod parameters {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
