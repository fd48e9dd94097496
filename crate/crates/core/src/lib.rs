pub mod cli;
pub mod convert;
pub mod error;
pub mod greeks;
pub mod implied;
pub mod pricing;
mod root;
pub mod special;
pub mod terms;

pub use error::{Error, Result};
pub use terms::{LognormalVol, NormalVol, OptionTerms, Vol};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/special.md")]
    mod special {}
    #[doc = include_str!("../../../book/src/pricing.md")]
    mod pricing {}
    #[doc = include_str!("../../../book/src/implied.md")]
    mod implied {}
    #[doc = include_str!("../../../book/src/conversion.md")]
    mod conversion {}
    #[doc = include_str!("../../../book/src/greeks.md")]
    mod greeks {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
