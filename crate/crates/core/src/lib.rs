//! Privacy-utility trade-offs for locally private hypothesis testing.
//!
//! Compares classical ε-LDP mechanisms (row-stochastic matrices) with
//! classical-quantum mechanisms (one density operator per input) on two
//! testing tasks: symmetric testing, scored by the smallest pairwise Chernoff
//! information, and asymmetric testing against the uniform distribution,
//! scored by the smallest relative entropy.
//!
//! ```
//! use putlab::put;
//!
//! let p = put::curve_point(4, 1.0, 0.1, put::SweepOptions::default()).unwrap();
//! assert!(p.ratio_s.unwrap() > 1.0);
//! ```

pub mod checks;
pub mod divergences;
pub mod error;
pub mod hermitian;
pub mod mechanisms;
pub mod oracle;
pub mod put;
pub mod search;
pub mod states;
pub mod tolerance;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/privacy.md")]
    mod privacy {}
    #[doc = include_str!("../../../book/src/mechanisms.md")]
    mod mechanisms {}
    #[doc = include_str!("../../../book/src/utilities.md")]
    mod utilities {}
    #[doc = include_str!("../../../book/src/tradeoffs.md")]
    mod tradeoffs {}
    #[doc = include_str!("../../../book/src/decomposition.md")]
    mod decomposition {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
