//! The user guide, embedded as rustdoc so its code samples compile and run
//! as doc-tests.
//!
//! Each module below mirrors one chapter of the rendered book under
//! `book/`; the markdown source is shared verbatim via `include_str!`, so
//! the guide can never drift from the library without a test failing.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/bases.md")]
pub mod bases {}

#[doc = include_str!("../../../book/src/operators.md")]
pub mod operators {}

#[doc = include_str!("../../../book/src/moduli.md")]
pub mod moduli {}

#[doc = include_str!("../../../book/src/estimates.md")]
pub mod estimates {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
